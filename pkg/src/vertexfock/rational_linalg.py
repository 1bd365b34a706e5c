"""Exact sparse linear algebra over the rationals.

Vectors are dicts mapping an arbitrary hashable index to a nonzero
rational.  Elimination is exact rational Gauss with rows normalized to
unit pivots; with the gmpy2 backend the canonicalization runs in C,
which beats hand-rolled fraction-free integer pivoting on the sparse
graded blocks this feeds (the rank engine behind the exact homology
computation, where wrong answers are worse than slow ones).
"""

from ._rationals import Q


class SparseEliminator:
    """Incremental echelon form of a growing family of sparse vectors."""

    def __init__(self):
        self.pivots = {}  # pivot index -> row normalized to pivot 1

    def reduce(self, vec):
        """Return vec reduced modulo the current row space."""
        row = {k: Q(v) for k, v in vec.items() if v}
        while row:
            piv = min(row)
            other = self.pivots.get(piv)
            if other is None:
                return row
            c = row.pop(piv)
            for k, v in other.items():
                if k == piv:
                    continue
                w = row.get(k, 0) - c * v
                if w:
                    row[k] = w
                else:
                    row.pop(k, None)
        return row

    def insert_reduced(self, row):
        """Store an already reduced nonzero row, normalized."""
        piv = min(row)
        c = row[piv]
        if c != 1:
            row = {k: v / c for k, v in row.items()}
        self.pivots[piv] = row

    def insert(self, vec):
        """Reduce vec against the basis; keep the remainder.  True if new."""
        row = self.reduce(vec)
        if not row:
            return False
        self.insert_reduced(row)
        return True

    @property
    def rank(self):
        return len(self.pivots)


def rank_of(vectors):
    """Rank of a family of sparse rational vectors."""
    elim = SparseEliminator()
    for v in vectors:
        elim.insert(v)
    return elim.rank


def intersection_dim(space_a, space_b):
    """dim(span(space_a) & span(space_b)) for lists of sparse vectors."""
    elim = SparseEliminator()
    ra = 0
    for v in space_a:
        if elim.insert(v):
            ra += 1
    joint = SparseEliminator()
    joint.pivots = dict(elim.pivots)
    rb = rank_of(space_b)
    rab = ra
    for v in space_b:
        if joint.insert(v):
            rab += 1
    return ra + rb - rab
