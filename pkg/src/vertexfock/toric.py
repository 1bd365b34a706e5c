"""Reflexive polytope pairs, cones, fans, and lattice-point machinery.

Everything is exact rational double description at desk scale (ambient
dimension <= 4): polytope facets come from hyperplanes through
dimension-many vertices, cone facets from rank-1 nullspaces of
generator subsets, and duality is the polar construction
{y : x.y >= -1}.  The degree-one structure lives one rank up: M =
M1 + Z with deg = (0,...,0,1), the cone K is the cone over
(Delta1, 1), and Delta = Delta1 + deg is its degree-one slice.
"""

import json
import random
from dataclasses import dataclass
from ._rationals import Q
from itertools import combinations, product
from math import gcd



class ToricError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small exact linear helpers


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def _primitive(vec):
    g = 0
    for x in vec:
        g = gcd(g, abs(x if isinstance(x, int) else x.numerator))
    den = 1
    for x in vec:
        if hasattr(x, 'denominator') and x.denominator != 1:
            den = den * x.denominator // gcd(den, x.denominator)
    scaled = [int(x * den) for x in vec]
    g = 0
    for x in scaled:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(scaled)
    return tuple(x // g for x in scaled)


def _solve_square(rows, rhs):
    """Solve an exact square system; None if singular."""
    n = len(rows)
    a = [[Q(x) for x in row] + [Q(r)] for row, r in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def _nullspace_direction(rows, dim):
    """A nonzero integer vector orthogonal to dim-1 independent rows."""
    # Gaussian elimination on the rows, then back-substitute a free var.
    mat = [[Q(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for col in range(dim):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pv = mat[r][col]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(dim) if c not in pivots]
    if not free:
        return None
    sol = [Q(0)] * dim
    sol[free[0]] = Q(1)
    for i, col in enumerate(pivots):
        sol[col] = -mat[i][free[0]]
    return _primitive(sol)


def matrix_rank(rows):
    mat = [[Q(x) for x in row] for row in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pv = mat[rank][col]
        mat[rank] = [x / pv for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# polytopes


def convex_hull_facets(points):
    """Facets of a full-dimensional hull as (normal, rhs): n.x <= rhs.

    Brute-force supporting-hyperplane enumeration over dim-subsets;
    exact, intended for the handful of vertices reflexive fixtures have.
    """
    dim = len(points[0])
    facets = set()
    for subset in combinations(range(len(points)), dim):
        rows = [points[i] for i in subset]
        if dim == 1:
            normal = (1,)
        else:
            # hyperplane through the subset: normal orthogonal to differences
            diffs = [[rows[i][c] - rows[0][c] for c in range(dim)]
                     for i in range(1, dim)]
            normal = _nullspace_direction(diffs, dim)
            if normal is None:
                continue
        rhs = dot(normal, rows[0])
        vals = [dot(normal, p) for p in points]
        if all(v <= rhs for v in vals):
            facets.add((tuple(normal), rhs))
        if all(v >= rhs for v in vals):
            facets.add((tuple(-x for x in normal), -rhs))
    # keep only genuine facets (supporting dim affinely independent points)
    out = []
    for normal, rhs in sorted(facets):
        on = [p for p in points if dot(normal, p) == rhs]
        if len(on) >= dim and _affine_rank(on) >= dim - 1:
            out.append((normal, rhs))
    return out


def _affine_rank(points):
    if len(points) <= 1:
        return 0
    base = points[0]
    diffs = [[p[c] - base[c] for c in range(len(base))] for p in points[1:]]
    return matrix_rank(diffs)


def has_interior_origin(vertices):
    facets = convex_hull_facets(vertices)
    return all(rhs > 0 for _, rhs in facets)


def dual_polytope(vertices):
    """Vertices of {y : x.y >= -1 for all x}, the polar dual.

    Facet n.x <= r of the input (r > 0 since 0 is interior) dualizes to
    the vertex -n/r; a non-integral dual vertex means the input is not
    reflexive and raises.
    """
    vertices = [tuple(v) for v in vertices]
    dim = len(vertices[0])
    if _affine_rank(vertices) < dim:
        raise ToricError("polytope is not full-dimensional")
    facets = convex_hull_facets(vertices)
    if any(rhs <= 0 for _, rhs in facets):
        raise ToricError("origin is not interior")
    duals = []
    for normal, rhs in facets:
        vert = [Q(-n, rhs) for n in normal]
        if any(x.denominator != 1 for x in vert):
            raise ToricError(f"dual vertex {vert} is not a lattice point; "
                             "the pair is not reflexive")
        duals.append(tuple(int(x) for x in vert))
    return sorted(set(duals))


def is_reflexive_pair(delta1, delta1_star):
    try:
        dual = dual_polytope(delta1)
    except ToricError:
        return False
    return sorted(set(map(tuple, delta1_star))) == dual


def lattice_points(vertices):
    """All integral points of the hull, lexicographically sorted."""
    vertices = [tuple(v) for v in vertices]
    dim = len(vertices[0])
    facets = convex_hull_facets(vertices)
    if not facets and len(vertices) > 1:
        raise ToricError("unbounded or degenerate input")
    lo = [min(v[c] for v in vertices) for c in range(dim)]
    hi = [max(v[c] for v in vertices) for c in range(dim)]
    out = []
    for pt in product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        if all(dot(n, pt) <= r for n, r in facets):
            out.append(pt)
    return sorted(out)


# ---------------------------------------------------------------------------
# cones and fans


class Cone:
    """A rational polyhedral cone by generators and facet inequalities."""

    def __init__(self, generators):
        self.generators = [tuple(g) for g in generators]
        self.dim = len(self.generators[0]) if self.generators else 0
        self._facets = None
        self._span_rows = None

    def facet_normals(self):
        """Inequalities n.x >= 0 cutting the cone within its span."""
        if self._facets is None:
            self._facets = dual_cone_rays(self.generators, self.dim)
        return self._facets

    def contains(self, x):
        x = tuple(x)
        if not self.generators:
            return all(v == 0 for v in x)
        # must lie in the linear span
        if matrix_rank(self.generators) != matrix_rank(self.generators + [list(x)]):
            return False
        return all(dot(n, x) >= 0 for n in self.facet_normals())


def dual_cone_rays(generators, dim):
    """Generators of {y : g.y >= 0 for all g}, exact double description.

    Subset enumeration: every extreme ray of the dual lies on dim-1
    independent hyperplanes g.y = 0.  For lower-dimensional input cones
    the result includes the orthogonal complement directions with both
    signs, which is what membership testing needs.
    """
    gens = [tuple(g) for g in generators]
    if not gens:
        return []
    rays = set()
    rank = matrix_rank(gens)
    for size in range(min(dim - 1, len(gens)), -1, -1):
        for subset in combinations(range(len(gens)), size):
            rows = [gens[i] for i in subset]
            if rows and matrix_rank(rows) != len(rows):
                continue
            cand = _nullspace_candidates(rows, dim)
            for v in cand:
                for vv in (v, tuple(-x for x in v)):
                    if all(dot(g, vv) >= 0 for g in gens):
                        rays.add(vv)
    # drop rays expressible as nonnegative combos? at desk scale extra
    # valid inequalities are harmless for membership tests
    return sorted(rays)


def _nullspace_candidates(rows, dim):
    """Primitive spanning vectors of the nullspace of rows."""
    if not rows:
        rows = []
    mat = [[Q(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for col in range(dim):
        piv = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pv = mat[r][col]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(dim) if c not in pivots]
    out = []
    for fc in free:
        sol = [Q(0)] * dim
        sol[fc] = Q(1)
        for i, col in enumerate(pivots):
            sol[col] = -mat[i][fc]
        out.append(_primitive(sol))
    return out


@dataclass
class Fan:
    """Rays plus cones as ray-index sets; maximal cones listed first."""
    rays: list
    cones: list  # list of tuples of ray indices

    def cone_objects(self):
        return [Cone([self.rays[i] for i in idxs]) if idxs else Cone([])
                for idxs in self.cones]


def smith_invariant_ones(rows):
    """True iff the integer row span is a direct summand (all invariant
    factors 1); elementary-divisor criterion via integer elimination."""
    mat = [list(map(int, r)) for r in rows]
    if not mat:
        return True
    m, n = len(mat), len(mat[0])
    r = 0
    c = 0
    while r < m and c < n:
        piv = None
        best = None
        for i in range(r, m):
            for j in range(c, n):
                if mat[i][j] != 0 and (best is None or abs(mat[i][j]) < best):
                    best = abs(mat[i][j])
                    piv = (i, j)
        if piv is None:
            break
        i0, j0 = piv
        mat[r], mat[i0] = mat[i0], mat[r]
        for row in mat:
            row[c], row[j0] = row[j0], row[c]
        # reduce column and row
        reduced = True
        while reduced:
            reduced = False
            for i in range(m):
                if i != r and mat[i][c] != 0:
                    q = mat[i][c] // mat[r][c]
                    mat[i] = [a - q * b for a, b in zip(mat[i], mat[r])]
                    if mat[i][c] != 0:
                        mat[r], mat[i] = mat[i], mat[r]
                        reduced = True
            for j in range(n):
                if j != c and mat[r][j] != 0:
                    q = mat[r][j] // mat[r][c]
                    for row in mat:
                        row[j] -= q * row[c]
                    if mat[r][j] != 0:
                        for row in mat:
                            row[c], row[j] = row[j], row[c]
                        reduced = True
        if abs(mat[r][c]) != 1:
            return False
        r += 1
        c += 1
    return True


def is_smooth_fan(fan):
    """Every cone's primitive generators extend to a Z-basis."""
    for idxs in fan.cones:
        if not idxs:
            continue
        gens = [fan.rays[i] for i in idxs]
        for g in gens:
            if _primitive(g) != tuple(g):
                raise ToricError(f"ray {g} is not primitive")
        if not smith_invariant_ones(gens):
            return False
    return True


def extend_fan(fan):
    """Extend every cone in the deg* direction, one rank up.

    Each cone C1 becomes cone(C1 x {0}, deg*); the face closure is the
    set of subsets for the simplicial cones handled here.
    """
    dim = len(fan.rays[0]) if fan.rays else 0
    new_rays = [tuple(r) + (0,) for r in fan.rays]
    deg_star = tuple([0] * dim) + (1,)
    new_rays.append(deg_star)
    ds_index = len(new_rays) - 1
    cones = set()
    for idxs in fan.cones:
        extended = tuple(sorted(tuple(idxs) + (ds_index,)))
        # face closure: all subsets (cones here are simplicial)
        for size in range(len(extended) + 1):
            for sub in combinations(extended, size):
                cones.add(sub)
    cones.add((ds_index,))
    cones.add(())
    ordered = sorted(cones, key=lambda c: (-len(c), c))
    return Fan(new_rays, ordered)


def fan_support_contains(fan, x):
    return any(c.contains(x) for c in fan.cone_objects())


class _MembershipCache:
    def __init__(self, fan):
        self.fan = fan  # keep alive so the id key stays valid
        self.cones = fan.cone_objects()
        self.cache = {}

    def memberships(self, x):
        x = tuple(x)
        hit = self.cache.get(x)
        if hit is None:
            hit = frozenset(i for i, c in enumerate(self.cones) if c.contains(x))
            self.cache[x] = hit
        return hit


_membership_caches = {}


def in_common_cone(fan, n, n1):
    """True iff some closed cone of the fan contains both n and n1."""
    key = id(fan)
    cache = _membership_caches.get(key)
    if cache is None:
        cache = _MembershipCache(fan)
        _membership_caches[key] = cache
    return bool(cache.memberships(n) & cache.memberships(n1))


# ---------------------------------------------------------------------------
# reflexive data and coefficients


@dataclass
class ReflexivePair:
    rank_d1: int
    delta1: list
    delta1_star: list

    def __post_init__(self):
        if not is_reflexive_pair(self.delta1, self.delta1_star):
            raise ToricError("input polytopes are not a dual reflexive pair")

    def delta_points(self):
        """Lattice points of Delta = Delta1 + deg, as degree-one M points."""
        return [p + (1,) for p in lattice_points(self.delta1)]

    def delta_star_points(self):
        return [p + (1,) for p in lattice_points(self.delta1_star)]


@dataclass
class CoefficientMap:
    f: dict  # M point (tuple) -> Fraction
    g: dict  # N point (tuple) -> Fraction
    seed: int


def generic_coefficients(delta_points, delta_star_points, seed):
    """Deterministic pseudo-random nonzero small rationals from the seed.

    Numerators and denominators stay below 97; genericity is certified
    downstream by the two-seed agreement protocol.
    """
    rng = random.Random(seed)

    def value():
        num = 0
        while num == 0:
            num = rng.randrange(-97, 98)
        den = rng.randrange(1, 98)
        return Q(num, den)

    f = {tuple(p): value() for p in sorted(map(tuple, delta_points))}
    g = {tuple(p): value() for p in sorted(map(tuple, delta_star_points))}
    return CoefficientMap(f, g, seed)


# ---------------------------------------------------------------------------
# file formats


def polytope_to_json(pair, fan):
    return {
        "rank_d1": pair.rank_d1,
        "delta1_vertices": [list(v) for v in pair.delta1],
        "rays": [list(r) for r in fan.rays],
        "fan_cones": [list(c) for c in fan.cones],
    }


def polytope_from_json(data):
    rank = data["rank_d1"]
    delta1 = [tuple(v) for v in data["delta1_vertices"]]
    delta1_star = dual_polytope(delta1)
    rays = [tuple(r) for r in data["rays"]]
    cones = [tuple(c) for c in data["fan_cones"]]
    pair = ReflexivePair(rank, delta1, delta1_star)
    return pair, Fan(rays, cones)


def load_polytope_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return polytope_from_json(json.load(fh))


def save_polytope_file(path, pair, fan):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(polytope_to_json(pair, fan), fh, indent=1, sort_keys=True)
        fh.write("\n")


def coefficients_to_json(coeffs):
    return {
        "seed": coeffs.seed,
        "f": [[list(k), str(v)] for k, v in sorted(coeffs.f.items())],
        "g": [[list(k), str(v)] for k, v in sorted(coeffs.g.items())],
    }


def coefficients_from_json(data):
    f = {tuple(k): Q(v) for k, v in data["f"]}
    g = {tuple(k): Q(v) for k, v in data["g"]}
    return CoefficientMap(f, g, data.get("seed", 0))
