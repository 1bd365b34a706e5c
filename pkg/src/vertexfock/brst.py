"""The differential of Theorem-style reflexive-pair data and its exact
graded cohomology on finite windows of Fock_{M+N}^Sigma.

The odd generator state is

    sum_{m in Delta} f_m (m.Phi)_(-1)|m;0>  +
    sum_{n in Delta*} g_n (n.Psi)_(-1)|0;n>

and the operator is its zero mode, computed exactly by the lattice
vertex-operator machinery.  It preserves the conformal weight and the
U(1) charge and raises the step grading sigma = deg*.m + deg.n by one,
so each (weight, charge) block is a Z-graded cochain complex of
finite layers once sectors are confined to a window.

Windows are boxes: lattice coordinates bounded by a radius, N-charges
confined to the support of the extended fan, and sector weights bounded
below by a floor.  The computation is exact on the window; kernels use
the honest differential (images may leave the window and are tracked as
overflow coordinates), and per-layer validity notes whether the layer
below is charge-impossible, empty, or truncated.  Certification of the
reported dimensions is by re-running with an enlarged window and a
second coefficient seed, per the two flags in the report.
"""

import random
from dataclasses import dataclass, field
from ._rationals import Q

from .fock import Monomial, State, apply_raw
from .lattice import LatticeSystem, dot, sector_weight
from .ope import field_mode_apply
from .rational_linalg import SparseEliminator, intersection_dim
from .toric import (Cone, Fan, ReflexivePair, ToricError, extend_fan,
                    generic_coefficients, in_common_cone, is_smooth_fan)



class BRSTError(ValueError):
    pass


# ---------------------------------------------------------------------------
# reflexive data bundle


@dataclass
class ReflexiveData:
    pair: ReflexivePair
    fan1: Fan                      # fan in N1 subdividing the face fan of Delta1*
    swap_fan1: Fan = None          # fan in M1 for the mirror-swapped run
    name: str = ""

    def __post_init__(self):
        self.rank = self.pair.rank_d1 + 1
        self.sigma = extend_fan(self.fan1)
        self.system = LatticeSystem(self.rank)
        self.system_sigma = LatticeSystem(self.rank, sigma_fan=self.sigma)
        self.delta_points = self.pair.delta_points()
        self.delta_star_points = self.pair.delta_star_points()
        try:
            self.smooth = is_smooth_fan(self.fan1)
        except ToricError:
            self.smooth = False

    @property
    def d(self):
        return self.rank - 2

    def zero_sector(self):
        z = (0,) * self.rank
        return (z, z)

    def coefficients(self, seed):
        return generic_coefficients(self.delta_points, self.delta_star_points,
                                    seed)

    def swapped(self):
        if self.swap_fan1 is None:
            raise BRSTError("mirror swap requires the fan on the Delta1 side")
        pair = ReflexivePair(self.pair.rank_d1, self.pair.delta1_star,
                             self.pair.delta1)
        return ReflexiveData(pair, self.swap_fan1, swap_fan1=self.fan1,
                             name=self.name + "-swapped")


def build_brst_state(data, coeffs):
    """The odd weight-one state whose zero mode is the differential.

    One term per lattice point of Delta and of Delta*; coefficient
    domains must match the enumerated points exactly and be nonzero.
    """
    if sorted(coeffs.f) != sorted(map(tuple, data.delta_points)):
        raise BRSTError("f domain does not match the lattice points of Delta")
    if sorted(coeffs.g) != sorted(map(tuple, data.delta_star_points)):
        raise BRSTError("g domain does not match the lattice points of Delta*")
    if any(v == 0 for v in coeffs.f.values()) or \
       any(v == 0 for v in coeffs.g.values()):
        raise BRSTError("coefficients must be nonzero")
    out = State()
    for m, fm in sorted(coeffs.f.items()):
        out = out + fm * _term_state(data, m, True)
    for n, gn in sorted(coeffs.g.items()):
        out = out + gn * _term_state(data, n, False)
    return out


def _term_state(data, point, f_side):
    """(m.Phi)_(-1)|m;0> resp. (n.Psi)_(-1)|0;n> as a state."""
    system = data.system
    zero = (0,) * data.rank
    if f_side:
        base = (tuple(point), zero)
        gids = system.Phi
    else:
        base = (zero, tuple(point))
        gids = system.Psi
    vac = State.vacuum(base)
    out = State()
    for i, c in enumerate(point):
        if c:
            out = out + c * apply_raw(system, gids[i], -1, vac)
    return out


def brst_terms(data):
    """The individual odd term states, keyed for relinearization."""
    terms = []
    for m in sorted(map(tuple, data.delta_points)):
        terms.append((("f", m), _term_state(data, m, True)))
    for n in sorted(map(tuple, data.delta_star_points)):
        terms.append((("g", n), _term_state(data, n, False)))
    return terms


def brst_apply(data, coeffs, state, deformed=True):
    """The zero mode of the full operator applied to a state, exact."""
    system = data.system_sigma if deformed else data.system
    brst = build_brst_state(data, coeffs)
    return field_mode_apply(system, brst, 0, state)


# ---------------------------------------------------------------------------
# sector and basis windows


@dataclass
class Window:
    """Box bounds for the sector enumeration.

    radius bounds every lattice coordinate; weight_floor bounds sector
    weights below (dressing weights are cutoff - floor at worst);
    n-charges must lie in the support of the extended fan.
    """
    radius: int = 3
    weight_floor: Q = Q(-2)

    def grown(self, step=1):
        return Window(self.radius + step, self.weight_floor - step)


def default_window(data, cutoff):
    if data.rank <= 2:
        return Window(radius=4, weight_floor=Q(-2) - int(cutoff))
    return Window(radius=2, weight_floor=Q(-3, 2) - int(cutoff))


def _box(radius):
    return range(-radius, radius + 1)


def enumerate_sectors(data, cutoff, window, n_cone=None):
    """All sectors (m, n) inside the window with weight <= cutoff.

    m runs over a full box; n over the box intersected with the support
    of the extended fan (or a chart cone when given).
    """
    import itertools
    rank = data.rank
    cutoff = Q(cutoff)
    sigma_cones = [c for c in data.sigma.cone_objects() if c.generators]
    out = []
    n_candidates = []
    for nbar in itertools.product(_box(window.radius), repeat=rank - 1):
        for q in range(0, window.radius + 1):
            n = nbar + (q,)
            if n_cone is not None:
                if not n_cone.contains(n):
                    continue
            elif not any(c.contains(n) for c in sigma_cones):
                continue
            n_candidates.append(n)
    for mbar in itertools.product(_box(window.radius), repeat=rank - 1):
        for p in _box(window.radius):
            m = mbar + (p,)
            for n in n_candidates:
                s = dot(m, n) + Q(m[-1] + n[-1], 2)
                if window.weight_floor <= s <= cutoff:
                    out.append((m, n))
    return sorted(out)


@dataclass
class Layer:
    weight: Q
    charge: Q
    sigma: int
    parity: int
    basis: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    overflow: dict = field(default_factory=dict)

    def key(self):
        return (self.weight, self.charge, self.sigma)

    def id_of(self, mon, register_overflow=True):
        i = self.index.get(mon)
        if i is not None:
            return ("b", i)
        i = self.overflow.get(mon)
        if i is None:
            if not register_overflow:
                return None
            i = len(self.overflow)
            self.overflow[mon] = i
        return ("o", i)


class GradedBasis:
    """Windowed basis bucketed by (weight, charge, sigma).

    Kernels are computed on the window; images into a windowed layer
    additionally use the layer's source collar (collar_monomials), the
    states of sectors exactly one differential step outside the window
    whose shift lands inside it.  Row coordinates are interned to small
    integers to keep the sparse columns compact.
    """

    def __init__(self, data, cutoff, window, n_cone=None):
        self.data = data
        self.cutoff = Q(cutoff)
        self.window = window
        self.n_cone = n_cone
        system = data.system
        self.charges = _fermion_charges(system)
        self.layers = {}
        self.layer_ids = {}
        self.sector_set = set(enumerate_sectors(data, cutoff, window,
                                                n_cone=n_cone))
        for (m, n) in sorted(self.sector_set):
            s = sector_weight(system, m, n)
            budget = self.cutoff - s
            for mon in _sector_monomials(system, (m, n), budget):
                self._insert(mon)
        for layer in self.layers.values():
            layer.basis.sort()
            layer.index = {mon: i for i, mon in enumerate(layer.basis)}
        for key in sorted(self.layers, key=_layer_sort_key):
            self.layer_ids[key] = len(self.layer_ids)

    def layer_id(self, key):
        lid = self.layer_ids.get(key)
        if lid is None:
            lid = self.layer_ids[key] = len(self.layer_ids)
        return lid

    def collar_monomials(self, layer_key):
        """States one differential step outside the window that can map
        into the given windowed layer.

        The differential shifts sectors by single Delta / Delta* points
        and preserves weight, charge and parity while raising sigma by
        one, so the collar of a layer is cut out of the shifted sector
        set by the layer's own grading.
        """
        w, j, sig = layer_key
        system = self.data.system
        layer = self.layers.get(layer_key)
        if layer is None or not layer.basis:
            return []
        targets = {mon.base for mon in layer.basis}
        shifts = [(tuple(p), True) for p in self.data.delta_points] + \
                 [(tuple(p), False) for p in self.data.delta_star_points]
        sigma_fan = self.data.sigma
        sources = set()
        for (m, n) in targets:
            for point, f_side in shifts:
                if f_side:
                    src = (tuple(x - y for x, y in zip(m, point)), n)
                else:
                    src = (m, tuple(x - y for x, y in zip(n, point)))
                    # the deformed shift out of src is cone-gated; a
                    # blocked shift contributes no image at all
                    if not in_common_cone(sigma_fan, point, src[1]):
                        continue
                if src in self.sector_set:
                    continue
                if self.n_cone is not None and \
                        not self.n_cone.contains(src[1]):
                    continue
                if src[0][-1] + src[1][-1] != sig - 1:
                    continue
                if sector_weight(system, src[0], src[1]) <= w:
                    sources.add(src)
        out = []
        for (m, n) in sorted(sources):
            s = sector_weight(system, m, n)
            fermion_charge = j - system.sector_charge_fn((m, n))
            out.extend(_sector_monomials_graded(
                system, (m, n), w - s, fermion_charge, self.charges))
        return out

    def _insert(self, mon):
        system = self.data.system
        w = system.monomial_weight(mon)
        j = self._charge(mon)
        m, n = mon.base
        sig = m[-1] + n[-1]
        parity = system.monomial_parity(mon)
        key = (w, j, sig)
        layer = self.layers.get(key)
        if layer is None:
            layer = Layer(w, j, sig, parity)
            self.layers[key] = layer
        if layer.parity != parity:
            raise BRSTError("parity is not constant on a graded layer")
        layer.basis.append(mon)

    def _charge(self, mon):
        system = self.data.system
        j = system.sector_charge_fn(mon.base)
        for _, gid, mult in mon.modes:
            j += mult * self.charges.get(gid, Q(0))
        return j

    def locate(self, mon):
        system = self.data.system
        w = system.monomial_weight(mon)
        j = self._charge(mon)
        m, n = mon.base
        return (w, j, m[-1] + n[-1])

    def layer_at(self, key):
        layer = self.layers.get(key)
        if layer is None:
            # parity of a layer is determined: j + sigma mod 2
            layer = Layer(key[0], key[1], key[2], int(key[1] + key[2]) & 1)
            self.layers[key] = layer
        return layer

    def total_dim(self):
        return sum(len(l.basis) for l in self.layers.values())


def _fermion_charges(system):
    """U(1) charges of the fermion modes: +1 for Phi, -1 for Psi."""
    charges = {}
    for gid in system.Phi:
        charges[gid] = Q(1)
    for gid in system.Psi:
        charges[gid] = Q(-1)
    return charges


def _sector_monomials(system, base, budget):
    """Canonical creator words over a sector with dressing weight <= budget."""
    if budget < 0:
        return []
    choices = []
    for gid, gen in enumerate(system.generators):
        n = -1
        while True:
            w = system.mode_weight(gid, n)
            if w > budget:
                break
            choices.append((n, gid, w))
            n -= 1
    choices.sort()
    out = []

    def extend(i, left, word):
        out.append(Monomial(tuple(word), base))
        for j in range(i, len(choices)):
            n, gid, w = choices[j]
            if w > left:
                continue
            if system.generators[gid].parity:
                word.append((n, gid, 1))
                extend(j + 1, left - w, word)
                word.pop()
            else:
                mult = 1
                while mult * w <= left:
                    word.append((n, gid, mult))
                    extend(j + 1, left - mult * w, word)
                    word.pop()
                    mult += 1

    extend(0, budget, [])
    return out


def _sector_monomials_graded(system, base, dress, fermion_charge, charges):
    """Creator words with exact dressing weight and fermion charge.

    Fermion modes carry charge +-1 and weight >= 1/2, so branches whose
    remaining weight budget cannot reach the outstanding charge are
    pruned; used for collar enumeration where only one (weight, charge)
    slice of a deep sector is wanted.
    """
    if dress < 0:
        return []
    choices = []
    for gid, gen in enumerate(system.generators):
        n = -1
        while True:
            w = system.mode_weight(gid, n)
            if w > dress:
                break
            choices.append((n, gid, w))
            n -= 1
    choices.sort()
    out = []

    def extend(i, left, charge_left, word):
        if left == 0 and charge_left == 0:
            out.append(Monomial(tuple(word), base))
        if 2 * left < abs(charge_left):
            return
        for jj in range(i, len(choices)):
            n, gid, w = choices[jj]
            if w > left:
                continue
            ch = charges.get(gid, 0)
            if system.generators[gid].parity:
                word.append((n, gid, 1))
                extend(jj + 1, left - w, charge_left - ch, word)
                word.pop()
            else:
                mult = 1
                while mult * w <= left:
                    word.append((n, gid, mult))
                    extend(jj + 1, left - mult * w, charge_left, word)
                    word.pop()
                    mult += 1

    extend(0, Q(dress), Q(fermion_charge), [])
    return out


# ---------------------------------------------------------------------------
# matrices of the differential


class TermMatrices:
    """Sparse columns of each term's zero mode over the windowed basis.

    Seed-independent: the differential for any coefficient choice is a
    linear combination of these, so seed comparisons relinearize
    without re-running the mode machinery.
    """

    def __init__(self, data, basis, deformed=True):
        self.data = data
        self.basis = basis
        self.system = data.system_sigma if deformed else data.system
        self.terms = brst_terms(data)
        self.columns = {}  # (term_key, layer_key) -> {source idx: sparse col}
        self._build()

    def _build(self):
        for key, term_state in self.terms:
            for layer_key, layer in sorted(self.basis.layers.items()):
                cols = {}
                for i, mon in enumerate(layer.basis):
                    col = self._column(term_state, mon)
                    if col:
                        cols[i] = col
                if cols:
                    self.columns[(key, layer_key)] = cols

    def _column(self, term_state, mon):
        """Sparse image column keyed by (layer_id, idx).

        idx >= 0 indexes the target layer's windowed basis; overflow
        monomials (targets outside the window) get idx = -1 - overflow_id.
        """
        image = field_mode_apply(self.system, term_state, 0, mon)
        col = {}
        for tmon, c in image:
            tkey = self.basis.locate(tmon)
            target = self.basis.layer_at(tkey)
            kind, i = target.id_of(tmon)
            idx = i if kind == "b" else -1 - i
            col[(self.basis.layer_id(tkey), idx)] = c
        return col

    def collar_columns(self, coeffs, source_layer_key, target=None):
        """Assembled differential columns of collar states below a layer.

        The collar is derived from the target layer (the collar states
        live one sigma step below it, at source_layer_key).  Per-term
        columns are cached per collar state so that re-running with
        another coefficient seed only relinearizes.
        """
        mons = self.basis.collar_monomials(target or source_layer_key)
        cache = getattr(self, "_collar_cache", None)
        if cache is None:
            cache = self._collar_cache = {}
        out = []
        for mon in mons:
            per_term = cache.get(mon)
            if per_term is None:
                per_term = {}
                for key, term_state in self.terms:
                    col = self._column(term_state, mon)
                    if col:
                        per_term[key] = col
                cache[mon] = per_term
            combined = {}
            for (side, point), col in per_term.items():
                c = coeffs.f.get(point) if side == "f" else coeffs.g.get(point)
                if c is None:
                    continue
                for row, v in col.items():
                    cur = combined.get(row, 0) + c * v
                    if cur:
                        combined[row] = cur
                    else:
                        combined.pop(row, None)
            if combined:
                out.append(combined)
        return out

    def differential_columns(self, coeffs, layer_key):
        """Sparse columns of the full differential out of one layer."""
        layer = self.basis.layers[layer_key]
        cols = [dict() for _ in range(len(layer.basis))]
        for (side, point), _ in self.terms:
            c = coeffs.f.get(point) if side == "f" else coeffs.g.get(point)
            if c is None:
                continue
            tcols = self.columns.get(((side, point), layer_key))
            if not tcols:
                continue
            for i, col in tcols.items():
                for row, v in col.items():
                    cur = cols[i].get(row, 0) + c * v
                    if cur:
                        cols[i][row] = cur
                    else:
                        cols[i].pop(row, None)
        return cols


# ---------------------------------------------------------------------------
# cohomology reports


@dataclass
class BlockRecord:
    weight: Q
    charge: Q
    sigma: int
    parity: int
    dim_ambient: int
    dim_kernel: int
    dim_image_in: int
    dim_cohomology: int
    valid: bool
    note: str = ""


@dataclass
class CohomologyReport:
    blocks: list
    flags: dict
    window: Window
    cutoff: Q
    seed: int

    def block_table(self, valid_only=True):
        """dict (weight, charge) -> cohomology dimension, layers summed."""
        table = {}
        for b in self.blocks:
            if valid_only and not b.valid:
                continue
            if b.dim_cohomology:
                key = (b.weight, b.charge)
                table[key] = table.get(key, 0) + b.dim_cohomology
        return table

    def twisted_table(self):
        """dict twisted weight (w - j/2) -> total cohomology dimension."""
        table = {}
        for b in self.blocks:
            if b.valid and b.dim_cohomology:
                wt = b.weight - b.charge / 2
                table[wt] = table.get(wt, 0) + b.dim_cohomology
        return table

    def character_rows(self):
        """Supertrace rows (y_exponent, q_exponent, coefficient)."""
        rows = {}
        for b in self.blocks:
            if b.valid and b.dim_cohomology:
                sign = -1 if b.parity else 1
                key = (b.charge, b.weight)
                rows[key] = rows.get(key, 0) + sign * b.dim_cohomology
        return sorted((a, w, c) for (a, w), c in rows.items() if c)

    def min_cohomology_weight(self):
        weights = [b.weight for b in self.blocks if b.valid and b.dim_cohomology]
        return min(weights) if weights else None

    def total_dimension(self, weight=None, twisted=False):
        total = 0
        for b in self.blocks:
            if not b.valid or not b.dim_cohomology:
                continue
            w = b.weight - b.charge / 2 if twisted else b.weight
            if weight is None or w == weight:
                total += b.dim_cohomology
        return total


def _layer_sort_key(key):
    w, j, s = key
    return (w, j, s)


def _linked_to(kernel_vectors, image_vectors):
    """Image vectors whose coordinate-sharing component meets the kernel.

    A combination of images equal to a kernel vector decomposes along
    connected components of the shared-coordinate graph; components
    disjoint from the kernel support can only sum to vectors supported
    away from it, so dropping them is exact and keeps the eliminations
    small.
    """
    support = set()
    for vec in kernel_vectors:
        support.update(vec)
    chosen = [False] * len(image_vectors)
    remaining = list(range(len(image_vectors)))
    grew = True
    while grew:
        grew = False
        rest = []
        for i in remaining:
            if any(k in support for k in image_vectors[i]):
                chosen[i] = True
                support.update(image_vectors[i])
                grew = True
            else:
                rest.append(i)
        remaining = rest
    return [v for i, v in enumerate(image_vectors) if chosen[i]]


def _image_in_kernel_dim(kernel_named, image_named):
    """dim(kernel & span(images)), exactly.

    Overflow coordinates ("o", i) sort before windowed ones ("s", k),
    so after one lazy echelon pass over the images every row whose
    pivot is windowed contains no overflow entry at all, and those rows
    span exactly the windowed part of the image.  The remaining
    intersection is a small in-window computation.
    """
    if not image_named:
        return 0
    elim = SparseEliminator()
    inside = []
    for vec in sorted(image_named, key=len):
        row = elim.reduce(vec)
        if row:
            elim.insert_reduced(row)
            if min(row)[0] == "s":
                inside.append(row)
    if not inside:
        return 0
    return intersection_dim(kernel_named, inside)


def compute_cohomology(data, coeffs, cutoff, window=None, deformed=True,
                       n_cone=None, _shared=None):
    """Exact layered kernel/image dimensions of the differential.

    Returns a CohomologyReport with one record per (weight, charge,
    sigma) layer.  dim_kernel is exact (the differential is computed in
    full, with targets outside the window tracked as overflow rows);
    dim_image_in is the dimension of the windowed image inside the
    kernel, so dim_cohomology = dim_kernel - dim_image_in.  A layer is
    valid when the layer below it is charge-impossible or present; the
    lowest windowed layer of a block with possible content below is
    marked invalid and excluded from block totals.
    """
    cutoff = Q(cutoff)
    window = window or default_window(data, cutoff)
    if _shared is not None and "basis" in _shared:
        basis = _shared["basis"]
        matrices = _shared["matrices"]
    else:
        basis = GradedBasis(data, cutoff, window, n_cone=n_cone)
        matrices = TermMatrices(data, basis, deformed=deformed)
        if _shared is not None:
            _shared["basis"] = basis
            _shared["matrices"] = matrices

    # assemble per-layer columns of the differential
    diff_cols = {}
    for key in basis.layers:
        if basis.layers[key].basis:
            diff_cols[key] = matrices.differential_columns(coeffs, key)

    def images_into(key, extra):
        lid = basis.layer_id(key)
        below_key = (key[0], key[1], key[2] - 1)
        vectors = []
        sources = [diff_cols.get(below_key)]
        if extra:
            sources.append(matrices.collar_columns(coeffs, below_key,
                                                   target=key))
        for source_cols in sources:
            if not source_cols:
                continue
            for col in source_cols:
                vec = {}
                for (tlid, idx), v in col.items():
                    if tlid != lid:
                        continue
                    if idx >= 0:
                        vec[("s", idx)] = v
                    else:
                        # image component outside the window: keep as a
                        # distinct coordinate so intersections stay exact
                        vec[("o", -1 - idx)] = v
                if vec:
                    vectors.append(vec)
        return vectors

    blocks = []
    for key in sorted(diff_cols, key=_layer_sort_key):
        w, j, sig = key
        layer = basis.layers[key]
        cols = diff_cols[key]
        # kernel of the honest differential out of this layer
        elim = SparseEliminator()
        kernel_vectors = []
        for i, col in enumerate(cols):
            augmented = {("img", k): v for k, v in col.items()}
            augmented[("src", i)] = Q(1)
            row = elim.reduce(augmented)
            if row and all(k[0] == "src" for k in row):
                kernel_vectors.append({k[1]: Q(v) for k, v in row.items()})
            elif row:
                elim.insert_reduced(row)
        kernel_named = [{("s", k): v for k, v in vec.items()}
                        for vec in kernel_vectors]
        dim_k = len(kernel_named)
        dim_in = 0
        if dim_k:
            image_named = images_into(key, extra=False)
            dim_in = _image_in_kernel_dim(kernel_named, image_named)
            if dim_in < dim_k:
                # candidate cohomology: complete the one-step image with
                # the source collar just outside the window
                image_named = images_into(key, extra=True)
                dim_in = _image_in_kernel_dim(kernel_named, image_named)
        blocks.append(BlockRecord(w, j, sig, layer.parity, len(layer.basis),
                                  dim_k, dim_in, dim_k - dim_in, True, ""))
    flags = {
        "smooth_fan": data.smooth,
        "conjectural": not data.smooth,
        "deformed": deformed,
    }
    return CohomologyReport(blocks, flags, window, cutoff, coeffs.seed)


def check_square_zero(data, coeffs, cutoff, window=None, deformed=True,
                      sample_stride=1, state=None):
    """brst_(0)brst = 0 as a state, plus D(D(v)) = 0 over windowed v.

    The state identity is equivalent to the square of the operator
    vanishing on the nose in the undeformed algebra; the per-vector
    check exercises the deformed structure directly.  A replacement
    generator state (the negative control) can be passed via state.
    """
    system = data.system_sigma if deformed else data.system
    brst = state if state is not None else build_brst_state(data, coeffs)
    if field_mode_apply(system, brst, 0, brst):
        return False
    window = window or default_window(data, cutoff)
    basis = GradedBasis(data, cutoff, window)
    count = 0
    for key in sorted(basis.layers, key=_layer_sort_key):
        for mon in basis.layers[key].basis:
            count += 1
            if sample_stride > 1 and count % sample_stride:
                continue
            once = field_mode_apply(system, brst, 0, mon)
            if field_mode_apply(system, brst, 0, once):
                return False
    return True


def random_odd_state(data, seed, cutoff=1):
    """A seeded odd state over windowed sectors; negative-control input."""
    rng = random.Random(seed)
    system = data.system
    zero = (0,) * data.rank
    points = sorted(map(tuple, data.delta_points))
    out = State()
    for m in points:
        gid = system.Phi[rng.randrange(data.rank)]
        c = rng.randrange(1, 7)
        out = out + c * apply_raw(system, gid, -1,
                                  State.vacuum((m, zero)))
    n = sorted(map(tuple, data.delta_star_points))[0]
    out = out + 1 * apply_raw(system, system.Psi[0], -2,
                              State.vacuum((zero, n)))
    return out


def verify_n2_commutation(data, coeffs, fields, cutoff, window=None,
                          mode_indices=(0, 1, 2), sample=8):
    """Supercommutation of the differential with the N=2 fields.

    State identities brst_(0) X = 0 for X in (G+, G-, J, L) give
    supercommutation of all modes at once; the matrix-level identity
    {D, X_(k)} v = 0 (resp. the commutator for even X) is additionally
    spot-checked on windowed basis vectors.
    """
    system = data.system_sigma
    brst = build_brst_state(data, coeffs)
    for x in fields.as_tuple():
        if field_mode_apply(system, brst, 0, x):
            return False
    window = window or default_window(data, cutoff)
    basis = GradedBasis(data, cutoff, window)
    vectors = []
    for key in sorted(basis.layers, key=_layer_sort_key):
        for mon in basis.layers[key].basis:
            vectors.append(mon)
    stride = max(1, len(vectors) // sample)
    probes = vectors[::stride]
    checks = [(fields.l, 1, 0), (fields.j, 0, 0)]
    for k in mode_indices:
        checks.append((fields.gplus, k, 1))
        checks.append((fields.gminus, k, 1))
    for x, k, odd in checks:
        for mon in probes:
            xv = field_mode_apply(system, x, k, mon)
            dv = field_mode_apply(system, brst, 0, mon)
            left = field_mode_apply(system, brst, 0, xv)
            right = field_mode_apply(system, x, k, dv)
            anti = left + right if odd else left - right
            if anti:
                return False
    return True


# ---------------------------------------------------------------------------
# pipelines


def cohomology(data, coeffs, cutoff, window=None, second_seed=None,
               require_square_zero=True, fields=None, check_n2=True,
               _shared=None):
    """Full verified run: square-zero, N=2 commutation, graded ranks,
    non-negativity, and the two-seed genericity comparison."""
    from .lattice import build_cy_n2
    window = window or default_window(data, cutoff)
    shared = _shared if _shared is not None else {}
    if require_square_zero and not check_square_zero(
            data, coeffs, cutoff, window=window):
        raise BRSTError("the differential does not square to zero")
    report = compute_cohomology(data, coeffs, cutoff, window=window,
                                _shared=shared)
    report.flags["square_zero_verified"] = bool(require_square_zero)
    if check_n2:
        fields = fields or build_cy_n2(data.system)
        report.flags["n2_commutation_verified"] = verify_n2_commutation(
            data, coeffs, fields, cutoff, window=window)
    mn = report.min_cohomology_weight()
    report.flags["nonnegative_weights"] = mn is None or mn >= 0
    if second_seed is not None:
        other = data.coefficients(second_seed)
        report2 = compute_cohomology(data, other, cutoff, window=window,
                                     _shared=shared)
        report.flags["seeds_compared"] = [coeffs.seed, second_seed]
        report.flags["seeds_agree"] = (
            report.block_table() == report2.block_table())
    return report


def mirror_swap_run(data, coeffs, cutoff, window=None, second_seed=None):
    """Run both orientations: (M, N, f, g) and (N, M, g, f).

    Returns the pair of reports; the mirror symmetry statement is that
    the tables agree after negating the charge on one side.
    """
    swapped = data.swapped()
    swapped_coeffs = type(coeffs)(f=dict(coeffs.g), g=dict(coeffs.f),
                                  seed=coeffs.seed)
    report = cohomology(data, coeffs, cutoff, window=window,
                        second_seed=second_seed)
    sreport = cohomology(swapped, swapped_coeffs, cutoff, window=window,
                         second_seed=second_seed)
    return report, sreport


def tables_mirror_match(table_a, table_b):
    """table_a == table_b with the charge negated."""
    flipped = {(w, -j): v for (w, j), v in table_b.items()}
    return table_a == flipped


def chart_sections(data, cone_index, coeffs, cutoff, window=None):
    """The same pipeline with N-charges confined to one chart cone.

    The chart of a cone C1 of the base fan uses C = cone(C1, deg*);
    terms of the differential with N-point outside C are dropped.
    """
    if cone_index is None:
        idxs = ()
    elif 0 <= cone_index < len(data.fan1.cones):
        idxs = data.fan1.cones[cone_index]
    else:
        raise BRSTError("cone index outside the fan")
    gens = [data.fan1.rays[i] + (0,) for i in idxs]
    gens.append((0,) * (data.rank - 1) + (1,))
    chart_cone = Cone([tuple(g) for g in gens])
    chart_coeffs = type(coeffs)(
        f=dict(coeffs.f),
        g={n: v for n, v in coeffs.g.items() if chart_cone.contains(n)},
        seed=coeffs.seed)
    window = window or default_window(data, cutoff)
    basis = GradedBasis(data, cutoff, window, n_cone=chart_cone)
    matrices = _ChartMatrices(data, basis, chart_coeffs)
    shared = {"basis": basis, "matrices": matrices}
    return compute_cohomology(data, chart_coeffs, cutoff, window=window,
                              n_cone=chart_cone, _shared=shared)


class _ChartMatrices(TermMatrices):
    """Term matrices restricted to the chart's surviving terms."""

    def __init__(self, data, basis, coeffs):
        self.data = data
        self.basis = basis
        self.system = data.system_sigma
        self.terms = [(k, s) for k, s in brst_terms(data)
                      if (k[0] == "f" and k[1] in coeffs.f)
                      or (k[0] == "g" and k[1] in coeffs.g)]
        self.columns = {}
        self._build()


# ---------------------------------------------------------------------------
# rendering


def render_report(report, fmt="text"):
    if fmt == "structured":
        import json
        payload = {
            "cutoff": str(report.cutoff),
            "seed": report.seed,
            "window": {"radius": report.window.radius,
                       "weight_floor": str(report.window.weight_floor)},
            "flags": {k: v for k, v in sorted(report.flags.items())},
            "blocks": [
                {"weight": str(b.weight), "j": str(b.charge),
                 "sigma": b.sigma, "parity": b.parity,
                 "dim_ambient": b.dim_ambient, "dim_kernel": b.dim_kernel,
                 "rank_in": b.dim_image_in,
                 "dim_cohomology": b.dim_cohomology,
                 "valid": b.valid, "note": b.note}
                for b in report.blocks],
            "character": [[str(a), str(w), c]
                          for a, w, c in report.character_rows()],
        }
        return json.dumps(payload, indent=1, sort_keys=True)
    lines = []
    if fmt == "text":
        lines.append(f"# cutoff={report.cutoff} seed={report.seed} "
                     f"radius={report.window.radius} "
                     f"floor={report.window.weight_floor}")
        for k, v in sorted(report.flags.items()):
            lines.append(f"# {k}: {v}")
    lines.append("weight\tj\tsigma\tparity\tdim_ambient\tdim_kernel\t"
                 "rank_in\tdim_cohomology\tvalid")
    for b in report.blocks:
        lines.append(f"{b.weight}\t{b.charge}\t{b.sigma}\t{b.parity}\t"
                     f"{b.dim_ambient}\t{b.dim_kernel}\t{b.dim_image_in}\t"
                     f"{b.dim_cohomology}\t{int(b.valid)}")
    if fmt == "text":
        lines.append("")
        lines.append("# cohomology by (weight, j):")
        for (w, j), v in sorted(report.block_table().items()):
            lines.append(f"#   weight={w} j={j}: {v}")
        lines.append("# supertrace character (y_exp, q_exp, coeff):")
        for a, w, c in report.character_rows():
            lines.append(f"#   {a}\t{w}\t{c}")
    return "\n".join(lines)
