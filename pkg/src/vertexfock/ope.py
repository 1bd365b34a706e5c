"""Products a_(j)b, singular OPEs, and vertex-algebra axiom checks.

The central routine is field_mode_apply, which computes a_(j)b by
recursive field composition: for a = x_(-1-k) c the field of a is the
normally ordered product of the k-th derivative field of x with the
field of c, so

  a_(n)b = sum_{j<=-1} (-1)^k C(j,k) x_(j-k) (c_(n-j-1) b)
         + (-1)^(p(x)p(c)) sum_{j>=0} (-1)^k C(j,k) c_(n-j-1) (x_(j-k) b)

with generalized binomials C(j,k).  Both sums are finite: the first is
cut off by weight additivity (states below the sector's minimal weight
vanish), the second because high modes annihilate b.  The base cases
are the vacuum (identity field) and bare lattice sectors, which are
delegated to the lattice machinery.  Everything is exact.
"""

from ._rationals import Q

from .fock import (FockError, Monomial, State, VACUUM, add_into, apply_raw,
                   _comb, enumerate_basis, parity_of, weight_of)



class OPEError(ValueError):
    pass


class OPEResult:
    """The singular part of an OPE.

    coefficients[j] is the state c^j multiplying (z-w)^(-j-1); the list
    is trimmed so its last entry is nonzero, and an empty list means a
    regular OPE.  leading_order is the most negative power of (z-w)
    present in the full product; positive values signal the vanishing
    order of products of lattice vertex operators, and None means the
    product is identically zero.
    """

    def __init__(self, coefficients, leading_order):
        while coefficients and not coefficients[-1]:
            coefficients.pop()
        self.coefficients = coefficients
        self.leading_order = leading_order

    @property
    def pole_order(self):
        return len(self.coefficients)

    def is_regular(self):
        return not self.coefficients

    def __eq__(self, other):
        return self.coefficients == other.coefficients

    def render(self, system):
        from .fock import render_state
        if not self.coefficients:
            return "regular"
        lines = []
        for j in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[j]:
                for line in render_state(system, self.coefficients[j]).splitlines():
                    lines.append(f"1/(z-w)^{j + 1} * {line}")
        return "\n".join(lines)


def _combined_base(a_base, b_base):
    if a_base is VACUUM:
        return b_base
    if b_base is VACUUM:
        return a_base
    return (tuple(x + y for x, y in zip(a_base[0], b_base[0])),
            tuple(x + y for x, y in zip(a_base[1], b_base[1])))


def _min_target_weight(system, a_base, b_base):
    base = _combined_base(a_base, b_base)
    if base is VACUUM:
        return Q(0)
    return system.sector_weight_fn(base)


def _annihilation_bound(system, b_mon):
    """Largest mode index that can act nontrivially on b_mon."""
    bound = 0
    if b_mon.modes:
        n_min = min(n for n, _, _ in b_mon.modes)
        bound = max(bound, -n_min)
    return bound


def field_mode_apply(system, a, j, b):
    """The state a_(j) b for homogeneous a; linear in both arguments."""
    if isinstance(a, Monomial):
        a = State.monomial(a)
    if isinstance(b, Monomial):
        b = State.monomial(b)
    acc = {}
    for a_mon, a_coeff in a:
        for b_mon, b_coeff in b:
            inner = _fma_monomial(system, a_mon, j, b_mon)
            if inner:
                f = a_coeff * b_coeff
                for m, c in inner.terms.items():
                    add_into(acc, m, f * c)
    return State(acc)


def _fma_monomial(system, a_mon, j, b_mon):
    key = (a_mon, j, b_mon)
    cache = system._fma_cache
    hit = cache.get(key)
    if hit is not None:
        return hit
    out = _fma_compute(system, a_mon, j, b_mon)
    if len(cache) > 200000:
        # recomputation is cheaper than thrashing the machine
        cache.clear()
    cache[key] = out
    return out


def _fma_compute(system, a_mon, jj, b_mon):
    if not a_mon.modes:
        if a_mon.base is VACUUM:
            # vacuum axiom: Y(|0>,z) is the identity
            return State.monomial(b_mon) if jj == -1 else State()
        if system.lattice_mode_fn is None:
            raise OPEError("lattice base without registered lattice machinery")
        return system.lattice_mode_fn(a_mon.base, jj, State.monomial(b_mon))
    n0, gid, mult = a_mon.modes[0]
    if mult == 1:
        c_modes = a_mon.modes[1:]
    else:
        c_modes = ((n0, gid, mult - 1),) + a_mon.modes[1:]
    c_mon = Monomial(c_modes, a_mon.base)
    k = -1 - n0
    px = system.generators[gid].parity
    pc = system.monomial_parity(c_mon)
    b_state = State.monomial(b_mon)
    acc = {}

    # creator sum: x_(j-k) applied after c_(jj-j-1), j <= -1
    wt_c = system.monomial_weight(c_mon)
    wt_b = system.monomial_weight(b_mon)
    min_w = _min_target_weight(system, c_mon.base, b_mon.base)
    l_max = wt_c + wt_b - min_w - 1
    sign_k = (-1) ** k
    j = -1
    while jj - j - 1 <= l_max:
        coeff = sign_k * _comb(j, k)
        if coeff:
            inner = _fma_monomial(system, c_mon, jj - j - 1, b_mon)
            if inner:
                created = apply_raw(system, gid, j - k, inner)
                for m, c in created.terms.items():
                    add_into(acc, m, coeff * c)
        j -= 1

    # annihilator sum: c_(jj-j-1) applied after x_(j-k), j >= 0
    sign = -1 if (px and pc) else 1
    bound = _annihilation_bound(system, b_mon)
    for j in range(0, k + bound + 1):
        coeff = sign * sign_k * _comb(j, k)
        if not coeff:
            continue
        hit = apply_raw(system, gid, j - k, b_state)
        if not hit:
            continue
        for hm, hc in hit.terms.items():
            inner = _fma_monomial(system, c_mon, jj - j - 1, hm)
            if inner:
                f = coeff * hc
                for m, c in inner.terms.items():
                    add_into(acc, m, f * c)
    return State(acc)


def _fma_monomial_state(system, a_mon, j, b_state):
    acc = {}
    for b_mon, coeff in b_state:
        inner = _fma_monomial(system, a_mon, j, b_mon)
        for m, c in inner.terms.items():
            add_into(acc, m, coeff * c)
    return State(acc)


# ---------------------------------------------------------------------------
# translation operator


def translate(system, state):
    """The translation operator T: T|0> = 0, [T, x_(n)] = -n x_(n-1).

    On lattice sectors T acts by the sector's weight-one dressing,
    delegated to the lattice hook.
    """
    if isinstance(state, Monomial):
        state = State.monomial(state)
    out = State()
    for mon, coeff in state:
        # derivative across the word
        for i, (n, gid, mult) in enumerate(mon.modes):
            if mult == 1:
                rest = mon.modes[:i] + mon.modes[i + 1:]
            else:
                rest = mon.modes[:i] + ((n, gid, mult - 1),) + mon.modes[i + 1:]
            # sign of pulling this mode out to the left
            sign = 1
            if system.generators[gid].parity:
                for n2, g2, m2 in mon.modes[:i]:
                    if system.generators[g2].parity and (m2 & 1):
                        sign = -sign
            lowered = apply_raw(system, gid, n - 1,
                                State.monomial(Monomial(rest, mon.base)))
            out = out + coeff * sign * mult * (-n) * lowered
        if mon.base is not VACUUM:
            if system.translate_base_fn is None:
                raise OPEError("lattice base without translate hook")
            shifted = system.translate_base_fn(mon.base)
            # re-dress the translated base with the original word
            for smon, scoeff in shifted:
                dressed = State.monomial(Monomial(mon.modes, smon.base))
                for n2, g2, m2 in sorted(smon.modes, reverse=True):
                    for _ in range(m2):
                        dressed = apply_raw(system, g2, n2, dressed)
                out = out + coeff * scoeff * dressed
    return out


def nop(system, a, b):
    """Normally ordered product of states, a_(-1)b."""
    return field_mode_apply(system, a, -1, b)


# ---------------------------------------------------------------------------
# singular OPE and leading order


def singular_ope(system, a, b, vanishing_order=True):
    """All c^j = a_(j)b for j >= 0, with the leading (z-w) order.

    When the singular part is empty and vanishing_order is set, the
    regular product is scanned for its leading power (the vanishing
    order of lattice vertex-operator products); pass False to skip the
    scan when only the poles matter.
    """
    if not is_weight_homogeneous(system, a):
        raise OPEError("a must be weight-homogeneous")
    wt_a = weight_of_state(system, a)
    wt_b = weight_of_state(system, b)
    min_w = _combined_min_weight(system, a, b)
    j_bound = wt_a + wt_b - min_w - 1
    coeffs = []
    j = 0
    while j <= j_bound:
        coeffs.append(field_mode_apply(system, a, j, b))
        j += 1
    result = OPEResult(coeffs, None)
    if not result.is_regular():
        result.leading_order = -result.pole_order
        return result
    if not vanishing_order:
        return result
    # regular: scan upward for the vanishing order
    e = 0
    cap = int(2 * (wt_a + wt_b - min_w)) + 4 + _pairing_bound(system, a, b)
    while e <= cap:
        if field_mode_apply(system, a, -e - 1, b):
            result.leading_order = e
            return result
        e += 1
    result.leading_order = None  # identically zero product
    return result


def _pairing_bound(system, a, b):
    """Upper bound for sector-pairing contributions to vanishing orders."""
    bound = 0
    for ma, _ in a:
        for mb, _ in b:
            if ma.base is not VACUUM and mb.base is not VACUUM:
                (m, n), (m1, n1) = ma.base, mb.base
                pairing = sum(x * y for x, y in zip(m, n1)) + \
                    sum(x * y for x, y in zip(m1, n))
                bound = max(bound, abs(pairing))
    return bound


def _combined_min_weight(system, a, b):
    bases_a = {m.base for m, _ in a} or {VACUUM}
    bases_b = {m.base for m, _ in b} or {VACUUM}
    vals = [_min_target_weight(system, ba, bb) for ba in bases_a for bb in bases_b]
    return min(vals) if vals else Q(0)


def weight_of_state(system, s):
    return weight_of(system, s)


def is_weight_homogeneous(system, s):
    return len({system.monomial_weight(m) for m, _ in s}) <= 1


# ---------------------------------------------------------------------------
# Wick oracle


def _two_point(system, gx, gy):
    return system.pairs.get((gx, gy))


def wick_oracle(system, a, b):
    """Singular OPE by summing over cross contractions of the two words.

    Independent of field_mode_apply: each contraction set contributes
    the product of two-point factors times the Taylor-expanded normally
    ordered remainder.  Only free-field states over the vacuum are in
    scope; lattice-based states are rejected.
    """
    for m, _ in list(a) + list(b):
        if m.base is not VACUUM:
            raise OPEError("wick_oracle covers free fields over the vacuum only")
    if not is_weight_homogeneous(system, a):
        raise OPEError("a must be weight-homogeneous")
    total = {}
    for am, ac in a:
        for bm, bc in b:
            for j, st in _wick_monomials(system, am, bm).items():
                cur = total.get(j, State())
                total[j] = cur + ac * bc * st
    if not total:
        return OPEResult([], 0)
    jmax = max(total)
    coeffs = [total.get(j, State()) for j in range(jmax + 1)]
    result = OPEResult(coeffs, None)
    result.leading_order = -result.pole_order if not result.is_regular() else 0
    return result


def _expand_word(mon):
    flat = []
    for n, gid, mult in mon.modes:
        flat.extend([(gid, -1 - n)] * mult)  # (generator, derivative order)
    return flat


def _wick_monomials(system, a_mon, b_mon):
    """dict j -> State contribution of all nonempty contraction sets."""
    aw = _expand_word(a_mon)
    bw = _expand_word(b_mon)
    out = {}
    for pairs, sign in _matchings(system, aw, bw):
        if not pairs:
            continue
        factor = Q(sign)
        pole = 0
        for (ia, ib) in pairs:
            gx, k = aw[ia]
            gy, l = bw[ib]
            r, p = _two_point(system, gx, gy)
            # < d^k x(z)/k!  d^l y(w)/l! > = C (z-w)^-(r+k+l)
            num = 1
            for t in range(r, r + k + l):
                num *= t
            den = 1
            for t in range(2, k + 1):
                den *= t
            for t in range(2, l + 1):
                den *= t
            factor *= p * (-1) ** k * Q(num, den)
            pole += r + k + l
        rem_a = [aw[i] for i in range(len(aw)) if i not in {ia for ia, _ in pairs}]
        rem_b = [bw[i] for i in range(len(bw)) if i not in {ib for _, ib in pairs}]
        _taylor_terms(system, factor, pole, rem_a, rem_b, out)
    return out


def _matchings(system, aw, bw):
    """All partial matchings between positions of aw and bw with Koszul sign.

    Pairs are only formed where the two-point function is nonzero.
    Yields (list of (ia, ib), sign).
    """
    n_a = len(aw)

    def rec(i, used_b, acc):
        if i == n_a:
            yield list(acc), 1
            return
        # leave position i unmatched
        for pairs, _ in rec(i + 1, used_b, acc):
            yield pairs, 1
        gx, _ = aw[i]
        for jb in range(len(bw)):
            if jb in used_b:
                continue
            gy, _ = bw[jb]
            if _two_point(system, gx, gy) is None:
                continue
            acc.append((i, jb))
            used_b.add(jb)
            for pairs, _ in rec(i + 1, used_b, acc):
                yield pairs, 1
            used_b.discard(jb)
            acc.pop()

    for pairs, _ in rec(0, set(), []):
        yield pairs, _matching_sign(system, aw, bw, pairs)


def _matching_sign(system, aw, bw, pairs):
    """Koszul sign of extracting the contracted pairs from [aw ++ bw]."""
    parity_a = [system.generators[g].parity for g, _ in aw]
    parity_b = [system.generators[g].parity for g, _ in bw]
    alive_a = [True] * len(aw)
    alive_b = [True] * len(bw)
    sign = 1
    for ia, ib in sorted(pairs):
        if parity_a[ia]:
            crossed = sum(1 for t in range(ia + 1, len(aw))
                          if alive_a[t] and parity_a[t])
            crossed += sum(1 for t in range(0, ib)
                           if alive_b[t] and parity_b[t])
            if crossed & 1:
                sign = -sign
        alive_a[ia] = False
        alive_b[ib] = False
    return sign


def _taylor_terms(system, factor, pole, rem_a, rem_b, out):
    """Expand remainder z-fields about w and collect singular orders.

    Each remaining a-side field d^k x(z)/k! contributes
    sum_t C(k+t,t) (z-w)^t x_(-1-k-t); total order -pole + sum t < 0.
    """
    slots = len(rem_a)

    def rec(idx, t_total, coeff, modes):
        remaining_budget = pole - 1 - t_total
        if idx == slots:
            word = list(modes)
            for gy, l in rem_b:
                word.append((-1 - l, gy, 1))
            j = pole - 1 - t_total  # contributes at (z-w)^(-(j+1))
            st = _creator_word_state(system, word)
            if st:
                cur = out.get(j, State())
                out[j] = cur + coeff * st
            return
        gx, k = rem_a[idx]
        for t in range(0, remaining_budget + 1):
            c = _comb(k + t, t)
            rec(idx + 1, t_total + t, coeff * c, modes + [(-1 - k - t, gx, 1)])

    rec(0, 0, factor, [])


def _creator_word_state(system, word):
    """Apply a list of creator modes (in order) to the vacuum."""
    st = State.vacuum()
    for n, gid, mult in reversed(word):
        for _ in range(mult):
            st = apply_raw(system, gid, n, st)
    return st


# ---------------------------------------------------------------------------
# axiom checks


def check_locality(system, a, b, weight_cutoff, vectors=None, index_window=None):
    """Commutator-from-OPE identity on a truncation.

    Verifies [a_(m), b_(n)]-+ v = sum_j C(m,j) (a_(j)b)_(m+n-j) v for all
    test vectors v and mode indices in the window, with the
    anticommutator exactly when both a and b are odd.
    """
    if not a or not b:
        return True
    pa = parity_of(system, a)
    pb = parity_of(system, b)
    ops = singular_ope(system, a, b)
    if vectors is None:
        vectors = [State.monomial(m)
                   for m in enumerate_basis(system, weight_cutoff)]
    if index_window is None:
        w = int(Q(weight_cutoff)) + 2
        index_window = range(-w, w + 1)
    fermionic = pa == 1 and pb == 1
    for m in index_window:
        for n in index_window:
            for v in vectors:
                bv = field_mode_apply(system, b, n, v)
                av = field_mode_apply(system, a, m, v)
                lhs = field_mode_apply(system, a, m, bv)
                if fermionic:
                    lhs = lhs + field_mode_apply(system, b, n, av)
                else:
                    lhs = lhs - field_mode_apply(system, b, n, av)
                rhs = State()
                for j, cj in enumerate(ops.coefficients):
                    if cj:
                        c = _comb(m, j)
                        if c:
                            rhs = rhs + c * field_mode_apply(system, cj, m + n - j, v)
                if lhs != rhs:
                    return False
    return True


def check_translation(system, a, weight_cutoff, conformal=None, vectors=None):
    """[T, a_(n)] = -n a_(n-1) on the truncation.

    T is realized as the translation derivation and, when a conformal
    state is supplied, cross-checked against its L_(0) mode.
    """
    if vectors is None:
        vectors = [State.monomial(m)
                   for m in enumerate_basis(system, weight_cutoff)]
    if conformal is not None:
        for v in vectors:
            if translate(system, v) != field_mode_apply(system, conformal, 0, v):
                return False
    w = int(Q(weight_cutoff)) + 2
    for n in range(-w, w + 1):
        for v in vectors:
            lhs = translate(system, field_mode_apply(system, a, n, v)) \
                - field_mode_apply(system, a, n, translate(system, v))
            rhs = (-n) * field_mode_apply(system, a, n - 1, v)
            if lhs != rhs:
                return False
    return True
