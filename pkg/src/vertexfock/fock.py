"""Canonical Fock-space states for free bosons and fermions.

A generator system declares finitely many field generators, each with a
conformal weight (1 for standard bosons and a-type fields, 0 for b-type
fields in the integrated convention, 1/2 for fermions), a parity, and a
symmetric pairing given per ordered generator pair as a two-point pole
order and coefficient.  Internally every mode index is an integer in
the uniform convention

    Y(a,z) = sum_n a_(n) z^(-n-1),

in which modes of index >= 0 annihilate the vacuum and modes of index
<= -1 create, for every generator kind.  The familiar square-bracket
index a[k] of a weight-alpha generator is the display form
k = n - alpha + 1; conversion happens only at the API boundary and in
serialization.

States are finite linear combinations of canonically ordered creator
words with exact rational coefficients, applied to the vacuum or to a
lattice sector |m;n>.  All operations are pure; states are values.
"""

from dataclasses import dataclass
from ._rationals import Q


VACUUM = None  # base marker for the plain Fock vacuum


class FockError(ValueError):
    pass


# ---------------------------------------------------------------------------
# generator systems


@dataclass(frozen=True)
class Generator:
    name: str
    weight: Q  # conformal weight: 1, 0 or 1/2
    parity: int       # 0 even, 1 odd


@dataclass(frozen=True)
class ModeSymbol:
    """A mode in display (square-bracket) indexing.

    index is an integer for weight-1 and weight-0 bosons and a
    half-integer for fermions.
    """
    generator: str
    index: Q


class GeneratorSystem:
    """A finite family of free-field generators with their pairings.

    Lattice-aware systems (nonzero sector_rank) additionally carry the
    zero-mode action on sectors and the sector weight; these hooks are
    installed by the lattice module.
    """

    def __init__(self, name=""):
        self.name = name
        self.generators = []
        self._gid = {}
        # (gid, gid) -> (pole_order, coeff) for the two-point function
        # of x(z) y(w); both orders stored.
        self.pairs = {}
        self.sector_rank = 0
        # hooks installed for lattice systems
        self.zero_mode_value = None      # (gid, base) -> rational
        self.sector_weight_fn = None     # base -> rational
        self.sector_charge_fn = None     # base -> rational
        self.translate_base_fn = None    # base -> State
        self.lattice_mode_fn = None      # (base_a, j, state) -> State
        self.sigma_fan = None            # cone-gated sector shifts when set
        self._fma_cache = {}
        self._weight_cache = {}
        self._parity_cache = {}

    # -- declaration -------------------------------------------------------

    def add_generator(self, name, weight, parity):
        if name in self._gid:
            raise FockError(f"duplicate generator {name!r}")
        gid = len(self.generators)
        self.generators.append(Generator(name, Q(weight), parity))
        self._gid[name] = gid
        return gid

    def set_pair(self, x, y, coeff, pole_order):
        """Declare the singular two-point function x(z)y(w) ~ coeff/(z-w)^r.

        The reversed orientation follows from skew-symmetry:
        coeff(y,x) = coeff(x,y) * (-1)^(r + p(x)p(y)).
        """
        coeff = Q(coeff)
        px = self.generators[x].parity
        py = self.generators[y].parity
        self.pairs[(x, y)] = (pole_order, coeff)
        self.pairs[(y, x)] = (pole_order, coeff * (-1) ** (pole_order + px * py))

    def gid(self, name):
        try:
            return self._gid[name]
        except KeyError:
            raise FockError(f"unknown generator {name!r}") from None

    # -- indexing ----------------------------------------------------------

    def internal_index(self, gid, display_index):
        """Square-bracket index -> uniform index; checks integrality."""
        n = Q(display_index) + self.generators[gid].weight - 1
        if n.denominator != 1:
            g = self.generators[gid]
            raise FockError(
                f"index {display_index} has wrong integrality for "
                f"{g.name} of weight {g.weight}")
        return int(n)

    def display_index(self, gid, n):
        return Q(n) - self.generators[gid].weight + 1

    def mode_weight(self, gid, n):
        """L[0] weight added by the mode, alpha - n - 1."""
        return self.generators[gid].weight - n - 1

    # -- monomial helpers ----------------------------------------------------

    def monomial_parity(self, mon):
        hit = self._parity_cache.get(mon)
        if hit is not None:
            return hit
        p = 0
        for _, gid, mult in mon.modes:
            p += self.generators[gid].parity * mult
        p &= 1
        self._parity_cache[mon] = p
        return p

    def monomial_weight(self, mon):
        hit = self._weight_cache.get(mon)
        if hit is not None:
            return hit
        w = Q(0)
        for n, gid, mult in mon.modes:
            w += mult * self.mode_weight(gid, n)
        if mon.base is not VACUUM:
            w += self.sector_weight_fn(mon.base)
        self._weight_cache[mon] = w
        return w

    def dressing_weight(self, mon):
        w = Q(0)
        for n, gid, mult in mon.modes:
            w += mult * self.mode_weight(gid, n)
        return w

    def base_weight(self, base):
        if base is VACUUM:
            return Q(0)
        return self.sector_weight_fn(base)


# ---------------------------------------------------------------------------
# monomials and states


class Monomial:
    """A canonically ordered creator word over a base vector.

    modes is a tuple of (index, gid, multiplicity) sorted ascending;
    fermionic multiplicities are structurally 1.  base is VACUUM or a
    lattice sector (m, n) of integer tuples.
    """

    __slots__ = ("modes", "base", "_hash")

    def __init__(self, modes=(), base=VACUUM):
        self.modes = tuple(modes)
        self.base = base
        self._hash = hash((self.modes, self.base))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self.modes == other.modes and self.base == other.base

    def __lt__(self, other):
        return (self.modes, self.base or ((), ())) < (
            other.modes, other.base or ((), ()))

    def __repr__(self):
        return f"Monomial({self.modes!r}, {self.base!r})"

    def sector(self):
        return self.base


class State:
    """Finite rational linear combination of monomials; the vector type."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self.terms = {m: c for m, c in terms.items() if c}

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def monomial(cls, mon, coeff=Q(1)):
        return cls({mon: Q(coeff)})

    @classmethod
    def vacuum(cls, base=VACUUM):
        return cls({Monomial((), base): Q(1)})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        return self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return State(out)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, scalar):
        scalar = Q(scalar)
        if not scalar:
            return State()
        return State({m: c * scalar for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __iter__(self):
        return iter(self.terms.items())

    def items_sorted(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0])

    def map_monomials(self, fn):
        """Linear extension of a monomial -> State map."""
        out = State()
        for m, c in self.terms.items():
            out = out + c * fn(m)
        return out


def add_into(acc, mon, coeff):
    s = acc.get(mon, 0) + coeff
    if s:
        acc[mon] = s
    else:
        acc.pop(mon, None)


# ---------------------------------------------------------------------------
# mode action


def _insert_creator(system, gid, n, mon, coeff, acc):
    """Insert creator mode (gid, n) into the word of mon, Koszul-signed."""
    parity = system.generators[gid].parity
    modes = mon.modes
    pos = 0
    sign = 1
    for (ni, gi, mult) in modes:
        if (ni, gi) >= (n, gid):
            break
        if parity and system.generators[gi].parity and (mult & 1):
            sign = -sign
        pos += 1
    if pos < len(modes) and modes[pos][0] == n and modes[pos][1] == gid:
        if parity:
            return  # fermionic square is zero
        ni, gi, mult = modes[pos]
        new = modes[:pos] + ((ni, gi, mult + 1),) + modes[pos + 1:]
    else:
        new = modes[:pos] + ((n, gid, 1),) + modes[pos:]
    add_into(acc, Monomial(new, mon.base), coeff * sign)


def _apply_annihilator(system, gid, n, mon, coeff, acc):
    """Move mode (gid, n), n >= 0, rightward through the word of mon."""
    parity = system.generators[gid].parity
    modes = mon.modes
    sign = 1
    for i, (ni, gi, mult) in enumerate(modes):
        pair = system.pairs.get((gid, gi))
        if pair is not None:
            r, p = pair
            if n + ni == r - 2:
                factor = p * _comb(n, r - 1) * mult
                if factor:
                    if mult == 1:
                        new = modes[:i] + modes[i + 1:]
                    else:
                        new = modes[:i] + ((ni, gi, mult - 1),) + modes[i + 1:]
                    add_into(acc, Monomial(new, mon.base), coeff * sign * factor)
        if parity and system.generators[gi].parity and (mult & 1):
            sign = -sign
    # the mode reaches the base
    if mon.base is VACUUM:
        return
    if n == 0:
        value = system.zero_mode_value(gid, mon.base)
        if value:
            add_into(acc, mon, coeff * sign * value)


def _comb(n, k):
    """Generalized binomial coefficient for integer n (possibly negative)."""
    if k < 0:
        return 0
    num = 1
    for i in range(k):
        num *= (n - i)
    den = 1
    for i in range(2, k + 1):
        den *= i
    return Q(num, den)


def apply_raw(system, gid, n, state):
    """Apply the uniform-index mode x_(n) to a state.  Exact and linear."""
    acc = {}
    if n <= -1:
        for mon, coeff in state.terms.items():
            _insert_creator(system, gid, n, mon, coeff, acc)
    else:
        for mon, coeff in state.terms.items():
            _apply_annihilator(system, gid, n, mon, coeff, acc)
    return State(acc)


def apply_mode(system, mode, state):
    """Apply a display-indexed mode symbol to a state.

    The mode is moved rightward with the convention's (anti)commutators
    until it annihilates the base or joins the creator word; Koszul
    signs are picked up at each transposition past an odd mode.
    """
    gid = system.gid(mode.generator)
    n = system.internal_index(gid, mode.index)
    return apply_raw(system, gid, n, state)


def normal_order_word(system, word, base=VACUUM):
    """Normally order a word of mode symbols and apply it to base.

    Creators move left of annihilators keeping relative order, with the
    Koszul sign of the permutation restricted to odd symbols; the
    ordered word is then applied right to left.
    """
    resolved = []
    for mode in word:
        gid = system.gid(mode.generator)
        resolved.append((gid, system.internal_index(gid, mode.index)))
    creators = [(g, n) for g, n in resolved if n <= -1]
    annihilators = [(g, n) for g, n in resolved if n >= 0]
    sign = 1
    for i, (g, n) in enumerate(resolved):
        if n >= 0 and system.generators[g].parity:
            # this annihilator moves right past every later creator
            later_odd = sum(1 for g2, n2 in resolved[i + 1:]
                            if n2 <= -1 and system.generators[g2].parity)
            if later_odd & 1:
                sign = -sign
    state = State.vacuum(base)
    for g, n in reversed(annihilators):
        state = apply_raw(system, g, n, state)
        if not state:
            return state
    for g, n in reversed(creators):
        state = apply_raw(system, g, n, state)
    return sign * state


def weight_of(system, state):
    """Common L[0] eigenvalue of a homogeneous state."""
    weights = {system.monomial_weight(m) for m, _ in state}
    if len(weights) != 1:
        raise FockError(f"state is not weight-homogeneous: weights {sorted(weights)}")
    return weights.pop()


def parity_of(system, state):
    parities = {system.monomial_parity(m) for m, _ in state}
    if len(parities) != 1:
        raise FockError("state has mixed parity")
    return parities.pop()


def is_homogeneous(system, state):
    return len({system.monomial_weight(m) for m, _ in state}) <= 1


# ---------------------------------------------------------------------------
# basis enumeration


def enumerate_basis(system, cutoff, base=VACUUM, max_zero_weight=None):
    """All canonical monomials over base with dressing weight <= cutoff.

    For systems with weight-0 creators (integrated-boson b[0]) the
    weight truncation alone is not finite; max_zero_weight caps the
    total multiplicity of weight-0 modes and must be supplied for such
    systems.
    """
    cutoff = Q(cutoff)
    if cutoff < 0:
        raise FockError("cutoff must be >= 0")
    has_zero = any(g.weight == 0 for g in system.generators)
    if has_zero and max_zero_weight is None:
        raise FockError(
            "system has weight-0 creators; pass max_zero_weight to truncate")
    choices = []
    for gid, gen in enumerate(system.generators):
        n = -1
        while True:
            w = system.mode_weight(gid, n)
            if w > cutoff:
                break
            choices.append((n, gid, w))
            n -= 1
    choices.sort()
    out = []

    def extend(i, budget, zero_budget, word):
        out.append(Monomial(tuple(word), base))
        for j in range(i, len(choices)):
            n, gid, w = choices[j]
            if w > budget:
                continue
            if system.generators[gid].parity:
                word.append((n, gid, 1))
                extend(j + 1, budget - w, zero_budget, word)
                word.pop()
            elif w == 0:
                for mult in range(1, zero_budget + 1):
                    word.append((n, gid, mult))
                    extend(j + 1, budget, zero_budget - mult, word)
                    word.pop()
            else:
                mult = 1
                while mult * w <= budget:
                    word.append((n, gid, mult))
                    extend(j + 1, budget - mult * w, zero_budget, word)
                    word.pop()
                    mult += 1

    extend(0, cutoff, max_zero_weight or 0, [])
    return sorted(out)


# ---------------------------------------------------------------------------
# serialization


def _format_coeff(c):
    return str(c)


def _format_index(q):
    return str(q)


def render_state(system, state):
    """Textual form: one `coeff * gen[idx]^e ... |m;n>` term per line."""
    if not state:
        return "0"
    lines = []
    for mon, coeff in state.items_sorted():
        parts = [_format_coeff(coeff), "*"]
        for n, gid, mult in mon.modes:
            gen = system.generators[gid]
            tok = f"{gen.name}[{_format_index(system.display_index(gid, n))}]"
            if mult > 1:
                tok += f"^{mult}"
            parts.append(tok)
        if mon.base is VACUUM:
            parts.append("|0>")
        else:
            m, nn = mon.base
            parts.append("|%s;%s>" % (",".join(map(str, m)),
                                      ",".join(map(str, nn))))
        lines.append(" ".join(parts))
    return "\n".join(lines)


def parse_state(system, text):
    """Inverse of render_state; accepts any term order."""
    text = text.strip()
    if text == "0":
        return State()
    acc = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        head, _, rest = line.partition("*")
        coeff = Q(head.strip())
        rest = rest.strip()
        if not rest.endswith(">"):
            raise FockError(f"missing base ket in {line!r}")
        body, _, ket = rest.rpartition("|")
        ket = ket[:-1]
        if ket == "0":
            base = VACUUM
        else:
            ms, _, ns = ket.partition(";")
            base = (tuple(int(x) for x in ms.split(",") if x != ""),
                    tuple(int(x) for x in ns.split(",") if x != ""))
        modes = []
        for tok in body.split():
            name, _, idxpart = tok.partition("[")
            if not idxpart.endswith("]") and "^" not in idxpart:
                raise FockError(f"bad mode token {tok!r}")
            idx_s, _, mult_s = idxpart.partition("]")
            mult = int(mult_s[1:]) if mult_s.startswith("^") else 1
            gid = system.gid(name)
            n = system.internal_index(gid, Q(idx_s))
            modes.append((n, gid, mult))
        modes.sort()
        add_into(acc, Monomial(tuple(modes), base), coeff)
    return State(acc)


# ---------------------------------------------------------------------------
# stock systems


def boson_system(n_gens=1, names=None):
    """n standard free bosons with bracket m*delta(m+n), diagonal pairing."""
    sys_ = GeneratorSystem("boson")
    names = names or (["d"] if n_gens == 1 else [f"d{i+1}" for i in range(n_gens)])
    gids = [sys_.add_generator(nm, 1, 0) for nm in names]
    for g in gids:
        sys_.set_pair(g, g, 1, 2)
    return sys_


def fermion_system(rank=1):
    """rank fermion pairs (phi_i, psi^i) of dual spaces, pairing delta."""
    sys_ = GeneratorSystem("fermion")
    for i in range(rank):
        s = str(i + 1) if rank > 1 else ""
        phi = sys_.add_generator("phi" + s, Q(1, 2), 1)
        psi = sys_.add_generator("psi" + s, Q(1, 2), 1)
        sys_.set_pair(phi, psi, 1, 1)
    return sys_


def bcbg_system(rank=1):
    """rank copies of the weight-1 a-b boson pair plus a fermion pair."""
    sys_ = GeneratorSystem("bcbg")
    for i in range(rank):
        s = str(i + 1) if rank > 1 else ""
        a = sys_.add_generator("a" + s, 1, 0)
        b = sys_.add_generator("b" + s, 1, 0)
        sys_.set_pair(a, b, 1, 2)
    for i in range(rank):
        s = str(i + 1) if rank > 1 else ""
        phi = sys_.add_generator("phi" + s, Q(1, 2), 1)
        psi = sys_.add_generator("psi" + s, Q(1, 2), 1)
        sys_.set_pair(phi, psi, 1, 1)
    return sys_


def msv_system(rank=1):
    """rank copies of the integrated-boson pair (a wt 1, b wt 0) plus fermions.

    The b[0] modes are creators here; the a(z)b(w) two-point function
    has a first-order pole.
    """
    sys_ = GeneratorSystem("msv")
    for i in range(rank):
        s = str(i + 1) if rank > 1 else ""
        a = sys_.add_generator("a" + s, 1, 0)
        b = sys_.add_generator("b" + s, 0, 0)
        sys_.set_pair(a, b, 1, 1)
    for i in range(rank):
        s = str(i + 1) if rank > 1 else ""
        phi = sys_.add_generator("phi" + s, Q(1, 2), 1)
        psi = sys_.add_generator("psi" + s, Q(1, 2), 1)
        sys_.set_pair(phi, psi, 1, 1)
    return sys_


def single(system, name, display_index=None):
    """The state x_(-1)|0> of a generator, or x[display_index]|0>."""
    gid = system.gid(name)
    if display_index is None:
        n = -1
    else:
        n = system.internal_index(gid, Q(display_index))
    if n > -1:
        raise FockError("single() builds creator states only")
    return State.monomial(Monomial(((n, gid, 1),), VACUUM))
