"""The lattice vertex algebra on Fock_{M+N} and its Calabi-Yau N=2 fields.

Rank r = d+2 copies of four generators act on sectors |m;n>: weight-one
bosons B (paired with M) and A (paired with N), and odd fermions Phi
(M-side) and Psi (N-side).  Only dual pairs have nonzero brackets: the
zero mode of (m1.B) multiplies |m;n> by m1.n and of (n1.A) by n1.m.

The vertex operator of a bare sector, applied to a target in sector
(m1, n1), is the sector shift times the cocycle sign (-1)^(m.n1) times
the z-power m.n1 + n.m1 from the zero modes times the normally ordered
exponential of the nonzero modes

    exp( sum_{k != 0} (-z^-k / k) ((m.B)[k] + (n.A)[k]) ),

expanded exactly: the annihilator half terminates on any finite target
and the creator half is truncated by the z-exponent requested.  The
Sigma-deformed variant gates the sector shift on the target's N-charge
sharing a cone of the extended fan with the operator's N-charge.
"""

from ._rationals import Q

from .fock import (FockError, GeneratorSystem, Monomial, State, VACUUM,
                   add_into, apply_raw)
from .ope import field_mode_apply, nop, translate
from .superconf import N2Fields
from .toric import in_common_cone



def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def gamma_shift(m, n, base):
    return (tuple(x + y for x, y in zip(m, base[0])),
            tuple(x + y for x, y in zip(n, base[1])))


def _merge_boson_modes(mon, extra_modes):
    """Merge even creator modes into a canonical word (no Koszul signs)."""
    merged = {}
    for nn, gid, mult in mon.modes:
        merged[(nn, gid)] = merged.get((nn, gid), 0) + mult
    for nn, gid, mult in extra_modes:
        merged[(nn, gid)] = merged.get((nn, gid), 0) + mult
    modes = tuple((nn, gid, mult) for (nn, gid), mult in sorted(merged.items()))
    return Monomial(modes, mon.base)


def cocycle_sign(m, n1):
    """(-1)^(m.n1)."""
    return -1 if (dot(m, n1) & 1) else 1


class LatticeSystem(GeneratorSystem):
    """Generator system over sectors (m, n) in M + N of rank r each."""

    def __init__(self, rank, sigma_fan=None, name="lattice"):
        super().__init__(name)
        self.rank = rank
        self.sector_rank = rank
        self.sigma_fan = sigma_fan
        self.B = [self.add_generator(f"B{i+1}", 1, 0) for i in range(rank)]
        self.A = [self.add_generator(f"A{i+1}", 1, 0) for i in range(rank)]
        self.Phi = [self.add_generator(f"Phi{i+1}", Q(1, 2), 1)
                    for i in range(rank)]
        self.Psi = [self.add_generator(f"Psi{i+1}", Q(1, 2), 1)
                    for i in range(rank)]
        for i in range(rank):
            self.set_pair(self.B[i], self.A[i], 1, 2)
            self.set_pair(self.Phi[i], self.Psi[i], 1, 1)
        self.zero_mode_value = self._zero_mode_value
        self.sector_weight_fn = self._sector_weight
        self.sector_charge_fn = self._sector_charge
        self.translate_base_fn = self._translate_base
        self.lattice_mode_fn = self._lattice_mode
        self._cloud_cache = {}

    # -- sector structure ----------------------------------------------------

    def _zero_mode_value(self, gid, base):
        m, n = base
        gen = self.generators[gid]
        if gen.name.startswith("B"):
            return Q(n[self.B.index(gid)])
        if gen.name.startswith("A"):
            return Q(m[self.A.index(gid)])
        return Q(0)

    def _sector_weight(self, base):
        m, n = base
        return dot(m, n) + Q(m[-1] + n[-1], 2)

    def _sector_charge(self, base):
        m, n = base
        return Q(n[-1] - m[-1])

    def _translate_base(self, base):
        """T|m;n> = ((m.B)[-1] + (n.A)[-1]) |m;n>."""
        m, n = base
        out = State()
        vac = State.vacuum(base)
        for i in range(self.rank):
            if m[i]:
                out = out + m[i] * apply_raw(self, self.B[i], -1, vac)
            if n[i]:
                out = out + n[i] * apply_raw(self, self.A[i], -1, vac)
        return out

    def sector_state(self, m, n):
        return State.vacuum((tuple(m), tuple(n)))

    # -- the vertex operator of a bare sector ---------------------------------

    def _lattice_mode(self, base_a, jj, target):
        """Coefficient of z^(-jj-1) in Y(|m;n>, z) applied to target."""
        return self.vertex_z_coefficient(base_a, -jj - 1, target)

    def vertex_z_coefficient(self, sector, e, target):
        """Coefficient of z^e in Y(|m;n>, z) target; exact.

        Applies, right to left: the zero-mode z-powers on the target's
        sector, the annihilator exponential half, the creator half up
        to the requested z-exponent, then the cocycle sign and the
        (cone-gated, for the Sigma variant) sector shift.
        """
        m, n = sector
        acc = {}
        for mon, coeff in target:
            if mon.base is VACUUM:
                raise FockError("lattice operator applied to non-sector state")
            m1, n1 = mon.base
            if self.sigma_fan is not None and not in_common_cone(
                    self.sigma_fan, n, n1):
                continue
            sign = cocycle_sign(m, n1)
            eps = e - dot(m, n1) - dot(n, m1)
            max_drop = int(self.dressing_weight(mon))
            if eps + max_drop < 0:
                continue
            lowered = self._exp_half(m, n, State.monomial(mon, coeff),
                                     +1, max_drop)
            for alpha, st in lowered.items():
                beta = eps + alpha
                if beta < 0:
                    continue
                raised = self._apply_creator_cloud(m, n, beta, st)
                for mon2, c2 in raised.items():
                    shifted = Monomial(mon2.modes, gamma_shift(m, n, mon2.base))
                    add_into(acc, shifted, sign * c2)
        return State(acc)

    def _creator_cloud(self, m, n, beta):
        """z^beta coefficient of the creator exponential as mode words.

        State-independent: a list of (coefficient, creator mode list)
        telling which words of (m.B)[-k], (n.A)[-k] modes to graft onto
        a target; cached per (m, n, beta).
        """
        key = (m, n, beta)
        hit = self._cloud_cache.get(key)
        if hit is not None:
            return hit
        zero = ((0,) * self.rank, (0,) * self.rank)
        seed = State.vacuum(zero)
        cloud_state = self._exp_half(m, n, seed, -1, beta).get(beta, State())
        cloud = [(c, mon.modes) for mon, c in cloud_state]
        self._cloud_cache[key] = cloud
        return cloud

    def _apply_creator_cloud(self, m, n, beta, state):
        """Graft every cloud word onto every monomial of state."""
        if beta == 0:
            return dict(state.terms)
        out = {}
        for coeff, modes in self._creator_cloud(m, n, beta):
            for mon, c in state.terms.items():
                merged = _merge_boson_modes(mon, modes)
                add_into(out, merged, coeff * c)
        return out

    def _h_mode(self, m, n, k, state):
        """((m.B)[k] + (n.A)[k]) applied to state."""
        out = State()
        for i in range(self.rank):
            if m[i]:
                out = out + m[i] * apply_raw(self, self.B[i], k, state)
            if n[i]:
                out = out + n[i] * apply_raw(self, self.A[i], k, state)
        return out

    def _exp_half(self, m, n, state, direction, cap):
        """One normally ordered exponential half applied to state.

        direction +1 is the annihilator half exp(sum_{k>0} (-z^-k/k) H[k]),
        graded by the total weight drop; direction -1 is the creator
        half exp(sum_{k>0} (z^k/k) H[-k]), graded by the total raise.
        Modes within one half commute, so building X^t/t! layer by
        layer is exact; cap bounds the grade (the dressing weight for
        drops, the z-exponent still needed for raises).  Returns
        {grade: State}.
        """
        out = {0: state}
        layer = {0: state}
        t = 0
        while layer:
            t += 1
            nxt = {}
            for grade, st in layer.items():
                for k in range(1, cap - grade + 1):
                    hit = self._h_mode(m, n, direction * k, st)
                    if hit:
                        add = Q(-direction, k) * hit
                        cur = nxt.get(grade + k)
                        nxt[grade + k] = cur + add if cur else add
            layer = {g: Q(1, t) * st for g, st in nxt.items() if st}
            for g, st in layer.items():
                cur = out.get(g)
                out[g] = cur + st if cur else st
        return {g: s for g, s in out.items() if s}


def gamma(system, m, n, state, deformed=False):
    """The sector shift |m1;n1> -> |m+m1;n+n1>, cone-gated when deformed.

    Commutes with all nonzero modes; the deformed variant kills terms
    whose N-charge shares no cone of the extended fan with n.
    """
    m, n = tuple(m), tuple(n)
    acc = {}
    for mon, coeff in state:
        m1, n1 = mon.base
        if deformed:
            if system.sigma_fan is None:
                raise FockError("no extended fan registered for the deformation")
            if not in_common_cone(system.sigma_fan, n, n1):
                continue
        add_into(acc, Monomial(mon.modes, gamma_shift(m, n, mon.base)), coeff)
    return State(acc)


def lattice_vertex_mode(system, sector, e, target):
    """Public mode extraction, indexed by the total z-exponent e."""
    return system.vertex_z_coefficient((tuple(sector[0]), tuple(sector[1])),
                                       e, target)


def sector_weight(system, m, n):
    """L_CY[0] eigenvalue of |m;n>: m.n + deg*.m/2 + deg.n/2."""
    return system._sector_weight((tuple(m), tuple(n)))


def sector_charge(system, m, n):
    """J_CY[0] eigenvalue of |m;n>: deg.n - deg*.m."""
    return system._sector_charge((tuple(m), tuple(n)))


# ---------------------------------------------------------------------------
# Calabi-Yau N=2 fields


def _contracted(system, gids, vector, index=-1):
    """Sum_i vector[i] * gen_i(-1)|0;0> as a sector-(0,0) state."""
    zero = ((0,) * system.rank, (0,) * system.rank)
    out = State()
    vac = State.vacuum(zero)
    for i, c in enumerate(vector):
        if c:
            out = out + c * apply_raw(system, gids[i], index, vac)
    return out


def field_state(system, gids, i):
    zero = ((0,) * system.rank, (0,) * system.rank)
    return State.monomial(Monomial(((-1, gids[i], 1),), zero))


def build_cy_n2(system):
    """The four Calabi-Yau fields over sector (0,0); c_hat = rank - 2.

    G+ = (A.Phi) - deg.dPhi, G- = (B.Psi) - deg*.dPsi,
    J  = :(Phi.Psi): + deg.B - deg*.A,
    L  = :(B.A): + (1/2):(dPhi.Psi - Phi.dPsi): - (1/2)deg*.dA - (1/2)deg.dB.
    """
    r = system.rank
    if r < 2:
        raise FockError("lattice rank must be at least 2")
    T = lambda s: translate(system, s)
    A = [field_state(system, system.A, i) for i in range(r)]
    B = [field_state(system, system.B, i) for i in range(r)]
    Phi = [field_state(system, system.Phi, i) for i in range(r)]
    Psi = [field_state(system, system.Psi, i) for i in range(r)]
    gplus = State()
    gminus = State()
    jj = State()
    L = State()
    for i in range(r):
        gplus = gplus + nop(system, A[i], Phi[i])
        gminus = gminus + nop(system, B[i], Psi[i])
        jj = jj + nop(system, Phi[i], Psi[i])
        L = L + nop(system, B[i], A[i]) \
            + Q(1, 2) * (nop(system, T(Phi[i]), Psi[i])
                         - nop(system, Phi[i], T(Psi[i])))
    gplus = gplus - T(Phi[r - 1])
    gminus = gminus - T(Psi[r - 1])
    jj = jj + B[r - 1] - A[r - 1]
    L = L - Q(1, 2) * T(A[r - 1]) - Q(1, 2) * T(B[r - 1])
    return N2Fields(gplus, gminus, jj, L, Q(r - 2))


def mirror_swap_state(system, state):
    """Exchange the roles of M and N: A <-> B, Phi <-> Psi, (m,n) -> (n,m).

    Same-index swaps within one system; words are recanonicalized with
    their Koszul signs by replaying the creators.
    """
    swap = {}
    for i in range(system.rank):
        swap[system.A[i]] = system.B[i]
        swap[system.B[i]] = system.A[i]
        swap[system.Phi[i]] = system.Psi[i]
        swap[system.Psi[i]] = system.Phi[i]
    out = State()
    for mon, coeff in state:
        m, n = mon.base
        st = State.vacuum((n, m))
        for idx, gid, mult in reversed(mon.modes):
            for _ in range(mult):
                st = apply_raw(system, swap[gid], idx, st)
        out = out + coeff * st
    return out
