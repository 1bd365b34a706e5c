import random

import pytest

from vertexfock._rationals import Q
from vertexfock.fock import (Monomial, State, boson_system, bcbg_system,
                             enumerate_basis, fermion_system, single)
from vertexfock.ope import (OPEError, check_locality, check_translation,
                            field_mode_apply, nop, singular_ope, translate,
                            wick_oracle)


@pytest.fixture(scope="module")
def boson():
    sys_ = boson_system()
    d = single(sys_, "d")
    L = Q(1, 2) * nop(sys_, d, d)
    return sys_, d, L


class TestFieldModeApply:
    def test_second_order_pole_coefficient(self, boson):
        sys_, d, _ = boson
        assert field_mode_apply(sys_, d, 1, d) == State.vacuum()
        assert not field_mode_apply(sys_, d, 0, d)

    def test_vacuum_axioms(self, boson):
        sys_, d, L = boson
        vac = State.vacuum()
        for a in (d, L, nop(sys_, d, L)):
            assert field_mode_apply(sys_, a, -1, vac) == a
            for j in range(0, 4):
                assert not field_mode_apply(sys_, a, j, vac)

    def test_vacuum_acts_as_identity(self, boson):
        sys_, d, L = boson
        assert field_mode_apply(sys_, State.vacuum(), -1, L) == L
        assert not field_mode_apply(sys_, State.vacuum(), 2, L)

    def test_virasoro_top_pole(self, boson):
        # L_(3)L = (c/2)|0> with c = 1; the value 1/2 also pins the
        # [L[2], L[-2]]|0> = (1/2)|0> bracket of the acceptance suite
        sys_, _, L = boson
        assert field_mode_apply(sys_, L, 3, L) == Q(1, 2) * State.vacuum()

    def test_vacuum_axiom_full_basis(self, boson):
        sys_, _, _ = boson
        vac = State.vacuum()
        for mon in enumerate_basis(sys_, 4):
            a = State.monomial(mon)
            assert field_mode_apply(sys_, a, -1, vac) == a
            assert not field_mode_apply(sys_, a, 0, vac)
            assert not field_mode_apply(sys_, a, 3, vac)

    def test_weight_additivity(self):
        sys_ = bcbg_system(1)
        rng = random.Random(5)
        basis = [m for m in enumerate_basis(sys_, 2) if m.modes]
        for _ in range(30):
            a = rng.choice(basis)
            b = rng.choice(basis)
            j = rng.randrange(-3, 4)
            out = field_mode_apply(sys_, State.monomial(a), j,
                                   State.monomial(b))
            if out:
                wa = sys_.monomial_weight(a)
                wb = sys_.monomial_weight(b)
                from vertexfock.fock import weight_of
                assert weight_of(sys_, out) == wa + wb - j - 1


class TestSingularOPE:
    def test_boson_ope(self, boson):
        sys_, d, _ = boson
        res = singular_ope(sys_, d, d)
        assert res.pole_order == 2
        assert not res.coefficients[0]
        assert res.coefficients[1] == State.vacuum()
        assert res.leading_order == -2

    def test_fermion_self_pairing_regular(self):
        fs = fermion_system(1)
        phi = single(fs, "phi", Q(-1, 2))
        res = singular_ope(fs, phi, phi)
        assert res.is_regular()

    def test_fermion_cross_pole(self):
        fs = fermion_system(1)
        phi = single(fs, "phi", Q(-1, 2))
        psi = single(fs, "psi", Q(-1, 2))
        res = singular_ope(fs, phi, psi)
        assert res.pole_order == 1
        assert res.coefficients[0] == State.vacuum()
        assert res.leading_order == -1

    def test_virasoro_ope_wick(self, boson):
        # c^3 = (1/2)|0>, c^2 = 0, c^1 = 2L, c^0 = TL at c = 1
        sys_, _, L = boson
        res = wick_oracle(sys_, L, L)
        assert res.coefficients[3] == Q(1, 2) * State.vacuum()
        assert not res.coefficients[2]
        assert res.coefficients[1] == 2 * L
        assert res.coefficients[0] == translate(sys_, L)

    def test_wick_rejects_lattice(self):
        from vertexfock.lattice import LatticeSystem
        ls = LatticeSystem(2)
        s = ls.sector_state((1, 0), (0, 0))
        with pytest.raises(OPEError):
            wick_oracle(ls, s, s)

    def test_wick_nothing_to_contract(self, boson):
        sys_, d, _ = boson
        res = wick_oracle(sys_, d, State.vacuum())
        assert res.is_regular()


class TestWickEquivalence:
    def test_two_boson_two_fermion_weight_three(self):
        # Borcherds consistency: engine == contraction oracle for all
        # homogeneous pairs of weight <= 3 in the a-b phi-psi system
        sys_ = bcbg_system(1)
        basis = [m for m in enumerate_basis(sys_, 3)]
        states = [State.monomial(m) for m in basis]
        for a in states:
            for b in states:
                assert wick_oracle(sys_, a, b) == \
                    singular_ope(sys_, a, b, vanishing_order=False)


class TestAxioms:
    def test_locality_boson(self, boson):
        sys_, d, L = boson
        assert check_locality(sys_, d, d, 5)
        assert check_locality(sys_, State.vacuum(), L, 2)
        assert check_locality(sys_, L, d, 3)

    def test_locality_gplus_gplus_regular(self):
        from vertexfock.superconf import build_n2
        sys_ = bcbg_system(1)
        f = build_n2(sys_, "bcbg")
        res = singular_ope(sys_, f.gplus, f.gplus, vanishing_order=False)
        assert res.is_regular()
        assert check_locality(sys_, f.gplus, f.gplus, Q(3, 2))

    def test_locality_basis_sweep(self):
        fs = fermion_system(1)
        states = [State.monomial(m) for m in enumerate_basis(fs, Q(3, 2))
                  if m.modes]
        for a in states:
            for b in states:
                assert check_locality(fs, a, b, Q(3, 2),
                                      index_window=range(-2, 3))

    def test_translation(self, boson):
        sys_, d, L = boson
        assert check_translation(sys_, d, 3, conformal=L)
        assert check_translation(sys_, State.vacuum(), 2, conformal=L)
        d2 = single(sys_, "d", -2)
        assert check_translation(sys_, d2, 2, conformal=L)

    def test_translation_operator_matches_L_mode(self, boson):
        sys_, _, L = boson
        for mon in enumerate_basis(sys_, 4):
            v = State.monomial(mon)
            assert translate(sys_, v) == field_mode_apply(sys_, L, 0, v)


class TestOPEResultRendering:
    def test_render(self, boson):
        sys_, d, _ = boson
        res = singular_ope(sys_, d, d)
        text = res.render(sys_)
        assert "1/(z-w)^2" in text
