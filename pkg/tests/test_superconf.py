import pytest

from vertexfock._rationals import Q
from vertexfock.fock import (State, bcbg_system, boson_system, enumerate_basis,
                             fermion_system, msv_system, single)
from vertexfock.ope import field_mode_apply, nop, translate
from vertexfock.superconf import (VerificationError, build_n2, build_virasoro,
                                  character, character_tsv, mirror_involution,
                                  topological_twist, verify_n2,
                                  verify_virasoro)


class TestVirasoro:
    def test_boson_charge_one(self):
        sys_ = boson_system()
        L = build_virasoro(sys_, "boson")
        assert verify_virasoro(sys_, L, 4) == 1

    @pytest.mark.parametrize("r", [1, 2])
    def test_fermion_charge(self, r):
        sys_ = fermion_system(r)
        L = build_virasoro(sys_, "fermion")
        assert verify_virasoro(sys_, L, 2, index_bound=3) == r

    @pytest.mark.parametrize("r", [1, 2])
    def test_bcbg_charge(self, r):
        sys_ = bcbg_system(r)
        L = build_virasoro(sys_, "bcbg")
        cutoff = 2 if r == 1 else 1
        assert verify_virasoro(sys_, L, cutoff, index_bound=3) == 3 * r

    @pytest.mark.parametrize("r", [1, 2])
    def test_msv_charge(self, r):
        sys_ = msv_system(r)
        L = build_virasoro(sys_, "msv")
        cutoff = 2 if r == 1 else 1
        assert verify_virasoro(sys_, L, cutoff, index_bound=2) == 3 * r

    def test_wrong_state_fails(self):
        sys_ = boson_system()
        L = build_virasoro(sys_, "boson") + single(sys_, "d")
        with pytest.raises(VerificationError):
            verify_virasoro(sys_, L, 2)


class TestN2:
    @pytest.mark.parametrize("r", [1, 2])
    def test_bcbg(self, r):
        sys_ = bcbg_system(r)
        fields = build_n2(sys_, "bcbg")
        assert verify_n2(sys_, fields, 2) == r

    @pytest.mark.parametrize("r", [1, 2])
    def test_msv(self, r):
        sys_ = msv_system(r)
        fields = build_n2(sys_, "msv")
        assert verify_n2(sys_, fields, 1) == r

    def test_msv_gplus_example(self):
        sys_ = msv_system(1)
        fields = build_n2(sys_, "msv")
        phi = single(sys_, "phi", Q(-1, 2))
        a = single(sys_, "a")
        assert fields.gplus == nop(sys_, phi, a)

    def test_bcbg_j_example(self):
        sys_ = bcbg_system(1)
        fields = build_n2(sys_, "bcbg")
        phi = single(sys_, "phi", Q(-1, 2))
        psi = single(sys_, "psi", Q(-1, 2))
        assert fields.j == nop(sys_, phi, psi)

    def test_broken_multiplet_itemizes(self):
        sys_ = bcbg_system(1)
        fields = build_n2(sys_, "bcbg")
        fields.j = 2 * fields.j
        with pytest.raises(VerificationError) as err:
            verify_n2(sys_, fields, 1)
        assert any("JJ" in item or "JG" in item for item in err.value.failures)


class TestMirror:
    def test_involution_on_the_nose(self):
        sys_ = bcbg_system(1)
        fields = build_n2(sys_, "bcbg")
        twice = mirror_involution(mirror_involution(fields))
        assert twice.as_tuple() == fields.as_tuple()

    def test_mirror_passes_verification(self):
        sys_ = bcbg_system(1)
        fields = mirror_involution(build_n2(sys_, "bcbg"))
        assert verify_n2(sys_, fields, 2) == 1

    def test_j_spectrum_negates(self):
        sys_ = bcbg_system(1)
        fields = build_n2(sys_, "bcbg")
        mirrored = mirror_involution(fields)
        for mon in enumerate_basis(sys_, 1):
            v = State.monomial(mon)
            before = field_mode_apply(sys_, fields.j, 0, v)
            after = field_mode_apply(sys_, mirrored.j, 0, v)
            assert after == -1 * before


class TestTwist:
    def test_twisted_weights(self):
        sys_ = bcbg_system(1)
        fields = build_n2(sys_, "bcbg")
        ltop = topological_twist(sys_, fields)
        grades = {"gplus": (fields.gplus, 1), "j": (fields.j, 1),
                  "gminus": (fields.gminus, 2), "l": (fields.l, 2)}
        for name, (st, w) in grades.items():
            assert field_mode_apply(sys_, ltop, 1, st) == Q(w) * st, name

    def test_twist_mirror_noncommutation(self):
        sys_ = bcbg_system(1)
        fields = build_n2(sys_, "bcbg")
        twist_then_mirror = topological_twist(sys_, mirror_involution(fields))
        mirror_then_twist = topological_twist(sys_, fields)
        assert twist_then_mirror != mirror_then_twist


class TestBasisIndependence:
    def test_rational_basis_rotation_r2(self):
        # replace the dual bases by a nontrivial rational 2x2 change:
        # a' = S a, psi' = S psi, b' = (S^-T) b, phi' = (S^-T) phi with
        # S = [[1, 2], [0, 1]]; the multiplet states must not move
        sys_ = bcbg_system(2)
        fields = build_n2(sys_, "bcbg")
        a = [single(sys_, "a1"), single(sys_, "a2")]
        b = [single(sys_, "b1"), single(sys_, "b2")]
        phi = [single(sys_, "phi1", Q(-1, 2)), single(sys_, "phi2", Q(-1, 2))]
        psi = [single(sys_, "psi1", Q(-1, 2)), single(sys_, "psi2", Q(-1, 2))]
        s_mat = [[1, 2], [0, 1]]
        s_inv_t = [[1, 0], [-2, 1]]  # (S^-1)^T
        a2 = [s_mat[i][0] * a[0] + s_mat[i][1] * a[1] for i in range(2)]
        psi2 = [s_mat[i][0] * psi[0] + s_mat[i][1] * psi[1] for i in range(2)]
        b2 = [s_inv_t[i][0] * b[0] + s_inv_t[i][1] * b[1] for i in range(2)]
        phi2 = [s_inv_t[i][0] * phi[0] + s_inv_t[i][1] * phi[1]
                for i in range(2)]
        gplus = sum((nop(sys_, phi2[i], a2[i]) for i in range(2)), State())
        gminus = sum((nop(sys_, psi2[i], b2[i]) for i in range(2)), State())
        jj = sum((nop(sys_, phi2[i], psi2[i]) for i in range(2)), State())
        L = sum((nop(sys_, a2[i], b2[i]) for i in range(2)), State())
        L = L + Q(1, 2) * sum(
            (nop(sys_, translate(sys_, psi2[i]), phi2[i])
             - nop(sys_, psi2[i], translate(sys_, phi2[i])) for i in range(2)),
            State())
        assert gplus == fields.gplus
        assert gminus == fields.gminus
        assert jj == fields.j
        assert L == fields.l


class TestCharacter:
    def test_boson_partitions(self):
        rows = character(boson_system(), 3)
        assert rows == [(0, 0, 1), (0, 1, 1), (0, 2, 2), (0, 3, 3)]

    def test_fermion_vacuum_row(self):
        rows = character(fermion_system(1), 0)
        assert rows == [(0, 0, 1)]

    def test_bcbg_half_integer_rows(self):
        sys_ = bcbg_system(1)
        fields = build_n2(sys_, "bcbg")
        rows = character(sys_, Q(1, 2), jstate=fields.j)
        assert (1, Q(1, 2), -1) in [(a, b, c) for a, b, c in rows]
        assert (-1, Q(1, 2), -1) in [(a, b, c) for a, b, c in rows]
        assert (0, 0, 1) in [(a, b, c) for a, b, c in rows]

    def test_tsv_format(self):
        rows = character(boson_system(), 2)
        text = character_tsv(rows)
        lines = text.splitlines()
        assert lines[0] == "y_exponent\tq_exponent\tcoefficient"
        assert lines[1].split("\t") == ["0", "0", "1"]
