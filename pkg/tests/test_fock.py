import random

import pytest

from vertexfock._rationals import Q
from vertexfock.fock import (FockError, ModeSymbol, Monomial, State,
                             apply_mode, boson_system, bcbg_system,
                             enumerate_basis, fermion_system, msv_system,
                             normal_order_word, parse_state, render_state,
                             single, weight_of, parity_of)


def partitions_count(n):
    """Independent oracle: partition numbers by Euler recurrence."""
    p = [1] + [0] * n
    for k in range(1, n + 1):
        for m in range(k, n + 1):
            p[m] += p[m - k]
    return p[n]


def mono(system, pairs, base=None):
    modes = []
    for name, idx, mult in pairs:
        gid = system.gid(name)
        modes.append((system.internal_index(gid, Q(idx)), gid, mult))
    return State.monomial(Monomial(tuple(sorted(modes)), base))


class TestApplyMode:
    def test_paper_reduction_printed_rhs(self):
        # d[3] d[-1] d[-3]^2 d[-5]|0> = 6 d[-1]d[-3]d[-5]|0>
        sys_ = boson_system()
        start = mono(sys_, [("d", -1, 1), ("d", -3, 2), ("d", -5, 1)])
        out = apply_mode(sys_, ModeSymbol("d", Q(3)), start)
        assert out == 6 * mono(sys_, [("d", -1, 1), ("d", -3, 1), ("d", -5, 1)])

    def test_paper_reduction_squared_input(self):
        # with d[-1]^2 on the left the square survives the commutator
        sys_ = boson_system()
        start = mono(sys_, [("d", -1, 2), ("d", -3, 2), ("d", -5, 1)])
        out = apply_mode(sys_, ModeSymbol("d", Q(3)), start)
        assert out == 6 * mono(sys_, [("d", -1, 2), ("d", -3, 1), ("d", -5, 1)])

    def test_pure_creation(self):
        sys_ = boson_system()
        out = apply_mode(sys_, ModeSymbol("d", Q(-7)), State.vacuum())
        assert out == mono(sys_, [("d", -7, 1)])

    def test_fermion_contraction(self):
        fs = fermion_system(1)
        psi = single(fs, "psi", Q(-1, 2))
        out = apply_mode(fs, ModeSymbol("phi", Q(1, 2)), psi)
        assert out == State.vacuum()

    def test_annihilates_vacuum(self):
        sys_ = boson_system()
        for idx in (0, 1, 5):
            assert not apply_mode(sys_, ModeSymbol("d", Q(idx)), State.vacuum())

    def test_unknown_generator(self):
        sys_ = boson_system()
        with pytest.raises(FockError):
            apply_mode(sys_, ModeSymbol("nope", Q(1)), State.vacuum())

    def test_wrong_integrality(self):
        fs = fermion_system(1)
        with pytest.raises(FockError):
            apply_mode(fs, ModeSymbol("phi", Q(1)), State.vacuum())
        sys_ = boson_system()
        with pytest.raises(FockError):
            apply_mode(sys_, ModeSymbol("d", Q(1, 2)), State.vacuum())

    def test_bilinearity_random(self):
        sys_ = bcbg_system(1)
        rng = random.Random(7)
        basis = enumerate_basis(sys_, 2)
        for _ in range(25):
            s = State.monomial(rng.choice(basis))
            t = State.monomial(rng.choice(basis))
            alpha = Q(rng.randrange(-9, 10), rng.randrange(1, 9))
            beta = Q(rng.randrange(-9, 10), rng.randrange(1, 9))
            mode = ModeSymbol(rng.choice(["a", "b", "phi", "psi"]),
                              Q(rng.randrange(-2, 3)) + (0 if rng.random() < .5
                                                         else Q(1, 2)))
            try:
                left = apply_mode(sys_, mode, alpha * s + beta * t)
                right = alpha * apply_mode(sys_, mode, s) + \
                    beta * apply_mode(sys_, mode, t)
            except FockError:
                continue  # integrality mismatch for that generator
            assert left == right


class TestBracketFidelity:
    def test_boson_bracket_matrix(self):
        # [d[m], d[n]] = m delta_{m+n} on the weight <= 6 truncation
        sys_ = boson_system()
        vectors = [State.monomial(m) for m in enumerate_basis(sys_, 6)]
        for m in range(-5, 6):
            for n in range(-5, 6):
                for v in vectors:
                    lhs = apply_mode(sys_, ModeSymbol("d", Q(m)),
                                     apply_mode(sys_, ModeSymbol("d", Q(n)), v)) \
                        - apply_mode(sys_, ModeSymbol("d", Q(n)),
                                     apply_mode(sys_, ModeSymbol("d", Q(m)), v))
                    expected = (m if m + n == 0 else 0) * v
                    assert lhs == expected

    def test_fermion_anticommutator(self):
        fs = fermion_system(1)
        vectors = [State.monomial(m) for m in enumerate_basis(fs, Q(5, 2))]
        halves = [Q(k, 2) for k in range(-5, 6, 2)]
        for m in halves:
            for n in halves:
                for v in vectors:
                    lhs = apply_mode(fs, ModeSymbol("phi", m),
                                     apply_mode(fs, ModeSymbol("psi", n), v)) \
                        + apply_mode(fs, ModeSymbol("psi", n),
                                     apply_mode(fs, ModeSymbol("phi", m), v))
                    assert lhs == (1 if m + n == 0 else 0) * v

    def test_msv_bracket(self):
        ms = msv_system(1)
        vectors = [State.monomial(m)
                   for m in enumerate_basis(ms, 2, max_zero_weight=2)]
        for m in range(-3, 4):
            for n in range(-3, 4):
                for v in vectors:
                    lhs = apply_mode(ms, ModeSymbol("a", Q(m)),
                                     apply_mode(ms, ModeSymbol("b", Q(n)), v)) \
                        - apply_mode(ms, ModeSymbol("b", Q(n)),
                                     apply_mode(ms, ModeSymbol("a", Q(m)), v))
                    assert lhs == (1 if m + n == 0 else 0) * v

    def test_msv_creator_split(self):
        # b[0] creates, b[1] annihilates, a[0] annihilates
        ms = msv_system(1)
        assert apply_mode(ms, ModeSymbol("b", Q(0)), State.vacuum())
        assert not apply_mode(ms, ModeSymbol("b", Q(1)), State.vacuum())
        assert not apply_mode(ms, ModeSymbol("a", Q(0)), State.vacuum())


class TestNormalOrder:
    def test_annihilator_kills_vacuum(self):
        sys_ = boson_system()
        out = normal_order_word(sys_, [ModeSymbol("d", Q(5)),
                                       ModeSymbol("d", Q(-5))])
        assert not out

    def test_koszul_sign_single_transposition(self):
        # :phi[1/2] psi[-1/2]: = -psi[-1/2] phi[1/2]; kills |0> and the
        # sign is visible against the anticommutator identity
        fs = fermion_system(1)
        assert not normal_order_word(fs, [ModeSymbol("phi", Q(1, 2)),
                                          ModeSymbol("psi", Q(-1, 2))])
        # phi[1/2] psi[-1/2] |0> = {phi,psi}|0> + :...:|0> = |0>
        psi = single(fs, "psi", Q(-1, 2))
        assert apply_mode(fs, ModeSymbol("phi", Q(1, 2)), psi) == State.vacuum()

    def test_boson_square(self):
        sys_ = boson_system()
        out = normal_order_word(sys_, [ModeSymbol("d", Q(-1)),
                                       ModeSymbol("d", Q(-1))])
        assert out == mono(sys_, [("d", -1, 2)])

    def test_idempotent_on_ordered(self):
        fs = fermion_system(2)
        word = [ModeSymbol("psi1", Q(-3, 2)), ModeSymbol("phi2", Q(-1, 2)),
                ModeSymbol("phi1", Q(1, 2))]
        once = normal_order_word(fs, word)
        # the word is already normally ordered: creators left
        assert once == normal_order_word(fs, word)

    def test_creator_reorder_is_koszul_sign(self):
        fs = fermion_system(1)
        ab = normal_order_word(fs, [ModeSymbol("phi", Q(-1, 2)),
                                    ModeSymbol("psi", Q(-1, 2))])
        ba = normal_order_word(fs, [ModeSymbol("psi", Q(-1, 2)),
                                    ModeSymbol("phi", Q(-1, 2))])
        assert ab == -1 * ba


class TestEnumerationAndWeights:
    def test_partition_dimensions(self):
        sys_ = boson_system()
        basis = enumerate_basis(sys_, 10)
        for n in range(11):
            count = sum(1 for m in basis if sys_.monomial_weight(m) == n)
            assert count == partitions_count(n)

    def test_cutoff_zero(self):
        sys_ = boson_system()
        assert enumerate_basis(sys_, 0) == [Monomial((), None)]

    def test_fermion_weight_one_count(self):
        fs = fermion_system(1)
        basis = enumerate_basis(fs, 1)
        weight_one = [m for m in basis if fs.monomial_weight(m) == 1]
        assert len(weight_one) == 1  # phi[-1/2] psi[-1/2] |0>

    def test_negative_cutoff(self):
        with pytest.raises(FockError):
            enumerate_basis(boson_system(), -1)

    def test_msv_requires_cap(self):
        with pytest.raises(FockError):
            enumerate_basis(msv_system(1), 1)

    def test_weights(self):
        sys_ = boson_system()
        assert weight_of(sys_, mono(sys_, [("d", -1, 2), ("d", -3, 1)])) == 5
        assert weight_of(sys_, State.vacuum()) == 0
        fs = fermion_system(1)
        assert weight_of(fs, single(fs, "psi", Q(-3, 2))) == Q(3, 2)

    def test_inhomogeneous_weight_raises(self):
        sys_ = boson_system()
        s = State.vacuum() + mono(sys_, [("d", -1, 1)])
        with pytest.raises(FockError):
            weight_of(sys_, s)

    def test_parity(self):
        fs = fermion_system(1)
        assert parity_of(fs, single(fs, "phi", Q(-1, 2))) == 1
        assert parity_of(fs, State.vacuum()) == 0


class TestSerialization:
    def test_round_trip_random(self):
        sys_ = bcbg_system(2)
        rng = random.Random(3)
        basis = enumerate_basis(sys_, 2)
        for _ in range(20):
            state = State()
            for _ in range(rng.randrange(1, 5)):
                c = Q(rng.randrange(-50, 51), rng.randrange(1, 30))
                state = state + c * State.monomial(rng.choice(basis))
            text = render_state(sys_, state)
            assert parse_state(sys_, text) == state

    def test_sector_round_trip(self):
        from vertexfock.lattice import LatticeSystem
        sys_ = LatticeSystem(2)
        st = sys_.sector_state((1, -2), (0, 3))
        from vertexfock.fock import apply_raw
        st = apply_raw(sys_, sys_.Phi[0], -1, st) + Q(3, 7) * st
        text = render_state(sys_, st)
        assert parse_state(sys_, text) == st

    def test_zero_state(self):
        sys_ = boson_system()
        assert render_state(sys_, State()) == "0"
        assert parse_state(sys_, "0") == State()
