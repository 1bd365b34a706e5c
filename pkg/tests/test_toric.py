import json

import pytest

from vertexfock._rationals import Q
from vertexfock.toric import (CoefficientMap, Cone, Fan, ReflexivePair,
                              ToricError, coefficients_from_json,
                              coefficients_to_json, dual_polytope, extend_fan,
                              generic_coefficients, in_common_cone,
                              is_reflexive_pair, is_smooth_fan, lattice_points,
                              load_polytope_file, polytope_from_json,
                              polytope_to_json, save_polytope_file)

SEGMENT = [(-1,), (1,)]
SMALL_TRIANGLE = [(1, 0), (0, 1), (-1, -1)]
BIG_TRIANGLE = [(2, -1), (-1, 2), (-1, -1)]


class TestDuality:
    def test_segment_self_dual(self):
        assert dual_polytope(SEGMENT) == [(-1,), (1,)]

    def test_triangle_pair(self):
        assert dual_polytope(SMALL_TRIANGLE) == sorted(BIG_TRIANGLE)
        assert dual_polytope(BIG_TRIANGLE) == sorted(SMALL_TRIANGLE)

    def test_involution(self):
        for poly in (SEGMENT, SMALL_TRIANGLE, BIG_TRIANGLE):
            assert dual_polytope(dual_polytope(poly)) == sorted(map(tuple, poly))

    def test_origin_not_interior(self):
        with pytest.raises(ToricError):
            dual_polytope([(1, 0), (2, 1), (1, 1)])

    def test_not_reflexive(self):
        # square of side 4: dual vertices are not lattice points
        with pytest.raises(ToricError):
            dual_polytope([(2, 2), (2, -2), (-2, 2), (-2, -2)])

    def test_is_reflexive_pair(self):
        assert is_reflexive_pair(SEGMENT, SEGMENT)
        assert is_reflexive_pair(SMALL_TRIANGLE, BIG_TRIANGLE)
        assert not is_reflexive_pair(SMALL_TRIANGLE, SMALL_TRIANGLE)


class TestLatticePoints:
    def test_segment_slice(self):
        pair = ReflexivePair(1, SEGMENT, SEGMENT)
        assert pair.delta_points() == [(-1, 1), (0, 1), (1, 1)]
        assert pair.delta_star_points() == [(-1, 1), (0, 1), (1, 1)]

    def test_big_triangle_has_ten(self):
        assert len(lattice_points(BIG_TRIANGLE)) == 10

    def test_small_triangle_has_four(self):
        assert len(lattice_points(SMALL_TRIANGLE)) == 4

    def test_sorted_lexicographically(self):
        pts = lattice_points(BIG_TRIANGLE)
        assert pts == sorted(pts)

    def test_slice_matches_cone_degree_one(self):
        # lattice points of Delta = degree-one points of K
        pair = ReflexivePair(2, BIG_TRIANGLE, SMALL_TRIANGLE)
        cone_k = Cone([v + (1,) for v in pair.delta1])
        for p in pair.delta_points():
            assert cone_k.contains(p)
        # and all degree-one K points in a box are Delta points
        pts = set(pair.delta_points())
        for x in range(-3, 4):
            for y in range(-3, 4):
                inside = cone_k.contains((x, y, 1))
                assert inside == ((x, y, 1) in pts)


class TestFans:
    def test_p2_fan_smooth(self):
        fan = Fan(SMALL_TRIANGLE, [(0, 1), (1, 2), (2, 0)])
        assert is_smooth_fan(fan)

    def test_index_two_cone_not_smooth(self):
        assert not is_smooth_fan(Fan([(1, 0), (1, 2)], [(0, 1)]))

    def test_empty_fan(self):
        assert is_smooth_fan(Fan([], [()]))

    def test_nonprimitive_ray_rejected(self):
        with pytest.raises(ToricError):
            is_smooth_fan(Fan([(2, 0)], [(0,)]))

    def test_extend_origin_cone(self):
        ext = extend_fan(Fan([], [()]))
        assert ext.rays == [(1,)]
        assert (0,) in ext.cones

    def test_extend_p1(self):
        ext = extend_fan(Fan([(1,), (-1,)], [(0,), (1,)]))
        assert ext.rays == [(1, 0), (-1, 0), (0, 1)]
        maximal = [c for c in ext.cones if len(c) == 2]
        assert sorted(maximal) == [(0, 2), (1, 2)]

    def test_extend_p2(self):
        ext = extend_fan(Fan(SMALL_TRIANGLE, [(0, 1), (1, 2), (2, 0)]))
        assert len([c for c in ext.cones if len(c) == 3]) == 3
        assert is_smooth_fan(ext)

    def test_in_common_cone_examples(self):
        ext = extend_fan(Fan([(1,), (-1,)], [(0,), (1,)]))
        assert in_common_cone(ext, (0, 0), (0, 0))
        assert not in_common_cone(ext, (1, 1), (-1, 1))
        assert in_common_cone(ext, (1, 1), (0, 1))

    def test_in_common_cone_symmetric_reflexive(self):
        ext = extend_fan(Fan(SMALL_TRIANGLE, [(0, 1), (1, 2), (2, 0)]))
        pts = [(1, 0, 0), (0, 1, 1), (-1, -1, 2), (0, 0, 1), (2, 1, 1)]
        for a in pts:
            assert in_common_cone(ext, a, a)
            for b in pts:
                assert in_common_cone(ext, a, b) == in_common_cone(ext, b, a)


class TestCoefficients:
    def setup_method(self):
        self.pair = ReflexivePair(1, SEGMENT, SEGMENT)

    def test_deterministic(self):
        c1 = generic_coefficients(self.pair.delta_points(),
                                  self.pair.delta_star_points(), 11)
        c2 = generic_coefficients(self.pair.delta_points(),
                                  self.pair.delta_star_points(), 11)
        assert c1.f == c2.f and c1.g == c2.g

    def test_nonzero_small_many_seeds(self):
        for seed in range(1, 101):
            c = generic_coefficients(self.pair.delta_points(),
                                     self.pair.delta_star_points(), seed)
            for v in list(c.f.values()) + list(c.g.values()):
                assert v != 0
                assert abs(v.numerator) <= 97 and v.denominator <= 97

    def test_json_round_trip(self):
        c = generic_coefficients(self.pair.delta_points(),
                                 self.pair.delta_star_points(), 5)
        again = coefficients_from_json(coefficients_to_json(c))
        assert again.f == c.f and again.g == c.g and again.seed == 5


class TestFiles:
    def test_polytope_round_trip(self, tmp_path):
        pair = ReflexivePair(2, BIG_TRIANGLE, SMALL_TRIANGLE)
        fan = Fan(SMALL_TRIANGLE, [(0, 1), (1, 2), (2, 0)])
        path = tmp_path / "p2.json"
        save_polytope_file(path, pair, fan)
        pair2, fan2 = load_polytope_file(path)
        assert sorted(pair2.delta1) == sorted(map(tuple, BIG_TRIANGLE))
        assert sorted(pair2.delta1_star) == sorted(map(tuple, SMALL_TRIANGLE))
        assert fan2.rays == [tuple(r) for r in fan.rays]

    def test_shipped_fixtures(self):
        pair, fan = load_polytope_file("fixtures/p1.json")
        assert pair.rank_d1 == 1
        assert is_smooth_fan(fan)
        pair, fan = load_polytope_file("fixtures/p2.json")
        assert len(pair.delta_points()) == 10
        assert len(pair.delta_star_points()) == 4
        assert is_smooth_fan(fan)

    def test_non_reflexive_input_rejected(self):
        data = {"rank_d1": 2,
                "delta1_vertices": [[2, 2], [2, -2], [-2, 2], [-2, -2]],
                "rays": [[1, 0]], "fan_cones": [[0]]}
        with pytest.raises(ToricError):
            polytope_from_json(data)
