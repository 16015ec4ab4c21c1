# Copyright 2026 The tsplab Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from __future__ import absolute_import, division

import math
import unittest

import numpy as np
from expects import (be_above, be_below, be_false, be_none, be_true, equal,
                     expect, raise_error)
from scipy import stats

from tsplab.tsp import geometry
from tsplab.tsp.geometry import Box, Topology


_TEST_TORUS = Box(2, 10.0, Topology.TORUS)
_TEST_CUBE = Box(2, 10.0, Topology.CUBE)
_TEST_NN_TRIANGLE = [(0.0, 2.0 / math.sqrt(3.0)),
                     (-1.0, -1.0 / math.sqrt(3.0)),
                     (1.0, -1.0 / math.sqrt(3.0))]


class TestBox(unittest.TestCase):

    def test_should_reject_bad_sides(self):
        testf = lambda: Box(2, 0.0)
        expect(testf).to(raise_error(ValueError))

    def test_should_reduce_onto_the_torus(self):
        reduced = _TEST_TORUS.reduce([(10.5, -0.5)])
        expect(np.allclose(reduced, [(0.5, 9.5)])).to(be_true)

    def test_should_leave_cube_points_alone(self):
        reduced = _TEST_CUBE.reduce([(3.0, 4.0)])
        expect(reduced.tolist()).to(equal([[3.0, 4.0]]))


class TestDist(unittest.TestCase):

    def test_should_measure_plain_distance_in_a_cube(self):
        expect(geometry.dist((0, 0), (3, 4), _TEST_CUBE)).to(equal(5.0))

    def test_should_use_the_nearest_image_on_a_torus(self):
        d = geometry.dist((0.5, 0.5), (9.5, 9.5), _TEST_TORUS)
        expect(abs(d - math.sqrt(2.0))).to(be_below(1e-12))

    def test_should_not_wrap_in_a_cube(self):
        d = geometry.dist((0.5, 0.5), (9.5, 0.5), _TEST_CUBE)
        expect(d).to(equal(9.0))

    def test_should_fail_on_dimension_mismatch(self):
        testf = lambda: geometry.dist((0, 0, 0), (1, 1), _TEST_CUBE)
        expect(testf).to(raise_error(ValueError))

    def test_should_agree_with_the_pairwise_matrix(self):
        rng = np.random.default_rng(3)
        points = rng.random((6, 2)) * 10.0
        matrix = geometry.pairwise_distances(points, points, _TEST_TORUS)
        for i in range(6):
            for j in range(6):
                d = geometry.dist(points[i], points[j], _TEST_TORUS)
                expect(abs(matrix[i, j] - d)).to(be_below(1e-12))

    def test_should_be_symmetric_and_bounded_on_the_torus(self):
        rng = np.random.default_rng(5)
        points = rng.random((20, 2)) * 10.0
        matrix = geometry.pairwise_distances(points, points, _TEST_TORUS)
        expect(np.allclose(matrix, matrix.T)).to(be_true)
        expect(matrix.max()).to(be_below(10.0 * math.sqrt(2.0) / 2 + 1e-12))

    def test_should_satisfy_the_triangle_inequality(self):
        rng = np.random.default_rng(12)
        for box in (_TEST_TORUS, _TEST_CUBE):
            a, b, c = (rng.random((100000, 2)) * box.t for _ in range(3))
            ab, bc, ac = (
                np.sqrt(np.sum(geometry.displacement(u, v, box) ** 2, axis=1))
                for u, v in ((a, b), (b, c), (a, c)))
            expect(float(np.max(ac - ab - bc))).to(be_below(1e-12))


class TestApproxMatch(unittest.TestCase):

    def test_should_match_a_permuted_copy(self):
        A = [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0)]
        B = [(1.0, 3.01), (1.01, 1.0), (2.0, 1.0)]
        found = geometry.approx_match(A, B, 0.05, _TEST_CUBE)
        expect(found.as_dict()).to(equal({0: 1, 1: 2, 2: 0}))
        expect(found.max_displacement).to(be_below(0.05))

    def test_should_refuse_sets_of_different_sizes(self):
        found = geometry.approx_match([(1, 1)], [(1, 1), (2, 2)], 0.1,
                                      _TEST_CUBE)
        expect(found).to(be_none)

    def test_should_refuse_when_a_point_has_no_partner(self):
        found = geometry.approx_match([(1, 1), (2, 2)], [(1, 1), (5, 5)], 0.1,
                                      _TEST_CUBE)
        expect(found).to(be_none)

    def test_should_find_a_matching_a_greedy_pass_would_miss(self):
        # the first point's nearest partner is the only partner of the second
        A = [(1.0, 1.0), (1.08, 1.0)]
        B = [(1.05, 1.0), (0.96, 1.0)]
        found = geometry.approx_match(A, B, 0.06, _TEST_CUBE)
        expect(found.as_dict()).to(equal({0: 1, 1: 0}))

    def test_should_match_in_both_directions_alike(self):
        rng = np.random.default_rng(8)
        for trial in range(200):
            A = rng.random((6, 2)) * 10.0
            B = geometry.perturb(A, 0.1, rng, _TEST_TORUS)[rng.permutation(6)]
            eps = (0.03, 0.06, 0.09, 0.12)[trial % 4]
            there = geometry.approx_match(A, B, eps, _TEST_TORUS)
            back = geometry.approx_match(B, A, eps, _TEST_TORUS)
            expect(there is None).to(equal(back is None))
            if there is not None:
                expect(abs(there.max_displacement -
                           back.max_displacement)).to(be_below(1e-12))

    def test_should_require_a_positive_eps(self):
        testf = lambda: geometry.approx_match([(1, 1)], [(1, 1)], 0.0,
                                              _TEST_CUBE)
        expect(testf).to(raise_error(ValueError))


class TestPerturb(unittest.TestCase):

    def test_should_not_move_points_when_delta_is_zero(self):
        points = np.array([(1.0, 2.0), (3.0, 4.0)])
        moved = geometry.perturb(points, 0.0, np.random.default_rng(1),
                                 _TEST_TORUS)
        expect(moved.tolist()).to(equal(points.tolist()))

    def test_should_stay_within_delta(self):
        points = np.full((500, 2), 5.0)
        moved = geometry.perturb(points, 0.25, np.random.default_rng(2),
                                 _TEST_TORUS)
        shifts = np.sqrt(np.sum((moved - points) ** 2, axis=1))
        expect(shifts.max()).to(be_below(0.25 + 1e-12))
        expect(shifts.max()).to(be_above(0.2))

    def test_should_be_reproducible(self):
        points = np.full((10, 2), 5.0)
        a = geometry.perturb(points, 0.5, np.random.default_rng(9),
                             _TEST_TORUS)
        b = geometry.perturb(points, 0.5, np.random.default_rng(9),
                             _TEST_TORUS)
        expect(a.tolist()).to(equal(b.tolist()))

    def test_should_clip_into_the_cube(self):
        points = np.zeros((50, 2))
        moved = geometry.perturb(points, 1.0, np.random.default_rng(4),
                                 _TEST_CUBE)
        expect(moved.min()).to(equal(0.0))

    def test_should_keep_the_torus_uniform(self):
        rng = np.random.default_rng(21)
        points = rng.random((100000, 2)) * 10.0
        moved = geometry.perturb(points, 0.7, rng, _TEST_TORUS)
        counts, _, _ = np.histogram2d(moved[:, 0], moved[:, 1], bins=10,
                                      range=[[0.0, 10.0], [0.0, 10.0]])
        _, p_value = stats.chisquare(counts.ravel())
        expect(p_value).to(be_above(1e-3))

    def test_should_reject_negative_delta(self):
        testf = lambda: geometry.perturb([(1, 1)], -1.0,
                                         np.random.default_rng(1),
                                         _TEST_CUBE)
        expect(testf).to(raise_error(ValueError))


class TestRoundPoint(unittest.TestCase):

    def test_should_move_less_than_eps(self):
        rng = np.random.default_rng(11)
        points = rng.random((200, 2)) * 10.0
        for eps in (0.5, 1e-3, 1e-7):
            rounded = geometry.round_point(points, eps, _TEST_CUBE)
            shifts = np.sqrt(np.sum((rounded - points) ** 2, axis=1))
            expect(shifts.max()).to(be_below(eps))

    def test_should_keep_the_shape_of_a_single_point(self):
        rounded = geometry.round_point((1.23, 4.56), 0.01, _TEST_CUBE)
        expect(rounded.shape).to(equal((2,)))

    def test_should_be_idempotent(self):
        once = geometry.round_point((1.2345, 6.789), 1e-3, _TEST_CUBE)
        twice = geometry.round_point(once, 1e-3, _TEST_CUBE)
        expect(once.tolist()).to(equal(twice.tolist()))

    def test_should_add_digits_in_high_dimension(self):
        low = geometry.grid_digits(0.01, Box(2, 1.0, Topology.CUBE))
        high = geometry.grid_digits(0.01, Box(16, 1.0, Topology.CUBE))
        expect(high).to(be_above(low))


class TestAngle(unittest.TestCase):

    def test_should_measure_a_right_angle(self):
        a = geometry.angle((1, 0), (0, 0), (0, 1), _TEST_CUBE)
        expect(abs(a - math.pi / 2)).to(be_below(1e-12))

    def test_should_be_zero_along_the_ray(self):
        a = geometry.angle((0, 2), (0, 0), (0, 1), _TEST_CUBE)
        expect(a).to(equal(0.0))

    def test_should_fail_on_a_degenerate_ray(self):
        testf = lambda: geometry.angle((0, 0), (0, 0), (0, 1), _TEST_CUBE)
        expect(testf).to(raise_error(ValueError))


class TestIsProtected(unittest.TestCase):

    def _instance(self, extra=()):
        p = np.array([5.0, 5.0])
        inner = [p + (0.1, 0.0), p - (0.1, 0.0)]
        gadget = [p + np.array(y) for y in _TEST_NN_TRIANGLE]
        far = [(0.2, 0.2), (9.0, 9.0)]
        return np.array(inner + gadget + far + list(extra)), p

    def test_should_hold_for_the_gadget_alone(self):
        points, p = self._instance()
        protected, matching = geometry.is_protected(
            points, _TEST_NN_TRIANGLE, p, 4.0, 1e-6, _TEST_CUBE)
        expect(protected).to(be_true)
        expect(matching.as_dict()).to(equal({0: 2, 1: 3, 2: 4}))

    def test_should_fail_with_a_stray_annulus_point(self):
        points, p = self._instance(extra=[(6.5, 5.0)])
        protected, _ = geometry.is_protected(
            points, _TEST_NN_TRIANGLE, p, 4.0, 1e-6, _TEST_CUBE)
        expect(protected).to(be_false)

    def test_should_fail_when_the_copy_is_displaced(self):
        points, p = self._instance()
        points[2] += (0.01, 0.0)
        protected, _ = geometry.is_protected(
            points, _TEST_NN_TRIANGLE, p, 4.0, 1e-3, _TEST_CUBE)
        expect(protected).to(be_false)

    def test_should_fail_beyond_the_reach(self):
        points, p = self._instance()
        protected, _ = geometry.is_protected(
            points, _TEST_NN_TRIANGLE, p, 4.0, 1e-6, _TEST_CUBE, reach=1.1)
        expect(protected).to(be_false)

    def test_should_work_at_a_smaller_scale(self):
        p = np.array([5.0, 5.0])
        scale = 0.01
        points = np.array([p] + [p + scale * np.array(y)
                                 for y in _TEST_NN_TRIANGLE] + [(1.0, 1.0)])
        protected, _ = geometry.is_protected(
            points, _TEST_NN_TRIANGLE, p, 4.0, 1e-9, _TEST_CUBE, scale=scale)
        expect(protected).to(be_true)

    def test_should_not_depend_on_a_common_translation_of_the_torus(self):
        points, p = self._instance()
        stray, _ = self._instance(extra=[(6.5, 5.0)])
        for shift in [(3.3, 0.0), (7.9, 6.1), (9.5, 2.25)]:
            moved_p = _TEST_TORUS.reduce(np.array([p + shift]))[0]
            protected, matching = geometry.is_protected(
                _TEST_TORUS.reduce(points + shift), _TEST_NN_TRIANGLE,
                moved_p, 4.0, 1e-6, _TEST_TORUS)
            expect(protected).to(be_true)
            expect(matching.as_dict()).to(equal({0: 2, 1: 3, 2: 4}))
            blocked, _ = geometry.is_protected(
                _TEST_TORUS.reduce(stray + shift), _TEST_NN_TRIANGLE,
                moved_p, 4.0, 1e-6, _TEST_TORUS)
            expect(blocked).to(be_false)

    def test_should_reject_small_R(self):
        points, p = self._instance()
        testf = lambda: geometry.is_protected(points, _TEST_NN_TRIANGLE, p,
                                              1.0, 1e-6, _TEST_CUBE)
        expect(testf).to(raise_error(ValueError))
