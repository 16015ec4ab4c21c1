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

from __future__ import absolute_import

import unittest

import numpy as np
from expects import be_below, equal, expect

from tsplab.tsp import geometry, improve
from tsplab.tsp.geometry import Box, Topology
from tsplab.tsp.tours import path_length


_TEST_CUBE = Box(2, 10.0, Topology.CUBE)


class TestImprovePath(unittest.TestCase):

    def test_should_uncross_a_path(self):
        points = [(0, 0), (1, 1), (1, 0), (2, 1)]
        matrix = geometry.pairwise_distances(points, points, _TEST_CUBE)
        order, length = improve.improve_path((0, 1, 2, 3), matrix)
        expect(order[0]).to(equal(0))
        expect(order[-1]).to(equal(3))
        expect(length).to(be_below(path_length((0, 1, 2, 3), matrix)))

    def test_should_keep_both_ends(self):
        rng = np.random.default_rng(3)
        points = rng.random((12, 2)) * 10
        matrix = geometry.pairwise_distances(points, points, _TEST_CUBE)
        start = tuple(range(12))
        order, length = improve.improve_path(start, matrix)
        expect((order[0], order[-1])).to(equal((0, 11)))
        expect(sorted(order)).to(equal(list(range(12))))
        expect(length).to(be_below(path_length(start, matrix) + 1e-12))

    def test_should_leave_a_straight_line_alone(self):
        points = [(float(x), 0.0) for x in range(5)]
        matrix = geometry.pairwise_distances(points, points, _TEST_CUBE)
        order, length = improve.improve_path(range(5), matrix)
        expect(order).to(equal((0, 1, 2, 3, 4)))
        expect(length).to(equal(4.0))
