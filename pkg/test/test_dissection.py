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

import unittest

import numpy as np
import pytest
from expects import (be_above, be_above_or_equal, be_below, be_true, contain,
                     equal, expect)

from tsplab.config import HeuristicOptions, SolverOptions
from tsplab.tsp import dissection, exact, heuristics, instance, tours
from tsplab.tsp.geometry import Box, Topology


_TEST_CORNERS = ((-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5))


def _clustered():
    """Unit squares at the centres of the 3 x 3 cells of a 30-torus."""
    points = [(10.0 * i + 5.0 + a, 10.0 * j + 5.0 + b)
              for j in range(3) for i in range(3) for a, b in _TEST_CORNERS]
    return instance.Instance(points, Box(2, 30.0))


def _internal_edges(order, members):
    members = set(int(m) for m in members)
    m = len(order)
    return [tours.edge(order[k], order[(k + 1) % m]) for k in range(m)
            if order[k] in members and order[(k + 1) % m] in members]


class TestCellsPerAxis(unittest.TestCase):

    def test_should_use_the_natural_logarithm(self):
        expect(dissection.cells_per_axis(100, 2)).to(equal(4))
        expect(dissection.cells_per_axis(1000, 3)).to(equal(5))

    def test_should_use_one_cell_for_tiny_instances(self):
        expect(dissection.cells_per_axis(2, 2)).to(equal(1))


class TestSnakeOrder(unittest.TestCase):

    def test_should_visit_neighbouring_cells(self):
        cells = dissection.snake_order(3, 2)
        expect(cells[:4]).to(equal([(0, 0), (1, 0), (2, 0), (2, 1)]))
        for a, b in zip(cells, cells[1:]):
            expect(int(np.abs(np.subtract(a, b)).sum())).to(equal(1))

    def test_should_cover_every_cell_once(self):
        cells = dissection.snake_order(3, 3)
        expect(len(set(cells))).to(equal(27))
        for a, b in zip(cells, cells[1:]):
            expect(int(np.abs(np.subtract(a, b)).sum())).to(equal(1))


class TestPartition(unittest.TestCase):

    def test_should_place_every_point_once(self):
        inst = instance.gen_uniform(200, 2, seed=4)
        _, groups, _ = dissection.partition(inst, 24)
        members = np.sort(np.concatenate(groups))
        expect(members.tolist()).to(equal(list(range(200))))

    def test_should_quarter_crowded_cells(self):
        inst = instance.gen_uniform(200, 2, seed=4)
        _, groups, quartered = dissection.partition(inst, 4)
        expect(quartered).to(be_above(0))
        expect(max(len(g) for g in groups)).to(be_below(5))


class TestKarpDissection(unittest.TestCase):

    def test_should_account_for_every_unit_of_length(self):
        inst = instance.gen_uniform(120, 2, seed=9)
        tour = dissection.karp_dissection(inst)
        expect(tour.is_valid(120)).to(be_true)
        accounted = (sum(tour.meta[u'cell_lengths']) +
                     sum(tour.meta[u'patch_costs']))
        expect(abs(accounted - tour.length)).to(be_below(1e-6))
        expect(tour.meta[u'cells']).to(equal(
            tour.meta[u'cells_per_axis'] ** 2))
        expect(tour.meta[u'log']).to(equal(u'natural'))

    def test_should_solve_a_single_cell_exactly(self):
        inst = instance.gen_uniform(8, 2, seed=1, topology=Topology.CUBE)
        tour = dissection.karp_dissection(
            inst, options=HeuristicOptions(karp_cell_limit=8))
        best = exact.held_karp_tour(inst.points, inst.box)
        expect(dissection.cells_per_axis(8, 2)).to(equal(1))
        expect(abs(tour.length - best.length)).to(be_below(1e-9))

    def test_should_not_depend_on_the_thread_count(self):
        inst = instance.gen_uniform(150, 2, seed=2)
        serial = dissection.karp_dissection(inst)
        threaded = dissection.karp_dissection(
            inst, options=HeuristicOptions(threads=4))
        expect(threaded.order).to(equal(serial.order))

    def test_should_respect_a_small_cell_limit(self):
        inst = instance.gen_uniform(80, 2, seed=6)
        tour = dissection.karp_dissection(
            inst, options=HeuristicOptions(karp_cell_limit=5),
            solver_options=SolverOptions(n_max=5))
        expect(tour.is_valid(80)).to(be_true)

    def test_should_visit_each_cell_along_its_exact_tour(self):
        inst = instance.gen_uniform(400, 2, seed=3)
        _, groups, _ = dissection.partition(inst, SolverOptions().n_max)
        cycles = [dissection.cell_tour(inst, members)[0] for members in groups]
        last = len(groups) - 1
        for patching in HeuristicOptions.KARP_PATCHES:
            tour = dissection.karp_dissection(
                inst, options=HeuristicOptions(karp_patch=patching))
            expect(tour.meta[u'patching']).to(equal(patching))
            for k, members in enumerate(groups):
                own = tours.cycle_edges(cycles[k])
                internal = _internal_edges(tour.order, members)
                for e in internal:
                    expect(own).to(contain(e))
                if len(members) >= 3:
                    lost = 1 if k in (0, last) else 2
                    expect(len(internal)).to(equal(len(members) - lost))

    def test_should_only_add_length_when_patching(self):
        inst = _clustered()
        tour = dissection.karp_dissection(inst)
        expect(tour.meta[u'cells_per_axis']).to(equal(3))
        expect(tour.meta[u'shortening_patches']).to(equal(0))
        for cost in tour.meta[u'patch_costs']:
            expect(cost).to(be_above_or_equal(0.0))
        expect(sum(tour.meta[u'cell_lengths'])).to(be_below(tour.length))
        _, groups, _ = dissection.partition(inst, SolverOptions().n_max)
        expect(len(groups)).to(equal(9))
        for k, members in enumerate(groups):
            cycle, length = dissection.cell_tour(inst, members)
            expect(abs(length - 4.0)).to(be_below(1e-9))
            internal = _internal_edges(tour.order, members)
            for e in internal:
                expect(tours.cycle_edges(cycle)).to(contain(e))
            expect(len(internal)).to(equal(3 if k in (0, 8) else 2))

    def test_should_keep_coinciding_points_together(self):
        inst = instance.Instance(np.full((30, 2), 1.0), Box(2, 10.0))
        _, groups, _ = dissection.partition(inst, SolverOptions().n_max)
        expect(len(groups)).to(equal(1))
        tour = dissection.karp_dissection(inst)
        expect(tour.is_valid(30)).to(be_true)
        expect(tour.length).to(be_below(1e-12))

    def test_should_tour_a_coarsely_discretized_instance(self):
        inst = instance.gen_uniform(100, 2, seed=1, bits=1)
        expect(len(inst.duplicates)).to(be_above(0))
        limit = SolverOptions().n_max
        _, groups, _ = dissection.partition(inst, limit)
        for members in groups:
            if len(members) > limit:
                local = inst.points[members]
                expect(bool(np.all(local == local[0]))).to(be_true)
        tour = dissection.karp_dissection(inst)
        expect(tour.is_valid(100)).to(be_true)
        accounted = (sum(tour.meta[u'cell_lengths']) +
                     sum(tour.meta[u'patch_costs']))
        expect(abs(accounted - tour.length)).to(be_below(1e-6))

    def test_should_collapse_copies_before_solving(self):
        points = [(1.0, 1.0)] * 20 + [(2.0, 1.0)] * 20 + [(1.5, 2.0)]
        inst = instance.Instance(points, Box(2, 10.0))
        members = np.arange(41)
        cycle, length = dissection.cell_tour(
            inst, members, SolverOptions(n_max=4))
        expect(sorted(cycle)).to(equal(list(range(41))))
        expect(cycle[:20]).to(equal(list(range(20))))
        best = exact.held_karp_tour([(1.0, 1.0), (2.0, 1.0), (1.5, 2.0)],
                                    inst.box)
        expect(abs(length - best.length)).to(be_below(1e-9))

    @pytest.mark.timeout(900)
    def test_should_beat_nearest_neighbour_on_large_uniform_instances(self):
        # both ratios share the instance's lower bound, so lengths decide
        options = HeuristicOptions(karp_patch=u'cheapest')
        wins = 0
        for seed in range(20):
            inst = instance.gen_uniform(2048, 2, seed=seed)
            karp = dissection.karp_dissection(inst, options=options)
            nearest = heuristics.nearest_neighbor(inst)
            expect(karp.meta[u'cells_per_axis']).to(equal(16))
            if karp.length < nearest.length:
                wins += 1
        expect(wins).to(be_above_or_equal(16))
