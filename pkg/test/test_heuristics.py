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

import pytest
from expects import (be_above, be_below, be_true, equal, expect,
                     raise_error)

from tsplab.tsp import exact, heuristics, instance
from tsplab.tsp.geometry import Box, Topology
from tsplab.tsp.heuristics import HeuristicStuck, Heuristics
from tsplab.tsp.instance import Instance
from tsplab.tsp.tours import EdgeConstraints, InfeasibleConstraints


_TEST_CUBE = Box(2, 10.0, Topology.CUBE)
_TEST_CONSTRUCTIONS = (Heuristics.NN, Heuristics.GREEDY, Heuristics.NI,
                       Heuristics.FI)


def _line(*xs):
    return Instance([(float(x), 0.0) for x in xs], _TEST_CUBE)


class TestNearestNeighbor(unittest.TestCase):

    def test_should_walk_to_the_nearest_point(self):
        tour = heuristics.nearest_neighbor(_line(0, 3, 1, 2))
        expect(tour.order).to(equal((0, 2, 3, 1)))
        expect(tour.length).to(equal(6.0))

    def test_should_break_ties_by_position(self):
        inst = Instance([(5.0, 5.0), (6.0, 5.0), (4.0, 5.0), (5.0, 9.0)],
                        _TEST_CUBE)
        expect(heuristics.nearest_neighbor(inst).order).to(
            equal((0, 1, 2, 3)))

    def test_should_travel_forced_chains_as_units(self):
        inst = _line(0, 3, 1, 2)
        constraints = EdgeConstraints([(0, 1)])
        tour = heuristics.nearest_neighbor(inst, constraints)
        expect(constraints.admits(tour.order)).to(be_true)
        expect(tour.order).to(equal((0, 1, 3, 2)))


class TestGreedy(unittest.TestCase):

    def test_should_take_the_shortest_edges(self):
        tour = heuristics.greedy(_line(0, 1, 3, 6))
        expect(tour.order).to(equal((0, 1, 2, 3)))
        expect(tour.length).to(equal(12.0))

    def test_should_close_a_square(self):
        inst = Instance([(0, 0), (1, 0), (1, 1), (0, 1)], _TEST_CUBE)
        tour = heuristics.greedy(inst)
        expect(tour.order).to(equal((0, 1, 2, 3)))
        expect(tour.length).to(equal(4.0))

    def test_should_avoid_forbidden_edges(self):
        inst = _line(0, 1, 3, 6)
        constraints = EdgeConstraints(forbidden=[(0, 1)])
        tour = heuristics.greedy(inst, constraints)
        expect((0, 1) in tour.edges()).to(equal(False))


class TestInsertion(unittest.TestCase):

    def test_should_start_from_the_closest_triangle(self):
        inst = Instance([(0, 0), (1, 0), (9, 9), (0, 1), (5, 5)], _TEST_CUBE)
        tour = heuristics.nearest_insertion(inst)
        expect(tour.is_valid(5)).to(be_true)
        expect(tour.meta[u'heuristic']).to(equal(u'ni'))

    def test_farthest_should_differ_from_nearest_in_order_of_insertion(self):
        inst = instance.gen_uniform(12, 2, seed=8, topology=Topology.CUBE)
        near = heuristics.nearest_insertion(inst)
        far = heuristics.farthest_insertion(inst)
        expect(near.is_valid(12)).to(be_true)
        expect(far.is_valid(12)).to(be_true)
        expect(far.meta[u'heuristic']).to(equal(u'fi'))


class TestAllHeuristics(unittest.TestCase):

    def test_should_produce_valid_tours_no_shorter_than_optimal(self):
        for seed in range(5):
            inst = instance.gen_uniform(9, 2, seed=seed)
            best = exact.held_karp_tour(inst.points, inst.box).length
            for h in _TEST_CONSTRUCTIONS:
                tour = h.build(inst)
                expect(tour.is_valid(inst.n)).to(be_true)
                expect(tour.order[0]).to(equal(0))
                expect(tour.length).to(be_above(best - 1e-9))

    @pytest.mark.timeout(600)
    def test_should_never_beat_the_exact_optimum(self):
        for seed in range(200):
            topology = Topology.TORUS if seed % 2 else Topology.CUBE
            inst = instance.gen_uniform(3 + seed % 10, 2, seed=seed,
                                        topology=topology)
            best = exact.held_karp_tour(inst.points, inst.box).length
            for h in Heuristics:
                tour = h.build(inst)
                expect(tour.is_valid(inst.n)).to(be_true)
                expect(tour.length).to(be_above(best - 1e-9))

    def test_should_handle_one_and_two_points(self):
        for h in _TEST_CONSTRUCTIONS:
            expect(h.build(_line(1)).length).to(equal(0.0))
            expect(h.build(_line(1, 4)).length).to(equal(6.0))

    def test_should_honour_constraints_or_get_stuck(self):
        inst = instance.gen_uniform(10, 2, seed=3)
        constraints = EdgeConstraints([(0, 5), (2, 7)], [(1, 3), (4, 6)])
        for h in _TEST_CONSTRUCTIONS:
            try:
                tour = heuristics.run_constrained(h, inst, constraints)
            except HeuristicStuck:
                continue
            expect(constraints.admits(tour.order)).to(be_true)

    def test_should_reject_structurally_infeasible_constraints(self):
        inst = instance.gen_uniform(6, 2, seed=1)
        constraints = EdgeConstraints([(0, 1), (0, 2), (0, 3)])
        testf = lambda: heuristics.run_constrained(u'nn', inst, constraints)
        expect(testf).to(raise_error(InfeasibleConstraints))

    def test_should_be_deterministic(self):
        inst = instance.gen_uniform(15, 2, seed=6)
        for h in _TEST_CONSTRUCTIONS:
            expect(h.build(inst)).to(equal(h.build(inst)))


class TestHeuristicsRegistry(unittest.TestCase):

    def test_should_find_heuristics_by_name(self):
        for name in (u'nn', u'greedy', u'ni', u'fi', u'karp'):
            expect(Heuristics.from_name(name).label).to(equal(name))

    def test_should_reject_unknown_names(self):
        testf = lambda: Heuristics.from_name(u'christofides')
        expect(testf).to(raise_error(ValueError))

    def test_karp_should_refuse_constraints(self):
        inst = instance.gen_uniform(10, 2, seed=2)
        testf = lambda: Heuristics.KARP.build(inst, EdgeConstraints([(0, 1)]))
        expect(testf).to(raise_error(HeuristicStuck))

    def test_tour_length_should_use_the_torus(self):
        box = Box(1, 10.0, Topology.TORUS)
        points = Instance([(0.5,), (9.5,)], box).points
        expect(heuristics.tour_length(points, (0, 1), box)).to(
            be_below(2.0 + 1e-12))
