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

import itertools
import unittest

import pytest
from expects import (be_above, be_below, be_false, be_none, be_true, equal,
                     expect, raise_error)

from tsplab.config import BnBOptions
from tsplab.tsp import bnb, exact, instance
from tsplab.tsp.bnb import BnBStats, BoundKind, BranchRule, Incumbent
from tsplab.tsp.heuristics import Heuristics
from tsplab.tsp.tours import EdgeConstraints


_TEST_N = 7


def _optimum(inst):
    return exact.held_karp_tour(inst.points, inst.box).length


class TestIncumbent(unittest.TestCase):

    def test_should_parse_every_mode(self):
        expect(Incumbent.parse(u'heur').mode).to(equal(Incumbent.HEURISTIC))
        expect(Incumbent.parse(u'exact').mode).to(equal(Incumbent.EXACT))
        fixed = Incumbent.parse(u'fixed:12.5')
        expect(fixed.is_fixed).to(be_true)
        expect(fixed.value).to(equal(12.5))

    def test_should_reject_bad_modes(self):
        for text in (u'best', u'fixed:', u'fixed:abc', u'fixed'):
            testf = lambda: Incumbent.parse(text)
            expect(testf).to(raise_error(ValueError))


class TestNames(unittest.TestCase):

    def test_should_find_bounds_and_rules_by_name(self):
        expect(BoundKind.from_name(u'onetree')).to(equal(BoundKind.ONE_TREE))
        expect(BoundKind.from_name(u'exact')).to(equal(BoundKind.EXACT))
        expect(BranchRule.from_name(u'frac')).to(equal(BranchRule.FRACTIONAL))
        expect(BranchRule.from_name(u'long')).to(equal(BranchRule.LONGEST))
        expect(BranchRule.from_name(u'lex')).to(
            equal(BranchRule.LEXICOGRAPHIC))

    def test_should_reject_unknown_names(self):
        expect(lambda: BoundKind.from_name(u'lp')).to(raise_error(ValueError))
        expect(lambda: BranchRule.from_name(u'rand')).to(
            raise_error(ValueError))


class TestExactBound(unittest.TestCase):

    def test_should_equal_the_constrained_optimum(self):
        inst = instance.gen_uniform(6, 2, seed=3)
        constraints = EdgeConstraints([(0, 3)], [(1, 2)])
        expected = exact.constrained_tour(inst.distance_matrix(),
                                          constraints).length
        value = bnb.exact_bound(inst.points, inst.box, constraints)
        expect(abs(value - expected)).to(be_below(1e-12))

    def test_should_be_infinite_without_a_tour(self):
        inst = instance.gen_uniform(5, 2, seed=3)
        constraints = EdgeConstraints([(0, 1), (1, 2), (0, 2)])
        value = bnb.exact_bound(inst.points, inst.box, constraints)
        expect(value).to(equal(float(u'inf')))


class TestRunBfsBnb(unittest.TestCase):

    def test_should_refuse_tiny_instances(self):
        inst = instance.gen_uniform(3, 2, seed=1)
        testf = lambda: bnb.run_bfs_bnb(inst)
        expect(testf).to(raise_error(ValueError))

    def test_should_certify_the_optimum(self):
        for seed in range(3):
            inst = instance.gen_uniform(_TEST_N, 2, seed=seed)
            stats, best = bnb.run_bfs_bnb(inst, Heuristics.NN)
            expect(stats.certified).to(be_true)
            expect(abs(best.length - _optimum(inst))).to(be_below(1e-9))

    def test_should_certify_with_every_rule(self):
        inst = instance.gen_uniform(_TEST_N, 2, seed=4)
        optimum = _optimum(inst)
        for rule in BranchRule:
            stats, best = bnb.run_bfs_bnb(inst, Heuristics.GREEDY, rule=rule)
            expect(stats.certified).to(be_true)
            expect(abs(best.length - optimum)).to(be_below(1e-9))

    def test_should_stop_at_the_root_with_an_exact_bound_and_incumbent(self):
        inst = instance.gen_uniform(_TEST_N, 2, seed=5)
        stats, best = bnb.run_bfs_bnb(inst, bound=BoundKind.EXACT,
                                      incumbent=Incumbent.parse(u'exact'))
        expect(stats.node_count).to(equal(1))
        expect(stats.levels[0].pruned).to(equal(1))
        expect(abs(best.length - _optimum(inst))).to(be_below(1e-9))

    def test_should_process_levels_in_order(self):
        inst = instance.gen_uniform(_TEST_N, 2, seed=6)
        stats, _ = bnb.run_bfs_bnb(inst, Heuristics.NI)
        expect(list(stats.trace)).to(equal(sorted(stats.trace)))
        expect(stats.node_count).to(equal(len(stats.trace)))
        expect(sum(stats.open_counts())).to(equal(stats.node_count))

    def test_should_only_lower_the_incumbent(self):
        inst = instance.gen_uniform(8, 2, seed=7)
        stats, _ = bnb.run_bfs_bnb(inst, Heuristics.FI)
        values = [b for _, b in stats.history]
        expect(values).to(equal(sorted(values, reverse=True)))

    def test_should_stop_at_the_node_cap(self):
        inst = instance.gen_uniform(_TEST_N, 2, seed=8)
        stats, _ = bnb.run_bfs_bnb(
            inst, incumbent=Incumbent.parse(u'fixed:1e9'),
            options=BnBOptions(node_cap=3))
        expect(stats.termination).to(equal(bnb.NODE_CAP))
        expect(stats.node_count).to(equal(3))

    def test_should_stop_at_the_level_cap(self):
        inst = instance.gen_uniform(6, 2, seed=9)
        stats, best = bnb.run_bfs_bnb(
            inst, incumbent=Incumbent.parse(u'fixed:1e9'),
            options=BnBOptions(level_cap=1))
        expect(stats.termination).to(equal(bnb.LEVEL_CAP))
        expect([s.level for s in stats.levels]).to(equal([0, 1]))
        expect(best).to(be_none)

    def test_should_prune_everything_below_a_low_fixed_incumbent(self):
        inst = instance.gen_uniform(_TEST_N, 2, seed=10)
        low = 0.5 * _optimum(inst)
        stats, best = bnb.run_bfs_bnb(
            inst, incumbent=Incumbent(Incumbent.FIXED, low))
        expect(stats.certified).to(be_true)
        expect(stats.node_count).to(equal(1))
        expect(best).to(be_none)

    @pytest.mark.timeout(300)
    def test_should_not_grow_as_the_fixed_incumbent_falls(self):
        for seed in range(4):
            inst = instance.gen_uniform(_TEST_N, 2, seed=20 + seed)
            optimum = _optimum(inst)
            counts = []
            for factor in (1.3, 1.15, 1.05, 1.0, 0.9, 0.5):
                stats, _ = bnb.run_bfs_bnb(
                    inst, bound=BoundKind.EXACT,
                    incumbent=Incumbent(Incumbent.FIXED, factor * optimum))
                expect(stats.certified).to(be_true)
                counts.append(stats.node_count)
            expect(counts).to(equal(sorted(counts, reverse=True)))


class TestBranching(unittest.TestCase):

    def test_should_split_the_tours_of_a_node_between_its_children(self):
        n = 6
        parent = EdgeConstraints(forced=[(0, 1)], forbidden=[(2, 3)])
        tours = [(0,) + rest for rest in itertools.permutations(range(1, n))
                 if rest[0] < rest[-1]]
        admitted = [order for order in tours if parent.admits(order)]
        expect(len(admitted)).to(be_above(0))
        for e in bnb._undecided(n, parent):
            children = (parent.with_forced(e), parent.with_forbidden(e))
            for order in admitted:
                hits = [c for c in children if c.admits(order)]
                expect(len(hits)).to(equal(1))
            for order in tours:
                if not parent.admits(order):
                    expect(any(c.admits(order) for c in children)).to(
                        be_false)


class TestBnBStats(unittest.TestCase):

    def test_should_report_rows_and_growth(self):
        levels = tuple(bnb.LevelStats(k, count, 0, 0, 0, 0, None, 5.0)
                       for k, count in enumerate((1, 2, 6)))
        stats = BnBStats(levels, bnb.CERTIFIED, ((0, 5.0),), (), 9)
        expect(stats.growth_ratios()).to(equal([2.0, 3.0]))
        expect(stats.as_rows()[2]).to(equal({
            u'level': 2, u'expanded': 0, u'pruned': 0, u'open': 6,
            u'incumbent': 5.0}))
