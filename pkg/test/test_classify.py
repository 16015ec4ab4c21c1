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

import mock
import numpy as np
from expects import (be_a, be_below, be_false, be_none, be_true, equal,
                     expect, raise_error)

from tsplab.config import LabConfig
from tsplab.records import ExperimentRecord
from tsplab.scalefree import analysis, classify, gadgets
from tsplab.tsp.geometry import Box, Topology
from tsplab.tsp.heuristics import Heuristics
from tsplab.tsp.instance import Instance, PlantRecord
from tsplab.tsp.tours import Tour

_TEST_SIZE = 24
_TEST_CENTER = (5.0, 5.0)
_TEST_NN_TRIANGLE = [(0.0, 2.0 / math.sqrt(3.0)),
                     (-1.0, -1.0 / math.sqrt(3.0)),
                     (1.0, -1.0 / math.sqrt(3.0))]
_TEST_HOLDS = analysis.HypothesisReport(True, None, (0, 1), {0: 2, 1: 3, 2: 4},
                                        None, (5, 6), (0.1, 0.1))


def _failing(letter):
    return analysis.HypothesisReport(False, letter, (), None, None, None,
                                     None)


def _small_gadget():
    parts = {u'copy%d' % (j,): (8 * j, 8 * (j + 1)) for j in range(3)}
    parts.update((u'm%d' % (k,), (2 * k, 2 * (k + 1))) for k in range(12))
    params = {u'copy_scale': 0.01, u'R': 16.0, u'reach': 4.0,
              u'y_points': _TEST_NN_TRIANGLE,
              u'frames': [[0.1 * k, 0.0, 1.0, 0.0, 0.0, 1.0]
                          for k in range(12)]}
    points = [(0.1 * k, 0.05 * (k % 2)) for k in range(_TEST_SIZE)]
    return gadgets.Gadget(gadgets.PI_H_3, points, params=params, parts=parts)


def _inputs():
    rng = np.random.default_rng(5)
    inst = Instance(rng.uniform(0.0, 10.0, size=(_TEST_SIZE, 2)),
                    Box(2, 10.0, Topology.CUBE))
    tour = Tour(range(_TEST_SIZE), 0.0)
    copy = PlantRecord(u'pi_h_3', _TEST_CENTER, tuple(range(_TEST_SIZE)), 1.0)
    return inst, tour, copy, _small_gadget()


class TestCopyParams(unittest.TestCase):

    def test_should_take_values_from_the_config(self):
        params = classify.CopyParams.from_config(LabConfig(seed=9), K=2)
        expect(params.seed).to(equal(9))
        expect(params.K).to(equal(2))
        expect(params.trials).to(equal(400))
        expect(params.delta).to(be_none)

    def test_should_insist_on_integer_trials(self):
        testf = lambda: classify.CopyParams(trials=2.5)
        expect(testf).to(raise_error(AssertionError))


class TestCopyReport(unittest.TestCase):

    def test_should_carry_a_gain_only_when_shortened(self):
        testf = lambda: classify.CopyReport(_TEST_CENTER, None,
                                            classify.SHORTENED)
        expect(testf).to(raise_error(AssertionError))
        testf = lambda: classify.CopyReport(_TEST_CENTER, None,
                                            classify.PREDICTED,
                                            shortening_gain=1.0)
        expect(testf).to(raise_error(AssertionError))

    def test_should_reject_unknown_classifications(self):
        testf = lambda: classify.CopyReport(_TEST_CENTER, None, u'lucky')
        expect(testf).to(raise_error(AssertionError))

    def test_should_render_a_record(self):
        report = classify.CopyReport(_TEST_CENTER, None, classify.SHORTENED,
                                     shortening_gain=0.25)
        record = report.to_record(u'classify', seed=3, n=100)
        expect(record).to(be_a(ExperimentRecord))
        expect(record.classification).to(equal(classify.SHORTENED))
        expect(record.lengths).to(equal({u'shortening_gain': 0.25}))
        expect(record.params[u'center']).to(equal([5.0, 5.0]))


class TestClassifyCopy(unittest.TestCase):

    def setUp(self):
        self.inst, self.tour, self.copy, self.gadget = _inputs()

    def _classify(self, **params):
        return classify.classify_copy(self.inst, self.tour, Heuristics.NN,
                                      self.copy, self.gadget,
                                      classify.CopyParams(seed=1, **params))

    @mock.patch(u'tsplab.scalefree.classify.shortenable', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify._transited_part',
                return_value=None)
    def test_should_fail_transit_without_a_single_pass(self, _, shorten):
        report = self._classify()
        expect(report.classification).to(equal(classify.HYPOTHESIS_FAILED))
        expect(report.failed).to(equal(classify.TRANSIT))
        expect(shorten.call_count).to(equal(1))

    @mock.patch(u'tsplab.scalefree.classify.shortenable')
    @mock.patch(u'tsplab.scalefree.classify._transited_part',
                return_value=None)
    def test_should_shorten_a_copy_without_transit(self, _, shorten):
        shorten.return_value = analysis.Shortening(self.tour, 0.5,
                                                   analysis.EXACT, 1)
        report = self._classify()
        expect(report.classification).to(equal(classify.SHORTENED))
        expect(report.shortening_gain).to(equal(0.5))

    @mock.patch(u'tsplab.scalefree.classify.check_hypotheses')
    @mock.patch(u'tsplab.scalefree.classify._transited_part', return_value=1)
    def test_should_report_the_furthest_hypothesis(self, _, check):
        check.side_effect = [_failing(u'a'), _failing(u'c'), _failing(u'b'),
                             _failing(u'a')]
        report = self._classify()
        expect(report.classification).to(equal(classify.HYPOTHESIS_FAILED))
        expect(report.failed).to(equal(u'c'))
        expect(check.call_count).to(equal(4))

    @mock.patch(u'tsplab.scalefree.classify.shortenable')
    @mock.patch(u'tsplab.scalefree.classify.check_hypotheses',
                return_value=_TEST_HOLDS)
    @mock.patch(u'tsplab.scalefree.classify._transited_part', return_value=1)
    def test_should_prefer_shortening_to_prediction(self, _, check, shorten):
        shorten.return_value = analysis.Shortening(self.tour, 0.5,
                                                   analysis.EXACT, 1)
        report = self._classify()
        expect(report.classification).to(equal(classify.SHORTENED))
        expect(report.primal[u'part']).to(equal(1))
        expect(report.primal[u'm']).to(equal(4))
        expect(np.allclose(report.primal[u'anchor'], (5.4, 5.0))).to(be_true)
        expect(sorted(shorten.call_args[0][2])).to(equal([0, 1, 2, 3, 4]))

    @mock.patch(u'tsplab.scalefree.classify.stability_trial')
    @mock.patch(u'tsplab.scalefree.classify.predict_paths')
    @mock.patch(u'tsplab.scalefree.classify.shortenable', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify.check_hypotheses',
                return_value=_TEST_HOLDS)
    @mock.patch(u'tsplab.scalefree.classify._transited_part', return_value=0)
    def test_should_predict_a_listed_path(self, _, check, shorten, predict,
                                          stability):
        actual = analysis.run_signature([(0, 1)])
        predict.return_value = classify.Prediction(None, frozenset([actual]))
        report = self._classify()
        expect(report.classification).to(equal(classify.PREDICTED))
        expect(stability.called).to(be_false)

    @mock.patch(u'tsplab.scalefree.classify.stability_trial',
                return_value=0.95)
    @mock.patch(u'tsplab.scalefree.classify.predict_paths', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify.shortenable', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify.check_hypotheses',
                return_value=_TEST_HOLDS)
    @mock.patch(u'tsplab.scalefree.classify._transited_part', return_value=0)
    def test_should_call_a_frequent_change_unstable(self, _, check, shorten,
                                                     predict, stability):
        report = self._classify()
        expect(report.classification).to(equal(classify.UNSTABLE))
        expect(report.stability_freq).to(equal(0.95))
        delta = stability.call_args[0][4]
        expect(abs(delta - 2e-8)).to(be_below(1e-20))

    @mock.patch(u'tsplab.scalefree.classify.stability_trial',
                return_value=0.1)
    @mock.patch(u'tsplab.scalefree.classify.predict_paths', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify.shortenable', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify.check_hypotheses',
                return_value=_TEST_HOLDS)
    @mock.patch(u'tsplab.scalefree.classify._transited_part', return_value=0)
    def test_should_blame_the_implication_otherwise(self, _, check, shorten,
                                                    predict, stability):
        report = self._classify(delta=0.003)
        expect(report.classification).to(equal(classify.HYPOTHESIS_FAILED))
        expect(report.failed).to(equal(classify.IMPLICATION))
        expect(report.stability_freq).to(equal(0.1))
        expect(stability.call_args[0][4]).to(equal(0.003))

    @mock.patch(u'tsplab.scalefree.classify.stability_trial',
                return_value=0.1)
    @mock.patch(u'tsplab.scalefree.classify.predict_paths', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify.shortenable', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify.check_hypotheses',
                return_value=_TEST_HOLDS)
    @mock.patch(u'tsplab.scalefree.classify._transited_part', return_value=0)
    def test_should_seed_trials_from_the_copy(self, _, check, shorten,
                                              predict, stability):
        self._classify()
        self._classify()
        first, second = [c[0][6] for c in stability.call_args_list]
        expect(first.integers(1 << 30)).to(equal(second.integers(1 << 30)))


class TestTransitedPart(unittest.TestCase):

    def test_should_find_the_single_pass(self):
        gadget = _small_gadget()
        members = list(range(_TEST_SIZE))
        order = list(range(8, 16)) + [0, 16, 1, 17, 2, 18, 3, 19, 4, 20, 5,
                                      21, 6, 22, 7, 23]
        tour = Tour(order, 0.0)
        expect(classify._transited_part(tour, gadget, members)).to(equal(1))
        zigzag = Tour([0, 8, 16, 1, 9, 17, 2, 10, 18, 3, 11, 19, 4, 12, 20, 5,
                       13, 21, 6, 14, 22, 7, 15, 23], 0.0)
        expect(classify._transited_part(zigzag, gadget, members)).to(be_none)


class TestClassifyCopies(unittest.TestCase):

    @mock.patch(u'tsplab.scalefree.classify.shortenable', return_value=None)
    @mock.patch(u'tsplab.scalefree.classify._transited_part',
                return_value=None)
    def test_should_keep_the_order_of_copies(self, *_):
        inst, tour, copy, gadget = _inputs()
        moved = copy._replace(center=(6.0, 6.0))
        reports = classify.classify_copies(inst, tour, u'greedy',
                                           [copy, moved], gadget, threads=2)
        expect([r.center for r in reports]).to(
            equal([(5.0, 5.0), (6.0, 6.0)]))


class TestSummarizeReports(unittest.TestCase):

    def test_should_count_every_classification(self):
        reports = [
            classify.CopyReport(_TEST_CENTER, None, classify.PREDICTED),
            classify.CopyReport(_TEST_CENTER, None, classify.SHORTENED,
                                shortening_gain=1.0),
            classify.CopyReport(_TEST_CENTER, None,
                                classify.HYPOTHESIS_FAILED, failed=u'b'),
            classify.CopyReport(_TEST_CENTER, None,
                                classify.HYPOTHESIS_FAILED, failed=u'b'),
        ]
        summary = classify.summarize_reports(reports)
        expect(summary[u'copies']).to(equal(4))
        expect(summary[classify.PREDICTED]).to(equal(1))
        expect(summary[classify.SHORTENED]).to(equal(1))
        expect(summary[classify.UNSTABLE]).to(equal(0))
        expect(summary[u'failed_by']).to(equal({u'b': 2}))
