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

"""classify sorts planted copies of the triple transit gadget by outcome.

For every copy the tour either transits one of its three Pi_H parts in a
single pass or not. Inside a transited part the first M copy meeting all
four local hypotheses is the primal copy, and the copy is then:

- ``shortened`` when the tour can be re-routed through the primal copy by
  at least delta1,
- ``predicted`` when the local simulation lists the tour's path,
- ``unstable`` when perturbation changes the path often enough,

checked in that order. Anything else is ``hypothesis_failed``.

"""

from __future__ import absolute_import, division

import collections
import logging
from concurrent import futures

import numpy as np

from tsplab.config import AnalysisOptions, LocalSimOptions, SolverOptions
from tsplab.records import ExperimentRecord, derive_seed
from tsplab.tsp import geometry
from tsplab.tsp.heuristics import Heuristics

from .analysis import (check_hypotheses, extract_local_ball, restrict_order,
                       run_signature, shortenable, stability_trial)
from .gadgets import copy_frames, m_copies
from .localsim import (FARTHEST, NEAREST, simulate_greedy, simulate_insertion,
                       simulate_nn)

_logger = logging.getLogger(__name__)

PREDICTED = u'predicted'
UNSTABLE = u'unstable'
SHORTENED = u'shortened'
HYPOTHESIS_FAILED = u'hypothesis_failed'
CLASSIFICATIONS = (PREDICTED, UNSTABLE, SHORTENED, HYPOTHESIS_FAILED)

TRANSIT = u'transit'
IMPLICATION = u'implication'

_PARTS_PER_COPY = 4


class CopyParams(
        collections.namedtuple(
            u'CopyParams',
            [u'K',
             u'eps',
             u'eps1',
             u'delta',
             u'delta1_fraction',
             u'stability_threshold',
             u'trials',
             u'seed',
             u'fork_cap',
             u'solver'])):
    """Holds the thresholds used to classify one copy.

    Attributes:
        K (int): the leading tour positions kept out of every inner ball
        eps (float): the matching and rounding tolerance, in units of the
          copy's inner radius
        eps1 (float): the entry angle bound, in radians
        delta (float): the stability perturbation radius in instance units;
          ``K d eps`` times the copy scale when ``None``
        delta1_fraction (float): delta1 as a fraction of the primal copy's
          diameter
        stability_threshold (float): the change frequency reported unstable
        trials (int): the stability trials
        seed (int): the master seed the per-copy seeds derive from
        fork_cap (int): the local simulation fork budget
        solver (:class:`tsplab.config.SolverOptions`): exact limits
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_K = 1
    DEFAULT_EPS = 1e-6
    DEFAULT_EPS1 = 0.5

    def __new__(cls,
                K=DEFAULT_K,
                eps=DEFAULT_EPS,
                eps1=DEFAULT_EPS1,
                delta=None,
                delta1_fraction=AnalysisOptions.DEFAULT_DELTA1_FRACTION,
                stability_threshold=AnalysisOptions.DEFAULT_STABILITY_THRESHOLD,
                trials=AnalysisOptions.DEFAULT_STABILITY_TRIALS,
                seed=None,
                fork_cap=LocalSimOptions.DEFAULT_FORK_CAP,
                solver=None):
        """Invokes the base constructor with default values."""
        assert isinstance(K, int), u'should be an int'
        assert isinstance(trials, int), u'should be an int'
        return super(cls, CopyParams).__new__(
            cls, K, float(eps), float(eps1),
            None if delta is None else float(delta),
            float(delta1_fraction), float(stability_threshold), trials,
            seed, fork_cap, solver or SolverOptions())

    @classmethod
    def from_config(cls, config, **overrides):
        """Takes the analysis, local simulation and solver values of a
        :class:`tsplab.config.LabConfig`."""
        values = dict(
            delta1_fraction=config.analysis.delta1_fraction,
            stability_threshold=config.analysis.stability_threshold,
            trials=config.analysis.stability_trials,
            seed=config.seed,
            fork_cap=config.localsim.fork_cap,
            solver=config.solver)
        values.update(overrides)
        return cls(**values)


class CopyReport(
        collections.namedtuple(
            u'CopyReport',
            [u'center',
             u'matching',
             u'classification',
             u'failed',
             u'shortening_gain',
             u'stability_freq',
             u'primal'])):
    """The verdict on one copy.

    Attributes:
        center (tuple[float]): where the copy sits
        matching (:class:`tsplab.tsp.geometry.Matching`): gadget index to
          instance index
        classification (str): one of :data:`CLASSIFICATIONS`
        failed (str): for ``hypothesis_failed``, ``transit``, the letter of
          the furthest local hypothesis reached, or ``implication``
        shortening_gain (float): set exactly for ``shortened``
        stability_freq (float): the measured change frequency, when measured
        primal (dict): the Pi_H part, M copy and anchor of the primal copy
    """
    # pylint: disable=too-few-public-methods

    def __new__(cls, center, matching, classification, failed=None,
                shortening_gain=None, stability_freq=None, primal=None):
        assert classification in CLASSIFICATIONS, u'unknown classification'
        assert (shortening_gain is not None) == (classification == SHORTENED), \
            u'a gain is reported exactly for shortened copies'
        return super(cls, CopyReport).__new__(
            cls, tuple(float(c) for c in center), matching, classification,
            failed, shortening_gain, stability_freq, primal)

    def to_record(self, experiment, seed=None, n=None, gadget=None,
                  params=None):
        """Renders the report as an
        :class:`tsplab.records.ExperimentRecord`."""
        lengths = {}
        if self.shortening_gain is not None:
            lengths[u'shortening_gain'] = self.shortening_gain
        frequencies = {}
        if self.stability_freq is not None:
            frequencies[u'stability'] = self.stability_freq
        values = dict(params or {})
        values.update({u'center': list(self.center), u'failed': self.failed,
                       u'primal': self.primal})
        return ExperimentRecord(experiment, seed=seed, n=n, gadget=gadget,
                                params=values,
                                classification=self.classification,
                                lengths=lengths, frequencies=frequencies)


class Prediction(
        collections.namedtuple(
            u'Prediction',
            [u'candidates',
             u'signatures'])):
    """The local simulation of a primal copy.

    Attributes:
        candidates (:class:`tsplab.scalefree.localsim.CandidatePaths`): the
          simulated outcomes, over local indices
        signatures (frozenset): every outcome restricted to the inner points,
          as :func:`tsplab.scalefree.analysis.run_signature` values over
          instance indices
    """
    # pylint: disable=too-few-public-methods


def predict_paths(inst, heuristic, p, report, R, eps, scale=1.0, cap=None):
    """Simulates ``heuristic`` on the ball around a protected anchor.

    Nearest neighbour starts from every protecting point; greedy runs on the
    inner points alone; the insertions start from the protecting points as
    a ring.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): the instance
      heuristic (:class:`tsplab.tsp.heuristics.Heuristics`): the heuristic
      p (sequence[float]): the anchor
      report (:class:`tsplab.scalefree.analysis.HypothesisReport`): a report
        that passed protection
      R (float): the protection radius
      eps (float): the local tie and rounding tolerance
      scale (float): the unit length at ``p``
      cap (int): the fork budget

    Returns:
      :class:`Prediction`: or ``None`` for a heuristic without a simulator
    """
    ball = extract_local_ball(inst, p, R, eps, scale)
    local = ball.local_index()
    s_local = [local[v] for v in report.s_indices]
    y_local = [local[v] for v in sorted(report.y_indices.values())]
    to_instance = list(ball.indices)
    if heuristic is Heuristics.NN:
        candidates = simulate_nn(ball.points, y_local, eps, cap)
    elif heuristic is Heuristics.GREEDY:
        candidates = simulate_greedy(ball.points[s_local], eps, cap)
        to_instance = [ball.indices[k] for k in s_local]
    elif heuristic in (Heuristics.NI, Heuristics.FI):
        mode = NEAREST if heuristic is Heuristics.NI else FARTHEST
        candidates = simulate_insertion(ball.points, y_local, eps, cap,
                                        mode=mode)
    else:
        _logger.debug(u'no local simulator for %s', heuristic.label)
        return None
    inner = set(report.s_indices)
    signatures = frozenset(
        run_signature(restrict_order([to_instance[k] for k in path.order],
                                     inner, closed=candidates.closed))
        for path in candidates.paths)
    return Prediction(candidates, signatures)


def _transited_part(tour, gadget, members):
    for j in range(3):
        start, stop = gadget.parts[u'copy%d' % (j,)]
        part = members[start:stop]
        if len(restrict_order(tour.order, part, closed=True)) == 1:
            return j
    return None


def _delta1(inst, gadget, members, number, fraction):
    start, stop = m_copies(gadget)[number]
    return fraction * geometry.diameter(inst.points[members[start:stop]],
                                        inst.box)


def _anchor(inst, center, offset):
    p = np.asarray(center, dtype=float) + offset
    if inst.box.is_torus:
        p = inst.box.reduce(p[None, :])[0]
    return p


def _unit_matching(members):
    return geometry.Matching(tuple(enumerate(members)), 0.0)


def classify_copy(inst, tour, heuristic, copy, gadget, params=None):
    """Classifies one planted or detected copy of the triple transit gadget.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): the instance
      tour (:class:`tsplab.tsp.tours.Tour`): the heuristic's tour of it
      heuristic (:class:`tsplab.tsp.heuristics.Heuristics`): the heuristic
        that built ``tour``, or its name
      copy: a :class:`tsplab.tsp.instance.PlantRecord` or a
        :class:`tsplab.scalefree.copies.AlignedCopy`, giving ``center`` and
        ``member_indices`` in gadget order
      gadget (:class:`tsplab.scalefree.gadgets.Gadget`): the planted gadget,
        built by :func:`tsplab.scalefree.gadgets.pi_h_3`
      params (:class:`CopyParams`): the thresholds

    Returns:
      :class:`CopyReport`
    """
    params = params or CopyParams()
    if not isinstance(heuristic, Heuristics):
        heuristic = Heuristics.from_name(heuristic)
    members = list(copy.member_indices)
    matching = getattr(copy, u'matching', None) or _unit_matching(members)
    center = copy.center
    part = _transited_part(tour, gadget, members)
    if part is None:
        delta1 = _delta1(inst, gadget, members, 0, params.delta1_fraction)
        found = shortenable(inst, tour, members, delta1, params.solver)
        if found is not None:
            return CopyReport(center, matching, SHORTENED,
                              shortening_gain=found.gain)
        return CopyReport(center, matching, HYPOTHESIS_FAILED, failed=TRANSIT)

    scale = gadget.params[u'copy_scale']
    R = gadget.params[u'R']
    reach = gadget.params.get(u'reach')
    Y = gadget.params[u'y_points']
    frames = copy_frames(gadget)
    primal, report, furthest = None, None, None
    for number in range(_PARTS_PER_COPY * part, _PARTS_PER_COPY * (part + 1)):
        offset, frame = frames[number]
        p = _anchor(inst, center, offset)
        report = check_hypotheses(inst, tour, Y, p, params.K, R,
                                  params.eps * scale, params.eps1,
                                  scale=scale, reach=reach, frame=frame)
        if report.holds:
            primal = {u'part': part, u'm': number, u'anchor': p.tolist()}
            break
        if furthest is None or report.failed > furthest:
            furthest = report.failed
    if primal is None:
        return CopyReport(center, matching, HYPOTHESIS_FAILED,
                          failed=furthest)

    S = list(report.s_indices)
    Y_found = sorted(report.y_indices.values())
    delta1 = _delta1(inst, gadget, members, primal[u'm'],
                     params.delta1_fraction)
    found = shortenable(inst, tour, S + Y_found, delta1, params.solver)
    if found is not None:
        return CopyReport(center, matching, SHORTENED,
                          shortening_gain=found.gain, primal=primal)

    p = np.asarray(primal[u'anchor'])
    prediction = predict_paths(inst, heuristic, p, report, R, params.eps,
                               scale=scale, cap=params.fork_cap)
    actual = run_signature(restrict_order(tour.order, S, closed=True))
    if prediction is not None and actual in prediction.signatures:
        return CopyReport(center, matching, PREDICTED, primal=primal)

    delta = params.delta
    if delta is None:
        delta = params.K * inst.box.d * params.eps * scale
    rng = np.random.default_rng(derive_seed(params.seed, center))
    frequency = stability_trial(inst, S, Y_found, heuristic, delta,
                                params.trials, rng)
    if frequency >= params.stability_threshold:
        return CopyReport(center, matching, UNSTABLE, stability_freq=frequency,
                          primal=primal)
    return CopyReport(center, matching, HYPOTHESIS_FAILED, failed=IMPLICATION,
                      stability_freq=frequency, primal=primal)


def classify_copies(inst, tour, heuristic, copies, gadget, params=None,
                    threads=1):
    """Classifies every copy; the order of the reports follows ``copies``."""

    def classify(copy):
        return classify_copy(inst, tour, heuristic, copy, gadget, params)

    if threads > 1 and len(copies) > 1:
        with futures.ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(classify, copies))
    return [classify(copy) for copy in copies]


def summarize_reports(reports):
    """Counts the copies of every classification.

    ``shortened`` and ``unstable`` are the two counts the hardness argument
    tracks; ``failed_by`` breaks the failures down by reason.

    Returns:
      collections.OrderedDict
    """
    summary = collections.OrderedDict([(u'copies', 0)])
    summary.update((name, 0) for name in CLASSIFICATIONS)
    failed_by = collections.Counter()
    for report in reports:
        summary[u'copies'] += 1
        summary[report.classification] += 1
        if report.classification == HYPOTHESIS_FAILED:
            failed_by[report.failed] += 1
    summary[u'failed_by'] = collections.OrderedDict(sorted(failed_by.items()))
    return summary
