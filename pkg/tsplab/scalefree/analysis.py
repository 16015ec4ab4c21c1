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

"""analysis measures how a tour behaves around a planted configuration.

- :func:`restrict_tour` splits a tour into its runs through an index set
- :func:`check_hypotheses` evaluates the four preconditions of the local
  prediction (inner points late, protection, single pass, entry angles)
- :func:`best_shortening` and :func:`shortenable` re-route the tour
  through a region
- :func:`stability_trial` estimates how often perturbation changes the
  local path
- :func:`perturbation_chain` builds the chain of ever finer perturbations
- :func:`extract_local_ball` cuts out and rounds the points around an anchor

"""

from __future__ import absolute_import, division

import collections
import logging
import math

import numpy as np

from tsplab.config import SolverOptions
from tsplab.tsp import exact, geometry
from tsplab.tsp.geometry import Box, Topology
from tsplab.tsp.heuristics import finish_tour
from tsplab.tsp.improve import improve_path
from tsplab.tsp.tours import PathSeq

from .localsim import canonical_path

_logger = logging.getLogger(__name__)

EXACT = u'exact'
HEURISTIC = u'heuristic'

INNER = u'a'
PROTECTED = u'b'
SINGLE_PATH = u'c'
ANGLE = u'd'

CHAIN_LEVELS = 13

_HEURISTIC_MODE = (u'a run of %d points exceeds the exact limit %d; '
                   u'falling back to local search')
_CHAIN_RADII = u'chain radii break eps(k) + K d eps(k) = eps(k - 1) at k=%d'
_EMPTY_BALL = u'no point lies within %s of the anchor %s'


def restrict_order(order, members, closed=True):
    """The maximal runs of ``order`` whose positions lie in ``members``.

    Args:
      order (sequence[int]): a tour or a path
      members (collection[int]): the index set
      closed (bool): ``order`` is a cycle, so a run may wrap around

    Returns:
      list[tuple[int]]: the runs in visiting order; a cycle entirely inside
        ``members`` gives one run, in the given rotation
    """
    members = set(int(v) for v in members)
    order = [int(v) for v in order]
    if closed and order and all(v in members for v in order):
        return [tuple(order)]
    if closed:
        outside = [k for k, v in enumerate(order) if v not in members]
        start = outside[0] + 1
        order = order[start:] + order[:start]
    runs, current = [], []
    for v in order:
        if v in members:
            current.append(v)
        elif current:
            runs.append(tuple(current))
            current = []
    if current:
        runs.append(tuple(current))
    return runs


def restrict_tour(tour, S):
    """Splits ``tour`` into its runs through ``S``.

    Returns:
      list[:class:`tsplab.tsp.tours.PathSeq`]: one path per run; when ``S``
        covers the tour the single run is flagged ``full``
    """
    S = set(int(v) for v in S)
    if not S:
        raise ValueError(u'S should not be empty')
    full = S >= set(tour.order)
    return [PathSeq(run, full=full)
            for run in restrict_order(tour.order, S, closed=True)]


def run_signature(runs):
    """The runs as a set of reversal-free tuples, for comparing restrictions."""
    return frozenset(canonical_path(r.order if isinstance(r, PathSeq) else r)
                     for r in runs)


class HypothesisReport(
        collections.namedtuple(
            u'HypothesisReport',
            [u'holds',
             u'failed',
             u's_indices',
             u'y_indices',
             u'path',
             u'outside',
             u'angles'])):
    """The outcome of :func:`check_hypotheses`.

    Attributes:
        holds (bool): all four hypotheses hold
        failed (str): ``a``, ``b``, ``c`` or ``d`` for the first failure
        s_indices (tuple[int]): the instance points inside the unit ball
        y_indices (dict): gadget index to instance index, when protected
        path (:class:`tsplab.tsp.tours.PathSeq`): the single run through
          S and Y, when there is one
        outside (tuple[int]): the tour neighbours of the path ends
        angles (tuple[float]): their angles at the anchor
    """
    # pylint: disable=too-few-public-methods


def _failed(which, **found):
    values = dict(s_indices=(), y_indices=None, path=None, outside=None,
                  angles=None)
    values.update(found)
    _logger.debug(u'hypothesis %s fails', which)
    return HypothesisReport(False, which, **values)


def _neighbours(order, path):
    position = {v: k for k, v in enumerate(order)}
    m = len(order)
    first, last = path.order[0], path.order[-1]
    before = order[(position[first] - 1) % m]
    after = order[(position[last] + 1) % m]
    return before, after


def check_hypotheses(inst, tour, Y, p, K, R, eps, eps1, scale=1.0,
                     reach=None, frame=None):
    """Evaluates the preconditions of the local prediction at ``p``.

    (a) the points within ``scale`` of ``p`` all come after the first K
    positions; (b) the instance is (R, eps)-protected by ``Y`` at ``p``;
    (c) the tour runs through those points and the protecting copy in a
    single path; (d) the tour neighbours of that path make angles below
    ``eps1`` with the direction ``frame . (0, 1)`` at ``p``.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): the instance
      tour (:class:`tsplab.tsp.tours.Tour`): a tour of it
      Y (sequence): the protecting points relative to the anchor, before
        ``frame`` and ``scale`` are applied
      p (sequence[float]): the anchor
      K (int): how many leading positions must stay outside the unit ball
      R (float): the protection radius
      eps (float): the matching tolerance
      eps1 (float): the angle bound in radians
      scale (float): the unit length at ``p``
      reach (float): the containment radius of the protecting copy
      frame (:class:`numpy.ndarray`): the 2x2 orthogonal map placing the
        copy, the identity when omitted

    Returns:
      :class:`HypothesisReport`

    Raises:
      ValueError: if no point lies within ``scale`` of ``p``; the local
        configuration is then empty and none of the hypotheses is defined
    """
    box = inst.box
    p = np.asarray(p, dtype=float)
    frame = np.eye(box.d) if frame is None else np.asarray(frame, dtype=float)
    inside = geometry.ball_indices(inst.points, p, scale, box)
    s_indices = tuple(int(v) for v in inside)
    if not s_indices:
        _logger.error(_EMPTY_BALL, scale, p.tolist())
        raise ValueError(_EMPTY_BALL % (scale, p.tolist()))
    if min(s_indices) < K:
        return _failed(INNER, s_indices=s_indices)
    placed = geometry.as_points(Y, box).dot(frame.T)
    protected, matching = geometry.is_protected(
        inst.points, placed, p, R, eps, box, scale=scale, reach=reach)
    if not protected:
        return _failed(PROTECTED, s_indices=s_indices)
    y_indices = matching.as_dict()
    region = set(s_indices) | set(y_indices.values())
    runs = restrict_tour(tour, region)
    if len(runs) != 1 or runs[0].full:
        return _failed(SINGLE_PATH, s_indices=s_indices, y_indices=y_indices)
    path = runs[0]
    outside = _neighbours(list(tour.order), path)
    q = p + scale * frame.dot(np.eye(box.d)[1])
    angles = tuple(geometry.angle(inst.points[v], p, q, box)
                   for v in outside)
    found = dict(s_indices=s_indices, y_indices=y_indices, path=path,
                 outside=outside, angles=angles)
    if max(angles) >= eps1:
        return _failed(ANGLE, **found)
    return HypothesisReport(True, None, **found)


class Shortening(
        collections.namedtuple(
            u'Shortening',
            [u'tour',
             u'gain',
             u'mode',
             u'runs'])):
    """A tour re-routed through a region.

    Attributes:
        tour (:class:`tsplab.tsp.tours.Tour`): the re-routed tour
        gain (float): the old length minus the new one
        mode (str): ``exact``, or ``heuristic`` when some run was too long
          for the exact path solver
        runs (int): the runs re-solved
    """
    # pylint: disable=too-few-public-methods


def _resolve(matrix, options):
    m = matrix.shape[0]
    if m <= options.n_max:
        order, length = exact.solve_path_matrix(matrix, (0, m - 1), options)
        return order, length, EXACT
    _logger.warning(_HEURISTIC_MODE, m, options.n_max)
    order, length = improve_path(range(m), matrix)
    return order, length, HEURISTIC


def best_shortening(inst, tour, Z, options=None):
    """Re-solves every run of ``tour`` through ``Z`` with its ends fixed.

    Each run is re-routed between the tour vertices just before and after
    it, exactly when it is small enough and by 2-opt and or-opt otherwise.
    Vertices outside ``Z`` keep their places.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): the instance
      tour (:class:`tsplab.tsp.tours.Tour`): a tour of it
      Z (collection[int]): the region
      options (:class:`tsplab.config.SolverOptions`): exact solver limits

    Returns:
      :class:`Shortening`: the gain is never negative
    """
    options = options or SolverOptions()
    Z = set(int(v) for v in Z)
    order = list(tour.order)
    mode = EXACT
    if Z >= set(order):
        # a closed run: pin both ends to the first vertex
        runs = [[order[0]] + order[1:] + [order[0]]]
    else:
        start = next(k for k, v in enumerate(order) if v not in Z)
        order = order[start:] + order[:start]
        runs, current = [], [order[0]]
        for v in order[1:] + [order[0]]:
            current.append(v)
            if v not in Z:
                if len(current) > 2:
                    runs.append(current)
                current = [v]
    rerouted = {}
    for run in runs:
        points = inst.points[run]
        matrix = geometry.pairwise_distances(points, points, inst.box)
        local, _, run_mode = _resolve(matrix, options)
        if run_mode == HEURISTIC:
            mode = HEURISTIC
        rerouted[(run[0], run[1])] = [run[k] for k in local]
    if Z >= set(order):
        new_order = list(rerouted.values())[0][:-1]
    else:
        new_order = []
        k = 0
        while k < len(order):
            v = order[k]
            nxt = order[(k + 1) % len(order)]
            new_order.append(v)
            path = rerouted.get((v, nxt))
            if path is not None:
                new_order.extend(path[1:-1])
                k += len(path) - 1
            else:
                k += 1
    shorter = finish_tour(inst, new_order, tour.meta)
    gain = tour.length - shorter.length
    if gain <= 0:
        return Shortening(tour, 0.0, mode, len(runs))
    return Shortening(shorter, gain, mode, len(runs))


def shortenable(inst, tour, Z, delta1, options=None):
    """The re-routed tour when it gains at least ``delta1``.

    Returns:
      :class:`Shortening`: or ``None`` when the gain is below ``delta1``
    """
    found = best_shortening(inst, tour, Z, options)
    _logger.debug(u'shortening through %d points gains %.3g (%s)', len(Z),
                  found.gain, found.mode)
    if found.gain >= delta1:
        return found
    return None


def stability_trial(inst, S, Y, heuristic, delta, trials, rng):
    """Estimates how often perturbing S and Y changes the local path.

    The heuristic is re-run on the instance with every point of ``S`` and
    ``Y`` moved uniformly inside its ``delta``-ball; a trial counts when the
    runs of the new tour through ``S`` and ``Y`` differ, up to reversal, from
    those of the unperturbed tour.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): the instance
      S (collection[int]): the inner points
      Y (collection[int]): the protecting points
      heuristic (:class:`tsplab.tsp.heuristics.Heuristics`): the heuristic
      delta (float): the perturbation radius
      trials (int): at least 1
      rng (:class:`numpy.random.Generator`): the source of randomness

    Returns:
      float: the fraction of trials whose path changed
    """
    if trials < 1:
        raise ValueError(u'trials should be at least 1')
    region = sorted(set(int(v) for v in S) | set(int(v) for v in Y))
    reference = run_signature(
        restrict_order(heuristic.build(inst).order, region))
    changed = 0
    for _ in range(trials):
        moved = np.array(inst.points)
        moved[region] = geometry.perturb(inst.points[region], delta, rng,
                                         inst.box)
        order = heuristic.build(inst.with_points(moved)).order
        if run_signature(restrict_order(order, region)) != reference:
            changed += 1
    frequency = changed / float(trials)
    _logger.debug(u'stability: %d of %d trials changed the path', changed,
                  trials)
    return frequency


def chain_radii(eps2, K, d, levels=CHAIN_LEVELS):
    """The radii ``eps(k) = eps2 / (K d + 1) ** (k - 1)`` for k = 1..levels.

    Returns:
      list[float]: ``radii[k - 1]`` is ``eps(k)``

    Raises:
      ValueError: if eps2 <= 0 or K < 1
    """
    if not eps2 > 0:
        raise ValueError(u'eps2 should be positive')
    if K < 1:
        raise ValueError(u'K should be at least 1')
    base = K * d + 1.0
    radii = [eps2 / base ** (k - 1) for k in range(1, levels + 1)]
    for k in range(2, levels + 1):
        expected = radii[k - 1] + K * d * radii[k - 1]
        assert math.isclose(expected, radii[k - 2], rel_tol=1e-12), \
            _CHAIN_RADII % (k,)
    return radii


def perturbation_chain(inst, eps2, K, rng, d=None, levels=CHAIN_LEVELS):
    """Builds the chain of successive perturbations of ``inst``.

    The last level is ``inst`` itself; level ``k - 1`` moves every point of
    level ``k`` uniformly inside a ball of radius ``eps(k - 1) - eps(k)``, so
    level ``k`` is within ``eps(k) - eps(levels)`` of ``inst``.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): the starting point set
      eps2 (float): the largest radius ``eps(1)``
      K (int): the position offset of the scalefree definition
      rng (:class:`numpy.random.Generator`): the source of randomness
      d (int): the dimension in the radius formula, ``inst.box.d`` by default
      levels (int): the chain length

    Returns:
      list[:class:`tsplab.tsp.instance.Instance`]: from the top level
        (``inst``) down to level 1
    """
    d = inst.box.d if d is None else d
    radii = chain_radii(eps2, K, d, levels)
    chain = [inst]
    for k in range(levels, 1, -1):
        step = radii[k - 2] - radii[k - 1]
        current = chain[-1]
        chain.append(current.with_points(
            geometry.perturb(current.points, step, rng, inst.box)))
    return chain


class LocalBall(
        collections.namedtuple(
            u'LocalBall',
            [u'points',
             u'indices',
             u'anchor',
             u'scale'])):
    """The rounded points of a ball, in local units.

    Attributes:
        points (:class:`numpy.ndarray`): the points translated so the anchor
          sits at ``(R, ..., R)``, divided by the scale and rounded
        indices (tuple[int]): their instance positions, ascending
        anchor (:class:`numpy.ndarray`): the anchor in local coordinates
        scale (float): the unit length of the ball
    """
    # pylint: disable=too-few-public-methods

    def local_index(self):
        return {v: k for k, v in enumerate(self.indices)}


def extract_local_ball(inst, p, R, eps, scale=1.0):
    """Cuts out the points within ``R * scale`` of ``p`` and rounds them.

    Coordinates are divided by ``scale``, shifted into ``[0, 2R]^d`` and
    rounded to precision ``eps`` there.

    Returns:
      :class:`LocalBall`
    """
    box = inst.box
    p = np.asarray(p, dtype=float)
    indices = geometry.ball_indices(inst.points, p, R * scale, box)
    offsets = geometry.displacement(p[None, :], inst.points[indices], box)
    local_box = Box(box.d, 2.0 * R, Topology.CUBE)
    anchor = np.full(box.d, float(R))
    points = geometry.round_point(offsets / scale + anchor, eps, local_box)
    points = points.reshape(len(indices), box.d)
    return LocalBall(points, tuple(int(v) for v in indices), anchor,
                     float(scale))
