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

"""decider runs the four-step decision procedure on a hard-core provider and
calibrates the distance constants of the gadget layers empirically.

- :func:`decide_set_cover` rounds the transit set M, lists the local paths
  a heuristic may take through it, and compares the shortest run covering
  the hard core against the provider's threshold
- :func:`calibrate_constants` finds, by bisection over random placements of
  external points, the smallest distances at which the endpoint and single
  transit conclusions hold

"""

from __future__ import absolute_import, division

import collections
import logging
import math

import numpy as np

from tsplab.config import GadgetOptions, LocalSimOptions, SolverOptions
from tsplab.tsp import exact, geometry
from tsplab.tsp.geometry import LOCAL_FRAME, Box, Topology
from tsplab.tsp.heuristics import Heuristics

from .analysis import restrict_order
from .gadgets import DEFAULT_R, gadget_for, m_set, nn_gadget, q_set
from .localsim import (FARTHEST, NEAREST, simulate_greedy, simulate_insertion,
                       simulate_nn)

_logger = logging.getLogger(__name__)

NO_COVER = u'no_cover'

D0 = u'D0'
D1 = u'D1'
D2 = u'D2'

DEFAULT_TRIALS = 100
DEFAULT_STEPS = 12
DEFAULT_RANGES = {D0: (0.05, 40.0), D1: (0.1, 20.0), D2: (0.1, 40.0)}

# external points approach Q within this angle of the horizontal axis
_ENTRY_SPREAD = math.radians(60.0)
_GRID_POINTS = 6

_NO_SIMULATOR = u'no local simulator for heuristic %s'
_EXHAUSTED = u'calibrating %s: no distance up to %.6g passes every placement'


def decision_precision(m, provider, options=None):
    """The precision ``alpha eps0 / (1e4 c0 d0 k)`` the transit set is
    rounded to, before the quarter taken by the rounding step."""
    options = options or GadgetOptions()
    k = len(provider.points)
    return (m.params[u'alpha'] * provider.eps0 /
            (1e4 * options.c0 * options.d0 * k))


def _round_transit(m, precision):
    """Rounds M to ``precision`` in a cube of side ``2 R`` around it."""
    R = float(m.params[u'R'])
    box = Box(2, 2.0 * R, Topology.CUBE)
    shifted = np.asarray(m.points) + R
    return geometry.round_point(shifted, precision, box) - R


def _candidates(heuristic, points, m, eps, cap):
    s = list(m.part(u's'))
    y = list(m.part(u'y'))
    if heuristic is Heuristics.NN:
        return simulate_nn(points, y, eps, cap), list(range(len(points)))
    if heuristic is Heuristics.GREEDY:
        return simulate_greedy(points[s], eps, cap), s
    if heuristic in (Heuristics.NI, Heuristics.FI):
        mode = NEAREST if heuristic is Heuristics.NI else FARTHEST
        return (simulate_insertion(points, y, eps, cap, mode=mode),
                list(range(len(points))))
    _logger.error(_NO_SIMULATOR, heuristic.label)
    raise ValueError(_NO_SIMULATOR % (heuristic.label,))


def _run_length(run, points):
    run = list(run)
    steps = points[run[1:]] - points[run[:-1]]
    return float(np.sqrt(np.sum(steps ** 2, axis=1)).sum())


def decide_set_cover(provider, heuristic, R=DEFAULT_R, options=None,
                     sim_options=None):
    """Decides whether the provider's hard core has a short covering path.

    1. Builds M from the provider and the heuristic's protecting gadget and
       rounds it to a quarter of the decision precision.
    2. Lists the paths the heuristic may take through M, with ties at the
       same quarter precision.
    3. Takes L', the shortest single run of a listed path covering the hard
       core, back in provider units.
    4. Answers ``L' < threshold + eps0 / 2``.

    Args:
      provider (:class:`tsplab.scalefree.providers.HardCoreProvider`): the
        hard core, with its threshold and gap
      heuristic (:class:`tsplab.tsp.heuristics.Heuristics`): the heuristic,
        or its name
      R (float): the protection radius of the heuristic gadget
      options (:class:`tsplab.config.GadgetOptions`): construction defaults
      sim_options (:class:`tsplab.config.LocalSimOptions`): the fork budget

    Returns:
      tuple(bool, collections.OrderedDict): the answer and the transcript;
        with no covering run the answer is ``False`` and the transcript
        carries the ``no_cover`` flag

    Raises:
      ValueError: for a heuristic without a local simulator
    """
    options = options or GadgetOptions()
    sim_options = sim_options or LocalSimOptions()
    if not isinstance(heuristic, Heuristics):
        heuristic = Heuristics.from_name(heuristic)
    if heuristic is Heuristics.KARP:
        _logger.error(_NO_SIMULATOR, heuristic.label)
        raise ValueError(_NO_SIMULATOR % (heuristic.label,))
    q = q_set(provider, options=options)
    m = m_set(gadget_for(heuristic.label, R), q, options=options)
    delta0 = decision_precision(m, provider, options)
    eps = delta0 / 4.0
    points = _round_transit(m, eps)

    candidates, to_m = _candidates(heuristic, points, m, eps,
                                   sim_options.fork_cap)
    core = set(int(v) for v in q.part(u'core'))
    unit = m.params[u'alpha'] * q.params[u'scale']
    covers = []
    for path in candidates.paths:
        order = [to_m[v] for v in path.order]
        runs = restrict_order(order, core, closed=candidates.closed)
        if len(runs) == 1 and set(runs[0]) == core:
            covers.append(_run_length(runs[0], points) / unit)

    transcript = collections.OrderedDict([
        (u'provider', provider.name),
        (u'variant', provider.variant),
        (u'heuristic', heuristic.label),
        (u'delta0', delta0),
        (u'precision', eps),
        (u'm_size', m.size),
        (u'candidates', len(candidates)),
        (u'branch_count', candidates.branch_count),
        (u'cap_exceeded', candidates.cap_exceeded),
        (u'covers', sorted(covers)),
        (u'threshold', provider.threshold),
        (u'eps0', provider.eps0),
    ])
    if not covers:
        _logger.warning(u'%s: no listed path covers the hard core in one run',
                        provider.name)
        transcript[u'L_prime'] = None
        transcript[u'flag'] = NO_COVER
        transcript[u'decision'] = False
        return False, transcript
    l_prime = min(covers)
    decision = l_prime < provider.threshold + provider.eps0 / 2.0
    transcript[u'L_prime'] = l_prime
    transcript[u'flag'] = None
    transcript[u'decision'] = decision
    _logger.info(u'%s with %s: L\'=%.6f against %.6f + eps0/2 -> %s',
                 provider.name, heuristic.label, l_prime, provider.threshold,
                 decision)
    return decision, transcript


class CalibrationResult(
        collections.namedtuple(
            u'CalibrationResult',
            [u'name',
             u'value',
             u'pass_rate',
             u'grid',
             u'found'])):
    """An empirically calibrated distance.

    Attributes:
        name (str): ``D0``, ``D1`` or ``D2``
        value (float): the smallest distance found passing every placement,
          the top of the range when none does
        pass_rate (float): the pass rate at ``value``
        grid (list[tuple(float, float)]): pass rates over evenly spaced
          distances of the range
        found (bool): some distance in the range passed every placement
    """
    # pylint: disable=too-few-public-methods

    @property
    def is_monotone(self):
        """Pass rates never drop as the distance grows over the grid."""
        rates = [rate for _, rate in self.grid]
        return all(a <= b for a, b in zip(rates, rates[1:]))


def _bisect(name, pass_rate, lo, hi, steps):
    grid = [(float(d), pass_rate(d))
            for d in np.linspace(lo, hi, _GRID_POINTS)]
    top = grid[-1][1]
    if top < 1.0:
        _logger.warning(_EXHAUSTED, name, hi)
        return CalibrationResult(name, float(hi), top, grid, False)
    rate_hi = top
    for _ in range(steps):
        mid = (lo + hi) / 2.0
        rate = pass_rate(mid)
        if rate >= 1.0:
            hi, rate_hi = mid, rate
        else:
            lo = mid
    _logger.info(u'calibrated %s = %.6g', name, hi)
    return CalibrationResult(name, float(hi), rate_hi, grid, True)


def _directions(rng, trials, spread=None):
    """Unit vectors for the two external points of every trial.

    With ``spread`` the first points left and the second right, each within
    ``spread`` of the horizontal axis; without it both are uniform.
    """
    if spread is None:
        angles = rng.uniform(0.0, 2.0 * math.pi, size=(trials, 2))
    else:
        angles = rng.uniform(-spread, spread, size=(trials, 2))
        angles[:, 0] += math.pi
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def _endpoint_pass_rate(q, directions, solver):
    x, y = q.marked[u'x'], q.marked[u'y']
    n = q.size

    def rate(distance):
        passed = 0
        for w_dir, z_dir in directions:
            points = np.vstack([q.points, distance * w_dir,
                                distance * z_dir])
            path, _ = exact.held_karp_path(points, LOCAL_FRAME,
                                           endpoints=(n, n + 1),
                                           options=solver)
            if {path.order[1], path.order[-2]} == {x, y}:
                passed += 1
        return passed / float(len(directions))

    return rate


def _triangle(shape, half_side):
    circumradius = 2.0 * half_side / math.sqrt(3.0)
    blocks = []
    for j in range(3):
        theta = math.radians(90.0 + 120.0 * j)
        vertex = circumradius * np.array([math.cos(theta), math.sin(theta)])
        blocks.append(shape + vertex)
    return np.vstack(blocks)


def _transit_pass_rate(shape, directions, solver, half_side=None,
                       distance=None):
    size = len(shape)
    parts = [set(range(j * size, (j + 1) * size)) for j in range(3)]

    def rate(value):
        side = value if half_side is None else half_side
        reach = value if distance is None else distance
        triple = _triangle(shape, side)
        n = len(triple)
        passed = 0
        for w_dir, z_dir in directions:
            points = np.vstack([triple, reach * w_dir, reach * z_dir])
            path, _ = exact.held_karp_path(points, LOCAL_FRAME,
                                           endpoints=(n, n + 1),
                                           options=solver)
            if any(len(restrict_order(path.order, part, closed=False)) == 1
                   for part in parts):
                passed += 1
        return passed / float(len(directions))

    return rate


def calibrate_constants(provider, ranges=None, trials=DEFAULT_TRIALS,
                        seed=None, small_gadget=None, steps=DEFAULT_STEPS,
                        options=None, solver=None, which=(D0, D1, D2)):
    """Finds empirical values of the three distance constants.

    ``D0``: external points w, z on opposite sides of Q, at that distance
    from its centre, always make the shortest w to z path enter and leave Q
    through x and y. ``D1``: three copies of a small gadget at the vertices
    of a triangle of side ``2 D1`` are always transited by the shortest path
    between far external points, at least one of them in a single pass.
    ``D2``: the same with the triangle fixed at the calibrated ``D1`` and
    the external points at distance ``D2``. The values are measurements
    over the sampled placements and nothing more.

    Args:
      provider (:class:`tsplab.scalefree.providers.HardCoreProvider`): the
        hard core Q is built from
      ranges (dict): ``(lo, hi)`` per constant
      trials (int): placements per tested distance, at least 1
      seed (int): seeds the placements
      small_gadget (sequence): the gadget tripled for D1 and D2, the
        nearest neighbour triangle when omitted
      steps (int): bisection steps
      options (:class:`tsplab.config.GadgetOptions`): construction defaults
      solver (:class:`tsplab.config.SolverOptions`): exact limits
      which (sequence[str]): the constants to calibrate

    Returns:
      collections.OrderedDict: :class:`CalibrationResult` by name
    """
    if trials < 1:
        raise ValueError(u'trials should be at least 1')
    bounds = dict(DEFAULT_RANGES)
    bounds.update(ranges or {})
    solver = solver or SolverOptions()
    rng = np.random.default_rng(seed)
    results = collections.OrderedDict()
    if D0 in which:
        q = q_set(provider, options=options)
        directions = _directions(rng, trials, _ENTRY_SPREAD)
        lo, hi = bounds[D0]
        results[D0] = _bisect(D0, _endpoint_pass_rate(q, directions, solver),
                              lo, hi, steps)
    shape = geometry.as_points(
        nn_gadget().points if small_gadget is None else small_gadget,
        LOCAL_FRAME)
    shape = shape - shape.mean(axis=0)
    if D1 in which or D2 in which:
        directions = _directions(rng, trials)
        lo, hi = bounds[D1]
        far = 4.0 * max(hi, bounds[D2][1])
        half_side = hi
        if D1 in which:
            results[D1] = _bisect(
                D1, _transit_pass_rate(shape, directions, solver,
                                       distance=far), lo, hi, steps)
            half_side = results[D1].value
        if D2 in which:
            lo, hi = bounds[D2]
            results[D2] = _bisect(
                D2, _transit_pass_rate(shape, directions, solver,
                                       half_side=half_side), lo, hi, steps)
    return results
