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

"""heuristics provides the tour construction heuristics.

Every heuristic takes an :class:`tsplab.tsp.instance.Instance` and optional
:class:`tsplab.tsp.tours.EdgeConstraints`, and returns a
:class:`tsplab.tsp.tours.Tour` rotated to start at position 0. Distances are
compared after rounding to the instance's precision grid, so equal rounded
distances are ties; ties go to the smallest position (or the
lexicographically smallest edge).

Under constraints the forced edges are contracted into chains, which the
heuristics move as units, and forbidden edges are priced at ``inf``. When a
heuristic cannot complete under its constraints it raises
:class:`HeuristicStuck`; that is not a proof that no tour exists.

- :func:`nearest_neighbor`
- :func:`greedy`
- :func:`nearest_insertion` and :func:`farthest_insertion`
- :func:`run_constrained` runs any registered heuristic under constraints

:class:`Heuristics` registers the heuristics by their command-line names; the
dissection heuristic lives in :mod:`tsplab.tsp.dissection`.

"""

from __future__ import absolute_import, division

import collections
import logging
from enum import Enum

import numpy as np
from networkx.utils import UnionFind

from . import geometry
from .tours import EdgeConstraints, Tour, edge

_logger = logging.getLogger(__name__)

_STUCK = u'%s cannot extend its tour under the given constraints'
_NOT_HONOURED = u'%s produced a tour violating its constraints'
_UNKNOWN_HEURISTIC = u'unknown heuristic %s'


class HeuristicStuck(Exception):
    pass


def tour_length(points, order, box):
    """The length of the closed tour ``order`` over ``points``."""
    if len(order) < 2:
        return 0.0
    idx = np.asarray(order)
    delta = geometry.displacement(points[idx], points[np.roll(idx, -1)], box)
    return float(np.sqrt(np.sum(delta ** 2, axis=1)).sum())


def finish_tour(inst, order, meta):
    """Rotates ``order`` to start at 0 and measures it."""
    order = [int(v) for v in order]
    if 0 in order:
        start = order.index(0)
        order = order[start:] + order[:start]
    return Tour(order, tour_length(inst.points, order, inst.box), meta)


class _Metric(object):
    """Rounded distances of an instance, with forbidden edges at ``inf``."""

    def __init__(self, inst, constraints):
        self.points = inst.points
        self.box = inst.box
        self.quantum = inst.quantum
        self.blocked = collections.defaultdict(list)
        if constraints is not None:
            for a, b in constraints.forbidden:
                self.blocked[a].append(b)
                self.blocked[b].append(a)

    def plain_row(self, v):
        raw = geometry.distances_from(self.points[v], self.points, self.box)
        return np.round(raw / self.quantum)

    def row(self, v):
        rounded = self.plain_row(v)
        if v in self.blocked:
            rounded[self.blocked[v]] = np.inf
        return rounded

    def aligned(self, xs, ys):
        delta = geometry.displacement(self.points[xs], self.points[ys],
                                      self.box)
        return np.round(np.sqrt(np.sum(delta ** 2, axis=1)) / self.quantum)

    def is_blocked(self, a, b):
        return b in self.blocked.get(a, ())


def _chains(n, constraints):
    if constraints is None or constraints.is_empty:
        return [(v,) for v in range(n)]
    return constraints.chains(n)


def _stuck(name):
    _logger.debug(_STUCK, name)
    raise HeuristicStuck(_STUCK % (name,))


def _check_honoured(name, order, constraints):
    if constraints is not None and not constraints.admits(order):
        _stuck(name)


def _trivial(inst, name):
    if inst.n < 1:
        raise ValueError(u'%s needs at least one point' % (name,))
    if inst.n <= 2:
        return finish_tour(inst, range(inst.n), {u'heuristic': name})
    return None


def nearest_neighbor(inst, constraints=None):
    """Builds a tour by always travelling to the nearest unvisited point.

    The walk starts at position 0. A forced chain is entered at whichever of
    its ends is nearest and left at the other.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): at least one point
      constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): optional

    Returns:
      :class:`tsplab.tsp.tours.Tour`

    Raises:
      HeuristicStuck: if every remaining move is forbidden
    """
    name = u'nn'
    small = _trivial(inst, name)
    if small is not None and (constraints is None or constraints.is_empty):
        return small
    n = inst.n
    metric = _Metric(inst, constraints)
    chains = _chains(n, constraints)
    chain_of = {}
    for number, chain in enumerate(chains):
        for v in (chain[0], chain[-1]):
            chain_of[v] = number
    first = chains[0]
    if first[-1] == 0:
        first = first[::-1]
    order = list(first)
    open_end = np.zeros(n, dtype=bool)
    for chain in chains[1:]:
        open_end[[chain[0], chain[-1]]] = True
    remaining = len(chains) - 1
    while remaining:
        candidates = metric.row(order[-1])
        candidates[~open_end] = np.inf
        if remaining == 1:
            for v in np.flatnonzero(open_end):
                chain = chains[chain_of[v]]
                exit_end = chain[-1] if chain[0] == v else chain[0]
                if metric.is_blocked(exit_end, order[0]):
                    candidates[v] = np.inf
        entry = int(np.argmin(candidates))
        if not np.isfinite(candidates[entry]):
            _stuck(name)
        chain = chains[chain_of[entry]]
        if chain[0] != entry:
            chain = chain[::-1]
        order.extend(chain)
        open_end[[chain[0], chain[-1]]] = False
        remaining -= 1
    if metric.is_blocked(order[-1], order[0]):
        _stuck(name)
    _check_honoured(name, order, constraints)
    return finish_tour(inst, order, {u'heuristic': name})


def greedy(inst, constraints=None):
    """Builds a tour by repeatedly adding the shortest admissible edge.

    An edge is admissible when it creates no vertex of degree 3 and no cycle
    short of a tour; once a Hamilton path is formed, the unique closing edge
    completes it. Edges are ranked by rounded length, then lexicographically.
    Forced edges are taken before any other edge.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): at least one point
      constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): optional

    Returns:
      :class:`tsplab.tsp.tours.Tour`

    Raises:
      HeuristicStuck: if the admissible edges run out
    """
    name = u'greedy'
    small = _trivial(inst, name)
    if small is not None and (constraints is None or constraints.is_empty):
        return small
    n = inst.n
    constraints = constraints or EdgeConstraints()
    constraints.validate(n)
    if len(constraints.forced) == n:
        order = constraints.chains(n)[0]
        return finish_tour(inst, order, {u'heuristic': name})

    rounded = np.round(inst.distance_matrix() / inst.quantum)
    for a, b in constraints.forbidden:
        rounded[a, b] = rounded[b, a] = np.inf
    rows, cols = np.triu_indices(n, 1)
    lengths = rounded[rows, cols]
    ranking = np.lexsort((cols, rows, lengths))

    components = UnionFind(range(n))
    degree = np.zeros(n, dtype=int)
    neighbours = collections.defaultdict(list)

    def take(a, b):
        components.union(a, b)
        degree[a] += 1
        degree[b] += 1
        neighbours[a].append(b)
        neighbours[b].append(a)

    for a, b in sorted(constraints.forced):
        take(a, b)
    chosen = len(constraints.forced)
    for k in ranking:
        if chosen == n - 1:
            break
        if not np.isfinite(lengths[k]):
            break
        a, b = int(rows[k]), int(cols[k])
        if degree[a] < 2 and degree[b] < 2 and components[a] != components[b]:
            take(a, b)
            chosen += 1
    if chosen < n - 1:
        _stuck(name)
    ends = np.flatnonzero(degree == 1)
    a, b = int(ends[0]), int(ends[1])
    if not np.isfinite(rounded[a, b]):
        _stuck(name)
    take(a, b)

    order = [0]
    previous = None
    while len(order) < n:
        current = order[-1]
        nexts = sorted(u for u in neighbours[current] if u != previous)
        previous = current
        order.append(nexts[0])
    _check_honoured(name, order, constraints)
    return finish_tour(inst, order, {u'heuristic': name})


def _initial_chains(chains, metric, n):
    """Picks the chain of position 0, its nearest chain, and the third chain
    minimizing the summed distance to both."""

    def distance_to(members):
        nearest = np.full(n, np.inf)
        for v in members:
            nearest = np.minimum(nearest, metric.plain_row(v))
        return nearest

    ends = np.array([[c[0], c[-1]] for c in chains])
    to_first = distance_to(chains[0])
    score = np.minimum(to_first[ends[:, 0]], to_first[ends[:, 1]])
    score[0] = np.inf
    second = int(np.argmin(score))
    if len(chains) < 3:
        return [second]
    to_second = distance_to(chains[second])
    joint = score + np.minimum(to_second[ends[:, 0]], to_second[ends[:, 1]])
    joint[second] = np.inf
    return [second, int(np.argmin(joint))]


def _cheapest_insertion(tour, chain, metric, forced):
    """Returns (cost, position, oriented chain) of the cheapest insertion."""
    xs = np.asarray(tour)
    ys = np.roll(xs, -1)
    base = metric.aligned(xs, ys)
    fixed = np.array([edge(x, y) in forced for x, y in zip(tour, ys)]) \
        if forced else np.zeros(len(tour), dtype=bool)
    a, b = chain[0], chain[-1]
    row_a, row_b = metric.row(a), metric.row(b)
    options = [(row_a[xs] + row_b[ys] - base, chain)]
    if a != b:
        options.append((row_b[xs] + row_a[ys] - base, chain[::-1]))
    best = None
    for orientation, (costs, oriented) in enumerate(options):
        costs = np.where(fixed, np.inf, costs)
        low = costs.min()
        if not np.isfinite(low):
            continue
        for k in np.flatnonzero(costs == low):
            key = (low, edge(tour[k], ys[k]), orientation, int(k))
            if best is None or key < best[0]:
                best = (key, int(k), oriented)
    if best is None:
        return None
    return best[0][0], best[1], best[2]


def _insertion(inst, constraints, farthest, name):
    small = _trivial(inst, name)
    if small is not None and (constraints is None or constraints.is_empty):
        return small
    n = inst.n
    metric = _Metric(inst, constraints)
    chains = _chains(n, constraints)
    forced = constraints.forced if constraints is not None else frozenset()
    first = chains[0]
    if first[-1] == 0:
        first = first[::-1]
    tour = list(first)
    nearest = np.full(n, np.inf)
    for v in tour:
        nearest = np.minimum(nearest, metric.plain_row(v))
    active = np.ones(len(chains), dtype=bool)
    active[0] = False
    ends = np.array([[c[0], c[-1]] for c in chains])

    def insert(number):
        found = _cheapest_insertion(tour, chains[number], metric, forced)
        if found is None:
            _stuck(name)
        _, position, oriented = found
        tour[position + 1:position + 1] = list(oriented)
        active[number] = False
        for v in oriented:
            nearest[:] = np.minimum(nearest, metric.plain_row(v))

    if len(chains) > 1:
        for number in _initial_chains(chains, metric, n):
            insert(number)
    while active.any():
        score = np.minimum(nearest[ends[:, 0]], nearest[ends[:, 1]])
        if farthest:
            score = np.where(active, score, -np.inf)
            chosen = int(np.argmax(score))
        else:
            score = np.where(active, score, np.inf)
            chosen = int(np.argmin(score))
        insert(chosen)
    if len(tour) > 1 and metric.is_blocked(tour[-1], tour[0]):
        _stuck(name)
    _check_honoured(name, tour, constraints)
    return finish_tour(inst, tour, {u'heuristic': name})


def nearest_insertion(inst, constraints=None):
    """Builds a tour by inserting the point closest to the subtour.

    The subtour starts as the triangle on position 0, its nearest neighbour,
    and the point minimizing the summed distance to both. Each step selects
    the outside point closest to the subtour and inserts it where the added
    length is least.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): at least one point
      constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): optional

    Returns:
      :class:`tsplab.tsp.tours.Tour`

    Raises:
      HeuristicStuck: if no admissible insertion remains
    """
    return _insertion(inst, constraints, False, u'ni')


def farthest_insertion(inst, constraints=None):
    """As :func:`nearest_insertion`, selecting the point farthest from the
    subtour at each step."""
    return _insertion(inst, constraints, True, u'fi')


def _karp(inst, constraints=None):
    from . import dissection  # pylint: disable=import-outside-toplevel
    return dissection.karp_dissection(inst, constraints)


class Heuristics(Enum):
    """Enumerates the tour heuristics by command-line name."""
    NN = (u'nn', nearest_neighbor)
    GREEDY = (u'greedy', greedy)
    NI = (u'ni', nearest_insertion)
    FI = (u'fi', farthest_insertion)
    KARP = (u'karp', _karp)

    def __init__(self, label, build_func):
        self.label = label
        self.build_func = build_func

    def build(self, inst, constraints=None):
        return self.build_func(inst, constraints)

    @classmethod
    def from_name(cls, name):
        """Finds the heuristic registered under ``name``.

        Raises:
          ValueError: if no heuristic has that name
        """
        for h in cls:
            if h.label == name:
                return h
        _logger.error(_UNKNOWN_HEURISTIC, name)
        raise ValueError(_UNKNOWN_HEURISTIC % (name,))


def run_constrained(heuristic, inst, constraints):
    """Runs ``heuristic`` so its tour uses every forced and no forbidden edge.

    Args:
      heuristic (:class:`Heuristics`): the heuristic, or its name
      inst (:class:`tsplab.tsp.instance.Instance`): the instance
      constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): I and O

    Returns:
      :class:`tsplab.tsp.tours.Tour`: a tour honouring the constraints

    Raises:
      InfeasibleConstraints: if the constraints admit no tour structurally
      HeuristicStuck: if the heuristic cannot complete
    """
    if not isinstance(heuristic, Heuristics):
        heuristic = Heuristics.from_name(heuristic)
    constraints = constraints or EdgeConstraints()
    constraints.validate(inst.n)
    tour = heuristic.build(inst, constraints)
    if not constraints.admits(tour.order):
        _logger.error(_NOT_HONOURED, heuristic.label)
        raise HeuristicStuck(_NOT_HONOURED % (heuristic.label,))
    return tour
