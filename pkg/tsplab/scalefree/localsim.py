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

"""localsim predicts how a heuristic runs through a small local point set.

Each simulator replays one heuristic on the points of a local ball only and
forks wherever the choice is uncertain up to ``eps``: two candidates whose
distances (or insertion costs) differ by less than ``eps`` are both
followed. Forks are drawn from one budget per call; once it is spent the
remaining ties go to the smallest candidate and the result is flagged
``cap_exceeded``, which marks the configuration as unstable rather than as
an error.

- :func:`simulate_nn` walks nearest neighbour from every entry point
- :func:`simulate_greedy` adds shortest edges until one path remains
- :func:`simulate_insertion` inserts the points of S into a protecting ring

Outputs are sorted canonical orders, so exploration order never shows.

"""

from __future__ import absolute_import, division

import collections
import logging

import numpy as np
from networkx.utils import UnionFind

from tsplab.config import LocalSimOptions
from tsplab.tsp import geometry
from tsplab.tsp.geometry import LOCAL_FRAME
from tsplab.tsp.tours import PathSeq

_logger = logging.getLogger(__name__)

NEAREST = u'nearest'
FARTHEST = u'farthest'

_CAPPED = u'%s simulation spent its %d forks; remaining ties were not followed'


class CandidatePaths(
        collections.namedtuple(
            u'CandidatePaths',
            [u'paths',
             u'branch_count',
             u'cap_exceeded',
             u'closed',
             u'steps'])):
    """The outcomes of a local simulation.

    Attributes:
        paths (tuple[:class:`tsplab.tsp.tours.PathSeq`]): distinct outcomes
          over local indices, sorted
        branch_count (int): the forks taken
        cap_exceeded (bool): some tie was left unexplored
        closed (bool): the outcomes are cycles, flagged ``full``
        steps (int): the extension steps performed over all branches
    """
    # pylint: disable=too-few-public-methods

    def __len__(self):
        return len(self.paths)


def canonical_path(order):
    """Picks the smaller of a path and its reversal."""
    order = tuple(int(v) for v in order)
    return min(order, order[::-1])


def canonical_cycle(order):
    """Rotates a cycle to its smallest member and picks the smaller
    direction."""
    order = [int(v) for v in order]
    if not order:
        return ()
    start = order.index(min(order))
    rotated = order[start:] + order[:start]
    return min(tuple(rotated), tuple(rotated[:1] + rotated[1:][::-1]))


class _Search(object):
    """Depth-first exploration under a shared fork budget."""

    def __init__(self, name, cap):
        self.name = name
        self.cap = cap
        self.forks = 0
        self.capped = False
        self.steps = 0
        self.found = set()

    def run(self, roots, expand, finish):
        stack = list(reversed(roots))
        while stack:
            state = stack.pop()
            children = expand(state)
            self.steps += 1
            if children is None:
                self.found.add(finish(state))
                continue
            if len(children) > 1:
                room = self.cap - self.forks
                if room < len(children) - 1:
                    self.capped = True
                    children = children[:room + 1]
                self.forks += len(children) - 1
            stack.extend(reversed(children))

    def result(self, closed):
        if self.capped:
            _logger.warning(_CAPPED, self.name, self.cap)
        paths = tuple(PathSeq(order, full=closed)
                      for order in sorted(self.found))
        return CandidatePaths(paths, self.forks, self.capped, closed,
                              self.steps)


def _fork_cap(cap, options):
    if cap is not None:
        return int(cap)
    return (options or LocalSimOptions()).fork_cap


def _matrix(local_points):
    points = geometry.as_points(local_points, LOCAL_FRAME)
    return geometry.pairwise_distances(points, points, LOCAL_FRAME)


def _tied(keys, eps):
    """The positions of ``keys`` within eps of the least, least first."""
    keys = np.asarray(keys, dtype=float)
    low = keys.min()
    close = np.flatnonzero(keys - low < eps)
    return close[np.lexsort((close, keys[close]))]


def simulate_nn(local_points, entry_points, eps, cap=None, options=None):
    """Replays nearest neighbour from each entry point over the local points.

    Args:
      local_points (sequence): the rounded local points
      entry_points (sequence[int]): the local indices a walk may start at
      eps (float): the tie radius, also the rounding precision
      cap (int): the fork budget, ``options.fork_cap`` when omitted
      options (:class:`tsplab.config.LocalSimOptions`): defaults

    Returns:
      :class:`CandidatePaths`: open paths visiting every local point
    """
    matrix = _matrix(local_points)
    n = matrix.shape[0]
    search = _Search(u'nearest neighbour', _fork_cap(cap, options))

    def expand(path):
        if len(path) == n:
            return None
        row = matrix[path[-1]].copy()
        row[list(path)] = np.inf
        unvisited = np.flatnonzero(np.isfinite(row))
        chosen = unvisited[_tied(row[unvisited], eps)]
        return [path + (int(v),) for v in chosen]

    roots = [(int(e),) for e in entry_points]
    search.run(roots, expand, canonical_path)
    return search.result(closed=False)


def simulate_greedy(local_points, eps, cap=None, options=None):
    """Replays the greedy edge heuristic on the local points alone.

    Ties only fork when taking one tied edge would exclude another; tied
    edges that stay compatible are all taken in turn.

    Returns:
      :class:`CandidatePaths`: open paths visiting every local point
    """
    matrix = _matrix(local_points)
    n = matrix.shape[0]
    rows, cols = np.triu_indices(n, 1)
    lengths = matrix[rows, cols]
    search = _Search(u'greedy', _fork_cap(cap, options))

    def admissible(chosen):
        degree = np.zeros(n, dtype=int)
        groups = UnionFind(range(n))
        for k in chosen:
            degree[rows[k]] += 1
            degree[cols[k]] += 1
            groups.union(rows[k], cols[k])
        ok = ((degree[rows] < 2) & (degree[cols] < 2) &
              np.array([groups[a] != groups[b] for a, b in zip(rows, cols)],
                       dtype=bool))
        return np.flatnonzero(ok)

    def expand(chosen):
        if len(chosen) == n - 1:
            return None
        open_edges = admissible(chosen)
        tied = open_edges[_tied(lengths[open_edges], eps)]
        first = chosen + (int(tied[0]),)
        if len(tied) == 1 or set(tied[1:]) <= set(admissible(first)):
            return [first]
        return [chosen + (int(k),) for k in tied]

    def finish(chosen):
        if n < 2:
            return tuple(range(n))
        neighbours = collections.defaultdict(list)
        for k in chosen:
            neighbours[int(rows[k])].append(int(cols[k]))
            neighbours[int(cols[k])].append(int(rows[k]))
        start = min(v for v in range(n) if len(neighbours[v]) < 2)
        order, previous = [start], None
        while len(order) < n:
            current = order[-1]
            step = [u for u in neighbours[current] if u != previous][0]
            previous = current
            order.append(step)
        return canonical_path(order)

    search.run([()], expand, finish)
    return search.result(closed=False)


def _angular_order(points, ring, anchor):
    offsets = points[ring] - anchor
    angles = np.arctan2(offsets[:, 1], offsets[:, 0])
    return [int(ring[k]) for k in np.argsort(angles, kind=u'stable')]


def simulate_insertion(local_points, ring, eps, cap=None, mode=NEAREST,
                       anchor=None, options=None):
    """Replays nearest or farthest insertion of S into a protecting ring.

    The ring points are taken as an already built subtour, in angular order
    around ``anchor``; every other local point belongs to S. Each step
    selects the S point nearest to (or farthest from) the subtour and
    inserts it at the least added length, forking on ties of either
    choice. In farthest mode the first S point is not selected by the rule:
    the run is repeated once for every S point inserted first.

    Args:
      local_points (sequence): the rounded local points
      ring (sequence[int]): the local indices of the protecting gadget
      eps (float): the tie radius
      cap (int): the fork budget, ``options.fork_cap`` when omitted
      mode (str): ``nearest`` or ``farthest``
      anchor (sequence[float]): the centre of the angular order, the mean of
        the S points when omitted
      options (:class:`tsplab.config.LocalSimOptions`): defaults

    Returns:
      :class:`CandidatePaths`: cycles over all local points, flagged
        ``closed``
    """
    if mode not in (NEAREST, FARTHEST):
        raise ValueError(u'unknown insertion mode %s' % (mode,))
    points = geometry.as_points(local_points, LOCAL_FRAME)
    matrix = _matrix(points)
    n = matrix.shape[0]
    ring = [int(v) for v in ring]
    if not ring:
        raise ValueError(u'the ring should hold at least one point')
    inner = [v for v in range(n) if v not in ring]
    if anchor is None:
        anchor = points[inner].mean(axis=0) if inner else points.mean(axis=0)
    start = tuple(_angular_order(points, np.array(ring), np.asarray(anchor)))
    search = _Search(u'%s insertion' % (mode,), _fork_cap(cap, options))

    def placements(tour, v):
        xs = np.asarray(tour)
        ys = np.roll(xs, -1)
        costs = matrix[xs, v] + matrix[v, ys] - matrix[xs, ys]
        return [tour[:k + 1] + (v,) + tour[k + 1:]
                for k in _tied(costs, eps)]

    def selected(tour, remaining):
        gaps = matrix[np.ix_(remaining, list(tour))].min(axis=1)
        keys = gaps if mode == NEAREST else -gaps
        return [remaining[k] for k in _tied(keys, eps)]

    def expand(tour):
        remaining = [v for v in inner if v not in tour]
        if not remaining:
            return None
        children = []
        for v in selected(tour, remaining):
            children.extend(placements(tour, v))
        return children

    if mode == FARTHEST and inner:
        roots = []
        for v in inner:
            roots.extend(placements(start, v))
    else:
        roots = [start]
    search.run(roots, expand, canonical_cycle)
    return search.result(closed=True)
