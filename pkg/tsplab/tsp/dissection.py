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

"""dissection provides the cell-dissection heuristic.

The box is cut into ``g**d`` congruent cells with
``g = floor((n / ln n) ** (1/d))``; the points of every cell are toured
exactly, and the cell tours are patched together in boustrophedon order.
Each patch deletes one edge of the next cell tour and one edge of the
previous cell tour not yet deleted, and reconnects the two cycles by the
cheaper of the two possible edge pairs. Additive patching, the default,
takes an exchange that would shorten the tour only when nothing else is
left, so patching adds length; cheapest patching takes the cheapest
exchange whatever its sign.

A cell whose population exceeds the exact solver limit is quartered
recursively, its sub-cells keeping the boustrophedon order. Coinciding
points are never separated.

"""

from __future__ import absolute_import, division

import logging
import math
from concurrent import futures

import numpy as np

from tsplab.config import HeuristicOptions, SolverOptions

from . import exact, geometry
from .heuristics import HeuristicStuck, finish_tour

_logger = logging.getLogger(__name__)

_NO_CONSTRAINTS = u'karp dissection does not accept edge constraints'


def cells_per_axis(n, d):
    """The cell count per axis, ``floor((n / ln n) ** (1/d))``, at least 1."""
    if n < 3:
        return 1
    return max(1, int(math.floor((n / math.log(n)) ** (1.0 / d))))


def snake_order(g, d):
    """Lists the cells of a ``g**d`` grid in boustrophedon order.

    The last axis is outermost; each inner sweep reverses direction whenever
    the enclosing index is odd, so consecutive cells share a face.
    """
    if d == 1:
        return [(i,) for i in range(g)]
    inner = snake_order(g, d - 1)
    cells = []
    for k in range(g):
        sweep = inner if k % 2 == 0 else inner[::-1]
        cells.extend(c + (k,) for c in sweep)
    return cells


def _split(members, points, lower, side, limit, quantum):
    """Yields the member groups of a cell, quartering it while too full.

    A group whose points all coincide, or whose cell is narrower than the
    distance quantum, is returned whole however large it is.
    """
    if len(members) <= limit:
        return [members]
    local = points[members]
    if side < quantum or np.all(local == local[0]):
        return [members]
    d = points.shape[1]
    half = side / 2.0
    offsets = ((local - lower) >= half).astype(int)
    groups = []
    for sub in snake_order(2, d):
        chosen = members[np.all(offsets == np.array(sub), axis=1)]
        if len(chosen):
            groups.extend(_split(chosen, points, lower + half * np.array(sub),
                                 half, limit, quantum))
    return groups


def partition(inst, limit):
    """Groups the positions of ``inst`` into cells, in visiting order.

    Returns:
      tuple(int, list[:class:`numpy.ndarray`], int): cells per axis, the
        non-empty groups in boustrophedon order and the number of cells that
        had to be quartered
    """
    box = inst.box
    g = cells_per_axis(inst.n, box.d)
    side = box.t / g
    index = np.minimum(np.floor(inst.points / side).astype(int), g - 1)
    groups = []
    quartered = 0
    for cell in snake_order(g, box.d):
        members = np.flatnonzero(np.all(index == np.array(cell), axis=1))
        if not len(members):
            continue
        if len(members) > limit:
            quartered += 1
            _logger.debug(u'quartering cell %s holding %d points', cell,
                          len(members))
        groups.extend(_split(members, inst.points, np.array(cell) * side,
                             side, limit, inst.quantum))
    return g, groups, quartered


def cell_tour(inst, members, solver_options=None):
    """Tours one group of positions exactly.

    Coinciding points are solved once and visited consecutively, so copies
    of a point never count against the solver limit.

    Returns:
      tuple(list[int], float): the cycle over ``members`` and its length
    """
    if len(members) == 1:
        return [int(members[0])], 0.0
    local = inst.points[members]
    unique, first, inverse = np.unique(local, axis=0, return_index=True,
                                       return_inverse=True)
    if len(unique) == 1:
        return [int(m) for m in members], 0.0
    inverse = np.asarray(inverse).reshape(-1)
    # representatives in position order
    keep = np.argsort(first)
    rank = np.empty_like(keep)
    rank[keep] = np.arange(len(keep))
    reps = local[first[keep]]
    matrix = geometry.pairwise_distances(reps, reps, inst.box)
    order, length = exact.solve_tour_matrix(matrix, solver_options)
    copies = [[] for _ in range(len(reps))]
    for i, r in enumerate(rank[inverse]):
        copies[int(r)].append(int(members[i]))
    return [m for r in order for m in copies[r]], length


class _Chain(object):
    """The tour under construction, held as a successor map.

    Each group keeps the list of its own cycle edges still in the tour. A
    patch deletes one of those of the previous group and one edge of the
    incoming cycle, so the tour restricted to a group is always its cycle
    with one or two edges removed.
    """

    def __init__(self, inst, groups, first, additive=True):
        self.points = inst.points
        self.additive = additive
        self.box = inst.box
        self.groups = groups
        self.tol = 1e-12 * max(1.0, inst.box.t)
        self.nxt = {}
        self.shortening = 0
        if len(first) == 1:
            self.nxt[first[0]] = first[0]
            self.intact = [[(first[0], first[0])]]
        else:
            edges = list(zip(first, first[1:] + first[:1]))
            self.nxt.update(edges)
            self.intact = [edges]

    def _dist(self, a, b):
        return np.sqrt(np.sum(geometry.displacement(
            self.points[a], self.points[b], self.box) ** 2, axis=-1))

    def _anchors(self, previous):
        if self.intact[previous]:
            return self.intact[previous], True
        # no cycle edge left: fall back to the patch edges touching the group
        members = set(self.groups[previous])
        return [(u, v) for u, v in sorted(self.nxt.items())
                if u in members or v in members], False

    def patch(self, previous, cycle):
        """Joins ``cycle`` to the group at index ``previous``.

        When additive, the cheapest exchange that does not shorten the tour
        is used, and the cheapest overall only when every exchange would
        shorten it. Otherwise the cheapest is taken outright. Patches that
        shorten the tour are counted in :attr:`shortening`.

        Returns:
          float: the length the exchange adds
        """
        anchors, internal = self._anchors(previous)
        xs = np.array([u for u, _ in anchors])
        ys = np.array([v for _, v in anchors])
        cs = np.array(cycle)
        ds = np.roll(cs, -1)
        removed = (self._dist(xs, ys)[:, None] +
                   self._dist(cs, ds)[None, :])
        # straight enters the cycle at d and leaves it at c
        straight = (self._dist(xs[:, None], ds[None, :]) +
                    self._dist(cs[None, :], ys[:, None]) - removed)
        backward = (self._dist(xs[:, None], cs[None, :]) +
                    self._dist(ds[None, :], ys[:, None]) - removed)
        costs = np.stack([straight, backward])
        allowed = costs >= -self.tol
        if self.additive and allowed.any():
            flat = int(np.argmin(np.where(allowed, costs, np.inf)))
        else:
            flat = int(np.argmin(costs))
        way, i, j = np.unravel_index(flat, costs.shape)
        if not allowed[way, i, j]:
            self.shortening += 1
            if self.additive:
                _logger.debug(u'every exchange into group %d shortens the '
                              u'tour', previous + 1)
        x, y = anchors[i]
        m = len(cycle)
        if way == 0:
            walk = [cycle[(j + 1 + k) % m] for k in range(m)]
        else:
            walk = [cycle[(j - k) % m] for k in range(m)]
        if internal:
            self.intact[previous].remove((x, y))
        edges = list(zip(walk, walk[1:]))
        self.nxt[x] = walk[0]
        self.nxt.update(edges)
        self.nxt[walk[-1]] = y
        self.intact.append(edges)
        return float(costs[way, i, j])

    def order(self):
        start = self.groups[0][0]
        order = [start]
        current = self.nxt[start]
        while current != start:
            order.append(current)
            current = self.nxt[current]
        return order


def karp_dissection(inst, constraints=None, options=None, solver_options=None):
    """Tours ``inst`` by exact cell tours patched in boustrophedon order.

    Consecutive groups are merged by deleting one edge of the incoming cell
    tour and one still-present edge of the previous cell tour, so every cell
    is visited along its exact sub-tour with one edge removed, or two for
    cells patched on both sides.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): at least one point
      constraints: must be empty
      options (:class:`tsplab.config.HeuristicOptions`): cell limit, threads
        and patching mode
      solver_options (:class:`tsplab.config.SolverOptions`): exact limits

    Returns:
      :class:`tsplab.tsp.tours.Tour`: its ``meta`` records the cell count,
        the logarithm used, the cell tour lengths, the patch costs, whose
        sums add up to the tour length, the patching mode and how many
        patches shortened the tour

    Raises:
      HeuristicStuck: if non-empty constraints are given
    """
    if constraints is not None and not constraints.is_empty:
        _logger.debug(_NO_CONSTRAINTS)
        raise HeuristicStuck(_NO_CONSTRAINTS)
    if inst.n < 1:
        raise ValueError(u'karp needs at least one point')
    options = options or HeuristicOptions()
    solver_options = solver_options or SolverOptions()
    limit = options.karp_cell_limit or solver_options.n_max
    limit = max(1, min(limit, solver_options.n_max))
    g, groups, quartered = partition(inst, limit)

    def solve(members):
        return cell_tour(inst, members, solver_options)

    if options.threads > 1 and len(groups) > 1:
        with futures.ThreadPoolExecutor(max_workers=options.threads) as pool:
            cell_tours = list(pool.map(solve, groups))
    else:
        cell_tours = [solve(members) for members in groups]

    chain = _Chain(inst, [[int(m) for m in members] for members in groups],
                   cell_tours[0][0], options.karp_patch == u'additive')
    patch_costs = [chain.patch(k, cycle)
                   for k, (cycle, _) in enumerate(cell_tours[1:])]
    meta = {
        u'heuristic': u'karp',
        u'cells_per_axis': g,
        u'cells': g ** inst.box.d,
        u'log': u'natural',
        u'quartered': quartered,
        u'cell_lengths': [length for _, length in cell_tours],
        u'patch_costs': patch_costs,
        u'patching': options.karp_patch,
        u'shortening_patches': chain.shortening,
    }
    _logger.debug(u'karp: %d cells, %d non-empty groups', g ** inst.box.d,
                  len(groups))
    return finish_tour(inst, chain.order(), meta)
