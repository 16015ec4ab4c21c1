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

"""one_tree provides the Lagrangian 1-tree lower bound with edge constraints.

A 1-tree is a spanning tree on positions ``1..n-1`` plus two edges at
position 0. Under multipliers ``pi`` each edge ``(i, j)`` is priced
``d(i, j) + pi[i] + pi[j]``; the cheapest 1-tree value minus ``2 * sum(pi)``
bounds every tour from below. Subgradient ascent moves ``pi`` along
``degree - 2`` with step ``scale * (target - value) / |g|**2``, halving the
scale after a run of iterations without improvement.

Forced edges enter the tree before any other edge and forbidden edges are
never used, so the bound holds for the tours honouring the constraints.

"""

from __future__ import absolute_import, division

import collections
import logging

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree

from tsplab.config import BnBOptions

from . import geometry
from .tours import EdgeConstraints, edge

_logger = logging.getLogger(__name__)

_FORCED_WEIGHT = 1e-9
_INITIAL_SCALE = 2.0


class OneTreeResult(
        collections.namedtuple(
            u'OneTreeResult',
            [u'bound',
             u'multipliers',
             u'tree_edges',
             u'fractional',
             u'is_tour',
             u'iterations'])):
    """The outcome of a subgradient ascent.

    Attributes:
        bound (float): the best Lagrangian value, ``inf`` when no 1-tree
          honours the constraints
        multipliers (:class:`numpy.ndarray`): the multipliers achieving it
        tree_edges (frozenset): the 1-tree achieving it
        fractional (:class:`numpy.ndarray`): how often each edge was in the
          1-tree over the ascent, a symmetric matrix of values in [0, 1]
        is_tour (bool): the best 1-tree is a tour, so the bound is exact
        iterations (int): the number of 1-trees computed
    """
    # pylint: disable=too-few-public-methods


def _infeasible(n, iterations):
    return OneTreeResult(float(u'inf'), np.zeros(n), frozenset(),
                         np.zeros((n, n)), False, iterations)


def one_tree(matrix, multipliers, constraints):
    """Computes the cheapest constrained 1-tree for fixed multipliers.

    Returns:
      tuple(float, frozenset, :class:`numpy.ndarray`): its Lagrangian value,
        its edges and the vertex degrees; ``None`` when the constraints
        disconnect the graph
    """
    n = matrix.shape[0]
    priced = matrix + multipliers[:, None] + multipliers[None, :]
    edges = set()
    if n > 2:
        sub = priced[1:, 1:]
        allowed = ~np.eye(n - 1, dtype=bool)
        for a, b in constraints.forbidden:
            if a > 0:
                allowed[a - 1, b - 1] = allowed[b - 1, a - 1] = False
        if not allowed.any():
            return None
        shifted = np.where(allowed, sub - sub[allowed].min() + 1.0, 0.0)
        for a, b in constraints.forced:
            if a > 0:
                shifted[a - 1, b - 1] = shifted[b - 1, a - 1] = _FORCED_WEIGHT
        tree = minimum_spanning_tree(shifted)
        rows, cols = tree.nonzero()
        edges.update(edge(i + 1, j + 1) for i, j in zip(rows, cols))
        if len(edges) < n - 2:
            return None
    at_root = sorted(b for a, b in constraints.forced if a == 0)
    spare = [v for v in range(1, n)
             if v not in at_root and (0, v) not in constraints.forbidden]
    spare.sort(key=lambda v: (priced[0, v], v))
    picked = at_root + spare[:2 - len(at_root)]
    if len(picked) < min(2, n - 1):
        return None
    edges.update((0, v) for v in picked)
    degree = np.zeros(n)
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    value = sum(priced[a, b] for a, b in edges) - 2.0 * multipliers.sum()
    return float(value), frozenset(edges), degree


def one_tree_ascent(matrix, constraints=None, options=None, target=None,
                    upper_bound=None, multipliers=None):
    """Runs subgradient ascent on the constrained 1-tree bound.

    Args:
      matrix (:class:`numpy.ndarray`): symmetric distances, n >= 3
      constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): I and O
      options (:class:`tsplab.config.BnBOptions`): iteration count, halving
        period and tolerance
      target (float): the value steps aim at, usually a known tour length;
        it must not depend on the incumbent for tree sizes to be comparable
      upper_bound (float): the ascent stops once the bound reaches it
      multipliers (:class:`numpy.ndarray`): a warm start

    Returns:
      :class:`OneTreeResult`

    Raises:
      InfeasibleConstraints: if the constraints are structurally infeasible
    """
    options = options or BnBOptions()
    constraints = constraints or EdgeConstraints()
    n = matrix.shape[0]
    constraints.validate(n)
    if n < 3:
        length = float(2 * matrix[0, 1]) if n == 2 else 0.0
        tour_edges = frozenset([(0, 1)]) if n == 2 else frozenset()
        return OneTreeResult(length, np.zeros(n), tour_edges, np.zeros((n, n)),
                             True, 0)
    pi = np.zeros(n) if multipliers is None else np.array(multipliers,
                                                          dtype=float)
    usage = np.zeros((n, n))
    best, best_pi, best_edges, best_is_tour = -np.inf, pi, frozenset(), False
    scale = _INITIAL_SCALE
    stall = 0
    count = 0
    for count in range(1, max(1, options.iterations) + 1):
        found = one_tree(matrix, pi, constraints)
        if found is None:
            _logger.debug(u'constraints disconnect the 1-tree graph')
            return _infeasible(n, count)
        value, edges, degree = found
        for a, b in edges:
            usage[a, b] += 1
            usage[b, a] += 1
        subgradient = degree - 2
        is_tour = not subgradient.any()
        if value > best + options.prune_tolerance or (is_tour and value >= best):
            best, best_pi, best_edges, best_is_tour = value, pi, edges, is_tour
            stall = 0
        else:
            stall += 1
            if stall >= options.halving_period:
                scale /= 2.0
                stall = 0
        if is_tour:
            break
        if upper_bound is not None and best >= upper_bound - options.prune_tolerance:
            break
        aim = target if target is not None else value
        aim = max(aim, value + 0.01 * abs(value) + options.prune_tolerance)
        step = scale * (aim - value) / float(np.dot(subgradient, subgradient))
        pi = pi + step * subgradient
    fractional = usage / count
    _logger.debug(u'1-tree ascent: bound %.6f after %d iterations', best, count)
    return OneTreeResult(float(best), best_pi, best_edges, fractional,
                         best_is_tour, count)


def hk_one_tree_bound(points, box, constraints=None, iterations=None,
                      options=None):
    """The Lagrangian 1-tree lower bound for a point set.

    Args:
      points (sequence): the points
      box (:class:`tsplab.tsp.geometry.Box`): the metric
      constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): I and O
      iterations (int): overrides ``options.iterations``
      options (:class:`tsplab.config.BnBOptions`): ascent settings

    Returns:
      float: a value no larger than the shortest tour honouring the
        constraints, ``inf`` when none exists

    Raises:
      InfeasibleConstraints: if the constraints are structurally infeasible
    """
    options = options or BnBOptions()
    if iterations is not None:
        options = options._replace(iterations=int(iterations))
    matrix = geometry.pairwise_distances(points, points, box)
    target = nearest_neighbour_length(matrix)
    return one_tree_ascent(matrix, constraints, options, target=target).bound


def nearest_neighbour_length(matrix):
    """The nearest-neighbour tour length over a matrix, an ascent target."""
    n = matrix.shape[0]
    if n < 2:
        return 0.0
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    current, total = 0, 0.0
    for _ in range(n - 1):
        row = np.where(seen, np.inf, matrix[current])
        nxt = int(np.argmin(row))
        total += row[nxt]
        seen[nxt] = True
        current = nxt
    return float(total + matrix[current, 0])
