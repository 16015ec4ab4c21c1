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

"""exact provides Held-Karp solvers for tours and Hamilton paths.

The subset table ``f[mask, j]`` holds the length of the shortest path that
visits exactly the vertices of ``mask`` and ends at ``j``; it is filled one
cardinality layer at a time with vectorized minima. Read backwards, the same
table gives the cost of completing a partial path, which lets the solvers walk
forward choosing the smallest admissible index at every step: among optimal
solutions (up to the solver tolerance) the lexicographically smallest index
sequence is returned.

- :func:`held_karp_tour` and :func:`held_karp_path` solve point sets
- :func:`solve_tour_matrix` and :func:`solve_path_matrix` solve arbitrary
  symmetric matrices, ``inf`` marking unusable edges
- :func:`constrained_tour` solves under forced and forbidden edges
- :func:`brute_force` enumerates permutations as an independent oracle

"""

from __future__ import absolute_import, division

import itertools
import logging

import numpy as np

from tsplab.config import SolverOptions

from . import caches, geometry
from .tours import InfeasibleConstraints, PathSeq, Tour, cycle_length

_logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX = 10
_BRUTE_CHUNK = 50000

_TOO_MANY_POINTS = u'%d points exceed the exact solver limit of %d'
_BAD_ENDPOINTS = u'endpoints should be two distinct positions, got %s'
_NO_TOUR = u'no tour honours the forced and forbidden edges'

_cache = caches.create(caches.ExactCacheOptions(
    SolverOptions.DEFAULT_CACHE_ENTRIES))


class SolverLimitExceeded(ValueError):
    pass


def use_cache(options):
    """Replaces the module solve cache.

    Args:
      options (:class:`tsplab.tsp.caches.ExactCacheOptions`): the new size;
        ``None`` disables caching
    """
    global _cache  # pylint: disable=global-statement
    _cache = caches.create(options)


def _check_size(n, limit):
    if n > limit:
        _logger.error(_TOO_MANY_POINTS, n, limit)
        raise SolverLimitExceeded(_TOO_MANY_POINTS % (n, limit))


def _popcounts(size, width):
    masks = np.arange(size, dtype=np.int64)
    counts = np.zeros(size, dtype=np.int64)
    for bit in range(width):
        counts += (masks >> bit) & 1
    return masks, counts


def _subset_table(matrix, start):
    """Fills the subset table over every vertex but ``start``.

    With ``start`` None the paths may begin anywhere.
    """
    n = matrix.shape[0]
    others = [v for v in range(n) if v != start]
    m = len(others)
    sub = matrix[np.ix_(others, others)]
    size = 1 << m
    table = np.full((size, m), np.inf)
    singles = np.left_shift(1, np.arange(m, dtype=np.int64))
    if start is None:
        table[singles, np.arange(m)] = 0.0
    else:
        table[singles, np.arange(m)] = matrix[start, others]
    masks, counts = _popcounts(size, m)
    for k in range(2, m + 1):
        layer = masks[counts == k]
        for j in range(m):
            bit = np.int64(1) << j
            chosen = layer[(layer & bit) != 0]
            table[chosen, j] = np.min(table[chosen ^ bit] + sub[:, j], axis=1)
    return others, table


def _walk_forward(matrix, others, table, first, remaining, budget, tol):
    """Extends ``first`` by the smallest admissible vertex at every step."""
    order = [first]
    row = matrix[:, others]
    current = first
    while remaining:
        completion = row[current] + table[remaining]
        admissible = np.flatnonzero(completion <= budget + tol)
        local = admissible[0] if len(admissible) else int(np.argmin(completion))
        budget = table[remaining, local]
        remaining ^= 1 << int(local)
        current = others[local]
        order.append(current)
    return order


def _tolerance(value, options):
    return options.tolerance * max(1.0, abs(value))


def _cached(key, compute):
    if _cache is None:
        return compute()
    with _cache as cache:
        hit = cache.get(key)
    if hit is not None:
        return hit
    result = compute()
    with _cache as cache:
        cache[key] = result
    return result


def solve_tour_matrix(matrix, options=None, length_offset=0.0):
    """Finds the lexicographically smallest optimal tour of a matrix.

    Args:
      matrix (:class:`numpy.ndarray`): symmetric lengths, ``inf`` for
        unusable edges
      options (:class:`tsplab.config.SolverOptions`): solver limits
      length_offset (float): added to the optimum before the tie slack is
        scaled by it, for matrices whose entries were shifted

    Returns:
      tuple(tuple[int], float): the order (starting at 0) and its length,
        which is ``inf`` when no finite tour exists

    Raises:
      SolverLimitExceeded: if the matrix is larger than ``options.n_max``
    """
    options = options or SolverOptions()
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    _check_size(n, options.n_max)
    if n <= 1:
        return tuple(range(n)), 0.0
    if n == 2:
        return (0, 1), float(2 * matrix[0, 1])

    def compute():
        others, table = _subset_table(matrix, 0)
        full = (1 << len(others)) - 1
        closing = table[full] + matrix[others, 0]
        best = float(closing.min())
        if not np.isfinite(best):
            return tuple(range(n)), float(u'inf')
        tol = _tolerance(best + length_offset, options)
        order = _walk_forward(matrix, others, table, 0, full, best, tol)
        return tuple(order), best

    key = caches.solve_key(u'tour', matrix, (options.tolerance, length_offset))
    return _cached(key, compute)


def solve_path_matrix(matrix, endpoints=None, options=None):
    """Finds the lexicographically smallest optimal Hamilton path of a matrix.

    Args:
      matrix (:class:`numpy.ndarray`): symmetric lengths
      endpoints (tuple[int, int]): when given, the path runs from the first
        to the second
      options (:class:`tsplab.config.SolverOptions`): solver limits

    Returns:
      tuple(tuple[int], float): the order and its length

    Raises:
      SolverLimitExceeded: if the matrix is larger than ``options.n_max``
      ValueError: if the endpoints are not distinct valid positions
    """
    options = options or SolverOptions()
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    _check_size(n, options.n_max)
    if endpoints is not None:
        w, z = (int(e) for e in endpoints)
        if w == z or not (0 <= w < n and 0 <= z < n):
            _logger.error(_BAD_ENDPOINTS, endpoints)
            raise ValueError(_BAD_ENDPOINTS % (endpoints,))
    if n <= 1:
        return tuple(range(n)), 0.0

    def compute_free():
        others, table = _subset_table(matrix, None)
        full = (1 << n) - 1
        best = float(table[full].min())
        tol = _tolerance(best, options)
        first = int(np.flatnonzero(table[full] <= best + tol)[0])
        order = _walk_forward(matrix, others, table, first,
                              full ^ (1 << first), table[full, first], tol)
        return tuple(order), best

    def compute_fixed():
        others, table = _subset_table(matrix, z)
        full = (1 << len(others)) - 1
        local = others.index(w)
        best = float(table[full, local])
        order = _walk_forward(matrix, others, table, w, full ^ (1 << local),
                              best, _tolerance(best, options))
        return tuple(order) + (z,), best

    if endpoints is None:
        return _cached(caches.solve_key(u'path', matrix, (options.tolerance,)),
                       compute_free)
    return _cached(
        caches.solve_key(u'path', matrix, (w, z, options.tolerance)),
        compute_fixed)


def held_karp_tour(points, box, options=None):
    """Solves the tour problem on a point set exactly.

    Args:
      points (sequence): the points, at least one
      box (:class:`tsplab.tsp.geometry.Box`): the metric
      options (:class:`tsplab.config.SolverOptions`): solver limits

    Returns:
      :class:`tsplab.tsp.tours.Tour`: a minimum-length tour starting at 0

    Raises:
      SolverLimitExceeded: if there are more than ``options.n_max`` points
    """
    matrix = geometry.pairwise_distances(points, points, box)
    if matrix.shape[0] < 1:
        raise ValueError(u'held_karp_tour needs at least one point')
    order, length = solve_tour_matrix(matrix, options)
    return Tour(order, length)


def held_karp_path(points, box, endpoints=None, options=None):
    """Solves the Hamilton path problem on a point set exactly.

    Args:
      points (sequence): the points
      box (:class:`tsplab.tsp.geometry.Box`): the metric
      endpoints (tuple[int, int]): optional fixed ends, first to second
      options (:class:`tsplab.config.SolverOptions`): solver limits

    Returns:
      tuple(:class:`tsplab.tsp.tours.PathSeq`, float): the path and its length
    """
    matrix = geometry.pairwise_distances(points, points, box)
    order, length = solve_path_matrix(matrix, endpoints, options)
    return PathSeq(order), length


def constrained_tour(matrix, constraints, options=None):
    """Solves the tour problem under forced and forbidden edges.

    Forbidden edges are priced at ``inf``; forced edges are discounted by a
    constant exceeding any tour length, so an optimum uses all of them
    whenever some tour does.

    Args:
      matrix (:class:`numpy.ndarray`): the true distances
      constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): I and O
      options (:class:`tsplab.config.SolverOptions`): solver limits

    Returns:
      :class:`tsplab.tsp.tours.Tour`: the constrained optimum, lengths
        measured with the true distances

    Raises:
      InfeasibleConstraints: if no tour honours the constraints
      SolverLimitExceeded: if the matrix is larger than ``options.n_max``
    """
    n = matrix.shape[0]
    constraints.validate(n)
    if constraints.is_empty:
        order, length = solve_tour_matrix(matrix, options)
        return Tour(order, length)
    priced = np.array(matrix, dtype=float)
    discount = float(np.sum(np.triu(matrix))) + 1.0
    for a, b in constraints.forbidden:
        priced[a, b] = priced[b, a] = np.inf
    for a, b in constraints.forced:
        priced[a, b] = priced[b, a] = matrix[a, b] - discount
    # ties are judged on the undiscounted length
    order, length = solve_tour_matrix(
        priced, options, length_offset=discount * len(constraints.forced))
    if not np.isfinite(length) or not constraints.admits(order):
        _logger.debug(_NO_TOUR)
        raise InfeasibleConstraints(_NO_TOUR)
    return Tour(order, cycle_length(order, matrix))


def _candidate_orders(n, mode):
    if mode == u'tour':
        return (((0,) + rest) for rest in itertools.permutations(range(1, n)))
    if mode == u'path':
        return itertools.permutations(range(n))
    _, w, z = mode
    inner = [v for v in range(n) if v not in (w, z)]
    return (((w,) + rest + (z,)) for rest in itertools.permutations(inner))


def brute_force(points, box, mode=u'tour', tolerance=None):
    """Enumerates every order and returns the optimum.

    Among orders within ``tolerance`` of the optimum the first in
    lexicographic order is returned, matching the Held-Karp tie-break.

    Args:
      points (sequence): at most ten points
      box (:class:`tsplab.tsp.geometry.Box`): the metric
      mode: ``'tour'``, ``'path'`` or ``('path_fixed', w, z)``
      tolerance (float): the tie slack, defaults to the solver tolerance

    Returns:
      tuple(float, tuple[int]): the optimal length and its order

    Raises:
      SolverLimitExceeded: if there are more than ten points
    """
    matrix = geometry.pairwise_distances(points, points, box)
    n = matrix.shape[0]
    _check_size(n, BRUTE_FORCE_MAX)
    if n == 0:
        return 0.0, ()
    closed = mode == u'tour'
    if closed and n == 2:
        return float(2 * matrix[0, 1]), (0, 1)
    orders, lengths = [], []
    candidates = _candidate_orders(n, mode)
    while True:
        chunk = list(itertools.islice(candidates, _BRUTE_CHUNK))
        if not chunk:
            break
        block = np.array(chunk, dtype=np.int64).reshape(len(chunk), -1)
        steps = matrix[block[:, :-1], block[:, 1:]].sum(axis=1)
        if closed:
            steps = steps + matrix[block[:, -1], block[:, 0]]
        orders.append(block)
        lengths.append(steps)
    orders = np.vstack(orders)
    lengths = np.concatenate(lengths)
    best = float(lengths.min())
    slack = tolerance
    if slack is None:
        slack = SolverOptions.DEFAULT_TOLERANCE * max(1.0, abs(best))
    first = int(np.flatnonzero(lengths <= best + slack)[0])
    return best, tuple(int(v) for v in orders[first])
