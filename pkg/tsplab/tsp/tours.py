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

"""tours provides the value types exchanged by solvers and heuristics.

- :class:`Tour` is a cyclic order with its length
- :class:`PathSeq` is an open order, optionally flagged as a full cycle
- :class:`EdgeConstraints` holds the forced and forbidden edge sets of a
  branch-and-bound node and knows how to validate, propagate and contract them

"""

from __future__ import absolute_import

import collections
import logging

import numpy as np
from networkx.utils import UnionFind

_logger = logging.getLogger(__name__)

_FORCED_AND_FORBIDDEN = u'edge %s cannot be both forced and forbidden'
_DEGREE_EXCEEDED = u'vertex %d has more than two forced edges'
_SHORT_CYCLE = u'forced edges close a cycle on %d of %d vertices'
_TOO_FEW_EDGES = u'vertex %d has fewer than two allowed edges'


class InfeasibleConstraints(ValueError):
    pass


def edge(i, j):
    """Normalizes an undirected edge to ``(min, max)``."""
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


def cycle_edges(order):
    """The normalized edges of the cycle visiting ``order``."""
    m = len(order)
    if m < 2:
        return frozenset()
    return frozenset(edge(order[k], order[(k + 1) % m]) for k in range(m)
                     if order[k] != order[(k + 1) % m])


def path_edges(order):
    return frozenset(edge(a, b) for a, b in zip(order, order[1:]))


def cycle_length(order, matrix):
    """The length of the closed tour ``order`` under a distance matrix."""
    if len(order) < 2:
        return 0.0
    idx = np.asarray(order)
    return float(matrix[idx, np.roll(idx, -1)].sum())


def path_length(order, matrix):
    if len(order) < 2:
        return 0.0
    idx = np.asarray(order)
    return float(matrix[idx[:-1], idx[1:]].sum())


class Tour(collections.namedtuple(u'Tour', [u'order', u'length', u'meta'])):
    """A Hamiltonian cycle.

    Attributes:
        order (tuple[int]): each position of the instance exactly once
        length (float): the sum of the consecutive distances, closing edge
          included
        meta (dict): optional construction details
    """
    # pylint: disable=too-few-public-methods

    def __new__(cls, order, length, meta=None):
        return super(cls, Tour).__new__(
            cls, tuple(int(i) for i in order), float(length), meta)

    def edges(self):
        return cycle_edges(self.order)

    def is_valid(self, n):
        return sorted(self.order) == list(range(n))


def make_tour(order, matrix, meta=None):
    """Builds a :class:`Tour`, rotated to start at position 0 when present."""
    order = [int(i) for i in order]
    if 0 in order:
        start = order.index(0)
        order = order[start:] + order[:start]
    return Tour(order, cycle_length(order, matrix), meta)


class PathSeq(collections.namedtuple(u'PathSeq', [u'order', u'full'])):
    """An open sequence of positions.

    Attributes:
        order (tuple[int]): the visiting order
        full (bool): the sequence is a whole tour opened at an arbitrary edge
    """
    # pylint: disable=too-few-public-methods

    def __new__(cls, order, full=False):
        return super(cls, PathSeq).__new__(
            cls, tuple(int(i) for i in order), bool(full))

    @property
    def endpoints(self):
        return (self.order[0], self.order[-1])

    def same_as(self, other):
        """Equality up to reversal."""
        other = tuple(other.order if isinstance(other, PathSeq) else other)
        return self.order == other or self.order == other[::-1]


class EdgeConstraints(
        collections.namedtuple(
            u'EdgeConstraints',
            [u'forced',
             u'forbidden'])):
    """The forced edge set I and forbidden edge set O of a tour search.

    Attributes:
        forced (frozenset[tuple[int, int]]): edges every tour must use
        forbidden (frozenset[tuple[int, int]]): edges no tour may use
    """
    # pylint: disable=too-few-public-methods

    def __new__(cls, forced=(), forbidden=()):
        forced = frozenset(edge(*e) for e in forced)
        forbidden = frozenset(edge(*e) for e in forbidden)
        both = forced & forbidden
        if both:
            message = _FORCED_AND_FORBIDDEN % (sorted(both)[0],)
            _logger.error(message)
            raise InfeasibleConstraints(message)
        return super(cls, EdgeConstraints).__new__(cls, forced, forbidden)

    @property
    def is_empty(self):
        return not self.forced and not self.forbidden

    def with_forced(self, e):
        return EdgeConstraints(self.forced | {edge(*e)}, self.forbidden)

    def with_forbidden(self, e):
        return EdgeConstraints(self.forced, self.forbidden | {edge(*e)})

    def is_decided(self, e):
        e = edge(*e)
        return e in self.forced or e in self.forbidden

    def admits(self, order):
        """Tests whether the closed tour ``order`` honours the constraints."""
        edges = cycle_edges(order)
        return self.forced <= edges and not (self.forbidden & edges)

    def validate(self, n):
        """Checks the constraints admit a tour on ``n`` vertices structurally.

        Raises:
          InfeasibleConstraints: on a vertex of forced degree 3, a forced cycle
            shorter than ``n``, or a vertex with fewer than two allowed edges
        """
        _check_structure(n, self.forced, self.forbidden)
        return self

    def chains(self, n):
        """Splits ``0..n-1`` into the paths formed by forced edges.

        Returns:
          list[tuple[int]]: every chain listed from its smaller end, chains
            ordered by smallest member; single vertices are chains of one. A
            forced Hamiltonian cycle is returned as one chain starting at 0.
        """
        self.validate(n)
        neighbours = collections.defaultdict(list)
        for a, b in sorted(self.forced):
            neighbours[a].append(b)
            neighbours[b].append(a)
        if len(self.forced) == n and n >= 3:
            return [tuple(_walk(0, neighbours))]
        seen = set()
        chains = []
        for v in range(n):
            if v in seen or len(neighbours[v]) == 2:
                continue
            chain = _walk(v, neighbours)
            if chain[-1] < chain[0]:
                chain.reverse()
            seen.update(chain)
            chains.append(tuple(chain))
        chains.sort(key=min)
        return chains

    def propagate(self, n):
        """Adds every decision implied by vertex degrees.

        A vertex with two forced edges forbids its other edges; a vertex with
        exactly two allowed edges forces both; an edge closing a forced path
        early is forbidden. Applied until nothing changes.

        Returns:
          :class:`EdgeConstraints`: the implied constraints (same tour set)

        Raises:
          InfeasibleConstraints: if the implications contradict each other
        """
        forced = set(self.forced)
        forbidden = set(self.forbidden)
        changed = True
        while changed:
            changed = False
            _check_structure(n, forced, forbidden)
            forced_degree = np.zeros(n, dtype=int)
            for a, b in forced:
                forced_degree[a] += 1
                forced_degree[b] += 1
            for v in range(n):
                incident = [edge(v, u) for u in range(n) if u != v]
                allowed = [e for e in incident if e not in forbidden]
                if forced_degree[v] == 2:
                    extra = [e for e in allowed if e not in forced]
                    if extra:
                        forbidden.update(extra)
                        changed = True
                elif len(allowed) == 2 and n > 2:
                    missing = [e for e in allowed if e not in forced]
                    if missing:
                        forced.update(missing)
                        changed = True
                        break
            if changed:
                continue
            if len(forced) < n - 1:
                closing = _premature_closures(n, forced) - forbidden
                if closing:
                    forbidden.update(closing)
                    changed = True
        return EdgeConstraints(forced, forbidden)


def _walk(start, neighbours):
    chain = [start]
    previous = None
    current = start
    while True:
        nexts = [u for u in neighbours[current] if u != previous]
        if not nexts or nexts[0] == start:
            return chain
        previous, current = current, nexts[0]
        chain.append(current)


def _premature_closures(n, forced):
    # edges joining the two ends of a forced path shorter than n
    uf = UnionFind(range(n))
    for a, b in forced:
        uf.union(a, b)
    degree = collections.Counter()
    for a, b in forced:
        degree[a] += 1
        degree[b] += 1
    ends = collections.defaultdict(list)
    for v in range(n):
        if degree[v] == 1:
            ends[uf[v]].append(v)
    return {edge(*pair) for pair in ends.values() if len(pair) == 2}


def _check_structure(n, forced, forbidden):
    if forced & forbidden:
        message = _FORCED_AND_FORBIDDEN % (sorted(forced & forbidden)[0],)
        _logger.debug(message)
        raise InfeasibleConstraints(message)
    degree = collections.Counter()
    for a, b in forced:
        degree[a] += 1
        degree[b] += 1
    for v, count in degree.items():
        if count > 2:
            _logger.debug(_DEGREE_EXCEEDED, v)
            raise InfeasibleConstraints(_DEGREE_EXCEEDED % (v,))
    uf = UnionFind(range(n))
    for a, b in sorted(forced):
        if uf[a] == uf[b]:
            size = sum(1 for v in range(n) if uf[v] == uf[a])
            if size < n:
                _logger.debug(_SHORT_CYCLE, size, n)
                raise InfeasibleConstraints(_SHORT_CYCLE % (size, n))
        uf.union(a, b)
    if n >= 3:
        blocked = collections.Counter()
        for a, b in forbidden:
            blocked[a] += 1
            blocked[b] += 1
        for v, count in blocked.items():
            if n - 1 - count < 2:
                _logger.debug(_TOO_FEW_EDGES, v)
                raise InfeasibleConstraints(_TOO_FEW_EDGES % (v,))
