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

"""bnb provides a breadth-first branch-and-bound for the tour problem.

Each node carries a bound and the forced and forbidden edge sets I and O; a
node is branched on an undecided edge ``e`` into a child forcing ``e`` and a
child forbidding it, so the children split the parent's tours exactly.

Levels are processed behind a barrier: no node of level ``k + 1`` is looked
at before every node of level ``k`` has been pruned, evaluated or branched.
A node is pruned when its bound reaches the incumbent ``B`` (less a
tolerance) or its constraints admit no tour; a node whose forced edges form a
tour is a leaf and is evaluated directly.

- :func:`exact_bound` and :func:`tsplab.tsp.one_tree.hk_one_tree_bound` are
  the node bounds
- :class:`BranchRule` chooses the branching edge
- :func:`run_bfs_bnb` runs the search and returns :class:`BnBStats`

"""

from __future__ import absolute_import, division

import collections
import logging
from enum import Enum

import numpy as np

from tsplab.config import BnBOptions, SolverOptions

from . import exact, geometry
from .heuristics import HeuristicStuck, Heuristics, run_constrained
from .one_tree import nearest_neighbour_length, one_tree_ascent
from .tours import (EdgeConstraints, InfeasibleConstraints, Tour, cycle_length,
                    edge)

_logger = logging.getLogger(__name__)

_TOO_SMALL = u'branch-and-bound needs at least 4 points, got %d'
_NO_UNDECIDED = u'every edge of the node is decided'
_BAD_INCUMBENT = u'incumbent should be heur, exact or fixed:B, got %r'
_UNKNOWN_NAME = u'unknown %s %r'

CERTIFIED = u'certified'
NODE_CAP = u'node_cap'
LEVEL_CAP = u'level_cap'


class NoUndecidedEdge(Exception):
    pass


def _from_name(cls, name, what):
    for member in cls:
        if member.value == name:
            return member
    _logger.error(_UNKNOWN_NAME, what, name)
    raise ValueError(_UNKNOWN_NAME % (what, name))


class BoundKind(Enum):
    """Enumerates the node bounds."""
    ONE_TREE = u'onetree'
    EXACT = u'exact'

    @classmethod
    def from_name(cls, name):
        return _from_name(cls, name, u'bound')


class Incumbent(collections.namedtuple(u'Incumbent', [u'mode', u'value'])):
    """How the incumbent ``B`` is obtained.

    Attributes:
        mode (str): ``heur`` runs the heuristic at every node, ``exact``
          starts from the optimum, ``fixed`` keeps ``value`` throughout
        value (float): the fixed incumbent, for ``fixed`` only
    """
    # pylint: disable=too-few-public-methods
    HEURISTIC = u'heur'
    EXACT = u'exact'
    FIXED = u'fixed'

    def __new__(cls, mode=HEURISTIC, value=None):
        if mode not in (cls.HEURISTIC, cls.EXACT, cls.FIXED):
            _logger.error(_BAD_INCUMBENT, mode)
            raise ValueError(_BAD_INCUMBENT % (mode,))
        if mode == cls.FIXED and value is None:
            raise ValueError(_BAD_INCUMBENT % (mode,))
        return super(cls, Incumbent).__new__(
            cls, mode, None if value is None else float(value))

    @classmethod
    def parse(cls, text):
        """Reads ``heur``, ``exact`` or ``fixed:B``."""
        if isinstance(text, Incumbent):
            return text
        if text.startswith(cls.FIXED + u':'):
            try:
                return cls(cls.FIXED, float(text.split(u':', 1)[1]))
            except ValueError:
                _logger.error(_BAD_INCUMBENT, text)
                raise ValueError(_BAD_INCUMBENT % (text,))
        return cls(text)

    @property
    def is_fixed(self):
        return self.mode == self.FIXED


class BnBNode(
        collections.namedtuple(
            u'BnBNode',
            [u'bound',
             u'constraints',
             u'depth',
             u'parent',
             u'node_id',
             u'multipliers'])):
    """One node of the search tree.

    Attributes:
        bound (float): ``b_v``, the parent's bound until evaluated
        constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): I and O
        depth (int): the level
        parent (int): the parent's ``node_id``; None at the root
        node_id (int): the creation number
        multipliers: the parent's 1-tree multipliers, used as a warm start
    """
    # pylint: disable=too-few-public-methods


class LevelStats(
        collections.namedtuple(
            u'LevelStats',
            [u'level',
             u'open',
             u'expanded',
             u'pruned',
             u'leaves',
             u'infeasible',
             u'mean_gap',
             u'incumbent'])):
    """The counts of one level.

    Attributes:
        level (int): the depth
        open (int): nodes produced at this level
        expanded (int): nodes branched
        pruned (int): nodes pruned by bound or infeasibility
        leaves (int): fully constrained nodes evaluated directly
        infeasible (int): the pruned nodes whose constraints admit no tour
        mean_gap (float): mean of ``H(v) - b_v`` over nodes where the
          heuristic ran, or None
        incumbent (float): ``B`` when the level was finished
    """
    # pylint: disable=too-few-public-methods


class BnBStats(
        collections.namedtuple(
            u'BnBStats',
            [u'levels',
             u'termination',
             u'history',
             u'trace',
             u'node_count'])):
    """The measurements of one run.

    Attributes:
        levels (tuple[:class:`LevelStats`]): per level
        termination (str): ``certified``, ``node_cap`` or ``level_cap``
        history (tuple[tuple[int, float]]): ``(node_count, B)`` each time the
          incumbent improved, starting with the initial value
        trace (tuple[int]): the depth of every node in evaluation order
        node_count (int): the nodes evaluated
    """
    # pylint: disable=too-few-public-methods

    @property
    def certified(self):
        return self.termination == CERTIFIED

    def open_counts(self):
        return [s.open for s in self.levels]

    def growth_ratios(self):
        """``open(k + 1) / open(k)`` for consecutive levels."""
        counts = self.open_counts()
        return [b / a for a, b in zip(counts, counts[1:]) if a]

    def as_rows(self):
        """The rows of the per-level CSV."""
        return [{u'level': s.level, u'expanded': s.expanded,
                 u'pruned': s.pruned, u'open': s.open,
                 u'incumbent': s.incumbent} for s in self.levels]


def _undecided(n, constraints):
    for i in range(n):
        for j in range(i + 1, n):
            if not constraints.is_decided((i, j)):
                yield (i, j)


def _lexicographic(node, context):
    for e in _undecided(context.n, node.constraints):
        return e
    raise NoUndecidedEdge(_NO_UNDECIDED)


def _longest(node, context):
    tour = context.node_tour or context.best_tour
    if tour is not None:
        candidates = [e for e in tour.edges()
                      if not node.constraints.is_decided(e)]
        if candidates:
            return min(candidates,
                       key=lambda e: (-context.matrix[e[0], e[1]], e))
    return _lexicographic(node, context)


def _most_fractional(node, context):
    fractional = context.fractional
    if fractional is None:
        fractional = one_tree_ascent(
            context.matrix, node.constraints, context.options,
            target=context.target).fractional
    best = None
    for e in _undecided(context.n, node.constraints):
        key = (abs(fractional[e[0], e[1]] - 0.5), e)
        if best is None or key < best:
            best = key
    if best is None:
        raise NoUndecidedEdge(_NO_UNDECIDED)
    return best[1]


class BranchRule(Enum):
    """Enumerates the branching rules."""
    FRACTIONAL = (u'frac', _most_fractional)
    LONGEST = (u'long', _longest)
    LEXICOGRAPHIC = (u'lex', _lexicographic)

    def __init__(self, label, choose_func):
        self.label = label
        self.choose_func = choose_func

    def choose(self, node, context):
        """Picks the edge to branch ``node`` on.

        Raises:
          NoUndecidedEdge: if every edge is decided
        """
        return self.choose_func(node, context)

    @classmethod
    def from_name(cls, name):
        for rule in cls:
            if rule.label == name:
                return rule
        _logger.error(_UNKNOWN_NAME, u'branch rule', name)
        raise ValueError(_UNKNOWN_NAME % (u'branch rule', name))


class _Context(object):
    """What a branch rule may look at while a node is evaluated."""
    # pylint: disable=too-few-public-methods,too-many-instance-attributes

    def __init__(self, n, matrix, options, target):
        self.n = n
        self.matrix = matrix
        self.options = options
        self.target = target
        self.best_tour = None
        self.node_tour = None
        self.fractional = None


def exact_bound(points, box, constraints=None, options=None):
    """The exact optimum over the tours honouring the constraints.

    Args:
      points (sequence): at most ``options.n_max`` points
      box (:class:`tsplab.tsp.geometry.Box`): the metric
      constraints (:class:`tsplab.tsp.tours.EdgeConstraints`): I and O
      options (:class:`tsplab.config.SolverOptions`): solver limits

    Returns:
      float: ``lambda(v)``, ``inf`` when no tour honours the constraints

    Raises:
      SolverLimitExceeded: if there are too many points
    """
    matrix = geometry.pairwise_distances(points, points, box)
    return _exact_node(matrix, constraints or EdgeConstraints(), options)[0]


def _exact_node(matrix, constraints, options):
    try:
        tour = exact.constrained_tour(matrix, constraints, options)
    except InfeasibleConstraints:
        return float(u'inf'), None
    return tour.length, tour


def _forced_tour(n, constraints, matrix):
    if len(constraints.forced) != n:
        return None
    order = constraints.chains(n)[0]
    return Tour(order, cycle_length(order, matrix))


def run_bfs_bnb(inst, heuristic=Heuristics.NN, bound=BoundKind.ONE_TREE,
                incumbent=None, rule=BranchRule.LEXICOGRAPHIC, options=None,
                solver_options=None):
    """Runs breadth-first branch-and-bound on ``inst``.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): at least 4 points
      heuristic (:class:`tsplab.tsp.heuristics.Heuristics`): the heuristic
        giving ``H(v)`` under ``heur`` incumbents
      bound (:class:`BoundKind`): the node bound
      incumbent (:class:`Incumbent`): how ``B`` is obtained; defaults to
        ``heur``
      rule (:class:`BranchRule`): the branching rule
      options (:class:`tsplab.config.BnBOptions`): caps and ascent settings
      solver_options (:class:`tsplab.config.SolverOptions`): exact limits

    Returns:
      tuple(:class:`BnBStats`, :class:`tsplab.tsp.tours.Tour`): the stats and
        the best tour found, which is None when no tour beat a fixed ``B``

    Raises:
      ValueError: if there are fewer than 4 points
    """
    # pylint: disable=too-many-locals,too-many-branches,too-many-statements
    n = inst.n
    if n < 4:
        _logger.error(_TOO_SMALL, n)
        raise ValueError(_TOO_SMALL % (n,))
    options = options or BnBOptions()
    heuristic = heuristic if isinstance(heuristic, Heuristics) \
        else Heuristics.from_name(heuristic)
    bound = bound if isinstance(bound, BoundKind) \
        else BoundKind.from_name(bound)
    rule = rule if isinstance(rule, BranchRule) else BranchRule.from_name(rule)
    incumbent = Incumbent.parse(incumbent or Incumbent.HEURISTIC)
    matrix = inst.distance_matrix()
    context = _Context(n, matrix, options, nearest_neighbour_length(matrix))
    tol = options.prune_tolerance

    best_tour = None
    if incumbent.mode == Incumbent.EXACT:
        order, length = exact.solve_tour_matrix(matrix, solver_options)
        best_tour = Tour(order, length)
        upper = length
    elif incumbent.mode == Incumbent.HEURISTIC:
        best_tour = heuristic.build(inst)
        upper = best_tour.length
    else:
        upper = incumbent.value
    context.best_tour = best_tour
    record = _Record(best_tour, upper, incumbent.is_fixed)
    frontier = [BnBNode(-np.inf, EdgeConstraints(), 0, None, 0, None)]
    created = 1
    levels = []
    trace = []
    node_count = 0
    termination = CERTIFIED
    while frontier:
        level = frontier[0].depth
        if level > options.level_cap:
            termination = LEVEL_CAP
            break
        children = []
        expanded = pruned = leaves = infeasible = 0
        gaps = []
        for node in frontier:
            if node_count >= options.node_cap:
                termination = NODE_CAP
                break
            node_count += 1
            trace.append(node.depth)
            context.node_tour = None
            context.fractional = None
            try:
                constraints = node.constraints.propagate(n)
            except InfeasibleConstraints:
                pruned += 1
                infeasible += 1
                continue
            leaf = _forced_tour(n, constraints, matrix)
            if leaf is not None:
                leaves += 1
                record.offer(leaf, node_count)
                context.best_tour = record.best
                continue

            multipliers = None
            if bound is BoundKind.EXACT:
                value, _ = _exact_node(matrix, constraints, solver_options)
            else:
                ascent = one_tree_ascent(
                    matrix, constraints, options, target=context.target,
                    upper_bound=record.upper,
                    multipliers=node.multipliers)
                value = ascent.bound
                multipliers = ascent.multipliers
                context.fractional = ascent.fractional
            if not np.isfinite(value):
                pruned += 1
                infeasible += 1
                continue

            if incumbent.mode == Incumbent.HEURISTIC:
                try:
                    found = run_constrained(heuristic, inst, constraints)
                except (HeuristicStuck, InfeasibleConstraints):
                    found = None
                if found is not None:
                    gaps.append(found.length - value)
                    context.node_tour = found
                    record.offer(found, node_count)
                    context.best_tour = record.best

            if value >= record.upper - tol:
                pruned += 1
                continue
            try:
                e = rule.choose(node._replace(constraints=constraints),
                                context)
            except NoUndecidedEdge:
                leaves += 1
                continue
            expanded += 1
            for child in (constraints.with_forced(e),
                          constraints.with_forbidden(e)):
                children.append(BnBNode(value, child, node.depth + 1,
                                        node.node_id, created, multipliers))
                created += 1
        levels.append(LevelStats(
            level, len(frontier), expanded, pruned, leaves, infeasible,
            float(np.mean(gaps)) if gaps else None, record.upper))
        _logger.debug(u'level %d: open %d expanded %d pruned %d', level,
                      len(frontier), expanded, pruned)
        if termination != CERTIFIED:
            break
        frontier = children

    stats = BnBStats(tuple(levels), termination, tuple(record.history),
                     tuple(trace), node_count)
    _logger.info(u'branch-and-bound %s after %d nodes, B = %.9g',
                 termination, node_count, record.upper)
    return stats, record.best


class _Record(object):
    """Tracks the best tour and the incumbent; B only ever decreases."""
    # pylint: disable=too-few-public-methods

    def __init__(self, best, upper, fixed):
        self.best = best
        self.upper = upper
        self.fixed = fixed
        self.history = [(0, upper)]

    def offer(self, tour, node_count):
        if self.best is None or tour.length < self.best.length:
            self.best = tour
        if not self.fixed and tour.length < self.upper:
            self.upper = tour.length
            self.history.append((node_count, tour.length))
