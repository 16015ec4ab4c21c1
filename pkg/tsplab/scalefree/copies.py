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

"""copies finds isolated approximate copies of a gadget in an instance.

The box is cut into cells of side about ``cell_factor * d * R`` and the
cells are coloured by their index modulo 3 along every axis. Only cells of
the first colour, whose indices are all multiples of 3, are searched, and
each of them holds at most one copy.

"""

from __future__ import absolute_import, division

import collections
import logging

import numpy as np
from scipy.spatial import cKDTree

from tsplab.config import AnalysisOptions
from tsplab.tsp import geometry
from tsplab.tsp.instance import gen_uniform

_logger = logging.getLogger(__name__)

_CELLS_TOO_LARGE = (u'cells of side %.6g do not fit a box of side %.6g; '
                    u'lower R or the cell factor')
_EMPTY_GADGET = u'the gadget should hold at least one point'


class AlignedCopy(
        collections.namedtuple(
            u'AlignedCopy',
            [u'center',
             u'matching',
             u'cell'])):
    """An isolated copy found inside a first-colour cell.

    Attributes:
        center (tuple[float]): the translation placing the gadget on the copy
        matching (:class:`tsplab.tsp.geometry.Matching`): gadget index to
          instance index
        cell (tuple[int]): the cell holding the copy
    """
    # pylint: disable=too-few-public-methods

    @property
    def member_indices(self):
        """The instance positions of the copy, in gadget order."""
        return tuple(j for _, j in self.matching.pairs)


def cell_layout(box, R, options=None):
    """The cells per axis and their side for protection radius ``R``.

    Raises:
      ValueError: if a single cell would not fit the box
    """
    options = options or AnalysisOptions()
    target = options.cell_factor * box.d * R
    if not target < box.t:
        _logger.error(_CELLS_TOO_LARGE, target, box.t)
        raise ValueError(_CELLS_TOO_LARGE % (target, box.t))
    per_axis = int(box.t // target)
    return per_axis, box.t / per_axis


def _tree(points, box):
    if box.is_torus:
        return cKDTree(box.reduce(points), boxsize=box.t)
    return cKDTree(points)


def _cells_of(points, side, per_axis):
    cells = np.floor(points / side).astype(int)
    return np.clip(cells, 0, per_axis - 1)


def _isolated(tree, points, members, R, box):
    members = set(members)
    near = set()
    for found in tree.query_ball_point(points[sorted(members)], R):
        near.update(found)
    others = sorted(near - members)
    if not others:
        return True
    gaps = geometry.pairwise_distances(points[others],
                                       points[sorted(members)], box)
    return bool(gaps.min() >= R)


def _match_at(tree, points, targets, eps, box):
    """Matches ``targets`` to instance points within eps, or None.

    Any extra point inside an eps-ball breaks isolation anyway as long as
    ``2 eps < R``, so only exact-size candidate sets are matched.
    """
    query = box.reduce(targets) if box.is_torus else targets
    candidates = set()
    for found in tree.query_ball_point(query, eps):
        if not found:
            return None
        candidates.update(found)
    candidates = sorted(candidates)
    if len(candidates) != len(targets):
        return None
    found = geometry.approx_match(query, points[candidates], eps, box)
    if found is None:
        return None
    pairs = tuple((i, candidates[j]) for i, j in found.pairs)
    return geometry.Matching(pairs, found.max_displacement)


def find_aligned_copies(inst, gadget_points, eps, R, options=None):
    """Finds the aligned, R-isolated eps-copies of a gadget.

    Every instance point of a first-colour cell is tried as the image of the
    gadget's first point; the rest of the translate is matched within eps.
    A match counts when all its points lie in the anchor's cell and no other
    instance point comes within ``R`` of it. Among the copies of one cell
    the one with the lexicographically least sorted index set is kept.

    Args:
      inst (:class:`tsplab.tsp.instance.Instance`): the instance
      gadget_points (sequence): the gadget, relative to its anchor
      eps (float): the matching tolerance, below ``R / 2``
      R (float): the isolation radius
      options (:class:`tsplab.config.AnalysisOptions`): the cell factor

    Returns:
      list[:class:`AlignedCopy`]: one per cell holding a copy, in cell order

    Raises:
      ValueError: if the cells do not fit the box or the gadget is empty
    """
    box = inst.box
    shape = geometry.as_points(gadget_points, box)
    if not len(shape):
        raise ValueError(_EMPTY_GADGET)
    if not 0 < eps < R / 2.0:
        raise ValueError(u'eps should lie in (0, R / 2)')
    per_axis, side = cell_layout(box, R, options)
    points = box.reduce(inst.points) if box.is_torus else inst.points
    if not len(points):
        return []
    tree = _tree(points, box)
    cells = _cells_of(points, side, per_axis)
    first_colour = np.flatnonzero(np.all(cells % 3 == 0, axis=1))
    chosen = {}
    for a in first_colour:
        cell = tuple(int(c) for c in cells[a])
        offset = points[a] - shape[0]
        matching = _match_at(tree, points, shape + offset, eps, box)
        if matching is None:
            continue
        members = [j for _, j in matching.pairs]
        if not np.all(cells[members] == cells[a]):
            continue
        if not _isolated(tree, points, members, R, box):
            continue
        key = tuple(sorted(members))
        best = chosen.get(cell)
        if best is not None and best[0] <= key:
            continue
        moved = geometry.displacement(shape + offset, points[members], box)
        center = offset + moved.mean(axis=0)
        if box.is_torus:
            center = box.reduce(center[None, :])[0]
        chosen[cell] = (key, AlignedCopy(tuple(center.tolist()), matching,
                                         cell))
    copies = [chosen[cell][1] for cell in sorted(chosen)]
    _logger.debug(u'found %d aligned copies in %d first-colour cells',
                  len(copies), int(np.ceil(per_axis / 3.0)) ** box.d)
    return copies


def copy_density(n, seeds, gadget_points, eps, R, d=2, options=None):
    """The aligned copy count per point on uniform instances.

    Returns:
      list[float]: ``copies / n`` for every seed, in seed order
    """
    densities = []
    for seed in seeds:
        inst = gen_uniform(n, d, seed=seed)
        found = find_aligned_copies(inst, gadget_points, eps, R, options)
        densities.append(len(found) / float(n))
    return densities


def relative_spread(values):
    """How far the largest value exceeds the smallest, relative to it.

    Returns:
      float: ``max / min - 1``, infinite when the smallest value is 0
    """
    values = np.asarray(values, dtype=float)
    if not len(values):
        raise ValueError(u'values should not be empty')
    low = values.min()
    if low <= 0:
        return float(u'inf')
    return float(values.max() / low - 1.0)
