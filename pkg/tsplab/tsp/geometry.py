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

"""geometry provides the metric primitives shared by every tsplab module.

Points are rows of :class:`numpy.ndarray` instances; a :class:`Box` fixes the
dimension, the side ``t`` and whether opposite faces are identified
(:attr:`Topology.TORUS`) or not (:attr:`Topology.CUBE`).

- :func:`dist`, :func:`displacement` and :func:`pairwise_distances` realise
  the metric, taking the minimum image under the torus
- :func:`approx_match` decides ``A ≈_eps B`` by bipartite assignment
- :func:`perturb` moves points uniformly inside balls
- :func:`round_point` snaps points to a binary grid
- :func:`angle` measures the angle at a vertex
- :func:`is_protected` evaluates whether a gadget shields a ball

"""

from __future__ import absolute_import, division

import collections
import logging
import math
from enum import Enum

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

_logger = logging.getLogger(__name__)

_BAD_DIMENSION = u'points have dimension %d, the box has dimension %d'
_BAD_BOX = u'a box needs d >= 1 and t > 0, got d=%r t=%r'
_DEGENERATE_ANGLE = u'angle is undefined when a ray has zero length'


class Topology(Enum):
    """Enumerates the supported identifications of the box faces."""
    # pylint: disable=too-few-public-methods
    TORUS = u'torus'
    CUBE = u'cube'


class Box(collections.namedtuple(u'Box', [u'd', u't', u'topology'])):
    """The region ``[0, t]^d`` holding the points of an instance.

    Attributes:
        d (int): the dimension
        t (float): the side length
        topology (:class:`Topology`): torus or cube
    """
    # pylint: disable=too-few-public-methods

    def __new__(cls, d, t, topology=Topology.TORUS):
        if not isinstance(topology, Topology):
            topology = Topology(topology)
        if int(d) < 1 or not float(t) > 0:
            _logger.error(_BAD_BOX, d, t)
            raise ValueError(_BAD_BOX % (d, t))
        return super(cls, Box).__new__(cls, int(d), float(t), topology)

    @property
    def is_torus(self):
        return self.topology is Topology.TORUS

    def reduce(self, points):
        """Maps points into the box, reducing coordinates mod ``t`` on a torus."""
        points = as_points(points, self)
        if not self.is_torus:
            return points
        reduced = np.mod(points, self.t)
        # mod can land exactly on t for tiny negative inputs
        reduced[reduced >= self.t] = 0.0
        return reduced


# Gadgets live in an unbounded plane. Only distances are taken there, which a
# cube box computes without looking at its side.
LOCAL_FRAME = Box(2, 1.0, Topology.CUBE)


def as_points(points, box):
    """Converts ``points`` to a float array of shape (m, box.d).

    A single point is promoted to a one-row array.

    Raises:
      ValueError: if the coordinate count does not match ``box.d``
    """
    arr = np.array(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, box.d)
    if arr.shape[-1] != box.d:
        _logger.error(_BAD_DIMENSION, arr.shape[-1], box.d)
        raise ValueError(_BAD_DIMENSION % (arr.shape[-1], box.d))
    return arr


def _as_point(point, box):
    arr = np.asarray(point, dtype=float)
    if arr.shape != (box.d,):
        _logger.error(_BAD_DIMENSION, arr.size, box.d)
        raise ValueError(_BAD_DIMENSION % (arr.size, box.d))
    return arr


def displacement(a, b, box):
    """The vector from ``a`` to ``b``, using the nearest image on a torus.

    Broadcasts over leading axes, so ``a`` and ``b`` may be point arrays.
    """
    delta = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    if box.is_torus:
        delta = delta - box.t * np.round(delta / box.t)
    return delta


def dist(a, b, box):
    """The distance between two points of ``box``.

    Args:
      a (sequence[float]): a point
      b (sequence[float]): a point
      box (:class:`Box`): the box holding them

    Returns:
      float: the Euclidean distance, minimized over the images of ``b`` when
        ``box`` is a torus

    Raises:
      ValueError: if either point does not have ``box.d`` coordinates
    """
    a = _as_point(a, box)
    b = _as_point(b, box)
    return float(np.sqrt(np.sum(displacement(a, b, box) ** 2)))


def pairwise_distances(A, B, box):
    """The matrix of distances between the rows of ``A`` and ``B``."""
    A = as_points(A, box)
    B = as_points(B, box)
    if not box.is_torus:
        return cdist(A, B)
    delta = displacement(A[:, None, :], B[None, :, :], box)
    return np.sqrt(np.sum(delta ** 2, axis=-1))


def distances_from(p, points, box):
    """The distances from point ``p`` to every row of ``points``."""
    p = _as_point(p, box)
    points = as_points(points, box)
    delta = displacement(p[None, :], points, box)
    return np.sqrt(np.sum(delta ** 2, axis=-1))


def diameter(points, box):
    """The largest pairwise distance within ``points`` (0 for fewer than 2)."""
    points = as_points(points, box)
    if len(points) < 2:
        return 0.0
    return float(pairwise_distances(points, points, box).max())


class Matching(collections.namedtuple(
        u'Matching', [u'pairs', u'max_displacement'])):
    """A bijection between two index sets with its largest displacement.

    Attributes:
        pairs (tuple[tuple[int, int]]): ``(i, j)`` pairs sorted by ``i``
        max_displacement (float): the largest distance over the pairs
    """
    # pylint: disable=too-few-public-methods

    def as_dict(self):
        return dict(self.pairs)


def approx_match(A, B, eps, box):
    """Finds a bijection ``f`` from ``A`` to ``B`` moving no point by ``eps``.

    The decision is made by a minimum-cost assignment over the displacement
    graph, so a witness is found whenever one exists; among witnesses the one
    with the least total displacement is returned.

    Args:
      A (sequence): the source points
      B (sequence): the target points
      eps (float): the strict displacement bound
      box (:class:`Box`): the box holding the points

    Returns:
      :class:`Matching`: the witness, or ``None`` when none exists or the
        sizes differ

    Raises:
      ValueError: if eps is not positive
    """
    if not eps > 0:
        raise ValueError(u'eps should be positive')
    A = as_points(A, box)
    B = as_points(B, box)
    if len(A) != len(B):
        return None
    if len(A) == 0:
        return Matching((), 0.0)
    distances = pairwise_distances(A, B, box)
    allowed = distances < eps
    if not (allowed.any(axis=0).all() and allowed.any(axis=1).all()):
        return None
    penalty = len(A) * eps + 1.0
    cost = np.where(allowed, distances, penalty)
    rows, cols = linear_sum_assignment(cost)
    if not allowed[rows, cols].all():
        return None
    pairs = tuple(sorted(zip(rows.tolist(), cols.tolist())))
    return Matching(pairs, float(distances[rows, cols].max()))


def perturb(S, delta, rng, box):
    """Moves every point to a uniform random point of its ``delta``-ball.

    Offsets are drawn by rejection from the bounding cube, so the output is
    fully determined by the state of ``rng``. On a cube the results are
    clipped into ``[0, t]``.

    Args:
      S (sequence): the points to move
      delta (float): the ball radius
      rng (:class:`numpy.random.Generator`): the source of randomness
      box (:class:`Box`): the box holding the points

    Returns:
      :class:`numpy.ndarray`: the moved points

    Raises:
      ValueError: if delta is negative
    """
    if delta < 0:
        raise ValueError(u'delta should be non-negative')
    points = as_points(S, box)
    if delta == 0 or len(points) == 0:
        return points.copy()
    offsets = np.empty_like(points)
    pending = np.arange(len(points))
    while len(pending):
        draws = rng.uniform(-1.0, 1.0, size=(len(pending), box.d))
        inside = np.sum(draws ** 2, axis=1) <= 1.0
        offsets[pending[inside]] = draws[inside]
        pending = pending[~inside]
    moved = points + delta * offsets
    if box.is_torus:
        return box.reduce(moved)
    return np.clip(moved, 0.0, box.t)


def grid_digits(eps, box):
    """The number of binary digits per coordinate needed to round within eps.

    This is ``ceil(log2(t / eps))``, plus enough extra digits to keep the
    Euclidean rounding error below eps when ``d > 4``.
    """
    if not eps > 0:
        raise ValueError(u'eps should be positive')
    digits = max(0, int(math.ceil(math.log(box.t / eps, 2))))
    if box.d > 4:
        digits += int(math.ceil(math.log(math.sqrt(box.d) / 2.0, 2)))
    return digits


def snap_to_grid(points, digits, box):
    """Snaps every coordinate to the nearest multiple of ``t / 2**digits``."""
    spacing = box.t / (2 ** digits)
    snapped = np.round(as_points(points, box) / spacing) * spacing
    if box.is_torus:
        return box.reduce(snapped)
    return snapped


def round_point(p, eps, box):
    """Rounds a point (or an array of points) to the grid for precision eps.

    Args:
      p (sequence): a point, or an array of points
      eps (float): the precision
      box (:class:`Box`): the box holding the point

    Returns:
      :class:`numpy.ndarray`: the snapped point(s), same shape as ``p``
    """
    arr = np.asarray(p, dtype=float)
    snapped = snap_to_grid(arr, grid_digits(eps, box), box)
    return snapped.reshape(arr.shape)


def angle(x, p, q, box):
    """The angle at ``p`` between the rays towards ``x`` and ``q``.

    Raises:
      ValueError: if ``x`` or ``q`` coincides with ``p``
    """
    p = _as_point(p, box)
    u = displacement(p, _as_point(x, box), box)
    v = displacement(p, _as_point(q, box), box)
    nu = float(np.sqrt(np.dot(u, u)))
    nv = float(np.sqrt(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        _logger.error(_DEGENERATE_ANGLE)
        raise ValueError(_DEGENERATE_ANGLE)
    dot = float(np.dot(u, v))
    cross = math.sqrt(max(nu * nu * nv * nv - dot * dot, 0.0))
    return math.atan2(cross, dot)


def ball_indices(points, p, radius, box):
    """The indices of the rows of ``points`` strictly within ``radius`` of p."""
    return np.flatnonzero(distances_from(p, points, box) < radius)


def is_protected(X, Y, p, R, eps, box, scale=1.0, reach=None):
    """Tests whether ``X`` is (R, eps)-protected by the gadget ``Y`` at ``p``.

    The annulus ``B(p, R) minus B(p, 1)`` must hold exactly an eps-approximate
    copy of ``Y + p`` and nothing else, and that copy must lie in
    ``B(p, sqrt(R))``. ``scale`` multiplies every radius and the gadget, so
    shrunken copies can be tested in place. A gadget that declares a larger
    extent passes it as ``reach``, which then replaces ``sqrt(R)``.

    Args:
      X (sequence): the instance points
      Y (sequence): the gadget points, relative to their anchor
      p (sequence): the anchor position
      R (float): the outer radius, greater than 1
      eps (float): the matching tolerance
      box (:class:`Box`): the box holding ``X``
      scale (float): the unit length of the gadget
      reach (float): the containment radius, ``sqrt(R)`` when omitted

    Returns:
      tuple(bool, :class:`Matching`): the verdict and, when it holds, a
        matching from gadget indices to indices of ``X``

    Raises:
      ValueError: if R <= 1 or eps <= 0
    """
    if not R > 1:
        raise ValueError(u'R should exceed 1')
    if not eps > 0:
        raise ValueError(u'eps should be positive')
    X = as_points(X, box)
    Y = as_points(Y, box)
    p = _as_point(p, box)
    radii = distances_from(p, X, box)
    annulus = np.flatnonzero((radii >= scale) & (radii < R * scale))
    reach = math.sqrt(R) if reach is None else reach
    if np.any(radii[annulus] >= reach * scale):
        return False, None
    targets = p + scale * Y
    if box.is_torus:
        targets = box.reduce(targets)
    found = approx_match(targets, X[annulus], eps, box)
    if found is None:
        return False, None
    pairs = tuple((i, int(annulus[j])) for i, j in found.pairs)
    return True, Matching(pairs, found.max_displacement)
