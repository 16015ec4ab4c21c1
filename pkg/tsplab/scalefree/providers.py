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

"""providers supplies the hard-core point sets carried by the Q gadget.

A provider is a small point set with two marked apexes ``p`` and ``q`` whose
shortest Hamilton path is known to run from ``p`` to ``q``. It stands in for
a set-cover instance: the answer is read off by comparing the path length
with a threshold. Every provider is certified at construction:

- its shortest Hamilton path on all of its points has the endpoints ``p``
  and ``q``
- its ``p`` to ``q`` path length is below the threshold or above the
  threshold plus ``eps0``
- every other point lies inside the rhombus spanned by ``p`` and ``q`` at
  depth ``eps0`` or more

"""

from __future__ import absolute_import, division

import collections
import logging
import math

import numpy as np

from tsplab.tsp import exact
from tsplab.tsp.geometry import LOCAL_FRAME

_logger = logging.getLogger(__name__)

YES = u'yes'
NO = u'no'
SINGLE = u'single'
VARIANTS = (YES, NO, SINGLE)

DEFAULT_EPS0 = 0.02

_P = (-1.0, 0.0)
_Q = (1.0, 0.0)
_RHOMBUS = ((-1.0, 0.0), (0.0, 0.5), (1.0, 0.0), (0.0, -0.5))
_INNER_X = (-2.0 / 3, -1.0 / 3, 0.0, 1.0 / 3, 2.0 / 3)
_ZIGZAG = 0.1

_UNKNOWN_VARIANT = u'unknown provider variant %s'
_BAD_ENDPOINTS = u'provider %s: shortest path ends at %s, not at p and q'
_BAD_GAP = u'provider %s: path length %.6f is within eps0 above threshold %.6f'
_TOO_SHALLOW = u'provider %s: a point lies %.6f inside the rhombus, below eps0'


class GadgetError(ValueError):
    pass


def _log_and_raise(exception_class, message):
    _logger.error(message)
    raise exception_class(message)


class HardCoreProvider(
        collections.namedtuple(
            u'HardCoreProvider',
            [u'name',
             u'variant',
             u'points',
             u'p_index',
             u'q_index',
             u'rhombus',
             u'threshold',
             u'eps0',
             u'path_length'])):
    """A certified hard-core point set.

    Attributes:
        name (str): identifies the configuration
        variant (str): one of ``yes``, ``no`` or ``single``
        points (:class:`numpy.ndarray`): ``p`` first, then the inner points,
          then ``q``
        p_index (int): the position of ``p``
        q_index (int): the position of ``q``
        rhombus (tuple): the four rhombus vertices, ``p`` and ``q`` included
        threshold (float): the yes/no threshold L
        eps0 (float): the guaranteed gap
        path_length (float): the shortest ``p`` to ``q`` Hamilton path length
    """
    # pylint: disable=too-few-public-methods

    @property
    def inner_indices(self):
        return [i for i in range(len(self.points))
                if i not in (self.p_index, self.q_index)]

    @property
    def is_yes(self):
        return self.path_length < self.threshold


def example_eps0(a=20):
    """Evaluates the sample gap ``(sqrt(a**2 + 1) - a) / (100 (4a**2 + 2a))``."""
    a = float(a)
    return (math.sqrt(a * a + 1.0) - a) / (100.0 * (4.0 * a * a + 2.0 * a))


def _inner_points(variant):
    if variant == YES:
        return [(x, 0.0) for x in _INNER_X]
    if variant == NO:
        return [(x, _ZIGZAG if number % 2 == 0 else -_ZIGZAG)
                for number, x in enumerate(_INNER_X)]
    return [(0.0, 0.0)]


def _layout(variant):
    return np.array([_P] + _inner_points(variant) + [_Q], dtype=float)


def _fixed_path_length(points):
    _, length = exact.held_karp_path(points, LOCAL_FRAME,
                                     endpoints=(0, len(points) - 1))
    return length


def rhombus_depth(point, rhombus):
    """The signed distance from ``point`` to the boundary of a rhombus.

    Positive inside, negative outside.
    """
    corners = np.asarray(rhombus, dtype=float)
    centre = corners.mean(axis=0)
    point = np.asarray(point, dtype=float)
    depth = np.inf
    for a, b in zip(corners, np.roll(corners, -1, axis=0)):
        direction = b - a
        normal = np.array([-direction[1], direction[0]])
        normal /= np.sqrt(np.dot(normal, normal))
        if np.dot(normal, centre - a) < 0:
            normal = -normal
        depth = min(depth, float(np.dot(normal, point - a)))
    return depth


def closest_rhombus_point(point, rhombus):
    """The point of the (filled) rhombus closest to ``point``."""
    point = np.asarray(point, dtype=float)
    if rhombus_depth(point, rhombus) >= 0:
        return point
    corners = np.asarray(rhombus, dtype=float)
    best, best_distance = None, np.inf
    for a, b in zip(corners, np.roll(corners, -1, axis=0)):
        direction = b - a
        s = np.clip(np.dot(point - a, direction) / np.dot(direction, direction),
                    0.0, 1.0)
        candidate = a + s * direction
        gap = float(np.sqrt(np.sum((point - candidate) ** 2)))
        if gap < best_distance:
            best, best_distance = candidate, gap
    return best


def certify(provider):
    """Checks the three provider properties by exact solving.

    Raises:
      GadgetError: naming the first property that fails
    """
    points = provider.points
    _, order = exact.brute_force(points, LOCAL_FRAME, mode=u'path')
    ends = {order[0], order[-1]}
    if ends != {provider.p_index, provider.q_index}:
        _log_and_raise(GadgetError,
                       _BAD_ENDPOINTS % (provider.name, sorted(ends)))
    length = provider.path_length
    if provider.threshold <= length <= provider.threshold + provider.eps0:
        _log_and_raise(GadgetError, _BAD_GAP % (provider.name, length,
                                                provider.threshold))
    for i in provider.inner_indices:
        depth = rhombus_depth(points[i], provider.rhombus)
        if depth < provider.eps0:
            _log_and_raise(GadgetError, _TOO_SHALLOW % (provider.name, depth))
    return provider


def toy_provider(variant=YES, eps0=DEFAULT_EPS0):
    """Builds and certifies one of the desk-scale providers.

    The yes layout puts five inner points on the segment from ``p`` to ``q``;
    the no layout zigzags the same points by 0.1, which lengthens the path
    well past the threshold; the single layout has one inner point. The
    threshold is the yes path length plus ``eps0 / 4``, whichever variant is
    built.

    Args:
      variant (str): ``yes``, ``no`` or ``single``
      eps0 (float): the gap the threshold leaves

    Returns:
      :class:`HardCoreProvider`

    Raises:
      ValueError: if the variant is unknown
      GadgetError: if the certification fails
    """
    if variant not in VARIANTS:
        _log_and_raise(ValueError, _UNKNOWN_VARIANT % (variant,))
    points = _layout(variant)
    points.setflags(write=False)
    threshold = _fixed_path_length(_layout(YES)) + eps0 / 4.0
    provider = HardCoreProvider(
        name=u'toy-%s' % (variant,),
        variant=variant,
        points=points,
        p_index=0,
        q_index=len(points) - 1,
        rhombus=_RHOMBUS,
        threshold=threshold,
        eps0=float(eps0),
        path_length=_fixed_path_length(points))
    certify(provider)
    _logger.debug(u'certified %s: path %.6f, threshold %.6f', provider.name,
                  provider.path_length, threshold)
    return provider

