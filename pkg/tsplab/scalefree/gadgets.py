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

"""gadgets builds the point configurations used by the hardness experiments.

All gadgets live in a local plane with their anchor at the origin.

- :func:`nn_gadget` and :func:`ni_gadget` build the protecting sets Y
- :func:`pi_set` builds the ladder Pi(k) of four corners and a midline
- :func:`q_set` wraps a hard-core provider with its two outer points
- :func:`m_set` joins a shrunken Q with a protecting set
- :func:`pi_h` replaces the corners of Pi(k) with copies of M
- :func:`pi_h_3` places three copies of Pi_H on a triangle
- :func:`save_gadget` and :func:`load_gadget` use the instance file format

"""

from __future__ import absolute_import, division

import collections
import io
import logging
import math

import numpy as np

from tsplab.config import GadgetOptions
from tsplab.tsp import exact, geometry, instance
from tsplab.tsp.geometry import LOCAL_FRAME

from .providers import GadgetError, closest_rhombus_point

_logger = logging.getLogger(__name__)

NN = u'nn'
NI = u'ni'
PI = u'pi'
Q = u'q'
M = u'm'
PI_H = u'pi_h'
PI_H_3 = u'pi_h_3'

DEFAULT_R = 16.0
DEFAULT_FAR = 10.0
PI_HEIGHT = 5.0

_NI_POINTS = 18
_NI_STEP = 20.0
_BISECTION_STEPS = 60
_CLOSEST_TOLERANCE = 1e-12

_R_TOO_SMALL = u'R=%s is too small: the gadget needs R > %s'
_NOT_IN_ANNULUS = u'%s: a protecting point lies at radius %.6f outside [1, %.6f)'
_BETA_FAILS = u'beta=%s: p and q are not the closest rhombus points to x, y'
_NO_MARGIN = u'x and y are not eps0=%.3g closer to p and q than to the rest'
_ALPHA_TOO_LARGE = u'alpha * diam(Q) = %.6f should be below 2'
_Q_OUTSIDE = u'the scaled Q reaches radius %.6f, outside B(0, 1)'
_EPS_PI_TOO_LARGE = u'eps_pi=%s should be below 1/4'
_OVERLAP = u'%s: copies overlap'
_D1_TOO_SMALL = u'D1=%s should exceed the Pi_H diameter %.6f'
_NO_GADGET = u'no protecting gadget is defined for heuristic %s'
_NOT_A_GADGET = u'the header does not describe a gadget'


def _log_and_raise(exception_class, message):
    _logger.error(message)
    raise exception_class(message)


class Gadget(
        collections.namedtuple(
            u'Gadget',
            [u'kind',
             u'points',
             u'params',
             u'marked',
             u'parts'])):
    """A point configuration in local coordinates.

    Attributes:
        kind (str): which construction built it
        points (:class:`numpy.ndarray`): read-only, one row per point
        params (dict): the construction parameters
        marked (dict): named point indices, such as ``x``, ``y``, ``p``, ``q``
        parts (dict): named ``(start, stop)`` index ranges of sub-gadgets
    """
    # pylint: disable=too-few-public-methods

    def __new__(cls, kind, points, params=None, marked=None, parts=None):
        points = np.array(points, dtype=float).reshape(-1, 2)
        points.setflags(write=False)
        marked = dict(marked or {})
        parts = {name: (int(a), int(b)) for name, (a, b)
                 in (parts or {}).items()}
        assert all(0 <= i < len(points) for i in marked.values()), \
            u'marked indices should be valid'
        assert all(0 <= a <= b <= len(points) for a, b in parts.values()), \
            u'parts should be valid ranges'
        return super(cls, Gadget).__new__(cls, kind, points,
                                          dict(params or {}), marked, parts)

    @property
    def size(self):
        return len(self.points)

    @property
    def radius(self):
        """The radius of the smallest origin-centred ball holding the points."""
        if not self.size:
            return 0.0
        return float(np.sqrt(np.sum(self.points ** 2, axis=1)).max())

    @property
    def diameter(self):
        return geometry.diameter(self.points, LOCAL_FRAME)

    def part(self, name):
        start, stop = self.parts[name]
        return np.arange(start, stop)


def _norms(points):
    return np.sqrt(np.sum(np.asarray(points) ** 2, axis=1))


def _check_annulus(name, points, reach):
    radii = _norms(points)
    bad = (radii < 1.0) | (radii >= reach)
    if bad.any():
        _log_and_raise(GadgetError,
                       _NOT_IN_ANNULUS % (name, radii[bad][0], reach))


def nn_gadget(R=DEFAULT_R):
    """Builds the equilateral triangle of side 2 centred at the origin.

    One vertex sits on the positive y-axis.

    Args:
      R (float): the protection radius recorded with the gadget

    Raises:
      GadgetError: if the triangle does not fit in ``B(0, sqrt(R))``
    """
    circumradius = 2.0 / math.sqrt(3.0)
    if not R > circumradius ** 2:
        _log_and_raise(GadgetError, _R_TOO_SMALL % (R, circumradius ** 2))
    half = circumradius / 2.0
    points = [(0.0, circumradius), (-1.0, -half), (1.0, -half)]
    reach = math.sqrt(R)
    _check_annulus(NN, points, reach)
    return Gadget(NN, points,
                  params={u'R': float(R), u'reach': reach,
                          u'circumradius': circumradius},
                  marked={u'y1': 0, u'y2': 1, u'y3': 2})


def ni_gadget(R):
    """Builds the 18-point ring protecting the insertion heuristics.

    The points sit at angles ``90 + 20 j`` degrees on the circle of radius
    ``sqrt(R)`` centred at ``(0, sqrt(R) / 2)``. The ring reaches
    ``1.5 sqrt(R)`` from the anchor, so the gadget declares ``2 sqrt(R)``
    as its reach; that stays below R whenever ``R > 4``.

    Raises:
      GadgetError: if ``R <= 4``
    """
    if not R > 4:
        _log_and_raise(GadgetError, _R_TOO_SMALL % (R, 4))
    root = math.sqrt(R)
    centre = root / 2.0
    points = np.zeros((_NI_POINTS, 2))
    points[0] = (0.0, centre + root)
    points[_NI_POINTS // 2] = (0.0, centre - root)
    for j in range(1, _NI_POINTS // 2):
        theta = math.radians(90.0 + _NI_STEP * j)
        x, y = root * math.cos(theta), centre + root * math.sin(theta)
        points[j] = (x, y)
        points[_NI_POINTS - j] = (-x, y)
    reach = 2.0 * root
    _check_annulus(NI, points, reach)
    return Gadget(NI, points,
                  params={u'R': float(R), u'reach': reach, u'centre': centre},
                  marked={u'top': 0, u'bottom': _NI_POINTS // 2})


def gadget_for(heuristic_name, R=DEFAULT_R):
    """The protecting gadget used for a heuristic.

    Raises:
      GadgetError: for a heuristic without one
    """
    if heuristic_name in (u'nn', u'greedy'):
        return nn_gadget(R)
    if heuristic_name in (u'ni', u'fi'):
        return ni_gadget(R)
    return _log_and_raise(GadgetError, _NO_GADGET % (heuristic_name,))


def pi_set(k):
    """Builds Pi(k): the corners ``(0,5), (0,0), (1,0), (1,5)`` and the
    midline points ``(1/2, 5j/k)`` for ``0 <= j <= k``.

    Raises:
      ValueError: if ``k < 1``
    """
    if int(k) < 1:
        _log_and_raise(ValueError, u'k should be at least 1')
    k = int(k)
    corners = [(0.0, PI_HEIGHT), (0.0, 0.0), (1.0, 0.0), (1.0, PI_HEIGHT)]
    midline = [(0.5, PI_HEIGHT * j / k) for j in range(k + 1)]
    return Gadget(PI, corners + midline,
                  params={u'k': k},
                  marked={u'pi1': 0, u'pi2': 1, u'pi3': 2, u'pi4': 3},
                  parts={u'midline': (4, k + 5)})


def _closest_is_apex(beta, rhombus, p, q):
    x = (-1.0, -beta)
    y = (1.0, -beta)
    return (np.allclose(closest_rhombus_point(x, rhombus), p,
                        atol=_CLOSEST_TOLERANCE) and
            np.allclose(closest_rhombus_point(y, rhombus), q,
                        atol=_CLOSEST_TOLERANCE))


def _largest_beta(beta_max, rhombus, p, q):
    if _closest_is_apex(beta_max, rhombus, p, q):
        return beta_max
    low, high = 0.0, beta_max
    for _ in range(_BISECTION_STEPS):
        middle = (low + high) / 2.0
        if _closest_is_apex(middle, rhombus, p, q):
            low = middle
        else:
            high = middle
    return low


def q_set(provider, lam=None, beta=None, options=None):
    """Rescales a provider and adds the outer points x and y.

    The provider is centred at the origin and scaled by ``lam / (c0 k)``,
    where k counts its points; then ``x = (-1, -beta)`` and
    ``y = (1, -beta)`` are appended. When ``beta`` is omitted the largest
    value up to ``options.beta_max`` keeping p and q the closest rhombus
    points to x and y is found by bisection.

    Args:
      provider (:class:`tsplab.scalefree.providers.HardCoreProvider`): the
        hard core
      lam (float): in (0, 1], ``options.lam`` when omitted
      beta (float): the offset of x and y below the axis
      options (:class:`tsplab.config.GadgetOptions`): defaults

    Returns:
      :class:`Gadget`: provider points first, then x and y

    Raises:
      GadgetError: if beta breaks the closest-point condition or x, y are
        not clearly closest to p, q
    """
    options = options or GadgetOptions()
    lam = options.lam if lam is None else float(lam)
    if not 0 < lam <= 1:
        _log_and_raise(ValueError, u'lambda should lie in (0, 1]')
    k = len(provider.points)
    scale = lam / (options.c0 * k)
    origin = (provider.points[provider.p_index] +
              provider.points[provider.q_index]) / 2.0
    core = (provider.points - origin) * scale
    rhombus = (np.asarray(provider.rhombus, dtype=float) - origin) * scale
    p = core[provider.p_index]
    q = core[provider.q_index]
    if beta is None:
        beta = _largest_beta(options.beta_max, rhombus, p, q)
    elif not _closest_is_apex(beta, rhombus, p, q):
        _log_and_raise(GadgetError, _BETA_FAILS % (beta,))
    x = np.array([-1.0, -beta])
    y = np.array([1.0, -beta])
    eps0 = lam * provider.eps0 / (options.c0 * k)
    for outer, apex in ((x, provider.p_index), (y, provider.q_index)):
        gaps = geometry.distances_from(outer, core, LOCAL_FRAME)
        others = np.delete(gaps, apex)
        if not gaps[apex] < others.min() - eps0:
            _log_and_raise(GadgetError, _NO_MARGIN % (eps0,))
    m = len(core)
    return Gadget(Q, np.vstack([core, x, y]),
                  params={u'lambda': lam, u'beta': float(beta),
                          u'scale': scale, u'eps0': eps0, u'c0': options.c0,
                          u'k': k, u'threshold': provider.threshold * scale,
                          u'path_length': provider.path_length * scale,
                          u'provider': provider.name,
                          u'variant': provider.variant},
                  marked={u'p': provider.p_index, u'q': provider.q_index,
                          u'x': m, u'y': m + 1},
                  parts={u'core': (0, m)})


def m_set(heuristic_gadget, q, alpha=None, options=None):
    """Joins Q, scaled by alpha into ``B(0, 1)``, with a protecting gadget.

    Args:
      heuristic_gadget (:class:`Gadget`): the protecting set Y
      q (:class:`Gadget`): the output of :func:`q_set`
      alpha (float): the scale of Q, ``options.alpha_diameter / diam(Q)``
        when omitted
      options (:class:`tsplab.config.GadgetOptions`): defaults

    Returns:
      :class:`Gadget`: the points of Q first, then those of Y; part ``s``
        ranges over Q and part ``y`` over Y

    Raises:
      GadgetError: if scaled Q leaves ``B(0, 1)`` or Y leaves its annulus
    """
    options = options or GadgetOptions()
    diam = q.diameter
    if alpha is None:
        alpha = options.alpha_diameter / diam
    if not alpha * diam < 2:
        _log_and_raise(GadgetError, _ALPHA_TOO_LARGE % (alpha * diam,))
    core = alpha * q.points
    reach_in = _norms(core).max()
    if not reach_in < 1:
        _log_and_raise(GadgetError, _Q_OUTSIDE % (reach_in,))
    reach = heuristic_gadget.params.get(u'reach')
    _check_annulus(heuristic_gadget.kind, heuristic_gadget.points, reach)
    m = q.size
    marked = dict(q.marked)
    marked.update((name, m + i) for name, i in heuristic_gadget.marked.items())
    params = dict(q.params)
    params.update({u'alpha': float(alpha), u'R': heuristic_gadget.params[u'R'],
                   u'reach': reach, u'protection': heuristic_gadget.kind})
    return Gadget(M, np.vstack([core, heuristic_gadget.points]),
                  params=params, marked=marked,
                  parts={u's': (0, m), u'y': (m, m + heuristic_gadget.size)})


def _check_separated(name, blocks):
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            gaps = geometry.pairwise_distances(blocks[a], blocks[b],
                                               LOCAL_FRAME)
            if not gaps.min() > 0:
                _log_and_raise(GadgetError, _OVERLAP % (name,))


def pi_h(k, m, eps_pi=None, options=None):
    """Replaces the corners of Pi(k) by copies of M shrunk into eps_pi-balls.

    Each copy is scaled by ``eps_pi / R`` so that its whole protection ball
    fits in the eps_pi-ball. The copies at the right-hand corners are the
    left-hand ones with x mirrored to ``1 - x``, so the set is symmetric
    under ``x -> 1 - x``. The params record, for every copy, its anchor and
    the orthogonal map placing it as ``frames``.

    Args:
      k (int): the midline has ``k + 1`` points
      m (:class:`Gadget`): the output of :func:`m_set`
      eps_pi (float): the copy radius, below 1/4
      options (:class:`tsplab.config.GadgetOptions`): defaults

    Returns:
      :class:`Gadget`: parts ``m0`` to ``m3`` hold the copies at the four
        corners, in corner order, and part ``midline`` the midline

    Raises:
      GadgetError: if eps_pi is too large or the copies overlap
    """
    options = options or GadgetOptions()
    eps_pi = options.eps_pi if eps_pi is None else float(eps_pi)
    if not 0 < eps_pi < 0.25:
        _log_and_raise(GadgetError, _EPS_PI_TOO_LARGE % (eps_pi,))
    ladder = pi_set(k)
    shrink = eps_pi / max(m.params[u'R'], m.radius)
    local = m.points * shrink
    top = local + np.array([0.0, PI_HEIGHT])
    bottom = local
    copies = [top, bottom, _mirror(bottom), _mirror(top)]
    midline = ladder.points[ladder.part(u'midline')]
    _check_separated(PI_H, copies + [midline])
    size = m.size
    parts = {u'm%d' % (i,): (i * size, (i + 1) * size) for i in range(4)}
    parts[u'midline'] = (4 * size, 4 * size + len(midline))
    marked = {}
    for i in range(4):
        marked.update((u'm%d.%s' % (i, name), i * size + j)
                      for name, j in m.marked.items())
    mirror = np.diag([-1.0, 1.0])
    frames = [_frame((0.0, PI_HEIGHT), np.eye(2)),
              _frame((0.0, 0.0), np.eye(2)),
              _frame((1.0, 0.0), mirror),
              _frame((1.0, PI_HEIGHT), mirror)]
    return Gadget(PI_H, np.vstack(copies + [midline]),
                  params={u'k': int(k), u'eps_pi': eps_pi,
                          u'copy_scale': shrink, u'm_size': size,
                          u'R': m.params.get(u'R'),
                          u'reach': m.params.get(u'reach'),
                          u'protection': m.params.get(u'protection'),
                          u'frames': frames,
                          u'core_size': len(m.part(u's')),
                          u'y_points': m.points[m.part(u'y')].tolist()},
                  marked=marked, parts=parts)


def _frame(anchor, matrix):
    return [float(anchor[0]), float(anchor[1])] + [float(v) for v in
                                                   np.ravel(matrix)]


def copy_frames(gadget):
    """The anchor and placing map of every M copy in a gadget.

    Returns:
      list[tuple(:class:`numpy.ndarray`, :class:`numpy.ndarray`)]: anchors
        and 2x2 orthogonal maps, in the order of :func:`m_copies`
    """
    return [(np.array(f[:2]), np.array(f[2:]).reshape(2, 2))
            for f in gadget.params.get(u'frames', [])]


def _mirror(points):
    mirrored = np.array(points, dtype=float)
    mirrored[:, 0] = 1.0 - mirrored[:, 0]
    return mirrored


def _rotation(degrees):
    theta = math.radians(degrees)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _copy_turn(orientation, vertex_angle):
    if orientation == u'inward':
        return vertex_angle + 90.0
    if orientation == u'quarter':
        return 90.0
    return 0.0


def pi_h_3(pih, D1=None, orientation=None, options=None):
    """Places three copies of Pi_H at the vertices of a triangle of side 2 D1.

    The triangle is centred at the origin with a vertex on the positive
    y-axis. ``orientation`` decides how each copy is turned: ``inward``
    points every midline at the triangle centre, ``quarter`` turns all three
    by 90 degrees and ``aligned`` leaves them as built.

    Args:
      pih (:class:`Gadget`): the output of :func:`pi_h`
      D1 (float): half the triangle side, ``options.d1`` or twice the Pi_H
        diameter when omitted
      orientation (str): ``inward``, ``quarter`` or ``aligned``
      options (:class:`tsplab.config.GadgetOptions`): defaults

    Returns:
      :class:`Gadget`: parts ``copy0`` to ``copy2`` and the twelve M copies
        ``m0`` to ``m11``

    Raises:
      GadgetError: if D1 does not exceed the Pi_H diameter
    """
    options = options or GadgetOptions()
    orientation = orientation or options.orientation
    diam = pih.diameter
    if D1 is None:
        D1 = options.d1 if options.d1 is not None else 2.0 * diam
    if not D1 > diam:
        _log_and_raise(GadgetError, _D1_TOO_SMALL % (D1, diam))
    centre = (pih.points.min(axis=0) + pih.points.max(axis=0)) / 2.0
    local = pih.points - centre
    circumradius = 2.0 * D1 / math.sqrt(3.0)
    blocks = []
    frames = []
    for j in range(3):
        vertex_angle = 90.0 + 120.0 * j
        theta = math.radians(vertex_angle)
        vertex = circumradius * np.array([math.cos(theta), math.sin(theta)])
        turn = _rotation(_copy_turn(orientation, vertex_angle))
        blocks.append(local.dot(turn.T) + vertex)
        frames.extend(_frame(turn.dot(anchor - centre) + vertex, turn.dot(o))
                      for anchor, o in copy_frames(pih))
    _check_separated(PI_H_3, blocks)
    size = pih.size
    parts = {u'copy%d' % (j,): (j * size, (j + 1) * size) for j in range(3)}
    for j in range(3):
        for number, (start, stop) in enumerate(m_copies(pih)):
            parts[u'm%d' % (4 * j + number,)] = (j * size + start,
                                                 j * size + stop)
    params = dict(pih.params)
    params.update({u'D1': float(D1), u'side': 2.0 * D1,
                   u'orientation': orientation, u'frames': frames})
    return Gadget(PI_H_3, np.vstack(blocks), params=params, parts=parts)


def m_copies(gadget):
    """Lists the index ranges of the M copies inside a gadget, in order."""
    names = [name for name in gadget.parts
             if name.startswith(u'm') and name[1:].isdigit()]
    return [gadget.parts[name] for name in sorted(names,
                                                  key=lambda n: int(n[1:]))]


class MidlineProfile(
        collections.namedtuple(
            u'MidlineProfile',
            [u'k',
             u'length',
             u'order',
             u'corners',
             u'deviation'])):
    """How the shortest path through Pi(k) meets the corners.

    Attributes:
        k (int): the midline parameter
        length (float): the shortest x to y Hamilton path length
        order (tuple[int]): that path, x first
        corners (list[int]): the corners (0 to 3) whose two path neighbours
          both lie on the midline
        deviation (float): over those corners, the least value of the largest
          ``|dist - 1/2|`` to a neighbour; ``None`` when there are none
    """
    # pylint: disable=too-few-public-methods


def pi_midline_profile(k, far=DEFAULT_FAR, options=None):
    """Solves the x to y path through Pi(k) with x, y far below and above.

    Args:
      k (int): the midline parameter
      far (float): the distance of x and y from the ladder
      options (:class:`tsplab.config.SolverOptions`): exact solver limits

    Returns:
      :class:`MidlineProfile`
    """
    ladder = pi_set(k)
    outer = np.array([(0.5, -far), (0.5, PI_HEIGHT + far)])
    points = np.vstack([ladder.points, outer])
    n = len(points)
    path, length = exact.held_karp_path(points, LOCAL_FRAME,
                                        endpoints=(n - 2, n - 1),
                                        options=options)
    order = path.order
    start, stop = ladder.parts[u'midline']
    corners, deviation = [], None
    for corner in range(4):
        at = order.index(corner)
        neighbours = [order[at - 1], order[at + 1]]
        if not all(start <= v < stop for v in neighbours):
            continue
        corners.append(corner)
        worst = max(abs(geometry.dist(points[corner], points[v], LOCAL_FRAME)
                        - 0.5) for v in neighbours)
        deviation = worst if deviation is None else min(deviation, worst)
    _logger.debug(u'Pi(%d): corners %s meet the midline, deviation %s', k,
                  corners, deviation)
    return MidlineProfile(int(k), length, order, corners, deviation)


def _header(gadget):
    return {
        u'd': 2,
        u'n': gadget.size,
        u'gadget': {
            u'kind': gadget.kind,
            u'params': gadget.params,
            u'marked': gadget.marked,
            u'parts': {name: list(r) for name, r in gadget.parts.items()},
        },
    }


def dumps_gadget(gadget):
    return instance.dump_lines(_header(gadget), gadget.points)


def loads_gadget(text):
    """Parses a gadget from the instance line format.

    Raises:
      ParseError: if the text is malformed or describes no gadget
    """
    header, rows = instance.parse_lines(text)
    described = header.get(u'gadget')
    if not isinstance(described, dict) or u'kind' not in described:
        raise instance.ParseError(_NOT_A_GADGET, 1)
    try:
        return Gadget(described[u'kind'], np.array(rows).reshape(-1, 2),
                      params=described.get(u'params'),
                      marked=described.get(u'marked'),
                      parts=described.get(u'parts'))
    except (TypeError, ValueError, AssertionError):
        raise instance.ParseError(_NOT_A_GADGET, 1)


def save_gadget(gadget, target):
    """Writes a gadget to a path or a text stream."""
    text = dumps_gadget(gadget)
    if isinstance(target, (str, bytes)):
        with io.open(target, u'w', encoding=u'utf-8') as f:
            f.write(text)
    else:
        target.write(text)


def load_gadget(source):
    """Reads a gadget from a path or a text stream.

    Raises:
      ParseError: if the content is malformed
      IOError: if the file cannot be read
    """
    if isinstance(source, (str, bytes)):
        with io.open(source, encoding=u'utf-8') as f:
            return loads_gadget(f.read())
    return loads_gadget(source.read())
