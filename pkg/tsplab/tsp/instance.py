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

"""instance provides generation, discretization, planting and persistence of
point sets.

An :class:`Instance` is immutable: its points are a read-only array whose row
order is the tie-breaking order used by every heuristic. Positions are 0-based
in memory; the text format written by :func:`save` numbers points from 1.

- :func:`gen_uniform` draws i.i.d. uniform points in ``[0, n**(1/d)]^d``
- :func:`discretize` snaps coordinates to a binary grid
- :func:`plant` clears a neighbourhood and appends a translated gadget
- :func:`save` and :func:`load` round-trip instances bit-exactly

"""

from __future__ import absolute_import, division

import collections
import io
import json
import logging
import math

import numpy as np

from . import geometry
from .geometry import Box, Topology

_logger = logging.getLogger(__name__)

MAGIC = u'TSPLAB v1'

_OVERFLOW = u'gadget planted at %s overflows the box'
_OVERLAP = u'gadget planted at %s would remove members of plant %d'
_TOO_FEW_SURVIVORS = u'only %d original points survive planting, needed %d'
_DUPLICATES = u'discretizing to %d bits produced %d duplicate groups'


class ParseError(ValueError):
    """Raised for malformed instance files; carries the offending line."""

    def __init__(self, message, lineno):
        super(ParseError, self).__init__(u'line %d: %s' % (lineno, message))
        self.lineno = lineno


class PlantError(ValueError):
    pass


def _log_and_raise(exception_class, message):
    _logger.error(message)
    raise exception_class(message)


class PlantRecord(
        collections.namedtuple(
            u'PlantRecord',
            [u'gadget_name',
             u'center',
             u'member_indices',
             u'clearance'])):
    """Describes one gadget copy planted into an instance.

    Attributes:
        gadget_name (str): identifies the gadget
        center (tuple[float]): where the gadget's anchor was placed
        member_indices (tuple[int]): instance positions of the gadget's
          points, in gadget order
        clearance (float): the radius cleared around every member
    """
    # pylint: disable=too-few-public-methods

    def as_json(self):
        return {
            u'gadget_name': self.gadget_name,
            u'center': [float(c).hex() for c in self.center],
            u'members': [i + 1 for i in self.member_indices],
            u'clearance': float(self.clearance).hex(),
        }

    @classmethod
    def from_json(cls, data):
        return cls(data[u'gadget_name'],
                   tuple(float.fromhex(c) for c in data[u'center']),
                   tuple(i - 1 for i in data[u'members']),
                   float.fromhex(data[u'clearance']))


class Instance(
        collections.namedtuple(
            u'Instance',
            [u'points',
             u'box',
             u'precision_bits',
             u'seed',
             u'plants',
             u'duplicates'])):
    """An indexed point set inside a :class:`Box`.

    Attributes:
        points (:class:`numpy.ndarray`): read-only (n, d) coordinates
        box (:class:`Box`): the region holding the points
        precision_bits (int): binary digits per coordinate used for distance
          comparisons
        seed (int): the generator seed, when known
        plants (tuple[:class:`PlantRecord`]): the planted gadgets
        duplicates (tuple[tuple[int]]): groups of positions sharing
          coordinates
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_PRECISION_BITS = 32

    def __new__(cls, points, box,
                precision_bits=DEFAULT_PRECISION_BITS,
                seed=None,
                plants=(),
                duplicates=()):
        assert isinstance(box, Box), u'should be a Box'
        assert precision_bits >= 1, u'precision should be positive'
        arr = geometry.as_points(points, box).copy()
        arr.flags.writeable = False
        return super(cls, Instance).__new__(
            cls, arr, box, int(precision_bits), seed, tuple(plants),
            tuple(duplicates))

    @property
    def n(self):
        return len(self.points)

    @property
    def quantum(self):
        """The grid spacing distances are rounded to before comparison."""
        return self.box.t / (2.0 ** self.precision_bits)

    def with_points(self, points):
        """A copy of this instance with new coordinates at the same positions."""
        assert len(points) == self.n, u'point count must not change'
        return self._replace_points(points)

    def _replace_points(self, points):
        return Instance(points, self.box, self.precision_bits, self.seed,
                        self.plants, ())

    def distance_matrix(self):
        return geometry.pairwise_distances(self.points, self.points, self.box)


def gen_uniform(n, d, seed=None, topology=Topology.TORUS, bits=None):
    """Draws ``n`` i.i.d. uniform points in ``[0, t]^d`` with ``t = n**(1/d)``.

    Args:
      n (int): the point count, at least 1
      d (int): the dimension
      seed (int): seeds :func:`numpy.random.default_rng`
      topology (:class:`Topology`): torus or cube
      bits (int): when given, the result is discretized to this precision

    Returns:
      :class:`Instance`

    Raises:
      ValueError: if n < 1
    """
    if n < 1:
        raise ValueError(u'n should be at least 1')
    box = Box(d, float(n) ** (1.0 / d), topology)
    rng = np.random.default_rng(seed)
    points = rng.random((n, d)) * box.t
    inst = Instance(points, box, seed=seed)
    _logger.debug(u'generated %d uniform points in %s', n, box)
    if bits is not None:
        return discretize(inst, bits)
    return inst


def _find_duplicates(points):
    if len(points) < 2:
        return ()
    _, inverse, counts = np.unique(points, axis=0, return_inverse=True,
                                   return_counts=True)
    inverse = np.asarray(inverse).reshape(-1)
    groups = []
    for group in np.flatnonzero(counts > 1):
        groups.append(tuple(np.flatnonzero(inverse == group).tolist()))
    return tuple(sorted(groups))


def discretize(inst, bits):
    """Snaps every coordinate to the grid ``t * j / 2**bits``.

    On a torus the grid point ``t`` wraps to 0; on a cube it is kept, so no
    coordinate moves by more than half a grid step. Points that collide are
    kept and reported in :attr:`Instance.duplicates`.

    Args:
      inst (:class:`Instance`): the instance to snap
      bits (int): binary digits per coordinate, at least 1

    Returns:
      :class:`Instance`: positions, seed and plants preserved
    """
    if bits < 1:
        raise ValueError(u'bits should be at least 1')
    snapped = geometry.snap_to_grid(inst.points, bits, inst.box)
    duplicates = _find_duplicates(snapped)
    if duplicates:
        _logger.warning(_DUPLICATES, bits, len(duplicates))
    return Instance(snapped, inst.box, bits, inst.seed, inst.plants,
                    duplicates)


def _rotate(points, rotation):
    if rotation is None or rotation == 0:
        return points
    if points.shape[1] != 2:
        raise ValueError(u'rotated planting needs d = 2')
    c, s = math.cos(rotation), math.sin(rotation)
    return points.dot(np.array([[c, s], [-s, c]]))


def plant(inst, gadget_points, center, clearance, min_survivors=0,
          rotation=None, name=u'gadget'):
    """Plants a translated gadget into ``inst``.

    Every original point closer than ``clearance`` to a gadget point is
    removed, then the gadget is appended after the survivors so its points
    take the last positions.

    Args:
      inst (:class:`Instance`): the background
      gadget_points (sequence): gadget coordinates relative to its anchor
      center (sequence[float]): where the anchor goes
      clearance (float): the cleared radius, positive
      min_survivors (int): planting fails unless at least this many
        original points survive
      rotation (float): an optional rotation (radians, d = 2) applied before
        translation
      name (str): recorded in the :class:`PlantRecord`

    Returns:
      tuple(:class:`Instance`, :class:`PlantRecord`)

    Raises:
      PlantError: if the gadget overflows the box, would erase an earlier
        plant, or leaves fewer than ``min_survivors`` points
    """
    if not clearance > 0:
        raise ValueError(u'clearance should be positive')
    box = inst.box
    local = _rotate(geometry.as_points(gadget_points, box), rotation)
    center = np.asarray(center, dtype=float)
    placed = local + center
    if box.is_torus:
        if geometry.diameter(local, box) >= box.t / 2.0:
            _log_and_raise(PlantError, _OVERFLOW % (center.tolist(),))
        placed = box.reduce(placed)
    elif np.any(placed < 0) or np.any(placed > box.t):
        _log_and_raise(PlantError, _OVERFLOW % (center.tolist(),))

    if inst.n:
        near = geometry.pairwise_distances(inst.points, placed, box)
        removed = np.any(near < clearance, axis=1)
    else:
        removed = np.zeros(0, dtype=bool)
    for number, record in enumerate(inst.plants):
        if removed[list(record.member_indices)].any():
            _log_and_raise(PlantError, _OVERLAP % (center.tolist(), number))
    survivors = np.flatnonzero(~removed)
    if len(survivors) < min_survivors:
        _log_and_raise(PlantError,
                       _TOO_FEW_SURVIVORS % (len(survivors), min_survivors))

    renumber = {int(old): new for new, old in enumerate(survivors)}
    plants = [record._replace(member_indices=tuple(
        renumber[i] for i in record.member_indices))
        for record in inst.plants]
    first = len(survivors)
    record = PlantRecord(name, tuple(center.tolist()),
                         tuple(range(first, first + len(placed))),
                         float(clearance))
    plants.append(record)
    points = np.vstack([inst.points[survivors], placed])
    planted = Instance(points, box, inst.precision_bits, inst.seed, plants,
                       _find_duplicates(points))
    if first:
        gap = geometry.pairwise_distances(
            planted.points[:first], placed, box).min()
        assert gap >= clearance, u'planting left a point inside the clearance'
    _logger.debug(u'planted %s at %s removing %d points', name,
                  center.tolist(), int(removed.sum()))
    return planted, record


def dump_lines(header, points):
    """Renders a header dict and points in the line format."""
    lines = [u'%s %s' % (MAGIC, json.dumps(header, sort_keys=True))]
    for position, row in enumerate(points):
        coords = u' '.join(float(c).hex() for c in row)
        lines.append(u'%d %s' % (position + 1, coords))
    return u'\n'.join(lines) + u'\n'


def parse_lines(text):
    """Parses the line format into a header dict and a list of coordinates.

    Raises:
      ParseError: with the line number of the first malformed line
    """
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MAGIC + u' '):
        raise ParseError(u'missing %r header' % (MAGIC,), 1)
    try:
        header = json.loads(lines[0][len(MAGIC) + 1:])
        d = int(header[u'd'])
        n = int(header[u'n'])
    except (ValueError, KeyError, TypeError):
        raise ParseError(u'corrupted header', 1)
    body = lines[1:]
    if len(body) != n:
        raise ParseError(u'expected %d point lines, found %d' % (n, len(body)),
                         len(lines))
    rows = []
    for offset, line in enumerate(body):
        lineno = offset + 2
        fields = line.split()
        if len(fields) != d + 1:
            raise ParseError(u'expected an index and %d coordinates' % (d,),
                             lineno)
        try:
            index = int(fields[0])
            coords = [float.fromhex(f) for f in fields[1:]]
        except ValueError:
            raise ParseError(u'unparseable point', lineno)
        if index != offset + 1:
            raise ParseError(u'expected index %d' % (offset + 1,), lineno)
        rows.append(coords)
    return header, rows


def _header(inst):
    return {
        u'd': inst.box.d,
        u't': inst.box.t.hex(),
        u'topology': inst.box.topology.value,
        u'precision_bits': inst.precision_bits,
        u'seed': inst.seed,
        u'n': inst.n,
        u'plants': [record.as_json() for record in inst.plants],
    }


def dumps(inst):
    return dump_lines(_header(inst), inst.points)


def loads(text):
    """Parses an instance from the line format.

    Raises:
      ParseError: if the text is malformed
    """
    header, rows = parse_lines(text)
    try:
        box = Box(header[u'd'], float.fromhex(header[u't']),
                  header[u'topology'])
        plants = [PlantRecord.from_json(p) for p in header.get(u'plants', [])]
        points = np.array(rows, dtype=float).reshape(len(rows), box.d)
        return Instance(points, box, header[u'precision_bits'],
                        header.get(u'seed'), plants, _find_duplicates(points))
    except (KeyError, TypeError, ValueError, AssertionError):
        raise ParseError(u'corrupted header', 1)


def save(inst, target):
    """Writes ``inst`` to a path or a text stream."""
    text = dumps(inst)
    if isinstance(target, (str, bytes)):
        with io.open(target, u'w', encoding=u'utf-8') as f:
            f.write(text)
    else:
        target.write(text)


def load(source):
    """Reads an instance from a path or a text stream.

    Raises:
      ParseError: if the content is malformed
      IOError: if the file cannot be read
    """
    if isinstance(source, (str, bytes)):
        with io.open(source, encoding=u'utf-8') as f:
            return loads(f.read())
    return loads(source.read())
