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

"""improve provides local search on open paths whose ends stay fixed.

It is used to re-route a tour through a region too large for the exact path
solver: 2-opt reversals and or-opt segment moves are applied until neither
shortens the path.

"""

from __future__ import absolute_import

import logging

from .tours import path_length

_logger = logging.getLogger(__name__)

_OR_OPT_SEGMENTS = (1, 2, 3)


def _two_opt(path, matrix, tol):
    m = len(path)
    for i in range(1, m - 2):
        for j in range(i + 1, m - 1):
            a, b = path[i - 1], path[i]
            c, d = path[j], path[j + 1]
            delta = matrix[a, c] + matrix[b, d] - matrix[a, b] - matrix[c, d]
            if delta < -tol:
                path[i:j + 1] = path[i:j + 1][::-1]
                return True
    return False


def _or_opt(path, matrix, tol):
    m = len(path)
    for size in _OR_OPT_SEGMENTS:
        for i in range(1, m - size):
            segment = path[i:i + size]
            before, after = path[i - 1], path[i + size]
            gain = (matrix[before, segment[0]] + matrix[segment[-1], after] -
                    matrix[before, after])
            rest = path[:i] + path[i + size:]
            for k in range(len(rest) - 1):
                x, y = rest[k], rest[k + 1]
                if (x, y) == (before, after):
                    continue
                forward = (matrix[x, segment[0]] + matrix[segment[-1], y] -
                           matrix[x, y])
                backward = (matrix[x, segment[-1]] + matrix[segment[0], y] -
                            matrix[x, y])
                if forward - gain < -tol:
                    path[:] = rest[:k + 1] + segment + rest[k + 1:]
                    return True
                if backward - gain < -tol:
                    path[:] = rest[:k + 1] + segment[::-1] + rest[k + 1:]
                    return True
    return False


def improve_path(order, matrix, tolerance=1e-12):
    """Shortens the open path ``order`` keeping both of its ends.

    Args:
      order (sequence[int]): the path, as rows of ``matrix``
      matrix (:class:`numpy.ndarray`): symmetric distances
      tolerance (float): the least gain that counts as an improvement

    Returns:
      tuple(tuple[int], float): the improved path and its length
    """
    path = [int(v) for v in order]
    moves = 0
    while _two_opt(path, matrix, tolerance) or _or_opt(path, matrix,
                                                      tolerance):
        moves += 1
    _logger.debug(u'local search applied %d moves', moves)
    return tuple(path), path_length(path, matrix)
