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

"""caches provides the memo used by the exact solvers.

Solves are memoized in a :class:`cachetools.LRUCache` wrapped in a
:class:`LockedObject`, so the same cache may be shared by worker threads.

:func:`create` builds a cache from :class:`ExactCacheOptions`;
:func:`solve_key` derives the key of one solve.

"""

from __future__ import absolute_import

import collections
import hashlib
import logging
import threading

import cachetools
import numpy as np

_logger = logging.getLogger(__name__)


class ExactCacheOptions(
        collections.namedtuple(
            u'ExactCacheOptions',
            [u'num_entries'])):
    """Holds values used to control the solve cache.

    Attributes:

        num_entries: the maximum number of solves kept; a non-positive
          value disables caching
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_NUM_ENTRIES = 64

    def __new__(cls, num_entries=DEFAULT_NUM_ENTRIES):
        """Invokes the base constructor with default values."""
        assert isinstance(num_entries, int), u'should be an int'
        return super(cls, ExactCacheOptions).__new__(cls, num_entries)


def create(options):
    """Create a cache specified by ``options``

    The returned cache is wrapped in a :class:`LockedObject`, requiring it to
    be accessed in a with statement that gives synchronized access

    Example:
      >>> synced_cache = create(ExactCacheOptions())
      >>> with synced_cache as cache:  #  acquire the lock
      ...    cache['a_key'] = 'a_value'

    Args:
      options (:class:`ExactCacheOptions`): the cache size

    Returns:
      :class:`LockedObject`: wrapping a :class:`cachetools.LRUCache`, or
        None: if options is ``None`` or if options.num_entries <= 0

    Raises:
       ValueError: if options is not an :class:`ExactCacheOptions`

    """
    if options is None:
        return None

    if not isinstance(options, ExactCacheOptions):
        _logger.error(u'create(): bad options %s', options)
        raise ValueError(u'Invalid options')

    if options.num_entries <= 0:
        _logger.debug(u"did not create cache, options was %s", options)
        return None

    _logger.debug(u"creating a cache from %s", options)
    return LockedObject(cachetools.LRUCache(options.num_entries))


class LockedObject(object):
    """LockedObject protects an object with a re-entrant lock.

    The lock is required by the context manager protocol.
    """
    # pylint: disable=too-few-public-methods

    def __init__(self, obj):
        self._lock = threading.RLock()
        self._obj = obj

    def __enter__(self):
        self._lock.acquire()
        return self._obj

    def __exit__(self, _exc_type, _exc_val, _exc_tb):
        self._lock.release()


def solve_key(mode, matrix, extra=()):
    """Derives a cache key from the solve mode and the distance matrix.

    The matrix bytes are hashed, so keys stay small for large solves.
    """
    digest = hashlib.sha1(np.ascontiguousarray(matrix, dtype=float).tobytes())
    return (mode, matrix.shape[0], digest.hexdigest()) + tuple(extra)
