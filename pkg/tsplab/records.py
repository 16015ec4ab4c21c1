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

"""records writes experiment outcomes in machine-readable form.

- :class:`ExperimentRecord` is one JSON object per copy or trial
- :class:`CsvSummary` aggregates records by ``(experiment, n, seed)``
- :func:`write_bnb_csv` writes branch-and-bound level statistics
- :func:`derive_seed` gives every copy its own reproducible seed

"""

from __future__ import absolute_import

import collections
import csv
import hashlib
import json
import logging
import struct

import numpy as np

_logger = logging.getLogger(__name__)

RECORD_KEYS = (u'experiment', u'seed', u'n', u'gadget', u'params',
               u'classification', u'lengths', u'frequencies')

SUMMARY_COLUMNS = (u'experiment', u'n', u'seed', u'records', u'predicted',
                   u'unstable', u'shortened', u'hypothesis_failed',
                   u'mean_frequency')

BNB_COLUMNS = (u'level', u'expanded', u'pruned', u'open', u'incumbent')

_SEED_BYTES = 8


def to_plain(value):
    """Converts numpy scalars and arrays so :mod:`json` accepts them."""
    if isinstance(value, dict):
        return collections.OrderedDict(
            (str(k), to_plain(v)) for k, v in sorted(value.items(),
                                                   key=lambda kv: str(kv[0])))
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


class ExperimentRecord(
        collections.namedtuple(
            u'ExperimentRecord',
            list(RECORD_KEYS))):
    """One measured outcome.

    Attributes:
        experiment (str): the subcommand or experiment name
        seed (int): the seed the outcome derives from
        n (int): the instance size
        gadget (str): the gadget examined, if any
        params (dict): the parameters in force
        classification (str): the verdict, if any
        lengths (dict): named tour or path lengths
        frequencies (dict): named Monte Carlo frequencies
    """
    # pylint: disable=too-few-public-methods

    def __new__(cls, experiment, seed=None, n=None, gadget=None, params=None,
                classification=None, lengths=None, frequencies=None):
        return super(cls, ExperimentRecord).__new__(
            cls, experiment, seed, n, gadget, dict(params or {}),
            classification, dict(lengths or {}), dict(frequencies or {}))

    def as_json(self):
        return json.dumps(to_plain(self._asdict()), sort_keys=True)


def write_records(records, out):
    """Writes ``records`` one JSON object per line.

    Returns:
      int: the number of records written
    """
    count = 0
    for record in records:
        out.write(record.as_json())
        out.write(u'\n')
        count += 1
    _logger.debug(u'wrote %d records', count)
    return count


class CsvSummary(object):
    """Aggregates :class:`ExperimentRecord` values by experiment, n and seed.

    Every group counts its records and classifications and averages the
    frequencies the records carry.
    """

    def __init__(self):
        self._groups = collections.OrderedDict()

    def add(self, record):
        key = (record.experiment, record.n, record.seed)
        group = self._groups.get(key)
        if group is None:
            group = {u'records': 0, u'frequencies': []}
            group.update((name, 0) for name in SUMMARY_COLUMNS[4:8])
            self._groups[key] = group
        group[u'records'] += 1
        if record.classification in group:
            group[record.classification] += 1
        group[u'frequencies'].extend(float(v)
                                     for v in record.frequencies.values())

    def extend(self, records):
        for record in records:
            self.add(record)
        return self

    def rows(self):
        """The summary rows, in first-seen order of their keys."""
        result = []
        for (experiment, n, seed), group in self._groups.items():
            frequencies = group[u'frequencies']
            row = collections.OrderedDict([
                (u'experiment', experiment), (u'n', n), (u'seed', seed)])
            for name in SUMMARY_COLUMNS[3:8]:
                row[name] = group[name]
            row[u'mean_frequency'] = (float(np.mean(frequencies))
                                      if frequencies else u'')
            result.append(row)
        return result

    def write(self, out):
        writer = csv.DictWriter(out, fieldnames=list(SUMMARY_COLUMNS),
                                lineterminator=u'\n')
        writer.writeheader()
        rows = self.rows()
        writer.writerows(rows)
        return len(rows)


def write_bnb_csv(stats, out):
    """Writes one CSV row per branch-and-bound level.

    Args:
      stats (:class:`tsplab.tsp.bnb.BnBStats`): the statistics
      out (file): a text stream

    Returns:
      int: the number of rows written
    """
    writer = csv.DictWriter(out, fieldnames=list(BNB_COLUMNS),
                            lineterminator=u'\n', extrasaction=u'ignore')
    writer.writeheader()
    rows = stats.as_rows()
    writer.writerows(rows)
    return len(rows)


def derive_seed(master_seed, center):
    """Hashes a master seed and a copy centre into a 64-bit seed.

    The centre enters through the hex form of its coordinates, so the seed
    does not depend on the order copies are processed in.

    Args:
      master_seed (int): the run's seed; ``None`` hashes as 0
      center (sequence[float]): the copy centre

    Returns:
      int: a seed for :func:`numpy.random.default_rng`
    """
    a_hash = hashlib.sha256()
    a_hash.update(str(int(master_seed or 0)).encode('utf-8'))
    for c in center:
        a_hash.update(b'\x00' + float(c).hex().encode('utf-8'))
    return struct.unpack('<Q', a_hash.digest()[:_SEED_BYTES])[0]
