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

from __future__ import absolute_import

import io
import json
import unittest

import numpy as np
from expects import be_a, equal, expect

from tsplab import records
from tsplab.tsp.bnb import BnBStats, LevelStats


class TestDeriveSeed(unittest.TestCase):

    def test_should_be_reproducible(self):
        expect(records.derive_seed(7, (1.5, 2.5))).to(
            equal(records.derive_seed(7, (1.5, 2.5))))

    def test_should_differ_per_center_and_master(self):
        base = records.derive_seed(7, (1.5, 2.5))
        expect(records.derive_seed(7, (2.5, 1.5)) != base).to(equal(True))
        expect(records.derive_seed(8, (1.5, 2.5)) != base).to(equal(True))

    def test_should_hash_a_missing_master_as_zero(self):
        expect(records.derive_seed(None, (1.0,))).to(
            equal(records.derive_seed(0, (1.0,))))

    def test_should_fit_the_generator(self):
        seed = records.derive_seed(1, (0.0, 0.0))
        expect(seed).to(be_a(int))
        expect(0 <= seed < 2 ** 64).to(equal(True))


class TestExperimentRecord(unittest.TestCase):

    def test_should_serialize_numpy_values(self):
        record = records.ExperimentRecord(
            u'stability', seed=np.int64(4), n=10,
            params={u'S': np.array([1, 2]), u'delta': np.float64(0.5)},
            frequencies={u'changed': np.float32(0.25)})
        decoded = json.loads(record.as_json())
        expect(decoded[u'seed']).to(equal(4))
        expect(decoded[u'params']).to(equal({u'S': [1, 2], u'delta': 0.5}))
        expect(decoded[u'frequencies'][u'changed']).to(equal(0.25))
        expect(sorted(decoded)).to(equal(sorted(records.RECORD_KEYS)))

    def test_should_sort_keys(self):
        text = records.ExperimentRecord(u'x', params={u'b': 1, u'a': 2}) \
            .as_json()
        expect(text.index(u'"a"') < text.index(u'"b"')).to(equal(True))

    def test_should_write_one_line_per_record(self):
        out = io.StringIO()
        count = records.write_records(
            [records.ExperimentRecord(u'a'), records.ExperimentRecord(u'b')],
            out)
        expect(count).to(equal(2))
        expect(len(out.getvalue().splitlines())).to(equal(2))


class TestCsvSummary(unittest.TestCase):

    def test_should_group_and_average(self):
        summary = records.CsvSummary().extend([
            records.ExperimentRecord(u'classify', seed=1, n=100,
                                     classification=u'predicted'),
            records.ExperimentRecord(u'classify', seed=1, n=100,
                                     classification=u'unstable',
                                     frequencies={u'stability': 0.9}),
            records.ExperimentRecord(u'classify', seed=1, n=100,
                                     classification=u'hypothesis_failed',
                                     frequencies={u'stability': 0.3}),
            records.ExperimentRecord(u'classify', seed=2, n=100,
                                     classification=u'shortened'),
        ])
        rows = summary.rows()
        expect(len(rows)).to(equal(2))
        first = rows[0]
        expect(first[u'records']).to(equal(3))
        expect(first[u'predicted']).to(equal(1))
        expect(first[u'unstable']).to(equal(1))
        expect(first[u'hypothesis_failed']).to(equal(1))
        expect(abs(first[u'mean_frequency'] - 0.6) < 1e-12).to(equal(True))
        expect(rows[1][u'mean_frequency']).to(equal(u''))
        expect(rows[1][u'shortened']).to(equal(1))

    def test_should_write_a_header(self):
        out = io.StringIO()
        rows = records.CsvSummary().extend(
            [records.ExperimentRecord(u'gen', seed=1, n=5)]).write(out)
        expect(rows).to(equal(1))
        expect(out.getvalue().splitlines()[0]).to(
            equal(u','.join(records.SUMMARY_COLUMNS)))


class TestBnbCsv(unittest.TestCase):

    def test_should_write_a_row_per_level(self):
        levels = [LevelStats(0, 1, 1, 0, 0, 0, 0.0, 10.0),
                  LevelStats(1, 2, 0, 2, 0, 0, 0.0, 10.0)]
        stats = BnBStats(levels, u'certified', [], [], 3)
        out = io.StringIO()
        expect(records.write_bnb_csv(stats, out)).to(equal(2))
        lines = out.getvalue().splitlines()
        expect(lines[0]).to(equal(u'level,expanded,pruned,open,incumbent'))
        expect(lines[1]).to(equal(u'0,1,0,1,10.0'))
