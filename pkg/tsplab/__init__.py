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

"""tsplab is a laboratory for Euclidean TSP heuristics and hardness gadgets.

:mod:`tsplab.tsp` holds the metric primitives, instances, exact solvers,
construction heuristics and the breadth-first branch-and-bound.
:mod:`tsplab.scalefree` holds the gadget constructions, the local path
simulators and the experimental analysis built on top of them.

"""

from __future__ import absolute_import

import logging

from . import config, scalefree, tsp

__version__ = '0.3.0'

_logger = logging.getLogger(__name__)
_logger.setLevel(logging.INFO)

__all__ = ['config', 'scalefree', 'tsp']
