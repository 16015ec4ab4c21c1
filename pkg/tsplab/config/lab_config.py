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

"""lab_config holds the option groups used across tsplab and loads them.

Each option group is a :class:`collections.namedtuple` with defaults, in the
style of the cache options it grew out of:

- :class:`SolverOptions` bounds the exact solvers
- :class:`HeuristicOptions` controls distance precision and dissection
- :class:`LocalSimOptions` bounds the local path simulators
- :class:`GadgetOptions` holds the numeric defaults of the gadget layers
- :class:`AnalysisOptions` controls shortening, stability and copy search
- :class:`BnBOptions` controls the breadth-first branch-and-bound

:func:`load` builds a :class:`LabConfig` by trying each of the :class:`Loaders`
in turn; the environment loader reads the JSON file named by ``CONFIG_VAR``.

"""

from __future__ import absolute_import

import collections
import json
import logging
import os
from enum import Enum

_logger = logging.getLogger(__name__)

CONFIG_VAR = u'TSPLAB_CONFIG_FILE'
SEED_VAR = u'TSPLAB_SEED'

_BAD_CONFIG_FILE = u'could not read tsplab config file %s'
_BAD_SEED = u'environment variable %s should hold an integer seed, got %r'
_UNKNOWN_GROUP = u'ignoring unknown config group %s'
_UNKNOWN_FIELD = u'ignoring unknown field %s in config group %s'


class LabConfigException(Exception):
    pass


def _log_and_raise(exception_class, message):
    _logger.error(message)
    raise exception_class(message)


class SolverOptions(
        collections.namedtuple(
            u'SolverOptions',
            [u'n_max',
             u'tolerance',
             u'cache_entries'])):
    """Holds values that bound the exact solvers.

    Attributes:

        n_max (int): the largest point count accepted by the subset DP
        tolerance (float): the slack used when comparing optimal lengths,
          which decides the lexicographic tie-break between optima
        cache_entries (int): the size of the solve cache; non-positive
          disables it
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_N_MAX = 24
    DEFAULT_TOLERANCE = 1e-9
    DEFAULT_CACHE_ENTRIES = 64

    def __new__(cls,
                n_max=DEFAULT_N_MAX,
                tolerance=DEFAULT_TOLERANCE,
                cache_entries=DEFAULT_CACHE_ENTRIES):
        """Invokes the base constructor with default values."""
        assert isinstance(n_max, int), u'should be an int'
        assert isinstance(cache_entries, int), u'should be an int'
        return super(cls, SolverOptions).__new__(
            cls,
            n_max,
            float(tolerance),
            cache_entries)


class HeuristicOptions(
        collections.namedtuple(
            u'HeuristicOptions',
            [u'precision_bits',
             u'karp_cell_limit',
             u'threads',
             u'karp_patch'])):
    """Holds values used by the construction heuristics.

    Attributes:

        precision_bits (int): the default grid precision for instances that do
          not carry their own
        karp_cell_limit (int): the largest cell population solved exactly by
          the dissection heuristic; ``None`` means the solver's ``n_max``
        threads (int): worker count used to solve dissection cells
        karp_patch (str): ``additive`` joins cell tours by the cheapest
          exchange that does not shorten the tour; ``cheapest`` takes the
          cheapest exchange outright
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_PRECISION_BITS = 32
    DEFAULT_KARP_CELL_LIMIT = None
    DEFAULT_THREADS = 1
    DEFAULT_KARP_PATCH = u'additive'
    KARP_PATCHES = (u'additive', u'cheapest')

    def __new__(cls,
                precision_bits=DEFAULT_PRECISION_BITS,
                karp_cell_limit=DEFAULT_KARP_CELL_LIMIT,
                threads=DEFAULT_THREADS,
                karp_patch=DEFAULT_KARP_PATCH):
        """Invokes the base constructor with default values."""
        assert isinstance(precision_bits, int), u'should be an int'
        assert karp_cell_limit is None or isinstance(karp_cell_limit, int)
        assert isinstance(threads, int), u'should be an int'
        assert karp_patch in cls.KARP_PATCHES, u'unknown karp patching'
        return super(cls, HeuristicOptions).__new__(
            cls,
            precision_bits,
            karp_cell_limit,
            max(1, threads),
            karp_patch)


class LocalSimOptions(
        collections.namedtuple(
            u'LocalSimOptions',
            [u'fork_cap'])):
    """Holds values used by the local path simulators.

    Attributes:

        fork_cap (int): the number of forks explored before a simulation is
          marked as capped
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_FORK_CAP = 6

    def __new__(cls, fork_cap=DEFAULT_FORK_CAP):
        """Invokes the base constructor with default values."""
        assert isinstance(fork_cap, int), u'should be an int'
        return super(cls, LocalSimOptions).__new__(cls, fork_cap)


class GadgetOptions(
        collections.namedtuple(
            u'GadgetOptions',
            [u'lam',
             u'beta_max',
             u'alpha_diameter',
             u'eps_pi',
             u'c0',
             u'd0',
             u'd1',
             u'orientation'])):
    """Holds the numeric defaults of the gadget layers.

    Attributes:

        lam (float): the rescaling target of the hard-core path length
        beta_max (float): the largest offset tried for the outer points of Q
        alpha_diameter (float): the diameter the scaled Q is fitted to
        eps_pi (float): the radius of the balls holding the copies of M
        c0 (float): the tour bound constant used as a scaling knob
        d0 (float): the entry distance used in the decider's precision
        d1 (float): half the side of the triangle holding three copies of
          the transit set; ``None`` picks a multiple of the copy diameter
        orientation (str): how the three copies are rotated
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_LAM = 0.05
    DEFAULT_BETA_MAX = 0.01
    DEFAULT_ALPHA_DIAMETER = 1.9
    DEFAULT_EPS_PI = 0.1
    DEFAULT_C0 = 1.5
    DEFAULT_D0 = 10.0
    DEFAULT_D1 = None
    DEFAULT_ORIENTATION = u'inward'

    def __new__(cls,
                lam=DEFAULT_LAM,
                beta_max=DEFAULT_BETA_MAX,
                alpha_diameter=DEFAULT_ALPHA_DIAMETER,
                eps_pi=DEFAULT_EPS_PI,
                c0=DEFAULT_C0,
                d0=DEFAULT_D0,
                d1=DEFAULT_D1,
                orientation=DEFAULT_ORIENTATION):
        """Invokes the base constructor with default values."""
        assert orientation in (u'inward', u'aligned', u'quarter'), \
            u'unknown orientation'
        return super(cls, GadgetOptions).__new__(
            cls,
            float(lam),
            float(beta_max),
            float(alpha_diameter),
            float(eps_pi),
            float(c0),
            float(d0),
            None if d1 is None else float(d1),
            orientation)


class AnalysisOptions(
        collections.namedtuple(
            u'AnalysisOptions',
            [u'delta1_fraction',
             u'stability_threshold',
             u'stability_trials',
             u'cell_factor'])):
    """Holds values used by the copy analysis.

    Attributes:

        delta1_fraction (float): the shortening threshold as a fraction of
          the primal copy's diameter
        stability_threshold (float): the change frequency at or above which a
          copy is reported unstable
        stability_trials (int): the Monte Carlo trials per stability check
        cell_factor (float): the aligned-copy cells have side about
          ``cell_factor * d * R``
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_DELTA1_FRACTION = 0.01
    DEFAULT_STABILITY_THRESHOLD = 0.9
    DEFAULT_STABILITY_TRIALS = 400
    DEFAULT_CELL_FACTOR = 10.0

    def __new__(cls,
                delta1_fraction=DEFAULT_DELTA1_FRACTION,
                stability_threshold=DEFAULT_STABILITY_THRESHOLD,
                stability_trials=DEFAULT_STABILITY_TRIALS,
                cell_factor=DEFAULT_CELL_FACTOR):
        """Invokes the base constructor with default values."""
        assert isinstance(stability_trials, int), u'should be an int'
        return super(cls, AnalysisOptions).__new__(
            cls,
            float(delta1_fraction),
            float(stability_threshold),
            stability_trials,
            float(cell_factor))


class BnBOptions(
        collections.namedtuple(
            u'BnBOptions',
            [u'iterations',
             u'halving_period',
             u'prune_tolerance',
             u'node_cap',
             u'level_cap'])):
    """Holds values used by the branch-and-bound.

    Attributes:

        iterations (int): subgradient steps per 1-tree bound
        halving_period (int): non-improving steps before the step scale halves
        prune_tolerance (float): a node is pruned when its bound is within
          this of the incumbent
        node_cap (int): the search stops after this many nodes
        level_cap (int): the search stops before expanding this level
    """
    # pylint: disable=too-few-public-methods
    DEFAULT_ITERATIONS = 100
    DEFAULT_HALVING_PERIOD = 10
    DEFAULT_PRUNE_TOLERANCE = 1e-9
    DEFAULT_NODE_CAP = 10 ** 6
    DEFAULT_LEVEL_CAP = 64

    def __new__(cls,
                iterations=DEFAULT_ITERATIONS,
                halving_period=DEFAULT_HALVING_PERIOD,
                prune_tolerance=DEFAULT_PRUNE_TOLERANCE,
                node_cap=DEFAULT_NODE_CAP,
                level_cap=DEFAULT_LEVEL_CAP):
        """Invokes the base constructor with default values."""
        assert isinstance(iterations, int), u'should be an int'
        assert isinstance(halving_period, int), u'should be an int'
        assert isinstance(node_cap, int), u'should be an int'
        assert isinstance(level_cap, int), u'should be an int'
        return super(cls, BnBOptions).__new__(
            cls,
            iterations,
            max(1, halving_period),
            float(prune_tolerance),
            node_cap,
            level_cap)


_GROUPS = collections.OrderedDict([
    (u'solver', SolverOptions),
    (u'heuristics', HeuristicOptions),
    (u'localsim', LocalSimOptions),
    (u'gadgets', GadgetOptions),
    (u'analysis', AnalysisOptions),
    (u'bnb', BnBOptions),
])


class LabConfig(
        collections.namedtuple(
            u'LabConfig',
            [u'seed'] + list(_GROUPS.keys()))):
    """Aggregates every option group plus the master seed."""
    # pylint: disable=too-few-public-methods

    def __new__(cls, seed=None, **groups):
        values = [groups.pop(name, None) or group_cls()
                  for name, group_cls in _GROUPS.items()]
        assert not groups, u'unknown option groups'
        return super(cls, LabConfig).__new__(cls, seed, *values)

    def as_dict(self):
        """Renders the config as plain JSON-compatible data."""
        result = collections.OrderedDict([(u'seed', self.seed)])
        for name in _GROUPS:
            result[name] = collections.OrderedDict(
                getattr(self, name)._asdict())
        return result

    def replace_group(self, name, **fields):
        """Returns a copy with some fields of one option group overridden."""
        group = getattr(self, name)._replace(**fields)
        return self._replace(**{name: _GROUPS[name](*group)})


def seed_from_env(default=None):
    """Reads the master seed from ``SEED_VAR``.

    Args:
      default (int): returned when the variable is unset

    Returns:
      int: the seed

    Raises:
      LabConfigException: if the variable does not hold an integer
    """
    raw = os.environ.get(SEED_VAR)
    if raw is None or raw.strip() == u'':
        return default
    try:
        return int(raw.strip(), 0)
    except ValueError:
        _log_and_raise(LabConfigException, _BAD_SEED % (SEED_VAR, raw))


def from_dict(json_dict, seed=None):
    """Builds a :class:`LabConfig` from parsed JSON.

    Unknown groups and fields are logged and skipped.

    Args:
      json_dict (dict): maps group names to dicts of field values; may
        carry a top-level ``seed``
      seed (int): used when ``json_dict`` has no seed

    Returns:
      :class:`LabConfig`
    """
    groups = {}
    for name, values in json_dict.items():
        if name == u'seed':
            continue
        group_cls = _GROUPS.get(name)
        if group_cls is None:
            _logger.warning(_UNKNOWN_GROUP, name)
            continue
        known = {}
        for field, value in values.items():
            if field not in group_cls._fields:
                _logger.warning(_UNKNOWN_FIELD, field, name)
                continue
            known[field] = value
        groups[name] = group_cls(**known)
    file_seed = json_dict.get(u'seed')
    return LabConfig(seed=file_seed if file_seed is not None else seed,
                     **groups)


def _load_from_well_known_env():
    seed = seed_from_env()
    if CONFIG_VAR not in os.environ:
        _logger.debug(u'no environ var %s, using the default config',
                      CONFIG_VAR)
        return None
    json_file = os.environ[CONFIG_VAR]
    try:
        with open(json_file) as f:
            json_dict = json.load(f)
        config = from_dict(json_dict, seed=seed)
    except (IOError, OSError, ValueError, TypeError, AssertionError,
            AttributeError):
        _logger.error(_BAD_CONFIG_FILE, json_file, exc_info=True)
        raise LabConfigException(_BAD_CONFIG_FILE % (json_file,))
    if seed is not None:
        # the environment seed wins over the file
        config = config._replace(seed=seed)
    return config


def _load_default():
    return LabConfig(seed=seed_from_env())


class Loaders(Enum):
    """Enumerates the functions used to load a :class:`LabConfig`."""
    # pylint: disable=too-few-public-methods
    ENVIRONMENT = (_load_from_well_known_env,)
    DEFAULT = (_load_default,)

    def __init__(self, load_func):
        """Constructor.

        load_func returns a config, or ``None`` to defer to the next loader
        """
        self._load_func = load_func

    def load(self):
        return self._load_func()


def load(loaders=(Loaders.ENVIRONMENT, Loaders.DEFAULT)):
    """Loads the effective :class:`LabConfig`.

    Args:
      loaders (iterable[:class:`Loaders`]): tried in order until one returns a
        config

    Returns:
      :class:`LabConfig`

    Raises:
      LabConfigException: if a config file is named but cannot be read
    """
    for loader in loaders:
        config = loader.load()
        if config is not None:
            return config
    return LabConfig()
