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

"""cli drives every experiment from the command line.

Each run first prints its effective configuration as one JSON line, then
its results as CSV or JSON lines (aligned tables with ``--pretty``).
Instance positions are printed and read 1-based.

Exit status is 0 on success, 2 for bad input or failed I/O and 3 when an
internal consistency check fails.

"""

from __future__ import absolute_import, division, print_function

import argparse
import collections
import csv
import json
import logging
import sys

import numpy as np

from tsplab import __version__, records
from tsplab.config import LabConfigException, lab_config
from tsplab.records import ExperimentRecord, derive_seed
from tsplab.scalefree import (analysis, classify, copies, decider, gadgets,
                              localsim, providers)
from tsplab.tsp import bnb, caches, dissection, exact, geometry, instance
from tsplab.tsp.geometry import Topology
from tsplab.tsp.heuristics import HeuristicStuck, Heuristics
from tsplab.tsp.one_tree import hk_one_tree_bound

_logger = logging.getLogger(__name__)

PROG = u'tsplab'

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_ASSERTION = 3

_GADGETS = (u'nn', u'ni', u'pi:k', u'q', u'm', u'piH', u'pi3')
_PLANT_ATTEMPTS = 50

_BAD_INDICES = u'expected comma separated positions from 1 to %d, got %r'
_BAD_POINT = u'expected %d comma separated coordinates, got %r'
_BAD_GADGET = u'unknown gadget %r, expected one of %s'
_TOO_FEW_COPIES = u'planted %d of %d copies after %d attempts'
_NOT_PROTECTED = u'the ball at %s is not protected by the %s gadget'


def _positions(text, n):
    try:
        values = [int(v) for v in text.split(u',') if v.strip()]
    except ValueError:
        raise ValueError(_BAD_INDICES % (n, text))
    if not values or any(not 1 <= v <= n for v in values):
        raise ValueError(_BAD_INDICES % (n, text))
    return [v - 1 for v in values]


def _point(text, d):
    try:
        values = [float(v) for v in text.split(u',')]
    except ValueError:
        raise ValueError(_BAD_POINT % (d, text))
    if len(values) != d:
        raise ValueError(_BAD_POINT % (d, text))
    return np.array(values)


def _one_based(order):
    return [int(v) + 1 for v in order]


class _Output(object):
    """Writes the run's results, as CSV or aligned tables."""

    def __init__(self, stream, pretty):
        self.stream = stream
        self.pretty = pretty

    def json(self, value):
        self.stream.write(json.dumps(records.to_plain(value), sort_keys=True))
        self.stream.write(u'\n')

    def rows(self, columns, rows):
        if not self.pretty:
            writer = csv.DictWriter(self.stream, fieldnames=list(columns),
                                    lineterminator=u'\n',
                                    extrasaction=u'ignore')
            writer.writeheader()
            writer.writerows(rows)
            return
        cells = [[str(c) for c in columns]]
        cells.extend([_pretty_cell(row.get(c)) for c in columns]
                     for row in rows)
        widths = [max(len(line[k]) for line in cells)
                  for k in range(len(columns))]
        for line in cells:
            self.stream.write(u'  '.join(
                v.rjust(w) for v, w in zip(line, widths)).rstrip())
            self.stream.write(u'\n')


def _pretty_cell(value):
    if isinstance(value, float):
        return u'%.6g' % (value,)
    return u'' if value is None else str(value)


def _effective_config(args):
    config = lab_config.load()
    if args.seed is not None:
        config = config._replace(seed=args.seed)
    if args.threads is not None:
        config = config.replace_group(u'heuristics', threads=args.threads)
    return config


def _echo(args, config, stream):
    echoed = collections.OrderedDict([
        (u'tsplab', __version__),
        (u'command', args.command),
        (u'args', {k: v for k, v in sorted(vars(args).items())
                   if k not in (u'func', u'command')}),
        (u'config', config.as_dict()),
    ])
    stream.write(json.dumps(records.to_plain(echoed)))
    stream.write(u'\n')


def _heuristic_tour(heuristic, inst, config):
    if heuristic is Heuristics.KARP:
        return dissection.karp_dissection(inst, None, config.heuristics,
                                          config.solver)
    return heuristic.build(inst)


def _gen(args, config, out):
    inst = instance.gen_uniform(args.n, args.d, seed=config.seed,
                                topology=Topology(args.topology),
                                bits=args.bits)
    instance.save(inst, out.stream)


def _solve(args, config, out):
    inst = instance.load(args.file)
    if args.mode == u'tour':
        tour = exact.held_karp_tour(inst.points, inst.box, config.solver)
        order, length = tour.order, tour.length
    else:
        endpoints = None
        if args.endpoints:
            endpoints = _positions(args.endpoints, inst.n)
            if len(endpoints) != 2:
                raise ValueError(_BAD_INDICES % (inst.n, args.endpoints))
        path, length = exact.held_karp_path(inst.points, inst.box,
                                            endpoints, config.solver)
        order = path.order
    out.json({u'mode': args.mode, u'n': inst.n, u'length': length,
              u'order': _one_based(order)})


def _reference(inst, kind, config):
    if kind == u'auto':
        kind = u'exact' if inst.n <= config.solver.n_max else u'onetree'
    if kind == u'exact':
        return kind, exact.held_karp_tour(inst.points, inst.box,
                                          config.solver).length
    return kind, hk_one_tree_bound(inst.points, inst.box,
                                   options=config.bnb)


def _heur(args, config, out):
    inst = instance.load(args.file)
    if args.heuristic == u'all':
        chosen = list(Heuristics)
    else:
        chosen = [Heuristics.from_name(args.heuristic)]
    kind, reference = _reference(inst, args.reference, config)
    rows = []
    for heuristic in chosen:
        tour = _heuristic_tour(heuristic, inst, config)
        assert tour.is_valid(inst.n), u'%s built an invalid tour' % (
            heuristic.label,)
        if kind == u'exact':
            assert tour.length >= reference - config.solver.tolerance, \
                u'%s beat the exact optimum' % (heuristic.label,)
        rows.append({u'heuristic': heuristic.label, u'n': inst.n,
                     u'length': tour.length, u'reference': kind,
                     u'reference_length': reference,
                     u'ratio': tour.length / reference if reference else None})
    out.rows((u'heuristic', u'n', u'length', u'reference',
              u'reference_length', u'ratio'), rows)


def _build_gadget(args, config):
    name = args.gadget
    options = config.gadgets
    if name == u'nn':
        return gadgets.nn_gadget(args.R)
    if name == u'ni':
        return gadgets.ni_gadget(args.R)
    if name.startswith(u'pi:'):
        return gadgets.pi_set(int(name.split(u':', 1)[1]))
    if name not in _GADGETS:
        raise ValueError(_BAD_GADGET % (name, u', '.join(_GADGETS)))
    q = gadgets.q_set(providers.toy_provider(args.variant), options=options)
    if name == u'q':
        return q
    m = gadgets.m_set(gadgets.gadget_for(args.heuristic, args.R), q,
                      options=options)
    if name == u'm':
        return m
    pih = gadgets.pi_h(args.k, m, options=options)
    if name == u'piH':
        return pih
    return gadgets.pi_h_3(pih, options=options)


def _plant(args, config, out):
    gadget = _build_gadget(args, config)
    if args.gadget_out:
        gadgets.save_gadget(gadget, args.gadget_out)
    if not args.file:
        gadgets.save_gadget(gadget, out.stream)
        return
    inst = instance.load(args.file)
    rng = np.random.default_rng(derive_seed(config.seed, (0.0,) * inst.box.d))
    planted, attempts = 0, 0
    while planted < args.copies and attempts < _PLANT_ATTEMPTS * args.copies:
        attempts += 1
        center = rng.random(inst.box.d) * inst.box.t
        try:
            inst, _ = instance.plant(inst, gadget.points, center,
                                     args.clearance, name=gadget.kind)
        except instance.PlantError:
            continue
        planted += 1
    if planted < args.copies:
        raise ValueError(_TOO_FEW_COPIES % (planted, args.copies, attempts))
    instance.save(inst, out.stream)


def _detect(args, config, out):
    inst = instance.load(args.file)
    gadget = gadgets.load_gadget(args.gadget_file)
    found = copies.find_aligned_copies(inst, gadget.points, args.eps, args.R,
                                       config.analysis)
    for copy in found:
        out.json({u'center': list(copy.center), u'cell': list(copy.cell),
                  u'members': _one_based(copy.member_indices),
                  u'max_displacement': copy.matching.max_displacement})


def _simulate(args, config, out):
    inst = instance.load(args.file)
    heuristic = Heuristics.from_name(args.heuristic)
    center = _point(args.center, inst.box.d)
    protecting = gadgets.gadget_for(heuristic.label, args.R)
    ball = analysis.extract_local_ball(inst, center, args.R, args.eps,
                                       args.scale)
    protected, matching = geometry.is_protected(
        inst.points, protecting.points, center, args.R, args.eps * args.scale,
        inst.box, scale=args.scale, reach=protecting.params.get(u'reach'))
    local = ball.local_index()
    y_local = ([] if not protected else
               sorted(local[v] for v in matching.as_dict().values()))
    cap = args.cap if args.cap is not None else config.localsim.fork_cap
    if heuristic is Heuristics.NN:
        entries = y_local or list(range(len(ball.indices)))
        found = localsim.simulate_nn(ball.points, entries, args.eps, cap)
    elif heuristic is Heuristics.GREEDY:
        found = localsim.simulate_greedy(ball.points, args.eps, cap)
    elif heuristic in (Heuristics.NI, Heuristics.FI):
        if not protected:
            raise ValueError(_NOT_PROTECTED % (args.center, heuristic.label))
        mode = (localsim.NEAREST if heuristic is Heuristics.NI
                else localsim.FARTHEST)
        found = localsim.simulate_insertion(ball.points, y_local, args.eps,
                                            cap, mode=mode)
    else:
        raise ValueError(u'no local simulator for %s' % (heuristic.label,))
    out.json({u'center': center.tolist(), u'protected': protected,
              u'points': _one_based(ball.indices),
              u'paths': [_one_based(ball.indices[k] for k in path.order)
                         for path in found.paths],
              u'closed': found.closed,
              u'branch_count': found.branch_count,
              u'cap_exceeded': found.cap_exceeded})


def _classify(args, config, out):
    inst = instance.load(args.file)
    gadget = gadgets.load_gadget(args.gadget_file)
    heuristic = Heuristics.from_name(args.heuristic)
    tour = _heuristic_tour(heuristic, inst, config)
    params = classify.CopyParams.from_config(
        config, K=args.K, eps=args.eps, eps1=args.eps1, delta=args.delta,
        **({u'trials': args.trials} if args.trials else {}))
    planted = [record for record in inst.plants
               if len(record.member_indices) == gadget.size]
    reports = classify.classify_copies(inst, tour, heuristic, planted, gadget,
                                       params, config.heuristics.threads)
    for report in reports:
        record = report.to_record(u'classify', seed=config.seed, n=inst.n,
                                  gadget=gadget.kind,
                                  params={u'heuristic': heuristic.label})
        out.stream.write(record.as_json())
        out.stream.write(u'\n')
    out.json({u'summary': classify.summarize_reports(reports)})


def _stability(args, config, out):
    inst = instance.load(args.file)
    heuristic = Heuristics.from_name(args.heuristic)
    S = _positions(args.S, inst.n)
    Y = _positions(args.Y, inst.n) if args.Y else []
    rng = np.random.default_rng(config.seed)
    frequency = analysis.stability_trial(inst, S, Y, heuristic, args.delta,
                                         args.trials, rng)
    record = ExperimentRecord(u'stability', seed=config.seed, n=inst.n,
                              params={u'heuristic': heuristic.label,
                                      u'delta': args.delta,
                                      u'trials': args.trials,
                                      u'S': _one_based(S),
                                      u'Y': _one_based(Y)},
                              frequencies={u'changed': frequency})
    records.write_records([record], out.stream)


def _bnb(args, config, out):
    inst = instance.load(args.file)
    options = config.bnb
    if args.level_cap is not None:
        options = options._replace(level_cap=args.level_cap)
    if args.node_cap is not None:
        options = options._replace(node_cap=args.node_cap)
    stats, best = bnb.run_bfs_bnb(
        inst, heuristic=Heuristics.from_name(args.heuristic),
        bound=bnb.BoundKind.from_name(args.bound),
        incumbent=bnb.Incumbent.parse(args.incumbent),
        rule=bnb.BranchRule.from_name(args.rule), options=options,
        solver_options=config.solver)
    out.json({u'termination': stats.termination,
              u'node_count': stats.node_count,
              u'best_length': None if best is None else best.length,
              u'best_order': None if best is None else _one_based(best.order),
              u'growth_ratios': stats.growth_ratios()})
    if out.pretty:
        out.rows(records.BNB_COLUMNS, stats.as_rows())
    else:
        records.write_bnb_csv(stats, out.stream)


def _decide(args, config, out):
    provider = providers.toy_provider(args.variant, args.eps0)
    decision, transcript = decider.decide_set_cover(
        provider, args.heuristic, R=args.R, options=config.gadgets,
        sim_options=config.localsim)
    transcript[u'answer'] = decision
    out.json(transcript)


def _calibrate(args, config, out):
    provider = providers.toy_provider(args.variant)
    which = [w.strip() for w in args.which.split(u',') if w.strip()]
    results = decider.calibrate_constants(
        provider, trials=args.trials, seed=config.seed, steps=args.steps,
        options=config.gadgets, solver=config.solver, which=which)
    for result in results.values():
        out.json({u'name': result.name, u'value': result.value,
                  u'pass_rate': result.pass_rate, u'found': result.found,
                  u'monotone': result.is_monotone, u'grid': result.grid})


def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(u'--seed', type=int, default=None,
                        help=u'master seed, defaults to $TSPLAB_SEED')
    common.add_argument(u'--threads', type=int, default=None,
                        help=u'worker threads for copies and karp cells')
    common.add_argument(u'--log-level', default=u'WARNING',
                        choices=(u'DEBUG', u'INFO', u'WARNING', u'ERROR'))
    common.add_argument(u'--pretty', action=u'store_true',
                        help=u'aligned tables instead of CSV')
    common.add_argument(u'--out', default=None,
                        help=u'write results here instead of stdout')
    return common


def _heuristic_flag(parser, default=u'nn', allow_all=False):
    names = [h.label for h in Heuristics] + ([u'all'] if allow_all else [])
    parser.add_argument(u'--heuristic', default=default, choices=names)


def build_parser():
    """Builds the argument parser of every subcommand."""
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog=PROG, description=u'Euclidean TSP heuristics laboratory')
    parser.add_argument(u'--version', action=u'version',
                        version=u'%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest=u'command')
    sub.required = True

    def command(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = command(u'gen', _gen, u'generate a uniform instance')
    p.add_argument(u'--n', type=int, required=True)
    p.add_argument(u'--d', type=int, default=2)
    p.add_argument(u'--topology', default=Topology.TORUS.value,
                   choices=[t.value for t in Topology])
    p.add_argument(u'--bits', type=int, default=None)

    p = command(u'solve', _solve, u'solve an instance exactly')
    p.add_argument(u'file')
    p.add_argument(u'--mode', default=u'tour', choices=(u'tour', u'path'))
    p.add_argument(u'--endpoints', default=None, help=u'i,j')

    p = command(u'heur', _heur, u'run the tour heuristics')
    p.add_argument(u'file')
    _heuristic_flag(p, default=u'all', allow_all=True)
    p.add_argument(u'--reference', default=u'auto',
                   choices=(u'auto', u'exact', u'onetree'))

    p = command(u'plant', _plant, u'build a gadget and plant copies of it')
    p.add_argument(u'file', nargs=u'?', default=None)
    p.add_argument(u'--gadget', required=True,
                   help=u'one of ' + u', '.join(_GADGETS))
    p.add_argument(u'--R', type=float, default=gadgets.DEFAULT_R)
    p.add_argument(u'--k', type=int, default=10)
    p.add_argument(u'--variant', default=providers.YES,
                   choices=providers.VARIANTS)
    _heuristic_flag(p)
    p.add_argument(u'--copies', type=int, default=1)
    p.add_argument(u'--clearance', type=float, default=1.0)
    p.add_argument(u'--gadget-out', default=None)

    p = command(u'detect', _detect, u'find aligned copies of a gadget')
    p.add_argument(u'file')
    p.add_argument(u'--gadget-file', required=True)
    p.add_argument(u'--eps', type=float, required=True)
    p.add_argument(u'--R', type=float, required=True)

    p = command(u'simulate', _simulate, u'simulate a heuristic locally')
    p.add_argument(u'file')
    _heuristic_flag(p)
    p.add_argument(u'--center', required=True, help=u'x,y')
    p.add_argument(u'--R', type=float, default=gadgets.DEFAULT_R)
    p.add_argument(u'--eps', type=float, default=1e-6)
    p.add_argument(u'--scale', type=float, default=1.0)
    p.add_argument(u'--cap', type=int, default=None)

    p = command(u'classify', _classify, u'classify the planted copies')
    p.add_argument(u'file')
    p.add_argument(u'--gadget-file', required=True)
    _heuristic_flag(p)
    p.add_argument(u'--K', type=int, default=classify.CopyParams.DEFAULT_K)
    p.add_argument(u'--eps', type=float,
                   default=classify.CopyParams.DEFAULT_EPS)
    p.add_argument(u'--eps1', type=float,
                   default=classify.CopyParams.DEFAULT_EPS1)
    p.add_argument(u'--delta', type=float, default=None)
    p.add_argument(u'--trials', type=int, default=None)

    p = command(u'stability', _stability, u'measure path stability')
    p.add_argument(u'file')
    _heuristic_flag(p)
    p.add_argument(u'--S', required=True, help=u'i,j,...')
    p.add_argument(u'--Y', default=None, help=u'i,j,...')
    p.add_argument(u'--delta', type=float, required=True)
    p.add_argument(u'--trials', type=int, default=400)

    p = command(u'bnb', _bnb, u'run breadth-first branch-and-bound')
    p.add_argument(u'file')
    _heuristic_flag(p)
    p.add_argument(u'--bound', default=bnb.BoundKind.ONE_TREE.value,
                   choices=[b.value for b in bnb.BoundKind])
    p.add_argument(u'--incumbent', default=bnb.Incumbent.HEURISTIC,
                   help=u'heur, exact or fixed:B')
    p.add_argument(u'--rule', default=bnb.BranchRule.LEXICOGRAPHIC.label,
                   choices=[r.label for r in bnb.BranchRule])
    p.add_argument(u'--level-cap', type=int, default=None)
    p.add_argument(u'--node-cap', type=int, default=None)

    p = command(u'decide', _decide, u'run the decider on a toy provider')
    p.add_argument(u'--variant', default=providers.YES,
                   choices=providers.VARIANTS)
    _heuristic_flag(p, default=u'greedy')
    p.add_argument(u'--eps0', type=float, default=providers.DEFAULT_EPS0)
    p.add_argument(u'--R', type=float, default=gadgets.DEFAULT_R)

    p = command(u'calibrate', _calibrate, u'calibrate D0, D1 and D2')
    p.add_argument(u'--variant', default=providers.YES,
                   choices=providers.VARIANTS)
    p.add_argument(u'--trials', type=int, default=decider.DEFAULT_TRIALS)
    p.add_argument(u'--steps', type=int, default=decider.DEFAULT_STEPS)
    p.add_argument(u'--which', default=u'D0,D1,D2')
    return parser


def _run(args, stdout):
    config = _effective_config(args)
    exact.use_cache(caches.ExactCacheOptions(config.solver.cache_entries))
    _echo(args, config, stdout)
    if args.out:
        with open(args.out, u'w') as stream:
            args.func(args, config, _Output(stream, args.pretty))
    else:
        args.func(args, config, _Output(stdout, args.pretty))


def main(argv=None, stdout=None, stderr=None):
    """Runs one subcommand.

    Returns:
      int: the exit status
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        stream=stderr)
    try:
        _run(args, stdout)
    except AssertionError as e:
        _logger.error(u'%s failed a consistency check', args.command,
                      exc_info=True)
        stderr.write(u'%s: assertion failed: %s\n' % (PROG, e))
        return EXIT_ASSERTION
    except (ValueError, LabConfigException, HeuristicStuck, IOError,
            OSError) as e:
        stderr.write(u'%s: error: %s\n' % (PROG, e))
        return EXIT_BAD_INPUT
    return EXIT_OK


if __name__ == u'__main__':
    sys.exit(main())
