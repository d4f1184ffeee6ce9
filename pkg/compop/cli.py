"""Command-line front end: symbols and sets in, diagnostics and constructions out."""
import argparse
import csv
import json
import logging
import math
import os
import platform
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy
from tabulate import tabulate

from . import __version__
from .boundary_sets import parse_set, parse_weight
from .capacity import capacity_sequence, qp_oracle
from .constructions import build_peak_symbol, build_rec_pipeline, check_lemma_norme, check_theorem_thnorme, \
    parse_growth
from .diagnostics import BoundednessSweep, CarlesonSweep, CompactnessSweep, PowerNormDiagnostics, hs_dalpha, \
    hs_dirichlet, hs_hardy
from .spaces import SpaceParams, besov_norm_p, dirichlet_integral, hardy_norm_sq
from .symbols import parse_symbol, to_series
from .utils import DEFAULTS, CompOpException, PreconditionError, is_power_of_two
from .verify import SUITES, run_suite

logger = logging.getLogger(__name__)

COMMANDS = ('norms', 'diag', 'hs', 'capacity', 'construct-peak', 'construct-outer', 'construct-rec', 'verify')
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    symbol: str = None
    set: str = None
    space: str = 'p=2,alpha=0,beta=0'
    weight: str = 'log:2'
    h: str = 'log'
    alpha: float = 0.0
    M: int = None
    N: int = None
    n_max: int = None
    atoms: int = None
    budgets: list = None
    psi_ratio: float = 2.0
    carleson: bool = False
    oracle: bool = False
    suite: str = 'identities'
    output: str = None
    fmt: str = 'csv'
    C: float = DEFAULTS['RATIO_C']
    seed: int = 0
    strict: bool = False
    progress: bool = False

    def validate(self):
        """Raises PreconditionError naming the offending field."""
        if self.command not in COMMANDS:
            raise PreconditionError('config.command: unknown command %r' % (self.command,))
        if self.command in ('norms', 'diag', 'hs') and not self.symbol:
            raise PreconditionError('config.symbol: required by %s' % self.command)
        if self.command in ('capacity', 'construct-peak', 'construct-outer', 'construct-rec') and not self.set:
            raise PreconditionError('config.set: required by %s' % self.command)
        if self.M is not None and not is_power_of_two(self.M):
            raise PreconditionError('config.M: grid size must be a power of two, got %r' % (self.M,))
        for name in ('N', 'n_max', 'atoms'):
            value = getattr(self, name)
            if value is not None and int(value) < 1:
                raise PreconditionError('config.%s: must be positive, got %r' % (name, value))
        if self.budgets is not None and (len(self.budgets) < 2 or min(self.budgets) < 1):
            raise PreconditionError('config.budgets: need at least two positive atom budgets')
        if self.fmt not in ('csv', 'json'):
            raise PreconditionError('config.fmt: expected csv or json, got %r' % (self.fmt,))
        if self.suite not in SUITES:
            raise PreconditionError('config.suite: expected one of %s, got %r' % (sorted(SUITES), self.suite))
        if not self.C >= 1.0:
            raise PreconditionError('config.C: ratio constant must be >= 1, got %r' % (self.C,))
        return self


@dataclass
class Report:
    title: str
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def _series_config(cfg, default_N):
    return default_N if cfg.N is None else int(cfg.N)


def cmd_norms(cfg):
    phi = parse_symbol(cfg.symbol)
    params = SpaceParams.parse(cfg.space)
    N = _series_config(cfg, DEFAULTS['N_SMOOTH'])
    f = to_series(phi, N)
    metric = PowerNormDiagnostics({'N': N, 'N_MAX': cfg.n_max or 64})
    res = metric.evaluate(phi)
    summary = {'dirichlet_integral': dirichlet_integral(f), 'hardy_norm_sq': hardy_norm_sq(f),
               'besov_norm_p': besov_norm_p(f, params), 'series_residual': f.residual}
    summary.update(metric.summary_results(res))
    verdicts = [res['sup_verdict'], res['limit_verdict'], res['hardy_verdict']]
    return Report('POWER NORMS', ['n', 'dirichlet', 'hardy_sq', 'reliable'], metric.table_rows(res), summary,
                  verdicts, {'detailed': metric.detailed_results(res)})


def cmd_diag(cfg):
    phi = parse_symbol(cfg.symbol)
    config = {'SPACE': cfg.space}
    bounded = BoundednessSweep(config)
    res = bounded.evaluate(phi)
    compact_verdict = CompactnessSweep(config)._verdict(res['trend'])
    rows = [['lambda_gap', g, q, res['trend']] for g, q in zip(res['gaps'], res['Q'])]
    summary = {'space': cfg.space, 'delta': res['delta'], 'bounded_verdict': res['verdict'],
               'compact_verdict': compact_verdict, 'slope': res['slope'], 'Q_sup': res['Q_sup']}
    verdicts = [res['verdict'], compact_verdict]
    extra = {'sweep': bounded.detailed_results(res)}
    if cfg.carleson:
        sweep = CarlesonSweep()
        box = sweep.evaluate(phi)
        rows += [['box_length', ell, q, box['trend']] for ell, q in zip(box['box_lengths'], box['quotient'])]
        summary.update({'carleson_' + k: v for k, v in sweep.summary_results(box).items()})
        verdicts += [box['sup_verdict'], box['limit_verdict']]
        extra['carleson'] = sweep.detailed_results(box)
    return Report('BOUNDEDNESS AND COMPACTNESS', ['kind', 'lambda_or_boxlen', 'quantity', 'trend'], rows,
                  summary, verdicts, extra)


def cmd_hs(cfg):
    phi = parse_symbol(cfg.symbol)
    space = cfg.space.strip()
    if space.upper() == 'H2':
        rep = hs_hardy(phi)
    elif space.upper() == 'D':
        rep = hs_dirichlet(phi, cfg.n_max)
    elif space.lower().startswith('d_alpha'):
        _, _, value = space.partition('=')
        rep = hs_dalpha(phi, float(value) if value else cfg.alpha)
    else:
        raise PreconditionError('config.space: hs expects H2, D or D_alpha=<a>, got %r' % (space,))
    rows = [['integral', k, v] for k, v in enumerate(np.atleast_1d(rep.integral_partials))]
    rows += [['series', k + 1, v] for k, v in enumerate(np.atleast_1d(rep.series_partials))]
    summary = {'space': rep.space, 'integral': rep.integral_value, 'series': rep.series_value,
               'layercake': rep.layercake_value, 'verdict': rep.verdict}
    for key in ('series_trend', 'integral_trend', 'relative_gap', 'ratio', 'ratio_verdict'):
        if key in rep.extra:
            summary[key] = rep.extra[key]
    return Report('HILBERT-SCHMIDT', ['route', 'index', 'partial'], rows, summary, [rep.verdict])


def cmd_capacity(cfg):
    E = parse_set(cfg.set)
    budgets = tuple(cfg.budgets) if cfg.budgets else (32, 64, 128, 256, 512)
    if cfg.atoms:
        budgets = tuple(b for b in budgets if b < cfg.atoms) + (int(cfg.atoms),)
    seq = capacity_sequence(E, cfg.alpha, budgets)
    rows = [[int(m), r.value, r.energy, r.duality_gap, r.converged]
            for m, r in zip(seq['budgets'], seq['results'])]
    summary = {'alpha': cfg.alpha, 'measure': E.measure, 'components': E.n_components,
               'capacity': float(seq['values'][-1]), 'trend': seq['trend'], 'converged': seq['converged']}
    if cfg.oracle and cfg.alpha == 0.0 and not E.is_empty:
        summary['qp_oracle'] = qp_oracle(E, max(budgets))
    verdicts = [seq['trend']] + (['inconclusive'] if not seq['converged'] else [])
    return Report('CAPACITY', ['atoms', 'capacity', 'energy', 'duality_gap', 'converged'], rows, summary, verdicts,
                  {'results': [r.to_json() for r in seq['results']]})


def cmd_construct_peak(cfg):
    E = parse_set(cfg.set)
    pc = build_peak_symbol(E, cfg.M)
    rows = [[a, b, t, p] for (a, b), t, p in zip(pc.gaps, pc.tau, pc.tau_partials)]
    summary = {'arcs': len(pc.gaps), 'certificate': pc.certificate, 'measured': pc.measured,
               'certificate_holds': pc.certificate_holds, 'g_norm_sq': pc.g_norm_sq,
               'g_norm_sq_exact': pc.g_norm_sq_exact}
    verdicts = ['pass' if pc.certificate_holds else 'fail']
    return Report('PEAK CONSTRUCTION', ['arc_start', 'arc_end', 'tau', 'tau_sq_length_partial'], rows, summary,
                  verdicts, {'construction': pc.to_json(), 'contact': pc.contact})


def cmd_construct_outer(cfg):
    E = parse_set(cfg.set)
    w = parse_weight(cfg.weight)
    config = {'C': cfg.C}
    if cfg.M is not None:
        config['M'] = cfg.M
    if cfg.N is not None:
        config['N'] = cfg.N
    equivalence = check_theorem_thnorme(E, w, config)
    try:
        two_sided = check_lemma_norme(E, w, config)
    except PreconditionError as err:
        logger.warning('%s', err)
        two_sided = {'lhs': float('nan'), 'rhs': float('nan'), 'passed': None, 'ratios': []}
    rows = [['tube_integral', k, v] for k, v in enumerate(equivalence['integral_partials'])]
    rows += [['hs_series', k + 1, v] for k, v in enumerate(equivalence['hs_series_partials'])]
    summary = {'weight': w.name, 'dirichlet_lhs': two_sided['lhs'], 'dirichlet_rhs': two_sided['rhs'],
               'dirichlet_ratio_passed': two_sided['passed'], 'integral_verdict': equivalence['integral_verdict'],
               'hs_verdict': equivalence['hs_verdict'], 'agree': equivalence['agree'],
               'hardy_integral_verdict': equivalence['hardy_integral_verdict'],
               'hypothesis_holds': equivalence['hypothesis_holds']}
    verdicts = [equivalence['integral_verdict'], equivalence['hs_verdict']]
    return Report('OUTER CONSTRUCTION', ['sequence', 'index', 'partial'], rows, summary, verdicts,
                  {'dirichlet_check': two_sided, 'tube_check': equivalence})


def cmd_construct_rec(cfg):
    E = parse_set(cfg.set)
    config = {'PSI_RATIO': cfg.psi_ratio, 'PROGRESS': cfg.progress}
    if cfg.M is not None:
        config['M'] = cfg.M
    if cfg.N is not None:
        config['N'] = cfg.N
    if cfg.atoms is not None:
        config['ATOMS'] = cfg.atoms
    rec = build_rec_pipeline(E, parse_growth(cfg.h), config)
    rep = rec.report
    rows = [[t, c, e] for t, c, e in zip(rec.t_grid, rec.caps, rec.eta)]
    keys = ('scale', 'max_imag', 'psi_plain_verdict', 'psi_weighted_verdict', 'dirichlet_verdict',
            'dirichlet_divergence_flag', 'hs_verdict', 'chain_holds', 'weighted_capacity_verdict',
            'weighted_capacity_domination', 'level_inclusion_holds')
    summary = {k: rep[k] for k in keys}
    verdicts = [rep['dirichlet_verdict'], rep['hs_verdict'], rep['weighted_capacity_verdict']]
    return Report('CAPACITY OPTIMALITY PIPELINE', ['t', 'capacity', 'eta'], rows, summary, verdicts,
                  {'construction': rec.to_json(), 'report': rep})


def cmd_verify(cfg):
    rows = run_suite(cfg.suite, cfg.seed, cfg.C, cfg.progress)
    table = [[r['suite'], r['criterion'], r['status'], r['value'], r['bound']] for r in rows]
    statuses = [r['status'] for r in rows]
    summary = {s: statuses.count(s) for s in ('pass', 'fail', 'inconclusive')}
    return Report('VERIFY %s' % cfg.suite.upper(), ['suite', 'criterion', 'status', 'value', 'bound'], table,
                  summary, statuses, {'checks': rows})


HANDLERS = {'norms': cmd_norms, 'diag': cmd_diag, 'hs': cmd_hs, 'capacity': cmd_capacity,
            'construct-peak': cmd_construct_peak, 'construct-outer': cmd_construct_outer,
            'construct-rec': cmd_construct_rec, 'verify': cmd_verify}


def json_safe(obj):
    """Plain JSON types; non-finite floats become strings, complex numbers [re, im]."""
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return json_safe(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if isinstance(obj, (np.complexfloating, complex)):
        return [json_safe(obj.real), json_safe(obj.imag)]
    if isinstance(obj, Path):
        return str(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _cell(value):
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.complexfloating, complex)):
        return repr(complex(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return ' '.join(_cell(v) for v in value)
    return str(json_safe(value))


def metadata(cfg):
    return {'command': cfg.command, 'config': json_safe(asdict(cfg)), 'seed': cfg.seed,
            'versions': {'compop': __version__, 'numpy': np.__version__, 'scipy': scipy.__version__,
                         'python': platform.python_version()}}


def write_csv(report, path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(report.columns)
        for row in report.rows:
            w.writerow([_cell(v) for v in row])


def write_json(report, cfg, path):
    payload = {'metadata': metadata(cfg), 'summary': report.summary, 'columns': report.columns,
               'rows': report.rows, 'verdicts': report.verdicts, 'extra': report.extra}
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(json_safe(payload), f, indent=2, sort_keys=True)
        f.write('\n')


def write_outputs(report, cfg):
    """Writes the report; CSV gets a sidecar <output>.meta.json with the reproducibility header."""
    if not cfg.output:
        return []
    path = Path(cfg.output)
    if path.parent and not path.parent.exists():
        os.makedirs(path.parent, exist_ok=True)
    if cfg.fmt == 'json':
        write_json(report, cfg, path)
        return [path]
    write_csv(report, path)
    meta = path.with_name(path.name + '.meta.json')
    with open(meta, 'w', encoding='utf-8') as f:
        json.dump(json_safe({'metadata': metadata(cfg), 'summary': report.summary, 'verdicts': report.verdicts}),
                  f, indent=2, sort_keys=True)
        f.write('\n')
    return [path, meta]


def print_report(report, cfg, max_rows=40):
    print("=" * 60)
    print(report.title.center(60))
    print("=" * 60)
    for key in ('symbol', 'set', 'space'):
        value = getattr(cfg, key)
        if value and key in _INPUTS[cfg.command]:
            print(f"{key.capitalize()}: {value}")
    print("=" * 60)
    for name, value in report.summary.items():
        if isinstance(value, (bool, np.bool_)) or value is None:
            print(f"{name:.<50}{str(value):>8}")
        elif isinstance(value, (int, float, np.integer, np.floating)):
            print(f"{name:.<50}{float(value):>8.4f}")
        else:
            print(f"{name:.<50}{str(value):>8}")
    if report.rows:
        print("\nDetailed Results".center(60))
        print("=" * 60)
        shown = report.rows[:max_rows]
        print(tabulate(shown, headers=report.columns, floatfmt='.6g'))
        if len(report.rows) > max_rows:
            print('... %i more rows' % (len(report.rows) - max_rows))


_INPUTS = {'norms': ('symbol', 'space'), 'diag': ('symbol', 'space'), 'hs': ('symbol', 'space'),
           'capacity': ('set',), 'construct-peak': ('set',), 'construct-outer': ('set',),
           'construct-rec': ('set',), 'verify': ()}


def run(cfg, quiet=False):
    """Dispatches one command; returns (exit status, report)."""
    cfg.validate()
    report = HANDLERS[cfg.command](cfg)
    for path in write_outputs(report, cfg):
        logger.info('wrote %s', path)
    if not quiet:
        print_report(report, cfg)
    inconclusive = any('inconclusive' in str(v) for v in report.verdicts)
    if cfg.command == 'verify':
        inconclusive = any(v != 'pass' for v in report.verdicts)
    return (EXIT_INCONCLUSIVE if cfg.strict and inconclusive else EXIT_OK), report


def build_parser():
    parser = argparse.ArgumentParser(prog='compop', description="Composition operators on Dirichlet-type spaces.")
    parser.add_argument("--threads", type=int, help="FFT worker threads (sets COMPOP_NUM_THREADS).")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress at INFO level.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", help="Path of the CSV/JSON report.")
        p.add_argument("--format", dest="fmt", choices=['csv', 'json'], default='csv', help="Report format.")
        p.add_argument("--seed", type=int, default=0, help="Seed for randomized check points.")
        p.add_argument("--strict", action="store_true", help="Exit 2 on an inconclusive verdict.")
        p.add_argument("--progress", action="store_true", help="Show progress bars.")
        p.add_argument("--C", dest="C", type=float, default=DEFAULTS['RATIO_C'], help="Two-sided ratio constant.")
        p.add_argument("--M", dest="M", type=int, help="Boundary grid size (power of two).")
        p.add_argument("--N", dest="N", type=int, help="Series truncation order.")

    for name, help_text in (('norms', "Dirichlet, Hardy and power norms of a symbol."),
                            ('diag', "Boundedness / compactness sweep over test functions."),
                            ('hs', "Hilbert-Schmidt test on H2, D or D_alpha.")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--symbol", required=True, help="Symbol: compact syntax, inline JSON or a .json path.")
        p.add_argument("--space", default='D' if name == 'hs' else 'p=2,alpha=0,beta=0', help="Space parameters.")
        p.add_argument("--alpha", type=float, default=0.5 if name == 'hs' else 0.0, help="alpha for D_alpha.")
        p.add_argument("--n-max", dest="n_max", type=int, help="Number of powers.")
        if name == 'diag':
            p.add_argument("--carleson", action="store_true", help="Add the Carleson box sweep.")
        common(p)

    p = sub.add_parser('capacity', help="Capacity sequence of a boundary set.")
    p.add_argument("--set", required=True, help="Set: point:a, points:a,b, arc:a,b, circle, cantor:r,k, JSON.")
    p.add_argument("--alpha", type=float, default=0.0, help="Energy exponent in [0, 1).")
    p.add_argument("--atoms", type=int, help="Largest atom budget.")
    p.add_argument("--budgets", type=int, nargs='+', help="Atom budgets of the sequence.")
    p.add_argument("--oracle", action="store_true", help="Add the dense QP oracle (alpha = 0).")
    common(p)

    p = sub.add_parser('construct-peak', help="Peak symbol on a null set.")
    p.add_argument("--set", required=True, help="Target contact set.")
    common(p)

    p = sub.add_parser('construct-outer', help="Outer symbol f_{w,E} and its Dirichlet / HS checks.")
    p.add_argument("--set", required=True, help="Set E.")
    p.add_argument("--weight", default='log:2', help="Weight: log:b, linear:c, const:c.")
    common(p)

    p = sub.add_parser('construct-rec', help="Symbol showing the capacity condition is sharp.")
    p.add_argument("--set", required=True, help="Set E of capacity zero.")
    p.add_argument("--h", default='log', help="Growth h: log, loglog, power:a.")
    p.add_argument("--atoms", type=int, help="Atom budget of each capacity call.")
    p.add_argument("--psi-ratio", dest="psi_ratio", type=float, default=2.0, help="Block ratio of psi.")
    common(p)

    p = sub.add_parser('verify', help="Run a bundle of end-to-end checks.")
    p.add_argument("--suite", choices=sorted(SUITES), default='identities', help="Suite name.")
    common(p)
    return parser


def config_from_args(args):
    values = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(**values)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    if args.threads is not None:
        os.environ['COMPOP_NUM_THREADS'] = str(args.threads)
    try:
        status, _ = run(config_from_args(args))
    except CompOpException as err:
        print('error: %s' % err, file=sys.stderr)
        return EXIT_ERROR
    return status


if __name__ == "__main__":
    sys.exit(main())
