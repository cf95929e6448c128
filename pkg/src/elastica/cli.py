"""
Command line entry point ``elastica``.

Exit status: 0 on success, 1 for usage errors (bad flags, specs, files),
2 for numerical failures (singular systems, broken lifts, divergence,
failing gradient checks).
"""

import argparse
import json
import math
import sys
from pathlib import Path

from .checks import run_gradcheck
from .curves import (LiftError, ShapeError, build_bump_path, build_linear_path, eccentricity,
                     generate_shape, parse_shape, resample_arclength)
from .gradient import assemble_gradient, path_energy
from .io import (atomic_write, gradient_svg, load_path, load_polygon, save_curve, save_gradient,
                 save_landscape, save_path, save_trace)
from .landscape import LandscapeConfig, energy_landscape
from .metric import ElasticParams
from .straighten import StraightenConfig, straighten
from .tridiag import NearSingularError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f'{self.prog}: error: {message}', file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f'expected a positive integer, got {text}')
    return value


def _delta(text):
    if text == 'auto':
        return None
    value = float(text)
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f'step must be positive or "auto", got {text}')
    return value


def _params(args, fallback=None):
    base = fallback or ElasticParams()
    a = base.a if args.a is None else args.a
    b = base.b if args.b is None else args.b
    try:
        return ElasticParams(a, b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_out(out, *inputs):
    if out is None:
        return
    out = Path(out).resolve()
    for item in inputs:
        if item is not None and Path(item).exists() and Path(item).resolve() == out:
            raise UsageError(f'output {out} would overwrite an input')


def _shape_spec(args):
    name = args.spec.partition(':')[0].lower()
    extra = {'ellipse': ['e'], 'superellipse': ['p'], 'family': ['u', 'v']}.get(name, [])
    given = [getattr(args, k) for k in extra]
    if ':' in args.spec or not extra:
        if any(g is not None for g in given):
            raise UsageError(f'give the parameters of {name!r} either inline or as flags, not both')
        return args.spec
    if any(g is None for g in given):
        raise UsageError(f'shape {name!r} needs ' + ', '.join(f'--{k}' for k in extra))
    return (name,) + tuple(given)


def _load_chain(source, n):
    """A curve file (resampled to n rods) or an analytic shape spec."""
    if Path(source).is_file():
        poly = load_polygon(source)
        return resample_arclength(poly, n or len(poly))
    try:
        parse_shape(source)
    except ShapeError as exc:
        raise UsageError(f'{source!r} is neither a file nor a shape spec ({exc})') from None
    return generate_shape(source, n or 100)


# --- subcommands ------------------------------------------------------------

def cmd_generate(args):
    spec = _shape_spec(args)
    try:
        chain = generate_shape(spec, args.n)
    except ShapeError as exc:
        raise UsageError(f'bad shape {args.spec!r}: {exc}') from None
    if args.out:
        save_curve(args.out, chain)
    else:
        sys.stdout.write(''.join(f'{x!r},{y!r}\n' for x, y in chain.vertices.tolist()))
    print(f'generated {chain.n} vertices, perimeter {chain.perimeter:.15f}, '
          f'eccentricity {eccentricity(chain):.6f}', file=sys.stderr)


def cmd_interp(args):
    _check_out(args.out, args.start, args.end)
    n = args.n
    if n is None:
        # a shape spec takes its vertex count from the curve file, if any
        files = [f for f in (args.start, args.end) if Path(f).is_file()]
        n = len(load_polygon(files[0])) if files else None
    a = _load_chain(args.start, n)
    b = _load_chain(args.end, n)
    if a.n != b.n:
        raise UsageError(f'curves have different vertex counts {a.n} and {b.n}; pass --n')
    if args.mode == 'bump':
        path = build_bump_path(a, b, args.nt)
    else:
        path = build_linear_path(a, b, args.nt, resample=not args.no_resample)
    save_path(args.out, path, _params(args), slice_files=args.slice_files)
    print(f'wrote path with n={path.n}, N_t={path.n_t} to {args.out}')


def cmd_energy(args):
    _check_out(args.out, args.path)
    path, stored, _ = load_path(args.path)
    params = _params(args, stored)
    energy, integrand = path_energy(path, params, return_integrand=True)
    print(f'E = {energy!r}')
    for t, val in zip(path.times, integrand):
        print(f'  t={t:.6f}  integrand={val:.17g}')
    if args.out:
        rows = ['t,integrand'] + [f'{t!r},{v!r}' for t, v in zip(path.times.tolist(), integrand.tolist())]
        atomic_write(args.out, '\n'.join(rows) + '\n')


def cmd_gradient(args):
    _check_out(args.out, args.path)
    _check_out(args.svg, args.path)
    path, stored, _ = load_path(args.path)
    params = _params(args, stored)
    grad = assemble_gradient(path, params, scheme=args.scheme)
    print(f'E = {grad.energy!r}  |grad E| = {grad.norm!r}  closure error = {grad.closure_error():.3e}')
    for j, s in enumerate(grad.slice_norms):
        print(f'  slice {j:3d}  norm {s:.6e}')
    if args.out:
        save_gradient(args.out, grad, params, extra={'scheme': args.scheme})
    if args.svg:
        atomic_write(args.svg, gradient_svg(path, grad, uniform=args.scaling == 'uniform'))


def cmd_straighten(args):
    _check_out(args.out, args.path)
    path, stored, _ = load_path(args.path)
    params = _params(args, stored)
    try:
        cfg = StraightenConfig(params=params, delta=args.delta, max_iters=args.max_iters,
                               grad_tol=args.tol, reproject_every=args.reproject_every,
                               line_search=args.line_search, trace_every=args.trace_every,
                               scheme=args.scheme, order=args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    snapshots = {}

    def progress(it, p, energy):
        if args.snapshot_every and it % args.snapshot_every == 0:
            snapshots[it] = p
        if args.verbose:
            print(f'iter {it:6d}  E = {energy:.10g}', flush=True)

    report = straighten(path, cfg, callback=progress)
    out.mkdir(parents=True, exist_ok=True)
    save_trace(out / 'energy_trace.csv', report.trace_iters, report.energy_trace)
    save_path(out / 'final_path.json', report.final_path, params)
    for it, p in snapshots.items():
        save_path(out / f'snapshot_{it:06d}.json', p, params)
    summary = {
        'status': report.status, 'iterations': report.iterations, 'message': report.message,
        'initial_energy': report.initial_energy, 'final_energy': report.final_energy,
        'final_grad_norm': float(report.grad_norm_trace[-1]),
        'max_rod_deviation': float(report.rod_deviation_trace.max()),
        'delta': report.delta if math.isfinite(report.delta) else None,
        'a': params.a, 'b': params.b,
    }
    atomic_write(out / 'report.json', json.dumps(summary, indent=1) + '\n')
    print(f'{report.status} after {report.iterations} iterations: '
          f'E {report.initial_energy:.6g} -> {report.final_energy:.6g}')
    if report.status == 'diverged':
        raise NumericalFailure(report.message or 'descent diverged')


def cmd_landscape(args):
    try:
        cfg = LandscapeConfig(params=_params(args), grid=args.grid, n=args.n, n_t=args.nt)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    land = energy_landscape(cfg)
    if args.out:
        save_landscape(args.out, land.us, land.vs, land.energy)
    print(f'a={cfg.params.a:g} b={cfg.params.b:g}  max E along ellipse line {land.stretch_max:.6g}, '
          f'along square line {land.bend_max:.6g}, ratio {land.anisotropy:.4g}')


def cmd_gradcheck(args):
    params = _params(args)
    results = run_gradcheck(seed=args.seed, n=args.n, n_t=args.nt, params=params)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise NumericalFailure('failed checks: ' + ', '.join(failed))
    print('all checks passed')


# --- parser -----------------------------------------------------------------

def build_parser():
    p = _Parser(prog='elastica', description='Geodesics between closed curves under elastic metrics.')
    sub = p.add_subparsers(dest='command', required=True, parser_class=_Parser)

    def ab(sp):
        sp.add_argument('--a', type=float, default=None, help='stretch weight (default: manifest or 1)')
        sp.add_argument('--b', type=float, default=None, help='bend weight (default: manifest or 1)')

    g = sub.add_parser('generate', help='write an equal-rod curve file for an analytic shape')
    g.add_argument('spec', help='circle | ellipse[:e] | superellipse[:p] | family[:u,v]')
    g.add_argument('--e', type=float)
    g.add_argument('--p', type=float)
    g.add_argument('--u', type=float)
    g.add_argument('--v', type=float)
    g.add_argument('--n', type=int, default=100)
    g.add_argument('--out')
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser('interp', help='build an initial path between two curves')
    i.add_argument('start', help='curve file or shape spec')
    i.add_argument('end', help='curve file or shape spec (the middle shape for --mode bump)')
    i.add_argument('--mode', choices=['linear', 'bump'], default='linear')
    i.add_argument('--n', type=_positive_int, default=None)
    i.add_argument('--nt', type=_positive_int, default=20)
    i.add_argument('--no-resample', action='store_true')
    i.add_argument('--slice-files', action='store_true')
    i.add_argument('--out', required=True)
    ab(i)
    i.set_defaults(func=cmd_interp)

    e = sub.add_parser('energy', help='path energy and its integrand per slice')
    e.add_argument('path')
    e.add_argument('--out', help='CSV of the integrand')
    ab(e)
    e.set_defaults(func=cmd_energy)

    gr = sub.add_parser('gradient', help='energy gradient dump and optional SVG')
    gr.add_argument('path')
    gr.add_argument('--out')
    gr.add_argument('--svg')
    gr.add_argument('--scaling', choices=['uniform', 'slice'], default='uniform')
    gr.add_argument('--scheme', choices=['continuous', 'discrete'], default='continuous')
    ab(gr)
    gr.set_defaults(func=cmd_gradient)

    s = sub.add_parser('straighten', help='path-straightening descent')
    s.add_argument('path')
    s.add_argument('--delta', type=_delta, default=None, help='step size or "auto" (default)')
    s.add_argument('--max-iters', type=_positive_int, default=1000)
    s.add_argument('--tol', type=float, default=1e-3)
    s.add_argument('--reproject-every', type=int, default=50)
    s.add_argument('--line-search', action=argparse.BooleanOptionalAction, default=True)
    s.add_argument('--trace-every', type=_positive_int, default=1)
    s.add_argument('--snapshot-every', type=int, default=0)
    s.add_argument('--scheme', choices=['continuous', 'discrete'], default='discrete')
    s.add_argument('--order', type=int, choices=[2, 4], default=2,
                   help='time difference order of the descended energy')
    s.add_argument('--verbose', action='store_true')
    s.add_argument('--out', required=True, help='output directory')
    ab(s)
    s.set_defaults(func=cmd_straighten)

    la = sub.add_parser('landscape', help='energy over the two-parameter bump family')
    la.add_argument('--grid', type=int, default=5)
    la.add_argument('--n', type=_positive_int, default=100)
    la.add_argument('--nt', type=_positive_int, default=20)
    la.add_argument('--out')
    ab(la)
    la.set_defaults(func=cmd_landscape)

    c = sub.add_parser('gradcheck', help='finite-difference checks of the gradient')
    c.add_argument('--seed', type=int, default=0)
    c.add_argument('--n', type=_positive_int, default=60)
    c.add_argument('--nt', type=_positive_int, default=32)
    ab(c)
    c.set_defaults(func=cmd_gradcheck)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f'elastica {args.command}: error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, NearSingularError, LiftError, FloatingPointError) as exc:
        print(f'elastica {args.command}: numerical failure: {exc}', file=sys.stderr)
        return EXIT_NUMERIC
    except (ShapeError, ValueError, OSError) as exc:
        print(f'elastica {args.command}: error: {exc}', file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
