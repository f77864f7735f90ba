# Contains the command line front end
import functools
import os
import sys

import click
from loguru import logger

import poly
from errors import BOUND_VIOLATED_EXIT_CODE, HyersUlamError, InputError, NotHyperbolic
from expfun import l1_norm
from fileio import (dumps, poly_to_dict, read_function, read_json, read_poly, validate, write_frame, write_json,
                    write_samples)
from fourier import REFERENCE_N, REFERENCE_T, Grid, l1_norm_numeric, sample
from greens import AXIS_TOL, green_function, is_hyperbolic
from hyersulam import (PROBE_LADDER, VERIFY_SLACK, Problem, ProbeTable, counterexample_probe, perturbation_suite,
                       probe_ladder, residual, solve, verify)

SEED_VARIABLE = 'HU_L1_SEED'
# modules that log through loguru but stay silent until the command line enables them
LIBRARY_MODULES = ('poly', 'expfun', 'fourier', 'greens', 'hyersulam', 'fileio')
AXIS_TOL_RANGE = (1e-12, 1e-3)
VERIFY_SLACK_RANGE = (0.0, 1e-2)


class Config:
    """Grid, tolerances and output path shared by the subcommands

    Parameters
    ----------
    T : float, optional
        Half-width of the sampling grid

    N : int, optional
        Samples on the grid, a power of two >= 8

    axis_tol : float, optional
        Imaginary-axis exclusion, within `AXIS_TOL_RANGE`

    verify_slack : float, optional
        Relative slack on the bound, within `VERIFY_SLACK_RANGE`

    out : str, optional
        Default output path
    """
    def __init__(self, T=REFERENCE_T, N=REFERENCE_N, axis_tol=AXIS_TOL, verify_slack=VERIFY_SLACK, out=None):
        self.grid = Grid(T, N)
        if not AXIS_TOL_RANGE[0] <= axis_tol <= AXIS_TOL_RANGE[1]:
            raise InputError("axis_tol {} outside [{}, {}]".format(axis_tol, *AXIS_TOL_RANGE))
        if not VERIFY_SLACK_RANGE[0] <= verify_slack <= VERIFY_SLACK_RANGE[1]:
            raise InputError("verify_slack {} outside [{}, {}]".format(verify_slack, *VERIFY_SLACK_RANGE))
        self.axis_tol = axis_tol
        self.verify_slack = verify_slack
        self.out = out

    @classmethod
    def from_dict(cls, document):
        validate(document, 'config')
        grid = document.get('grid', {})
        tolerances = document.get('tolerances', {})
        return cls(grid.get('T', REFERENCE_T), grid.get('N', REFERENCE_N),
                   tolerances.get('axis_tol', AXIS_TOL), tolerances.get('verify_slack', VERIFY_SLACK),
                   document.get('output', {}).get('out'))

    @classmethod
    def load(cls, path=None, T=None, N=None, axis_tol=None, out=None):
        """Reads the JSON config at `path` (if any) and applies the command line overrides"""
        document = read_json(path) if path else {}
        validate(document, 'config')
        document.setdefault('grid', {})
        document.setdefault('tolerances', {})
        document.setdefault('output', {})
        if T is not None:
            document['grid']['T'] = T
        if N is not None:
            document['grid']['N'] = N
        if axis_tol is not None:
            document['tolerances']['axis_tol'] = axis_tol
        if out is not None:
            document['output']['out'] = out
        return cls.from_dict(document)

    def to_dict(self):
        output = {} if self.out is None else {'out': self.out}
        return {'grid': self.grid.to_dict(),
                'tolerances': {'axis_tol': self.axis_tol, 'verify_slack': self.verify_slack},
                'output': output}


def _configure_logging(verbose, quiet):
    level = 'DEBUG' if verbose else 'WARNING' if quiet else 'INFO'
    logger.remove()
    for name in LIBRARY_MODULES:
        logger.enable(name)
    return logger.add(sys.stderr, level=level, format="{time:HH:mm:ss} | {level: <8} | {message}")


def _release_logging(sink):
    logger.remove(sink)
    for name in LIBRARY_MODULES:
        logger.disable(name)


class _ExitCodeGroup(click.Group):
    # click reports usage errors with 2, which is taken by NotHyperbolic
    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = 1
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = 1
            raise


def _exit_codes(command):
    """Turns library errors into their exit codes"""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except HyersUlamError as e:
            logger.error("{}: {}", type(e).__name__, e)
            sys.exit(e.exit_code)
    return wrapper


def _emit(document, schema):
    validate(document, schema)
    click.echo(dumps(document))


@click.group(cls=_ExitCodeGroup)
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), help="JSON configuration file")
@click.option('--grid-T', 'grid_T', type=float, help="Half-width of the sampling grid")
@click.option('--grid-N', 'grid_N', type=int, help="Samples on the grid, a power of two >= 8")
@click.option('--axis-tol', type=float, help="Relative imaginary-axis exclusion for roots")
@click.option('-v', '--verbose', is_flag=True, default=False, help="Log debug details")
@click.option('-q', '--quiet', is_flag=True, default=False, help="Log warnings and errors only")
@click.pass_context
def main(ctx, config_path, grid_T, grid_N, axis_tol, verbose, quiet):
    """Hyers-Ulam stability of constant-coefficient linear ODEs in L1"""
    sink = _configure_logging(verbose, quiet)
    ctx.call_on_close(lambda: _release_logging(sink))
    try:
        ctx.obj = Config.load(config_path, grid_T, grid_N, axis_tol)
    except HyersUlamError as e:
        logger.error("{}: {}", type(e).__name__, e)
        sys.exit(e.exit_code)


@main.command()
@click.argument('poly_file', type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@_exit_codes
def stability(config, poly_file):
    """Prints the roots, the hyperbolicity verdict, the kernel and M"""
    p = read_poly(poly_file)
    roots = poly.roots(p)
    hyperbolic, witness = is_hyperbolic(p, config.axis_tol, roots)
    if not hyperbolic:
        _emit({'charpoly': poly_to_dict(p)['coeffs'],
               'roots': [{'root': [r.real, r.imag], 'multiplicity': m} for r, m in roots],
               'hyperbolic': False,
               'witness': [witness.real, witness.imag]}, 'stability')
        logger.error("NotHyperbolic: root {} lies on the imaginary axis", witness)
        sys.exit(NotHyperbolic.exit_code)
    G = green_function(p, config.axis_tol)
    _emit(G.to_dict(), 'stability')
    logger.info("M = {:.12g}", G.M)


@main.command('solve')
@click.argument('poly_file', type=click.Path(exists=True, dir_okay=False))
@click.argument('forcing_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--out', type=click.Path(dir_okay=False), help="CSV file for the solution samples")
@click.pass_obj
@_exit_codes
def solve_command(config, poly_file, forcing_file, out):
    """Writes the L1 solution y_a = G * f"""
    out = out or config.out
    if out is None:
        raise InputError("no output path: pass --out or set output.out in the config")
    prob = Problem(read_poly(poly_file), read_function(forcing_file))
    G = green_function(prob.charpoly, config.axis_tol)
    y = solve(prob, G)
    defect = residual(prob, y).norm

    terms_out = None
    if prob.sampled:
        samples, norm = y, l1_norm_numeric(y)
    else:
        samples, norm = sample(y, config.grid), l1_norm(y)
        terms_out = os.path.splitext(out)[0] + '.terms.json'
        write_json(terms_out, y.to_dict())
    write_samples(out, samples)
    _emit({'out': out, 'terms_out': terms_out, 'mode': 'sampled' if prob.sampled else 'closed',
           'norm': norm, 'residual_norm': defect, 'grid': samples.grid.to_dict()}, 'solve')


@main.command('verify')
@click.argument('poly_file', type=click.Path(exists=True, dir_okay=False))
@click.argument('forcing_file', type=click.Path(exists=True, dir_okay=False))
@click.argument('candidate_file', type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@_exit_codes
def verify_command(config, poly_file, forcing_file, candidate_file):
    """Checks ||y - y_a||_1 <= M ||h||_1 for a candidate (term JSON or sample CSV)"""
    prob = Problem(read_poly(poly_file), read_function(forcing_file))
    report = verify(prob, read_function(candidate_file), config.verify_slack, config.axis_tol)
    _emit(report.to_dict(), 'report')
    if not report.satisfied:
        logger.error("distance {:.6g} exceeds the bound {:.6g}; for a correct candidate this is a "
                     "numerical tolerance breach", report.distance, report.bound)
        sys.exit(BOUND_VIOLATED_EXIT_CODE)


@main.command()
@click.option('--example', type=click.Choice(['paper', 'slow']), default='paper', show_default=True)
@click.option('--eps', type=float, default=0.1, show_default=True)
@click.option('--T', 'T', type=float, help="Tent half-width; the slow family sweeps a ladder without it")
@click.option('--out', type=click.Path(dir_okay=False), help="CSV file for the (parameter, residual, distance, ratio) rows")
@click.pass_obj
@_exit_codes
def probe(config, example, eps, T, out):
    """Near-solutions of y' - i y = 0 far from its only L1 solution"""
    if example == 'slow' and T is None:
        table = probe_ladder(eps, PROBE_LADDER)
    else:
        table = ProbeTable([counterexample_probe(eps, example, T)])
    _emit(table.to_dict(), 'probe')
    out = out or config.out
    if out:
        write_frame(out, table.to_frame())


@main.command()
@click.option('--trials', type=click.IntRange(min=1), default=100, show_default=True)
@click.option('--max-degree', type=click.IntRange(min=1), default=4, show_default=True)
@click.pass_obj
@_exit_codes
def suite(config, trials, max_degree):
    """Runs the random perturbation suite (seeded by HU_L1_SEED)"""
    raw = os.environ.get(SEED_VARIABLE, '0')
    try:
        seed = int(raw)
    except ValueError:
        raise InputError("{} must be an integer, got {!r}".format(SEED_VARIABLE, raw))
    result = perturbation_suite(trials, seed, max_degree, config.verify_slack)
    _emit(result.to_dict(), 'suite')
    if not result.all_satisfied:
        sys.exit(BOUND_VIOLATED_EXIT_CODE)


if __name__ == "__main__":
    main()
