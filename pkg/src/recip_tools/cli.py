"""Command line front end: recip analyze | spectrum | omegascan | selftest."""
import argparse
import os
import sys
from pathlib import Path

import numpy as np

from recip_core import recip
from recip_tools import moss, omegascan, scenario

verbose = False
scenario_dir = Path(__file__).parent / 'data' / 'scenarios'

EXIT_OK, EXIT_INVALID, EXIT_INCONSISTENT = 0, 1, 2


def _say(message):
    if verbose: print(message, file=sys.stderr)

def _fmt(x):
    return f"{x:.17g}"

def _vec(x):
    return '[' + ', '.join(_fmt(float(c)) for c in x) + ']'

def _cvec(p):
    return '[' + ', '.join(f"{_fmt(c.real)}{'+' if c.imag >= 0 else '-'}{_fmt(abs(c.imag))}j" for c in p) + ']'

def _unitary_line(name, u):
    return f"{name}: delta_deg={_fmt(np.degrees(u.delta))} phi_deg={_fmt(np.degrees(u.phi))} axis={_vec(u.n)}"

def resolve_tol(flag):
    """Tolerance from --tol, else RECIP_TOL, else recip.default_tol."""
    if flag is not None:
        if not flag > 0: raise ValueError(f"--tol must be positive, got {flag}")
        return flag
    env = os.environ.get('RECIP_TOL')
    if env is None: return recip.default_tol
    try:
        tol = float(env)
    except ValueError:
        raise ValueError(f"RECIP_TOL is not a number: {env!r}") from None
    if not np.isfinite(tol) or tol <= 0: raise ValueError(f"RECIP_TOL must be positive, got {env!r}")
    return tol

def analyze(args, tol):
    record = scenario.load_scenario(args.file)
    if 'foils' not in record and 'potentials' not in record: raise scenario.ScenarioError('', "analyze needs foils or potentials")
    potentials = scenario.build_potentials(record, args.grid)
    _say(f"analyzing {len(potentials)} potentials at tol={tol}")
    verdict = recip.find_reciprocity_unitary(potentials, tol)
    print(f"class: {verdict.classification}")
    if verdict.unitary is not None:
        print(_unitary_line('unitary', verdict.unitary))
        print(_unitary_line('symmetrizer', verdict.symmetrizer))
    print(f"residual: {verdict.residual:.3e}")
    return EXIT_OK

def spectrum(args, tol):
    record = scenario.load_scenario(args.file)
    if 'foils' not in record: raise scenario.ScenarioError('foils', "spectrum needs a foil list")
    setup = scenario.build_scenario(record, args.grid)
    _say(f"{len(setup.foils)} foils, {len(setup.grid)} energies, {args.threads} threads")
    df = moss.spectrum(setup, threads=args.threads)
    _say(f"relative deviation normal/reversed: {moss.relative_deviation(df):.3e}")
    if args.output:
        df.to_csv(args.output, float_format='%.17g')
    else:
        sys.stdout.write(df.to_csv(float_format='%.17g'))
    return EXIT_OK

def omega(args, tol):
    record = scenario.load_scenario(args.file)
    if 'sample' not in record: raise scenario.ScenarioError('sample', "omegascan needs a sample")
    sample = scenario.build_sample(record)
    U = omegascan.find_symmetry_unitary(sample, tol)
    if U is None:
        print("symmetry: fail")
        certificate = omegascan.norm_mismatch(sample, tol)
        if certificate is not None:
            print(f"norm mismatch: {certificate.region} / {certificate.partner} ({certificate.part}) "
                  f"{_fmt(certificate.norms[0])} != {_fmt(certificate.norms[1])}")
        return EXIT_OK
    report = omegascan.check_symmetry(sample, U, tol)
    print(f"symmetry: {'pass' if report.passed else 'fail'}")
    print(f"residual: scalar={report.scalar_residual:.3e} vector={report.vector_residual:.3e}")
    print(_unitary_line('unitary', U))
    p_in, p_out = scenario.build_polarization(record['polarization_in']), scenario.build_polarization(record['polarization_out'])
    n_R = scenario.build_reversal_axis(record)
    p1, p2 = omegascan.omega_scan_polarizations(U, n_R, p_in, p_out)
    print(f"polarizations: p1={_cvec(p1)} p2={_cvec(p2)} reversal_axis={_vec(n_R)}")
    return EXIT_OK

def selftest_checks(grid=None, threads=1):
    """The golden comparisons on the shipped field-geometry scenarios.

     :return: list of (name, value, passed)."""
    def run(name):
        record = scenario.load_scenario(scenario_dir / f"{name}.json")
        return moss.spectrum(scenario.build_scenario(record, grid), threads=threads)
    a, b, c = run('parallel_plus'), run('antiparallel_plus'), run('antiparallel_minus')
    scale = a['intensity_normal'].max()
    same = float((a['intensity_normal'] - c['intensity_normal']).abs().max() / scale)
    differ = float((a['intensity_normal'] - b['intensity_normal']).abs().max() / scale)
    coplanar = moss.relative_deviation(run('two_foil_coplanar'))
    turned = moss.relative_deviation(run('two_foil_turned'))
    return [('parallel plus equals antiparallel minus', same, same <= 1e-10),
            ('parallel plus differs from antiparallel plus', differ, differ >= 1e-2),
            ('coplanar foils: normal equals reversed', coplanar, coplanar <= 1e-8),
            ('turned foils: normal differs from reversed', turned, turned >= 1e-3)]

def selftest(args, tol):
    checks = selftest_checks(args.grid, args.threads)
    for name, value, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name} ({value:.3e})")
    return EXIT_OK if all(passed for _, _, passed in checks) else EXIT_INCONSISTENT

def parse_args(argv):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tol', type=float, default=None, help="plane and condition tolerance (overrides RECIP_TOL)")
    common.add_argument('--grid', type=int, default=None, help="number of energy grid points")
    common.add_argument('--threads', type=int, default=1, help="worker threads for spectrum evaluation")
    common.add_argument('--verbose', action='store_true', help="print diagnostics to stderr")
    parser = argparse.ArgumentParser(prog='recip', description="Reciprocity analysis of polarized-wave scattering arrangements.")
    commands = parser.add_subparsers(dest='command', required=True)
    for name, helptext in (('analyze', "classify the potentials of a scenario"),
                           ('spectrum', "normal and reversed transmission spectra as CSV"),
                           ('omegascan', "check the omega-scan symmetry of a lateral sample")):
        sub = commands.add_parser(name, parents=[common], help=helptext)
        sub.add_argument('file', help="scenario JSON file")
        if name == 'spectrum': sub.add_argument('-o', '--output', default=None, help="CSV output path (stdout if omitted)")
    commands.add_parser('selftest', parents=[common], help="run the built-in golden checks")
    return parser.parse_args(argv)

COMMANDS = {'analyze': analyze, 'spectrum': spectrum, 'omegascan': omega, 'selftest': selftest}

def run(argv):
    """Run one command.

     :param argv: argument list without the program name.

     :return: exit code, 0 on success, 1 for invalid input, 2 for an internal inconsistency."""
    global verbose
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID
    previous, verbose = verbose, verbose or args.verbose
    try:
        if args.grid is not None and args.grid < 1: raise ValueError(f"--grid must be positive, got {args.grid}")
        if args.threads < 1: raise ValueError(f"--threads must be positive, got {args.threads}")
        return COMMANDS[args.command](args, resolve_tol(args.tol))
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except RuntimeError as e:
        print(f"internal inconsistency: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    finally:
        verbose = previous

def main():
    sys.exit(run(sys.argv[1:]))
