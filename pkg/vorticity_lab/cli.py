"""Command-line interface for the vorticity laboratory."""

import argparse
import logging
import sys
from functools import partial
from multiprocessing import Pool
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import CONFIG
from .fields.equations import EquationParams, residual
from .fields.expressions import AnalyticField
from .fields.time_functions import time_function_from_spec
from .fields.variables import KLEIN_GORDON, PROFILE
from .integrate import IntegratorConfig, integrate, invariant_drift
from .io import ConfigError, create_output_filename, read_config, save_json, save_trajectory_csv, validate_run_config
from .reporting import LabReporter
from .schemas import (
    BracketTableDoc,
    DriftDoc,
    IntegrateConfig,
    ReducedModelDoc,
    ResidualDoc,
    SubgroupTableDoc,
    TransformDoc,
)
from .solutions import (
    KGSolutionSpec,
    PartialInvariantSpec,
    klein_gordon_lift,
    partially_invariant,
    rossby_wave,
    spherical_harmonic_wave,
    steady_plane_waves,
    zonal_flow,
)
from .spectral import SpectralModel, Truncation, lorenz1960, reduce_model, subgroup_from_words, subgroup_table
from .symmetry.generators import catalog
from .symmetry.subalgebras import bracket_table
from .symmetry.transformations import build_map, transport_solution, verify_equivalence

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2

SOLUTION_FAMILIES = ("rossby", "klein_gordon", "eta_constant", "eta_general",
                     "zonal", "spherical_harmonic", "plane_waves")
DEFAULT_TRANSFORM_SOLUTION = {"spherical_derotation": "zonal", "potential_translation": "plane_waves"}

EXAMPLES = """
Examples:
  # Fixed subspaces of all subgroups for the 3x3 truncation
  python -m vorticity_lab.cli list-subgroups

  # Reduced model of a subgroup given by generator words
  python -m vorticity_lab.cli reduce --subgroup pqe1,pqe2 --k 1 --l 2

  # Three-component model with amplitudes A, F, G
  python -m vorticity_lab.cli lorenz1960 --k 1 --l 2

  # Sweep two wavenumber pairs in parallel
  python -m vorticity_lab.cli integrate --wavenumbers 1,2 2,1 --t-end 10 --jobs 2

  # Residual of a Rossby wave
  python -m vorticity_lab.cli verify-solution rossby --A 1 --k 1 --l 1 --beta 1

  # De-rotate a spherical harmonic and check both equations
  python -m vorticity_lab.cli transform spherical_derotation --omega 0.7 --solution spherical_harmonic --n 3 --m 2
"""


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; exit code 2 is reserved for verification FAIL."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# ───────────────────────── Argument types ─────────────────────────
def _pair(text: str) -> Tuple[float, float]:
    try:
        k, l = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'k,l', got {text!r}") from None
    return k, l


def _words(text: str) -> List[str]:
    return [w.strip() for w in text.split(",") if w.strip()]


def _time_spec(text: str):
    """Time function flag: a number is a constant, anything else an expression in t."""
    try:
        return float(text)
    except ValueError:
        return text


# (flag, solution key, type)
_SOLUTION_OPTIONS = [
    ("--A", "A", float), ("--k", "k", float), ("--l", "l", float),
    ("--alpha", "alpha", float), ("--amplitude", "amplitude", float), ("--v", "v", str),
    ("--f", "f", _time_spec), ("--h", "h", _time_spec),
    ("--harmonic", "harmonic", str), ("--eta", "eta", _time_spec), ("--profile", "profile", str),
    ("--g1", "g1", _time_spec), ("--g0", "g0", _time_spec), ("--f1", "f1", _time_spec), ("--f0", "f0", _time_spec),
    ("--n", "n", int), ("--m", "m", int), ("--phase", "phase", float),
]
_EQUATION_OPTIONS = [("--beta", "beta", float), ("--omega", "omega", float), ("--a", "a", float), ("--F", "F", float)]

# config keys each command takes from its flags
_COMMAND_KEYS = {
    "list-subgroups": ("truncation", "output"),
    "reduce": ("subgroup", "truncation", "k", "l", "output"),
    "lorenz1960": ("k", "l", "output"),
    "integrate": ("model", "subgroup", "truncation", "wavenumbers", "initial", "dt", "t_end",
                  "sample_stride", "output_dir", "prefix"),
    "verify-solution": ("tolerance", "output"),
    "transform": ("map", "omega", "a", "beta", "F", "tolerance", "output"),
    "bracket-table": ("kind", "beta", "omega", "f", "g", "output"),
}


def _add_solution_options(parser: argparse.ArgumentParser, with_equation: bool) -> None:
    group = parser.add_argument_group("solution parameters")
    options = _SOLUTION_OPTIONS + (_EQUATION_OPTIONS if with_equation else [])
    for flag, key, kind in options:
        group.add_argument(flag, dest=f"solution_{key}", type=kind, default=None)
    group.add_argument("--amplitudes", dest="solution_amplitudes", type=float, nargs="+", default=None)
    group.add_argument("--wavevectors", dest="solution_wavevectors", type=_pair, nargs="+", default=None,
                       help="one 'k,l' pair per amplitude")
    group.add_argument("--phases", dest="solution_phases", type=float, nargs="+", default=None)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run config; flags given on the command line override it")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    verbosity.add_argument("--quiet", action="store_true", help="Suppress console output except errors")

    parser = _Parser(
        prog="vorticity_lab",
        description="Barotropic Vorticity Equation Laboratory",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EXAMPLES,
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub = commands.add_parser("list-subgroups", parents=[common],
                              help="All subgroups of the induced symmetry group with their fixed subspaces")
    sub.add_argument("--truncation", type=int, default=None, help="Truncation order N (|m1|, |m2| <= N)")
    sub.add_argument("-o", "--output", help="Output JSON path")

    sub = commands.add_parser("reduce", parents=[common], help="Reduced model of a subgroup")
    sub.add_argument("--subgroup", type=_words, default=None, help="Generator words, e.g. pqe1,pqe2")
    sub.add_argument("--truncation", type=int, default=None)
    sub.add_argument("--k", type=float, default=None)
    sub.add_argument("--l", type=float, default=None)
    sub.add_argument("-o", "--output", help="Output JSON path")

    sub = commands.add_parser("lorenz1960", parents=[common], help="Three-component model in A, F, G")
    sub.add_argument("--k", type=float, default=None)
    sub.add_argument("--l", type=float, default=None)
    sub.add_argument("-o", "--output", help="Output JSON path")

    sub = commands.add_parser("integrate", parents=[common], help="RK4 trajectories and invariant drift")
    sub.add_argument("--model", choices=["lorenz1960", "truncation", "reduced"], default=None)
    sub.add_argument("--subgroup", type=_words, default=None, help="Generator words for --model reduced")
    sub.add_argument("--truncation", type=int, default=None)
    sub.add_argument("--wavenumbers", type=_pair, nargs="+", default=None, help="One or more 'k,l' pairs")
    sub.add_argument("--initial", type=float, nargs="+", default=None, help="Initial real coordinates")
    sub.add_argument("--dt", type=float, default=None, help=f"Step size (default: {CONFIG.dt})")
    sub.add_argument("--t-end", dest="t_end", type=float, default=None)
    sub.add_argument("--sample-stride", dest="sample_stride", type=int, default=None)
    sub.add_argument("--output-dir", dest="output_dir", default=None)
    sub.add_argument("--prefix", default=None, help="File name prefix of the trajectory outputs")
    sub.add_argument("--jobs", type=int, default=1, help="Worker processes for wavenumber sweeps (default: 1)")

    sub = commands.add_parser("verify-solution", parents=[common], help="Residual of a named solution family")
    sub.add_argument("family", nargs="?", choices=SOLUTION_FAMILIES, default=None)
    _add_solution_options(sub, with_equation=True)
    sub.add_argument("--tolerance", type=float, default=None,
                     help=f"Residual tolerance (default: {CONFIG.residual_tolerance})")
    sub.add_argument("-o", "--output", help="Output JSON path")

    sub = commands.add_parser("transform", parents=[common],
                              help="Carry a solution through an equivalence map and check both equations")
    sub.add_argument("map", nargs="?", choices=["spherical_derotation", "potential_translation"], default=None)
    sub.add_argument("--omega", type=float, default=None)
    sub.add_argument("--a", type=float, default=None)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--F", type=float, default=None)
    sub.add_argument("--solution", dest="family", choices=SOLUTION_FAMILIES, default=None,
                     help="Solution family of the non-rotating equation")
    _add_solution_options(sub, with_equation=False)
    sub.add_argument("--tolerance", type=float, default=None,
                     help=f"Residual tolerance (default: {CONFIG.equivalence_tolerance})")
    sub.add_argument("-o", "--output", help="Output JSON path")

    sub = commands.add_parser("bracket-table", parents=[common], help="Commutator table of a symmetry catalog")
    sub.add_argument("kind", nargs="?", choices=["cartesian", "spherical"], default=None)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--omega", type=float, default=None)
    sub.add_argument("--f", type=_time_spec, default=None, help="Parameter function of X(f)")
    sub.add_argument("--g", type=_time_spec, default=None, help="Parameter function of Z(g)")
    sub.add_argument("-o", "--output", help="Output JSON path")

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def build_run_config(args: argparse.Namespace):
    """Merge the --config document with the flags given and validate."""
    doc: Dict[str, Any] = read_config(args.config, args.command) if args.config else {"command": args.command}
    for key in _COMMAND_KEYS[args.command]:
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value

    if args.command in ("verify-solution", "transform"):
        solution = dict(doc.get("solution") or {})
        family = args.family
        if family is not None and solution.get("family") not in (None, family):
            solution = {}
        if family is not None:
            solution["family"] = family
        if "family" not in solution and args.command == "transform" and doc.get("map"):
            solution["family"] = DEFAULT_TRANSFORM_SOLUTION[doc["map"]]
        prefix = "solution_"
        solution.update({
            name[len(prefix):]: value for name, value in vars(args).items()
            if name.startswith(prefix) and value is not None
        })
        doc["solution"] = solution
    return validate_run_config(doc)


# ───────────────────────── Solutions ─────────────────────────
def build_solution(spec) -> Tuple[AnalyticField, EquationParams]:
    """Field and equation of a validated solution spec."""
    family = spec.family
    if family == "rossby":
        return rossby_wave(spec.A, spec.k, spec.l, spec.beta), EquationParams.cartesian(spec.beta)

    if family == "klein_gordon":
        if spec.v is not None:
            reduced = KGSolutionSpec.user(AnalyticField.parse(spec.v, KLEIN_GORDON))
        else:
            reduced = KGSolutionSpec.harmonic(spec.alpha, spec.amplitude)
        f = time_function_from_spec("f", spec.f)
        h = time_function_from_spec("h", spec.h)
        return klein_gordon_lift(f, h, spec.beta, reduced), EquationParams.cartesian(spec.beta)

    if family == "eta_constant":
        harmonic = AnalyticField.parse(spec.harmonic, ("t", "x", "y"))
        eta = spec.eta if isinstance(spec.eta, float) else time_function_from_spec("eta", spec.eta)
        psi = partially_invariant(PartialInvariantSpec.eta_constant(harmonic, eta), spec.beta)
        return psi, EquationParams.cartesian(spec.beta)

    if family == "eta_general":
        functions = {name: time_function_from_spec(name, getattr(spec, name)) for name in ("g1", "g0", "f1", "f0")}
        profile = AnalyticField.parse(spec.profile, PROFILE)
        psi = partially_invariant(PartialInvariantSpec.eta_general(profile, **functions), spec.beta)
        return psi, EquationParams.cartesian(spec.beta)

    if family == "zonal":
        return zonal_flow(spec.profile), EquationParams.spherical(spec.omega, spec.a)

    if family == "spherical_harmonic":
        psi = spherical_harmonic_wave(spec.n, spec.m, spec.amplitude, spec.phase)
        return psi, EquationParams.spherical(spec.omega, spec.a)

    if family == "plane_waves":
        psi = steady_plane_waves(spec.amplitudes, spec.wavevectors, spec.phases)
        params = EquationParams.potential(0.0, spec.F) if spec.F is not None else EquationParams.cartesian(0.0)
        return psi, params

    raise ConfigError(f"solution.family: unknown family {family!r}")


# ───────────────────────── Commands ─────────────────────────
def run_list_subgroups(cfg, reporter: LabReporter, args: argparse.Namespace) -> int:
    truncation = Truncation.square(cfg.truncation)
    table = subgroup_table(truncation)
    output = cfg.output or create_output_filename("subgroups", f"_n{cfg.truncation}")
    save_json(reporter.generate_subgroup_doc(table, truncation), output, SubgroupTableDoc)
    if not args.quiet:
        reporter.print_subgroup_table(table)
        print(f"\nSubgroup table saved to: {output}")
    return EXIT_OK


def run_reduce(cfg, reporter: LabReporter, args: argparse.Namespace) -> int:
    S = subgroup_from_words(cfg.subgroup)
    model = reduce_model(S, Truncation.square(cfg.truncation), cfg.k, cfg.l)
    output = cfg.output or create_output_filename("reduced", f"_{S.name}_k{cfg.k:g}_l{cfg.l:g}")
    save_json(model.to_dict(), output, ReducedModelDoc)
    if not args.quiet:
        reporter.print_reduced_model(model)
        print(f"\nReduced model saved to: {output}")
    return EXIT_OK


def run_lorenz1960(cfg, reporter: LabReporter, args: argparse.Namespace) -> int:
    model = lorenz1960(cfg.k, cfg.l)
    output = cfg.output or create_output_filename("lorenz1960", f"_k{cfg.k:g}_l{cfg.l:g}")
    save_json(model.to_dict(), output, ReducedModelDoc)
    if not args.quiet:
        reporter.print_reduced_model(model)
        print(f"\nReduced model saved to: {output}")
    return EXIT_OK


def _integration_model(cfg: IntegrateConfig, k: float, l: float):
    if cfg.model == "lorenz1960":
        return lorenz1960(k, l)
    truncation = Truncation.square(cfg.truncation, k, l)
    if cfg.model == "truncation":
        return SpectralModel(truncation)
    return reduce_model(subgroup_from_words(cfg.subgroup), truncation)


def _initial_state(cfg: IntegrateConfig, model) -> np.ndarray:
    if cfg.initial is None:
        return np.random.default_rng(CONFIG.random_seed).standard_normal(model.dimension)
    if len(cfg.initial) != model.dimension:
        raise ConfigError(
            f"initial: {cfg.model} model has {model.dimension} coordinates "
            f"({', '.join(model.labels)}), got {len(cfg.initial)} values"
        )
    return np.array(cfg.initial, dtype=float)


def integrate_job(cfg: IntegrateConfig, wavenumbers: Tuple[float, float]) -> Dict[str, Any]:
    """One (k, l) run: trajectory CSV plus drift JSON, each at its own path."""
    k, l = wavenumbers
    model = _integration_model(cfg, k, l)
    integrator = IntegratorConfig(t_end=cfg.t_end, dt=cfg.dt, sample_stride=cfg.sample_stride)
    trajectory = integrate(model, _initial_state(cfg, model), integrator)

    suffix = f"_{cfg.model}_k{k:g}_l{l:g}"
    csv_path = create_output_filename(cfg.prefix, suffix, ".csv", cfg.output_dir)
    save_trajectory_csv(trajectory, csv_path)

    doc = LabReporter().generate_drift_doc(cfg.model, k, l, invariant_drift(trajectory, model), csv_path)
    save_json(doc, create_output_filename(cfg.prefix, f"{suffix}_drift", ".json", cfg.output_dir), DriftDoc)
    return doc


def run_integrate(cfg, reporter: LabReporter, args: argparse.Namespace) -> int:
    if args.jobs < 1:
        raise ConfigError(f"jobs: must be >= 1, got {args.jobs}")
    job = partial(integrate_job, cfg)
    if args.jobs > 1 and len(cfg.wavenumbers) > 1:
        logger.info("Integrating %d wavenumber pairs on %d workers", len(cfg.wavenumbers), args.jobs)
        with Pool(processes=min(args.jobs, len(cfg.wavenumbers))) as pool:
            docs = pool.map(job, cfg.wavenumbers)
    else:
        docs = [job(pair) for pair in cfg.wavenumbers]
    if not args.quiet:
        reporter.print_drift(docs)
    return EXIT_OK


def run_verify_solution(cfg, reporter: LabReporter, args: argparse.Namespace) -> int:
    family = cfg.solution.family
    psi, params = build_solution(cfg.solution)
    tolerance = cfg.tolerance if cfg.tolerance is not None else CONFIG.residual_tolerance
    report = residual(psi, params)
    doc = reporter.generate_residual_doc(family, psi, params, report, tolerance)
    output = cfg.output or create_output_filename("residual", f"_{family}")
    save_json(doc, output, ResidualDoc)
    if not args.quiet:
        reporter.print_residual(doc)
    if doc["status"] == "FAIL":
        logger.warning("%s residual %.3e exceeds tolerance %.1e", family, report.max_abs, tolerance)
        return EXIT_FAIL
    return EXIT_OK


def run_transform(cfg, reporter: LabReporter, args: argparse.Namespace) -> int:
    psi, _ = build_solution(cfg.solution)
    if cfg.map == "spherical_derotation":
        T = build_map(cfg.map, {"omega": cfg.omega})
        rotating = EquationParams.spherical(cfg.omega, cfg.a)
        nonrotating = EquationParams.spherical(0.0, cfg.a)
    else:
        T = build_map(cfg.map, {"beta": cfg.beta, "F": cfg.F})
        rotating = EquationParams.potential(cfg.beta, cfg.F)
        nonrotating = EquationParams.potential(0.0, cfg.F)
    report = verify_equivalence(T, psi, rotating, nonrotating, tolerance=cfg.tolerance)
    doc = reporter.generate_transform_doc(T, report, transport_solution(T, psi, "inverse"))
    output = cfg.output or create_output_filename("transform", f"_{cfg.map}_{cfg.solution.family}")
    save_json(doc, output, TransformDoc)
    if not args.quiet:
        reporter.print_transform(doc)
    return EXIT_OK if report.passed else EXIT_FAIL


def run_bracket_table(cfg, reporter: LabReporter, args: argparse.Namespace) -> int:
    params = {"beta": cfg.beta} if cfg.kind == "cartesian" else {"omega": cfg.omega}
    basis = catalog(cfg.kind, params, {"f": cfg.f, "g": cfg.g})
    doc = reporter.generate_bracket_doc(cfg.kind, basis, bracket_table(basis))
    output = cfg.output or create_output_filename("brackets", f"_{cfg.kind}")
    save_json(doc, output, BracketTableDoc)
    if not args.quiet:
        reporter.print_bracket_table(doc)
    return EXIT_OK


COMMANDS = {
    "list-subgroups": run_list_subgroups,
    "reduce": run_reduce,
    "lorenz1960": run_lorenz1960,
    "integrate": run_integrate,
    "verify-solution": run_verify_solution,
    "transform": run_transform,
    "bracket-table": run_bracket_table,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)

    try:
        cfg = build_run_config(args)
        return COMMANDS[cfg.command](cfg, LabReporter(), args)

    except ConfigError as e:
        print(f"Configuration error: {str(e)}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        print(f"Error: {str(e)}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
