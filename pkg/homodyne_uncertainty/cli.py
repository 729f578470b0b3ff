#!/usr/bin/env python3
"""
Homodyne Uncertainty CLI

Generates analytic tomograms, simulates homodyne acquisitions, checks the
Heisenberg and Schroedinger-Robertson uncertainty relations on tomographic
data, and reconstructs Wigner functions as plot-ready data.

Exit codes: 0 all checks pass, 1 a physics check fails, 2 input or data error.
"""

import argparse
import dataclasses
import math
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

from homodyne_uncertainty import __version__
from homodyne_uncertainty.config import (
    DEFAULT_FILTER_CUTOFF,
    DEFAULT_RECONSTRUCTION_RANGE,
    DEFAULT_THETA_COUNT,
    DEFAULT_X_RANGE,
    EPS_NORM_ANALYTIC,
    EPS_NORM_MEASURED,
    FILTER_WINDOWS,
    MIN_SAMPLES_PER_PHASE,
    QUADRATURE_RULES,
    X_RANGE_STANDARD_DEVIATIONS,
)
from homodyne_uncertainty.exceptions import InvalidStateError, TomographyError, UnphysicalStateError
from homodyne_uncertainty.formats import (
    load_json,
    read_grid,
    read_samples,
    read_tomographic_data,
    write_f_curve_csv,
    write_grid,
    write_grid_csv,
    write_report,
    write_samples_csv,
    write_samples_json,
    write_wigner,
    write_wigner_csv,
    write_wigner_slice_csv,
)
from homodyne_uncertainty.logger import configure_logging, get_logger
from homodyne_uncertainty.radon import inverse_radon
from homodyne_uncertainty.sampler import AcquisitionPlan, acquire, phases_from_text
from homodyne_uncertainty.state_models import (
    StateModel,
    coherent,
    exact_covariance,
    exact_mean,
    fock,
    squeezed_vacuum,
    state_from_dict,
    state_to_dict,
    thermal,
    vacuum,
)
from homodyne_uncertainty.tomogram_model import (
    OpticalTomogramGrid,
    QuadratureSampleSet,
    histogram_tomogram,
    validate,
)
from homodyne_uncertainty.uncertainty import CheckConfig, default_scan, f_scan

logger = get_logger(__name__)

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_DATA_ERROR = 2

PRESETS = ("vacuum", "coherent", "squeezed", "thermal", "fock")

# Preset parameters (argparse dest) accepted by each preset
PRESET_PARAMETERS = {
    "vacuum": (),
    "coherent": ("alpha_re", "alpha_im"),
    "squeezed": ("r", "phi"),
    "thermal": ("nbar",),
    "fock": ("fock_n",),
}
STATE_PARAMETERS = ("alpha_re", "alpha_im", "r", "phi", "nbar", "fock_n")

RANGE_FLAGS = ("--x-range", "--q-range", "--p-range")

DATA_ERRORS = (TomographyError, OSError, ValueError)


def parse_range(text: str) -> Tuple[float, float, int]:
    """Parse 'A:B:N' into (A, B, N)"""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected A:B:N, got '{text}'")
    try:
        low, high, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B:N with numeric A, B and integer N, got '{text}'")
    if not high > low or count < 2:
        raise argparse.ArgumentTypeError(f"range '{text}' needs A < B and N >= 2")
    return low, high, count


def _format_range(values: Tuple[float, float, int]) -> str:
    return f"{values[0]}:{values[1]}:{values[2]}"


def _join_range_values(argv: Sequence[str]) -> List[str]:
    """Glue '--x-range -7:7:281' into '--x-range=-7:7:281' so negative bounds parse"""
    joined: List[str] = []
    index = 0
    while index < len(argv):
        token = argv[index]
        if token in RANGE_FLAGS and index + 1 < len(argv) and argv[index + 1].startswith("-") and ":" in argv[index + 1]:
            joined.append(f"{token}={argv[index + 1]}")
            index += 2
            continue
        joined.append(token)
        index += 1
    return joined


def _add_output_arguments(parser: argparse.ArgumentParser, default_format: str, out_required: bool) -> None:
    output_group = parser.add_argument_group("Output")
    output_group.add_argument("--out", type=str, required=out_required,
                              help="Output file path")
    output_group.add_argument("--format", choices=("json", "csv"), default=default_format,
                              help=f"Output format (default: {default_format})")
    output_group.add_argument("--seed", type=int, default=0,
                              help="Unsigned 64-bit seed for every random stream (default: 0)")


def _add_state_arguments(parser: argparse.ArgumentParser, photon_flags: Sequence[str]) -> argparse._MutuallyExclusiveGroup:
    state_group = parser.add_argument_group("State")
    source = state_group.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=PRESETS,
                        help="Built-in state family")
    source.add_argument("--spec", type=str,
                        help="State spec JSON file")
    state_group.add_argument("--alpha-re", type=float,
                             help="Coherent amplitude, real part (default: 0)")
    state_group.add_argument("--alpha-im", type=float,
                             help="Coherent amplitude, imaginary part (default: 0)")
    state_group.add_argument("--r", type=float,
                             help="Squeezing parameter (default: 0)")
    state_group.add_argument("--phi", type=float,
                             help="Squeezing angle in radians (default: 0)")
    state_group.add_argument("--nbar", type=float,
                             help="Thermal mean photon number (default: 0)")
    state_group.add_argument(*photon_flags, dest="fock_n", type=int,
                             help="Photon number of the Fock preset")
    return source


def create_arg_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser for the homodyne uncertainty tool"""
    parser = argparse.ArgumentParser(
        description="Homodyne Uncertainty - Check Heisenberg and Schroedinger-Robertson relations on optical tomograms",
        epilog="""
        Example usage:
          %(prog)s generate --preset vacuum --thetas 48 --x-range -7:7:281 --out vac.json
          %(prog)s sample --preset vacuum --phases 0,0.7853981633974483,1.5707963267948966 --n 100000 --seed 42 --out s.csv
          %(prog)s check vac.json --out report.json
          %(prog)s wigner vac.json --out wigner.json --slice-csv slice.csv
        """,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )

    # Logging arguments
    logging_group = parser.add_argument_group("Logging")
    logging_group.add_argument("--verbose", action="store_true",
                               help="Log at DEBUG level")
    logging_group.add_argument("--log-file", type=str,
                               help="Also log to this file (rotated at 10 MB)")

    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}",
                        help="Show program version and exit")

    subparsers = parser.add_subparsers(dest="command", required=True)

    # --- generate ---
    generate = subparsers.add_parser("generate", help="Write an optical tomogram grid",
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    source = _add_state_arguments(generate, ("--n", "--fock-n"))
    source.add_argument("--samples", type=str,
                        help="Histogram a sample CSV or JSON into a grid")
    grid_group = generate.add_argument_group("Grid")
    grid_group.add_argument("--thetas", type=int, default=DEFAULT_THETA_COUNT,
                            help=f"Number of phases over [0, pi), or theta bins for --samples (default: {DEFAULT_THETA_COUNT})")
    grid_group.add_argument("--x-range", type=parse_range,
                            help="Quadrature axis A:B:N; N bins for --samples (default: the state mean plus "
                                 f"{X_RANGE_STANDARD_DEVIATIONS:g} standard deviations of its widest quadrature, "
                                 f"at least {_format_range(DEFAULT_X_RANGE)}; {_format_range(DEFAULT_X_RANGE)} for --samples)")
    grid_group.add_argument("--allow-unphysical", action="store_true",
                            help="Accept a Gaussian --spec that violates physicality (adversarial grids)")
    grid_group.add_argument("--eps-norm", type=float,
                            help=f"Row normalization tolerance (default: {EPS_NORM_ANALYTIC} analytic, {EPS_NORM_MEASURED} histogram)")
    grid_group.add_argument("--min-samples", type=int, default=MIN_SAMPLES_PER_PHASE,
                            help=f"Minimum records per theta bin (default: {MIN_SAMPLES_PER_PHASE})")
    _add_output_arguments(generate, "json", out_required=True)

    # --- sample ---
    sample = subparsers.add_parser("sample", help="Simulate homodyne detection")
    _add_state_arguments(sample, ("--fock-n",))
    plan_group = sample.add_argument_group("Acquisition Plan")
    plan_group.add_argument("--phases", type=phases_from_text,
                            help="Comma-separated phases in radians (default: 0, pi/4, pi/2)")
    plan_group.add_argument("--n", dest="samples_per_phase", type=int, default=100000,
                            help="Samples per phase (default: 100000)")
    plan_group.add_argument("--noise-sigma", type=float, default=0.0,
                            help="Standard deviation of additive detector noise (default: 0)")
    _add_output_arguments(sample, "csv", out_required=True)

    # --- check ---
    check = subparsers.add_parser("check", help="Run the uncertainty checks on a grid or sample set")
    check.add_argument("input", type=str,
                       help="Tomogram grid JSON, sample CSV or sample JSON")
    check_group = check.add_argument_group("Checks")
    check_group.add_argument("--config", type=str,
                             help="JSON file of check settings; explicit flags take precedence")
    check_group.add_argument("--bootstrap", type=int,
                             help="Bootstrap replicates for sample data (default: 200)")
    check_group.add_argument("--scan", type=str,
                             help="Comma-separated base angles in radians, or 'default' for k*pi/48")
    check_group.add_argument("--eps-norm", type=float, default=EPS_NORM_MEASURED,
                             help=f"Row normalization tolerance for grid input (default: {EPS_NORM_MEASURED})")
    check_group.add_argument("--min-samples", type=int, default=MIN_SAMPLES_PER_PHASE,
                             help=f"Minimum records per phase (default: {MIN_SAMPLES_PER_PHASE})")
    check_group.add_argument("--theta-tol", type=float,
                             help="Phase matching tolerance for sample data (default: 1e-6)")
    check_group.add_argument("--rule", choices=QUADRATURE_RULES,
                             help="Quadrature rule for grid moments (default: trapezoid)")
    check_group.add_argument("--workers", type=int,
                             help="Threads for the F(theta) scan (default: 1)")
    _add_output_arguments(check, "json", out_required=False)
    check.set_defaults(seed=None)

    # --- wigner ---
    wigner = subparsers.add_parser("wigner", help="Reconstruct the Wigner function by filtered back-projection")
    wigner.add_argument("input", type=str,
                        help="Tomogram grid JSON")
    reconstruction_group = wigner.add_argument_group("Reconstruction")
    reconstruction_group.add_argument("--q-range", type=parse_range, default=DEFAULT_RECONSTRUCTION_RANGE,
                                      help=f"q axis A:B:N (default: {_format_range(DEFAULT_RECONSTRUCTION_RANGE)})")
    reconstruction_group.add_argument("--p-range", type=parse_range, default=DEFAULT_RECONSTRUCTION_RANGE,
                                      help=f"p axis A:B:N (default: {_format_range(DEFAULT_RECONSTRUCTION_RANGE)})")
    reconstruction_group.add_argument("--cutoff", type=float, default=DEFAULT_FILTER_CUTOFF,
                                      help=f"Filter cutoff as a fraction of Nyquist (default: {DEFAULT_FILTER_CUTOFF})")
    reconstruction_group.add_argument("--window", choices=FILTER_WINDOWS, default="ramp",
                                      help="Filter window (default: ramp)")
    reconstruction_group.add_argument("--slice-csv", type=str,
                                      help="Also write W(q, p0) along q as CSV")
    reconstruction_group.add_argument("--slice-p", type=float, default=0.0,
                                      help="p0 of the slice (default: 0)")
    _add_output_arguments(wigner, "json", out_required=True)

    return parser


def check_conflicts(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Reject flags that do not apply to the selected state source (usage error, exit 2)"""
    if args.command not in ("generate", "sample"):
        return
    given = [name for name in STATE_PARAMETERS if getattr(args, name, None) is not None]
    if args.preset is None:
        if given:
            parser.error(f"state parameters ({', '.join(given)}) only apply to --preset")
    else:
        foreign = [name for name in given if name not in PRESET_PARAMETERS[args.preset]]
        if foreign:
            parser.error(f"preset '{args.preset}' does not take: {', '.join(foreign)}")
        if args.preset == "fock" and args.fock_n is None:
            parser.error("preset 'fock' requires the photon number")
    if getattr(args, "allow_unphysical", False) and args.spec is None:
        parser.error("--allow-unphysical only applies to --spec")


def provenance(args: argparse.Namespace) -> Dict[str, Any]:
    """Effective configuration (flags plus defaults) and library versions"""
    arguments = {}
    for key, value in sorted(vars(args).items()):
        arguments[key] = list(value) if isinstance(value, tuple) else value
    return {
        "command": args.command,
        "arguments": arguments,
        "versions": {"homodyne_uncertainty": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
    }


def state_from_args(args: argparse.Namespace) -> StateModel:
    """Build the state selected by --preset or --spec"""
    if args.spec is not None:
        return state_from_dict(load_json(args.spec))

    def value(name: str) -> float:
        given = getattr(args, name)
        return 0.0 if given is None else given

    if args.preset == "vacuum":
        return vacuum()
    if args.preset == "coherent":
        return coherent(complex(value("alpha_re"), value("alpha_im")))
    if args.preset == "squeezed":
        return squeezed_vacuum(value("r"), value("phi"))
    if args.preset == "thermal":
        return thermal(value("nbar"))
    if args.preset == "fock":
        if args.fock_n is None:
            raise InvalidStateError("The fock preset requires a photon number")
        return fock(args.fock_n)
    raise InvalidStateError(f"Unknown preset {args.preset!r}")


def _analytic_thetas(count: int) -> np.ndarray:
    if count < 1:
        raise ValueError(f"--thetas must be at least 1, got {count}")
    return np.arange(count) * math.pi / count


def _state_axis(mean: Tuple[float, float], covariance: Tuple[float, float, float]) -> np.ndarray:
    """
    Symmetric quadrature axis with the default step, reaching
    X_RANGE_STANDARD_DEVIATIONS widest-quadrature deviations past the mean
    and never narrower than the default range
    """
    low, high, count = DEFAULT_X_RANGE
    step = (high - low) / (count - 1)
    sigma_qq, sigma_pp, sigma_qp = covariance
    widest = (sigma_qq + sigma_pp) / 2 + math.hypot((sigma_qq - sigma_pp) / 2, sigma_qp)
    reach = math.hypot(*mean) + X_RANGE_STANDARD_DEVIATIONS * math.sqrt(max(widest, 0.0))
    points = max(int(math.ceil(reach / step - 1e-9)), int(round(high / step)))
    return np.linspace(-points * step, points * step, 2 * points + 1)


def _build_grid(args: argparse.Namespace) -> Tuple[OpticalTomogramGrid, float]:
    if args.samples is not None:
        low, high, count = args.x_range or DEFAULT_X_RANGE
        args.x_range = (low, high, count)
        samples = read_samples(args.samples, args.min_samples)
        grid = histogram_tomogram(samples, args.thetas, count, (low, high))
        return grid, EPS_NORM_MEASURED

    def axis(mean: Tuple[float, float], covariance: Tuple[float, float, float]) -> np.ndarray:
        if args.x_range is not None:
            return np.linspace(*args.x_range)
        xs = _state_axis(mean, covariance)
        args.x_range = (float(xs[0]), float(xs[-1]), int(xs.size))
        logger.debug(f"Quadrature axis from the state: {_format_range(args.x_range)}")
        return xs

    thetas = _analytic_thetas(args.thetas)
    try:
        state = state_from_args(args)
    except UnphysicalStateError:
        if not args.allow_unphysical:
            raise
        spec = load_json(args.spec)
        logger.warning("Building an unphysical grid from the state spec moments (--allow-unphysical)")
        xs = axis((spec["mean_q"], spec["mean_p"]), (spec["sigma_qq"], spec["sigma_pp"], spec["sigma_qp"]))
        grid = OpticalTomogramGrid.from_moments(
            thetas, xs,
            spec["mean_q"], spec["mean_p"], spec["sigma_qq"], spec["sigma_pp"], spec["sigma_qp"],
            metadata={"source": "moments", "state": spec, "unphysical": True},
        )
        return grid, EPS_NORM_ANALYTIC

    xs = axis(exact_mean(state), exact_covariance(state))
    grid = OpticalTomogramGrid.from_state(state, thetas, xs, {"source": "exact", "state": state_to_dict(state)})
    return grid, EPS_NORM_ANALYTIC


def run_generate(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Write an exact (or histogrammed) tomogram grid

    Args:
        args: Parsed command-line arguments

    Returns:
        Result dict with exit_code, output path and grid shape
    """
    result = {"success": False, "exit_code": EXIT_DATA_ERROR, "error": None, "output": None, "shape": None}
    try:
        grid, default_eps = _build_grid(args)
        eps_norm = args.eps_norm if args.eps_norm is not None else default_eps
        validate(grid, eps_norm).raise_if_failed()

        if args.format == "csv":
            result["output"] = write_grid_csv(grid, args.out, {"cli": provenance(args)})
        else:
            result["output"] = write_grid(grid, args.out, {"cli": provenance(args)})
        result["shape"] = list(grid.w.shape)
        result["success"] = True
        result["exit_code"] = EXIT_PASS
        logger.info(f"Tomogram grid written to {result['output']}")
    except DATA_ERRORS as e:
        logger.error(f"Generate failed: {str(e)}")
        result["error"] = str(e)
    return result


def run_sample(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Simulate an acquisition and write the sample set

    Returns:
        Result dict with exit_code, output path and record count
    """
    result = {"success": False, "exit_code": EXIT_DATA_ERROR, "error": None, "output": None, "records": 0}
    try:
        state = state_from_args(args)
        phases = args.phases if args.phases is not None else (0.0, math.pi / 4, math.pi / 2)
        plan = AcquisitionPlan(phases, args.samples_per_phase, args.seed, args.noise_sigma)
        samples = acquire(state, plan)

        if args.format == "json":
            result["output"] = write_samples_json(samples, args.out, {"cli": provenance(args)})
        else:
            result["output"] = write_samples_csv(samples, args.out, {"cli": provenance(args)})
        result["records"] = len(samples)
        result["success"] = True
        result["exit_code"] = EXIT_PASS
    except DATA_ERRORS as e:
        logger.error(f"Sample failed: {str(e)}")
        result["error"] = str(e)
    return result


def check_config_from_args(args: argparse.Namespace) -> CheckConfig:
    """CheckConfig from --config, then explicit flags"""
    config = CheckConfig()
    if args.config is not None:
        settings = load_json(args.config)
        if not isinstance(settings, dict):
            raise ValueError("Check config must be a JSON object")
        config = CheckConfig.from_dict(settings)

    overrides: Dict[str, Any] = {}
    if args.bootstrap is not None:
        overrides["bootstrap_replicates"] = args.bootstrap
    if args.theta_tol is not None:
        overrides["theta_tol"] = args.theta_tol
    if args.rule is not None:
        overrides["rule"] = args.rule
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.scan is not None:
        scan = default_scan() if args.scan == "default" else phases_from_text(args.scan)
        overrides["theta_scan"] = tuple(scan)
    return dataclasses.replace(config, **overrides)


def run_check(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Run every uncertainty check on a grid or sample set

    Returns:
        Result dict with exit_code (0 pass, 1 check failed, 2 data error),
        the report and the output path
    """
    result = {"success": False, "exit_code": EXIT_DATA_ERROR, "error": None, "output": None, "report": None}
    try:
        config = check_config_from_args(args)
        data = read_tomographic_data(args.input, args.min_samples)
        if isinstance(data, OpticalTomogramGrid):
            validate(data, args.eps_norm, config.rule).raise_if_failed()
        elif not isinstance(data, QuadratureSampleSet):
            raise ValueError(f"Unsupported input {args.input}")

        report = f_scan(data, config=config, provenance={"input": args.input, "cli": provenance(args)})
        if args.out:
            if args.format == "csv":
                result["output"] = write_f_curve_csv(report, args.out)
            else:
                result["output"] = write_report(report, args.out)

        result["report"] = report
        result["success"] = report.all_passed
        result["exit_code"] = EXIT_PASS if report.all_passed else EXIT_CHECK_FAILED
    except DATA_ERRORS as e:
        logger.error(f"Check failed on input data: {str(e)}")
        result["error"] = str(e)
    return result


def _axis(values: Tuple[float, float, int]) -> np.ndarray:
    return np.linspace(*values)


def run_wigner(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Reconstruct the Wigner function from a tomogram grid

    Returns:
        Result dict with exit_code, output paths, W at the origin and the minimum of W
    """
    result = {
        "success": False,
        "exit_code": EXIT_DATA_ERROR,
        "error": None,
        "output": None,
        "slice": None,
        "w_origin": None,
        "w_min": None,
    }
    try:
        grid = read_grid(args.input)
        wigner = inverse_radon(grid, _axis(args.q_range), _axis(args.p_range), args.cutoff, args.window)

        if args.format == "csv":
            result["output"] = write_wigner_csv(wigner, args.out, {"cli": provenance(args)})
        else:
            result["output"] = write_wigner(wigner, args.out, {"cli": provenance(args)})
        if args.slice_csv:
            result["slice"] = write_wigner_slice_csv(wigner, args.slice_p, args.slice_csv, {"cli": provenance(args)})

        if wigner.qs[0] <= 0 <= wigner.qs[-1] and wigner.ps[0] <= 0 <= wigner.ps[-1]:
            result["w_origin"] = wigner.value_at(0.0, 0.0)
        result["w_min"] = float(np.min(wigner.w))
        result["success"] = True
        result["exit_code"] = EXIT_PASS
    except DATA_ERRORS as e:
        logger.error(f"Wigner reconstruction failed: {str(e)}")
        result["error"] = str(e)
    return result


COMMANDS = {
    "generate": run_generate,
    "sample": run_sample,
    "check": run_check,
    "wigner": run_wigner,
}


def _print_summary(command: str, result: Dict[str, Any]) -> None:
    if result["error"]:
        print(f"\n❌ {command} failed: {result['error']}")
        return

    if command == "check":
        report = result["report"]
        mark = "✅" if report.all_passed else "❌"
        print(f"\n{mark} Uncertainty checks {'passed' if report.all_passed else 'FAILED'}")
        print(f"   Heisenberg product: {report.heisenberg_product:.6g} ({'pass' if report.heisenberg_pass else 'FAIL'})")
        print(f"   SR determinant:     {report.sr_determinant:.6g} ({'pass' if report.sr_pass else 'FAIL'})")
        values = [point.f for point in report.f_curve if point.f is not None]
        if values:
            print(f"   min F(theta):       {min(values):.6g} ({'pass' if report.f_pass else 'FAIL'})")
        for warning in report.warnings:
            print(f"\n⚠️ Warning: {warning}")
    elif command == "wigner":
        print("\n✅ Wigner function reconstructed")
        if result["w_origin"] is not None:
            print(f"   W(0, 0) = {result['w_origin']:.6g}, min W = {result['w_min']:.6g}")
        if result["slice"]:
            print(f"\n📈 Slice written to: {result['slice']}")
    elif command == "sample":
        print(f"\n✅ {result['records']} samples acquired")
    else:
        print(f"\n✅ Tomogram grid {result['shape'][0]}x{result['shape'][1]} generated")

    if result["output"]:
        print(f"\n💾 Output saved to: {result['output']}")


def main(argv: Optional[Sequence[str]] = None) -> None:
    """
    Main entry point for the homodyne uncertainty command-line interface
    """
    try:
        parser = create_arg_parser()
        args = parser.parse_args(_join_range_values(sys.argv[1:] if argv is None else list(argv)))
        check_conflicts(parser, args)

        configure_logging("DEBUG" if args.verbose else "INFO", args.log_file)

        result = COMMANDS[args.command](args)
        _print_summary(args.command, result)
        sys.exit(result["exit_code"])

    except KeyboardInterrupt:
        print("\n\nUser interrupted the operation")
        sys.exit(EXIT_DATA_ERROR)
    except Exception as e:
        print(f"\n❌ Unexpected error: {str(e)}")
        logger.exception(f"Unexpected error in main: {str(e)}")
        sys.exit(EXIT_DATA_ERROR)


if __name__ == "__main__":
    main()
