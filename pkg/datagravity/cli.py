import argparse
import io
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from datagravity import __version__, config
from datagravity.engines.advantage import SWEEP_HEADER, AdvantageAnalyzer
from datagravity.engines.catalog import CLAIM_HEADER, RECORD_HEADER, MeasurementCatalog
from datagravity.engines.energy_model import EnergyModel
from datagravity.engines.gravity import GravityField
from datagravity.engines.placement import PlacementOptimizer
from datagravity.utils.errors import DataGravityError, DomainError, UsageError
from datagravity.utils.export import FIELD_HEADER, field_rows, format_cell, to_json, write_csv, write_field_csv
from datagravity.utils.report_generator import ReportGenerator
from datagravity.utils.run_record import OutputFormat, RunRecord
from datagravity.utils.scenario import load_profile, parse_scenario
from datagravity.utils.types import (
    AdvantageInputs,
    ClaimStatus,
    DivisionMode,
    PlacementMode,
    Region,
    SweepRange,
    TechProfile,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_CHECK_FAILED = 3

PJ_PER_J = 1e12

# Default proposition grid: 50 G_d x 40 beta x 50 r = 100000 points
VERIFY_G_D = 50
VERIFY_BETA = 40
VERIFY_R = 50


class Output:
    """Rendered command output plus the exit code it implies."""

    def __init__(self, text: str = "", payload: Optional[bytes] = None, code: int = EXIT_OK, path: Optional[Path] = None):
        self.text = text
        self.payload = payload
        self.code = code
        self.path = path

    @property
    def data(self) -> bytes:
        return self.payload if self.payload is not None else self.text.encode("utf-8")


def _floats(count: int) -> Callable[[str], Tuple[float, ...]]:
    def parse(text: str) -> Tuple[float, ...]:
        try:
            values = tuple(float(part) for part in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got '{text}'")
        if len(values) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got '{text}'")
        return values

    return parse


def _resolution(text: str) -> Tuple[int, int, int]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected nx,ny,nz, got '{text}'")
    if len(values) == 1:
        values = values * 3
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected nx,ny,nz, got '{text}'")
    return values


def _sweep_range(text: str) -> Dict[str, Any]:
    """start:stop:steps with an optional :log suffix. Only the syntax is checked
    here; the range itself is validated when the sweep runs."""
    parts = text.split(":")
    log = parts[-1] == "log"
    if log:
        parts = parts[:-1]
    try:
        if len(parts) == 1:
            return {"start": float(parts[0]), "stop": float(parts[0]), "steps": 1, "log": log}
        start, stop, steps = parts
        return {"start": float(start), "stop": float(stop), "steps": int(steps), "log": log}
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:steps[:log], got '{text}'")


def _build_range(flag: str, fields: Dict[str, Any]) -> SweepRange:
    try:
        return SweepRange(**fields)
    except ValidationError as e:
        raise DomainError(f"{flag}: {e.errors()[0]['msg']}") from e


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got '{text}'")
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None, help="seed for randomized steps")
    common.add_argument("--output", type=Path, default=None, help="write output here instead of stdout")
    common.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.TEXT.value,
        help="text, csv or json (pdf for catalog export only)",
    )

    parser = argparse.ArgumentParser(
        prog="datagravity",
        description="Energy accounting for data movement, data-gravity fields and kernel placement.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default=config.LOG_LEVEL,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        type=str.upper,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    gd = sub.add_parser("gd", parents=[common], help="operation-operand disjunction constant")
    gd.add_argument("--e-move-pj", type=float, help="movement energy per access, pJ")
    gd.add_argument("--e-compute-pj", type=float, help="compute energy per operation, pJ")
    gd.add_argument("--profile", type=Path, help="scenario or profile file")
    gd.add_argument("--per-bit", action="store_true", help="normalize per bit instead of per access")
    gd.set_defaults(handler=cmd_gd)

    adv = sub.add_parser("advantage", parents=[common], help="energy advantage of colocation")
    adv.add_argument("--gd", type=float, help="disjunction constant, dimensionless")
    adv.add_argument("--d", type=float, help="traditional separation, m")
    adv.add_argument("--dmin", type=float, help="colocated separation, m")
    adv.add_argument("--beta", type=float, help="distance exponent")
    adv.add_argument(
        "--verify",
        action="store_true",
        help=f"check the lower bound over a {VERIFY_G_D}x{VERIFY_BETA}x{VERIFY_R} log grid",
    )
    adv.set_defaults(handler=cmd_advantage)

    sweep = sub.add_parser("sweep", parents=[common], help="advantage over a G_d x beta x r grid")
    sweep.add_argument("--gd", type=_sweep_range, required=True, metavar="START:STOP:STEPS[:log]")
    sweep.add_argument("--beta", type=_sweep_range, required=True, metavar="START:STOP:STEPS")
    sweep.add_argument("--r", type=_sweep_range, required=True, metavar="START:STOP:STEPS[:log]")
    sweep.set_defaults(handler=cmd_sweep)

    field = sub.add_parser("field", parents=[common], help="sample the data-gravity field on a grid")
    field.add_argument("--scenario", type=Path, required=True)
    field.add_argument("--region", type=_floats(6), metavar="X0,Y0,Z0,X1,Y1,Z1")
    field.add_argument("--resolution", type=_resolution, default=(11, 11, 11), metavar="NX,NY,NZ")
    field.add_argument("--gd", type=float, help="defaults to the profile's disjunction constant")
    field.add_argument("--beta", type=float, help="defaults to the profile's beta")
    field.set_defaults(handler=cmd_field)

    place = sub.add_parser("place", parents=[common], help="place compute kernels near their data")
    place.add_argument("--scenario", type=Path, help="problem file; a seeded random instance otherwise")
    place.add_argument("--mode", choices=[m.value for m in PlacementMode], default=PlacementMode.CONTINUOUS.value)
    place.add_argument("--objects", type=int, default=4, help="random instance: data objects")
    place.add_argument("--kernels", type=int, default=3, help="random instance: kernels")
    place.add_argument("--slots", type=int, default=0, help="random instance: slots")
    place.add_argument("--beta", type=float, default=2.0, help="random instance: distance exponent")
    place.set_defaults(handler=cmd_place)

    catalog = sub.add_parser("catalog", parents=[common], help="published energy measurements and claims")
    catalog.add_argument("action", choices=["list", "check", "export"])
    catalog.add_argument(
        "--division",
        choices=[m.value for m in DivisionMode],
        default=DivisionMode.ENDPOINT.value,
        help="interval division: min/min and max/max (endpoint) or widest (conservative)",
    )
    catalog.set_defaults(handler=cmd_catalog)

    balance = sub.add_parser("balance", parents=[common], help="energy-balanced separation")
    balance.add_argument("--profile", type=Path)
    balance.add_argument("--gd", type=float)
    balance.add_argument("--beta", type=float)
    balance.add_argument("--d-ref-m", type=float, default=1.0)
    balance.set_defaults(handler=cmd_balance)

    return parser


def cmd_gd(args: argparse.Namespace) -> Output:
    if args.profile is not None:
        if args.e_move_pj is not None or args.e_compute_pj is not None:
            raise UsageError("use either --profile or --e-move-pj/--e-compute-pj")
        profile = load_profile(args.profile)
        bits = 1 if args.per_bit else profile.bits_per_access
        e_move_pj = EnergyModel.movement_energy(profile, bits, profile.d_ref) * PJ_PER_J
        e_compute_pj = profile.e_compute * PJ_PER_J
        g_d = EnergyModel.profile_disjunction(profile, per_bit=args.per_bit)
    else:
        if args.e_move_pj is None or args.e_compute_pj is None:
            raise UsageError("gd needs --e-move-pj and --e-compute-pj, or --profile")
        if args.per_bit:
            raise UsageError("--per-bit applies to --profile only")
        e_move_pj, e_compute_pj = args.e_move_pj, args.e_compute_pj
        g_d = EnergyModel.disjunction_constant(e_move_pj, e_compute_pj)

    header = ["e_move[pJ]", "e_compute[pJ]", "g_d[dimensionless]"]
    row = [e_move_pj, e_compute_pj, g_d]
    return _render(args, header, [row], text=f"{g_d:.2f}\n")


def cmd_advantage(args: argparse.Namespace) -> Output:
    analyzer = AdvantageAnalyzer()
    if args.verify:
        return _verify(args, analyzer)
    missing = [flag for flag, value in (("--gd", args.gd), ("--d", args.d), ("--dmin", args.dmin), ("--beta", args.beta)) if value is None]
    if missing:
        raise UsageError(f"advantage needs {', '.join(missing)}")
    report = analyzer.report(AdvantageInputs(g_d=args.gd, d=args.d, d_min=args.dmin, beta=args.beta))
    row = [report.g_d, report.beta, report.ratio, report.gamma, report.lower_bound, report.condition_holds]
    return _render(args, SWEEP_HEADER, [row], text=_key_values(zip(SWEEP_HEADER, row)))


def _verify(args: argparse.Namespace, analyzer: AdvantageAnalyzer) -> Output:
    g_values = np.logspace(0.0, 4.0, VERIFY_G_D)
    beta_values = np.linspace(1.0, 3.0, VERIFY_BETA + 1)[1:]
    result = analyzer.verify_proposition(g_values, beta_values, n_r=VERIFY_R)
    header = ["asserted", "excluded", "violations", "worst_margin[dimensionless]"]
    row = [result.asserted, result.excluded, len(result.violations), result.worst_margin]
    output = _render(args, header, [row], text=_key_values(zip(header, row)))
    output.code = EXIT_OK if result.passed else EXIT_CHECK_FAILED
    return output


def cmd_sweep(args: argparse.Namespace) -> Output:
    g_d = _build_range("--gd", args.gd)
    beta = _build_range("--beta", args.beta)
    r = _build_range("--r", args.r)
    analyzer = AdvantageAnalyzer()
    if args.format == OutputFormat.JSON.value:
        rows = analyzer.sweep_rows(g_d, beta, r)
        return Output(to_json([dict(zip(SWEEP_HEADER, row)) for row in rows]))
    _reject_pdf(args)
    sink = io.StringIO()
    analyzer.sweep(g_d, beta, r, sink)
    return Output(sink.getvalue())


def cmd_field(args: argparse.Namespace) -> Output:
    _reject_pdf(args)
    scenario = parse_scenario(args.scenario)
    if args.region is not None:
        region = Region(lo=args.region[:3], hi=args.region[3:])
    elif scenario.region is not None:
        region = scenario.region
    else:
        raise UsageError("field needs --region or a region in the scenario")
    g_d = args.gd if args.gd is not None else EnergyModel.profile_disjunction(scenario.profile)
    beta = args.beta if args.beta is not None else scenario.profile.beta
    samples = GravityField().sample_grid(scenario.objects, region, args.resolution, g_d, beta)
    if args.format == OutputFormat.JSON.value:
        return Output(to_json([dict(zip(FIELD_HEADER, row)) for row in field_rows(samples)]))
    sink = io.StringIO()
    write_field_csv(sink, samples)
    return Output(sink.getvalue())


def cmd_place(args: argparse.Namespace) -> Output:
    _reject_pdf(args)
    optimizer = PlacementOptimizer()
    mode = PlacementMode(args.mode)
    if args.scenario is not None:
        problem = parse_scenario(args.scenario).placement_problem()
    else:
        seed = 0 if args.seed is None else args.seed
        args.seed = seed
        problem = optimizer.random_problem(
            seed,
            n_objects=args.objects,
            n_kernels=args.kernels,
            n_slots=args.slots if mode == PlacementMode.CONTINUOUS else max(args.slots, args.kernels),
            beta=args.beta,
        )
    solution = optimizer.optimize(problem, mode=mode, seed=args.seed)

    if args.format == OutputFormat.JSON.value:
        return Output(to_json(solution.model_dump(mode="json")))
    header = ["kernel", "status", "x[m]", "y[m]", "z[m]", "slot"]
    rows = []
    for kernel in problem.kernels:
        point = solution.positions[kernel.id]
        slot = None if solution.slot_assignment is None else solution.slot_assignment.get(kernel.id)
        rows.append([kernel.id, solution.statuses[kernel.id].value, *(point or (None, None, None)), slot])
    if args.format == OutputFormat.CSV.value:
        sink = io.StringIO()
        write_csv(sink, header, rows)
        return Output(sink.getvalue())
    lines = [_table(header, rows)]
    lines.append(f"objective[J]  {solution.objective:.6g}")
    lines.append(f"iterations    {solution.iterations}")
    lines.append(f"converged     {format_cell(solution.converged)}")
    return Output("\n".join(lines) + "\n")


def cmd_catalog(args: argparse.Namespace) -> Output:
    catalog = MeasurementCatalog()
    mode = DivisionMode(args.division)

    if args.action == "list":
        _reject_pdf(args)
        return _render(args, RECORD_HEADER, catalog.record_rows(mode))

    report = catalog.check_claims(mode)
    code = EXIT_OK if report.passed else EXIT_CHECK_FAILED

    if args.action == "export" and args.format == OutputFormat.PDF.value:
        generator = ReportGenerator()
        path = generator.generate_claim_report(
            report, catalog.records, mode, None if args.output is None else str(args.output)
        )
        return Output(payload=Path(path).read_bytes(), code=code, path=Path(path))
    _reject_pdf(args)

    if args.action == "export" and args.format == OutputFormat.TEXT.value:
        args.format = OutputFormat.CSV.value
    rows = catalog.claim_rows(report)
    lines = []
    for check in report.checks:
        error = "" if check.relative_error is None else f" (relative error {check.relative_error:.2%})"
        lines.append(f"{check.status.value.upper():<6} {check.label}{error}")
    failed = sum(1 for c in report.checks if c.status == ClaimStatus.FAIL)
    lines.append(f"{len(report.checks)} claims, {failed} failed")
    output = _render(args, CLAIM_HEADER, rows, text="\n".join(lines) + "\n")
    output.code = code
    return output


def cmd_balance(args: argparse.Namespace) -> Output:
    if args.profile is not None:
        if args.gd is not None or args.beta is not None:
            raise UsageError("use either --profile or --gd/--beta")
        profile: TechProfile = load_profile(args.profile)
        g_d = EnergyModel.profile_disjunction(profile)
        beta = profile.beta
        separation = EnergyModel.balanced_separation(profile)
    else:
        if args.gd is None or args.beta is None:
            raise UsageError("balance needs --gd and --beta, or --profile")
        g_d, beta = args.gd, args.beta
        separation = EnergyModel.balanced_separation_for_gd(g_d, beta, args.d_ref_m)
    header = ["g_d[dimensionless]", "beta[dimensionless]", "balanced_separation[m]"]
    row = [g_d, beta, separation]
    return _render(args, header, [row], text=_key_values(zip(header, row)))


def _reject_pdf(args: argparse.Namespace) -> None:
    if args.format == OutputFormat.PDF.value:
        raise UsageError("--format pdf is only available for catalog export")


def _render(args: argparse.Namespace, header: Sequence[str], rows: List[List[Any]], text: Optional[str] = None) -> Output:
    _reject_pdf(args)
    if args.format == OutputFormat.JSON.value:
        return Output(to_json([dict(zip(header, row)) for row in rows]))
    if args.format == OutputFormat.CSV.value:
        sink = io.StringIO()
        write_csv(sink, header, rows)
        return Output(sink.getvalue())
    if text is None:
        return Output(_table(header, rows) + "\n")
    return Output(text)


def _key_values(pairs) -> str:
    return "".join(f"{name:<28}{_text_cell(value)}\n" for name, value in pairs)


def _text_cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _table(header: Sequence[str], rows: List[List[Any]]) -> str:
    cells = [list(header)] + [[_text_cell(value) for value in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    return "\n".join("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in cells)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format=config.LOG_FORMAT,
        datefmt=config.LOG_DATEFMT,
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(level)


def _params(args: argparse.Namespace) -> Dict[str, Any]:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key == "handler":
            continue
        if isinstance(value, Path):
            value = str(value)
        elif isinstance(value, tuple):
            value = list(value)
        params[key] = value
    return params


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        # argparse prints usage to stderr and exits 2; --help and --version exit 0
        return EXIT_USAGE if exit_.code not in (0, None) else EXIT_OK

    configure_logging(args.log_level)

    try:
        output = args.handler(args)
    except UsageError as e:
        print(f"datagravity {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValidationError) as e:
        logger.error(f"❌ {args.command} failed: {e}")
        print(f"datagravity {args.command}: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except DataGravityError as e:
        print(f"datagravity {args.command}: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN

    if args.output is not None:
        if output.path is None:
            args.output.write_bytes(output.data)
        record = RunRecord(
            subcommand=args.command,
            params=_params(args),
            seed=args.seed,
            version=__version__,
            output_format=OutputFormat(args.format),
            argv=argv,
        )
        record.attach_output(output.data)
        record.write(args.output)
        logger.info(f"💾 Wrote {args.output}")
    elif output.path is not None:
        print(f"PDF written to {output.path}")
    else:
        sys.stdout.write(output.text)
        sys.stdout.flush()
    return output.code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
