"""
Command-line entry point for the reliability bounds toolkit.

    python -m src.main info --channel data/channels/typewriter3.json
    python -m src.main sweep --channel data/channels/bsc10.json --start 0.01 --stop C --step 0.01
    python -m src.main product --channel data/channels/identity2.json --second data/channels/typewriter3.json
    python -m src.main approx --channel data/channels/typewriter3.json --quantity C0_fb --n-max 50
    python -m src.main semidecide --channel data/channels/typewriter3.json --quantity R_inf --lambda 0.7
"""

import argparse
import asyncio
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from config import Config

from .approx import PrefactorReading, Quantity, approx_trace, semi_decide_below
from .channel import Channel, channel_to_document, load_channel
from .errors import NonConvergence, ReliabilityError, RhoCapExceeded
from .expurgation import e_ex
from .gallager import BoundValue, RhoSearchConfig, capacity, e_r, e_sp
from .logger import RunLogger
from .report import ChannelReport, ProductReport, build_channel_report, build_product_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNDETERMINED = 10

BOUND_ORDER = ("sp", "r", "ex")
REPORT_FORMATS = ["text", "csv", "json"]
TABLE_FORMATS = ["csv", "json"]


# =============================================================================
# SWEEP
# =============================================================================

@dataclass(frozen=True)
class SweepSpec:
    """Rate grid and bound selection for a sweep."""
    rates: Tuple[float, ...]
    bounds: Tuple[str, ...] = BOUND_ORDER
    k: int = 1

    def __post_init__(self):
        if not self.rates:
            raise ValueError("sweep needs at least one rate")
        if not self.bounds or set(self.bounds) - set(BOUND_ORDER):
            raise ValueError(f"bounds must be a nonempty subset of {BOUND_ORDER}, got {self.bounds}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    @classmethod
    def from_range(cls, start: float, stop: float, step: float,
                   bounds: Sequence[str] = BOUND_ORDER, k: int = 1) -> "SweepSpec":
        if step <= 0:
            raise ValueError(f"step must be > 0, got {step}")
        if start >= stop:
            raise ValueError(f"start {start} must be below stop {stop}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        rates = tuple(start + i * step for i in range(count))
        return cls(rates=rates, bounds=_ordered(bounds), k=k)

    @property
    def header(self) -> List[str]:
        columns = ["R"]
        for bound in self.bounds:
            columns.append(f"E_ex_{self.k}" if bound == "ex" else f"E_{bound}")
        return columns


def _ordered(bounds: Sequence[str]) -> Tuple[str, ...]:
    unknown = set(bounds) - set(BOUND_ORDER)
    if unknown:
        raise ValueError(f"unknown bounds: {sorted(unknown)}")
    return tuple(b for b in BOUND_ORDER if b in set(bounds))


def format_value(value: float) -> str:
    if math.isinf(value):
        return "inf"
    if math.isnan(value):
        return "nan"
    return f"{value:.12g}"


class BoundSweeper:
    """Computes sweep rows in a worker pool and returns them in grid order."""

    def __init__(self, w: Channel, spec: SweepSpec, config: Config):
        self._w = w
        self._spec = spec
        self._config = config
        self._search = RhoSearchConfig.from_config(config)

    def _guarded(self, name: str, rate: float, compute) -> float:
        try:
            return compute()
        except (RhoCapExceeded, NonConvergence) as e:
            logger.warning("%s at R=%.6g: %s", name, rate, e)
            return math.nan

    def compute_row(self, rate: float) -> Dict[str, float]:
        row: Dict[str, float] = {"R": rate}
        for bound in self._spec.bounds:
            if bound == "sp":
                row["E_sp"] = self._guarded(
                    "E_sp", rate, lambda: float(e_sp(self._w, rate, self._search))
                )
            elif bound == "r":
                row["E_r"] = self._guarded("E_r", rate, lambda: e_r(self._w, rate, self._search))
            else:
                row[f"E_ex_{self._spec.k}"] = self._guarded(
                    "E_ex", rate, lambda: float(self._expurgation(rate))
                )
        return row

    def _expurgation(self, rate: float) -> BoundValue:
        return e_ex(
            self._w,
            rate,
            self._spec.k,
            config=self._search,
            size_cap=self._config.size_cap,
            vertex_cap=self._config.independence_vertex_cap,
            qk_tolerance=self._config.qk_tolerance,
            qk_max_iter=self._config.qk_max_iter,
            exhaustive_max=self._config.exhaustive_support_max,
        ).value

    async def run(self) -> List[Dict[str, float]]:
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self._config.sweep_workers) as executor:
            tasks = [
                loop.run_in_executor(executor, self.compute_row, rate)
                for rate in self._spec.rates
            ]
            return list(await asyncio.gather(*tasks))


def render_sweep(spec: SweepSpec, rows: List[Dict[str, float]], fmt: str) -> str:
    header = spec.header
    if fmt == "json":
        return json.dumps(
            [{col: format_value(row[col]) for col in header} for row in rows], indent=2
        ) + "\n"
    lines = [",".join(header)]
    lines.extend(",".join(format_value(row[col]) for col in header) for row in rows)
    return "\n".join(lines) + "\n"


def flatten_document(document: dict, prefix: str = "") -> List[Tuple[str, str]]:
    """Dotted key,value pairs for a nested report document."""
    pairs = []
    for key, value in document.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            pairs.extend(flatten_document(value, f"{name}."))
        elif isinstance(value, (list, tuple)):
            pairs.extend(flatten_document(dict(enumerate(value)), f"{name}."))
        elif value is None:
            pairs.append((name, ""))
        elif isinstance(value, float):
            pairs.append((name, format_value(value)))
        else:
            pairs.append((name, str(value)))
    return pairs


def render_report(report: Union[ChannelReport, ProductReport], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt == "csv":
        lines = ["key,value"]
        lines.extend(f"{key},{value}" for key, value in flatten_document(report.to_dict()))
        return "\n".join(lines) + "\n"
    return report.to_text()


# =============================================================================
# COMMANDS
# =============================================================================

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_info(args: argparse.Namespace, config: Config, run_log: RunLogger) -> int:
    w = _load(args.channel, run_log)
    report = build_channel_report(
        w,
        blocklengths=tuple(range(1, args.max_k + 1)),
        size_cap=config.size_cap,
        vertex_cap=config.independence_vertex_cap,
        capacity_tolerance=config.capacity_tolerance,
        capacity_max_iter=config.capacity_max_iter,
        oracle_iterations=config.fictitious_play_iterations if args.oracle else None,
    )
    run_log.log_result("report", report.to_dict())
    text = render_report(report, args.format)
    _emit(text, args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: Config, run_log: RunLogger) -> int:
    w = _load(args.channel, run_log)
    bounds = [b.strip() for b in args.bounds.split(",") if b.strip()]
    if args.rates:
        spec = SweepSpec(rates=tuple(float(r) for r in args.rates.split(",")),
                         bounds=_ordered(bounds), k=args.k)
    else:
        if args.stop.upper() == "C":
            stop = capacity(w, config.capacity_tolerance, config.capacity_max_iter)
        else:
            stop = float(args.stop)
        spec = SweepSpec.from_range(args.start, stop, args.step, bounds, args.k)

    rows = asyncio.run(BoundSweeper(w, spec, config).run())
    for row in rows:
        run_log.log_result("sweep_row", {k: format_value(v) for k, v in row.items()})
    _emit(render_sweep(spec, rows, args.format), args.out)
    return EXIT_OK


def cmd_product(args: argparse.Namespace, config: Config, run_log: RunLogger) -> int:
    w1 = _load(args.channel, run_log)
    w2 = load_channel(args.second)
    report = build_product_report(w1, w2, size_cap=config.size_cap)
    run_log.log_result("product", report.to_dict())
    text = render_report(report, args.format)
    _emit(text, args.out)
    return EXIT_OK


def cmd_approx(args: argparse.Namespace, config: Config, run_log: RunLogger) -> int:
    w = _load(args.channel, run_log)
    trace = approx_trace(w, Quantity(args.quantity), args.n_max, PrefactorReading(args.reading))
    if args.format == "json":
        text = json.dumps({
            "quantity": trace.quantity.value,
            "target": trace.target.rate,
            "entries": [[n, v] for n, v in trace.entries],
            "bounds": [[n, str(b)] for n, b in trace.bounds],
        }, indent=2) + "\n"
    else:
        text = trace.to_csv()
    run_log.log_result("trace", {"quantity": trace.quantity.value, "entries": trace.entries})
    _emit(text, args.out)
    return EXIT_OK


def cmd_semidecide(args: argparse.Namespace, config: Config, run_log: RunLogger) -> int:
    w = _load(args.channel, run_log)
    decision = semi_decide_below(w, args.threshold, Quantity(args.quantity), config.semidecide_budget)
    if decision.accepted:
        line = (f"ACCEPTED at N={decision.at_n}: {decision.quantity.value} < {args.threshold:g} "
                f"(sequence value {decision.value:.12g})")
    else:
        line = (f"UNDETERMINED after budget {decision.budget}: "
                f"{decision.quantity.value} < {args.threshold:g} not confirmed")
    run_log.log_result("verdict", {"verdict": decision.verdict.value, "at_n": decision.at_n})
    _emit(line + "\n", args.out)
    return EXIT_OK if decision.accepted else EXIT_UNDETERMINED


def _load(path: str, run_log: RunLogger) -> Channel:
    w = load_channel(path)
    run_log.attach_channel(channel_to_document(w))
    return w


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--channel", required=True, help="Channel JSON document")
    common.add_argument("--out", help="Write output here instead of stdout")
    common.add_argument("--rho-cap", type=float, help="Upper end of the rho bracket")
    common.add_argument("--size-cap", type=int, help="Cap on product alphabet sizes")
    common.add_argument("--budget", type=int, help="Semi-decision budget")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--log-runs", action="store_true", help="Record this run as gzipped JSON")

    parser = argparse.ArgumentParser(description="Channel reliability bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    info = sub.add_parser("info", parents=[common], help="Full channel report")
    info.add_argument("--max-k", type=int, default=2, help="Largest blocklength for R_ex and C0")
    info.add_argument("--oracle", action="store_true", help="Add a fictitious-play bracket on Psi_inf")
    info.add_argument("--format", choices=REPORT_FORMATS, default="text")
    info.set_defaults(handler=cmd_info)

    sweep = sub.add_parser("sweep", parents=[common], help="Tabulate bounds over rates")
    sweep.add_argument("--start", type=float, default=0.01)
    sweep.add_argument("--stop", default="C", help="Last rate, or C for the capacity")
    sweep.add_argument("--step", type=float, default=0.01)
    sweep.add_argument("--rates", help="Explicit comma-separated rates (overrides the range)")
    sweep.add_argument("--bounds", default="sp,r,ex", help="Subset of sp,r,ex")
    sweep.add_argument("-k", type=int, default=1, help="Blocklength for the expurgation bound")
    sweep.add_argument("--format", choices=TABLE_FORMATS, default="csv")
    sweep.set_defaults(handler=cmd_sweep)

    prod = sub.add_parser("product", parents=[common], help="Additivity of R_inf and C0_fb")
    prod.add_argument("--second", required=True, help="Second channel JSON document")
    prod.add_argument("--format", choices=REPORT_FORMATS, default="text")
    prod.set_defaults(handler=cmd_product)

    approx = sub.add_parser("approx", parents=[common], help="Approximation sequence trace")
    approx.add_argument("--quantity", choices=[q.value for q in Quantity], default="R_inf")
    approx.add_argument("--n-max", type=int, default=50)
    approx.add_argument("--reading", choices=[r.value for r in PrefactorReading], default="outside")
    approx.add_argument("--format", choices=TABLE_FORMATS, default="csv")
    approx.set_defaults(handler=cmd_approx)

    semi = sub.add_parser("semidecide", parents=[common], help="Is the quantity below lambda?")
    semi.add_argument("--quantity", choices=[q.value for q in Quantity], default="R_inf")
    semi.add_argument("--lambda", dest="threshold", type=float, required=True)
    semi.set_defaults(handler=cmd_semidecide)

    return parser


def apply_overrides(args: argparse.Namespace, config: Config) -> Config:
    if args.rho_cap is not None:
        config.rho_cap = args.rho_cap
    if args.size_cap is not None:
        config.size_cap = args.size_cap
    if args.budget is not None:
        config.semidecide_budget = args.budget
    if args.verbose:
        config.log_level = "DEBUG"
    if args.log_runs:
        config.log_runs = True
    return config


def main(argv: Optional[Sequence[str]] = None, config: Optional[Config] = None) -> int:
    args = build_parser().parse_args(argv)
    config = apply_overrides(args, config or Config())

    logging.basicConfig(
        level=config.log_level.upper(),
        format="[%(name)s] %(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )

    run_log = RunLogger(log_dir=config.run_log_dir)
    if config.log_runs:
        run_log.start_run(args.command)

    try:
        return args.handler(args, config, run_log)
    except ReliabilityError as e:
        run_log.log_error(e)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        run_log.log_error(e)
        print(f"error: {e}", file=sys.stderr)
        return 2
    finally:
        path = run_log.end_run()
        if path:
            logger.info("run saved to %s", path)


if __name__ == "__main__":
    sys.exit(main())
