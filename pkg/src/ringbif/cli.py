"""
ringbif command line

Subcommands: equilibrium, blocks, spectrum, bifurcations, stability,
region, branch, simulate. Exit codes: 0 success, 1 analysis-level failure
or degeneracy, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Optional, Sequence

from ringbif import __version__
from ringbif.config import log_level
from ringbif.core.errors import RingBifError
from ringbif.core.spectral import DEFAULT_GRID
from ringbif.tools.bifurcations import METHODS, SPECTRUM_GRID, bifurcation_table, spectrum_table
from ringbif.tools.blocks import block_table
from ringbif.tools.branch import POINT_LABELS, run_branch
from ringbif.tools.equilibrium import equilibrium_report
from ringbif.tools.export import (
    format_number,
    format_table,
    records_to_rows,
    write_csv,
    write_gnuplot,
    write_json,
)
from ringbif.tools.simulate import run_simulation
from ringbif.tools.stability import region_report, stability_report

logger = logging.getLogger("ringbif")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_SCAN_POINT = re.compile(r"^scan:\d+$")


class UsageError(ValueError):
    """Invalid command-line configuration."""


@dataclass
class RunConfig:
    command: str
    n: int = 4
    mu: float = 0.0
    gamma: float = 0.0
    kind: str = "vortex"
    k: Optional[int] = None
    nu: Optional[float] = None
    nu_max: Optional[float] = None
    grid: Optional[int] = None
    method: str = "auto"
    json: Optional[Path] = None
    csv: Optional[Path] = None
    steps: int = 30
    amplitude: float = 1e-3
    step: Optional[float] = None
    truncation: int = 16
    point: Optional[str] = None
    t_end: float = 10.0
    tol: float = 1e-10
    sample_dt: float = 1e-2
    integrator: str = "dp54"
    perturb: float = 0.0
    seed: Optional[int] = None
    check_mu: Optional[float] = None
    verbose: bool = False

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> RunConfig:
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in vars(ns).items() if k in names})

    def validate(self) -> RunConfig:
        if self.n < 2:
            raise UsageError(f"--n must be >= 2, got {self.n}")
        if self.command == "stability" and self.n < 3:
            raise UsageError(f"stability needs --n >= 3, got {self.n}")
        if self.k is not None and not 1 <= self.k <= self.n:
            raise UsageError(f"--k must be in 1..{self.n}, got {self.k}")
        if self.nu_max is not None and not self.nu_max > 0:
            raise UsageError(f"--nu-max must be positive, got {self.nu_max}")
        if self.command == "bifurcations" and self.grid is not None and self.grid < 100:
            raise UsageError(f"--grid must be >= 100, got {self.grid}")
        if self.command == "spectrum" and self.grid is not None and self.grid < 2:
            raise UsageError(f"--grid must be >= 2, got {self.grid}")
        if self.command == "branch":
            if self.k is None:
                raise UsageError("branch needs --k")
            if not self.amplitude > 0:
                raise UsageError(f"--amplitude must be positive, got {self.amplitude}")
            if self.steps < 0:
                raise UsageError(f"--steps must be >= 0, got {self.steps}")
            if self.truncation < 1:
                raise UsageError(f"--truncation must be >= 1, got {self.truncation}")
            if self.point is not None and not (
                self.point in POINT_LABELS or _SCAN_POINT.match(self.point)
            ):
                raise UsageError(
                    f"--point must be one of {', '.join(POINT_LABELS)} or scan:INDEX, got {self.point}"
                )
        if self.command == "simulate":
            if self.mu == 0.0:
                raise UsageError("simulate needs --mu != 0: the central element has no dynamics at mu = 0")
            if not self.t_end > 0:
                raise UsageError(f"--t-end must be positive, got {self.t_end}")
            if self.perturb < 0:
                raise UsageError(f"--perturb must be >= 0, got {self.perturb}")
        return self


def _emit(config: RunConfig, report: dict) -> None:
    if config.json:
        write_json(config.json, report)
        logger.info("wrote %s", config.json)


def _plot_path(csv_path: Path, suffix: str = "") -> Path:
    return csv_path.with_name(f"{csv_path.stem}{suffix}.gp")


def _sibling(csv_path: Path, suffix: str) -> Path:
    return csv_path.with_name(f"{csv_path.stem}{suffix}{csv_path.suffix or '.csv'}")


# --- Commands ---


def cmd_equilibrium(config: RunConfig) -> int:
    report = equilibrium_report(config.n, config.mu)
    for key in ("n", "mu", "s1", "omega", "grad_norm", "kernel_dim", "potential"):
        print(f"{key:>12}  {format_number(report[key])}")
    print(format_table(["j", "x", "y"], [[j, *xy] for j, xy in enumerate(report["positions"])]))
    _emit(config, report)
    if config.csv:
        write_csv(config.csv, ["j", "x", "y"], [[j, *xy] for j, xy in enumerate(report["positions"])])
    return EXIT_OK if report["is_equilibrium"] else EXIT_FAILURE


def _matrix_lines(matrix: dict) -> list[str]:
    lines = []
    for re_row, im_row in zip(matrix["re"], matrix["im"]):
        lines.append("    " + "  ".join(format_number(complex(a, b)) for a, b in zip(re_row, im_row)))
    return lines


def cmd_blocks(config: RunConfig) -> int:
    report = block_table(config.n, config.mu)
    columns = ["k", "dim", "deviation", "conjugate_deviation"]
    print(format_table(columns, records_to_rows(report["blocks"], columns)))
    for row in report["blocks"]:
        print(f"B_{row['k']} (analytic):")
        print("\n".join(_matrix_lines(row["analytic"])))
    print(f"off-block residual {format_number(report['off_block_residual'])}")
    print(f"B_(n-k) = conj(B_k): {'OK' if report['conjugate_ok'] else 'FAILED'}")
    _emit(config, report)
    if config.csv:
        write_csv(config.csv, columns, records_to_rows(report["blocks"], columns))
    return EXIT_OK if report["ok"] else EXIT_FAILURE


def cmd_spectrum(config: RunConfig) -> int:
    report = spectrum_table(
        config.kind,
        config.n,
        config.mu,
        config.gamma,
        k=config.k,
        nu_max=config.nu_max,
        grid=config.grid or SPECTRUM_GRID,
    )
    rows = report["rows"]
    changes = [
        row
        for prev, row in zip([None, *rows], rows)
        if prev is None or prev["k"] != row["k"] or prev["morse_index"] != row["morse_index"]
    ]
    columns = ["k", "nu", "morse_index", "kernel_dim", "det"]
    print("Morse index changes:")
    print(format_table(columns, records_to_rows(changes, columns)))
    _emit(config, report)

    if config.csv:
        width = max(len(r["eigenvalues"]) for r in rows)
        ev_columns = [f"ev{i}" for i in range(width)]
        table = [
            [*(r[c] for c in columns), *r["eigenvalues"], *[None] * (width - len(r["eigenvalues"]))]
            for r in rows
        ]
        write_csv(config.csv, columns + ev_columns, table)
        write_gnuplot(
            _plot_path(config.csv),
            config.csv,
            "nu",
            ev_columns,
            columns + ev_columns,
            title=f"{config.kind} n={config.n} mu={config.mu:g} spectrum of m_k",
        )
    return EXIT_OK


def cmd_bifurcations(config: RunConfig) -> int:
    report = bifurcation_table(
        config.kind,
        config.n,
        config.mu,
        config.gamma,
        nu_max=config.nu_max,
        grid=config.grid or DEFAULT_GRID,
        method=config.method,
    )
    columns = ["k", "nu", "eta", "symmetry", "provenance", "det_residual", "label"]
    print(format_table(columns, records_to_rows(report["points"], columns)))
    _emit(config, report)
    if config.csv:
        write_csv(config.csv, columns, records_to_rows(report["points"], columns))
        write_gnuplot(
            _plot_path(config.csv),
            config.csv,
            "nu",
            ["k"],
            columns,
            title=f"{config.kind} n={config.n} mu={config.mu:g} gamma={config.gamma:g}",
        )
    return EXIT_OK


def cmd_stability(config: RunConfig) -> int:
    report = stability_report(config.n, config.check_mu)
    lower, upper = report["window"]["lower"], report["window"]["upper"]
    print(f"n={config.n} stability window ({format_number(lower if lower is not None else float('-inf'))}, "
          f"{format_number(upper)})")
    check = report.get("check")
    if check:
        for key, value in check.items():
            print(f"{key:>16}  {format_number(value)}")
    _emit(config, report)
    return EXIT_OK


def cmd_region(config: RunConfig) -> int:
    if config.nu is None:
        raise UsageError("region needs --nu")
    report = region_report(config.n, config.mu, config.nu)
    for key, value in report.items():
        print(f"{key:>20}  {format_number(value)}")
    _emit(config, report)
    return EXIT_OK if report["consistent"] else EXIT_FAILURE


def cmd_branch(config: RunConfig) -> int:
    report = run_branch(
        config.kind,
        config.n,
        config.mu,
        config.gamma,
        k=config.k,
        point=config.point,
        amplitude=config.amplitude,
        steps=config.steps,
        truncation=config.truncation,
        step=config.step,
    )
    columns = ["step", "nu", "period", "amplitude", "galerkin_residual", "symmetry_residual"]
    point = report["point"]
    print(f"k={report['k']} point {point['label']} nu={format_number(point['nu'])} eta={point['eta']}")
    print(format_table(columns, records_to_rows(report["states"], columns)))
    print(f"termination: {report['termination']}")
    if report["failure"]:
        print(f"failure: {report['failure']}")

    _emit(config, report)
    if config.csv:
        branch_columns = columns + ["arclength", "residual_norm", "k", "termination"]
        write_csv(config.csv, branch_columns, records_to_rows(report["states"], branch_columns))
        write_gnuplot(
            _plot_path(config.csv), config.csv, "nu", ["amplitude"], branch_columns,
            title=f"branch k={report['k']} from {point['label']}",
        )
        loop_columns = ["t"] + [f"{a}{j}" for j in range(config.n + 1) for a in ("x", "y")]
        for name, rows in report["loops"].items():
            write_csv(_sibling(config.csv, f"_loop_{name}"), loop_columns, rows)
    return EXIT_FAILURE if report["termination"] == "newton_failure" else EXIT_OK


def cmd_simulate(config: RunConfig) -> int:
    report = run_simulation(
        config.kind,
        config.n,
        config.mu,
        config.gamma,
        perturb=config.perturb,
        k=config.k or 1,
        t_end=config.t_end,
        tol=config.tol,
        method=config.integrator,
        sample_dt=config.sample_dt,
        seed=config.seed,
    )
    columns, rows = report.pop("columns"), report.pop("rows")
    for key, value in report["drift"].items():
        print(f"drift {key:>18}  {format_number(value)}")
    print(f"{'t_final':>24}  {format_number(report['t_final'])}")
    print(f"{'min_distance':>24}  {format_number(report['min_distance'])}")
    if "dominant_frequency" in report:
        print(f"{'dominant_frequency':>24}  {format_number(report['dominant_frequency'])}")

    _emit(config, report)
    if config.csv:
        write_csv(config.csv, columns, rows)
    collision = report["collision"]
    if collision:
        print(
            f"collision at t={format_number(collision['time'])} between elements "
            f"{collision['pair'][0]} and {collision['pair'][1]}",
            file=sys.stderr,
        )
        return EXIT_FAILURE
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "equilibrium": cmd_equilibrium,
    "blocks": cmd_blocks,
    "spectrum": cmd_spectrum,
    "bifurcations": cmd_bifurcations,
    "stability": cmd_stability,
    "region": cmd_region,
    "branch": cmd_branch,
    "simulate": cmd_simulate,
}


# --- Parser ---


def _common(parser: argparse.ArgumentParser, kind: bool = True) -> None:
    parser.add_argument("--n", type=int, required=True, help="number of peripheral elements")
    parser.add_argument("--mu", type=float, default=0.0, help="central circulation")
    if kind:
        parser.add_argument("--kind", choices=["vortex", "filament"], default="vortex")
        parser.add_argument("--gamma", type=float, default=0.0, help="traveling-wave speed (filament)")
    parser.add_argument("--json", type=Path, metavar="PATH", help="write the full report as JSON")
    parser.add_argument("--csv", type=Path, metavar="PATH", help="write a CSV table")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringbif", description="Bifurcation analysis of the polygonal vortex and filament ring."
    )
    parser.add_argument("--version", action="version", version=f"ringbif {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibrium", help="check the ring equilibrium")
    _common(p, kind=False)

    p = sub.add_parser("blocks", help="analytic vs numeric Hessian blocks B_k")
    _common(p, kind=False)

    p = sub.add_parser("spectrum", help="spectrum of m_k(nu) on a frequency grid")
    _common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--nu-max", type=float)
    p.add_argument("--grid", type=int)

    p = sub.add_parser("bifurcations", help="bifurcation frequencies and index jumps")
    _common(p)
    p.add_argument("--nu-max", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--method", choices=METHODS, default="auto")

    p = sub.add_parser("stability", help="spectral-stability window in mu")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--check-mu", type=float)
    p.add_argument("--json", type=Path, metavar="PATH")
    p.add_argument("--verbose", "-v", action="store_true")

    p = sub.add_parser("region", help="Morse region of (mu, nu) for the k = 1 vortex block")
    _common(p, kind=False)
    p.add_argument("--nu", type=float, required=True)

    p = sub.add_parser("branch", help="continue a periodic branch from a bifurcation point")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--point", help="nu_plus, nu_minus, nu_bar_plus, nu_bar_minus, nu0 or scan:INDEX")
    p.add_argument("--amplitude", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=30)
    p.add_argument("--step", type=float, help="arclength step (default: the amplitude)")
    p.add_argument("--truncation", type=int, default=16, help="number of Fourier modes")

    p = sub.add_parser("simulate", help="integrate from the perturbed ring")
    _common(p)
    p.add_argument("--k", type=int, help="block of the perturbation direction (default 1)")
    p.add_argument("--perturb", type=float, default=0.0)
    p.add_argument("--seed", type=int, help="random perturbation direction instead of a mode")
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--sample-dt", type=float, default=1e-2)
    p.add_argument("--integrator", choices=["rk4", "dp54", "dop853"], default="dp54")
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        format="[ringbif] %(levelname)s %(name)s: %(message)s",
        level=logging.DEBUG if verbose else log_level(),
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    _configure_logging(getattr(ns, "verbose", False))
    try:
        config = RunConfig.from_namespace(ns).validate()
        return COMMANDS[config.command](config)
    except UsageError as e:
        print(f"[ringbif] usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RingBifError as e:
        print(f"[ringbif] error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as e:
        print(f"[ringbif] invalid input: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
