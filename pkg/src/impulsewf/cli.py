"""Command-line front end: sweeps over the burst probability with CSV output.

Subcommands
-----------
theory     closed-form rate and outage per (p, scheme)
simulate   theory columns plus Monte Carlo measurements
crossover  burst probability where aggressive and conservative rates meet
verify     flag rows where simulation and theory disagree beyond tolerance

Flags override values from an optional JSON config file (same keys as the
flag destinations), which override built-in defaults. The CSV stream is
deterministic: fixed column order, rows ordered by (p, scheme), '.' decimal
separator, LF newlines, numbers carrying 12 significant digits.

Exit codes: 0 ok, 1 configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .adaptation import (ErrorModel, NoCrossoverError, Scheme, crossover_pth,
                         rate_aggressive, rate_conservative, rate_for)
from .channel import ChannelParams
from .simulate import SimConfig, SimMode, expected_outage, simulate

__all__ = [
    "ConfigError",
    "SweepSpec",
    "CsvRow",
    "rows_to_csv",
    "parse_csv",
    "cmd_theory",
    "cmd_simulate",
    "cmd_crossover",
    "cmd_verify",
    "main",
    "app",
]

SCHEME_ORDER = (Scheme.CONVENTIONAL, Scheme.AGGRESSIVE, Scheme.CONSERVATIVE)
CSV_HEADER = "p,scheme,rate_theory,rate_sim,outage_theory,outage_sim,mean_power_sim,seed"

DEFAULTS: dict = {
    "snr_db": 0.0,
    "mu_db": 0.0,
    "pb": 1e-3,
    "ber_const": 0.2,
    "p_grid": [i / 10 for i in range(11)],
    "symbols": 100_000,
    "seed": 12345,
    "mode": "per-symbol",
    "block_len": 4,
    "schemes": [s.value for s in SCHEME_ORDER],
    "out": None,
}


class ConfigError(ValueError):
    """Invalid flag, config-file entry, or parameter combination."""


@dataclass(frozen=True)
class SweepSpec:
    """Fully resolved options for one sweep."""

    snr_db: float
    mu_db: float
    pb: float
    ber_const: float
    p_grid: tuple[float, ...]
    schemes: tuple[Scheme, ...]
    symbols: int
    seed: int
    mode: SimMode
    block_len: int
    out: str | None = None

    def error_model(self) -> ErrorModel:
        return ErrorModel(target_ber=self.pb, ber_coeff=self.ber_const)

    def params_at(self, p: float) -> ChannelParams:
        return ChannelParams(snr_db=self.snr_db, inr_db=self.mu_db, impulse_prob=p)

    def sim_config(self) -> SimConfig:
        return SimConfig(n_symbols=self.symbols, seed=self.seed,
                         mode=self.mode, block_len=self.block_len)


@dataclass(frozen=True)
class CsvRow:
    """One sweep point. Simulation columns stay empty for theory-only runs."""

    p: float
    scheme: str
    rate_theory: float
    rate_sim: float | None = None
    outage_theory: float = 0.0
    outage_sim: float | None = None
    mean_power_sim: float | None = None
    seed: int | None = None


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.12g}"


def _row_line(row: CsvRow) -> str:
    return ",".join([
        _fmt(row.p),
        row.scheme,
        _fmt(row.rate_theory),
        _fmt(row.rate_sim),
        _fmt(row.outage_theory),
        _fmt(row.outage_sim),
        _fmt(row.mean_power_sim),
        "" if row.seed is None else str(row.seed),
    ])


def rows_to_csv(rows: list[CsvRow]) -> str:
    return "\n".join([CSV_HEADER] + [_row_line(r) for r in rows]) + "\n"


def parse_csv(text: str) -> list[CsvRow]:
    """Parse a CSV stream emitted by this tool back into rows."""
    lines = text.strip("\n").split("\n")
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unrecognised CSV header")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != 8:
            raise ValueError(f"expected 8 cells, got {len(cells)}: {line!r}")
        opt = lambda s: None if s == "" else float(s)
        rows.append(CsvRow(
            p=float(cells[0]), scheme=cells[1], rate_theory=float(cells[2]),
            rate_sim=opt(cells[3]), outage_theory=float(cells[4]),
            outage_sim=opt(cells[5]), mean_power_sim=opt(cells[6]),
            seed=None if cells[7] == "" else int(cells[7])))
    return rows


def cmd_theory(spec: SweepSpec) -> str:
    """Closed-form sweep: one row per (p, scheme)."""
    em = spec.error_model()
    rows = []
    for p in spec.p_grid:
        params = spec.params_at(p)
        for scheme in spec.schemes:
            rows.append(CsvRow(
                p=p, scheme=scheme.value,
                rate_theory=rate_for(scheme, params, em),
                outage_theory=expected_outage(scheme, params, em)))
    return rows_to_csv(rows)


def cmd_simulate(spec: SweepSpec) -> str:
    """Sweep with Monte Carlo columns next to the closed forms."""
    em = spec.error_model()
    cfg = spec.sim_config()
    rows = []
    for p in spec.p_grid:
        params = spec.params_at(p)
        for scheme in spec.schemes:
            result = simulate(params, em, scheme, cfg)
            rows.append(CsvRow(
                p=p, scheme=scheme.value,
                rate_theory=rate_for(scheme, params, em),
                rate_sim=result.avg_se,
                outage_theory=expected_outage(scheme, params, em,
                                              cfg.mode, cfg.block_len),
                outage_sim=result.outage_frac,
                mean_power_sim=result.mean_power_frac,
                seed=result.seed_used))
    return rows_to_csv(rows)


def cmd_crossover(spec: SweepSpec) -> str:
    """Report where the aggressive and conservative rates intersect."""
    em = spec.error_model()
    params = spec.params_at(0.0)
    rate_n0 = rate_aggressive(params, em)
    rate_i = rate_conservative(params, em)
    lines = [
        f"snr_db={_fmt(spec.snr_db)} mu_db={_fmt(spec.mu_db)}",
        f"aggressive_rate_p0={_fmt(rate_n0)}",
        f"conservative_rate={_fmt(rate_i)}",
    ]
    try:
        p_th = crossover_pth(params, em)
    except NoCrossoverError:
        lines.append("status=no-crossover")
    else:
        lines.append(f"p_th={_fmt(p_th)}")
    return "\n".join(lines) + "\n"


def cmd_verify(spec: SweepSpec) -> tuple[str, bool]:
    """Compare simulation to theory row by row.

    A row fails when |rate_sim - rate_theory| exceeds
    max(0.005, 3 * standard error of the simulated mean).
    """
    em = spec.error_model()
    cfg = spec.sim_config()
    lines = []
    failures = 0
    total = 0
    for p in spec.p_grid:
        params = spec.params_at(p)
        for scheme in spec.schemes:
            theory = rate_for(scheme, params, em)
            result = simulate(params, em, scheme, cfg)
            stderr = result.avg_se_stderr
            diff = abs(result.avg_se - theory)
            tol = max(0.005, 3.0 * stderr)
            ok = diff <= tol
            total += 1
            failures += 0 if ok else 1
            lines.append(
                f"p={_fmt(p)} scheme={scheme.value} theory={_fmt(theory)} "
                f"sim={_fmt(result.avg_se)} diff={_fmt(diff)} "
                f"stderr={_fmt(stderr)} tol={_fmt(tol)} "
                f"{'PASS' if ok else 'FAIL'}")
    lines.append(f"verified {total - failures}/{total} rows"
                 + ("" if failures == 0 else f", {failures} FAILED"))
    return "\n".join(lines) + "\n", failures == 0


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="JSON file providing any of the other options")
    parser.add_argument("--snr-db", type=float, help="mean SNR in dB")
    parser.add_argument("--mu-db", type=float,
                        help="interference-to-noise power ratio in dB")
    parser.add_argument("--pb", type=float, help="instantaneous BER target")
    parser.add_argument("--ber-const", type=float,
                        help="BER curve coefficient (default 0.2)")
    parser.add_argument("--p-grid", metavar="P0,P1,...",
                        help="comma-separated burst probabilities to sweep")
    parser.add_argument("--schemes", metavar="S1,S2,...",
                        help="subset of conventional,aggressive,conservative")
    parser.add_argument("--symbols", type=int, help="symbols per simulated point")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--mode", choices=[m.value for m in SimMode],
                        help="sampling mode (default per-symbol)")
    parser.add_argument("--block-len", type=int,
                        help="symbols per coherence block in block mode")
    parser.add_argument("--out", metavar="FILE",
                        help="write output here instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impulsewf",
        description="Water-filling adaptation sweeps for a Rayleigh-faded "
                    "link with Bernoulli-gated impulsive interference.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, descr in (
            ("theory", "closed-form rate/outage sweep as CSV"),
            ("simulate", "sweep with Monte Carlo columns as CSV"),
            ("crossover", "aggressive/conservative crossover report"),
            ("verify", "check simulation against theory, exit 2 on failure")):
        _add_common_flags(sub.add_parser(name, help=descr))
    return parser


def _parse_grid(raw) -> tuple[float, ...]:
    if isinstance(raw, str):
        try:
            values = [float(s) for s in raw.split(",") if s.strip() != ""]
        except ValueError as exc:
            raise ConfigError(f"bad p-grid entry: {exc}") from None
    else:
        values = [float(v) for v in raw]
    if not values:
        raise ConfigError("p-grid is empty")
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise ConfigError(f"p-grid values must be in [0, 1]: {values}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"p-grid must be strictly increasing: {values}")
    return tuple(values)


def _parse_schemes(raw) -> tuple[Scheme, ...]:
    names = [s.strip() for s in raw.split(",")] if isinstance(raw, str) else list(raw)
    known = {s.value: s for s in SCHEME_ORDER}
    for name in names:
        if name not in known:
            raise ConfigError(f"unknown scheme {name!r}; "
                              f"choose from {sorted(known)}")
    picked = set(names)
    return tuple(s for s in SCHEME_ORDER if s.value in picked)


def resolve_spec(args: argparse.Namespace) -> SweepSpec:
    """Merge flags > config file > defaults into a validated SweepSpec."""
    file_values: dict = {}
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        unknown = set(file_values) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    def pick(key: str):
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        return file_values.get(key, DEFAULTS[key])

    try:
        spec = SweepSpec(
            snr_db=float(pick("snr_db")),
            mu_db=float(pick("mu_db")),
            pb=float(pick("pb")),
            ber_const=float(pick("ber_const")),
            p_grid=_parse_grid(pick("p_grid")),
            schemes=_parse_schemes(pick("schemes")),
            symbols=int(pick("symbols")),
            seed=int(pick("seed")),
            mode=SimMode(pick("mode")),
            block_len=int(pick("block_len")),
            out=pick("out"),
        )
        # Construct the value objects now so bad combinations fail before
        # any computation runs.
        spec.error_model()
        spec.params_at(0.0)
        spec.sim_config()
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    return spec


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = resolve_spec(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.command == "theory":
        _emit(cmd_theory(spec), spec.out)
    elif args.command == "simulate":
        _emit(cmd_simulate(spec), spec.out)
    elif args.command == "crossover":
        _emit(cmd_crossover(spec), spec.out)
    else:
        text, ok = cmd_verify(spec)
        _emit(text, spec.out)
        if not ok:
            return 2
    return 0


def app() -> None:
    raise SystemExit(main())
