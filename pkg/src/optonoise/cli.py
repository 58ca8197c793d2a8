"""``optonoise`` command line: figure presets and free-form sweeps as CSV.

Every CSV starts with ``#:`` lines holding the fully resolved run
configuration as ``key=value``; plain ``#`` lines are comments. Passing a
previous output back through ``--config`` repeats the run exactly. Values
resolve in the order preset < config file < flags.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import warnings
from dataclasses import dataclass
from importlib import metadata
from itertools import product
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .cavity import CavityParams, force_psd_momentum, force_psd_position
from .exceptions import OptonoiseError
from .optimal import (
    KINDS,
    StrategyConfig,
    angle_vs_frequency,
    angle_vs_power,
    g_opt,
    run_strategy,
    theta_opt,
    theta_opt_toy_single,
    theta_opt_toy_two,
    zeta_sql,
)
from .squeezing import SqueezeParams
from .toy import ToySingleParams, ToyTwoParams, noise_metric_single, noise_metric_two
from .verification import FAULTS, solver_suite, toy_agreement_suite

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


# -- value parsing ---------------------------------------------------------------

_PI_RE = re.compile(r"^([+-]?)(\d*\.?\d*(?:[eE][+-]?\d+)?)\*?pi(?:/(\d*\.?\d+))?$")


def parse_number(text: str) -> float:
    """Float, or a multiple of pi such as ``-pi/4`` or ``0.5*pi``."""
    s = text.strip().replace(" ", "")
    m = _PI_RE.match(s)
    if m:
        sign, coef, denom = m.groups()
        value = (float(coef) if coef else 1.0) * math.pi / (float(denom) if denom else 1.0)
        return -value if sign == "-" else value
    try:
        value = float(s)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"not a finite number: {text!r}")
    return value


def parse_list(text: str, allow_opt: bool = False) -> list:
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if allow_opt and item == "opt":
            out.append("opt")
        elif item:
            out.append(parse_number(item))
    if not out:
        raise ConfigError(f"empty list: {text!r}")
    return out


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    n: int
    log: bool = True

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = str(text).split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(f"grid must be lo:hi:n[:log|lin], got {text!r}")
        lo, hi = parse_number(parts[0]), parse_number(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise ConfigError(f"grid point count must be an integer, got {parts[2]!r}") from None
        scale = parts[3] if len(parts) == 4 else "log"
        if scale not in ("log", "lin"):
            raise ConfigError(f"grid scale must be 'log' or 'lin', got {scale!r}")
        if n < 2 or not lo < hi or (scale == "log" and lo <= 0):
            raise ConfigError(f"invalid grid {text!r}")
        return cls(lo, hi, n, scale == "log")

    def values(self) -> np.ndarray:
        if self.log:
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.n)
        return np.linspace(self.lo, self.hi, self.n)

    def __str__(self):
        return f"{fmt(self.lo)}:{fmt(self.hi)}:{self.n}:{'log' if self.log else 'lin'}"


def fmt(x) -> str:
    """Shortest round-trip decimal for a float."""
    if isinstance(x, str):
        return x
    return repr(float(x))


def fmt_list(values: Iterable) -> str:
    return ",".join(fmt(v) for v in values)


# -- configuration ---------------------------------------------------------------

# each key maps to a normalizer returning its canonical string form
def _num(v):
    return fmt(parse_number(v))


def _nums(v):
    return fmt_list(parse_list(v))


def _nums_opt(v):
    return fmt_list(parse_list(v, allow_opt=True))


def _num_opt(v):
    v = str(v).strip()
    return "opt" if v == "opt" else _num(v)


def _int(v):
    text = str(v).strip()
    try:
        return str(int(text))
    except ValueError:
        pass
    try:
        x = float(text)
    except ValueError:
        x = math.nan
    if not x.is_integer():
        raise ConfigError(f"not an integer: {v!r}")
    return str(int(x))


def _grid(v):
    return str(GridSpec.parse(v))


def _choice(*options):
    def norm(v):
        v = str(v).strip()
        if v not in options:
            raise ConfigError(f"expected one of {options}, got {v!r}")
        return v

    return norm


def _text(v):
    return str(v).strip()


KEYS: dict[str, Callable[[str], str]] = {
    "command": _choice("toy", "cavity", "strategy", "verify"),
    "target": _text,
    "beta": _num,
    "grid": _grid,
    "power_grid": _grid,
    "r": _nums,
    "phi": _nums,
    "theta": _nums_opt,
    "eta2": _nums,
    "asym": _nums,
    "mass": _num,
    "omega_m": _num,
    "kappa": _num,
    "gamma": _num,
    "coupling": _num_opt,
    "target_nu": _num,
    "freq_unit": _choice("rad/s", "Hz"),
    "seed": _int,
    "samples": _int,
    "count": _int,
}

_CAVITY_DEFAULTS = {"mass": "1e-06", "omega_m": "100.0", "kappa": "1000000.0", "gamma": "0.0001", "freq_unit": "rad/s"}

DEFAULTS = {
    ("toy", "single"): {"beta": "1.0", "grid": "0.1:10:200:log", "r": "0.0", "phi": "0.0", "theta": "0.0", "eta2": "0.0"},
    ("toy", "two"): {"beta": "1.0", "grid": "0.1:10:200:log", "r": "0.0", "phi": "0.0", "theta": "0.0", "asym": "1.0"},
    ("cavity", "position"): {**_CAVITY_DEFAULTS, "grid": "1e3:1e7:400:log", "r": "0.0", "phi": "0.0", "theta": "0.0", "coupling": "opt"},
    ("cavity", "momentum"): {**_CAVITY_DEFAULTS, "grid": "1e3:1e7:400:log", "r": "0.0", "phi": "0.0", "theta": "0.0", "coupling": "opt"},
    ("strategy", "broadband"): {**_CAVITY_DEFAULTS, "grid": "1e3:1e7:400:log", "r": "2.0", "phi": "0.0", "target_nu": "1e6"},
    ("strategy", "narrowband"): {**_CAVITY_DEFAULTS, "grid": "1:1e7:400:log", "r": "2.0", "phi": "0.0"},
    ("strategy", "angles"): {**_CAVITY_DEFAULTS, "grid": "1e3:1e7:400:log", "power_grid": "1e-2:1e2:200:log", "coupling": "1e21", "target_nu": "1e4"},
    ("verify", ""): {"seed": "42", "samples": "1000000", "count": "50"},
}

PRESETS = {
    "fig-single-b": {"command": "toy", "target": "single", "r": "0,2", "phi": "0,pi/4,-pi/4", "theta": "0"},
    "fig-single-c": {"command": "toy", "target": "single", "r": "0,2", "phi": "0", "theta": "-pi/4,opt"},
    "fig-single-d": {"command": "toy", "target": "single", "r": "0,2", "phi": "0,pi/4,-pi/4", "theta": "0", "eta2": "0,0.1"},
    "fig-two-b": {"command": "toy", "target": "two", "r": "0,2", "phi": "0,pi/4,-pi/4", "theta": "0"},
    "fig-two-d": {"command": "toy", "target": "two", "r": "2", "phi": "0,pi/4,-pi/4", "theta": "0", "asym": "1,0.9"},
    "fig-broadband": {"command": "strategy", "target": "broadband"},
    "fig-narrowband": {"command": "strategy", "target": "narrowband"},
    "fig-angles": {"command": "strategy", "target": "angles"},
}

TARGETS = {"toy": ("single", "two"), "cavity": KINDS, "strategy": ("broadband", "narrowband", "angles"), "verify": ("",)}


def read_config_text(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#:`` lines are metadata entries.

    Once a metadata block has been seen, the first ordinary line ends the
    config; that is where a CSV body starts.
    """
    out: dict[str, str] = {}
    seen_meta = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#:"):
            line = line[2:].strip()
            seen_meta = True
        elif not line or line.startswith("#"):
            continue
        elif seen_meta:
            break
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEYS and key != "preset":
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve(flags: dict[str, str], config_path: str | None = None) -> dict[str, str]:
    """Merge preset, config file and flags into a canonical config."""
    file_cfg: dict[str, str] = {}
    if config_path:
        try:
            file_cfg = read_config_text(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path!r}: {exc}") from None
    preset_name = flags.get("preset") or file_cfg.get("preset")
    preset = {}
    if preset_name:
        if preset_name not in PRESETS:
            raise ConfigError(f"unknown preset {preset_name!r}; choose from {sorted(PRESETS)}")
        preset = PRESETS[preset_name]
    layered = {**preset, **file_cfg, **{k: v for k, v in flags.items() if v is not None}}
    layered.pop("preset", None)
    command = layered.get("command")
    if command not in TARGETS:
        raise ConfigError("no command given (use a subcommand or a preset)")
    target = layered.get("target") or TARGETS[command][0]
    if target not in TARGETS[command]:
        raise ConfigError(f"{command} needs one of {TARGETS[command]}, got {target!r}")
    defaults = DEFAULTS[(command, target)]
    allowed = set(defaults) | {"command", "target"}
    extra = sorted(set(layered) - allowed)
    if extra:
        raise ConfigError(f"keys {extra} do not apply to '{command} {target}'".rstrip())
    merged = {**defaults, **layered, "target": target}
    return {k: KEYS[k](v) for k, v in sorted(merged.items())}


# -- runs ------------------------------------------------------------------------


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    comments: list[str]


def _freq_scale(cfg) -> float:
    return 2 * math.pi if cfg.get("freq_unit") == "Hz" else 1.0


def _cavity(cfg) -> CavityParams:
    s = _freq_scale(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        try:
            return CavityParams(
                m=float(cfg["mass"]),
                omega_m=float(cfg["omega_m"]) * s,
                kappa=float(cfg["kappa"]) * s,
                gamma=float(cfg["gamma"]) * s,
            )
        except UserWarning as w:
            raise ConfigError(str(w)) from None


def _series(cfg, extra_key: str):
    rs, phis = parse_list(cfg["r"]), parse_list(cfg["phi"])
    thetas = parse_list(cfg["theta"], allow_opt=True)
    extras = parse_list(cfg[extra_key])
    seen, out = set(), []
    for r, phi, th, ex in product(rs, phis, thetas, extras):
        sq = SqueezeParams(r, phi)
        key = (sq.r, sq.phi if sq.r else 0.0, th, ex)
        if key not in seen:
            seen.add(key)
            out.append((sq, th, ex))
    return out


def _label(name, sq, th, extra_key, ex) -> str:
    return f"{name}[r={fmt(sq.r)};phi={fmt(sq.phi)};theta={fmt(th)};{extra_key}={fmt(ex)}]"


def run_toy(cfg) -> Table:
    beta = float(cfg["beta"])
    z_sql = zeta_sql(beta)
    norm = GridSpec.parse(cfg["grid"]).values()
    single = cfg["target"] == "single"
    extra_key = "eta2" if single else "asym"
    series = _series(cfg, extra_key)
    for _, _, ex in series:
        if single and not 0 <= ex <= 1:
            raise ConfigError(f"eta2 must lie in [0, 1], got {ex!r}")
        if not single and ex < 0:
            raise ConfigError(f"asym must be >= 0, got {ex!r}")
    columns = ["zeta_norm"] + [_label("N2", sq, th, extra_key, ex) for sq, th, ex in series]
    rows = []
    for zn in norm:
        z = zn * z_sql
        row = [zn]
        for sq, th, ex in series:
            if single:
                theta = theta_opt_toy_single(z, beta) if th == "opt" else th
                row.append(noise_metric_single(ToySingleParams(z, beta, theta, math.asin(math.sqrt(ex))), sq))
            else:
                theta = theta_opt_toy_two(z, beta) if th == "opt" else th
                row.append(noise_metric_two(ToyTwoParams(z, ex * z, beta, theta), sq))
        rows.append(row)
    comments = [
        f"zeta_norm = zeta / zeta_SQL with zeta_SQL = {fmt(z_sql)} (single-mode, theta = r = 0)",
        "theta=opt is the backaction-cancelling angle at each zeta",
    ]
    return Table(columns, rows, comments)


def run_cavity(cfg) -> Table:
    p = _cavity(cfg)
    s = _freq_scale(cfg)
    kind = cfg["target"]
    grid = GridSpec.parse(cfg["grid"]).values()
    nu = grid * s
    sq = SqueezeParams(parse_list(cfg["r"])[0], parse_list(cfg["phi"])[0])
    if cfg["coupling"] == "opt":
        coupling = g_opt(p, kind, nu, 0.0)
    else:
        coupling = np.full_like(nu, float(cfg["coupling"]))
    th = parse_list(cfg["theta"], allow_opt=True)[0]
    theta = theta_opt(p, kind, coupling, nu) if th == "opt" else np.full_like(nu, th)
    psd = force_psd_position if kind == "position" else force_psd_momentum
    spec = psd(p, coupling, nu, theta, sq)
    rows = [
        list(vals)
        for vals in zip(grid, spec.shot, spec.backaction, spec.cross, spec.total, spec.theta, coupling)
    ]
    comments = ["coupling=opt uses the shot/backaction-balanced value at r=0 per frequency"]
    return Table(["nu", "shot", "backaction", "cross", "total", "theta", "coupling"], rows, comments)


def run_strategy_cmd(cfg) -> Table:
    p = _cavity(cfg)
    s = _freq_scale(cfg)
    mode = cfg["target"]
    if mode == "angles":
        return _run_angles(cfg, p, s)
    grid = GridSpec.parse(cfg["grid"]).values()
    nu = grid * s
    sq = SqueezeParams(parse_list(cfg["r"])[0], parse_list(cfg["phi"])[0])
    target = float(cfg["target_nu"]) * s if mode == "broadband" else None
    res = run_strategy(StrategyConfig(mode, p, nu, sq=sq, target_nu=target))
    columns, cols = ["nu"], [grid]
    for c in res.curves:
        tag = f"{c.kind}_r{fmt(c.r)}"
        columns += [f"{tag}_total", f"{tag}_shot", f"{tag}_backaction"]
        cols += [c.total, c.spectrum.shot, c.spectrum.backaction]
    for kind in KINDS:
        c = res.curve(kind, 0.0)
        columns += [f"{kind}_coupling", f"{kind}_theta"]
        cols += [c.coupling, c.theta]
    return Table(columns, [list(r) for r in zip(*cols)], [f"strategy {mode}; momentum coupling = G / (m kappa)"])


def _run_angles(cfg, p, s) -> Table:
    g = float(cfg["coupling"])
    grid = GridSpec.parse(cfg["grid"]).values()
    freq = angle_vs_frequency(p, g, grid * s)
    power = angle_vs_power(p, g, float(cfg["target_nu"]) * s, GridSpec.parse(cfg["power_grid"]).values())
    rows = [["frequency", x, a, b] for x, a, b in zip(grid, freq.theta_position, freq.theta_momentum)]
    rows += [["power", x, a, b] for x, a, b in zip(power.x, power.theta_position, power.theta_momentum)]
    comments = ["x is nu for the frequency sweep and G^2/G_ref^2 at target_nu for the power sweep"]
    return Table(["sweep", "x", "theta_position", "theta_momentum"], rows, comments)


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def render(cfg: dict[str, str], table: Table) -> str:
    lines = [f"# optonoise {_version()}", "# conventions: vacuum variance 1/2; theta=0 is the phase quadrature"]
    lines += [f"#: {k}={v}" for k, v in cfg.items()]
    lines += [f"# {c}" for c in table.comments]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def run_verify(cfg, fault: str | None) -> tuple[dict, bool]:
    toy = toy_agreement_suite(
        seed=int(cfg["seed"]), samples=int(cfg["samples"]), count=int(cfg["count"]), fault=fault
    )
    solver = solver_suite()
    summary = {
        "passed": toy.passed and solver.passed,
        "config": cfg,
        "fault": fault,
        "suites": [toy.summary(), solver.summary()],
    }
    return summary, summary["passed"]


# -- argument handling -------------------------------------------------------------

COLUMNS_HELP = """\
columns:
  toy       zeta_norm, then one N2[...] column per (r, phi, theta, eta2|asym) series
  cavity    nu, shot, backaction, cross, total, theta, coupling
  strategy  broadband/narrowband: nu, <kind>_r<r>_{total,shot,backaction}, <kind>_{coupling,theta}
            angles: sweep, x, theta_position, theta_momentum
presets:
""" + "\n".join(f"  {name:15s} {cfg['command']} {cfg['target']}" for name, cfg in PRESETS.items())


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value config file (a previous CSV header works)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--grid", help="lo:hi:n[:log|lin]")
    p.add_argument("--power-grid", dest="power_grid", help="normalized power grid for angle sweeps")
    p.add_argument("--beta", help="toy free-evolution factor")
    p.add_argument("--r", help="squeezing strength(s), comma separated")
    p.add_argument("--phi", help="squeezing angle(s); accepts pi multiples like pi/4")
    p.add_argument("--theta", help="readout angle(s) or 'opt'")
    p.add_argument("--eta2", help="detection loss fraction(s)")
    p.add_argument("--asym", help="drive ratio zeta2/zeta1")
    p.add_argument("--mass", help="mirror mass in kg")
    p.add_argument("--omega-m", dest="omega_m")
    p.add_argument("--kappa")
    p.add_argument("--gamma")
    p.add_argument("--coupling", help="G (position) or G' (momentum), or 'opt'")
    p.add_argument("--target-nu", dest="target_nu")
    p.add_argument("--freq-unit", dest="freq_unit", choices=["rad/s", "Hz"])
    p.add_argument("--seed")
    p.add_argument("--samples")
    p.add_argument("--count", help="number of randomized verify cases")
    p.add_argument("--inject-fault", dest="inject_fault", choices=FAULTS, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optonoise",
        description="Measurement-induced noise of squeezed-light optomechanical sensing.",
        epilog=COLUMNS_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        argument_default=argparse.SUPPRESS,
    )
    _common(parser)
    sub = parser.add_subparsers(dest="command")
    for name, targets in TARGETS.items():
        # suppressed defaults keep subcommand options from clobbering top-level ones
        sp = sub.add_parser(
            name,
            epilog=COLUMNS_HELP,
            formatter_class=argparse.RawDescriptionHelpFormatter,
            argument_default=argparse.SUPPRESS,
        )
        if targets != ("",):
            sp.add_argument("target", choices=targets, nargs="?", default=None)
        _common(sp)
    return parser


def _flags(ns: argparse.Namespace) -> dict[str, str]:
    skip = {"config", "out", "inject_fault"}
    flags = {k: v for k, v in vars(ns).items() if k not in skip and v is not None}
    if flags.get("command") == "verify":
        flags["target"] = ""
    return flags


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve(_flags(ns), getattr(ns, "config", None))
        out = getattr(ns, "out", None)
        if cfg["command"] == "verify":
            summary, ok = run_verify(cfg, getattr(ns, "inject_fault", None))
            _emit(json.dumps(summary, indent=2, sort_keys=True) + "\n", out)
            return EXIT_OK if ok else EXIT_VERIFY
        run = {"toy": run_toy, "cavity": run_cavity, "strategy": run_strategy_cmd}[cfg["command"]]
        _emit(render(cfg, run(cfg)), out)
    except (ConfigError, OptonoiseError) as exc:
        print(f"optonoise: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
