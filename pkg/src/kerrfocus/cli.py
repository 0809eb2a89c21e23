"""Command-line front end: INI config, experiment orchestration, CSV output.

Subcommands: rings | validate | simulate | sweep.  All outputs are CSV with
a fixed header and floats printed to 17 significant digits, written to a
temp file and atomically renamed, so reruns with the same config and seed
are byte identical and failures never leave partial files.

Exit codes: 0 success, 2 config error, 3 validation threshold exceeded,
4 numerical/model error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import capacity, ct_oracle, dt_model, focusing
from .params import Coefficients, PhysicalParams, derive_coefficients, direct_coefficients

ENV_OUT_DIR = "KERRFOCUS_OUT"

_REQUIRED = object()


class ConfigError(Exception):
    """A config file is missing, malformed or inconsistent."""


@dataclass
class RunConfig:
    coeffs: Coefficients
    physical: PhysicalParams | None
    # focusing
    strategy: str
    n1: list[int] | None
    n2: list[int] | None
    c1: int
    c2: int
    P1: float | None
    P2: float | None
    Q: int | None
    # model
    variant: str
    normalization: str
    # validate
    validate_n: int
    validate_threshold: float
    validate_input: str
    validate_fmax: int
    # simulate
    simulate_n: int
    simulate_noise: bool
    # sweep
    sweep: dict
    # io
    out_dir: str
    seed: int
    os_factor: int


def _get(cp, section: str, key: str, conv, default=_REQUIRED):
    if not cp.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"[{section}] {key}: missing required key")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _int_list(raw: str) -> list[int]:
    return [int(tok) for tok in raw.split(",") if tok.strip()]


def _float_list(raw: str) -> list[float]:
    return [float(tok) for tok in raw.split(",") if tok.strip()]


def _load_channel(cp) -> tuple[Coefficients, PhysicalParams | None]:
    if not cp.has_section("channel"):
        raise ConfigError("[channel] section is required")
    physical_keys = {"gamma1", "gamma2", "l", "d"}
    direct_keys = {"h11", "h12", "h21", "h22", "m"}
    present = {k.lower() for k, _ in cp.items("channel")} - {
        k.lower() for k in cp.defaults()
    }
    has_phys = bool(present & physical_keys)
    has_direct = bool(present & direct_keys)
    if has_phys == has_direct:
        raise ConfigError(
            "[channel] give exactly one of the physical form (gamma1, gamma2, L, d, "
            "Ts, Es, N) or the direct form (h11, h12, h21, h22, M, Es, N, Ts)"
        )
    try:
        if has_phys:
            params = PhysicalParams(
                gamma1=_get(cp, "channel", "gamma1", float),
                gamma2=_get(cp, "channel", "gamma2", float),
                L=_get(cp, "channel", "L", float),
                d=_get(cp, "channel", "d", float),
                Ts=_get(cp, "channel", "Ts", float, 1.0),
                Es=_get(cp, "channel", "Es", float, 1.0),
                N=_get(cp, "channel", "N", float, 0.0),
            )
            return derive_coefficients(params), params
        coeffs = direct_coefficients(
            h11=_get(cp, "channel", "h11", float, 0.0),
            h12=_get(cp, "channel", "h12", float),
            h21=_get(cp, "channel", "h21", float),
            h22=_get(cp, "channel", "h22", float, 0.0),
            M=_get(cp, "channel", "M", int, 1),
            Es=_get(cp, "channel", "Es", float, 1.0),
            N=_get(cp, "channel", "N", float, 0.0),
            Ts=_get(cp, "channel", "Ts", float, 1.0),
        )
        return coeffs, None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[channel] {exc}") from None


def load_config(path: str, overrides: dict | None = None) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    coeffs, physical = _load_channel(cp)

    strategy = _get(cp, "focusing", "strategy", str, "quadratic").strip().lower() \
        if cp.has_section("focusing") else "quadratic"
    if strategy not in ("explicit", "quadratic"):
        raise ConfigError(f"[focusing] strategy must be explicit or quadratic, got {strategy!r}")
    has_focusing = cp.has_section("focusing")
    n1 = _get(cp, "focusing", "n1", _int_list, None) if has_focusing else None
    n2 = _get(cp, "focusing", "n2", _int_list, None) if has_focusing else None
    if strategy == "explicit" and has_focusing and (n1 is None or n2 is None):
        raise ConfigError("[focusing] explicit strategy needs n1 and n2")

    sweep_cfg: dict = {}
    if cp.has_section("sweep"):
        sweep_cfg = dict(
            mode=_get(cp, "sweep", "mode", str, "high_power").strip().lower(),
            snr_db=_get(cp, "sweep", "snr_db", _float_list, None),
            p1_grid=_get(cp, "sweep", "p1", _float_list, None),
            noise_grid=_get(cp, "sweep", "noise_grid", _float_list, None),
            p1_fixed=_get(cp, "sweep", "p1_fixed", float, None),
            p2_fixed=_get(cp, "sweep", "p2_fixed", float, None),
            beta=_get(cp, "sweep", "beta", float, 1.0),
            noise=_get(cp, "sweep", "noise", float, 1.0),
            samples=_get(cp, "sweep", "samples", int, 20000),
            user=_get(cp, "sweep", "user", int, 1),
            c=_get(cp, "sweep", "c", int, 1),
            Q=_get(cp, "sweep", "Q", int, None),
        )

    seed = _get(cp, "io", "seed", int, 0) if cp.has_section("io") else 0
    out_dir = (
        _get(cp, "io", "out_dir", str, None) if cp.has_section("io") else None
    ) or os.environ.get(ENV_OUT_DIR, ".")
    os_factor = _get(cp, "io", "os", int, 1024) if cp.has_section("io") else 1024

    cfg = RunConfig(
        coeffs=coeffs,
        physical=physical,
        strategy=strategy,
        n1=n1,
        n2=n2,
        c1=_get(cp, "focusing", "c1", int, 1) if has_focusing else 1,
        c2=_get(cp, "focusing", "c2", int, 1) if has_focusing else 1,
        P1=_get(cp, "focusing", "P1", float, None) if has_focusing else None,
        P2=_get(cp, "focusing", "P2", float, None) if has_focusing else None,
        Q=_get(cp, "focusing", "Q", int, None) if has_focusing else None,
        variant=_get(cp, "model", "variant", str, "symmetric").strip().lower()
        if cp.has_section("model") else "symmetric",
        normalization=_get(cp, "model", "normalization", str, "physical").strip().lower()
        if cp.has_section("model") else "physical",
        validate_n=_get(cp, "validate", "n", int, 32) if cp.has_section("validate") else 32,
        validate_threshold=_get(cp, "validate", "threshold", float, 1e-2)
        if cp.has_section("validate") else 1e-2,
        validate_input=_get(cp, "validate", "input", str, "focused").strip().lower()
        if cp.has_section("validate") else "focused",
        validate_fmax=_get(cp, "validate", "fmax", int, 6)
        if cp.has_section("validate") else 6,
        simulate_n=_get(cp, "simulate", "n", int, 32) if cp.has_section("simulate") else 32,
        simulate_noise=_get(cp, "simulate", "noise", _bool, True)
        if cp.has_section("simulate") else True,
        sweep=sweep_cfg,
        out_dir=out_dir,
        seed=seed,
        os_factor=os_factor,
    )

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "seed":
            cfg.seed = value
        elif key == "out":
            cfg.out_dir = value
        elif key == "os":
            cfg.os_factor = value
        elif key == "variant":
            cfg.variant = value

    if cfg.variant not in dt_model.VARIANTS:
        raise ConfigError(f"variant must be one of {dt_model.VARIANTS}, got {cfg.variant!r}")
    if cfg.normalization not in dt_model.NORMALIZATIONS:
        raise ConfigError(
            f"normalization must be one of {dt_model.NORMALIZATIONS}, got {cfg.normalization!r}"
        )
    if not (0 <= cfg.seed < 2**64):
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {cfg.seed!r}")
    if cfg.validate_input not in ("focused", "gaussian"):
        raise ConfigError(f"[validate] input must be focused or gaussian, got {cfg.validate_input!r}")
    return cfg


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: str, header: list[str], rows) -> None:
    """Write rows atomically; floats carry 17 significant digits."""
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _ring_sets(cfg: RunConfig) -> tuple[focusing.RingIndexSet, focusing.RingIndexSet]:
    if cfg.P1 is None or cfg.P2 is None:
        raise ConfigError("[focusing] P1 and P2 are required for this command")
    kw1 = dict(explicit=cfg.n1) if cfg.strategy == "explicit" else dict(quadratic=cfg.c1)
    kw2 = dict(explicit=cfg.n2) if cfg.strategy == "explicit" else dict(quadratic=cfg.c2)
    rings1 = focusing.select_rings(cfg.P1, cfg.coeffs.h21, owner=1, **kw1)
    rings2 = focusing.select_rings(cfg.P2, cfg.coeffs.h12, owner=2, **kw2)
    return rings1, rings2


def _constellations(cfg: RunConfig):
    rings1, rings2 = _ring_sets(cfg)
    N = cfg.coeffs.N
    if cfg.Q is not None:
        q1 = q2 = cfg.Q
    elif N > 0:
        q1 = focusing.default_phase_count(cfg.P1, N)
        q2 = focusing.default_phase_count(cfg.P2, N)
    else:
        q1 = q2 = 4
    c1 = focusing.build_constellation(rings1, cfg.coeffs.h21, q1)
    c2 = focusing.build_constellation(rings2, cfg.coeffs.h12, q2)
    return rings1, rings2, c1, c2


def _draw_block(rng, const: focusing.RingConstellation, n: int, user: int) -> dt_model.SymbolBlock:
    pts = np.asarray(const.points)
    return dt_model.SymbolBlock(pts[rng.integers(0, pts.size, size=n)], user=user)


def cmd_rings(cfg: RunConfig) -> int:
    rings1, rings2 = _ring_sets(cfg)
    rows = []
    for user, rings, h in ((1, rings1, cfg.coeffs.h21), (2, rings2, cfg.coeffs.h12)):
        for n, p in zip(rings.indices, focusing.ring_powers(rings, h)):
            rows.append((user, n, p, math.sqrt(p)))
    write_csv(os.path.join(cfg.out_dir, "rings.csv"),
              ["user", "ring_index", "power", "amplitude"], rows)

    f1 = focusing.difference_set(rings2)
    f2 = focusing.difference_set(rings1)
    frows = [(1, f) for f in f1] + [(2, f) for f in f2]
    write_csv(os.path.join(cfg.out_dir, "filters.csv"), ["receiver", "f"], frows)

    print(f"user 1 rings {rings1.indices} -> receiver 2 filters {f2.frequencies}")
    print(f"user 2 rings {rings2.indices} -> receiver 1 filters {f1.frequencies}")
    print(f"wrote rings.csv, filters.csv in {cfg.out_dir}")
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    rings1, rings2, c1, c2 = _constellations(cfg)
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 0xB10C)))
    n = cfg.simulate_n
    x1 = _draw_block(rng, c1, n, user=1)
    x2 = _draw_block(rng, c2, n, user=2)
    F1 = focusing.difference_set(rings2)
    F2 = focusing.difference_set(rings1)
    out1, out2 = dt_model.simulate(
        x1, x2, F1, F2, cfg.coeffs,
        variant=cfg.variant, noise_on=cfg.simulate_noise, seed=cfg.seed,
        normalization=cfg.normalization,
    )
    header = ["j", "f", "re", "im", "receiver", "normalization"]
    for name, out in (("receiver1.csv", out1), ("receiver2.csv", out2)):
        write_csv(os.path.join(cfg.out_dir, name), header, dt_model.receiver_output_rows(out))
    print(f"wrote receiver1.csv, receiver2.csv in {cfg.out_dir}")
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    if cfg.physical is None:
        raise ConfigError(
            "[channel] validate needs the physical form; direct coefficient sets "
            "generally have no waveform realization"
        )
    if cfg.os_factor < 8:
        raise ConfigError("[io] os must be >= 8")
    M = cfg.coeffs.M
    n = cfg.validate_n
    if n < M + 2:
        raise ConfigError(f"[validate] n must be >= M+2 = {M + 2}")
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 0x7A1)))
    if cfg.validate_input == "focused":
        rings1, rings2, c1, c2 = _constellations(cfg)
        x1 = _draw_block(rng, c1, n, user=1)
        x2 = _draw_block(rng, c2, n, user=2)
        F1 = focusing.difference_set(rings2)
        F2 = focusing.difference_set(rings1)
    else:
        z = rng.standard_normal((2, n, 2))
        x1 = dt_model.SymbolBlock((z[0, :, 0] + 1j * z[0, :, 1]) / math.sqrt(2), user=1)
        x2 = dt_model.SymbolBlock((z[1, :, 0] + 1j * z[1, :, 1]) / math.sqrt(2), user=2)
        span = tuple(range(-cfg.validate_fmax, cfg.validate_fmax + 1))
        F1 = F2 = focusing.FrequencySet(span)
    errors, max_err = ct_oracle.model_comparison(
        cfg.physical, x1, x2, F1, F2, cfg.os_factor, variant=cfg.variant
    )
    rows = [(r, j, f, e) for (r, j, f), e in sorted(errors.items())]
    write_csv(os.path.join(cfg.out_dir, "validate_errors.csv"),
              ["receiver", "j", "f", "error"], rows)
    ok = max_err <= cfg.validate_threshold
    print(
        f"max_relative_error={max_err:.6g} threshold={cfg.validate_threshold:.6g} "
        f"os={cfg.os_factor} variant={cfg.variant} -> {'OK' if ok else 'FAIL'}"
    )
    return 0 if ok else 3


def _sweep_config(cfg: RunConfig, amplitude_only: bool) -> capacity.SweepConfig:
    s = cfg.sweep
    if not s:
        raise ConfigError("[sweep] section is required for the sweep command")
    mode = s["mode"]
    common = dict(
        mode=mode,
        beta=s["beta"],
        user=s["user"],
        ring_scale=s["c"],
        phases=s["Q"],
        amplitude_only=amplitude_only,
        samples=s["samples"],
        seed=cfg.seed,
    )
    try:
        if mode == "high_power":
            if s["snr_db"] is not None:
                grid = [s["noise"] * 10 ** (db / 10) for db in s["snr_db"]]
            elif s["p1_grid"] is not None:
                grid = s["p1_grid"]
            else:
                raise ConfigError("[sweep] high_power mode needs snr_db or p1")
            return capacity.SweepConfig(p1_grid=grid, noise=s["noise"], **common)
        if mode == "low_noise":
            if s["noise_grid"] is None or s["p1_fixed"] is None or s["p2_fixed"] is None:
                raise ConfigError("[sweep] low_noise mode needs noise_grid, p1_fixed, p2_fixed")
            return capacity.SweepConfig(
                noise_grid=s["noise_grid"], p1=s["p1_fixed"], p2=s["p2_fixed"], **common
            )
        raise ConfigError(f"[sweep] mode must be high_power or low_noise, got {mode!r}")
    except (capacity.GridDegenerate, ValueError) as exc:
        raise ConfigError(f"[sweep] {exc}") from None


def _sweep_rows(result: capacity.SweepResult):
    for r in result.rows:
        yield (r.snr_db, r.p, r.noise, r.rings, r.phases, r.estimate.bits, r.estimate.std_err)
    half = (result.ci_high - result.ci_low) / 2.0
    yield ("slope", "", "", "", "", result.slope, half)


def cmd_sweep(cfg: RunConfig) -> int:
    header = ["snr_db", "P", "N", "K", "Q", "bits", "std_err"]
    for name, amp_only in (("sweep_focusing.csv", False), ("sweep_amplitude_only.csv", True)):
        result = capacity.sweep(_sweep_config(cfg, amp_only), cfg.coeffs)
        write_csv(os.path.join(cfg.out_dir, name), header, _sweep_rows(result))
        label = "amplitude-only" if amp_only else "focusing"
        print(
            f"{label}: slope={result.slope:.4f} "
            f"ci=[{result.ci_low:.4f}, {result.ci_high:.4f}] over {result.fit_points} points"
        )
    print(f"wrote sweep_focusing.csv, sweep_amplitude_only.csv in {cfg.out_dir}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kerrfocus",
        description="Two-user Kerr interference channel: ring design, model "
        "validation, seeded simulation and rate sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("rings", cmd_rings),
        ("validate", cmd_validate),
        ("simulate", cmd_simulate),
        ("sweep", cmd_sweep),
    ):
        p = sub.add_parser(name)
        p.add_argument("config", help="INI config file")
        p.add_argument("--seed", type=int, default=None, help="64-bit unsigned seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--os", type=int, default=None, help="oversampling factor")
        p.add_argument("--variant", choices=dt_model.VARIANTS, default=None)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = dict(seed=args.seed, out=args.out, os=args.os, variant=args.variant)
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.fn(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
