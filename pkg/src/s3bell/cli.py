"""Command-line driver.

Settings come from built-in defaults, then an optional ``key = value`` file
(``--config``), then command-line flags; later sources win.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from . import harness
from .constraint import MODES

log = logging.getLogger("s3bell")

# config-file keys and how to parse them
_KEYS = {
    "model": str, "kappa": float, "mode": str, "trials": int, "seed": int,
    "grid_points": int, "chunk_size": int, "workers": int, "format": str,
    "output": str, "chsh": str, "sweep_kappa": str, "oracle_only": str,
}


def _float_list(text: str) -> list:
    return [float(x) for x in text.replace(",", " ").split()]


def read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _KEYS[key](value)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="s3bell", description="Event-by-event simulation of the S^3 spin-correlation models.")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--model", choices=harness.MODELS)
    p.add_argument("--kappa", type=float)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--trials", type=int, help="emitted pairs per angle")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-points", type=int, help="angles from 0 to pi inclusive (default 37)")
    p.add_argument("--chsh", nargs="*", type=float, metavar="ANGLE",
                   help="report the CHSH statistic; optional a a' b b' in radians")
    p.add_argument("--sweep-kappa", metavar="LIST", help="comma-separated kappas, e.g. --sweep-kappa=0,1,2,-1")
    p.add_argument("--oracle-only", action="store_true", default=None, help="quadrature tables only, no sampling")
    p.add_argument("--output", help="data file; a *_plot.py sidecar is written next to it")
    p.add_argument("--format", choices=harness.FORMATS)
    p.add_argument("--chunk-size", type=int)
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on this)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _truthy(value) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


def merge_settings(args: argparse.Namespace) -> dict:
    settings = read_config_file(args.config) if args.config else {}
    for key in _KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if "chsh" in settings and isinstance(settings["chsh"], str):
        settings["chsh"] = _float_list(settings["chsh"]) if settings["chsh"].strip() not in ("", "true", "yes") else []
    return settings


def config_from_settings(s: dict) -> harness.RunConfig:
    kwargs = {}
    for key in ("model", "kappa", "mode", "trials", "seed", "chunk_size", "workers"):
        if key in s:
            kwargs[key] = s[key]
    if "format" in s:
        kwargs["output_format"] = s["format"]
    if "grid_points" in s:
        kwargs["angle_grid"] = harness.default_grid(s["grid_points"])
    if s.get("chsh"):
        kwargs["chsh_angles"] = tuple(s["chsh"])
    return harness.RunConfig(**kwargs)


def _suffixed(path: str, kappa: float) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_kappa{kappa:g}{ext}"


def _emit(records, config, output, title):
    if output:
        data, script = harness.write_report(records, output, config.output_format, title)
        log.info("wrote %s and %s", data, script)
    else:
        sys.stdout.write(harness.emit_report(records, config.output_format))


def _summary(config, records, chsh) -> str:
    parts = [f"model={config.model}", f"kappa={config.kappa:g}", f"mode={config.mode}",
             f"trials={config.trials}", f"g(0)={records[0].g:.5f}"]
    if config.model == "bivector":
        # outcome-product average and multivector scalar average, side by side
        parts.append("E_outcomes=" + " ".join(f"{r.E_mc:+.4f}" for r in records[:3]) + " ...")
        parts.append("E_scalar=" + " ".join(f"{r.E_oracle:+.4f}" for r in records[:3]) + " ...")
    if chsh is not None:
        parts.append(f"CHSH_mc={chsh.mc:.5f} CHSH_oracle={chsh.oracle:.5f} CHSH_quantum={chsh.quantum:.5f}")
    return " ".join(parts)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    settings = merge_settings(args)
    config = config_from_settings(settings)
    output = settings.get("output")

    if _truthy(settings.get("oracle_only", False)):
        rows = harness.oracle_rows(config.angle_grid, config.kappa)
        text = harness.emit_oracle_report(rows, config.output_format)
        if output:
            try:
                with open(output, "w", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                raise harness.ReportError(f"cannot write report to {output}: {exc}") from exc
        else:
            sys.stdout.write(text)
        return 0

    if settings.get("sweep_kappa"):
        kappas = _float_list(settings["sweep_kappa"])
        results = harness.sweep_kappa(config, kappas)
        for k, res in results.items():
            if output:
                harness.write_report(res.records, _suffixed(output, k), config.output_format, f"kappa = {k:g}")
            print(res.summary(), file=sys.stderr if not output else sys.stdout)
        if not output:
            for k, res in results.items():
                sys.stdout.write(f"# kappa = {k:g}\n")
                sys.stdout.write(harness.emit_report(res.records, config.output_format))
        return 0

    records = harness.run_experiment(config)
    chsh = harness.run_chsh(config) if "chsh" in settings else None
    _emit(records, config, output, f"{config.model}, kappa = {config.kappa:g}")
    print(_summary(config, records, chsh), file=sys.stderr)
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
