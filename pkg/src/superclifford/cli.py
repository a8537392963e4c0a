"""Command-line entry point.

Subcommands: entropy-sweep, fit, otoc, plateau, oracle-check.

Settings are resolved as flags over ``--config`` file over built-in defaults.
The config file is either a flat JSON object with the same keys as the flags
(dashes replaced by underscores) or a manifest written by an earlier run, in
which case its ``config`` block is used. Every run that writes files also
writes ``manifest-<subcommand>.json`` into the output directory.

Exit codes: 0 success, 2 configuration error, 3 runtime error, 4 failed check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, checks
from .ensembles import ConfigError, EnsembleSpec, Family, default_horizon
from .experiments import (
    FLOAT_FMT,
    FitWindowError,
    UnsaturatedError,
    extract_scrambling_time,
    fit_exponential_arrays,
    fit_log_scaling,
    per_realization_scrambling_times,
    run_entropy_ensemble,
    run_otoc_ensemble,
)
from .oracle import SizeLimitError
from .otoc import plateau_value, resolve_v_gates, support_size
from .pauli import BasisOperatorLabel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_CHECK = 4

OUT_ENV = "SUPERCLIFFORD_OUT_DIR"
MANIFEST_FORMAT = "superclifford.manifest"
CONVENTIONS = ("averaged", "per_realization")

DEFAULTS = {
    "entropy-sweep": {
        "n": [120], "m": "1/4", "realizations": 100, "seed": 0, "epsilon": 10.0,
        "horizon": None, "cadence": None, "family": "parallel",
    },
    "fit": {
        "inputs": [], "m": "1/4", "window_start": 50.0, "window_end": None,
        "min_deficit": 1.0, "convention": "averaged",
    },
    "otoc": {
        "n": [120], "realizations": 100, "seed": 0, "horizon": 120, "cadence": 1,
        "family": "parallel", "v_gates": "C3", "w0": "0",
    },
    "plateau": {"v_gates": "C3", "region_size": None},
    "oracle-check": {"max_n": 8, "cases": 20, "seed": 0},
}
# keys that never change output bytes
RUNTIME_KEYS = {"out_dir", "threads"}


def _available_parallelism() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in re.split(r"[,\s]+", text.strip()) if tok]


def _fraction(value) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad fraction {value!r}") from exc


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superclifford", description="Super-Clifford circuit experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config or manifest from an earlier run")
    common.add_argument("--out-dir", type=Path, help=f"output directory (default ${OUT_ENV} or ./out)")
    common.add_argument("--threads", type=int, help="worker processes (default: available CPUs)")

    ens = argparse.ArgumentParser(add_help=False)
    ens.add_argument("--n", nargs="+", help="system sizes, space or comma separated")
    ens.add_argument("--realizations", type=int)
    ens.add_argument("--seed", type=int, help="master seed")
    ens.add_argument("--horizon", type=int, help="last time step")
    ens.add_argument("--cadence", type=int, help="record every this many steps")
    ens.add_argument("--family", choices=[f.value for f in Family])

    s = sub.add_parser("entropy-sweep", parents=[common, ens], help="entropy curves and scrambling times")
    s.add_argument("--m", help="region fraction, e.g. 1/4")
    s.add_argument("--epsilon", type=float)

    f = sub.add_parser("fit", parents=[common], help="fit entropy curves and t* scaling")
    f.add_argument("inputs", nargs="*", help="sweep directories or CSV files")
    f.add_argument("--m", help="region fraction for curves without a sidecar")
    f.add_argument("--window-start", type=float)
    f.add_argument("--window-end", type=float)
    f.add_argument("--min-deficit", type=float)
    f.add_argument("--convention", choices=CONVENTIONS)

    o = sub.add_parser("otoc", parents=[common, ens], help="OTOC traces")
    o.add_argument("--v-gates", help="catalog name (C3, T3C3, identity) or gate list")
    o.add_argument("--w0", help="0/1 or X/Y string, right-padded with 0")

    pl = sub.add_parser("plateau", parents=[common], help="late-time OTOC value for V")
    pl.add_argument("--v-gates")
    pl.add_argument("--region-size", type=int)

    oc = sub.add_parser("oracle-check", parents=[common], help="differential checks against dense oracles")
    oc.add_argument("--max-n", type=int)
    oc.add_argument("--cases", type=int)
    oc.add_argument("--seed", type=int)
    return p


def load_config_file(path: Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    if data.get("format") == MANIFEST_FORMAT:
        data = data["config"]
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags (in increasing priority)."""
    cmd = args.subcommand
    cfg = dict(DEFAULTS[cmd])
    if args.config is not None:
        from_file = load_config_file(args.config)
        unknown = set(from_file) - set(cfg) - RUNTIME_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys for {cmd}: {sorted(unknown)}")
        cfg.update(from_file)
    for key, value in vars(args).items():
        if key in ("subcommand", "config") or value is None:
            continue
        if key == "inputs" and not value:
            continue
        cfg[key] = value
    if "n" in cfg:
        n = cfg["n"]
        if isinstance(n, (int, str)):
            n = [n]
        cfg["n"] = [v for item in n for v in (_int_list(item) if isinstance(item, str) else [int(item)])]
        if not cfg["n"]:
            raise ConfigError("--n needs at least one size")
    if "inputs" in cfg:
        cfg["inputs"] = [str(p) for p in cfg["inputs"]]
    for key in ("m",):
        if key in cfg:
            cfg[key] = str(_fraction(cfg[key]))
    out = cfg.get("out_dir") or os.environ.get(OUT_ENV) or "out"
    cfg["out_dir"] = str(out)
    threads = cfg.get("threads") or _available_parallelism()
    if threads < 1:
        raise ConfigError("--threads must be positive")
    cfg["threads"] = int(threads)
    return cfg


class Run:
    """Bookkeeping for one invocation: output files and the manifest."""

    def __init__(self, subcommand: str, cfg: dict):
        self.subcommand = subcommand
        self.cfg = cfg
        self.out_dir = Path(cfg["out_dir"])
        self.outputs: list[str] = []
        self.started = time.time()
        self.extra: dict = {}

    def write(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        atomic_write(path, text)
        self.outputs.append(name)
        return path

    def finish(self) -> Path:
        manifest = {
            "format": MANIFEST_FORMAT,
            "version": 1,
            "subcommand": self.subcommand,
            "config": {k: v for k, v in self.cfg.items() if k not in RUNTIME_KEYS},
            "runtime": {"out_dir": self.cfg["out_dir"], "threads": self.cfg["threads"]},
            "master_seed": self.cfg.get("seed"),
            "code_version": __version__,
            "outputs": self.outputs,
            "wall_clock_seconds": round(time.time() - self.started, 3),
            **self.extra,
        }
        path = self.out_dir / f"manifest-{self.subcommand}.json"
        atomic_write(path, _dump(manifest))
        return path


def _spec(cfg: dict, n: int, **extra) -> EnsembleSpec:
    return EnsembleSpec(
        n_qubits=n,
        family=cfg["family"],
        realizations=int(cfg["realizations"]),
        max_t=None if cfg.get("horizon") is None else int(cfg["horizon"]),
        master_seed=int(cfg["seed"]),
        entropy_cadence=None if cfg.get("cadence") is None else int(cfg["cadence"]),
        **extra,
    )


def _fmt(x) -> str:
    return "" if x is None else FLOAT_FMT.format(x)


# -- entropy-sweep --------------------------------------------------------------

SCRAMBLING_HEADER = ["N", "t_star", "epsilon", "m", "convention", "status", "std_err", "n_used", "n_unsaturated"]


def cmd_entropy_sweep(cfg: dict, log=print) -> int:
    run = Run("entropy-sweep", cfg)
    m = _fraction(cfg["m"])
    eps = float(cfg["epsilon"])
    specs = [_spec(cfg, n, entropy_fraction=m, epsilon=eps) for n in cfg["n"]]
    rows = []
    for spec in specs:
        n = spec.n_qubits
        curve = run_entropy_ensemble(spec, workers=cfg["threads"])
        run.write(f"entropy_N{n}.csv", curve.to_csv())
        sidecar = {"spec": spec.to_dict(), "saturation": spec.saturation,
                   "master_seed": spec.master_seed, "code_version": __version__}
        run.write(f"entropy_N{n}.json", _dump(sidecar))
        base = [n, None, FLOAT_FMT.format(eps), str(m)]
        try:
            t_star = extract_scrambling_time(curve)
            rows.append(base[:1] + [t_star] + base[2:] + ["averaged", "saturated", "", spec.realizations, 0])
        except UnsaturatedError:
            rows.append(base + ["averaged", "unsaturated", "", 0, spec.realizations])
        try:
            st = per_realization_scrambling_times(curve)
            status = "saturated" if st.n_unsaturated == 0 else "partial"
            rows.append(base[:1] + [_fmt(st.mean)] + base[2:]
                        + ["per_realization", status, _fmt(st.std_err), st.n_used, st.n_unsaturated])
        except UnsaturatedError:
            rows.append(base + ["per_realization", "unsaturated", "", 0, spec.realizations])
        final = curve.mean_entropy[-1]
        log(f"N={n}: final mean entropy {final:.3f} of {spec.saturation}, t*={rows[-2][1]}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCRAMBLING_HEADER)
    for r in rows:
        w.writerow(["" if v is None else v for v in r])
    run.write("scrambling_times.csv", buf.getvalue())
    run.finish()
    return EXIT_OK


# -- fit ------------------------------------------------------------------------

_CURVE_NAME = re.compile(r"entropy_N(\d+)\.csv$")


def _read_csv(path: Path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return list(reader.fieldnames or []), list(reader)


def _expand_inputs(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("entropy_N*.csv"), key=lambda q: int(_CURVE_NAME.search(q.name).group(1))))
            if (p / "scrambling_times.csv").exists():
                paths.append(p / "scrambling_times.csv")
        elif p.exists():
            paths.append(p)
        else:
            raise ConfigError(f"input {item} does not exist")
    if not paths:
        raise ConfigError("fit needs at least one entropy or scrambling-times CSV")
    return paths


def _curve_meta(path: Path, default_m: Fraction) -> tuple[int, int]:
    """(N, saturation) from the sidecar, else from the file name and ``m``."""
    side = path.with_suffix(".json")
    if side.exists():
        meta = json.loads(side.read_text())
        return int(meta["spec"]["n_qubits"]), int(meta["saturation"])
    match = _CURVE_NAME.search(path.name)
    if not match:
        raise ConfigError(f"{path}: no sidecar and N not in file name")
    n = int(match.group(1))
    return n, math.floor(default_m * n)


def cmd_fit(cfg: dict, log=print) -> int:
    run = Run("fit", cfg)
    paths = _expand_inputs(cfg["inputs"])
    m = _fraction(cfg["m"])
    window = None
    if cfg.get("window_end") is not None:
        window = (float(cfg["window_start"]), float(cfg["window_end"]))
    per_n: dict[str, dict] = {}
    t_points: dict[int, float] = {}
    table_points: dict[int, float] = {}
    notes = []
    for path in paths:
        header, rows = _read_csv(path)
        if header[:2] == ["t", "mean"]:
            n, sat = _curve_meta(path, m)
            times = [float(r["t"]) for r in rows]
            mean = [float(r["mean"]) for r in rows]
            try:
                res = fit_exponential_arrays(times, mean, sat, n, window, float(cfg["min_deficit"]))
                per_n[str(n)] = {"alpha": res.params["alpha"], "lambda": res.params["lambda"],
                                 "r_squared": res.r_squared, "window": list(res.window),
                                 "residuals": res.residuals}
            except FitWindowError as exc:
                per_n[str(n)] = {"error": str(exc)}
                notes.append(f"N={n}: {exc}")
            eps = 10.0
            side = path.with_suffix(".json")
            if side.exists():
                eps = float(json.loads(side.read_text())["spec"]["epsilon"])
            try:
                crossing = next(t for t, v in zip(times, mean) if v >= sat - eps)
                t_points[n] = crossing
            except StopIteration:
                notes.append(f"N={n}: unsaturated, left out of the scaling fit")
        elif header[:2] == ["N", "t_star"]:
            for r in rows:
                if r.get("convention", "averaged") != cfg["convention"]:
                    continue
                if r.get("status", "saturated") == "unsaturated" or r["t_star"] == "":
                    notes.append(f"N={r['N']}: unsaturated, left out of the scaling fit")
                    continue
                table_points[int(r["N"])] = float(r["t_star"])
        else:
            raise ConfigError(f"{path}: unrecognized CSV header {header}")
    # an explicit scrambling-times table wins over t* re-extracted from curves
    points = table_points or t_points
    result: dict = {"per_n": per_n, "convention": cfg["convention"], "notes": notes}
    try:
        scale = fit_log_scaling(sorted(points.items()))
        result["scaling"] = {"a": scale.params["a"], "b": scale.params["b"],
                             "r_squared": scale.r_squared, "points": [[n, t] for n, t in sorted(points.items())],
                             "residuals": scale.residuals}
    except ValueError as exc:
        result["scaling"] = {"error": str(exc)}
        notes.append(f"scaling fit: {exc}")
    for note in notes:
        log(f"warning: {note}", file=sys.stderr)
    run.write("fit.json", _dump(result))
    run.finish()
    for n, r in per_n.items():
        if "lambda" in r:
            log(f"N={n}: lambda={r['lambda']:.5f} alpha={r['alpha']:.5f} R2={r['r_squared']:.5f}")
    if "a" in result["scaling"]:
        s = result["scaling"]
        log(f"t* = {s['a']:.4f} ln N + {s['b']:.4f}  (R2={s['r_squared']:.5f})")
    ok = any("lambda" in r for r in per_n.values()) or "a" in result["scaling"]
    return EXIT_OK if ok else EXIT_RUNTIME


# -- otoc -----------------------------------------------------------------------


def cmd_otoc(cfg: dict, log=print) -> int:
    run = Run("otoc", cfg)
    try:
        v_gates = resolve_v_gates(cfg["v_gates"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if support_size(v_gates) > 5:
        raise ConfigError("V must act within the first 5 qubits")
    for n in cfg["n"]:
        if v_gates and support_size(v_gates) > n:
            raise ConfigError(f"V acts outside {n} qubits")
        try:
            w0 = BasisOperatorLabel.parse(str(cfg["w0"]), n)
        except ValueError as exc:
            raise ConfigError(f"bad w0: {exc}") from exc
        spec = _spec(cfg, n)
        times = spec.record_times()
        trace = run_otoc_ensemble(spec, v_gates, w0, times, workers=cfg["threads"])
        run.write(f"otoc_N{n}.csv", trace.to_csv())
        sidecar = {"spec": spec.to_dict(), "v_gates": [str(g) for g in v_gates],
                   "w0": "".join(map(str, w0.bits)), "plateau": FLOAT_FMT.format(trace.plateau),
                   "master_seed": spec.master_seed, "code_version": __version__}
        run.write(f"otoc_N{n}.json", _dump(sidecar))
        run.extra.setdefault("plateau", FLOAT_FMT.format(trace.plateau))
        log(f"N={n}: plateau {trace.plateau:.10f}, final mean F {trace.mean_f[-1]:.4f}")
    run.finish()
    return EXIT_OK


def cmd_plateau(cfg: dict, log=print) -> int:
    try:
        v_gates = resolve_v_gates(cfg["v_gates"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    size = cfg.get("region_size") or support_size(v_gates)
    try:
        value = plateau_value(v_gates, int(size))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    log(FLOAT_FMT.format(value))
    return EXIT_OK


def cmd_oracle_check(cfg: dict, log=print) -> int:
    results = checks.run_all(int(cfg["max_n"]), int(cfg["cases"]), int(cfg["seed"]),
                             progress=lambda r: log(r.line()))
    failed = [r for r in results if not r.passed]
    log(f"{len(results) - len(failed)}/{len(results)} properties passed")
    return EXIT_CHECK if failed else EXIT_OK


COMMANDS = {
    "entropy-sweep": cmd_entropy_sweep,
    "fit": cmd_fit,
    "otoc": cmd_otoc,
    "plateau": cmd_plateau,
    "oracle-check": cmd_oracle_check,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.subcommand](cfg)
    except (ConfigError, SizeLimitError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnsaturatedError, FitWindowError, ArithmeticError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
