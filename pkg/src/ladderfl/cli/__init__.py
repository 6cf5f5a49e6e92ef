"""Command-line front end: ``ladderfl <command> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .. import __version__
from ..dressed import TAGS, diagonalize, report
from ..dynamics import g1, g2, g2_cross, steady_state
from ..errors import LadderError, ParameterError
from ..model import Model, Params, build_liouvillian
from ..spectrum import incoherent_spectrum
from .output import Table, dumps, write_outputs
from .scenarios import (
    PARAM_KEYS,
    SCENARIOS,
    ConfigError,
    Grid,
    build_config,
    default_jobs,
    list_rows,
    parallel_map,
    run_scenario,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def _param_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model parameters (units of gamma)")
    g.add_argument("--omega", type=float, help="drive amplitude")
    g.add_argument("--alpha", type=float, help="anharmonicity (default -120)")
    g.add_argument("--delta", type=float, help="two-photon detuning (default 0)")
    g.add_argument("--xi", type=float, help="dipole ratio (default 1)")
    g.add_argument("--model", help="full, effective or dressed")
    g.add_argument("--rates", choices=("general", "asymptotic"), help="dressed-model rates")
    g.add_argument("--config", type=Path, help="JSON file; flags override its fields")
    g.add_argument("--jobs", type=int, help="worker processes (default $LADDERFL_JOBS or 1)")
    g.add_argument("--out", type=Path, help="CSV path; .json and .gp are written beside it")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ladderfl", description="Resonance fluorescence of a driven ladder atom.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _param_parent()

    s = sub.add_parser("steady", parents=[common], help="steady-state populations")
    s.add_argument("--sweep", action="append", default=[], metavar="SYM=START:STOP:COUNT",
                   help="sweep omega, alpha, delta or xi (repeatable)")

    s = sub.add_parser("spectrum", parents=[common], help="incoherent fluorescence spectrum")
    s.add_argument("--freq", default="-150:150:4096", help="frequency grid start:stop:count")
    s.add_argument("--method", choices=("eigen_sum", "fft"), default="eigen_sum")
    s.add_argument("--normalization", choices=("raw", "peak"), default="raw")

    for name, text in (("g1", "first-order correlation"), ("g2", "intensity correlation")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--tau", default="0:20:2001", help="delay grid start:stop:count")
        s.add_argument("--method", choices=("eigen", "ode"), default="eigen")

    s = sub.add_parser("g2cross", parents=[common], help="dressed-line cross-correlation")
    s.add_argument("--first", required=True, choices=TAGS)
    s.add_argument("--second", required=True, choices=TAGS)
    s.add_argument("--tau", default="0:20:2001")
    s.add_argument("--method", choices=("eigen", "ode"), default="eigen")

    sub.add_parser("dressed", parents=[common], help="dressed eigensystem and rates as JSON")

    sc = sub.add_parser("scenario", help="canned sweeps behind the standard plots")
    scs = sc.add_subparsers(dest="action", required=True)
    r = scs.add_parser("run", parents=[common], help="run one scenario")
    r.add_argument("name", help="scenario name (see 'scenario list')")
    r.add_argument("--tau", help="override delay grid")
    r.add_argument("--freq", help="override frequency grid")
    r.add_argument("--sweep", action="append", default=[], metavar="SYM=START:STOP:COUNT")
    r.add_argument("--normalization", choices=("raw", "peak"))
    ls = scs.add_parser("list", help="list scenarios")
    ls.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _parse_sweeps(items: list[str]) -> dict[str, Grid]:
    out = {}
    for item in items:
        sym, sep, label = item.partition("=")
        if not sep:
            raise ConfigError(f"--sweep expects SYM=START:STOP:COUNT, got {item!r}")
        out[sym.strip()] = Grid.parse(label, name=sym)
    return out


def _merged(args, extra_keys=()) -> dict:
    cfg = _load_config(args.config)
    for key in (*PARAM_KEYS, "model", "rates", "jobs", *extra_keys):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _params(cfg: dict) -> Params:
    values = {k: cfg[k] for k in PARAM_KEYS if k in cfg}
    if "omega" not in values:
        raise ConfigError("--omega is required (flag or config)")
    return Params(**values)


def _liouvillian(cfg: dict, p: Params, default_model: str = "full"):
    try:
        model = Model.parse(cfg.get("model", default_model))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return build_liouvillian(p, model, rates=cfg.get("rates", "general")), model


def _metadata(command: str, cfg: dict, started: float, **extra) -> dict:
    return {
        "command": command,
        "config": cfg,
        "version": __version__,
        "wall_time_s": time.perf_counter() - started,
        **extra,
    }


def _emit(table: Table, args, meta: dict, title: str, *, logy: bool = False, x: int = 1) -> None:
    if args.out is None:
        sys.stdout.write(table.to_csv())
        return
    for path in write_outputs(table, args.out, meta, title=title, logy=logy, x=x):
        print(path, file=sys.stderr)


def _steady_point(task):
    p, model, rates = task
    return np.real(np.diag(steady_state(build_liouvillian(p, model, rates=rates))))


def cmd_steady(args, started) -> None:
    cfg = _merged(args)
    sweeps = _parse_sweeps(args.sweep)
    if "omega" in sweeps:
        cfg.setdefault("omega", sweeps["omega"].values[0])
    base = _params(cfg)
    _, model = _liouvillian(cfg, base)
    bad = set(sweeps) - {"omega", "alpha", "delta", "xi"}
    if bad:
        raise ConfigError(f"cannot sweep {sorted(bad)}")
    names = list(sweeps)
    grids = [sweeps[n].values for n in names]
    points = [dict(zip(names, combo)) for combo in _product(grids)]
    tasks = [(base.replace(**pt), model, cfg.get("rates", "general")) for pt in points]
    jobs = cfg.get("jobs") or default_jobs()
    pops = parallel_map(_steady_point, tasks, jobs)
    columns = [f"{n} [gamma]" for n in names] + ["pop_g", "pop_e", "pop_f"]
    rows = [[pt[n] for n in names] + list(pop) for pt, pop in zip(points, pops)]
    cfg["sweeps"] = {n: g.label for n, g in sweeps.items()}
    _emit(Table(columns, rows), args, _metadata("steady", cfg, started), "steady-state populations")


def _product(grids):
    if not grids:
        yield ()
        return
    for head in grids[0]:
        for rest in _product(grids[1:]):
            yield (head, *rest)


def cmd_spectrum(args, started) -> None:
    cfg = _merged(args, ("freq", "method", "normalization"))
    p = _params(cfg)
    L, _ = _liouvillian(cfg, p)
    freq = Grid.parse(cfg["freq"], name="freq").array
    res = incoherent_spectrum(L, freq, method=cfg["method"], normalization=cfg["normalization"])
    table = Table.from_columns({"freq [gamma]": freq, "s_inc [1/gamma]": res.incoherent})
    meta = _metadata("spectrum", cfg, started, coherent_weight=res.coherent_weight, scale=res.scale)
    _emit(table, args, meta, "incoherent spectrum")


def cmd_g1(args, started) -> None:
    cfg = _merged(args, ("tau", "method"))
    L, _ = _liouvillian(cfg, _params(cfg))
    tr = g1(L, Grid.parse(cfg["tau"], name="tau").array, method=cfg["method"])
    table = Table.from_columns({"tau [1/gamma]": tr.tau, "re_g1": tr.values.real, "im_g1": tr.values.imag})
    _emit(table, args, _metadata("g1", cfg, started, normalization=tr.normalization), "first-order correlation")


def cmd_g2(args, started) -> None:
    cfg = _merged(args, ("tau", "method"))
    L, _ = _liouvillian(cfg, _params(cfg))
    tr = g2(L, Grid.parse(cfg["tau"], name="tau").array, method=cfg["method"])
    table = Table.from_columns({"tau [1/gamma]": tr.tau, "g2": tr.values})
    _emit(table, args, _metadata("g2", cfg, started, normalization=tr.normalization), "intensity correlation")


def cmd_g2cross(args, started) -> None:
    cfg = _merged(args, ("tau", "method", "first", "second"))
    L, _ = _liouvillian(cfg, _params(cfg), default_model="dressed")
    tr = g2_cross(L, cfg["first"], cfg["second"], Grid.parse(cfg["tau"], name="tau").array, method=cfg["method"])
    table = Table.from_columns({"tau [1/gamma]": tr.tau, f"g2({cfg['first']},{cfg['second']})": tr.values})
    _emit(table, args, _metadata("g2cross", cfg, started), "dressed-line correlation")


def cmd_dressed(args, started) -> None:
    cfg = _merged(args)
    text = dumps(report(diagonalize(_params(cfg))))
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")


def cmd_scenario(args, started) -> None:
    if args.action == "list":
        rows = list_rows()
        if args.json:
            sys.stdout.write(json.dumps(rows, indent=2) + "\n")
        else:
            width = max(len(r["name"]) for r in rows)
            print(f"{'name':<{width}}  figure  swept                 description")
            for r in rows:
                print(f"{r['name']:<{width}}  {r['figure']:<6}  {','.join(r['swept']):<20}  {r['description']}")
        return
    overrides = _load_config(args.config)
    overrides.pop("scenario", None)
    for key in (*PARAM_KEYS, "model", "rates", "jobs", "tau", "freq", "normalization"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.sweep:
        swept = {k: g.label for k, g in _parse_sweeps(args.sweep).items()}
        overrides["sweeps"] = {**overrides.get("sweeps", {}), **swept}
    cfg = build_config(args.name, overrides)
    try:
        result = run_scenario(cfg)
    except LadderError as exc:
        raise type(exc)(f"scenario {cfg.scenario}: {exc}") from exc
    out = args.out or Path("out") / cfg.scenario / f"{cfg.scenario}.csv"
    meta = _metadata(f"scenario run {cfg.scenario}", cfg.echo(), started, summary=result.summary)
    for path in write_outputs(result.table, out, meta, title=result.title, x=result.x, logy=result.logy,
                              extra=result.extra):
        print(path)


COMMANDS = {
    "steady": cmd_steady,
    "spectrum": cmd_spectrum,
    "g1": cmd_g1,
    "g2": cmd_g2,
    "g2cross": cmd_g2cross,
    "dressed": cmd_dressed,
    "scenario": cmd_scenario,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    started = time.perf_counter()
    try:
        COMMANDS[args.command](args, started)
    except (ConfigError, ParameterError) as exc:
        parser.print_usage(sys.stderr)
        print(f"ladderfl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LadderError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"ladderfl: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK
