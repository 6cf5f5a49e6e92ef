"""Named parameter sweeps behind the standard plots, and their configuration."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..dressed import analytic_g2, diagonalize, secular_g2, transition_frequencies
from ..dynamics import g2, g2_cross, steady_state
from ..effective import shifted_resonance
from ..errors import DomainError, UnsupportedCorrelationError
from ..model import Model, Params, build_liouvillian
from ..spectrum import find_peaks, incoherent_spectrum
from .output import Table

XI_SET = (1 / math.sqrt(2), 1.0, math.sqrt(2))


class ConfigError(ValueError):
    """Invalid scenario or command configuration (reported as a usage error)."""


@dataclass(frozen=True)
class Grid:
    """Sampled axis, either ``start:stop:count`` or an explicit value list."""

    values: tuple[float, ...]
    label: str

    @classmethod
    def parse(cls, text, *, name: str = "grid", min_count: int = 2) -> "Grid":
        if isinstance(text, Grid):
            return text
        if isinstance(text, (list, tuple)):
            vals = tuple(float(v) for v in text)
            label = ",".join(repr(v) for v in vals)
        else:
            label = str(text).strip()
            parts = label.split(":")
            try:
                if len(parts) == 3:
                    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
                    if count < min_count:
                        raise ConfigError(f"{name}: count must be >= {min_count}, got {count}")
                    vals = tuple(float(v) for v in np.linspace(start, stop, count))
                elif len(parts) == 1:
                    vals = tuple(float(v) for v in label.split(","))
                else:
                    raise ValueError(label)
            except ValueError:
                raise ConfigError(f"{name}: expected start:stop:count or a comma list, got {text!r}") from None
        if len(vals) < min_count:
            raise ConfigError(f"{name}: need at least {min_count} points, got {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ConfigError(f"{name}: values must be finite")
        return cls(vals, label)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    params: Params
    sweeps: dict[str, Grid] = field(default_factory=dict)
    tau: Grid | None = None
    freq: Grid | None = None
    xi_values: tuple[float, ...] | None = None
    model: Model = Model.FULL
    normalization: str = "raw"
    rates: str = "general"
    variant: str = "corrected"
    jobs: int = 1

    def echo(self) -> dict:
        return {
            "scenario": self.scenario,
            "params": self.params.as_dict(),
            "sweeps": {k: g.label for k, g in self.sweeps.items()},
            "tau": self.tau.label if self.tau else None,
            "freq": self.freq.label if self.freq else None,
            "xi_values": list(self.xi_values) if self.xi_values else None,
            "model": self.model.value,
            "normalization": self.normalization,
            "rates": self.rates,
            "variant": self.variant,
            "jobs": self.jobs,
        }


@dataclass
class ScenarioResult:
    table: Table
    title: str
    x: int = 1
    logy: bool = False
    extra: dict[str, Table] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def default_jobs() -> int:
    raw = os.environ.get("LADDERFL_JOBS", "1")
    try:
        jobs = int(raw)
    except ValueError:
        raise ConfigError(f"LADDERFL_JOBS must be an integer, got {raw!r}") from None
    if jobs < 1:
        raise ConfigError(f"LADDERFL_JOBS must be >= 1, got {jobs}")
    return jobs


def parallel_map(fn: Callable, items: Sequence, jobs: int) -> list:
    """Ordered map over a bounded process pool (serial when ``jobs == 1``)."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def _fmt(x: float) -> str:
    return f"{x:.4g}"


# ---- workers (module level so they pickle) ------------------------------


def _steady_row(args) -> list[list[float]]:
    base, model, delta, omegas = args
    rows = []
    for om in omegas:
        p = base.replace(delta=delta, omega=om)
        rho = steady_state(build_liouvillian(p, model))
        rows.append([delta, om, *np.real(np.diag(rho))])
    return rows


def _spectrum_column(args) -> np.ndarray:
    p, model, rates, freq, normalization = args
    L = build_liouvillian(p, model, rates=rates)
    return incoherent_spectrum(L, freq, normalization=normalization).incoherent


def _g2_column(args) -> np.ndarray:
    p, model, rates, tau = args
    return g2(build_liouvillian(p, model, rates=rates), tau).values


# ---- scenarios -----------------------------------------------------------


def run_fig2(cfg: ScenarioConfig) -> ScenarioResult:
    deltas = cfg.sweeps["delta"].values
    omegas = cfg.sweeps["omega"].values
    tasks = [(cfg.params, cfg.model, d, omegas) for d in deltas]
    rows = [r for chunk in parallel_map(_steady_row, tasks, cfg.jobs) for r in chunk]
    table = Table(["delta [gamma]", "omega [gamma]", "pop_g", "pop_e", "pop_f"], rows)

    summary = {}
    data = np.array(rows)
    probe = min(omegas, key=lambda o: abs(o - 40.0))
    sel = data[:, 1] == probe
    if sel.sum() >= 2:
        best = data[sel][np.argmax(data[sel, 4]), 0]
        summary["argmax_pop_f_delta"] = {"omega": probe, "delta": float(best)}
        try:
            summary["argmax_pop_f_delta"]["delta_shifted"] = shifted_resonance(cfg.params.replace(omega=probe))
        except DomainError as exc:
            summary["argmax_pop_f_delta"]["delta_shifted"] = str(exc)
    return ScenarioResult(table, "steady-state populations vs detuning and drive", summary=summary)


def _spectra(cfg: ScenarioConfig) -> tuple[np.ndarray, list[float], list[np.ndarray]]:
    freq = cfg.freq.array
    xis = list(cfg.xi_values or (cfg.params.xi,))
    tasks = [(cfg.params.replace(xi=xi), cfg.model, cfg.rates, freq, cfg.normalization) for xi in xis]
    return freq, xis, parallel_map(_spectrum_column, tasks, cfg.jobs)


def _spectrum_table(freq, xis, cols) -> Table:
    named = {"freq [gamma]": freq}
    for xi, col in zip(xis, cols):
        named[f"s_inc xi={_fmt(xi)} [1/gamma]"] = col
    return Table.from_columns(named)


def run_fig3b(cfg: ScenarioConfig) -> ScenarioResult:
    freq, xis, cols = _spectra(cfg)
    summary = {}
    for xi, col in zip(xis, cols):
        pos, _ = find_peaks(freq, col)
        summary[f"xi={_fmt(xi)}"] = {"peaks": pos.tolist()}
    return ScenarioResult(_spectrum_table(freq, xis, cols), "incoherent spectrum, weak drive", summary=summary)


def peak_table(freq: np.ndarray, col: np.ndarray, p: Params) -> list[list]:
    """Match each dressed line to the nearest spectral maximum (nan if none within 2 gamma)."""
    lines = transition_frequencies(diagonalize(p))
    pos, heights = find_peaks(freq, col)
    rows = []
    for tag in sorted(lines, key=lines.get):
        target = lines[tag]
        if pos.size:
            k = int(np.argmin(np.abs(pos - target)))
            if abs(pos[k] - target) <= 2 * p.gamma:
                rows.append([p.xi, tag, target, pos[k], pos[k] - target, heights[k]])
                continue
        rows.append([p.xi, tag, target, math.nan, math.nan, math.nan])
    return rows


def run_fig3c(cfg: ScenarioConfig) -> ScenarioResult:
    freq, xis, cols = _spectra(cfg)
    rows = []
    for xi, col in zip(xis, cols):
        rows.extend(peak_table(freq, col, cfg.params.replace(xi=xi)))
    peaks = Table(["xi", "line", "predicted [gamma]", "found [gamma]", "offset [gamma]", "height"], rows)
    return ScenarioResult(
        _spectrum_table(freq, xis, cols),
        "incoherent spectrum, strong drive",
        extra={"peaks": peaks},
    )


def run_fig4(cfg: ScenarioConfig) -> ScenarioResult:
    freq = cfg.freq.array
    omegas = cfg.sweeps["omega"].values
    tasks = [(cfg.params.replace(omega=om), cfg.model, cfg.rates, freq, cfg.normalization) for om in omegas]
    cols = parallel_map(_spectrum_column, tasks, cfg.jobs)
    rows = [[om, f, s] for om, col in zip(omegas, cols) for f, s in zip(freq, col)]
    table = Table(["omega [gamma]", "freq [gamma]", "s_inc [1/gamma]"], rows)
    return ScenarioResult(table, "incoherent spectrum vs drive amplitude", x=2)


def run_fig5(cfg: ScenarioConfig) -> ScenarioResult:
    tau = cfg.tau.array
    omegas = cfg.sweeps["omega"].values
    tasks = [(cfg.params.replace(omega=om), cfg.model, cfg.rates, tau) for om in omegas]
    cols = parallel_map(_g2_column, tasks, cfg.jobs)
    named = {"tau [1/gamma]": tau}
    for om, col in zip(omegas, cols):
        named[f"g2 omega={_fmt(om)}"] = col
    summary = {"g2_zero": {_fmt(om): float(col[0]) for om, col in zip(omegas, cols)}}
    return ScenarioResult(Table.from_columns(named), "g2, weak drive", logy=True, summary=summary)


def run_fig6(cfg: ScenarioConfig) -> ScenarioResult:
    tau = cfg.tau.array
    xis = list(cfg.xi_values or (cfg.params.xi,))
    tasks = [(cfg.params.replace(xi=xi), cfg.model, cfg.rates, tau) for xi in xis]
    cols = parallel_map(_g2_column, tasks, cfg.jobs)
    named = {"tau [1/gamma]": tau}
    for xi, col in zip(xis, cols):
        named[f"g2 xi={_fmt(xi)}"] = col
    return ScenarioResult(Table.from_columns(named), "g2, strong drive")


def run_fig7(cfg: ScenarioConfig) -> ScenarioResult:
    tau = cfg.tau.array
    deltas = cfg.sweeps["delta"].values
    tasks = [(cfg.params.replace(delta=d), cfg.model, cfg.rates, tau) for d in deltas]
    cols = parallel_map(_g2_column, tasks, cfg.jobs)
    rows = [[d, t, v] for d, col in zip(deltas, cols) for t, v in zip(tau, col)]
    table = Table(["delta [gamma]", "tau [1/gamma]", "g2"], rows)
    return ScenarioResult(table, "g2 vs drive detuning", x=2)


AUTO_LINES = ("0", "+1", "+3")
CROSS_PAIRS = (("-1", "+1"), ("-2", "+2"), ("-3", "+3"), ("-2", "+1"))


def _pair_name(a: str, b: str) -> str:
    return f"({a},{b})"


def _dressed_liouvillian(cfg: ScenarioConfig):
    return build_liouvillian(cfg.params, Model.DRESSED, rates=cfg.rates)


def run_fig8(cfg: ScenarioConfig) -> ScenarioResult:
    tau = cfg.tau.array
    L = _dressed_liouvillian(cfg)
    named = {"tau [1/gamma]": tau}
    summary = {}
    for tag in AUTO_LINES:
        exact = analytic_g2(tag, tag, cfg.params.xi, tau, gamma=cfg.params.gamma, variant=cfg.variant)
        numeric = g2_cross(L, tag, tag, tau).values
        named[f"g2{_pair_name(tag, tag)} analytic"] = exact
        named[f"g2{_pair_name(tag, tag)} dressed"] = numeric
        summary[_pair_name(tag, tag)] = float(np.max(np.abs(exact - numeric)))
    return ScenarioResult(
        Table.from_columns(named), "dressed-line auto-correlations", summary={"max_abs_deviation": summary}
    )


def _closed_form(a: str, b: str, xi: float, tau, gamma: float, variant: str) -> np.ndarray:
    try:
        return analytic_g2(a, b, xi, tau, gamma=gamma, variant=variant)
    except UnsupportedCorrelationError:
        return secular_g2(a, b, xi, tau, gamma=gamma)


def run_fig9(cfg: ScenarioConfig) -> ScenarioResult:
    """Cross-correlations on a symmetric delay axis; ``tau < 0`` swaps the order."""
    tau = cfg.tau.array
    neg = tau < 0
    L = _dressed_liouvillian(cfg)
    xi, gamma = cfg.params.xi, cfg.params.gamma
    named = {"tau [1/gamma]": tau}
    summary = {}
    for a, b in CROSS_PAIRS:
        exact = np.empty_like(tau)
        numeric = np.empty_like(tau)
        for mask, (x, y) in ((~neg, (a, b)), (neg, (b, a))):
            if not mask.any():
                continue
            t = np.abs(tau[mask])
            order = np.argsort(t)
            ts = t[order]
            exact_part = _closed_form(x, y, xi, ts, gamma, cfg.variant)
            numeric_part = g2_cross(L, x, y, ts).values
            idx = np.flatnonzero(mask)[order]
            exact[idx] = exact_part
            numeric[idx] = numeric_part
        named[f"g2{_pair_name(a, b)} analytic"] = exact
        named[f"g2{_pair_name(a, b)} dressed"] = numeric
        summary[_pair_name(a, b)] = float(np.max(np.abs(exact - numeric)))
    return ScenarioResult(
        Table.from_columns(named), "dressed-line cross-correlations", summary={"max_abs_deviation": summary}
    )


@dataclass(frozen=True)
class Scenario:
    name: str
    figure: str
    description: str
    run: Callable[[ScenarioConfig], ScenarioResult]
    defaults: dict

    @property
    def swept(self) -> list[str]:
        out = list(self.defaults.get("sweeps", {}))
        if "xi_values" in self.defaults:
            out.append("xi")
        for axis in ("tau", "freq"):
            if axis in self.defaults:
                out.append(axis)
        return out


_DRESSED_DEFAULTS = {"omega": 40.0, "xi": 1.0, "model": "dressed", "rates": "asymptotic"}

SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            "fig2", "2", "steady-state populations over detuning and drive amplitude", run_fig2,
            {"xi": 1.0, "sweeps": {"delta": "-80:80:161", "omega": "0:60:121"}},
        ),
        Scenario(
            "fig3b", "3(b)", "incoherent spectrum, weak drive (omega = 5)", run_fig3b,
            {"omega": 5.0, "freq": "-150:150:4096", "xi_values": list(XI_SET)},
        ),
        Scenario(
            "fig3c", "3(c)", "incoherent spectrum and peak table, strong drive (omega = 40)", run_fig3c,
            {"omega": 40.0, "freq": "-150:150:4096", "xi_values": list(XI_SET)},
        ),
        Scenario(
            "fig4", "4", "incoherent spectrum over drive amplitude", run_fig4,
            {"sweeps": {"omega": "1:60:60"}, "freq": "-150:150:1201", "normalization": "peak"},
        ),
        Scenario(
            "fig5", "5", "intensity correlation, weak drive", run_fig5,
            {"sweeps": {"omega": "0.1,0.3,0.6,1"}, "tau": "0:10:501"},
        ),
        Scenario(
            "fig6", "6", "intensity correlation, strong drive (omega = 40)", run_fig6,
            {"omega": 40.0, "tau": "0:5:2001", "xi_values": list(XI_SET)},
        ),
        Scenario(
            "fig7", "7", "intensity correlation over drive detuning (omega = 40)", run_fig7,
            {"omega": 40.0, "sweeps": {"delta": "-80:80:81"}, "tau": "0:2:401"},
        ),
        Scenario(
            "fig8", "8", "dressed-line auto-correlations, analytic and regression", run_fig8,
            {**_DRESSED_DEFAULTS, "tau": "0:10:201"},
        ),
        Scenario(
            "fig9", "9", "dressed-line cross-correlations, analytic and regression", run_fig9,
            {**_DRESSED_DEFAULTS, "tau": "-10:10:401"},
        ),
    )
}


def list_rows() -> list[dict]:
    return [
        {"name": s.name, "figure": s.figure, "swept": s.swept, "description": s.description}
        for s in SCENARIOS.values()
    ]


PARAM_KEYS = ("omega", "alpha", "delta", "xi", "gamma")
CONFIG_KEYS = set(PARAM_KEYS) | {
    "scenario", "sweeps", "tau", "freq", "xi_values", "model", "normalization", "rates", "variant", "jobs",
}


def build_config(name: str, overrides: dict) -> ScenarioConfig:
    """Scenario defaults, then ``overrides`` (config file merged with flags)."""
    try:
        scenario = SCENARIOS[name]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; available: {', '.join(SCENARIOS)}") from None
    unknown = set(overrides) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged = {**scenario.defaults, **{k: v for k, v in overrides.items() if v is not None}}
    sweeps = dict(scenario.defaults.get("sweeps", {}))
    sweeps.update(overrides.get("sweeps") or {})
    extra = set(sweeps) - set(scenario.defaults.get("sweeps", {}))
    if extra:
        raise ConfigError(f"{name} cannot sweep {sorted(extra)}")

    params = Params(omega=merged.get("omega", 40.0), **{k: merged[k] for k in PARAM_KEYS[1:] if k in merged})
    xi_values = merged.get("xi_values")
    if xi_values is not None:
        if "xi" in overrides and overrides["xi"] is not None and "xi_values" not in overrides:
            xi_values = None  # an explicit xi narrows the default xi set
        else:
            xi_values = tuple(Grid.parse(xi_values, name="xi_values", min_count=1).values)
    normalization = merged.get("normalization", "raw")
    if normalization not in ("raw", "peak"):
        raise ConfigError(f"normalization must be raw or peak, got {normalization!r}")
    try:
        model = Model.parse(merged.get("model", "full"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    jobs = int(merged.get("jobs") or default_jobs())
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")
    return ScenarioConfig(
        scenario=name,
        params=params,
        sweeps={k: Grid.parse(v, name=k) for k, v in sweeps.items()},
        tau=Grid.parse(merged["tau"], name="tau") if "tau" in merged else None,
        freq=Grid.parse(merged["freq"], name="freq") if "freq" in merged else None,
        xi_values=xi_values,
        model=model,
        normalization=normalization,
        rates=merged.get("rates", "general"),
        variant=merged.get("variant", "corrected"),
        jobs=jobs,
    )


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    return SCENARIOS[cfg.scenario].run(cfg)
