"""Command-line front end.

Subcommands: ``amplitudes``, ``measure``, ``moments``, ``asymptotics``,
``verify`` and ``list-families``.  Output is CSV (default) or a JSON
envelope ``{family, params, method, data}``; floats are written with 17
significant digits so identical runs give identical bytes.

Exit codes: 0 success, 1 verification above tolerance, 2 bad input,
3 graph not QD, 4 numerical failure.  Errors print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np

from .amplitudes import (AmplitudeSeries, Method, amplitude_ode, closed_form_series,
                         quadrature_series)
from .asymptotics import (finite_infinite_diff, laguerre_asymptotic, stationary_phase_edge,
                          wkb_validate)
from .errors import CTQWError, InputError, NotQDGraph, NumericalError, TailMassExceeded
from .families import (FAMILY_INFO, FamilyKind, FamilySpec, closed_form_measure, family_graph,
                       family_jacobi, parse_family)
from .graph_core import Graph, JacobiSeq, extract_jacobi, load_graph, stratify
from .moments import closed_moments, fit_exponent, moments_from_series, sigma
from .oracle import DenseEvolution, stratum_project
from .spectral import ContinuousMeasure, DiscreteMeasure, jacobi_to_quadrature, stieltjes_inversion

__all__ = ["RunConfig", "run", "main", "parse_times", "build_parser"]

FLOAT_FMT = "%.16e"
MAX_AUTO_TRUNCATION = 8192
COMMANDS = ("amplitudes", "measure", "moments", "asymptotics", "verify", "list-families")
VERIFY_SUITE = (
    [f"complete:n={n}" for n in range(2, 11)]
    + [f"cycle:n={n}" for n in range(3, 13)]
    + [f"path:n={n}" for n in range(2, 13)]
    + [f"glued-trees:n={n}" for n in range(1, 4)]
    + [f"hypercube:n={n}" for n in range(1, 7)]
)


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


@dataclass
class RunConfig:
    command: str
    family: FamilySpec | None = None
    graph: str | None = None
    times: np.ndarray = field(default_factory=lambda: np.array([0.0]))
    kmax: int = 0
    method: str = "quadrature"
    order: int | None = None
    truncation: int | None = None
    out: str | None = None
    fmt: str = "csv"
    orders: tuple = (1, 2)
    pi_table: bool = False
    ns: tuple = ()
    tol: float = 1e-8
    scale: float | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.kmax < 0:
            raise InputError("kmax must be non-negative")
        if self.fmt not in ("csv", "json"):
            raise InputError("format must be csv or json")


def parse_times(text: str) -> np.ndarray:
    """``"a:b:steps"`` (``steps`` evenly spaced points) or a comma list ``"1,5,20"``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if not (b > a >= 0) or n < 1:
                raise InputError(f"time grid {text!r} needs t_end > t_start >= 0 and steps >= 1")
            return np.linspace(a, b, n)
        vals = np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError:
        raise InputError(f"cannot parse time grid {text!r}") from None
    if vals.size == 0 or np.any(vals < 0) or np.any(~np.isfinite(vals)):
        raise InputError(f"times must be finite and non-negative: {text!r}")
    return vals


def _parse_int_range(text: str) -> tuple:
    try:
        if ":" in text:
            a, b, step = (int(x) for x in text.split(":"))
            if step < 1 or b < a:
                raise ValueError
            return tuple(range(a, b + 1, step))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"cannot parse integer range {text!r}") from None


# ---------------------------------------------------------------- output


def _fmt(x) -> str:
    return FLOAT_FMT % x


def _json_text(obj) -> str:
    """JSON with every float in fixed scientific notation."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_text(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _fmt(x) if math.isfinite(x) else json.dumps(None)
    return json.dumps(str(obj))


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row) + "\n")
    return buf.getvalue()


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".ctqw-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _envelope(cfg: RunConfig, method: str, data) -> str:
    if cfg.family is not None:
        fam, params = cfg.family.kind.value, dict(cfg.family.params)
    else:
        fam, params = "graph", {"path": cfg.graph}
    return _json_text({"family": fam, "params": params, "method": method, "data": data}) + "\n"


# ---------------------------------------------------------------- computation


def _source(cfg: RunConfig) -> tuple[JacobiSeq, Graph | None]:
    if cfg.graph is not None:
        g = load_graph(cfg.graph)
        return extract_jacobi(g).with_scale(cfg.scale or 1.0), g
    if cfg.family is None:
        raise InputError("give --family or --graph")
    g = family_graph(cfg.family) if _has_graph(cfg.family) else None
    return family_jacobi(cfg.family), g


def _has_graph(spec: FamilySpec) -> bool:
    return spec.kind in (FamilyKind.CompleteK, FamilyKind.CycleC, FamilyKind.PathP,
                         FamilyKind.GluedTreesG, FamilyKind.Hypercube, FamilyKind.VectorGraph)


def _oracle_series(g: Graph, scale: float, kmax: int, times) -> AmplitudeSeries:
    s = stratify(g)
    if kmax >= s.depth:
        raise InputError(f"kmax {kmax} beyond the {s.depth} strata")
    q = stratum_project(DenseEvolution.from_graph(g).state(scale, np.asarray(times)), s)
    return AmplitudeSeries(times, np.arange(kmax + 1), q[:, : kmax + 1], Method.Oracle)


def _slice(series: AmplitudeSeries, kmax: int) -> AmplitudeSeries:
    return AmplitudeSeries(series.times, series.k_range[: kmax + 1], series.values[:, : kmax + 1],
                           series.method, series.tail_mass, series.order)


def _ode_series(cfg: RunConfig, j: JacobiSeq) -> AmplitudeSeries:
    """ODE run; without ``--truncation`` K doubles from ``max(64, 2 kmax)`` until the tail check passes."""
    if cfg.truncation is not None:
        if cfg.truncation < cfg.kmax:
            raise InputError("truncation must be at least kmax")
        return amplitude_ode(j, cfg.truncation, cfg.times)
    K = max(64, 2 * cfg.kmax)
    while True:
        try:
            return amplitude_ode(j, K, cfg.times)
        except TailMassExceeded:
            if K >= MAX_AUTO_TRUNCATION:
                raise
            K *= 2


def compute_series(cfg: RunConfig, kmax: int | None = None) -> AmplitudeSeries:
    kmax = cfg.kmax if kmax is None else kmax
    j, g = _source(cfg)
    method = cfg.method
    if method == "quadrature":
        return quadrature_series(j, kmax, cfg.times, order=cfg.order)
    if method == "ode":
        return _slice(_ode_series(cfg, j), kmax)
    if method == "closed":
        if cfg.family is None:
            raise InputError("closed forms need --family")
        return closed_form_series(cfg.family, kmax, cfg.times)
    if method == "oracle":
        if g is None:
            raise InputError("the dense oracle needs an explicit finite graph")
        return _oracle_series(g, j.scale, kmax, cfg.times)
    raise InputError(f"unknown method {method!r}")


def cmd_amplitudes(cfg: RunConfig) -> str:
    series = compute_series(cfg)
    rows = [(t, k, q.real, q.imag, abs(q) ** 2) for t, k, q in series.rows()]
    if cfg.fmt == "json":
        data = [{"t": t, "k": k, "re": re, "im": im, "prob": p} for t, k, re, im, p in rows]
        return _envelope(cfg, series.method.value, data)
    return _csv_text(("t", "k", "re", "im", "prob"), rows)


def cmd_measure(cfg: RunConfig) -> str:
    j, _ = _source(cfg)
    measure = None
    if cfg.family is not None and cfg.method == "closed":
        measure = closed_form_measure(cfg.family)
    if isinstance(measure, ContinuousMeasure):
        lo, hi = measure.support
        lo = lo if math.isfinite(lo) else -10.0
        hi = hi if math.isfinite(hi) else 10.0
        x = np.linspace(lo, hi, max(2, cfg.order or 401))[1:-1]
        dens = measure.density(x)
        inv = stieltjes_inversion(j, x)
        rows = list(zip(x, dens, inv))
        if cfg.fmt == "json":
            return _envelope(cfg, "closed", {"x": x, "density": dens, "inversion": inv,
                                             "atoms": [list(a) for a in measure.atoms]})
        return _csv_text(("x", "density", "inversion"), rows)
    if measure is None:
        n = j.length if j.is_finite else (cfg.order or 64)
        measure = jacobi_to_quadrature(j, n)
        label = "quadrature"
    else:
        label = "closed"
    assert isinstance(measure, DiscreteMeasure)
    rows = list(zip(measure.nodes, measure.weights))
    if cfg.fmt == "json":
        return _envelope(cfg, label, {"x": measure.nodes, "weight": measure.weights})
    return _csv_text(("x", "weight"), rows)


def cmd_moments(cfg: RunConfig) -> str:
    line = cfg.family is not None and cfg.family.kind is FamilyKind.Line
    j, _ = _source(cfg)
    if cfg.method == "closed":
        vals = {q: closed_moments(cfg.family, q, cfg.times) for q in set(cfg.orders) | {1, 2}}
    else:
        series = _ode_series(cfg, j) if cfg.method == "ode" else quadrature_series(
            j, j.length - 1 if j.is_finite else cfg.kmax, cfg.times, order=cfg.order)
        vals = {q: moments_from_series(series, q, line_convention=line) for q in set(cfg.orders) | {1, 2}}
    sig = sigma(vals[1], vals[2])
    orders = sorted(set(cfg.orders))
    nu = hw = None
    try:
        nu, hw = fit_exponent(cfg.times, sig)
    except InputError:
        pass
    if cfg.fmt == "json":
        data = {"t": cfg.times, **{f"moment_q{q}": vals[q] for q in orders}, "sigma": sig,
                "nu": nu, "nu_halfwidth": hw}
        return _envelope(cfg, cfg.method, data)
    header = ("t", *(f"moment_q{q}" for q in orders), "sigma")
    rows = [(t, *(vals[q][i] for q in orders), sig[i]) for i, t in enumerate(cfg.times)]
    return _csv_text(header, rows)


def cmd_asymptotics(cfg: RunConfig) -> str:
    if cfg.pi_table:
        if cfg.family is None or cfg.family.kind is not FamilyKind.Line:
            raise InputError("the pi(n, t) table is defined for the line family")
        ns = cfg.ns or tuple(range(100, 701, 50))
        grid = cfg.times if cfg.times.size > 1 else np.arange(0.0, float(cfg.times[0]) + 1e-9, 0.05)
        maxima = [float(np.max(finite_infinite_diff(n, grid))) for n in ns]
        if cfg.fmt == "json":
            return _envelope(cfg, "pi-table", {"t_max": float(grid.max()), "n": list(ns), "max_pi": maxima})
        return _csv_text(("n", "max_pi"), zip(ns, maxima))
    if cfg.family is None:
        raise InputError("asymptotics needs --family")
    spec = cfg.family
    if cfg.times.size < 3:
        raise InputError("asymptotics needs a time grid a:b:steps")
    t1, t2 = float(cfg.times.min()), float(cfg.times.max())
    if t1 <= 0:
        raise InputError("asymptotic windows start at t > 0")
    if spec.kind is FamilyKind.Laguerre:
        form = laguerre_asymptotic(spec["a"], spec["gamma"], cfg.kmax, spec.scale)
        exact = closed_form_series(spec, cfg.kmax, cfg.times)
        approx = form.evaluate(cfg.times)
        ex = np.abs(exact.column(cfg.kmax))
    else:
        if cfg.kmax != 0:
            raise InputError("edge asymptotics are implemented for k = 0")
        form = stationary_phase_edge(closed_form_measure(spec), spec.scale)
        exact = quadrature_series(family_jacobi(spec), 0, cfg.times, order=cfg.order)
        approx = form.evaluate(cfg.times)
        ex = exact.column(0).real
    report = wkb_validate(exact, form, (t1, t2), k=cfg.kmax)
    if cfg.fmt == "json":
        return _envelope(cfg, "asymptotics", report.to_dict(spec.label()))
    return _csv_text(("t", "exact", "approx"), zip(cfg.times, ex, np.real(approx)))


def _max_dev(a: AmplitudeSeries, b: AmplitudeSeries) -> float:
    return float(np.max(np.abs(a.values - b.values)))


def verify_family(spec: FamilySpec, times) -> dict:
    """Largest deviation of each method from the dense oracle over all strata."""
    g = family_graph(spec)
    j = family_jacobi(spec)
    kmax = j.length - 1
    ref = _oracle_series(g, j.scale, kmax, times)
    out = {"quadrature": _max_dev(quadrature_series(j, kmax, times), ref),
           "ode": _max_dev(amplitude_ode(j, kmax, times), ref)}
    try:
        out["closed"] = _max_dev(closed_form_series(spec, kmax, times), ref)
    except CTQWError:
        pass
    return out


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    if cfg.graph is not None:
        g = load_graph(cfg.graph)
        j = extract_jacobi(g).with_scale(cfg.scale or 1.0)
        kmax = j.length - 1
        ref = _oracle_series(g, j.scale, kmax, cfg.times)
        results = {cfg.graph: {"quadrature": _max_dev(quadrature_series(j, kmax, cfg.times), ref),
                               "ode": _max_dev(amplitude_ode(j, kmax, cfg.times), ref)}}
    else:
        specs = [cfg.family] if cfg.family is not None else [parse_family(s) for s in VERIFY_SUITE]
        for spec in specs:
            if not _has_graph(spec):
                raise InputError(f"{spec.kind.value} has no explicit graph to verify against")
        results = {spec.label(): verify_family(spec, cfg.times) for spec in specs}
    worst = max(v for r in results.values() for v in r.values())
    ok = worst < cfg.tol
    text = _json_text({"max_deviation": worst, "tolerance": cfg.tol, "pass": ok, "families": results}) + "\n"
    return text, 0 if ok else 1


def cmd_list_families(cfg: RunConfig) -> str:
    rows = []
    for kind, (required, defaults, desc) in FAMILY_INFO.items():
        rows.append({"kind": kind.value, "required": list(required), "defaults": dict(defaults),
                     "description": desc})
    if cfg.fmt == "json":
        return _json_text(rows) + "\n"
    lines = []
    for r in rows:
        req = ",".join(r["required"]) or "-"
        dft = ",".join(f"{k}={v}" for k, v in r["defaults"].items()) or "-"
        lines.append(f"{r['kind']:<18} required={req:<6} defaults={dft:<22} {r['description']}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> int:
    code = 0
    if cfg.command == "amplitudes":
        text = cmd_amplitudes(cfg)
    elif cfg.command == "measure":
        text = cmd_measure(cfg)
    elif cfg.command == "moments":
        text = cmd_moments(cfg)
    elif cfg.command == "asymptotics":
        text = cmd_asymptotics(cfg)
    elif cfg.command == "verify":
        text, code = cmd_verify(cfg)
    else:
        text = cmd_list_families(cfg)
    _write(text, cfg.out)
    return code


# ---------------------------------------------------------------- argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _report("ArgumentError", message, 2)
        raise _Exit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctqw", description="Continuous-time quantum walks on stratified graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, times=True):
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--family", help="family spec, e.g. cycle:n=7 or laguerre:a=1,gamma=0")
        src.add_argument("--graph", help="graph JSON file {n, edges, origin}")
        if times:
            sp.add_argument("--t", dest="times", default="0:10:101", help="a:b:steps or 1,5,20")
        sp.add_argument("--scale", type=float, help="Hamiltonian prefactor (default: family's)")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")

    a = sub.add_parser("amplitudes", help="stratum amplitudes q_k(t)")
    common(a)
    a.add_argument("--kmax", type=int, default=0)
    a.add_argument("--method", choices=("quadrature", "ode", "closed", "oracle"), default="quadrature")
    a.add_argument("--order", type=int, help="quadrature order for infinite families")
    a.add_argument("--truncation", type=int, help="ODE truncation K")

    m = sub.add_parser("measure", help="spectral measure (nodes/weights or density)")
    common(m, times=False)
    m.add_argument("--method", choices=("quadrature", "closed"), default="quadrature")
    m.add_argument("--order", type=int, help="quadrature order, or grid size for densities")

    mo = sub.add_parser("moments", help="moments <k^q>, sigma and the spreading exponent")
    common(mo)
    mo.add_argument("--q", dest="orders", default="1,2", help="comma list of orders")
    mo.add_argument("--method", choices=("quadrature", "ode", "closed"), default="ode")
    mo.add_argument("--order", type=int)
    mo.add_argument("--truncation", type=int)

    asy = sub.add_parser("asymptotics", help="leading asymptotics or the pi(n, t) table")
    common(asy)
    asy.add_argument("--kmax", type=int, default=0, help="stratum for laguerre forms")
    asy.add_argument("--pi-table", action="store_true", help="max_t pi(n, t) per n (line only)")
    asy.add_argument("--n", dest="ns", default="100:700:50", help="n range lo:hi:step or list")
    asy.add_argument("--order", type=int)

    v = sub.add_parser("verify", help="agreement of all methods with the dense oracle")
    common(v)
    v.add_argument("--tol", type=float, default=1e-8)

    lf = sub.add_parser("list-families", help="known families and parameters")
    lf.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    lf.add_argument("--out")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    spec = None
    fam = getattr(ns, "family", None)
    scale = getattr(ns, "scale", None)
    if scale is not None and not scale > 0:
        raise InputError("scale must be positive")
    if fam is not None:
        spec = parse_family(fam)
        if scale is not None:
            spec = FamilySpec(spec.kind, {**spec.params, "scale": scale})
    cfg = RunConfig(
        command=ns.command,
        family=spec,
        graph=getattr(ns, "graph", None),
        times=parse_times(ns.times) if getattr(ns, "times", None) else np.array([0.0]),
        kmax=getattr(ns, "kmax", 0) or 0,
        method=getattr(ns, "method", "quadrature"),
        order=getattr(ns, "order", None),
        truncation=getattr(ns, "truncation", None),
        out=ns.out,
        fmt=ns.fmt,
        orders=tuple(int(q) for q in ns.orders.split(",")) if getattr(ns, "orders", None) else (1, 2),
        pi_table=getattr(ns, "pi_table", False),
        ns=_parse_int_range(ns.ns) if getattr(ns, "pi_table", False) else (),
        tol=getattr(ns, "tol", 1e-8),
        scale=scale,
    )
    return cfg


def _report(kind: str, message: str, code: int) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")


def _thread_limit():
    n = os.environ.get("CTQW_THREADS")
    if not n:
        return nullcontext()
    try:
        limit = int(n)
    except ValueError:
        raise InputError(f"CTQW_THREADS must be an integer, got {n!r}") from None
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=max(1, limit))


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = config_from_args(ns)
        with _thread_limit():
            return run(cfg)
    except _Exit as exc:
        return exc.code
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except NotQDGraph as exc:
        _report(type(exc).__name__, str(exc), 3)
        return 3
    except InputError as exc:
        _report(type(exc).__name__, str(exc), 2)
        return 2
    except NumericalError as exc:
        _report(type(exc).__name__, str(exc), 4)
        return 4
    except (OSError, json.JSONDecodeError) as exc:
        _report(type(exc).__name__, str(exc), 2)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
