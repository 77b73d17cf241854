"""Command-line front end.

Every subcommand accepts its parameters as flags, as a JSON document
(``--params '{...}'`` or ``--params @file.json``), or both; flags win.
The merged parameters are echoed into the first line of every output.

Exit status: 0 success, 2 validation or I/O error, 3 convergence failure.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import math
import os
import sys
import warnings
from pathlib import Path
from typing import Any

import numpy as np

from . import coordmap, hankel, kernels, pde, solve, specfun
from .records import QuadratureSpec, ResidualReport, SampledFunction

__all__ = ["main", "run", "emit_plot_data", "RunConfig", "WORKERS_ENV"]

WORKERS_ENV = "PTPOISSON_WORKERS"
COMMANDS = ("specfun", "kernel", "solve", "heat", "hankel", "check", "map-check")
EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE = 0, 2, 3

log = logging.getLogger("ptpoisson")


class _JsonLines(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        return json.dumps(
            {"level": record.levelname.lower(), "logger": record.name, "message": record.getMessage().strip()},
            sort_keys=True,
        )


@contextlib.contextmanager
def _structured_log():
    """Route log records and warnings to stderr as JSON lines for one command."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonLines())
    saved = []
    for name in ("ptpoisson", "py.warnings"):
        lg = logging.getLogger(name)
        saved.append((lg, lg.handlers[:], lg.propagate, lg.level))
        lg.handlers[:] = [handler]
        lg.propagate = False
        lg.setLevel(logging.INFO)
    fmt = warnings.formatwarning
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.formatwarning = lambda message, category, *_: f"{category.__name__}: {message}"
        logging.captureWarnings(True)
        try:
            yield
        finally:
            logging.captureWarnings(False)
            warnings.formatwarning = fmt
            for lg, handlers, propagate, level in saved:
                lg.handlers[:] = handlers
                lg.propagate = propagate
                lg.setLevel(level)


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be at least 1")
    return n


class RunConfig:
    """Parsed command: name, merged JSON parameters, output path, format."""

    def __init__(self, command: str, params: dict[str, Any], output: str | None = None, fmt: str = "csv"):
        if command not in COMMANDS:
            raise ValueError(f"unknown command {command!r}")
        if fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        self.command, self.params, self.output, self.format = command, params, output, fmt


# ---------------------------------------------------------------------------
# output


def _fmt(v: float, precision: int) -> str:
    return f"{v:.{precision}g}"


def emit_plot_data(data, path=None, fmt: str = "csv") -> str:
    """Two-column (series) or three-column (field) numeric text, one header line.

    Values are written with ``repr`` so repeated runs are byte-identical.
    Returns the text and writes it to ``path`` when given.
    """
    sep = {"csv": ",", "txt": " "}.get(fmt)
    if sep is None:
        raise ValueError("plot data format must be csv or txt")
    lines = []
    if isinstance(data, pde.Field):
        lines.append(sep.join(("coord1", "coord2", "value")))
        c1, c2 = data.grid.coord1, data.grid.coord2
        for j in range(c2.size):
            for i in range(c1.size):
                lines.append(sep.join((repr(float(c1[i])), repr(float(c2[j])), repr(float(data.values[j, i])))))
    elif isinstance(data, SampledFunction):
        lines.append(sep.join(("coordinate", "value")))
        for x, v in zip(data.grid, data.values):
            lines.append(sep.join((repr(float(x)), repr(float(v)))))
    else:
        raise ValueError("plot data must be a SampledFunction or a Field")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _header(params: dict) -> str:
    return "# params: " + json.dumps(params, sort_keys=True)


def _table(params: dict, columns: list[str], rows: list[list], fmt: str, precision: int) -> str:
    if fmt == "json":
        return json.dumps(
            {"params": params, "columns": columns, "rows": rows}, sort_keys=True, indent=2, default=_plain
        ) + "\n"
    out = [_header(params), ",".join(columns)]
    for row in rows:
        out.append(",".join(_fmt(v, precision) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(out) + "\n"


def _report(params: dict, report: ResidualReport | dict) -> str:
    body = report.to_dict() if isinstance(report, ResidualReport) else report
    return json.dumps({"params": params, "report": body}, sort_keys=True, indent=2, default=_plain) + "\n"


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


# ---------------------------------------------------------------------------
# commands


def _need(p: dict, *keys):
    missing = [k for k in keys if p.get(k) is None]
    if missing:
        raise ValueError(f"missing parameter(s): {', '.join(missing)}")
    return [p[k] for k in keys]


def _cmd_specfun(p: dict) -> tuple[list[str], list[list]]:
    fn = _need(p, "fn")[0]
    if fn == "gamma":
        (x,) = _need(p, "x")
        return ["fn", "x", "value"], [[fn, float(x), specfun.gamma_fn(float(x))]]
    if fn == "digamma":
        (x,) = _need(p, "x")
        return ["fn", "x", "value"], [[fn, float(x), specfun.digamma(float(x))]]
    if fn == "pochhammer":
        a, n = _need(p, "a", "n")
        return ["fn", "a", "n", "value"], [[fn, float(a), int(n), specfun.pochhammer(float(a), int(n))]]
    if fn == "hyp2f1":
        a, b, c, z = (float(v) for v in _need(p, "a", "b", "c", "z"))
        return ["fn", "a", "b", "c", "z", "value"], [[fn, a, b, c, z, float(specfun.gauss_2f1(a, b, c, z))]]
    if fn == "legendre_q":
        nu, mu, z = _need(p, "nu", "mu", "z")
        return ["fn", "degree", "order", "z", "value"], [
            [fn, float(nu), int(mu), float(z), float(specfun.legendre_q(float(nu), int(mu), float(z)))]
        ]
    if fn in ("bessel_j", "bessel_i"):
        nu, x = (float(v) for v in _need(p, "nu", "x"))
        f = specfun.bessel_j if fn == "bessel_j" else specfun.bessel_i
        return ["fn", "order", "x", "value"], [[fn, nu, x, float(f(nu, x))]]
    raise ValueError(f"unknown special function {fn!r}")


def _cmd_kernel(p: dict) -> tuple[list[str], list[list]]:
    kind, nu = _need(p, "kind", "nu")
    map_kind = p.get("map_kind") or "hyp_conformal"
    cols = ["kind", "nu", "Y", "X", "Xp", "value"]
    if p.get("points") is not None:
        rows = []
        for pt in p["points"]:
            if len(pt) != 3:
                raise ValueError("each point must be [Y, X, Xp]")
            q = kernels.KernelQuery(*(float(v) for v in pt))
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                v = kernels.poisson_kernel(kind, float(nu), q.height, q.interior, q.boundary, map_kind)
            note = "|".join(sorted({str(w.message) for w in caught}))
            for w in caught:
                warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
            rows.append([kind, float(nu), q.height, q.interior, q.boundary, float(v), note])
        return cols + ["warnings"], rows
    Y, X, Xp = _need(p, "Y", "X", "Xp")
    q = kernels.KernelQuery(float(Y), float(X), float(Xp))
    v = kernels.poisson_kernel(kind, float(nu), q.height, q.interior, q.boundary, map_kind)
    return cols, [[kind, float(nu), q.height, q.interior, q.boundary, float(v)]]


def _cmd_heat(p: dict) -> tuple[list[str], list[list]]:
    kind, nu, t, X, Xp = _need(p, "kind", "nu", "t", "X", "Xp")
    nu, t, X, Xp = float(nu), float(t), float(X), float(Xp)
    contour = kernels.ContourSpec(kind=p.get("contour") or "talbot", node_count=int(p.get("nodes") or 32))
    v = kernels.heat_kernel(kind, nu, t, X, Xp, contour, p.get("map_kind") or "hyp_paper")
    cols, row = ["kind", "nu", "t", "X", "Xp", "value"], [kind, nu, t, X, Xp, v]
    if p.get("oracle") and kind == "euclidean":
        cols += ["spectral", "weber"]
        row += [hankel.heat_spectral_integral(nu, t, X, Xp), kernels.weber_heat_kernel(nu, t, X, Xp)]
    return cols, [row]


def _grid(spec) -> np.ndarray:
    if isinstance(spec, str):
        spec = [float(s) for s in spec.split(",")]
    if len(spec) != 3:
        raise ValueError("grid must be given as lo,hi,count")
    return np.linspace(float(spec[0]), float(spec[1]), int(spec[2]))


def _cmd_hankel(p: dict) -> SampledFunction:
    nu = float(_need(p, "nu")[0])
    if p.get("input"):
        f = SampledFunction.from_csv(Path(p["input"]).read_text())
    else:
        grid = _grid(p.get("grid") or [0.0, 20.0, 2048])
        centre, width = float(p.get("center", 7.0)), float(p.get("width", 1.0))
        f = SampledFunction.from_callable(lambda x: np.exp(-(((x - centre) / width) ** 2)), grid)
    out = _grid(p.get("out_grid") or [f.grid[0], f.grid[-1], f.grid.size])
    return hankel.hankel_transform(f, nu, out, QuadratureSpec())


def _cmd_solve(p: dict) -> SampledFunction:
    r = solve.SolveRequest.from_dict(p)
    return solve.solve(r, workers())


def _suite(name: str, p: dict) -> ResidualReport | dict:
    nu = float(p.get("nu", 1.0))
    if name == "hankel":
        g = np.linspace(0.0, hankel.REFERENCE_SPAN, hankel.REFERENCE_POINTS)
        f = SampledFunction.from_callable(lambda x: np.exp(-0.5 * (x - 8.0) ** 2), g)
        return hankel.check_hankel_properties(f, nu)
    if name == "kernel":
        qs = [(Y, X, Xp) for Y in (0.1, 1.0, 3.0) for X in (0.5, 1.0, 2.0) for Xp in (0.3, 1.0, 2.5)]
        errs = [
            abs(kernels.poisson_kernel_euclidean(nu, Y, X, Xp)
                - math.sqrt(X * Xp) * hankel.weighted_laplace_integral(nu, Y, X, Xp))
            for Y, X, Xp in qs
        ]
        return ResidualReport({"max_abs_error": max(errs)}, meta={"suite": name, "nu": nu, "queries": len(qs)})
    if name == "pde":
        op = pde.OperatorKind("inverse_square", nu)
        probes = [(1.0, 0.5), (1.5, 1.0), (2.0, 0.8), (0.8, 2.0), (3.0, 1.2)]
        return pde.pde_residual(op, lambda X, Y: kernels.poisson_kernel_euclidean(nu, Y, X, 1.3), probes, h=0.05)
    if name == "heat":
        t = float(p.get("t", 1.0))
        X, Xp = float(p.get("X", 1.0)), float(p.get("Xp", 1.5))
        b = kernels.heat_kernel("euclidean", nu, t, X, Xp)
        s = hankel.heat_spectral_integral(nu, t, X, Xp)
        w = kernels.weber_heat_kernel(nu, t, X, Xp)
        return ResidualReport(
            {"bromwich_vs_spectral": abs(b - s), "bromwich_vs_weber": abs(b - w)},
            meta={"suite": name, "nu": nu, "t": t, "X": X, "Xp": Xp, "value": b},
        )
    raise ValueError(f"unknown check suite {name!r}")


def _cmd_map_check(p: dict) -> ResidualReport:
    kind = p.get("kind") or "trig"
    c = float(p.get("c", 1.0))
    nu = float(p.get("nu", 1.5))
    h = float(p.get("h", 0.04))
    return coordmap.conjugation_residual(kind, c, nu, h=h)


def run(config: RunConfig) -> str:
    """Execute one command and return its text output (written to ``config.output`` when set)."""
    p, fmt = config.params, config.format
    precision = int(p.get("precision") or 7)
    cmd = config.command
    if cmd in ("specfun", "kernel", "heat"):
        handler = {"specfun": _cmd_specfun, "kernel": _cmd_kernel, "heat": _cmd_heat}[cmd]
        cols, rows = handler(p)
        text = _table(p, cols, rows, fmt, precision)
    elif cmd in ("solve", "hankel"):
        series = _cmd_solve(p) if cmd == "solve" else _cmd_hankel(p)
        if fmt == "json":
            text = json.dumps(
                {"params": p, "grid": series.grid, "values": series.values,
                 "meta": getattr(series, "meta", {})},
                sort_keys=True, indent=2, default=_plain,
            ) + "\n"
        else:
            text = _header(p) + "\n" + emit_plot_data(series)
    elif cmd == "check":
        text = _report(p, _suite(_need(p, "suite")[0], p))
    else:
        text = _report(p, _cmd_map_check(p))
    if config.output:
        Path(config.output).write_text(text)
    return text


# ---------------------------------------------------------------------------
# argument parsing


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ptpoisson", description="Poisson and heat kernels for inverse-square and Poschl-Teller potentials")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="JSON parameters, inline or @path")
    common.add_argument("--output", "-o", help="write output to this path")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--precision", type=int, help="significant digits in CSV rows (default 7)")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("specfun", parents=[common], help="evaluate one special function")
    s.add_argument("--fn", choices=("gamma", "digamma", "pochhammer", "hyp2f1", "legendre_q", "bessel_j", "bessel_i"))
    for name in ("a", "b", "c", "z", "x", "nu"):
        s.add_argument(f"--{name}", type=float)
    s.add_argument("--mu", type=int)
    s.add_argument("--n", type=int)

    k = sub.add_parser("kernel", parents=[common], help="evaluate a Poisson kernel")
    k.add_argument("--kind", choices=("euclidean", "trig", "hyp"))
    for name in ("nu", "Y", "X", "Xp"):
        k.add_argument(f"--{name}", type=float)
    k.add_argument("--map-kind", dest="map_kind", choices=("hyp_paper", "hyp_conformal"))

    h = sub.add_parser("heat", parents=[common], help="heat kernel by Bromwich inversion")
    h.add_argument("--kind", choices=("euclidean", "trig", "hyp"))
    for name in ("nu", "t", "X", "Xp"):
        h.add_argument(f"--{name}", type=float)
    h.add_argument("--map-kind", dest="map_kind", choices=("hyp_paper", "hyp_conformal"))
    h.add_argument("--contour", choices=("talbot", "vertical"))
    h.add_argument("--nodes", type=int)
    h.add_argument("--oracle", action="store_true", default=None, help="add spectral and Weber columns (euclidean)")

    sv = sub.add_parser("solve", parents=[common], help="Dirichlet solve from a JSON request")

    hk = sub.add_parser("hankel", parents=[common], help="Hankel transform of sampled data")
    hk.add_argument("--nu", type=float)
    hk.add_argument("--input", help="CSV file with coordinate,value rows")
    hk.add_argument("--grid", help="lo,hi,count for the built-in Gaussian input")
    hk.add_argument("--out-grid", dest="out_grid", help="lo,hi,count")

    c = sub.add_parser("check", parents=[common], help="run a verification suite")
    c.add_argument("--suite", choices=("hankel", "kernel", "pde", "heat"))
    c.add_argument("--nu", type=float)

    m = sub.add_parser("map-check", parents=[common], help="conformal conjugation residual")
    m.add_argument("--kind", choices=("trig", "hyp_paper", "hyp_conformal"))
    m.add_argument("--c", type=float)
    m.add_argument("--nu", type=float)
    m.add_argument("--h", type=float)
    del sv
    return ap


def _load_params(raw: str | None) -> dict:
    if raw is None:
        return {}
    text = Path(raw[1:]).read_text() if raw.startswith("@") else raw
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON parameters: {exc}") from None
    if not isinstance(doc, dict):
        raise ValueError("JSON parameters must be an object")
    return doc


def main(argv: list[str] | None = None) -> int:
    with _structured_log():
        return _main(argv)


def _main(argv: list[str] | None) -> int:
    ap = _parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        params = _load_params(ns.params)
        skip = {"command", "params", "output", "format"}
        for key, val in vars(ns).items():
            if key not in skip and val is not None:
                params[key] = val
        config = RunConfig(ns.command, params, ns.output, ns.format)
        text = run(config)
    except specfun.ConvergenceError as exc:
        log.error("convergence failure: %s", exc)
        return EXIT_CONVERGENCE
    except (ValueError, OSError, TypeError, OverflowError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INVALID
    if not config.output:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
