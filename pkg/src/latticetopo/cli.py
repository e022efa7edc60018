"""Command-line entry point: parameter handling, sweeps and data files.

Every command writes its data files plus manifest.json into --output-dir.
Exit codes: 0 success, 1 configuration error, 2 numerical failure (or a
failed check in `validate`).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
import warnings
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .bloch import LatticeParams, alpha_bar, band_grid, band_path, h_vectors, light_line_flag
from .diracedge import dirac_params_2d, edge_packet_2d, edge_state_1d, tanh_mass
from .errors import DomainError, GapClosedError, LatticeTopoError, ResonanceError
from .latsum1d import oracle_extrapolated_1d, s0_1d, s_pm_1d
from .latsum2d import HONEYCOMB, _auto_real_rings, _auto_recip_rings, default_eta, oracle_direct_2d, s0_2d, s_pm_2d
from .topology import _loop_betas, chern_analytic, chern_numeric, phase_diagram, winding_number

COMMANDS = ("bands1d", "winding", "edge1d", "bands2d", "chern", "phase-diagram", "edge2d", "latsum", "validate", "bench")

SCHEMAS = {
    "bands1d": ["delta", "beta", "re_ap", "im_ap", "re_am", "im_am", "light_line_flag"],
    "bands2d": ["s", "beta_x", "beta_y", "re_ap_shift", "im_ap_shift", "re_am_shift", "im_am_shift"],
    "winding": ["delta", "nu", "min_abs_r"],
    "trajectory": ["delta", "beta", "re_r", "im_r"],
    "phase-diagram": ["kappa_b", "phi", "chern"],
    "edge1d": ["x", "delta_x", "re_psi_a", "im_psi_a", "re_psi_b", "im_psi_b"],
    "edge2d": ["tau", "x", "y", "abs_psi"],
    "chern": ["kappa_b", "phi", "c_analytic", "c_numeric", "re_m_k", "im_m_k", "re_m_kprime", "im_m_kprime"],
    "latsum": ["quantity", "re", "im"],
    "validate": ["module", "check", "status", "seconds", "detail"],
    "bench": ["method", "setting", "terms", "seconds", "abs_error"],
}


class ConfigError(Exception):
    """Invalid command line or config file."""


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def _parse_float(text: str) -> float:
    t = str(text).strip().lower().replace("pi", repr(np.pi))
    try:
        return float(eval(t, {"__builtins__": {}}, {})) if any(c in t for c in "*/") else float(t)
    except Exception as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _parse_complex(text: str) -> complex:
    try:
        return complex(str(text).strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"not a complex number: {text!r}") from exc


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_range(text: str) -> tuple[float, float]:
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ConfigError(f"expected lo:hi, got {text!r}")
    return _parse_float(parts[0]), _parse_float(parts[1])


def _parse_sweep(text: str) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected start:stop:step, got {text!r}")
    lo, hi, step = (_parse_float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ConfigError(f"empty sweep {text!r}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 12)


def _parse_pair(text: str) -> tuple[float, float]:
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated numbers, got {text!r}")
    return _parse_float(parts[0]), _parse_float(parts[1])


@dataclass
class RunConfig:
    """Fully resolved run configuration; defaults are the reference parameter set."""

    command: str = "bands1d"
    alpha_a: float = 2.4
    alpha_b: float = 2.4
    kappa_a: float = 0.01
    kappa_b: float = 0.01
    t2: float = 5e-3
    phi: float = float(np.pi / 2)
    eta: float | None = None
    delta: float = 0.2
    n: int = 400
    delta_sweep: str | None = None
    n_samples: int = 2000
    trajectory: bool = False
    alpha_eval: str | None = None
    x_range: str = "-10:10"
    y_range: str = "-1:1"
    nx: int = 401
    ny: int = 41
    n_per_segment: int = 50
    grid_n: int = 24
    resolution: int = 16
    kappa_b_range: str = "0.005:0.02"
    phi_range: str = "-pi:pi"
    x0: float = 0.5
    y0: float = 0.1
    times: str = "0:20:5"
    dim: int = 1
    alpha: str | None = None
    beta: str = "0.1"
    oracle: bool = False
    only: str | None = None
    output_dir: str = "out"
    format: str = "csv"
    svg: bool = False
    threads: int | None = None
    config: str | None = None

    def params(self, dim: int) -> LatticeParams:
        t2 = self.t2 if dim == 2 else 0.0
        phi = self.phi if dim == 2 else 0.0
        return LatticeParams(self.alpha_a, self.alpha_b, self.kappa_a, self.kappa_b, dim, self.delta, t2, phi, self.eta)


_TYPES = {
    f.name: f.type for f in fields(RunConfig)
}
_PARSERS = {
    "float": _parse_float, "float | None": _parse_float, "int": int, "int | None": int,
    "str": str, "str | None": str, "bool": _parse_bool,
}

_HELP = {
    "alpha_a": "resonance frequency of species A", "alpha_b": "resonance frequency of species B",
    "kappa_a": "coupling of species A", "kappa_b": "coupling of species B",
    "t2": "Haldane amplitude (2D) and edge-packet mass amplitude", "phi": "Haldane phase (accepts pi)",
    "eta": "Ewald parameter for 2D sums (default: automatic)", "delta": "intracell offset (1D)",
    "n": "number of beta points (1D grid)", "delta_sweep": "winding sweep start:stop:step",
    "n_samples": "Brillouin-zone samples for the winding loop", "trajectory": "also write trajectory.csv for sweeps",
    "alpha_eval": "evaluation energy for the Dirac expansion (default alpha_bar)",
    "x_range": "x window lo:hi", "y_range": "y window lo:hi (edge2d)", "nx": "x grid points",
    "ny": "y grid points (edge2d)", "n_per_segment": "points per path segment (bands2d)",
    "grid_n": "FBZ grid for the numeric Chern number (0 skips it)", "resolution": "phase-diagram grid size",
    "kappa_b_range": "phase-diagram kappa_b range lo:hi", "phi_range": "phase-diagram phi range lo:hi",
    "x0": "initial packet width", "y0": "mass-wall width", "times": "packet times start:stop:step",
    "dim": "dimension for latsum", "alpha": "complex energy for latsum/bench (default alpha_bar; bench 2.4)",
    "beta": "momentum: 1D scalar, 2D reduced coordinates u,v (beta = u b1 + v b2)",
    "oracle": "also evaluate the direct-sum oracle (latsum)",
    "only": "validate: run one module or check", "output_dir": "directory for data files",
    "format": "csv or json", "svg": "also write simple SVG plots", "threads": "worker cap (also LATTICETOPO_THREADS)",
    "config": "flat key=value config file; flags win",
}

_COMMAND_OPTIONS = {
    "bands1d": ["delta", "n"],
    "winding": ["delta", "delta_sweep", "n_samples", "trajectory"],
    "edge1d": ["alpha_eval", "x_range", "nx"],
    "bands2d": ["n_per_segment"],
    "chern": ["grid_n"],
    "phase-diagram": ["resolution", "kappa_b_range", "phi_range"],
    "edge2d": ["alpha_eval", "x0", "y0", "times", "x_range", "y_range", "nx", "ny"],
    "latsum": ["dim", "alpha", "beta", "delta", "oracle"],
    "validate": ["only"],
    "bench": ["alpha", "beta"],
}
_COMMON = ["alpha_a", "alpha_b", "kappa_a", "kappa_b", "t2", "phi", "eta", "output_dir", "format", "svg",
           "threads", "config"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latticetopo", description="Band topology of two-species atomic lattices.")
    parser.add_argument("--version", action="version", version=f"latticetopo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        for name in _COMMON + _COMMAND_OPTIONS[cmd]:
            flag = "--" + name.replace("_", "-")
            if _TYPES[name] == "bool":
                p.add_argument(flag, dest=name, action="store_const", const=True, default=argparse.SUPPRESS,
                               help=_HELP[name])
            else:
                p.add_argument(flag, dest=name, default=argparse.SUPPRESS, help=_HELP[name])
    return parser


def read_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; '#' starts a comment; keys may use - or _."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES or key in ("command", "config"):
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    merged: dict = {}
    if "config" in ns:
        merged.update(read_config_file(ns["config"]))
    merged.update(ns)
    cfg = RunConfig(command=command)
    for key, value in merged.items():
        if key == "config":
            cfg.config = value
            continue
        parse = _PARSERS[_TYPES[key]]
        try:
            setattr(cfg, key, parse(value))
        except ValueError as exc:
            raise ConfigError(f"--{key.replace('_', '-')}: {exc}") from exc
    if cfg.format not in ("csv", "json"):
        raise ConfigError("--format must be csv or json")
    for name in ("n", "n_samples", "nx", "ny", "n_per_segment", "resolution"):
        if getattr(cfg, name) < 1:
            raise ConfigError(f"--{name.replace('_', '-')} must be positive")
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError("--threads must be positive")
    return cfg


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Writer:
    """Collects data files and stage timings for one run."""

    def __init__(self, cfg: RunConfig, argv):
        self.cfg = cfg
        self.argv = list(argv)
        self.files: list[dict] = []
        self.stages: dict[str, float] = {}
        os.makedirs(cfg.output_dir, exist_ok=True)

    def table(self, stem: str, schema: str, rows) -> str:
        header = SCHEMAS[schema]
        rows = [[_fmt(v) for v in r] for r in rows]
        if self.cfg.format == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
            text, name = buf.getvalue(), f"{stem}.csv"
        else:
            body = ",\n".join("  [" + ", ".join(_json_cell(c) for c in r) + "]" for r in rows)
            text = '{"columns": ' + json.dumps(header) + ', "rows": [\n' + body + "\n]}\n"
            name = f"{stem}.json"
        path = os.path.join(self.cfg.output_dir, name)
        _atomic_write(path, text)
        self.files.append({"path": name, "rows": len(rows)})
        return path

    def svg(self, name: str, text: str):
        _atomic_write(os.path.join(self.cfg.output_dir, name), text)
        self.files.append({"path": name, "rows": None})

    def stage(self, name: str, seconds: float):
        self.stages[name] = self.stages.get(name, 0.0) + seconds

    def manifest(self, status: str):
        doc = {
            "command": self.cfg.command,
            "argv": self.argv,
            "config": asdict(self.cfg),
            "files": self.files,
            "version": __version__,
            "wall_clock_seconds": self.stages,
            "status": status,
        }
        _atomic_write(os.path.join(self.cfg.output_dir, "manifest.json"), json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _json_cell(text: str) -> str:
    if text in ("nan", "inf", "-inf"):
        return "null"
    try:
        float(text)
        return text
    except ValueError:
        return json.dumps(text)


class _Timer:
    def __init__(self, writer: Writer, name: str):
        self.writer, self.name = writer, name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.writer.stage(self.name, time.perf_counter() - self.t0)
        return False


# ---------------------------------------------------------------------------
# SVG (best effort)
# ---------------------------------------------------------------------------

_SVG_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def svg_lines(series, xlabel: str, ylabel: str, title: str = "", width: int = 640, height: int = 400) -> str:
    """series: list of (x, y, label). NaNs break the polyline."""
    xs = np.concatenate([np.asarray(s[0], float) for s in series])
    ys = np.concatenate([np.asarray(s[1], float) for s in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    x0, x1 = (xs[ok].min(), xs[ok].max()) if ok.any() else (0.0, 1.0)
    y0, y1 = (ys[ok].min(), ys[ok].max()) if ok.any() else (0.0, 1.0)
    x1, y1 = (x1 if x1 > x0 else x0 + 1), (y1 if y1 > y0 else y0 + 1)
    ml, mr, mt, mb = 70, 20, 30, 50

    def px(x):
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr)

    def py(y):
        return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect x="{ml}" y="{mt}" width="{width - ml - mr}" height="{height - mt - mb}" fill="none" stroke="black"/>',
           f'<text x="{width / 2}" y="18" text-anchor="middle">{title}</text>',
           f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">{xlabel}</text>',
           f'<text x="15" y="{height / 2}" transform="rotate(-90 15 {height / 2})" text-anchor="middle">{ylabel}</text>',
           f'<text x="{ml}" y="{height - mb + 15}" text-anchor="middle">{x0:.3g}</text>',
           f'<text x="{width - mr}" y="{height - mb + 15}" text-anchor="middle">{x1:.3g}</text>',
           f'<text x="{ml - 5}" y="{height - mb}" text-anchor="end">{y0:.3g}</text>',
           f'<text x="{ml - 5}" y="{mt + 10}" text-anchor="end">{y1:.3g}</text>']
    for k, (x, y, label) in enumerate(series):
        color = _SVG_COLORS[k % len(_SVG_COLORS)]
        seg = []
        for xv, yv in zip(np.asarray(x, float), np.asarray(y, float)):
            if np.isfinite(xv) and np.isfinite(yv):
                seg.append(f"{px(xv):.1f},{py(yv):.1f}")
            elif seg:
                out.append(f'<polyline fill="none" stroke="{color}" points="{" ".join(seg)}"/>')
                seg = []
        if seg:
            out.append(f'<polyline fill="none" stroke="{color}" points="{" ".join(seg)}"/>')
        out.append(f'<text x="{width - mr - 5}" y="{mt + 15 * (k + 1)}" text-anchor="end" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_heatmap(xs, ys, z, xlabel: str, ylabel: str, title: str = "", width: int = 640, height: int = 400) -> str:
    """z has shape (len(xs), len(ys)); NaN cells are grey."""
    z = np.asarray(z, float)
    finite = z[np.isfinite(z)]
    lo, hi = (finite.min(), finite.max()) if finite.size else (0.0, 1.0)
    hi = hi if hi > lo else lo + 1
    ml, mr, mt, mb = 70, 20, 30, 50
    cw = (width - ml - mr) / len(xs)
    ch = (height - mt - mb) / len(ys)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<text x="{width / 2}" y="18" text-anchor="middle">{title} [{lo:.3g}, {hi:.3g}]</text>',
           f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">{xlabel}</text>',
           f'<text x="15" y="{height / 2}" transform="rotate(-90 15 {height / 2})" text-anchor="middle">{ylabel}</text>']
    for i in range(len(xs)):
        for j in range(len(ys)):
            v = z[i, j]
            if np.isfinite(v):
                t = (v - lo) / (hi - lo)
                color = f"rgb({int(255 * t)},{int(80 + 80 * (1 - abs(2 * t - 1)))},{int(255 * (1 - t))})"
            else:
                color = "#bbbbbb"
            out.append(f'<rect x="{ml + i * cw:.1f}" y="{height - mb - (j + 1) * ch:.1f}" width="{cw + 0.5:.1f}" '
                       f'height="{ch + 0.5:.1f}" fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _workers(cfg: RunConfig):
    return cfg.threads


def _beta_2d(text: str) -> np.ndarray:
    u, v = _parse_pair(text)
    return HONEYCOMB.to_cartesian(u, v)


def cmd_bands1d(cfg: RunConfig, out: Writer) -> int:
    p = cfg.params(1)
    with _Timer(out, "bands"):
        pts = band_grid(p, cfg.n, workers=_workers(cfg))
    rows = [[p.delta, float(q.beta), q.alpha_plus.real, q.alpha_plus.imag, q.alpha_minus.real, q.alpha_minus.imag,
             light_line_flag(p, q.beta)] for q in pts]
    out.table("bands1d", "bands1d", rows)
    if cfg.svg:
        b = [r[1] for r in rows]
        out.svg("bands1d_re.svg", svg_lines([(b, [r[2] for r in rows], "Re a+"), (b, [r[4] for r in rows], "Re a-")],
                                            "beta", "Re alpha", f"delta = {p.delta}"))
        out.svg("bands1d_im.svg", svg_lines([(b, [r[3] for r in rows], "Im a+"), (b, [r[5] for r in rows], "Im a-")],
                                            "beta", "Im alpha", f"delta = {p.delta}"))
    print(f"bands1d: {len(rows)} momenta at delta={p.delta}")
    return 0


def cmd_winding(cfg: RunConfig, out: Writer) -> int:
    deltas = _parse_sweep(cfg.delta_sweep) if cfg.delta_sweep else np.array([cfg.delta])
    rows, traj = [], []
    with _Timer(out, "winding"):
        for d in deltas:
            p = cfg.params(1).replace(delta=float(d))
            try:
                res = winding_number(p, cfg.n_samples, workers=_workers(cfg))
                rows.append([float(d), res.nu, res.min_abs_r])
                r, betas = res.trajectory, res.betas
            except GapClosedError:
                betas = _loop_betas(cfg.n_samples, False)
                h = h_vectors(p, betas, workers=_workers(cfg))
                r = h[1] + 1j * h[2]
                rows.append([float(d), float("nan"), float(np.min(np.abs(r)))])
            if cfg.trajectory or len(deltas) == 1:
                traj.extend([float(d), float(b), z.real, z.imag] for b, z in zip(betas, r))
    out.table("winding", "winding", rows)
    if traj:
        out.table("trajectory", "trajectory", traj)
    if cfg.svg:
        out.svg("winding.svg", svg_lines([([r[0] for r in rows], [r[1] for r in rows], "nu")], "delta", "nu"))
        if traj:
            out.svg("trajectory.svg", svg_lines([([t[2] for t in traj], [t[3] for t in traj], "r")], "Re r", "Im r"))
    for r in rows:
        print(f"delta={r[0]:.6g} nu={_fmt(r[1])} min|r|={r[2]:.3g}")
    return 0


def cmd_edge1d(cfg: RunConfig, out: Writer) -> int:
    lo, hi = _parse_range(cfg.x_range)
    x = np.linspace(lo, hi, cfg.nx)
    ae = None if cfg.alpha_eval is None else _parse_complex(cfg.alpha_eval)
    with _Timer(out, "edge_state"):
        st = edge_state_1d(cfg.params(1), x_grid=x, alpha_eval=ae)
    rows = [[xi, di, a.real, a.imag, b.real, b.imag] for xi, di, a, b in zip(st.x, st.delta_x, st.psi[0], st.psi[1])]
    out.table("edge1d", "edge1d", rows)
    if cfg.svg:
        out.svg("edge1d.svg", svg_lines([(st.x, np.abs(st.psi[0]), "|psi_A|"), (st.x, np.abs(st.psi[1]), "|psi_B|")],
                                        "x", "|psi|"))
    i0 = int(np.argmin(np.abs(st.x)))
    print(f"edge1d: |psi_A| = {abs(st.psi[0][0]):.4g}, {abs(st.psi[0][i0]):.4g}, {abs(st.psi[0][-1]):.4g} "
          f"at x = {st.x[0]:.3g}, {st.x[i0]:.3g}, {st.x[-1]:.3g}")
    return 0


def cmd_bands2d(cfg: RunConfig, out: Writer) -> int:
    p = cfg.params(2)
    with _Timer(out, "bands"):
        s, betas, pts = band_path(p, cfg.n_per_segment, workers=_workers(cfg))
    rows = []
    for sv, b, q in zip(s, betas, pts):
        ap, am = q.alpha_plus - q.h.h0, q.alpha_minus - q.h.h0
        rows.append([sv, b[0], b[1], ap.real, ap.imag, am.real, am.imag])
    out.table("bands2d", "bands2d", rows)
    if cfg.svg:
        out.svg("bands2d_re.svg", svg_lines([(s, [r[3] for r in rows], "Re a+ - h0"), (s, [r[5] for r in rows], "Re a- - h0")],
                                            "path", "Re(alpha - h0)", "G-S-M-K-L"))
        out.svg("bands2d_im.svg", svg_lines([(s, [r[4] for r in rows], "Im a+ - h0"), (s, [r[6] for r in rows], "Im a- - h0")],
                                            "path", "Im(alpha - h0)", "G-S-M-K-L"))
    print(f"bands2d: {len(rows)} path points")
    return 0


def cmd_chern(cfg: RunConfig, out: Writer) -> int:
    p = cfg.params(2)
    with _Timer(out, "chern"):
        res = chern_analytic(p)
        num = chern_numeric(p, cfg.grid_n, workers=_workers(cfg)) if cfg.grid_n else float("nan")
    mk, mkp = res.masses
    out.table("chern", "chern", [[p.kappa_b, p.phi, res.c_analytic, num, mk.real, mk.imag, mkp.real, mkp.imag]])
    print(f"chern: C = {res.c_analytic} (numeric {num:.6g}); m_K = {mk:.6g}, m_K' = {mkp:.6g}")
    return 0


def cmd_phase_diagram(cfg: RunConfig, out: Writer) -> int:
    with _Timer(out, "phase_diagram"):
        ks, phis, c = phase_diagram(cfg.params(2), _parse_range(cfg.kappa_b_range), _parse_range(cfg.phi_range),
                                    cfg.resolution)
    rows = [[k, ph, c[i, j]] for i, k in enumerate(ks) for j, ph in enumerate(phis)]
    out.table("phase_diagram", "phase-diagram", rows)
    if cfg.svg:
        out.svg("phase_diagram.svg", svg_heatmap(ks, phis, c, "kappa_b", "phi", "Chern number"))
    vals, counts = np.unique(c[np.isfinite(c)], return_counts=True)
    print("phase-diagram: " + ", ".join(f"C={int(v)}: {n}" for v, n in zip(vals, counts))
          + f", boundary cells: {int(np.sum(~np.isfinite(c)))}")
    return 0


def cmd_edge2d(cfg: RunConfig, out: Writer) -> int:
    p = cfg.params(2)
    ae = None if cfg.alpha_eval is None else _parse_complex(cfg.alpha_eval)
    with _Timer(out, "dirac_params"):
        d2 = dirac_params_2d(p, alpha_eval=ae)
    xl, xh = _parse_range(cfg.x_range)
    yl, yh = _parse_range(cfg.y_range)
    times = _parse_sweep(cfg.times)
    x, y = np.linspace(xl, xh, cfg.nx), np.linspace(yl, yh, cfg.ny)
    with _Timer(out, "packet"):
        pk = edge_packet_2d(tanh_mass(cfg.t2, cfg.y0), d2.v_f, d2.alpha0, cfg.x0, times, x, y)
    amp = pk.abs()
    rows = [[t, xv, yv, amp[k, i, j]] for k, t in enumerate(times) for i, xv in enumerate(x) for j, yv in enumerate(y)]
    out.table("edge2d", "edge2d", rows)
    if cfg.svg:
        out.svg("edge2d.svg", svg_lines([(x, amp[k].max(axis=1), f"tau={t:g}") for k, t in enumerate(times)],
                                        "x", "max_y |psi|", "chiral edge packet"))
    peaks = [x[int(np.argmax(a.max(axis=1)))] for a in amp]
    print(f"edge2d: v_F = {d2.v_f:.6g}, alpha0 = {d2.alpha0:.6g}; peak x per tau: "
          + ", ".join(f"{t:g}->{px:.3g}" for t, px in zip(times, peaks)))
    return 0


def cmd_latsum(cfg: RunConfig, out: Writer) -> int:
    if cfg.dim not in (1, 2):
        raise ConfigError("--dim must be 1 or 2")
    p = cfg.params(cfg.dim)
    alpha = alpha_bar(p) if cfg.alpha is None else _parse_complex(cfg.alpha)
    rows = []
    with _Timer(out, "sums"):
        if cfg.dim == 1:
            b = _parse_float(cfg.beta)
            vals = {"s_plus": s_pm_1d(alpha, b, p.delta, 1), "s_minus": s_pm_1d(alpha, b, p.delta, -1),
                    "s_zero": s0_1d(alpha, b)}
        else:
            b = _beta_2d(cfg.beta)
            vals = {"s_plus": s_pm_2d(alpha, b, 1, cfg.eta), "s_minus": s_pm_2d(alpha, b, -1, cfg.eta),
                    "s_zero": s0_2d(alpha, b, cfg.eta)}
    if cfg.oracle:
        with _Timer(out, "oracle"):
            if cfg.dim == 1:
                vals["oracle_s_plus"] = oracle_extrapolated_1d(alpha, b, p.delta)
                vals["oracle_s_minus"] = oracle_extrapolated_1d(alpha, -b, p.delta)
                vals["oracle_s_zero"] = oracle_extrapolated_1d(alpha, b, None)
            else:
                vals["oracle_s_plus"] = oracle_direct_2d(alpha, b, 1)
                vals["oracle_s_minus"] = oracle_direct_2d(alpha, b, -1)
                vals["oracle_s_zero"] = oracle_direct_2d(alpha, b, 0)
    for k, v in vals.items():
        rows.append([k, v.real, v.imag])
        print(f"{k} = {v.real:.17g} {v.imag:+.17g}j")
    out.table("latsum", "latsum", rows)
    return 0


def cmd_validate(cfg: RunConfig, out: Writer) -> int:
    from .validation import run_checks

    def report(r):
        print(f"{r.status} {r.module}: {r.name} | {r.detail} ({r.seconds:.1f}s)", flush=True)

    with _Timer(out, "checks"):
        results = run_checks(only=cfg.only, report=report)
    if not results:
        raise ConfigError(f"--only {cfg.only!r} matches no module or check")
    rows = [[r.module, r.name, r.status, round(r.seconds, 3), r.detail] for r in results]
    out.table("validate", "validate", rows)
    failed = [r for r in results if r.passed is False]
    print(f"validate: {len(results) - len(failed)} of {len(results)} passed or informational, {len(failed)} failed")
    return 2 if failed else 0


def _time_min(fn, repeats: int = 5):
    best, val = np.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        val = fn()
        best = min(best, time.perf_counter() - t0)
    return best, val


def bench_rows(alpha: complex, beta: np.ndarray, target: float = 1e-6):
    """Timing rows for the Ewald path and the damped direct sum, and the speed-up at `target`."""
    eta = default_eta(alpha)
    ref = s_pm_2d(alpha, beta, 1, eta, realspace_shells=16, reciprocal_shells=24)
    rows = []
    ewald_time = None
    for shells in range(1, 16):
        t, v = _time_min(lambda: s_pm_2d(alpha, beta, 1, eta, shells, shells))
        err = abs(v - ref)
        terms = 2 * (1 + 3 * shells * (shells + 1))
        rows.append(["ewald", f"eta={eta:.4g} shells={shells}", terms, t, err])
        if err < target:
            ewald_time = t
            break
    for shells in (8, 12):
        # fixed eta = 1, for comparison with the automatic choice
        t, v = _time_min(lambda: s_pm_2d(alpha, beta, 1, 1.0, shells, shells), repeats=2)
        rows.append(["ewald", f"eta=1 shells={shells}", 2 * (1 + 3 * shells * (shells + 1)), t, abs(v - ref)])
    t_auto, v_auto = _time_min(lambda: s_pm_2d(alpha, beta, 1))
    n_real = _auto_real_rings(complex(alpha), eta, float(np.linalg.norm(HONEYCOMB.delta_vec)))
    n_recip = _auto_recip_rings(complex(alpha), eta)
    terms = (1 + 3 * n_real * (n_real + 1)) + (1 + 3 * n_recip * (n_recip + 1))
    rows.append(["ewald", f"eta={eta:.4g} automatic shells={n_real}/{n_recip}", terms, t_auto, abs(v_auto - ref)])
    direct_time = None
    for ratios in ((2, 3, 4), (3, 4, 5, 6), (4, 5, 6, 7, 8), (5, 6, 7, 8, 9, 10)):
        t0 = time.perf_counter()
        v, n_terms = oracle_direct_2d(alpha, beta, 1, ratios=ratios, return_terms=True)
        t = time.perf_counter() - t0
        err = abs(v - ref)
        rows.append(["direct_gauss", "ratios=" + "/".join(map(str, ratios)), n_terms, t, err])
        if err < target:
            direct_time = t
            break
    speedup = direct_time / ewald_time if (direct_time and ewald_time) else float("nan")
    return rows, speedup, ewald_time, direct_time


def cmd_bench(cfg: RunConfig, out: Writer) -> int:
    alpha = 2.4 if cfg.alpha is None else _parse_complex(cfg.alpha)
    beta = _beta_2d(cfg.beta if cfg.beta != RunConfig.beta else "0.3,0.15")
    with _Timer(out, "bench"):
        rows, speedup, te, td = bench_rows(alpha, beta)
    out.table("bench", "bench", rows)
    for r in rows:
        print(f"{r[0]:13s} {r[1]:28s} terms={r[2]:>9} time={r[3] * 1e3:10.3f} ms  error={r[4]:.3g}")
    print(f"time to 1e-6: Ewald {te}, direct {td}; speed-up {speedup:.1f}x")
    return 0


HANDLERS = {
    "bands1d": cmd_bands1d, "winding": cmd_winding, "edge1d": cmd_edge1d, "bands2d": cmd_bands2d,
    "chern": cmd_chern, "phase-diagram": cmd_phase_diagram, "edge2d": cmd_edge2d, "latsum": cmd_latsum,
    "validate": cmd_validate, "bench": cmd_bench,
}


def run(cfg: RunConfig, argv=()) -> int:
    """Execute a resolved configuration; returns the exit code."""
    if cfg.threads is not None:
        os.environ["LATTICETOPO_THREADS"] = str(cfg.threads)
    try:
        out = Writer(cfg, argv)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return 1
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            code = HANDLERS[cfg.command](cfg, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        out.manifest("config-error")
        return 1
    except ResonanceError as exc:
        # a singular momentum met during the run is a numerical failure, not a bad config
        print(f"numerical failure (ResonanceError): {exc}", file=sys.stderr)
        out.manifest("numerical-failure")
        return 2
    except DomainError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        out.manifest("config-error")
        return 1
    except (LatticeTopoError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        out.manifest("numerical-failure")
        return 2
    out.manifest("ok" if code == 0 else "checks-failed")
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = resolve_config(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("error", UserWarning)
            cfg.params(2 if cfg.command in ("bands2d", "chern", "phase-diagram", "edge2d") else 1)
    except (ConfigError, DomainError, UserWarning) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    return run(cfg, argv)


if __name__ == "__main__":
    sys.exit(main())
