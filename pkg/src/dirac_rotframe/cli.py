"""Command-line front end: flat key = value configs in, CSV or JSON tables out.

    dirac-rotframe <subcommand> --config run.cfg [--out path] [--format csv|json]
                   [--set key=value ...]

Exit status: 0 on success, 1 for usage / configuration / domain errors, 2 for
numerical failures.  Output is written to a temporary file and renamed, so
nothing partial is left behind on error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import (Branch, DomainError, FieldSign, NormalizedConfig, NumericalError,
                   PhysicalInput, normalize_input)
from .spectrum import (StateKind, characteristic_poly, lambda_param, series_vs_root_error,
                       singular_momentum, singular_roots, singular_series)

SUBCOMMANDS = ("solve", "expand", "state", "observables", "timeseries", "frames", "sweep")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


# --------------------------------------------------------------------------
# configuration


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int(text: str) -> int:
    v = float(text)
    if not v.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _complex(text: str) -> complex:
    return complex(text.strip().replace(" ", "").replace("i", "j"))


def _choice(*options):
    def parse(text: str) -> str:
        t = text.strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return t
    return parse


NORMALIZED_KEYS = ("e0", "h")
PHYSICAL_KEYS = ("wave_amplitude_H", "static_field_H3", "frequency_Omega")

# key -> (parser, default); None means "no default"
SCHEMA = {
    "e0": (float, None),
    "h": (float, None),
    "omega_n": (float, 1e-6),
    "wave_amplitude_H": (float, None),
    "static_field_H3": (float, None),
    "frequency_Omega": (float, None),
    "mass_m": (float, None),
    "charge_e": (float, None),
    "epsilon": (_int, 1),
    "branch": (_choice("plus", "minus"), "plus"),
    "d_sign": (_choice("negative", "positive"), "negative"),
    "kind": (_choice("ground", "excited1", "excited2"), "ground"),
    "t_start": (float, 0.0),
    "t_end": (float, None),
    "samples": (_int, 101),
    "z": (float, 0.0),
    "c_g": (_complex, 1.0 + 0j),
    "c_e2": (_complex, 0j),
    "tau": (float, 0.0),
    "lambda_len": (float, 0.0),
    "gamma": (float, None),
    "v": (float, 0.0),
    "n": (_int, 0),
    "eta": (str, "0"),
    "events": (_int, 1000),
    "seed": (_int, 12345),
    "quadrature": (_bool, True),
    "grid_nodes": (_int, 256),
    "sweep_param": (_choice("e0", "h", "omega_n"), "e0"),
    "sweep_start": (float, 0.5),
    "sweep_stop": (float, 2.0),
    "sweep_steps": (_int, 1501),
    "sweep_output": (_choice("average_energy", "singular_root", "series_error",
                             "beat_frequency", "frequency_ng", "resonance_residual",
                             "g_factor", "overlap_log"), "average_energy"),
    "format": (_choice("csv", "json"), "csv"),
    "out": (str, None),
}


@dataclass(frozen=True)
class RunConfig:
    values: dict = field(default_factory=dict)
    physical: bool = False

    def __getitem__(self, key):
        return self.values[key]

    def normalized(self) -> NormalizedConfig:
        v = self.values
        if self.physical:
            kw = {k: v[k] for k in PHYSICAL_KEYS}
            for k in ("mass_m", "charge_e"):
                if v[k] is not None:
                    kw[k] = v[k]
            inp = PhysicalInput(propagation_sign_epsilon=v["epsilon"], **kw)
            cfg = normalize_input(inp, branch=Branch[v["branch"].upper()])
            return cfg
        return NormalizedConfig(e0=v["e0"], h=v["h"], omega_n=v["omega_n"], epsilon=v["epsilon"],
                                branch=Branch[v["branch"].upper()],
                                d_sign=FieldSign[v["d_sign"].upper()])

    @property
    def kind(self) -> StateKind:
        return StateKind.parse(self.values["kind"])

    def echo(self) -> list[tuple[str, str]]:
        """Effective values in schema order, formatted as they would be parsed back."""
        out = []
        for key in SCHEMA:
            val = self.values.get(key)
            if val is None or key in ("out", "format"):
                continue
            out.append((key, _format_scalar(val)))
        return out


def parse_config_text(text: str, overrides: list[str] | None = None) -> RunConfig:
    raw: dict[str, tuple[str, int | str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {line.strip()!r}", lineno)
        key, val = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        raw[key] = (val, lineno)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"--set: unknown key {key!r}")
        raw[key] = (val, "--set")
    return _validate(raw)


def _validate(raw) -> RunConfig:
    values = {}
    for key, (parser, default) in SCHEMA.items():
        if key in raw:
            text, where = raw[key]
            try:
                values[key] = parser(text)
            except ValueError as exc:
                line = where if isinstance(where, int) else None
                raise ConfigError(f"{key}: {exc}", line) from None
        else:
            values[key] = default
    has_norm = any(k in raw for k in NORMALIZED_KEYS)
    has_phys = any(k in raw for k in PHYSICAL_KEYS)
    required = (f"normalized block ({', '.join(NORMALIZED_KEYS)}) or physical block "
                f"({', '.join(PHYSICAL_KEYS)})")
    if has_norm and has_phys:
        key = next(k for k in PHYSICAL_KEYS if k in raw)
        line = raw[key][1]
        raise ConfigError("both normalized and physical parameter blocks present",
                          line if isinstance(line, int) else None)
    if not (has_norm or has_phys):
        raise ConfigError(f"missing required keys: {required}")
    block = NORMALIZED_KEYS if has_norm else PHYSICAL_KEYS
    missing = [k for k in block if k not in raw]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    if values["samples"] < 2:
        raise ConfigError("samples must be >= 2", _line(raw, "samples"))
    if values["sweep_steps"] < 1:
        raise ConfigError("sweep_steps must be >= 1", _line(raw, "sweep_steps"))
    if values["epsilon"] not in (1, -1):
        raise ConfigError("epsilon must be +1 or -1", _line(raw, "epsilon"))
    return RunConfig(values=values, physical=has_phys)


def _line(raw, key):
    where = raw.get(key, (None, None))[1]
    return where if isinstance(where, int) else None


def load_config(source: str, overrides: list[str] | None = None) -> RunConfig:
    """Parse a config from a file path, or from inline text if it contains '='.

    Inline text may separate entries with ';' as well as newlines.
    """
    if "=" in source and not os.path.exists(source):
        return parse_config_text(source.replace(";", "\n"), overrides)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {source!r}: {exc.strerror}") from None
    return parse_config_text(text, overrides)


# --------------------------------------------------------------------------
# tables


def _format_scalar(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


@dataclass(frozen=True)
class EmittedTable:
    columns: list[str]
    rows: list[list[float]]
    metadata: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("table is not rectangular")


def render(table: EmittedTable, fmt: str) -> str:
    if fmt == "json":
        obj = {"metadata": dict(table.metadata), "columns": table.columns,
               "rows": [[_json_value(v) for v in r] for r in table.rows]}
        return json.dumps(obj, indent=1, allow_nan=True) + "\n"
    buf = io.StringIO()
    for k, v in table.metadata:
        buf.write(f"# {k} = {v}\n")
    buf.write(",".join(table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join(_format_scalar(v) for v in r) + "\n")
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def emit(table: EmittedTable, fmt: str = "csv", path: str | None = None) -> None:
    text = render(table, fmt)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# subcommands


def _metadata(cfg: RunConfig, sub: str, extra=()) -> list[tuple[str, str]]:
    return [("tool", "dirac-rotframe"), ("version", __version__), ("subcommand", sub),
            *cfg.echo(), *extra]


def run_solve(cfg: RunConfig) -> EmittedTable:
    nc = cfg.normalized()
    kind = cfg.kind
    p = singular_momentum(kind, nc)
    lam = lambda_param(kind, p, nc)
    roots = singular_roots(kind, nc)
    chosen = roots.branch_root(nc.branch)
    poly = characteristic_poly(kind, nc, lam)
    rows = []
    for i, r in enumerate(roots.roots):
        rows.append([i, r.real, r.imag, roots.residuals[i], int(i in roots.singular_pair),
                     int(r == chosen)])
    meta = [("p_tilde", _format_scalar(p)), ("lambda", _format_scalar(lam)),
            ("coeffs", " ".join(_format_scalar(c) for c in poly.coeffs))]
    return EmittedTable(["index", "re", "im", "residual", "singular", "selected"], rows,
                        _metadata(cfg, "solve", meta))


def run_expand(cfg: RunConfig) -> EmittedTable:
    nc = cfg.normalized()
    rows = []
    for br in (Branch.PLUS, Branch.MINUS):
        c = nc.replace(branch=br)
        s = singular_series(cfg.kind, c)
        exact = singular_roots(cfg.kind, c).branch_root(br)
        err = series_vs_root_error(cfg.kind, c)
        ratio = err / c.h ** 3 if c.h > 0 else 0.0
        rows.append([br.sign, nc.h, s.c0, s.c1, s.c2, s(c.h), exact.real, err, ratio])
    return EmittedTable(["branch", "h", "c0", "c1", "c2", "series", "exact", "error",
                         "error_over_h3"], rows, _metadata(cfg, "expand"))


def run_state(cfg: RunConfig) -> EmittedTable:
    from .states import (GridSpec, build_state, default_sample_points, dirac_residual,
                         quadrature_norm)

    nc = cfg.normalized()
    st = build_state(cfg.kind, nc)
    grid = GridSpec(nodes=cfg["grid_nodes"])
    t = cfg["t_start"]
    env = st.envelope
    row = [st.energy_e.real, st.energy_tilde, st.p_tilde, st.lam, env.d, env.d1.real, env.d1.imag,
           env.d2.real, env.d2.imag, st.log_norm, st.n, st.degree]
    cols = ["energy_e", "energy_tilde", "p_tilde", "lambda", "d", "d1_re", "d1_im", "d2_re",
            "d2_im", "log_norm", "n", "degree"]
    if cfg["quadrature"]:
        row += [quadrature_norm(st, "rotating", t, cfg["z"], grid),
                quadrature_norm(st, "initial", t, cfg["z"], grid)]
        cols += ["norm_rotating", "norm_initial"]
    pts = default_sample_points(st, t)
    row.append(dirac_residual(st, pts, t, fd_step=1e-3))
    cols.append("dirac_residual")
    return EmittedTable(cols, [row], _metadata(cfg, "state"))


def run_observables(cfg: RunConfig) -> EmittedTable:
    from . import observables as ob
    from .states import GridSpec, build_state

    nc = cfg.normalized()
    st = build_state(cfg.kind, nc)
    t, z = cfg["t_start"], cfg["z"]
    p = ob.average_momentum(st, t, z)
    s = ob.average_spin(st, t, z)
    closed = [ob.average_energy(st), *map(float, p), *map(float, s)]
    names = ["energy", "p1", "p2", "p3", "s1", "s2", "s3"]
    cols, row = ["t", "z"], [t, z]
    if cfg["quadrature"]:
        grid = GridSpec(nodes=cfg["grid_nodes"])
        quad = [ob.observable_quadrature(st, "hamiltonian", t, z, grid),
                *ob.momentum_quadrature(st, t, z, grid=grid), *ob.spin_quadrature(st, t, z, grid)]
        for nm, c, q in zip(names, closed, quad):
            cols += [f"{nm}_closed", f"{nm}_quad", f"{nm}_diff"]
            row += [c, q, q - c]
    else:
        for nm, c in zip(names, closed):
            cols.append(f"{nm}_closed")
            row.append(c)
    return EmittedTable(cols, [row], _metadata(cfg, "observables"))


def _time_grid(cfg: RunConfig, nc: NormalizedConfig) -> np.ndarray:
    from .observables import beat_frequency

    t_end = cfg["t_end"]
    if t_end is None:
        w = beat_frequency(nc)
        t_end = cfg["t_start"] + (2 * math.pi / w if w > 0 else 2 * math.pi / nc.omega_n)
    if not t_end > cfg["t_start"]:
        raise DomainError("t_end must exceed t_start")
    return np.linspace(cfg["t_start"], t_end, cfg["samples"])


def run_timeseries(cfg: RunConfig) -> EmittedTable:
    from . import observables as ob
    from .states import build_state

    nc = cfg.normalized()
    times = _time_grid(cfg, nc)
    z = cfg["z"]
    c_g, c_e2 = cfg["c_g"], cfg["c_e2"]
    if c_e2 == 0:
        if abs(abs(c_g) - 1.0) > 1e-12:
            raise DomainError("with c_e2 = 0 the ground coefficient must have |c_g| = 1")
        st = build_state(cfg.kind, nc)
        spin = ob.spin_series(st, times, z)
    else:
        if cfg.kind is not StateKind.GROUND:
            raise DomainError("mixed traces combine the ground and second excited states; "
                              "set kind = ground")
        mix = ob.make_mixed_state(nc, c_g, c_e2)
        st = mix.ground
        spin = ob.mixed_spin_series(mix, times, z)
    mom = ob.momentum_series(st, times, z)
    pauli = ob.pauli_series(nc.omega_m, nc.omega_n, times)
    cols = ["t", "s1", "s2", "s3", "p1", "p2", "p3", "pauli_s1", "pauli_s2", "pauli_s3"]
    data = [times, spin.values["s1"], spin.values["s2"], spin.values["s3"], mom.values["p1"],
            mom.values["p2"], mom.values["p3"], pauli.values["s1"], pauli.values["s2"],
            pauli.values["s3"]]
    rows = [list(r) for r in zip(*(a.tolist() for a in data))]
    meta = [("beat_frequency", _format_scalar(ob.beat_frequency(nc)))]
    return EmittedTable(cols, rows, _metadata(cfg, "timeseries", meta))


def run_frames(cfg: RunConfig) -> EmittedTable:
    from . import frames as fr
    from .observables import beat_frequency
    from .states import build_state

    nc = cfg.normalized()
    st = build_state(StateKind.GROUND, nc)
    vz = fr.fermion_vz(nc)
    gamma = cfg["gamma"] if cfg["gamma"] is not None else 1.0 / vz
    params = fr.TransformParams(tau=cfg["tau"], lambda_len=cfg["lambda_len"], gamma=gamma,
                                v=cfg["v"], n=cfg["n"])
    Omega, k = nc.omega_n, nc.k
    E_t, p_t = st.energy_tilde, st.p_tilde
    E, p = fr.lab_from_rotating(E_t, p_t, params, vz, Omega, k)
    Ep, pp = fr.primed_parameters(E, p, params, vz, Omega, k)
    rng = np.random.default_rng(cfg["seed"])
    m = cfg["events"]
    ev = fr.FrameEvent(phi=rng.uniform(-math.pi, math.pi, m), r=rng.uniform(0, 1, m),
                       z=rng.uniform(-1, 1, m), t=rng.uniform(-1, 1, m))
    phase = fr.phase_identity_residual(E, p, params, ev, Omega, k, v_z=vz)
    solved = fr.solve_con0(params, nc, "lambda_len", eta=cfg["eta"], v_z=vz) \
        if params.tau != 0 else params
    row = [E, p, float(fr.quantization_residual(E, p, params)), Ep, pp,
           float(np.max(np.abs(phase))), fr.con0_residual(params, nc, cfg["eta"], vz),
           solved.lambda_len, vz, beat_frequency(nc), fr.frequency_ng(nc)]
    cols = ["E_lab", "p_lab", "quantization_residual", "E_primed", "p_primed",
            "phase_residual_max", "con0_residual", "con0_lambda", "v_z", "beat_frequency",
            "frequency_ng"]
    return EmittedTable(cols, [row], _metadata(cfg, "frames"))


def _sweep_value(name: str, kind: StateKind, nc: NormalizedConfig) -> float:
    from . import frames as fr
    from . import observables as ob
    from .states import build_state

    if name == "average_energy":
        return ob.average_energy(build_state(kind, nc))
    if name == "singular_root":
        return float(singular_roots(kind, nc).branch_root(nc.branch).real)
    if name == "series_error":
        return series_vs_root_error(kind, nc)
    if name == "beat_frequency":
        return ob.beat_frequency(nc)
    if name == "frequency_ng":
        return fr.frequency_ng(nc)
    if name == "resonance_residual":
        return ob.resonance_check(nc).residual
    if name == "g_factor":
        return ob.resonance_check(nc).g_factor
    if name == "overlap_log":
        a = build_state(StateKind.GROUND, nc.replace(branch=Branch.PLUS))
        b = build_state(StateKind.GROUND, nc.replace(branch=Branch.MINUS))
        return ob.overlap_factor(a, b)[0]
    raise DomainError(f"unknown sweep output {name!r}")


def run_sweep(cfg: RunConfig) -> EmittedTable:
    nc = cfg.normalized()
    param, output = cfg["sweep_param"], cfg["sweep_output"]
    lo, hi, steps = cfg["sweep_start"], cfg["sweep_stop"], cfg["sweep_steps"]
    if not hi >= lo:
        raise DomainError("empty sweep range")
    grid = np.linspace(lo, hi, steps)
    vals = [_sweep_value(output, cfg.kind, nc.replace(**{param: float(x)})) for x in grid]
    rows = [[i, float(x), v] for i, (x, v) in enumerate(zip(grid, vals))]
    i_min = int(np.argmin(vals))
    meta = [("argmin_index", str(i_min)), ("argmin_" + param, _format_scalar(float(grid[i_min]))),
            ("min_" + output, _format_scalar(vals[i_min]))]
    return EmittedTable(["index", param, output], rows, _metadata(cfg, "sweep", meta))


RUNNERS = {"solve": run_solve, "expand": run_expand, "state": run_state,
           "observables": run_observables, "timeseries": run_timeseries,
           "frames": run_frames, "sweep": run_sweep}


def run(config: RunConfig, subcommand: str) -> EmittedTable:
    if subcommand not in RUNNERS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    return RUNNERS[subcommand](config)


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dirac-rotframe", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="config file path or inline 'k = v' text")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
        if name == "sweep":
            p.add_argument("param", nargs="?", help="swept parameter (e0, h, omega_n)")
            p.add_argument("range", nargs="?", help="start..stop")
            p.add_argument("steps", nargs="?", help="number of points")
    return ap


def _sweep_overrides(args) -> list[str]:
    out = []
    if getattr(args, "param", None):
        out.append(f"sweep_param={args.param}")
    if getattr(args, "range", None):
        if ".." not in args.range:
            raise ConfigError(f"sweep range must look like start..stop, got {args.range!r}")
        lo, hi = args.range.split("..", 1)
        out += [f"sweep_start={lo}", f"sweep_stop={hi}"]
    if getattr(args, "steps", None):
        out.append(f"sweep_steps={args.steps}")
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = _sweep_overrides(args) + list(args.set)
        cfg = load_config(args.config, overrides)
        fmt = args.format or cfg["format"]
        out = args.out if args.out is not None else cfg["out"]
        table = run(cfg, args.subcommand)
        emit(table, fmt, out)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
