"""Plain-text run configuration.

The format is INI (``configparser``) with a fixed set of sections and keys;
unknown sections or keys are rejected.  Numbers may be written as simple
arithmetic expressions in ``pi`` (``pi/4``, ``2*pi/3``, ``-1.5e-3``).  Lists
are comma separated; pairs inside a list use a colon (``0:1, pi:2``).
All angles are in radians.

Example::

    [params]
    alpha = pi/4
    c0 = 1

    [measure]
    atoms = 0:1, pi/2:1
    arcs = pi:3*pi/2

    [sample]
    kind = grid
    xmin = -5
    xmax = 5
    n = 101
"""
from __future__ import annotations

import ast
import configparser
import math
import operator
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

_OPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
    ast.USub: operator.neg, ast.UAdd: operator.pos,
}
_NAMES = {"pi": math.pi}
_FUNCS = {"sqrt": math.sqrt}


def eval_number(text: str) -> float:
    """Evaluate a numeric expression built from literals, ``pi``, + - * / ** and sqrt()."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ConfigError(f"unsupported expression {text!r}")

    try:
        return float(ev(tree))
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise ConfigError(f"cannot evaluate {text!r}: {exc}") from exc


def _flist(text):
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    return [eval_number(p) for p in parts]


def _plist(text):
    out = []
    for p in text.replace(";", ",").split(","):
        if not p.strip():
            continue
        if ":" not in p:
            raise ConfigError(f"expected a:b pair, got {p.strip()!r}")
        a, b = p.split(":", 1)
        out.append((eval_number(a), eval_number(b)))
    return out


def _int(text):
    v = eval_number(text)
    if v != int(v):
        raise ConfigError(f"expected an integer, got {text!r}")
    return int(v)


def _str(text):
    return text.strip()


SCHEMA = {
    "params": {"alpha": (eval_number, math.pi / 4), "c0": (eval_number, 1.0), "N": (_int, 3)},
    "measure": {"atoms": (_plist, []), "arcs": (_plist, []), "arc_density": (eval_number, 1.0)},
    "planes": {"angles": (_flist, None), "gammas": (_flist, None), "weights": (_flist, None)},
    "profile": {"angles": (_flist, None), "sigma": (_flist, None), "lambda0": (eval_number, 1.0)},
    "cone": {"r_max": (eval_number, 400.0), "tol": (eval_number, 1e-11), "target_c": (_str, "raw"),
             "n": (_int, 201)},
    "sample": {"kind": (_str, "grid"), "xmin": (eval_number, -5.0), "xmax": (eval_number, 5.0),
               "ymin": (eval_number, None), "ymax": (eval_number, None), "n": (_int, 101),
               "points": (_plist, []), "count": (_int, 100), "radius": (eval_number, 10.0)},
    "solve": {"k": (_int, 3), "half_width": (eval_number, 20.0), "h": (eval_number, 0.1),
              "residual_tol": (eval_number, 1e-10), "max_iters": (_int, 50),
              "initial": (_str, "sub"), "phase": (eval_number, 0.0)},
    "verify": {"seed": (_int, 0), "n_measures": (_int, 100), "n_points": (_int, 100),
               "radius": (eval_number, 50.0), "radii": (_flist, [25.0, 50.0, 100.0, 200.0, 400.0]),
               "n_angles": (_int, 64), "ks": (_flist, [2.0, 3.0]), "half_width": (eval_number, 20.0),
               "h": (eval_number, 0.1)},
    "figures": {"lambda": (eval_number, 1.0), "half_width": (eval_number, 6.0), "n": (_int, 121),
                "r_max": (eval_number, 50.0), "png": (_int, 1)},
}


@dataclass
class RunConfig:
    """Parsed configuration: ``sections[name][key]`` with defaults filled in."""

    sections: dict = field(default_factory=dict)
    present: set = field(default_factory=set)

    def __getitem__(self, name):
        return self.sections[name]

    def has(self, name):
        return name in self.present

    def params(self):
        from .params import make_params
        p = self.sections["params"]
        try:
            return make_params(p["alpha"], p["c0"], p["N"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def measure(self):
        from .subsolution import SphereMeasure
        m = self.sections["measure"]
        if not m["atoms"] and not m["arcs"]:
            raise ConfigError("[measure] needs atoms or arcs")
        try:
            return SphereMeasure.from_angles(m["atoms"], m["arcs"], m["arc_density"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def plane_spec(self):
        from .eikonal import PlaneSpec
        s = self.sections["planes"]
        params = self.params()
        if s["angles"] is None:
            raise ConfigError("[planes] needs angles")
        ang = np.array(s["angles"])
        try:
            if s["weights"] is not None:
                if s["gammas"] is not None:
                    raise ConfigError("[planes] takes gammas or weights, not both")
                return PlaneSpec.from_weights(np.column_stack([np.cos(ang), np.sin(ang)]),
                                              _same_len(s["weights"], ang, "weights"), params)
            g = None if s["gammas"] is None else _same_len(s["gammas"], ang, "gammas")
            return PlaneSpec.from_angles(ang, params, g)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def profile(self):
        from .eikonal import ProfileN3
        s = self.sections["profile"]
        if s["angles"] is None or s["sigma"] is None:
            raise ConfigError("[profile] needs angles and sigma")
        try:
            return ProfileN3(np.array(s["angles"]), tuple(int(v) for v in s["sigma"]), self.params())
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def samples(self):
        """Sample points, shape (n, 2), from the [sample] section."""
        s = self.sections["sample"]
        kind = s["kind"]
        if kind == "points":
            if not s["points"]:
                raise ConfigError("[sample] kind = points needs points")
            return np.array(s["points"], dtype=float)
        if kind == "grid":
            ymin = s["xmin"] if s["ymin"] is None else s["ymin"]
            ymax = s["xmax"] if s["ymax"] is None else s["ymax"]
            if s["n"] < 2:
                raise ConfigError("grid needs n >= 2")
            x = np.linspace(s["xmin"], s["xmax"], s["n"])
            y = np.linspace(ymin, ymax, s["n"])
            X, Y = np.meshgrid(x, y, indexing="ij")
            return np.column_stack([X.ravel(), Y.ravel()])
        if kind == "random":
            rng = np.random.default_rng(self.sections["verify"]["seed"])
            r = s["radius"] * np.sqrt(rng.uniform(size=s["count"]))
            th = rng.uniform(0, 2 * math.pi, size=s["count"])
            return np.column_stack([r * np.cos(th), r * np.sin(th)])
        raise ConfigError(f"unknown sample kind {kind!r}")


def _same_len(vals, ang, name):
    if len(vals) != len(ang):
        raise ConfigError(f"[planes] {name} must have one entry per angle")
    return np.array(vals)


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    out = RunConfig()
    for name, keys in SCHEMA.items():
        out.sections[name] = {k: (list(d) if isinstance(d, list) else d) for k, (_, d) in keys.items()}
    for name in cp.sections():
        if name not in SCHEMA:
            raise ConfigError(f"unknown section [{name}]")
        out.present.add(name)
        for key, raw in cp.items(name):
            if key not in SCHEMA[name]:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            conv = SCHEMA[name][key][0]
            out.sections[name][key] = conv(raw)
    return out


def load_config(path) -> RunConfig:
    if path is None:
        return parse_config("")
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
