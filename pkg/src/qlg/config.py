"""
Flat ``key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment. Every problem in a file is
collected and reported together with its line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .errors import ConfigError

EXPERIMENTS = ("dirac1d", "dispersion", "bcs", "bdg", "superfluid", "verify", "trotter-compare")
PAIRING_MODES = ("uniform", "local", "global_mean")
INITIAL_FIELDS = ("random", "gaussian", "plane", "uniform")
FORMATS = ("csv", "json")
U64_MAX = 2**64 - 1

REQUIRED = {
    "dirac1d": ("m_tau", "steps"),
    "dispersion": ("m_tau",),
    "bcs": ("eps", "delta", "steps"),
    "bdg": ("eps", "delta", "steps"),
    "superfluid": ("steps",),
    "verify": (),
    "trotter-compare": (),
}


@dataclass
class SimConfig:
    experiment: str
    sites: int = 64
    steps: int = 0
    m_tau: float | None = None
    k_points: int | None = None
    k_ell: float = 0.5
    eps: float | None = None
    delta: complex | None = None
    lam: float = 0.0
    tau: float = 1.0
    qubits: int = 4
    pairs: tuple[tuple[int, int], ...] = ((1, 2), (3, 4))
    sign: str = "plus"
    pairing_mode: str = "global_mean"
    initial: str = "random"
    width: float = 8.0
    k_index: int = 0
    seed: int = 0
    output: str = "."
    format: str = "csv"
    snapshot: bool = True

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, complex):
                v = {"re": v.real, "im": v.imag}
            elif f.name == "pairs":
                v = [list(p) for p in v]
            out[f.name] = v
        return out


def _parse_int(text: str) -> int:
    return int(text, 0)


def _parse_float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("not finite")
    return v


def _parse_complex(text: str) -> complex:
    v = complex(text.replace(" ", "").replace("i", "j"))
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise ValueError("not finite")
    return v


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _parse_pairs(text: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        a, b = chunk.split("-")
        pairs.append((int(a), int(b)))
    if not pairs:
        raise ValueError("empty pair list")
    return tuple(pairs)


def _choice(options):
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


# key -> (attribute, parser)
KEYS = {
    "experiment": ("experiment", _choice(EXPERIMENTS)),
    "sites": ("sites", _parse_int),
    "steps": ("steps", _parse_int),
    "m_tau": ("m_tau", _parse_float),
    "k_points": ("k_points", _parse_int),
    "k_ell": ("k_ell", _parse_float),
    "eps": ("eps", _parse_float),
    "delta": ("delta", _parse_complex),
    "lambda": ("lam", _parse_float),
    "tau": ("tau", _parse_float),
    "E_tau": ("E_tau", _parse_float),
    "qubits": ("qubits", _parse_int),
    "pairs": ("pairs", _parse_pairs),
    "sign": ("sign", _choice(("plus", "minus"))),
    "pairing_mode": ("pairing_mode", _choice(PAIRING_MODES)),
    "initial": ("initial", _choice(INITIAL_FIELDS)),
    "width": ("width", _parse_float),
    "k_index": ("k_index", _parse_int),
    "seed": ("seed", _parse_int),
    "output": ("output", str),
    "format": ("format", _choice(FORMATS)),
    "snapshot": ("snapshot", _parse_bool),
}


def parse_config(text: str, overrides: dict | None = None) -> SimConfig:
    """Parse and validate a config; raises :class:`ConfigError` listing every violation.

    ``overrides`` maps config keys to already-typed values (from the CLI) and
    takes precedence over the file.
    """
    diags: list[str] = []
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            diags.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in KEYS:
            diags.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in lines:
            diags.append(f"line {lineno}: duplicate key {key!r} (first set on line {lines[key]})")
            continue
        attr, parser = KEYS[key]
        try:
            values[attr] = parser(val)
        except ValueError as exc:
            diags.append(f"line {lineno}: invalid value for {key!r}: {val!r} ({exc})")
            continue
        lines[key] = lineno
    for key, val in (overrides or {}).items():
        attr = KEYS[key][0]
        values[attr] = val
        lines[key] = 0

    def where(key: str) -> str:
        n = lines.get(key)
        if n is None:
            return "default"
        return "command line" if n == 0 else f"line {n}"

    if "experiment" not in values:
        diags.append("missing required key 'experiment'")
    exp = values.pop("experiment", None)
    present = {KEYS_BY_ATTR[a] for a in values}
    for key in REQUIRED.get(exp, ()):
        if key not in present:
            diags.append(f"missing required key {key!r} for experiment {exp!r}")
    if exp == "superfluid" and values.get("pairing_mode", "global_mean") == "uniform" and "delta" not in values:
        diags.append("missing required key 'delta' for uniform pairing mode")
    if exp == "superfluid" and values.get("pairing_mode", "global_mean") != "uniform" and "lam" not in values:
        diags.append("missing required key 'lambda' for self-consistent pairing")

    e_tau = values.pop("E_tau", None)
    # domain checks still run without an experiment so every violation is reported
    cfg = SimConfig(experiment=exp or "verify", **values)

    def bad(key: str, msg: str):
        diags.append(f"{where(key)}: {msg}")

    if cfg.m_tau is not None and not 0.0 <= cfg.m_tau <= 1.0:
        bad("m_tau", f"m_tau ∉ [0,1] (got {cfg.m_tau})")
    if cfg.sites < 1:
        bad("sites", f"sites must be >= 1 (got {cfg.sites})")
    if cfg.steps < 0:
        bad("steps", f"steps must be >= 0 (got {cfg.steps})")
    if cfg.k_points is not None and cfg.k_points < 1:
        bad("k_points", f"k_points must be >= 1 (got {cfg.k_points})")
    if not -math.pi < cfg.k_ell <= math.pi:
        bad("k_ell", f"k_ell ∉ (-pi,pi] (got {cfg.k_ell})")
    if cfg.tau <= 0:
        bad("tau", f"tau must be > 0 (got {cfg.tau})")
    if not 2 <= cfg.qubits <= 12:
        bad("qubits", f"qubits ∉ [2,12] (got {cfg.qubits})")
    if not 0 <= cfg.k_index < cfg.sites:
        bad("k_index", f"k_index ∉ [0,sites) (got {cfg.k_index})")
    if cfg.width <= 0:
        bad("width", f"width must be > 0 (got {cfg.width})")
    if not 0 <= cfg.seed <= U64_MAX:
        bad("seed", f"seed must be an unsigned 64-bit integer (got {cfg.seed})")
    for a, b in cfg.pairs:
        if a == b or not (1 <= a <= cfg.qubits and 1 <= b <= cfg.qubits):
            bad("pairs", f"pair {a}-{b} invalid for {cfg.qubits} qubits")
    flat = [m for p in cfg.pairs for m in p]
    if len(set(flat)) != len(flat):
        bad("pairs", "pairs must be disjoint")

    if exp in ("bcs", "bdg") and cfg.eps is not None and cfg.delta is not None:
        energy = math.hypot(cfg.eps, abs(cfg.delta))
        if energy == 0.0:
            bad("eps", "E = sqrt(eps^2 + |delta|^2) must be > 0")
        elif e_tau is not None:
            if "tau" in lines:
                bad("E_tau", "set either tau or E_tau, not both")
            elif not 0.0 <= e_tau <= 1.0:
                bad("E_tau", f"E_tau ∉ [0,1] (got {e_tau})")
            else:
                cfg.tau = e_tau / energy
        elif energy * cfg.tau > 1.0:
            bad("tau", f"E_tau = {energy * cfg.tau:.6g} ∉ [0,1]")
    elif e_tau is not None:
        bad("E_tau", "E_tau only applies to bcs and bdg experiments")
    if exp == "superfluid" and cfg.pairing_mode == "uniform" and cfg.delta is not None:
        if abs(cfg.delta) * cfg.tau > 1.0:
            bad("delta", f"|delta| tau ∉ [0,1] (got {abs(cfg.delta) * cfg.tau:.6g})")
    if diags:
        raise ConfigError(diags)
    return cfg


KEYS_BY_ATTR = {attr: key for key, (attr, _) in KEYS.items()}
