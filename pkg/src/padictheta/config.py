"""Pipeline configuration read from TOML.

Grammar (all keys required unless a default is shown)::

    [algebra]   a, b               rationals as strings, e.g. "-2"
    [order]     basis              four quaternions "t,x,y,z"
                alpha              quaternion "t,x,y,z"
    [unit]      gamma              quaternion "t,x,y,z"
    [padic]     p, seed            integers
                precision = 12
    [[phi]]     coeff, lattice     lattice is "order" or "conjugate"
    [run]       bound, table1_D, table2_D, window_D = 0, support_primes = [],
                jside_D = [], jside_nmax = 1
    [lift]      level, k, nmax, discriminants, reference, claims   (optional)
    [sturm]     weight, level                                     (optional)
"""

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import tomli

from .quaternion import parse_coords

__all__ = ["ConfigError", "PipelineConfig", "load_config", "default_config_path"]


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    a: Fraction
    b: Fraction
    order_basis: list
    alpha: list
    gamma: list
    p: int
    seed: int
    precision: int
    phi: list
    bound: int
    table1_D: list
    table2_D: list
    window_D: int = 0
    support_primes: list = field(default_factory=list)
    jside_D: list = field(default_factory=list)
    jside_nmax: int = 1
    lift: dict = field(default_factory=dict)
    sturm: dict = field(default_factory=dict)
    source: str = ""


def default_config_path():
    return str(resources.files("padictheta") / "configs" / "gkz_p7.toml")


def _get(tbl, key, where, kind=None, default=...):
    if key not in tbl:
        if default is ...:
            raise ConfigError(f"{where}: missing key {key!r}")
        return default
    val = tbl[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__ if isinstance(kind, type) else kind}, got {val!r}")
    return val


def _rational(text, where):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: bad rational {text!r}") from exc


def _quat(text, where):
    try:
        return parse_coords(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _int_list(tbl, key, where, default=...):
    vals = _get(tbl, key, where, list, default)
    if not all(isinstance(x, int) for x in vals):
        raise ConfigError(f"{where}.{key}: expected a list of integers")
    return list(vals)


def load_config(path=None, text=None):
    if text is None:
        path = path or default_config_path()
        with open(path, "rb") as fh:
            raw = fh.read().decode("utf-8")
    else:
        raw = text
    try:
        data = tomli.loads(raw)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path or '<string>'}: {exc}") from exc

    alg = _get(data, "algebra", "config", dict)
    order = _get(data, "order", "config", dict)
    unit = _get(data, "unit", "config", dict)
    padic = _get(data, "padic", "config", dict)
    run = _get(data, "run", "config", dict)
    phi_raw = _get(data, "phi", "config", list)

    basis = _get(order, "basis", "order", list)
    if len(basis) != 4:
        raise ConfigError("order.basis: need exactly 4 quaternions")
    phi = []
    for i, t in enumerate(phi_raw):
        where = f"phi[{i}]"
        coeff = _get(t, "coeff", where, int)
        lat = _get(t, "lattice", where, str)
        if lat not in ("order", "conjugate"):
            raise ConfigError(f"{where}.lattice: expected 'order' or 'conjugate', got {lat!r}")
        phi.append((coeff, lat))

    p = _get(padic, "p", "padic", int)
    if p == 2 or p < 2:
        raise ConfigError("padic.p: need an odd prime")
    cfg = PipelineConfig(
        a=_rational(_get(alg, "a", "algebra"), "algebra.a"),
        b=_rational(_get(alg, "b", "algebra"), "algebra.b"),
        order_basis=[_quat(q, f"order.basis[{i}]") for i, q in enumerate(basis)],
        alpha=_quat(_get(order, "alpha", "order", str), "order.alpha"),
        gamma=_quat(_get(unit, "gamma", "unit", str), "unit.gamma"),
        p=p,
        seed=_get(padic, "seed", "padic", int),
        precision=_get(padic, "precision", "padic", int, 12),
        phi=phi,
        bound=_get(run, "bound", "run", int),
        table1_D=_int_list(run, "table1_D", "run"),
        table2_D=_int_list(run, "table2_D", "run"),
        window_D=_get(run, "window_D", "run", int, 0),
        support_primes=_int_list(run, "support_primes", "run", []),
        jside_D=_int_list(run, "jside_D", "run", []),
        jside_nmax=_get(run, "jside_nmax", "run", int, 1),
        lift=dict(data.get("lift", {})),
        sturm=dict(data.get("sturm", {})),
        source=str(path or "<string>"),
    )
    if cfg.precision < 2:
        raise ConfigError("padic.precision: need at least 2 digits")
    return cfg
