"""Metric, orientation and duality conventions for flat 2+1 space-time.

Vectors are stored with contravariant components.  Space-time arrays have
length 3 (index 0 is time), spatial arrays have length 2 and are indexed
1, 2 in the formulas below (0, 1 in numpy).

The metric signature is (+, -, -), so for a spatial velocity ``v`` the
proper-time radicand is ``1 + v.v = 1 - |v|^2``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import SuperluminalVelocity


@dataclass(frozen=True)
class Convention:
    """Single source of sign truth.

    ``eps2`` is the value of the spatial symbol eps_12, ``eps3`` the value of
    eps_012 (both with lowered indices).  ``sgn_g`` is the sign flag used in
    the planar Dixon momentum; it stands for the sign of the determinant of
    the four-dimensional metric, hence the default of -1.
    """

    metric: tuple[int, int, int] = (1, -1, -1)
    eps2: int = 1
    eps3: int = 1
    sgn_g: int = -1

    def __post_init__(self):
        metric = tuple(int(m) for m in self.metric)
        object.__setattr__(self, "metric", metric)
        if len(metric) != 3 or metric[0] != 1 or any(m not in (1, -1) for m in metric):
            raise ValueError(f"metric must be (+1, +-1, +-1), got {self.metric}")
        for name in ("eps2", "eps3", "sgn_g"):
            if getattr(self, name) not in (1, -1):
                raise ValueError(f"{name} must be +1 or -1")

    @property
    def g3(self) -> np.ndarray:
        return np.asarray(self.metric, dtype=float)

    @property
    def g2(self) -> np.ndarray:
        return np.asarray(self.metric[1:], dtype=float)

    def replace(self, **changes) -> "Convention":
        data = asdict(self)
        data.update(changes)
        return Convention(**data)

    def to_json(self) -> str:
        return json.dumps(
            {"metric": list(self.metric), "eps2": self.eps2, "eps3": self.eps3, "sgn_g": self.sgn_g}
        )

    @classmethod
    def from_dict(cls, data: dict) -> "Convention":
        return cls(
            metric=tuple(data.get("metric", (1, -1, -1))),
            eps2=int(data.get("eps2", 1)),
            eps3=int(data.get("eps3", 1)),
            sgn_g=int(data.get("sgn_g", -1)),
        )

    @classmethod
    def from_json(cls, text: str) -> "Convention":
        return cls.from_dict(json.loads(text))


DEFAULT = Convention()


def _diag(conv: Convention, n: int) -> np.ndarray:
    if n == 3:
        return conv.g3
    if n == 2:
        return conv.g2
    raise ValueError(f"only 2- and 3-component vectors are supported, got {n}")


def lower(a, conv: Convention = DEFAULT) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return _diag(conv, a.shape[-1]) * a


def raise_index(a, conv: Convention = DEFAULT) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    # diagonal metric with entries +-1 is its own inverse
    return _diag(conv, a.shape[-1]) * a


def metric_dot(a, b, conv: Convention = DEFAULT):
    """g_ab a^a b^b; works on stacked vectors along the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError("metric_dot needs vectors of equal dimension")
    return np.sum(_diag(conv, a.shape[-1]) * a * b, axis=-1)


def levi_civita2(conv: Convention = DEFAULT) -> np.ndarray:
    """eps_ab with lowered indices."""
    return conv.eps2 * np.array([[0.0, 1.0], [-1.0, 0.0]])


def levi_civita3(conv: Convention = DEFAULT) -> np.ndarray:
    """eps_{mu nu lambda} with lowered indices."""
    eps = np.zeros((3, 3, 3))
    for perm in itertools.permutations(range(3)):
        inversions = sum(1 for i, j in itertools.combinations(perm, 2) if i > j)
        eps[perm] = conv.eps3 * (-1) ** inversions
    return eps


def levi_civita3_upper(conv: Convention = DEFAULT) -> np.ndarray:
    g = conv.g3
    return np.einsum("abc,a,b,c->abc", levi_civita3(conv), g, g, g)


def hodge_star_spatial(w, conv: Convention = DEFAULT) -> np.ndarray:
    """(*w)_a = eps_ba w^b; returns covariant components."""
    return np.einsum("ba,...b->...a", levi_civita2(conv), np.asarray(w, dtype=float))


def inverse_hodge_star_spatial(s, conv: Convention = DEFAULT) -> np.ndarray:
    """Contravariant w with hodge_star_spatial(w) == s."""
    # *(*w) = -w for the 2x2 symbol, independent of its sign
    return -hodge_star_spatial(s, conv)


def wedge_scalar(a, b, conv: Convention = DEFAULT):
    """*(a ^ b) = eps_ab a^a b^b, so that *(e1 ^ e2) = eps_12."""
    return np.einsum("ab,...a,...b->...", levi_civita2(conv), np.asarray(a, float), np.asarray(b, float))


def cross3(a, b, conv: Convention = DEFAULT) -> np.ndarray:
    """Space-time cross product, contravariant components.

    (a x b)_mu = eps_{mu nu lambda} a^nu b^lambda, then raised with the metric.
    """
    low = np.einsum("mnl,...n,...l->...m", levi_civita3(conv), np.asarray(a, float), np.asarray(b, float))
    return raise_index(low, conv)


def bivector_inner(a, b, c, d, conv: Convention = DEFAULT):
    """(a ^ b).(c ^ d) = (a.c)(b.d) - (a.d)(b.c)."""
    return metric_dot(a, c, conv) * metric_dot(b, d, conv) - metric_dot(a, d, conv) * metric_dot(b, c, conv)


def lorentz_factor(v, conv: Convention = DEFAULT) -> float:
    """sqrt(1 + v.v), i.e. d(tau)/dt for the worldline (t, x(t))."""
    radicand = 1.0 + float(metric_dot(v, v, conv))
    if radicand <= 0.0:
        raise SuperluminalVelocity(f"1 + v.v = {radicand:.3g} <= 0 for v = {np.asarray(v).tolist()}")
    return float(np.sqrt(radicand))


def star_twice_sign(conv: Convention = DEFAULT) -> int:
    """Sign s with *(*w) = s w when the covector output is reused as components."""
    w = np.array([0.3, -0.7])
    ratio = hodge_star_spatial(hodge_star_spatial(w, conv), conv) / w
    return int(np.sign(ratio[0]))


def as_vec(a, n: int) -> np.ndarray:
    out = np.asarray(a, dtype=float).reshape(-1)
    if out.shape != (n,):
        raise ValueError(f"expected {n} components, got shape {np.shape(a)}")
    return out


__all__ = [
    "Convention",
    "DEFAULT",
    "lower",
    "raise_index",
    "metric_dot",
    "levi_civita2",
    "levi_civita3",
    "levi_civita3_upper",
    "hodge_star_spatial",
    "inverse_hodge_star_spatial",
    "wedge_scalar",
    "cross3",
    "bivector_inner",
    "lorentz_factor",
    "star_twice_sign",
    "as_vec",
]
