"""Four-component wealth vectors and basis rescaling.

Components are ordinary capital ``kr``, ordinary labour ``lr``, space
capital ``ks`` and human capital ``ls``.  Positive entries are revenues,
negative entries are costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CSV_COLUMNS = ("kr", "lr", "ks", "ls")


@dataclass(frozen=True)
class WealthVector:
    kr: float = 0.0
    lr: float = 0.0
    ks: float = 0.0
    ls: float = 0.0

    @property
    def m(self) -> float:
        """Production magnitude, sqrt(kr^2 + lr^2)."""
        return math.hypot(self.kr, self.lr)

    @property
    def t(self) -> float:
        """Time-axis magnitude, sqrt(ks^2 + ls^2)."""
        return math.hypot(self.ks, self.ls)

    @property
    def capital(self) -> float:
        return self.kr + self.ks

    @property
    def labour(self) -> float:
        return self.lr + self.ls

    def __add__(self, other: WealthVector) -> WealthVector:
        return WealthVector(self.kr + other.kr, self.lr + other.lr,
                            self.ks + other.ks, self.ls + other.ls)

    def __sub__(self, other: WealthVector) -> WealthVector:
        return self + (-other)

    def __neg__(self) -> WealthVector:
        return WealthVector(-self.kr, -self.lr, -self.ks, -self.ls)

    def __mul__(self, c: float) -> WealthVector:
        return WealthVector(self.kr * c, self.lr * c, self.ks * c, self.ls * c)

    __rmul__ = __mul__

    def as_array(self) -> np.ndarray:
        return np.array([self.kr, self.lr, self.ks, self.ls], dtype=float)

    @classmethod
    def from_array(cls, a) -> WealthVector:
        kr, lr, ks, ls = (float(x) for x in a)
        return cls(kr, lr, ks, ls)

    def to_dict(self) -> dict:
        return {"kr": self.kr, "lr": self.lr, "ks": self.ks, "ls": self.ls}

    @classmethod
    def from_dict(cls, d: dict) -> WealthVector:
        return cls(float(d.get("kr", 0.0)), float(d.get("lr", 0.0)),
                   float(d.get("ks", 0.0)), float(d.get("ls", 0.0)))


ZERO = WealthVector()


def magnitudes(v: WealthVector) -> tuple[float, float]:
    """Return ``(m, t)`` for a wealth vector."""
    return v.m, v.t


@dataclass(frozen=True)
class BasisScale:
    """Multipliers for the kr axis, the lr axis and the (ks, ls) time axis."""

    r_scale: float = 1.0
    w_scale: float = 1.0
    rho_scale: float = 1.0

    def __post_init__(self):
        for name in ("r_scale", "w_scale", "rho_scale"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    def compose(self, other: BasisScale) -> BasisScale:
        return BasisScale(self.r_scale * other.r_scale,
                          self.w_scale * other.w_scale,
                          self.rho_scale * other.rho_scale)


IDENTITY_SCALE = BasisScale()


def rescale(v: WealthVector, s: BasisScale) -> WealthVector:
    return WealthVector(v.kr * s.r_scale, v.lr * s.w_scale,
                        v.ks * s.rho_scale, v.ls * s.rho_scale)
