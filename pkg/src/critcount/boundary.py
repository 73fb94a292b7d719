"""Trigonometric boundary profiles and their extremum structure.

A profile is a finite cosine/sine series psi(theta).  The extremum count
of psi on the outer circle is what the verification relations compare
against, so locating and classifying every local extremum reliably (or
refusing degenerate profiles) is the whole job of this module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateClassError, DegenerateProfileError


@dataclass(frozen=True)
class BoundaryProfile:
    """psi(theta) = cos_coeffs[0] + sum_k cos_coeffs[k] cos(k theta) + sin_coeffs[k] sin(k theta)."""

    cos_coeffs: tuple[float, ...]
    sin_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        for c in list(self.cos_coeffs) + list(self.sin_coeffs):
            if not math.isfinite(c):
                raise ValueError("profile coefficients must be finite")
        if self.sin_coeffs and self.sin_coeffs[0] != 0.0:
            raise ValueError("sin(0*theta) term is meaningless; sin_coeffs[0] must be 0")

    @property
    def degree(self) -> int:
        k = 0
        for i, c in enumerate(self.cos_coeffs):
            if c != 0.0:
                k = max(k, i)
        for i, c in enumerate(self.sin_coeffs):
            if c != 0.0:
                k = max(k, i)
        return k

    def _padded(self) -> tuple[np.ndarray, np.ndarray]:
        n = max(len(self.cos_coeffs), len(self.sin_coeffs), 1)
        c = np.zeros(n)
        s = np.zeros(n)
        c[: len(self.cos_coeffs)] = self.cos_coeffs
        s[: len(self.sin_coeffs)] = self.sin_coeffs
        return c, s

    def value(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        c, s = self._padded()
        k = np.arange(len(c))
        kt = np.multiply.outer(theta, k)
        return np.cos(kt) @ c + np.sin(kt) @ s

    def derivative(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        c, s = self._padded()
        k = np.arange(len(c))
        kt = np.multiply.outer(theta, k)
        return -np.sin(kt) @ (k * c) + np.cos(kt) @ (k * s)

    def second_derivative(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        c, s = self._padded()
        k = np.arange(len(c))
        kt = np.multiply.outer(theta, k)
        return -np.cos(kt) @ (k * k * c) - np.sin(kt) @ (k * k * s)

    def rotated(self, alpha: float) -> "BoundaryProfile":
        """Profile of theta -> psi(theta - alpha)."""
        c, s = self._padded()
        k = np.arange(len(c))
        ca, sa = np.cos(k * alpha), np.sin(k * alpha)
        return BoundaryProfile(tuple(c * ca - s * sa), tuple(c * sa + s * ca))

    def to_json(self) -> str:
        return json.dumps({"cos": list(self.cos_coeffs), "sin": list(self.sin_coeffs)})

    @staticmethod
    def from_json(text: str) -> "BoundaryProfile":
        data = json.loads(text)
        return BoundaryProfile(tuple(data["cos"]), tuple(data.get("sin", ())))


def eval_profile(profile: BoundaryProfile, theta) -> np.ndarray:
    return profile.value(theta)


@dataclass(frozen=True)
class Extremum:
    theta: float
    value: float
    is_global: bool


@dataclass(frozen=True)
class BoundaryExtremaSummary:
    maxima: tuple[Extremum, ...]
    minima: tuple[Extremum, ...]
    z_min: float  # global minimum value of psi
    z_max: float  # global maximum value of psi
    tol_value: float

    @property
    def n_local_max(self) -> int:
        return len(self.maxima)

    @property
    def n_local_min(self) -> int:
        return len(self.minima)

    @property
    def n_global_max(self) -> int:
        return sum(1 for e in self.maxima if e.is_global)

    @property
    def n_global_min(self) -> int:
        return sum(1 for e in self.minima if e.is_global)

    @property
    def all_extrema_global(self) -> bool:
        return all(e.is_global for e in self.maxima) and all(e.is_global for e in self.minima)


class ScenarioClass(str, Enum):
    SIMPLY_CONNECTED = "SIMPLY_CONNECTED"
    PSI_GE_H = "PSI_GE_H"
    PSI_LE_H = "PSI_LE_H"
    H_BETWEEN = "H_BETWEEN"


def count_extrema(profile: BoundaryProfile, tol_value: float | None = None) -> BoundaryExtremaSummary:
    """Locate all local extrema of psi on the circle and mark the global ones.

    Degenerate profiles (constant, or with a critical point where psi'' also
    vanishes, or with a near-tangent dip of psi' that sampling cannot
    certify) are rejected.
    """
    k_max = profile.degree
    if k_max == 0:
        raise DegenerateProfileError("constant profile has no extremum structure")

    n_samples = 4096 * (k_max + 1)
    theta = 2.0 * math.pi * np.arange(n_samples) / n_samples
    dpsi = profile.derivative(theta)
    if np.any(dpsi == 0.0):
        # avoid exact zeros at sample points so bracketing stays strict
        theta = theta + math.pi / n_samples
        dpsi = profile.derivative(theta)
        if np.any(dpsi == 0.0):
            raise DegenerateProfileError("psi' vanishes on a dense sample set")

    dpsi_scale = float(np.max(np.abs(dpsi)))
    sign = np.sign(dpsi)
    nxt = np.roll(sign, -1)
    crossing = np.nonzero(sign * nxt < 0)[0]
    if crossing.size == 0:
        raise DegenerateProfileError("no sign change of psi' found")

    roots = []
    two_pi = 2.0 * math.pi
    for i in crossing:
        lo = theta[i]
        hi = theta[(i + 1) % n_samples]
        if hi < lo:
            hi += two_pi
        root = brentq(lambda t: float(profile.derivative(t)), lo, hi, xtol=1e-14, rtol=8.9e-16)
        roots.append(root % two_pi)
    roots.sort()

    # a local minimum of |psi'| that does not cross zero hides either a
    # near-double root or nothing; refuse to certify the former
    absd = np.abs(dpsi)
    is_candidate = (absd < 1e-6 * dpsi_scale) & (sign * nxt > 0) & (np.roll(sign, 1) * sign > 0)
    if np.any(is_candidate):
        raise DegenerateProfileError("psi' dips to zero without a certified crossing")

    curv_scale = float(np.max(np.abs(profile.second_derivative(theta))))
    maxima, minima = [], []
    for root in roots:
        curv = float(profile.second_derivative(root))
        if abs(curv) <= 1e-9 * curv_scale:
            raise DegenerateProfileError(f"degenerate critical point of psi at theta={root:.6f}")
        value = float(profile.value(root))
        if curv < 0.0:
            maxima.append((root, value))
        else:
            minima.append((root, value))

    if not maxima or not minima or len(maxima) != len(minima):
        raise DegenerateProfileError("extrema of psi do not alternate")
    merged = sorted([(t, +1) for t, _ in maxima] + [(t, -1) for t, _ in minima])
    for (_, a), (_, b) in zip(merged, merged[1:] + merged[:1]):
        if a == b:
            raise DegenerateProfileError("extrema of psi do not alternate")

    z_max = max(v for _, v in maxima)
    z_min = min(v for _, v in minima)
    if tol_value is None:
        tol_value = 1e-9 * (z_max - z_min)
    maxima_e = tuple(Extremum(t, v, v >= z_max - tol_value) for t, v in maxima)
    minima_e = tuple(Extremum(t, v, v <= z_min + tol_value) for t, v in minima)
    return BoundaryExtremaSummary(maxima_e, minima_e, z_min, z_max, tol_value)


def classify_scenario(
    domain_kind: str,
    summary: BoundaryExtremaSummary,
    inner_value: float | None = None,
) -> ScenarioClass:
    """Decide which family of counting relations governs the scenario."""
    if domain_kind == "disk":
        if inner_value is not None:
            raise ValueError("a disk has no inner boundary value")
        return ScenarioClass.SIMPLY_CONNECTED
    if domain_kind != "annulus":
        raise ValueError(f"unknown domain kind {domain_kind!r}")
    if inner_value is None:
        raise ValueError("an annulus scenario needs the inner boundary value")
    tol = summary.tol_value
    if abs(inner_value - summary.z_min) <= tol or abs(inner_value - summary.z_max) <= tol:
        raise DegenerateClassError(
            f"inner value {inner_value} coincides with an extreme value of psi"
        )
    if inner_value < summary.z_min:
        return ScenarioClass.PSI_GE_H
    if inner_value > summary.z_max:
        return ScenarioClass.PSI_LE_H
    return ScenarioClass.H_BETWEEN
