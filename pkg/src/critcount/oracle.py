"""Closed-form harmonic solutions and their critical points.

For the Laplace coefficient family the Dirichlet solution is a finite
Fourier series u = Re f(z) with f(z) = a0 + b0 log z + sum(alpha_k z^k +
beta_k z^-k).  Critical points of u are the zeros of f', located here as
companion-matrix eigenvalues of an equivalent polynomial and classified
by multiplicity.  This path shares nothing with the finite element
pipeline, which is what makes it usable as a cross-check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryProfile
from .errors import LoopThroughZeroError

INTERIOR = "INTERIOR"
BOUNDARY_CRITICAL = "BOUNDARY_CRITICAL"


@dataclass(frozen=True)
class HarmonicRepresentation:
    domain_kind: str  # "disk" or "annulus"
    radii: tuple[float, ...]
    a0: float
    b0: float  # coefficient of log|z|; zero on a disk
    alpha: tuple[complex, ...]  # alpha[i] multiplies z^(i+1)
    beta: tuple[complex, ...]  # beta[i] multiplies z^-(i+1); zeros on a disk

    @property
    def degree(self) -> int:
        return len(self.alpha)


def disk_harmonic(profile: BoundaryProfile, radius: float) -> HarmonicRepresentation:
    """Harmonic extension of the profile from the circle |z| = radius."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    c, s = profile._padded()
    k_max = profile.degree
    alpha = [
        complex(c[k] / radius**k, -(s[k] / radius**k)) for k in range(1, k_max + 1)
    ]
    rep = HarmonicRepresentation("disk", (float(radius),), float(c[0]), 0.0, tuple(alpha), tuple([0j] * k_max))
    _check_boundary_reproduction(rep, profile, inner_value=None)
    return rep


def annulus_harmonic(
    profile: BoundaryProfile, inner_radius: float, outer_radius: float, inner_value: float
) -> HarmonicRepresentation:
    """Harmonic function equal to the profile on |z| = b and constant on |z| = a."""
    a, b = inner_radius, outer_radius
    if not 0 < a < b:
        raise ValueError("radii must satisfy 0 < a < b")
    c, s = profile._padded()
    k_max = profile.degree
    b0 = (float(c[0]) - inner_value) / math.log(b / a)
    a0 = inner_value - b0 * math.log(a)
    alpha, beta = [], []
    for k in range(1, k_max + 1):
        # mode k must vanish on the inner circle and match the data on the outer
        denom = b**k - a ** (2 * k) * b ** (-k)
        ak = c[k] / denom
        ck = s[k] / denom
        alpha.append(complex(ak, -ck))
        beta.append(complex(-(a ** (2 * k)) * ak, a ** (2 * k) * ck))
    rep = HarmonicRepresentation("annulus", (float(a), float(b)), a0, b0, tuple(alpha), tuple(beta))
    _check_boundary_reproduction(rep, profile, inner_value)
    return rep


def _check_boundary_reproduction(
    rep: HarmonicRepresentation, profile: BoundaryProfile, inner_value: float | None
) -> None:
    theta = np.linspace(0.0, 2.0 * math.pi, 257)[:-1]
    scale = 1.0 + float(np.max(np.abs(profile.value(theta))))
    outer = rep.radii[-1]
    pts = np.column_stack([outer * np.cos(theta), outer * np.sin(theta)])
    values, _ = eval_harmonic(rep, pts)
    if np.max(np.abs(values - profile.value(theta))) > 1e-10 * scale:
        raise ValueError("harmonic representation fails to reproduce the outer data")
    if inner_value is not None:
        inner = rep.radii[0]
        pts = np.column_stack([inner * np.cos(theta), inner * np.sin(theta)])
        values, _ = eval_harmonic(rep, pts)
        if np.max(np.abs(values - inner_value)) > 1e-10 * scale:
            raise ValueError("harmonic representation fails to reproduce the inner value")


def _f_prime(rep: HarmonicRepresentation, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    if rep.b0 != 0.0:
        out = out + rep.b0 / z
    for i, ak in enumerate(rep.alpha):
        k = i + 1
        if ak != 0:
            out = out + k * ak * z ** (k - 1)
    for i, bk in enumerate(rep.beta):
        k = i + 1
        if bk != 0:
            out = out - k * bk * z ** (-k - 1)
    return out


def eval_harmonic(rep: HarmonicRepresentation, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and gradients of u = Re f at an (n, 2) array of points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    z = pts[:, 0] + 1j * pts[:, 1]
    f = np.full(z.shape, complex(rep.a0), dtype=complex)
    if rep.b0 != 0.0:
        f = f + rep.b0 * np.log(z)
    for i, ak in enumerate(rep.alpha):
        if ak != 0:
            f = f + ak * z ** (i + 1)
    for i, bk in enumerate(rep.beta):
        if bk != 0:
            f = f + bk * z ** (-(i + 1))
    fp = _f_prime(rep, z)
    grads = np.column_stack([fp.real, -fp.imag])
    return f.real, grads


def critical_polynomial(rep: HarmonicRepresentation) -> np.ndarray:
    """Coefficients (highest power first) of a polynomial whose roots away
    from z = 0 are exactly the zeros of f'.

    On a disk f' is itself a polynomial.  On an annulus f' is multiplied
    by z^(K+1), which is harmless because z = 0 lies outside the domain.
    """
    k_max = rep.degree
    if rep.domain_kind == "disk":
        coeffs = np.zeros(max(k_max, 1), dtype=complex)
        for i, ak in enumerate(rep.alpha):
            k = i + 1
            coeffs[k_max - (k - 1) - 1] = k * ak
        return coeffs
    deg = 2 * k_max
    coeffs = np.zeros(deg + 1, dtype=complex)
    coeffs[deg - k_max] = rep.b0
    for i, ak in enumerate(rep.alpha):
        k = i + 1
        coeffs[deg - (k_max + k)] = k * ak
    for i, bk in enumerate(rep.beta):
        k = i + 1
        coeffs[deg - (k_max - k)] = -k * bk
    return coeffs


@dataclass(frozen=True)
class OracleCriticalPoint:
    x: float
    y: float
    multiplicity: int
    location: str  # INTERIOR or BOUNDARY_CRITICAL


@dataclass(frozen=True)
class OracleReport:
    rep: HarmonicRepresentation
    interior: tuple[OracleCriticalPoint, ...]
    boundary: tuple[OracleCriticalPoint, ...]

    @property
    def sum_multiplicity(self) -> int:
        return sum(p.multiplicity for p in self.interior)

    def to_json(self) -> str:
        payload = {
            "domain": {"kind": self.rep.domain_kind, "radii": list(self.rep.radii)},
            "coefficients": {
                "a0": self.rep.a0,
                "b0": self.rep.b0,
                "alpha": [[z.real, z.imag] for z in self.rep.alpha],
                "beta": [[z.real, z.imag] for z in self.rep.beta],
            },
            "interior": [
                {"x": p.x, "y": p.y, "multiplicity": p.multiplicity} for p in self.interior
            ],
            "boundary": [
                {"x": p.x, "y": p.y, "multiplicity": p.multiplicity} for p in self.boundary
            ],
            "sum_multiplicity": self.sum_multiplicity,
        }
        return json.dumps(payload, indent=2)


def _polynomial_roots(coeffs: np.ndarray) -> list[tuple[complex, int]]:
    """Roots with multiplicities.

    Leading/trailing near-zero coefficients are trimmed first: trailing
    zeros are an exact root at the origin of known multiplicity, and
    trimming keeps the companion matrix well conditioned.  Remaining
    roots get one Newton polish step and are merged by proximity.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size == 0:
        return []
    scale = float(np.max(np.abs(coeffs)))
    if scale == 0.0:
        return []
    keep = np.abs(coeffs) > 1e-12 * scale
    first = int(np.argmax(keep))
    last = len(coeffs) - 1 - int(np.argmax(keep[::-1]))
    zero_mult = len(coeffs) - 1 - last
    trimmed = coeffs[first : last + 1]

    clusters: list[tuple[complex, int]] = []
    if zero_mult > 0:
        clusters.append((0j, zero_mult))
    if trimmed.size > 1:
        roots = np.roots(trimmed)
        deriv = np.polyder(np.poly1d(trimmed))
        polished = []
        for r in roots:
            dp = deriv(r)
            if abs(dp) > 1e-14 * scale:
                r = r - np.polyval(trimmed, r) / dp
            polished.append(r)
        clusters.extend(_cluster_roots(polished, tol=1e-8))
    return clusters


def _cluster_roots(roots: list[complex], tol: float) -> list[tuple[complex, int]]:
    remaining = sorted(roots, key=lambda z: (z.real, z.imag))
    groups: list[list[complex]] = []
    for r in remaining:
        placed = False
        for g in groups:
            if any(abs(r - other) <= tol for other in g):
                g.append(r)
                placed = True
                break
        if not placed:
            groups.append([r])
    # single-linkage closure: merge groups that came within tol of each other
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(abs(p - q) <= tol for p in groups[i] for q in groups[j]):
                    groups[i].extend(groups.pop(j))
                    merged = True
                    break
            if merged:
                break
    out = []
    for g in groups:
        center = sum(g) / len(g)
        out.append((center, len(g)))
    out.sort(key=lambda cm: (cm[0].real, cm[0].imag))
    return out


def oracle_critical_points(
    rep: HarmonicRepresentation, boundary_tol: float = 1e-8
) -> OracleReport:
    """Critical points of the closed-form solution, split into interior
    points and points within boundary_tol of a boundary circle."""
    coeffs = critical_polynomial(rep)
    interior, boundary = [], []
    for z, mult in _polynomial_roots(coeffs):
        r = abs(z)
        if rep.domain_kind == "disk":
            (radius,) = rep.radii
            if r < radius - boundary_tol:
                interior.append(OracleCriticalPoint(z.real, z.imag, mult, INTERIOR))
            elif r <= radius + boundary_tol:
                boundary.append(OracleCriticalPoint(z.real, z.imag, mult, BOUNDARY_CRITICAL))
        else:
            a, b = rep.radii
            if a + boundary_tol < r < b - boundary_tol:
                interior.append(OracleCriticalPoint(z.real, z.imag, mult, INTERIOR))
            elif abs(r - a) <= boundary_tol or abs(r - b) <= boundary_tol:
                boundary.append(OracleCriticalPoint(z.real, z.imag, mult, BOUNDARY_CRITICAL))
    return OracleReport(rep, tuple(interior), tuple(boundary))


def argument_principle_count(rep: HarmonicRepresentation, samples: int = 8192) -> int:
    """Number of zeros of f' inside the domain, counted with multiplicity,
    from the winding of f' along the boundary circles.

    Only valid when no zero of f' lies on a boundary circle.
    """
    theta = 2.0 * math.pi * np.arange(samples) / samples

    def winding(radius: float) -> float:
        z = radius * np.exp(1j * theta)
        w = _f_prime(rep, z)
        mags = np.abs(w)
        if np.min(mags) <= 1e-12 * np.max(mags):
            raise LoopThroughZeroError("f' vanishes on the contour")
        ang = np.angle(w)
        d = np.diff(np.concatenate([ang, ang[:1]]))
        d = (d + math.pi) % (2.0 * math.pi) - math.pi
        return float(np.sum(d) / (2.0 * math.pi))

    if rep.domain_kind == "disk":
        total = winding(rep.radii[0])
    else:
        a, b = rep.radii
        total = winding(b) - winding(a)
    count = int(round(total))
    if abs(total - count) > 0.25:
        raise LoopThroughZeroError(
            f"boundary winding {total} is not close to an integer; "
            "a zero of f' sits on or near a contour"
        )
    return count
