# ptsturm - Licence MIT (voir LICENSE.md)
"""Coefficients admissibles f, contrôle des hypothèses, poids p et w.

f est 2π-périodique, impair, anti-périodique (f(x+π) = −f(x)), strictement
positif sur (0, π) et normalisé par f′(0) = 2/π. Le paramètre ε doit rester
dans (0, π/2).
"""

from __future__ import annotations

import math
from typing import Any, Mapping, Optional, Sequence

import numpy as np
from scipy import integrate, interpolate

from .data_models import (
    FPRIME0,
    KIND_CUSTOM,
    KIND_PIECEWISE_LINEAR,
    KIND_SINE,
    CoefficientProfile,
    DerivedWeights,
)
from .validation import SEVERITY_ALERT, CheckResult, ValidationReport

DELTA_MIN = 1e-8
NORMALIZATION_TOL = 1e-12
HYPOTHESIS_TOL = 1e-10
SLOPE_TOL = 1e-5
SLOPE_STEP = 1e-6


class ProfileError(ValueError):
    """Coefficient f ou paramètre ε hors des hypothèses."""


class WeightsError(RuntimeError):
    """Quadrature du facteur intégrant p impossible (point trop proche d'une extrémité)."""


# -------------------------
# Construction
# -------------------------

def check_eps(eps: Any) -> float:
    try:
        value = float(eps)
    except (TypeError, ValueError):
        raise ProfileError(f"ε doit être un réel (reçu : {eps!r}).") from None
    if not (0.0 < value < math.pi / 2):
        raise ProfileError(f"ε = {value} hors du domaine admissible (0, π/2).")
    return value


def eps_from_tilde(eps_tilde: float) -> float:
    """ε de l'équation normalisée à partir du ε̃ de iε̃(sin x·u′)′ + iu′."""
    return math.pi * float(eps_tilde) / 2.0


def make_sine(eps: float) -> CoefficientProfile:
    eps = check_eps(eps)
    return CoefficientProfile(
        kind=KIND_SINE,
        eps=eps,
        f_half=lambda x: FPRIME0 * np.sin(x),
        fprime_half=lambda x: FPRIME0 * np.cos(x),
        fprime0=FPRIME0,
        fprimePi=-FPRIME0,
        fsecond0=0.0,
        fsecondPi=0.0,
    )


def _tent(x: Any) -> Any:
    x = np.asarray(x, dtype=float)
    return np.where(x <= math.pi / 2, FPRIME0 * x, FPRIME0 * (math.pi - x))


def _tent_slope(x: Any) -> Any:
    x = np.asarray(x, dtype=float)
    return np.where(x <= math.pi / 2, FPRIME0, -FPRIME0)


def make_piecewise_linear(eps: float) -> CoefficientProfile:
    eps = check_eps(eps)
    return CoefficientProfile(
        kind=KIND_PIECEWISE_LINEAR,
        eps=eps,
        f_half=_tent,
        fprime_half=_tent_slope,
        fprime0=FPRIME0,
        fprimePi=-FPRIME0,
        fsecond0=0.0,
        fsecondPi=0.0,
        breakpoints=(-math.pi / 2, math.pi / 2),
    )


def _samples_array(samples: Any) -> np.ndarray:
    try:
        arr = np.asarray(samples, dtype=float)
    except (TypeError, ValueError):
        raise ProfileError("Les échantillons doivent être une table de couples (x, f(x)).") from None
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 4:
        raise ProfileError("Les échantillons doivent être une table d'au moins 4 couples (x, f(x)).")
    if not np.all(np.isfinite(arr)):
        raise ProfileError("Échantillons non finis.")
    arr = arr[np.argsort(arr[:, 0])]
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise ProfileError("Abscisses d'échantillons dupliquées.")
    if arr[0, 0] < 0 or arr[-1, 0] > math.pi:
        raise ProfileError("Les échantillons doivent couvrir (0, π) et seulement (0, π).")
    return arr


def _with_endpoints(arr: np.ndarray) -> np.ndarray:
    rows = []
    if arr[0, 0] > 0:
        rows.append([0.0, 0.0])
    rows.extend(arr.tolist())
    if arr[-1, 0] < math.pi:
        rows.append([math.pi, 0.0])
    out = np.asarray(rows, dtype=float)
    if abs(out[0, 1]) > HYPOTHESIS_TOL or abs(out[-1, 1]) > HYPOTHESIS_TOL:
        raise ProfileError("f doit s'annuler en 0 et en π.")
    out[0, 1] = 0.0
    out[-1, 1] = 0.0
    return out


def _interpolant(xs: np.ndarray, ys: np.ndarray, fprime0: float, fprimePi: float):
    """Hermite cubique à pentes PCHIP (sans dépassement), pentes imposées aux deux extrémités."""
    slopes = interpolate.PchipInterpolator(xs, ys).derivative()(xs)
    slopes[0], slopes[-1] = fprime0, fprimePi
    hermite = interpolate.CubicHermiteSpline(xs, ys, slopes)
    grid = np.linspace(0.0, math.pi, 4097)[1:-1]
    if np.all(hermite(grid) > 0):
        return hermite
    raise ProfileError("L'interpolation des échantillons n'est pas strictement positive sur (0, π).")


def make_custom(samples: Any, eps: float,
                endpoint_derivatives: Mapping[str, Optional[float]]) -> CoefficientProfile:
    eps = check_eps(eps)
    arr = _samples_array(samples)
    interior = arr[(arr[:, 0] > 0) & (arr[:, 0] < math.pi)]
    if np.any(interior[:, 1] <= 0):
        bad = interior[interior[:, 1] <= 0][0]
        raise ProfileError(f"Valeur non positive à l'intérieur de (0, π) : f({bad[0]:.6g}) = {bad[1]:.6g}.")

    fprime0 = endpoint_derivatives.get("fprime0")
    if fprime0 is None:
        raise ProfileError("Dérivée f′(0) absente.")
    fprime0 = float(fprime0)
    if abs(fprime0 - FPRIME0) > NORMALIZATION_TOL:
        raise ProfileError(f"f′(0) = {fprime0} : la normalisation impose f′(0) = 2/π.")
    fprimePi = endpoint_derivatives.get("fprimePi")
    fprimePi = -FPRIME0 if fprimePi is None else float(fprimePi)
    if fprimePi >= 0:
        raise ProfileError("f′(π) doit être strictement négatif.")

    nodes = _with_endpoints(arr)
    spline = _interpolant(nodes[:, 0], nodes[:, 1], fprime0, fprimePi)
    second = spline.derivative(2)
    fsecond0 = endpoint_derivatives.get("fsecond0")
    fsecondPi = endpoint_derivatives.get("fsecondPi")
    first = spline.derivative()

    return CoefficientProfile(
        kind=KIND_CUSTOM,
        eps=eps,
        f_half=lambda x: spline(np.clip(x, 0.0, math.pi)),
        fprime_half=lambda x: first(np.clip(x, 0.0, math.pi)),
        fprime0=fprime0,
        fprimePi=fprimePi,
        fsecond0=float(second(0.0)) if fsecond0 is None else float(fsecond0),
        fsecondPi=float(second(math.pi)) if fsecondPi is None else float(fsecondPi),
        samples=tuple((float(x), float(y)) for x, y in arr),
    )


def endpoint_linearization(profile: CoefficientProfile, delta: float) -> CoefficientProfile:
    """f_δ : linéaire sur [0, δ] et [π−δ, π], égal à f ailleurs.

    f_δ coïncide avec f en 0, δ, π−δ et π. Sa pente f(δ)/δ à l'origine diffère
    de 2/π ; le profil obtenu n'est donc pas normalisé.
    """
    delta = float(delta)
    if not (0.0 < delta < math.pi / 2):
        raise ProfileError(f"δ = {delta} hors de (0, π/2).")
    if profile.fsecond0 is None or profile.fsecondPi is None:
        raise ProfileError("f″(0) et f″(π) sont nécessaires pour la famille f_δ.")
    base, base_prime = profile.f_half, profile.fprime_half
    left = float(base(delta)) / delta
    right = float(base(math.pi - delta)) / delta

    def f_half(x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where(x < delta, left * x, np.where(x > math.pi - delta, right * (math.pi - x), base(x)))

    def fprime_half(x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        return np.where(x < delta, left, np.where(x > math.pi - delta, -right, base_prime(x)))

    cuts = {delta, -delta, math.pi - delta, delta - math.pi}
    return CoefficientProfile(
        kind=KIND_CUSTOM,
        eps=profile.eps,
        f_half=f_half,
        fprime_half=fprime_half,
        fprime0=left,
        fprimePi=-right,
        fsecond0=0.0,
        fsecondPi=0.0,
        breakpoints=tuple(sorted(set(profile.breakpoints) | cuts)),
        name=f"{profile.profile_id}-delta{delta:g}",
    )


# -------------------------
# Hypothèses
# -------------------------

def validate(profile: CoefficientProfile, grid_size: int = 256) -> ValidationReport:
    if int(grid_size) < 16:
        raise ProfileError("grid_size doit valoir au moins 16.")
    subject = profile.profile_id
    n = int(grid_size)
    xs = np.linspace(-math.pi, math.pi, 2 * n + 1)[1:-1]
    xs = xs[np.abs(xs) > 0]
    fx = np.asarray(profile.f(xs), dtype=float)
    scale = max(float(np.max(np.abs(fx))), 1e-300)
    half = np.linspace(0.0, math.pi, n + 1)[1:-1]
    neg = half - math.pi

    report = ValidationReport()
    report.add(CheckResult(
        "ODD_SYMMETRY", subject,
        float(np.max(np.abs(profile.f(-xs) + fx))) / scale, HYPOTHESIS_TOL,
        "f(−x) = −f(x)",
    ))
    report.add(CheckResult(
        "ANTIPERIODICITY", subject,
        float(np.max(np.abs(profile.f(neg + math.pi) + profile.f(neg)))) / scale, HYPOTHESIS_TOL,
        "f(x+π) = −f(x)",
    ))
    zeros = [profile.f(0.0), profile.f(math.pi), profile.f(-math.pi)]
    report.add(CheckResult(
        "ENDPOINT_ZEROS", subject,
        float(max(abs(z) for z in zeros)) / scale, HYPOTHESIS_TOL,
        "f(0) = f(±π) = 0",
    ))
    fmin = float(np.min(profile.f(half)))
    report.add(CheckResult(
        "POSITIVITY", subject, max(0.0, -fmin) / scale, HYPOTHESIS_TOL,
        f"f > 0 sur (0, π) (minimum observé {fmin:.3e})",
        forced=fmin > 0,
    ))
    report.add(CheckResult(
        "NORMALIZATION", subject, abs(profile.fprime0 - FPRIME0), NORMALIZATION_TOL,
        "f′(0) = 2/π",
    ))
    slope = float(profile.f(SLOPE_STEP)) / SLOPE_STEP
    report.add(CheckResult(
        "ORIGIN_SLOPE", subject, abs(slope - FPRIME0) / FPRIME0, SLOPE_TOL,
        f"pente numérique à l'origine {slope:.12g}",
    ))
    report.add(CheckResult(
        "EPS_RANGE", subject, 0.0 if 0 < profile.eps < math.pi / 2 else 1.0, 0.5,
        f"ε = {profile.eps} dans (0, π/2)",
    ))
    bad = [b for b in profile.breakpoints if abs(b / math.pi - round(b / math.pi)) < 1e-12]
    report.add(CheckResult(
        "BREAKPOINTS", subject, float(len(bad)), 0.5,
        "points de non-dérivabilité hors de πZ", severity=SEVERITY_ALERT,
    ))
    return report


# -------------------------
# Poids p et w
# -------------------------

def _quad(func, a: float, b: float, points: Sequence[float] = ()) -> float:
    inner = [p for p in points if min(a, b) < p < max(a, b)]
    result = integrate.quad(func, a, b, points=inner or None, limit=200,
                            epsabs=1e-13, epsrel=1e-11, full_output=1)
    if len(result) == 4:
        raise WeightsError(f"Quadrature non convergente sur [{a:.3g}, {b:.3g}] : extrémité trop proche ?")
    return float(result[0])


def _log_exponent(profile: CoefficientProfile, x: float) -> float:
    """∫_{π/2}^x dt/(εf(t)), en variable logarithmique près des extrémités."""
    eps = profile.eps
    mid = math.pi / 2
    if x == mid:
        return 0.0
    bps = profile.interior_breakpoints()
    if x < mid:
        pts = [math.log(b) for b in bps]
        return -_quad(lambda s: math.exp(s) / (eps * float(profile.f_half(math.exp(s)))),
                      math.log(x), math.log(mid), pts)
    pts = [math.log(math.pi - b) for b in bps]
    return _quad(lambda s: math.exp(s) / (eps * float(profile.f_half(math.pi - math.exp(s)))),
                 math.log(math.pi - x), math.log(mid), pts)


def derived_weights(profile: CoefficientProfile) -> DerivedWeights:
    def p(x: float) -> float:
        x = float(x)
        if not (DELTA_MIN <= x <= math.pi - DELTA_MIN):
            raise WeightsError(f"x = {x:.3e} trop proche d'une extrémité de (0, π).")
        return float(profile.f_half(x)) * math.exp(_log_exponent(profile, x))

    def w(x: float) -> float:
        return p(x) / float(profile.f_half(float(x)))

    return DerivedWeights(p=p, w=w, normalization_point=math.pi / 2)


def eval_p(weights: DerivedWeights, x: float) -> float:
    return weights.p(x)


def spectral_parameter(eps: float, lam: complex) -> complex:
    """ℓ = iλ/ε, paramètre de la forme −(pu′)′ = ℓwu."""
    return 1j * complex(lam) / eps


# -------------------------
# Estimation WKB
# -------------------------

def wkb_integral(profile: CoefficientProfile) -> float:
    """I = ∫₀^π f^{−1/2}, avec x = s² près de 0 et x = π − s² près de π."""
    root = math.sqrt(math.pi / 2)
    bps = profile.interior_breakpoints()

    def near_zero(s: float) -> float:
        return 2.0 * s / math.sqrt(float(profile.f_half(s * s)))

    def near_pi(s: float) -> float:
        return 2.0 * s / math.sqrt(float(profile.f_half(math.pi - s * s)))

    try:
        left = _quad(near_zero, 0.0, root, [math.sqrt(b) for b in bps])
        right = _quad(near_pi, 0.0, root, [math.sqrt(math.pi - b) for b in bps])
    except WeightsError as exc:
        raise WeightsError(f"Intégrale WKB non convergente : {exc}") from exc
    return left + right


def wkb_guess(profile: CoefficientProfile, n: int) -> float:
    if int(n) < 1:
        raise ProfileError("n doit être un entier ≥ 1.")
    return (int(n) / wkb_integral(profile)) ** 2
