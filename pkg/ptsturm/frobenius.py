# ptsturm - Licence MIT (voir LICENSE.md)
"""Bases locales aux extrémités singulières x = 0 et x = π.

Près de 0 : solution régulière u ~ 1 et solution singulière u ~ x^{−1/(εf′(0))}.
Près de π (s = π − x) : solution régulière ψ ~ 1 et solution décroissante
Ψ ~ s^{−1/(εf′(π))}. L'état propagé est (u, v) avec v = −f·u′.
"""

from __future__ import annotations

import math

from .data_models import (
    ENDPOINT_PI,
    ENDPOINT_ZERO,
    CoefficientProfile,
    LocalBasis,
    ShootingState,
    SolverSettings,
)


class OffsetError(ValueError):
    """Décalage δ incompatible avec la tolérance (trop grand) ou trop petit."""


def indicial_exponents(profile: CoefficientProfile, endpoint: str) -> tuple[float, float]:
    if endpoint == ENDPOINT_ZERO:
        return 0.0, -1.0 / (profile.eps * profile.fprime0)
    if endpoint == ENDPOINT_PI:
        return 0.0, -1.0 / (profile.eps * profile.fprimePi)
    raise ValueError(f"Extrémité inconnue : {endpoint!r}.")


def remainder_estimate(profile: CoefficientProfile, lam: complex, delta: float, endpoint: str) -> float:
    """C(δ²(1+|λ|)² + |f(δ)/δ − f′ − δf″/2|) avec C = 1."""
    if endpoint == ENDPOINT_ZERO:
        slope, curvature = profile.fprime0, profile.fsecond0 or 0.0
        shape = float(profile.f_half(delta)) / delta - slope - delta * curvature / 2
    else:
        slope, curvature = profile.fprimePi, profile.fsecondPi or 0.0
        shape = float(profile.f_half(math.pi - delta)) / delta + slope - delta * curvature / 2
    return (delta * (1.0 + abs(lam))) ** 2 + abs(shape)


def choose_delta(profile: CoefficientProfile, lam: complex, endpoint: str,
                 settings: SolverSettings) -> float:
    """Plus grand δ ≤ delta_max dont le reste estimé passe sous tol_frob."""
    delta = settings.delta_max
    while delta > settings.delta_min:
        if remainder_estimate(profile, lam, delta, endpoint) <= settings.tol_frob:
            return delta
        delta /= 2.0
    delta = settings.delta_min
    if remainder_estimate(profile, lam, delta, endpoint) > settings.tol_frob * 1e3:
        raise OffsetError(
            f"Aucun δ ≥ {settings.delta_min:g} n'atteint tol_frob = {settings.tol_frob:g} "
            f"pour λ = {complex(lam):.6g} : réduire delta_min ou relâcher tol_frob."
        )
    return delta


def _check_delta(profile: CoefficientProfile, lam: complex, delta: float, endpoint: str,
                 settings: SolverSettings, strict: bool) -> float:
    delta = float(delta)
    if delta < settings.delta_min:
        raise OffsetError(f"Décalage δ = {delta:g} inférieur à δ_min = {settings.delta_min:g}.")
    if delta >= math.pi / 2:
        raise OffsetError(f"Décalage δ = {delta:g} trop grand.")
    if strict and remainder_estimate(profile, lam, delta, endpoint) > settings.tol_frob:
        raise OffsetError(f"Décalage δ = {delta:g} trop grand pour tol_frob : réduire δ.")
    return delta


def basis_at_zero(profile: CoefficientProfile, lam: complex, delta: float,
                  settings: SolverSettings | None = None, *, strict: bool = True) -> LocalBasis:
    settings = settings or SolverSettings()
    lam = complex(lam)
    delta = _check_delta(profile, lam, delta, ENDPOINT_ZERO, settings, strict)
    a = profile.fprime0
    m = -1j * lam / (1.0 + profile.eps * a)
    jet = ((1.0 + 0j, 0j), (m, -a * m))
    _, tau = indicial_exponents(profile, ENDPOINT_ZERO)
    power = delta ** tau
    return LocalBasis(
        endpoint=ENDPOINT_ZERO,
        lam=lam,
        regular_jet=jet,
        singular_exponent=tau,
        delta=delta,
        state_regular=ShootingState(delta, 1.0 + m * delta, -a * m * delta),
        state_singular=ShootingState(delta, profile.eps * power, power),
    )


def basis_at_pi(profile: CoefficientProfile, lam: complex, delta: float,
                settings: SolverSettings | None = None, *, strict: bool = True) -> LocalBasis:
    """Base (ψ, Ψ) évaluée en x = π − δ.

    La pente de ψ en s = π − x vaut iλ/(1+εf′(π)), image de la pente en 0 par
    la symétrie x ↦ π − x, ε ↦ −ε, λ ↦ −λ.
    """
    settings = settings or SolverSettings()
    lam = complex(lam)
    delta = _check_delta(profile, lam, delta, ENDPOINT_PI, settings, strict)
    b = profile.fprimePi
    k = 1j * lam / (1.0 + profile.eps * b)
    jet = ((1.0 + 0j, 0j), (k, -b * k))
    _, sigma = indicial_exponents(profile, ENDPOINT_PI)
    power = delta ** sigma
    x = math.pi - delta
    return LocalBasis(
        endpoint=ENDPOINT_PI,
        lam=lam,
        regular_jet=jet,
        singular_exponent=sigma,
        delta=delta,
        state_regular=ShootingState(x, 1.0 + k * delta, -b * k * delta),
        state_singular=ShootingState(x, profile.eps * power, power),
    )
