# ptsturm - Licence MIT (voir LICENSE.md)
"""Tir de la solution régulière φ(·, λ) à travers (0, π).

φ(π, λ) est la coordonnée de φ sur la solution régulière ψ de l'extrémité π
dans la base (ψ, Ψ). Les évaluations en grand nombre (balayages en λ,
grilles en z) empilent plusieurs λ dans un seul système différentiel ; les
paquets sont répartis sur PTSTURM_THREADS fils.
"""

from __future__ import annotations

import cmath
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp

from .bessel import _cpow, bessel_j, bessel_j_prime, zeta_functions, zeta_wronskian
from .data_models import (
    ENDPOINT_PI,
    ENDPOINT_ZERO,
    CoefficientProfile,
    RhoSample,
    ShootingState,
    SolverSettings,
    TransferResult,
)
from .frobenius import OffsetError, basis_at_zero, choose_delta, indicial_exponents

ERROR_TIGHTENING = 4.0
RTOL_FLOOR = 1e-13
PROXIMITY_TOL = 1e-7
FLAG_PROXIMITY = "pole/zero proximity"


class StiffnessError(RuntimeError):
    """Pas d'intégration trop petit : approcher l'extrémité par la base de Frobenius."""


class LambdaRangeError(RuntimeError):
    """λ hors du domaine stable (dépassement, NaN ou |λ| > lam_max)."""


class ExtractionError(RuntimeError):
    """Raccord mal conditionné à l'extrémité π."""


class MatchingError(RuntimeError):
    """Système de raccord de Bessel singulier (coïncidence avec un zéro de Bessel)."""


class PoleProximityError(RuntimeError):
    """z trop proche d'un zéro ou d'un pôle de ρ."""


class ExtractionRetryWarning(RuntimeWarning):
    """Raccord relancé avec un autre décalage près de π."""


class ToleranceWarning(RuntimeWarning):
    """Erreur estimée au-dessus de tol_ode au plancher de tolérance de l'intégrateur."""


# -------------------------
# Intégration
# -------------------------

def _rhs(profile: CoefficientProfile, lams: np.ndarray):
    eps = profile.eps
    m = lams.size
    il = 1j * lams

    def rhs(x: float, y: np.ndarray) -> np.ndarray:
        w = y[m:] / profile.f(x)
        return np.concatenate((-w, (il * y[:m] - w) / eps))

    return rhs


def _knots(profile: CoefficientProfile, x0: float, x1: float) -> list[float]:
    lo, hi = min(x0, x1), max(x0, x1)
    cuts = [b for b in profile.breakpoints if lo < b < hi]
    cuts.sort(reverse=x1 < x0)
    return [x0, *cuts, x1]


def _propagate(profile: CoefficientProfile, lams: np.ndarray, y: np.ndarray,
               x0: float, x1: float, settings: SolverSettings, rtol: float,
               trace: list[np.ndarray] | None = None) -> tuple[np.ndarray, int]:
    rhs = _rhs(profile, lams)
    knots = _knots(profile, x0, x1)
    steps = 0
    for a, b in zip(knots[:-1], knots[1:]):
        with np.errstate(over="ignore", invalid="ignore"):
            sol = solve_ivp(rhs, (a, b), y, method=settings.ode_method,
                            rtol=rtol, atol=settings.atol_ode)
        if sol.status != 0:
            if "step size" in sol.message.lower():
                raise StiffnessError(
                    f"Pas minimal atteint près de x = {sol.t[-1]:.3e} : "
                    "approcher l'extrémité par la base de Frobenius."
                )
            raise LambdaRangeError(f"Intégration interrompue : {sol.message}")
        y = sol.y[:, -1]
        steps += sol.t.size - 1
        if trace is not None:
            trace.append(sol.y[: lams.size])
        if not np.all(np.isfinite(y)):
            raise LambdaRangeError(f"Dépassement numérique : λ hors du domaine stable (max |λ| = {np.max(np.abs(lams)):.3g}).")
    return y, steps


def _check_lams(lams: np.ndarray, settings: SolverSettings) -> None:
    if lams.size and not np.all(np.isfinite(lams)):
        raise LambdaRangeError("λ non fini.")
    if lams.size and np.max(np.abs(lams)) > settings.lam_max:
        raise LambdaRangeError(f"|λ| = {np.max(np.abs(lams)):.3g} dépasse lam_max = {settings.lam_max:g}.")


def integrate(profile: CoefficientProfile, lam: complex, from_state: ShootingState, to_x: float,
              settings: SolverSettings | None = None) -> ShootingState:
    settings = settings or SolverSettings()
    for x in (from_state.x, to_x):
        if not (settings.delta_min <= x <= math.pi - settings.delta_min):
            raise OffsetError(f"x = {x:.3e} hors de [δ_min, π − δ_min].")
    lams = np.array([complex(lam)])
    _check_lams(lams, settings)
    y0 = np.array([from_state.u, from_state.v], dtype=complex)
    y, _ = _propagate(profile, lams, y0, from_state.x, float(to_x), settings, settings.tol_ode)
    return ShootingState(float(to_x), complex(y[0]), complex(y[1]))


# -------------------------
# Transfert 0 → π
# -------------------------

@dataclass
class _Chunk:
    phi: np.ndarray
    c2: np.ndarray
    delta0: float
    deltaPi: float
    steps: int


def _extract(profile: CoefficientProfile, lams: np.ndarray, u: np.ndarray, v: np.ndarray,
             delta: float, side: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """Coordonnées (c1, c2) de (u, v) dans la base (ψ, Ψ) à distance δ de ±π."""
    b = profile.fprimePi
    eps = profile.eps
    k = side * 1j * lams / (1.0 + eps * b)
    psi_u, psi_v = 1.0 + k * delta, -b * k * delta
    det = psi_u - eps * psi_v  # déterminant divisé par δ^σ
    scale = (np.abs(psi_u) + eps) * (np.abs(psi_v) + 1.0)
    ill = bool(np.any(np.abs(det) < 1e-8 * scale))
    c1 = (u - eps * v) / det
    _, sigma = indicial_exponents(profile, ENDPOINT_PI)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        c2 = (psi_u * v - psi_v * u) / det * math.exp(min(-sigma * math.log(delta), 700.0))
    return c1, c2, ill


def _transfer_chunk(profile: CoefficientProfile, lams: np.ndarray, settings: SolverSettings,
                    rtol: float, side: int = 1) -> _Chunk:
    big = complex(np.max(np.abs(lams))) if lams.size else 0j
    d0 = choose_delta(profile, big, ENDPOINT_ZERO, settings)
    dpi = choose_delta(profile, big, ENDPOINT_PI, settings)
    a = profile.fprime0
    m = -1j * lams / (1.0 + profile.eps * a)
    x0 = side * d0
    y0 = np.concatenate((1.0 + m * x0, -a * m * x0)).astype(complex)
    for attempt in range(2):
        x1 = side * (math.pi - dpi)
        y, steps = _propagate(profile, lams, y0, x0, x1, settings, rtol)
        n = lams.size
        c1, c2, ill = _extract(profile, lams, y[:n], y[n:], dpi, side)
        if not ill:
            return _Chunk(phi=c1, c2=c2, delta0=d0, deltaPi=dpi, steps=steps)
        if attempt == 0:
            warnings.warn(
                f"Raccord mal conditionné en π (δ = {dpi:g}) : nouvel essai avec δ/2.",
                ExtractionRetryWarning,
                stacklevel=3,
            )
            dpi = max(dpi / 2.0, settings.delta_min)
    raise ExtractionError("Raccord mal conditionné à l'extrémité π (ill-conditioned endpoint match).")


def _chunks(lams: np.ndarray, size: int) -> list[np.ndarray]:
    order = np.argsort(np.abs(lams), kind="stable")
    return [order[i:i + size] for i in range(0, order.size, size)]


def _run_batch(profile: CoefficientProfile, lams: np.ndarray, settings: SolverSettings,
               rtol: float, side: int = 1) -> np.ndarray:
    lams = np.asarray(lams, dtype=complex).ravel()
    _check_lams(lams, settings)
    out = np.empty(lams.size, dtype=complex)
    groups = _chunks(lams, int(settings.chunk_size))

    def work(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return idx, _transfer_chunk(profile, lams[idx], settings, rtol, side).phi

    if settings.threads > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            results = list(pool.map(work, groups))
    else:
        results = [work(g) for g in groups]
    for idx, phi in results:
        out[idx] = phi
    return out


def phi_at_pi_batch(profile: CoefficientProfile, lams: Iterable[complex],
                    settings: SolverSettings | None = None) -> np.ndarray:
    """φ(π, λ) pour un ensemble de λ (mode de calcul groupé)."""
    settings = settings or SolverSettings()
    return _run_batch(profile, np.asarray(list(lams), dtype=complex), settings, settings.tol_ode)


def _transfer_result(profile: CoefficientProfile, lam: complex, settings: SolverSettings,
                     estimate_error: bool, side: int) -> TransferResult:
    lams = np.array([complex(lam)])
    _check_lams(lams, settings)
    rtol = settings.tol_ode
    chunk = _transfer_chunk(profile, lams, settings, rtol, side)
    phi = complex(chunk.phi[0])
    est = 0.0
    if estimate_error:
        # dédoublement : l'erreur de la passe fine vaut |fine − grossière|/(q − 1)
        # pour une erreur proportionnelle à rtol ; on resserre tant que est > tol_ode
        while True:
            rtol /= ERROR_TIGHTENING
            fine = _transfer_chunk(profile, lams, settings, rtol, side)
            est = abs(complex(fine.phi[0]) - phi) / max(1.0, abs(phi)) / (ERROR_TIGHTENING - 1.0)
            chunk, phi = fine, complex(fine.phi[0])
            if est <= settings.tol_ode:
                break
            if rtol / ERROR_TIGHTENING < RTOL_FLOOR:
                warnings.warn(
                    f"Erreur estimée {est:.2e} > tol_ode = {settings.tol_ode:g} pour λ = {complex(lam):.6g} "
                    f"malgré rtol = {rtol:.1e}.",
                    ToleranceWarning,
                    stacklevel=3,
                )
                break
    return TransferResult(
        lam=complex(lam),
        phi_pi=phi,
        c1=phi,
        c2=complex(chunk.c2[0]),
        delta0=chunk.delta0,
        deltaPi=chunk.deltaPi,
        steps=chunk.steps,
        est_err=est,
    )


def phi_at_pi(profile: CoefficientProfile, lam: complex, settings: SolverSettings | None = None,
              *, estimate_error: bool = True) -> TransferResult:
    return _transfer_result(profile, lam, settings or SolverSettings(), estimate_error, 1)


def phi_at_minus_pi(profile: CoefficientProfile, lam: complex, settings: SolverSettings | None = None,
                    *, estimate_error: bool = False) -> TransferResult:
    """φ(−π, λ) obtenu en intégrant sur (−π, 0) avec f prolongé par imparité."""
    return _transfer_result(profile, lam, settings or SolverSettings(), estimate_error, -1)


def phi_along(profile: CoefficientProfile, lam: complex, xs: Sequence[float],
              settings: SolverSettings | None = None) -> np.ndarray:
    """Valeurs de φ(x, λ) aux points xs de (−π, π), normalisées par φ(0, λ) = 1."""
    settings = settings or SolverSettings()
    xs = np.asarray(xs, dtype=float)
    out = np.empty(xs.size, dtype=complex)
    for sign in (1.0, -1.0):
        mask = (sign * xs) >= 0
        if not np.any(mask):
            continue
        mu = complex(lam) * sign  # φ(−x, λ) = φ(x, −λ)
        pos = np.abs(xs[mask])
        d0 = choose_delta(profile, mu, ENDPOINT_ZERO, settings)
        dpi = choose_delta(profile, mu, ENDPOINT_PI, settings)
        start = basis_at_zero(profile, mu, d0, settings, strict=False).state_regular  # δ déjà choisi
        grid = np.clip(pos, d0, math.pi - dpi)
        order = np.argsort(grid)
        vals = np.empty(grid.size, dtype=complex)
        state = start
        for j in order:
            if grid[j] > state.x:
                state = integrate(profile, mu, state, float(grid[j]), settings)
            vals[j] = state.u
        near = pos < d0
        vals[near] = 1.0 - 1j * mu * pos[near] / (1.0 + profile.eps * profile.fprime0)
        out[mask] = vals
    return out


# -------------------------
# d(λ), g(z), ρ(z)
# -------------------------

def d_of_lambda(profile: CoefficientProfile, lam: complex, settings: SolverSettings | None = None) -> complex:
    phi = phi_at_pi_batch(profile, [lam, -complex(lam)], settings)
    return complex(phi[0] - phi[1])


def d_batch(profile: CoefficientProfile, lams: Sequence[complex],
            settings: SolverSettings | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(d(λ), φ(π, λ)) pour chaque λ."""
    lams = np.asarray(lams, dtype=complex)
    phi = phi_at_pi_batch(profile, np.concatenate((lams, -lams)), settings)
    n = lams.size
    return phi[:n] - phi[n:], phi[:n]


def relative_residual(value: complex, phi: complex) -> float:
    return abs(value) / max(1.0, abs(phi))


def g_of_z(profile: CoefficientProfile, z: complex, settings: SolverSettings | None = None) -> complex:
    """g(z) = φ(π, iz²) ; ses zéros sont ±iα_n."""
    z = complex(z)
    return complex(phi_at_pi_batch(profile, [1j * z * z], settings)[0])


def _proximity(g_z: complex, g_iz: complex, guard: float) -> bool:
    scale = max(abs(g_z), abs(g_iz))
    return abs(g_z) <= guard or scale == 0 or min(abs(g_z), abs(g_iz)) < PROXIMITY_TOL * scale


def rho_samples(profile: CoefficientProfile, zs: Sequence[complex],
                settings: SolverSettings | None = None) -> list[RhoSample]:
    """ρ(z) = g(iz)/g(z) sur un ensemble de z ; les cases proches d'un zéro sont marquées."""
    settings = settings or SolverSettings()
    zs = np.asarray(zs, dtype=complex).ravel()
    sq = 1j * zs * zs
    phi = phi_at_pi_batch(profile, np.concatenate((sq, -sq)), settings)
    n = zs.size
    out = []
    for z, g_z, g_iz in zip(zs, phi[:n], phi[n:]):
        flag = FLAG_PROXIMITY if _proximity(g_z, g_iz, settings.rho_guard) else ""
        if abs(g_z) > settings.rho_guard:
            rho = complex(g_iz / g_z)
        else:
            rho = complex(math.nan, math.nan)
        out.append(RhoSample(z=complex(z), g_z=complex(g_z), g_iz=complex(g_iz),
                             rho=rho, modulus=abs(rho), flag=flag))
    return out


def rho_general(profile: CoefficientProfile, z: complex, settings: SolverSettings | None = None) -> RhoSample:
    sample = rho_samples(profile, [z], settings)[0]
    if sample.flag:
        raise PoleProximityError(f"z = {complex(z):.6g} trop proche d'un zéro ou d'un pôle de ρ.")
    return sample


def quadruple_defect(profile: CoefficientProfile, lam: complex, settings: SolverSettings | None = None) -> float:
    """Défaut relatif de d sur le quadruplet (λ, −λ, λ̄, −λ̄)."""
    lam = complex(lam)
    quad = np.array([lam, -lam, lam.conjugate(), -lam.conjugate()])
    d, phi = d_batch(profile, quad, settings)
    return float(max(relative_residual(dv, pv) for dv, pv in zip(d, phi)))


# -------------------------
# Cas de Bessel (f affine par morceaux)
# -------------------------

def bessel_order(eps: float) -> float:
    return math.pi / (2.0 * float(eps))


def bessel_phi_at_pi(eps: float, lam: complex) -> complex:
    """φ(π, λ) en forme fermée pour le coefficient affine par morceaux."""
    nu = bessel_order(eps)
    lam = complex(lam)
    if lam == 0:
        return 1.0 + 0j
    mid = math.pi / 2
    z0, _, _, z0p, _, _ = zeta_functions(nu, lam, mid)
    _, z1, z2, _, z1p, z2p = zeta_functions(nu, lam, -mid)
    wr = zeta_wronskian(nu, lam, -mid)
    if abs(wr) <= 1e-13 * (abs(z1 * z2p) + abs(z1p * z2)):
        raise MatchingError(f"Système de raccord singulier pour λ = {lam:.6g} : perturber λ.")
    b = (z1 * z0p - z1p * z0) / wr
    return b * cmath.exp(1j * math.pi * nu / 2) * special.rgamma(1.0 - nu)


def bessel_eig_residual(eps: float, lam: complex) -> float:
    """|φ(π,λ) − φ(π,−λ)| relatif, en forme fermée."""
    plus, minus = bessel_phi_at_pi(eps, lam), bessel_phi_at_pi(eps, -complex(lam))
    return abs(plus - minus) / max(1.0, abs(plus), abs(minus))


def F_bessel(eps: float, lam: complex) -> complex:
    """F(λ) = λ^{1/2−ν} J_ν′(s) J_ν(s), s = √(2iνλπ)."""
    nu = bessel_order(eps)
    lam = complex(lam)
    s = cmath.sqrt(2j * nu * lam * math.pi)
    return _cpow(lam, 0.5 - nu) * bessel_j_prime(nu, s) * bessel_j(nu, s)


def rho_bessel(eps: float, z: complex) -> complex:
    """ρ(z) = J_ν′(z)J_ν(z) / (J_ν′(iz)J_ν(iz))."""
    nu = bessel_order(eps)
    z = complex(z)
    num = bessel_j_prime(nu, z) * bessel_j(nu, z)
    den = bessel_j_prime(nu, 1j * z) * bessel_j(nu, 1j * z)
    if abs(den) <= 1e-250 or abs(den) < PROXIMITY_TOL * abs(num):
        raise PoleProximityError(f"z = {z:.6g} trop proche d'un pôle de ρ de Bessel.")
    return num / den


def F_and_rho_bessel(eps: float, lam: complex, z: complex) -> tuple[complex, complex]:
    return F_bessel(eps, lam), rho_bessel(eps, z)


def sign_changes_along(profile: CoefficientProfile, lam: complex, settings: SolverSettings | None = None) -> int:
    """Changements de signe de Re φ(·, λ) sur (δ, π − δ), relevés aux pas de l'intégrateur.

    Sur l'axe imaginaire λ = −ir, φ est réelle et ce nombre est l'indice
    d'oscillation de Sturm du problème auto-adjoint associé.
    """
    settings = settings or SolverSettings()
    lams = np.array([complex(lam)])
    _check_lams(lams, settings)
    d0 = choose_delta(profile, lams[0], ENDPOINT_ZERO, settings)
    dpi = choose_delta(profile, lams[0], ENDPOINT_PI, settings)
    start = basis_at_zero(profile, lams[0], d0, settings, strict=False).state_regular  # δ déjà choisi
    trace: list[np.ndarray] = []
    _propagate(profile, lams, np.array([start.u, start.v], dtype=complex), d0, math.pi - dpi,
               settings, settings.tol_ode, trace)
    values = np.concatenate([t[0] for t in trace]).real
    signs = np.sign(values[values != 0])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))
