# ptsturm - Licence MIT (voir LICENSE.md)
"""Suite de recette de la commande verify.

Chaque contrôle renvoie des CheckResult ; un contrôle qui échoue pour une
raison numérique est consigné en échec avec le message de l'exception au
lieu d'interrompre la suite.
"""

from __future__ import annotations

import cmath
import math
from typing import Any, Callable, Iterable, Optional

import numpy as np

from .bessel import zeta_functions, zeta_wronskian
from .coeff import make_piecewise_linear, make_sine
from .contour import certify_box
from .data_models import CoefficientProfile, SolverSettings
from .galerkin import galerkin_lowest, imaginary_defect
from .outputs import polar_grid, rho_frame
from .shoot import (
    MatchingError,
    bessel_phi_at_pi,
    d_batch,
    phi_at_minus_pi,
    phi_at_pi_batch,
    rho_samples,
)
from .spectrum import (
    DEFAULT_DELTAS,
    SpectralSearchError,
    delta_family_experiment,
    find_alphas,
    find_real_eigs,
    lowest_by_modulus,
    rho_product,
)
from .validation import CheckResult, ValidationReport

ProgressCallback = Callable[[str, dict[str, Any]], None]

SEED = 20240613
REALITY_EPS = (0.5, 1.0)
REALITY_POSITIVE = 8
RESIDUAL_TOL = 1e-6
ORACLE_TOL = 1e-5
ORACLE_EXCLUSION = 0.1
WRONSKIAN_TOL = 1e-8
WRONSKIAN_SAMPLES = 100
SECTOR_GRID = (16, 64)
SECTOR_RADIUS = 4.0
ZEROS_COUNT = 12
ZEROS_R2 = 0.999
PRODUCT_RADIUS = 1.5
PRODUCT_POINTS = 20
GALERKIN_SIZE = 64
GALERKIN_COUNT = 6
GALERKIN_MATCH = 1e-4
DELTA_MODES = 4
SYMMETRY_SAMPLES = 50
SYMMETRY_TOL = 1e-7


def _profiles(eps: float) -> list[CoefficientProfile]:
    return [make_sine(eps), make_piecewise_linear(eps)]


def _subject(profile: CoefficientProfile) -> str:
    return f"{profile.profile_id} ε={profile.eps:g}"


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


# -------------------------
# Contrôles
# -------------------------

def check_reality(settings: SolverSettings) -> list[CheckResult]:
    out = []
    for eps in REALITY_EPS:
        for profile in _profiles(eps):
            records = find_real_eigs(profile, count=REALITY_POSITIVE + 1, settings=settings)
            positives = sorted(r.value for r in records if r.value > 0)
            bound = 0.5 * (positives[REALITY_POSITIVE - 1] + positives[REALITY_POSITIVE])
            kept = [r for r in records if abs(r.value) < bound]
            worst = max(r.residual / (1.0 + abs(r.value)) for r in kept)
            out.append(CheckResult("reality", _subject(profile), worst, RESIDUAL_TOL,
                                   f"résidu relatif max sur {len(kept)} racines réelles"))
            box = certify_box(profile, (-bound, bound, -2.0, 2.0), kept, settings)
            out.append(CheckResult(
                "reality", _subject(profile), float(abs(box.count - box.found_inside)), 0.5,
                f"indice {box.winding:.4f} pour {box.found_inside} racine(s) réelle(s) dans "
                f"[±{bound:.6g}]×[±2]",
                forced=box.ok,
            ))
    return out


def check_oracle(settings: SolverSettings) -> list[CheckResult]:
    profile = make_piecewise_linear(0.5)
    axis = np.linspace(-5.0, 5.0, 10)
    lams, exact = [], []
    for re in axis:
        for im in axis:
            lam = complex(re, im)
            if abs(lam) < ORACLE_EXCLUSION:
                continue
            try:
                value = bessel_phi_at_pi(profile.eps, lam)
            except MatchingError:
                continue
            if not cmath.isfinite(value):
                continue
            lams.append(lam)
            exact.append(value)
    shot = phi_at_pi_batch(profile, lams, settings)
    worst = max(_rel(s, e) for s, e in zip(shot, exact))
    return [CheckResult("oracle", _subject(profile), worst, ORACLE_TOL,
                        f"tir contre forme fermée de Bessel sur {len(lams)} points")]


def check_wronskian(settings: SolverSettings) -> list[CheckResult]:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    done = 0
    while done < WRONSKIAN_SAMPLES:
        nu = float(rng.uniform(0.5, 4.5))
        if abs(nu - round(nu)) < 0.05:
            continue
        lam = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        z = float(rng.uniform(-math.pi / 2, -0.1))
        _, z1, z2, _, z1p, z2p = zeta_functions(nu, lam, z)
        closed = zeta_wronskian(nu, lam, z)
        worst = max(worst, abs(z1 * z2p - z1p * z2 - closed) / abs(closed))
        done += 1
    return [CheckResult("wronskian", "ζ₁, ζ₂", worst, WRONSKIAN_TOL,
                        f"{WRONSKIAN_SAMPLES} triplets (ν, λ, z) aléatoires")]


def check_sector(settings: SolverSettings) -> list[CheckResult]:
    out = []
    zs = polar_grid(SECTOR_GRID[0], SECTOR_GRID[1], SECTOR_RADIUS)
    for profile in _profiles(0.5):
        frame = rho_frame(rho_samples(profile, zs, settings))
        bad = int(frame["violates_claim"].sum())
        flagged = int((frame["flag"] != "").sum())
        out.append(CheckResult("sector", _subject(profile), float(bad), 0.5,
                               f"{bad} violation(s) sur {len(frame)} cases, {flagged} signalée(s)"))
    return out


def _r_squared(x: np.ndarray, y: np.ndarray) -> float:
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    total = float(np.sum((y - np.mean(y)) ** 2))
    return 1.0 - float(np.sum(resid ** 2)) / total if total > 0 else 1.0


def check_zeros(settings: SolverSettings) -> list[CheckResult]:
    out = []
    for profile in _profiles(0.5):
        alphas = find_alphas(profile, ZEROS_COUNT, settings)
        r_min = min(a.r for a in alphas)
        out.append(CheckResult("zeros", _subject(profile), 0.0 if r_min > 0 else 1.0, 0.5,
                               f"min r_n = {r_min:.6g}", forced=r_min > 0))
        n = np.arange(1, len(alphas) + 1, dtype=float)
        r2 = _r_squared(n, np.array([a.alpha for a in alphas]))
        out.append(CheckResult("zeros", _subject(profile), 1.0 - r2, 1.0 - ZEROS_R2,
                               f"ajustement linéaire α_n, R² = {r2:.6f}"))
        thetas = 2.0 * math.pi * (np.arange(PRODUCT_POINTS) + 0.5) / PRODUCT_POINTS
        zs = PRODUCT_RADIUS * np.exp(1j * thetas)
        values = [a.alpha for a in alphas]
        excess = 0.0
        for sample in rho_samples(profile, zs, settings):
            if sample.flag:
                continue
            prod, tail = rho_product(values, sample.z, ZEROS_COUNT)
            excess = max(excess, abs(prod - sample.rho) - tail - 1e-6 * max(1.0, abs(sample.rho)))
        out.append(CheckResult("zeros", _subject(profile), max(excess, 0.0), 1e-12,
                               f"forme produit (N = {ZEROS_COUNT}) contre ρ par tir, dans la borne du reste"))
    return out


def check_galerkin(settings: SolverSettings) -> list[CheckResult]:
    profile = make_sine(0.5)
    matrix_side = galerkin_lowest(profile.eps, GALERKIN_COUNT, GALERKIN_SIZE)
    records = find_real_eigs(profile, count=math.ceil(GALERKIN_COUNT / 2), settings=settings)
    shots = [r.value for r in lowest_by_modulus([r for r in records if not r.trivial], GALERKIN_COUNT)]
    if len(shots) != GALERKIN_COUNT:
        raise SpectralSearchError(f"{len(shots)} valeur(s) propre(s) par tir sur {GALERKIN_COUNT}.")
    mismatch = max(abs(g.real - s) / abs(s) for g, s in zip(matrix_side, shots))
    return [
        CheckResult("galerkin", _subject(profile), imaginary_defect(matrix_side), 1e-8,
                    f"max |Im λ| des {GALERKIN_COUNT} valeurs propres non nulles de plus petit module "
                    f"(N = {GALERKIN_SIZE})"),
        CheckResult("galerkin", _subject(profile), mismatch, GALERKIN_MATCH,
                    "écart relatif Galerkin / tir"),
    ]


def check_delta(settings: SolverSettings) -> list[CheckResult]:
    profile = make_sine(0.5)
    table = delta_family_experiment(profile, DEFAULT_DELTAS, DELTA_MODES, settings)
    bad = 0
    for _, rows in table.groupby("n"):
        diffs = rows.sort_values("delta", ascending=False)["abs_diff"].to_numpy()
        bad += int(np.sum(np.diff(diffs) >= 0))
    return [CheckResult("delta", _subject(profile), float(bad), 0.5,
                        f"écarts |λ_n(δ) − λ_n| décroissants pour n ≤ {DELTA_MODES}")]


def check_symmetry(settings: SolverSettings) -> list[CheckResult]:
    rng = np.random.default_rng(SEED + 1)
    lams = rng.uniform(-5, 5, SYMMETRY_SAMPLES) + 1j * rng.uniform(-5, 5, SYMMETRY_SAMPLES)
    out = []
    for profile in _profiles(0.5):
        reflected = phi_at_pi_batch(profile, -lams, settings)
        left = [phi_at_minus_pi(profile, lam, settings).phi_pi for lam in lams]
        reflection = max(_rel(a, b) for a, b in zip(left, reflected))
        out.append(CheckResult("symmetry", _subject(profile), reflection, SYMMETRY_TOL,
                               "φ(−π, λ) = φ(π, −λ)"))
        direct = phi_at_pi_batch(profile, lams, settings)
        mirror = phi_at_pi_batch(profile, -np.conj(lams), settings)
        conjugation = max(_rel(np.conj(a), b) for a, b in zip(direct, mirror))
        out.append(CheckResult("symmetry", _subject(profile), conjugation, SYMMETRY_TOL,
                               "conj φ(π, λ) = φ(π, −conj λ)"))
        d, phi = d_batch(profile, np.concatenate((lams, np.conj(lams))), settings)
        n = lams.size
        quad = max(abs(d[n + k] + np.conj(d[k])) / max(1.0, abs(phi[k])) for k in range(n))
        out.append(CheckResult("symmetry", _subject(profile), quad, SYMMETRY_TOL,
                               "d(conj λ) = −conj d(λ) (quadruplets)"))
    return out


CHECKS: dict[str, Callable[[SolverSettings], list[CheckResult]]] = {
    "reality": check_reality,
    "oracle": check_oracle,
    "wronskian": check_wronskian,
    "sector": check_sector,
    "zeros": check_zeros,
    "galerkin": check_galerkin,
    "delta": check_delta,
    "symmetry": check_symmetry,
}


def run_acceptance(settings: SolverSettings | None = None, only: Optional[Iterable[str]] = None,
                   progress_cb: Optional[ProgressCallback] = None) -> ValidationReport:
    settings = settings or SolverSettings()
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"Contrôle(s) inconnu(s) : {', '.join(unknown)} (attendu : {', '.join(CHECKS)}).")
    report = ValidationReport()
    for name in names:
        if progress_cb is not None:
            progress_cb("verify.start", {"check": name})
        try:
            report.extend(CHECKS[name](settings))
        except (RuntimeError, ValueError, ArithmeticError) as exc:
            report.add(CheckResult(name, "suite", math.inf, 0.0,
                                   f"{type(exc).__name__} : {exc}", forced=False))
    return report
