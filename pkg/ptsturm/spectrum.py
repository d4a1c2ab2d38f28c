# ptsturm - Licence MIT (voir LICENSE.md)
"""Recherche des valeurs propres réelles, des zéros α_n, forme produit de ρ,
famille f_δ et contrôle de l'inégalité de Hardy.

Conventions : les zéros de φ(π, ·) sont λ = −ir_n avec r_n = εμ_n > 0 et
α_n = √r_n ; g(z) = φ(π, iz²) s'annule en z = ±iα_n.
"""

from __future__ import annotations

import math
import warnings
from typing import Any, Callable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import integrate, interpolate, optimize

from .coeff import ProfileError, endpoint_linearization, wkb_guess, wkb_integral
from .data_models import KIND_SINE, AlphaRecord, CoefficientProfile, RootRecord, SolverSettings
from .shoot import PoleProximityError, d_batch, phi_at_pi_batch, relative_residual, sign_changes_along

ProgressCallback = Callable[[str, dict[str, Any]], None]

MAX_ALPHAS = 20
MAX_REFINEMENTS = 3
SCAN_BLOCK = 64
MAX_PHASE_JUMP = math.pi / 2
MAX_PHASE_DEPTH = 10
RESIDUAL_TOL = 1e-6
DEFAULT_DELTAS = (0.3, 0.15, 0.075)
TRIVIAL_NOTE = "racine triviale (u ≡ 1)"


class SpectralSearchError(RuntimeError):
    """Recherche de racines en échec ; `grid` contient la grille balayée."""

    def __init__(self, message: str, grid: Optional[np.ndarray] = None):
        super().__init__(message)
        self.grid = np.asarray([] if grid is None else grid, dtype=float)


class HardyError(ValueError):
    """Fonction test inadmissible pour l'inégalité de Hardy."""


class GridRefinementWarning(RuntimeWarning):
    """La grille de balayage a été raffinée après un crochet manqué."""


def _emit(progress_cb: Optional[ProgressCallback], event: str, **payload: Any) -> None:
    if progress_cb is not None:
        progress_cb(event, payload)


def _spacing(profile: CoefficientProfile) -> Callable[[float], float]:
    """Écart WKB entre deux valeurs consécutives de r = εμ̂ au voisinage de r."""
    integral = wkb_integral(profile)
    eps = profile.eps

    def gap(r: float) -> float:
        return eps * (2.0 * integral * math.sqrt(max(r, 0.0) / eps) + 1.0) / integral ** 2

    return gap


def _next_block(start: float, gap: Callable[[float], float], refine: int) -> np.ndarray:
    pts = []
    r = start
    for _ in range(SCAN_BLOCK):
        r = r + gap(r) / refine
        pts.append(r)
    return np.asarray(pts)


# -------------------------
# Zéros α_n (axe imaginaire négatif)
# -------------------------

def _aux_value(profile: CoefficientProfile, settings: SolverSettings) -> Callable[[float], float]:
    def value(r: float) -> float:
        return float(phi_at_pi_batch(profile, [-1j * r], settings)[0].real)
    return value


def _scan_aux(profile: CoefficientProfile, needed: int, refine: int, settings: SolverSettings,
              progress_cb: Optional[ProgressCallback]) -> tuple[list[tuple[float, float]], np.ndarray]:
    gap = _spacing(profile)
    grid = [0.0]
    values = [1.0]
    brackets: list[tuple[float, float]] = []
    while len(brackets) < needed:
        block = _next_block(grid[-1], gap, refine)
        if block[-1] > settings.lam_max:
            block = block[block <= settings.lam_max]
            if block.size == 0:
                raise SpectralSearchError(
                    f"{len(brackets)} zéro(s) trouvé(s) sur {needed} avant lam_max = {settings.lam_max:g}.",
                    np.asarray(grid),
                )
        vals = phi_at_pi_batch(profile, -1j * block, settings).real
        for r, v in zip(block, vals):
            if values[-1] * v < 0:
                brackets.append((grid[-1], float(r)))
            grid.append(float(r))
            values.append(float(v))
        _emit(progress_cb, "alphas.scan", r=grid[-1], found=len(brackets))
    return brackets[:needed], np.asarray(grid)


def find_alphas(profile: CoefficientProfile, count: int, settings: SolverSettings | None = None,
                progress_cb: Optional[ProgressCallback] = None) -> list[AlphaRecord]:
    """Zéros de r ↦ φ(π, −ir), croissants ; α_n = √r_n."""
    settings = settings or SolverSettings()
    count = int(count)
    if not (1 <= count <= MAX_ALPHAS):
        raise ValueError(f"count doit être compris entre 1 et {MAX_ALPHAS}.")
    value = _aux_value(profile, settings)
    refine = 1
    grid = np.asarray([])
    for attempt in range(MAX_REFINEMENTS + 1):
        brackets, grid = _scan_aux(profile, count + 1, refine, settings, progress_cb)
        roots = [optimize.brentq(value, a, b, xtol=1e-14, rtol=settings.tol_root) for a, b in brackets]
        midpoint = 0.5 * (roots[count - 1] + roots[count])
        if sign_changes_along(profile, -1j * midpoint, settings) == count:
            break
        if attempt < MAX_REFINEMENTS:
            warnings.warn(
                f"Indice d'oscillation incohérent après {count} zéros : grille raffinée ×4.",
                GridRefinementWarning,
                stacklevel=2,
            )
            refine *= 4
    else:
        raise SpectralSearchError("Crochet manqué persistant dans la recherche des α_n.", grid)

    phi = phi_at_pi_batch(profile, -1j * np.asarray(roots[:count]), settings)
    out = []
    for n, (r, val, (a, b)) in enumerate(zip(roots, phi, brackets), start=1):
        scale = max(abs(value(a)), abs(value(b)))
        residual = relative_residual(val, scale)
        if residual > RESIDUAL_TOL:
            raise SpectralSearchError(f"Résidu {residual:.2e} trop grand pour α_{n}.", grid)
        out.append(AlphaRecord(
            n=n,
            alpha=math.sqrt(r),
            r=r,
            mu=r / profile.eps,
            residual=residual,
            wkb_guess=wkb_guess(profile, n),
        ))
    _emit(progress_cb, "alphas.done", count=len(out))
    return out


# -------------------------
# Valeurs propres réelles
# -------------------------

def _refine_phase(profile: CoefficientProfile, lams: list[float], phis: list[complex],
                  settings: SolverSettings) -> tuple[list[float], list[complex]]:
    """Insère des points tant que le saut de phase entre voisins dépasse π/2."""
    for _ in range(MAX_PHASE_DEPTH):
        ph = np.asarray(phis)
        jumps = np.abs(np.angle(ph[1:] / ph[:-1]))
        bad = np.nonzero(jumps > MAX_PHASE_JUMP)[0]
        if bad.size == 0:
            return lams, phis
        mids = [0.5 * (lams[i] + lams[i + 1]) for i in bad]
        new = phi_at_pi_batch(profile, mids, settings)
        merged = sorted(zip(lams + mids, phis + list(new)), key=lambda item: item[0])
        lams = [m[0] for m in merged]
        phis = [m[1] for m in merged]
    return lams, phis


def _imag_ratio(profile: CoefficientProfile, settings: SolverSettings) -> Callable[[float], float]:
    def ratio(lam: float) -> float:
        phi = complex(phi_at_pi_batch(profile, [lam], settings)[0])
        return phi.imag / abs(phi)
    return ratio


def _positive_roots(profile: CoefficientProfile, upper: float, count: Optional[int], refine: int,
                    settings: SolverSettings, progress_cb: Optional[ProgressCallback]) -> tuple[list[float], np.ndarray]:
    gap = _spacing(profile)
    ratio = _imag_ratio(profile, settings)
    lams: list[float] = [0.0]
    phis: list[complex] = [1.0 + 0j]
    roots: list[float] = []
    while lams[-1] < upper and (count is None or len(roots) < count):
        block = _next_block(lams[-1], gap, 2 * refine)
        block = block[block <= upper]
        if block.size == 0:
            block = np.array([upper])
        seg_l = [lams[-1], *block.tolist()]
        seg_p = [phis[-1], *phi_at_pi_batch(profile, block, settings).tolist()]
        seg_l, seg_p = _refine_phase(profile, seg_l, seg_p, settings)
        for a, b, pa, pb in zip(seg_l[:-1], seg_l[1:], seg_p[:-1], seg_p[1:]):
            if a > 0 and pa.imag * pb.imag < 0:
                roots.append(optimize.brentq(ratio, a, b, xtol=1e-14, rtol=settings.tol_root))
        lams.extend(seg_l[1:])
        phis.extend(seg_p[1:])
        _emit(progress_cb, "eigs.scan", lam=lams[-1], found=len(roots))
    return roots, np.asarray(lams)


def find_real_eigs(profile: CoefficientProfile, search_interval: Optional[Sequence[float]] = None,
                   count: Optional[int] = None, settings: SolverSettings | None = None,
                   progress_cb: Optional[ProgressCallback] = None,
                   confirm_trivial: bool = False) -> list[RootRecord]:
    """Racines réelles de d(λ) = φ(π,λ) − φ(π,−λ), triées.

    `count` limite le nombre de racines positives. Les racines négatives sont
    les opposées des positives (d est impaire) et sont recalculées. λ = 0 est
    toujours racine ; il est signalé comme trivial. Le balayage part toujours
    de λ = 0 (suivi de phase depuis φ(π, 0) = 1), puis seules les racines de
    search_interval sont retenues.
    """
    settings = settings or SolverSettings()
    lo, hi = (-settings.lam_max, settings.lam_max) if search_interval is None else map(float, search_interval)
    if lo > hi or max(abs(lo), abs(hi)) > settings.lam_max:
        raise ValueError(f"Intervalle de recherche invalide : [{lo}, {hi}].")
    if count is None and search_interval is None:
        raise ValueError("Préciser count ou search_interval.")
    upper = max(abs(lo), abs(hi))

    refine = 1
    for attempt in range(MAX_REFINEMENTS + 1):
        roots, grid = _positive_roots(profile, upper, count, refine, settings, progress_cb)
        if count is None or len(roots) >= count:
            break
        if attempt < MAX_REFINEMENTS:
            warnings.warn(f"{len(roots)} racine(s) réelle(s) sur {count} avant {upper:g} : grille raffinée ×4.",
                          GridRefinementWarning, stacklevel=2)
            refine *= 4
    else:
        raise SpectralSearchError(
            f"Recherche des valeurs propres réelles en échec : {len(roots)} racine(s) sur {count}.", grid)

    roots = sorted(roots)[:count] if count is not None else sorted(roots)
    positives = [r for r in roots if lo <= r <= hi]
    negatives = [-r for r in roots if lo <= -r <= hi]
    candidates = np.asarray(negatives + positives, dtype=float)
    out: list[RootRecord] = []
    if candidates.size:
        d, phi = d_batch(profile, candidates, settings)
        for lam, dv, pv in zip(candidates, d, phi):
            residual = relative_residual(dv, pv)
            if residual > RESIDUAL_TOL:
                raise SpectralSearchError(f"Résidu {residual:.2e} trop grand en λ = {lam:.10g}.", grid)
            out.append(RootRecord(value=float(lam), residual=residual))
    if lo <= 0.0 <= hi:
        out.append(RootRecord(value=0.0, residual=0.0, trivial=True, note=_trivial_note(profile, confirm_trivial)))
    out.sort(key=lambda rec: rec.value)
    _emit(progress_cb, "eigs.done", count=len(out))
    return out


def _trivial_note(profile: CoefficientProfile, confirm: bool) -> str:
    if not confirm or profile.kind != KIND_SINE:
        return TRIVIAL_NOTE
    from .galerkin import galerkin_eigs, galerkin_matrix

    eigs = galerkin_eigs(galerkin_matrix(profile.eps, 32))
    if np.min(np.abs(eigs)) < 1e-8:
        return TRIVIAL_NOTE + ", confirmée par Galerkin"
    return TRIVIAL_NOTE + ", non confirmée par Galerkin"


def lowest_by_modulus(records: Sequence[RootRecord], count: int) -> list[RootRecord]:
    ordered = sorted(records, key=lambda rec: (abs(rec.value), rec.value))
    return sorted(ordered[:count], key=lambda rec: rec.value)


# -------------------------
# Forme produit de ρ
# -------------------------

def rho_product(alphas: Sequence[float], z: complex, truncation: int) -> tuple[complex, float]:
    """∏_{n≤N} (1 − z²/α_n²)/(1 + z²/α_n²) et majorant estimé du reste."""
    alphas = np.sort(np.asarray(alphas, dtype=float))
    n = int(truncation)
    if not (1 <= n <= alphas.size):
        raise ValueError(f"Troncature N = {n} hors de [1, {alphas.size}].")
    w = complex(z) ** 2
    value = 1.0 + 0j
    for a in alphas[:n]:
        u = w / (a * a)
        if abs(1.0 + u) < 1e-12 or abs(1.0 - u) < 1e-12:
            raise PoleProximityError(f"z = {complex(z):.6g} trop proche de ±α ou ±iα.")
        value *= (1.0 - u) / (1.0 + u)
    if n >= 2 and alphas[n - 1] > alphas[n - 2]:
        tail_sum = 1.0 / ((alphas[n - 1] - alphas[n - 2]) * alphas[n - 1])
    else:
        tail_sum = 1.0 / alphas[n - 1]
    tail = abs(value) * math.expm1(2.5 * abs(w) * tail_sum)
    return value, tail


# -------------------------
# Famille f_δ
# -------------------------

def delta_family_experiment(profile: CoefficientProfile, deltas: Sequence[float], count: int = 4,
                            settings: SolverSettings | None = None,
                            progress_cb: Optional[ProgressCallback] = None) -> pd.DataFrame:
    """Écarts |λ_n(δ) − λ_n| des plus petites valeurs propres positives."""
    settings = settings or SolverSettings()
    deltas = [float(d) for d in deltas]
    if not deltas or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ProfileError("Les valeurs de δ doivent être fournies dans l'ordre décroissant.")
    if profile.fsecond0 is None or profile.fsecondPi is None:
        raise ProfileError("f″(0) et f″(π) sont nécessaires pour la famille f_δ.")

    def positives(p: CoefficientProfile) -> list[float]:
        recs = find_real_eigs(p, count=count, settings=settings)
        return [r.value for r in recs if r.value > 0][:count]

    reference = positives(profile)
    rows = []
    for delta in deltas:
        family = endpoint_linearization(profile, delta)
        values = positives(family)
        for n, (lam_d, lam_0) in enumerate(zip(values, reference), start=1):
            rows.append({
                "delta": delta,
                "n": n,
                "lambda_delta": lam_d,
                "lambda_ref": lam_0,
                "abs_diff": abs(lam_d - lam_0),
                "slope_defect_0": family.fprime0 - profile.fprime0,
                "slope_defect_pi": family.fprimePi - profile.fprimePi,
            })
        _emit(progress_cb, "delta.done", delta=delta)
    return pd.DataFrame(rows)


# -------------------------
# Inégalité de Hardy
# -------------------------

def hardy_check(a: float, b: float, w: Callable[[Any], Any],
                w_prime: Optional[Callable[[Any], Any]] = None, samples: int = 4001) -> float:
    """Rapport ∫ t^a|w′|² / ((1−a)²/4 ∫ t^{a−2}|w|²), au moins 1 pour w admissible."""
    a, b = float(a), float(b)
    if b <= 0:
        raise HardyError("b doit être strictement positif.")
    if a == 1.0:
        raise HardyError("La constante (1−a)²/4 s'annule pour a = 1.")
    grid = np.linspace(0.0, b, int(samples))
    values = np.abs(np.asarray(w(grid), dtype=complex))
    scale = float(np.max(values))
    if scale == 0.0:
        raise HardyError("w est identiquement nulle.")
    if values[0] > 1e-12 * scale or values[-1] > 1e-12 * scale:
        raise HardyError("Le support de w touche une extrémité de (0, b).")
    if w_prime is None:
        spline = interpolate.CubicSpline(grid, np.asarray(w(grid), dtype=float))
        w_prime = spline.derivative()

    def lhs_integrand(t: float) -> float:
        return t ** (a - 2.0) * abs(complex(w(t))) ** 2

    def rhs_integrand(t: float) -> float:
        return t ** a * abs(complex(w_prime(t))) ** 2

    lhs = (1.0 - a) ** 2 / 4.0 * integrate.quad(lhs_integrand, 0.0, b, limit=400)[0]
    rhs = integrate.quad(rhs_integrand, 0.0, b, limit=400)[0]
    if lhs <= 0.0:
        raise HardyError("Membre de gauche nul : fonction test dégénérée.")
    return rhs / lhs
