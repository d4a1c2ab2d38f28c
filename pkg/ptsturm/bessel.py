# ptsturm - Licence MIT (voir LICENSE.md)
"""Fonctions de Bessel J_ν d'argument complexe et solutions fermées ζ₀, ζ₁, ζ₂.

Série entière pour |z| ≤ 12. Au-delà, le développement asymptotique de
Hankel n'est retenu que si son plus petit terme passe sous HANKEL_TOL ;
sinon la série reste utilisée, resommée avec mpmath à la précision que
demande la compensation (jusqu'à |z| = SERIES_LIMIT). Toutes les puissances fractionnaires
utilisent la branche principale, arg ∈ (−π, π].

Convention pour les solutions près de π (variable z = x − π) :
ζ₂(z) = i^ν·E_{−ν}(−iνλz) et ζ₁(z) = K·z^ν·E_ν(−iνλz) avec
K = −i^{−ν}(iνλ)^ν, où E_μ(t) = Σ (−t)^k / (k! Γ(μ+k+1)). Avec ce choix
ζ₂(0) = i^ν/Γ(1−ν) et le wronskien vaut (sin νπ/π)(iνλ)^ν z^{ν−1} pour tout λ.
"""

from __future__ import annotations

import cmath
import math

import mpmath
from scipy import special

from .data_models import METHOD_ASYMPTOTIC, METHOD_SERIES, BesselEval

SERIES_RADIUS = 12.0
MAX_ORDER = 50.0
MAX_ARGUMENT = 1e4
CANCELLATION_LIMIT = 1e4
MAX_TERMS = 600
MAX_DIGITS = 400
ROUNDOFF = 2.2e-16
HANKEL_TOL = 1e-13
SERIES_LIMIT = 600.0


class BesselRangeError(RuntimeError):
    """Argument ou ordre hors du domaine pris en charge."""


class ResonantOrderError(ValueError):
    """Ordre ν entier : la seconde solution contient des logarithmes (non prise en charge)."""


def _principal(z: complex) -> complex:
    z = complex(z)
    return complex(z.real, z.imag + 0.0)  # −0.0 → +0.0 : arg(−x) = π


def _cpow(w: complex, p: float) -> complex:
    w = _principal(w)
    if w == 0:
        return 0j
    return cmath.exp(p * cmath.log(w))


def _is_integer(nu: float, tol: float = 1e-12) -> bool:
    return abs(nu - round(nu)) < tol


def _check_order(nu: float) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or abs(nu) > MAX_ORDER:
        raise BesselRangeError(f"Ordre ν = {nu} hors du domaine pris en charge (|ν| ≤ {MAX_ORDER:g}).")
    return nu


def series_radius(nu: float) -> float:
    """Rayon en deçà duquel la série est toujours retenue."""
    return SERIES_RADIUS


# -------------------------
# Série entière
# -------------------------

def _series_sum(nu: float, q: complex) -> tuple[complex, float]:
    """Σ q^k / (k! Γ(ν+k+1)) et erreur relative estimée."""
    term = complex(special.rgamma(nu + 1.0))
    total = term
    biggest = abs(term)
    for k in range(1, MAX_TERMS):
        term *= q / (k * (nu + k))
        total += term
        biggest = max(biggest, abs(term))
        if k * abs(nu + k) > abs(q) and abs(term) <= 1e-17 * abs(total):
            break
    scale = abs(total)
    if scale == 0.0:
        return total, ROUNDOFF
    cancellation = biggest / scale
    if cancellation <= CANCELLATION_LIMIT:
        return total, ROUNDOFF * max(1.0, cancellation) * 4.0
    return _series_sum_mp(nu, q, cancellation), ROUNDOFF * 4.0


def _series_sum_mp(nu: float, q: complex, cancellation: float) -> complex:
    # la compensation mesurée en double sature vers 1e16 : on relance tant
    # que celle mesurée en mpmath demande plus de chiffres
    digits = 20 + int(math.ceil(math.log10(cancellation)))
    while True:
        with mpmath.workdps(digits):
            qq = mpmath.mpc(q.real, q.imag)
            term = mpmath.rgamma(mpmath.mpf(nu) + 1)
            total = term
            biggest = abs(term)
            eps = mpmath.mpf(10) ** (-digits)
            k = 0
            while k < 4 * MAX_TERMS:
                k += 1
                term = term * qq / (k * (nu + k))
                total += term
                biggest = max(biggest, abs(term))
                if k * abs(nu + k) > abs(qq) and abs(term) <= eps * abs(total):
                    break
            if total == 0:
                return 0j
            needed = 20 + int(mpmath.ceil(mpmath.log10(biggest / abs(total))))
            if needed <= digits or digits >= MAX_DIGITS:
                return complex(total)
        digits = min(needed + 5, MAX_DIGITS)


# -------------------------
# Développement de Hankel
# -------------------------

def _hankel(nu: float, z: complex) -> tuple[complex, float]:
    """J_ν(z) pour Re z ≥ 0, tronqué au plus petit terme.

    Pour ν grand les termes croissent tant que (2k−1)² < 4ν² puis décroissent :
    la troncature se fait au minimum global de la suite.
    """
    mu = 4.0 * nu * nu
    terms = [1.0 + 0j]
    for k in range(1, MAX_TERMS):
        nxt = terms[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        terms.append(nxt)
        if nxt == 0:
            break
        if (2 * k - 1) ** 2 > mu and k > 2.0 * abs(z) and abs(nxt) > abs(terms[-2]):
            break
    magnitudes = [abs(t) for t in terms]
    if magnitudes[-1] == 0.0:
        cut, omitted = len(terms) - 1, 0.0
    else:
        cut = min(range(1, len(terms)), key=magnitudes.__getitem__)
        omitted = magnitudes[cut]
    p_sum, q_sum = 0j, 0j
    for k in range(cut):
        if k % 2:
            q_sum += (-1) ** ((k - 1) // 2) * terms[k]
        else:
            p_sum += (-1) ** (k // 2) * terms[k]
    omega = z - nu * math.pi / 2 - math.pi / 4
    if abs(omega.imag) > 700.0:
        raise BesselRangeError(f"Argument hors du domaine pris en charge : |Im z| = {abs(z.imag):.3g}.")
    c, s = cmath.cos(omega), cmath.sin(omega)
    value = cmath.sqrt(2.0 / (math.pi * z)) * (p_sum * c - q_sum * s)
    magnitude = abs(cmath.sqrt(2.0 / (math.pi * z))) * (abs(c) + abs(s))
    growth = max(magnitudes[:cut])
    err = max(omitted, ROUNDOFF * growth) * magnitude / max(abs(value), 1e-300)
    return value, err


# -------------------------
# API
# -------------------------

def _value(nu: float, z: complex) -> tuple[complex, str, float]:
    if nu < 0 and _is_integer(nu):
        n = int(round(-nu))
        value, method, err = _value(float(n), z)
        return (-1) ** n * value, method, err
    if abs(z) > MAX_ARGUMENT:
        raise BesselRangeError(f"Argument hors du domaine pris en charge : |z| = {abs(z):.3g}.")
    if z == 0:
        if nu == 0:
            return 1.0 + 0j, METHOD_SERIES, 0.0
        if nu > 0:
            return 0j, METHOD_SERIES, 0.0
        raise BesselRangeError(f"J_ν(0) infini pour ν = {nu} < 0.")
    if abs(z) > series_radius(nu):
        if z.real >= 0:
            value, err = _hankel(nu, z)
        else:
            factor = cmath.exp(1j * math.pi * nu) if z.imag >= 0 else cmath.exp(-1j * math.pi * nu)
            value, err = _hankel(nu, -z)
            value *= factor
        if err <= HANKEL_TOL or abs(z) > SERIES_LIMIT:
            return value, METHOD_ASYMPTOTIC, err
    total, err = _series_sum(nu, -(z * z) / 4.0)
    return _cpow(z / 2.0, nu) * total, METHOD_SERIES, err


def bessel_j(nu: float, z: complex) -> complex:
    """J_ν(z). Les ordres négatifs non entiers sont acceptés (usage interne des ζ)."""
    nu = _check_order(nu)
    return _value(nu, _principal(z))[0]


def bessel_j_prime(nu: float, z: complex) -> complex:
    """J_ν′(z) = J_{ν−1}(z) − (ν/z)J_ν(z) ; valeur limite en z = 0."""
    nu = _check_order(nu)
    z = _principal(z)
    if z == 0:
        if nu == 1:
            return 0.5 + 0j
        if nu == 0 or nu > 1:
            return 0j
        raise BesselRangeError(f"J_ν′(0) infini pour ν = {nu}.")
    return _value(nu - 1.0, z)[0] - (nu / z) * _value(nu, z)[0]


def bessel_eval(nu: float, z: complex) -> BesselEval:
    nu = _check_order(nu)
    z = _principal(z)
    value, method, err = _value(nu, z)
    derivative = bessel_j_prime(nu, z)
    return BesselEval(order=nu, z=z, value=value, derivative=derivative, method=method, est_rel_err=err)


def reduced_bessel(nu: float, t: complex) -> complex:
    """E_ν(t) = Σ (−t)^k / (k! Γ(ν+k+1)) = J_ν(2√t)/√t^ν, fonction entière de t."""
    t = complex(t)
    if t == 0:
        return complex(special.rgamma(nu + 1.0))
    w = 2.0 * cmath.sqrt(_principal(t))
    if abs(w) <= series_radius(nu):
        return _series_sum(nu, -t)[0]
    return bessel_j(nu, w) / _cpow(w / 2.0, nu)


def zeta_functions(nu: float, lam: complex, x: complex) -> tuple[complex, complex, complex, complex, complex, complex]:
    """(ζ₀, ζ₁, ζ₂, ζ₀′, ζ₁′, ζ₂′) évalués au même argument x.

    ζ₀ résout l'équation sur [0, π/2] (variable x), ζ₁ et ζ₂ sur [π/2, π]
    dans la variable z = x − π.
    """
    nu = _check_order(nu)
    if _is_integer(nu, 1e-9):
        raise ResonantOrderError(f"Ordre résonant ν = {nu} non pris en charge.")
    lam = complex(lam)
    x = complex(x)
    a = 1j * nu * lam
    g1 = special.gamma(nu + 1.0)

    t0 = a * x
    z0 = g1 * reduced_bessel(nu, t0)
    z0p = -g1 * a * reduced_bessel(nu + 1.0, t0)

    t = -a * x
    inu = cmath.exp(1j * math.pi * nu / 2)
    z2 = inu * reduced_bessel(-nu, t)
    z2p = inu * a * reduced_bessel(1.0 - nu, t)

    k = -cmath.exp(-1j * math.pi * nu / 2) * _cpow(a, nu)
    if x == 0:
        if nu < 1:
            raise BesselRangeError(f"ζ₁′(0) infini pour ν = {nu} < 1.")
        z1, z1p = 0j, 0j
    else:
        xn = _cpow(x, nu)
        e_nu = reduced_bessel(nu, t)
        z1 = k * xn * e_nu
        z1p = k * (nu * xn / x * e_nu + a * xn * reduced_bessel(nu + 1.0, t))
    return z0, z1, z2, z0p, z1p, z2p


def zeta_wronskian(nu: float, lam: complex, z: complex) -> complex:
    """Valeur fermée de ζ₁ζ₂′ − ζ₁′ζ₂ : (sin νπ/π)(iνλ)^ν z^{ν−1}."""
    z = _principal(z)
    return math.sin(nu * math.pi) / math.pi * _cpow(1j * nu * complex(lam), nu) * _cpow(z, nu) / z
