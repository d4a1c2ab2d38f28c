# ptsturm - Licence MIT (voir LICENSE.md)
"""Structures de données partagées par les modules numériques.

Toutes les structures sont figées après construction : un profil ou un
résultat peut être partagé entre plusieurs workers sans précaution.
"""

from __future__ import annotations

import dataclasses
import math
import os
from typing import Any, Callable, Mapping, Optional

import numpy as np

# -------------------------
# Constantes
# -------------------------

KIND_SINE = "sine"
KIND_PIECEWISE_LINEAR = "piecewise_linear"
KIND_CUSTOM = "custom"
PROFILE_KINDS = (KIND_SINE, KIND_PIECEWISE_LINEAR, KIND_CUSTOM)

ENDPOINT_ZERO = "zero"
ENDPOINT_PI = "pi"

METHOD_SERIES = "series"
METHOD_ASYMPTOTIC = "asymptotic"

FPRIME0 = 2.0 / math.pi  # normalisation f′(0) = 2/π
THREADS_ENV = "PTSTURM_THREADS"


class SettingsError(ValueError):
    """Réglages numériques invalides (tolérances, seuils, parallélisme)."""


# -------------------------
# Profils de coefficient
# -------------------------

@dataclasses.dataclass(frozen=True, eq=False)
class CoefficientProfile:
    """Coefficient f, 2π-périodique, impair et anti-périodique.

    `f_half` n'est évalué que sur [0, π] ; le prolongement à R passe par
    l'imparité et la 2π-périodicité. `breakpoints` liste les points de
    (−π, π) où f peut ne pas être dérivable.
    """

    kind: str
    eps: float
    f_half: Callable[[Any], Any]
    fprime_half: Callable[[Any], Any]
    fprime0: float
    fprimePi: float
    fsecond0: Optional[float] = None
    fsecondPi: Optional[float] = None
    breakpoints: tuple[float, ...] = ()
    name: str = ""
    samples: Optional[tuple[tuple[float, float], ...]] = None

    @property
    def profile_id(self) -> str:
        return self.name or self.kind

    @staticmethod
    def _reduce(x: Any) -> np.ndarray:
        return np.mod(np.asarray(x, dtype=float) + math.pi, 2.0 * math.pi) - math.pi

    def f(self, x: Any) -> Any:
        y = self._reduce(x)
        out = np.sign(y) * self.f_half(np.abs(y))
        return float(out) if np.ndim(out) == 0 else out

    def fprime(self, x: Any) -> Any:
        y = self._reduce(x)
        out = self.fprime_half(np.abs(y))
        return float(out) if np.ndim(out) == 0 else out

    def interior_breakpoints(self) -> list[float]:
        """Points de non-dérivabilité dans (0, π), triés."""
        return sorted({abs(b) for b in self.breakpoints if 0.0 < abs(b) < math.pi})


@dataclasses.dataclass(frozen=True, eq=False)
class DerivedWeights:
    p: Callable[[float], float]
    w: Callable[[float], float]
    normalization_point: float = math.pi / 2


# -------------------------
# Intégration
# -------------------------

@dataclasses.dataclass(frozen=True)
class ShootingState:
    x: float
    u: complex
    v: complex  # v = −f(x)·u′(x)


@dataclasses.dataclass(frozen=True)
class LocalBasis:
    endpoint: str
    lam: complex
    regular_jet: tuple[tuple[complex, complex], tuple[complex, complex]]
    singular_exponent: float
    delta: float
    state_regular: ShootingState
    state_singular: ShootingState


@dataclasses.dataclass(frozen=True)
class TransferResult:
    lam: complex
    phi_pi: complex
    c1: complex
    c2: complex
    delta0: float
    deltaPi: float
    steps: int
    est_err: float


@dataclasses.dataclass(frozen=True)
class RhoSample:
    z: complex
    g_z: complex
    g_iz: complex
    rho: complex
    modulus: float
    flag: str = ""


@dataclasses.dataclass(frozen=True)
class BesselEval:
    order: float
    z: complex
    value: complex
    derivative: complex
    method: str
    est_rel_err: float


# -------------------------
# Résultats spectraux
# -------------------------

@dataclasses.dataclass(frozen=True)
class RootRecord:
    value: float
    residual: float
    trivial: bool = False
    note: str = ""


@dataclasses.dataclass(frozen=True)
class AlphaRecord:
    n: int
    alpha: float
    r: float
    mu: float
    residual: float
    wkb_guess: float


@dataclasses.dataclass(frozen=True)
class ContourCount:
    box: tuple[float, float, float, float]  # (re0, re1, im0, im1)
    count: int
    winding: float
    found_inside: int
    ok: bool
    samples: int
    nudges: int = 0


@dataclasses.dataclass(frozen=True)
class SpectralResult:
    eps: float
    profile_id: str
    real_eigs: tuple[RootRecord, ...] = ()
    alphas: tuple[AlphaRecord, ...] = ()
    contour_counts: tuple[ContourCount, ...] = ()
    method: Mapping[str, Any] = dataclasses.field(default_factory=dict)


# -------------------------
# Réglages numériques
# -------------------------

def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise SettingsError(f"{THREADS_ENV} doit être un entier positif (reçu : {raw!r}).") from None
    if value < 1:
        raise SettingsError(f"{THREADS_ENV} doit être un entier positif (reçu : {raw!r}).")
    return value


@dataclasses.dataclass(frozen=True)
class SolverSettings:
    tol_ode: float = 1e-10
    atol_ode: float = 1e-12
    tol_frob: float = 1e-9
    delta_max: float = 1e-3
    delta_min: float = 1e-8
    lam_max: float = 1e4
    ode_method: str = "DOP853"
    rho_guard: float = 1e-250
    tol_root: float = 1e-12
    chunk_size: int = 64
    threads: int = dataclasses.field(default_factory=default_threads)

    def __post_init__(self) -> None:
        for name in ("tol_ode", "atol_ode", "tol_frob", "delta_max", "delta_min",
                     "lam_max", "rho_guard", "tol_root"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise SettingsError(f"Le réglage {name} doit être un réel strictement positif (reçu : {value!r}).")
        if self.delta_min > self.delta_max:
            raise SettingsError("delta_min doit être inférieur ou égal à delta_max.")
        if self.ode_method not in ("DOP853", "RK45", "RK23"):
            raise SettingsError(f"Méthode d'intégration non prise en charge : {self.ode_method}.")
        if int(self.chunk_size) < 1 or int(self.threads) < 1:
            raise SettingsError("chunk_size et threads doivent être des entiers positifs.")


def settings_from_mapping(data: Mapping[str, Any]) -> SolverSettings:
    """Réglages par défaut complétés par `data` ; les valeurs None sont ignorées."""
    if not isinstance(data, Mapping):
        raise SettingsError("Les réglages doivent être fournis sous forme d'objet clé/valeur.")
    known = {f.name for f in dataclasses.fields(SolverSettings)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise SettingsError(f"Réglage(s) inconnu(s) : {', '.join(unknown)}.")
    return SolverSettings(**{k: v for k, v in data.items() if v is not None})
