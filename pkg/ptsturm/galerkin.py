# ptsturm - Licence MIT (voir LICENSE.md)
"""Oracle de Galerkin pour le profil sinus.

Dans la base e^{inx}, n = −N..N, l'opérateur iε̃(sin x·u′)′ + iu′ agit par
M[n,n] = −n, M[n+1,n] = −ε̃n(n+1)/2, M[n−1,n] = ε̃n(n−1)/2, avec ε̃ = 2ε/π
pour f = (2/π)·sin x.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy import linalg, sparse

MAX_SIZE = 512
REALITY_TOL = 1e-8


class GalerkinError(RuntimeError):
    """Troncature invalide ou valeurs propres non obtenues."""


@dataclasses.dataclass(frozen=True, eq=False)
class GalerkinMatrix:
    eps: float
    size: int  # N : modes −N..N
    matrix: sparse.csr_matrix

    @property
    def eps_tilde(self) -> float:
        return 2.0 * self.eps / math.pi

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.size, self.size + 1)


def galerkin_matrix(eps: float, size: int) -> GalerkinMatrix:
    """Matrice tridiagonale de L tronquée aux modes |n| ≤ size."""
    size = int(size)
    if not (1 <= size <= MAX_SIZE):
        raise GalerkinError(f"Troncature N = {size} hors de [1, {MAX_SIZE}].")
    eps = float(eps)
    if not math.isfinite(eps) or eps < 0:
        raise GalerkinError(f"ε = {eps} invalide pour la matrice de Galerkin.")
    et = 2.0 * eps / math.pi
    n = np.arange(-size, size + 1, dtype=float)
    main = -n
    lower = -et * n[:-1] * (n[:-1] + 1.0) / 2.0  # M[k+1, k]
    upper = et * n[1:] * (n[1:] - 1.0) / 2.0  # M[k-1, k]
    mat = sparse.diags([lower, main, upper], [-1, 0, 1], format="csr", dtype=complex)
    return GalerkinMatrix(eps=eps, size=size, matrix=mat)


def galerkin_eigs(gm: GalerkinMatrix) -> np.ndarray:
    """Valeurs propres triées par module croissant."""
    try:
        values = linalg.eigvals(gm.matrix.toarray())
    except linalg.LinAlgError as exc:
        raise GalerkinError(f"Solveur de valeurs propres non convergent (N = {gm.size}).") from exc
    if not np.all(np.isfinite(values)):
        raise GalerkinError(f"Valeurs propres non finies (N = {gm.size}).")
    return values[np.lexsort((values.real, np.abs(values)))]


def galerkin_lowest(eps: float, count: int, size: int = 64) -> np.ndarray:
    """Les `count` valeurs propres non nulles de plus petit module, triées par partie réelle.

    Les valeurs propres de grand module de la matrice tronquée ne sont pas
    fiables (paires complexes parasites) : on ne retient que le bas du spectre.
    """
    values = galerkin_eigs(galerkin_matrix(eps, size))
    nonzero = values[np.abs(values) > REALITY_TOL]
    if nonzero.size < count:
        raise GalerkinError(f"Seulement {nonzero.size} valeur(s) propre(s) non nulle(s) pour N = {size}.")
    return np.sort_complex(nonzero[:count])


def imaginary_defect(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=complex)
    return float(np.max(np.abs(values.imag))) if values.size else 0.0
