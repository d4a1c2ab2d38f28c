# ptsturm - Licence MIT (voir LICENSE.md)
"""Comptage des zéros de d(λ) dans un rectangle par le principe de l'argument."""

from __future__ import annotations

import math
import warnings
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .data_models import ContourCount, CoefficientProfile, RootRecord, SolverSettings
from .shoot import d_batch

ProgressCallback = Callable[[str, dict[str, Any]], None]

INITIAL_SAMPLES = 256
MIN_EDGE_SAMPLES = 8
MAX_ROUNDS = 14
MAX_NUDGES = 3
NUDGE_FRACTION = 0.005
SNAP_TOL = 0.01
REFINE_JUMP = math.pi / 2
MAX_JUMP = math.pi
ZERO_GUARD = 1e-12


class ContourError(RuntimeError):
    """Zéro trop proche du contour (root too close to contour)."""


class ContourNudgeWarning(RuntimeWarning):
    """Le rectangle a été élargi pour éloigner le contour d'un zéro."""


def _check_box(box: Sequence[float]) -> tuple[float, float, float, float]:
    try:
        re0, re1, im0, im1 = (float(v) for v in box)
    except (TypeError, ValueError):
        raise ValueError(f"Rectangle invalide : {box!r} (attendu re0,re1,im0,im1).") from None
    if not (re0 < re1 and im0 < im1) or not all(math.isfinite(v) for v in (re0, re1, im0, im1)):
        raise ValueError(f"Rectangle invalide : {box!r} (re0 < re1 et im0 < im1 requis).")
    return re0, re1, im0, im1


class _Perimeter:
    """Paramétrage du bord orienté dans le sens direct par t ∈ [0, longueur]."""

    def __init__(self, box: tuple[float, float, float, float]):
        re0, re1, im0, im1 = box
        self.corners = [complex(re0, im0), complex(re1, im0), complex(re1, im1), complex(re0, im1)]
        self.lengths = [re1 - re0, im1 - im0, re1 - re0, im1 - im0]
        self.offsets = np.concatenate(([0.0], np.cumsum(self.lengths)))
        self.total = float(self.offsets[-1])

    def point(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        edge = np.clip(np.searchsorted(self.offsets, t, side="right") - 1, 0, 3)
        start = np.asarray(self.corners)[edge]
        end = np.asarray(self.corners[1:] + self.corners[:1])[edge]
        frac = (t - self.offsets[edge]) / np.asarray(self.lengths)[edge]
        return start + frac * (end - start)

    def initial(self, samples: int) -> np.ndarray:
        ts = []
        for k, length in enumerate(self.lengths):
            n = max(MIN_EDGE_SAMPLES, int(round(samples * length / self.total)))
            ts.append(self.offsets[k] + length * np.arange(n) / n)
        return np.concatenate(ts)


def _jumps(values: np.ndarray) -> np.ndarray:
    closed = np.append(values, values[0])
    return np.angle(closed[1:] / closed[:-1])


def _winding(profile: CoefficientProfile, box: tuple[float, float, float, float],
             settings: SolverSettings, progress_cb: Optional[ProgressCallback]) -> tuple[float, int]:
    """Indice de d le long du bord ; ContourError si le suivi de phase échoue."""
    perimeter = _Perimeter(box)
    ts = perimeter.initial(INITIAL_SAMPLES)
    values, phi = d_batch(profile, perimeter.point(ts), settings)
    for round_ in range(MAX_ROUNDS + 1):
        if np.any(np.abs(values) <= ZERO_GUARD * np.maximum(1.0, np.abs(phi))):
            raise ContourError("Zéro de d sur le contour (root too close to contour).")
        jumps = _jumps(values)
        bad = np.nonzero(np.abs(jumps) > REFINE_JUMP)[0]
        if bad.size == 0:
            break
        if round_ == MAX_ROUNDS:
            if np.any(np.abs(jumps) >= MAX_JUMP * (1 - 1e-9)):
                raise ContourError("Saut de phase > π après raffinement maximal (root too close to contour).")
            break
        nxt = np.append(ts, perimeter.total)
        mids = 0.5 * (ts[bad] + nxt[bad + 1])
        new_values, new_phi = d_batch(profile, perimeter.point(mids), settings)
        order = np.argsort(np.concatenate((ts, mids)), kind="stable")
        ts = np.concatenate((ts, mids))[order]
        values = np.concatenate((values, new_values))[order]
        phi = np.concatenate((phi, new_phi))[order]
        if progress_cb is not None:
            progress_cb("contour.refine", {"round": round_ + 1, "samples": int(ts.size)})
    return float(np.sum(_jumps(values)) / (2.0 * math.pi)), int(ts.size)


def _inside(box: tuple[float, float, float, float], roots: Sequence[RootRecord | float]) -> int:
    re0, re1, im0, im1 = box
    if not (im0 < 0.0 < im1):
        return 0
    values = [r.value if isinstance(r, RootRecord) else float(r) for r in roots]
    return sum(1 for v in values if re0 < v < re1)


def _expand(box: tuple[float, float, float, float], attempt: int) -> tuple[float, float, float, float]:
    re0, re1, im0, im1 = box
    h = NUDGE_FRACTION * attempt * max(re1 - re0, im1 - im0)
    return re0 - h, re1 + h, im0 - h, im1 + h


def certify_box(profile: CoefficientProfile, box: Sequence[float],
                found_reals: Sequence[RootRecord | float] = (),
                settings: SolverSettings | None = None,
                progress_cb: Optional[ProgressCallback] = None) -> ContourCount:
    """Nombre de zéros de d dans le rectangle, comparé aux racines réelles trouvées.

    Le rectangle est élargi (au plus trois fois) lorsqu'un zéro est trop
    proche du bord ou que l'indice n'est pas entier à 0,01 près.
    """
    settings = settings or SolverSettings()
    base = _check_box(box)
    current = base
    reason = ""
    for attempt in range(MAX_NUDGES + 1):
        if attempt:
            current = _expand(base, attempt)
            warnings.warn(
                f"Contour élargi ({reason}) : essai {attempt}/{MAX_NUDGES}.",
                ContourNudgeWarning,
                stacklevel=2,
            )
        try:
            winding, samples = _winding(profile, current, settings, progress_cb)
        except ContourError as exc:
            reason = str(exc)
            continue
        count = round(winding)
        if abs(winding - count) <= SNAP_TOL:
            found = _inside(current, found_reals)
            return ContourCount(
                box=current,
                count=int(count),
                winding=winding,
                found_inside=found,
                ok=int(count) == found,
                samples=samples,
                nudges=attempt,
            )
        reason = f"indice {winding:.4f} non entier"
    raise ContourError(f"root too close to contour : {reason}")
