# ptsturm - Licence MIT (voir LICENSE.md)
"""Écriture des résultats : tableaux CSV, JSON, figures SVG et rapport verify."""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import markdown
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from . import __version__  # noqa: E402
from .data_models import AlphaRecord, CoefficientProfile, ContourCount, RhoSample, RootRecord, SolverSettings  # noqa: E402
from .validation import ValidationReport, format_validation_summary  # noqa: E402

CSV_FLOAT_FORMAT = "%.17g"
RAY_TOL = 1e-9
RAY_MODULUS_TOL = 1e-4

SECTOR_INNER = "inner"
SECTOR_OUTER = "outer"
SECTOR_RAY = "ray"

EIGS_COLUMNS = ["n", "lambda", "residual", "paired", "certified_box", "box_count"]
ALPHAS_COLUMNS = ["n", "alpha", "r", "mu", "residual", "wkb_guess"]
RHO_COLUMNS = ["re_z", "im_z", "modulus", "sector", "violates_claim", "flag"]


# -------------------------
# Sérialisation
# -------------------------

def to_jsonable(value: Any) -> Any:
    """Complexes en [re, im], tableaux et dataclasses en structures JSON."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)
                if not callable(getattr(value, f.name))}
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Path, data: Any) -> None:
    Path(path).write_text(
        json.dumps(to_jsonable(data), ensure_ascii=False, indent=2, allow_nan=False) + "\n",
        encoding="utf-8",
    )


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, keep_default_na=False, na_values=[""])


# -------------------------
# Tableaux
# -------------------------

def signed_indices(records: Sequence[RootRecord]) -> list[int]:
    """Indices ±1, ±2, … par module croissant ; 0 pour la racine triviale."""
    neg = sorted((r.value for r in records if r.value < 0), reverse=True)
    pos = sorted(r.value for r in records if r.value > 0)
    out = []
    for r in records:
        if r.value > 0:
            out.append(pos.index(r.value) + 1)
        elif r.value < 0:
            out.append(-(neg.index(r.value) + 1))
        else:
            out.append(0)
    return out


def paired_flags(records: Sequence[RootRecord], rtol: float = 1e-9) -> list[bool]:
    """Vrai si l'opposée de la valeur figure aussi dans le tableau (toujours vrai pour λ = 0)."""
    values = [r.value for r in records]
    return [
        r.value == 0.0 or any(abs(v + r.value) <= rtol * max(1.0, abs(r.value)) for v in values)
        for r in records
    ]


def box_label(box: Optional[Sequence[float]]) -> str:
    return "" if box is None else ",".join(f"{v:.17g}" for v in box)


def eigs_frame(records: Sequence[RootRecord], contour: Optional[ContourCount] = None,
               oracle: Optional[tuple[str, Sequence[float]]] = None) -> pd.DataFrame:
    frame = pd.DataFrame({
        "n": signed_indices(records),
        "lambda": [r.value for r in records],
        "residual": [r.residual for r in records],
        "paired": paired_flags(records),
        "certified_box": [box_label(contour.box if contour else None)] * len(records),
        "box_count": [contour.count if contour else -1] * len(records),
    }, columns=EIGS_COLUMNS)
    if oracle is not None:
        name, values = oracle
        frame[name] = list(values)
    return frame


def alphas_frame(alphas: Sequence[AlphaRecord]) -> pd.DataFrame:
    return pd.DataFrame([dataclasses.asdict(a) for a in alphas], columns=ALPHAS_COLUMNS)


def sector_of(z: complex) -> str:
    """Secteur de z : inner si Re z² > 0, outer si Re z² < 0, ray sur les bissectrices."""
    z = complex(z)
    if z == 0:
        return SECTOR_RAY
    c = math.cos(2.0 * math.atan2(z.imag, z.real))
    if abs(c) < RAY_TOL:
        return SECTOR_RAY
    return SECTOR_INNER if c > 0 else SECTOR_OUTER


def violates_claim(sector: str, modulus: float, flag: str) -> bool:
    if flag or not math.isfinite(modulus):
        return False
    if sector == SECTOR_INNER:
        return modulus >= 1.0
    if sector == SECTOR_OUTER:
        return modulus <= 1.0
    return abs(modulus - 1.0) > RAY_MODULUS_TOL


def polar_grid(radii: int, angles: int, r_max: float) -> np.ndarray:
    if int(radii) < 2 or int(angles) < 2:
        raise ValueError("La grille polaire exige au moins 2 rayons et 2 angles.")
    if not (r_max > 0 and math.isfinite(r_max)):
        raise ValueError(f"Rayon maximal invalide : {r_max}.")
    rs = r_max * np.arange(1, int(radii) + 1) / int(radii)
    thetas = 2.0 * math.pi * np.arange(int(angles)) / int(angles)
    return (rs[:, None] * np.exp(1j * thetas[None, :])).ravel()


def rho_frame(samples: Iterable[RhoSample]) -> pd.DataFrame:
    rows = []
    for s in samples:
        sector = sector_of(s.z)
        rows.append({
            "re_z": s.z.real,
            "im_z": s.z.imag,
            "modulus": s.modulus,
            "sector": sector,
            "violates_claim": violates_claim(sector, s.modulus, s.flag),
            "flag": s.flag,
        })
    return pd.DataFrame(rows, columns=RHO_COLUMNS)


def rho_summary(frame: pd.DataFrame) -> str:
    clean = frame[frame["flag"] == ""]
    inner = clean.loc[clean["sector"] == SECTOR_INNER, "modulus"]
    outer = clean.loc[clean["sector"] == SECTOR_OUTER, "modulus"]
    inner_max = f"{inner.max():.6g}" if len(inner) else "n/a"
    outer_min = f"{outer.min():.6g}" if len(outer) else "n/a"
    return (
        f"max |ρ| secteur intérieur = {inner_max} ; min |ρ| secteur extérieur = {outer_min} ; "
        f"{int(frame['violates_claim'].sum())} violation(s), {int((frame['flag'] != '').sum())} case(s) signalée(s)"
    )


# -------------------------
# Figures
# -------------------------

def plot_rho_svg(frame: pd.DataFrame, path: Path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.5, 6))
    ok = frame[frame["flag"] == ""]
    logm = np.log10(np.clip(ok["modulus"].to_numpy(dtype=float), 1e-12, None))
    span = max(float(np.max(np.abs(logm))) if logm.size else 1.0, 1e-3)
    sc = ax.scatter(ok["re_z"], ok["im_z"], c=logm, cmap="RdBu_r", vmin=-span, vmax=span, s=14)
    flagged = frame[frame["flag"] != ""]
    if len(flagged):
        ax.scatter(flagged["re_z"], flagged["im_z"], marker="x", color="black", s=18, label="proximité zéro/pôle")
    bad = frame[frame["violates_claim"]]
    if len(bad):
        ax.scatter(bad["re_z"], bad["im_z"], facecolors="none", edgecolors="orange", s=40, label="violation")
    r = float(np.hypot(frame["re_z"], frame["im_z"]).max()) if len(frame) else 1.0
    for k in (1, 3, 5, 7):
        theta = k * math.pi / 4
        ax.plot([0, r * math.cos(theta)], [0, r * math.sin(theta)], color="0.3", lw=0.8, ls="--")
    fig.colorbar(sc, ax=ax, label="log10 |ρ(z)|")
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    if title:
        ax.set_title(title)
    if len(flagged) or len(bad):
        ax.legend(loc="lower right", fontsize="small")
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_eigs_svg(profile: CoefficientProfile, records: Sequence[RootRecord], path: Path,
                  settings: SolverSettings | None = None, functions: int = 3) -> None:
    """Valeurs propres sur l'axe réel et premières fonctions propres |φ|, Re φ."""
    from .shoot import phi_along

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 7))
    values = [r.value for r in records]
    ax1.scatter(values, np.zeros(len(values)), marker="o", color="tab:blue")
    for r in records:
        if r.trivial:
            ax1.annotate("0 (triviale)", (0.0, 0.0), textcoords="offset points", xytext=(0, 8),
                         ha="center", fontsize="small")
    ax1.axhline(0.0, color="0.5", lw=0.6)
    ax1.set_xlabel("λ")
    ax1.set_yticks([])
    ax1.set_title(f"Valeurs propres réelles ({profile.profile_id}, ε = {profile.eps:g})")

    xs = np.linspace(-math.pi * 0.999, math.pi * 0.999, 401)
    chosen = sorted((r for r in records if r.value > 0), key=lambda r: r.value)[:functions]
    for r in chosen:
        phi = phi_along(profile, r.value, xs, settings)
        line, = ax2.plot(xs, np.abs(phi), label=f"|φ|, λ = {r.value:.6g}")
        ax2.plot(xs, phi.real, color=line.get_color(), ls=":", lw=0.9)
    ax2.set_xlabel("x")
    if chosen:
        ax2.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# -------------------------
# Rapport verify et manifeste
# -------------------------

def verify_markdown(report: ValidationReport, title: str = "Recette ptsturm") -> str:
    lines = [f"# {title}", "", format_validation_summary(report), "",
             "| Contrôle | Sujet | Statut | Écart | Tolérance | Détail |",
             "|---|---|---|---|---|---|"]
    for c in report.checks:
        status = "OK" if c.passed else "**ÉCHEC**"
        message = c.message.replace("|", "\\|")
        lines.append(f"| {c.code} | {c.subject} | {status} | {c.violation:.3e} | {c.tolerance:.1e} | {message} |")
    return "\n".join(lines) + "\n"


def write_verify_report(report: ValidationReport, md_path: Path, html_path: Path) -> None:
    text = verify_markdown(report)
    Path(md_path).write_text(text, encoding="utf-8")
    body = markdown.markdown(text, extensions=["extra", "sane_lists"])
    Path(html_path).write_text(
        "<!doctype html>\n<html lang=\"fr\"><head><meta charset=\"utf-8\">"
        "<title>Recette ptsturm</title></head><body>\n" + body + "\n</body></html>\n",
        encoding="utf-8",
    )


def manifest_dict(command: str, config: Mapping[str, Any], settings: SolverSettings,
                  wall_time: float, files: Sequence[str]) -> dict[str, Any]:
    return {
        "tool": "ptsturm",
        "version": __version__,
        "command": command,
        "config": to_jsonable(config),
        "settings": to_jsonable(settings),
        "wall_time_s": round(float(wall_time), 3),
        "files": sorted(files),
    }
