# ptsturm - Licence MIT (voir LICENSE.md)
"""Descripteur JSON d'un coefficient f (lecture, écriture, construction)."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Optional

from .coeff import ProfileError, make_custom, make_piecewise_linear, make_sine
from .data_models import KIND_CUSTOM, KIND_PIECEWISE_LINEAR, KIND_SINE, PROFILE_KINDS, CoefficientProfile


DESCRIPTOR_SCHEMA_VERSION = 1
DERIVATIVE_FIELDS = ("fprime0", "fprimePi", "fsecond0", "fsecondPi")
BUILTIN_NAMES = (KIND_SINE, KIND_PIECEWISE_LINEAR)


class CoefficientDescriptorError(ValueError):
    """Descripteur de coefficient invalide ou illisible."""


def _number(data: dict[str, Any], key: str, *, required: bool = False) -> Optional[float]:
    value = data.get(key)
    if value is None:
        if required:
            raise CoefficientDescriptorError(f"Champ {key} absent du descripteur.")
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise CoefficientDescriptorError(f"La valeur du champ {key} doit être un nombre fini.")
    return float(value)


def _samples(data: dict[str, Any]) -> list[tuple[float, float]]:
    raw = data.get("samples")
    if not isinstance(raw, list) or not raw:
        raise CoefficientDescriptorError("Un coefficient custom exige une liste samples de couples [x, fx].")
    out = []
    for i, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
            raise CoefficientDescriptorError(f"Échantillon n°{i} invalide : {pair!r}.")
        out.append((float(pair[0]), float(pair[1])))
    return out


def profile_from_mapping(data: Any, *, eps_override: Optional[float] = None) -> CoefficientProfile:
    if not isinstance(data, dict):
        raise CoefficientDescriptorError("Le descripteur de coefficient doit être un objet JSON.")

    version = data.get("schema_version", DESCRIPTOR_SCHEMA_VERSION)
    if version != DESCRIPTOR_SCHEMA_VERSION:
        raise CoefficientDescriptorError(f"Version du descripteur non prise en charge : {version}.")

    kind = data.get("kind")
    if kind not in PROFILE_KINDS:
        raise CoefficientDescriptorError(
            f"Type de coefficient inconnu : {kind!r} (attendu : {', '.join(PROFILE_KINDS)})."
        )
    eps = eps_override if eps_override is not None else _number(data, "eps", required=True)

    try:
        if kind == KIND_SINE:
            return make_sine(eps)
        if kind == KIND_PIECEWISE_LINEAR:
            return make_piecewise_linear(eps)
        derivatives = {key: _number(data, key) for key in DERIVATIVE_FIELDS}
        return make_custom(_samples(data), eps, derivatives)
    except ProfileError as exc:
        raise CoefficientDescriptorError(str(exc)) from exc


def load_coefficient_descriptor(path: Path, *, eps_override: Optional[float] = None) -> CoefficientProfile:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CoefficientDescriptorError(f"Descripteur de coefficient illisible : {path}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CoefficientDescriptorError(f"JSON invalide dans le descripteur : {exc}") from exc
    return profile_from_mapping(data, eps_override=eps_override)


def resolve_coefficient(source: str, eps: Optional[float]) -> CoefficientProfile:
    """Nom intégré (sine, piecewise_linear) ou chemin d'un descripteur JSON."""
    if source in BUILTIN_NAMES:
        if eps is None:
            raise CoefficientDescriptorError(f"--eps est obligatoire avec le coefficient intégré {source}.")
        return profile_from_mapping({"kind": source, "eps": eps})
    path = Path(source)
    if not path.exists():
        raise CoefficientDescriptorError(
            f"Coefficient introuvable : {source} (ni fichier, ni nom intégré parmi {', '.join(BUILTIN_NAMES)})."
        )
    return load_coefficient_descriptor(path, eps_override=eps)


def descriptor_dict(profile: CoefficientProfile) -> dict[str, Any]:
    data: dict[str, Any] = {
        "schema_version": DESCRIPTOR_SCHEMA_VERSION,
        "kind": profile.kind,
        "eps": profile.eps,
    }
    if profile.kind == KIND_CUSTOM:
        if profile.samples is None:
            raise CoefficientDescriptorError("Profil custom sans échantillons : descripteur impossible.")
        data["samples"] = [[x, y] for x, y in profile.samples]
        data["fprime0"] = profile.fprime0
        data["fprimePi"] = profile.fprimePi
        data["fsecond0"] = profile.fsecond0
        data["fsecondPi"] = profile.fsecondPi
    return data


def save_coefficient_descriptor(path: Path, profile: CoefficientProfile) -> None:
    Path(path).write_text(
        json.dumps(descriptor_dict(profile), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
