import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from ptsturm.coeff_descriptor import (
    CoefficientDescriptorError,
    descriptor_dict,
    load_coefficient_descriptor,
    profile_from_mapping,
    resolve_coefficient,
    save_coefficient_descriptor,
)
from ptsturm.data_models import FPRIME0, KIND_CUSTOM, KIND_PIECEWISE_LINEAR, KIND_SINE


def _custom_data(**over):
    xs = np.linspace(0.0, math.pi, 33)
    data = {
        "schema_version": 1,
        "kind": "custom",
        "eps": 0.5,
        "samples": [[float(x), float(FPRIME0 * math.sin(x))] for x in xs],
        "fprime0": FPRIME0,
    }
    data.update(over)
    return data


def test_descripteur_custom_aller_retour(tmp_path):
    profile = profile_from_mapping(_custom_data())
    path = tmp_path / "profil.json"

    save_coefficient_descriptor(path, profile)
    loaded = load_coefficient_descriptor(path)

    assert loaded.kind == KIND_CUSTOM
    assert loaded.eps == 0.5
    xs = np.linspace(0.1, 3.0, 13)
    assert np.allclose(loaded.f(xs), profile.f(xs), atol=1e-14)
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["schema_version"] == 1
    assert data["fprimePi"] == pytest.approx(-FPRIME0)


def test_descripteur_integre_sans_echantillons():
    data = descriptor_dict(profile_from_mapping({"kind": "sine", "eps": 0.7}))

    assert data == {"schema_version": 1, "kind": "sine", "eps": 0.7}


def test_version_absente_acceptee():
    data = _custom_data()
    del data["schema_version"]

    assert profile_from_mapping(data).kind == KIND_CUSTOM


@pytest.mark.parametrize("data, message", [
    ([], "objet JSON"),
    ({"kind": "sine", "eps": 0.5, "schema_version": 2}, "Version"),
    ({"kind": "cosinus", "eps": 0.5}, "inconnu"),
    ({"kind": "sine"}, "eps"),
    ({"kind": "sine", "eps": "0.5"}, "nombre fini"),
    ({"kind": "sine", "eps": True}, "nombre fini"),
    ({"kind": "custom", "eps": 0.5}, "samples"),
    ({"kind": "custom", "eps": 0.5, "samples": [[0.0, 0.0], "x"]}, "Échantillon n°1"),
])
def test_descripteur_invalide(data, message):
    with pytest.raises(CoefficientDescriptorError, match=message):
        profile_from_mapping(data)


def test_descripteur_eps_hors_domaine_signale():
    with pytest.raises(CoefficientDescriptorError, match=r"\(0, π/2\)"):
        profile_from_mapping({"kind": "piecewise_linear", "eps": 2.0})


def test_eps_remplace_par_la_ligne_de_commande():
    profile = profile_from_mapping(_custom_data(), eps_override=0.9)

    assert profile.eps == 0.9


def test_json_invalide(tmp_path):
    path = tmp_path / "casse.json"
    path.write_text("{pas du json", encoding="utf-8")

    with pytest.raises(CoefficientDescriptorError, match="JSON invalide"):
        load_coefficient_descriptor(path)


def test_resolution_nom_integre():
    assert resolve_coefficient("sine", 0.5).kind == KIND_SINE
    assert resolve_coefficient("piecewise_linear", 0.5).kind == KIND_PIECEWISE_LINEAR


def test_resolution_nom_integre_exige_eps():
    with pytest.raises(CoefficientDescriptorError, match="--eps"):
        resolve_coefficient("sine", None)


def test_resolution_chemin_absent(tmp_path):
    with pytest.raises(CoefficientDescriptorError, match="introuvable"):
        resolve_coefficient(str(tmp_path / "absent.json"), 0.5)


def test_resolution_chemin(tmp_path):
    path = tmp_path / "profil.json"
    path.write_text(json.dumps(_custom_data()), encoding="utf-8")

    assert resolve_coefficient(str(path), None).eps == 0.5
