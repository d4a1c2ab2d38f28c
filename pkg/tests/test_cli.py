import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

import pt_spectrum
import ptsturm.orchestrator as orchestrator
from ptsturm.orchestrator import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, RunConfig, UsageError, main
from ptsturm.spectrum import SpectralSearchError
from ptsturm.validation import CheckResult, ValidationReport


def _leftovers(out: Path) -> list[Path]:
    return sorted(out.parent.glob(f".{out.name}.*"))


def _manifest(out: Path) -> dict:
    return json.loads((out / "run-manifest.json").read_text(encoding="utf-8"))


def test_facade_reexporte_le_point_d_entree():
    assert pt_spectrum.main is main
    assert callable(pt_spectrum.find_real_eigs)


def test_eps_hors_domaine_code_usage(tmp_path, capsys):
    out = tmp_path / "res"
    code = main(["eigs", "--coeff", "sine", "--eps", "2.0", "--out", str(out)])

    assert code == EXIT_USAGE
    assert "(0, π/2)" in capsys.readouterr().err
    assert not out.exists()
    assert _leftovers(out) == []


def test_commande_inconnue_code_usage(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["spectre", "--out", str(tmp_path / "res")])

    assert info.value.code == EXIT_USAGE


def test_box_mal_formee_code_usage(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["certify", "--coeff", "sine", "--eps", "0.5", "--box", "0,1,2", "--out", str(tmp_path / "res")])

    assert info.value.code == EXIT_USAGE


def test_certify_sans_box(tmp_path, capsys):
    code = main(["certify", "--coeff", "sine", "--eps", "0.5", "--out", str(tmp_path / "res")])

    assert code == EXIT_USAGE
    assert "--box" in capsys.readouterr().err


def test_coeff_obligatoire_hors_verify(tmp_path):
    assert main(["alphas", "--out", str(tmp_path / "res")]) == EXIT_USAGE


def test_only_inconnu(tmp_path, capsys):
    code = main(["verify", "--only", "wronskian,magie", "--out", str(tmp_path / "res")])

    assert code == EXIT_USAGE
    assert "magie" in capsys.readouterr().err


def test_oracle_incompatible_avec_le_coefficient(tmp_path, capsys):
    code = main(["eigs", "--coeff", "sine", "--eps", "0.5", "--count", "3", "--oracle", "bessel",
                 "--out", str(tmp_path / "res")])

    assert code == EXIT_USAGE
    assert "piecewise_linear" in capsys.readouterr().err


def test_check_coeff_ecrit_rapport_et_manifeste(tmp_path, capsys):
    out = tmp_path / "res"
    code = main(["check-coeff", "--coeff", "sine", "--eps", "0.5", "--out", str(out)])

    assert code == EXIT_OK
    frame = pd.read_csv(out / "validation.csv")
    assert frame["passed"].all()
    manifest = _manifest(out)
    assert manifest["command"] == "check-coeff"
    assert manifest["files"] == ["run-manifest.json", "validation.csv"]
    assert manifest["config"]["eps"] == 0.5
    assert f"OK -> {out.resolve()}" in capsys.readouterr().out
    assert _leftovers(out) == []


def test_verify_un_seul_controle(tmp_path):
    out = tmp_path / "res"
    code = main(["verify", "--only", "wronskian", "--out", str(out)])

    assert code == EXIT_OK
    assert "wronskian" in (out / "verify.md").read_text(encoding="utf-8")
    assert (out / "verify.html").read_text(encoding="utf-8").startswith("<!doctype html>")
    assert list(pd.read_csv(out / "verify.csv")["code"]) == ["wronskian"]


def test_verify_en_echec_code_2(tmp_path, monkeypatch):
    def failing(settings, only, progress_cb):
        report = ValidationReport()
        report.add(CheckResult("reality", "sine ε=0.5", 1.0, 1e-6, "racine hors de l'axe réel"))
        return report

    monkeypatch.setattr(orchestrator, "run_acceptance", failing)
    out = tmp_path / "res"

    assert main(["verify", "--out", str(out)]) == EXIT_VERIFY
    assert "ÉCHEC" in (out / "verify.md").read_text(encoding="utf-8")


def test_echec_numerique_ecrit_un_diagnostic(tmp_path, monkeypatch, capsys):
    def failing(*args, **kwargs):
        raise SpectralSearchError("crochet manqué", np.array([0.0, 0.5, 1.0]))

    monkeypatch.setattr(orchestrator, "find_alphas", failing)
    out = tmp_path / "res"

    code = main(["alphas", "--coeff", "sine", "--eps", "0.5", "--count", "3", "--out", str(out)])

    assert code == EXIT_NUMERIC
    diagnostic = json.loads((out / "diagnostic.json").read_text(encoding="utf-8"))
    assert diagnostic["error"] == "SpectralSearchError"
    assert diagnostic["scanned_grid"] == [0.0, 0.5, 1.0]
    assert diagnostic["config"]["count"] == 3
    assert not (out / "alphas.csv").exists()
    assert "diagnostic.json" in capsys.readouterr().err


def test_echec_numerique_conserve_les_anciens_resultats(tmp_path, monkeypatch):
    out = tmp_path / "res"
    out.mkdir()
    (out / "alphas.csv").write_text("ancien", encoding="utf-8")

    def failing(*args, **kwargs):
        raise SpectralSearchError("crochet manqué")

    monkeypatch.setattr(orchestrator, "find_alphas", failing)

    assert main(["alphas", "--coeff", "sine", "--eps", "0.5", "--out", str(out)]) == EXIT_NUMERIC
    assert (out / "alphas.csv").read_text(encoding="utf-8") == "ancien"
    assert "scanned_grid" not in json.loads((out / "diagnostic.json").read_text(encoding="utf-8"))


def test_sortie_fichier_existant(tmp_path, capsys):
    out = tmp_path / "res"
    out.write_text("pas un dossier", encoding="utf-8")

    assert main(["check-coeff", "--coeff", "sine", "--eps", "0.5", "--out", str(out)]) == EXIT_NUMERIC
    assert out.read_text(encoding="utf-8") == "pas un dossier"
    assert "pas un dossier" in capsys.readouterr().err


def test_rho_map_petite_grille(tmp_path):
    out = tmp_path / "res"
    code = main(["rho-map", "--coeff", "sine", "--eps", "0.5", "--grid", "2x8", "--rmax", "1",
                 "--out", str(out)])

    assert code == EXIT_OK
    frame = pd.read_csv(out / "rho.csv", keep_default_na=False)
    assert len(frame) == 16
    assert set(frame["sector"]) == {"inner", "outer", "ray"}
    assert (out / "rho.svg").read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_config_validee_a_la_construction(tmp_path):
    with pytest.raises(UsageError, match="--count"):
        RunConfig(command="eigs", out=tmp_path, coeff="sine", count=0)
    with pytest.raises(UsageError, match="--grid"):
        RunConfig(command="rho-map", out=tmp_path, coeff="sine", grid=(1, 8))
    with pytest.raises(UsageError, match="--tol-ode"):
        RunConfig(command="eigs", out=tmp_path, coeff="sine", tol_ode=-1.0)


def test_reglages_depuis_la_ligne_de_commande(tmp_path):
    cfg = RunConfig(command="eigs", out=tmp_path, coeff="sine", tol_ode=1e-9)

    assert cfg.settings().tol_ode == 1e-9
    assert cfg.settings().tol_root == 1e-12


def test_eigs_affine_par_morceaux_avec_oracle_bessel(tmp_path):
    out = tmp_path / "res"
    code = main(["eigs", "--coeff", "piecewise_linear", "--eps", "0.5", "--count", "3", "--oracle", "bessel",
                 "--out", str(out)])

    assert code == EXIT_OK
    frame = pd.read_csv(out / "eigs.csv", keep_default_na=False)
    assert list(frame["n"]) == [-1, 0, 1]
    assert frame["paired"].all()
    assert frame["lambda"].iloc[0] == pytest.approx(-frame["lambda"].iloc[2], rel=1e-9)
    assert (frame["bessel_residual"] < 1e-5).all()
    assert (frame["box_count"] == 3).all()
    result = json.loads((out / "eigs.json").read_text(encoding="utf-8"))
    assert result["contour_counts"][0]["ok"] is True
    assert sorted(_manifest(out)["files"]) == ["eigs.csv", "eigs.json", "eigs.svg", "run-manifest.json"]


def test_eigs_nombre_pair_signale_la_valeur_sans_opposee(tmp_path, capsys):
    out = tmp_path / "res"
    code = main(["eigs", "--coeff", "piecewise_linear", "--eps", "0.5", "--count", "4", "--oracle", "bessel",
                 "--out", str(out)])

    assert code == EXIT_OK
    frame = pd.read_csv(out / "eigs.csv", keep_default_na=False)
    assert list(frame["n"]) == [-2, -1, 0, 1]
    assert list(frame["paired"]) == [False, True, True, True]
    assert (frame["bessel_residual"] < 1e-5).all()
    assert "sans son opposée" in capsys.readouterr().out
