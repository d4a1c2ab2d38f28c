import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy import special

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from ptsturm.coeff import (
    ProfileError,
    WeightsError,
    check_eps,
    derived_weights,
    endpoint_linearization,
    eval_p,
    eps_from_tilde,
    make_custom,
    make_piecewise_linear,
    make_sine,
    spectral_parameter,
    validate,
    wkb_guess,
    wkb_integral,
)
from ptsturm.data_models import FPRIME0, KIND_CUSTOM


def _sine_samples(n: int = 129) -> list[tuple[float, float]]:
    xs = np.linspace(0.0, math.pi, n)
    return [(float(x), float(FPRIME0 * math.sin(x))) for x in xs]


def _custom(**derivatives):
    derivs = {"fprime0": FPRIME0}
    derivs.update(derivatives)
    return make_custom(_sine_samples(), 0.5, derivs)


@pytest.mark.parametrize("builder", [make_sine, make_piecewise_linear])
def test_profils_integres_impairs_et_antiperiodiques(builder):
    profile = builder(0.5)
    xs = np.linspace(-3.0, 3.0, 41)

    assert np.allclose(profile.f(-xs), -profile.f(xs), atol=1e-15)
    assert np.allclose(profile.f(xs + math.pi), -profile.f(xs), atol=1e-14)
    assert profile.f(math.pi / 2) == pytest.approx(1.0)
    assert profile.f(0.0) == 0.0
    assert profile.f(math.pi) == pytest.approx(0.0, abs=1e-15)


def test_f_scalaire_renvoie_un_float():
    assert isinstance(make_sine(0.5).f(1.0), float)
    assert make_piecewise_linear(0.5).fprime(-0.3) == pytest.approx(FPRIME0)


@pytest.mark.parametrize("eps", [0.0, -0.1, 2.0, math.pi / 2, "abc"])
def test_eps_hors_domaine_refuse(eps):
    with pytest.raises(ProfileError, match=r"ε"):
        check_eps(eps)


def test_message_eps_cite_le_domaine_admissible():
    with pytest.raises(ProfileError, match=r"\(0, π/2\)"):
        make_sine(2.0)


def test_eps_depuis_tilde():
    assert eps_from_tilde(0.5) == pytest.approx(math.pi / 4)
    assert eps_from_tilde(1.0) == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("builder", [make_sine, make_piecewise_linear])
def test_validation_profils_integres(builder):
    report = validate(builder(0.5))

    assert report.passed
    assert {c.code for c in report.checks} >= {
        "ODD_SYMMETRY", "ANTIPERIODICITY", "ENDPOINT_ZEROS", "POSITIVITY", "NORMALIZATION", "ORIGIN_SLOPE",
    }


def test_validation_grille_trop_petite():
    with pytest.raises(ProfileError):
        validate(make_sine(0.5), grid_size=8)


def test_profil_custom_reproduit_le_sinus():
    profile = _custom()
    xs = np.linspace(0.05, math.pi - 0.05, 31)

    assert profile.kind == KIND_CUSTOM
    assert np.allclose(profile.f(xs), FPRIME0 * np.sin(xs), atol=1e-4)
    assert profile.fprimePi == pytest.approx(-FPRIME0)
    assert validate(profile).passed


def test_profil_custom_normalisation_obligatoire():
    with pytest.raises(ProfileError, match="2/π"):
        make_custom(_sine_samples(), 0.5, {"fprime0": 0.6})


def test_profil_custom_derivee_origine_absente():
    with pytest.raises(ProfileError, match="absente"):
        make_custom(_sine_samples(), 0.5, {})


def test_profil_custom_valeur_negative_refusee():
    samples = _sine_samples(17)
    samples[8] = (samples[8][0], -0.1)
    with pytest.raises(ProfileError, match="non positive"):
        make_custom(samples, 0.5, {"fprime0": FPRIME0})


def test_profil_custom_extremites_non_nulles():
    samples = [(0.0, 0.2), (1.0, 0.5), (2.0, 0.5), (math.pi, 0.0)]
    with pytest.raises(ProfileError, match="s'annuler"):
        make_custom(samples, 0.5, {"fprime0": FPRIME0})


def test_profil_custom_trop_peu_d_echantillons():
    with pytest.raises(ProfileError, match="au moins 4"):
        make_custom([(0.0, 0.0), (1.0, 0.5)], 0.5, {"fprime0": FPRIME0})


def test_profil_custom_plateau_sans_depassement():
    top = 0.3
    knee = top / FPRIME0
    xs = [0.0, 0.2, knee, 1.0, 1.5, 2.0, math.pi - knee, math.pi - 0.2, math.pi]
    ys = [min(top, FPRIME0 * x, FPRIME0 * (math.pi - x)) for x in xs]
    profile = make_custom(list(zip(xs, ys)), 0.5, {"fprime0": FPRIME0})
    grid = np.linspace(0.0, math.pi, 2001)

    assert float(np.max(profile.f(grid))) <= top + 1e-12
    assert np.all(profile.f(grid[1:-1]) > 0)
    assert profile.f(1.25) == pytest.approx(top, abs=1e-12)


def test_integrale_wkb_affine_par_morceaux():
    assert wkb_integral(make_piecewise_linear(0.5)) == pytest.approx(2 * math.pi, rel=1e-9)


def test_integrale_wkb_sinus():
    expected = math.sqrt(math.pi / 2) * special.beta(0.25, 0.5)
    assert wkb_integral(make_sine(0.5)) == pytest.approx(expected, rel=1e-8)


def test_estimation_wkb_quadratique():
    profile = make_piecewise_linear(0.5)

    assert wkb_guess(profile, 1) == pytest.approx(1 / (4 * math.pi ** 2), rel=1e-9)
    assert wkb_guess(profile, 4) / wkb_guess(profile, 2) == pytest.approx(4.0)
    values = [wkb_guess(profile, n) for n in range(1, 8)]
    assert all(a < b for a, b in zip(values, values[1:]))
    with pytest.raises(ProfileError):
        wkb_guess(profile, 0)


def test_poids_normalises_au_milieu():
    profile = make_sine(0.5)
    weights = derived_weights(profile)

    assert weights.p(math.pi / 2) == pytest.approx(profile.f(math.pi / 2))
    assert weights.w(1.0) == pytest.approx(weights.p(1.0) / profile.f(1.0))
    assert weights.p(0.3) > 0


def test_poids_forme_sturm_liouville():
    # p′ = p/(εf) + p·f′/f, c'est-à-dire (p/f)′ = (p/f)/(εf)
    profile = make_piecewise_linear(0.5)
    weights = derived_weights(profile)
    x, h = 1.0, 1e-5
    slope = (weights.w(x + h) - weights.w(x - h)) / (2 * h)

    assert slope == pytest.approx(weights.w(x) / (profile.eps * profile.f(x)), rel=1e-6)


def test_poids_comportement_en_puissance_pres_de_zero():
    # p(x) ~ C·x^{π/(2ε)}·f(x) quand x → 0
    eps = 0.5
    profile = make_sine(eps)
    weights = derived_weights(profile)
    ratios = [eval_p(weights, x) * x ** (-math.pi / (2 * eps)) / profile.f(x) for x in (0.1, 0.05, 0.025)]

    assert abs(ratios[2] - ratios[1]) < abs(ratios[1] - ratios[0])
    assert ratios[2] == pytest.approx(ratios[1], rel=2e-3)
    # pour le sinus, ∫ dt/(εf) = (π/(2ε))·ln tan(x/2)
    assert ratios[0] == pytest.approx((math.tan(0.05) / 0.1) ** (math.pi / (2 * eps)), rel=1e-8)


@pytest.mark.parametrize("eps", [0.5, 1.2])
def test_poids_affine_par_morceaux_forme_fermee(eps):
    profile = make_piecewise_linear(eps)
    x = math.pi / 4

    expected = profile.f(x) * (x / (math.pi / 2)) ** (math.pi / (2 * eps))
    assert eval_p(derived_weights(profile), x) == pytest.approx(expected, rel=1e-8)


def test_poids_trop_pres_d_une_extremite():
    with pytest.raises(WeightsError):
        derived_weights(make_sine(0.5)).p(1e-12)


def test_parametre_spectral():
    assert spectral_parameter(0.5, 2.0) == pytest.approx(4j)


def test_famille_delta_coincide_aux_noeuds():
    profile = make_sine(0.5)
    delta = 0.2
    family = endpoint_linearization(profile, delta)

    for x in (0.0, delta, math.pi - delta, math.pi, 1.3):
        assert family.f(x) == pytest.approx(profile.f(x), abs=1e-14)
    assert family.fprime0 == pytest.approx(profile.f(delta) / delta)
    assert family.kind == KIND_CUSTOM


def test_famille_delta_pentes_convergent():
    profile = make_sine(0.5)
    defects = [abs(endpoint_linearization(profile, d).fprime0 - profile.fprime0) for d in (0.3, 0.15, 0.075)]

    assert defects[0] > defects[1] > defects[2]


def test_famille_delta_hors_intervalle():
    with pytest.raises(ProfileError):
        endpoint_linearization(make_sine(0.5), 2.0)
