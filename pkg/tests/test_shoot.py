import cmath
import math
import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from ptsturm.coeff import make_piecewise_linear, make_sine
from ptsturm.data_models import SolverSettings
from ptsturm.shoot import (
    FLAG_PROXIMITY,
    LambdaRangeError,
    PoleProximityError,
    bessel_eig_residual,
    bessel_phi_at_pi,
    d_batch,
    d_of_lambda,
    g_of_z,
    phi_along,
    phi_at_minus_pi,
    phi_at_pi,
    phi_at_pi_batch,
    quadruple_defect,
    rho_bessel,
    rho_general,
    rho_samples,
    sign_changes_along,
)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


@pytest.mark.parametrize("builder", [make_sine, make_piecewise_linear])
def test_lambda_nul_solution_constante(builder):
    result = phi_at_pi(builder(0.5), 0.0)

    assert result.phi_pi == pytest.approx(1.0, abs=1e-12)
    assert result.est_err < 1e-8
    assert d_of_lambda(builder(0.5), 0.0) == 0


@pytest.mark.parametrize("lam", [1.0 + 1.0j, -2.5 + 0.3j, 3.0, -1.5j])
def test_tir_contre_forme_fermee_de_bessel(lam):
    profile = make_piecewise_linear(0.5)
    shot = phi_at_pi(profile, lam, estimate_error=False).phi_pi

    assert _rel(shot, bessel_phi_at_pi(0.5, lam)) < 1e-5


@pytest.mark.parametrize("builder", [make_sine, make_piecewise_linear])
@pytest.mark.parametrize("lam", [0.7 + 0.2j, -3.0 + 2.0j, 4.0])
def test_symetrie_reflexion(builder, lam):
    profile = builder(0.5)
    left = phi_at_minus_pi(profile, lam).phi_pi
    right = phi_at_pi(profile, -lam, estimate_error=False).phi_pi

    assert _rel(left, right) < 1e-7


@pytest.mark.parametrize("lam", [0.7 + 0.2j, -3.0 + 2.0j])
def test_symetrie_conjugaison(lam):
    profile = make_sine(0.5)
    values = phi_at_pi_batch(profile, [lam, -np.conj(lam)])

    assert _rel(np.conj(values[0]), values[1]) < 1e-7


def test_phi_reelle_sur_l_axe_imaginaire():
    values = phi_at_pi_batch(make_sine(0.5), [-0.5j, -2.0j, -7.0j])

    assert np.all(np.abs(values.imag) < 1e-9 * np.maximum(1.0, np.abs(values)))


def test_lot_et_appels_isoles_concordent():
    profile = make_sine(0.5)
    lams = [0.5, 2.0 + 1.0j, -3.0]
    batch = phi_at_pi_batch(profile, lams)

    for lam, value in zip(lams, batch):
        assert _rel(value, phi_at_pi(profile, lam, estimate_error=False).phi_pi) < 1e-7


def test_lot_parallele_identique_au_sequentiel():
    profile = make_sine(0.5)
    lams = np.linspace(-4.0, 4.0, 6) + 0.5j
    serial = phi_at_pi_batch(profile, lams, SolverSettings(threads=1, chunk_size=1))
    parallel = phi_at_pi_batch(profile, lams, SolverSettings(threads=3, chunk_size=1))

    assert np.array_equal(serial, parallel)


def test_lambda_hors_domaine():
    with pytest.raises(LambdaRangeError, match="lam_max"):
        phi_at_pi(make_sine(0.5), 2e4)
    with pytest.raises(LambdaRangeError):
        phi_at_pi_batch(make_sine(0.5), [complex(math.nan, 0.0)])


def test_d_sur_l_axe_reel_est_imaginaire_pur():
    d, phi = d_batch(make_sine(0.5), [1.3, 2.7])

    assert np.all(np.abs(d.real) < 1e-8 * np.maximum(1.0, np.abs(phi)))
    assert np.allclose(d, 2j * phi.imag, atol=1e-8)


def test_g_et_phi():
    profile = make_sine(0.5)
    z = 0.8 + 0.3j

    assert g_of_z(profile, z) == pytest.approx(phi_at_pi(profile, 1j * z * z, estimate_error=False).phi_pi,
                                              rel=1e-7)


def test_rho_module_un_sur_les_bissectrices():
    profile = make_sine(0.5)
    zs = [1.2 * cmath.exp(1j * k * math.pi / 4) for k in (1, 3, 5, 7)]

    for sample in rho_samples(profile, zs):
        assert sample.flag == ""
        assert abs(sample.modulus - 1.0) < 1e-6


def test_rho_secteurs():
    profile = make_piecewise_linear(0.5)
    inner, outer = rho_samples(profile, [1.0 + 0.1j, 1.0 * cmath.exp(0.4j * math.pi)])

    assert inner.modulus < 1.0
    assert outer.modulus > 1.0


def test_rho_pres_d_un_zero_signale():
    profile = make_sine(0.5)
    settings = SolverSettings(rho_guard=1e300)
    sample = rho_samples(profile, [1.0], settings)[0]

    assert sample.flag == FLAG_PROXIMITY
    assert math.isnan(sample.modulus)
    with pytest.raises(PoleProximityError):
        rho_general(profile, 1.0, settings)


def test_phi_le_long_de_l_intervalle():
    profile = make_sine(0.5)
    lam = 1.0 + 0.5j
    xs = [-2.0, 0.0, 1e-9, 1.0, math.pi - 1e-3]
    values = phi_along(profile, lam, xs)

    assert values[1] == pytest.approx(1.0)
    assert values[2] == pytest.approx(1.0, abs=1e-8)
    assert _rel(values[0], phi_along(profile, -lam, [2.0])[0]) < 1e-12
    assert _rel(values[4], phi_at_pi(profile, lam, estimate_error=False).phi_pi) < 1e-2


def test_quadruplet_en_lambda_nul():
    assert quadruple_defect(make_sine(0.5), 0.0) == 0.0


def test_oscillations_sous_le_premier_zero():
    assert sign_changes_along(make_sine(0.5), -0.001j) == 0


def test_residu_bessel_et_rho_bessel():
    assert bessel_eig_residual(0.5, 0.0) == 0.0
    assert abs(rho_bessel(0.5, 1.0)) < 1.0


def test_forme_fermee_de_bessel_ordre_eleve():
    # ε = 0.3 : ν = π/0.6 ≈ 5.24, arguments juste au-delà du rayon de la série
    profile = make_piecewise_linear(0.3)
    closed = bessel_phi_at_pi(0.3, 6.0 - 2.0j)

    assert closed == pytest.approx(-5.4309 - 4.2576j, abs=1e-3)
    assert _rel(phi_at_pi(profile, 6.0 - 2.0j, estimate_error=False).phi_pi, closed) < 1e-6


@pytest.mark.parametrize("lam", [8.0 + 3.0j, -5.0 + 5.0j])
def test_forme_fermee_de_bessel_petit_eps(lam):
    profile = make_piecewise_linear(0.2)
    closed = bessel_phi_at_pi(0.2, lam)

    assert _rel(phi_at_pi(profile, lam, estimate_error=False).phi_pi, closed) < 1e-6


@pytest.mark.parametrize("lam", [50.0, 20.0 - 5.0j])
def test_erreur_estimee_sous_tol_ode(lam):
    settings = SolverSettings()
    result = phi_at_pi(make_sine(0.5), lam, settings)

    assert 0.0 <= result.est_err <= settings.tol_ode


def test_resserrer_tol_ode_reduit_l_erreur():
    profile = make_sine(0.5)
    lams = [3.0, 10.0 + 2.0j]
    reference = phi_at_pi_batch(profile, lams, SolverSettings(tol_ode=1e-12))

    def error(tol):
        values = phi_at_pi_batch(profile, lams, SolverSettings(tol_ode=tol))
        return sum(_rel(v, r) for v, r in zip(values, reference))

    assert error(2.5e-7) <= error(1e-6) / 2.0
