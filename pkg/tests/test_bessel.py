import math
import sys
from pathlib import Path

import pytest
from scipy import special

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from ptsturm.bessel import (
    BesselRangeError,
    ResonantOrderError,
    bessel_eval,
    bessel_j,
    bessel_j_prime,
    reduced_bessel,
    zeta_functions,
    zeta_wronskian,
)
from ptsturm.data_models import METHOD_ASYMPTOTIC, METHOD_SERIES


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, math.pi, 4.3])
@pytest.mark.parametrize("z", [0.7, 3.0 + 1.0j, -2.5 + 0.5j, 6.0j, 9.0 - 2.0j])
def test_serie_entiere_contre_scipy(nu, z):
    assert _rel(bessel_j(nu, z), special.jv(nu, z)) < 1e-11


@pytest.mark.parametrize("nu", [0.5, 1.5, math.pi])
@pytest.mark.parametrize("z", [30.0, 25.0 + 4.0j, -40.0 + 3.0j, 20.0 - 6.0j])
def test_developpement_asymptotique_contre_scipy(nu, z):
    assert _rel(bessel_j(nu, z), special.jv(nu, z)) < 1e-10


@pytest.mark.parametrize("nu, z", [(1.5, 2.0 + 1.0j), (math.pi, 5.0), (2.2, 18.0 + 2.0j)])
def test_derivee_contre_scipy(nu, z):
    assert _rel(bessel_j_prime(nu, z), special.jvp(nu, z)) < 1e-10


def test_valeurs_en_zero():
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(1.5, 0.0) == 0.0
    assert bessel_j_prime(1.0, 0.0) == 0.5
    with pytest.raises(BesselRangeError):
        bessel_j_prime(0.5, 0.0)


def test_methode_selon_le_module():
    assert bessel_eval(1.5, 3.0).method == METHOD_SERIES
    assert bessel_eval(1.5, 40.0).method == METHOD_ASYMPTOTIC
    assert bessel_eval(1.5, 3.0).est_rel_err < 1e-12


def test_ordre_negatif_entier_par_reflexion():
    assert bessel_j(-3.0, 2.0) == pytest.approx(-special.jv(3.0, 2.0), rel=1e-13)


def test_argument_hors_domaine():
    with pytest.raises(BesselRangeError, match="hors du domaine"):
        bessel_j(1.0, 2e4)
    with pytest.raises(BesselRangeError, match="hors du domaine"):
        bessel_j(1.0, 50.0 + 800.0j)


def test_ordre_hors_domaine():
    with pytest.raises(BesselRangeError):
        bessel_j(80.0, 1.0)


def test_fonction_reduite_en_zero_et_relation_avec_j():
    nu, t = 1.7, 2.0 + 0.5j
    w = 2.0 * (t ** 0.5)

    assert reduced_bessel(nu, 0.0) == pytest.approx(special.rgamma(nu + 1.0))
    assert _rel(reduced_bessel(nu, t), special.jv(nu, w) / (w / 2) ** nu) < 1e-12


def test_serie_resommee_en_precision_etendue():
    # forte compensation : la série réelle alterne sur un grand argument
    nu = 0.3
    value = reduced_bessel(nu, 100.0)
    expected = special.jv(nu, 20.0) / 10.0 ** nu

    assert _rel(value, expected) < 1e-9


@pytest.mark.parametrize("nu", [0.7, 1.6, math.pi, 3.4])
@pytest.mark.parametrize("lam", [1.0 + 0.5j, -2.0 + 3.0j, 4.0])
@pytest.mark.parametrize("z", [-1.2, -0.4])
def test_wronskien_forme_fermee(nu, lam, z):
    _, z1, z2, _, z1p, z2p = zeta_functions(nu, lam, z)
    closed = zeta_wronskian(nu, lam, z)

    assert abs(z1 * z2p - z1p * z2 - closed) / abs(closed) < 1e-8


def test_zeta_deux_en_zero():
    nu = 1.6
    _, _, z2, _, _, _ = zeta_functions(nu, 1.0 + 1.0j, 0.0)

    assert _rel(z2, (1j ** nu) * special.rgamma(1.0 - nu)) < 1e-13


def test_ordre_resonant_refuse():
    with pytest.raises(ResonantOrderError, match="résonant"):
        zeta_functions(2.0, 1.0, -0.5)


@pytest.mark.parametrize("nu", [6.5, 10.0, 20.0, 5.24])
@pytest.mark.parametrize("z", [13.5 + 1.0j, 21.0 + 1.5j, 45.0 + 2.0j, -30.0 + 3.0j, 8.0 - 14.0j])
def test_ordres_eleves_pres_du_rayon_contre_scipy(nu, z):
    ev = bessel_eval(nu, z)

    assert _rel(ev.value, special.jv(nu, z)) < 1e-10
    assert _rel(ev.derivative, special.jvp(nu, z)) < 1e-9
    assert ev.est_rel_err <= 1e-10


@pytest.mark.parametrize("nu", [0.5, 3.3, 6.3, 10.3])
@pytest.mark.parametrize("angle", [0.0, 0.4, 1.2, 2.5])
def test_continuite_au_rayon_de_bascule(nu, angle):
    direction = complex(math.cos(angle), math.sin(angle))
    inside = bessel_j(nu, 12.0 * (1 - 1e-12) * direction)
    outside = bessel_j(nu, 12.0 * (1 + 1e-12) * direction)

    assert _rel(outside, inside) < 1e-8


@pytest.mark.parametrize("nu", [0.7, math.pi, 10.3])
@pytest.mark.parametrize("z", [2.0 + 1.0j, 15.0 - 3.0j, -25.0 + 0.5j, 60.0 + 4.0j])
def test_symetrie_de_conjugaison(nu, z):
    assert _rel(bessel_j(nu, z.conjugate()), bessel_j(nu, z).conjugate()) < 1e-13


def test_asymptotique_retenu_loin_du_rayon():
    ev = bessel_eval(20.0, 300.0 + 2.0j)

    assert ev.method == METHOD_ASYMPTOTIC
    assert _rel(ev.value, special.jv(20.0, 300.0 + 2.0j)) < 1e-10
