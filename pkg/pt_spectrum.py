# ptsturm - Licence MIT (voir LICENSE.md)
#
# !/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Spectre de l'opérateur non auto-adjoint Lu = iε(f u′)′ + iu′ sur (−π, π),
conditions périodiques, f impair, 2π-périodique, anti-périodique.

Usage:
  python pt_spectrum.py eigs --coeff sine --eps 0.5 --count 8 --out res-sine
  python pt_spectrum.py eigs --coeff piecewise_linear --eps 0.5 --count 4 --oracle bessel --out res-pl
  python pt_spectrum.py alphas --coeff sine --eps 0.5 --count 12 --out res-alphas
  python pt_spectrum.py rho-map --coeff sine --eps 0.5 --grid 16x64 --out res-rho
  python pt_spectrum.py certify --coeff sine --eps 0.5 --box 0.5,1.5,0.5,1.5 --out res-box
  python pt_spectrum.py delta-sweep --coeff sine --eps 0.5 --out res-delta
  python pt_spectrum.py check-coeff --coeff mon_profil.json --out res-coeff
  python pt_spectrum.py verify --only symmetry --out res-verify

Notes:
- --coeff accepte un nom intégré (sine, piecewise_linear) ou un descripteur JSON
- PTSTURM_THREADS fixe le nombre de fils utilisés pour les balayages
- Codes de sortie : 0 succès, 1 configuration, 2 vérification en échec, 3 échec numérique
"""

# Façade : le code vit dans le paquet ptsturm/. L'API publique reste
# importable depuis pt_spectrum.

from ptsturm.bessel import bessel_eval, bessel_j, bessel_j_prime, zeta_functions, zeta_wronskian  # noqa: F401
from ptsturm.coeff import (  # noqa: F401
    derived_weights,
    endpoint_linearization,
    eps_from_tilde,
    eval_p,
    make_custom,
    make_piecewise_linear,
    make_sine,
    spectral_parameter,
    validate,
    wkb_guess,
    wkb_integral,
)
from ptsturm.coeff_descriptor import load_coefficient_descriptor, save_coefficient_descriptor  # noqa: F401
from ptsturm.contour import certify_box  # noqa: F401
from ptsturm.data_models import SolverSettings, settings_from_mapping  # noqa: F401
from ptsturm.frobenius import basis_at_pi, basis_at_zero  # noqa: F401
from ptsturm.galerkin import galerkin_eigs, galerkin_lowest, galerkin_matrix  # noqa: F401
from ptsturm.orchestrator import main, make_arg_parser  # noqa: F401
from ptsturm.shoot import (  # noqa: F401
    F_and_rho_bessel,
    d_of_lambda,
    g_of_z,
    integrate,
    phi_at_pi,
    phi_at_pi_batch,
    rho_general,
)
from ptsturm.spectrum import (  # noqa: F401
    delta_family_experiment,
    find_alphas,
    find_real_eigs,
    hardy_check,
    rho_product,
)


if __name__ == "__main__":
    raise SystemExit(main())
