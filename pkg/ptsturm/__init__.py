# ptsturm - Licence MIT (voir LICENSE.md)
# Paquet ptsturm : solveur spectral de Lu = iε(f u′)′ + iu′ sur (−π, π), périodique.
# pt_spectrum.py (à la racine) reste le point d'entrée et réexporte l'API publique.

__version__ = "0.3.0"
