# ptsturm - Licence MIT (voir LICENSE.md)
"""Interface en ligne de commande : une commande, un dossier de résultats.

Codes de sortie : 0 succès, 1 usage ou configuration, 2 vérification en
échec, 3 échec numérique (diagnostic.json écrit dans --out).
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from .acceptance import CHECKS, run_acceptance
from .coeff import validate
from .coeff_descriptor import resolve_coefficient
from .contour import certify_box
from .data_models import (
    KIND_PIECEWISE_LINEAR,
    KIND_SINE,
    CoefficientProfile,
    SolverSettings,
    SpectralResult,
    settings_from_mapping,
)
from .galerkin import galerkin_eigs, galerkin_matrix
from .output_transaction import OutputTransactionError, StagedOutput, staged_output
from .outputs import (
    alphas_frame,
    eigs_frame,
    manifest_dict,
    paired_flags,
    plot_eigs_svg,
    plot_rho_svg,
    polar_grid,
    rho_frame,
    rho_summary,
    write_csv,
    write_json,
    write_verify_report,
)
from .shoot import bessel_eig_residual, rho_samples
from .spectrum import DEFAULT_DELTAS, delta_family_experiment, find_alphas, find_real_eigs, lowest_by_modulus
from .validation import format_validation_summary, format_validation_table, write_validation_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_NUMERIC = 3

COMMANDS = ("eigs", "alphas", "rho-map", "certify", "delta-sweep", "verify", "check-coeff")
ORACLES = ("bessel", "galerkin", "none")
DEFAULT_COUNTS = {"eigs": 8, "alphas": 12, "delta-sweep": 4}
DEFAULT_GRID = (16, 64)
DEFAULT_RMAX = 4.0
BOX_HEIGHT = 2.0


class UsageError(ValueError):
    """Combinaison d'options incohérente."""


@dataclasses.dataclass(frozen=True)
class RunConfig:
    command: str
    out: Path
    coeff: Optional[str] = None
    eps: Optional[float] = None
    count: Optional[int] = None
    grid: tuple[int, int] = DEFAULT_GRID
    rmax: float = DEFAULT_RMAX
    box: Optional[tuple[float, float, float, float]] = None
    deltas: tuple[float, ...] = DEFAULT_DELTAS
    tol_ode: Optional[float] = None
    tol_root: Optional[float] = None
    oracle: str = "none"
    only: tuple[str, ...] = ()
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.count is not None and self.count < 1:
            raise UsageError("--count doit être un entier positif.")
        if min(self.grid) < 2:
            raise UsageError("--grid exige au moins 2 rayons et 2 angles.")
        for name in ("tol_ode", "tol_root"):
            value = getattr(self, name)
            if value is not None and not (value > 0 and math.isfinite(value)):
                raise UsageError(f"--{name.replace('_', '-')} doit être strictement positif.")
        if self.command not in ("verify",) and not self.coeff:
            raise UsageError(f"--coeff est obligatoire pour la commande {self.command}.")
        if self.command == "certify" and self.box is None:
            raise UsageError("--box est obligatoire pour la commande certify.")

    def settings(self) -> SolverSettings:
        return settings_from_mapping({"tol_ode": self.tol_ode, "tol_root": self.tol_root})

    def echo(self) -> dict[str, Any]:
        data = dataclasses.asdict(self)
        data["out"] = str(self.out)
        return data


# -------------------------
# Analyse des arguments
# -------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # code 1 au lieu de 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: erreur : {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _grid(text: str) -> tuple[int, int]:
    try:
        radii, angles = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grille invalide : {text!r} (attendu RxA, par ex. 16x64)") from None
    return radii, angles


def _floats(count: Optional[int]) -> Callable[[str], tuple[float, ...]]:
    def parse(text: str) -> tuple[float, ...]:
        try:
            values = tuple(float(p) for p in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"liste de nombres invalide : {text!r}") from None
        if count is not None and len(values) != count:
            raise argparse.ArgumentTypeError(f"{count} nombres attendus, {len(values)} reçus")
        return values
    return parse


def make_arg_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pt_spectrum", description="Spectre de Lu = iε(f u′)′ + iu′ sur (−π, π), conditions périodiques.")
    ap.add_argument("command", choices=COMMANDS, help="Calcul à lancer")
    ap.add_argument("--coeff", default=None, help="Coefficient : sine, piecewise_linear ou chemin d'un descripteur JSON")
    ap.add_argument("--eps", type=float, default=None, help="ε dans (0, π/2) (remplace celui du descripteur)")
    ap.add_argument("--count", type=int, default=None, help="Nombre de valeurs propres ou de zéros α_n")
    ap.add_argument("--grid", type=_grid, default=DEFAULT_GRID, help="Grille polaire RxA de rho-map (défaut 16x64)")
    ap.add_argument("--rmax", type=float, default=DEFAULT_RMAX, help="Rayon maximal de la grille polaire")
    ap.add_argument("--box", type=_floats(4), default=None, help="Rectangle re0,re1,im0,im1 pour certify")
    ap.add_argument("--deltas", type=_floats(None), default=DEFAULT_DELTAS,
                    help="Valeurs décroissantes de δ pour delta-sweep (défaut 0.3,0.15,0.075)")
    ap.add_argument("--out", required=True, help="Dossier de résultats")
    ap.add_argument("--tol-ode", type=float, default=None, help="Tolérance relative de l'intégrateur")
    ap.add_argument("--tol-root", type=float, default=None, help="Tolérance relative de brentq")
    ap.add_argument("--oracle", choices=ORACLES, default="none", help="Colonne de contrôle ajoutée à eigs.csv")
    ap.add_argument("--only", default="", help=f"Contrôles de verify séparés par des virgules ({', '.join(CHECKS)})")
    ap.add_argument("--verbose", action="store_true", help="Afficher la progression sur stderr")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    only = tuple(p.strip() for p in args.only.split(",") if p.strip())
    unknown = [p for p in only if p not in CHECKS]
    if unknown:
        raise UsageError(f"Contrôle inconnu pour --only : {', '.join(unknown)} (attendu : {', '.join(CHECKS)}).")
    return RunConfig(
        command=args.command,
        out=Path(args.out).expanduser().resolve(),
        coeff=args.coeff,
        eps=args.eps,
        count=args.count,
        grid=args.grid,
        rmax=args.rmax,
        box=args.box,
        deltas=tuple(args.deltas),
        tol_ode=args.tol_ode,
        tol_root=args.tol_root,
        oracle=args.oracle,
        only=only,
        verbose=args.verbose,
    )


def _progress(cfg: RunConfig):
    if not cfg.verbose:
        return None

    def report(event: str, payload: dict[str, Any]) -> None:
        details = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in payload.items())
        print(f"[{event}] {details}", file=sys.stderr)

    return report


def _profile(cfg: RunConfig) -> CoefficientProfile:
    profile = resolve_coefficient(cfg.coeff, cfg.eps)
    report = validate(profile)
    if report.blocking_issues:
        print(format_validation_table(report), file=sys.stderr)
        raise UsageError(f"Coefficient {profile.profile_id} non admissible : {report.blocking_issues[0].message}.")
    return profile


# -------------------------
# Commandes
# -------------------------

def _check_oracle(cfg: RunConfig, profile: CoefficientProfile) -> None:
    if cfg.oracle == "bessel" and profile.kind != KIND_PIECEWISE_LINEAR:
        raise UsageError("--oracle bessel n'est disponible que pour le coefficient piecewise_linear.")
    if cfg.oracle == "galerkin" and profile.kind != KIND_SINE:
        raise UsageError("--oracle galerkin n'est disponible que pour le coefficient sine.")


def _oracle_column(cfg: RunConfig, profile: CoefficientProfile, values: list[float]) -> Optional[tuple[str, list[float]]]:
    if cfg.oracle == "bessel":
        return "bessel_residual", [bessel_eig_residual(profile.eps, v) if v != 0 else 0.0 for v in values]
    if cfg.oracle == "galerkin":
        eigs = galerkin_eigs(galerkin_matrix(profile.eps, 64))
        return "galerkin_lambda", [float(eigs[np.argmin(np.abs(eigs - v))].real) for v in values]
    return None


def cmd_eigs(cfg: RunConfig, tx: StagedOutput) -> int:
    profile = _profile(cfg)
    _check_oracle(cfg, profile)
    settings = cfg.settings()
    progress = _progress(cfg)
    count = cfg.count or DEFAULT_COUNTS["eigs"]
    needed = math.ceil((count - 1) / 2) + 1  # une racine de plus pour borner le rectangle
    records = find_real_eigs(profile, count=needed, settings=settings, progress_cb=progress,
                             confirm_trivial=profile.kind == KIND_SINE)
    chosen = lowest_by_modulus(records, count)
    if cfg.box is not None:
        box = cfg.box
    else:
        mods = sorted({abs(r.value) for r in records})
        top = max(abs(r.value) for r in chosen)
        above = [m for m in mods if m > top]
        bound = 0.5 * (top + above[0]) if above else top + 1.0
        box = (-bound, bound, -BOX_HEIGHT, BOX_HEIGHT)
    contour = certify_box(profile, box, records, settings, progress)

    write_csv(eigs_frame(chosen, contour, _oracle_column(cfg, profile, [r.value for r in chosen])),
              tx.path("eigs.csv"))
    result = SpectralResult(
        eps=profile.eps,
        profile_id=profile.profile_id,
        real_eigs=tuple(chosen),
        contour_counts=(contour,),
        method={"ode": settings.ode_method, "tol_ode": settings.tol_ode, "oracle": cfg.oracle},
    )
    write_json(tx.path("eigs.json"), result)
    plot_eigs_svg(profile, chosen, tx.path("eigs.svg"), settings)

    unpaired = [r.value for r, ok in zip(chosen, paired_flags(chosen)) if not ok]
    if unpaired:
        print(f"Nombre pair de valeurs ({count}) : λ = {unpaired[0]:.6g} figure sans son opposée (colonne paired).")
    print(f"{len(chosen)} valeur(s) propre(s) ; rectangle {contour.box} : indice {contour.count}, "
          f"{contour.found_inside} racine(s) réelle(s) trouvée(s).")
    if not contour.ok:
        print("Certification en échec : racines non réelles possibles dans le rectangle.", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_alphas(cfg: RunConfig, tx: StagedOutput) -> int:
    profile = _profile(cfg)
    settings = cfg.settings()
    alphas = find_alphas(profile, cfg.count or DEFAULT_COUNTS["alphas"], settings, _progress(cfg))
    write_csv(alphas_frame(alphas), tx.path("alphas.csv"))
    write_json(tx.path("alphas.json"), SpectralResult(eps=profile.eps, profile_id=profile.profile_id,
                                                      alphas=tuple(alphas)))
    print(f"{len(alphas)} zéro(s) α_n ; α_1 = {alphas[0].alpha:.12g}.")
    return EXIT_OK


def cmd_rho_map(cfg: RunConfig, tx: StagedOutput) -> int:
    profile = _profile(cfg)
    zs = polar_grid(cfg.grid[0], cfg.grid[1], cfg.rmax)
    frame = rho_frame(rho_samples(profile, zs, cfg.settings()))
    write_csv(frame, tx.path("rho.csv"))
    plot_rho_svg(frame, tx.path("rho.svg"), f"|ρ(z)|, {profile.profile_id}, ε = {profile.eps:g}")
    print(rho_summary(frame))
    return EXIT_VERIFY if bool(frame["violates_claim"].any()) else EXIT_OK


def cmd_certify(cfg: RunConfig, tx: StagedOutput) -> int:
    profile = _profile(cfg)
    settings = cfg.settings()
    progress = _progress(cfg)
    re0, re1, im0, im1 = cfg.box
    reals = []
    if im0 < 0 < im1:
        reals = find_real_eigs(profile, search_interval=(re0, re1), settings=settings, progress_cb=progress)
    contour = certify_box(profile, cfg.box, reals, settings, progress)
    write_json(tx.path("certify.json"), {"profile": profile.profile_id, "eps": profile.eps,
                                          "contour": contour, "real_roots": reals})
    print(f"Indice {contour.winding:.6f} -> {contour.count} zéro(s) ; {contour.found_inside} racine(s) réelle(s).")
    return EXIT_OK if contour.ok else EXIT_VERIFY


def cmd_delta_sweep(cfg: RunConfig, tx: StagedOutput) -> int:
    profile = _profile(cfg)
    table = delta_family_experiment(profile, cfg.deltas, cfg.count or DEFAULT_COUNTS["delta-sweep"],
                                    cfg.settings(), _progress(cfg))
    write_csv(table, tx.path("delta.csv"))
    print(table.to_string(index=False))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, tx: StagedOutput) -> int:
    report = run_acceptance(cfg.settings(), cfg.only or None, _progress(cfg))
    write_verify_report(report, tx.path("verify.md"), tx.path("verify.html"))
    write_validation_csv(report, tx.path("verify.csv"))
    print(format_validation_table(report))
    print(format_validation_summary(report))
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_check_coeff(cfg: RunConfig, tx: StagedOutput) -> int:
    profile = resolve_coefficient(cfg.coeff, cfg.eps)
    report = validate(profile)
    write_validation_csv(report, tx.path("validation.csv"))
    print(format_validation_table(report))
    print(format_validation_summary(report))
    return EXIT_OK if report.passed else EXIT_VERIFY


COMMAND_HANDLERS: dict[str, Callable[[RunConfig, StagedOutput], int]] = {
    "eigs": cmd_eigs,
    "alphas": cmd_alphas,
    "rho-map": cmd_rho_map,
    "certify": cmd_certify,
    "delta-sweep": cmd_delta_sweep,
    "verify": cmd_verify,
    "check-coeff": cmd_check_coeff,
}


# -------------------------
# Point d'entrée
# -------------------------

def _write_diagnostic(cfg: RunConfig, exc: BaseException) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / "diagnostic.json"
    payload = {"command": cfg.command, "error": type(exc).__name__, "message": str(exc), "config": cfg.echo()}
    grid = getattr(exc, "grid", None)
    if grid is not None and len(grid):
        payload["scanned_grid"] = grid
    write_json(path, payload)
    return path


def run(cfg: RunConfig) -> int:
    started = time.perf_counter()
    with staged_output(cfg.out) as tx:
        code = COMMAND_HANDLERS[cfg.command](cfg, tx)
        write_json(tx.path("run-manifest.json"), manifest_dict(
            cfg.command, cfg.echo(), cfg.settings(), time.perf_counter() - started, tx.written,
        ))
        tx.commit()
    print(f"OK -> {cfg.out}")
    return code


def main(argv: list[str] | None = None) -> int:
    args = make_arg_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"Configuration invalide : {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(cfg)
    except ValueError as exc:
        print(f"Configuration invalide : {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputTransactionError as exc:
        print(f"Dossier de résultats inutilisable : {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RuntimeError as exc:
        path = _write_diagnostic(cfg, exc)
        print(f"Échec numérique ({type(exc).__name__}) : {exc}", file=sys.stderr)
        print(f"Diagnostic écrit : {path}", file=sys.stderr)
        return EXIT_NUMERIC
