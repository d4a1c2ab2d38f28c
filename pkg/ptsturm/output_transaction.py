# ptsturm - Licence MIT (voir LICENSE.md)
"""Écriture transactionnelle du dossier de résultats d'une exécution.

Les fichiers sont produits dans un dossier voisin temporaire puis basculés
d'un bloc vers --out ; une exécution interrompue laisse l'ancien contenu
intact.
"""

from __future__ import annotations

import shutil
import uuid
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator


class OutputTransactionError(RuntimeError):
    """Basculement du dossier de résultats impossible."""


class OutputBackupCleanupWarning(RuntimeWarning):
    """Les résultats sont en place mais l'ancienne version n'a pas pu être supprimée."""


def _sibling(out_dir: Path, kind: str) -> Path:
    for _ in range(100):
        candidate = out_dir.parent / f".{out_dir.name}.{kind}-{uuid.uuid4().hex[:12]}"
        if not candidate.exists():
            return candidate
    raise OutputTransactionError(f"Aucun nom temporaire libre à côté de {out_dir}.")


def _discard(path: Path) -> None:
    if path.exists():
        shutil.rmtree(path)


@dataclass
class StagedOutput:
    out_dir: Path
    staging_dir: Path
    written: list[str] = field(default_factory=list)
    committed: bool = False

    def path(self, name: str) -> Path:
        """Chemin de `name` dans le staging ; le fichier est ajouté au manifeste."""
        target = self.staging_dir / name
        target.parent.mkdir(parents=True, exist_ok=True)
        if name not in self.written:
            self.written.append(name)
        return target

    def commit(self) -> None:
        if self.committed:
            return
        backup = None
        if self.out_dir.exists():
            backup = _sibling(self.out_dir, "old")
            self.out_dir.rename(backup)
        try:
            self.staging_dir.rename(self.out_dir)
        except OSError as exc:
            if backup is not None:
                try:
                    _discard(self.out_dir)
                    backup.rename(self.out_dir)
                except OSError as restore_exc:
                    raise OutputTransactionError(
                        f"Basculement vers {self.out_dir} impossible et restauration en échec ; "
                        f"ancienne version conservée dans {backup}."
                    ) from restore_exc
            raise OutputTransactionError(f"Basculement vers {self.out_dir} impossible : {exc}") from exc
        self.committed = True
        if backup is not None:
            try:
                _discard(backup)
            except OSError as exc:
                warnings.warn(
                    f"Ancienne version non supprimée : {backup} ({exc})",
                    OutputBackupCleanupWarning,
                    stacklevel=2,
                )

    def rollback(self) -> None:
        if not self.committed:
            _discard(self.staging_dir)


@contextmanager
def staged_output(out_dir: Path) -> Iterator[StagedOutput]:
    """Staging vide ; `commit()` explicite, sinon tout est abandonné à la sortie."""
    out_dir = Path(out_dir)
    if out_dir.exists() and not out_dir.is_dir():
        raise OutputTransactionError(f"Le chemin de sortie existe mais n'est pas un dossier : {out_dir}")
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = _sibling(out_dir, "run")
    staging.mkdir()
    tx = StagedOutput(out_dir=out_dir, staging_dir=staging)
    try:
        yield tx
    finally:
        tx.rollback()
