"""Shipped data files, optionally overridden by a user directory."""
from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

from .errors import ValidationError
from .exactalg.numberfield import NumberField, field_from_json
from .fuchsian import CMOrderRecord
from .quatarith import PrimeRecord, QuaternionData, quaternion_from_json

SHIPPED = (
    "F.json", "D.json", "B.json", "cm_orders.json", "fields.json", "harbater.json",
    "al_signs.json", "signatures.json", "dual_graph_claims.json", "tree.json",
)
EXTERNAL = ("brandt.json", "eigendata.json")


class Fixtures:
    """Looks up a file in the override directory first, then in package data."""

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else None
        self._cache: dict[str, dict] = {}

    def path(self, name: str) -> Path | None:
        if self.directory is not None and (self.directory / name).is_file():
            return self.directory / name
        res = resources.files("shimura_lab") / "data" / name
        if res.is_file():
            return Path(str(res))
        return None

    def has(self, name: str) -> bool:
        return self.path(name) is not None

    def load(self, name: str) -> dict:
        if name not in self._cache:
            p = self.path(name)
            if p is None:
                raise ValidationError(f"fixture {name} not found")
            try:
                self._cache[name] = json.loads(p.read_text())
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{name}: invalid JSON ({exc})") from exc
        return self._cache[name]

    def digest(self, name: str) -> str:
        p = self.path(name)
        return hashlib.sha256(p.read_bytes()).hexdigest() if p else ""

    # typed accessors ----------------------------------------------------------
    def base_field(self) -> NumberField:
        return field_from_json(self.load("F.json"))

    def field(self, name: str) -> NumberField:
        for rec in self.load("fields.json")["fields"]:
            if rec["name"] == name:
                return field_from_json(rec)
        raise ValidationError(f"no field named {name!r} in fields.json")

    def quaternion(self, name: str = "D") -> QuaternionData:
        return quaternion_from_json(self.load(f"{name}.json"), self.base_field())

    def cm_records(self) -> list[CMOrderRecord]:
        return [CMOrderRecord.from_json(r) for r in self.load("cm_orders.json")["records"]]

    def ramified_primes(self, name: str = "D") -> list[PrimeRecord]:
        return list(self.quaternion(name).ramified_finite)
