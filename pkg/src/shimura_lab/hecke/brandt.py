"""Brandt modules: ideal classes, stabilizer weights and Hecke matrices."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Any, Mapping, Sequence

from ..errors import ValidationError
from ..exactalg.linalg import matmul, transpose

Matrix = tuple[tuple[int, ...], ...]


def _freeze(m: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in m)


@dataclass(frozen=True)
class BrandtDataset:
    """Hecke matrices on a Brandt module, stored with rows summing to Np + 1.

    Entry b_ij counts the q-neighbours of class i lying in class j, and the
    weights are stabilizer orders, so w_j * b_ij = w_i * b_ji.
    """

    weights: tuple[int, ...]
    matrices: Mapping[str, Matrix]
    class_labels: tuple = ()
    norms: Mapping[str, int] = field(default_factory=dict)
    edges: Mapping[str, tuple] | None = None
    field_name: str = "Q"
    provenance: str = ""

    def __post_init__(self):
        n = len(self.weights)
        if n == 0:
            raise ValidationError("a Brandt dataset needs at least one class")
        if any((not isinstance(w, int)) or w < 1 for w in self.weights):
            raise ValidationError("stabilizer weights must be positive integers")
        if not self.class_labels:
            object.__setattr__(self, "class_labels", tuple(range(n)))
        elif len(self.class_labels) != n:
            raise ValidationError("class label count does not match the weights")
        mats = {str(k): _freeze(m) for k, m in self.matrices.items()}
        for k, m in mats.items():
            if len(m) != n or any(len(r) != n for r in m):
                raise ValidationError(f"matrix {k} is not {n}x{n}")
            for i in range(n):
                for j in range(i + 1, n):
                    if self.weights[j] * m[i][j] != self.weights[i] * m[j][i]:
                        raise ValidationError(
                            f"matrix {k} breaks the weighted symmetry w_j b_ij = w_i b_ji at ({i},{j})"
                        )
        for (k1, a), (k2, b) in combinations(sorted(mats.items()), 2):
            if matmul(a, b) != matmul(b, a):
                raise ValidationError(f"Hecke matrices {k1} and {k2} do not commute")
        object.__setattr__(self, "matrices", MappingProxyType(mats))
        object.__setattr__(self, "norms", MappingProxyType({str(k): int(v) for k, v in self.norms.items()}))
        if self.edges is not None:
            object.__setattr__(self, "edges", MappingProxyType({str(k): tuple(v) for k, v in self.edges.items()}))

    @property
    def dimension(self) -> int:
        return len(self.weights)

    @property
    def labels(self) -> list[str]:
        return sorted(self.matrices, key=_label_key)

    def prime_norm(self, label: str) -> int:
        if label in self.norms:
            return self.norms[label]
        if re.fullmatch(r"\d+", label):
            return int(label)
        raise ValidationError(f"no norm recorded for prime label {label!r}")

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "classes": self.dimension,
            "labels": list(self.class_labels),
            "weights": list(self.weights),
            "matrices": {k: [list(r) for r in self.matrices[k]] for k in self.labels},
            "normalization": "rows",
            "field": self.field_name,
            "provenance": self.provenance,
        }
        if self.norms:
            out["norms"] = dict(self.norms)
        if self.edges is not None:
            out["edges"] = {k: [list(e) for e in v] for k, v in self.edges.items()}
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "BrandtDataset":
        """Load a dataset; matrices with normalization "columns" are transposed."""
        try:
            weights = tuple(int(w) for w in data["weights"])
            mats = data["matrices"]
        except KeyError as exc:
            raise ValidationError(f"brandt record missing {exc}") from exc
        n = int(data.get("classes", len(weights)))
        if n != len(weights):
            raise ValidationError("'classes' does not match the number of weights")
        norm = data.get("normalization", "rows")
        if norm not in ("rows", "columns"):
            raise ValidationError(f"unknown normalization {norm!r}")
        if norm == "columns":
            mats = {k: transpose(m) for k, m in mats.items()}
        edges = data.get("edges")
        if edges is not None and not isinstance(edges, Mapping):
            # a bare list applies to the only matrix present
            if len(mats) != 1:
                raise ValidationError("a bare edge list needs exactly one Hecke matrix")
            edges = {next(iter(mats)): edges}
        return cls(
            weights=weights,
            matrices=mats,
            class_labels=tuple(data.get("labels", range(n))),
            norms=data.get("norms", {}),
            edges=edges,
            field_name=data.get("field", "Q"),
            provenance=data.get("provenance", ""),
        )


def _label_key(label: str):
    digits = re.findall(r"\d+", label)
    return (int(digits[0]) if digits else 0, label)
