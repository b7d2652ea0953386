"""Single-site Hilbert space data for the tensor-product model."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from ..errors import ContractError
from ..thoma import ThomaMeasure, ThomaParams, spectral_measure, to_fraction

__all__ = ["LabelKind", "Label", "ModelSpace"]


class LabelKind(Enum):
    PLUS = "plus"
    MINUS = "minus"
    ZERO = "zero"


@dataclass(frozen=True)
class Label:
    """One basis vector of the single-site space with its state weight.

    A ``ZERO`` label marked ``diffuse`` stands for the limit of ``ell`` equal
    zero labels of weight ``c/ell`` as ``ell`` grows: it carries the whole
    remainder ``c`` but contributes to a cycle of length ``k`` only when
    ``k == 1``.  It has no finite matrix realization.
    """

    kind: LabelKind
    weight: Fraction
    diffuse: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", LabelKind(self.kind))
        object.__setattr__(self, "weight", to_fraction(self.weight))
        if self.weight <= 0:
            raise ContractError("label weights must be positive")
        if self.diffuse and self.kind is not LabelKind.ZERO:
            raise ContractError("only zero labels can be diffuse")

    @property
    def parity(self) -> int:
        """``-1`` for labels whose flips carry a sign."""
        return -1 if self.kind is LabelKind.MINUS else 1

    @property
    def eigenvalue(self) -> Fraction:
        """Value of the limit two-cycle on this label."""
        if self.diffuse:
            return Fraction(0)
        return self.parity * self.weight

    def orbit_factor(self, k: int) -> Fraction:
        """Contribution of a length-``k`` orbit coloured by this label to a trace."""
        if self.diffuse:
            return self.weight if k == 1 else Fraction(0)
        return self.parity ** (k - 1) * self.weight**k

    def to_json(self) -> dict:
        data = {"kind": self.kind.value, "weight": str(self.weight)}
        if self.diffuse:
            data["diffuse"] = True
        return data


@dataclass(frozen=True)
class ModelSpace:
    """Label set of one tensor site together with the number of sites kept."""

    labels: tuple[Label, ...]
    slot_count: int

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ContractError("a model space needs at least one label")
        if sum(lab.weight for lab in labels) != 1:
            raise ContractError("label weights must sum to 1")
        if sum(lab.diffuse for lab in labels) > 1:
            raise ContractError("at most one diffuse label")
        if isinstance(self.slot_count, bool) or not isinstance(self.slot_count, int) or self.slot_count < 1:
            raise ContractError("slot_count must be a positive integer")

    @classmethod
    def from_params(cls, params: ThomaParams, slot_count: int, zero_labels: int | None = None) -> ModelSpace:
        """Build the model for ``params``.

        With ``zero_labels=ell`` the remainder ``c`` is spread over ``ell``
        ordinary zero labels; with ``None`` it sits on one diffuse label, which
        reproduces ``params`` exactly.
        """
        labels = [Label(LabelKind.PLUS, x) for x in params.a]
        labels += [Label(LabelKind.MINUS, x) for x in params.b]
        if params.c:
            if zero_labels is None:
                labels.append(Label(LabelKind.ZERO, params.c, diffuse=True))
            elif zero_labels < 1:
                raise ContractError("a positive remainder needs at least one zero label")
            else:
                labels += [Label(LabelKind.ZERO, params.c / zero_labels)] * zero_labels
        return cls(tuple(labels), slot_count)

    def with_slots(self, slot_count: int) -> ModelSpace:
        return ModelSpace(self.labels, slot_count)

    @property
    def label_count(self) -> int:
        return len(self.labels)

    @property
    def is_finite(self) -> bool:
        return not any(lab.diffuse for lab in self.labels)

    @property
    def dimension(self) -> int | None:
        """Dimension of the truncated tensor product, or ``None`` if diffuse."""
        return self.label_count**self.slot_count if self.is_finite else None

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(lab.weight for lab in self.labels)

    @property
    def eigenvalues(self) -> tuple[Fraction, ...]:
        return tuple(lab.eigenvalue for lab in self.labels)

    @property
    def params(self) -> ThomaParams:
        """The parameters this finite model realizes exactly.

        Ordinary zero labels behave like extra entries of ``a``.
        """
        a = [lab.weight for lab in self.labels if lab.kind is not LabelKind.MINUS and not lab.diffuse]
        b = [lab.weight for lab in self.labels if lab.kind is LabelKind.MINUS]
        return ThomaParams(tuple(a), tuple(b))

    def measure(self) -> ThomaMeasure:
        """Spectral measure of the limit two-cycle in this model."""
        return spectral_measure(self.params)

    def check_slot(self, slot: int) -> int:
        if isinstance(slot, bool) or not isinstance(slot, int) or not 0 <= slot < self.slot_count:
            raise ContractError(f"slot {slot!r} outside 0..{self.slot_count - 1}")
        return slot

    def to_json(self) -> dict:
        return {"labels": [lab.to_json() for lab in self.labels], "slot_count": self.slot_count}

    @classmethod
    def from_json(cls, data: Mapping) -> ModelSpace:
        try:
            labels = tuple(
                Label(LabelKind(d["kind"]), d["weight"], bool(d.get("diffuse", False))) for d in data["labels"]
            )
            return cls(labels, int(data["slot_count"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError(f"bad model space description: {exc}") from exc
