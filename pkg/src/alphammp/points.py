"""Shared domain types: extended rationals, branch data, point records.

These sit below both the contraction engine and the approximation-constant
calculus, so they live in their own module to keep imports one-way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .lattice import DivisorClass
from .rationals import format_rational, parse_rational


@dataclass(frozen=True)
class ExtendedRational:
    """Exact rational or +infinity (finite=None means +infinity).

    Only +infinity is representable: every approximation constant in this
    package is nonnegative, so the mixed {-inf, +inf} case cannot arise.
    """

    finite: Optional[Fraction]

    @classmethod
    def of(cls, q) -> "ExtendedRational":
        return cls(Fraction(q))

    @classmethod
    def infinity(cls) -> "ExtendedRational":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.finite is None

    @property
    def value(self) -> Fraction:
        if self.finite is None:
            raise ValueError("infinite value")
        return self.finite

    def __add__(self, other: "ExtendedRational") -> "ExtendedRational":
        if self.is_infinite or other.is_infinite:
            return ExtendedRational(None)
        return ExtendedRational(self.finite + other.finite)

    def scale(self, a) -> "ExtendedRational":
        a = Fraction(a)
        if a <= 0:
            raise ValueError("scale factor must be positive")
        if self.is_infinite:
            return self
        return ExtendedRational(self.finite * a)

    def _key(self):
        return (1, Fraction(0)) if self.is_infinite else (0, self.finite)

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def format(self) -> str:
        return "inf" if self.is_infinite else format_rational(self.finite)

    @classmethod
    def parse(cls, text: str) -> "ExtendedRational":
        if text == "inf":
            return cls(None)
        return cls(parse_rational(text))

    def __repr__(self) -> str:
        return f"ExtendedRational({self.format()})"


INFINITY = ExtendedRational(None)


@dataclass(frozen=True)
class BranchData:
    """Branches of a rational curve at a point: (r, m) pairs.

    r is the residue-field type of the branch (0: not contained in the
    completion, 1: rational, 2: quadratic-in-the-completion) and m >= 1 its
    multiplicity.
    """

    branches: tuple[tuple[int, int], ...]

    def __init__(self, branches):
        items = tuple((int(r), int(m)) for r, m in branches)
        if not items:
            raise ValueError("branch list must be nonempty")
        for r, m in items:
            if r not in (0, 1, 2):
                raise ValueError(f"branch type r={r} not in {{0,1,2}}")
            if m < 1:
                raise ValueError(f"branch multiplicity m={m} must be >= 1")
        object.__setattr__(self, "branches", items)

    def to_json(self) -> list[list[int]]:
        return [[r, m] for r, m in self.branches]


SMOOTH_BRANCH = BranchData(((1, 1),))


@dataclass(frozen=True)
class PointRecord:
    """Class-level data about a point P on a surface model.

    incidences lists the declared curve classes through P with their branch
    data; essentially_bounded and v_adic_limit are assumption flags supplied
    by the caller, never computed here.
    """

    incidences: tuple[tuple[DivisorClass, BranchData], ...] = ()
    essentially_bounded: bool = False
    v_adic_limit: bool = True

    def __init__(self, incidences=(), essentially_bounded=False, v_adic_limit=True):
        items = []
        for cls, b in incidences:
            if not isinstance(cls, DivisorClass):
                cls = DivisorClass(cls)
            if not isinstance(b, BranchData):
                b = BranchData(b)
            if not cls.is_integral:
                raise ValueError(f"incidence class {cls} must be integral")
            if any(c == cls for c, _ in items):
                raise ValueError(f"duplicate incidence class {cls}")
            items.append((cls, b))
        object.__setattr__(self, "incidences", tuple(items))
        object.__setattr__(self, "essentially_bounded", bool(essentially_bounded))
        object.__setattr__(self, "v_adic_limit", bool(v_adic_limit))

    def classes(self) -> tuple[DivisorClass, ...]:
        return tuple(cls for cls, _ in self.incidences)

    def branch_for(self, cls: DivisorClass) -> Optional[BranchData]:
        for c, b in self.incidences:
            if c == cls:
                return b
        return None

    def to_json(self) -> dict:
        return {
            "incidences": [{"class": cls.to_json(), "branches": b.to_json()}
                           for cls, b in self.incidences],
            "essentially_bounded": self.essentially_bounded,
            "v_adic_limit": self.v_adic_limit,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PointRecord":
        if not isinstance(data, dict):
            raise ValueError("point record must be an object")
        incidences = []
        for item in data.get("incidences", []):
            incidences.append((DivisorClass.from_json(item["class"]),
                               BranchData(item["branches"])))
        return cls(incidences=incidences,
                   essentially_bounded=data.get("essentially_bounded", False),
                   v_adic_limit=data.get("v_adic_limit", True))
