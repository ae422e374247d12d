"""Picard lattices of split rational surfaces, exactly.

A surface model is a based unimodular lattice of signature (1, rho-1)
together with its canonical class and lists of negative-curve classes and
effective-cone generators.  Supported families:

  * P^2                      basis H,           gram (1)
  * Bl_r P^2, 0 <= r <= 8    basis H, E_1..E_r, gram diag(1, -1, ..., -1)
  * Hirzebruch F_n           basis C_0, F,      gram ((-n, 1), (1, 0))
  * explicit lattices        caller-declared gram / canonical / curves

Everything is exact: coefficients are Fractions, cone tests run through a
rational-pivot simplex, and class enumeration walks a negative-definite
quadratic shell with integer bounds.  No floating point enters this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import (Mat, det_bareiss, mat_vec, row_unimodular_reduce,
                     signature, solve_exact)
from .lp import feasible_nonneg_combination, solve_lp, OPTIMAL
from .rationals import format_rational, format_vector, parse_vector

# classical counts of classes D with D.D = D.K = -1 on Bl_r P^2; the test
# suite re-derives these with an independent brute-force oracle before
# trusting them
MINUS_ONE_COUNTS = {0: 0, 1: 1, 2: 3, 3: 6, 4: 10, 5: 16, 6: 27, 7: 56, 8: 240}


@dataclass(frozen=True, order=True)
class DivisorClass:
    """Vector of exact rationals in the owning model's basis."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in coeffs))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        assert len(self) == len(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        assert len(self) == len(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-a for a in self.coeffs))

    def scale(self, q) -> "DivisorClass":
        q = Fraction(q)
        return DivisorClass(tuple(q * a for a in self.coeffs))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def int_coeffs(self) -> tuple[int, ...]:
        if not self.is_integral:
            raise ValueError(f"non-integral class {self}")
        return tuple(c.numerator for c in self.coeffs)

    def primitive(self) -> "DivisorClass":
        """Primitive integral representative on the same ray (sign kept)."""
        denoms = 1
        for c in self.coeffs:
            denoms = denoms * c.denominator // math.gcd(denoms, c.denominator)
        ints = [int(c * denoms) for c in self.coeffs]
        g = 0
        for x in ints:
            g = math.gcd(g, abs(x))
        if g == 0:
            return DivisorClass(self.coeffs)
        return DivisorClass(tuple(Fraction(x, g) for x in ints))

    def to_json(self) -> list[str]:
        return format_vector(self.coeffs)

    @classmethod
    def from_json(cls, items) -> "DivisorClass":
        return cls(parse_vector(items))

    def __repr__(self) -> str:
        return "DivisorClass(" + ", ".join(format_rational(c) for c in self.coeffs) + ")"


@dataclass(frozen=True)
class IntersectionForm:
    """Symmetric unimodular bilinear form of signature (1, rho-1)."""

    gram: Mat

    def __init__(self, gram):
        g = tuple(tuple(int(x) for x in row) for row in gram)
        n = len(g)
        for row in g:
            if len(row) != n:
                raise ValueError("gram matrix must be square")
        for i in range(n):
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        if abs(det_bareiss(g)) != 1:
            raise ValueError("gram matrix must be unimodular")
        if signature(g) != (1, n - 1, 0):
            raise ValueError("gram matrix must have signature (1, rho-1)")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, d1: DivisorClass, d2: DivisorClass) -> Fraction:
        if len(d1) != self.rank or len(d2) != self.rank:
            raise ValueError("dimension mismatch")
        gv = mat_vec(self.gram, d2.coeffs)
        return sum(a * b for a, b in zip(d1.coeffs, gv))


@dataclass(eq=False)
class SurfaceModel:
    """Picard-lattice model of a surface.

    Instances are immutable by convention; the negative-curve and
    effective-generator lists of contraction targets are derived lazily on
    first access (deriving them re-runs class enumeration, which the pure
    lattice invariants of a contraction never need).
    """

    tag: str
    kind: str  # "p2" | "blowup_p2" | "hirzebruch" | "explicit"
    form: IntersectionForm
    canonical: DivisorClass
    position: str = "general"  # "general" | "explicit"
    n: Optional[int] = None
    r: Optional[int] = None
    _neg_curves: Optional[tuple[DivisorClass, ...]] = field(default=None, repr=False)
    _eff_generators: Optional[tuple[DivisorClass, ...]] = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return self.form.rank

    @property
    def k_squared(self) -> Fraction:
        return self.form.pair(self.canonical, self.canonical)

    @property
    def neg_curves(self) -> tuple[DivisorClass, ...]:
        if self._neg_curves is None:
            neg, eff = _derive_curves(self)
            self._neg_curves, self._eff_generators = neg, eff
        return self._neg_curves

    @property
    def eff_generators(self) -> tuple[DivisorClass, ...]:
        if self._eff_generators is None:
            neg, eff = _derive_curves(self)
            self._neg_curves, self._eff_generators = neg, eff
        return self._eff_generators

    def ray_generators(self) -> tuple[DivisorClass, ...]:
        """Extremal-ray sweep set: negative curves plus square-zero
        effective generators (fiber classes)."""
        out = set(self.neg_curves)
        for g in self.eff_generators:
            if self.form.pair(g, g) == 0:
                out.add(g)
        return tuple(sorted(out))

    def ample_test_classes(self) -> tuple[DivisorClass, ...]:
        out = set(self.neg_curves) | set(self.eff_generators)
        return tuple(sorted(out))

    def describe(self) -> dict:
        return {
            "tag": self.tag,
            "rank": self.rank,
            "k_squared": format_rational(self.k_squared),
            "gram": [list(row) for row in self.form.gram],
            "canonical": self.canonical.to_json(),
            "neg_curves": [c.to_json() for c in self.neg_curves],
            "eff_generators": [c.to_json() for c in self.eff_generators],
        }


@dataclass(frozen=True)
class ConeCertificate:
    """Exact effectivity certificate.

    verdict True: `coefficients` are (generator index, value) pairs with
    sum coeff_i * G_i equal to the queried class.  verdict False:
    `separating_functional` W pairs >= 0 with every generator and < 0 with
    the queried class.
    """

    verdict: bool
    coefficients: Optional[tuple[tuple[int, Fraction], ...]] = None
    separating_functional: Optional[DivisorClass] = None

    def verify(self, model: "SurfaceModel", d: DivisorClass) -> bool:
        gens = model.eff_generators
        if self.verdict:
            acc = DivisorClass((0,) * model.rank)
            for idx, c in self.coefficients:
                if c < 0:
                    return False
                acc = acc + gens[idx].scale(c)
            return acc == d
        w = self.separating_functional
        if w is None:
            return False
        if any(model.form.pair(w, g) < 0 for g in gens):
            return False
        return model.form.pair(w, d) < 0

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.coefficients is not None:
            out["coefficients"] = [[i, format_rational(c)] for i, c in self.coefficients]
        if self.separating_functional is not None:
            out["separating_functional"] = self.separating_functional.to_json()
        return out


# ---------------------------------------------------------------------------
# construction


def build_surface(descriptor: dict) -> SurfaceModel:
    """Build and validate a SurfaceModel from a descriptor.

    Descriptors: {"model": "p2"}, {"model": "blowup_p2", "r": 3,
    "position": "general"}, {"model": "hirzebruch", "n": 1}, or
    {"model": "explicit", "gram": [[...]], "canonical": [...],
    "neg_curves": [[...]], "eff_generators": [[...]] (optional)}.
    """
    if not isinstance(descriptor, dict) or "model" not in descriptor:
        raise ValueError("surface descriptor must be an object with a 'model' key")
    kind = descriptor["model"]
    if kind == "p2":
        return _build_blowup(0, "general", None)
    if kind == "blowup_p2":
        r = descriptor.get("r")
        if not isinstance(r, int) or r < 0:
            raise ValueError("blowup_p2 needs an integer r >= 0")
        position = descriptor.get("position", "general")
        if position not in ("general", "explicit"):
            raise ValueError(f"unknown position mode {position!r}")
        if r > 8 and position == "general":
            raise ValueError(
                "r > 8 unsupported in general position (the class D.D = D.K = -1 "
                "shell is infinite there)")
        declared = descriptor.get("neg_curves")
        return _build_blowup(r, position, declared,
                             descriptor.get("eff_generators"))
    if kind == "hirzebruch":
        n = descriptor.get("n")
        if not isinstance(n, int) or n < 0:
            raise ValueError("hirzebruch needs an integer n >= 0")
        return _build_hirzebruch(n)
    if kind == "explicit":
        return _build_explicit(descriptor)
    raise ValueError(f"unknown model kind {kind!r}")


def _build_blowup(r: int, position: str, declared, declared_eff=None) -> SurfaceModel:
    rank = r + 1
    gram = tuple(tuple((1 if i == 0 else -1) if i == j else 0 for j in range(rank))
                 for i in range(rank))
    form = IntersectionForm(gram)
    canonical = DivisorClass((-3,) + (1,) * r)
    model = SurfaceModel(
        tag="P2" if r == 0 else f"BlowupP2({r}, {position})",
        kind="p2" if r == 0 else "blowup_p2",
        form=form, canonical=canonical, position=position, r=r)
    assert model.k_squared == 9 - r

    if position == "explicit" and declared is not None:
        neg = tuple(sorted(_validated_curve_list(model, declared)))
        eff = (tuple(sorted(_validated_curve_list(model, declared_eff)))
               if declared_eff is not None else neg)
        model._neg_curves, model._eff_generators = neg, eff
        return model

    minus_ones = tuple(sorted(solve_classes(form, canonical, -1, -1)))
    assert len(minus_ones) == MINUS_ONE_COUNTS[r], \
        f"(-1)-class count {len(minus_ones)} != expected {MINUS_ONE_COUNTS[r]} at r={r}"
    if r == 0:
        neg, eff = (), (DivisorClass((1,)),)
    elif r == 1:
        e1 = DivisorClass((0, 1))
        h_minus_e1 = DivisorClass((1, -1))
        neg, eff = (e1,), tuple(sorted((e1, h_minus_e1)))
    else:
        neg = eff = minus_ones
    model._neg_curves, model._eff_generators = neg, eff
    return model


def _build_hirzebruch(n: int) -> SurfaceModel:
    form = IntersectionForm(((-n, 1), (1, 0)))
    canonical = DivisorClass((-2, -(n + 2)))
    c0 = DivisorClass((1, 0))
    fib = DivisorClass((0, 1))
    model = SurfaceModel(tag=f"Hirzebruch({n})", kind="hirzebruch", form=form,
                         canonical=canonical, n=n)
    assert model.k_squared == 8
    model._neg_curves = (c0,) if n >= 1 else ()
    model._eff_generators = tuple(sorted((c0, fib)))
    return model


def _build_explicit(descriptor: dict) -> SurfaceModel:
    try:
        form = IntersectionForm(descriptor["gram"])
        canonical = DivisorClass.from_json(descriptor["canonical"])
    except KeyError as e:
        raise ValueError(f"explicit model missing key {e}")
    if len(canonical) != form.rank:
        raise ValueError("canonical class length does not match gram rank")
    if not canonical.is_integral:
        raise ValueError("canonical class must be integral")
    model = SurfaceModel(tag="Explicit", kind="explicit", form=form,
                         canonical=canonical, position="explicit")
    neg = tuple(sorted(_validated_curve_list(model, descriptor.get("neg_curves", []))))
    eff = (tuple(sorted(_validated_curve_list(model, descriptor["eff_generators"],
                                              require_negative=False)))
           if "eff_generators" in descriptor else neg)
    model._neg_curves, model._eff_generators = neg, eff
    return model


def _validated_curve_list(model: SurfaceModel, items,
                          require_negative: bool = True) -> list[DivisorClass]:
    out = []
    for item in items:
        c = item if isinstance(item, DivisorClass) else DivisorClass.from_json(item)
        if len(c) != model.rank:
            raise ValueError(f"curve class {c} has wrong length")
        if not c.is_integral:
            raise ValueError(f"curve class {c} must be integral")
        if require_negative and model.form.pair(c, c) >= 0:
            raise ValueError(f"declared negative curve {c} has self-intersection >= 0")
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# operations


def intersect(model: SurfaceModel, d1: DivisorClass, d2: DivisorClass) -> Fraction:
    """Exact intersection pairing D1 . D2 in the model's lattice."""
    return model.form.pair(d1, d2)


def enumerate_minus_one_classes(model: SurfaceModel) -> list[DivisorClass]:
    """All integral D with D.D = -1 and D.K = -1, sorted lexicographically."""
    if model.kind not in ("p2", "blowup_p2"):
        raise ValueError(f"unsupported model for (-1)-class enumeration: {model.tag}")
    return sorted(solve_classes(model.form, model.canonical, -1, -1))


def is_ample(model: SurfaceModel, a: DivisorClass) -> bool:
    """Nakai-style test: A.A > 0 and A positive on every declared curve ray.

    Exact for general-position del Pezzo and Hirzebruch models; for explicit
    models it is a necessary test relative to the declared curve list.
    """
    if model.form.pair(a, a) <= 0:
        return False
    return all(model.form.pair(a, c) > 0 for c in model.ample_test_classes())


def eff_membership(model: SurfaceModel, d: DivisorClass) -> ConeCertificate:
    """Exact LP test for membership in the effective cone of the model.

    Positive answers carry nonnegative coefficients over eff_generators that
    reproduce the class; negative answers carry a separating functional.
    """
    gens = model.eff_generators
    if not gens:
        raise ValueError("model has no effective-cone generators")
    cols = [g.coeffs for g in gens]
    status, payload = feasible_nonneg_combination(cols, d.coeffs)
    if status == "feasible":
        coeffs = tuple((i, c) for i, c in enumerate(payload) if c != 0)
        cert = ConeCertificate(True, coefficients=coeffs)
    else:
        w = _functional_from_farkas(model, payload)
        cert = ConeCertificate(False, separating_functional=w)
    assert cert.verify(model, d), "internal certificate verification failed"
    return cert


def _functional_from_farkas(model: SurfaceModel, y: Sequence[Fraction]) -> DivisorClass:
    # Farkas direction y has y . g <= 0 on generator coefficient vectors and
    # y . d > 0; the separating divisor W solves W^T gram = -y^T, so that the
    # intersection pairing reproduces -y on coefficient vectors
    rhs = tuple((-Fraction(v),) for v in y)
    sol = solve_exact(model.form.gram, rhs)
    w = DivisorClass(tuple(row[0] for row in sol))
    return w.primitive()


def eff_threshold(model: SurfaceModel, a: DivisorClass) -> Fraction:
    """Least y >= 0 with K + y*A in the effective cone, as an exact rational.

    Solved as a parametric LP: minimize y subject to
    sum_i c_i G_i - y*A = K, c >= 0, y >= 0.  Requires ample A, which
    guarantees feasibility for large y, hence an exact optimal vertex.
    """
    if not is_ample(model, a):
        raise ValueError("eff_threshold requires an ample class")
    gens = model.eff_generators
    rank = model.rank
    a_rows = [[g.coeffs[i] for g in gens] + [-a.coeffs[i]] for i in range(rank)]
    rhs = list(model.canonical.coeffs)
    cost = [Fraction(0)] * len(gens) + [Fraction(1)]
    res = solve_lp(a_rows, rhs, cost)
    if res.status != OPTIMAL:
        raise ValueError(f"threshold LP unexpectedly {res.status}")
    y_star = res.objective
    assert eff_membership(model, model.canonical + a.scale(y_star)).verdict
    return y_star


# ---------------------------------------------------------------------------
# quadratic class enumeration


def solve_classes(form: IntersectionForm, k: DivisorClass,
                  self_int: int, k_degree: int) -> list[DivisorClass]:
    """All integral x with x.x = self_int and x.K = k_degree.

    The linear condition confines x to an affine sublattice on which the
    form restricts negative definite (Hodge index, since K.K > 0 on every
    supported model), so the quadratic shell is finite and is walked with
    exact integer bounds.
    """
    rank = form.rank
    gk = mat_vec(form.gram, k.coeffs)
    w = tuple(int(x) for x in gk)
    g, u = row_unimodular_reduce(w)
    if g == 0:
        raise ValueError("canonical class pairs to zero with everything")
    if k_degree % g != 0:
        return []
    t = k_degree // g
    x0 = tuple(t * u[i][0] for i in range(rank))
    kernel_cols = [tuple(u[i][c] for i in range(rank)) for c in range(1, rank)]

    if not kernel_cols:
        x = DivisorClass(x0)
        return [x] if form.pair(x, x) == self_int else []

    kdim = len(kernel_cols)
    gram = form.gram
    # A[i][j] = N_i . N_j, b[i] = N_i . x0, c0 = x0 . x0  (all via the form)
    gn = [mat_vec(gram, col) for col in kernel_cols]
    a_pos = [[-sum(x * y for x, y in zip(kernel_cols[i], gn[j])) for j in range(kdim)]
             for i in range(kdim)]
    b = [sum(x * y for x, y in zip(x0, gn[i])) for i in range(kdim)]
    c0 = sum(x * y for x, y in zip(x0, mat_vec(gram, x0)))

    # solve A_pos mu = b  (A_pos = -(restricted form), positive definite)
    mu = [row[0] for row in
          solve_exact(tuple(tuple(a_pos[i][j] for j in range(kdim)) for i in range(kdim)),
                      tuple((v,) for v in b))]
    # (y - mu)^T A_pos (y - mu) = (c0 - self_int) + b . mu
    radius = (c0 - self_int) + sum(x * y for x, y in zip(b, mu))
    if radius < 0:
        return []

    d, l = _ldl(a_pos)
    sols: list[DivisorClass] = []
    y = [0] * kdim
    _shell_walk(kdim - 1, Fraction(radius), d, l, mu, y, sols, kernel_cols, x0)
    return sorted(sols)


def _ldl(a) -> tuple[list[Fraction], list[list[Fraction]]]:
    """q(z) = sum_i d_i (z_i + sum_{j>i} l[i][j] z_j)^2 for positive definite a."""
    k = len(a)
    q = [[Fraction(a[i][j]) for j in range(k)] for i in range(k)]
    d = [Fraction(0)] * k
    l = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        d[i] = q[i][i]
        if d[i] <= 0:
            raise ValueError("class enumeration needs a definite complement "
                             "(is K.K positive?)")
        for j in range(i + 1, k):
            l[i][j] = q[i][j] / d[i]
        for r in range(i + 1, k):
            for s in range(r, k):
                q[r][s] -= d[i] * l[i][r] * l[i][s]
                q[s][r] = q[r][s]
    return d, l


def _shell_walk(level, budget, d, l, mu, y, sols, kernel_cols, x0):
    """Enumerate integer y with q(y - mu) exactly exhausting the budget."""
    if level < 0:
        if budget == 0:
            rank = len(x0)
            coeffs = tuple(x0[i] + sum(col[i] * yi for col, yi in zip(kernel_cols, y))
                           for i in range(rank))
            sols.append(DivisorClass(coeffs))
        return
    # center of z_level given the outer choices
    offset = sum(l[level][j] * (y[j] - mu[j]) for j in range(level + 1, len(y)))
    center = mu[level] - offset
    # |t - center| <= sqrt(budget / d[level]); conservative integer range,
    # each candidate is then checked exactly
    bound = budget / d[level]
    root = _isqrt_ceil(bound) + 1
    lo = _floor_frac(center) - root
    hi = _ceil_frac(center) + root
    for t in range(lo, hi + 1):
        used = d[level] * (t - center) ** 2
        if used > budget:
            continue
        y[level] = t
        _shell_walk(level - 1, budget - used, d, l, mu, y, sols, kernel_cols, x0)
    y[level] = 0


def _isqrt_ceil(q: Fraction) -> int:
    if q <= 0:
        return 0
    n, m = q.numerator, q.denominator
    r = math.isqrt(n * m) // m
    while r * r < q:
        r += 1
    return r


def _floor_frac(q: Fraction) -> int:
    return q.numerator // q.denominator


def _ceil_frac(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


# ---------------------------------------------------------------------------
# lazy curve derivation for contraction targets


def _derive_curves(model: SurfaceModel):
    """Negative curves and effective generators from the lattice data alone.

    Valid for models reached from general-position blowups: their rank >= 3
    contraction targets are again general del Pezzo lattices, the rank-2
    ones carry a fibration, and rank 1 is the plane.  Explicit-mode models
    must declare their lists up front (enforced at build time), so this path
    only serves contraction targets.
    """
    form, k = model.form, model.canonical
    rank = form.rank
    if rank == 1:
        gen = DivisorClass((1,))
        if form.pair(gen, -k) <= 0:
            gen = -gen
        return (), (gen,)
    if rank == 2:
        return _derive_rank2(form, k)
    minus_ones = tuple(sorted(solve_classes(form, k, -1, -1)))
    expected = MINUS_ONE_COUNTS.get(rank - 1)
    if form.pair(k, k) != 10 - rank or expected is None or len(minus_ones) != expected:
        raise ValueError("cannot derive curve data: lattice is not a general "
                         "del Pezzo lattice; declare curves explicitly")
    return minus_ones, minus_ones


def _derive_rank2(form: IntersectionForm, k: DivisorClass):
    fibers = sorted(solve_classes(form, k, 0, -2))
    if not fibers:
        raise ValueError("rank-2 lattice without fiber classes")
    sections = sorted(solve_classes(form, k, -1, -1))
    for c0 in sections:
        for f in fibers:
            if form.pair(c0, f) == 1:
                return (c0,), tuple(sorted((c0, f)))
    # no section of square -1: even lattice, two transverse rulings
    pairs = [(f1, f2) for f1 in fibers for f2 in fibers
             if f1 < f2 and form.pair(f1, f2) == 1]
    if pairs:
        f1, f2 = pairs[0]
        return (), tuple(sorted((f1, f2)))
    raise ValueError("rank-2 lattice is not a recognizable fibration")


# ---------------------------------------------------------------------------
# serialization helpers


def surface_to_json(model: SurfaceModel) -> dict:
    out = model.describe()
    if model.kind in ("p2", "blowup_p2"):
        out["minus_one_count"] = len(enumerate_minus_one_classes(model))
    return out
