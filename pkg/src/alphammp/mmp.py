"""Adjoint-pair contraction runs on surface models.

Given an ample A, rescale so that K + A sits on the boundary of the
effective cone, then repeatedly select a (K+A)-nonpositive extremal ray and
contract it as an exact lattice projection, tracking the ample class and
any declared point incidences, until the run classifies an endpoint:
the plane, a conic fibration, a minimal model, or a stop forced by the
point entering the contracted locus.

All arithmetic is exact; traces are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .lattice import (DivisorClass, IntersectionForm, SurfaceModel,
                      eff_threshold, is_ample)
from .linalg import Mat, as_int_matrix, column_lattice_basis, mat_mul, mat_vec
from .points import PointRecord
from .rationals import format_rational


@dataclass(frozen=True)
class ContractionStep:
    """One (-1)-class contraction, recorded as exact matrices.

    pushforward_matrix maps source classes to the target basis; the
    section_matrix embeds the target lattice back as the orthogonal
    complement of the contracted class (the class-level strict transform of
    curves missing the contracted point).
    """

    contracted_class: DivisorClass
    source: SurfaceModel
    target: SurfaceModel
    pushforward_matrix: Mat
    section_matrix: Mat

    def to_json(self) -> dict:
        return {
            "contracted_class": self.contracted_class.to_json(),
            "target": self.target.describe(),
            "pushforward_matrix": [list(r) for r in self.pushforward_matrix],
            "section_matrix": [list(r) for r in self.section_matrix],
        }


@dataclass(frozen=True)
class Endpoint:
    """MMP endpoint tag: P2 | MoriFiber | Minimal | StoppedAtPoint."""

    tag: str
    fiber_class: Optional[DivisorClass] = None
    step_index: Optional[int] = None

    def to_json(self) -> dict:
        out = {"tag": self.tag}
        if self.fiber_class is not None:
            out["fiber_class"] = self.fiber_class.to_json()
        if self.step_index is not None:
            out["step_index"] = self.step_index
        return out


@dataclass(frozen=True)
class MMPTrace:
    """Full record of a run: models, pushed classes, endpoint.

    models[0] is the input model and models[i+1] the target of steps[i];
    ample_path and d_path carry the rescaled ample and D = K + A' through
    the same chain, and point_path the propagated incidence records.
    """

    steps: tuple[ContractionStep, ...]
    rescale_factor: Fraction
    endpoint: Endpoint
    stop_reason: str
    models: tuple[SurfaceModel, ...]
    ample_path: tuple[DivisorClass, ...]
    d_path: tuple[DivisorClass, ...]
    point_path: tuple[Optional[PointRecord], ...]
    stopped_ray: Optional[DivisorClass] = None

    @property
    def final_model(self) -> SurfaceModel:
        return self.models[-1]

    @property
    def final_ample(self) -> DivisorClass:
        return self.ample_path[-1]

    def to_json(self) -> dict:
        out = {
            "rescale_factor": format_rational(self.rescale_factor),
            "steps": [s.to_json() for s in self.steps],
            "endpoint": self.endpoint.to_json(),
            "stop_reason": self.stop_reason,
            "models": [m.describe() for m in self.models],
            "ample_path": [a.to_json() for a in self.ample_path],
            "d_path": [d.to_json() for d in self.d_path],
        }
        if self.stopped_ray is not None:
            out["stopped_ray"] = self.stopped_ray.to_json()
        return out


def rescale_to_boundary(model: SurfaceModel, a: DivisorClass):
    """Scale ample A so K + A' lies on the effective-cone boundary.

    Returns (y*, A') with y* = eff_threshold(model, A) and A' = y* A.
    """
    y_star = eff_threshold(model, a)
    return y_star, a.scale(y_star)


def find_negative_ray(model: SurfaceModel, d: DivisorClass,
                      boundary_mode: bool = False) -> Optional[DivisorClass]:
    """Lex-least ray generator pairing negatively with D.

    Sweeps negative curves plus square-zero effective generators in
    lexicographic order; boundary_mode accepts pairing zero as well, except
    that D = 0 always yields none (everything pairs to zero there).
    """
    if d.is_zero:
        return None
    return _select_ray(model, d, boundary_mode)


def _select_ray(model: SurfaceModel, d: DivisorClass,
                boundary_mode: bool) -> Optional[DivisorClass]:
    # internal variant: for D = 0 in boundary mode every ray pairs to zero
    # and the lex-least one is selected, which is what a run with K+A' = 0
    # (anticanonical boundary) needs to make progress
    for c in model.ray_generators():
        v = model.form.pair(d, c)
        if v < 0 or (boundary_mode and v == 0):
            return c
    return None


def contract(model: SurfaceModel, c: DivisorClass) -> ContractionStep:
    """Contract a (-1)-class: exact projection onto its orthogonal complement.

    The projection v -> v + (v.C) C is integral because C.C = -1; its image
    is exactly the saturated orthogonal complement of C, for which a
    Hermite-reduced column basis is computed.  The pushforward matrix writes
    projections in that basis and the section matrix is the basis itself.
    """
    rank = model.rank
    if len(c) != rank:
        raise ValueError("dimension mismatch")
    if not c.is_integral:
        raise ValueError(f"cannot contract non-integral class {c}")
    if model.form.pair(c, c) != -1 or model.form.pair(c, model.canonical) != -1:
        raise ValueError(
            f"cannot contract {c}: needs self-intersection -1 and canonical "
            f"degree -1, got {model.form.pair(c, c)} and "
            f"{model.form.pair(c, model.canonical)}")
    if model.position == "general" and c not in model.neg_curves:
        raise ValueError(f"{c} is not a negative curve of {model.tag}")

    cvec = c.int_coeffs()
    gc = [int(x) for x in mat_vec(model.form.gram, cvec)]
    proj = tuple(tuple((1 if i == j else 0) + cvec[i] * gc[j] for j in range(rank))
                 for i in range(rank))
    basis = column_lattice_basis(proj)
    push = _solve_columns(basis, proj)
    # pushforward o section = identity on the target lattice
    ident = mat_mul(push, basis)
    assert all(ident[i][j] == (1 if i == j else 0)
               for i in range(rank - 1) for j in range(rank - 1))

    bt = tuple(tuple(basis[i][j] for i in range(rank)) for j in range(rank - 1))
    gram_t = mat_mul(bt, mat_mul(model.form.gram, basis))
    form_t = IntersectionForm(as_int_matrix(gram_t))
    k_t = DivisorClass(mat_vec(push, model.canonical.coeffs))
    target = _classify_target(form_t, k_t, model.position)
    assert target.k_squared == model.k_squared + 1

    return ContractionStep(contracted_class=c, source=model, target=target,
                           pushforward_matrix=push, section_matrix=basis)


def _solve_columns(basis: Mat, proj: Mat) -> Mat:
    """Integer P with basis @ P = proj (columns of proj lie in the lattice
    spanned by the columns of basis)."""
    from .linalg import solve_exact
    rank = len(proj)
    rhs = tuple(tuple(Fraction(proj[i][j]) for j in range(rank)) for i in range(rank))
    sol = solve_exact(basis, rhs)
    return as_int_matrix(sol)


def _classify_target(form: IntersectionForm, k: DivisorClass,
                     position: str) -> SurfaceModel:
    rank = form.rank
    if rank == 1:
        tag, kind = "P2", "p2"
    elif rank == 2:
        tag, kind = f"rank-2 fibration (K^2 = {form.pair(k, k)})", "hirzebruch"
    else:
        tag, kind = f"contraction target (rank {rank})", "blowup_p2"
    # curve lists stay lazy: pure lattice work never needs them
    return SurfaceModel(tag=tag, kind=kind, form=form, canonical=k,
                        position=position, r=rank - 1 if kind == "blowup_p2" else None)


def pushforward(step: ContractionStep, d: DivisorClass) -> DivisorClass:
    if len(d) != step.source.rank:
        raise ValueError("dimension mismatch")
    return DivisorClass(mat_vec(step.pushforward_matrix, d.coeffs))


def strict_transform_class(step: ContractionStep, c_prime: DivisorClass,
                           m: int) -> DivisorClass:
    """Class of the strict transform of C' under one contraction.

    m is the declared multiplicity of C' at the contracted point (0 when the
    curve misses it); the class is section(C') - m * (contracted class).
    """
    if m < 0:
        raise ValueError("multiplicity must be nonnegative")
    if len(c_prime) != step.target.rank:
        raise ValueError("dimension mismatch")
    lifted = DivisorClass(mat_vec(step.section_matrix, c_prime.coeffs))
    result = lifted - step.contracted_class.scale(m)
    assert pushforward(step, result) == c_prime
    return result


def _propagate_point(step: ContractionStep,
                     point: Optional[PointRecord]) -> Optional[PointRecord]:
    # class-level incidence bookkeeping: the run never contracts a curve
    # through the point (it stops first), so every declared incidence simply
    # pushes forward; branch data is untouched by an isomorphism near P
    if point is None:
        return None
    incidences = [(pushforward(step, cls), b) for cls, b in point.incidences]
    return PointRecord(incidences=incidences,
                       essentially_bounded=point.essentially_bounded,
                       v_adic_limit=point.v_adic_limit)


def run_mmp(model: SurfaceModel, a: DivisorClass,
            point: Optional[PointRecord] = None,
            boundary_mode: bool = False) -> MMPTrace:
    """Run the adjoint contraction loop from (model, ample A).

    Rescales A to put D = K + A' on the effective boundary, then loops:
    pick the lex-least ray with D-pairing < 0 (<= 0 in boundary mode),
    stop if the ray carries the point, classify square-zero rays as conic
    fibrations, contract (-1)-rays, push A, D, and incidences forward.
    Stops at rank 1 (P2), at a fibration class (MoriFiber), when no ray
    qualifies (Minimal, or MoriFiber when D is a fiber multiple), or when
    the point blocks the next contraction (StoppedAtPoint).
    """
    if not is_ample(model, a):
        raise ValueError("run_mmp requires an ample class")
    if point is not None:
        for cls, _ in point.incidences:
            if len(cls) != model.rank:
                raise ValueError(f"incidence class {cls} has wrong rank")

    y_star, a_cur = rescale_to_boundary(model, a)
    d_cur = model.canonical + a_cur
    models = [model]
    ample_path = [a_cur]
    d_path = [d_cur]
    point_path: list[Optional[PointRecord]] = [point]
    steps: list[ContractionStep] = []
    cur = model
    stopped_ray = None

    while True:
        if cur.rank == 1:
            endpoint = Endpoint("P2")
            reason = "rank 1 reached"
            break
        ray = _select_ray(cur, d_cur, boundary_mode)
        if ray is None:
            endpoint, reason = _classify_no_ray(cur, d_cur, boundary_mode)
            break
        if point is not None and ray in point.classes():
            endpoint = Endpoint("StoppedAtPoint", step_index=len(steps))
            reason = "selected ray carries the point"
            stopped_ray = ray
            break
        sq = cur.form.pair(ray, ray)
        if sq == 0:
            if cur.form.pair(cur.canonical, ray) == -2:
                endpoint = Endpoint("MoriFiber", fiber_class=ray.primitive())
                reason = "selected ray is a fiber class"
            else:
                endpoint = Endpoint("Minimal")
                reason = (f"square-zero ray {ray} has canonical degree "
                          f"{cur.form.pair(cur.canonical, ray)}, not a conic class")
            break
        if sq != -1 or cur.form.pair(cur.canonical, ray) != -1:
            endpoint = Endpoint("Minimal")
            reason = f"selected ray {ray} is not a contractible (-1)-class"
            break
        step = contract(cur, ray)
        steps.append(step)
        a_cur = pushforward(step, a_cur)
        d_cur = pushforward(step, d_cur)
        point = _propagate_point(step, point)
        cur = step.target
        models.append(cur)
        ample_path.append(a_cur)
        d_path.append(d_cur)
        point_path.append(point)
        assert d_cur == cur.canonical + a_cur

    return MMPTrace(steps=tuple(steps), rescale_factor=y_star, endpoint=endpoint,
                    stop_reason=reason, models=tuple(models),
                    ample_path=tuple(ample_path), d_path=tuple(d_path),
                    point_path=tuple(point_path), stopped_ray=stopped_ray)


def _classify_no_ray(model: SurfaceModel, d: DivisorClass, boundary_mode: bool):
    mode = "nonpositive" if boundary_mode else "negative"
    if not d.is_zero and model.form.pair(d, d) == 0:
        f = d.primitive()
        if model.form.pair(model.canonical, f) == -2:
            return (Endpoint("MoriFiber", fiber_class=f),
                    "K + A' is a multiple of a fiber class")
    return Endpoint("Minimal"), f"no D-{mode} ray among the curve generators"
