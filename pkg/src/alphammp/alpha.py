"""Approximation-constant calculus on rational curves.

The curve formula alpha = min_q d/(r_q m_q) and its M-constant, concavity
combination of lower bounds, the dimension lower bound for essentially
bounded points, and the best-approximation-curve driver: run the adjoint
contraction loop, pick the candidate curve the endpoint dictates, pull it
back by strict transforms, and emit an exactly re-verifiable certificate.

Everything here is exact rationals or +infinity; no floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .lattice import DivisorClass, SurfaceModel, eff_membership
from .mmp import MMPTrace, run_mmp, strict_transform_class
from .points import (BranchData, ExtendedRational, INFINITY, PointRecord,
                     SMOOTH_BRANCH)
from .rationals import format_rational


def alpha_on_curve(d, b: BranchData) -> ExtendedRational:
    """min over branches of d/(r*m); r = 0 contributes +infinity.

    d is the nef degree A.C; the result is +infinity exactly when every
    branch has r = 0 (the point is v-adically isolated on the curve).
    """
    d = Fraction(d)
    if d < 0:
        raise ValueError("alpha_on_curve needs a nonnegative degree")
    best = INFINITY
    for r, m in b.branches:
        if r == 0:
            continue
        best = min(best, ExtendedRational(d / (r * m)))
    return best


def curve_M_constant(b: BranchData) -> ExtendedRational:
    """min over branches of 1/(r*m), so alpha_on_curve(d, b) = M*d.

    Undefined (raises) when every branch has r = 0: alpha is +infinity for
    every positive degree there and no finite M reproduces that.
    """
    best = None
    for r, m in b.branches:
        if r == 0:
            continue
        v = Fraction(1, r * m)
        best = v if best is None or v < best else best
    if best is None:
        raise ValueError("M-constant undefined: every branch has r = 0 "
                         "(alpha is +infinity for all positive degrees)")
    return ExtendedRational(best)


def concavity_lower_bound(terms) -> ExtendedRational:
    """Weighted sum of alpha lower bounds: sum a_i * alpha_i, weights > 0.

    Any +infinity term makes the bound +infinity.  The excluded mixed
    {-inf, +inf} case cannot arise: only +infinity is representable.
    """
    total = ExtendedRational.of(0)
    for weight, value in terms:
        weight = Fraction(weight)
        if weight <= 0:
            raise ValueError("concavity weights must be positive")
        if not isinstance(value, ExtendedRational):
            value = ExtendedRational.of(value)
        total = total + value.scale(weight)
    return total


def essential_lower_bound(model: SurfaceModel, a: DivisorClass,
                          point: PointRecord):
    """Certified lower bound for the essential constant: (value, diagnostic).

    Returns 2 (the surface dimension) when the point is declared essentially
    bounded and K + A is effective; otherwise the vacuous bound 0 with a
    diagnostic explaining which hypothesis failed.
    """
    if not point.essentially_bounded:
        return ExtendedRational.of(0), "point not declared essentially bounded"
    cert = eff_membership(model, model.canonical + a)
    if not cert.verdict:
        return (ExtendedRational.of(0),
                "K + A is not effective: the dimension bound does not apply")
    return ExtendedRational.of(2), "essentially bounded and K + A effective"


@dataclass(frozen=True)
class CertEntry:
    """One named exact inequality of a certificate."""

    name: str
    lhs: Fraction
    rhs: Fraction
    relation: str  # "<=" or ">="

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs if self.relation == "<=" else self.lhs >= self.rhs

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": format_rational(self.lhs),
                "rhs": format_rational(self.rhs), "relation": self.relation}


@dataclass(frozen=True)
class ChainVerdict:
    """Outcome of the reduction-chain check for one curve."""

    certified: bool
    checks: tuple[CertEntry, ...]
    alpha: Optional[ExtendedRational]

    def to_json(self) -> dict:
        return {"certified": self.certified,
                "checks": [c.to_json() for c in self.checks],
                "alpha": None if self.alpha is None else self.alpha.format()}


def reduce_chain_check(model: SurfaceModel, a: DivisorClass, c: DivisorClass,
                       b: BranchData) -> ChainVerdict:
    """Exact checks -K.C <= 2 and (K+A).C <= 0 for the reduction chain.

    When both hold (and the point is declared essentially bounded by the
    caller's context), alpha(P, A|_C) bounds the essential constant from
    below the dimension; the verdict carries the curve's alpha for A.
    """
    form, k = model.form, model.canonical
    checks = (
        CertEntry("anticanonical_degree", -form.pair(k, c), Fraction(2), "<="),
        CertEntry("adjoint_nonpositive", form.pair(k + a, c), Fraction(0), "<="),
        CertEntry("nef_degree", -form.pair(a, c), Fraction(0), "<="),
    )
    certified = all(e.holds for e in checks)
    alpha = alpha_on_curve(form.pair(a, c), b) if form.pair(a, c) >= 0 else None
    return ChainVerdict(certified=certified, checks=checks, alpha=alpha)


@dataclass(frozen=True)
class CurveReport:
    """Best-approximation-curve result with an exact certificate.

    alpha_value uses the caller's A; alpha_rescaled uses A' = y* A, the
    boundary-normalized class the certificate inequalities are stated for.
    """

    curve_class_on_x: DivisorClass
    curve_class_end: DivisorClass
    end_level: int
    case_tag: str
    alpha_value: ExtendedRational
    alpha_rescaled: ExtendedRational
    rescale_factor: Fraction
    certificate: tuple[CertEntry, ...]
    branches: Optional[BranchData]
    branch_source: str  # "declared" | "assumed_smooth" | "unknown"
    multiplicities: tuple[int, ...]
    essential_bound: ExtendedRational
    essential_diagnostic: str
    trace: MMPTrace

    def to_json(self) -> dict:
        return {
            "curve_class_on_X": self.curve_class_on_x.to_json(),
            "curve_class_end": self.curve_class_end.to_json(),
            "end_level": self.end_level,
            "case_tag": self.case_tag,
            "alpha_value": self.alpha_value.format(),
            "alpha_rescaled": self.alpha_rescaled.format(),
            "rescale_factor": format_rational(self.rescale_factor),
            "certificate": [e.to_json() for e in self.certificate],
            "branches": None if self.branches is None else self.branches.to_json(),
            "branch_source": self.branch_source,
            "multiplicities": list(self.multiplicities),
            "essential_bound": self.essential_bound.format(),
            "essential_diagnostic": self.essential_diagnostic,
            "trace": self.trace.to_json(),
        }


def best_curve(model: SurfaceModel, a: DivisorClass,
               point: PointRecord) -> CurveReport:
    """Find a certified candidate for the curve of best A-approximation.

    Runs the boundary-mode contraction loop on (model, A), then:
    a stopped run hands back the ray that carries the point; a plane
    endpoint takes the line through the image of the last contracted point;
    a fibration endpoint takes a declared (-1)-curve through the point when
    that certifies, else the fiber class.  The candidate is pulled back by
    strict transforms and reported with exact certificate inequalities.
    """
    if point is None or not point.essentially_bounded:
        raise ValueError("best_curve requires a point declared essentially "
                         "bounded; the certificate is only stated under "
                         "that hypothesis")
    trace = run_mmp(model, a, point, boundary_mode=True)
    endpoint = trace.endpoint

    if endpoint.tag == "StoppedAtPoint":
        end_level = endpoint.step_index
        candidate = trace.stopped_ray
        sq = trace.models[end_level].form.pair(candidate, candidate)
        if sq == -1:
            case_tag = "ExceptionalCurve"
        elif sq == 0:
            case_tag = "HirzebruchFiber"
        else:
            raise ValueError(
                f"stopped ray {candidate} has self-intersection {sq}; no "
                "certified candidate exists at class level")
        mults = (0,) * end_level
    elif endpoint.tag == "MoriFiber":
        end_level = len(trace.steps)
        candidate, case_tag = _fibration_candidate(trace, end_level)
        mults = (0,) * end_level
    elif endpoint.tag == "P2":
        end_level = len(trace.steps)
        # the line class: the effective generator of the rank-1 endpoint
        candidate, = trace.final_model.eff_generators
        case_tag = "P2Line"
        mults = (0,) * max(end_level - 1, 0) + ((1,) if end_level >= 1 else ())
    else:
        raise ValueError(
            f"no certified candidate at a minimal endpoint ({trace.stop_reason}); "
            "the nef case is outside the driver's scope")

    c_x = _pull_back(trace, end_level, candidate, mults)
    cert = _build_certificate(trace, case_tag, end_level, candidate, mults, c_x)
    bad = [e for e in cert if not e.holds]
    if bad:
        raise ValueError(f"certificate inequality failed: {bad[0].to_json()}; "
                         "class-level data cannot certify this input")

    branches, branch_source = _resolve_branches(trace, point, end_level,
                                                candidate, c_x)
    a_start = trace.ample_path[0]
    d_orig = model.form.pair(a, c_x)
    d_resc = model.form.pair(a_start, c_x)
    if branches is None:
        alpha_value = INFINITY
        alpha_rescaled = INFINITY
    else:
        alpha_value = alpha_on_curve(d_orig, branches)
        alpha_rescaled = alpha_on_curve(d_resc, branches)

    bound, diagnostic = essential_lower_bound(model, a_start, point)

    return CurveReport(
        curve_class_on_x=c_x, curve_class_end=candidate, end_level=end_level,
        case_tag=case_tag, alpha_value=alpha_value,
        alpha_rescaled=alpha_rescaled, rescale_factor=trace.rescale_factor,
        certificate=cert, branches=branches, branch_source=branch_source,
        multiplicities=mults, essential_bound=bound,
        essential_diagnostic=diagnostic, trace=trace)


def _fibration_candidate(trace: MMPTrace, end_level: int):
    # a declared (-1)-curve through the point is preferred when the adjoint
    # pairing certifies it would be contracted next; otherwise the fiber
    end = trace.final_model
    record = trace.point_path[-1]
    d_end = trace.d_path[-1]
    if record is not None:
        for cls in sorted(record.classes()):
            if cls in end.neg_curves and end.form.pair(d_end, cls) <= 0:
                return cls, "MinusOneCurve"
    return trace.endpoint.fiber_class, "HirzebruchFiber"


def _pull_back(trace: MMPTrace, end_level: int, c_end: DivisorClass,
               mults) -> DivisorClass:
    c = c_end
    for i in range(end_level - 1, -1, -1):
        c = strict_transform_class(trace.steps[i], c, mults[i])
    return c


def _build_certificate(trace: MMPTrace, case_tag: str, end_level: int,
                       candidate: DivisorClass, mults, c_x: DivisorClass):
    x = trace.models[0]
    a_x = trace.ample_path[0]
    end = trace.models[end_level]
    a_end = trace.ample_path[end_level]
    d_end = trace.d_path[end_level]
    pair_x, pair_end = x.form.pair, end.form.pair
    two, three = Fraction(2), Fraction(3)

    if case_tag == "P2Line":
        if end_level == 0:
            # the model itself is the plane: the line through the point is
            # the extremal rational curve, anticanonical degree dim + 1
            return (
                CertEntry("adjoint_nonpositive", pair_end(d_end, candidate),
                          Fraction(0), "<="),
                CertEntry("line_degree",
                          -pair_end(end.canonical, candidate), three, "<="),
                CertEntry("pushforward_degree", pair_end(a_end, candidate),
                          three, "<="),
                CertEntry("strict_transform_drop", pair_x(a_x, c_x),
                          pair_end(a_end, candidate), "<="),
            )
        # line through the image of the last contracted point, pulled back:
        # meeting the exceptional divisor caps the anticanonical degree
        last = trace.steps[end_level - 1]
        level_model = trace.models[end_level - 1]
        c_level = strict_transform_class(last, candidate, mults[end_level - 1])
        meets = level_model.form.pair(c_level, last.contracted_class)
        return (
            CertEntry("line_meets_exceptional", meets, Fraction(1), ">="),
            CertEntry("anticanonical_degree", -pair_x(x.canonical, c_x), two, "<="),
            CertEntry("canonical_budget",
                      -pair_x(x.canonical, c_x) + meets, three, "<="),
            CertEntry("strict_transform_drop", pair_x(a_x, c_x),
                      pair_end(a_end, candidate), "<="),
        )

    return (
        CertEntry("adjoint_nonpositive", pair_end(d_end, candidate),
                  Fraction(0), "<="),
        CertEntry("anticanonical_degree",
                  -pair_end(end.canonical, candidate), two, "<="),
        CertEntry("pushforward_degree", pair_end(a_end, candidate), two, "<="),
        CertEntry("strict_transform_drop", pair_x(a_x, c_x),
                  pair_end(a_end, candidate), "<="),
    )


def _resolve_branches(trace: MMPTrace, point: PointRecord, end_level: int,
                      candidate: DivisorClass, c_x: DivisorClass):
    declared = point.branch_for(c_x)
    if declared is not None:
        return declared, "declared"
    record = trace.point_path[end_level]
    if record is not None:
        b = record.branch_for(candidate)
        if b is not None:
            return b, "declared"
    if point.v_adic_limit:
        return SMOOTH_BRANCH, "assumed_smooth"
    return None, "unknown"


def verify_report(report: CurveReport) -> bool:
    """Re-verify a CurveReport from its trace: recompute the pulled-back
    class, every certificate pairing, and the alpha values from scratch."""
    trace = report.trace
    c_x = _pull_back(trace, report.end_level, report.curve_class_end,
                     report.multiplicities)
    if c_x != report.curve_class_on_x:
        return False
    cert = _build_certificate(trace, report.case_tag, report.end_level,
                              report.curve_class_end, report.multiplicities, c_x)
    if cert != report.certificate:
        return False
    if not all(e.holds for e in cert):
        return False
    if report.branches is not None:
        x = trace.models[0]
        d_resc = x.form.pair(trace.ample_path[0], c_x)
        if alpha_on_curve(d_resc, report.branches) != report.alpha_rescaled:
            return False
        y = trace.rescale_factor
        expected = alpha_on_curve(d_resc / y, report.branches)
        if expected != report.alpha_value:
            return False
    else:
        if not (report.alpha_value.is_infinite and report.alpha_rescaled.is_infinite):
            return False
    return True
