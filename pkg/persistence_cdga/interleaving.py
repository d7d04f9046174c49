"""
Interleavings of persistence CDGAs in the homotopy category.

Upper bounds come from explicit certificates (a pair of shifted morphisms and
two homotopies), checked exactly. Lower bounds come from obstructions: stage
patterns for which no interleaving can exist because
- a structure map has larger rank in H or H(Q) than the map it would factor through
- every graded algebra map out of the middle stage kills a degree the composite needs
- no member of a trusted automorphism family of the base is compatible with the
  linear-part kernels of both filtrations

Also verifies zig-zag certificates of H-formality.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy import Rational

from .cdga import (
    CheckResult,
    Element,
    FreeCDGA,
    Homotopy,
    Morphism,
    compose,
    identity_morphism,
    inverse_morphism,
    stage_support,
    transfer,
    verify_homotopy,
    verify_morphism,
)
from .constraints import INFEASIBLE, ConstraintSystem, SolveOutcome
from .errors import AlgebraMismatchError, CapExceededError, ModelError
from .fields import Field
from .linalg import LinearMap, combine
from .persistence import (
    PersistenceCDGA,
    PersistenceModule,
    floor_stage,
    persistence_cohomology,
    persistence_linear_homology,
    to_rational,
)
from .sullivan import GradedCohomology, verify_quasi_iso

logger = logging.getLogger(__name__)

ZERO_FACTOR_H = "ZeroFactorH"
ZERO_FACTOR_HQ = "ZeroFactorHQ"
NILPOTENT_FACTOR = "NilpotentFactor"
AUTOMORPHISM_FAMILY = "AutomorphismFamily"

ONLY_TRIVIAL = "OnlyTrivialOnDegree"
EXISTS_WITNESS = "ExistsWitness"
INCONCLUSIVE = "Inconclusive"

DEFAULT_SOLVER = {"max_witness_variables": 4, "witness_values": [0, 1, -1]}


# ----------------------------------------------------------------------
# Certificates
# ----------------------------------------------------------------------


@dataclass
class InterleavingCertificate:
    """An ε-interleaving in the homotopy category, written on colimits.

    Args:
        epsilon: The interleaving parameter
        phi: Morphism from colim F to colim G
        psi: Morphism from colim G to colim F
        homotopy_F: Homotopy from psi.phi to the identity of colim F
        homotopy_G: Homotopy from phi.psi to the identity of colim G
        name: Label used in reports
    """

    epsilon: sympy.Rational
    phi: Morphism
    psi: Morphism
    homotopy_F: Homotopy
    homotopy_G: Homotopy
    name: str = ""


@dataclass
class CertificateReport:
    ok: bool
    checks: List[CheckResult]
    epsilon: Optional[sympy.Rational] = None
    kind: str = "interleaving"

    def __bool__(self) -> bool:
        return self.ok

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.ok]

    def format_lines(self) -> List[str]:
        header = f"{self.kind} certificate"
        if self.epsilon is not None:
            header += f" at epsilon {self.epsilon}"
        lines = [f"{header}: {'verified' if self.ok else 'REJECTED'}"]
        for check in self.checks:
            status = "ok" if check.ok else "FAIL"
            lines.append(f"  [{status}] {check.check}: {check.message}")
            if not check.ok and check.residue:
                lines.append(f"         residue: {check.residue}")
        return lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "ok": self.ok,
            "epsilon": None if self.epsilon is None else str(self.epsilon),
            "checks": [c.to_dict() for c in self.checks],
        }


def _stage_shift_check(
    name: str, m: Morphism, source: PersistenceCDGA, target: PersistenceCDGA, allowed: int
) -> CheckResult:
    source_stages, target_stages = source.staging, target.staging
    for g in m.source.generators:
        reached = stage_support(m.image_of(g.index), target_stages)
        if reached > source_stages[g.name] + allowed:
            return CheckResult.failed(
                name,
                f"{m.label}({g.name}) reaches stage {reached}, but {g.name} lives at stage "
                f"{source_stages[g.name]} and the shift allows {allowed}",
                generator=g.name,
                residue=m.image_of(g.index).format(),
            )
    return CheckResult.passed(name, f"{m.label} shifts stages by at most {allowed}")


def _homotopy_stage_check(name: str, h: Homotopy, p: PersistenceCDGA, allowed: int) -> CheckResult:
    staging = p.staging
    for gen_name, reached in h.stage_shift(staging).items():
        if reached > staging[gen_name] + allowed:
            return CheckResult.failed(
                name,
                f"{h.label}({gen_name}) reaches stage {reached}, beyond stage "
                f"{staging[gen_name]} + {allowed}",
                generator=gen_name,
                residue=h.image(gen_name).format(),
            )
    return CheckResult.passed(name, f"{h.label} stays within {allowed} stages")


def verify_certificate(
    certificate: InterleavingCertificate,
    F: PersistenceCDGA,
    G: PersistenceCDGA,
    cap: Optional[int] = None,
) -> CertificateReport:
    """Check every condition of an ε-interleaving certificate and report each one."""
    eps = to_rational(certificate.epsilon)
    phi, psi = certificate.phi, certificate.psi
    h_f, h_g = certificate.homotopy_F, certificate.homotopy_G
    checks: List[CheckResult] = []
    if (
        phi.source is not F.algebra
        or phi.target is not G.algebra
        or psi.source is not G.algebra
        or psi.target is not F.algebra
        or h_f.source is not F.algebra
        or h_f.target is not F.algebra
        or h_g.source is not G.algebra
        or h_g.target is not G.algebra
    ):
        checks.append(
            CheckResult.failed("certificate-algebras", "Certificate maps do not connect the two colimits")
        )
        return CertificateReport(False, checks, eps)
    if eps < 0:
        checks.append(CheckResult.failed("certificate-epsilon", f"epsilon {eps} is negative"))
        return CertificateReport(False, checks, eps)
    shift, double = floor_stage(eps), floor_stage(2 * eps)
    cap = min(F.algebra.cap, G.algebra.cap) if cap is None else cap

    checks.append(verify_morphism(phi, cap))
    checks.append(verify_morphism(psi, cap))
    checks.append(_stage_shift_check("stage-shift-phi", phi, F, G, shift))
    checks.append(_stage_shift_check("stage-shift-psi", psi, G, F, shift))
    checks.append(verify_homotopy(h_f, compose(psi, phi), identity_morphism(F.algebra), cap))
    checks.append(verify_homotopy(h_g, compose(phi, psi), identity_morphism(G.algebra), cap))
    checks.append(_homotopy_stage_check("homotopy-stages-F", h_f, F, double))
    checks.append(_homotopy_stage_check("homotopy-stages-G", h_g, G, double))
    ok = all(checks)
    logger.info(f"Certificate {certificate.name or ''} at epsilon {eps}: {'verified' if ok else 'rejected'}")
    return CertificateReport(ok, checks, eps)


# ----------------------------------------------------------------------
# Graded algebra maps between cohomology algebras
# ----------------------------------------------------------------------


@dataclass
class AlgebraMapVerdict:
    """What the constraint engine proved about graded algebra maps H(A) → H(B).

    Args:
        kind: OnlyTrivialOnDegree, ExistsWitness or Inconclusive
        degree: Degree that every map kills (OnlyTrivialOnDegree)
        assignment: Unknown values of a nonzero map (ExistsWitness)
        reason: Explanation (Inconclusive)
    """

    kind: str
    degree: Optional[int] = None
    assignment: Dict[str, Any] = field(default_factory=dict)
    reason: str = ""

    @property
    def only_trivial(self) -> bool:
        return self.kind == ONLY_TRIVIAL


def _unknown(degree: int, source_index: int, target_index: int) -> str:
    return f"l{degree}_{source_index}_{target_index}"


def algebra_map_space(
    source: GradedCohomology,
    target: GradedCohomology,
    degrees: Sequence[int],
    max_witness_variables: int = 4,
    witness_values: Sequence[int] = (0, 1, -1),
) -> AlgebraMapVerdict:
    """Decide whether every graded algebra map source → target vanishes on some degree in degrees.

    A map sends the i-th basis class of degree n to sum_j l(n,i,j) b_j. Each product
    of basis classes with degree at most the common cap gives polynomial equations.
    """
    if source.field != target.field:
        raise ModelError("Cohomologies over different fields")
    cap = min(source.cap, target.cap)
    names: List[str] = []
    for n in range(1, cap + 1):
        for i in range(source.dimension(n)):
            for j in range(target.dimension(n)):
                names.append(_unknown(n, i, j))
    wanted = [n for n in degrees if 0 < n <= cap]
    for n in wanted:
        if source.dimension(n) and not target.dimension(n):
            return AlgebraMapVerdict(ONLY_TRIVIAL, degree=n)
    if not names:
        return AlgebraMapVerdict(INCONCLUSIVE, reason="no unknowns in the requested degrees")
    system = ConstraintSystem(source.field, names)
    ring = system.ring
    unknown = {name: system.variable(name) for name in names}

    def image(n: int, i: int) -> List[Any]:
        return [unknown[_unknown(n, i, j)] for j in range(target.dimension(n))]

    for p in range(1, cap + 1):
        for q in range(p, cap + 1 - p):
            if not source.dimension(p) or not source.dimension(q):
                continue
            table = target.product_table(p, q)
            for i in range(source.dimension(p)):
                for j in range(source.dimension(q)):
                    product = source.product(p, i, q, j)
                    left, right = image(p, i), image(q, j)
                    for u in range(target.dimension(p + q)):
                        value = ring.zero
                        for s, a in enumerate(left):
                            for t, b in enumerate(right):
                                c = table[s][t][u]
                                if c:
                                    value += a * b * c
                        for k, c in enumerate(product):
                            if c:
                                value -= unknown[_unknown(p + q, k, u)] * c
                        system.add_equation(value)
    logger.debug(f"algebra_map_space: {system!r}")

    witness: Optional[SolveOutcome] = None
    reasons = []
    for n in wanted:
        outcomes = []
        for i in range(source.dimension(n)):
            for j in range(target.dimension(n)):
                trial = system.copy()
                trial.add_nonzero(unknown[_unknown(n, i, j)])
                outcomes.append(trial.solve(max_witness_variables, witness_values))
        if outcomes and all(o.status == INFEASIBLE for o in outcomes):
            return AlgebraMapVerdict(ONLY_TRIVIAL, degree=n)
        for outcome in outcomes:
            if outcome.has_witness and witness is None:
                witness = outcome
            elif not outcome.has_witness and not outcome.infeasible:
                reasons.append(f"degree {n}: {outcome.reason}")
    if witness is not None:
        return AlgebraMapVerdict(EXISTS_WITNESS, assignment=witness.assignment)
    return AlgebraMapVerdict(INCONCLUSIVE, reason="; ".join(reasons) or "nothing decided")


# ----------------------------------------------------------------------
# Automorphism families
# ----------------------------------------------------------------------


class AutomorphismFamily:
    """A parametrised family of automorphisms of a base algebra, trusted to be complete.

    The family lives on a copy of the base algebra over the polynomial ring in its
    parameters. Discrete parameters take one of finitely many values each.

    Args:
        base: The base algebra ∧V (over the ground field)
        parameters: Continuous parameter names
        choices: Discrete parameter name -> allowed values
        name: Label used in reports
    """

    def __init__(
        self,
        base: FreeCDGA,
        parameters: Sequence[str],
        choices: Optional[Mapping[str, Sequence[Any]]] = None,
        name: str = "",
    ):
        self.base = base
        self.name = name
        self.parameters = tuple(parameters)
        self.choices: Dict[str, List[Any]] = {
            key: [base.field.convert(v) for v in values] for key, values in (choices or {}).items()
        }
        self.field = base.field.with_parameters(self.parameters + tuple(self.choices))
        self.algebra = FreeCDGA(
            [(g.name, g.degree) for g in base.generators], self.field, base.cap, f"{base.label}[family]"
        )
        self.algebra.set_differential(
            {g.name: self.lift(base.differential_of(g.name)) for g in base.generators}
        )
        self.images: Dict[str, Element] = {}
        self.nonzero: List[Any] = []

    def lift(self, element: Element) -> Element:
        """The same element with coefficients read in the parameter ring."""
        return Element(self.algebra, {m: self.field.convert(c) for m, c in element.terms.items()})

    def set_images(self, images: Mapping[str, Element]) -> None:
        for gen_name, image in images.items():
            self.algebra.generator(gen_name)
            if image.algebra is not self.algebra:
                raise AlgebraMismatchError(f"Family image of {gen_name} is not over the family algebra")
        self.images = dict(images)

    def add_nonzero(self, polynomial: Any) -> None:
        self.nonzero.append(self.field.convert(polynomial))

    def morphism(self) -> Morphism:
        return Morphism(self.algebra, self.algebra, self.images, self.name or "family")

    def linear_coefficient(self, source: str, target: str) -> Any:
        image = self.images.get(source)
        if image is None:
            return self.field.zero
        return image.coefficient(((self.algebra.generator(target).index, 1),))

    def choice_assignments(self) -> List[Dict[str, Any]]:
        keys = list(self.choices)
        return [dict(zip(keys, values)) for values in itertools.product(*self.choices.values())]

    def choose(self, choice: Mapping[str, Any]) -> Morphism:
        """The family with its discrete parameters fixed, still over the parameter ring."""
        images = {}
        for gen_name, image in self.images.items():
            terms = {}
            for monomial, coefficient in image.terms.items():
                for key, value in choice.items():
                    coefficient = coefficient.subs(self.field.parameter(key), value)
                if coefficient:
                    terms[monomial] = coefficient
            images[gen_name] = Element(self.algebra, terms)
        return Morphism(self.algebra, self.algebra, images, f"{self.name or 'family'}{dict(choice)}")

    def specialize(self, values: Mapping[str, Any]) -> Morphism:
        """The member of the family at the given parameter values, as a map of the base."""
        names = self.field.parameters
        point = [self.base.field.convert(values[name]) for name in names]
        images = {}
        for gen_name, image in self.images.items():
            terms = {}
            for monomial, coefficient in image.terms.items():
                value = coefficient(*point)
                if value:
                    terms[monomial] = value
            images[gen_name] = Element(self.base, terms)
        return Morphism(self.base, self.base, images, f"{self.name or 'family'}{values}")

    def admissible(self, values: Mapping[str, Any]) -> bool:
        point = [self.base.field.convert(values[name]) for name in self.field.parameters]
        return all(q(*point) for q in self.nonzero)


def verify_family(
    family: AutomorphismFamily, sample_values: Sequence[int] = (0, 1, -1, 2)
) -> CheckResult:
    """Forward check: for every discrete choice the family is a chain map over the
    parameter ring, and its admissible sample members are automorphisms."""
    checked = 0
    values = [family.base.field.convert(v) for v in sample_values]
    for choice in family.choice_assignments() or [{}]:
        symbolic = verify_morphism(family.choose(choice))
        if not symbolic:
            return symbolic
        for point in itertools.product(values, repeat=len(family.parameters)):
            assignment = dict(choice)
            assignment.update(zip(family.parameters, point))
            if not family.admissible(assignment):
                continue
            member = family.specialize(assignment)
            result = verify_morphism(member)
            if not result:
                return result
            try:
                inverse_morphism(member)
            except ModelError as e:
                return CheckResult.failed("family-member", f"Member at {assignment} is not invertible: {e}")
            checked += 1
    return CheckResult.passed("family", f"chain map over the parameter ring; {checked} sample members invertible")


# ----------------------------------------------------------------------
# Obstructions
# ----------------------------------------------------------------------


@dataclass
class Obstruction:
    mechanism: str
    direction: str
    degree: int
    stage: int
    detail: str
    from_stage: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "mechanism": self.mechanism,
            "direction": self.direction,
            "degree": self.degree,
            "stage": self.stage,
            "detail": self.detail,
        }
        if self.from_stage is not None:
            result["from_stage"] = self.from_stage
        return result


@dataclass
class ObstructionReport:
    """Verdict for the stage pattern (⌊ε⌋, ⌊2ε⌋), with every mechanism that fired."""

    epsilon: sympy.Rational
    pattern: Tuple[int, int]
    obstructions: List[Obstruction] = field(default_factory=list)
    inconclusive: List[str] = field(default_factory=list)

    @property
    def obstruction(self) -> Optional[Obstruction]:
        return self.obstructions[0] if self.obstructions else None

    @property
    def obstructed(self) -> bool:
        return bool(self.obstructions)

    @property
    def mechanisms(self) -> List[str]:
        return sorted({o.mechanism for o in self.obstructions})

    @property
    def verdict(self) -> str:
        return "Obstructed" if self.obstructed else "NoObstructionFound"

    def format_lines(self) -> List[str]:
        lines = [f"epsilon {self.epsilon} (pattern {self.pattern[0]},{self.pattern[1]}): {self.verdict}"]
        for o in self.obstructions:
            lines.append(f"  {o.mechanism} {o.direction} in degree {o.degree} at stage {o.stage}: {o.detail}")
        lines.extend(f"  inconclusive: {reason}" for reason in self.inconclusive)
        return lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": str(self.epsilon),
            "pattern": list(self.pattern),
            "verdict": self.verdict,
            "obstructions": [o.to_dict() for o in self.obstructions],
            "inconclusive": list(self.inconclusive),
        }


class ObstructionContext:
    """Persistence modules and algebra-map verdicts shared by scans over ε."""

    def __init__(
        self,
        F: PersistenceCDGA,
        G: PersistenceCDGA,
        cap: Optional[int] = None,
        family: Optional[AutomorphismFamily] = None,
        solver: Optional[Mapping[str, Any]] = None,
    ):
        if F.field != G.field:
            raise ModelError(f"Cannot compare {F.label} over {F.field!r} with {G.label} over {G.field!r}")
        self.F, self.G = F, G
        self.cap = min(F.algebra.cap, G.algebra.cap) - 1 if cap is None else cap
        self.family = family
        self.solver = dict(DEFAULT_SOLVER)
        self.solver.update(solver or {})
        self.last_stage = max(F.stabilization_index, G.stabilization_index) + 1
        self.cohomology = {
            "F": persistence_cohomology(F, self.cap),
            "G": persistence_cohomology(G, self.cap),
        }
        self.linear = {
            "F": persistence_linear_homology(F, self.cap),
            "G": persistence_linear_homology(G, self.cap),
        }
        self._maps: Dict[Tuple[str, int, int, int], AlgebraMapVerdict] = {}

    def side(self, key: str) -> PersistenceCDGA:
        return self.F if key == "F" else self.G

    def algebra_maps(self, source: str, i: int, target: str, j: int, degree: int) -> AlgebraMapVerdict:
        key = (source, i, j, degree)
        if key not in self._maps:
            self._maps[key] = algebra_map_space(
                self.side(source).cohomology(i, self.cap),  # type: ignore[arg-type]
                self.side(target).cohomology(j, self.cap),  # type: ignore[arg-type]
                [degree],
                self.solver["max_witness_variables"],
                self.solver["witness_values"],
            )
        return self._maps[key]


def _rank_mechanism(
    mechanism: str, x: PersistenceModule, y: PersistenceModule, e: int, E: int, last: int, direction: str
) -> Optional[Obstruction]:
    for i in range(last + 1):
        for j in range(i + 1):
            for n in range(x.cap + 1):
                through = y.rank(n, j + e, i + e)
                needed = x.rank(n, j, i + E)
                if needed > through:
                    return Obstruction(
                        mechanism,
                        direction,
                        n,
                        i,
                        f"rank {needed} of the structure map from stage {j} to {i + E} exceeds "
                        f"rank {through} of the map it factors through (stages {j + e} to {i + e})",
                        from_stage=j,
                    )
    return None


def _nilpotent_mechanism(
    context: ObstructionContext, source: str, target: str, e: int, E: int, direction: str
) -> Tuple[Optional[Obstruction], List[str]]:
    module = context.cohomology[source]
    reasons = []
    for i in range(context.last_stage + 1):
        for n in range(1, context.cap + 1):
            if not module.rank(n, i, i + E):
                continue
            verdict = context.algebra_maps(source, i, target, i + e, n)
            if verdict.only_trivial:
                return (
                    Obstruction(
                        NILPOTENT_FACTOR,
                        direction,
                        n,
                        i,
                        f"every algebra map from H(stage {i}) to H(stage {i + e}) kills degree {n}, "
                        f"but the structure map to stage {i + E} does not",
                    ),
                    reasons,
                )
            if verdict.kind == INCONCLUSIVE:
                reasons.append(f"{NILPOTENT_FACTOR} {direction} stage {i} degree {n}: {verdict.reason}")
    return None, reasons


def _family_mechanism(
    context: ObstructionContext, source: str, target: str, direction: str
) -> Tuple[Optional[Obstruction], List[str]]:
    family = context.family
    if family is None:
        return None, []
    x, y = context.side(source), context.side(target)
    x0, y0 = x.stage(0), y.stage(0)
    names = set(family.algebra.names())
    if set(x0.names()) != names or set(y0.names()) != names:
        return None, [f"{AUTOMORPHISM_FAMILY} {direction}: stage 0 is not the family's base"]
    for g in y0.generators:
        if y0.differential_of(g.name).linear_part():
            return None, [f"{AUTOMORPHISM_FAMILY} {direction}: base is not minimal"]
    system = ConstraintSystem(family.field)
    qx, qy = context.linear[source], context.linear[target]
    x_homology = x.linear_homology(0, context.cap)
    for n in range(1, context.cap + 1):
        x_names = x_homology.complex.generators(n)  # type: ignore[attr-defined]
        y_names = [g.name for g in y0.generators if g.degree == n]
        if not x_names or not y_names:
            continue
        reps = x_homology.representative_vectors(n)
        for k in range(1, context.last_stage + 1):
            structure = qy.map(n, 0, k)
            for coords in qx.map(n, 0, k).kernel():
                chain = combine(coords, reps, len(x_names), context.F.field)
                image = []
                for h in y_names:
                    value = family.field.zero
                    for g_name, c in zip(x_names, chain):
                        if c:
                            value += family.linear_coefficient(g_name, h) * c
                    image.append(value)
                for row in structure.rows:
                    value = family.field.zero
                    for a, b in zip(row, image):
                        if a:
                            value += b * a
                    system.add_equation(value)
    for q in family.nonzero:
        system.add_nonzero(q)
    reasons = []
    for choice in family.choice_assignments() or [{}]:
        trial = system.copy()
        for key, value in choice.items():
            trial.add_equation(family.field.parameter(key) - family.field.convert(value))
        outcome = trial.solve(context.solver["max_witness_variables"], context.solver["witness_values"])
        if not outcome.infeasible:
            if not outcome.has_witness:
                reasons.append(f"{AUTOMORPHISM_FAMILY} {direction} {choice}: {outcome.reason}")
            return None, reasons
    return (
        Obstruction(
            AUTOMORPHISM_FAMILY,
            direction,
            0,
            0,
            f"no member of {family.name or 'the family'} maps the linear-part kernels compatibly",
        ),
        reasons,
    )


def obstruct(
    F: PersistenceCDGA,
    G: PersistenceCDGA,
    eps: Any,
    cap: Optional[int] = None,
    family: Optional[AutomorphismFamily] = None,
    context: Optional[ObstructionContext] = None,
    solver: Optional[Mapping[str, Any]] = None,
) -> ObstructionReport:
    """Look for reasons why F and G cannot be ε-interleaved in the homotopy category.

    Every mechanism is tried in both directions; the report lists the first
    obstruction each of them finds.
    """
    eps = to_rational(eps)
    context = context or ObstructionContext(F, G, cap, family, solver)
    e, E = floor_stage(eps), floor_stage(2 * eps)
    report = ObstructionReport(eps, (e, E))
    directions = (("F", "G"), ("G", "F"))
    for source, target in directions:
        direction = f"{source}->{target}"
        for mechanism, modules in ((ZERO_FACTOR_H, context.cohomology), (ZERO_FACTOR_HQ, context.linear)):
            found = _rank_mechanism(
                mechanism, modules[source], modules[target], e, E, context.last_stage, direction
            )
            if found:
                report.obstructions.append(found)
    for source, target in directions:
        found, reasons = _nilpotent_mechanism(context, source, target, e, E, f"{source}->{target}")
        report.inconclusive.extend(reasons)
        if found:
            report.obstructions.append(found)
    if E == 0:
        for source, target in directions:
            found, reasons = _family_mechanism(context, source, target, f"{source}->{target}")
            report.inconclusive.extend(reasons)
            if found:
                report.obstructions.append(found)
    if report.obstructed:
        report.inconclusive = []
    return report


@dataclass
class LowerBoundReport:
    bound: sympy.Rational
    eps_max: sympy.Rational
    reports: List[ObstructionReport]
    truncated: bool = False

    @property
    def saturated(self) -> bool:
        """Every scanned ε was obstructed, so the true value may be larger still."""
        return bool(self.reports) and all(r.obstructed for r in self.reports)

    def format_lines(self) -> List[str]:
        lines = [f"lower bound {self.bound} (scanned epsilon up to {self.eps_max})"]
        if self.saturated:
            lines.append("every scanned pattern is obstructed; the distance may be larger")
        if self.truncated:
            lines.append("truncated (bound only)")
        for report in self.reports:
            lines.extend(report.format_lines())
        return lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lower_bound": str(self.bound),
            "eps_max": str(self.eps_max),
            "saturated": self.saturated,
            "truncated": self.truncated,
            "scan": [r.to_dict() for r in self.reports],
        }


def lower_bound_scan(
    F: PersistenceCDGA,
    G: PersistenceCDGA,
    cap: Optional[int] = None,
    eps_max: Any = 4,
    family: Optional[AutomorphismFamily] = None,
    solver: Optional[Mapping[str, Any]] = None,
) -> LowerBoundReport:
    """Largest ε₀ + ½ over obstructed grid points ε₀ ∈ {0, ½, 1, ...} up to eps_max."""
    eps_max = to_rational(eps_max)
    context = ObstructionContext(F, G, cap, family, solver)
    reports = []
    for k in range(int(sympy.floor(2 * eps_max)) + 1):
        reports.append(obstruct(F, G, Rational(k, 2), context=context))
    obstructed = [r.epsilon for r in reports if r.obstructed]
    bound = max(obstructed) + Rational(1, 2) if obstructed else Rational(0)
    logger.info(f"Lower bound for ({F.label}, {G.label}): {bound}")
    return LowerBoundReport(bound, eps_max, reports, F.truncated or G.truncated)


# ----------------------------------------------------------------------
# H-formality
# ----------------------------------------------------------------------

FORWARD = "forward"
BACKWARD = "backward"


@dataclass
class ZigzagArrow:
    """One arrow of a zig-zag; forward maps the previous object to target, backward the reverse."""

    direction: str
    morphism: Morphism
    target: PersistenceCDGA


def _restrict(m: Morphism, source: PersistenceCDGA, target: PersistenceCDGA, s: int) -> Morphism:
    source_stage, target_stage = source.stage(s), target.stage(s)
    images = {g.name: transfer(m.image(g.name), target_stage) for g in source_stage.generators}
    return Morphism(source_stage, target_stage, images, f"{m.label}({s})")


def _check_arrow(
    index: int, m: Morphism, source: PersistenceCDGA, target: PersistenceCDGA, cap: int
) -> CheckResult:
    if m.source is not source.algebra or m.target is not target.algebra:
        return CheckResult.failed("zigzag-algebras", f"Arrow {index} does not connect its objects")
    result = verify_morphism(m)
    if not result:
        return result
    shift = _stage_shift_check("zigzag-stages", m, source, target, 0)
    if not shift:
        return CheckResult.failed(shift.check, f"Arrow {index}: {shift.message}", shift.generator, shift.residue)
    last = max(source.stabilization_index, target.stabilization_index)
    for s in range(last + 1):
        quasi = verify_quasi_iso(_restrict(m, source, target, s), cap)
        if not quasi:
            return CheckResult.failed(
                "zigzag-quasi-iso", f"Arrow {index} at stage {s}: {quasi.message}", **quasi.details
            )
    return CheckResult.passed("zigzag-arrow", f"Arrow {index} is a stage-wise quasi-isomorphism")


def _check_projection(
    p: PersistenceCDGA, projection: Mapping[str, Element], cap: int
) -> List[CheckResult]:
    algebra = p.algebra
    staging = p.staging
    images = {g.name: projection.get(g.name) or algebra.zero() for g in algebra.generators}
    checks = []
    for g in algebra.generators:
        c = images[g.name]
        if c.algebra is not algebra:
            return [CheckResult.failed("projection", f"Representative of {g.name} is foreign")]
        degree = c.homogeneous_degree()
        if degree is not None and degree != g.degree:
            return [
                CheckResult.failed(
                    "projection-degree",
                    f"Representative of {g.name} has degree {degree}, expected {g.degree}",
                    g.name,
                    c.format(),
                )
            ]
        if c.differential():
            return [
                CheckResult.failed(
                    "projection-cocycle",
                    f"Representative of {g.name} is not a cocycle",
                    g.name,
                    c.format(),
                )
            ]
        if stage_support(c, staging) > staging[g.name]:
            return [
                CheckResult.failed(
                    "projection-stage",
                    f"Representative of {g.name} is not in stage {staging[g.name]}",
                    g.name,
                )
            ]
    sigma = Morphism(algebra, algebra, images, "proj")
    unchecked: List[str] = []
    for g in algebra.generators:
        stage = p.stage(staging[g.name])
        image = transfer(sigma.apply(algebra.differential_of(g.name)), stage)
        if not image:
            continue
        if g.degree + 1 > cap:
            unchecked.append(g.name)
            continue
        h = p.cohomology(staging[g.name], cap)
        if any(h.classify(image, g.degree + 1)):  # type: ignore[attr-defined]
            return [
                CheckResult.failed(
                    "projection-chain",
                    f"The projection of d({g.name}) is not exact at stage {staging[g.name]}",
                    g.name,
                    image.format(),
                )
            ]
    if unchecked:
        logger.warning(f"Projection of d({', '.join(unchecked)}) lies above cap {cap} and is not checked")
        checks.append(
            CheckResult.passed(
                "projection-chain-bounded",
                f"the projection is a map into (H, 0) through degree {cap}; "
                f"d({', '.join(unchecked)}) lies above the cap and is unchecked",
                bounded=True,
                unchecked=",".join(unchecked),
            )
        )
    else:
        checks.append(CheckResult.passed("projection-chain", "the projection is a map into (H, 0)"))
    for s in range(p.stabilization_index + 1):
        h = p.cohomology(s, cap)
        stage = p.stage(s)
        for n in range(cap + 1):
            columns = []
            for rep in h.representatives(n):  # type: ignore[attr-defined]
                lifted = transfer(rep, algebra)
                columns.append(h.classify(transfer(sigma.apply(lifted), stage), n))  # type: ignore[attr-defined]
            dim = h.dimension(n)
            induced = LinearMap.from_columns(columns, dim, p.field)
            if not induced.is_isomorphism():
                return checks + [
                    CheckResult.failed(
                        "projection-quasi-iso",
                        f"The projection is not a quasi-isomorphism at stage {s} in degree {n}",
                        stage=s,
                        degree=n,
                    )
                ]
    checks.append(CheckResult.passed("projection-quasi-iso", "the projection is a stage-wise quasi-isomorphism"))
    return checks


def verify_h_formality_certificate(
    F: PersistenceCDGA,
    zigzag: Sequence[ZigzagArrow],
    projection: Optional[Mapping[str, Element]] = None,
    cap: Optional[int] = None,
) -> CertificateReport:
    """Check a zig-zag of stage-wise quasi-isomorphisms from F to an object P connected to (H(P), 0)."""
    checks: List[CheckResult] = []
    current = F
    for index, arrow in enumerate(zigzag):
        limit = min(current.algebra.cap, arrow.target.algebra.cap) - 1
        arrow_cap = limit if cap is None else min(cap, limit)
        if arrow.direction == FORWARD:
            checks.append(_check_arrow(index, arrow.morphism, current, arrow.target, arrow_cap))
        elif arrow.direction == BACKWARD:
            checks.append(_check_arrow(index, arrow.morphism, arrow.target, current, arrow_cap))
        else:
            checks.append(CheckResult.failed("zigzag", f"Arrow {index} has unknown direction '{arrow.direction}'"))
        current = arrow.target
    last_cap = current.algebra.cap - 1 if cap is None else cap
    if projection is None:
        nonzero = [g.name for g in current.algebra.generators if current.algebra.differential_of(g.name)]
        if nonzero:
            checks.append(
                CheckResult.failed(
                    "zero-differential",
                    f"The last object has nonzero differential on {nonzero} and no projection is given",
                    generator=nonzero[0],
                )
            )
        else:
            checks.append(CheckResult.passed("zero-differential", "the last object equals its cohomology"))
    else:
        try:
            checks.extend(_check_projection(current, projection, last_cap))
        except CapExceededError as e:
            checks.append(CheckResult.failed("projection", str(e)))
    ok = all(checks)
    logger.info(f"H-formality certificate for {F.label}: {'verified' if ok else 'rejected'}")
    return CertificateReport(ok, checks, kind="H-formality")
