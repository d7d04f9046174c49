"""
Relative Sullivan models and their homological invariants.

- RelativeSullivanModel: a free CDGA split into a base ∧V and fiber generators W,
  with the stage of each fiber generator (its degree unless overridden)
- verify_minimality: no linear W-term in d(W) and an acyclic same-degree
  dependency relation on W
- GradedCohomology: H(A) degree by degree with representatives, coordinates,
  products and induced maps
- LinearHomology: homology of the indecomposables (V ⊕ W, d₁)
- verify_quasi_iso / verify_isomorphism_pair
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .cdga import (
    CheckResult,
    Element,
    FreeCDGA,
    Morphism,
    check_d_squared,
    compose,
    verify_morphism,
)
from .errors import CapExceededError, DegreeError, ModelError
from .fields import Field
from .linalg import LinearMap, Vector, independent_columns, kernel_of_vectors, solve_in_span

logger = logging.getLogger(__name__)


@dataclass
class RelativeSullivanModel:
    """A relative Sullivan algebra ∧V → ∧V ⊗ ∧W.

    Args:
        algebra: The total algebra ∧V ⊗ ∧W
        base: Names of the base generators V
        fiber: Names of the fiber generators W
        stages: Explicit stages for fiber generators (default stage is the degree)
        truncated: Truncation stage when the model is a finite piece of an infinite one
        name: Label used in reports
    """

    algebra: FreeCDGA
    base: Tuple[str, ...]
    fiber: Tuple[str, ...]
    stages: Dict[str, int] = field(default_factory=dict)
    truncated: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        self.base = tuple(self.base)
        self.fiber = tuple(self.fiber)
        result = check_relative(self)
        if not result:
            raise ModelError(result.message)
        self._base_algebra: Optional[FreeCDGA] = None

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def label(self) -> str:
        return self.name or self.algebra.label

    def stage(self, name: str) -> int:
        if name in self.stages:
            return self.stages[name]
        g = self.algebra.generator(name)
        return 0 if name in self.base else g.degree

    @property
    def staging(self) -> Dict[str, int]:
        return {g.name: self.stage(g.name) for g in self.algebra.generators}

    @property
    def stabilization_index(self) -> int:
        """Largest fiber stage N (0 when W is empty)."""
        return max((self.stage(w) for w in self.fiber), default=0)

    @property
    def base_algebra(self) -> FreeCDGA:
        if self._base_algebra is None:
            self._base_algebra = self.algebra.subalgebra(self.base, f"{self.label}.base")
        return self._base_algebra

    def fiber_degrees(self) -> List[int]:
        return [self.algebra.generator(w).degree for w in self.fiber]


def check_relative(model: RelativeSullivanModel) -> CheckResult:
    """Partition of the generators into base and fiber, base closure and stage sanity."""
    algebra = model.algebra
    names = set(algebra.names())
    base, fiber = set(model.base), set(model.fiber)
    unknown = (base | fiber) - names
    if unknown:
        return CheckResult.failed("relative", f"Unknown generators {sorted(unknown)}")
    overlap = base & fiber
    if overlap:
        return CheckResult.failed(
            "relative", f"Generators {sorted(overlap)} are in both base and fiber"
        )
    missing = names - base - fiber
    if missing:
        return CheckResult.failed(
            "relative", f"Generators {sorted(missing)} are in neither base nor fiber"
        )
    for v in model.base:
        outside = algebra.differential_of(v).generator_names() - base
        if outside:
            return CheckResult.failed(
                "relative-base",
                f"d({v}) involves fiber generators {sorted(outside)}; the base is not a sub-CDGA",
                generator=v,
                residue=algebra.differential_of(v).format(),
            )
    for gen_name, stage in model.stages.items():
        if gen_name not in fiber:
            return CheckResult.failed(
                "relative-stages", f"Stage given for '{gen_name}', which is not a fiber generator"
            )
        if stage < 0:
            return CheckResult.failed("relative-stages", f"Stage of '{gen_name}' is negative")
    return CheckResult.passed("relative", f"{len(base)} base and {len(fiber)} fiber generators")


def verify_minimality(model: RelativeSullivanModel) -> CheckResult:
    """Check d² = 0, then that d(W) has no linear W-part and the dependency relation is acyclic."""
    squared = check_d_squared(model.algebra)
    if not squared:
        return squared
    algebra = model.algebra
    fiber = set(model.fiber)
    graph = nx.DiGraph()
    graph.add_nodes_from(model.fiber)
    for w in model.fiber:
        dw = algebra.differential_of(w)
        linear = [name for name in dw.linear_part().generator_names() if name in fiber]
        if linear:
            return CheckResult.failed(
                "minimality-linear",
                f"d({w}) has a linear term in fiber generators {sorted(linear)}",
                generator=w,
                residue=dw.format(),
            )
        degree = algebra.generator(w).degree
        for other in dw.generator_names() & fiber:
            if algebra.generator(other).degree == degree:
                graph.add_edge(w, other)
    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return CheckResult.passed("minimality", f"{model.label} is a minimal relative model")
    path = " -> ".join([edge[0] for edge in cycle] + [cycle[-1][1]])
    return CheckResult.failed(
        "minimality-cycle",
        f"Same-degree fiber generators depend on each other cyclically: {path}",
        generator=cycle[0][0],
    )


# ----------------------------------------------------------------------
# Graded homology
# ----------------------------------------------------------------------


@dataclass
class _DegreeData:
    boundaries: List[Vector]
    representatives: List[Vector]


class GradedHomology:
    """Homology of a cochain complex, computed lazily per degree.

    Subclasses provide chain_dim(n) and d_columns(n), the images of the degree-n
    basis written in degree n+1 coordinates.
    """

    kind = "homology"

    def __init__(self, field_: Field, cap: int):
        self.field = field_
        self.cap = cap
        self._data: Dict[int, _DegreeData] = {}

    def chain_dim(self, degree: int) -> int:
        raise NotImplementedError

    def d_columns(self, degree: int) -> List[Vector]:
        raise NotImplementedError

    def _check_degree(self, degree: int) -> None:
        if degree > self.cap:
            raise CapExceededError(f"Degree {degree} is beyond the {self.kind} cap {self.cap}")

    def _degree(self, degree: int) -> _DegreeData:
        self._check_degree(degree)
        data = self._data.get(degree)
        if data is not None:
            return data
        dim = self.chain_dim(degree)
        if degree < 0 or dim == 0:
            data = _DegreeData([], [])
        else:
            cycles = kernel_of_vectors(self.d_columns(degree), self.chain_dim(degree + 1), self.field)
            boundaries = self.d_columns(degree - 1) if degree > 0 else []
            vectors = list(boundaries) + cycles
            pivots = independent_columns(vectors, dim, self.field)
            data = _DegreeData(
                [vectors[p] for p in pivots if p < len(boundaries)],
                [vectors[p] for p in pivots if p >= len(boundaries)],
            )
            logger.debug(
                f"{self.kind} degree {degree}: chains {dim}, cycles {len(cycles)}, "
                f"boundaries {len(data.boundaries)}, classes {len(data.representatives)}"
            )
        self._data[degree] = data
        return data

    def dimension(self, degree: int) -> int:
        return len(self._degree(degree).representatives)

    def dims(self, upto: Optional[int] = None) -> List[int]:
        top = self.cap if upto is None else upto
        return [self.dimension(n) for n in range(top + 1)]

    def representative_vectors(self, degree: int) -> List[Vector]:
        return self._degree(degree).representatives

    def coordinates(self, degree: int, vector: Sequence[Any]) -> Vector:
        """Coordinates of the class of a cycle in the representative basis."""
        data = self._degree(degree)
        solution = solve_in_span(data.boundaries + data.representatives, vector, self.field)
        if solution is None:
            raise DegreeError(f"Vector is not a cycle in degree {degree}")
        return solution[len(data.boundaries) :]


class GradedCohomology(GradedHomology):
    """Cohomology of a free CDGA through degree cap."""

    kind = "cohomology"

    def __init__(self, algebra: FreeCDGA, cap: int):
        super().__init__(algebra.field, cap)
        self.algebra = algebra
        self._products: Dict[Tuple[int, int], List[List[Vector]]] = {}

    def chain_dim(self, degree: int) -> int:
        return len(self.algebra.basis(degree))

    def d_columns(self, degree: int) -> List[Vector]:
        columns = []
        for monomial in self.algebra.basis(degree):
            columns.append(self.algebra.monomial(monomial).differential().to_vector(degree + 1))
        return columns

    def representatives(self, degree: int) -> List[Element]:
        return [Element.from_vector(self.algebra, degree, v) for v in self.representative_vectors(degree)]

    def representative(self, degree: int, index: int) -> Element:
        return self.representatives(degree)[index]

    def classify(self, element: Element, degree: Optional[int] = None) -> Vector:
        """Coordinates of the class of a cocycle."""
        if degree is None:
            found = element.homogeneous_degree()
            if not isinstance(found, int):
                raise DegreeError("Degree of a zero or inhomogeneous element must be given")
            degree = found
        return self.coordinates(degree, element.to_vector(degree))

    def product_table(self, first: int, second: int) -> List[List[Vector]]:
        """table[i][j] = coordinates of rep_i(first) * rep_j(second)."""
        key = (first, second)
        table = self._products.get(key)
        if table is None:
            self._check_degree(first + second)
            left = self.representatives(first)
            right = self.representatives(second)
            table = [[self.classify(a * b, first + second) for b in right] for a in left]
            self._products[key] = table
        return table

    def product(self, first: int, i: int, second: int, j: int) -> Vector:
        return self.product_table(first, second)[i][j]

    def map_to(self, target: "GradedCohomology", morphism: Morphism, degree: int) -> LinearMap:
        """H^n(morphism) in the representative bases."""
        if morphism.source is not self.algebra or morphism.target is not target.algebra:
            raise ModelError(f"{morphism.label} does not connect the given cohomologies")
        columns = [
            target.classify(morphism.apply(rep), degree) for rep in self.representatives(degree)
        ]
        return LinearMap.from_columns(columns, target.dimension(degree), self.field)


class LinearComplex:
    """The indecomposables V ⊕ W with the linearised differential d₁."""

    def __init__(self, algebra: FreeCDGA):
        self.algebra = algebra

    def generators(self, degree: int) -> List[str]:
        return [g.name for g in self.algebra.generators if g.degree == degree]

    def d1(self, name: str) -> Element:
        return self.algebra.differential_of(name).linear_part()

    def d1_vector(self, name: str) -> Vector:
        degree = self.algebra.generator(name).degree + 1
        d1 = self.d1(name)
        return [d1.coefficient(((self.algebra.generator(h).index, 1),)) for h in self.generators(degree)]

    def check(self) -> CheckResult:
        """d₁² = 0 on every generator."""
        for g in self.algebra.generators:
            image = self.d1(g.name)
            total = self.algebra.zero()
            for monomial, coefficient in image.terms.items():
                total = total + self.d1(self.algebra.generators[monomial[0][0]].name).scale(coefficient)
            if total:
                return CheckResult.failed(
                    "linear-d-squared", f"d1(d1({g.name})) is not zero", generator=g.name, residue=total.format()
                )
        return CheckResult.passed("linear-d-squared")


class LinearHomology(GradedHomology):
    """H(Q(A)): homology of the indecomposables."""

    kind = "linear homology"

    def __init__(self, algebra: FreeCDGA, cap: int):
        super().__init__(algebra.field, cap)
        self.algebra = algebra
        self.complex = LinearComplex(algebra)

    def chain_dim(self, degree: int) -> int:
        return len(self.complex.generators(degree))

    def d_columns(self, degree: int) -> List[Vector]:
        return [self.complex.d1_vector(name) for name in self.complex.generators(degree)]

    def representatives(self, degree: int) -> List[Element]:
        names = self.complex.generators(degree)
        result = []
        for vector in self.representative_vectors(degree):
            element = self.algebra.zero()
            for name, coefficient in zip(names, vector):
                if coefficient:
                    element = element + self.algebra.gen(name).scale(coefficient)
            result.append(element)
        return result

    def map_to(self, target: "LinearHomology", morphism: Morphism, degree: int) -> LinearMap:
        """HQ^n(morphism), induced by the linear part of the morphism."""
        if morphism.source is not self.algebra or morphism.target is not target.algebra:
            raise ModelError(f"{morphism.label} does not connect the given linear homologies")
        matrix = morphism.linear_matrix(degree)
        columns = [target.coordinates(degree, matrix.apply(v)) for v in self.representative_vectors(degree)]
        return LinearMap.from_columns(columns, target.dimension(degree), self.field)


def _resolve_cap(algebra: FreeCDGA, cap: Optional[int]) -> int:
    limit = algebra.cap - 1
    if cap is None:
        return limit
    if cap > limit:
        raise CapExceededError(
            f"Cohomology through degree {cap} needs the algebra basis through degree {cap + 1}, "
            f"but {algebra.label} is capped at {algebra.cap}"
        )
    return cap


def cohomology(algebra: FreeCDGA, cap: Optional[int] = None) -> GradedCohomology:
    """H(algebra) through degree cap (at most the algebra cap minus one)."""
    return GradedCohomology(algebra, _resolve_cap(algebra, cap))


def linear_part_homology(
    model: Union[RelativeSullivanModel, FreeCDGA], cap: Optional[int] = None
) -> LinearHomology:
    """Homology of (V ⊕ W, d₁) through degree cap."""
    algebra = model.algebra if isinstance(model, RelativeSullivanModel) else model
    return LinearHomology(algebra, _resolve_cap(algebra, cap))


def verify_quasi_iso(f: Morphism, cap: Optional[int] = None) -> CheckResult:
    """H^n(f) is an isomorphism for every n through cap."""
    limit = min(f.source.cap, f.target.cap) - 1
    cap = limit if cap is None else cap
    source = cohomology(f.source, cap)
    target = cohomology(f.target, cap)
    for degree in range(cap + 1):
        induced = source.map_to(target, f, degree)
        if not induced.is_isomorphism():
            return CheckResult.failed(
                "quasi-iso",
                f"H^{degree}({f.label}) is not an isomorphism: rank {induced.rank()} from "
                f"dimension {induced.source_dim} to {induced.target_dim}",
                degree=degree,
            )
    return CheckResult.passed("quasi-iso", f"{f.label} is a quasi-isomorphism up to degree {cap}")


def verify_isomorphism_pair(f: Morphism, g: Morphism) -> CheckResult:
    """g after f and f after g are identities on generators."""
    if f.source is not g.target or f.target is not g.source:
        return CheckResult.failed("isomorphism", f"{f.label} and {g.label} are not opposite maps")
    for m in (f, g):
        result = verify_morphism(m)
        if not result:
            return result
    for first, second in ((f, g), (g, f)):
        composite = compose(second, first)
        for generator in first.source.generators:
            image = composite.image_of(generator.index)
            expected = first.source.gen(generator.name)
            if image != expected:
                return CheckResult.failed(
                    "isomorphism",
                    f"{second.label}({first.label}({generator.name})) = {image}, "
                    f"expected {generator.name}",
                    generator=generator.name,
                    residue=(image - expected).format(),
                )
    return CheckResult.passed("isomorphism", f"{f.label} and {g.label} are inverse isomorphisms")
