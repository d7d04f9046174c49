"""
Persistence CDGAs built from relative Sullivan models.

Stage n of Θ(f) is the sub-CDGA ∧V ⊗ ∧W^{stage ≤ n}; real indices floor to the
integer stages and everything is constant from the stabilization index N on.
Cohomology (and linear-part homology) of the stages forms a persistence module
over the stages 0..N+1, from which barcodes are read off the rank invariant.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import sympy

from .cdga import FreeCDGA, Morphism, identity_morphism, inclusion, stage_support
from .errors import CapExceededError, ModelError, StageEscapeError
from .fields import Field
from .linalg import LinearMap
from .sullivan import (
    GradedHomology,
    RelativeSullivanModel,
    cohomology,
    linear_part_homology,
    verify_minimality,
)

logger = logging.getLogger(__name__)

COHOMOLOGY = "cohomology"
LINEAR_HOMOLOGY = "linear homology"


def to_rational(value: Any) -> sympy.Rational:
    """Exact rational from an int, Fraction, string such as "3/2", or sympy number."""
    result = sympy.Rational(value)
    if not result.is_Rational:
        raise ValueError(f"{value!r} is not a rational number")
    return result


def floor_stage(value: Any) -> int:
    return int(sympy.floor(to_rational(value)))


class PersistenceCDGA:
    """Θ(f): the stage filtration of a relative Sullivan model."""

    def __init__(self, model: RelativeSullivanModel):
        self.model = model
        self.algebra = model.algebra
        self.stabilization_index = model.stabilization_index
        self._stages: Dict[int, FreeCDGA] = {}
        self._cohomology: Dict[Tuple[int, int], GradedHomology] = {}
        self._linear: Dict[Tuple[int, int], GradedHomology] = {}

    def __repr__(self) -> str:
        return f"PersistenceCDGA({self.label}, N={self.stabilization_index})"

    @property
    def label(self) -> str:
        return self.model.label

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def truncated(self) -> bool:
        return self.model.truncated is not None

    @property
    def staging(self) -> Dict[str, int]:
        return self.model.staging

    def stage_index(self, t: Any) -> int:
        index = floor_stage(t)
        if index < 0:
            raise ModelError(f"Persistence index {t} is negative")
        return index

    def stage_names(self, t: Any) -> List[str]:
        s = self.stage_index(t)
        return [name for name, stage in self.staging.items() if stage <= s]

    def stage(self, t: Any) -> FreeCDGA:
        """Θ(t) as a sub-CDGA of the colimit; Θ(t) is the colimit itself for t ≥ N."""
        s = self.stage_index(t)
        if s >= self.stabilization_index:
            return self.algebra
        cached = self._stages.get(s)
        if cached is None:
            cached = self.algebra.subalgebra(self.stage_names(s), f"{self.label}({s})")
            self._stages[s] = cached
            logger.debug(f"{self.label}: stage {s} has generators {cached.names()}")
        return cached

    def structure_map(self, s: Any, t: Any) -> Morphism:
        if self.stage_index(s) > self.stage_index(t):
            raise ModelError(f"No structure map from stage {s} down to stage {t}")
        source, target = self.stage(s), self.stage(t)
        if source is target:
            return identity_morphism(source)
        return inclusion(source, target)

    def cohomology(self, t: Any, cap: Optional[int] = None) -> GradedHomology:
        s = min(self.stage_index(t), self.stabilization_index)
        cap = self.algebra.cap - 1 if cap is None else cap
        key = (s, cap)
        if key not in self._cohomology:
            self._cohomology[key] = cohomology(self.stage(s), cap)
        return self._cohomology[key]

    def linear_homology(self, t: Any, cap: Optional[int] = None) -> GradedHomology:
        s = min(self.stage_index(t), self.stabilization_index)
        cap = self.algebra.cap - 1 if cap is None else cap
        key = (s, cap)
        if key not in self._linear:
            self._linear[key] = linear_part_homology(self.stage(s), cap)
        return self._linear[key]

    def homology(self, kind: str, t: Any, cap: Optional[int] = None) -> GradedHomology:
        if kind == COHOMOLOGY:
            return self.cohomology(t, cap)
        if kind == LINEAR_HOMOLOGY:
            return self.linear_homology(t, cap)
        raise ValueError(f"Unknown homology kind '{kind}'")

    def stage_table(self) -> List[Tuple[int, Tuple[str, ...]]]:
        return [(s, self.stage(s).names()) for s in range(self.stabilization_index + 1)]


def build_theta(model: RelativeSullivanModel) -> PersistenceCDGA:
    """Θ(f) for a relative Sullivan model; raises StageEscapeError when a stage is not closed under d."""
    minimal = verify_minimality(model)
    if not minimal:
        logger.warning(f"{model.label} is not minimal ({minimal.message}); staging anyway")
    staging = model.staging
    for w in model.fiber:
        escaped = stage_support(model.algebra.differential_of(w), staging)
        if escaped > staging[w]:
            raise StageEscapeError(w, staging[w], escaped)
    theta = PersistenceCDGA(model)
    logger.debug(f"Built {theta!r}")
    return theta


# ----------------------------------------------------------------------
# Persistence modules and barcodes
# ----------------------------------------------------------------------


@dataclass
class PersistenceModule:
    """Graded persistence module over the integer stages 0..last_stage.

    Args:
        field: Coefficient field
        cap: Largest degree computed
        last_stage: Final stage; structure maps are identities from there on
        dims: degree -> dimensions at stages 0..last_stage
        transitions: degree -> maps from stage s to s+1
        truncated: Derived from a truncated model
        kind: "cohomology" or "linear homology"
    """

    field: Field
    cap: int
    last_stage: int
    dims: Dict[int, List[int]]
    transitions: Dict[int, List[LinearMap]]
    truncated: bool = False
    kind: str = COHOMOLOGY
    _ranks: Dict[Tuple[int, int, int], int] = field(default_factory=dict, repr=False, compare=False)

    def _clamp(self, s: int) -> int:
        if s < 0:
            raise ValueError(f"Stage {s} is negative")
        return min(s, self.last_stage)

    def dimension(self, degree: int, s: int) -> int:
        if degree > self.cap:
            raise CapExceededError(f"Degree {degree} is beyond the module cap {self.cap}")
        return self.dims[degree][self._clamp(s)]

    def map(self, degree: int, s: int, t: int) -> LinearMap:
        """Structure map from stage s to stage t (s ≤ t)."""
        if s > t:
            raise ValueError(f"No structure map from stage {s} down to stage {t}")
        s, t = self._clamp(s), self._clamp(t)
        result = LinearMap.identity(self.dims[degree][s], self.field)
        for step in range(s, t):
            result = self.transitions[degree][step].compose(result)
        return result

    def rank(self, degree: int, s: int, t: int) -> int:
        if s < 0:
            return 0
        key = (degree, self._clamp(s), self._clamp(t))
        if key not in self._ranks:
            self._ranks[key] = self.map(degree, s, t).rank()
        return self._ranks[key]


def _persistence_module(p: PersistenceCDGA, cap: Optional[int], kind: str) -> PersistenceModule:
    cap = p.algebra.cap - 1 if cap is None else cap
    last = p.stabilization_index + 1
    homologies = [p.homology(kind, s, cap) for s in range(last + 1)]
    dims: Dict[int, List[int]] = {}
    transitions: Dict[int, List[LinearMap]] = {}
    for degree in range(cap + 1):
        dims[degree] = [h.dimension(degree) for h in homologies]
        maps = []
        for s in range(last):
            maps.append(
                homologies[s].map_to(homologies[s + 1], p.structure_map(s, s + 1), degree)  # type: ignore[attr-defined]
            )
        transitions[degree] = maps
    logger.debug(f"{p.label}: {kind} dims {dims}")
    return PersistenceModule(p.field, cap, last, dims, transitions, p.truncated, kind)


def persistence_cohomology(p: PersistenceCDGA, cap: Optional[int] = None) -> PersistenceModule:
    """H(Θ(s)) for s = 0..N+1 with the maps induced by the stage inclusions."""
    return _persistence_module(p, cap, COHOMOLOGY)


def persistence_linear_homology(p: PersistenceCDGA, cap: Optional[int] = None) -> PersistenceModule:
    """H(Q(Θ(s))) for s = 0..N+1."""
    return _persistence_module(p, cap, LINEAR_HOMOLOGY)


def shift(m: PersistenceModule, eps: Any) -> PersistenceModule:
    """The ε-shifted module: stage s is the original stage ⌊s + ε⌋."""
    eps = to_rational(eps)
    if eps < 0:
        raise ValueError("Shift must be non-negative")
    origin = [min(floor_stage(s + eps), m.last_stage) for s in range(m.last_stage + 1)]
    dims = {n: [m.dims[n][o] for o in origin] for n in m.dims}
    transitions = {
        n: [m.map(n, origin[s], origin[s + 1]) for s in range(m.last_stage)] for n in m.dims
    }
    return PersistenceModule(m.field, m.cap, m.last_stage, dims, transitions, m.truncated, m.kind)


@dataclass(frozen=True)
class Bar:
    """[birth, death) in one degree; death None means ∞."""

    degree: int
    birth: int
    death: Optional[int]

    @property
    def infinite(self) -> bool:
        return self.death is None

    def sort_key(self) -> Tuple[int, int, float]:
        return (self.degree, self.birth, float("inf") if self.death is None else self.death)

    def contains(self, s: int) -> bool:
        return self.birth <= s and (self.death is None or s < self.death)

    def format(self) -> str:
        return f"{self.degree} {self.birth} {'inf' if self.death is None else self.death}"


@dataclass
class Barcode:
    bars: List[Bar]
    truncated: bool = False

    def __post_init__(self):
        self.bars = sorted(self.bars, key=Bar.sort_key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Barcode):
            return NotImplemented
        return Counter(self.bars) == Counter(other.bars)

    def degrees(self) -> List[int]:
        return sorted({bar.degree for bar in self.bars})

    def in_degree(self, degree: int) -> List[Bar]:
        return [bar for bar in self.bars if bar.degree == degree]

    def format_lines(self) -> List[str]:
        return [bar.format() for bar in self.bars]

    def to_list(self) -> List[List[Any]]:
        return [[b.degree, b.birth, "inf" if b.death is None else b.death] for b in self.bars]


def barcode(m: PersistenceModule) -> Barcode:
    """Interval decomposition from the rank invariant r(b, d) = rank(M(b → d))."""
    bars: List[Bar] = []
    last = m.last_stage
    for degree in range(m.cap + 1):
        r: Callable[[int, int], int] = lambda s, t, n=degree: m.rank(n, s, t)  # noqa: E731
        for birth in range(last + 1):
            for death in range(birth + 1, last + 1):
                count = r(birth, death - 1) - r(birth - 1, death - 1) - r(birth, death) + r(birth - 1, death)
                bars.extend(Bar(degree, birth, death) for _ in range(count))
            count = r(birth, last) - r(birth - 1, last)
            bars.extend(Bar(degree, birth, None) for _ in range(count))
    return Barcode(bars, m.truncated)
