"""
Distances between persistence modules and closed-form interleaving bounds.

- bottleneck: exact bottleneck distance of two interval multisets by binary
  search over the finite set of candidate costs with bipartite matching
  feasibility (networkx Hopcroft-Karp)
- d_cohi_module: max over degrees of the bottleneck distance of cohomology
  barcodes (a module-level value, which bounds the algebra-level one from below)
- bound_N, bound_basepoint, bound_wht, bound_path_fibration: formula evaluators
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import sympy
from sympy import Rational, oo

from .cdga import FreeCDGA
from .errors import ModelError
from .persistence import Bar, PersistenceCDGA, barcode, persistence_cohomology
from .sullivan import RelativeSullivanModel, cohomology

logger = logging.getLogger(__name__)

Interval = Tuple[int, Optional[int]]
Pair = Tuple[Optional[Interval], Optional[Interval]]


def format_distance(value: Any) -> str:
    if value == oo:
        return "inf"
    return str(Rational(value))


def _interval(item: Union[Bar, Sequence[Any]]) -> Interval:
    if isinstance(item, Bar):
        return (item.birth, item.death)
    birth, death = item
    if death is not None and death in ("inf", oo, float("inf")):
        death = None
    return (int(birth), None if death is None else int(death))


def interval_cost(a: Interval, b: Interval) -> sympy.Expr:
    """max(|Δbirth|, |Δdeath|); infinite bars only match infinite bars, at cost |Δbirth|."""
    if a[1] is None and b[1] is None:
        return Rational(abs(a[0] - b[0]))
    if a[1] is None or b[1] is None:
        return oo
    return Rational(max(abs(a[0] - b[0]), abs(a[1] - b[1])))


def deletion_cost(a: Interval) -> sympy.Expr:
    """Cost of matching a bar to the diagonal: half its length."""
    if a[1] is None:
        return oo
    return Rational(a[1] - a[0], 2)


@dataclass
class BottleneckResult:
    value: sympy.Expr
    matching: List[Pair] = field(default_factory=list)

    def format_matching(self) -> str:
        def show(item: Optional[Interval]) -> str:
            if item is None:
                return "diag"
            return f"[{item[0]},{'inf' if item[1] is None else item[1]})"

        return ", ".join(f"{show(a)}~{show(b)}" for a, b in self.matching)


def _feasible(a: List[Interval], b: List[Interval], delta: sympy.Expr) -> Optional[List[Pair]]:
    graph = nx.Graph()
    left = [("a", i) for i in range(len(a))] + [("diag_b", j) for j in range(len(b))]
    right = [("b", j) for j in range(len(b))] + [("diag_a", i) for i in range(len(a))]
    graph.add_nodes_from(left, bipartite=0)
    graph.add_nodes_from(right, bipartite=1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if interval_cost(x, y) <= delta:
                graph.add_edge(("a", i), ("b", j))
        if deletion_cost(x) <= delta:
            graph.add_edge(("a", i), ("diag_a", i))
    for j, y in enumerate(b):
        if deletion_cost(y) <= delta:
            graph.add_edge(("diag_b", j), ("b", j))
        for i in range(len(a)):
            graph.add_edge(("diag_b", j), ("diag_a", i))
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    if len(matching) != 2 * len(left):
        return None
    pairs: List[Pair] = []
    for node in left:
        partner = matching[node]
        if node[0] == "a":
            pairs.append((a[node[1]], b[partner[1]] if partner[0] == "b" else None))
        elif partner[0] == "b":
            pairs.append((None, b[partner[1]]))
    return pairs


def bottleneck(
    a: Sequence[Union[Bar, Sequence[Any]]], b: Sequence[Union[Bar, Sequence[Any]]]
) -> BottleneckResult:
    """Bottleneck distance of two interval multisets with a witness matching."""
    first = [_interval(x) for x in a]
    second = [_interval(y) for y in b]
    if sum(1 for x in first if x[1] is None) != sum(1 for y in second if y[1] is None):
        return BottleneckResult(oo, [])
    candidates = {Rational(0)}
    candidates.update(interval_cost(x, y) for x in first for y in second)
    candidates.update(deletion_cost(x) for x in first + second)
    ordered = sorted(c for c in candidates if c != oo)
    # the largest candidate is always feasible once the infinite bars pair up
    low, high = 0, len(ordered) - 1
    while low < high:
        middle = (low + high) // 2
        if _feasible(first, second, ordered[middle]) is None:
            low = middle + 1
        else:
            high = middle
    matching = _feasible(first, second, ordered[low])
    return BottleneckResult(ordered[low], matching or [])


@dataclass
class DistanceReport:
    """Module-level d_CohI with its per-degree breakdown."""

    value: sympy.Expr
    per_degree: Dict[int, BottleneckResult]
    cap: int
    truncated: bool = False
    module_level: bool = True

    @property
    def bound_only(self) -> bool:
        return self.truncated

    def format_lines(self) -> List[str]:
        lines = [f"value {format_distance(self.value)}", f"cap {self.cap}"]
        if self.module_level:
            lines.append("module-level")
        if self.truncated:
            lines.append("truncated (bound only)")
        for degree in sorted(self.per_degree):
            result = self.per_degree[degree]
            lines.append(
                f"deg {degree}: {format_distance(result.value)} [{result.format_matching()}]"
            )
        return lines

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": format_distance(self.value),
            "cap": self.cap,
            "module_level": self.module_level,
            "truncated": self.truncated,
            "per_degree": {
                str(n): {
                    "value": format_distance(r.value),
                    "matching": r.format_matching(),
                }
                for n, r in sorted(self.per_degree.items())
            },
        }


def d_cohi_module(pa: PersistenceCDGA, pb: PersistenceCDGA, cap: Optional[int] = None) -> DistanceReport:
    """max over degrees n ≤ cap of the bottleneck distance of the degree-n barcodes."""
    if pa.field != pb.field:
        raise ModelError(f"Cannot compare modules over {pa.field!r} and {pb.field!r}")
    cap = min(pa.algebra.cap, pb.algebra.cap) - 1 if cap is None else cap
    first = barcode(persistence_cohomology(pa, cap))
    second = barcode(persistence_cohomology(pb, cap))
    per_degree = {n: bottleneck(first.in_degree(n), second.in_degree(n)) for n in range(cap + 1)}
    value = max((r.value for r in per_degree.values()), default=Rational(0))
    logger.debug(f"d_CohI({pa.label}, {pb.label}) = {format_distance(value)} through degree {cap}")
    return DistanceReport(value, per_degree, cap, pa.truncated or pb.truncated)


# ----------------------------------------------------------------------
# Closed-form upper bounds
# ----------------------------------------------------------------------


def bound_N(model: RelativeSullivanModel) -> int:
    """Stabilization index: Θ(f) and Θ(id) are N-interleaved."""
    return model.stabilization_index


def bound_basepoint(model: RelativeSullivanModel, cap: Optional[int] = None) -> sympy.Expr:
    """N/2 for a model of a basepoint inclusion * → Y (the total algebra must be acyclic)."""
    if not model.fiber:
        return Rational(0)
    h = cohomology(model.algebra, cap)
    nonzero = [n for n in range(1, h.cap + 1) if h.dimension(n)]
    if nonzero:
        raise ModelError(
            f"{model.label} is not a model of a basepoint inclusion: "
            f"its total cohomology is nonzero in degree {nonzero[0]}"
        )
    return Rational(max(model.fiber_degrees()), 2)


def _algebra(item: Union[FreeCDGA, RelativeSullivanModel]) -> FreeCDGA:
    return item.algebra if isinstance(item, RelativeSullivanModel) else item


def bound_wht(first: Union[FreeCDGA, RelativeSullivanModel], second: Union[FreeCDGA, RelativeSullivanModel]) -> int:
    """Largest generator degree of the two minimal models."""
    return max(_algebra(first).top_degree, _algebra(second).top_degree)


def bound_path_fibration(
    first: Union[FreeCDGA, RelativeSullivanModel], second: Union[FreeCDGA, RelativeSullivanModel]
) -> sympy.Expr:
    """(max(top degree of X, top degree of Y) - 1) / 2 for the path fibrations over X and Y."""
    top = max(_algebra(first).top_degree, _algebra(second).top_degree)
    return Rational(max(top - 1, 0), 2)
