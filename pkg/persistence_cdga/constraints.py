"""
A small exact solver for polynomial constraint systems.

Equations p = 0 and side conditions q != 0 over Q or Q(i) are simplified with
a fixed set of sound rules, iterated to a fixpoint:
- linear elimination (row reduction of the linear equations, substituting pivots)
- single-term equations c·x^k = 0 force x = 0
- over a definite field, a sum of same-sign pure even powers forces all of them to 0
- a nonzero constant equation, or a side condition reduced to 0, is infeasible
Surviving systems with few variables are searched for a witness over small values.
Anything else is inconclusive; the solver never guesses.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from .fields import Field
from .linalg import rref

logger = logging.getLogger(__name__)

INFEASIBLE = "infeasible"
WITNESS = "witness"
INCONCLUSIVE = "inconclusive"


@dataclass
class SolveOutcome:
    """Result of ConstraintSystem.solve.

    Args:
        status: "infeasible", "witness" or "inconclusive"
        assignment: Variable values satisfying every constraint (status witness)
        forced: Variables the rules pinned to a constant
        reason: Rule or explanation behind the status
    """

    status: str
    assignment: Dict[str, Any] = field(default_factory=dict)
    forced: Dict[str, Any] = field(default_factory=dict)
    reason: str = ""

    @property
    def infeasible(self) -> bool:
        return self.status == INFEASIBLE

    @property
    def has_witness(self) -> bool:
        return self.status == WITNESS


class ConstraintSystem:
    """Polynomial equations and nonvanishing conditions in named variables.

    Args:
        field: Coefficient field; when variables is omitted its parameters are the unknowns
        variables: Names of the unknowns
    """

    def __init__(self, field_: Field, variables: Optional[Sequence[str]] = None):
        self.field = field_.ground
        if variables is None:
            self.variables: Tuple[str, ...] = field_.parameters
            self.poly_field = field_
        else:
            self.variables = tuple(variables)
            self.poly_field = (
                self.field.with_parameters(self.variables) if self.variables else self.field
            )
        self.ring = self.poly_field.ring
        self.equations: List[Any] = []
        self.nonzero: List[Any] = []

    def copy(self) -> "ConstraintSystem":
        clone = ConstraintSystem(self.poly_field) if self.variables else ConstraintSystem(self.field, ())
        clone.equations = list(self.equations)
        clone.nonzero = list(self.nonzero)
        return clone

    def __repr__(self) -> str:
        return (
            f"ConstraintSystem({len(self.variables)} unknowns, {len(self.equations)} equations, "
            f"{len(self.nonzero)} nonzero conditions)"
        )

    def variable(self, name: str) -> Any:
        return self.poly_field.parameter(name)

    def constant(self, value: Any) -> Any:
        return self.poly_field.convert(self.field.convert(value))

    def add_equation(self, polynomial: Any) -> None:
        p = self.poly_field.convert(polynomial)
        if p:
            self.equations.append(p)

    def add_nonzero(self, polynomial: Any) -> None:
        self.nonzero.append(self.poly_field.convert(polynomial))

    # ------------------------------------------------------------------
    # Solving
    # ------------------------------------------------------------------

    def solve(
        self, max_witness_variables: int = 4, witness_values: Sequence[int] = (0, 1, -1)
    ) -> SolveOutcome:
        if self.ring is None:
            return self._solve_constant()
        state = _State(self)
        reason = state.simplify()
        if reason:
            logger.debug(f"{self!r}: infeasible ({reason})")
            return SolveOutcome(INFEASIBLE, forced=state.forced(), reason=reason)
        active = state.active_variables()
        if len(active) > max_witness_variables:
            logger.debug(
                f"{self!r}: {len(active)} unknowns survive simplification; no witness search"
            )
            return SolveOutcome(
                INCONCLUSIVE,
                forced=state.forced(),
                reason=f"{len(active)} unknowns survive simplification",
            )
        values = [self.field.convert(v) for v in witness_values]
        if self.field.name == "Q(i)":
            unit = self.field.imaginary_unit
            values.extend([unit, -unit])
        for choice in itertools.product(values, repeat=len(active)):
            assignment = state.reconstruct(dict(zip(active, choice)))
            if self._satisfied(assignment):
                named = {self.variables[k]: v for k, v in assignment.items()}
                return SolveOutcome(WITNESS, named, state.forced(), "witness found")
        return SolveOutcome(
            INCONCLUSIVE, forced=state.forced(), reason="no witness among the sample values"
        )

    def _solve_constant(self) -> SolveOutcome:
        if any(self.equations):
            return SolveOutcome(INFEASIBLE, reason="nonzero constant equation")
        if not all(self.nonzero):
            return SolveOutcome(INFEASIBLE, reason="nonzero condition on the zero constant")
        return SolveOutcome(WITNESS, reason="no unknowns")

    def _satisfied(self, assignment: Dict[int, Any]) -> bool:
        values = [assignment.get(k, self.field.zero) for k in range(len(self.variables))]
        ground = self.ring.domain
        point = [ground.convert(v) for v in values]
        return all(not p(*point) for p in self.equations) and all(q(*point) for q in self.nonzero)


class _State:
    """Working copy of a system during simplification."""

    def __init__(self, system: ConstraintSystem):
        self.system = system
        self.ring = system.ring
        self.nvars = len(system.variables)
        self.equations = list(system.equations)
        self.nonzero = list(system.nonzero)
        self.eliminated: List[Tuple[int, Any]] = []

    def forced(self) -> Dict[str, Any]:
        return {
            self.system.variables[k]: expr.LC if expr else self.ring.domain.zero
            for k, expr in self.eliminated
            if expr.is_ground
        }

    def active_variables(self) -> List[int]:
        seen: Set[int] = set()
        for p in self.equations + self.nonzero:
            for monomial, _ in p.terms():
                seen.update(k for k, e in enumerate(monomial) if e)
        return sorted(seen)

    def _substitute(self, k: int, expr: Any) -> None:
        x = self.ring.gens[k]
        self.equations = [p.compose(x, expr) for p in self.equations]
        self.equations = [p for p in self.equations if p]
        self.nonzero = [q.compose(x, expr) for q in self.nonzero]
        self.eliminated.append((k, expr))

    def reconstruct(self, free: Dict[int, Any]) -> Dict[int, Any]:
        domain = self.ring.domain
        values: Dict[int, Any] = {k: domain.convert(v) for k, v in free.items()}
        for k, expr in reversed(self.eliminated):
            point = [values.get(j, domain.zero) for j in range(self.nvars)]
            values[k] = expr(*point)
        return values

    def simplify(self) -> Optional[str]:
        """Apply the rules until nothing changes; return a reason when infeasible."""
        while True:
            reason = self._contradiction()
            if reason:
                return reason
            if self._linear_step() or self._monomial_step() or self._squares_step():
                reason = self._contradiction()
                if reason:
                    return reason
                continue
            return None

    def _contradiction(self) -> Optional[str]:
        for p in self.equations:
            if p.is_ground:
                return f"constant equation {p} = 0"
        for q in self.nonzero:
            if not q:
                return "a nonvanishing condition reduces to 0"
        return None

    def _linear_step(self) -> bool:
        linear = [p for p in self.equations if all(sum(m) <= 1 for m, _ in p.terms())]
        if not linear:
            return False
        field_ = self.system.field
        zero = field_.zero
        rows = []
        for p in linear:
            row = [zero] * (self.nvars + 1)
            for monomial, coefficient in p.terms():
                position = monomial.index(1) if sum(monomial) else self.nvars
                row[position] = coefficient
            rows.append(row)
        reduced, pivots, _ = rref(rows, self.nvars + 1, field_)
        for row, pivot in zip(reduced, pivots):
            if pivot == self.nvars:
                self.equations.append(self.ring.ground_new(field_.one))
                return True
            expr = self.ring.ground_new(-row[self.nvars])
            for k in range(self.nvars):
                if k != pivot and row[k]:
                    expr = expr - self.ring.gens[k] * row[k]
            self._substitute(pivot, expr)
        return True

    def _known_nonzero(self) -> Set[int]:
        known = set()
        for q in self.nonzero:
            terms = q.terms()
            if len(terms) == 1:
                monomial = terms[0][0]
                known.update(k for k, e in enumerate(monomial) if e)
        return known

    def _monomial_step(self) -> bool:
        known = self._known_nonzero()
        for p in self.equations:
            terms = p.terms()
            if len(terms) != 1:
                continue
            occurring = [k for k, e in enumerate(terms[0][0]) if e]
            unknown = [k for k in occurring if k not in known]
            if not unknown:
                self.equations.append(self.ring.ground_new(self.system.field.one))
                return True
            if len(unknown) == 1:
                self._substitute(unknown[0], self.ring.zero)
                return True
        return False

    def _squares_step(self) -> bool:
        field_ = self.system.field
        if not field_.definite:
            return False
        for p in self.equations:
            signs = set()
            occurring = []
            for monomial, coefficient in p.terms():
                powered = [k for k, e in enumerate(monomial) if e]
                if len(powered) != 1 or monomial[powered[0]] % 2:
                    break
                signs.add(field_.sign(coefficient))
                occurring.append(powered[0])
            else:
                if len(signs) == 1 and occurring:
                    for k in occurring:
                        self._substitute(k, self.ring.zero)
                    return True
        return False
