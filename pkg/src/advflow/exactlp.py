"""Exact-rational linear programs for secure-rate planning.

Three formulations over a :class:`~advflow.netgraph.Network`:

* path form: maximize total path flow minus the worst per-subset flow,
* pinned path form: same, with total flow pinned to the min cut (the
  planner's default; its optimum is the secure routing rate),
* edge form: flow-conservation variant whose subset rows charge every
  incoming edge of the subset.

Everything runs on :class:`fractions.Fraction`; the simplex uses Bland's
pivoting rule, so results are exact and deterministic.  Denominators of
the returned vertex matter downstream (they set the generation length),
which is why no floating point is allowed anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .netgraph import Network, Path, enumerate_paths, min_cut

LE = "<="
EQ = "=="


class LpError(RuntimeError):
    """Base class for solver failures."""


class InfeasibleError(LpError):
    """The constraint system has no feasible point."""


class UnboundedError(LpError):
    """The objective is unbounded above on the feasible region."""


def _frac(value) -> str:
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


@dataclass(frozen=True)
class Row:
    """One linear constraint: ``coeffs . x  (<=|==)  rhs``."""

    name: str
    coeffs: tuple[Fraction, ...]
    sense: str
    rhs: Fraction


@dataclass(frozen=True)
class LpProblem:
    """A maximization problem over non-negative variables.

    Attributes:
        kind: Formulation tag: ``"1"``, ``"1'"`` or ``"2"``.
        z: Adversary budget the subset rows were built for.
        names: Variable names; the balance variable is always last.
        objective: Objective coefficients (maximize).
        constant: Constant added to the objective value.
        rows: Constraint rows.
        paths: Paths backing the flow variables (path forms only).
        flags: Advisory notes, e.g. when z covers every internal node.
    """

    kind: str
    z: int
    names: tuple[str, ...]
    objective: tuple[Fraction, ...]
    constant: Fraction
    rows: tuple[Row, ...]
    paths: tuple[Path, ...] = ()
    flags: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        """JSON-ready description with rationals as ``num/den`` strings."""
        return {
            "kind": self.kind,
            "z": self.z,
            "variables": list(self.names),
            "objective": [_frac(c) for c in self.objective],
            "constant": _frac(self.constant),
            "rows": [
                {
                    "name": row.name,
                    "coeffs": [_frac(c) for c in row.coeffs],
                    "sense": row.sense,
                    "rhs": _frac(row.rhs),
                }
                for row in self.rows
            ],
            "paths": [list(p) for p in self.paths],
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class LpSolution:
    """An optimal vertex of an :class:`LpProblem`.

    ``objective`` includes the problem constant, so for the pinned path
    form it is the secure rate and ``lam`` the balance optimum.
    """

    kind: str
    z: int
    objective: Fraction
    lam: Fraction
    variables: dict[str, Fraction] = field(repr=False)
    paths: tuple[Path, ...] = ()
    path_flows: tuple[Fraction, ...] = ()
    edge_flows: tuple[Fraction, ...] = ()
    flags: tuple[str, ...] = ()

    def nonzero_path_flows(self) -> dict[Path, Fraction]:
        """Paths carrying positive flow, in enumeration order."""
        return {
            p: f for p, f in zip(self.paths, self.path_flows) if f > 0
        }

    def to_json_dict(self) -> dict:
        """JSON-ready solution with rationals as ``num/den`` strings."""
        return {
            "kind": self.kind,
            "z": self.z,
            "objective": _frac(self.objective),
            "lambda": _frac(self.lam),
            "paths": [list(p) for p in self.paths],
            "path_flows": [_frac(f) for f in self.path_flows],
            "edge_flows": [_frac(f) for f in self.edge_flows],
            "flags": list(self.flags),
        }


# ---------------------------------------------------------------------------
# Builders


def _subset_sizes(net: Network, z: int) -> tuple[int, tuple[str, ...]]:
    if z < 1:
        raise ValueError("adversary budget z must be at least 1")
    internal = net.internal_nodes
    if not internal:
        raise ValueError("network has no internal nodes")
    flags = ()
    if z >= len(internal):
        flags = (f"z={z} covers all {len(internal)} internal nodes",)
    return min(z, len(internal)), flags


def _subset_rows_paths(
    net: Network, paths: Sequence[Path], size: int
) -> list[tuple[str, tuple[int, ...]]]:
    from itertools import combinations

    touched = [net.path_internal_nodes(p) for p in paths]
    rows = []
    for combo in combinations(net.internal_nodes, size):
        members = set(combo)
        hit = tuple(i for i, tset in enumerate(touched) if tset & members)
        rows.append(("+".join(combo), hit))
    return rows


def build_lp1(net: Network, z: int, paths: Sequence[Path] | None = None) -> LpProblem:
    """Path form: ``max sum F(p) - lam`` under edge caps and subset rows."""
    if paths is None:
        paths = enumerate_paths(net)
    paths = tuple(paths)
    size, flags = _subset_sizes(net, z)
    nvars = len(paths) + 1
    lam = len(paths)
    zero = Fraction(0)
    one = Fraction(1)

    rows: list[Row] = []
    for e in range(len(net.edges)):
        coeffs = [one if e in p else zero for p in paths] + [zero]
        rows.append(Row(f"cap[e{e}]", tuple(coeffs), LE, one))
    for label, hit in _subset_rows_paths(net, paths, size):
        coeffs = [zero] * nvars
        for i in hit:
            coeffs[i] = one
        coeffs[lam] = Fraction(-1)
        rows.append(Row(f"bal[{label}]", tuple(coeffs), LE, zero))

    names = tuple(f"F[{i}]" for i in range(len(paths))) + ("lam",)
    objective = tuple([one] * len(paths) + [Fraction(-1)])
    return LpProblem("1", z, names, objective, zero, tuple(rows), paths, flags)


def build_lp1_prime(
    net: Network, z: int, paths: Sequence[Path] | None = None
) -> LpProblem:
    """Pinned path form: total flow fixed to the min cut, ``max C - lam``."""
    base = build_lp1(net, z, paths)
    cut = Fraction(min_cut(net))
    one = Fraction(1)
    total = Row(
        "total",
        tuple([one] * len(base.paths) + [Fraction(0)]),
        EQ,
        cut,
    )
    objective = tuple([Fraction(0)] * len(base.paths) + [Fraction(-1)])
    return LpProblem(
        "1'",
        z,
        base.names,
        objective,
        cut,
        base.rows + (total,),
        base.paths,
        base.flags,
    )


def build_lp2(net: Network, z: int) -> LpProblem:
    """Edge form with conservation rows; subset rows charge In(Z) edges.

    For z = 1 this matches the pinned path form on any DAG.  For larger z
    a subset row also charges edges internal to the subset, so a path
    crossing two subset members is counted twice; the pinned path form is
    the authoritative rate for z > 1.
    """
    size, flags = _subset_sizes(net, z)
    if size > 1:
        flags = flags + (
            "subset rows double-charge paths crossing multiple members",
        )
    cut = Fraction(min_cut(net))
    nedges = len(net.edges)
    lam = nedges
    zero = Fraction(0)
    one = Fraction(1)

    rows: list[Row] = []
    for e in range(nedges):
        coeffs = [zero] * (nedges + 1)
        coeffs[e] = one
        rows.append(Row(f"cap[e{e}]", tuple(coeffs), LE, one))
    for v in net.internal_nodes:
        coeffs = [zero] * (nedges + 1)
        for e in net.in_edges(v):
            coeffs[e] += one
        for e in net.out_edges(v):
            coeffs[e] -= one
        rows.append(Row(f"cons[{v}]", tuple(coeffs), EQ, zero))
    from itertools import combinations

    for combo in combinations(net.internal_nodes, size):
        coeffs = [zero] * (nedges + 1)
        for v in combo:
            for e in net.in_edges(v):
                coeffs[e] += one
        coeffs[lam] = Fraction(-1)
        rows.append(Row(f"bal[{'+'.join(combo)}]", tuple(coeffs), LE, zero))
    src = [zero] * (nedges + 1)
    for e in net.out_edges(net.source):
        src[e] = one
    rows.append(Row("src", tuple(src), EQ, cut))
    dst = [zero] * (nedges + 1)
    for e in net.in_edges(net.terminal):
        dst[e] = one
    rows.append(Row("dst", tuple(dst), EQ, cut))

    names = tuple(f"F[e{e}]" for e in range(nedges)) + ("lam",)
    objective = tuple([zero] * nedges + [Fraction(-1)])
    return LpProblem("2", z, names, objective, cut, tuple(rows), (), flags)


# ---------------------------------------------------------------------------
# Simplex


def _pivot(tableau: list[list[Fraction]], prow: int, pcol: int) -> None:
    piv = tableau[prow][pcol]
    tableau[prow] = [v / piv for v in tableau[prow]]
    for r, row in enumerate(tableau):
        if r != prow and row[pcol] != 0:
            factor = row[pcol]
            prow_vals = tableau[prow]
            tableau[r] = [v - factor * w for v, w in zip(row, prow_vals)]


def _bland_min(
    tableau: list[list[Fraction]],
    basis: list[int],
    cost: list[Fraction],
    ncols: int,
) -> None:
    """Minimize ``cost . x`` in place; *tableau* rows are the constraints."""
    while True:
        # reduced costs r = cost - cost_B . tableau
        reduced = list(cost)
        for r, row in enumerate(tableau):
            cb = cost[basis[r]]
            if cb != 0:
                for j in range(ncols):
                    reduced[j] -= cb * row[j]
        entering = -1
        for j in range(ncols):
            if j not in basis and reduced[j] < 0:
                entering = j
                break
        if entering < 0:
            return
        leaving = -1
        best = None
        for r, row in enumerate(tableau):
            a = row[entering]
            if a > 0:
                ratio = row[ncols] / a
                if best is None or ratio < best or (
                    ratio == best and basis[r] < basis[leaving]
                ):
                    best = ratio
                    leaving = r
        if leaving < 0:
            raise UnboundedError("objective unbounded above")
        _pivot(tableau, leaving, entering)
        basis[leaving] = entering


def solve_exact(problem: LpProblem) -> LpSolution:
    """Solve *problem* exactly; return the optimal vertex.

    Two-phase tableau simplex with Bland's rule over ``Fraction``;
    deterministic for a fixed problem, which freezes the returned vertex
    (and hence every denominator) across runs.

    Raises:
        InfeasibleError: no feasible point exists.
        UnboundedError: the objective grows without bound.
    """
    nvars = len(problem.names)
    for row in problem.rows:
        if row.sense not in (LE, EQ):
            raise LpError(f"unsupported sense {row.sense!r}")
    # A <= row with negative rhs is normalized by negation into a >=
    # row, which takes a surplus column plus an artificial.
    surplus = [r.sense == LE and r.rhs < 0 for r in problem.rows]
    n_slack = sum(1 for r in problem.rows if r.sense == LE)
    n_art = sum(
        1
        for r, s in zip(problem.rows, surplus)
        if r.sense == EQ or s
    )
    ncols = nvars + n_slack + n_art
    zero = Fraction(0)

    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    slack_at = nvars
    art_at = nvars + n_slack
    art_cols: list[int] = []
    for row, is_surplus in zip(problem.rows, surplus):
        coeffs = list(row.coeffs)
        rhs = row.rhs
        if rhs < 0:
            coeffs = [-c for c in coeffs]
            rhs = -rhs
        line = coeffs + [zero] * (n_slack + n_art) + [rhs]
        if is_surplus:
            line[slack_at] = Fraction(-1)
            slack_at += 1
            line[art_at] = Fraction(1)
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        elif row.sense == LE:
            line[slack_at] = Fraction(1)
            basis.append(slack_at)
            slack_at += 1
        else:
            line[art_at] = Fraction(1)
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        tableau.append(line)

    if art_cols:
        phase1 = [zero] * ncols
        for j in art_cols:
            phase1[j] = Fraction(1)
        _bland_min(tableau, basis, phase1, ncols)
        residual = sum(
            tableau[r][ncols] for r, b in enumerate(basis) if b in art_cols
        )
        if residual != 0:
            raise InfeasibleError("phase 1 ended with positive artificials")
        # Drive any degenerate artificial out of the basis, or drop its row.
        for r in range(len(basis) - 1, -1, -1):
            if basis[r] in art_cols:
                pcol = next(
                    (
                        j
                        for j in range(nvars + n_slack)
                        if tableau[r][j] != 0
                    ),
                    None,
                )
                if pcol is None:
                    del tableau[r]
                    del basis[r]
                else:
                    _pivot(tableau, r, pcol)
                    basis[r] = pcol

    cost = [-c for c in problem.objective] + [zero] * (n_slack + n_art)
    for j in art_cols:
        # Forbid re-entry of artificial columns in phase 2.
        cost[j] = Fraction(0)
        for row in tableau:
            row[j] = zero
    _bland_min(tableau, basis, cost, ncols)

    values = [zero] * ncols
    for r, b in enumerate(basis):
        values[b] = tableau[r][ncols]
    x = values[:nvars]
    objective = problem.constant + sum(
        c * v for c, v in zip(problem.objective, x)
    )

    variables = dict(zip(problem.names, x))
    lam = variables.get("lam", zero)
    path_flows: tuple[Fraction, ...] = ()
    edge_flows: tuple[Fraction, ...] = ()
    if problem.paths:
        path_flows = tuple(x[: len(problem.paths)])
        acc: dict[int, Fraction] = {}
        for p, f in zip(problem.paths, path_flows):
            for e in p:
                acc[e] = acc.get(e, zero) + f
        nedges = max((max(p) for p in problem.paths if p), default=-1) + 1
        edge_flows = tuple(acc.get(e, zero) for e in range(nedges))
    elif problem.kind == "2":
        edge_flows = tuple(x[:-1])

    return LpSolution(
        kind=problem.kind,
        z=problem.z,
        objective=objective,
        lam=lam,
        variables=variables,
        paths=problem.paths,
        path_flows=path_flows,
        edge_flows=edge_flows,
        flags=problem.flags,
    )


def verify(problem: LpProblem, solution: LpSolution) -> None:
    """Re-check every constraint and the objective value, exactly.

    Raises:
        LpError: if any row is violated or the objective does not match.
    """
    x = [solution.variables[name] for name in problem.names]
    if any(v < 0 for v in x):
        raise LpError("negative variable value")
    for row in problem.rows:
        lhs = sum(c * v for c, v in zip(row.coeffs, x))
        if row.sense == LE and lhs > row.rhs:
            raise LpError(f"row {row.name} violated: {lhs} > {row.rhs}")
        if row.sense == EQ and lhs != row.rhs:
            raise LpError(f"row {row.name} violated: {lhs} != {row.rhs}")
    objective = problem.constant + sum(
        c * v for c, v in zip(problem.objective, x)
    )
    if objective != solution.objective:
        raise LpError(
            f"objective mismatch: recomputed {objective}, stored {solution.objective}"
        )


def solve_rate(net: Network, z: int) -> LpSolution:
    """Convenience: pinned path form solved exactly (the planner default)."""
    return solve_exact(build_lp1_prime(net, z))
