"""Exact metric computations over finite spaces.

Hausdorff distance on subsets, the Kantorovich (optimal transport) metric by
a rational network simplex, the L1 metric on step functions encoding weighted
chains, a Ky Fan style convergence-in-measure surrogate, and the deformation
retraction of weighted chains toward their bottom vertex.  All arithmetic is
in Fraction; no floating point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (DomainMismatch, EmptySubset, InputError, NotInE,
                     NotProbability)
from .posets import FinitePoset, Label, WeightedChain, weighted_chain

Rat = Fraction


@dataclass(frozen=True)
class FiniteMetricSpace:
    points: tuple[Label, ...]
    dist_matrix: tuple[tuple[Rat, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.points)
        if len(set(self.points)) != n:
            raise InputError("duplicate points")
        d = self.dist_matrix
        if len(d) != n or any(len(row) != n for row in d):
            raise InputError("distance matrix shape mismatch")
        for i in range(n):
            if d[i][i] != 0:
                raise InputError(f"nonzero self-distance at {self.points[i]!r}")
            for j in range(n):
                if d[i][j] != d[j][i]:
                    raise InputError("distance matrix not symmetric")
                if i != j and d[i][j] <= 0:
                    raise InputError("distances between distinct points must be positive")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if d[i][j] > d[i][k] + d[k][j]:
                        raise InputError(
                            f"triangle inequality fails at "
                            f"({self.points[i]!r}, {self.points[j]!r}, {self.points[k]!r})")

    def __len__(self) -> int:
        return len(self.points)

    def index(self, p: Label) -> int:
        try:
            return self.points.index(p)
        except ValueError:
            raise InputError(f"unknown point {p!r}") from None

    def dist(self, a: Label, b: Label) -> Rat:
        return self.dist_matrix[self.index(a)][self.index(b)]

    def diameter(self) -> Rat:
        return max((v for row in self.dist_matrix for v in row), default=Fraction(0))

    def point_to_set(self, x: Label, subset: frozenset[Label]) -> Rat:
        if not subset:
            raise EmptySubset("distance to the empty subset")
        i = self.index(x)
        return min(self.dist_matrix[i][self.index(b)] for b in subset)

    def subset(self, labels: Sequence[Label]) -> frozenset[Label]:
        fs = frozenset(labels)
        if not fs:
            raise EmptySubset("subsets must be nonempty")
        for x in fs:
            self.index(x)
        return fs

    def scaled(self, factor: Rat) -> FiniteMetricSpace:
        if factor <= 0:
            raise InputError("scale factor must be positive")
        return FiniteMetricSpace(
            self.points,
            tuple(tuple(factor * v for v in row) for row in self.dist_matrix))


def metric_space(points: Sequence[Label], dist: Sequence[Sequence[Rat | int | str]]) -> FiniteMetricSpace:
    return FiniteMetricSpace(tuple(points),
                             tuple(tuple(Fraction(v) for v in row) for row in dist))


def discrete_space(points: Sequence[Label], distance: Rat | int = 1) -> FiniteMetricSpace:
    d = Fraction(distance)
    n = len(points)
    return FiniteMetricSpace(
        tuple(points),
        tuple(tuple(d if i != j else Fraction(0) for j in range(n)) for i in range(n)))


# ---------------------------------------------------------------------------
# Hausdorff distance and the embedding identity


def hausdorff_distance(space: FiniteMetricSpace, a: frozenset[Label], b: frozenset[Label]) -> Rat:
    """max of the two directed sup-inf distances."""
    if not a or not b:
        raise EmptySubset("Hausdorff distance needs nonempty subsets")
    forward = max(space.point_to_set(x, b) for x in a)
    backward = max(space.point_to_set(y, a) for y in b)
    return max(forward, backward)


def embedding_distance(space: FiniteMetricSpace, a: frozenset[Label], b: frozenset[Label]) -> Rat:
    """sup over the whole space of |d(x,A) - d(x,B)|; equals hausdorff_distance."""
    if not a or not b:
        raise EmptySubset("embedding distance needs nonempty subsets")
    return max(abs(space.point_to_set(x, a) - space.point_to_set(x, b)) for x in space.points)


def nonorder_margin(space: FiniteMetricSpace, a: frozenset[Label],
                    b: frozenset[Label]) -> Rat | None:
    """If A does not contain B, a radius eps such that no Hausdorff-eps
    perturbation of the pair restores containment; None if A contains B."""
    if b <= a:
        return None
    return max(space.point_to_set(y, a) for y in b) / 3


# ---------------------------------------------------------------------------
# finite measures and the Kantorovich metric


@dataclass(frozen=True)
class FiniteMeasure:
    """Finitely supported rational measure; zero-weight points are dropped."""

    weights: tuple[tuple[Label, Rat], ...]

    def __post_init__(self) -> None:
        seen = set()
        cleaned = []
        for p, w in self.weights:
            if p in seen:
                raise InputError(f"duplicate support point {p!r}")
            seen.add(p)
            if w != 0:
                cleaned.append((p, Fraction(w)))
        object.__setattr__(self, "weights", tuple(cleaned))

    @property
    def support(self) -> tuple[Label, ...]:
        return tuple(p for p, _ in self.weights)

    def total(self) -> Rat:
        return sum((w for _, w in self.weights), Fraction(0))

    def weight(self, p: Label) -> Rat:
        for q, w in self.weights:
            if q == p:
                return w
        return Fraction(0)

    def is_probability(self) -> bool:
        return all(w > 0 for _, w in self.weights) and self.total() == 1

    def __sub__(self, other: FiniteMeasure) -> FiniteMeasure:
        acc: dict[Label, Rat] = {p: w for p, w in self.weights}
        for p, w in other.weights:
            acc[p] = acc.get(p, Fraction(0)) - w
        return FiniteMeasure(tuple(acc.items()))


def measure(weights: Mapping[Label, Rat | int | str]) -> FiniteMeasure:
    return FiniteMeasure(tuple((p, Fraction(w)) for p, w in weights.items()))


def dirac(p: Label) -> FiniteMeasure:
    return FiniteMeasure(((p, Fraction(1)),))


def transport_optimum(costs: Sequence[Sequence[Rat]], supplies: Sequence[Rat],
                      demands: Sequence[Rat]) -> Rat:
    """Exact optimum of the transportation LP by network simplex.

    Basic solutions are spanning trees of the bipartite supply/demand graph;
    Bland's rule on arc indices (entering and leaving) prevents cycling.
    """
    l, m = len(supplies), len(demands)
    if sum(supplies, Fraction(0)) != sum(demands, Fraction(0)):
        raise InputError("total supply must equal total demand")
    if l == 0:
        return Fraction(0)

    # Northwest-corner start: exactly l + m - 1 basic cells.
    flow: dict[tuple[int, int], Rat] = {}
    basis: list[tuple[int, int]] = []
    rem_s = [Fraction(v) for v in supplies]
    rem_d = [Fraction(v) for v in demands]
    i = j = 0
    while True:
        theta = min(rem_s[i], rem_d[j])
        basis.append((i, j))
        flow[(i, j)] = theta
        rem_s[i] -= theta
        rem_d[j] -= theta
        if i == l - 1 and j == m - 1:
            break
        if rem_s[i] == 0 and i < l - 1:
            i += 1
        else:
            j += 1

    def duals() -> tuple[list[Rat], list[Rat]]:
        u: list[Rat | None] = [None] * l
        v: list[Rat | None] = [None] * m
        u[0] = Fraction(0)
        pending = list(basis)
        while pending:
            progressed = False
            rest = []
            for (a, b) in pending:
                if u[a] is not None and v[b] is None:
                    v[b] = costs[a][b] - u[a]
                    progressed = True
                elif v[b] is not None and u[a] is None:
                    u[a] = costs[a][b] - v[b]
                    progressed = True
                elif u[a] is None and v[b] is None:
                    rest.append((a, b))
            pending = rest if progressed else pending
            if not progressed and pending:
                raise AssertionError("basis is not a spanning tree")
        return u, v  # type: ignore[return-value]

    def tree_cycle(enter: tuple[int, int]) -> list[tuple[int, int]]:
        """Alternating cycle created by the entering cell, starting with it."""
        adj_row: dict[int, list[tuple[int, int]]] = {}
        adj_col: dict[int, list[tuple[int, int]]] = {}
        for cell in basis:
            adj_row.setdefault(cell[0], []).append(cell)
            adj_col.setdefault(cell[1], []).append(cell)
        start_row, start_col = enter
        # Path in the basis tree from row node start_row to column node start_col.
        parent: dict[tuple[str, int], tuple[tuple[str, int], tuple[int, int]] | None] = {
            ("r", start_row): None}
        queue = [("r", start_row)]
        while queue:
            node = queue.pop()
            kind, idx = node
            cells = adj_row.get(idx, ()) if kind == "r" else adj_col.get(idx, ())
            for cell in cells:
                nxt = ("c", cell[1]) if kind == "r" else ("r", cell[0])
                if nxt not in parent:
                    parent[nxt] = (node, cell)
                    queue.append(nxt)
        path_cells = []
        node = ("c", start_col)
        while parent[node] is not None:
            prev, cell = parent[node]  # type: ignore[misc]
            path_cells.append(cell)
            node = prev
        # The tree path between the entering cell's endpoints has odd length,
        # so the signs below alternate consistently around the cycle.
        return [enter] + path_cells

    while True:
        u, v = duals()
        enter = None
        for a in range(l):
            ua = u[a]
            row = costs[a]
            for b in range(m):
                if (a, b) not in flow and row[b] - ua - v[b] < 0:
                    enter = (a, b)
                    break
            if enter:
                break
        if enter is None:
            break
        cycle = tree_cycle(enter)
        minus = cycle[1::2]
        theta = min(flow[c] for c in minus)
        leave = min(c for c in minus if flow[c] == theta)
        for k, cell in enumerate(cycle):
            if k % 2 == 0:
                flow[cell] = flow.get(cell, Fraction(0)) + theta
            else:
                flow[cell] -= theta
        del flow[leave]
        basis = [c for c in basis if c != leave] + [enter]

    return sum((w * costs[a][b] for (a, b), w in flow.items()), Fraction(0))


def kantorovich_distance(space: FiniteMetricSpace, lam: FiniteMeasure,
                         mu: FiniteMeasure) -> Rat:
    """Minimal transport cost between two probability measures on the space."""
    if not lam.is_probability() or not mu.is_probability():
        raise NotProbability("kantorovich_distance needs probability measures")
    src = lam.support
    dst = mu.support
    costs = [[space.dist(a, b) for b in dst] for a in src]
    return transport_optimum(costs, [lam.weight(p) for p in src],
                             [mu.weight(p) for p in dst])


# ---------------------------------------------------------------------------
# step functions and the L1 / Ky Fan metrics


@dataclass(frozen=True)
class StepFunction:
    """Right-open step function [0,1) -> space, constant on [t_{i-1}, t_i)."""

    space: FiniteMetricSpace
    breakpoints: tuple[Rat, ...]   # 0 = t_0 < ... < t_k = 1
    values: tuple[Label, ...]

    def __post_init__(self) -> None:
        bp = self.breakpoints
        if len(bp) < 2 or bp[0] != 0 or bp[-1] != 1:
            raise InputError("breakpoints must run from 0 to 1")
        if any(bp[i] >= bp[i + 1] for i in range(len(bp) - 1)):
            raise InputError("breakpoints must be strictly increasing")
        if len(self.values) != len(bp) - 1:
            raise InputError("one value per interval required")
        for v in self.values:
            self.space.index(v)

    def value_at(self, t: Rat) -> Label:
        if not 0 <= t < 1:
            raise InputError("arguments live in [0,1)")
        for i in range(len(self.values)):
            if self.breakpoints[i] <= t < self.breakpoints[i + 1]:
                return self.values[i]
        raise AssertionError("unreachable")


def _common_refinement(f: StepFunction, g: StepFunction) -> list[tuple[Rat, Label, Label]]:
    """(length, f-value, g-value) per interval of the joint subdivision."""
    if f.space != g.space:
        raise DomainMismatch("step functions over different spaces")
    cuts = sorted(set(f.breakpoints) | set(g.breakpoints))
    out = []
    fi = gi = 0
    for a, b in zip(cuts, cuts[1:]):
        while f.breakpoints[fi + 1] <= a:
            fi += 1
        while g.breakpoints[gi + 1] <= a:
            gi += 1
        out.append((b - a, f.values[fi], g.values[gi]))
    return out


def l1_step_distance(f: StepFunction, g: StepFunction) -> Rat:
    """Integral over [0,1) of the pointwise distance."""
    return sum((length * f.space.dist(x, y) for length, x, y in _common_refinement(f, g)),
               Fraction(0))


def ky_fan_distance(f: StepFunction, g: StepFunction) -> Rat:
    """inf over eps > 0 of eps + measure{t : d(f(t), g(t)) > eps}.

    The pointwise distance takes finitely many values, so scanning those
    values (and 0) as thresholds realizes the infimum exactly.
    """
    segments = _common_refinement(f, g)
    dists = [(length, f.space.dist(x, y)) for length, x, y in segments]
    candidates = {Fraction(0)} | {d for _, d in dists}
    best = None
    for eps in candidates:
        value = eps + sum((length for length, d in dists if d > eps), Fraction(0))
        if best is None or value < best:
            best = value
    return best if best is not None else Fraction(0)


def step_function_of(x: WeightedChain, space: FiniteMetricSpace) -> StepFunction:
    """Step function with breakpoints at the weight partial sums."""
    return StepFunction(space, x.breakpoints(), x.vertices)


def measure_of(x: WeightedChain) -> FiniteMeasure:
    """The probability measure with the chain's weights at its vertices."""
    return FiniteMeasure(tuple(zip(x.vertices, x.weights)))


def measure_of_step(f: StepFunction) -> FiniteMeasure:
    acc: dict[Label, Rat] = {}
    for i, v in enumerate(f.values):
        acc[v] = acc.get(v, Fraction(0)) + (f.breakpoints[i + 1] - f.breakpoints[i])
    return FiniteMeasure(tuple(acc.items()))


# ---------------------------------------------------------------------------
# deformation toward the bottom vertex


def deformation_point(poset: FinitePoset, a: Label, x: WeightedChain,
                      t: Rat | int | str) -> WeightedChain:
    """t * (bottom vertex a) + (1 - t) * x as a weighted chain.

    The pair (a, x) must represent a point of |E(P)|, i.e. a <= bottom(x);
    if a is strictly below, the chain is padded with a zero-weight copy of a
    first, so t = 1 collapses to the vertex a and t = 0 returns x.
    """
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise InputError("deformation parameter must lie in [0, 1]")
    if not poset.leq(a, x.vertices[0]):
        raise NotInE(f"{a!r} is not below the chain bottom {x.vertices[0]!r}")
    if x.vertices[0] == a:
        verts = x.vertices
        weights = list(x.weights)
    else:
        verts = (a,) + x.vertices
        weights = [Fraction(0)] + list(x.weights)
    scaled = [w * (1 - t) for w in weights]
    scaled[0] += t
    return weighted_chain(poset, verts, scaled)


# ---------------------------------------------------------------------------
# JSON interface: {"points": [...], "dist": [["0", "1/2"], ...]};
# measures are {"point": "weight"} maps.


def space_to_json(space: FiniteMetricSpace) -> dict:
    return {"points": list(space.points),
            "dist": [[str(v) for v in row] for row in space.dist_matrix]}


def space_from_json(data: dict) -> FiniteMetricSpace:
    try:
        return metric_space(list(data["points"]), data["dist"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed metric space JSON: {exc}") from exc


def load_space(path: str) -> FiniteMetricSpace:
    with open(path, encoding="utf-8") as fh:
        return space_from_json(json.load(fh))


def measure_to_json(m: FiniteMeasure) -> dict:
    return {str(p): str(w) for p, w in m.weights}


def measure_from_json(data: dict) -> FiniteMeasure:
    try:
        return measure({p: Fraction(w) for p, w in data.items()})
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed measure JSON: {exc}") from exc


def load_measure(path: str) -> FiniteMeasure:
    with open(path, encoding="utf-8") as fh:
        return measure_from_json(json.load(fh))
