"""Finite posets, chains, order complexes, duals, products, atoms, E(P).

Elements are opaque hashable labels (strings in the JSON interface); orders
are canonicalized internally to index pairs, so all enumeration orders are
deterministic.  All types are immutable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Sequence

from .errors import AxiomViolation, InputError

Label = Hashable


@dataclass(frozen=True)
class FinitePoset:
    elements: tuple[Label, ...]
    relation: frozenset[tuple[int, int]]  # index pairs (i, j) meaning e_i <= e_j

    def __post_init__(self) -> None:
        if len(set(self.elements)) != len(self.elements):
            raise AxiomViolation("distinct-elements", self.elements)
        n = len(self.elements)
        rel = self.relation
        for i, j in rel:
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"relation pair {(i, j)} out of range")
        for i in range(n):
            if (i, i) not in rel:
                raise AxiomViolation("reflexive", (self.elements[i],) * 2)
        for i, j in rel:
            if i != j and (j, i) in rel:
                raise AxiomViolation("antisymmetric", (self.elements[i], self.elements[j]))
        up = {i: {j for (a, j) in rel if a == i} for i in range(n)}
        for i, j in rel:
            for k in up[j]:
                if (i, k) not in rel:
                    raise AxiomViolation(
                        "transitive", (self.elements[i], self.elements[j], self.elements[k]))

    # -- basic queries -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, label: Label) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise InputError(f"unknown element {label!r}") from None

    def leq(self, a: Label, b: Label) -> bool:
        return (self.index(a), self.index(b)) in self.relation

    def lt(self, a: Label, b: Label) -> bool:
        return a != b and self.leq(a, b)

    def leq_pairs(self) -> list[tuple[Label, Label]]:
        return sorted(((self.elements[i], self.elements[j]) for i, j in self.relation),
                      key=lambda p: (self.elements.index(p[0]), self.elements.index(p[1])))

    def comparable_pairs(self) -> list[tuple[int, int]]:
        """Strict pairs (i, j) with e_i < e_j, in canonical order."""
        return sorted((i, j) for i, j in self.relation if i != j)

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs: i < j with nothing strictly between."""
        strict = {(i, j) for i, j in self.relation if i != j}
        out = []
        for i, j in strict:
            if not any((i, k) in strict and (k, j) in strict for k in range(len(self.elements))):
                out.append((i, j))
        return sorted(out)

    def up_set(self, label: Label) -> frozenset[Label]:
        i = self.index(label)
        return frozenset(self.elements[j] for (a, j) in self.relation if a == i)

    def linear_extension(self) -> list[int]:
        """Indices sorted so that smaller poset elements come first."""
        strict = {(i, j) for i, j in self.relation if i != j}
        below = {j: sum(1 for i, k in strict if k == j) for j in range(len(self.elements))}
        return sorted(range(len(self.elements)), key=lambda j: (below[j], j))

    # -- chains ------------------------------------------------------------

    def is_chain(self, labels: Sequence[Label]) -> bool:
        idx = [self.index(x) for x in labels]
        return all(idx[k] != idx[k + 1] and (idx[k], idx[k + 1]) in self.relation
                   for k in range(len(idx) - 1))

    def chain(self, labels: Sequence[Label]) -> Chain:
        return Chain(self, tuple(labels))

    def iter_chains(self, limit: int | None = None) -> Iterator[tuple[int, ...]]:
        """All nonempty strict chains as index tuples, depth-first."""
        n = len(self.elements)
        strict_up = [sorted(j for (a, j) in self.relation if a == i and j != i)
                     for i in range(n)]
        count = 0
        stack: list[tuple[int, ...]] = [(i,) for i in reversed(range(n))]
        while stack:
            chain = stack.pop()
            count += 1
            if limit is not None and count > limit:
                raise InputError(f"chain enumeration exceeded limit {limit}")
            yield chain
            for j in reversed(strict_up[chain[-1]]):
                stack.append(chain + (j,))

    def atoms(self) -> set[Label]:
        """Minimal elements: no other element strictly below."""
        strict = {(i, j) for i, j in self.relation if i != j}
        minimal = set(range(len(self.elements))) - {j for _, j in strict}
        return {self.elements[i] for i in minimal}


def validate_poset(elements: Iterable[Label], pairs: Iterable[tuple[Label, Label]]) -> FinitePoset:
    """Build a poset, raising AxiomViolation with a witness if an axiom fails."""
    elems = tuple(elements)
    index = {e: i for i, e in enumerate(elems)}
    rel = set()
    for a, b in pairs:
        if a not in index or b not in index:
            raise InputError(f"relation mentions unknown element {(a, b)!r}")
        rel.add((index[a], index[b]))
    return FinitePoset(elems, frozenset(rel))


@dataclass(frozen=True)
class Chain:
    """Strictly increasing nonempty sequence of poset elements."""

    poset: FinitePoset
    vertices: tuple[Label, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise InputError("chains are nonempty")
        idx = [self.poset.index(v) for v in self.vertices]
        for k in range(len(idx) - 1):
            if idx[k] == idx[k + 1] or (idx[k], idx[k + 1]) not in self.poset.relation:
                raise InputError(f"not a strict chain: {self.vertices!r}")

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def bottom(self) -> Label:
        return self.vertices[0]

    def top(self) -> Label:
        return self.vertices[-1]


@dataclass(frozen=True)
class OrderComplex:
    """All strict chains of a poset, graded by dimension = length - 1."""

    poset: FinitePoset
    simplexes: tuple[tuple[tuple[int, ...], ...], ...]  # per dimension, index tuples

    @property
    def dimension(self) -> int:
        return len(self.simplexes) - 1

    def n_simplexes(self, dim: int) -> int:
        if 0 <= dim < len(self.simplexes):
            return len(self.simplexes[dim])
        return 0

    def simplexes_of_dim(self, dim: int) -> tuple[tuple[int, ...], ...]:
        if 0 <= dim < len(self.simplexes):
            return self.simplexes[dim]
        return ()

    def chains_of_dim(self, dim: int) -> list[Chain]:
        return [Chain(self.poset, tuple(self.poset.elements[i] for i in sigma))
                for sigma in self.simplexes_of_dim(dim)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * len(level) for d, level in enumerate(self.simplexes))

    def total_simplexes(self) -> int:
        return sum(len(level) for level in self.simplexes)


def order_complex(poset: FinitePoset, limit: int | None = None) -> OrderComplex:
    by_dim: dict[int, list[tuple[int, ...]]] = {}
    for chain in poset.iter_chains(limit=limit):
        by_dim.setdefault(len(chain) - 1, []).append(chain)
    top = max(by_dim) if by_dim else -1
    levels = tuple(tuple(sorted(by_dim.get(d, ()))) for d in range(top + 1))
    return OrderComplex(poset, levels)


def atoms(poset: FinitePoset) -> set[Label]:
    return poset.atoms()


def e_subposet(poset: FinitePoset) -> FinitePoset:
    """E(P): pairs (a, p) with a an atom and a <= p; (a,p) <= (b,q) iff a=b, p<=q."""
    atom_list = sorted(poset.atoms(), key=poset.index)
    elems: list[tuple[Label, Label]] = []
    for a in atom_list:
        ai = poset.index(a)
        for j, p in enumerate(poset.elements):
            if (ai, j) in poset.relation:
                elems.append((a, p))
    pairs = [((a, p), (b, q)) for (a, p) in elems for (b, q) in elems
             if a == b and poset.leq(p, q)]
    return validate_poset(elems, pairs)


def product(p: FinitePoset, q: FinitePoset) -> FinitePoset:
    """Componentwise order on pairs."""
    elems = [(a, b) for a in p.elements for b in q.elements]
    pairs = [((a, b), (c, d)) for (a, b) in elems for (c, d) in elems
             if p.leq(a, c) and q.leq(b, d)]
    return validate_poset(elems, pairs)


def dual(p: FinitePoset) -> FinitePoset:
    return FinitePoset(p.elements, frozenset((j, i) for i, j in p.relation))


# ---------------------------------------------------------------------------
# weighted chains


@dataclass(frozen=True)
class WeightedChain:
    """Formal convex combination of a chain's vertices.

    Canonical form: zero-weight vertices are dropped at construction, so all
    stored weights are positive rationals summing to 1.
    """

    chain: Chain
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.chain.vertices):
            raise InputError("one weight per chain vertex required")
        if any(w < 0 for w in self.weights):
            raise InputError("weights must be nonnegative")
        if sum(self.weights) != 1:
            raise InputError("weights must sum to 1")
        if any(w == 0 for w in self.weights):
            keep = [(v, w) for v, w in zip(self.chain.vertices, self.weights) if w != 0]
            object.__setattr__(self, "chain",
                               Chain(self.chain.poset, tuple(v for v, _ in keep)))
            object.__setattr__(self, "weights", tuple(w for _, w in keep))

    @property
    def vertices(self) -> tuple[Label, ...]:
        return self.chain.vertices

    def breakpoints(self) -> tuple[Fraction, ...]:
        """Partial sums 0 = t_0 < ... < t_k = 1."""
        out = [Fraction(0)]
        for w in self.weights:
            out.append(out[-1] + w)
        return tuple(out)


def weighted_chain(poset: FinitePoset, labels: Sequence[Label],
                   weights: Sequence[Fraction | int | str]) -> WeightedChain:
    return WeightedChain(poset.chain(labels), tuple(Fraction(w) for w in weights))


# ---------------------------------------------------------------------------
# JSON interface: {"elements": [...], "leq": [[p, q], ...]}; reflexive pairs
# may be omitted and are added on load.


def poset_to_json(poset: FinitePoset) -> dict:
    return {
        "elements": list(poset.elements),
        "leq": [[a, b] for a, b in poset.leq_pairs() if a != b],
    }


def poset_from_json(data: dict) -> FinitePoset:
    try:
        elements = list(data["elements"])
        leq = [tuple(pair) for pair in data.get("leq", [])]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed poset JSON: {exc}") from exc
    pairs = set(leq) | {(e, e) for e in elements}
    return validate_poset(elements, pairs)


def load_poset(path: str) -> FinitePoset:
    with open(path, encoding="utf-8") as fh:
        return poset_from_json(json.load(fh))


def weighted_chain_to_json(x: WeightedChain) -> dict:
    return {"chain": list(x.vertices), "weights": [str(w) for w in x.weights]}


def weighted_chain_from_json(poset: FinitePoset, data: dict) -> WeightedChain:
    try:
        return weighted_chain(poset, list(data["chain"]), list(data["weights"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed weighted chain JSON: {exc}") from exc
