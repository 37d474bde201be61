"""Diagrams of abelian groups over finite posets and their derived limits.

A diagram assigns a group G_p to each element and a homomorphism to each
comparable pair; maps need only be supplied on covering relations and are
completed by composition, with functoriality verified exactly on generators.

lim^p is the cohomology of an explicit cochain complex on the order complex:
the degree-n term is the direct sum over n-simplexes (strict chains) of the
group at the chain's top vertex; the face dropping the top vertex contributes
the diagram map along the top edge, all other faces contribute the identity,
with alternating signs.  colim is degree-zero homology of the companion chain
complex whose blocks sit at the chain's bottom vertex.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

from .abgroups import (FgAbGroup, Homomorphism, IntMatrix, group_of_presentation,
                       hstack, matrix_from_json, matrix_to_json, orders_columns,
                       preimage_lattice, subquotient)
from .errors import InputError, NotAComplex, Nonfunctorial
from .posets import FinitePoset, Label, OrderComplex, order_complex, poset_from_json, poset_to_json


@dataclass(frozen=True)
class PosetDiagram:
    """Functorial assignment p -> G_p, (p <= q) -> map G_p -> G_q."""

    base: FinitePoset
    groups: tuple[FgAbGroup, ...]                      # by element index
    maps: Mapping[tuple[int, int], Homomorphism]       # on all strict comparable pairs

    def group_at(self, label: Label) -> FgAbGroup:
        return self.groups[self.base.index(label)]

    def map_at(self, a: Label, b: Label) -> Homomorphism:
        i, j = self.base.index(a), self.base.index(b)
        if i == j:
            return Homomorphism.identity(self.groups[i])
        if (i, j) not in self.maps:
            raise InputError(f"{a!r} <= {b!r} does not hold")
        return self.maps[(i, j)]


def build_diagram(base: FinitePoset, groups: Mapping[Label, FgAbGroup],
                  maps: Mapping[tuple[Label, Label], Homomorphism | IntMatrix]) -> PosetDiagram:
    """Assemble and validate a diagram from maps on (at least) covering pairs.

    Composites along covering chains fill in the remaining comparable pairs;
    any supplied non-covering map is checked against the generated composite.
    Raises Nonfunctorial with a witness triple if composites disagree.
    """
    n = len(base.elements)
    group_by_index = []
    for e in base.elements:
        if e not in groups:
            raise InputError(f"no group assigned to element {e!r}")
        group_by_index.append(groups[e])
    supplied: dict[tuple[int, int], Homomorphism] = {}
    for (a, b), h in maps.items():
        i, j = base.index(a), base.index(b)
        if (i, j) not in base.relation:
            raise InputError(f"map supplied on non-comparable pair ({a!r}, {b!r})")
        if isinstance(h, IntMatrix):
            h = Homomorphism(group_by_index[i], group_by_index[j], h)
        if h.source != group_by_index[i] or h.target != group_by_index[j]:
            raise InputError(f"map on ({a!r}, {b!r}) has wrong source or target")
        if i == j:
            if not h.equal_as_maps(Homomorphism.identity(group_by_index[i])):
                raise Nonfunctorial((a, a, a))
            continue
        supplied[(i, j)] = h

    covers = set(base.covers())
    for i, j in covers:
        if (i, j) not in supplied:
            raise InputError(
                f"missing map on covering pair ({base.elements[i]!r}, {base.elements[j]!r})")

    def interval_size(pair: tuple[int, int]) -> int:
        i, j = pair
        return sum(1 for k in range(n)
                   if (i, k) in base.relation and (k, j) in base.relation)

    complete: dict[tuple[int, int], Homomorphism] = {}
    for i, j in sorted(base.comparable_pairs(), key=interval_size):
        if (i, j) in covers:
            complete[(i, j)] = supplied[(i, j)]
            continue
        # A strictly intermediate element exists and both shorter intervals
        # were completed earlier in the interval-size order.
        mid = next(k for k in range(n) if k not in (i, j)
                   and (i, k) in base.relation and (k, j) in base.relation)
        complete[(i, j)] = complete[(mid, j)].compose(complete[(i, mid)])
        if (i, j) in supplied and not supplied[(i, j)].equal_as_maps(complete[(i, j)]):
            raise Nonfunctorial((base.elements[i], base.elements[mid], base.elements[j]))

    diagram = PosetDiagram(base, tuple(group_by_index), complete)
    verify_functorial(diagram)
    return diagram


def verify_functorial(diagram: PosetDiagram) -> None:
    """Check map(q,r) o map(p,q) == map(p,r) exactly on all strict triples."""
    base = diagram.base
    strict = base.comparable_pairs()
    up = {}
    for i, j in strict:
        up.setdefault(i, []).append(j)
    for i, j in strict:
        for k in up.get(j, ()):
            left = diagram.maps[(j, k)].compose(diagram.maps[(i, j)])
            if not left.equal_as_maps(diagram.maps[(i, k)]):
                raise Nonfunctorial(
                    (base.elements[i], base.elements[j], base.elements[k]))


def constant_diagram(base: FinitePoset, group: FgAbGroup) -> PosetDiagram:
    ident = Homomorphism.identity(group)
    maps = {pair: ident for pair in base.comparable_pairs()}
    return PosetDiagram(base, (group,) * len(base.elements), maps)


# ---------------------------------------------------------------------------
# local-system complexes


@dataclass(frozen=True)
class LocalSystemComplex:
    """(Co)chain complex on the order complex with one block per simplex.

    Each degree carries the concatenated generators of its blocks; `orders`
    records the generator orders (0 = free), which is the presentation needed
    once diagram groups carry torsion.  For direction "cochain" the stored
    differential in degree n maps degree n to n+1; for "chain", n to n-1.
    """

    direction: Literal["cochain", "chain"]
    complex_: OrderComplex
    block_group: tuple[tuple[FgAbGroup, ...], ...]   # per degree, per simplex
    offsets: tuple[tuple[int, ...], ...]
    orders: tuple[tuple[int, ...], ...]
    differentials: tuple[IntMatrix, ...]

    @property
    def top(self) -> int:
        return len(self.orders) - 1

    def gens(self, degree: int) -> int:
        if 0 <= degree <= self.top:
            return len(self.orders[degree])
        return 0

    def differential(self, degree: int) -> IntMatrix:
        """Differential out of `degree` (to degree+1 or degree-1 by direction)."""
        other = degree + 1 if self.direction == "cochain" else degree - 1
        if 0 <= degree <= self.top:
            if self.direction == "cochain" and degree < self.top:
                return self.differentials[degree]
            if self.direction == "chain" and degree >= 1:
                return self.differentials[degree - 1]
        return IntMatrix.zeros(self.gens(other), self.gens(degree))

    def group_at_degree(self, degree: int) -> FgAbGroup:
        """Homology/cohomology of the complex at the given degree."""
        if degree < 0 or degree > self.top or self.gens(degree) == 0:
            return FgAbGroup.zero()
        out = self.differential(degree)
        into = self.differential(degree + 1) if self.direction == "chain" \
            else self.differential(degree - 1)
        other = degree + 1 if self.direction == "cochain" else degree - 1
        target_orders = self.orders[other] if 0 <= other <= self.top else ()
        cycles = preimage_lattice(out, orders_columns(target_orders)) \
            if out.rows else IntMatrix.identity(self.gens(degree))
        den = hstack(into, orders_columns(self.orders[degree]))
        return subquotient(cycles, den)


def _assemble(diagram: PosetDiagram, direction: Literal["cochain", "chain"]) -> LocalSystemComplex:
    base = diagram.base
    complex_ = order_complex(base)
    dims = complex_.dimension + 1
    if dims == 0:
        return LocalSystemComplex(direction, complex_, (), (), (), ())
    block_group, offsets, orders = [], [], []
    for d in range(dims):
        level = complex_.simplexes_of_dim(d)
        anchor = (lambda s: s[-1]) if direction == "cochain" else (lambda s: s[0])
        groups = tuple(diagram.groups[anchor(s)] for s in level)
        offs, total = [], 0
        for g in groups:
            offs.append(total)
            total += g.n_gens
        block_group.append(groups)
        offsets.append(tuple(offs))
        orders.append(tuple(o for g in groups for o in g.orders))

    diffs = []
    for d in range(dims - 1):
        if direction == "cochain":
            diffs.append(_cochain_differential(diagram, complex_, block_group, offsets, d))
        else:
            diffs.append(_chain_differential(diagram, complex_, block_group, offsets, d + 1))
    lsc = LocalSystemComplex(direction, complex_, tuple(block_group), tuple(offsets),
                             tuple(orders), tuple(diffs))
    _check_complex(lsc)
    return lsc


def _place(block: IntMatrix, out: list[list[int]], row0: int, col0: int, sign: int) -> None:
    for i, row in enumerate(block.entries):
        target = out[row0 + i]
        for j, v in enumerate(row):
            if v:
                target[col0 + j] += sign * v


def _cochain_differential(diagram, complex_, block_group, offsets, d) -> IntMatrix:
    """Degree d -> d+1: blocks G_{top sigma}; dropped-top face contributes the
    diagram map along the top edge, other faces the identity."""
    level = complex_.simplexes_of_dim(d)
    upper = complex_.simplexes_of_dim(d + 1)
    index_of = {s: i for i, s in enumerate(level)}
    rows = sum(g.n_gens for g in block_group[d + 1])
    cols = sum(g.n_gens for g in block_group[d])
    out = [[0] * cols for _ in range(rows)]
    elements = diagram.base.elements
    for t_idx, tau in enumerate(upper):
        for k in range(len(tau)):
            sigma = tau[:k] + tau[k + 1:]
            s_idx = index_of[sigma]
            sign = -1 if k % 2 else 1
            if k == len(tau) - 1:
                block = diagram.map_at(elements[sigma[-1]], elements[tau[-1]]).matrix
            else:
                block = IntMatrix.identity(block_group[d][s_idx].n_gens)
            _place(block, out, offsets[d + 1][t_idx], offsets[d][s_idx], sign)
    return IntMatrix.from_rows(out, cols=cols)


def _chain_differential(diagram, complex_, block_group, offsets, d) -> IntMatrix:
    """Degree d -> d-1: blocks G_{bottom sigma}; dropped-bottom face contributes
    the diagram map along the bottom edge, other faces the identity."""
    level = complex_.simplexes_of_dim(d)
    lower = complex_.simplexes_of_dim(d - 1)
    index_of = {s: i for i, s in enumerate(lower)}
    rows = sum(g.n_gens for g in block_group[d - 1])
    cols = sum(g.n_gens for g in block_group[d])
    out = [[0] * cols for _ in range(rows)]
    elements = diagram.base.elements
    for s_idx, sigma in enumerate(level):
        for k in range(len(sigma)):
            tau = sigma[:k] + sigma[k + 1:]
            t_idx = index_of[tau]
            sign = -1 if k % 2 else 1
            if k == 0:
                block = diagram.map_at(elements[sigma[0]], elements[sigma[1]]).matrix
            else:
                block = IntMatrix.identity(block_group[d][s_idx].n_gens)
            _place(block, out, offsets[d - 1][t_idx], offsets[d][s_idx], sign)
    return IntMatrix.from_rows(out, cols=cols)


def _check_complex(lsc: LocalSystemComplex) -> None:
    """Composite of consecutive differentials must vanish modulo block relations."""
    for d in range(lsc.top + 1):
        out = lsc.differential(d)
        nxt = lsc.differential(d + 1) if lsc.direction == "cochain" else lsc.differential(d - 1)
        if out.cols == 0 or nxt.rows == 0 or out.rows == 0:
            continue
        comp = nxt @ out
        far = d + 2 if lsc.direction == "cochain" else d - 2
        far_orders = lsc.orders[far] if 0 <= far <= lsc.top else ()
        for j in range(comp.cols):
            col = comp.col(j)
            ok = all(v == 0 if o == 0 else v % o == 0 for v, o in zip(col, far_orders)) \
                if far_orders else all(v == 0 for v in col)
            if not ok:
                raise NotAComplex(f"differential composite nonzero at degree {d}")


def build_cochain_complex(diagram: PosetDiagram) -> LocalSystemComplex:
    return _assemble(diagram, "cochain")


def build_chain_complex(diagram: PosetDiagram) -> LocalSystemComplex:
    return _assemble(diagram, "chain")


def derived_limit(diagram: PosetDiagram, p: int, complex_: LocalSystemComplex | None = None) -> FgAbGroup:
    """lim^p as degree-p cohomology of the explicit cochain complex."""
    if p < 0:
        return FgAbGroup.zero()
    if complex_ is None:
        complex_ = build_cochain_complex(diagram)
    return complex_.group_at_degree(p)


def colim_via_homology(diagram: PosetDiagram, complex_: LocalSystemComplex | None = None) -> FgAbGroup:
    """colim as degree-zero homology of the chain complex."""
    if complex_ is None:
        complex_ = build_chain_complex(diagram)
    return complex_.group_at_degree(0)


def chain_homology(diagram: PosetDiagram, n: int) -> FgAbGroup:
    """H_n of the chain complex; recorded for n > 0, never asserted to vanish."""
    return build_chain_complex(diagram).group_at_degree(n)


# ---------------------------------------------------------------------------
# independent oracles


def lim_direct(diagram: PosetDiagram) -> FgAbGroup:
    """lim as compatible families: kernel of the difference map on the product.

    A family (g_p) is compatible iff map(p,q)(g_p) = g_q on every covering
    pair; by functoriality that forces compatibility on all comparable pairs.
    """
    base = diagram.base
    n = len(base.elements)
    if n == 0:
        return FgAbGroup.zero()
    src_offsets, total = [], 0
    for g in diagram.groups:
        src_offsets.append(total)
        total += g.n_gens
    covers = base.covers()
    tgt_offsets, tgt_total, tgt_orders = [], 0, []
    for (i, j) in covers:
        tgt_offsets.append(tgt_total)
        tgt_total += diagram.groups[j].n_gens
        tgt_orders.extend(diagram.groups[j].orders)
    out = [[0] * total for _ in range(tgt_total)]
    for k, (i, j) in enumerate(covers):
        _place(diagram.maps[(i, j)].matrix, out, tgt_offsets[k], src_offsets[i], 1)
        _place(IntMatrix.identity(diagram.groups[j].n_gens), out, tgt_offsets[k], src_offsets[j], -1)
    diff = IntMatrix.from_rows(out, cols=total)
    src_orders = tuple(o for g in diagram.groups for o in g.orders)
    families = preimage_lattice(diff, orders_columns(tgt_orders)) \
        if tgt_total else IntMatrix.identity(total)
    return subquotient(families, orders_columns(src_orders))


def colim_direct(diagram: PosetDiagram) -> FgAbGroup:
    """colim as a coequalizer: direct sum modulo g - map(p,q)(g) on covers."""
    base = diagram.base
    if len(base.elements) == 0:
        return FgAbGroup.zero()
    offsets, total = [], 0
    for g in diagram.groups:
        offsets.append(total)
        total += g.n_gens
    cols: list[list[int]] = []
    for g, off in zip(diagram.groups, offsets):
        for t, d in enumerate(g.torsion):
            col = [0] * total
            col[off + g.free_rank + t] = d
            cols.append(col)
    for (i, j) in base.covers():
        mat = diagram.maps[(i, j)].matrix
        for c in range(diagram.groups[i].n_gens):
            col = [0] * total
            col[offsets[i] + c] = 1
            for r in range(diagram.groups[j].n_gens):
                col[offsets[j] + r] -= mat.entries[r][c]
            cols.append(col)
    if total == 0:
        return FgAbGroup.zero()
    relations = IntMatrix(total, len(cols), tuple(tuple(c[i] for c in cols) for i in range(total)))
    return group_of_presentation(total, relations)


# ---------------------------------------------------------------------------
# JSON interface: {"poset": ..., "groups": {p: {"rank": r, "torsion": [...]}},
# "maps": {"p<q": [[row], ...]}} with maps on covering pairs.


def diagram_to_json(diagram: PosetDiagram) -> dict:
    base = diagram.base
    return {
        "poset": poset_to_json(base),
        "groups": {str(e): {"rank": g.free_rank, "torsion": list(g.torsion)}
                   for e, g in zip(base.elements, diagram.groups)},
        "maps": {f"{base.elements[i]}<{base.elements[j]}": matrix_to_json(diagram.maps[(i, j)].matrix)
                 for i, j in base.covers()},
    }


def diagram_from_json(data: dict) -> PosetDiagram:
    try:
        base = poset_from_json(data["poset"])
        groups = {}
        for e in base.elements:
            spec = data["groups"][str(e)]
            groups[e] = FgAbGroup(int(spec.get("rank", 0)),
                                  tuple(int(d) for d in spec.get("torsion", ())))
        maps: dict[tuple[Label, Label], IntMatrix] = {}
        for key, rows in data.get("maps", {}).items():
            a, _, b = key.partition("<")
            if not _:
                raise InputError(f"malformed map key {key!r}; expected 'p<q'")
            cols = groups[a].n_gens if a in groups else None
            maps[(a, b)] = matrix_from_json(rows, cols=cols)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed diagram JSON: {exc}") from exc
    return build_diagram(base, groups, maps)


def load_diagram(path: str) -> PosetDiagram:
    with open(path, encoding="utf-8") as fh:
        return diagram_from_json(json.load(fh))
