"""Points of the order complex of a hyperspace, embedded into function space.

A HyperPoint is a weighted strictly increasing chain of nonempty subsets of a
finite metric space of diameter <= 1.  It embeds into the space of functions
on X (optionally extended by an adjoined point at distance 1 from everything)
by x -> sum lambda_i d(x, A_i); the sup norm there is compared against the
L1, Ky Fan and Kantorovich distances of the corresponding step functions and
measures valued in the hyperspace with its Hausdorff metric.

The quantitative stability lemmas are implemented as checkers: given the
explicit delta for (n, Gamma, eps), nearby combinations must decompose into
blocks matching the reference chain up to eps.  A failed match within delta
is reported as a falsification, never silently ignored.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (BadParameters, DiameterExceeded, DomainMismatch,
                     EmptySubset, InputError, NotInHull, PointSetMismatch)
from .metrics import (FiniteMetricSpace, FiniteMeasure, StepFunction,
                      hausdorff_distance, kantorovich_distance, ky_fan_distance,
                      l1_step_distance)

Rat = Fraction
Subset = frozenset


@dataclass(frozen=True)
class HyperPoint:
    """Weighted chain A_1 c A_2 c ... of nonempty subsets, weights > 0, sum 1."""

    space: FiniteMetricSpace
    chain: tuple[frozenset, ...]
    weights: tuple[Rat, ...]

    def __post_init__(self) -> None:
        if not self.chain:
            raise InputError("hyperpoints need a nonempty chain")
        if len(self.chain) != len(self.weights):
            raise InputError("one weight per chain entry")
        for a in self.chain:
            if not a:
                raise EmptySubset("chain entries must be nonempty")
            for x in a:
                self.space.index(x)
        for a, b in zip(self.chain, self.chain[1:]):
            if not (a < b):
                raise InputError("chain entries must strictly increase by inclusion")
        if any(w <= 0 for w in self.weights):
            raise InputError("weights must be positive")
        if sum(self.weights) != 1:
            raise InputError("weights must sum to 1")

    @property
    def length(self) -> int:
        return len(self.chain)

    def gap_parameter(self) -> Rat:
        """Largest Gamma with all consecutive Hausdorff gaps and weights >= Gamma."""
        gamma = min(self.weights)
        for a, b in zip(self.chain, self.chain[1:]):
            gamma = min(gamma, hausdorff_distance(self.space, a, b))
        return gamma


def hyperpoint(space: FiniteMetricSpace, chain: Sequence[Sequence], weights: Sequence) -> HyperPoint:
    return HyperPoint(space, tuple(space.subset(a) for a in chain),
                      tuple(Fraction(w) for w in weights))


@dataclass(frozen=True)
class FunctionVector:
    """Rational function on the space's points, optionally with an adjoined
    point at distance 1 from every point of the space."""

    space: FiniteMetricSpace
    values: tuple[Rat, ...]
    adjoined: Rat | None = None

    def __post_init__(self) -> None:
        if len(self.values) != len(self.space.points):
            raise InputError("one value per point required")

    def value_at(self, p) -> Rat:
        return self.values[self.space.index(p)]


def embed_hyperpoint(space: FiniteMetricSpace, h: HyperPoint, adjoin: bool = False) -> FunctionVector:
    """F(x) = sum lambda_i d(x, A_i); with adjoin, F at the extra point is 1."""
    if space != h.space:
        raise DomainMismatch("hyperpoint lives over a different space")
    if space.diameter() > 1:
        raise DiameterExceeded("embedding requires diameter <= 1")
    values = tuple(
        sum((w * space.point_to_set(x, a) for a, w in zip(h.chain, h.weights)), Fraction(0))
        for x in space.points)
    return FunctionVector(space, values, Fraction(1) if adjoin else None)


def supnorm_distance(f: FunctionVector, g: FunctionVector) -> Rat:
    if f.space != g.space or (f.adjoined is None) != (g.adjoined is None):
        raise DomainMismatch("function vectors over different spaces")
    best = max((abs(a - b) for a, b in zip(f.values, g.values)), default=Fraction(0))
    if f.adjoined is not None:
        best = max(best, abs(f.adjoined - g.adjoined))
    return best


def recover_minimal_chain(space: FiniteMetricSpace, f: FunctionVector) -> HyperPoint:
    """Invert the embedding by peeling.

    The first subset is the zero set; its weight is the minimal ratio
    F(x)/d(x, A_1) over x outside, attained exactly on the next subset's new
    points; subtract and recurse.  Any inconsistency raises NotInHull; the
    result is re-embedded and compared exactly, so acceptance is sound.
    """
    adjoin = f.adjoined is not None
    if adjoin and f.adjoined != 1:
        raise NotInHull("adjoined value of a probability combination must be 1")
    residual = list(f.values)
    chain: list[frozenset] = []
    weights: list[Rat] = []
    spent = Fraction(0)
    prev: frozenset = frozenset()
    while True:
        if any(v < 0 for v in residual):
            raise NotInHull("peeling produced a negative residual")
        zero_set = frozenset(p for p, v in zip(space.points, residual) if v == 0)
        if not zero_set:
            raise NotInHull("residual vanishes nowhere, so no next subset exists")
        if chain and not (prev < zero_set):
            raise NotInHull("zero sets do not form a strictly increasing chain")
        if len(zero_set) == len(space.points):
            remaining = 1 - spent
            if remaining > 0:
                if not adjoin:
                    raise NotInHull(
                        "residual weight sits on the whole space; use the adjoined variant")
                chain.append(zero_set)
                weights.append(remaining)
                spent = Fraction(1)
            break
        ratios = [(residual[i] / space.point_to_set(p, zero_set), i)
                  for i, p in enumerate(space.points) if p not in zero_set]
        lam = min(r for r, _ in ratios)
        if lam <= 0:
            raise NotInHull("peeling produced a nonpositive weight")
        chain.append(zero_set)
        weights.append(lam)
        spent += lam
        if spent > 1:
            raise NotInHull("peeled weights exceed 1")
        for i, p in enumerate(space.points):
            if p not in zero_set:
                residual[i] -= lam * space.point_to_set(p, zero_set)
        prev = zero_set
        if spent == 1:
            if any(v != 0 for v in residual):
                raise NotInHull("residual remains after spending all weight")
            break
    if spent != 1:
        raise NotInHull("weights do not sum to 1")
    out = HyperPoint(space, tuple(chain), tuple(weights))
    if embed_hyperpoint(space, out, adjoin=adjoin).values != f.values:
        raise NotInHull("vector is not an exact combination of embedded subsets")
    return out


# ---------------------------------------------------------------------------
# quantitative stability


def phi_exponent(n: int) -> int:
    """phi(0) = 1, phi(n) = 4 phi(n-1) + 1."""
    if n < 0:
        raise BadParameters("n must be nonnegative")
    value = 1
    for _ in range(n):
        value = 4 * value + 1
    return value


def stability_constants(n: int, gamma: Rat, eps: Rat) -> tuple[Rat, Rat]:
    """The explicit deltas of the two stability lemmas, after clamping eps.

    Returns (delta_strict, delta_block): (eps/2)^(2n) for the equal-length
    conclusion and (eps/6)^(4 phi(n)) for the block-decomposition conclusion.
    """
    gamma = Fraction(gamma)
    eps = Fraction(eps)
    if n < 0 or not 0 < gamma <= 1 or eps <= 0:
        raise BadParameters("need n >= 0, 0 < Gamma <= 1, eps > 0")
    eps = min(eps, Fraction(1), gamma)
    return (eps / 2) ** (2 * n), (eps / 6) ** (4 * phi_exponent(n))


def clamp_eps(eps: Rat, gamma: Rat) -> Rat:
    return min(Fraction(eps), Fraction(1), Fraction(gamma))


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of matching y's chain against x's within tolerance eps."""

    n: int
    m: int
    gamma: Rat
    eps: Rat
    delta: Rat
    supnorm: Rat
    applicable: bool           # supnorm <= delta, so the lemma must apply
    blocks: tuple[tuple[int, int], ...] | None   # (k_i, l_i) per entry of x
    found: bool

    @property
    def violation(self) -> bool:
        return self.applicable and not self.found


def _block_decomposition(space: FiniteMetricSpace, x: HyperPoint, y: HyperPoint,
                         eps: Rat) -> tuple[tuple[int, int], ...] | None:
    """Search indices 0 = l_0 <= k_1 <= l_1 <= ... <= l_n <= k_{n+1} = m with
    d(A_i, B_j) <= eps on matched blocks (k_i, l_i], weight sums within eps of
    lambda_i, and stray weight <= eps between blocks."""
    n, m = x.length, y.length
    mu = y.weights

    def stray(lo: int, hi: int) -> Rat:
        return sum(mu[lo:hi], Fraction(0))

    close = [[hausdorff_distance(space, x.chain[i], y.chain[j]) <= eps
              for j in range(m)] for i in range(n)]

    def search(i: int, l_prev: int) -> list[tuple[int, int]] | None:
        if i == n:
            return [] if stray(l_prev, m) <= eps else None
        for k in range(l_prev, m + 1):
            if stray(l_prev, k) > eps:
                break
            for l in range(k, m + 1):
                if any(not close[i][j] for j in range(k, l)):
                    break
                if abs(x.weights[i] - stray(k, l)) <= eps:
                    rest = search(i + 1, l)
                    if rest is not None:
                        return [(k, l)] + rest
        return None

    result = search(0, 0)
    return tuple(result) if result is not None else None


def stability_check(space: FiniteMetricSpace, x: HyperPoint, y: HyperPoint,
                    eps: Rat) -> StabilityReport:
    """Block-decomposition checker (adjoined-point embedding).

    Uses x's parameters (n, Gamma) and the explicit block delta; if the
    embeddings are within delta, a decomposition must exist, and its absence
    is reported as a violation.
    """
    eps = Fraction(eps)
    gamma = x.gap_parameter()
    eps_c = clamp_eps(eps, gamma)
    _, delta = stability_constants(x.length, gamma, eps_c)
    dist = supnorm_distance(embed_hyperpoint(space, x, adjoin=True),
                            embed_hyperpoint(space, y, adjoin=True))
    blocks = _block_decomposition(space, x, y, eps_c)
    return StabilityReport(x.length, y.length, gamma, eps_c, delta, dist,
                           dist <= delta, blocks, blocks is not None)


@dataclass(frozen=True)
class StrictStabilityReport:
    n: int
    m: int
    gamma: Rat
    eps: Rat
    delta: Rat
    supnorm: Rat
    applicable: bool
    found: bool

    @property
    def violation(self) -> bool:
        return self.applicable and not self.found


def estimates_check(space: FiniteMetricSpace, x: HyperPoint, y: HyperPoint,
                    eps: Rat) -> StrictStabilityReport:
    """Equal-length checker: both chains must satisfy the gap/weight bound
    Gamma; within (eps/2)^(2n) the chains match entrywise up to eps."""
    eps = Fraction(eps)
    gamma = min(x.gap_parameter(), y.gap_parameter())
    eps_c = clamp_eps(eps, gamma)
    delta, _ = stability_constants(x.length, gamma, eps_c)
    dist = supnorm_distance(embed_hyperpoint(space, x, adjoin=True),
                            embed_hyperpoint(space, y, adjoin=True))
    ok = x.length == y.length and all(
        hausdorff_distance(space, a, b) <= eps_c and abs(lw - mw) <= eps_c
        for a, b, lw, mw in zip(x.chain, y.chain, x.weights, y.weights))
    return StrictStabilityReport(x.length, y.length, gamma, eps_c, delta, dist,
                                 dist <= delta, ok)


# ---------------------------------------------------------------------------
# remetrization transport


def remetrize_transport(space: FiniteMetricSpace, new_space: FiniteMetricSpace,
                        h: HyperPoint) -> HyperPoint:
    """Re-read the same chain and weights under a new metric on the same points."""
    if set(space.points) != set(new_space.points):
        raise PointSetMismatch("the two metrics must share the point set")
    if h.space != space:
        raise DomainMismatch("hyperpoint lives over a different space")
    return HyperPoint(new_space, h.chain, h.weights)


def transport_modulus(space: FiniteMetricSpace, new_space: FiniteMetricSpace,
                      n: int, gamma: Rat, eps: Rat) -> tuple[Rat, Rat, Rat]:
    """(delta, alpha, beta) making the transported map vary by at most eps.

    beta = eps/(3n+1); alpha is a modulus for vertex re-embedding between the
    two metrics (exact on a finite space); delta is the block-lemma constant
    for (n, Gamma, alpha).
    """
    if set(space.points) != set(new_space.points):
        raise PointSetMismatch("the two metrics must share the point set")
    eps = Fraction(eps)
    if eps <= 0 or n < 1:
        raise BadParameters("need eps > 0 and a nonempty chain")
    if len(space.points) > 8:
        raise BadParameters("modulus enumeration supports at most 8 points")
    beta = eps / (3 * n + 1)
    alpha = beta
    points = list(space.points)
    subsets = [frozenset(c) for r in range(1, len(points) + 1)
               for c in itertools.combinations(points, r)]
    for a in subsets:
        for b in subsets:
            if a != b and hausdorff_distance(new_space, a, b) > beta:
                alpha = min(alpha, hausdorff_distance(space, a, b))
    if alpha <= 0:
        raise BadParameters("degenerate modulus")
    alpha_c = clamp_eps(alpha, gamma)
    _, delta = stability_constants(n, gamma, alpha_c)
    return delta, alpha_c, beta


@dataclass(frozen=True)
class ContinuityReport:
    eps: Rat
    delta: Rat
    rows: tuple[tuple[Rat, Rat, bool], ...]   # (dist before, dist after, within budget)

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.rows)


def sequential_continuity_check(space: FiniteMetricSpace, new_space: FiniteMetricSpace,
                                h: HyperPoint, others: Sequence[HyperPoint],
                                eps: Rat) -> ContinuityReport:
    """Check the transported map moves delta-close points by at most eps."""
    eps = Fraction(eps)
    gamma = h.gap_parameter()
    delta, _, _ = transport_modulus(space, new_space, h.length, gamma, eps)
    fx = embed_hyperpoint(space, h, adjoin=True)
    tx = embed_hyperpoint(new_space, remetrize_transport(space, new_space, h), adjoin=True)
    rows = []
    for y in others:
        before = supnorm_distance(fx, embed_hyperpoint(space, y, adjoin=True))
        after = supnorm_distance(
            tx, embed_hyperpoint(new_space, remetrize_transport(space, new_space, y), adjoin=True))
        ok = before > delta or after <= eps
        rows.append((before, after, ok))
    return ContinuityReport(eps, delta, tuple(rows))


# ---------------------------------------------------------------------------
# four-metric comparison


def hyper_metric_space(space: FiniteMetricSpace,
                       subsets: Sequence[frozenset]) -> FiniteMetricSpace:
    """Finite metric space whose points are the given subsets with Hausdorff
    distances; subset labels are sorted tuples of point labels."""
    uniq = sorted({frozenset(s) for s in subsets}, key=lambda s: tuple(sorted(s)))
    labels = [tuple(sorted(s)) for s in uniq]
    dist = [[hausdorff_distance(space, a, b) if a != b else Fraction(0)
             for b in uniq] for a in uniq]
    return FiniteMetricSpace(tuple(labels), tuple(tuple(row) for row in dist))


@dataclass(frozen=True)
class MetricComparison:
    supnorm: Rat
    l1: Rat
    kyfan: Rat
    kantorovich: Rat
    n: int
    gamma: Rat


def phi_comparison(space: FiniteMetricSpace, x: HyperPoint, y: HyperPoint,
                   eps: Rat | None = None) -> MetricComparison:
    """All four distances between the two hyperpoint representations.

    Always asserts the proven inequalities supnorm <= l1 and kantorovich <= l1;
    with eps given, additionally asserts the forward Ky Fan bound
    D <= ((4n+1)(n+1)+1) eps whenever supnorm <= delta(eps, n, Gamma).
    """
    if x.space != space or y.space != space:
        raise DomainMismatch("hyperpoints over a different space")
    sup = supnorm_distance(embed_hyperpoint(space, x, adjoin=True),
                           embed_hyperpoint(space, y, adjoin=True))
    hspace = hyper_metric_space(space, list(x.chain) + list(y.chain))
    fx = _step_of_hyperpoint(hspace, x)
    fy = _step_of_hyperpoint(hspace, y)
    l1 = l1_step_distance(fx, fy)
    kf = ky_fan_distance(fx, fy)
    rho = kantorovich_distance(hspace, _measure_of_hyperpoint(x), _measure_of_hyperpoint(y))
    n = x.length
    gamma = x.gap_parameter()
    if sup > l1:
        raise AssertionError("sup-norm exceeded the L1 distance, falsifying the reverse bound")
    if rho > l1:
        raise AssertionError("Kantorovich exceeded the L1 distance")
    if eps is not None:
        eps_c = clamp_eps(Fraction(eps), gamma)
        _, delta = stability_constants(n, gamma, eps_c)
        if sup <= delta and kf > ((4 * n + 1) * (n + 1) + 1) * eps_c:
            raise AssertionError("forward Ky Fan bound failed within delta")
    return MetricComparison(sup, l1, kf, rho, n, gamma)


def _step_of_hyperpoint(hspace: FiniteMetricSpace, h: HyperPoint) -> StepFunction:
    breakpoints = [Fraction(0)]
    for w in h.weights:
        breakpoints.append(breakpoints[-1] + w)
    values = tuple(tuple(sorted(a)) for a in h.chain)
    return StepFunction(hspace, tuple(breakpoints), values)


def _measure_of_hyperpoint(h: HyperPoint) -> FiniteMeasure:
    return FiniteMeasure(tuple((tuple(sorted(a)), w) for a, w in zip(h.chain, h.weights)))


# ---------------------------------------------------------------------------
# JSON: {"chain": [["x","y"], ["x","y","z"]], "weights": ["1/3","2/3"]}


def hyperpoint_to_json(h: HyperPoint) -> dict:
    return {"chain": [sorted(a) for a in h.chain], "weights": [str(w) for w in h.weights]}


def hyperpoint_from_json(space: FiniteMetricSpace, data: dict) -> HyperPoint:
    try:
        return hyperpoint(space, [list(a) for a in data["chain"]], list(data["weights"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed hyperpoint JSON: {exc}") from exc


def load_hyperpoint(space: FiniteMetricSpace, path: str) -> HyperPoint:
    with open(path, encoding="utf-8") as fh:
        return hyperpoint_from_json(space, json.load(fh))
