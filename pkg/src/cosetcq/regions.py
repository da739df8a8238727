"""Achievable rate regions: coset-code inner bound, point-to-point window,
message splitting, and the unstructured baseline."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    CqChannel,
    InputDistribution,
    SplitInputDistribution,
    binary_input_distribution,
    classical_conditional_entropy,
    classical_quantum_mi,
    cq_mutual_information,
    example1_channel,
    example2_channel,
    example2_mix,
    sigma1,
    sigma2,
    split_sigma1,
    split_sigma_receiver,
)
from .errors import BudgetExceededError, ConsistencyError
from .linalg import von_neumann_entropy

__all__ = [
    "hb",
    "conv",
    "shannon",
    "RatePoint",
    "Constraint",
    "RegionSpec",
    "NccRateParams",
    "Theorem2Bounds",
    "SeparationReport",
    "GridSearchResult",
    "theorem1_region",
    "theorem2_bounds",
    "theorem3_region",
    "usb_region",
    "example_separation_witness",
    "grid_search",
    "simplex_grid",
]


def hb(x: float) -> float:
    """Binary entropy in bits; domain [0, 1] with hb(0) = hb(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def conv(a: float, b: float) -> float:
    """Binary convolution a*b = a(1-b) + b(1-a)."""
    for name, val in (("a", a), ("b", b)):
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"convolution argument {name} must lie in [0, 1], got {val}")
    return a * (1.0 - b) + b * (1.0 - a)


def shannon(pmf) -> float:
    """Shannon entropy in bits of a finite pmf."""
    p = np.asarray(pmf, dtype=float)
    if p.min() < -1e-12 or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("not a probability vector")
    p = p[p > 0.0]
    return float(-(p @ np.log2(p)))


@dataclass(frozen=True)
class RatePoint:
    """A rate triple with per-sender cost budgets."""

    r1: float
    r2: float
    r3: float
    tau1: float = np.inf
    tau2: float = np.inf
    tau3: float = np.inf

    def __post_init__(self) -> None:
        if min(self.r1, self.r2, self.r3) < 0:
            raise ValueError("rates must be nonnegative")

    @property
    def rates(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3])

    @property
    def taus(self) -> np.ndarray:
        return np.array([self.tau1, self.tau2, self.tau3])


@dataclass(frozen=True)
class Constraint:
    """A half-space coeffs . (r1, r2, r3) <= rhs.

    ``clamped`` records that a negative right-hand side was raised to zero.
    """

    name: str
    coeffs: tuple
    rhs: float
    clamped: bool = False


def _make_constraint(name: str, coeffs: tuple, rhs: float) -> Constraint:
    if rhs < 0.0:
        return Constraint(name, coeffs, 0.0, clamped=True)
    return Constraint(name, coeffs, float(rhs))


@dataclass(frozen=True)
class RegionSpec:
    """A rate region cut out by linear constraints plus cost expectations.

    ``cost_expectations[j]`` is E[cost_{j+1}(X_{j+1})] under the generating
    input distribution; a point belongs to the region when its rate triple
    satisfies every constraint and its budgets cover those expectations.
    """

    constraints: tuple
    cost_expectations: tuple

    def contains(self, point: RatePoint, tol: float = 1e-9) -> bool:
        r = point.rates
        for c in self.constraints:
            if float(np.dot(c.coeffs, r)) > c.rhs + tol:
                return False
        for cost, budget in zip(self.cost_expectations, point.taus):
            if cost > budget + tol:
                return False
        return True

    def constraint(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(f"no constraint named {name!r}")

    def corner_points(self, tol: float = 1e-9) -> np.ndarray:
        """Vertices of the polytope (rates only), one per row.

        Enumerates intersections of constraint-plane triples, including the
        nonnegativity facets, and keeps the feasible ones.
        """
        planes = [(np.asarray(c.coeffs, dtype=float), c.rhs) for c in self.constraints]
        for i in range(3):
            e = np.zeros(3)
            e[i] = -1.0
            planes.append((e, 0.0))
        corners = []
        for trio in itertools.combinations(range(len(planes)), 3):
            a = np.stack([planes[i][0] for i in trio])
            b = np.array([planes[i][1] for i in trio])
            if abs(np.linalg.det(a)) < 1e-12:
                continue
            v = np.linalg.solve(a, b)
            if v.min() < -tol:
                continue
            if any(float(np.dot(c.coeffs, v)) > c.rhs + tol for c in self.constraints):
                continue
            corners.append(np.clip(v, 0.0, None))
        if not corners:
            return np.zeros((1, 3))
        uniq = np.unique(np.round(np.array(corners), 9), axis=0)
        return uniq

    def max_weighted_sum(self, weights) -> tuple:
        """Maximum of weights . r over the region and the attaining corner."""
        w = np.asarray(weights, dtype=float)
        corners = self.corner_points()
        values = corners @ w
        best = int(np.argmax(values))
        return float(values[best]), corners[best]


def theorem1_region(channel: CqChannel, dist: InputDistribution) -> RegionSpec:
    """Coset-code inner bound for a 3-to-1 channel at one input pmf.

    Seven rate constraints: one private line for sender 1, and per j in
    {2, 3} a direct line, a coset-density line, and a sum line covering the
    interference decoded at receiver 1.  Negative right-hand sides (possible
    when the coset-density penalty exceeds the mutual information) are
    clamped to zero and tagged.
    """
    s1 = sigma1(channel, dist)
    s2 = sigma2(channel, dist)
    i_x1_given_u = cq_mutual_information(s1, ("x1",), ("u",))
    i_u_given_x1 = cq_mutual_information(s1, ("u",), ("x1",))
    i_x1u = cq_mutual_information(s1, ("x1", "u"))
    h_u = shannon(dist.p_u())
    min_hv = min(shannon(dist.p_v2), shannon(dist.p_v3))
    direct = {}
    for j, reg in ((2, "v2"), (3, "v3")):
        reduced = s2.reduce_quantum([j - 1])
        direct[j] = cq_mutual_information(reduced, (reg,))
    coset_rhs = min_hv - h_u + i_u_given_x1
    sum_rhs = min_hv - h_u + i_x1u
    constraints = (
        _make_constraint("r1", (1, 0, 0), i_x1_given_u),
        _make_constraint("r2", (0, 1, 0), direct[2]),
        _make_constraint("r3", (0, 0, 1), direct[3]),
        _make_constraint("r2_coset", (0, 1, 0), coset_rhs),
        _make_constraint("r3_coset", (0, 0, 1), coset_rhs),
        _make_constraint("r1_plus_r2", (1, 1, 0), sum_rhs),
        _make_constraint("r1_plus_r3", (1, 0, 1), sum_rhs),
    )
    return RegionSpec(constraints, tuple(dist.cost_expectations(channel)))


@dataclass(frozen=True)
class NccRateParams:
    """Blocklength-normalized parameters of a nested coset code."""

    q: int
    n: int
    k: int
    l: int
    p_v: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 0 or self.l < 0:
            raise ValueError(f"invalid dimensions n={self.n} k={self.k} l={self.l}")
        if self.k > self.n:
            raise ValueError(f"inner rows k={self.k} exceed blocklength n={self.n}")
        p = np.asarray(self.p_v, dtype=float)
        if p.shape != (self.q,) or p.min() < 0 or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("p_v must be a probability vector of length q")
        object.__setattr__(self, "p_v", p)


@dataclass(frozen=True)
class Theorem2Bounds:
    """Point-to-point coset-code thresholds at fixed (q, n, k, l, p_V)."""

    h_v: float
    holevo: float
    log_q: float
    inner_density_ok: bool
    total_rate_ok: bool
    message_rate: float


def theorem2_bounds(params: NccRateParams, states) -> Theorem2Bounds:
    """Evaluate the two coset-code thresholds for a point-to-point channel.

    ``states[v]`` is the channel output for letter v.  The inner-density
    condition asks (k/n) log q > log q - H(V); the total-rate condition asks
    ((k+l)/n) log q < log q - H(V) + Holevo.  When both hold the message
    rate (l/n) log q sits below the Holevo information; this is verified and
    a ConsistencyError raised otherwise.
    """
    mats = [np.asarray(getattr(s, "matrix", s), dtype=complex) for s in states]
    if len(mats) != params.q:
        raise ValueError(f"expected {params.q} channel states, got {len(mats)}")
    h_v = shannon(params.p_v)
    avg = sum(p * m for p, m in zip(params.p_v, mats))
    holevo = von_neumann_entropy(avg) - sum(
        p * von_neumann_entropy(m) for p, m in zip(params.p_v, mats) if p > 0.0
    )
    log_q = float(np.log2(params.q))
    inner_ok = (params.k / params.n) * log_q > log_q - h_v
    total_ok = ((params.k + params.l) / params.n) * log_q < log_q - h_v + holevo
    message_rate = (params.l / params.n) * log_q
    if inner_ok and total_ok and message_rate >= holevo + 1e-9:
        raise ConsistencyError(
            f"message rate {message_rate} exceeds Holevo information {holevo} "
            "although both thresholds hold"
        )
    return Theorem2Bounds(h_v, float(holevo), log_q, inner_ok, total_ok, message_rate)


def theorem3_region(channel: CqChannel, dist: SplitInputDistribution) -> RegionSpec:
    """Message-splitting inner bound with structured letters u2, u3.

    Receiver 1 decodes w = u2 + u3 alongside its own message; choosing
    degenerate u_j (w empty) recovers the unstructured baseline.
    """
    s1 = split_sigma1(channel, dist)
    h_w_given_y1 = classical_conditional_entropy(s1, ("w",))
    i_x1_wy1 = classical_quantum_mi(s1, ("x1",), ("w",))
    h_u = {j: shannon(dist.p_uj(j)) for j in (2, 3)}
    direct = {}
    cond = {}
    for j in (2, 3):
        sj = split_sigma_receiver(channel, dist, j)
        direct[j] = cq_mutual_information(sj, ("u", "x"))
        cond[j] = cq_mutual_information(sj, ("x",), ("u",))
    r1_rhs = (
        min(0.0, h_u[2] - h_w_given_y1, h_u[3] - h_w_given_y1) + i_x1_wy1
    )
    constraints = (
        _make_constraint("r1", (1, 0, 0), r1_rhs),
        _make_constraint("r2", (0, 1, 0), direct[2]),
        _make_constraint("r3", (0, 0, 1), direct[3]),
        _make_constraint(
            "r1_plus_r2", (1, 1, 0), cond[2] + i_x1_wy1 + h_u[2] - h_w_given_y1
        ),
        _make_constraint(
            "r1_plus_r3", (1, 0, 1), cond[3] + i_x1_wy1 + h_u[3] - h_w_given_y1
        ),
    )
    return RegionSpec(constraints, tuple(dist.cost_expectations(channel)))


def usb_region(channel: CqChannel, p_x1, p_x2, p_x3) -> RegionSpec:
    """Unstructured baseline region from per-receiver Holevo informations.

    Computed directly from output marginal mixtures, independently of the
    block-diagonal state machinery, so it can serve as a cross-check for
    the message-splitting region with degenerate structured letters.
    """
    pmfs = [np.asarray(p, float) for p in (p_x1, p_x2, p_x3)]
    for j, p in enumerate(pmfs):
        if p.shape != (channel.input_sizes[j],) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"bad input pmf for sender {j + 1}")
    # Receiver 1 sees x1 against the product background of the other senders.
    dim1 = channel.output_dims[0]
    rho1 = {}
    for x1 in range(channel.input_sizes[0]):
        acc = np.zeros((dim1, dim1), dtype=complex)
        for x2 in range(channel.input_sizes[1]):
            for x3 in range(channel.input_sizes[2]):
                acc += pmfs[1][x2] * pmfs[2][x3] * channel.output_marginal(
                    (x1, x2, x3), 0
                )
        rho1[x1] = acc
    info = np.zeros(3)
    avg1 = sum(pmfs[0][x] * rho1[x] for x in rho1)
    info[0] = von_neumann_entropy(avg1) - sum(
        pmfs[0][x] * von_neumann_entropy(rho1[x]) for x in rho1 if pmfs[0][x] > 0
    )
    for j in (1, 2):
        probe = [0, 0, 0]
        states = []
        for x in range(channel.input_sizes[j]):
            probe[j] = x
            states.append(channel.output_marginal(tuple(probe), j))
        avg = sum(p * s for p, s in zip(pmfs[j], states))
        info[j] = von_neumann_entropy(avg) - sum(
            p * von_neumann_entropy(s) for p, s in zip(pmfs[j], states) if p > 0
        )
    constraints = (
        _make_constraint("r1", (1, 0, 0), info[0]),
        _make_constraint("r2", (0, 1, 0), info[1]),
        _make_constraint("r3", (0, 0, 1), info[2]),
        _make_constraint("r1_plus_r2", (1, 1, 0), info[0] + info[1]),
        _make_constraint("r1_plus_r3", (1, 0, 1), info[0] + info[2]),
    )
    costs = (
        float(pmfs[0] @ channel.costs[0]),
        float(pmfs[1] @ channel.costs[1]),
        float(pmfs[2] @ channel.costs[2]),
    )
    return RegionSpec(constraints, costs)


@dataclass(frozen=True)
class SeparationReport:
    """Outcome of the structured-vs-unstructured comparison on one example."""

    example: int
    delta1: float
    delta: float
    tau: float
    ncc_point: RatePoint
    ncc_point_in_theorem1: bool
    unstructured_lhs: float
    unstructured_rhs: float
    structured_feasible: bool
    separation: bool

    @property
    def margin(self) -> float:
        return self.unstructured_lhs - self.unstructured_rhs


def example_separation_witness(
    example: int, delta1: float, delta: float, tau: float = None
) -> SeparationReport:
    """Evaluate the separation witness on one of the two worked channels.

    The candidate point packs the point-to-point capacities of the three
    links at input bias ``tau`` for sender 1 (default: the bias solving
    conv(tau, delta1) = delta, so receiver 1 can strip the interference).
    Separation holds when that point satisfies every structured-region
    constraint while its sum rate exceeds the unstructured bound
    I(X1;Y1) + I(X2;Y2) + I(X3;Y3) evaluated at the capacity-achieving pmfs,
    i.e. when cap1 + 2 capj > I(X1;Y1 | interference random).
    """
    if example not in (1, 2):
        raise ValueError(f"example must be 1 or 2, got {example}")
    if tau is None:
        tau = (delta - delta1) / (1.0 - 2.0 * delta1)
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if example == 1:
        channel = example1_channel(delta1, delta)
        cap1 = hb(conv(tau, delta1)) - hb(delta1)
        capj = 1.0 - hb(delta)
        rhs = 1.0 - hb(delta1)
    else:
        channel = example2_channel(delta1, delta)
        s = lambda p: von_neumann_entropy(example2_mix(p))
        cap1 = s(conv(tau, delta1)) - s(delta1)
        capj = s(0.5) - s(delta)
        rhs = s(0.5) - s(delta1)
    lhs = cap1 + 2.0 * capj
    # The aggregate decode at receiver 1 needs conv(tau, delta1) <= delta;
    # the canonical tau saturates this, so compare with a small slack.
    structured_ok = conv(tau, delta1) <= delta + 1e-9 and delta < 0.5
    point = RatePoint(max(cap1, 0.0), capj, capj, tau, 0.0, 0.0)
    region = theorem1_region(channel, binary_input_distribution(tau))
    in_region = region.contains(point, tol=1e-9)
    return SeparationReport(
        example=example,
        delta1=delta1,
        delta=delta,
        tau=tau,
        ncc_point=point,
        ncc_point_in_theorem1=in_region,
        unstructured_lhs=lhs,
        unstructured_rhs=rhs,
        structured_feasible=structured_ok,
        separation=bool(lhs > rhs and structured_ok and in_region),
    )


def simplex_grid(atoms: int, resolution: int):
    """Yield pmfs over ``atoms`` letters with entries on a 1/(resolution-1) grid."""
    if resolution < 2:
        raise ValueError(f"resolution must be at least 2, got {resolution}")
    steps = resolution - 1
    for combo in itertools.combinations_with_replacement(range(atoms), steps):
        counts = np.bincount(np.array(combo, dtype=int), minlength=atoms)
        yield counts / steps


@dataclass(frozen=True)
class GridSearchResult:
    best_value: float
    best_corner: np.ndarray
    best_dist: InputDistribution
    evaluations: int


def grid_search(
    channel: CqChannel,
    objective,
    resolution: int,
    q: int = 2,
    budget: int = 10**7,
) -> GridSearchResult:
    """Exhaustive scan of factored input pmfs maximizing a weighted sum rate.

    Scans product distributions p(x1) p(v2, x2) p(v3, x3) on a simplex grid,
    evaluates the coset-code region at each, and maximizes
    ``objective . corner`` over region corners.

    Raises
    ------
    BudgetExceededError
        If the grid holds more than ``budget`` region evaluations.
    """
    w = np.asarray(objective, dtype=float)
    if w.shape != (3,):
        raise ValueError("objective must be a weight triple")
    n_x1, n_x2, n_x3 = channel.input_sizes

    def count(atoms):
        steps = resolution - 1
        from math import comb

        return comb(steps + atoms - 1, atoms - 1)

    total = count(n_x1) * count(q * n_x2) * count(q * n_x3)
    if total > budget:
        raise BudgetExceededError(
            f"grid search would evaluate {total} regions, budget is {budget}"
        )
    best = None
    evals = 0
    for p_x1 in simplex_grid(n_x1, resolution):
        for p22 in simplex_grid(q * n_x2, resolution):
            for p33 in simplex_grid(q * n_x3, resolution):
                dist = InputDistribution(
                    q=q,
                    p_x1=p_x1,
                    p_v2x2=p22.reshape(q, n_x2),
                    p_v3x3=p33.reshape(q, n_x3),
                )
                region = theorem1_region(channel, dist)
                value, corner = region.max_weighted_sum(w)
                evals += 1
                if best is None or value > best[0]:
                    best = (value, corner, dist)
    return GridSearchResult(best[0], best[1], best[2], evals)
