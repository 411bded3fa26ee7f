"""State-pair set construction, FRS/BRS extraction and complexity prediction.

The pipeline propagates the state domain through the closed-loop RNN once,
producing for every step t a set of pairs (x_1, x_t) in R^(2n) that share the
factors generated by the same initial state.  Forward and backward reachable
sets are then single generalized intersections with the initial or target
set, so one pass over the horizon serves every query.

A relaxation plan caps the number of binary generators: unstable ReLU units
are ranked by the triangle-area score -alpha*beta/2 across all layers and
steps, the top ``binary_limit`` keep their exact encoding and the rest are
replaced by their convex triangle, trading tightness for complexity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import BoundsTable, count_unstable, propagate_intervals
from .errors import EmptyDomainError
from .model import ClosedLoopRnn
from .relu import NeuronInterval, ReluLabel, relu_layer_graph
from .sets import ComplexityRecord, HybridZonotope


@dataclass(frozen=True)
class PlanEntry:
    """One unstable ReLU unit: location, bounds, score and chosen encoding."""

    t: int
    layer: int
    neuron: int
    alpha: float
    beta: float
    score: float
    label: ReluLabel


@dataclass(frozen=True)
class RelaxationPlan:
    """Ranked unstable units with the top ``binary_limit`` labeled exact."""

    entries: tuple[PlanEntry, ...]
    binary_limit: int

    def label_map(self) -> dict:
        return {(e.t, e.layer, e.neuron): e.label for e in self.entries}

    @property
    def all_exact(self) -> bool:
        return all(e.label is ReluLabel.EXACT for e in self.entries)

    def unstable_through(self, t: int) -> int:
        """Unstable units contributing to the step-t pair set (stages 1..t-1)."""
        return sum(1 for e in self.entries if e.t <= t - 1)

    def exact_through(self, t: int) -> int:
        return sum(1 for e in self.entries
                   if e.t <= t - 1 and e.label is ReluLabel.EXACT)

    def to_json_list(self) -> list:
        return [{"t": e.t, "layer": e.layer, "neuron": e.neuron,
                 "alpha": e.alpha, "beta": e.beta, "score": e.score,
                 "label": e.label.name.lower()} for e in self.entries]


def rank_unstable(tbl: BoundsTable, n_b: int) -> RelaxationPlan:
    """Rank unstable units by descending triangle-area score.

    The score of an unstable unit with bounds [alpha, beta] is
    -alpha*beta/2, the area of its relaxation triangle.  Ties break by
    ascending (step, layer, neuron).  The top ``n_b`` units are labeled
    exact, all remaining unstable units relaxed; stable units never enter
    the plan (they add no binaries either way).
    """
    if n_b < 0:
        raise ValueError("binary limit must be nonnegative")
    raw = []
    for (t, layer, i) in tbl.unstable_index():
        iv = tbl.interval_for(t, layer)
        alpha, beta = float(iv.lower[i]), float(iv.upper[i])
        raw.append((t, layer, i, alpha, beta, -alpha * beta / 2.0))
    raw.sort(key=lambda r: (-r[5], r[0], r[1], r[2]))
    entries = tuple(
        PlanEntry(t, layer, i, alpha, beta, score,
                  ReluLabel.EXACT if rank < n_b else ReluLabel.RELAXED)
        for rank, (t, layer, i, alpha, beta, score) in enumerate(raw))
    return RelaxationPlan(entries, n_b)


def exact_plan(tbl: BoundsTable) -> RelaxationPlan:
    """Plan with every unstable unit encoded exactly (no binary cap)."""
    return rank_unstable(tbl, len(tbl.unstable_index()))


@dataclass(frozen=True)
class StatePairSet:
    """Pairs (x_1, x_t) in R^(2n): initial-state block then step-t block."""

    t: int
    hz: HybridZonotope
    complexity: ComplexityRecord


@dataclass(frozen=True)
class ReachSeries:
    """Per-step pair sets plus everything needed to extract FRSs and BRSs."""

    model: ClosedLoopRnn
    domain: HybridZonotope
    pairs: dict
    plan: RelaxationPlan
    table: BoundsTable
    hull_mode: str

    @property
    def horizon(self) -> int:
        return max(self.pairs)

    def pair_set(self, t: int) -> StatePairSet:
        if t not in self.pairs:
            raise IndexError(f"step {t} outside series range 2..{self.horizon}")
        return self.pairs[t]

    def to_json_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "hull_mode": self.hull_mode,
            "binary_limit": self.plan.binary_limit,
            "plan": self.plan.to_json_list(),
            "pairs": {str(t): {"set": p.hz.to_json_dict(),
                               "complexity": list(p.complexity.astuple())}
                      for t, p in sorted(self.pairs.items())},
        }


def _stage(Z: HybridZonotope, t: int, layer: int, plan_labels: dict,
           table: BoundsTable, hull_mode: str):
    """Intervals and labels for one ReLU stage of the pipeline."""
    if hull_mode == "table":
        iv = table.interval_for(t, layer)
    elif hull_mode == "relaxed":
        iv = Z.interval_hull("generator_relaxed")
    elif hull_mode == "exact":
        iv = Z.interval_hull("exact")
    else:
        raise ValueError(f"unknown hull mode: {hull_mode!r}")
    ivs = [NeuronInterval(lo, hi) for lo, hi in zip(iv.lower, iv.upper)]
    labels = [plan_labels.get((t, layer, i), ReluLabel.EXACT) for i in range(iv.dim)]
    return ivs, labels


def state_pairs(m: ClosedLoopRnn, X: HybridZonotope, T: int,
                plan: RelaxationPlan, hull_mode: str = "table",
                table: BoundsTable | None = None) -> ReachSeries:
    """Propagate the domain once, collecting the pair set of every step.

    Step 1 maps the domain through each layer directly (all initial hidden
    states are zero); later steps couple h_{t-1}^(l) with h_t^(l-1) through a
    constrained product before the layer's linear map.  ReLU stages use the
    plan's labels with intervals from the bounds table (``hull_mode="table"``,
    the default) or from per-set interval hulls ("relaxed"/"exact").  Every
    constrained product's prefix condition is asserted, not assumed.

    Raises:
        EmptyDomainError: if X is empty.
    """
    if T < 2:
        raise ValueError("horizon must be at least 2")
    if X.dim != m.state_dim:
        raise ValueError("domain dimension must equal the model state dimension")
    if X.is_empty():
        raise EmptyDomainError("state domain is empty")
    if table is None:
        table = propagate_intervals(m, X.interval_hull("generator_relaxed"), T)
    labels = plan.label_map()
    n = m.state_dim
    pairs: dict = {}
    prev_hidden: list[HybridZonotope] = []
    state_set = X
    for t in range(1, T):
        new_hidden = []
        inp = state_set
        for layer_no, layer in enumerate(m.layers, start=1):
            if t == 1:
                Z = inp.affine_map(layer.Wx, layer.vh)
            else:
                pair = prev_hidden[layer_no - 1].constrained_product(inp)
                Z = pair.affine_map(np.hstack([layer.Wh, layer.Wx]), layer.vh)
            ivs, labs = _stage(Z, t, layer_no, labels, table, hull_mode)
            _, out = relu_layer_graph(Z, ivs, labs)
            new_hidden.append(out)
            inp = out
        Zy = inp.affine_map(m.Wy, m.vy)
        ivs, labs = _stage(Zy, t, table.output_layer, labels, table, hull_mode)
        _, state_set = relu_layer_graph(Zy, ivs, labs)
        pair_hz = X.constrained_product(state_set)
        pairs[t + 1] = StatePairSet(t + 1, pair_hz, pair_hz.complexity)
        prev_hidden = new_hidden
    return ReachSeries(m, X, pairs, plan, table, hull_mode)


def _selector(n: int, block: int) -> np.ndarray:
    """[I 0] for block 0, [0 I] for block 1, mapping R^(2n) onto R^n."""
    R = np.zeros((n, 2 * n))
    R[:, block * n:(block + 1) * n] = np.eye(n)
    return R


def frs(series: ReachSeries, X1: HybridZonotope, t: int) -> HybridZonotope:
    """Step-t forward reachable set of the initial set X1 (assumed inside the
    series domain): project the pair set onto its second block after pinning
    the first block to X1.  Exact for all-exact plans, a sound superset
    otherwise."""
    pair = series.pair_set(t).hz
    n = series.model.state_dim
    restricted = pair.generalized_intersect(X1, _selector(n, 0))
    return restricted.affine_map(_selector(n, 1))


def brs(series: ReachSeries, target: HybridZonotope, t: int) -> HybridZonotope:
    """Step-t backward reachable set of a target within the series domain:
    pin the pair set's second block to the target, keep the first."""
    pair = series.pair_set(t).hz
    n = series.model.state_dim
    restricted = pair.generalized_intersect(target, _selector(n, 1))
    return restricted.affine_map(_selector(n, 0))


@dataclass(frozen=True)
class PredictedComplexity:
    pair: ComplexityRecord
    frs: ComplexityRecord
    brs: ComplexityRecord


def predict_complexity(domain: ComplexityRecord, initial: ComplexityRecord,
                       target: ComplexityRecord, n_t: int, n_b: int,
                       n: int) -> PredictedComplexity:
    """Closed-form representation sizes for the step-t pair set, FRS and BRS.

    ``n_t`` is the number of unstable units contributing to the pair set and
    ``n_b`` how many of them are encoded exactly (capped at ``n_t``): each
    exact unit adds (4, 1, 3), each relaxed unit (5, 0, 3); intersecting with
    the initial or target set adds its sizes plus n coupling rows.
    """
    if n_t < 0 or n_b < 0:
        raise ValueError("counts must be nonnegative")
    e = min(n_b, n_t)
    pair = ComplexityRecord(domain.n_g + 5 * n_t - e, domain.n_b + e,
                            domain.n_c + 3 * n_t)
    fwd = ComplexityRecord(pair.n_g + initial.n_g, pair.n_b + initial.n_b,
                           pair.n_c + n + initial.n_c)
    bwd = ComplexityRecord(pair.n_g + target.n_g, pair.n_b + target.n_b,
                           pair.n_c + n + target.n_c)
    return PredictedComplexity(pair, fwd, bwd)


def predicted_for_step(series: ReachSeries, t: int, initial: ComplexityRecord,
                       target: ComplexityRecord) -> PredictedComplexity:
    """Prediction for step t of a concrete series, using the plan's realized
    per-step unstable and exact counts (a horizon-global ranking may spend
    part of its budget on stages after step t-1)."""
    n_t = count_unstable(series.table, t)
    e_t = series.plan.exact_through(t)
    return predict_complexity(series.domain.complexity, initial, target,
                              n_t, e_t, series.model.state_dim)
