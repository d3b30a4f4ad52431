"""Pair-invariant tables, regularity partitions, and the deviation bound.

Pipeline, per bipartite definable graph E ⊆ V x W:

1. pair_invariant_table: exact shared-fiber counts |E(x,a) ∧ E(x,b)| for
   parameter pairs (a, b), per field, as a Gram matrix of the 0/1
   incidence of E; the (q, count) signatures are pooled across the field
   family and snapped to (dimension, measure) invariants.
2. build_partition: groups W-parameters whose invariant rows agree up to
   a vanishing exceptional fraction, validates every block pair against
   one majority invariant, and requires the block structure (count and
   majority invariants) to be identical across fields.  Minority pairs
   form the exceptional sets D_ij.
3. check_exceptional_dimension: fits |D_ij| ~ q^e and compares e against
   2*dim(W) - 1.
4. verify_regularity: exact block densities d_ij plus randomized subset
   sampling of the deviation | |E∩(AxB)| - d_ij|A||B| |, with a log-log
   fit of the normalized deviation against q.  Clause (iii) of the
   regularity statement quantifies over ALL subsets; sampling is the
   finite substitute and every report says so.

Partitions here are extensional per finite field; cross-field stability
of the block structure stands in for uniform definability, and block
labels are recovered only by extensional comparison against a fixed
catalog of definable predicates.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .counting import (
    DEFAULT_BUDGET,
    DefinableSet,
    definable_mask,
    definable_set,
    incidence_matrix,
    index_tuple,
)
from .dim_measure import (
    DEFAULT_MAX_DENOMINATOR,
    DEFAULT_WINDOW_CONSTANT,
    DimMeasure,
    estimate_dim_measure,
    group_count_signatures,
)
from .errors import (
    ClauseViolationError,
    CrossFieldInstabilityError,
    DefregError,
    PartitionError,
)
from .field import FieldSpec

PAIR_EXACT_LIMIT = 512
PAIR_SAMPLE_PAIRS = 10_000
DEFAULT_MAX_BLOCKS = 64
EXPONENT_SLACK = 0.25
SAMPLING_CAVEAT = (
    "subset deviations are verified on random samples only; the bound "
    "quantifies over all subsets, which is not finitely checkable"
)
INDEPENDENCE_CAVEAT = (
    "exceptional pairs are an empirical surrogate for dependent parameter "
    "pairs; whether they coincide with the model-theoretic forking locus "
    "is not decidable from counts"
)


def default_tau(q: int) -> float:
    """Exceptional-fraction tolerance, vanishing like 2/sqrt(q)."""
    return 2.0 / math.sqrt(q)


@dataclass(frozen=True)
class BipartiteDefinableGraph:
    """V, W and an edge set E ⊆ V x W given by formulas with shared roles."""

    name: str
    V: DefinableSet
    W: DefinableSet
    E: DefinableSet

    def __post_init__(self):
        if self.V.params or self.W.params:
            raise DefregError("V and W must be parameter-free definable sets")
        if self.E.objects != self.V.objects:
            raise DefregError(
                f"E object variables {self.E.objects} must match V variables {self.V.objects}"
            )
        if self.E.params != self.W.objects:
            raise DefregError(
                f"E parameter variables {self.E.params} must match W variables {self.W.objects}"
            )

    def transpose(self) -> "BipartiteDefinableGraph":
        """Swap the roles of V and W (object tuple becomes parameter tuple)."""
        return BipartiteDefinableGraph(
            name=f"{self.name}^T",
            V=self.W,
            W=self.V,
            E=DefinableSet(self.E.formula, objects=self.W.objects, params=self.V.objects),
        )


def graph_from_spec(doc: Mapping) -> BipartiteDefinableGraph:
    """Build a graph from the JSON graph-spec document.

    Schema: {"name": str,
             "V": {"formula": str, "variables": [str, ...]},
             "W": {"formula": str, "variables": [str, ...]},
             "E": {"formula": str, "objects": [...], "params": [...]}}
    """
    try:
        V = definable_set(doc["V"]["formula"], doc["V"]["variables"])
        W = definable_set(doc["W"]["formula"], doc["W"]["variables"])
        E = definable_set(doc["E"]["formula"], doc["E"]["objects"], doc["E"]["params"])
    except KeyError as e:
        raise DefregError(f"graph spec is missing key {e}") from None
    return BipartiteDefinableGraph(name=doc.get("name", "graph"), V=V, W=W, E=E)


def load_graph(path: str) -> BipartiteDefinableGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_spec(json.load(fh))


# -- per-field tabulation ------------------------------------------------------


@dataclass
class GraphFieldData:
    field: FieldSpec
    v_members: np.ndarray  # tuple indexes into the V object space, ascending
    w_members: np.ndarray
    matrix: np.ndarray  # |V| x |W| 0/1 incidence of E

    @property
    def edge_count(self) -> int:
        return int(self.matrix.sum())


def graph_field_data(G: BipartiteDefinableGraph, F: FieldSpec,
                     budget: int = DEFAULT_BUDGET) -> GraphFieldData:
    """Tabulate V, W and E over one field, checking E ⊆ V x W."""
    vmask = definable_mask(G.V, F, budget)
    wmask = definable_mask(G.W, F, budget)
    full = incidence_matrix(G.E, F, budget)
    bad_rows = full[~vmask, :].sum()
    bad_cols = full[:, ~wmask].sum()
    if bad_rows or bad_cols:
        raise DefregError(
            f"E is not contained in V x W over {F}: "
            f"{int(bad_rows)} edges outside V, {int(bad_cols)} outside W"
        )
    v_members = np.flatnonzero(vmask)
    w_members = np.flatnonzero(wmask)
    return GraphFieldData(field=F, v_members=v_members, w_members=w_members,
                          matrix=full[np.ix_(v_members, w_members)].astype(np.int64))


# -- pair-invariant tables -----------------------------------------------------


@dataclass
class PairInvariantTable:
    field: FieldSpec
    w_members: np.ndarray  # the parameter tuples actually tabled (all if exact)
    counts: np.ndarray  # |S| x |S| shared-fiber counts, symmetric
    invariant_ids: np.ndarray  # same shape; indexes into PairTables.invariants
    exact: bool


@dataclass
class PairTables:
    graph: BipartiteDefinableGraph
    tables: list[PairInvariantTable]
    invariants: list[DimMeasure]  # id -> invariant; the empty marker is included
    v_sizes: dict[str, int]
    w_sizes: dict[str, int]
    exact: bool

    def table_for(self, descriptor: str) -> PairInvariantTable:
        for t in self.tables:
            if t.field.descriptor() == descriptor:
                return t
        raise DefregError(f"no table for field {descriptor}")


def pair_invariant_table(G: BipartiteDefinableGraph, fields: Sequence[FieldSpec],
                         budget: int = DEFAULT_BUDGET,
                         pair_exact_limit: int = PAIR_EXACT_LIMIT,
                         pair_sample_pairs: int = PAIR_SAMPLE_PAIRS,
                         sample_seed: int = 0,
                         window_c: float = DEFAULT_WINDOW_CONSTANT,
                         max_den: int = DEFAULT_MAX_DENOMINATOR,
                         scramble_seed: int | None = None) -> PairTables:
    """Shared-fiber counts and pooled invariants for all W-parameter pairs.

    Exact for |W(F)| <= pair_exact_limit; above that a random subset of
    parameters of size ~sqrt(pair_sample_pairs) is tabled and the result
    is flagged non-exact.  `scramble_seed` is a test hook that replaces
    every count with per-field random noise to model a relation with no
    stable invariant structure.
    """
    tables = []
    v_sizes: dict[str, int] = {}
    w_sizes: dict[str, int] = {}
    signatures: set[tuple[int, int]] = set()
    all_exact = True
    for fi, F in enumerate(fields):
        data = graph_field_data(G, F, budget)
        v_sizes[F.descriptor()] = len(data.v_members)
        w_sizes[F.descriptor()] = len(data.w_members)
        members = data.w_members
        exact = True
        if len(members) > pair_exact_limit:
            size = min(len(members), max(2, math.isqrt(pair_sample_pairs)))
            rng = np.random.default_rng(np.random.SeedSequence(sample_seed, spawn_key=(fi,)))
            members = np.sort(rng.choice(members, size=size, replace=False))
            positions = np.searchsorted(data.w_members, members)
            sub = data.matrix[:, positions]
            exact = False
            all_exact = False
        else:
            sub = data.matrix
        counts = sub.T @ sub
        if scramble_seed is not None:
            rng = np.random.default_rng(np.random.SeedSequence(scramble_seed, spawn_key=(fi,)))
            noise = rng.integers(0, F.q + 1, size=counts.shape)
            counts = np.triu(noise) + np.triu(noise, 1).T
        tables.append(PairInvariantTable(field=F, w_members=members, counts=counts,
                                         invariant_ids=np.zeros_like(counts), exact=exact))
        signatures.update((F.q, int(N)) for N in np.unique(counts))
    groups = group_count_signatures(sorted(signatures), n_max=len(G.E.objects),
                                    window_c=window_c, max_den=max_den)
    order = sorted(range(len(groups)), key=lambda gi: groups[gi].invariant.key())
    invariants = [groups[gi].invariant for gi in order]
    sig_to_id: dict[tuple[int, int], int] = {}
    for new_id, gi in enumerate(order):
        for sig in groups[gi].signatures:
            sig_to_id[sig] = new_id
    for t in tables:
        ids = np.empty_like(t.counts)
        flat = t.counts.ravel()
        out = ids.ravel()
        lookup = {N: sig_to_id[(t.field.q, N)] for N in map(int, np.unique(t.counts))}
        for pos, N in enumerate(map(int, flat)):
            out[pos] = lookup[N]
        t.invariant_ids = ids
    return PairTables(graph=G, tables=tables, invariants=invariants,
                      v_sizes=v_sizes, w_sizes=w_sizes, exact=all_exact)


# -- partition construction ----------------------------------------------------


@dataclass
class PartitionBlock:
    block_id: int  # 1-based
    members: dict[str, list[tuple[int, ...]]]  # field descriptor -> parameter tuples
    measure: DimMeasure | None = None
    label: str = "empirical"

    def sizes(self) -> dict[str, int]:
        return {fd: len(ms) for fd, ms in sorted(self.members.items())}

    def to_json(self, include_members: bool = True) -> dict:
        out = {
            "id": self.block_id,
            "label": self.label,
            "sizes": self.sizes(),
            "measure": None if self.measure is None else self.measure.to_json(),
        }
        if include_members:
            out["members"] = {fd: [list(t) for t in ms] for fd, ms in sorted(self.members.items())}
        return out


@dataclass
class PairClassSummary:
    block_i: int
    block_j: int
    verdict: str  # "constant" | "degenerate"
    invariant: DimMeasure
    c: Fraction | None
    exceptional_counts: dict[str, int]
    exceptional_fractions: dict[str, float]
    exceptional_pairs: dict[str, list[tuple[tuple[int, ...], tuple[int, ...]]]]
    exceptional_truncated: bool = False

    def to_json(self) -> dict:
        return {
            "blocks": [self.block_i, self.block_j],
            "verdict": self.verdict,
            "invariant": self.invariant.to_json(),
            "c": None if self.c is None else str(self.c),
            "exceptional_counts": dict(sorted(self.exceptional_counts.items())),
            "exceptional_fractions": {k: v for k, v in sorted(self.exceptional_fractions.items())},
            "exceptional_truncated": self.exceptional_truncated,
        }


def _row_blocks(ids: np.ndarray, tau_count: float, max_blocks: int,
                field: FieldSpec) -> list[list[int]]:
    """Greedy leader grouping of rows that agree up to tau_count mismatches."""
    n = ids.shape[0]
    leaders: list[int] = []
    blocks: list[list[int]] = []
    for a in range(n):
        for li, lead in enumerate(leaders):
            diff = ids[a] != ids[lead]
            diff[a] = False
            diff[lead] = False
            if int(diff.sum()) <= tau_count:
                blocks[li].append(a)
                break
        else:
            if len(blocks) >= max_blocks:
                raise PartitionError(
                    f"no stable block structure over {field}: more than "
                    f"{max_blocks} invariant-row classes"
                )
            leaders.append(a)
            blocks.append([a])
    return blocks


def _majority_id(sub: np.ndarray) -> int:
    vals, cnts = np.unique(sub, return_counts=True)
    best = cnts.max()
    return int(min(v for v, c in zip(vals, cnts) if c == best))


def _split_rows(ids: np.ndarray, rows: list[int], cols: list[int], tau_count: float) -> list[list[int]]:
    """Leader grouping of `rows` by their id pattern restricted to `cols`."""
    col_idx = np.array(cols)
    leaders: list[int] = []
    parts: list[list[int]] = []
    for a in rows:
        for li, lead in enumerate(leaders):
            diff = ids[a, col_idx] != ids[lead, col_idx]
            if int(diff.sum()) <= tau_count:
                parts[li].append(a)
                break
        else:
            leaders.append(a)
            parts.append([a])
    return parts


def _stabilize_field(ids: np.ndarray, tau_frac: float, max_blocks: int,
                     field: FieldSpec) -> tuple[list[list[int]], np.ndarray]:
    """Blocks of one field plus the majority-id matrix, refined until every
    block pair is (1 - tau)-constant."""
    n = ids.shape[0]
    tau_count = tau_frac * n
    blocks = _row_blocks(ids, tau_count, max_blocks, field)
    for _ in range(max_blocks + 1):
        m = len(blocks)
        majority = np.zeros((m, m), dtype=int)
        offender = None
        for i, j in itertools.product(range(m), repeat=2):
            sub = ids[np.ix_(blocks[i], blocks[j])]
            majority[i, j] = _majority_id(sub)
            exc = int((sub != majority[i, j]).sum())
            if exc > tau_frac * sub.size and offender is None:
                offender = (i, j)
        if offender is None:
            return blocks, majority
        i, j = offender
        parts = _split_rows(ids, blocks[i], blocks[j], tau_frac * len(blocks[j]))
        if len(parts) == 1 and i != j:
            parts = _split_rows(ids, blocks[j], blocks[i], tau_frac * len(blocks[i]))
            if len(parts) == 1:
                raise PartitionError(
                    f"block pair ({i + 1}, {j + 1}) over {field} cannot be "
                    f"stabilized: exceptional fraction exceeds tau but rows are "
                    f"homogeneous"
                )
            blocks = blocks[:j] + parts + blocks[j + 1:]
        elif len(parts) == 1:
            raise PartitionError(
                f"block pair ({i + 1}, {j + 1}) over {field} cannot be stabilized"
            )
        else:
            blocks = blocks[:i] + parts + blocks[i + 1:]
        if len(blocks) > max_blocks:
            raise PartitionError(
                f"no stable block structure over {field}: refinement exceeded "
                f"max_blocks={max_blocks}"
            )
    raise PartitionError(f"refinement did not converge over {field}")


MAX_STORED_EXCEPTIONAL = 200


def build_partition(tables: PairTables, tau=None, max_blocks: int = DEFAULT_MAX_BLOCKS,
                    window_c: float = DEFAULT_WINDOW_CONSTANT,
                    max_den: int = DEFAULT_MAX_DENOMINATOR
                    ) -> tuple[list[PartitionBlock], list[PairClassSummary]]:
    """Blocks of W with per-block-pair invariant summaries.

    The block structure (number of blocks, canonical order, and the
    majority invariant of every block pair) must agree across all sampled
    fields; otherwise CrossFieldInstabilityError carries per-field
    diagnostics.  `tau` maps q to the exceptional-fraction tolerance.
    """
    if len(tables.tables) < 3:
        raise PartitionError("need pair tables over at least 3 fields")
    tau = default_tau if tau is None else tau
    G = tables.graph
    m_params = len(G.W.objects)
    per_field_blocks: dict[str, list[list[int]]] = {}
    per_field_majority: dict[str, np.ndarray] = {}
    for t in tables.tables:
        blocks, majority = _stabilize_field(t.invariant_ids, tau(t.field.q), max_blocks, t.field)
        # canonical order: larger blocks first, ties by least member tuple index
        order = sorted(range(len(blocks)),
                       key=lambda b: (-len(blocks[b]), int(t.w_members[blocks[b][0]])))
        blocks = [sorted(blocks[b]) for b in order]
        per_field_blocks[t.field.descriptor()] = blocks
        m = len(blocks)
        majority = np.zeros((m, m), dtype=int)
        for i, j in itertools.product(range(m), repeat=2):
            majority[i, j] = _majority_id(t.invariant_ids[np.ix_(blocks[i], blocks[j])])
        per_field_majority[t.field.descriptor()] = majority
    counts = {fd: len(bs) for fd, bs in per_field_blocks.items()}
    if len(set(counts.values())) != 1:
        raise CrossFieldInstabilityError(
            "no stable block structure across fields: block counts differ "
            + ", ".join(f"{fd}: {c}" for fd, c in sorted(counts.items()))
        )
    majorities = list(per_field_majority.values())
    if any(not np.array_equal(majorities[0], M) for M in majorities[1:]):
        diag = {fd: [[tables.invariants[i].label() for i in row] for row in M.tolist()]
                for fd, M in sorted(per_field_majority.items())}
        raise CrossFieldInstabilityError(
            f"no stable block structure across fields: majority invariants differ per field: {diag}"
        )
    n_blocks = next(iter(counts.values()))
    majority = majorities[0]
    # assemble blocks with decoded member tuples and block measures
    blocks_out = []
    for b in range(n_blocks):
        members: dict[str, list[tuple[int, ...]]] = {}
        size_counts = []
        for t in tables.tables:
            fd = t.field.descriptor()
            idxs = per_field_blocks[fd][b]
            members[fd] = [index_tuple(int(t.w_members[i]), t.field.q, m_params) for i in idxs]
            size_counts.append((t.field.q, len(idxs)))
        measure = None
        try:
            measure = estimate_dim_measure(size_counts, n_max=m_params,
                                           window_c=window_c, max_den=max_den)
        except DefregError:
            pass
        blocks_out.append(PartitionBlock(block_id=b + 1, members=members, measure=measure))
    # fiber ambient dimension n = dim(V), for the constant/degenerate verdict
    n_inv = estimate_dim_measure(sorted((t.field.q, tables.v_sizes[t.field.descriptor()])
                                        for t in tables.tables), n_max=len(G.V.objects),
                                 window_c=window_c, max_den=max_den)
    n_dim = -1 if n_inv.is_empty else n_inv.dim
    summaries = []
    for i, j in itertools.product(range(n_blocks), repeat=2):
        inv = tables.invariants[majority[i, j]]
        verdict = "constant" if (not inv.is_empty and inv.dim == n_dim) else "degenerate"
        exc_counts: dict[str, int] = {}
        exc_fracs: dict[str, float] = {}
        exc_pairs: dict[str, list] = {}
        truncated = False
        for t in tables.tables:
            fd = t.field.descriptor()
            bi, bj = per_field_blocks[fd][i], per_field_blocks[fd][j]
            sub = t.invariant_ids[np.ix_(bi, bj)]
            bad = np.argwhere(sub != majority[i, j])
            exc_counts[fd] = len(bad)
            exc_fracs[fd] = len(bad) / sub.size
            pairs = []
            for a_pos, b_pos in bad[:MAX_STORED_EXCEPTIONAL]:
                a_idx = int(t.w_members[bi[a_pos]])
                b_idx = int(t.w_members[bj[b_pos]])
                pairs.append((index_tuple(a_idx, t.field.q, m_params),
                              index_tuple(b_idx, t.field.q, m_params)))
            if len(bad) > MAX_STORED_EXCEPTIONAL:
                truncated = True
            exc_pairs[fd] = pairs
        summaries.append(PairClassSummary(
            block_i=i + 1, block_j=j + 1, verdict=verdict, invariant=inv,
            c=inv.measure if verdict == "constant" else None,
            exceptional_counts=exc_counts, exceptional_fractions=exc_fracs,
            exceptional_pairs=exc_pairs, exceptional_truncated=truncated,
        ))
    return blocks_out, summaries


# -- exceptional-set dimension --------------------------------------------------


def fit_power_law(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares fit y = C * x^alpha in log-log scale; returns (alpha, C)."""
    xs = np.log([p[0] for p in points])
    ys = np.log([p[1] for p in points])
    if len(xs) < 2:
        raise DefregError("need at least 2 points to fit a power law")
    alpha, logc = np.polyfit(xs, ys, 1)
    return float(alpha), float(np.exp(logc))


def check_exceptional_dimension(summary: PairClassSummary, k_dim: int,
                                slack: float = EXPONENT_SLACK) -> tuple[bool, float | None]:
    """True when |D_ij| grows no faster than q^(2k - 1 + slack).

    Returns (ok, fitted exponent); the exponent is None when the
    exceptional sets are too small to fit (which passes trivially).
    """
    points = []
    for fd, count in summary.exceptional_counts.items():
        if count > 0:
            q = descriptor_size(fd)
            points.append((q, count))
    if len(points) < 2:
        return True, None
    exponent, _ = fit_power_law(points)
    return exponent <= 2 * k_dim - 1 + slack, exponent


def descriptor_size(descriptor: str) -> int:
    if "^" in descriptor:
        p, k = descriptor.split("^")
        return int(p) ** int(k)
    return int(descriptor)


# -- regularity verification -----------------------------------------------------


@dataclass
class BlockPairStats:
    i: int
    j: int
    densities: dict[str, Fraction]
    delta_max: dict[str, float]  # max absolute deviation per field
    delta_norm_max: dict[str, float]  # / (|V_i| |W_j|)
    alpha: float | None
    c_fit: float | None
    clause_c: float  # minimal C with every sampled deviation <= C q^{-1/4} |V_i||W_j|
    alpha_ok: bool

    def to_json(self) -> dict:
        return {
            "blocks": [self.i, self.j],
            "density": {fd: str(d) for fd, d in sorted(self.densities.items())},
            "density_float": {fd: float(d) for fd, d in sorted(self.densities.items())},
            "delta_max": dict(sorted(self.delta_max.items())),
            "delta_norm_max": dict(sorted(self.delta_norm_max.items())),
            "alpha": self.alpha,
            "c_fit": self.c_fit,
            "clause_c": self.clause_c,
            "alpha_ok": self.alpha_ok,
        }


@dataclass
class RegularityReport:
    graph: str
    fields: list[str]
    samples: int
    seed: int
    densities_used: tuple[float, ...]
    pair_stats: list[BlockPairStats]
    density_consistent: dict[str, bool]
    edge_counts: dict[str, int]
    min_block_fraction: float
    alpha_worst: float | None
    clause_c_worst: float
    all_alpha_ok: bool
    exact_counts: bool = True
    caveats: tuple[str, ...] = (SAMPLING_CAVEAT, INDEPENDENCE_CAVEAT)

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "fields": list(self.fields),
            "samples": self.samples,
            "seed": self.seed,
            "subset_densities": list(self.densities_used),
            "pairs": [s.to_json() for s in self.pair_stats],
            "density_consistent": dict(sorted(self.density_consistent.items())),
            "edge_counts": dict(sorted(self.edge_counts.items())),
            "min_block_fraction": self.min_block_fraction,
            "alpha_worst": self.alpha_worst,
            "clause_c_worst": self.clause_c_worst,
            "all_alpha_ok": self.all_alpha_ok,
            "exact_counts": self.exact_counts,
            "caveats": list(self.caveats),
        }


def trivial_blocks(G: BipartiteDefinableGraph, fields: Sequence[FieldSpec],
                   side: str = "W", budget: int = DEFAULT_BUDGET) -> list[PartitionBlock]:
    """The one-block partition of V(F) or W(F) per field."""
    S = G.W if side == "W" else G.V
    members = {}
    for F in fields:
        mask = definable_mask(S, F, budget)
        members[F.descriptor()] = [index_tuple(int(i), F.q, len(S.objects))
                                   for i in np.flatnonzero(mask)]
    return [PartitionBlock(block_id=1, members=members, label="all of " + side)]


def _block_positions(blocks: Sequence[PartitionBlock], member_list: np.ndarray,
                     q: int, fd: str, side: str) -> list[np.ndarray]:
    """Positions of each block inside `member_list`; verifies exact partition."""
    index_of = {int(t): pos for pos, t in enumerate(member_list)}
    out = []
    seen: set[int] = set()
    for blk in blocks:
        if fd not in blk.members:
            raise PartitionError(f"block {blk.block_id} has no members recorded for field {fd}")
        positions = []
        for tup in blk.members[fd]:
            idx = 0
            for v in tup:
                idx = idx * q + v
            if idx not in index_of:
                raise PartitionError(
                    f"block {blk.block_id} member {tup} is not in {side}({fd})")
            if idx in seen:
                raise PartitionError(f"blocks of {side} overlap at {tup} in field {fd}")
            seen.add(idx)
            positions.append(index_of[idx])
        out.append(np.array(sorted(positions), dtype=int))
    if len(seen) != len(member_list):
        raise PartitionError(f"blocks do not cover {side}({fd})")
    return out


def verify_regularity(G: BipartiteDefinableGraph, blocks_v: Sequence[PartitionBlock],
                      blocks_w: Sequence[PartitionBlock], fields: Sequence[FieldSpec],
                      samples: int, seed: int,
                      densities: tuple[float, ...] = (0.25, 0.5, 0.75),
                      alpha_slack: float = 0.0,
                      budget: int = DEFAULT_BUDGET) -> RegularityReport:
    """Exact block densities plus sampled subset deviations and their scaling.

    For every field and block pair, `samples` random subset pairs A ⊆ V_i,
    B ⊆ W_j are drawn (elements included independently, inclusion
    probability drawn per subset from `densities`), the worst deviation
    | |E∩(AxB)| - d_ij |A||B| | is recorded, and the normalized worst
    deviation is fitted to C q^alpha across fields.  Sampling is seeded
    per (field, pair, sample), so reports are reproducible bit for bit.
    """
    if samples < 1:
        raise DefregError("need at least one sample per block pair")
    for blk in blocks_v:
        for fd, ms in blk.members.items():
            if not ms:
                raise ClauseViolationError(
                    f"clause (i) violated: block V_{blk.block_id} is empty in field {fd}")
    for blk in blocks_w:
        for fd, ms in blk.members.items():
            if not ms:
                raise ClauseViolationError(
                    f"clause (i) violated: block W_{blk.block_id} is empty in field {fd}")
    pair_acc: dict[tuple[int, int], dict] = {
        (i, j): {"densities": {}, "delta": {}, "delta_norm": {}, "clause_c": 0.0}
        for i in range(len(blocks_v)) for j in range(len(blocks_w))
    }
    density_consistent: dict[str, bool] = {}
    edge_counts: dict[str, int] = {}
    min_fraction = 1.0
    for fi, F in enumerate(fields):
        fd = F.descriptor()
        data = graph_field_data(G, F, budget)
        vpos = _block_positions(blocks_v, data.v_members, F.q, fd, "V")
        wpos = _block_positions(blocks_w, data.w_members, F.q, fd, "W")
        for positions, total in ((vpos, len(data.v_members)), (wpos, len(data.w_members))):
            for pos in positions:
                min_fraction = min(min_fraction, len(pos) / total)
        total_mass = Fraction(0)
        for (i, j), acc in pair_acc.items():
            sub = data.matrix[np.ix_(vpos[i], wpos[j])]
            size = sub.shape[0] * sub.shape[1]
            edges = int(sub.sum())
            d_ij = Fraction(edges, size)
            acc["densities"][fd] = d_ij
            total_mass += d_ij * size
            worst = Fraction(0)
            for s in range(samples):
                rng = np.random.default_rng(
                    np.random.SeedSequence(seed, spawn_key=(fi, i, j, s)))
                pa = densities[int(rng.integers(len(densities)))]
                pb = densities[int(rng.integers(len(densities)))]
                mask_a = rng.random(sub.shape[0]) < pa
                mask_b = rng.random(sub.shape[1]) < pb
                cnt = int(mask_a @ sub @ mask_b)
                na, nb = int(mask_a.sum()), int(mask_b.sum())
                delta = abs(Fraction(cnt) - d_ij * na * nb)
                worst = max(worst, delta)
            acc["delta"][fd] = float(worst)
            acc["delta_norm"][fd] = float(worst / size)
            acc["clause_c"] = max(acc["clause_c"], float(worst / size) * F.q**0.25)
        edge_counts[fd] = data.edge_count
        density_consistent[fd] = total_mass == data.edge_count
    stats = []
    alpha_worst = None
    clause_worst = 0.0
    all_ok = True
    for (i, j), acc in sorted(pair_acc.items()):
        points = [(descriptor_size(fd), v) for fd, v in acc["delta_norm"].items() if v > 0]
        alpha = c_fit = None
        if len(points) >= 2:
            alpha, c_fit = fit_power_law(points)
        ok = alpha is None or alpha <= -0.25 + alpha_slack
        all_ok = all_ok and ok
        if alpha is not None:
            alpha_worst = alpha if alpha_worst is None else max(alpha_worst, alpha)
        clause_worst = max(clause_worst, acc["clause_c"])
        stats.append(BlockPairStats(
            i=i + 1, j=j + 1, densities=acc["densities"], delta_max=acc["delta"],
            delta_norm_max=acc["delta_norm"], alpha=alpha, c_fit=c_fit,
            clause_c=acc["clause_c"], alpha_ok=ok,
        ))
    return RegularityReport(
        graph=G.name, fields=[F.descriptor() for F in fields], samples=samples,
        seed=seed, densities_used=densities, pair_stats=stats,
        density_consistent=density_consistent, edge_counts=edge_counts,
        min_block_fraction=min_fraction, alpha_worst=alpha_worst,
        clause_c_worst=clause_worst, all_alpha_ok=all_ok,
    )


# -- block labelling ---------------------------------------------------------------


def _power_residues(F: FieldSpec, r: int) -> set[int]:
    return {F.pow_(t, r) for t in range(1, F.q)}


def _monomials(n_vars: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree <= 2, constant first."""
    out = [tuple([0] * n_vars)]
    for i in range(n_vars):
        e = [0] * n_vars
        e[i] = 1
        out.append(tuple(e))
    for i in range(n_vars):
        for j in range(i, n_vars):
            e = [0] * n_vars
            e[i] += 1
            e[j] += 1
            out.append(tuple(e))
    return out


def _poly_name(coeffs: Sequence[int], monomials: Sequence[tuple[int, ...]],
               names: Sequence[str]) -> str:
    parts = []
    for c, mono in zip(coeffs, monomials):
        if c == 0:
            continue
        body = "*".join(
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(names, mono) if e > 0
        )
        if not body:
            body = "1"
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    sign, body = parts[0]
    s = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def _eval_poly(coeffs: Sequence[int], monomials: Sequence[tuple[int, ...]],
               point: tuple[int, ...], F: FieldSpec) -> int:
    acc = 0
    for c, mono in zip(coeffs, monomials):
        if c == 0:
            continue
        term = F.element_of_int(c)
        for v, e in zip(point, mono):
            for _ in range(e):
                term = F.mul(term, v)
        acc = F.add(acc, term)
    return acc


def _catalog(F: FieldSpec, w_members: Sequence[tuple[int, ...]],
             names: Sequence[str]) -> list[tuple[str, frozenset]]:
    """Candidate definable subsets of W, extensionally, in canonical order."""
    all_w = frozenset(w_members)
    entries: list[tuple[str, frozenset]] = [("all of W", all_w)]
    if len(names) == 1:
        residue_names = {2: ("nonzero squares", "nonsquares"),
                         3: ("nonzero cubes", "non-cubes"),
                         4: ("nonzero fourth powers", "non-fourth-powers")}
        for r in (2, 3, 4):
            powers = _power_residues(F, r)
            inside = frozenset(t for t in w_members if t[0] != 0 and t[0] in powers)
            outside = frozenset(t for t in w_members if t[0] != 0 and t[0] not in powers)
            pos_name, neg_name = residue_names[r]
            entries.append((pos_name, inside))
            entries.append((neg_name, outside))
    monos = _monomials(len(names))
    for coeffs in itertools.product((-1, 0, 1), repeat=len(monos)):
        if all(c == 0 for c in coeffs):
            continue
        name = _poly_name(coeffs, monos, names)
        zero = frozenset(t for t in w_members if _eval_poly(coeffs, monos, t, F) == 0)
        entries.append((f"zero set of {name}", zero))
        entries.append((f"nonvanishing of {name}", all_w - zero))
    return entries


def match_block_labels(blocks: Sequence[PartitionBlock], fields: Sequence[FieldSpec],
                       G: BipartiteDefinableGraph,
                       budget: int = DEFAULT_BUDGET) -> list[str]:
    """Label blocks by exact extensional match against the fixed catalog.

    A label sticks only when the same catalog entry matches the block in
    every sampled field; everything else stays "empirical".
    """
    names = G.W.objects
    catalogs = []
    for F in fields:
        fd = F.descriptor()
        members = []
        for blk in blocks:
            members.extend(blk.members.get(fd, []))
        catalogs.append((fd, _catalog(F, sorted(members), names)))
    labels = []
    for blk in blocks:
        label = "empirical"
        n_entries = min(len(cat) for _, cat in catalogs)
        for entry_idx in range(n_entries):
            entry_name = catalogs[0][1][entry_idx][0]
            if all(frozenset(blk.members.get(fd, [])) == cat[entry_idx][1]
                   for fd, cat in catalogs):
                label = entry_name
                break
        blk.label = label
        labels.append(label)
    return labels
