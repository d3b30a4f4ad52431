"""Estimate the (dimension, measure) invariant from exact counts.

The model: a nonempty definable set with invariant (d, mu) has
|N_q - mu*q^d| <= C*q^(d - 1/2) across finite fields of size q.  Each
observation (q, N) therefore confines mu to the window
[N/q^d - C/sqrt(q), N/q^d + C/sqrt(q)].  A dimension d is admissible
when the intersection of all windows is a nonempty interval with a
positive lower end that contains a rational of bounded denominator; the
estimated measure is the smallest-denominator rational in that
intersection.  When several dimensions are admissible (possible with few
or tightly clustered fields), the one whose ratios N/q^d have the least
spread relative to their median wins, which is what "bounded away from
0 and infinity" looks like on finite data.

Parameter classification pools the (q, N) count signatures of all
parameter tuples across the field family and greedily groups signatures
that remain jointly fittable by one (d, mu); classes are the level sets
of the resulting snapped invariant, with all-zero counts collected into
a single empty class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from statistics import median
from typing import Mapping, Sequence

from .counting import DEFAULT_BUDGET, CompiledPredicate, DefinableSet, check_budget, index_tuple, work_units
from .errors import DefregError, EstimationError
from .field import FieldSpec

DEFAULT_MAX_DENOMINATOR = 64
DEFAULT_WINDOW_CONSTANT = 0.5
DEFAULT_RESIDUAL_THRESHOLD = 10.0
EXPONENT_GAP = Fraction(1, 2)  # fixed q^(d - 1/2) error exponent


@dataclass(frozen=True)
class DimMeasure:
    """Dimension and measure, with the empty set marked by dim=None."""

    dim: int | None
    measure: Fraction | None
    fit_residual: float = 0.0
    field_count: int = 0

    @property
    def is_empty(self) -> bool:
        return self.dim is None

    def key(self) -> tuple:
        return (-1, Fraction(0)) if self.is_empty else (self.dim, self.measure)

    def label(self) -> str:
        return "empty" if self.is_empty else f"({self.dim}, {self.measure})"

    def to_json(self) -> dict:
        return {
            "empty": self.is_empty,
            "dim": self.dim,
            "measure": None if self.measure is None else str(self.measure),
            "measure_float": None if self.measure is None else float(self.measure),
            "fit_residual": self.fit_residual,
            "field_count": self.field_count,
        }


@dataclass(frozen=True)
class CdmErrorModel:
    """Empirical constant for the q^(d - 1/2) error law of a formula family."""

    constant: float
    exponent_gap: Fraction = EXPONENT_GAP

    def bound(self, q: int, d: int) -> float:
        return self.constant * q ** float(d - self.exponent_gap)


def snap_rational(v: float | Fraction, max_den: int = DEFAULT_MAX_DENOMINATOR) -> Fraction:
    """Best rational approximation with denominator <= max_den.

    Scans denominators in increasing order keeping strict improvements,
    so ties resolve toward the smaller denominator.
    """
    if max_den < 1:
        raise DefregError(f"max denominator must be >= 1, got {max_den}")
    x = Fraction(v)
    best, err = None, None
    for den in range(1, max_den + 1):
        num = round(x * den)
        cand = Fraction(num, den)
        e = abs(cand - x)
        if err is None or e < err:
            best, err = cand, e
            if e == 0:
                break
    return best


def simplest_in_interval(lo: Fraction, hi: Fraction, max_den: int) -> Fraction | None:
    """Smallest-denominator rational in [lo, hi] with denominator <= max_den,
    smallest numerator on ties; None if the interval contains none."""
    if lo > hi:
        return None
    for den in range(1, max_den + 1):
        num = math.ceil(lo * den)
        if num <= hi * den:
            return Fraction(num, den)
    return None


def _window(q: int, N: int, d: int, window_c: float) -> tuple[Fraction, Fraction]:
    ratio = Fraction(N, q**d)
    hw = Fraction(window_c / math.sqrt(q))
    return ratio - hw, ratio + hw


@dataclass
class _Fit:
    d: int
    interval: tuple[Fraction, Fraction]
    mu: Fraction


def _live_fits(signatures: Sequence[tuple[int, int]], n_max: int, window_c: float,
               max_den: int) -> list[_Fit]:
    """All (d, interval, mu) consistent with every (q, N) signature."""
    fits = []
    for d in range(n_max + 1):
        lo = hi = None
        for q, N in signatures:
            wlo, whi = _window(q, N, d, window_c)
            lo = wlo if lo is None else max(lo, wlo)
            hi = whi if hi is None else min(hi, whi)
        if lo <= 0 or lo > hi:
            continue
        mu = simplest_in_interval(lo, hi, max_den)
        if mu is not None:
            fits.append(_Fit(d, (lo, hi), mu))
    return fits


def _relative_spread(signatures: Sequence[tuple[int, int]], d: int) -> Fraction:
    ratios = [Fraction(N, q**d) for q, N in signatures]
    m = median(ratios)
    if m == 0:
        return Fraction(0)
    return max(abs(r - m) for r in ratios) / m


def _best_fit(signatures: Sequence[tuple[int, int]], n_max: int, window_c: float,
              max_den: int) -> _Fit | None:
    fits = _live_fits(signatures, n_max, window_c, max_den)
    if not fits:
        return None
    return min(fits, key=lambda f: (_relative_spread(signatures, f.d), f.d))


def _residual(signatures: Sequence[tuple[int, int]], d: int, mu: Fraction) -> float:
    return max(abs(N - mu * q**d) / q ** (d - 0.5) for q, N in signatures)


def estimate_dim_measure(counts: Sequence[tuple[int, int]], n_max: int,
                         window_c: float = DEFAULT_WINDOW_CONSTANT,
                         max_den: int = DEFAULT_MAX_DENOMINATOR,
                         residual_threshold: float = DEFAULT_RESIDUAL_THRESHOLD,
                         min_fields: int = 3) -> DimMeasure:
    """Fit one (d, mu) to exact counts (q, N_q) over a field family.

    Requires at least `min_fields` distinct field sizes.  Returns the
    empty marker when every count is zero.  Raises EstimationError when
    no dimension in [0, n_max] is consistent with the error model --
    the field family is too small or the counts are not uniform.
    """
    counts = [(int(q), int(N)) for q, N in counts]
    if len({q for q, _ in counts}) < min_fields:
        raise EstimationError(f"need counts from at least {min_fields} distinct field sizes")
    if all(N == 0 for _, N in counts):
        return DimMeasure(dim=None, measure=None, fit_residual=0.0,
                          field_count=len({q for q, _ in counts}))
    signatures = sorted(set(counts))
    fit = _best_fit(signatures, n_max, window_c, max_den)
    if fit is None:
        raise EstimationError(
            "no dimension in [0, {}] fits the q^(d-1/2) error model for counts {}"
            .format(n_max, signatures)
        )
    res = _residual(signatures, fit.d, fit.mu)
    if res > residual_threshold:
        raise EstimationError(
            f"best fit (d={fit.d}, mu={fit.mu}) has residual {res:.3f} "
            f"above the threshold {residual_threshold}"
        )
    return DimMeasure(dim=fit.d, measure=fit.mu, fit_residual=res,
                      field_count=len({q for q, _ in counts}))


# -- pooled signature grouping ------------------------------------------------

EMPTY_GROUP = "empty"


@dataclass
class SignatureGroup:
    signatures: list[tuple[int, int]]
    invariant: DimMeasure


def group_count_signatures(signatures: Sequence[tuple[int, int]], n_max: int,
                           window_c: float = DEFAULT_WINDOW_CONSTANT,
                           max_den: int = DEFAULT_MAX_DENOMINATOR) -> list[SignatureGroup]:
    """Partition (q, N) signatures into groups jointly fittable by one (d, mu).

    Signatures are processed in ascending (q, N) order and join the first
    existing group that stays fittable with them; groups whose final
    snapped invariants coincide are merged, so the output is exactly the
    level sets of the invariant.  Zero counts form their own empty group.
    """
    zeros = sorted({s for s in signatures if s[1] == 0})
    nonzero = sorted({s for s in signatures if s[1] != 0})
    groups: list[list[tuple[int, int]]] = []
    for sig in nonzero:
        for g in groups:
            if _best_fit(g + [sig], n_max, window_c, max_den) is not None:
                g.append(sig)
                break
        else:
            groups.append([sig])
    out = []
    by_invariant: dict[tuple, SignatureGroup] = {}
    for g in groups:
        fit = _best_fit(g, n_max, window_c, max_den)
        inv = DimMeasure(dim=fit.d, measure=fit.mu, fit_residual=_residual(g, fit.d, fit.mu),
                         field_count=len({q for q, _ in g}))
        prev = by_invariant.get(inv.key())
        if prev is not None:
            merged = sorted(set(prev.signatures + g))
            refit = _best_fit(merged, n_max, window_c, max_den)
            if refit is not None and (refit.d, refit.mu) == inv.key():
                prev.signatures = merged
                continue
        entry = SignatureGroup(signatures=sorted(g), invariant=inv)
        out.append(entry)
        by_invariant.setdefault(inv.key(), entry)
    if zeros:
        out.append(SignatureGroup(signatures=zeros,
                                  invariant=DimMeasure(dim=None, measure=None,
                                                       field_count=len({q for q, _ in zeros}))))
    return out


# -- parameter classification -------------------------------------------------


@dataclass
class ParameterClass:
    """Parameter tuples sharing one snapped (dimension, measure)."""

    class_id: str
    invariant: DimMeasure
    members: dict[str, list[tuple[int, ...]]]  # field descriptor -> parameter tuples
    counts: dict[str, dict[tuple[int, ...], int]]
    uniform: bool  # has members in every sampled field

    def size(self, field_descriptor: str) -> int:
        return len(self.members.get(field_descriptor, []))

    def to_json(self, include_members: bool = True) -> dict:
        out = {
            "id": self.class_id,
            "invariant": self.invariant.to_json(),
            "sizes": {f: len(ms) for f, ms in sorted(self.members.items())},
            "uniform": self.uniform,
        }
        if include_members:
            out["members"] = {f: [list(t) for t in ms] for f, ms in sorted(self.members.items())}
        return out


def classify_parameters(S: DefinableSet, fields: Sequence[FieldSpec],
                        window_c: float = DEFAULT_WINDOW_CONSTANT,
                        max_den: int = DEFAULT_MAX_DENOMINATOR,
                        budget: int = DEFAULT_BUDGET) -> list[ParameterClass]:
    """Empirical parameter classes of a parametrised definable set.

    Every parameter tuple of every field is exactly counted; tuples are
    classed by the pooled invariant of their (q, N) signature.  Classes
    missing from some sampled field are flagged non-uniform rather than
    averaged away.
    """
    if not S.params:
        raise DefregError("classification needs a set with parameter variables")
    if len(fields) < 3:
        raise EstimationError("need at least 3 fields to classify parameters")
    n_max = len(S.objects)
    per_field_counts: dict[str, dict[tuple[int, ...], int]] = {}
    signatures = set()
    for F in fields:
        units = F.q ** len(S.params) * work_units(S, F)
        check_budget(units, budget)
        counts = _fiber_counts(S, F)
        per_field_counts[F.descriptor()] = counts
        signatures.update((F.q, N) for N in counts.values())
    groups = group_count_signatures(sorted(signatures), n_max, window_c, max_den)
    sig_to_group = {}
    for gi, g in enumerate(groups):
        for sig in g.signatures:
            sig_to_group[sig] = gi
    classes = []
    field_descriptors = [F.descriptor() for F in fields]
    q_of = {F.descriptor(): F.q for F in fields}
    # canonical class order: nonempty by (dim, measure) descending, empty last
    order = sorted(
        range(len(groups)),
        key=lambda gi: (
            groups[gi].invariant.is_empty,
            tuple(-v for v in _order_key(groups[gi].invariant)),
        ),
    )
    for rank, gi in enumerate(order):
        members: dict[str, list[tuple[int, ...]]] = {}
        counts_out: dict[str, dict[tuple[int, ...], int]] = {}
        for fd in field_descriptors:
            q = q_of[fd]
            mine = [(t, N) for t, N in sorted(per_field_counts[fd].items())
                    if sig_to_group.get((q, N)) == gi]
            if mine:
                members[fd] = [t for t, _ in mine]
                counts_out[fd] = dict(mine)
        classes.append(ParameterClass(
            class_id=f"class_{rank}",
            invariant=groups[gi].invariant,
            members=members,
            counts=counts_out,
            uniform=set(members) == set(field_descriptors),
        ))
    return classes


def _order_key(inv: DimMeasure) -> tuple:
    if inv.is_empty:
        return (0, Fraction(0))
    return (inv.dim, inv.measure)


def _fiber_counts(S: DefinableSet, F: FieldSpec) -> dict[tuple[int, ...], int]:
    """Exact count of S(x, b) for every parameter tuple b, via one compiled pass."""
    pred = CompiledPredicate(S.formula, F, S.objects + S.params)
    env = pred.env()
    fn = pred.fn
    n, m = len(S.objects), len(S.params)
    q = F.q
    out = {}
    for pidx in range(q**m):
        pt = index_tuple(pidx, q, m)
        env[n:n + m] = pt
        total = 0
        for oidx in range(q**n):
            ot = index_tuple(oidx, q, n)
            env[:n] = ot
            if fn(env):
                total += 1
        out[pt] = total
    return out
