"""Game state, scoring, winner determination and utilities.

The model: ``n`` publishers each write one document, a weight vector over
``m`` queries on the unit simplex (entries in [0,1], sum at most 1).  A
single-peak scoring function maps a weight to a relevance score; per query,
the highest-scoring document among those meeting that query's threshold
wins, with uniform tie splitting among real players.  A document tied with
a static (threshold) document wins: meeting the threshold exactly counts.

All quantities are exact (`EpsRational` weights, `Fraction` utilities).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .epsrational import EPS, ZERO, EpsRational, eps_max

Frac = Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"expected a rational, got {x!r}")


# ---------------------------------------------------------------------------
# single-peak scoring
# ---------------------------------------------------------------------------

def _tent(weight: EpsRational, p: Fraction) -> EpsRational:
    if weight <= p:
        return weight / p
    # p < 1 is implied: weight > p and weight <= 1
    return (EpsRational(1) - weight) / (1 - p)


def _square(weight: EpsRational, p: Fraction) -> EpsRational:
    # Strictly increasing transform of the tent on [0, p]; used to check that
    # winner sets depend only on the order below the peak.
    s = _tent(weight, p)
    if s.eps != 0:
        # (a + bE)^2 = a^2 + 2abE, dropping the E^2 term (exact order-wise
        # for comparisons among values with matching bases is NOT guaranteed,
        # so restrict to rational scores).
        raise ValueError("square peak function is only defined for rational weights")
    return EpsRational(s.base * s.base)


def _plateau(weight: EpsRational, p: Fraction) -> EpsRational:
    # Classical relevance: increasing up to the peak, constant afterwards.
    if weight <= p:
        return weight / p
    return EpsRational(1)


PEAK_FNS: dict[str, Callable[[EpsRational, Fraction], EpsRational]] = {
    "tent": _tent,
    "square": _square,
    "plateau": _plateau,
}


def score(weight: EpsRational | Fraction | int, p: Fraction | int | str,
          peak_fn: str = "tent") -> EpsRational:
    """Relevance score of a query weight under the given single-peak function.

    The canonical tent rises linearly from 0 at weight 0 to 1 at the peak
    ``p`` and falls linearly back to 0 at weight 1 (identity when ``p`` = 1).
    """
    w = EpsRational.coerce(weight) if not isinstance(weight, EpsRational) else weight
    pf = _frac(p)
    if not (0 < pf <= 1):
        raise ValueError(f"peak must lie in (0, 1], got {pf}")
    if w < 0 or w > 1:
        raise ValueError(f"weight {w} outside [0, 1]")
    try:
        fn = PEAK_FNS[peak_fn]
    except KeyError:
        raise ValueError(f"unknown peak function {peak_fn!r}") from None
    return fn(w, pf)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Document:
    """One publisher's weight split over the queries (unit simplex)."""

    weights: tuple[EpsRational, ...]

    def __post_init__(self):
        ws = tuple(EpsRational.coerce(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        total = EpsRational(0)
        for w in ws:
            if w < 0 or w > 1:
                raise ValueError(f"document weight {w} outside [0, 1]")
            total = total + w
        if total > 1:
            raise ValueError(f"document weights sum to {total} > 1")

    @staticmethod
    def of(*weights) -> "Document":
        return Document(tuple(EpsRational.coerce(_maybe_frac(w)) for w in weights))

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, j: int) -> EpsRational:
        return self.weights[j]

    def sort_key(self):
        return tuple((w.base, w.eps) for w in self.weights)


def _maybe_frac(w):
    if isinstance(w, str):
        return Fraction(w)
    return w


@dataclass(frozen=True)
class GameSpec:
    """A thresholded ranking game: players, queries, peak and thresholds."""

    n: int
    m: int
    p: Fraction
    thresholds: tuple[EpsRational, ...]
    peak_fn: str = "tent"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("need at least one player and one query")
        object.__setattr__(self, "p", _frac(self.p))
        if not (0 < self.p <= 1):
            raise ValueError(f"peak must lie in (0, 1], got {self.p}")
        ts = tuple(EpsRational.coerce(_maybe_frac(t)) for t in self.thresholds)
        if len(ts) != self.m:
            raise ValueError(f"expected {self.m} thresholds, got {len(ts)}")
        for t in ts:
            if t < 0 or t > self.p:
                raise ValueError(
                    f"threshold {t} outside [0, p]; thresholds above the peak "
                    f"would invert under the scoring function")
        object.__setattr__(self, "thresholds", ts)
        if self.peak_fn not in PEAK_FNS:
            raise ValueError(f"unknown peak function {self.peak_fn!r}")

    @staticmethod
    def uniform(n: int, m: int, p, t, peak_fn: str = "tent") -> "GameSpec":
        tv = EpsRational.coerce(_maybe_frac(t))
        return GameSpec(n, m, _frac(p), tuple(tv for _ in range(m)), peak_fn)

    @property
    def is_uniform(self) -> bool:
        return all(t == self.thresholds[0] for t in self.thresholds)

    def score(self, weight: EpsRational) -> EpsRational:
        return score(weight, self.p, self.peak_fn)


@dataclass(frozen=True)
class StrategyProfile:
    """The tuple of all players' documents."""

    documents: tuple[Document, ...]

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))

    @staticmethod
    def of(*docs: Iterable) -> "StrategyProfile":
        return StrategyProfile(tuple(
            d if isinstance(d, Document) else Document.of(*d) for d in docs))

    def __len__(self) -> int:
        return len(self.documents)

    def __getitem__(self, i: int) -> Document:
        return self.documents[i]

    def replace(self, i: int, doc: Document) -> "StrategyProfile":
        docs = list(self.documents)
        docs[i] = doc
        return StrategyProfile(tuple(docs))

    def without(self, i: int) -> tuple[Document, ...]:
        return self.documents[:i] + self.documents[i + 1:]


@dataclass(frozen=True)
class QueryOutcome:
    """Resolution of a single query: winning value, winners, coverage."""

    winning_value: EpsRational
    winners: frozenset[int]
    h: int
    covered: bool


@dataclass(frozen=True)
class ProfileOutcome:
    """Everything downstream modules need about one evaluated profile."""

    queries: tuple[QueryOutcome, ...]
    utilities: tuple[Fraction, ...]
    solo_sets: tuple[frozenset[int], ...]
    tie_sets: tuple[frozenset[int], ...]

    def win_set(self, i: int) -> frozenset[int]:
        return self.solo_sets[i] | self.tie_sets[i]

    @property
    def all_covered(self) -> bool:
        return all(q.covered for q in self.queries)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def evaluate(spec: GameSpec, profile: StrategyProfile) -> ProfileOutcome:
    """Resolve winners, winner counts and utilities for a full profile.

    Per query, the players whose weight meets the threshold compete by
    score; all maximal-score contenders win and split the query's unit of
    utility evenly.  A query nobody covers has no winners; its reported
    winning value is the best weight anyone put there.
    """
    if len(profile) != spec.n:
        raise ValueError(f"profile has {len(profile)} documents, expected {spec.n}")
    for d in profile.documents:
        if len(d) != spec.m:
            raise ValueError(f"document has {len(d)} entries, expected {spec.m}")

    utilities = [Fraction(0) for _ in range(spec.n)]
    solo: list[set[int]] = [set() for _ in range(spec.n)]
    ties: list[set[int]] = [set() for _ in range(spec.n)]
    queries: list[QueryOutcome] = []

    for j in range(spec.m):
        t = spec.thresholds[j]
        eligible = [i for i in range(spec.n) if profile[i][j] >= t]
        if not eligible:
            best = eps_max(*(profile[i][j] for i in range(spec.n)))
            queries.append(QueryOutcome(best, frozenset(), 0, False))
            continue
        top_score = None
        winners: list[int] = []
        for i in eligible:
            s = spec.score(profile[i][j])
            if top_score is None or s > top_score:
                top_score, winners = s, [i]
            elif s == top_score:
                winners.append(i)
        value = eps_max(*(profile[i][j] for i in winners))
        h = len(winners)
        share = Fraction(1, h)
        for i in winners:
            utilities[i] += share
            (solo[i] if h == 1 else ties[i]).add(j)
        queries.append(QueryOutcome(value, frozenset(winners), h, True))

    return ProfileOutcome(
        queries=tuple(queries),
        utilities=tuple(utilities),
        solo_sets=tuple(frozenset(s) for s in solo),
        tie_sets=tuple(frozenset(s) for s in ties),
    )


def social_welfare(spec: GameSpec, profile: StrategyProfile) -> EpsRational:
    """Negated distance from the peak of the worst-performing query.

    Covered queries contribute their winning value; uncovered ones fall back
    to the best weight any player put there (down to -p when all are zero).
    """
    outcome = evaluate(spec, profile)
    worst = None
    for q in outcome.queries:
        gap = abs(EpsRational(spec.p) - q.winning_value)
        if worst is None or gap > worst:
            worst = gap
    assert worst is not None
    return -worst


def uncovered_queries(spec: GameSpec, profile: StrategyProfile, i: int) -> frozenset[int]:
    """Queries that drop below their threshold once player ``i`` is removed."""
    if not (0 <= i < spec.n):
        raise ValueError(f"player index {i} out of range")
    out = set()
    for j in range(spec.m):
        t = spec.thresholds[j]
        if all(profile[k][j] < t for k in range(spec.n) if k != i):
            out.add(j)
    return frozenset(out)
