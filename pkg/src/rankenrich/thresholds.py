"""Minimal enrichment thresholds: closed-form bounds and constructions.

Uniform enrichment raises one common threshold ``t`` on every query;
generalized enrichment chooses a per-query vector of minimal L1 norm.
Both calculators return a :class:`ThresholdBound` carrying the critical
value, whether the game needs to *exceed* it strictly, and the parameter
region the bound came from.  Strict bounds materialize as ``value + E``
(formal infinitesimal) by default, or ``value + delta`` for callers that
need plain rationals.

``pack_thresholds_into_documents`` turns a threshold vector back into a
small set of static documents (first-fit decreasing), the form in which a
mediator would actually enrich the corpus.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .epsrational import EPS, ZERO, EpsRational
from . import arrangements
from .game import Document

Frac = Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


class Region(enum.Enum):
    NO_ENRICHMENT_NEEDED = "NoEnrichmentNeeded"
    MEDIUM_PEAK = "MediumPeak"
    LARGE_PEAK_DIVISIBLE = "LargePeakDivisible"
    LARGE_PEAK_NON_DIVISIBLE = "LargePeakNonDivisible"
    GENERAL_MOD_ZERO = "GeneralModZero"
    GENERAL_MOD_MIDDLE = "GeneralModMiddle"
    GENERAL_MOD_N_MINUS_1 = "GeneralModNMinus1"


@dataclass(frozen=True)
class ThresholdBound:
    """Critical threshold value (or norm), with strictness and region tag."""

    value: Fraction
    strict: bool
    region: Region
    n: int
    m: int
    p: Fraction

    @property
    def k(self) -> int:
        """Largest win count a single budget supports at the peak: floor(1/p)."""
        return floor_frac(1 / self.p)

    @property
    def z1(self) -> int:
        return self.m // self.n

    @property
    def z2(self) -> int:
        return self.m % self.n


def no_enrichment_threshold(n: int, m: int) -> Fraction:
    """Peak ceiling below which the plain game already has an equilibrium.

    Uses the ceiling applied to ``2m/n - 1`` as a whole.
    """
    c = max(ceil_frac(Fraction(2 * m, n) - 1), 1)
    return Fraction(1, c)


def no_enrichment_threshold_alt(n: int, m: int) -> Fraction:
    """Same ceiling written as ``ceil(2m/n) - 1``; equal for every n, m."""
    c = max(ceil_frac(Fraction(2 * m, n)) - 1, 1)
    return Fraction(1, c)


def uniform_min_threshold(n: int, m: int, p) -> ThresholdBound:
    """Minimal uniform threshold stabilizing the n-player, m-query game.

    Case split on the peak value:

    * small peak: no enrichment needed, bound 0;
    * medium peak (every winner can sit exactly at the peak): the bound
      keeps the most-exposed player (the one with the most solo wins) from
      affording one extra query, and must be exceeded strictly;
    * large peak, m divisible by n: (1 - n/m)(n/m), strict;
    * large peak otherwise: 1/ceil(m/n), attained non-strictly.
    """
    p = _frac(p)
    if not (0 < p <= 1):
        raise ValueError(f"peak must lie in (0, 1], got {p}")
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if m <= n or p <= no_enrichment_threshold(n, m):
        return ThresholdBound(Fraction(0), False, Region.NO_ENRICHMENT_NEEDED, n, m, p)
    cm = ceil_frac(Fraction(m, n))
    if p <= Fraction(1, cm):
        k = floor_frac(1 / p)
        beta_max = ceil_frac(Fraction(2 * m, n)) - k
        assert beta_max >= 1, "empty medium-peak interval should be unreachable"
        value = p - (p * (k + 1) - 1) / beta_max
        return ThresholdBound(value, True, Region.MEDIUM_PEAK, n, m, p)
    z1, z2 = divmod(m, n)
    if z2 == 0:
        value = (1 - Fraction(n, m)) * Fraction(n, m)
        return ThresholdBound(value, True, Region.LARGE_PEAK_DIVISIBLE, n, m, p)
    return ThresholdBound(Fraction(1, cm), False, Region.LARGE_PEAK_NON_DIVISIBLE, n, m, p)


def general_min_threshold_norm(n: int, m: int, p) -> ThresholdBound:
    """Minimal L1 norm of a per-query threshold vector stabilizing the game.

    The medium-peak range here runs up to ``1/(floor(m/n)+1)`` (its own
    printed boundary, which differs from the uniform calculator's when n
    divides m); the large-peak norm splits on ``m mod n``.
    """
    p = _frac(p)
    if not (0 < p <= 1):
        raise ValueError(f"peak must lie in (0, 1], got {p}")
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if m <= n or p <= no_enrichment_threshold(n, m):
        return ThresholdBound(Fraction(0), False, Region.NO_ENRICHMENT_NEEDED, n, m, p)
    z1, z2 = divmod(m, n)
    if p <= Fraction(1, z1 + 1):
        k = floor_frac(1 / p)
        value = n * (1 - p) - 2 * p * (n * k - m)
        return ThresholdBound(value, True, Region.MEDIUM_PEAK, n, m, p)
    if z2 == 0:
        value = Fraction(m - n) / (Fraction(m, n) + 1)
        return ThresholdBound(value, False, Region.GENERAL_MOD_ZERO, n, m, p)
    if z2 <= n - 2:
        value = Fraction(m - n, ceil_frac(Fraction(m, n)))
        return ThresholdBound(value, True, Region.GENERAL_MOD_MIDDLE, n, m, p)
    value = n * (1 - Fraction(1, ceil_frac(Fraction(m, n))))
    return ThresholdBound(value, True, Region.GENERAL_MOD_N_MINUS_1, n, m, p)


def materialize(bound: ThresholdBound, delta: Optional[Fraction] = None) -> EpsRational:
    """Turn a bound into an actual threshold value.

    Strict bounds become ``value + E`` under the default policy; passing a
    rational ``delta`` > 0 gives a concrete value for plain-rational
    consumers.  Non-strict bounds pass through unchanged.
    """
    if delta is not None:
        delta = _frac(delta)
        if delta <= 0:
            raise ValueError(f"delta must be positive, got {delta}")
    if not bound.strict:
        return EpsRational(bound.value)
    if delta is None:
        return EpsRational(bound.value) + EPS
    return EpsRational(bound.value + delta)


def construct_threshold_vector(n: int, m: int, p) -> tuple[EpsRational, ...]:
    """Minimal-norm per-query threshold vector for the game.

    In the large-peak region the vector is positive exactly on the queries
    where the companion equilibrium has a unique winner (threshold equal to
    the winning value there, with the strictness infinitesimal folded into
    the cheapest slots); tied queries need no threshold at all.  Below the
    large-peak region the uniform vector already attains the optimum and is
    returned instead.
    """
    p = _frac(p)
    bound = general_min_threshold_norm(n, m, p)
    if bound.region is Region.NO_ENRICHMENT_NEEDED:
        return tuple(ZERO for _ in range(m))
    if bound.region is Region.MEDIUM_PEAK:
        t = materialize(uniform_min_threshold(n, m, p))
        return tuple(t for _ in range(m))

    z1, z2 = divmod(m, n)
    w = Fraction(1, z1 + 1)
    arr = arrangements.large_peak_arrangement(n, m, style="min_norm")
    ts: list[EpsRational] = [ZERO] * m
    if z2 == 0:
        # Every solo query carries the full winning value; norm is exact.
        for qs in arr.solo:
            for q in qs:
                ts[q] = EpsRational(w)
    elif n == 2:  # z2 == n - 1 with no all-solo player: push E onto each solo
        for qs in arr.solo:
            for q in qs:
                ts[q] = EpsRational(w) + EPS
    else:
        for i, qs in enumerate(arr.solo):
            if arr.tie_degree(i) == 0:
                # All-solo players must strictly exceed 1 - w in total.
                for q in qs[:-1]:
                    ts[q] = EpsRational(w)
                ts[qs[-1]] = EPS
            elif arr.tie_degree(i) == 1:
                for q in qs:
                    ts[q] = EpsRational(w)
            else:
                for q in qs:
                    ts[q] = EpsRational(w)
    return tuple(ts)


def pack_thresholds_into_documents(thresholds: Sequence[EpsRational]) -> list[Document]:
    """Pack threshold values into static documents by first-fit decreasing.

    Items are whole threshold entries (infinitesimal parts ride along); each
    returned document sums to at most 1 and realizes the vector entrywise as
    the per-query maximum over the set.
    """
    m = len(thresholds)
    items = []
    for j, t in enumerate(thresholds):
        t = EpsRational.coerce(t)
        if t > 1:
            raise ValueError(f"threshold {t} at query {j} exceeds 1")
        if t < 0:
            raise ValueError(f"threshold {t} at query {j} is negative")
        if t != ZERO:
            items.append((j, t))
    items.sort(key=lambda it: (it[1].base, it[1].eps), reverse=True)

    bins: list[dict[int, EpsRational]] = []
    bin_sums: list[EpsRational] = []
    for j, t in items:
        for b, total in enumerate(bin_sums):
            if total + t <= 1:
                bins[b][j] = t
                bin_sums[b] = total + t
                break
        else:
            bins.append({j: t})
            bin_sums.append(t)

    docs = []
    for content in bins:
        weights = [ZERO] * m
        for j, t in content.items():
            weights[j] = t
        docs.append(Document(tuple(weights)))
    return docs
