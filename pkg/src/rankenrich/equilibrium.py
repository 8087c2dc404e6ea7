"""Equilibrium construction and exact verification.

The heart of this module is an exact best-response oracle.  Against a fixed
opposing profile, a player's outcome at each query is fully determined by
one of three intents: skip it, tie the current winners, or win it alone.
Each intent has a cheapest realizing weight (threshold for an uncovered
query; the winners' height for a tie; an infinitesimal more than that for a
solo win), so best response reduces to a multiple-choice knapsack with
exact rational-plus-infinitesimal costs, solved by branch and bound.

Constructions realize the winner arrangements behind the threshold bounds:
balanced solo counts at the peak for medium peaks, equal-value solo/tie
layouts for large peaks, and stacked profiles (with sub-winner padding)
for games that need no enrichment at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

from .arrangements import (
    Arrangement,
    balanced_parts,
    large_peak_arrangement,
    medium_peak_arrangement,
    pair_tie_degrees,
)
from .epsrational import EPS, ZERO, EpsRational, eps_max
from .game import Document, GameSpec, StrategyProfile, evaluate, score
from .thresholds import (
    Region,
    ceil_frac,
    construct_threshold_vector,
    floor_frac,
    uniform_min_threshold,
)

Frac = Fraction


class ThresholdBelowBound(ValueError):
    """The supplied thresholds do not meet the applicable bound."""


class RegionMismatch(ValueError):
    """The supplied thresholds do not fit any known construction."""


# ---------------------------------------------------------------------------
# best-response oracle
# ---------------------------------------------------------------------------

_SUPPORTED_PEAKS = ("tent", "plateau")

_SKIP = "skip"
_TIE = "tie"
_SOLO = "solo"


@dataclass(frozen=True)
class BestResponseResult:
    strategy: Document
    utility: Fraction
    solo: frozenset[int]
    tie: frozenset[int]
    deviation_type: Optional[str]  # "type1" | "type2" | None


@dataclass(frozen=True)
class EquilibriumVerdict:
    is_equilibrium: bool
    witness: Optional[tuple[int, BestResponseResult]]


def _action_menu(spec: GameSpec, profile: StrategyProfile, i: int):
    """Per-query list of (cost, gain, kind) actions available to player i."""
    if spec.peak_fn not in _SUPPORTED_PEAKS:
        raise NotImplementedError(
            f"best response inversion is defined for {_SUPPORTED_PEAKS}, "
            f"not {spec.peak_fn!r}")
    menu = []
    one = Fraction(1)
    for j in range(spec.m):
        t = spec.thresholds[j]
        tops: list[EpsRational] = []
        for k in range(spec.n):
            if k == i:
                continue
            w = profile[k][j]
            if w >= t:
                tops.append(spec.score(w))
        opts = []
        if not tops:
            # Nobody else meets the threshold; meeting it exactly wins
            # (ties against static documents go to the player).
            opts.append((t, one, _SOLO))
        else:
            top = eps_max(*tops)
            h = sum(1 for s in tops if s == top)
            omega = top * spec.p  # cheapest weight reaching the top score
            if omega >= t:
                opts.append((omega, Fraction(1, h + 1), _TIE))
            if top < 1:
                opts.append((eps_max(omega + EPS, t), one, _SOLO))
        menu.append(opts)
    return menu


def _scale(menu):
    denoms = [1]
    gdenoms = [1]
    for opts in menu:
        for cost, gain, _ in opts:
            denoms.append(cost.base.denominator)
            denoms.append(cost.eps.denominator)
            gdenoms.append(gain.denominator)
    d = lcm(*denoms)
    g = lcm(*gdenoms)
    items = []
    for opts in menu:
        io = []
        for cost, gain, kind in opts:
            io.append((
                int(cost.base * d),
                int(cost.eps * d),
                int(gain * g),
                kind,
                cost,
            ))
        io.sort(key=lambda o: -o[2])
        items.append(io)
    return d, g, items


def _ordered(items):
    def best_ratio(opts):
        best = 0.0
        for cb, ce, gain, _, _ in opts:
            if gain <= 0:
                continue
            denom = cb + ce * 1e-9
            best = max(best, gain / denom if denom > 0 else gain * 1e15)
        return best

    return sorted(range(len(items)), key=lambda j: -best_ratio(items[j]))


def _suffix_bounds(items, order):
    min_cost = []
    max_gain = []
    for j in order:
        min_cost.append(min(cb for cb, _, _, _, _ in items[j]))
        max_gain.append(max(g for _, _, g, _, _ in items[j]))
    return min_cost, max_gain


def _bound(pos, rem, min_cost, max_gain):
    total = 0
    for t in range(pos, len(min_cost)):
        c, g = min_cost[t], max_gain[t]
        if c == 0:
            total += g
        elif c <= rem:
            total += g
            rem -= c
        else:
            if rem > 0:
                return total + Fraction(g * rem, c)
            return total
    return total


def _feasible(used_b, used_e, budget):
    return used_b < budget or (used_b == budget and used_e <= 0)


def _search_max(items, order, budget, min_cost, max_gain):
    m = len(order)
    best = 0
    best_sel: list[Optional[int]] = [None] * m

    sel: list[Optional[int]] = [None] * m

    def dfs(pos, used_b, used_e, gain):
        nonlocal best, best_sel
        if gain > best:
            best = gain
            best_sel = sel.copy()
        if pos == m:
            return
        if gain + _bound(pos, budget - used_b, min_cost, max_gain) <= best:
            return
        opts = items[order[pos]]
        for oi, (cb, ce, g, _, _) in enumerate(opts):
            nb, ne = used_b + cb, used_e + ce
            if not _feasible(nb, ne, budget):
                continue
            sel[pos] = oi
            dfs(pos + 1, nb, ne, gain + g)
            sel[pos] = None
        dfs(pos + 1, used_b, used_e, gain)

    dfs(0, 0, 0, 0)
    return best, best_sel


def _search_all(items, order, budget, min_cost, max_gain, target, limit=200_000):
    m = len(order)
    sols: list[list[Optional[int]]] = []
    sel: list[Optional[int]] = [None] * m

    def dfs(pos, used_b, used_e, gain):
        if gain + _bound(pos, budget - used_b, min_cost, max_gain) < target:
            return
        if pos == m:
            if gain == target:
                if len(sols) >= limit:
                    raise RuntimeError("too many optimal best responses to enumerate")
                sols.append(sel.copy())
            return
        opts = items[order[pos]]
        for oi, (cb, ce, g, _, _) in enumerate(opts):
            nb, ne = used_b + cb, used_e + ce
            if not _feasible(nb, ne, budget):
                continue
            sel[pos] = oi
            dfs(pos + 1, nb, ne, gain + g)
            sel[pos] = None
        dfs(pos + 1, used_b, used_e, gain)

    dfs(0, 0, 0, 0)
    return sols


def _selection_to_document(spec, items, order, sel) -> Document:
    weights = [ZERO] * spec.m
    for pos, oi in enumerate(sel):
        if oi is None:
            continue
        j = order[pos]
        _, _, _, _, cost = items[j][oi]
        weights[j] = cost
    return Document(tuple(weights))


def _classify(spec: GameSpec, solo: frozenset[int], tie: frozenset[int]) -> Optional[str]:
    z1 = spec.m // spec.n
    wins = len(solo) + len(tie)
    if wins == z1 and len(solo) == z1:
        return "type1"
    if wins == z1 + 1 and len(solo) >= z1 - 1:
        return "type2"
    return None


def best_response(spec: GameSpec, profile: StrategyProfile, i: int) -> BestResponseResult:
    """Exact utility-maximizing response of player ``i`` against the others.

    Searches the per-query action lattice (skip / tie / solo at the cheapest
    realizing weight) by branch and bound with an admissible fractional
    bound; every document's outcome is replicated at equal or lower cost by
    some lattice point, so the returned utility is the true maximum over
    the whole continuum of documents.
    """
    if not (0 <= i < spec.n):
        raise ValueError(f"player index {i} out of range")
    if spec.m > 16:
        raise ValueError("exhaustive best response supports at most 16 queries")
    menu = _action_menu(spec, profile, i)
    d, g, items = _scale(menu)
    order = _ordered(items)
    min_cost, max_gain = _suffix_bounds(items, order)
    best, best_sel = _search_max(items, order, d, min_cost, max_gain)
    doc = _selection_to_document(spec, items, order, best_sel)
    outcome = evaluate(spec, profile.replace(i, doc))
    utility = Fraction(best, g)
    assert outcome.utilities[i] == utility, "oracle bookkeeping mismatch"
    solo, tie = outcome.solo_sets[i], outcome.tie_sets[i]
    return BestResponseResult(doc, utility, solo, tie, _classify(spec, solo, tie))


def enumerate_best_responses(spec: GameSpec, profile: StrategyProfile, i: int) -> list[Document]:
    """All optimal lattice responses of player ``i`` (outcome-distinct)."""
    menu = _action_menu(spec, profile, i)
    d, g, items = _scale(menu)
    order = _ordered(items)
    min_cost, max_gain = _suffix_bounds(items, order)
    best, _ = _search_max(items, order, d, min_cost, max_gain)
    sols = _search_all(items, order, d, min_cost, max_gain, best)
    docs = []
    seen = set()
    for sel in sols:
        doc = _selection_to_document(spec, items, order, sel)
        key = doc.sort_key()
        if key not in seen:
            seen.add(key)
            docs.append(doc)
    return docs


def verify_equilibrium(spec: GameSpec, profile: StrategyProfile) -> EquilibriumVerdict:
    """Check that no player has a strictly improving deviation.

    Returns a witness (player plus their improving best response) when the
    profile is not an equilibrium.
    """
    outcome = evaluate(spec, profile)
    for i in range(spec.n):
        br = best_response(spec, profile, i)
        if br.utility > outcome.utilities[i]:
            return EquilibriumVerdict(False, (i, br))
    return EquilibriumVerdict(True, None)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def _max_wins(t: EpsRational, m: int) -> int:
    if t <= 0:
        return m
    c = m
    while c > 0 and t * c > 1:
        c -= 1
    return c


def _arranged_profile(spec: GameSpec, arr: Arrangement, weight: EpsRational) -> StrategyProfile:
    rows = [[ZERO] * spec.m for _ in range(spec.n)]
    for i, qs in enumerate(arr.solo):
        for q in qs:
            rows[i][q] = weight
    for q, (a, b) in arr.ties:
        rows[a][q] = weight
        rows[b][q] = weight
    return StrategyProfile(tuple(Document(tuple(r)) for r in rows))


def _disjoint_solo_profile(spec: GameSpec, count: int, weight: EpsRational) -> StrategyProfile:
    if count * spec.n > spec.m:
        raise ValueError("not enough queries for disjoint solo blocks")
    rows = [[ZERO] * spec.m for _ in range(spec.n)]
    for i in range(spec.n):
        for q in range(i * count, (i + 1) * count):
            rows[i][q] = weight
    return StrategyProfile(tuple(Document(tuple(r)) for r in rows))


def _no_enrichment_profile(spec: GameSpec) -> StrategyProfile:
    """Equilibrium of a small-peak game (thresholds not needed).

    Everyone stacks at the peak.  When budgets cannot give every query two
    winners, solo winners appear; a sub-peak pad under each solo query pins
    the winner's budget so no one can afford an extra query.
    """
    n, m, p = spec.n, spec.m, spec.p
    k = floor_frac(1 / p)
    peak = EpsRational(p)
    if k >= m:
        row = tuple(peak for _ in range(m))
        return StrategyProfile(tuple(Document(row) for _ in range(n)))
    if n * k >= 2 * m:
        counts = balanced_parts(n * k, m)
        assert min(counts) >= 2
        rows = [[ZERO] * m for _ in range(n)]
        nxt = 0
        for j, h in enumerate(counts):
            for _ in range(h):
                rows[nxt][j] = peak
                nxt = (nxt + 1) % n
        return StrategyProfile(tuple(Document(tuple(r)) for r in rows))
    solos = 2 * m - n * k
    if solos > n:
        raise RegionMismatch(
            f"no enrichment-free construction for n={n}, m={m}, p={p}")
    betas = [1] * solos + [0] * (n - solos)
    edges = pair_tie_degrees([k - b for b in betas])
    rows = [[ZERO] * m for _ in range(n)]
    for i in range(solos):
        rows[i][i] = peak
    q = solos
    for a, b in edges:
        rows[a][q] = peak
        rows[b][q] = peak
        q += 1
    assert q == m
    pad = 1 - k * p
    if pad > 0:
        for i in range(solos):
            rows[(i + 1) % n][i] = EpsRational(pad)
    return StrategyProfile(tuple(Document(tuple(r)) for r in rows))


def _uniform_equilibrium(spec: GameSpec) -> StrategyProfile:
    n, m, p = spec.n, spec.m, spec.p
    t = spec.thresholds[0]
    bound = uniform_min_threshold(n, m, p)
    meets = t > bound.value if bound.strict else t >= bound.value
    if not meets:
        raise ThresholdBelowBound(
            f"threshold {t} is below the {bound.region.value} bound {bound.value}"
            f"{' (strict)' if bound.strict else ''}")
    if bound.region is Region.NO_ENRICHMENT_NEEDED:
        return _no_enrichment_profile(spec)
    if bound.region is Region.MEDIUM_PEAK:
        k = floor_frac(1 / p)
        arr = medium_peak_arrangement(n, m, k)
        return _arranged_profile(spec, arr, EpsRational(p))
    z1, z2 = divmod(m, n)
    if z2 == 0:
        inv = EpsRational(Fraction(1, z1))
        if t <= inv:
            return _disjoint_solo_profile(spec, z1, inv)
        return _disjoint_solo_profile(spec, _max_wins(t, m), t)
    w = EpsRational(Fraction(1, z1 + 1))
    if t == w:
        arr = large_peak_arrangement(n, m, style="balanced")
        return _arranged_profile(spec, arr, w)
    return _disjoint_solo_profile(spec, _max_wins(t, m), t)


def _general_equilibrium(spec: GameSpec) -> StrategyProfile:
    n, m, p = spec.n, spec.m, spec.p
    expected = construct_threshold_vector(n, m, p)
    if tuple(spec.thresholds) != expected:
        raise RegionMismatch(
            "generalized construction requires the minimal-norm threshold "
            "vector produced by construct_threshold_vector")
    z1, z2 = divmod(m, n)
    w = Fraction(1, z1 + 1)
    arr = large_peak_arrangement(n, m, style="min_norm")
    if n == 2 and z2 == 1:
        # Solo thresholds sit an infinitesimal above the winning value, so
        # the solo weights follow and the tie absorbs the slack.
        rows = [[ZERO] * m for _ in range(n)]
        solo_w = EpsRational(w) + EPS
        tie_w = EpsRational(w) - EPS * z1
        for i, qs in enumerate(arr.solo):
            for q in qs:
                rows[i][q] = solo_w
        for q, (a, b) in arr.ties:
            rows[a][q] = tie_w
            rows[b][q] = tie_w
        return StrategyProfile(tuple(Document(tuple(r)) for r in rows))
    return _arranged_profile(spec, arr, EpsRational(w))


def construct_equilibrium(n: int, m: int, p, thresholds) -> StrategyProfile:
    """Build a pure equilibrium for the given game.

    ``thresholds`` may be a single uniform value or a per-query vector; it
    must meet the applicable bound (use :func:`materialize` on a calculator
    result).  The returned profile verifies under
    :func:`verify_equilibrium`.
    """
    if isinstance(thresholds, (int, Fraction, str, EpsRational)):
        spec = GameSpec.uniform(n, m, p, thresholds)
    else:
        spec = GameSpec(n, m, Fraction(p), tuple(thresholds))
    if n == 1:
        zero = StrategyProfile((Document(tuple(ZERO for _ in range(m))),))
        return StrategyProfile((best_response(spec, zero, 0).strategy,))
    if spec.is_uniform:
        return _uniform_equilibrium(spec)
    return _general_equilibrium(spec)


# ---------------------------------------------------------------------------
# grid search (evidence harness for small games)
# ---------------------------------------------------------------------------

def _grid_documents(m: int, g: int) -> list[tuple[Fraction, ...]]:
    docs: list[tuple[Fraction, ...]] = []

    def rec(prefix, remaining):
        if len(prefix) == m:
            docs.append(tuple(Fraction(a, g) for a in prefix))
            return
        for a in range(remaining + 1):
            rec(prefix + [a], remaining - a)

    rec([], g)
    return docs


def _grid_utilities(spec: GameSpec, rows: Sequence[tuple[Fraction, ...]], score_of):
    n, m = spec.n, spec.m
    utils = [Fraction(0)] * n
    for j in range(m):
        t = spec.thresholds[j]
        eligible = [i for i in range(n) if rows[i][j] >= t.base and
                    (rows[i][j] > t.base or t.eps <= 0)]
        if not eligible:
            continue
        top = None
        winners: list[int] = []
        for i in eligible:
            s = score_of(rows[i][j])
            if top is None or s > top:
                top, winners = s, [i]
            elif s == top:
                winners.append(i)
        share = Fraction(1, len(winners))
        for i in winners:
            utils[i] += share
    return tuple(utils)


def grid_search_equilibria(spec: GameSpec, g: int) -> list[StrategyProfile]:
    """All grid-restricted pure equilibria of a tiny game, up to player order.

    Strategies and deviations are both restricted to weights in
    ``{0, 1/g, ..., 1}``; existence on the grid is evidence, not proof, for
    the continuum game.
    """
    if spec.n > 3 or spec.m > 4 or g > 12:
        raise ValueError("grid search is limited to n <= 3, m <= 4, g <= 12")
    weights = _grid_documents(spec.m, g)
    cache: dict[Fraction, EpsRational] = {}

    def score_of(w: Fraction) -> EpsRational:
        if w not in cache:
            cache[w] = score(EpsRational(w), spec.p, spec.peak_fn)
        return cache[w]

    results: list[StrategyProfile] = []
    if spec.n == 1:
        best = None
        scored = []
        for row in weights:
            u = _grid_utilities(spec, (row,), score_of)[0]
            scored.append(u)
            if best is None or u > best:
                best = u
        for row, u in zip(weights, scored):
            if u == best:
                results.append(StrategyProfile.of(row))
        return results

    if spec.n == 2:
        nd = len(weights)
        table = [[None] * nd for _ in range(nd)]
        for a in range(nd):
            for b in range(a, nd):
                ua, ub = _grid_utilities(spec, (weights[a], weights[b]), score_of)
                table[a][b] = ua
                table[b][a] = ub
        col_best = [max(table[a][b] for a in range(nd)) for b in range(nd)]
        for a in range(nd):
            for b in range(a, nd):
                if table[a][b] == col_best[b] and table[b][a] == col_best[a]:
                    results.append(StrategyProfile.of(weights[a], weights[b]))
        return results

    # n == 3
    nd = len(weights)
    br_cache: dict[tuple[int, int], Fraction] = {}

    def br_value(b: int, c: int) -> Fraction:
        key = (b, c) if b <= c else (c, b)
        if key not in br_cache:
            br_cache[key] = max(
                _grid_utilities(spec, (weights[a], weights[key[0]], weights[key[1]]),
                                score_of)[0]
                for a in range(nd))
        return br_cache[key]

    for a in range(nd):
        for b in range(a, nd):
            for c in range(b, nd):
                us = _grid_utilities(spec, (weights[a], weights[b], weights[c]), score_of)
                if (us[0] == br_value(b, c) and us[1] == br_value(a, c)
                        and us[2] == br_value(a, b)):
                    results.append(StrategyProfile.of(weights[a], weights[b], weights[c]))
    return results
