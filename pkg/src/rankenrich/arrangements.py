"""Winner arrangements underlying the equilibrium constructions.

An arrangement fixes, per player, which queries they win alone and which
they share with exactly one partner.  The equilibrium constructors realize
an arrangement by placing concrete weights; the generalized threshold
construction reads off its solo queries.  Query indices are assigned
deterministically: all solo blocks first (in player order), then one query
per tie edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal


def balanced_parts(total: int, parts: int) -> list[int]:
    """Split ``total`` into ``parts`` near-equal nonnegative integers."""
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def pair_tie_degrees(degrees: list[int]) -> list[tuple[int, int]]:
    """Realize a degree sequence as a loopless multigraph, greedily.

    Repeatedly connects the two players with the largest remaining degrees
    (lowest index on ties), which succeeds for every near-equal sequence
    with an even sum.
    """
    deg = list(degrees)
    edges: list[tuple[int, int]] = []
    if sum(deg) % 2 != 0:
        raise ValueError(f"odd total tie degree: {degrees}")
    while True:
        order = sorted(range(len(deg)), key=lambda i: (-deg[i], i))
        a = order[0]
        if deg[a] == 0:
            break
        if len(order) < 2 or deg[order[1]] == 0:
            raise ValueError(f"unpairable tie degrees: {degrees}")
        b = order[1]
        deg[a] -= 1
        deg[b] -= 1
        edges.append((min(a, b), max(a, b)))
    return edges


@dataclass(frozen=True)
class Arrangement:
    """Solo and tie structure over players 0..n-1 and queries 0..m-1."""

    n: int
    m: int
    solo: tuple[tuple[int, ...], ...]           # per player, ascending
    ties: tuple[tuple[int, tuple[int, int]], ...]  # (query, (a, b)) per tie query

    def tie_degree(self, i: int) -> int:
        return sum(1 for _, pair in self.ties if i in pair)

    def tie_queries(self, i: int) -> list[int]:
        return [q for q, pair in self.ties if i in pair]

    def slots(self, i: int) -> int:
        return len(self.solo[i]) + self.tie_degree(i)

    def covered_queries(self) -> set[int]:
        out = {q for qs in self.solo for q in qs}
        out.update(q for q, _ in self.ties)
        return out


def _assemble(n: int, m: int, betas: list[int], edges: list[tuple[int, int]]) -> Arrangement:
    solo: list[tuple[int, ...]] = []
    q = 0
    for i in range(n):
        solo.append(tuple(range(q, q + betas[i])))
        q += betas[i]
    ties = []
    for a, b in edges:
        ties.append((q, (a, b)))
        q += 1
    if q > m:
        raise ValueError(f"arrangement needs {q} queries, only {m} available")
    return Arrangement(n, m, tuple(solo), tuple(ties))


def medium_peak_arrangement(n: int, m: int, k: int) -> Arrangement:
    """Each player wins exactly ``k`` query slots, one or two winners per query.

    Solo counts are balanced (the maximum is as small as possible), which is
    what makes the medium-peak threshold bound attainable.
    """
    total_solo = 2 * m - n * k
    if total_solo < 0 or n * k < m:
        raise ValueError(f"no k-slot arrangement for n={n}, m={m}, k={k}")
    betas = balanced_parts(total_solo, n)
    if max(betas) > k:
        raise ValueError(f"solo count exceeds slot count for n={n}, m={m}, k={k}")
    degrees = [k - b for b in betas]
    edges = pair_tie_degrees(degrees)
    arr = _assemble(n, m, betas, edges)
    assert len(arr.covered_queries()) == m
    return arr


def large_peak_arrangement(
    n: int, m: int, style: Literal["min_norm", "balanced"] = "balanced"
) -> Arrangement:
    """Every player wins ``floor(m/n) + 1`` slots at one common value.

    ``balanced`` spreads tie duty near-equally (every tie query keeps a
    partner who also wins solo somewhere, which is what makes lowering a
    uniform threshold immediately exploitable).  ``min_norm`` concentrates
    solo wins on as few players as possible, the shape that minimizes the
    total threshold mass needed when thresholds may differ per query.
    """
    if m <= n:
        raise ValueError("large-peak arrangement needs m > n")
    z1, z2 = divmod(m, n)
    n_tie_queries = n - z2
    if style == "min_norm":
        if z2 == 0:
            betas = [z1 - 1] * n
            edges = [(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)]
        elif z2 == n - 1:
            betas = [z1 + 1] * (n - 2) + [z1, z1]
            edges = [(n - 2, n - 1)]
        else:
            betas = [z1 + 1] * z2 + [z1 - 1] * (n - z2)
            ring = n - z2
            edges = [
                (min(z2 + i, z2 + (i + 1) % ring), max(z2 + i, z2 + (i + 1) % ring))
                for i in range(ring)
            ]
    elif style == "balanced":
        degrees = balanced_parts(2 * n_tie_queries, n)
        # Give the heavier tie duty to the last players so solo-heavy players
        # come first, matching the min_norm layout direction.
        degrees.reverse()
        betas = [z1 + 1 - d for d in degrees]
        if min(betas) < 0:
            raise ValueError(f"unbalanceable large-peak shape for n={n}, m={m}")
        edges = pair_tie_degrees(degrees)
    else:
        raise ValueError(f"unknown arrangement style {style!r}")
    arr = _assemble(n, m, betas, edges)
    assert len(arr.covered_queries()) == m
    assert all(arr.slots(i) == z1 + 1 for i in range(n))
    return arr
