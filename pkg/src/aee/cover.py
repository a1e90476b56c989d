"""Minimum source-cover solver for the source-necessity metric.

Given the support matrix, we need the smallest set of sources such that every
statement with at least one supporting source keeps a supporting source in the
set. That is exact minimum set cover over the supported rows. Instances are
tiny (engines list K <= ~8 sources), so we solve exactly by branch and bound
up to a configurable K, with a greedy fallback beyond it.

For a certified lower bound we take a packing of pairwise-disjoint supported
rows: rows that share no source must be covered by distinct sources, and a
maximum bipartite matching (Hopcroft-Karp) over the packing exhibits those
distinct sources explicitly. (A matching over all supported rows is not a
bound: one source may cover many matched rows, so the matching can exceed the
cover size.) Together with the greedy upper bound this sandwiches every solve.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .model import SUPPORTED, SupportMatrix

EXACT_SOLVE_LIMIT = 20

_INF = float("inf")


@dataclass(frozen=True)
class CoverResult:
    size: int
    witness: tuple[int, ...]  # 1-based source indices
    matching_lower_bound: int
    greedy_size: int
    exact: bool


def support_rows(matrix: SupportMatrix) -> list[frozenset[int]]:
    """Supporting-source sets for statements with at least one supported cell."""
    rows = []
    for row in matrix.cells:
        srcs = frozenset(k + 1 for k, cell in enumerate(row) if cell == SUPPORTED)
        if srcs:
            rows.append(srcs)
    return rows


def hopcroft_karp_matching(rows: list[frozenset[int]]) -> int:
    """Maximum matching size between supported statements and sources."""
    pair_row: dict[int, int] = {}
    pair_src: dict[int, int] = {}
    n = len(rows)

    def bfs() -> bool:
        dist = {}
        queue: deque[int] = deque()
        for r in range(n):
            if r not in pair_row:
                dist[r] = 0
                queue.append(r)
            else:
                dist[r] = _INF
        found = False
        while queue:
            r = queue.popleft()
            for s in rows[r]:
                mate = pair_src.get(s)
                if mate is None:
                    found = True
                elif dist[mate] == _INF:
                    dist[mate] = dist[r] + 1
                    queue.append(mate)
        bfs.dist = dist  # type: ignore[attr-defined]
        return found

    def dfs(r: int) -> bool:
        dist = bfs.dist  # type: ignore[attr-defined]
        for s in rows[r]:
            mate = pair_src.get(s)
            if mate is None or (dist[mate] == dist[r] + 1 and dfs(mate)):
                pair_row[r] = s
                pair_src[s] = r
                return True
        dist[r] = _INF
        return False

    matching = 0
    while bfs():
        for r in range(n):
            if r not in pair_row and dfs(r):
                matching += 1
    return matching


def greedy_cover(rows: list[frozenset[int]]) -> tuple[int, ...]:
    """Classic greedy: repeatedly pick the source covering most uncovered rows."""
    uncovered = set(range(len(rows)))
    chosen: list[int] = []
    while uncovered:
        best_src, best_gain = None, -1
        candidates = sorted({s for r in uncovered for s in rows[r]})
        for s in candidates:
            gain = sum(1 for r in uncovered if s in rows[r])
            if gain > best_gain:
                best_src, best_gain = s, gain
        assert best_src is not None
        chosen.append(best_src)
        uncovered = {r for r in uncovered if best_src not in rows[r]}
    return tuple(sorted(chosen))


def disjoint_row_packing(rows: list[frozenset[int]]) -> list[frozenset[int]]:
    """Greedy packing of pairwise-disjoint rows, smallest rows first.

    Any such packing needs one distinct source per row, so its size lower
    bounds the cover size.
    """
    taken: set[int] = set()
    packing: list[frozenset[int]] = []
    for r in sorted(rows, key=lambda r: (len(r), sorted(r))):
        if not (r & taken):
            packing.append(r)
            taken |= r
    return packing


def _disjoint_rows_bound(remaining: list[frozenset[int]]) -> int:
    return len(disjoint_row_packing(remaining))


def _exact_cover(rows: list[frozenset[int]], upper: tuple[int, ...]) -> tuple[int, ...]:
    """Branch and bound, branching on the row with fewest candidate sources."""
    best = list(upper)

    def recurse(chosen: set[int], remaining: list[frozenset[int]]) -> None:
        nonlocal best
        if not remaining:
            if len(chosen) < len(best):
                best = sorted(chosen)
            return
        if len(chosen) + _disjoint_rows_bound(remaining) >= len(best):
            return
        pivot = min(remaining, key=len)
        for s in sorted(pivot):
            recurse(chosen | {s}, [r for r in remaining if s not in r])

    recurse(set(), list(rows))
    return tuple(best)


def solve_min_cover(matrix: SupportMatrix, exact_limit: int = EXACT_SOLVE_LIMIT) -> CoverResult:
    """Solve the minimum source cover for a support matrix.

    Exact up to exact_limit sources; greedy (with a reported bound gap via
    matching_lower_bound vs size) beyond. The witness is re-verified to cover
    every supported row, and matching <= size <= greedy always holds.
    """
    rows = support_rows(matrix)
    if not rows:
        return CoverResult(size=0, witness=(), matching_lower_bound=0, greedy_size=0, exact=True)

    lower = hopcroft_karp_matching(disjoint_row_packing(rows))
    greedy = greedy_cover(rows)

    if matrix.cols <= exact_limit:
        witness = _exact_cover(rows, greedy)
        exact = True
    else:
        witness = greedy
        exact = False

    for r in rows:
        if not (r & set(witness)):
            raise AssertionError(f"witness {witness} fails to cover row {sorted(r)}")
    if not (lower <= len(witness) <= len(greedy)):
        raise AssertionError(
            f"cover bounds violated: matching={lower}, size={len(witness)}, greedy={len(greedy)}"
        )
    return CoverResult(
        size=len(witness),
        witness=tuple(witness),
        matching_lower_bound=lower,
        greedy_size=len(greedy),
        exact=exact,
    )
