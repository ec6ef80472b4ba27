"""Cell graphs: hexagonal service-area patches and loaded edge lists.

Cells are indexed 0..n-1.  Generated patches grow ring by ring from a
center cell of the infinite hexagonal lattice and keep their axial (q, r)
coordinates so the area can be rendered by external tools; graphs loaded
from edge-list files carry adjacency only.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

# Axial unit steps, starting in the +q direction and turning
# counterclockwise.  Ring enumeration relies on this exact order.
HEX_DIRECTIONS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))


@dataclass(frozen=True, eq=False)
class CellGraph:
    """Immutable, validated undirected cell graph.

    Attributes
    ----------
    n : int
        Number of cells.
    adjacency : tuple of tuples
        ``adjacency[i]`` is the sorted tuple of neighbors of cell ``i``.
    coords : tuple of (q, r) pairs, optional
        Axial coordinates for generated patches; ``None`` for graphs loaded
        from an edge list.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    coords: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        _check_invariants(self.n, self.adjacency)
        if self.coords is not None and len(self.coords) != self.n:
            raise ValueError("coords length does not match cell count")

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.adjacency]

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Each undirected edge once, as (i, j) with i < j, sorted."""
        return [(i, j) for i in range(self.n) for j in self.adjacency[i] if i < j]


def _check_invariants(n: int, adjacency: tuple[tuple[int, ...], ...]) -> None:
    if n < 1:
        raise ValueError("cell count must be at least 1")
    if len(adjacency) != n:
        raise ValueError(f"adjacency has {len(adjacency)} rows for {n} cells")
    for i, nbrs in enumerate(adjacency):
        for j in nbrs:
            if not 0 <= j < n:
                raise ValueError(f"edge {i}-{j}: cell id {j} out of range")
            if j == i:
                raise ValueError(f"edge {i}-{i}: self-loops are not allowed")
        if len(set(nbrs)) != len(nbrs):
            raise ValueError(f"cell {i} lists a duplicate neighbor")
        if tuple(sorted(nbrs)) != tuple(nbrs):
            raise ValueError(f"cell {i}: neighbor list is not sorted")
        for j in nbrs:
            if i not in adjacency[j]:
                raise ValueError(f"edge {i}-{j} is missing its reverse {j}-{i}")
    unreached = _unreached_from_zero(n, adjacency)
    if unreached:
        raise ValueError(
            f"graph is disconnected: cells {sorted(unreached)} are not reachable from cell 0"
        )


def _unreached_from_zero(n: int, adjacency) -> set[int]:
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in adjacency[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return set(range(n)) - seen


def _ring_coords(k: int):
    """Cells of lattice ring k, starting at (k, 0), counterclockwise."""
    if k == 0:
        yield (0, 0)
        return
    q, r = k, 0
    for side in range(6):
        dq, dr = HEX_DIRECTIONS[(side + 2) % 6]
        for _ in range(k):
            yield (q, r)
            q, r = q + dq, r + dr


def build_hex_patch(n: int) -> CellGraph:
    """Build the canonical n-cell hexagonal patch.

    Cells are taken ring by ring from the center (cell 0 is the center);
    within a ring the sweep starts at the +q neighbor and proceeds
    counterclockwise, so a given ``n`` always yields the same patch.
    Adjacency is hexagonal lattice adjacency restricted to the patch.
    """
    if n < 1:
        raise ValueError("cell count must be at least 1")
    coords: list[tuple[int, int]] = []
    k = 0
    while len(coords) < n:
        for c in _ring_coords(k):
            coords.append(c)
            if len(coords) == n:
                break
        k += 1
    index = {c: i for i, c in enumerate(coords)}
    adjacency = []
    for q, r in coords:
        nbrs = [index[(q + dq, r + dr)] for dq, dr in HEX_DIRECTIONS if (q + dq, r + dr) in index]
        adjacency.append(tuple(sorted(nbrs)))
    return CellGraph(n=n, adjacency=tuple(adjacency), coords=tuple(coords))


def from_edges(n: int, edges) -> CellGraph:
    """Build a validated CellGraph from an iterable of (i, j) pairs."""
    if n < 1:
        raise ValueError("cell count must be at least 1")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge {i}-{j}: cell id out of range for n={n}")
        if i == j:
            raise ValueError(f"edge {i}-{i}: self-loops are not allowed")
        if j in nbrs[i]:
            raise ValueError(f"edge {i}-{j} appears more than once")
        nbrs[i].add(j)
        nbrs[j].add(i)
    return CellGraph(n=n, adjacency=tuple(tuple(sorted(s)) for s in nbrs))


def parse_edge_list(text: str) -> CellGraph:
    """Parse the edge-list format: header ``n=<count>``, then ``i j`` lines.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = text.splitlines()
    header = None
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            if not line.startswith("n="):
                raise ValueError(f"line {lineno}: expected header 'n=<count>', got {line!r}")
            try:
                header = int(line[2:])
            except ValueError:
                raise ValueError(f"line {lineno}: bad cell count in {line!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'i j', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer cell id in {line!r}") from None
        edges.append((i, j))
    if header is None:
        raise ValueError("missing 'n=<count>' header line")
    return from_edges(header, edges)


def format_edge_list(graph: CellGraph) -> str:
    lines = [f"n={graph.n}"]
    lines.extend(f"{i} {j}" for i, j in graph.edges)
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path) -> CellGraph:
    """Load and validate a graph from an edge-list file."""
    return parse_edge_list(Path(path).read_text())


def save_graph(graph: CellGraph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(graph))
