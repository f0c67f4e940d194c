"""
Processor connectivity graphs and shortest-path queries.

Two built-in shapes: the 2 x m grid (m = ceil(width/2), row-major numbering,
one spare qubit for odd widths) and the 1-D line. Custom maps load from JSON.
All queries are pure and deterministic; A* ties break toward the lower node
index so identical inputs always yield identical paths.
"""
from __future__ import annotations

import heapq
import json
import math
from collections import deque


class TopologyError(ValueError):
    pass


class CouplingMap:
    """Undirected, connected physical-qubit graph."""

    __slots__ = ("n_phys", "edges", "kind", "neighbors", "_coords", "_edge_set", "_dist")

    def __init__(self, n_phys: int, edges, kind: str = "custom", coords=None):
        if n_phys < 1:
            raise TopologyError(f"need at least 1 physical qubit, got {n_phys}")
        norm = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise TopologyError(f"self-loop on node {a}")
            if not (0 <= a < n_phys and 0 <= b < n_phys):
                raise TopologyError(f"edge ({a},{b}) out of range for {n_phys} nodes")
            norm.add((a, b) if a < b else (b, a))
        self.n_phys = n_phys
        self.edges = tuple(sorted(norm))
        self.kind = kind
        nbrs = [[] for _ in range(n_phys)]
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        self.neighbors = tuple(tuple(sorted(ns)) for ns in nbrs)
        self._coords = coords
        self._edge_set = frozenset(self.edges)
        self._dist = None
        if n_phys > 1:
            self._check_connected()

    def _check_connected(self):
        seen = bytearray(self.n_phys)
        seen[0] = 1
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in self.neighbors[u]:
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    queue.append(v)
        if count != self.n_phys:
            raise TopologyError(f"coupling map is disconnected ({count}/{self.n_phys} reachable)")

    def is_edge(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self._edge_set

    @property
    def edge_set(self) -> frozenset:
        return self._edge_set

    def distance_matrix(self) -> list[list[int]]:
        """All-pairs hop counts via BFS; values match astar_path lengths."""
        if self._dist is None:
            dist = []
            for src in range(self.n_phys):
                row = [-1] * self.n_phys
                row[src] = 0
                queue = deque([src])
                while queue:
                    u = queue.popleft()
                    du = row[u] + 1
                    for v in self.neighbors[u]:
                        if row[v] < 0:
                            row[v] = du
                            queue.append(v)
                dist.append(row)
            self._dist = dist
        return self._dist

    # the lazy distance cache is cheap to rebuild, so leave it out of pickles
    def __getstate__(self):
        return (self.n_phys, self.edges, self.kind, self._coords)

    def __setstate__(self, state):
        n_phys, edges, kind, coords = state
        self.__init__(n_phys, edges, kind=kind, coords=coords)

    def __eq__(self, other):
        if not isinstance(other, CouplingMap):
            return NotImplemented
        return self.n_phys == other.n_phys and self.edges == other.edges

    def __hash__(self):
        return hash((self.n_phys, self.edges))

    def __repr__(self):
        return f"CouplingMap({self.kind}, n_phys={self.n_phys}, {len(self.edges)} edges)"


def build_grid(width: int) -> CouplingMap:
    """2 x m grid for m = ceil(width/2); odd widths leave one spare node."""
    if width < 2:
        raise TopologyError(f"grid needs width >= 2, got {width}")
    m = math.ceil(width / 2)
    edges = []
    for i in range(m - 1):
        edges.append((i, i + 1))
        edges.append((m + i, m + i + 1))
    for i in range(m):
        edges.append((i, i + m))
    coords = {i: (i // m, i % m) for i in range(2 * m)}
    return CouplingMap(2 * m, edges, kind="grid", coords=coords)


def build_linear(width: int) -> CouplingMap:
    if width < 2:
        raise TopologyError(f"linear needs width >= 2, got {width}")
    coords = {i: (0, i) for i in range(width)}
    return CouplingMap(width, [(i, i + 1) for i in range(width - 1)], kind="linear", coords=coords)


def load_coupling_map(path) -> CouplingMap:
    """Custom map file: {"n_phys": N, "edges": [[a, b], ...]}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        n_phys = int(data["n_phys"])
        edges = [(int(a), int(b)) for a, b in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise TopologyError(f"bad coupling map file {path}: {exc}") from exc
    return CouplingMap(n_phys, edges, kind="custom")


def astar_path(cmap: CouplingMap, src: int, dst: int) -> list[int]:
    """Shortest node path including both endpoints; src == dst gives [src].

    Heuristic is Manhattan distance on grid/linear coordinates and zero for
    custom maps (uniform-cost search). Equal-f frontier ties pop the lower
    node index first.
    """
    n = cmap.n_phys
    if not (0 <= src < n and 0 <= dst < n):
        raise TopologyError(f"node out of range: src={src}, dst={dst}, n_phys={n}")
    if src == dst:
        return [src]

    coords = cmap._coords
    if coords is not None:
        tr, tc = coords[dst]

        def h(node: int) -> int:
            r, c = coords[node]
            return abs(r - tr) + abs(c - tc)

    else:

        def h(node: int) -> int:
            return 0

    g = {src: 0}
    parent = {src: None}
    done = set()
    frontier = [(h(src), src)]
    neighbors = cmap.neighbors
    while frontier:
        _, node = heapq.heappop(frontier)
        if node in done:
            continue
        if node == dst:
            path = []
            while node is not None:
                path.append(node)
                node = parent[node]
            path.reverse()
            return path
        done.add(node)
        ng = g[node] + 1
        for nb in neighbors[node]:
            if nb in done:
                continue
            if nb not in g or ng < g[nb]:
                g[nb] = ng
                parent[nb] = node
                heapq.heappush(frontier, (ng + h(nb), nb))
    raise TopologyError(f"no path from {src} to {dst} (disconnected map)")
