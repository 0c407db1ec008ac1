"""Distance graphs: vertex count plus 1-indexed edge list, and the builtin
catalog (paths P_k, cliques K_k, the 4-cycle with and without a chord, the
triangle with a tail, and the 3-star Y)."""

import json
import warnings
from dataclasses import dataclass, field


@dataclass
class DistanceGraph:
    name: str
    vertex_count: int
    edges: tuple  # tuple of (i, j) with i < j, 1-indexed
    connected: bool = field(init=False)

    def __post_init__(self):
        if self.vertex_count < 1:
            raise ValueError("vertex_count must be positive")
        norm = []
        seen = set()
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (1 <= i <= self.vertex_count and 1 <= j <= self.vertex_count):
                raise ValueError(f"edge ({i},{j}) out of range 1..{self.vertex_count}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        self.edges = tuple(sorted(norm))
        self.connected = self._is_connected()
        if not self.connected:
            warnings.warn(
                f"graph {self.name!r} is disconnected; forms factor over components"
            )

    def _is_connected(self):
        if self.vertex_count == 1:
            return True
        adj = self.adjacency()
        seen = {1}
        stack = [1]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.vertex_count

    def adjacency(self):
        adj = {v: [] for v in range(1, self.vertex_count + 1)}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    @property
    def edge_count(self):
        return len(self.edges)

    def is_tree(self):
        return self.connected and self.edge_count == self.vertex_count - 1

    def is_canonical_path(self):
        """True when the edge list is exactly (1,2),(2,3),...,(k-1,k)."""
        k = self.vertex_count
        return self.edges == tuple((i, i + 1) for i in range(1, k))

    def clique_number(self):
        """Largest clique size; graphs here are tiny, brute force is fine."""
        adj = {v: set(u) for v, u in self.adjacency().items()}
        best = 1 if self.vertex_count else 0

        def grow(clique, cand):
            nonlocal best
            best = max(best, len(clique))
            for v in list(cand):
                grow(clique + [v], cand & adj[v] & set(range(v + 1, self.vertex_count + 1)))

        grow([], set(range(1, self.vertex_count + 1)))
        return best


def path_graph(k):
    """P_k: the path with k edges on k+1 vertices."""
    if k < 1:
        raise ValueError("P_k needs k >= 1")
    return DistanceGraph(f"P{k}", k + 1, tuple((i, i + 1) for i in range(1, k + 1)))


def complete_graph(k):
    if k < 2:
        raise ValueError("K_k needs k >= 2")
    return DistanceGraph(
        f"K{k}", k, tuple((i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1))
    )


def _c4():
    return DistanceGraph("C4", 4, ((1, 2), (2, 3), (3, 4), (1, 4)))


def _c4t():
    return DistanceGraph("C4t", 4, ((1, 2), (2, 3), (3, 4), (1, 4), (1, 3)))


def _k3t():
    return DistanceGraph("K3t", 4, ((1, 2), (2, 3), (1, 3), (3, 4)))


def _y():
    return DistanceGraph("Y", 4, ((1, 3), (2, 3), (3, 4)))


def catalog_graph(name):
    """Resolve a catalog name: P<k>, K<k>, C4, C4t, K3t, Y (case-insensitive,
    underscores ignored, so 'P_2' and 'p2' both work)."""
    label = name.replace("_", "").strip()
    low = label.lower()
    if low == "c4":
        return _c4()
    if low in ("c4t", "c4+t"):
        return _c4t()
    if low in ("k3t", "k3+t"):
        return _k3t()
    if low == "y":
        return _y()
    if low.startswith("p") and low[1:].isdigit():
        return path_graph(int(low[1:]))
    if low.startswith("k") and low[1:].isdigit():
        return complete_graph(int(low[1:]))
    raise ValueError(f"unknown catalog graph {name!r}")


CATALOG_NAMES = ("P1", "P2", "P3", "P4", "K3", "K4", "K5", "C4", "C4t", "K3t", "Y")


def graph_to_json(g):
    return json.dumps(
        {"name": g.name, "vertex_count": g.vertex_count, "edges": [list(e) for e in g.edges]},
        indent=2,
    )


def graph_from_json(text):
    obj = json.loads(text)
    return DistanceGraph(
        obj.get("name", "custom"),
        int(obj["vertex_count"]),
        tuple(tuple(e) for e in obj["edges"]),
    )


def components_of(g, vertices):
    """Connected components of the subgraph induced on `vertices` (iterable)."""
    vs = set(vertices)
    adj = g.adjacency()
    comps = []
    left = set(vs)
    while left:
        start = min(left)
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u in vs and u not in comp:
                    comp.add(u)
                    stack.append(u)
        comps.append(sorted(comp))
        left -= comp
    return comps
