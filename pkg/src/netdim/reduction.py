"""Split multi-community nodes into circles, making all communities disjoint.

Every node that belongs to two or more color communities is replaced by one
copy per community, the copies are joined in a circle (a single edge for two
copies, a cycle for three or more), neighbors inside a shared community are
re-attached to the matching copy, and neighbors outside every shared
community are re-attached to a copy drawn proportionally to the node's
neighbor counts per community.  The output graph has one color per node and
pairwise disjoint communities; nodes in a single community are untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.csgraph as csgraph

from .graph import ColoredGraph, GenParams, NodeRecord, dimension


@dataclass(frozen=True)
class OverlapStructure:
    """Color communities of a graph and each node's membership in them.

    communities[i] is the set of all nodes carrying colors[i] anywhere in
    their color list; membership maps a node to the indices of the
    communities containing it.
    """

    colors: tuple[int, ...]
    communities: tuple[frozenset[int], ...]
    membership: dict[int, tuple[int, ...]]

    def community_of_color(self, color: int) -> frozenset[int]:
        return self.communities[self.colors.index(color)]


@dataclass(frozen=True)
class SplitRecord:
    """How one node was split: copies, their communities, internal degrees."""

    original: int
    parts: tuple[int, ...]
    part_colors: tuple[int, ...]
    internal_degrees: tuple[int, ...]


@dataclass
class ReductionReport:
    """Outcome of the consistency checks over (input, output, mapping)."""

    checks: dict[str, tuple[bool, str]]

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.checks.values())

    def to_text(self) -> str:
        lines = []
        for name, (passed, detail) in self.checks.items():
            status = "pass" if passed else "FAIL"
            lines.append(f"{name}: {status} ({detail})")
        return "\n".join(lines)


def overlapping_communities(g: ColoredGraph) -> OverlapStructure:
    """One community per color id; membership read off the node color lists."""
    colors = tuple(sorted(g.members_by_color))
    index = {c: i for i, c in enumerate(colors)}
    communities = tuple(frozenset(g.members_by_color[c]) for c in colors)
    membership = {
        rec.id: tuple(sorted(index[c] for c in rec.colors)) for rec in g.nodes
    }
    return OverlapStructure(colors=colors, communities=communities, membership=membership)


def _edge_community(g: ColoredGraph, u: int, v: int, shared: list[int]) -> int:
    """Attribute an edge between color-sharing endpoints to one color.

    Homophyly edges belong to the community of the node that created them
    (the younger endpoint): its own color for a non-seed, its second color
    for a seed.  Everything else falls back to the smallest shared color.
    """
    if len(shared) == 1:
        return shared[0]
    key = (u, v) if u < v else (v, u)
    if g.edges.get(key) == "homophyly":
        young = g.node(max(u, v, key=lambda x: (g.node(x).birth, x)))
        if young.kind == "nonseed":
            c = young.colors[0]
        elif len(young.colors) >= 2:
            c = young.colors[1]
        else:
            c = None
        if c in shared:
            return c
    return min(shared)


def split_internal_degrees(g: ColoredGraph, x: int) -> dict[int, int]:
    """Neighbor count of x per shared color, each neighbor counted once."""
    x_colors = g.colors(x)
    counts = {c: 0 for c in x_colors}
    for z in g.neighbors(x):
        shared = [c for c in x_colors if c in g.colors(z)]
        if shared:
            counts[_edge_community(g, x, z, shared)] += 1
    return counts


def reduce_graph(
    g: ColoredGraph,
    structure: OverlapStructure | None = None,
    rng_seed: int = 0,
) -> tuple[ColoredGraph, dict[int, tuple[int, ...]]]:
    """Split every multi-community node of g; returns (reduced graph, split map).

    The split map holds only split nodes (original id to the tuple of copy
    ids, ordered by ascending community color).  Single-community inputs come
    back structurally unchanged with an empty map.  Copy ids are allocated
    after all original ids, reassignment draws happen in sorted edge order,
    and both are functions of rng_seed alone.
    """
    if structure is None:
        structure = overlapping_communities(g)
    rng = np.random.default_rng(rng_seed)

    split_nodes = sorted(
        v for v, ms in structure.membership.items() if len(ms) >= 2
    )
    next_id = (max(rec.id for rec in g.nodes) + 1) if g.nodes else 0

    mapping: dict[int, tuple[int, ...]] = {}
    part_colors: dict[int, tuple[int, ...]] = {}
    part_of: dict[tuple[int, int], int] = {}  # (original, color) -> copy id
    internal: dict[int, dict[int, int]] = {}
    for x in split_nodes:
        colors = tuple(sorted(g.colors(x)))
        parts = tuple(range(next_id, next_id + len(colors)))
        next_id += len(colors)
        mapping[x] = parts
        part_colors[x] = colors
        for c, p in zip(colors, parts):
            part_of[(x, c)] = p
        internal[x] = split_internal_degrees(g, x)

    nodes: list[NodeRecord] = []
    for rec in g.nodes:
        if rec.id not in mapping:
            nodes.append(rec)
            continue
        for c, p in zip(part_colors[rec.id], mapping[rec.id]):
            kind = "seed" if rec.kind == "seed" and c == rec.colors[0] else "nonseed"
            nodes.append(NodeRecord(id=p, colors=(c,), kind=kind, birth=rec.birth))

    def pick_part(x: int) -> int:
        colors = part_colors[x]
        weights = np.array([internal[x][c] for c in colors], dtype=np.float64)
        total = weights.sum()
        if total <= 0:
            i = int(rng.integers(len(colors)))
        else:
            i = int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right"))
        return part_of[(x, colors[i])]

    edges: dict[tuple[int, int], str] = {}

    def add(u: int, v: int, kind: str):
        edges[(u, v) if u < v else (v, u)] = kind

    for (u, v), kind in sorted(g.edges.items()):
        shared = [c for c in g.colors(u) if c in g.colors(v)]
        if shared:
            c = _edge_community(g, u, v, shared)
            nu = part_of.get((u, c), u)
            nv = part_of.get((v, c), v)
            add(nu, nv, kind)
        else:
            nu = pick_part(u) if u in mapping else u
            nv = pick_part(v) if v in mapping else v
            add(nu, nv, kind if (nu == u and nv == v) else "reassigned")

    for x in split_nodes:
        parts = mapping[x]
        if len(parts) == 2:
            add(parts[0], parts[1], "circle")
        else:
            for i, p in enumerate(parts):
                add(p, parts[(i + 1) % len(parts)], "circle")

    params = GenParams(
        a=g.params.a, d=g.params.d, n=len(nodes), k=1, rng_seed=rng_seed
    )
    h = ColoredGraph(nodes, edges, model="reduced", params=params)
    return h, mapping


def circle_edge_count(k: int) -> int:
    """Extra edges a k-way split adds: none for 1, one for 2, a k-cycle after."""
    if k <= 1:
        return 0
    if k == 2:
        return 1
    return k


def _components(g: ColoredGraph) -> int:
    if g.n == 0:
        return 0
    return int(csgraph.connected_components(g.csr, directed=False)[0])


def verify_reduction(
    g: ColoredGraph, h: ColoredGraph, mapping: dict[int, tuple[int, ...]]
) -> ReductionReport:
    """Audit a (input, output, split map) triple; every check is re-derived."""
    checks: dict[str, tuple[bool, str]] = {}

    dim = dimension(h) if h.n else 0
    checks["dimension"] = (dim == 1, f"dimension(h)={dim}")

    expected_m = g.m + sum(circle_edge_count(len(parts)) for parts in mapping.values())
    checks["edge_count"] = (
        h.m == expected_m,
        f"|E(h)|={h.m}, expected |E(g)|+circles={expected_m}",
    )

    origin = {p: x for x, parts in mapping.items() for p in parts}
    bad_internal = []
    for x, parts in mapping.items():
        want = split_internal_degrees(g, x)
        for p in parts:
            c = h.colors(p)[0]
            got = sum(
                1
                for z in h.neighbors(p)
                if c in h.colors(z) and origin.get(z, z) != x
            )
            if got != want.get(c, 0):
                bad_internal.append((x, p, c, got, want.get(c, 0)))
    checks["internal_degrees"] = (
        not bad_internal,
        "all split copies keep their community neighbor counts"
        if not bad_internal
        else f"mismatches: {bad_internal[:3]}",
    )

    comp_g, comp_h = _components(g), _components(h)
    checks["connectivity"] = (
        comp_h == comp_g,
        f"components: input {comp_g}, output {comp_h}",
    )

    bad_edges = []
    seen_origin_edges: set[tuple[int, int]] = set()
    for (u, v), kind in h.edges.items():
        ou, ov = origin.get(u, u), origin.get(v, v)
        if kind == "circle":
            if ou != ov or ou not in mapping:
                bad_edges.append(((u, v), "circle edge outside a split node"))
            continue
        key = (ou, ov) if ou < ov else (ov, ou)
        if key not in g.edges:
            bad_edges.append(((u, v), "no matching input edge"))
            continue
        if key in seen_origin_edges:
            bad_edges.append(((u, v), "input edge mapped twice"))
        seen_origin_edges.add(key)
        for end, other_origin in ((u, ov), (v, ou)):
            if end in origin:
                c = h.colors(end)[0]
                if c not in g.colors(other_origin) and kind != "reassigned":
                    bad_edges.append(((u, v), "cross-community edge not tagged reassigned"))
    checks["reassignment"] = (
        not bad_edges,
        "all edges re-attached inside valid communities"
        if not bad_edges
        else f"violations: {bad_edges[:3]}",
    )

    return ReductionReport(checks=checks)


def write_mapping(mapping: dict[int, tuple[int, ...]], h: ColoredGraph, path) -> None:
    """Write the split map as `M <old id> <new id> <community color>` lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("#netdim-map v1\n")
        for x in sorted(mapping):
            for p in mapping[x]:
                fh.write(f"M\t{x}\t{p}\t{h.colors(p)[0]}\n")


def read_mapping(path) -> dict[int, tuple[int, ...]]:
    out: dict[int, list[int]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if parts[0] != "M" or len(parts) != 4:
                raise ValueError(f"line {lineno}: expected `M <old> <new> <color>`")
            out.setdefault(int(parts[1]), []).append(int(parts[2]))
    return {x: tuple(ps) for x, ps in out.items()}
