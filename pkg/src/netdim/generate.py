"""Graph generators mixing homophyly, randomness and preferential attachment.

All three builders share the same skeleton.  Starting from a complete graph
on d+1 nodes (each one a seed with its own color, birth 0), nodes arrive one
per step.  At step i (defined as current node count + 1) the newcomer keeps
a new color with probability min(1, 1/ln(i)^a) and becomes a seed, otherwise
it adopts a uniformly chosen existing color:

* a seed creates one edge to a node sampled proportionally to degree over the
  whole graph, plus d-1 edges to uniformly chosen seed nodes;
* a non-seed creates min(d, community size) edges to nodes of its own color,
  sampled proportionally to their whole-graph degrees.

The 2-dimensional variant additionally gives each seed a second, uniformly
chosen old color, and replaces its d-1 uniform-seed edges by a per-edge coin:
heads a uniform seed target, tails a degree-proportional target inside the
second color's community.  The k-dimensional variant spreads the tails over
k-1 secondary colors round-robin.

All target probabilities are evaluated against the graph as it stood at the
end of the previous step, and duplicate draws are rejected so the result is a
simple graph.  Every build consumes a single RNG stream in a fixed order
(color coin, color choice, then edges in index order), so a given
:class:`GenParams` always yields the same graph.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from itertools import accumulate

import numpy as np

from .graph import ColoredGraph, GenParams, NodeRecord


def mixing_probability(i: int, a: float) -> float:
    """New-color probability at step i: min(1, 1/ln(i)^a)."""
    if i < 2:
        raise ValueError(f"step index must be >= 2, got {i}")
    if a <= 0:
        raise ValueError(f"homophyly exponent must be positive, got {a}")
    return min(1.0, 1.0 / math.log(i) ** a)


def pa_sample(g: ColoredGraph, scope, rng: np.random.Generator) -> int:
    """Sample one node from `scope` with probability proportional to degree."""
    ids = sorted(scope)
    if not ids:
        raise ValueError("cannot sample from an empty scope")
    weights = [len(g.adjacency[v]) for v in ids]
    total = sum(weights)
    if total <= 0:
        raise ValueError("all nodes in scope have degree 0")
    cum = list(accumulate(weights))
    return ids[bisect_right(cum, rng.random() * total)]


class _Build:
    """Mutable bookkeeping while a graph grows; frozen into a ColoredGraph."""

    def __init__(self, d: int):
        size = d + 1
        self.d = d
        self.colors_of: list[tuple[int, ...]] = [(c,) for c in range(size)]
        self.kind: list[str] = ["seed"] * size
        self.birth: list[int] = [0] * size
        self.deg: list[int] = [d] * size
        self.seeds: list[int] = list(range(size))
        self.members: list[list[int]] = [[c] for c in range(size)]
        self.edges: dict[tuple[int, int], str] = {}
        # One entry per edge endpoint; uniform draws from it are
        # degree-proportional draws over the whole graph.
        self.endpoints: list[int] = []
        for u in range(size):
            for v in range(u + 1, size):
                self.edges[(u, v)] = "init"
                self.endpoints.append(u)
                self.endpoints.append(v)

    @property
    def n_nodes(self) -> int:
        return len(self.colors_of)

    @property
    def n_colors(self) -> int:
        return len(self.members)

    def pa_target(self, rng, limit: int, taken: set[int]) -> int:
        """Degree-proportional draw over the previous step's endpoint list."""
        while True:
            t = self.endpoints[int(rng.integers(limit))]
            if t not in taken:
                return t

    def seed_target(self, rng, limit: int, taken: set[int]) -> int:
        """Uniform draw over the previous step's seed list."""
        while True:
            t = self.seeds[int(rng.integers(limit))]
            if t not in taken:
                return t

    def homophyly_target(self, rng, color: int, taken: set[int]) -> int | None:
        """Degree-proportional draw inside one color's community.

        Returns None when every community member is already taken.
        """
        members = self.members[color]
        if all(m in taken for m in members):
            return None
        cum = list(accumulate(self.deg[m] for m in members))
        total = cum[-1]
        while True:
            t = members[bisect_right(cum, rng.random() * total)]
            if t not in taken:
                return t

    def commit(self, colors, kind, birth, links):
        """Append the new node and its edges; updates degrees afterwards."""
        v = self.n_nodes
        self.colors_of.append(tuple(colors))
        self.kind.append(kind)
        self.birth.append(birth)
        self.deg.append(len(links))
        for t, edge_kind in links:
            self.edges[(t, v) if t < v else (v, t)] = edge_kind
            self.deg[t] += 1
            self.endpoints.append(v)
            self.endpoints.append(t)
        if kind == "seed":
            self.seeds.append(v)
            self.members.append([v])
        for c in colors[1:] if kind == "seed" else colors:
            self.members[c].append(v)
        return v

    def freeze(self, model: str, params: GenParams) -> ColoredGraph:
        nodes = [
            NodeRecord(id=v, colors=self.colors_of[v], kind=self.kind[v], birth=self.birth[v])
            for v in range(self.n_nodes)
        ]
        return ColoredGraph(nodes, self.edges, model=model, params=params)


def _nonseed_step(b: _Build, rng, step: int):
    """Adopt a uniformly chosen old color and wire into its community."""
    color = int(rng.integers(b.n_colors))
    members = b.members[color]
    want = min(b.d, len(members))
    taken: set[int] = set()
    links = []
    while len(links) < want:
        t = b.homophyly_target(rng, color, taken)
        taken.add(t)
        links.append((t, "homophyly"))
    b.commit((color,), "nonseed", step, links)


def _grow(params: GenParams, model: str) -> ColoredGraph:
    params.validate()
    rng = np.random.default_rng(params.rng_seed)
    b = _Build(params.d)
    d, k = params.d, params.k

    while b.n_nodes < params.n:
        step = b.n_nodes + 1
        n_colors = b.n_colors
        n_seeds = len(b.seeds)
        ep_limit = len(b.endpoints)

        if rng.random() < mixing_probability(step, params.a):
            # Seed path: new color, optional secondary colors, then edges.
            if k >= 2:
                take = min(k - 1, n_colors)
                picks = rng.choice(n_colors, size=take, replace=False)
                secondaries = [int(c) for c in picks]
            else:
                secondaries = []
            own = b.n_colors

            taken: set[int] = set()
            links = []
            t = b.pa_target(rng, ep_limit, taken)
            taken.add(t)
            links.append((t, "seed-pa"))
            for j in range(d - 1):
                if secondaries and rng.random() >= 0.5:
                    c = secondaries[j % len(secondaries)]
                    t = b.homophyly_target(rng, c, taken)
                    if t is not None:
                        taken.add(t)
                        links.append((t, "homophyly"))
                        continue
                    # Community exhausted: fall back to the randomness rule.
                t = b.seed_target(rng, n_seeds, taken)
                taken.add(t)
                links.append((t, "seed-rand"))

            b.commit((own, *secondaries), "seed", step, links)
        else:
            _nonseed_step(b, rng, step)

    return b.freeze(model, params)


def generate_linear(params: GenParams) -> ColoredGraph:
    """Build a 1-dimensional graph (every node carries a single color)."""
    if params.k != 1:
        raise ValueError(f"generate_linear requires k=1, got k={params.k}")
    return _grow(params, "s")


def generate_2d(params: GenParams) -> ColoredGraph:
    """Build a 2-dimensional graph (seeds carry a second, old color)."""
    if params.k != 2:
        raise ValueError(f"generate_2d requires k=2, got k={params.k}")
    return _grow(params, "s2")


def generate_kd(params: GenParams) -> ColoredGraph:
    """Build a k-dimensional graph; k=1 and k=2 match the dedicated builders."""
    if params.k == 1:
        return generate_linear(params)
    if params.k == 2:
        return generate_2d(params)
    return _grow(params, "sk")
