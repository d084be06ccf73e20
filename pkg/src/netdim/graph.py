"""Colored-graph data model shared by the generators, cascade engine and reduction.

A graph is an undirected simple graph whose nodes carry an ordered list of
color ids (the first one is the node's own color), a seed/nonseed kind and a
birth step, and whose edges are tagged with the construction rule that created
them.  Graphs are immutable once built; everything downstream (cascades,
reduction, metrics) only reads them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

NODE_KINDS = ("seed", "nonseed")
EDGE_KINDS = ("init", "seed-pa", "seed-rand", "homophyly", "circle", "reassigned")
MODEL_TAGS = ("s", "s2", "sk", "reduced", "external")


@dataclass(frozen=True)
class GenParams:
    """Generation inputs: homophyly exponent, per-node edge budget, target size.

    The record itself is a dumb carrier so that hand-built and external graphs
    can hold placeholder values; the generators call :meth:`validate` before
    using one.
    """

    a: float = 0.0
    d: int = 0
    n: int = 0
    k: int = 1
    rng_seed: int = 0

    def validate(self) -> None:
        if not self.a > 0:
            raise ValueError(f"homophyly exponent must be positive, got {self.a}")
        if self.d < 2:
            raise ValueError(f"edge budget d must be >= 2, got {self.d}")
        if self.n <= self.d + 1:
            raise ValueError(
                f"target size n={self.n} must exceed the initial graph size {self.d + 1}"
            )
        if self.k < 1:
            raise ValueError(f"dimension k must be >= 1, got {self.k}")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class NodeRecord:
    """One node: id, colors (own color first), seed/nonseed kind, birth step."""

    id: int
    colors: tuple[int, ...]
    kind: str
    birth: int

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"node id must be >= 0, got {self.id}")
        if self.kind not in NODE_KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")
        if self.birth < 0:
            raise ValueError(f"birth step must be >= 0, got {self.birth}")
        if not self.colors:
            raise ValueError(f"node {self.id} has no colors")
        if len(set(self.colors)) != len(self.colors):
            raise ValueError(f"node {self.id} has duplicate colors {self.colors}")
        if self.kind == "nonseed" and len(self.colors) != 1:
            raise ValueError(f"nonseed node {self.id} must carry exactly one color")


@dataclass(frozen=True)
class EdgeRecord:
    """One undirected edge with u < v and the rule that created it."""

    u: int
    v: int
    kind: str


class ColoredGraph:
    """Undirected simple graph with colored nodes and tagged edges.

    Parameters
    ----------
    nodes:
        Iterable of :class:`NodeRecord`.
    edges:
        Either a mapping ``{(u, v): kind}`` or an iterable of ``(u, v, kind)``
        triples.  Endpoint order does not matter; pairs are normalized to
        ``u < v``.
    model:
        One of ``s``, ``s2``, ``sk``, ``reduced``, ``external``.
    params:
        The :class:`GenParams` the graph was built from (placeholder defaults
        for hand-built graphs).
    """

    def __init__(
        self,
        nodes: Iterable[NodeRecord],
        edges: Mapping[tuple[int, int], str] | Iterable[tuple[int, int, str]] = (),
        model: str = "external",
        params: GenParams | None = None,
    ):
        if model not in MODEL_TAGS:
            raise ValueError(f"unknown model tag {model!r}")
        self.model = model
        self.params = params if params is not None else GenParams()

        self.nodes: tuple[NodeRecord, ...] = tuple(sorted(nodes, key=lambda r: r.id))
        self._by_id: dict[int, NodeRecord] = {}
        for rec in self.nodes:
            if rec.id in self._by_id:
                raise ValueError(f"duplicate node id {rec.id}")
            self._by_id[rec.id] = rec

        if isinstance(edges, Mapping):
            items = [(u, v, kind) for (u, v), kind in edges.items()]
        else:
            items = list(edges)

        self.edges: dict[tuple[int, int], str] = {}
        self.adjacency: dict[int, set[int]] = {rec.id: set() for rec in self.nodes}
        for u, v, kind in items:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if u not in self._by_id or v not in self._by_id:
                raise ValueError(f"edge ({u}, {v}) references an unknown node")
            if kind not in EDGE_KINDS:
                raise ValueError(f"unknown edge kind {kind!r}")
            key = (u, v) if u < v else (v, u)
            if key in self.edges:
                raise ValueError(f"duplicate edge {key}")
            self.edges[key] = kind
            self.adjacency[u].add(v)
            self.adjacency[v].add(u)

        if model != "external":
            self._check_color_seeds()

    def _check_color_seeds(self):
        # Every color present anywhere must be the primary color of exactly
        # one seed node; holds for generated and reduced graphs.
        primary: dict[int, int] = {}
        seen: set[int] = set()
        for rec in self.nodes:
            seen.update(rec.colors)
            if rec.kind == "seed":
                c = rec.colors[0]
                if c in primary:
                    raise ValueError(
                        f"color {c} has two seed founders: {primary[c]} and {rec.id}"
                    )
                primary[c] = rec.id
        missing = seen - set(primary)
        if missing:
            raise ValueError(f"colors without a founding seed: {sorted(missing)}")

    # -- basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_node(self, v: int) -> bool:
        return v in self._by_id

    def node(self, v: int) -> NodeRecord:
        try:
            return self._by_id[v]
        except KeyError:
            raise KeyError(f"no node with id {v}") from None

    def neighbors(self, v: int) -> set[int]:
        if v not in self.adjacency:
            raise KeyError(f"no node with id {v}")
        return self.adjacency[v]

    def colors(self, v: int) -> tuple[int, ...]:
        return self.node(v).colors

    def primary_color(self, v: int) -> int:
        return self.node(v).colors[0]

    def edge_records(self) -> list[EdgeRecord]:
        return [EdgeRecord(u, v, kind) for (u, v), kind in sorted(self.edges.items())]

    # -- cached derived views ------------------------------------------------

    @cached_property
    def ids(self) -> np.ndarray:
        """Node ids in ascending order (row order of :attr:`csr`)."""
        return np.array([rec.id for rec in self.nodes], dtype=np.int64)

    @cached_property
    def id_index(self) -> dict[int, int]:
        """Map node id to its row in the array views."""
        return {int(v): i for i, v in enumerate(self.ids)}

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree per node, aligned with :attr:`ids`."""
        return np.array([len(self.adjacency[int(v)]) for v in self.ids], dtype=np.int64)

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix over :attr:`ids` row order."""
        idx = self.id_index
        rows = np.empty(2 * self.m, dtype=np.int64)
        cols = np.empty(2 * self.m, dtype=np.int64)
        for j, (u, v) in enumerate(self.edges):
            rows[2 * j], cols[2 * j] = idx[u], idx[v]
            rows[2 * j + 1], cols[2 * j + 1] = idx[v], idx[u]
        data = np.ones(2 * self.m, dtype=np.float64)
        mat = sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        return mat

    @cached_property
    def members_by_color(self) -> dict[int, tuple[int, ...]]:
        """All nodes carrying each color (primary or secondary), by color id."""
        out: dict[int, list[int]] = {}
        for rec in self.nodes:
            for c in rec.colors:
                out.setdefault(c, []).append(rec.id)
        return {c: tuple(v) for c, v in sorted(out.items())}

    @cached_property
    def seed_by_color(self) -> dict[int, int]:
        """The founding seed of each color (node whose primary color it is)."""
        return {
            rec.colors[0]: rec.id for rec in self.nodes if rec.kind == "seed"
        }

    # -- equality ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColoredGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and self.model == other.model
            and self.params == other.params
        )

    def __repr__(self) -> str:
        return f"ColoredGraph(n={self.n}, m={self.m}, model={self.model!r})"


def degree(g: ColoredGraph, v: int) -> int:
    """Number of neighbors of node v."""
    return len(g.neighbors(v))


def dimension(g: ColoredGraph) -> int:
    """Maximum number of colors carried by any node."""
    if g.n == 0:
        raise ValueError("dimension of an empty graph is undefined")
    return max(len(rec.colors) for rec in g.nodes)
