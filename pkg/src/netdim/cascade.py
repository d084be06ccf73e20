"""Threshold-infection engine: thresholds, fixpoint cascades, attack sweeps.

A node with threshold phi becomes infected once the infected fraction of its
neighbors reaches phi (weak inequality).  Under the random scheme each node
draws phi = r/deg with r uniform on {1..deg}, which reads as "r infected
neighbors suffice".  The infection set of an attack is the closure of that
rule; it is computed in synchronous rounds, and because the process is
monotone the fixpoint does not depend on update order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import ColoredGraph


@dataclass(frozen=True)
class ThresholdAssignment:
    """Per-node infection thresholds plus how they were drawn.

    `values` maps node id to phi in (0, 1]; isolated nodes get +inf so that
    spreading can never reach them.  For the random scheme `drawn_r` keeps the
    integer draws and `rng_seed` the stream they came from.
    """

    scheme: str
    values: dict[int, float]
    uniform_phi: float | None = None
    rng_seed: int | None = None
    drawn_r: dict[int, int] | None = None


@dataclass(frozen=True)
class CascadeResult:
    """Attack set, its full infection set, and per-round infection counts."""

    attacked: frozenset[int]
    infected: frozenset[int]
    rounds: tuple[int, ...]


@dataclass(frozen=True)
class SweepRow:
    attack_size: int
    max_infected: int
    mean_infected: float
    trials: int
    n: int


@dataclass(frozen=True)
class SweepCurve:
    """Max/mean infection-set sizes per top-degree attack size."""

    rows: tuple[SweepRow, ...]

    def max_by_size(self) -> dict[int, int]:
        return {r.attack_size: r.max_infected for r in self.rows}


def assign_thresholds(
    g: ColoredGraph,
    scheme: str,
    rng_seed: int | tuple[int, ...] | None = None,
    phi: float | None = None,
) -> ThresholdAssignment:
    """Draw thresholds for every node of g.

    scheme="uniform" assigns the given phi everywhere; scheme="random" draws
    phi_v = r/deg(v) with r uniform on {1..deg(v)} from the stream seeded by
    rng_seed.  Degree-0 nodes always get +inf.
    """
    degs = g.degrees
    ids = g.ids
    if scheme == "uniform":
        if phi is None or not 0.0 < phi <= 1.0:
            raise ValueError(f"uniform scheme needs phi in (0, 1], got {phi}")
        values = {
            int(v): (phi if dv > 0 else math.inf) for v, dv in zip(ids, degs)
        }
        return ThresholdAssignment(scheme="uniform", values=values, uniform_phi=phi)
    if scheme == "random":
        if rng_seed is None:
            raise ValueError("random scheme needs an rng_seed")
        seed = list(rng_seed) if isinstance(rng_seed, tuple) else rng_seed
        rng = np.random.default_rng(seed)
        # One vectorized draw over nodes in ascending id order.
        high = np.maximum(degs, 1)
        r = rng.integers(1, high + 1)
        values, drawn = {}, {}
        for v, dv, rv in zip(ids, degs, r):
            if dv == 0:
                values[int(v)] = math.inf
            else:
                values[int(v)] = float(rv) / float(dv)
                drawn[int(v)] = int(rv)
        return ThresholdAssignment(
            scheme="random", values=values, rng_seed=rng_seed, drawn_r=drawn
        )
    raise ValueError(f"unknown threshold scheme {scheme!r}")


def _phi_array(g: ColoredGraph, thresholds: ThresholdAssignment) -> np.ndarray:
    values = thresholds.values
    try:
        return np.array([values[int(v)] for v in g.ids], dtype=np.float64)
    except KeyError as exc:
        raise ValueError(f"threshold assignment is missing node {exc.args[0]}") from None


def _fixpoint(csr, degs, phi, infected):
    """Run synchronous rounds in place; returns per-round new-infection counts."""
    rounds = []
    frac = np.zeros(len(degs), dtype=np.float64)
    active = degs > 0
    while True:
        counts = csr @ infected.astype(np.float64)
        np.divide(counts, degs, out=frac, where=active)
        newly = active & ~infected & (frac >= phi)
        hits = int(newly.sum())
        if hits == 0:
            return rounds
        infected |= newly
        rounds.append(hits)


def infection_set(g: ColoredGraph, thresholds: ThresholdAssignment, attack) -> CascadeResult:
    """Close an attack set under the threshold rule."""
    attack = frozenset(int(v) for v in attack)
    idx = g.id_index
    missing = [v for v in attack if v not in idx]
    if missing:
        raise ValueError(f"attack contains unknown nodes {sorted(missing)}")

    infected = np.zeros(g.n, dtype=bool)
    for v in attack:
        infected[idx[v]] = True
    rounds = _fixpoint(g.csr, g.degrees.astype(np.float64), _phi_array(g, thresholds), infected)
    ids = g.ids
    return CascadeResult(
        attacked=attack,
        infected=frozenset(int(v) for v in ids[infected]),
        rounds=tuple(rounds),
    )


def top_degree_attack(g: ColoredGraph, size: int) -> frozenset[int]:
    """The `size` highest-degree nodes; ties broken by smaller id."""
    if size < 0 or size > g.n:
        raise ValueError(f"attack size {size} out of range [0, {g.n}]")
    order = sorted(g.adjacency, key=lambda v: (-len(g.adjacency[v]), v))
    return frozenset(order[:size])


def _trial_sizes(g, order_idx, max_attack, phi):
    """Infection-set sizes for attack prefixes 1..max_attack, one threshold draw.

    Growing the attack can only grow the fixpoint, so each prefix resumes from
    the previous one.
    """
    degs = g.degrees.astype(np.float64)
    csr = g.csr
    infected = np.zeros(g.n, dtype=bool)
    sizes = np.empty(max_attack, dtype=np.int64)
    for s in range(max_attack):
        infected[order_idx[s]] = True
        _fixpoint(csr, degs, phi, infected)
        sizes[s] = int(infected.sum())
    return sizes


def attack_sweep(
    g: ColoredGraph,
    max_attack: int,
    trials: int,
    scheme: str = "random",
    rng_seed: int = 0,
    phi: float | None = None,
    workers: int = 1,
) -> SweepCurve:
    """Sweep top-degree attacks of size 1..max_attack over threshold trials.

    Each trial draws its thresholds from the derived stream (rng_seed, t), so
    the curve is reproducible and independent of the worker count.  The
    uniform scheme has no randomness and is evaluated once.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if max_attack < 1 or max_attack > g.n:
        raise ValueError(f"max_attack {max_attack} out of range [1, {g.n}]")

    order = sorted(g.adjacency, key=lambda v: (-len(g.adjacency[v]), v))[:max_attack]
    order_idx = np.array([g.id_index[v] for v in order], dtype=np.int64)

    if scheme == "uniform":
        assignment = assign_thresholds(g, "uniform", phi=phi)
        per_trial = [_trial_sizes(g, order_idx, max_attack, _phi_array(g, assignment))]
    elif scheme == "random":
        def run(t: int):
            assignment = assign_thresholds(g, "random", rng_seed=(rng_seed, t))
            return _trial_sizes(g, order_idx, max_attack, _phi_array(g, assignment))

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                per_trial = list(pool.map(run, range(trials)))
        else:
            per_trial = [run(t) for t in range(trials)]
    else:
        raise ValueError(f"unknown threshold scheme {scheme!r}")

    stack = np.stack(per_trial)
    rows = tuple(
        SweepRow(
            attack_size=s + 1,
            max_infected=int(stack[:, s].max()),
            mean_infected=float(stack[:, s].mean()),
            trials=trials,
            n=g.n,
        )
        for s in range(max_attack)
    )
    return SweepCurve(rows=rows)


CSV_HEADER = "attack_size,max_infected,mean_infected,trials,n"


def write_sweep_csv(curve: SweepCurve, path) -> None:
    """Write the sweep as CSV with LF endings and 6-significant-digit means."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in curve.rows:
            fh.write(
                f"{r.attack_size},{r.max_infected},{r.mean_infected:.6g},{r.trials},{r.n}\n"
            )


def read_sweep_csv(path) -> SweepCurve:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty sweep CSV")
    if lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: row 1: expected header {CSV_HEADER!r}")
    if len(lines) == 1:
        raise ValueError(f"{path}: sweep CSV has no data rows")
    for i, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ValueError(f"{path}: row {i}: expected 5 fields, got {len(parts)}")
        try:
            rows.append(
                SweepRow(
                    attack_size=int(parts[0]),
                    max_infected=int(parts[1]),
                    mean_infected=float(parts[2]),
                    trials=int(parts[3]),
                    n=int(parts[4]),
                )
            )
        except ValueError:
            raise ValueError(f"{path}: row {i}: non-numeric field") from None
    return SweepCurve(rows=tuple(rows))
