"""Adversary layer: stretch audits, the counting argument, and the
certificate-deletion family with its pigeonhole demonstrator.

Everything here treats the construction as untrusted: claims are recomputed
by BFS, and a disagreement between the counting shortcut and BFS is a panic
(IntegrityError), never silently accepted.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InconclusiveError, InputError, IntegrityError
from .formats import write_stretch_csv
from .graph import Graph
from .obstacle_product import ObstacleGraph

INF = float("inf")


@dataclass(frozen=True)
class SubgraphMask:
    """Subset of a host graph's edges, as a boolean keep-vector.

    alive[i] says whether canonical edge i of the host survives. The mask is
    the unit of work for every audit here: kernels take the slot-level
    expansion, materializing a Graph is only for callers that need one.
    """

    host: Graph
    alive: np.ndarray
    note: str = ""

    def __post_init__(self):
        arr = np.ascontiguousarray(self.alive, dtype=bool)
        if arr.shape != (self.host.m,):
            raise InputError(f"mask length {arr.shape} does not match m={self.host.m}")
        object.__setattr__(self, "alive", arr)

    @classmethod
    def full(cls, host: Graph, note: str = "identity") -> "SubgraphMask":
        return cls(host, np.ones(host.m, dtype=bool), note)

    @classmethod
    def without_edges(cls, host: Graph, removed, note: str = "") -> "SubgraphMask":
        idx = host.edge_index(removed)
        if (idx < 0).any():
            raise InputError("mask removes an edge the host does not have")
        alive = np.ones(host.m, dtype=bool)
        alive[idx] = False
        return cls(host, alive, note)

    @property
    def kept_edge_count(self) -> int:
        return int(self.alive.sum())

    def alive_slots(self) -> np.ndarray:
        slots = self.host.edge_slots(np.arange(self.host.m))
        out = np.zeros(len(self.host.indices), dtype=np.uint8)
        keep = np.flatnonzero(self.alive)
        out[slots[keep, 0]] = 1
        out[slots[keep, 1]] = 1
        return out

    def graph(self) -> Graph:
        return Graph(self.host.n, self.host.edges[self.alive])


@dataclass
class StretchReport:
    rows: list  # (pair_index, base_dist, sub_dist, stretch)
    max_stretch: float
    witness: int | None
    kept_edge_count: int
    kept_clique_edge_count: int | None = None
    scope: str = "all"

    def to_csv(self, path) -> None:
        write_stretch_csv(path, self.rows)


def _pair_distances(g: Graph, alive_slots, pairs: np.ndarray) -> list[float]:
    out = []
    for s, t in pairs:
        if alive_slots is None:
            d = int(kernels.bfs_distances(g.indptr, g.indices, int(s))[int(t)])
        else:
            d = int(
                kernels.bfs_target_masked(g.indptr, g.indices, alive_slots, int(s), int(t))
            )
        out.append(INF if d < 0 else d)
    return out


def stretch_audit(
    og: ObstacleGraph,
    h: SubgraphMask,
    scope: str | int = "all",
    seed: int = 0,
) -> StretchReport:
    """Exact per-pair distances in host and masked graph.

    scope "all" audits every pair; an integer audits that many pairs,
    seed-sampled without replacement. Unreachable pairs report infinite
    stretch.
    """
    if h.host is not og.graph and h.host != og.graph:
        raise InputError("mask host is not this instance's graph")
    P = len(og.pairs)
    if scope == "all":
        rows_idx = np.arange(P)
        scope_name = "all"
    else:
        rng = np.random.default_rng(seed)
        rows_idx = np.sort(rng.choice(P, size=min(int(scope), P), replace=False))
        scope_name = f"sample:{len(rows_idx)}"
    pairs = og.pairs.pairs[rows_idx]
    base = _pair_distances(og.graph, None, pairs)
    sub = _pair_distances(og.graph, h.alive_slots(), pairs)
    rows = []
    max_stretch, witness = 0.0, None
    for pos, r in enumerate(rows_idx):
        b, s_ = base[pos], sub[pos]
        stretch = 0.0 if s_ == b else (INF if s_ == INF else s_ - b)
        rows.append((int(r), int(b), -1 if s_ == INF else int(s_), stretch))
        if stretch > max_stretch:
            max_stretch, witness = stretch, int(r)
    clique_alive = None
    if og.cert_edge_index.size:
        all_clique = _clique_edge_indices(og)
        clique_alive = int(h.alive[all_clique].sum())
    return StretchReport(
        rows=rows,
        max_stretch=max_stretch,
        witness=witness,
        kept_edge_count=h.kept_edge_count,
        kept_clique_edge_count=clique_alive,
        scope=scope_name,
    )


def _clique_edge_indices(og: ObstacleGraph) -> np.ndarray:
    """Indices of all clique edges (the chain edges come first in build
    order, but indices are canonical, so recompute by labels-free geometry:
    clique edges are exactly the host-clique pairs, recovered from the
    certificate layout's companion count)."""
    # chain edges have exactly one endpoint below 2*m_host only for
    # attachments; simplest reliable rule: an edge is a clique edge iff both
    # endpoints are clique nodes (< 2 * host.m).
    cutoff = 2 * og.host.m
    e = og.graph.edges
    return np.flatnonzero((e[:, 0] < cutoff) & (e[:, 1] < cutoff))


@dataclass(frozen=True)
class AdversaryFinding:
    pair_index: int
    base_dist: int
    sub_dist: float
    stretch: float


def counting_adversary(og: ObstacleGraph, h: SubgraphMask) -> AdversaryFinding | None:
    """Find a pair whose whole certificate is missing from the mask.

    Disjointness makes this a pure counting step: a mask keeping fewer than
    |P| certificate edges must leave some certificate empty. The guarantee
    that such a pair is stretched by at least k is re-verified by BFS before
    returning; BFS disagreeing is a construction-integrity panic.
    """
    alive = h.alive
    idx = og.cert_edge_index
    cert_alive = np.where(idx >= 0, alive[np.maximum(idx, 0)], False)
    dead = np.flatnonzero(~cert_alive.any(axis=1))
    if dead.size == 0:
        return None
    r = int(dead[0])
    s, t = map(int, og.pairs.pairs[r])
    base = int(kernels.bfs_distances(og.graph.indptr, og.graph.indices, s)[t])
    d = int(kernels.bfs_target_masked(og.graph.indptr, og.graph.indices, h.alive_slots(), s, t))
    sub = INF if d < 0 else float(d)
    stretch = sub - base if sub != INF else INF
    if stretch < og.k:
        raise IntegrityError(
            f"pair {r} lost its whole certificate yet BFS reports stretch "
            f"{stretch} < k={og.k}; the build is broken"
        )
    return AdversaryFinding(r, base, sub, stretch)


@dataclass(frozen=True)
class FamilyMember:
    T: frozenset
    mask: SubgraphMask

    def graph(self) -> Graph:
        return self.mask.graph()


def build_family_member(og: ObstacleGraph, T) -> FamilyMember:
    T = frozenset(int(t) for t in T)
    P = len(og.pairs)
    if any(not 0 <= t < P for t in T):
        raise InputError(f"pair index out of range in T={sorted(T)}")
    alive = np.ones(og.graph.m, dtype=bool)
    for t in T:
        idx = og.cert_edge_index[t]
        alive[idx[idx >= 0]] = False
    return FamilyMember(T, SubgraphMask(og.graph, alive, note=f"family T={sorted(T)}"))


def family_member_distances(og: ObstacleGraph, member: FamilyMember, cutoff: int | None = None) -> list[float]:
    """Exact (or cutoff-bounded) distances of every pair inside a member."""
    slots = member.mask.alive_slots()
    out = []
    depth = -1 if cutoff is None else cutoff
    for s, t in og.pairs.pairs:
        d = int(
            kernels.bfs_target_masked(og.graph.indptr, og.graph.indices, slots, int(s), int(t), depth)
        )
        if d == kernels.CUTOFF:
            out.append(float(cutoff) + 1.0)
        else:
            out.append(INF if d < 0 else float(d))
    return out


def family_check(og: ObstacleGraph, member: FamilyMember) -> list:
    """Violations of the family separation: p in T must sit at >= D+k, every
    other pair at exactly D."""
    D, k = og.D, og.k
    dists = family_member_distances(og, member, cutoff=D + k)
    bad = []
    for r, d in enumerate(dists):
        if r in member.T:
            if d < D + k:
                bad.append((r, d, f"expected >= {D + k}"))
        elif d != D:
            bad.append((r, d, f"expected == {D}"))
    return bad


def bitmap_compressor(bit_budget: int):
    """Certificate-presence indicator, truncated to the first bit_budget
    pairs. Reads only the member's edge set, as a compressor must."""

    def compress(og: ObstacleGraph, alive: np.ndarray) -> int:
        present = alive[og.cert_edge_index].all(axis=1)
        out = 0
        for i, bit in enumerate(present[:bit_budget]):
            if bit:
                out |= 1 << i
        return out

    compress.tag = f"bitmap:{bit_budget}"
    return compress


def hash_compressor(bit_budget: int, seed: int = 0):
    """Seeded blake2b over the canonical surviving-edge bytes, truncated."""

    def compress(og: ObstacleGraph, alive: np.ndarray) -> int:
        h = hashlib.blake2b(
            og.graph.edges[alive].astype("<i4").tobytes(),
            digest_size=8,
            key=seed.to_bytes(8, "little"),
        )
        return int.from_bytes(h.digest(), "little") & ((1 << bit_budget) - 1)

    compress.tag = f"hash:{bit_budget}:{seed}"
    return compress


def identity_compressor():
    """Injective by construction; exists to show the demo coming back
    inconclusive when the pigeonhole premise fails."""

    def compress(og: ObstacleGraph, alive: np.ndarray) -> int:
        present = alive[og.cert_edge_index].all(axis=1)
        out = 0
        for i, bit in enumerate(present):
            if bit:
                out |= 1 << i
        return out

    compress.tag = "identity"
    return compress


@dataclass(frozen=True)
class CollisionWitness:
    T1: tuple
    T2: tuple
    pair_index: int
    dist1: float
    dist2: float
    gap: float
    output: int
    compressor: str
    bit_budget: int
    members_scanned: int

    def to_json_obj(self) -> dict:
        def enc(v):
            return "inf" if v == INF else v

        return {
            "T1": list(self.T1),
            "T2": list(self.T2),
            "pair_index": self.pair_index,
            "dist1": enc(self.dist1),
            "dist2": enc(self.dist2),
            "gap": enc(self.gap),
            "output": self.output,
            "compressor": self.compressor,
            "bit_budget": self.bit_budget,
            "members_scanned": self.members_scanned,
        }


def _member_alive(og: ObstacleGraph, t_bits: int) -> np.ndarray:
    alive = np.ones(og.graph.m, dtype=bool)
    t = t_bits
    while t:
        i = (t & -t).bit_length() - 1
        idx = og.cert_edge_index[i]
        alive[idx[idx >= 0]] = False
        t &= t - 1
    return alive


def pigeonhole_demo(
    og: ObstacleGraph,
    bit_budget: int,
    compressor=None,
    *,
    min_gap: int | None = None,
    mode: str = "auto",
    seed: int = 0,
    sample_budget: int = 4096,
) -> CollisionWitness:
    """Exhibit two family members with equal compressor output and a pair
    whose distances differ by at least min_gap (default k+1).

    Members are scanned in a fixed order (ascending T bitmask, or a seeded
    sample above ~20 pairs); the first collision whose symmetric difference
    contains a qualifying pair wins. Exhausting the scan raises
    InconclusiveError: a failed search is never a claim of compressibility.
    """
    P = len(og.pairs)
    gap_needed = og.k + 1 if min_gap is None else int(min_gap)
    if compressor is None:
        compressor = bitmap_compressor(bit_budget)
    if mode == "auto":
        mode = "enumerate" if P <= 20 else "sample"
    if mode == "enumerate":
        candidates = range(1 << P)
    elif mode == "sample":
        rng = np.random.default_rng(seed)
        seen_t = set()
        cand = []
        for _ in range(sample_budget):
            t = int.from_bytes(rng.bytes((P + 7) // 8), "little") & ((1 << P) - 1)
            if t not in seen_t:
                seen_t.add(t)
                cand.append(t)
        candidates = cand
    else:
        raise InputError(f"unknown mode {mode!r}")

    seen: dict[int, int] = {}
    dist_cache: dict[int, list[float]] = {}

    def exact_dists(t_bits: int) -> list[float]:
        if t_bits not in dist_cache:
            member = FamilyMember(
                frozenset(i for i in range(P) if t_bits >> i & 1),
                SubgraphMask(og.graph, _member_alive(og, t_bits)),
            )
            dist_cache[t_bits] = family_member_distances(og, member)
        return dist_cache[t_bits]

    scanned = 0
    for t_bits in candidates:
        scanned += 1
        alive = _member_alive(og, t_bits)
        out = compressor(og, alive)
        if out not in seen:
            seen[out] = t_bits
            continue
        t1 = seen[out]
        diff = t1 ^ t_bits
        if not diff:
            continue
        d1 = exact_dists(t1)
        d2 = exact_dists(t_bits)
        for i in range(P):
            if not diff >> i & 1:
                continue
            gap = abs(d1[i] - d2[i]) if INF not in (d1[i], d2[i]) else INF
            if d1[i] == d2[i]:
                gap = 0.0
            if gap >= gap_needed:
                return CollisionWitness(
                    T1=tuple(j for j in range(P) if t1 >> j & 1),
                    T2=tuple(j for j in range(P) if t_bits >> j & 1),
                    pair_index=i,
                    dist1=d1[i],
                    dist2=d2[i],
                    gap=gap,
                    output=out,
                    compressor=getattr(compressor, "tag", "custom"),
                    bit_budget=bit_budget,
                    members_scanned=scanned,
                )
    raise InconclusiveError(
        f"no collision with a distance gap >= {gap_needed} among {scanned} "
        "members; this proves nothing about compressibility"
    )


def sweep_family(og: ObstacleGraph, *, limit: int | None = None) -> dict:
    """Enumerate family members (all 2^P, or the first `limit`) and check
    the separation invariant on each; returns counters for reporting."""
    P = len(og.pairs)
    total = 1 << P
    if limit is not None:
        total = min(total, limit)
    D, k = og.D, og.k
    violations = 0
    checked = 0
    slots_template = SubgraphMask.full(og.graph).alive_slots()
    slot_pairs = og.graph.edge_slots(np.arange(og.graph.m))
    for t_bits in range(total):
        slots = slots_template.copy()
        t = t_bits
        while t:
            i = (t & -t).bit_length() - 1
            for e in og.cert_edge_index[i]:
                slots[slot_pairs[e]] = 0
            t &= t - 1
        for r in range(P):
            s, tgt = map(int, og.pairs.pairs[r])
            d = int(
                kernels.bfs_target_masked(
                    og.graph.indptr, og.graph.indices, slots, s, tgt, D + k
                )
            )
            in_t = bool(t_bits >> r & 1)
            ok = (d == D) if not in_t else (d < 0 or d >= D + k)
            checked += 1
            if not ok:
                violations += 1
    return {"members": total, "pair_checks": checked, "violations": violations}
