"""Stage runner: plan parameters, build the construction chain, audit every
stage, and persist deterministic artifact directories.

A run directory holds one subdirectory per completed stage
(stage-base/, stage-compress/, stage-op/), each with graph.edges,
labels.json, pairs.txt, certificates.txt (extension stage only) and a
manifest.json, plus a top-level manifest chaining the stage digests. Bytes
are reproducible: same arguments, same files.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .avgfree import AvgFreeSet, ConstructionParams, build_avgfree
from .base_graph import LayeredGraph, PairSet, audit_base, build_base
from .errors import BudgetError, ConstructionViolation, InputError
from .formats import (
    dump_json,
    read_certificates,
    read_edges,
    read_json,
    read_labels,
    read_pairs,
    sha256_file,
    write_certificates,
    write_edges,
    write_json,
    write_labels,
    write_pairs,
)
from .graph import Graph
from .labels import NodeLabelTable
from .obstacle_product import ObstacleGraph, audit_op, build_op
from .path_compression import CompressedGraph, audit_compressed, compress, product_id

NODE_CEILING = 10**7
STAGES = ("base", "compress", "op")


def _floor_root(n: int, e: int) -> int:
    """Largest integer a with a**e <= n."""
    if n < 1:
        return 0
    a = max(1, int(round(n ** (1.0 / e))))
    while (a + 1) ** e <= n:
        a += 1
    while a**e > n:
        a -= 1
    return a


def plan(
    epsilon=None, p: int | None = None, k: int = 2, d: int | None = None
) -> ConstructionParams:
    """Resolve the parameter block with exact rational arithmetic.

    Either epsilon (which fixes d) or d directly; p is optional and, when
    present, fixes q, the universe size N, and the advisory ceiling on k
    (the largest k the density target tolerates at this N). Exceeding the
    advisory is allowed but flagged: small universes cannot meet it.
    """
    if k < 1:
        raise InputError(f"k={k} must be >= 1")
    eps = None
    if epsilon is not None:
        eps = Fraction(epsilon)
        if eps <= 0:
            raise InputError(f"epsilon={epsilon} must be positive")
        d_eps = math.ceil(3 / eps)
        if d is not None and d != d_eps:
            raise InputError(f"d={d} contradicts epsilon={epsilon} (implies d={d_eps})")
        d = d_eps
    if d is None:
        raise InputError("need epsilon or d")
    if d < 1:
        raise InputError(f"d={d} must be >= 1")
    delta = Fraction(1, 2 * d * d)
    q = N = advisory = None
    flags: list[str] = []
    if p is not None:
        if p < 2:
            raise InputError(f"p={p} must be >= 2")
        q = (k + 1) * p
        N = q**d
        advisory = _floor_root(N, 2 * d * d)
        if k > advisory:
            flags.append("k_exceeds_advisory_cap")
    return ConstructionParams(
        k=k,
        p=p,
        d=d,
        epsilon=eps,
        delta=delta,
        q=q,
        N=N,
        advisory_k=advisory,
        flags=tuple(flags),
    )


def fixture_set() -> AvgFreeSet:
    """Two-element hand-checked set over a two-element universe, k=2; the
    smallest input that exercises every stage."""
    return AvgFreeSet(2, 2, np.array([1, 2], dtype=np.int64), {"manual": True})


def _avgfree_digest(a: AvgFreeSet) -> str:
    return hashlib.sha256(dump_json(a.to_json_obj()).encode()).hexdigest()


def _merge(stage_params: ConstructionParams, planned: ConstructionParams | None):
    if planned is None:
        return stage_params
    kw = {}
    for name in ("epsilon", "delta", "advisory_k"):
        val = getattr(planned, name)
        if val is not None and getattr(stage_params, name) is None:
            kw[name] = val
    if planned.flags and not stage_params.flags:
        kw["flags"] = planned.flags
    return stage_params.with_stage(**kw) if kw else stage_params


def _write_stage(
    run_dir: Path,
    name: str,
    graph: Graph,
    labels: NodeLabelTable,
    pairs: np.ndarray,
    w1: np.ndarray,
    w2: np.ndarray,
    pairs_columns: list[str],
    params: ConstructionParams,
    input_digest: str,
    extras: dict,
    certificates: np.ndarray | None = None,
) -> dict:
    d = run_dir / f"stage-{name}"
    d.mkdir(parents=True, exist_ok=True)
    write_edges(d / "graph.edges", graph)
    write_labels(d / "labels.json", labels)
    write_pairs(d / "pairs.txt", pairs, w1, w2)
    names = ["graph.edges", "labels.json", "pairs.txt"]
    if certificates is not None:
        write_certificates(d / "certificates.txt", certificates)
        names.append("certificates.txt")
    manifest = {
        "stage": name,
        "node_count": graph.n,
        "edge_count": graph.m,
        "pair_count": int(len(pairs)),
        "pairs_columns": pairs_columns,
        "params": params.to_json_obj(),
        "input_digest": input_digest,
        "output_digest": graph.digest(),
        "files": {fn: sha256_file(d / fn) for fn in names},
        **extras,
    }
    write_json(d / "manifest.json", manifest)
    return manifest


@dataclass
class RunResult:
    run_dir: Path
    stage_target: str
    avgfree: AvgFreeSet
    base: tuple  # (LayeredGraph, PairSet)
    compressed: CompressedGraph | None
    op: ObstacleGraph | None
    manifests: dict
    top_manifest: dict


def run_pipeline(
    out_dir,
    stage: str = "op",
    *,
    fixture: bool = False,
    p: int | None = None,
    d: int | None = None,
    k: int | None = None,
    epsilon=None,
    op_host: str = "product",
    seed: int = 0,
    node_ceiling: int = NODE_CEILING,
    check: bool = True,
    deletion_scope: int | None = 8,
) -> RunResult:
    """Build up to `stage` and write the artifacts under out_dir.

    Every stage is audited right after it is built; a dirty audit raises
    ConstructionViolation with the report attached as .report. Projected
    sizes are checked against node_ceiling before any allocation.
    """
    if stage not in STAGES:
        raise InputError(f"unknown stage {stage!r}, expected one of {STAGES}")
    if op_host not in ("product", "base"):
        raise InputError(f"op_host must be 'product' or 'base', got {op_host!r}")
    run_dir = Path(out_dir)
    run_dir.mkdir(parents=True, exist_ok=True)

    planned: ConstructionParams | None = None
    if fixture:
        if p is not None or d is not None or epsilon is not None:
            raise InputError("the fixture fixes p/d/epsilon; drop those arguments")
        if k not in (None, 2):
            raise InputError("the fixture set is 2-average-free; k must be 2")
        k = 2
        a = fixture_set()
    else:
        if k is None:
            k = 2
        planned = plan(epsilon=epsilon, p=p, k=k, d=d)
        if planned.p is None:
            raise InputError("need p (with d or epsilon) unless fixture is set")
        a = build_avgfree(planned.p, planned.d, k)

    projected = (k + 1) ** 2 * a.universe_N
    if projected > node_ceiling:
        raise BudgetError(
            f"base stage needs {projected} nodes, over the ceiling {node_ceiling}"
        )
    lg, ps = build_base(a, check=check)
    rep = audit_base(lg, ps)
    if not rep.ok:
        err = ConstructionViolation(f"base audit failed: {rep.to_json_obj()}")
        err.report = rep
        raise err
    base_params = _merge(lg.params, planned)
    manifests = {
        "base": _write_stage(
            run_dir,
            "base",
            lg.graph,
            lg.labels,
            ps.pairs,
            ps.witness["x"],
            ps.witness["a"],
            ["source", "target", "x", "a"],
            base_params,
            _avgfree_digest(a),
            {
                "set_size": int(len(a.elements)),
                "universe_N": a.universe_N,
                "fixture": bool(fixture),
                "avgfree_verified": bool(check),
            },
        )
    }

    host = (lg.graph, ps, k, "base", base_params)
    cg = None
    if stage in ("compress", "op") and (stage == "compress" or op_host == "product"):
        projected = 2 * lg.graph.n**2
        if projected > node_ceiling:
            raise BudgetError(
                f"product stage needs {projected} nodes, over the ceiling {node_ceiling}"
            )
        cg = compress(lg, ps)
        repc = audit_compressed(cg)
        if not repc.ok:
            err = ConstructionViolation(f"product audit failed: {repc.to_json_obj()}")
            err.report = repc
            raise err
        c_params = _merge(cg.params, planned)
        manifests["compress"] = _write_stage(
            run_dir,
            "compress",
            cg.graph,
            cg.labels,
            cg.pairs.pairs,
            cg.pairs.witness["i1"],
            cg.pairs.witness["i2"],
            ["source", "target", "i1", "i2"],
            c_params,
            lg.graph.digest(),
            {
                "forward_edges": int(len(cg.orientation.fwd)),
                "unoriented_base_edges": int(cg.orientation.unoriented_count),
            },
        )
        host = (cg.graph, cg.pairs, 2 * k, "product", c_params)

    og = None
    if stage == "op":
        host_g, host_ps, delta, kind, host_params = host
        ell = 3 * delta
        projected = (ell + 1) * host_g.m
        if projected > node_ceiling:
            raise BudgetError(
                f"extension stage needs {projected} nodes, over the ceiling {node_ceiling}"
            )
        og = build_op(host_g, host_ps, delta, params=host_params, host_kind=kind, check_host=False)
        repo = audit_op(og, deletion_scope=deletion_scope, seed=seed)
        if not repo.ok:
            err = ConstructionViolation(f"extension audit failed: {repo.to_json_obj()}")
            err.report = repo
            raise err
        P = len(og.pairs)
        g = og.graph
        isolated = int((host_g.degrees == 0).sum())
        extras = {
            "host_kind": kind,
            "D": og.D,
            "k": og.k,
            "Delta": delta,
            "ell": ell,
            "clique_nodes": 2 * host_g.m,
            "path_nodes": (ell - 1) * host_g.m,
            "clique_edge_count": og.clique_edge_count,
            "chain_edge_count": g.m - og.clique_edge_count,
            "certificate_edges": int(og.cert_edge_index.size),
            "alpha_pairs_per_node": P / g.n,
            "beta_edges_per_node": g.m / g.n,
        }
        if isolated:
            extras["warnings"] = [
                f"{isolated} host nodes are isolated and contribute no clique"
            ]
        manifests["op"] = _write_stage(
            run_dir,
            "op",
            g,
            og.labels,
            og.pairs.pairs,
            og.host_pairs.pairs[:, 0],
            og.host_pairs.pairs[:, 1],
            ["source", "target", "host_source", "host_target"],
            og.params,
            host_g.digest(),
            extras,
            certificates=og.certificates,
        )

    chain = [
        {
            "stage": name,
            "input_digest": manifests[name]["input_digest"],
            "output_digest": manifests[name]["output_digest"],
        }
        for name in STAGES
        if name in manifests
    ]
    top = {
        "format_version": 1,
        "stage_target": stage,
        "arguments": {
            "fixture": bool(fixture),
            "p": None if fixture else (planned.p if planned else None),
            "d": None if fixture else (planned.d if planned else None),
            "k": k,
            "epsilon": str(epsilon) if epsilon is not None else None,
            "op_host": op_host if stage == "op" else None,
            "seed": seed,
            "node_ceiling": node_ceiling,
        },
        "stages": [c["stage"] for c in chain],
        "digest_chain": chain,
    }
    write_json(run_dir / "manifest.json", top)
    return RunResult(
        run_dir=run_dir,
        stage_target=stage,
        avgfree=a,
        base=(lg, ps),
        compressed=cg,
        op=og,
        manifests=manifests,
        top_manifest=top,
    )


# ---------------------------------------------------------------------------
# loading artifacts back


@dataclass
class LoadedStage:
    kind: str
    graph: Graph
    labels: NodeLabelTable
    pairs: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    certificates: np.ndarray | None
    manifest: dict
    path: Path


def load_stage(path) -> LoadedStage:
    """Read one stage directory back. Every mandatory file must be present;
    a stage without labels.json is unusable and rejected outright."""
    p = Path(path)
    man_path = p / "manifest.json"
    if not man_path.exists():
        raise InputError(f"{p}: no manifest.json; not a stage directory")
    manifest = read_json(man_path)
    for fn in ("graph.edges", "labels.json", "pairs.txt"):
        if not (p / fn).exists():
            raise InputError(f"{p}: missing {fn}")
    graph = read_edges(p / "graph.edges")
    labels = read_labels(p / "labels.json")
    pairs, w1, w2 = read_pairs(p / "pairs.txt")
    certs = None
    if (p / "certificates.txt").exists():
        certs = read_certificates(p / "certificates.txt")
    return LoadedStage(
        kind=manifest.get("stage", "unknown"),
        graph=graph,
        labels=labels,
        pairs=pairs,
        w1=w1,
        w2=w2,
        certificates=certs,
        manifest=manifest,
        path=p,
    )


def find_stages(run_dir) -> dict[str, Path]:
    run_dir = Path(run_dir)
    out = {}
    for name in STAGES:
        d = run_dir / f"stage-{name}"
        if d.is_dir():
            out[name] = d
    if not out and (run_dir / "manifest.json").exists():
        # run_dir may itself be a stage directory
        stage = read_json(run_dir / "manifest.json").get("stage")
        if stage in STAGES:
            out[stage] = run_dir
    if not out:
        raise InputError(f"{run_dir}: no stage directories found")
    return out


class _PairsView:
    __slots__ = ("pairs",)

    def __init__(self, arr: np.ndarray):
        self.pairs = arr

    def __len__(self) -> int:
        return len(self.pairs)


class _HostStub:
    __slots__ = ("m",)

    def __init__(self, m: int):
        self.m = m


@dataclass
class OpView:
    """Just enough of the extension-stage surface to run audits against
    loaded files: graph, pairs, certificates and the D/k arithmetic."""

    graph: Graph
    labels: NodeLabelTable
    pairs: _PairsView
    certificates: np.ndarray
    cert_edge_index: np.ndarray
    D: int
    k: int
    host: _HostStub
    missing_cert_edges: list

    @classmethod
    def from_stage(cls, st: LoadedStage) -> "OpView":
        if st.certificates is None:
            raise InputError(f"{st.path}: stage has no certificates.txt")
        params = st.manifest.get("params", {})
        D = st.manifest.get("D", params.get("D"))
        delta = params.get("Delta")
        if D is None or delta is None:
            raise InputError(f"{st.path}: manifest lacks D/Delta")
        certs = st.certificates
        idx = st.graph.edge_index(certs.reshape(-1, 2)).reshape(certs.shape[:2])
        missing = [tuple(map(int, pos)) for pos in np.argwhere(idx < 0)]
        clique_nodes = st.manifest.get("clique_nodes")
        if clique_nodes is None:
            clique_nodes = sum(1 for r in st.labels.rows if type(r).__name__ == "CliqueNode")
        return cls(
            graph=st.graph,
            labels=st.labels,
            pairs=_PairsView(st.pairs.astype(np.int32)),
            certificates=certs,
            cert_edge_index=idx,
            D=int(D),
            k=int(delta) - 1,
            host=_HostStub(int(clique_nodes) // 2),
            missing_cert_edges=missing,
        )


def base_paths_from_witness(w_x: np.ndarray, w_a: np.ndarray, k: int) -> np.ndarray:
    """Reconstruct canonical layered paths from the pair witness columns:
    step s of pair (x, a) sits at coordinate x + s*a in layer s."""
    s = np.arange(k + 1, dtype=np.int64)
    x = np.asarray(w_x, dtype=np.int64)[:, None]
    a = np.asarray(w_a, dtype=np.int64)[:, None]
    return ((x + s[None, :] * a - 1) * (k + 1) + s[None, :]).astype(np.int32)


def rho_from_base_paths(p1: np.ndarray, p2: np.ndarray, n: int) -> np.ndarray:
    """Reconstruct the alternating product walks from two base paths."""
    P, L = p1.shape
    k = L - 1
    rho = np.empty((P, 2 * k + 1), dtype=np.int64)
    rho[:, 0] = product_id(p1[:, 0], p2[:, 0], 1, n)
    for s in range(k):
        rho[:, 2 * s + 1] = product_id(p1[:, s + 1], p2[:, s], 2, n)
        rho[:, 2 * s + 2] = product_id(p1[:, s + 1], p2[:, s + 1], 1, n)
    return rho.astype(np.int32)
