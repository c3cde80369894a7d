"""Command line front end.

Subcommands: gen (build stages), verify (recheck artifact directories),
spanner (sparsify a graph), stress (budgeted deletion trials), incompress
(collision demo), report (merge stage statistics).

Exit codes: 0 clean, 2 findings (failed audit, discovered violation,
inconclusive search), 1 usage or I/O trouble. Every writing subcommand
drops a manifest echoing its arguments and the digests of what it read.

Node roles are written as structured labels: `B:x,j` for layered-grid
nodes, `P:u1,u2,i` for alternating-product nodes, `K:v,u,w` for clique
nodes of the edge extension, `E:u,v,i` for its chain nodes.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .base_graph import _shared_path_edges
from .errors import (
    BudgetError,
    ConstructionViolation,
    InconclusiveError,
    InputError,
    IntegrityError,
    OpGraphError,
)
from .formats import read_edges, write_edges, write_json
from .graph import Graph
from .obstacle_product import audit_op
from .path_compression import _shared_two_paths
from .pipeline import (
    LoadedStage,
    OpView,
    base_paths_from_witness,
    find_stages,
    load_stage,
    rho_from_base_paths,
    run_pipeline,
)
from .spanners import (
    girth,
    op_retention,
    spanner_greedy_mult,
    spanner_plus2,
    spanner_plus6,
    verify_spanner,
)
from .verification import (
    SubgraphMask,
    bitmap_compressor,
    build_family_member,
    counting_adversary,
    family_check,
    family_member_distances,
    hash_compressor,
    pigeonhole_demo,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; our contract reserves 2 for
    # findings, so usage trouble must come back as 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _echo_args(args) -> dict:
    skip = {"func"}
    return {
        key: (str(val) if isinstance(val, Path) else val)
        for key, val in sorted(vars(args).items())
        if key not in skip
    }


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    if args.fixture and (args.p is not None or args.d is not None):
        raise InputError("--fixture fixes the set; drop --p/--d")
    if not args.fixture and args.p is None:
        raise InputError("need --p (with --d or --eps), or --fixture")
    if args.stage == "op" and (args.k if args.k is not None else 2) < 2:
        raise InputError(
            f"k={args.k} gives a degenerate separation; the extension stage needs k >= 2"
        )
    result = run_pipeline(
        args.out,
        args.stage,
        fixture=args.fixture,
        p=args.p,
        d=args.d,
        k=args.k,
        epsilon=args.eps,
        op_host=args.op_host,
        seed=args.seed,
        node_ceiling=args.node_ceiling,
    )
    for name in result.top_manifest["stages"]:
        man = result.manifests[name]
        print(
            f"stage-{name}: {man['node_count']} nodes, {man['edge_count']} edges, "
            f"{man['pair_count']} pairs"
        )
    print(f"wrote {result.run_dir}/manifest.json")
    return 0


# ---------------------------------------------------------------------------
# verify


def _distance_findings(st: LoadedStage, expected: int) -> list:
    g = st.graph
    items = []
    order = np.argsort(st.pairs[:, 0], kind="stable")
    i = 0
    while i < len(order):
        src = int(st.pairs[order[i], 0])
        dist, mult = kernels.bfs_count(g.indptr, g.indices, src, expected)
        while i < len(order) and int(st.pairs[order[i], 0]) == src:
            row = int(order[i])
            t = int(st.pairs[row, 1])
            d_obs, m_obs = int(dist[t]), int(mult[t])
            if d_obs != expected:
                items.append({"pair": row, "kind": "distance", "observed": d_obs})
            elif m_obs != 1:
                items.append({"pair": row, "kind": "multiplicity", "observed": m_obs})
            i += 1
    return items


def _paths_present(g: Graph, paths: np.ndarray) -> list:
    u = np.minimum(paths[:, :-1], paths[:, 1:]).astype(np.int64)
    v = np.maximum(paths[:, :-1], paths[:, 1:]).astype(np.int64)
    idx = g.edge_index(np.stack([u.ravel(), v.ravel()], axis=1))
    bad = np.flatnonzero(idx < 0)
    hops = paths.shape[1] - 1
    return [
        {"pair": int(b // hops), "kind": "path-edge-missing", "hop": int(b % hops)}
        for b in bad[:20]
    ]


def _finding(check: str, stage: str, items: list) -> dict:
    return {"check": check, "stage": stage, "count": len(items), "examples": items[:10]}


def cmd_verify(args) -> int:
    stages = find_stages(args.in_dir)
    loaded = {name: load_stage(p) for name, p in stages.items()}
    want = lambda c: args.check in ("all", c)
    findings = []

    if "base" in loaded:
        st = loaded["base"]
        delta = int(st.manifest["params"]["Delta"])
        if want("unique-sp"):
            items = _distance_findings(st, delta)
            if items:
                findings.append(_finding("unique-sp", "base", items))
        if want("disjoint"):
            paths = base_paths_from_witness(st.w1, st.w2, delta)
            items = _paths_present(st.graph, paths)
            if not items:
                items = [
                    {"pairs": [int(a), int(b)], "edge": [int(e[0]), int(e[1])]}
                    for a, b, e in _shared_path_edges(st.graph, paths)
                ]
            if items:
                findings.append(_finding("disjoint", "base", items))

    if "compress" in loaded:
        st = loaded["compress"]
        delta = int(st.manifest["params"]["Delta"])
        if want("unique-sp"):
            items = _distance_findings(st, delta)
            if items:
                findings.append(_finding("unique-sp", "compress", items))
        if want("2path"):
            if "base" not in loaded:
                if args.check == "2path":
                    raise InputError(
                        "the 2-path check rebuilds walks from the base stage; "
                        "point --in at the run directory containing stage-base"
                    )
            else:
                bst = loaded["base"]
                k = int(bst.manifest["params"]["Delta"])
                bpaths = base_paths_from_witness(bst.w1, bst.w2, k)
                i1 = st.w1.astype(np.int64)
                i2 = st.w2.astype(np.int64)
                rho = rho_from_base_paths(bpaths[i1], bpaths[i2], bst.graph.n)
                items = _paths_present(st.graph, rho)
                if not items:
                    items = [
                        {"pairs": [int(a), int(b)], "middle": list(map(int, key))}
                        for a, b, key in _shared_two_paths(st.graph.n, rho)
                    ]
                if items:
                    findings.append(_finding("2path", "compress", items))

    if "op" in loaded:
        st = loaded["op"]
        view = OpView.from_stage(st)
        if want("op-claims"):
            if view.missing_cert_edges:
                findings.append(
                    _finding(
                        "op-claims",
                        "op",
                        [
                            {"pair": p, "slot": s, "kind": "certificate-edge-missing"}
                            for p, s in view.missing_cert_edges
                        ],
                    )
                )
            scope = None if len(view.pairs) <= 32 else 8
            rep = audit_op(view, deletion_scope=scope, seed=args.seed)
            items = []
            items += [{"pair": r, "kind": "distance", "observed": d} for r, d in rep.distance_failures]
            items += [
                {"pairs": [a, b], "kind": "shared-certificate-edge", "edge": list(e)}
                for a, b, e in rep.certificate_disjointness_violations
            ]
            items += [
                {"deleted_pair": a, "checked_pair": b, "kind": "detour", "observed": int(d)}
                for a, b, d in rep.detour_failures
            ]
            if items:
                findings.append(_finding("op-claims", "op", items))
        if want("family"):
            rng = np.random.default_rng(args.seed)
            P = len(view.pairs)
            items = []
            for _ in range(8):
                size = int(rng.integers(0, P + 1))
                T = sorted(rng.choice(P, size=size, replace=False).tolist())
                for r, d_obs, expect in family_check(view, build_family_member(view, T)):
                    items.append({"T": T, "pair": r, "observed": d_obs, "expected": expect})
            if items:
                findings.append(_finding("family", "op", items))

    if args.report:
        write_json(
            args.report,
            {"arguments": _echo_args(args), "ok": not findings, "findings": findings},
        )
    for f in findings:
        print(
            f"FINDING {f['check']} [{f['stage']}]: {f['count']} item(s), "
            f"e.g. {f['examples'][0]}"
        )
    if not findings:
        print(f"verified {', '.join(sorted(loaded))}: no findings")
    return 2 if findings else 0


# ---------------------------------------------------------------------------
# spanner


def cmd_spanner(args) -> int:
    if (args.graph is None) == (args.in_dir is None):
        raise InputError("exactly one of --graph or --in")
    st = None
    if args.graph is not None:
        g = read_edges(args.graph)
        source = str(args.graph)
    else:
        stages = find_stages(args.in_dir)
        name = sorted(stages)[-1] if "op" not in stages else "op"
        st = load_stage(stages[name])
        g = st.graph
        source = str(stages[name])

    if args.algo == "plus2":
        res = spanner_plus2(g)
        kind = "additive"
    elif args.algo == "plus6":
        res = spanner_plus6(g)
        kind = "additive"
    else:
        if args.t is None:
            raise InputError("--algo greedy needs --t")
        res = spanner_greedy_mult(g, args.t)
        kind = "ratio"

    pairs = st.pairs if st is not None else None
    audit = verify_spanner(g, res.kept, kind=kind, pairs=pairs, seed=args.seed)
    res.verified_bound = audit.bound
    res.audit_mode = audit.mode
    res.witness = audit.witness
    if args.algo == "greedy" and g.n <= 2000:
        gg = girth(res.graph(g))
        res.extras["girth_out"] = "inf" if gg == float("inf") else int(gg)
    if st is not None and st.certificates is not None:
        res.extras["retention"] = op_retention(OpView.from_stage(st), res.kept)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_edges(out / "spanner.edges", res.graph(g))
    manifest = {
        **res.to_manifest_obj(),
        "arguments": _echo_args(args),
        "input": source,
        "input_digest": g.digest(),
        "output_digest": res.graph(g).digest(),
        "witness": list(res.witness) if res.witness else None,
    }
    write_json(out / "manifest.json", manifest)
    bound = manifest["verified_bound"]
    print(
        f"{args.algo}: kept {res.m_out}/{res.m_in} edges, measured bound {bound} "
        f"({audit.mode})"
    )
    return 0


# ---------------------------------------------------------------------------
# stress


def cmd_stress(args) -> int:
    stages = find_stages(args.in_dir)
    if "op" not in stages:
        raise InputError("stress needs an extension stage (stage-op)")
    view = OpView.from_stage(load_stage(stages["op"]))
    idx = view.cert_edge_index
    cert_edges = np.unique(idx[idx >= 0])
    C = len(cert_edges)
    P = len(view.pairs)
    B = args.budget_clique_edges
    if not 0 <= B <= C:
        raise InputError(f"budget {B} out of range [0, {C}]")
    guaranteed = B < P

    rng = np.random.default_rng(args.seed)
    rows = []
    witnesses = 0
    for trial in range(args.trials):
        keep = rng.choice(cert_edges, size=B, replace=False) if B else np.empty(0, dtype=np.int64)
        alive = np.ones(view.graph.m, dtype=bool)
        alive[cert_edges] = False
        alive[keep] = True
        mask = SubgraphMask(view.graph, alive, note=f"stress trial {trial}")
        finding = counting_adversary(view, mask)
        if finding is None:
            rows.append((trial, B, -1, -1, -1, 0.0))
        else:
            witnesses += 1
            rows.append(
                (trial, B, finding.pair_index, finding.base_dist, finding.sub_dist, finding.stretch)
            )
        if B == 0 and trial == 0:
            # with nothing kept, every single pair must be stretched
            member = build_family_member(view, range(P))
            dists = family_member_distances(view, member, cutoff=view.D + view.k)
            short = [r for r, dd in enumerate(dists) if dd < view.D + view.k]
            if short:
                raise IntegrityError(
                    f"pairs {short} kept distance < D+k with every certificate gone"
                )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trials.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "kept_cert_edges", "witness_pair", "base_dist", "sub_dist", "stretch"])
        for trial, b, pair, base, sub, stretch in rows:
            w.writerow(
                [trial, b, pair, base, "inf" if sub == float("inf") else sub,
                 "inf" if stretch == float("inf") else stretch]
            )
    ok = (not guaranteed) or witnesses == args.trials
    write_json(
        out / "manifest.json",
        {
            "arguments": _echo_args(args),
            "input_digest": view.graph.digest(),
            "pairs": P,
            "certificate_edges": C,
            "budget_kept": B,
            "guaranteed_regime": guaranteed,
            "trials": args.trials,
            "witnesses_found": witnesses,
            "ok": ok,
        },
    )
    regime = "guaranteed" if guaranteed else "exploratory"
    print(f"{regime}: {witnesses}/{args.trials} trials produced a verified witness")
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# incompress


def cmd_incompress(args) -> int:
    stages = find_stages(args.in_dir)
    if "op" not in stages:
        raise InputError("incompress needs an extension stage (stage-op)")
    view = OpView.from_stage(load_stage(stages["op"]))
    if args.compressor == "bitmap":
        comp = bitmap_compressor(args.bits)
    else:
        comp = hash_compressor(args.bits, args.seed)
    try:
        w = pigeonhole_demo(view, args.bits, comp, seed=args.seed)
    except InconclusiveError as exc:
        if args.out:
            write_json(
                args.out,
                {"arguments": _echo_args(args), "inconclusive": str(exc)},
            )
        print(f"inconclusive: {exc}")
        return 2
    obj = {"arguments": _echo_args(args), **w.to_json_obj()}
    if args.out:
        write_json(args.out, obj)
    print(
        f"collision: outputs equal on T1={list(w.T1)} and T2={list(w.T2)}, pair "
        f"{w.pair_index} separates them by {w.gap}"
    )
    return 0


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    stages = find_stages(args.in_dir)
    cols = [
        "stage",
        "node_count",
        "edge_count",
        "pair_count",
        "Delta",
        "ell",
        "D",
        "clique_edge_count",
        "chain_edge_count",
        "certificate_edges",
    ]
    rows = []
    for name in ("base", "compress", "op"):
        if name not in stages:
            continue
        man = load_stage(stages[name]).manifest
        params = man.get("params", {})
        row = {c: man.get(c, params.get(c, "")) for c in cols}
        row["stage"] = name
        rows.append(row)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {args.out} ({len(rows)} stage rows)")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="opgraph", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--seed", type=int, default=0, help="single RNG seed for every sampled step")
    parser.add_argument("--threads", type=int, default=1, help="accepted for interface stability; kernels are single-threaded")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="build construction stages into a run directory")
    g.add_argument("--stage", choices=["base", "compress", "op"], required=True)
    g.add_argument("--fixture", action="store_true", help="use the built-in two-element set (k=2)")
    g.add_argument("--p", type=int, help="shell modulus")
    g.add_argument("--d", type=int, help="shell dimension")
    g.add_argument("--k", type=int, default=None, help="separation parameter (default 2)")
    g.add_argument("--eps", type=str, default=None, help="density exponent; fixes d (exact rational, e.g. 1 or 1/2)")
    g.add_argument("--op-host", choices=["product", "base"], default="product", dest="op_host")
    g.add_argument("--node-ceiling", type=int, default=10**7, dest="node_ceiling")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="recheck an artifact directory by BFS")
    v.add_argument("--in", dest="in_dir", required=True)
    v.add_argument(
        "--check",
        choices=["all", "unique-sp", "disjoint", "2path", "op-claims", "family"],
        default="all",
    )
    v.add_argument("--report", help="write findings JSON here")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spanner", help="sparsify a graph and measure the bound")
    s.add_argument("--graph", help="edge-list file")
    s.add_argument("--in", dest="in_dir", help="stage or run directory")
    s.add_argument("--algo", choices=["plus2", "plus6", "greedy"], required=True)
    s.add_argument("--t", type=int, help="stretch parameter for greedy")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_spanner)

    st = sub.add_parser("stress", help="budgeted deletion trials against an extension stage")
    st.add_argument("--in", dest="in_dir", required=True)
    st.add_argument("--budget-clique-edges", type=int, required=True, dest="budget_clique_edges",
                    help="certificate edges KEPT per trial")
    st.add_argument("--trials", type=int, default=100)
    st.add_argument("--out", required=True)
    st.set_defaults(func=cmd_stress)

    i = sub.add_parser("incompress", help="pigeonhole collision demo")
    i.add_argument("--in", dest="in_dir", required=True)
    i.add_argument("--bits", type=int, required=True)
    i.add_argument("--compressor", choices=["bitmap", "hash"], default="bitmap")
    i.add_argument("--out", help="write the collision witness JSON here")
    i.set_defaults(func=cmd_incompress)

    r = sub.add_parser("report", help="merge stage statistics into one CSV")
    r.add_argument("--in", dest="in_dir", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConstructionViolation as exc:
        print(f"audit failure: {exc}", file=sys.stderr)
        return 2
    except IntegrityError as exc:
        print(f"integrity panic: {exc}", file=sys.stderr)
        return 2
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 2
    except OpGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
