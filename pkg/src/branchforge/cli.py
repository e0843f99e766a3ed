"""Command line surface for the toolkit.

One binary with subcommands; plain text on standard output, JSON only for
certificates.  Every run is deterministic given the input bytes and flags,
so repeated runs are byte-identical; wall-clock timing goes to standard
error as a comment line.  Exit codes: 0 computed or PASS, 1 a checked
property failed, 2 usage or data errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .atlas import cobweb, enumerate_catalog
from .cover import DoubleCover, double_cover, find_free_involution
from .embed import (
    EmbeddedGraph,
    GraphError,
    StructureError,
    parse_rot,
    representativity,
    representativity_bruteforce,
    write_rot,
)
from .medial import dual_odd_walk, is_k_tight_direct, medial, open_at
from .sweep import carving_from_opening, sweep_tight, validate_sweep_trace
from .width import (
    antipodality_from_json,
    branch_width,
    build_cover_antipodality,
    bw_bruteforce,
    carving_width,
    certify_minor_minimal_bw,
    cw_bruteforce,
    decomposition_from_json,
    decomposition_width,
    optimal_branch_decomposition,
    optimal_carving,
    oracle_carving_suite,
    oracle_medial_suite,
    oracle_representativity_suite,
    validate_antipodality,
)

__all__ = ["RunReport", "main"]


@dataclass(frozen=True)
class RunReport:
    """What one invocation did, for the optional report file.

    Everything serialized here is a pure function of the input bytes and
    the flags; elapsed seconds are carried for the stderr note only and
    never written, which keeps report files byte-identical across runs.
    """

    subcommand: str
    input_digest: Optional[str]
    results: Dict[str, object]
    elapsed: float
    version: str

    def to_json(self) -> str:
        payload = {
            "subcommand": self.subcommand,
            "input_sha256": self.input_digest,
            "results": self.results,
            "version": self.version,
        }
        return json.dumps(payload, sort_keys=True)


def _read_graph(path: str) -> Tuple[EmbeddedGraph, str]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    try:
        return parse_rot(text), digest
    except StructureError as exc:
        raise StructureError(f"{path}: {exc}") from None


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")


def _finish(args, report: RunReport) -> None:
    if getattr(args, "report", None):
        _write_text(args.report, report.to_json())
    print(f"# {report.elapsed:.2f}s", file=sys.stderr)


def _stem(path: str) -> str:
    base, ext = os.path.splitext(path)
    return base if ext == ".rot" else path


# ----------------------------------------------------------------------
# width style subcommands

def _cmd_rep(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    r = representativity(g)
    print(f"representativity {r}")
    results: Dict[str, object] = {"representativity": r}
    if args.oracle:
        rb = representativity_bruteforce(g)
        print(f"oracle representativity {rb}")
        results["oracle"] = rb
        if rb != r:
            raise StructureError(f"oracle disagrees: fast {r}, brute {rb}")
    _finish(args, RunReport("rep", digest, results, time.monotonic() - t0, __version__))
    return 0


def _certify_lines(g: EmbeddedGraph, target: int) -> Tuple[List[str], bool]:
    rep = certify_minor_minimal_bw(g, target)
    lines = [
        f"minor {op} {e} branch-width {w}" for e, op, w in rep.entries
    ]
    if rep.ok:
        lines.append(f"PASS minor-minimal branch-width {target}")
    elif rep.width != target:
        lines.append(f"FAIL branch-width is {rep.width}, not {target}")
    else:
        worst = max(w for _, _, w in rep.entries)
        lines.append(f"FAIL a minor keeps width {worst}")
    return lines, rep.ok


def _cmd_bw(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    w = branch_width(g)
    print(f"branch-width {w}")
    results: Dict[str, object] = {"branch_width": w}
    if args.oracle:
        wb = bw_bruteforce(g)
        print(f"oracle branch-width {wb}")
        results["oracle"] = wb
        if wb != w:
            raise StructureError(f"oracle disagrees: fast {w}, brute {wb}")
    if args.cert:
        dec = optimal_branch_decomposition(g)
        _write_text(args.cert, dec.to_json())
        with open(args.cert, "r", encoding="utf-8") as fh:
            back = decomposition_from_json(fh.read())
        got = decomposition_width(g, back)
        if got != w:
            raise StructureError(f"written certificate has width {got}, not {w}")
        print(f"certificate {args.cert} verified width {got}")
        results["certificate"] = args.cert
    code = 0
    if args.certify_mm is not None:
        lines, ok = _certify_lines(g, args.certify_mm)
        for line in lines:
            print(line)
        results["minor_minimal"] = ok
        code = 0 if ok else 1
    _finish(args, RunReport("bw", digest, results, time.monotonic() - t0, __version__))
    return code


def _cmd_cw(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    w = carving_width(g)
    print(f"carving-width {w}")
    results: Dict[str, object] = {"carving_width": w}
    if args.oracle:
        wb = cw_bruteforce(g)
        print(f"oracle carving-width {wb}")
        results["oracle"] = wb
        if wb != w:
            raise StructureError(f"oracle disagrees: fast {w}, brute {wb}")
    if args.cert:
        carv = optimal_carving(g)
        _write_text(args.cert, carv.to_json())
        with open(args.cert, "r", encoding="utf-8") as fh:
            back = decomposition_from_json(fh.read())
        got = decomposition_width(g, back)
        if got != w:
            raise StructureError(f"written certificate has width {got}, not {w}")
        print(f"certificate {args.cert} verified width {got}")
        results["certificate"] = args.cert
    _finish(args, RunReport("cw", digest, results, time.monotonic() - t0, __version__))
    return 0


def _cmd_certify_mm(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    lines, ok = _certify_lines(g, args.bw)
    for line in lines:
        print(line)
    _finish(
        args,
        RunReport(
            "certify-mm",
            digest,
            {"target": args.bw, "minor_minimal": ok},
            time.monotonic() - t0,
            __version__,
        ),
    )
    return 0 if ok else 1


# ----------------------------------------------------------------------
# structural subcommands

def _cmd_lift(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    dc = double_cover(g)
    base = args.out or (_stem(args.file) + "_lift")
    _write_text(base + ".rot", write_rot(dc.cover))
    lines = []
    for v in sorted(g.vertices()):
        lines.append(
            f"v {v} {DoubleCover.lift_vertex(v, 0)} {DoubleCover.lift_vertex(v, 1)}"
        )
    for e in sorted(g.edge_ids()):
        lines.append(
            f"e {e} {DoubleCover.lift_edge(e, 0)} {DoubleCover.lift_edge(e, 1)}"
        )
    _write_text(base + ".map", "\n".join(lines))
    print(
        f"cover {dc.cover.n_vertices} vertices {dc.cover.n_edges} edges "
        f"surface {dc.cover.surface}"
    )
    print(f"wrote {base}.rot")
    print(f"wrote {base}.map")
    _finish(
        args,
        RunReport(
            "lift",
            digest,
            {"vertices": dc.cover.n_vertices, "edges": dc.cover.n_edges},
            time.monotonic() - t0,
            __version__,
        ),
    )
    return 0


def _cmd_medial(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    m = medial(g).medial
    out = args.out or (_stem(args.file) + "_medial.rot")
    _write_text(out, write_rot(m))
    print(f"medial {m.n_vertices} vertices {m.n_edges} edges surface {m.surface}")
    print(f"wrote {out}")
    _finish(
        args,
        RunReport(
            "medial",
            digest,
            {"vertices": m.n_vertices, "edges": m.n_edges},
            time.monotonic() - t0,
            __version__,
        ),
    )
    return 0


def _cmd_tight(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    k = args.k if args.k is not None else dual_odd_walk(g)[0]
    chk = is_k_tight_direct(g, k)
    if chk.ok:
        print(f"TIGHT k={k}")
        code = 0
    else:
        wit = chk.witness
        if wit[0] == "dual_walk":
            seq = " ".join(str(x) for x in wit[1].seq)
            print(f"NOT_TIGHT dual walk length {wit[1].length}: {seq}")
        else:
            _, v, pair, girth = wit
            print(f"NOT_TIGHT opening vertex {v} pair {pair} girth {girth}")
        code = 1
    _finish(
        args,
        RunReport(
            "tight",
            digest,
            {"k": k, "tight": chk.ok},
            time.monotonic() - t0,
            __version__,
        ),
    )
    return code


def _cmd_open(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    j = open_at(g, args.vertex, args.pair)
    out = args.out or (_stem(args.file) + f"_open_{args.vertex}{args.pair}.rot")
    _write_text(out, write_rot(j))
    print(f"opened {j.n_vertices} vertices {j.n_edges} edges surface {j.surface}")
    print(f"wrote {out}")
    _finish(
        args,
        RunReport(
            "open",
            digest,
            {"vertices": j.n_vertices, "edges": j.n_edges, "surface": j.surface},
            time.monotonic() - t0,
            __version__,
        ),
    )
    return 0


def _cmd_involution(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    sigma = find_free_involution(g, require_embedding=True)
    if sigma is None:
        print("NONE")
        code = 1
    else:
        for v in sorted(sigma):
            if v < sigma[v]:
                print(f"swap {v} {sigma[v]}")
        code = 0
    _finish(
        args,
        RunReport(
            "involution",
            digest,
            {"found": sigma is not None},
            time.monotonic() - t0,
            __version__,
        ),
    )
    return code


# ----------------------------------------------------------------------
# generation subcommands

def _cmd_enumerate(args) -> int:
    t0 = time.monotonic()
    cat = enumerate_catalog(args.k)
    members = cat.graphs()
    print(
        f"catalog k={args.k}: {len(members)} embeddings of "
        f"{cat.abstract_graph_count()} abstract graphs"
    )
    for i, g in enumerate(members):
        print(f"member {i}: {g.n_vertices} vertices {g.n_edges} edges")
    print(f"complete: {'yes' if cat.complete else 'no'}")
    print(
        f"exchange graph connected: "
        f"{'yes' if cat.exchange_graph_connected() else 'no'}"
    )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        index = {g.canonical_form(): i for i, g in enumerate(members)}
        for i, g in enumerate(members):
            path = os.path.join(args.out, f"member_{i:02d}.rot")
            _write_text(path, write_rot(g))
            print(f"wrote {path}")
        exchange = sorted(
            (index[a], index[b], kind) for a, b, kind in cat.exchange_edges
        )
        payload = {
            "k": args.k,
            "complete": cat.complete,
            "members": [
                {
                    "index": i,
                    "canonical": g.canonical_form().hex(),
                    "vertices": g.n_vertices,
                    "edges": g.n_edges,
                }
                for i, g in enumerate(members)
            ],
            "exchange": [[a, b, kind] for a, b, kind in exchange],
        }
        path = os.path.join(args.out, "catalog.json")
        _write_text(path, json.dumps(payload, sort_keys=True, indent=1))
        print(f"wrote {path}")
    _finish(
        args,
        RunReport(
            "enumerate",
            None,
            {
                "k": args.k,
                "embeddings": len(members),
                "abstract": cat.abstract_graph_count(),
            },
            time.monotonic() - t0,
            __version__,
        ),
    )
    return 0


def _cmd_cobweb(args) -> int:
    t0 = time.monotonic()
    g = cobweb(args.k)
    out = args.out or f"cobweb_{args.k}.rot"
    _write_text(out, write_rot(g))
    print(f"cobweb k={args.k}: {g.n_vertices} vertices {g.n_edges} edges")
    print(f"wrote {out}")
    _finish(
        args,
        RunReport(
            "cobweb",
            None,
            {"k": args.k, "vertices": g.n_vertices, "edges": g.n_edges},
            time.monotonic() - t0,
            __version__,
        ),
    )
    return 0


# ----------------------------------------------------------------------
# certificate subcommands

def _cmd_antipodality(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    k = representativity(g)
    dc = double_cover(g)
    med = medial(dc.cover)
    a = build_cover_antipodality(dc, med, k)
    print(
        f"antipodality range {a.range_k} on the cover medial "
        f"({a.host.n_vertices} vertices {a.host.n_edges} edges)"
    )
    results: Dict[str, object] = {"range": a.range_k, "k": k}
    if args.cert:
        _write_text(args.cert, a.to_json())
        with open(args.cert, "r", encoding="utf-8") as fh:
            back = antipodality_from_json(a.host, fh.read())
        validate_antipodality(back)
        print(f"certificate {args.cert} verified range {back.range_k}")
        results["certificate"] = args.cert
    _finish(
        args,
        RunReport("antipodality", digest, results, time.monotonic() - t0, __version__),
    )
    return 0


def _cmd_sweep(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    length, walk = dual_odd_walk(g)
    trace = sweep_tight(g, walk)
    validate_sweep_trace(trace)
    lines = [f"sweep {len(trace.vertices)} steps length {length}"]
    lines.append("initial walk " + " ".join(str(x) for x in trace.walks[0].seq))
    for i, v in enumerate(trace.vertices):
        seq = " ".join(str(x) for x in trace.walks[i + 1].seq)
        lines.append(f"step {i + 1} vertex {v} walk {seq}")
    for line in lines:
        print(line)
    if args.out:
        _write_text(args.out, "\n".join(lines))
        print(f"wrote {args.out}")
    _finish(
        args,
        RunReport(
            "sweep",
            digest,
            {"steps": len(trace.vertices), "length": length},
            time.monotonic() - t0,
            __version__,
        ),
    )
    return 0


def _cmd_carve_open(args) -> int:
    t0 = time.monotonic()
    g, digest = _read_graph(args.file)
    dc = double_cover(g)
    opened, carving = carving_from_opening(dc, args.vertex, args.pair)
    w = decomposition_width(opened, carving)
    print(
        f"carving width {w} on the opened cover "
        f"({opened.n_vertices} vertices {opened.n_edges} edges)"
    )
    results: Dict[str, object] = {"width": w, "vertex": args.vertex, "pair": args.pair}
    if args.cert:
        _write_text(args.cert, carving.to_json())
        with open(args.cert, "r", encoding="utf-8") as fh:
            back = decomposition_from_json(fh.read())
        got = decomposition_width(opened, back)
        if got != w:
            raise StructureError(f"written certificate has width {got}, not {w}")
        print(f"certificate {args.cert} verified width {got}")
        results["certificate"] = args.cert
    _finish(
        args,
        RunReport("carve-open", digest, results, time.monotonic() - t0, __version__),
    )
    return 0


def _cmd_oracle(args) -> int:
    t0 = time.monotonic()
    suites = {
        "carving": oracle_carving_suite,
        "medial": oracle_medial_suite,
        "representativity": oracle_representativity_suite,
    }
    wanted = list(suites) if args.suite == "all" else [args.suite]
    failed = 0
    results: Dict[str, object] = {}
    for name in wanted:
        report = suites[name]()
        print(f"{name}: checked {report.checked}, mismatches {len(report.mismatches)}")
        for miss in report.mismatches:
            print(miss)
        results[name] = {
            "checked": report.checked,
            "mismatches": len(report.mismatches),
        }
        failed += len(report.mismatches)
    _finish(
        args, RunReport("oracle", None, results, time.monotonic() - t0, __version__)
    )
    return 0 if failed == 0 else 1


# ----------------------------------------------------------------------
# parser wiring

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branchforge",
        description="Width parameters and certificates of embedded graphs.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, handler, help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--report", help="write a JSON run report here")
        return p

    p = add("rep", _cmd_rep, "representativity of a projective embedding")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true")

    p = add("bw", _cmd_bw, "branch width of a plane multigraph")
    p.add_argument("file")
    p.add_argument("--certify-mm", type=int, metavar="B")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--cert", metavar="PATH")

    p = add("cw", _cmd_cw, "carving width of a plane multigraph")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--cert", metavar="PATH")

    p = add("certify-mm", _cmd_certify_mm, "minor minimality of the branch width")
    p.add_argument("file")
    p.add_argument("--bw", type=int, required=True)

    p = add("lift", _cmd_lift, "planar double cover of a projective embedding")
    p.add_argument("file")
    p.add_argument("--out", metavar="BASE")

    p = add("medial", _cmd_medial, "medial graph of an embedding")
    p.add_argument("file")
    p.add_argument("--out", metavar="PATH")

    p = add("tight", _cmd_tight, "tightness of a 4-regular projective graph")
    p.add_argument("file")
    p.add_argument("--k", type=int)

    p = add("open", _cmd_open, "open an embedding at a degree-4 vertex")
    p.add_argument("file")
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--pair", choices=("A", "B"), required=True)
    p.add_argument("--out", metavar="PATH")

    p = add("enumerate", _cmd_enumerate, "exchange catalog of a projective grid")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", metavar="DIR")

    p = add("cobweb", _cmd_cobweb, "circular grid with an inner apex")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", metavar="PATH")

    p = add("antipodality", _cmd_antipodality, "cover medial antipodality")
    p.add_argument("file")
    p.add_argument("--cert", metavar="PATH")

    p = add("sweep", _cmd_sweep, "sweep a tight graph along its short dual walk")
    p.add_argument("file")
    p.add_argument("--out", metavar="PATH")

    p = add("carve-open", _cmd_carve_open, "carving of an opened double cover")
    p.add_argument("file")
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--pair", choices=("A", "B"), required=True)
    p.add_argument("--cert", metavar="PATH")

    p = add("involution", _cmd_involution, "fixed-point-free embedding involution")
    p.add_argument("file")

    p = add("oracle", _cmd_oracle, "exhaustive fast-vs-brute suites")
    p.add_argument(
        "--suite",
        choices=("carving", "medial", "representativity", "all"),
        default="all",
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
