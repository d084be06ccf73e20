"""Line-oriented graph file format.

Layout (UTF-8, tab-separated, LF endings):

    #netdim-graph v1 n=<int> m=<int> dims=<int> model=<tag> a=<float> d=<int> rng=<uint64>
    N <id> <seed|nonseed> <birth> <color[,color]>
    E <u> <v> <init|seed-pa|seed-rand|homophyly|circle|reassigned>

Edge lines are written with ``u < v``.  Lines starting with ``#`` after the
header are comments.  Node lines come before edge lines and both are written
in sorted order, so equal graphs serialize to identical bytes.
"""

from __future__ import annotations

from .graph import ColoredGraph, GenParams, MODEL_TAGS, NodeRecord

FORMAT_TAG = "#netdim-graph"
FORMAT_VERSION = "v1"
_HEADER_KEYS = ("n", "m", "dims", "model", "a", "d", "rng")


class ParseError(ValueError):
    """Raised on malformed graph files; the message names the offending line."""


def _header_line(g: ColoredGraph) -> str:
    dims = max(g.params.k, 1)
    if g.model in ("reduced", "external") and g.n > 0:
        dims = max(len(rec.colors) for rec in g.nodes)
    fields = [
        f"n={g.n}",
        f"m={g.m}",
        f"dims={dims}",
        f"model={g.model}",
        f"a={g.params.a!r}",
        f"d={g.params.d}",
        f"rng={g.params.rng_seed}",
    ]
    return f"{FORMAT_TAG} {FORMAT_VERSION} " + " ".join(fields)


def write_graph(g: ColoredGraph, path) -> None:
    """Serialize g; read_graph(write_graph(g)) reproduces g exactly."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_header_line(g) + "\n")
        for rec in g.nodes:
            colors = ",".join(str(c) for c in rec.colors)
            fh.write(f"N\t{rec.id}\t{rec.kind}\t{rec.birth}\t{colors}\n")
        for (u, v), kind in sorted(g.edges.items()):
            fh.write(f"E\t{u}\t{v}\t{kind}\n")


def _fail(lineno: int, msg: str):
    raise ParseError(f"line {lineno}: {msg}")


def _parse_header(line: str, lineno: int) -> tuple[dict, str]:
    parts = line.split()
    if len(parts) != 2 + len(_HEADER_KEYS) or parts[0] != FORMAT_TAG:
        _fail(lineno, f"expected a {FORMAT_TAG} {FORMAT_VERSION} header")
    if parts[1] != FORMAT_VERSION:
        _fail(lineno, f"unsupported format version {parts[1]!r}")
    values = {}
    for key, token in zip(_HEADER_KEYS, parts[2:]):
        if not token.startswith(key + "="):
            _fail(lineno, f"expected header field {key}=..., got {token!r}")
        values[key] = token[len(key) + 1 :]
    try:
        header = {
            "n": int(values["n"]),
            "m": int(values["m"]),
            "dims": int(values["dims"]),
            "a": float(values["a"]),
            "d": int(values["d"]),
            "rng": int(values["rng"]),
        }
    except ValueError:
        _fail(lineno, "non-numeric value in header")
    model = values["model"]
    if model not in MODEL_TAGS:
        _fail(lineno, f"unknown model tag {model!r}")
    return header, model


def read_graph(path) -> ColoredGraph:
    """Parse a graph file, rejecting malformed or inconsistent content."""
    nodes: list[NodeRecord] = []
    seen_ids: set[int] = set()
    edges: dict[tuple[int, int], str] = {}
    header = None
    model = "external"

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if lineno == 1:
                header, model = _parse_header(line, lineno)
                continue
            if not line.strip():
                continue
            if line.startswith("#"):
                continue
            parts = line.split("\t")
            tag = parts[0]
            if tag == "N":
                if len(parts) != 5:
                    _fail(lineno, f"node line needs 5 fields, got {len(parts)}")
                try:
                    nid = int(parts[1])
                    birth = int(parts[3])
                    colors = tuple(int(c) for c in parts[4].split(","))
                except ValueError:
                    _fail(lineno, "non-numeric id, birth or color")
                if nid in seen_ids:
                    _fail(lineno, f"duplicate node id {nid}")
                try:
                    rec = NodeRecord(id=nid, colors=colors, kind=parts[2], birth=birth)
                except ValueError as exc:
                    _fail(lineno, str(exc))
                seen_ids.add(nid)
                nodes.append(rec)
            elif tag == "E":
                if len(parts) != 4:
                    _fail(lineno, f"edge line needs 4 fields, got {len(parts)}")
                try:
                    u, v = int(parts[1]), int(parts[2])
                except ValueError:
                    _fail(lineno, "non-numeric edge endpoint")
                if u >= v:
                    _fail(lineno, f"edge endpoints must satisfy u < v, got {u} >= {v}")
                if u not in seen_ids or v not in seen_ids:
                    _fail(lineno, f"edge ({u}, {v}) references an undeclared node")
                if (u, v) in edges:
                    _fail(lineno, f"duplicate edge ({u}, {v})")
                edges[(u, v)] = parts[3]
            else:
                _fail(lineno, f"unknown record tag {tag!r}")

    if header is None:
        raise ParseError("line 1: empty file, expected a header")
    if header["n"] != len(nodes):
        raise ParseError(
            f"header declares n={header['n']} but file has {len(nodes)} node lines"
        )
    if header["m"] != len(edges):
        raise ParseError(
            f"header declares m={header['m']} but file has {len(edges)} edge lines"
        )

    params = GenParams(
        a=header["a"],
        d=header["d"],
        n=header["n"],
        k=header["dims"] if model in ("s", "s2", "sk") else 1,
        rng_seed=header["rng"],
    )
    try:
        return ColoredGraph(nodes, edges, model=model, params=params)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
