"""JSON encoding of inputs and reports.

Ring elements are always strings (``"12"``, ``"x^2 + 1"``) so that consumers
never lose precision.  Parsing is strict: unknown keys are schema errors.
"""

from __future__ import annotations

from typing import Any, Optional

from . import limits
from .dirsys import DirectSystem, PeriodicSystem, Presentation
from .errors import SchemaError
from .linalg import Mat
from .modules import FPModule, ModuleMap, Submodule
from .rings import EuclideanRing, ring_from_tag
from .towers import TRUNCATED, MLReport, Periodic, Tower, Witness


def _expect(obj: Any, kind: type, what: str):
    if not isinstance(obj, kind) or isinstance(obj, bool):
        raise SchemaError(f"{what} must be a {kind.__name__}")
    return obj


def _keys(obj: dict, allowed: set, what: str, required: set = frozenset()) -> None:
    extra = set(obj) - allowed
    if extra:
        raise SchemaError(f"unknown key(s) in {what}: {', '.join(sorted(extra))}")
    missing = set(required) - set(obj)
    if missing:
        raise SchemaError(f"missing key(s) in {what}: {', '.join(sorted(missing))}")


def _count(obj: Any, what: str) -> int:
    n = _expect(obj, int, what)
    if n < 0:
        raise SchemaError(f"{what} must be non-negative")
    return n


# -- decoding -----------------------------------------------------------------


def parse_ring(tag: Any) -> EuclideanRing:
    return ring_from_tag(_expect(tag, str, "ring tag"))


def parse_matrix(obj: Any, ring: EuclideanRing, rows: Optional[int] = None, cols: Optional[int] = None, what: str = "matrix") -> Mat:
    _expect(obj, list, what)
    if rows is not None and len(obj) != rows:
        raise SchemaError(f"{what} must have {rows} rows, got {len(obj)}")
    data = []
    for i, row in enumerate(obj):
        _expect(row, list, f"{what} row {i}")
        data.append([ring.parse(a) for a in row])
    if data:
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise SchemaError(f"{what} rows have different lengths")
        if cols is not None and width != cols:
            raise SchemaError(f"{what} must have {cols} columns, got {width}")
    else:
        width = cols or 0
    limits.check("max_dim", max(len(data), width))
    return Mat(ring, len(data), width, data)


def parse_module(obj: Any, ring: EuclideanRing) -> FPModule:
    _expect(obj, dict, "module")
    if "invariant_factors" in obj or "free_rank" in obj:
        _keys(obj, {"free_rank", "invariant_factors"}, "module")
        factors = [ring.parse(a) for a in _expect(obj.get("invariant_factors", []), list, "invariant_factors")]
        return FPModule.from_invariants(_count(obj.get("free_rank", 0), "free_rank"), factors, ring)
    _keys(obj, {"generators", "relations"}, "module", {"generators"})
    n = _count(obj["generators"], "generators")
    limits.check("max_generators", n)
    rel = parse_matrix(obj.get("relations", [[] for _ in range(n)]), ring, rows=n, what="relations")
    if n == 0:
        rel = Mat.zeros(ring, 0, 0)
    return FPModule(ring, n, rel)


def parse_map(obj: Any, source: FPModule, target: FPModule, what: str) -> ModuleMap:
    M = parse_matrix(obj, source.ring, rows=target.generators, cols=source.generators, what=what)
    if target.generators == 0:
        M = Mat.zeros(source.ring, 0, source.generators)
    return ModuleMap(source, target, M)


def parse_tower(obj: Any, ring: EuclideanRing) -> Tower:
    _expect(obj, dict, "tower")
    _keys(obj, {"prefix", "maps", "tail"}, "tower", {"prefix"})
    prefix = [parse_module(m, ring) for m in _expect(obj["prefix"], list, "prefix")]
    if not prefix:
        raise SchemaError("tower prefix must be nonempty")
    limits.check("max_depth", len(prefix))
    raw_maps = _expect(obj.get("maps", []), list, "maps")
    if len(raw_maps) != len(prefix) - 1:
        raise SchemaError(f"{len(prefix)} levels need {len(prefix) - 1} maps")
    maps = [parse_map(m, prefix[n + 1], prefix[n], f"map {n + 1}") for n, m in enumerate(raw_maps)]
    tail = obj.get("tail", {"kind": "truncated"})
    _expect(tail, dict, "tail")
    kind = tail.get("kind")
    if kind == "truncated":
        _keys(tail, {"kind"}, "tail")
        return Tower(prefix, maps, TRUNCATED)
    if kind == "periodic":
        _keys(tail, {"kind", "module", "map", "attach"}, "tail", {"kind", "module", "map", "attach"})
        H = parse_module(tail["module"], ring)
        lam = parse_map(tail["map"], H, H, "tail map")
        att = parse_map(tail["attach"], H, prefix[-1], "attach map")
        return Tower(prefix, maps, Periodic(H, lam, att))
    raise SchemaError(f"tail kind must be 'truncated' or 'periodic', got {kind!r}")


def parse_system(obj: Any, ring: EuclideanRing) -> DirectSystem:
    _expect(obj, dict, "system")
    _keys(obj, {"ranks", "maps", "tail"}, "system", {"ranks"})
    ranks = [_count(r, "rank") for r in _expect(obj["ranks"], list, "ranks")]
    if not ranks:
        raise SchemaError("system needs at least one rank")
    limits.check("max_depth", len(ranks))
    raw = _expect(obj.get("maps", []), list, "maps")
    if len(raw) != len(ranks) - 1:
        raise SchemaError(f"{len(ranks)} levels need {len(ranks) - 1} maps")
    maps = [parse_matrix(m, ring, ranks[n + 1], ranks[n], f"f_{n + 1}") for n, m in enumerate(raw)]
    tail = obj.get("tail", {"kind": "truncated"})
    _expect(tail, dict, "tail")
    kind = tail.get("kind")
    if kind == "truncated":
        _keys(tail, {"kind"}, "tail")
        return DirectSystem(ring, ranks, maps, TRUNCATED)
    if kind == "periodic":
        _keys(tail, {"kind", "rank", "map", "attach"}, "tail", {"kind", "rank", "map", "attach"})
        r = _count(tail["rank"], "tail rank")
        f = parse_matrix(tail["map"], ring, r, r, "tail map")
        att = parse_matrix(tail["attach"], ring, r, ranks[-1], "attach map")
        return DirectSystem(ring, ranks, maps, PeriodicSystem(r, f, att))
    raise SchemaError(f"tail kind must be 'truncated' or 'periodic', got {kind!r}")


def parse_presentation(obj: Any, ring: EuclideanRing) -> Presentation:
    _expect(obj, dict, "presentation")
    _keys(obj, {"free", "relations", "periodic"}, "presentation", {"free", "relations"})
    n = _count(obj["free"], "free")
    rel = parse_matrix(obj["relations"], ring, rows=n, what="relations")
    periodic = obj.get("periodic", False)
    if not isinstance(periodic, bool):
        raise SchemaError("periodic must be a boolean")
    return Presentation(ring, n, rel, periodic)


# -- encoding -----------------------------------------------------------------


def enc_elem(ring: EuclideanRing, a) -> str:
    return ring.format(a)


def enc_vec(ring: EuclideanRing, v) -> list:
    return [ring.format(a) for a in v]


def enc_matrix(M: Mat) -> list:
    return [[M.ring.format(a) for a in row] for row in M.data]


def enc_module(M: FPModule) -> dict:
    return {
        "generators": M.generators,
        "relations": enc_matrix(M.relations),
        "normal_form": M.describe(),
        "free_rank": M.free_rank,
        "invariant_factors": enc_vec(M.ring, M.invariant_factors),
    }


def enc_submodule(S: Submodule) -> dict:
    return {"ambient": S.ambient.describe(), "generators": [enc_vec(S.ring, S.gens.col(j)) for j in range(S.gens.cols)]}


def enc_system(D: DirectSystem) -> dict:
    out = {"ranks": list(D.ranks), "maps": [enc_matrix(f) for f in D.maps]}
    if D.is_periodic:
        out["tail"] = {"kind": "periodic", "rank": D.tail.rank, "map": enc_matrix(D.tail.f), "attach": enc_matrix(D.tail.attach)}
    else:
        out["tail"] = {"kind": "truncated"}
    return out


def enc_witness(ring: EuclideanRing, w: Optional[Witness]) -> Optional[dict]:
    if w is None:
        return None
    return {
        "level": w.m,
        "steps": [
            {"j": s.j, "from_level": s.level, "element": enc_vec(ring, s.element), "image": enc_vec(ring, s.image)}
            for s in w.steps
        ],
    }


def enc_ml(ring: EuclideanRing, r: MLReport) -> dict:
    return {
        "verdict": r.verdict,
        "l": {str(m): v for m, v in sorted(r.l.items())},
        "certified_levels": sorted(m for m, ok in r.certified.items() if ok),
        "tail_offset": r.tail_offset,
        "depth": r.depth,
        "prefix_length": r.prefix_length,
        "rank_stabilization": r.j0,
        "tail_determinant": None if r.delta is None else ring.format(r.delta),
        "witness": enc_witness(ring, r.witness),
    }
