"""Command-line front end.

Every verb reads one JSON document, prints a deterministic JSON report on
stdout and a one-line summary on stderr.  Exit status: 0 decisive or
consistent, 1 decisive negative, 2 undecided, 3 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .baer import baer_criterion, baer_projectivity_consistency
from .dirsys import DirectSystem, NotFlatEvidence, dual_tower, ext1_colim, hom_tower, jensen_system, projectivity_test
from .errors import BaerMLError, ResourceLimitError, SchemaError
from .homological import ext1, hom_module
from .linalg import snf
from .modules import FPModule
from .serialize import (
    _keys,
    enc_elem,
    enc_matrix,
    enc_ml,
    enc_module,
    enc_system,
    enc_vec,
    enc_witness,
    parse_matrix,
    parse_module,
    parse_presentation,
    parse_ring,
    parse_system,
    parse_tower,
)
from .towers import lim_and_lim1, ml_check

VERBS = (
    "snf",
    "module-normal-form",
    "hom",
    "ext",
    "tower-ml",
    "tower-lim",
    "dirsys-projective",
    "dirsys-ext",
    "jensen",
    "baer",
    "consistency",
)

# documentation keys a fixture may carry next to its payload
_META = {"name", "description", "expected", "ring"}

OK, NEGATIVE, UNDECIDED, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as input errors instead of exiting with 2."""

    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="baerml", description="Exact module theory for towers and direct systems.")
    p.add_argument("--version", action="version", version=f"baerml {__version__}")
    sub = p.add_subparsers(dest="verb", metavar="VERB", parser_class=_Parser)
    sub.required = True

    def verb(name: str, help: str, *flags: str):
        s = sub.add_parser(name, help=help)
        s.add_argument("input", help="JSON input file, or - for stdin")
        s.add_argument("--ring", help="ring tag (Z or GF(p)[x]) when the input has none")
        if "depth" in flags:
            s.add_argument("--depth", type=_positive, default=8)
        if "copies" in flags:
            s.add_argument("--copies", type=_positive, default=2)
        if "escalation" in flags:
            s.add_argument("--escalation", type=_positive, default=4)
        if "sample" in flags:
            s.add_argument("--sample", required=True, help="comma separated ring elements r")
        return s

    verb("snf", "Smith normal form of a matrix")
    verb("module-normal-form", "invariant factors of a presented module")
    verb("hom", "Hom(source, target)")
    verb("ext", "Ext^1(source, target)")
    verb("tower-ml", "Mittag-Leffler decision for a tower", "depth")
    verb("tower-lim", "lim and lim^1 of a tower", "depth")
    verb("dirsys-projective", "projectivity of the colimit of a direct system", "depth")
    verb("dirsys-ext", "vanishing of Ext^1(colimit, M^(N))", "depth", "copies")
    verb("jensen", "direct system of free modules from a presentation")
    verb("baer", "Baer criterion over a torsion sample", "depth", "escalation", "sample")
    verb("consistency", "projectivity against the Baer verdict", "depth", "escalation", "sample")
    fx = sub.add_parser("fixtures", help="write the curated fixture suite to a directory")
    fx.add_argument("directory")
    return p


# -- input ----------------------------------------------------------------------


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load(raw: bytes, path: str) -> dict:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not UTF-8 ({exc.reason})") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return doc


def _ring(doc: dict, args):
    tag = doc.get("ring", args.ring or "Z")
    if args.ring and "ring" in doc and args.ring != doc["ring"]:
        raise SchemaError(f"--ring {args.ring} disagrees with the input ring {doc['ring']}")
    return parse_ring(tag)


def _sample(text: str, ring) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise SchemaError("empty entry in --sample")
        r = ring.parse(part)
        if not r or ring.is_unit(r):
            raise SchemaError(f"--sample entries must be nonzero non-units, got {part}")
        out.append(ring.canonical(r))
    return out


# -- verbs ----------------------------------------------------------------------


def _do_snf(doc, ring, args):
    _keys(doc, _META | {"matrix"}, "input", {"matrix"})
    A = parse_matrix(doc["matrix"], ring)
    dec = snf(A)
    res = {
        "U": enc_matrix(dec.U),
        "D": enc_matrix(dec.D),
        "V": enc_matrix(dec.V),
        "invariant_factors": enc_vec(ring, dec.factors),
        "rank": dec.rank,
    }
    return "Computed", OK, res, {}


def _do_nf(doc, ring, args):
    _keys(doc, _META | {"module"}, "input", {"module"})
    M = parse_module(doc["module"], ring)
    return M.describe(), OK, enc_module(M), {}


def _pair(doc, ring):
    _keys(doc, _META | {"source", "target"}, "input", {"source", "target"})
    return parse_module(doc["source"], ring), parse_module(doc["target"], ring)


def _do_hom(doc, ring, args):
    M, N = _pair(doc, ring)
    H = hom_module(M, N)
    gens = [enc_matrix(f.matrix) for f in H.generator_maps()]
    return H.module.describe(), OK, {"module": enc_module(H.module), "generator_maps": gens}, {}


def _do_ext(doc, ring, args):
    M, N = _pair(doc, ring)
    E = ext1(M, N)
    return E.describe(), OK, {"module": enc_module(E)}, {}


def _tower_from(doc, ring):
    _keys(doc, _META | {"tower", "system", "module"}, "input")
    if ("tower" in doc) == ("system" in doc):
        raise SchemaError("input needs exactly one of 'tower' or 'system'")
    if "tower" in doc:
        if "module" in doc:
            raise SchemaError("'module' only applies to a system input")
        return parse_tower(doc["tower"], ring)
    D = parse_system(doc["system"], ring)
    if "module" in doc:
        return hom_tower(D, parse_module(doc["module"], ring))
    return dual_tower(D)


_ML_STATUS = {"Stationary": OK, "NotML": NEGATIVE}


def _do_tower_ml(doc, ring, args):
    T = _tower_from(doc, ring)
    rep = ml_check(T, args.depth)
    return rep.verdict, _ML_STATUS.get(rep.verdict, UNDECIDED), enc_ml(ring, rep), {"depth": args.depth}


def _do_tower_lim(doc, ring, args):
    T = _tower_from(doc, ring)
    rep = lim_and_lim1(T, args.depth)
    res = {
        "ml": enc_ml(ring, rep.ml),
        "lim": None if rep.lim is None else rep.lim.describe(),
        "lim1": None if rep.lim1 is None else rep.lim1.describe(),
        "exact": rep.exact,
        "reason": rep.reason,
        "truncated_data": rep.truncated,
    }
    verdict = f"lim={res['lim'] or '?'}, lim1={res['lim1'] or '?'}"
    return verdict, OK if rep.exact else UNDECIDED, res, {"depth": args.depth}


def _system(doc, ring, extra=frozenset()):
    _keys(doc, _META | {"system"} | set(extra), "input", {"system"})
    return parse_system(doc["system"], ring)


_PROJ_STATUS = {"Projective": OK, "NotProjective": NEGATIVE}


def _do_projective(doc, ring, args):
    D = _system(doc, ring)
    rep = projectivity_test(D, args.depth)
    res = {"verdict": rep.verdict, "ml": enc_ml(ring, rep.ml), "colimit_rank": rep.colimit_rank}
    if rep.splitting is not None:
        res["splitting"] = {"depth": rep.splitting_depth, "verified": rep.verified, "matrix": enc_matrix(rep.splitting)}
    return rep.verdict, _PROJ_STATUS.get(rep.verdict, UNDECIDED), res, {"depth": args.depth}


def _do_dirsys_ext(doc, ring, args):
    D = _system(doc, ring, {"module"})
    M = parse_module(doc["module"], ring) if "module" in doc else FPModule.free(1, ring)
    rep = ext1_colim(D, M, args.copies, args.depth)
    cert = None
    if rep.certificate is not None:
        cert = {k: (enc_elem(ring, v) if k == "delta" and v is not None else v) for k, v in rep.certificate.items()}
    res = {
        "verdict": rep.verdict,
        "module": M.describe(),
        "ml": enc_ml(ring, rep.ml),
        "stabilization_depth": rep.stabilization_depth,
        "certificate": cert,
    }
    status = {"Zero": OK, "Nonzero": NEGATIVE}.get(rep.verdict, UNDECIDED)
    return rep.verdict, status, res, {"depth": args.depth, "copies": args.copies}


def _do_jensen(doc, ring, args):
    _keys(doc, _META | {"presentation"}, "input", {"presentation"})
    pres = parse_presentation(doc["presentation"], ring)
    out = jensen_system(pres)
    if isinstance(out, NotFlatEvidence):
        res = {
            "verdict": "NotFlatEvidence",
            "stage": out.stage,
            "support": out.support,
            "relations": enc_matrix(out.relations),
            "invariant_factors": enc_vec(ring, out.invariant_factors),
            "note": out.note,
        }
        return "NotFlatEvidence", NEGATIVE, res, {}
    assert isinstance(out, DirectSystem)
    res = {"verdict": "DirectSystem", "system": enc_system(out), "tail_inferred": out.tail_inferred}
    return "DirectSystem", OK, res, {}


def _enc_baer(ring, v) -> dict:
    witness = None
    if v.witness is not None:
        w = v.witness
        witness = {"r": enc_elem(ring, w["r"]), "k": w.get("k"), "kind": w["kind"]}
        if w["kind"] == "diverging":
            witness.update(prime=enc_elem(ring, w["prime"]), delta=enc_elem(ring, w["delta"]), records=[list(x) for x in w["records"]])
        else:
            witness["chain"] = enc_witness(ring, w["chain"])
    return {
        "verdict": v.verdict,
        "uniformity": {enc_elem(ring, r): offs for r, offs in v.uniformity.items()},
        "l1": {f"{enc_elem(ring, r)}^{k}": rep.l.get(1) for (r, k), rep in sorted(v.per_r.items(), key=lambda t: (ring.format(t[0][0]), t[0][1]))},
        "witness": witness,
        "full_prime_support": v.full_prime_support,
        "missing_primes": [enc_elem(ring, p) for p in v.missing_primes],
        "sample_dependent": v.sample_dependent,
        "notes": list(v.notes),
    }


_BAER_STATUS = {"BaerConsistent": OK, "BaerNegative": NEGATIVE}


def _do_baer(doc, ring, args):
    D = _system(doc, ring)
    base = _sample(args.sample, ring)
    v = baer_criterion(D, base, args.escalation, args.depth)
    params = {"depth": args.depth, "escalation": args.escalation, "sample": [enc_elem(ring, r) for r in base]}
    return v.verdict, _BAER_STATUS.get(v.verdict, UNDECIDED), _enc_baer(ring, v), params


def _do_consistency(doc, ring, args):
    D = _system(doc, ring)
    base = _sample(args.sample, ring)
    rep = baer_projectivity_consistency(D, base, args.escalation, args.depth)
    pv, bv = rep.verdicts
    res = {
        "projectivity": pv,
        "baer": _enc_baer(ring, rep.baer),
        "contradictions": list(rep.contradictions),
        "consistent": rep.consistent,
    }
    if not rep.consistent:
        status = NEGATIVE
    elif pv == "Undecided" or bv == "Undecided":
        status = UNDECIDED
    else:
        status = OK
    params = {"depth": args.depth, "escalation": args.escalation, "sample": [enc_elem(ring, r) for r in base]}
    return f"{pv}/{bv}", status, res, params


HANDLERS: dict[str, Callable[..., tuple]] = {
    "snf": _do_snf,
    "module-normal-form": _do_nf,
    "hom": _do_hom,
    "ext": _do_ext,
    "tower-ml": _do_tower_ml,
    "tower-lim": _do_tower_lim,
    "dirsys-projective": _do_projective,
    "dirsys-ext": _do_dirsys_ext,
    "jensen": _do_jensen,
    "baer": _do_baer,
    "consistency": _do_consistency,
}


def run(verb: str, raw: bytes, args, path: str = "<input>") -> tuple[dict, int, str]:
    """Execute one verb on raw input bytes; returns ``(report, status, summary)``."""
    doc = _load(raw, path)
    ring = _ring(doc, args)
    verdict, status, result, params = HANDLERS[verb](doc, ring, args)
    params = dict(params, ring=ring.tag)
    report = {
        "verb": verb,
        "verdict": verdict,
        "result": result,
        "provenance": {
            "input_sha256": hashlib.sha256(raw).hexdigest(),
            "library": "baerml",
            "version": __version__,
            "parameters": params,
        },
    }
    return report, status, f"{verb}: {verdict} (exit {status})"


def dumps(report: Any) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    if args.verb == "fixtures":
        from .fixtures import write_fixtures

        try:
            names = write_fixtures(args.directory)
        except OSError as exc:
            print(f"input error: cannot write fixtures to {args.directory}: {exc.strerror}", file=sys.stderr)
            return INPUT_ERROR
        print(f"fixtures: wrote {len(names)} files to {args.directory}", file=sys.stderr)
        return OK
    try:
        raw = _read(args.input)
        report, status, summary = run(args.verb, raw, args, args.input)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ResourceLimitError as exc:
        print(f"input error: {exc} (cap {exc.cap})", file=sys.stderr)
        return INPUT_ERROR
    except (SchemaError, BaerMLError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    sys.stdout.write(dumps(report))
    print(summary, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
