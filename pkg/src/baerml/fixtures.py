"""Curated input documents, each annotated with the verdicts it should produce.

``expected`` maps a verb to ``{"args": [...], "verdict": ..., "status": ...}``;
``baerml <verb> <file> <args>`` must reproduce that verdict and exit status.
"""

from __future__ import annotations

import json
from pathlib import Path


def _periodic(ranks, maps, r, f, attach) -> dict:
    return {"ranks": ranks, "maps": maps, "tail": {"kind": "periodic", "rank": r, "map": f, "attach": attach}}


def _telescope(n: int) -> dict:
    # generators x_1..x_{n+1}, relations x_i = 2 x_{i+1}
    rel = [["0"] * n for _ in range(n + 1)]
    for i in range(n):
        rel[i][i] = "1"
        rel[i + 1][i] = "-2"
    return {"free": n + 1, "relations": rel, "periodic": True}


FIXTURES: dict[str, dict] = {
    "identity": {
        "description": "Z with identity maps; the colimit is Z.",
        "ring": "Z",
        "system": _periodic([1], [], 1, [["1"]], [["1"]]),
        "expected": {
            "tower-ml": {"args": [], "verdict": "Stationary", "status": 0},
            "dirsys-projective": {"args": [], "verdict": "Projective", "status": 0},
            "dirsys-ext": {"args": [], "verdict": "Zero", "status": 0},
            "baer": {"args": ["--sample", "2,3", "--escalation", "4"], "verdict": "BaerConsistent", "status": 0},
            "consistency": {"args": ["--sample", "2,3"], "verdict": "Projective/BaerConsistent", "status": 0},
        },
    },
    "eventually-identity": {
        "description": "Z -2-> Z -3-> Z followed by identities; the colimit is Z.",
        "ring": "Z",
        "system": _periodic([1, 1, 1], [[["2"]], [["3"]]], 1, [["1"]], [["1"]]),
        "expected": {
            "tower-ml": {"args": [], "verdict": "Stationary", "status": 0},
            "dirsys-projective": {"args": [], "verdict": "Projective", "status": 0},
            "baer": {"args": ["--sample", "2,3", "--escalation", "4"], "verdict": "BaerConsistent", "status": 0},
            "consistency": {"args": ["--sample", "2,3"], "verdict": "Projective/BaerConsistent", "status": 0},
        },
    },
    "z-times-2": {
        "description": "Z with multiplication by 2; the colimit is Z[1/2].",
        "ring": "Z",
        "system": _periodic([1], [], 1, [["2"]], [["2"]]),
        "expected": {
            "tower-ml": {"args": [], "verdict": "NotML", "status": 1},
            "dirsys-projective": {"args": [], "verdict": "NotProjective", "status": 1},
            "dirsys-ext": {"args": [], "verdict": "Nonzero", "status": 1},
            "baer": {"args": ["--sample", "2", "--escalation", "5"], "verdict": "BaerNegative", "status": 1},
            "consistency": {"args": ["--sample", "2"], "verdict": "NotProjective/BaerNegative", "status": 0},
        },
    },
    "z-times-3": {
        "description": "Z with multiplication by 3; the colimit is Z[1/3]. A sample without 3 cannot see it.",
        "ring": "Z",
        "system": _periodic([1], [], 1, [["3"]], [["3"]]),
        "expected": {
            "dirsys-projective": {"args": [], "verdict": "NotProjective", "status": 1},
            "baer": {"args": ["--sample", "3", "--escalation", "4"], "verdict": "BaerNegative", "status": 1},
            "consistency": {"args": ["--sample", "2"], "verdict": "NotProjective/BaerConsistent", "status": 0},
        },
    },
    "diag-1-2": {
        "description": "Z^2 with diag(1, 2); the colimit is Z + Z[1/2].",
        "ring": "Z",
        "system": _periodic([2], [], 2, [["1", "0"], ["0", "2"]], [["1", "0"], ["0", "1"]]),
        "expected": {
            "tower-ml": {"args": [], "verdict": "NotML", "status": 1},
            "dirsys-projective": {"args": [], "verdict": "NotProjective", "status": 1},
            "baer": {"args": ["--sample", "2", "--escalation", "4"], "verdict": "BaerNegative", "status": 1},
        },
    },
    "telescope-presentation": {
        "description": "Z[1/2] presented by x_i = 2 x_(i+1); the construction returns a periodic system.",
        "ring": "Z",
        "presentation": _telescope(4),
        "expected": {
            "jensen": {"args": [], "verdict": "DirectSystem", "status": 0},
        },
    },
    "non-flat-presentation": {
        "description": "Z/2 presented by one relation; the first stage already fails the summand test.",
        "ring": "Z",
        "presentation": {"free": 1, "relations": [["2"]], "periodic": False},
        "expected": {
            "jensen": {"args": [], "verdict": "NotFlatEvidence", "status": 1},
        },
    },
}


def fixture_documents() -> dict[str, str]:
    """File name to serialized document, in a fixed order."""
    out = {}
    for name in sorted(FIXTURES):
        doc = dict(FIXTURES[name], name=name)
        out[f"{name}.json"] = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return out


def write_fixtures(directory) -> list[str]:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    docs = fixture_documents()
    for fname, text in docs.items():
        (path / fname).write_text(text, encoding="utf-8")
    return list(docs)
