"""Torsion test families, the Baer criterion as a uniformity question, and the
consistency check between the Baer verdict and projectivity.

For a finite module ``R/r^k`` the Hom tower of a periodic system is always
Mittag-Leffler, so each entry of the uniformity table (the largest offset
``l(m) - m``) is exact.  A negative verdict rests on a prime ``p`` dividing
both ``r`` and the determinant ``δ`` of the dual tail map on its stable
image.  With such a ``p`` the dual images keep shrinking after localizing at
``p``, and a uniform offset for every ``R/r^k`` would force them to stop by
the Krull intersection theorem.  So the offsets are unbounded in ``k`` even
when the escalation window still looks flat; the running records of the
window are reported as evidence only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .dirsys import DirectSystem, ProjectivityReport, dual_tower, hom_tower, projectivity_test
from .homological import finite_mu_check
from .modules import FPModule, direct_sum
from .towers import analyse_tail, ml_check


@dataclass(frozen=True, eq=False)
class TorsionFamily:
    sample: tuple
    modules: tuple
    sum: FPModule


def torsion_family(sample: Sequence, ring=None) -> TorsionFamily:
    """The modules ``R/rR`` for ``r`` in the sample and their direct sum."""
    from .rings import INTEGERS

    ring = ring or INTEGERS
    if not sample:
        raise ValueError("sample must be nonempty")
    for r in sample:
        if not r:
            raise ValueError("zero is not allowed in a torsion sample")
        if ring.is_unit(r):
            raise ValueError(f"unit {ring.format(r)} gives the zero module")
    mods = tuple(FPModule.cyclic(r, ring) for r in sample)
    return TorsionFamily(tuple(sample), mods, direct_sum(*mods))


def support_primes(D: DirectSystem) -> list:
    """Primes dividing a matrix entry of the system or the dual tail determinant."""
    ring = D.ring
    seen = []

    def add(a):
        if a and not ring.is_unit(a):
            for p in ring.prime_factors(a):
                if p not in seen:
                    seen.append(p)

    for f in D.matrices():
        for row in f.data:
            for a in row:
                add(a)
    if D.is_periodic:
        T = dual_tower(D)
        tail = analyse_tail(T.tail.module, T.tail.lam)
        add(tail.delta)
    return sorted(seen, key=lambda p: (ring.degree(p), ring.format(p)))


@dataclass(frozen=True)
class BaerVerdict:
    verdict: str  # "BaerNegative" | "BaerConsistent" | "Undecided"
    per_r: dict  # (r, k) -> MLReport
    uniformity: dict  # r -> list of offsets for k = 1..escalation
    witness: Optional[dict] = None
    full_prime_support: bool = False
    sample_dependent: bool = True
    missing_primes: tuple = ()
    notes: list = field(default_factory=list)


def _records(seq: Sequence[int]) -> list[tuple[int, int]]:
    """Strictly increasing subsequence of running maxima, as ``(k, value)`` pairs."""
    out = []
    for k, v in enumerate(seq, start=1):
        if not out or v > out[-1][1]:
            out.append((k, v))
    return out


def baer_criterion(D: DirectSystem, base: Sequence, escalation: int = 4, depth: int = 8) -> BaerVerdict:
    if escalation < 1:
        raise ValueError("escalation must be at least 1")
    ring = D.ring
    base = [ring.canonical(r) for r in base]
    if not base or any(not r or ring.is_unit(r) for r in base):
        raise ValueError("base must contain nonzero non-units")
    primes = support_primes(D)
    missing = tuple(p for p in primes if not any(ring.divides(p, r) for r in base))
    full = not missing
    per_r, table = {}, {}
    if not D.is_periodic:
        return BaerVerdict("Undecided", {}, {}, None, full, True, missing, ["truncated system"])
    dual = dual_tower(D)
    tail = analyse_tail(dual.tail.module, dual.tail.lam)
    delta = tail.delta
    witness = None
    for r in base:
        offsets = []
        for k in range(1, escalation + 1):
            M = FPModule.cyclic(ring.power(r, k), ring)
            rep = ml_check(hom_tower(D, M), depth)
            per_r[(r, k)] = rep
            if rep.verdict == "NotML":
                witness = witness or {"r": r, "k": k, "kind": "NotML", "chain": rep.witness}
                offsets.append(None)
            else:
                offsets.append(rep.max_offset())
        table[r] = offsets
        if witness is None and None not in offsets and not tail.ml:
            g = ring.gcd(delta, r)
            if not ring.is_unit(g):
                # the window may still look flat; the shared prime alone forces growth
                p = ring.prime_factors(g)[0]
                witness = {"r": r, "kind": "diverging", "prime": p, "delta": delta, "records": _records(offsets)}
    if witness is not None:
        return BaerVerdict("BaerNegative", per_r, table, witness, full, False, missing)
    if tail.ml:
        # images pass to quotients, so the dual offset bounds every R/r^k offset
        bound = ml_check(dual, depth).max_offset()
        notes = [f"offsets bounded by the dual offset {bound}"]
        return BaerVerdict("BaerConsistent", per_r, table, None, full, False, missing, notes)
    if all(None not in offs and len(set(offs)) == 1 for offs in table.values()):
        return BaerVerdict("BaerConsistent", per_r, table, None, full, True, missing)
    return BaerVerdict("Undecided", per_r, table, None, full, True, missing, ["offsets grow without a certificate"])


@dataclass(frozen=True)
class ConsistencyReport:
    projectivity: ProjectivityReport
    baer: BaerVerdict
    contradictions: list
    consistent: bool

    @property
    def verdicts(self) -> tuple[str, str]:
        return self.projectivity.verdict, self.baer.verdict


def baer_projectivity_consistency(D: DirectSystem, base: Sequence, escalation: int = 4, depth: int = 8) -> ConsistencyReport:
    """Projective ⇒ not BaerNegative, and NotProjective ⇒ not BaerConsistent under full prime support."""
    proj = projectivity_test(D, depth)
    baer = baer_criterion(D, base, escalation, depth)
    bad = []
    if proj.verdict == "Projective" and baer.verdict == "BaerNegative":
        bad.append("projective colimit with a diverging Baer witness")
    if proj.verdict == "NotProjective" and baer.verdict == "BaerConsistent" and baer.full_prime_support:
        bad.append("non-projective colimit passing the Baer test with full prime support")
    return ConsistencyReport(proj, baer, bad, not bad)


@dataclass(frozen=True)
class BridgeReport:
    separated: dict  # probe description -> bool at the full sample
    kernels: dict  # probe description -> list of kernel generator counts per sample prefix
    monotone: bool


def purity_bridge(sample: Sequence, probes: Sequence[FPModule]) -> BridgeReport:
    """Run ``finite_mu_check`` on growing prefixes of the sample for each probe."""
    if not sample:
        raise ValueError("sample must be nonempty")
    sep, kern = {}, {}
    mono = True
    for i, G in enumerate(probes):
        key = f"{i}:{G.describe()}"
        chain = [finite_mu_check(list(sample[: j + 1]), G) for j in range(len(sample))]
        for a, b in zip(chain, chain[1:]):
            if not b.kernel <= a.kernel:
                mono = False
        sep[key] = chain[-1].injective
        kern[key] = [v.element for v in chain]
    return BridgeReport(sep, kern, mono)
