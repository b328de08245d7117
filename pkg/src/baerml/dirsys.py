"""Countable direct systems ``F_1 -> F_2 -> ...`` of finitely generated free modules.

``maps[n-1]`` is ``f_n: F_n -> F_{n+1}``, a matrix with ``r_{n+1}`` rows and
``r_n`` columns.  A periodic tail ``(r, f, attach)`` continues the system as
``F_d --attach--> R^r --f--> R^r --f--> ...``.

The colimit is never built as a module.  Every question about it is asked of
the tower ``Hom(F_n, M)``, whose connecting map is ``f_nᵀ ⊗ I_m`` on
``M^{r_n}`` (generators ordered copy-major).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import limits
from .errors import DimensionError, NotPureError, RingMismatchError
from .homological import is_pure_submodule, pure_intersection_check
from .linalg import Mat, block, column_basis, det, hermite_rows, kernel_basis, kron, rank, snf, solve_linear, solve_matrix
from .modules import FPModule, ModuleMap, Submodule, direct_sum, module_power
from .rings import INTEGERS, EuclideanRing
from .towers import (
    TRUNCATED,
    MLReport,
    Periodic,
    Tower,
    Truncated,
    analyse_tail,
    ml_check,
    satisfies_sequence,
    lifting_harness,
    tower_product,
    tower_sum,
)


@dataclass(frozen=True)
class PeriodicSystem:
    rank: int
    f: Mat
    attach: Mat


@dataclass(frozen=True, eq=False)
class DirectSystem:
    ring: EuclideanRing
    ranks: tuple
    maps: tuple
    tail: Union[Truncated, PeriodicSystem] = TRUNCATED
    tail_inferred: bool = False

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(self.ranks))
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.ranks:
            raise DimensionError("a direct system needs at least one level")
        if len(self.maps) != len(self.ranks) - 1:
            raise DimensionError(f"{len(self.ranks)} levels need {len(self.ranks) - 1} maps")
        for n, f in enumerate(self.maps, start=1):
            if f.shape != (self.ranks[n], self.ranks[n - 1]):
                raise DimensionError(f"f_{n} has shape {f.shape}, expected {(self.ranks[n], self.ranks[n - 1])}")
            if f.ring != self.ring:
                raise RingMismatchError("system matrices over different rings")
        if isinstance(self.tail, PeriodicSystem):
            r = self.tail.rank
            if self.tail.f.shape != (r, r):
                raise DimensionError("periodic map must be square of the tail rank")
            if self.tail.attach.shape != (r, self.ranks[-1]):
                raise DimensionError("attaching matrix must map the last level into the tail")

    @classmethod
    def periodic(cls, f: Mat) -> "DirectSystem":
        """``R^r --f--> R^r --f--> ...``."""
        return cls(f.ring, (f.rows,), (), PeriodicSystem(f.rows, f, f))

    @classmethod
    def identity(cls, rank: int, ring: EuclideanRing = INTEGERS) -> "DirectSystem":
        return cls.periodic(Mat.identity(ring, rank))

    @property
    def d(self) -> int:
        return len(self.ranks)

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.tail, PeriodicSystem)

    def available(self, n: int) -> bool:
        return n >= 1 and (n <= self.d or self.is_periodic)

    def rank(self, n: int) -> int:
        if n <= self.d:
            return self.ranks[n - 1]
        if self.is_periodic:
            return self.tail.rank
        raise DimensionError(f"level {n} is past the truncation at {self.d}")

    def f(self, n: int) -> Mat:
        if n < self.d:
            return self.maps[n - 1]
        if self.is_periodic:
            return self.tail.attach if n == self.d else self.tail.f
        raise DimensionError(f"map {n} is past the truncation at {self.d}")

    def forward(self, n: int, k: int) -> Mat:
        """``f_{k-1} ∘ ... ∘ f_n: F_n -> F_k``."""
        out = Mat.identity(self.ring, self.rank(n))
        for i in range(n, k):
            out = self.f(i) @ out
        return out

    def matrices(self) -> list[Mat]:
        mats = list(self.maps)
        if self.is_periodic:
            mats += [self.tail.f, self.tail.attach]
        return mats

    def __repr__(self) -> str:
        kind = "periodic" if self.is_periodic else "truncated"
        return f"DirectSystem(ranks={list(self.ranks)}, {kind})"


# -- φ and Hom towers ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PhiMap:
    depth: int
    matrix: Mat
    col_sizes: tuple
    row_sizes: tuple

    def is_injective(self) -> bool:
        return self.matrix.cols == 0 or kernel_basis(self.matrix).cols == 0


def phi_map(D: DirectSystem, depth: int) -> PhiMap:
    """Truncation ``⊕_{n<=depth} F_n -> ⊕_{n<=depth+1} F_n`` of ``ε_n ↦ ε_n - ε_{n+1} f_n``."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    limits.check("max_depth", depth)
    ring = D.ring
    cols = [D.rank(n) for n in range(1, depth + 1)]
    rows = cols + [D.rank(depth + 1)] if D.available(depth + 1) else cols + [0]
    grid = [[None] * depth for _ in range(depth + 1)]
    for n in range(1, depth + 1):
        grid[n - 1][n - 1] = Mat.identity(ring, cols[n - 1])
        if rows[n]:
            grid[n][n - 1] = -D.f(n)
    return PhiMap(depth, block(grid, rows, cols, ring), tuple(cols), tuple(rows))


def _hom_matrix(f: Mat, M: FPModule) -> Mat:
    return kron(f.T, Mat.identity(M.ring, M.generators))


def hom_tower(D: DirectSystem, M: FPModule) -> Tower:
    """The tower ``Hom(F_n, M) ≅ M^{r_n}`` with maps ``g ↦ g ∘ f_n``."""
    if M.ring != D.ring:
        raise RingMismatchError("module and system over different rings")
    mods = [module_power(M, r) for r in D.ranks]
    maps = [ModuleMap(mods[n], mods[n - 1], _hom_matrix(D.f(n), M), check=False) for n in range(1, D.d)]
    tail = TRUNCATED
    if D.is_periodic:
        H = module_power(M, D.tail.rank)
        tail = Periodic(
            H,
            ModuleMap(H, H, _hom_matrix(D.tail.f, M), check=False),
            ModuleMap(H, mods[-1], _hom_matrix(D.tail.attach, M), check=False),
        )
    return Tower(mods, maps, tail)


def dual_tower(D: DirectSystem) -> Tower:
    return hom_tower(D, FPModule.free(1, D.ring))


# -- projectivity ------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectivityReport:
    verdict: str  # "Projective" | "NotProjective" | "Undecided"
    ml: MLReport
    colimit_rank: Optional[int] = None
    splitting: Optional[Mat] = None
    splitting_depth: Optional[int] = None
    verified: Optional[bool] = None


@dataclass(frozen=True, eq=False)
class _Fitting:
    """``R^r = W ⊕ K`` for the tail map ``P``, with ``P`` invertible on ``W``."""

    j0: int
    basis_w: Mat
    proj_w: Mat  # coordinates of the W-component in basis_w
    inv_w: Mat  # (P|W)^{-1} in basis_w coordinates

    def e(self) -> Mat:
        return self.basis_w @ self.proj_w


def _fitting(P: Mat) -> _Fitting:
    ring = P.ring
    r = P.rows
    ranks = [r]
    Pj = Mat.identity(ring, r)
    while True:
        Pj = Pj @ P
        ranks.append(rank(Pj) if r else 0)
        if ranks[-1] == ranks[-2]:
            break
    j0 = len(ranks) - 2
    Pj0 = P.power(j0)
    Bw = column_basis(Pj0)
    Bk = kernel_basis(Pj0)
    Q = block([[Bw, Bk]], [r], [Bw.cols, Bk.cols], ring)
    Qinv = solve_matrix(Q, Mat.identity(ring, r))
    if Qinv is None:
        raise ArithmeticError("image and kernel of the stable power do not span")
    rho = Bw.cols
    proj = Qinv.row_slice(0, rho)
    if rho:
        Mres = solve_matrix(Bw, P @ Bw)
        inv = solve_matrix(Mres, Mat.identity(ring, rho))
        if inv is None:
            raise ArithmeticError("tail map is not invertible on its stable image")
    else:
        inv = Mat.zeros(ring, 0, 0)
    return _Fitting(j0, Bw, proj, inv)


def splitting_matrix(D: DirectSystem, depth: int) -> tuple[Mat, tuple, tuple]:
    """Matrix of ``ψ`` on ``⊕_{k<=depth+1} F_k`` with ``ψ∘φ = Id``.

    The colimit is identified with the stable image ``W`` of the tail map,
    the section sends ``w`` to ``ε_{d+1} w``, and ``ψ(ε_k x)`` is the finite
    preimage under φ of ``ε_k x`` minus that section of its class.
    """
    if not D.is_periodic:
        raise DimensionError("splitting needs a periodic tail")
    ring = D.ring
    d = D.d
    fit = _fitting(D.tail.f)
    P = D.tail.f
    e = fit.e()
    r = D.tail.rank
    kmax = depth + 1
    reach = max(kmax, d + 1) + fit.j0 + 1
    rows = [D.rank(n) for n in range(1, reach + 1)]
    cols = [D.rank(k) for k in range(1, kmax + 1)]
    grid = [[None] * kmax for _ in range(reach)]
    ident = Mat.identity(ring, r)
    for k in range(1, kmax + 1):
        comps: dict[int, Mat] = {}
        if k <= d:
            for n in range(k, d + 1):
                comps[n] = D.forward(k, n)
            rest = (ident - e) @ D.forward(k, d + 1)
            start = d + 1
        else:
            sigma = fit.basis_w @ fit.inv_w.power(k - d - 1) @ fit.proj_w
            for i, n in enumerate(range(d + 1, k)):
                comps[n] = -(P.power(i) @ sigma)
            rest = ident - e
            start = k
        cur = rest
        for n in range(start, reach + 1):
            if cur.is_zero():
                break
            comps[n] = cur
            cur = P @ cur
        if not cur.is_zero():
            raise ArithmeticError("splitting component does not terminate")
        for n, blk in comps.items():
            grid[n - 1][k - 1] = blk
    return block(grid, rows, cols, ring), tuple(rows), tuple(cols)


def projectivity_test(D: DirectSystem, depth: int = 8) -> ProjectivityReport:
    """Projectivity of the colimit via ML of the dual tower, with a splitting when projective."""
    rep = ml_check(dual_tower(D), depth)
    if rep.verdict == "NotML":
        return ProjectivityReport("NotProjective", rep)
    if rep.verdict != "Stationary":
        return ProjectivityReport("Undecided", rep)
    psi, rows, cols = splitting_matrix(D, depth)
    phi = phi_map(D, depth)
    prod = psi.col_slice(0, sum(cols)) @ phi.matrix if psi.cols == phi.matrix.rows else None
    ok = False
    if prod is not None:
        n = phi.matrix.cols
        target = block([[Mat.identity(D.ring, n)], [None]], [n, prod.rows - n], [n], D.ring)
        ok = prod == target
    fit = _fitting(D.tail.f)
    return ProjectivityReport("Projective", rep, fit.basis_w.cols, psi, depth, ok)


# -- equivalence battery -----------------------------------------------------------


def stable_image(T: Tower, rep: MLReport, n: int) -> Submodule:
    return T.composite(n, rep.l_of(n) - n).image()


def stable_lift(T: Tower, rep: MLReport, n: int, x: Sequence) -> tuple:
    """An element of the stable image at level ``n+1`` mapping to ``x`` (which must lie in the stable image at ``n``)."""
    S = stable_image(T, rep, n + 1)
    lam = T.lam(n)
    H = T.module(n)
    A = block([[lam.matrix @ S.gens, H.relations]], [H.generators], [S.gens.cols, H.relations.cols], T.ring)
    sol = solve_linear(A, tuple(x)) if A.cols else None
    if sol is None:
        raise ArithmeticError(f"no stable lift at level {n}")
    return S.gens.apply(sol[: S.gens.cols])


def diagonal_factorization(T: Tower, rep: MLReport, gammas: Sequence[Sequence], depth: int) -> dict:
    """Solve ``ψ_n - ψ_{n+1} f_n = ι_n γ_n`` copy by copy for a Stationary Hom tower.

    ``gammas[k-1]`` is ``γ_k ∈ Hom(F_k, M)``.  Copy ``k`` of ``ψ`` is a
    sequence ``a`` with ``Δ a = γ_k`` at level ``k``; it vanishes at levels
    ``<= k - J`` for the uniform offset ``J``, so every ``ψ_n`` meets finitely
    many copies.  Returns the copies up to ``depth`` and a verification flag.
    """
    J = rep.max_offset()
    copies = {}
    ok = True
    for k, g in enumerate(gammas, start=1):
        a: dict[int, tuple] = {}
        m = k - J
        if m >= 1:
            # cancel the image of γ_k at level m with a stable thread starting at k+1
            target = tuple(-x for x in T.composite(m, k - m).apply(g))
            S = stable_image(T, rep, k + 1)
            comp = T.composite(m, k + 1 - m)
            H = T.module(m)
            A = block([[comp.matrix @ S.gens, H.relations]], [H.generators], [S.gens.cols, H.relations.cols], T.ring)
            sol = solve_linear(A, target)
            if sol is None:
                ok = False
                break
            c = S.gens.apply(sol[: S.gens.cols])
        else:
            c = T.module(k + 1).zero_vector()
        a[k + 1] = c
        for n in range(k + 1, depth):
            a[n + 1] = stable_lift(T, rep, n, a[n])
        a[k] = tuple(x + y for x, y in zip(g, T.lam(k).apply(c)))
        for n in range(k - 1, 0, -1):
            a[n] = T.lam(n).apply(a[n + 1])
        for n in range(1, depth):
            lhs = tuple(x - y for x, y in zip(a[n], T.lam(n).apply(a[n + 1])))
            want = g if n == k else T.module(n).zero_vector()
            if not T.module(n).elements_equal(lhs, want):
                ok = False
        for n in range(1, max(m, 0) + 1):
            if not T.module(n).is_zero_element(a[n]):
                ok = False
        copies[k] = a
    return {"offset": J, "copies": copies, "verified": ok}


@dataclass(frozen=True)
class BatteryReport:
    decidable: bool
    conditions: dict  # name -> "holds" | "fails" | "undecided"
    consistent: bool
    ml: MLReport
    evidence: dict = field(default_factory=dict)


def ml_equivalence_battery(D: DirectSystem, M: FPModule, depth: int = 8, copies: int = 2, samples: Sequence = ()) -> BatteryReport:
    T = hom_tower(D, M)
    rep = ml_check(T, depth)
    decidable = D.is_periodic and M.is_finite()
    cond = {}
    ev = {}
    cond["ml"] = {"Stationary": "holds", "NotML": "fails"}.get(rep.verdict, "undecided")
    h = lifting_harness(T, copies, depth)
    if h.verdict == "Stationary":
        lifts_ok = all(ok for _, ok in h.stable_lifts)
        cond["surjective"] = "holds" if lifts_ok and h.targets_solved == h.targets_checked else "fails"
        ev["surjective"] = {"targets": h.targets_checked, "solved": h.targets_solved, "stable_lifts": h.stable_lifts}
    elif h.verdict == "NotML":
        cond["surjective"] = "fails" if D.is_periodic else "undecided"
        ev["surjective"] = {"profile": [(D_, s) for D_, _, s in h.profile], "note": h.note}
    else:
        cond["surjective"] = "undecided"
    if rep.verdict == "Stationary":
        gammas = list(samples) or [_sample_gamma(T.module(k), k) for k in range(1, copies + 1)]
        fac = diagonal_factorization(T, rep, gammas, depth + copies + 1)
        cond["diagonal_factorization"] = "holds" if fac["verified"] else "fails"
        ev["diagonal_factorization"] = {"offset": fac["offset"], "copies": len(fac["copies"])}
    else:
        cond["diagonal_factorization"] = "undecided"
    decided = [v for v in cond.values() if v != "undecided"]
    consistent = len(set(decided)) <= 1
    return BatteryReport(decidable, cond, consistent, rep, ev)


def _sample_gamma(H: FPModule, k: int) -> tuple:
    """A deterministic nonzero-ish sample element of ``H``."""
    ring = H.ring
    return tuple(ring.from_int(1 + (k + i) % 3) for i in range(H.generators))


# -- Mittag-Leffler examples ------------------------------------------------------------------


def ml_examples_suite(D: DirectSystem, family: Sequence[FPModule], depth: int = 8) -> dict:
    proj = projectivity_test(D, depth)
    out: dict = {"projectivity": proj.verdict}
    reps = {M.describe(): ml_check(hom_tower(D, M), depth).verdict for M in family}
    out["family"] = reps
    if proj.verdict == "Projective":
        out["split_implies_ml"] = all(v == "Stationary" for v in reps.values())
    # converse: ML against ⊕ F_n (a free module) gives the splitting
    Fsum = FPModule.free(sum(D.ranks), D.ring)
    conv = ml_check(hom_tower(D, Fsum), depth)
    out["ml_against_sum_of_levels"] = conv.verdict
    if conv.verdict == "Stationary":
        out["converse_splitting_verified"] = proj.verified
    # monomorphisms against a divisible module: rational duals are onto
    mats = [D.f(n) for n in range(1, D.d + (1 if D.is_periodic else 0))]
    if D.is_periodic:
        mats.append(D.tail.f)
    injective = all(rank(f) == f.cols for f in mats)
    out["monomorphisms"] = injective
    if injective:
        out["divisible_profile_ml"] = all(rank(f.T) == f.T.rows for f in mats)
    out["finite_members_ml"] = all(v == "Stationary" for M, v in zip(family, reps.values()) if M.is_finite())
    return out


# -- Ext¹ of the colimit ------------------------------------------------------------


@dataclass(frozen=True)
class ExtColimReport:
    verdict: str  # "Zero" | "Nonzero" | "Undecided"
    ml: MLReport
    stabilization_depth: Optional[int] = None
    certificate: Optional[dict] = None


def ext1_colim(D: DirectSystem, M: FPModule, copies: int = 2, depth: int = 8) -> ExtColimReport:
    """Vanishing of ``Ext¹(colim F_n, M^(N))``, equivalent to ML of ``Hom(F_n, M)``."""
    T = hom_tower(D, M)
    rep = ml_check(T, depth)
    if M.is_zero_module():
        return ExtColimReport("Zero", rep, 1)
    if rep.verdict == "Stationary":
        h = lifting_harness(T, copies, depth)
        if h.targets_solved != h.targets_checked or not all(ok for _, ok in h.stable_lifts):
            target = "stable images fail to lift"
            return ExtColimReport("Nonzero", rep, rep.max_offset(), {"failure": target})
        return ExtColimReport("Zero", rep, rep.max_offset())
    if rep.verdict == "NotML" and D.is_periodic:
        w = rep.witness
        cert = {"witness_level": w.m, "strict_steps": len(w.steps), "delta": rep.delta}
        return ExtColimReport("Nonzero", rep, None, cert)
    return ExtColimReport("Undecided", rep)


# -- sum and product transfer -----------------------------------------------------------


def sum_product_transfer(D: DirectSystem, family: Sequence[FPModule], depth: int = 8) -> dict:
    if not family:
        raise ValueError("empty family")
    singles = [hom_tower(D, M) for M in family]
    direct = ml_check(hom_tower(D, direct_sum(*family)), depth)
    as_sum = ml_check(tower_sum(singles), depth)
    as_prod = ml_check(tower_product(singles), depth)
    per = [ml_check(T, depth) for T in singles]
    verdicts = {direct.verdict, as_sum.verdict, as_prod.verdict}
    if all(r.stationary for r in per):
        expected = "Stationary"
    elif any(r.verdict == "NotML" for r in per):
        expected = "NotML"
    else:
        expected = "UndecidedAtDepth"
    agree = verdicts == {expected}
    uniform = None
    if expected == "Stationary":
        top = max(direct.prefix_length, as_sum.prefix_length) + 1
        uniform = {m: max(r.l_of(m) for r in per) for m in range(1, top + 1)}
        agree = agree and all(direct.l_of(m) == as_sum.l_of(m) == as_prod.l_of(m) == uniform[m] for m in uniform)
        seq = [uniform[m] for m in sorted(uniform)]
        agree = agree and all(satisfies_sequence(r, seq) for r in per)
    return {"verdict": expected, "agree": agree, "uniform_l": uniform, "per_module": [r.verdict for r in per]}


def pure_submodule_transfer(D: DirectSystem, M: FPModule, N: Submodule, depth: int = 8) -> dict:
    if N.ambient != M:
        raise DimensionError("N is not a submodule of M")
    Nmod, eps = N.as_module()
    Nmod, _, from_s = Nmod.simplify()
    eps = eps @ from_s
    pv = is_pure_submodule(eps)
    if not pv.pure:
        raise NotPureError(f"submodule is not pure (r = {M.ring.format(pv.r)})", pv.witness)
    rm = ml_check(hom_tower(D, M), depth)
    rn = ml_check(hom_tower(D, Nmod), depth)
    lemma = []
    top = D.d + (1 if D.is_periodic else 0)
    for n in range(1, top + 1):
        if not D.available(n + 1):
            break
        Fn, Fn1 = FPModule.free(D.rank(n), D.ring), FPModule.free(D.rank(n + 1), D.ring)
        f = ModuleMap(Fn, Fn1, D.f(n), check=False)
        lemma.append(pure_intersection_check(f, M, N).verdict)
    l_ok = None
    if rm.stationary:
        l_ok = rn.stationary and all(rn.l_of(m) <= rm.l_of(m) for m in rm.l)
    return {"M": rm.verdict, "N": rn.verdict, "l_no_larger": l_ok, "intersection_checks": lemma}


# -- the Jensen construction -----------------------------------------------------------


@dataclass(frozen=True)
class NotFlatEvidence:
    stage: int
    support: int
    relations: Mat
    invariant_factors: tuple
    note: str = "the span of the first relations is not a direct summand of the supporting free module"


@dataclass(frozen=True)
class Presentation:
    """``free`` generators and relation columns (``free`` rows); ``periodic`` declares a repeating pattern."""

    ring: EuclideanRing
    free: int
    relations: Mat
    periodic: bool = False

    def __post_init__(self):
        if self.relations.rows != self.free:
            raise DimensionError("relation columns must have one entry per free generator")


def _support(col: Sequence) -> int:
    last = 0
    for i, a in enumerate(col, start=1):
        if a:
            last = i
    return last


def jensen_system(pres: Presentation, mode: str = "strict") -> Union[DirectSystem, NotFlatEvidence, list]:
    """Direct system of free modules whose colimit is the presented module.

    Stage ``n`` uses the initial segment ``A_n`` of the free basis that covers
    ``n`` and the supports of ``g_1..g_n``; the last stage covers every free
    generator.  ``P_n = F_{A_n} / span(g_1..g_n)`` must be free, which is the
    summand condition; the quotient basis comes from a Smith form and each
    connecting map is brought to row Hermite form to make the bases canonical.
    In ``mode="report"`` every failing stage is returned as a list.
    """
    if mode not in ("strict", "report"):
        raise ValueError(f"unknown mode {mode!r}")
    ring = pres.ring
    N, K = pres.free, pres.relations.cols
    if K == 0:
        return DirectSystem.identity(N, ring)
    stages = []
    failures = []
    covered = 0
    for n in range(1, K + 1):
        covered = max(covered, n, max(_support(pres.relations.col(i)) for i in range(n)))
        a = N if n == K else min(covered, N)
        G = pres.relations.submatrix(range(a), range(n))
        dec = snf(G)
        units = all(ring.is_unit(dec.D.data[i][i]) for i in range(dec.rank))
        if not units:
            ev = NotFlatEvidence(n, a, G, dec.factors)
            if mode == "strict":
                return ev
            failures.append(ev)
            continue
        # retraction of the span, as an explicit check of the summand condition
        Bn = column_basis(G)
        if Bn.cols and solve_matrix(Bn.T, Mat.identity(ring, Bn.cols)) is None:
            raise ArithmeticError("unit Smith form without a retraction")
        s = dec.rank
        stages.append((a, s, dec.U.row_slice(s, a), dec.Uinv.col_slice(s, a)))
    if failures:
        return failures
    ranks = [a - s for a, s, _, _ in stages]
    maps = []
    for (a, s, _, lift), (a1, s1, proj1, _) in zip(stages, stages[1:]):
        padded = block([[lift], [None]], [a, a1 - a], [a - s], ring)
        maps.append(proj1 @ padded)
    # canonical bases: Hermite form of each map, pushing the change of basis forward
    carry = None
    normal = []
    for f in maps:
        if carry is not None:
            f = f @ carry
        H, W = hermite_rows(f)
        Winv = solve_matrix(W, Mat.identity(ring, W.rows))
        normal.append(H)
        carry = Winv
    if pres.periodic and len(normal) >= 2 and normal[-1] == normal[-2] and normal[-1].rows == normal[-1].cols:
        f = normal[-1]
        return DirectSystem(ring, tuple(ranks[:-1]), tuple(normal[:-1]), PeriodicSystem(f.rows, f, f), tail_inferred=True)
    return DirectSystem(ring, tuple(ranks), tuple(normal), TRUNCATED)
