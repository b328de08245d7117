"""Towers ``H_1 <- H_2 <- H_3 <- ...`` and the Mittag-Leffler condition.

Levels are 1-based: ``module(n)`` is ``H_n`` and ``lam(n)`` is the map
``H_{n+1} -> H_n``.  A tower is a finite prefix plus a tail policy:

* ``Truncated``: nothing is known past the prefix.
* ``Periodic(H, lam, attach)``: every level after the prefix is ``H``, the
  first tail map is ``attach: H -> H_d`` and all later maps are ``lam``.

For a periodic tail the image chain ``im(lam^j)`` in ``H`` is decided
exactly.  Write ``F`` for ``H`` modulo torsion and ``lam_F`` for the induced
map.  The rank of ``lam_F^j`` stabilizes at some ``j0``; on ``W = im(lam_F^j0)``
the map is injective, with matrix ``M_W`` in a basis of ``W``.  If ``det(M_W)``
is not a unit the free images keep shrinking, so the chain never stops.
Otherwise each further quotient ``V_j / V_{j+1}`` comes from the finite
torsion part, so the chain stops after at most the torsion length more steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import limits
from .errors import DimensionError, RingMismatchError
from .linalg import Mat, block, block_diag, cokernel_invariants, column_basis, det, kernel_basis, rank, solve_linear, solve_matrix
from .modules import FPModule, ModuleMap, Submodule, direct_sum


@dataclass(frozen=True)
class Truncated:
    pass


TRUNCATED = Truncated()


@dataclass(frozen=True, eq=False)
class Periodic:
    module: FPModule
    lam: ModuleMap
    attach: ModuleMap


Tail = Union[Truncated, Periodic]


@dataclass(frozen=True, eq=False)
class Tower:
    prefix: tuple
    maps: tuple
    tail: Tail = TRUNCATED

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.prefix:
            raise DimensionError("a tower needs at least one level")
        if len(self.maps) != len(self.prefix) - 1:
            raise DimensionError(f"{len(self.prefix)} levels need {len(self.prefix) - 1} maps, got {len(self.maps)}")
        ring = self.prefix[0].ring
        for H in self.prefix:
            if H.ring != ring:
                raise RingMismatchError("tower levels over different rings")
        for n, f in enumerate(self.maps, start=1):
            if f.source != self.prefix[n] or f.target != self.prefix[n - 1]:
                raise DimensionError(f"map {n} does not go from level {n + 1} to level {n}")
        if isinstance(self.tail, Periodic):
            H = self.tail.module
            if self.tail.lam.source != H or self.tail.lam.target != H:
                raise DimensionError("periodic map must be an endomorphism of the tail module")
            if self.tail.attach.source != H or self.tail.attach.target != self.prefix[-1]:
                raise DimensionError("attaching map must go from the tail module to the last prefix level")

    # -- constructors ------------------------------------------------------

    @classmethod
    def periodic(cls, H: FPModule, lam: ModuleMap) -> "Tower":
        """The tower ``... -> H -> H -> H`` with every map ``lam``."""
        return cls((H,), (), Periodic(H, lam, lam))

    @classmethod
    def constant(cls, H: FPModule) -> "Tower":
        return cls.periodic(H, ModuleMap.identity(H))

    # -- access ------------------------------------------------------------

    @property
    def ring(self):
        return self.prefix[0].ring

    @property
    def d(self) -> int:
        return len(self.prefix)

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.tail, Periodic)

    def available(self, n: int) -> bool:
        return n >= 1 and (n <= self.d or self.is_periodic)

    def module(self, n: int) -> FPModule:
        if n < 1:
            raise DimensionError("levels start at 1")
        if n <= self.d:
            return self.prefix[n - 1]
        if self.is_periodic:
            return self.tail.module
        raise DimensionError(f"level {n} is past the truncation at {self.d}")

    def lam(self, n: int) -> ModuleMap:
        if n < 1:
            raise DimensionError("levels start at 1")
        if n < self.d:
            return self.maps[n - 1]
        if self.is_periodic:
            return self.tail.attach if n == self.d else self.tail.lam
        raise DimensionError(f"map {n} is past the truncation at {self.d}")

    def composite(self, m: int, j: int) -> ModuleMap:
        """``lam_m ∘ ... ∘ lam_{m+j-1}: H_{m+j} -> H_m``."""
        out = ModuleMap.identity(self.module(m))
        for n in range(m, m + j):
            out = out @ self.lam(n)
        return out

    def unrolled(self, length: int) -> "Tower":
        """Same periodic tower with the prefix extended to ``length`` levels."""
        if not self.is_periodic:
            raise DimensionError("only periodic towers can be unrolled")
        if length <= self.d:
            return self
        mods = [self.module(n) for n in range(1, length + 1)]
        maps = [self.lam(n) for n in range(1, length)]
        H = self.tail.module
        return Tower(mods, maps, Periodic(H, self.tail.lam, self.tail.lam))

    def __repr__(self) -> str:
        kind = "periodic" if self.is_periodic else "truncated"
        levels = ", ".join(H.describe() for H in self.prefix)
        return f"Tower([{levels}], {kind})"


# -- diagonal maps, sums and products ------------------------------------------


def diagonal_map(family: Sequence[ModuleMap]) -> ModuleMap:
    """Block-diagonal map ``⊕ M_i -> ⊕ N_i``."""
    if not family:
        raise ValueError("empty family")
    ring = family[0].ring
    src = direct_sum(*[g.source for g in family])
    tgt = direct_sum(*[g.target for g in family])
    return ModuleMap(src, tgt, block_diag(*[g.matrix for g in family], ring=ring), check=False)


def _combine(family: Sequence[Tower]) -> Tower:
    if not family:
        raise ValueError("empty family of towers")
    if all(T.is_periodic for T in family):
        D = max(T.d for T in family)
        family = [T.unrolled(D) for T in family]
    elif not any(T.is_periodic for T in family):
        D = family[0].d
        if any(T.d != D for T in family):
            raise DimensionError("truncated towers must share their depth")
    else:
        raise DimensionError("cannot combine truncated and periodic towers")
    mods = [direct_sum(*[T.module(n) for T in family]) for n in range(1, D + 1)]
    maps = [diagonal_map([T.lam(n) for T in family]) for n in range(1, D)]
    if family[0].is_periodic:
        H = direct_sum(*[T.tail.module for T in family])
        lam = diagonal_map([T.tail.lam for T in family])
        att = diagonal_map([T.tail.attach for T in family])
        return Tower(mods, maps, Periodic(H, lam, att))
    return Tower(mods, maps, TRUNCATED)


def tower_sum(family: Sequence[Tower]) -> Tower:
    """Levelwise direct sum with diagonal connecting maps."""
    return _combine(family)


def tower_product(family: Sequence[Tower]) -> Tower:
    """Levelwise product; for a finite family this is the same module as the sum."""
    return _combine(list(family))


def tower_power(T: Tower, copies: int) -> Tower:
    if copies < 1:
        raise ValueError("copies must be at least 1")
    return tower_sum([T] * copies)


# -- image chains ------------------------------------------------------------


@dataclass(frozen=True)
class ImageChain:
    """``entries[j]`` is the image of ``H_{m+j}`` in ``H_m``; ``None`` past a truncation."""

    m: int
    entries: tuple
    strict_steps: tuple  # (j, element of entry j not in entry j+1)

    @property
    def undecided_from(self) -> Optional[int]:
        for j, e in enumerate(self.entries):
            if e is None:
                return j
        return None


def image_chain(T: Tower, m: int, k: int) -> ImageChain:
    if not T.available(m):
        raise DimensionError(f"level {m} is not available")
    entries = []
    for j in range(k + 1):
        if not T.available(m + j):
            entries.append(None)
            continue
        entries.append(T.composite(m, j).image())
    steps = []
    for j in range(k):
        a, b = entries[j], entries[j + 1]
        if a is None or b is None:
            break
        x = a.first_not_in(b)
        if x is not None:
            steps.append((j, x))
    return ImageChain(m, tuple(entries), tuple(steps))


# -- Mittag-Leffler decision -------------------------------------------------


@dataclass(frozen=True)
class WitnessStep:
    """``element`` lies in ``H_level``; its image at the witness level is in entry ``j`` but not ``j+1``."""

    j: int
    level: int
    element: tuple
    image: tuple


@dataclass(frozen=True)
class Witness:
    m: int
    steps: tuple


@dataclass(frozen=True)
class TailAnalysis:
    ml: bool
    j0: int
    delta: object
    stable_index: Optional[int]
    stable_image: Optional[Submodule]
    ranks: tuple


def analyse_tail(H: FPModule, lam: ModuleMap) -> TailAnalysis:
    """Exact decision for the chain ``im(lam^j)`` inside ``H``."""
    ring = H.ring
    S, to_s, from_s = H.simplify()
    L = to_s.matrix @ lam.matrix @ from_s.matrix
    t = len(S.invariant_factors)
    f = S.generators - t
    idx = range(t, t + f)
    Lf = L.submatrix(idx, idx)
    ranks = [f]
    P = Mat.identity(ring, f)
    while True:
        P = P @ Lf
        ranks.append(rank(P) if f else 0)
        if ranks[-1] == ranks[-2]:
            break
    j0 = len(ranks) - 2
    W = column_basis(Lf.power(j0)) if f else Mat.zeros(ring, 0, 0)
    if W.cols:
        Mres = solve_matrix(W, Lf @ W)
        delta = det(Mres)
    else:
        delta = ring.one
    if not ring.is_unit(delta):
        return TailAnalysis(False, j0, ring.canonical(delta), None, None, tuple(ranks))
    bound = j0 + sum(ring.length_bound(d) for d in S.invariant_factors) + 1
    Vj = Submodule.whole(H)
    power = ModuleMap.identity(H)
    for j in range(bound + 1):
        power_next = power @ lam
        Vn = power_next.image()
        if Vj <= Vn:
            return TailAnalysis(True, j0, ring.one, j, Vj, tuple(ranks))
        Vj, power = Vn, power_next
    raise ArithmeticError("image chain did not stabilize within the proven bound")


@dataclass(frozen=True)
class MLReport:
    verdict: str  # "Stationary" | "NotML" | "UndecidedAtDepth"
    l: dict
    tail_offset: Optional[int]
    witness: Optional[Witness]
    depth: int
    prefix_length: int
    j0: Optional[int] = None
    delta: object = None
    certified: dict = field(default_factory=dict)

    @property
    def stationary(self) -> bool:
        return self.verdict == "Stationary"

    def l_of(self, m: int) -> Optional[int]:
        if m in self.l:
            return self.l[m]
        if self.tail_offset is not None and m > self.prefix_length:
            return m + self.tail_offset
        return None

    def max_offset(self) -> Optional[int]:
        """``max_m (l(m) - m)`` over all levels, when known."""
        if self.verdict != "Stationary":
            return None
        vals = [v - m for m, v in self.l.items()]
        if self.tail_offset is not None:
            vals.append(self.tail_offset)
        return max(vals)


def _first_stable(entries: Sequence[Submodule]) -> int:
    last = entries[-1]
    for j, e in enumerate(entries):
        if e <= last:
            return j
    return len(entries) - 1


def _witness_at(T: Tower, m: int, depth: int) -> Optional[Witness]:
    chain_maps = [T.composite(m, j) for j in range(depth + 1)]
    images = [g.image() for g in chain_maps]
    steps = []
    for j in range(depth):
        g = chain_maps[j]
        found = None
        for i in range(g.source.generators):
            e = g.source.basis_vector(i)
            y = g.apply(e)
            if not images[j + 1].contains(y):
                found = WitnessStep(j, m + j, e, y)
                break
        if found is None:
            return None
        steps.append(found)
    return Witness(m, tuple(steps))


def ml_check(T: Tower, depth: int = 8) -> MLReport:
    """Mittag-Leffler verdict with minimal indices ``l(m) > m`` or a descending witness."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    limits.check("max_depth", depth)
    d = T.d
    if not T.is_periodic:
        return _ml_truncated(T, depth)
    tail = analyse_tail(T.tail.module, T.tail.lam)
    if not tail.ml:
        w = _witness_at(T, 1, depth) or _witness_at(T, d + 1, depth)
        return MLReport("NotML", {}, None, w, depth, d, tail.j0, tail.delta)
    s = tail.stable_index
    offset = max(1, s)
    table = {}
    for m in range(1, d + 1):
        jt = d + 1 - m
        entries = [T.composite(m, j).image() for j in range(jt + s + 1)]
        table[m] = m + max(1, _first_stable(entries))
    for m in range(d + 1, max(depth, d + 1) + 1):
        table[m] = m + offset
    return MLReport("Stationary", table, offset, None, depth, d, tail.j0, tail.delta, {m: True for m in table})


def _ml_truncated(T: Tower, depth: int) -> MLReport:
    d = T.d
    table, certified = {}, {}
    for m in range(1, d + 1):
        for j in range(0, d - m + 1):
            if T.composite(m, j).image().is_zero():
                table[m] = m + max(1, j)
                certified[m] = True
                break
    return MLReport("UndecidedAtDepth", table, None, None, min(depth, d), d, certified=certified)


def satisfies_sequence(report: MLReport, l: Sequence[int]) -> Optional[bool]:
    """Whether the tower is ML with respect to ``l`` (``l[0]`` is ``l(1)``).

    Past the given values ``l`` continues with its last offset ``l(L) - L``.
    ``None`` means the report cannot decide.
    """
    if not l:
        raise ValueError("empty index sequence")
    for m, v in enumerate(l, start=1):
        if v <= m:
            raise ValueError(f"l({m}) = {v} must exceed {m}")
    L = len(l)

    def cand(m: int) -> int:
        return l[m - 1] if m <= L else m + (l[-1] - L)

    if report.verdict == "NotML":
        return False
    if report.verdict == "UndecidedAtDepth":
        for m, v in report.l.items():
            if report.certified.get(m) and v > cand(m):
                return False
        return None
    top = max(L, report.prefix_length + 1)
    for m in range(1, top + 1):
        if cand(m) < report.l_of(m):
            return False
    return (l[-1] - L) >= report.tail_offset


# -- family uniformity comparison ----------------------------------------------


@dataclass(frozen=True)
class UniformityReport:
    factor_reports: tuple
    sum_report: MLReport
    product_report: MLReport
    factors_ok: tuple
    sum_ok: Optional[bool]
    product_ok: Optional[bool]
    violators: tuple
    minimal_uniform: Optional[dict]
    uniform_tail_offset: Optional[int]

    @property
    def equivalent(self) -> bool:
        every = None if any(v is None for v in self.factors_ok) else all(self.factors_ok)
        return self.sum_ok == every == self.product_ok


def family_uniformity_check(family: Sequence[Tower], l: Sequence[int], depth: int = 8) -> UniformityReport:
    """Compare ML with respect to ``l`` for the factors, their sum and their product."""
    reps = tuple(ml_check(T, depth) for T in family)
    srep = ml_check(tower_sum(family), depth)
    prep = ml_check(tower_product(family), depth)
    oks = tuple(satisfies_sequence(r, l) for r in reps)
    minimal, tail_off = None, None
    if all(r.stationary for r in reps):
        top = max(max(r.prefix_length for r in reps) + 1, len(l))
        minimal = {m: max(r.l_of(m) for r in reps) for m in range(1, top + 1)}
        tail_off = max(r.tail_offset for r in reps)
    return UniformityReport(
        reps,
        srep,
        prep,
        oks,
        satisfies_sequence(srep, l),
        satisfies_sequence(prep, l),
        tuple(i for i, ok in enumerate(oks) if ok is False),
        minimal,
        tail_off,
    )


# -- the Δ map -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DeltaMatrix:
    """``Δ(a)_n = a_n - lam_n(a_{n+1})`` on levels ``1..depth``.

    The square form drops ``a_{depth+1}``; the rectangular form keeps it.
    """

    depth: int
    matrix: Mat
    row_sizes: tuple
    col_sizes: tuple
    source: FPModule
    target: FPModule

    def apply(self, stacked: Sequence) -> tuple:
        return self.matrix.apply(stacked)

    def as_map(self) -> ModuleMap:
        return ModuleMap(self.source, self.target, self.matrix, check=False)


def delta_matrix(T: Tower, depth: int, rectangular: bool = False) -> DeltaMatrix:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    limits.check("max_depth", depth)
    ring = T.ring
    ncols = depth + 1 if rectangular else depth
    mods = [T.module(n) for n in range(1, ncols + 1)]
    sizes = [H.generators for H in mods]
    limits.check("max_dim", sum(sizes))
    grid = [[None] * ncols for _ in range(depth)]
    for n in range(1, depth + 1):
        grid[n - 1][n - 1] = Mat.identity(ring, sizes[n - 1])
        if n < ncols:
            grid[n - 1][n] = -T.lam(n).matrix
    M = block(grid, sizes[:depth], sizes, ring)
    return DeltaMatrix(depth, M, tuple(sizes[:depth]), tuple(sizes), direct_sum(*mods), direct_sum(*mods[:depth]))


# -- lim and lim¹ ---------------------------------------------------------------


@dataclass(frozen=True)
class LimReport:
    exact: bool
    lim: Optional[FPModule]
    lim1: Optional[FPModule]
    ml: MLReport
    reason: str
    truncated: dict = field(default_factory=dict)


def _truncated_data(T: Tower, depth: int) -> dict:
    if not T.is_periodic:
        # the rectangular form needs one level beyond the depth
        depth = min(depth, T.d - 1)
        if depth < 1:
            return {"depth": 0}
    sq = delta_matrix(T, depth)
    rect = delta_matrix(T, depth, rectangular=True)
    K = kernel_basis(hstack_rel(rect.matrix, rect.target))
    coker = FPModule(T.ring, sq.target.generators, hstack_rel(sq.matrix, sq.target))
    return {
        "depth": depth,
        "square_cokernel": coker.describe(),
        "rectangular_kernel_generators": K.cols,
    }


def hstack_rel(M: Mat, target: FPModule) -> Mat:
    return block([[M, target.relations]], [M.rows], [M.cols, target.relations.cols], M.ring)


def _free_tail_limit_rank(lam: Mat) -> Optional[int]:
    """Rank of lim of ``(Z^f, lam)``: the part of ``Q^f`` where ``lam`` is integrally invertible."""
    import sympy

    x = sympy.Symbol("x")
    n = lam.rows
    if n == 0:
        return 0
    A = sympy.Matrix(lam.tolist())
    poly = A.charpoly(x)
    _, factors = sympy.factor_list(poly.as_expr(), x)
    P = sympy.Matrix.eye(n)
    for g, e in factors:
        gp = sympy.Poly(g, x)
        if abs(gp.eval(0)) == 1:
            gA = sympy.zeros(n, n)
            for (k,), c in gp.terms():
                gA += c * A**k
            P = P * gA**e
    return n - P.rank()


def lim_and_lim1(T: Tower, depth: int = 6) -> LimReport:
    """Exact lim and lim¹ on the decidable fragment, truncated data otherwise."""
    rep = ml_check(T, depth)
    from .rings import INTEGERS

    if rep.verdict == "Stationary":
        tail = analyse_tail(T.tail.module, T.tail.lam)
        lim_mod, _ = tail.stable_image.as_module()
        return LimReport(True, lim_mod.simplify()[0], FPModule.zero(T.ring), rep, "Mittag-Leffler: lim¹ vanishes; lim is the stable image")
    data = _truncated_data(T, depth)
    if rep.verdict == "NotML":
        H = T.tail.module
        if T.ring == INTEGERS and H.relations.cols == 0:
            r = _free_tail_limit_rank(T.tail.lam.matrix)
            return LimReport(
                False,
                FPModule.free(r, T.ring),
                None,
                rep,
                "not Mittag-Leffler: lim exact from the unit-constant part of the characteristic polynomial; lim¹ undecided",
                data,
            )
        return LimReport(False, None, None, rep, "not Mittag-Leffler: lim and lim¹ undecided", data)
    return LimReport(False, None, None, rep, "truncated tower: undecided", data)


# -- evidence harness ----------------------------------------------------------


@dataclass(frozen=True)
class HarnessReport:
    verdict: str
    copies: int
    depth: int
    targets_checked: int = 0
    targets_solved: int = 0
    stable_lifts: tuple = ()
    profile: tuple = ()
    note: str = ""


def _elements(M: FPModule, cap: int = 4096) -> Optional[list]:
    """All elements of a finite module in its simplified coordinates, or ``None`` when too many."""
    S, _, from_s = M.simplify()
    if S.free_rank:
        return None
    total = 1
    sizes = []
    for d in S.invariant_factors:
        if not isinstance(d, int):
            return None
        sizes.append(d)
        total *= d
        if total > cap:
            return None
    out = []
    for k in range(total):
        coords = []
        for d in sizes:
            coords.append(k % d)
            k //= d
        out.append(from_s.matrix.apply(coords))
    return out


def lifting_harness(T: Tower, copies: int = 3, depth: int = 8) -> HarnessReport:
    """Evidence linking ML of ``T`` with lim¹ of ``T^(copies)``.

    Stationary: every target is solved by the square Δ at the stabilized
    depth and the stable images lift, ``lam_m(S_{m+1}) = S_m``.  NotML: with
    the witness elements ``b_n`` on the diagonal, back substitution through
    Δ shows how the forced entries grow with the depth.  That growth is
    evidence only; it proves nothing about lim¹.
    """
    rep = ml_check(T, depth)
    if rep.verdict == "Stationary":
        P = tower_power(T, copies)
        prep = ml_check(P, depth)
        top = max(prep.l_of(m) for m in range(1, P.d + 2))
        D = top + 1
        delta = delta_matrix(P, D)
        tgt = delta.target
        targets = [tgt.basis_vector(i) for i in range(tgt.generators)]
        everything = _elements(tgt)
        if everything is not None:
            targets = everything
        span = hstack_rel(delta.matrix, tgt)
        solved = sum(1 for b in targets if solve_linear(span, b) is not None)
        lifts = []
        for m in range(1, P.d + 2):
            Sm = P.composite(m, prep.l_of(m) - m).image()
            Sm1 = P.composite(m + 1, prep.l_of(m + 1) - m - 1).image()
            lifted = Sm1.image_under(P.lam(m))
            lifts.append((m, lifted.equals(Sm)))
        return HarnessReport("Stationary", copies, D, len(targets), solved, tuple(lifts))
    if rep.verdict == "NotML":
        w = rep.witness
        m = w.m
        b = {s.level: s.element for s in w.steps}
        profile = []
        ring = T.ring
        for D in range(m, m + len(w.steps)):
            a = None
            for n in range(D, m - 1, -1):
                bn = b.get(n, T.module(n).zero_vector())
                a = bn if a is None else tuple(x + y for x, y in zip(bn, T.lam(n).apply(a)))
            size = max((ring.size(x) for x in a), default=-1)
            profile.append((D, a, size))
        return HarnessReport("NotML", copies, depth, profile=tuple(profile),
                             note="growth of forced entries is evidence, not a proof that lim¹ is nonzero")
    return HarnessReport("UndecidedAtDepth", copies, depth, note="truncated tower")
