"""Hom and Ext¹ of finitely presented modules, purity, torsion and divisibility.

Hom(M, N) is computed as a lattice of matrices: with ``M = coker A`` (``n``
generators) and ``N = coker B`` (``m`` generators), a matrix ``X`` (``m x n``)
defines a map iff ``X A = B Y`` for some ``Y``.  Matrices are vectorized
column-major, so ``vec(X A) = (Aᵀ ⊗ I_m) vec X``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from . import limits
from .errors import DiagramError, DimensionError, NotWellDefinedError, RingMismatchError
from .linalg import Mat, block, column_basis, kernel_basis, kron, solve_linear, solve_matrix
from .modules import FPModule, ModuleMap, Submodule


def vec(X: Mat) -> tuple:
    return tuple(X.data[i][j] for j in range(X.cols) for i in range(X.rows))


def unvec(v: Sequence, rows: int, cols: int, ring) -> Mat:
    return Mat(ring, rows, cols, [[v[j * rows + i] for j in range(cols)] for i in range(rows)])


def canonical_vector(ring, v: Sequence) -> tuple:
    """Scale by a unit so the first nonzero coordinate is canonical."""
    for a in v:
        if a:
            _, u = ring.normalize(a)
            ui = ring.unit_inverse(u)
            return tuple(ui * b for b in v)
    return tuple(v)


def _same_ring(*mods: FPModule) -> None:
    ring = mods[0].ring
    for M in mods[1:]:
        if M.ring != ring:
            raise RingMismatchError(f"modules over {ring.tag} and {M.ring.tag}")


@dataclass(frozen=True, eq=False)
class HomSpace:
    """``module`` is isomorphic to Hom(source, target); ``basis`` spans all valid matrices."""

    source: FPModule
    target: FPModule
    module: FPModule
    basis: Mat
    to_module: Mat
    from_module: Mat

    def decode(self, element: Sequence) -> ModuleMap:
        c = self.from_module.apply(element)
        X = unvec(self.basis.apply(c), self.target.generators, self.source.generators, self.source.ring)
        return ModuleMap(self.source, self.target, X, check=False)

    def encode(self, f: ModuleMap) -> tuple:
        if f.source != self.source or f.target != self.target:
            raise DimensionError("map does not belong to this Hom module")
        c = solve_linear(self.basis, vec(f.matrix)) if self.basis.cols else ()
        if c is None:
            raise NotWellDefinedError("matrix is not a well-defined homomorphism")
        return self.to_module.apply(c)

    def generator_maps(self) -> list[ModuleMap]:
        return [self.decode(self.module.basis_vector(i)) for i in range(self.module.generators)]


def _map_lattice(M: FPModule, N: FPModule) -> Mat:
    """Basis (as vec columns) of all matrices ``X`` with ``X·A ⊆ im B``."""
    ring = M.ring
    n, m = M.generators, N.generators
    A, B = M.relations, N.relations
    k, l = A.cols, B.cols
    limits.check("max_dim", m * n + k * l)
    if k == 0:
        return Mat.identity(ring, m * n)
    system = block([[kron(A.T, Mat.identity(ring, m)), -kron(Mat.identity(ring, k), B)]], [m * k], [m * n, k * l], ring)
    K = kernel_basis(system).row_slice(0, m * n)
    return column_basis(K)


@lru_cache(maxsize=4096)
def hom_module(M: FPModule, N: FPModule) -> HomSpace:
    """Presentation of Hom(M, N) together with an element decoder."""
    _same_ring(M, N)
    ring = M.ring
    n, m = M.generators, N.generators
    limits.check("max_generators", m * n)
    Lb = _map_lattice(M, N)
    t = Lb.cols
    if t == 0:
        Z = FPModule.zero(ring)
        return HomSpace(M, N, Z, Lb, Mat.zeros(ring, 0, 0), Mat.zeros(ring, 0, 0))
    null = kron(Mat.identity(ring, n), N.relations)
    C = solve_matrix(Lb, null) if null.cols else Mat.zeros(ring, t, 0)
    if C is None:
        raise ArithmeticError("null maps are not in the map lattice")
    H = FPModule(ring, t, C)
    S, to_s, from_s = H.simplify()
    return HomSpace(M, N, S, Lb, to_s.matrix, from_s.matrix)


@lru_cache(maxsize=4096)
def ext1(M: FPModule, N: FPModule) -> FPModule:
    """Ext¹(M, N) from the presentation ``0 -> R^s -> R^n -> M -> 0`` with ``R^s`` the relation lattice."""
    _same_ring(M, N)
    ring = M.ring
    n, m = M.generators, N.generators
    Kb = column_basis(M.relations)
    s = Kb.cols
    limits.check("max_generators", m * s)
    if s == 0 or m == 0:
        return FPModule.zero(ring)
    rel = block(
        [[kron(Mat.identity(ring, s), N.relations), kron(Kb.T, Mat.identity(ring, m))]],
        [m * s],
        [s * N.relations.cols, m * n],
        ring,
    )
    return FPModule(ring, m * s, rel).simplify()[0]


def apply_hom_contra(f: ModuleMap, M: FPModule) -> ModuleMap:
    """Precomposition with ``f: C -> C'`` as a map Hom(C', M) -> Hom(C, M)."""
    src = hom_module(f.target, M)
    dst = hom_module(f.source, M)
    cols = [dst.encode(g @ f) for g in src.generator_maps()]
    return ModuleMap(src.module, dst.module, Mat.from_cols(cols, M.ring, rows=dst.module.generators), check=False)


def apply_hom_co(g: ModuleMap, C: FPModule) -> ModuleMap:
    """Postcomposition with ``g: M -> L`` as a map Hom(C, M) -> Hom(C, L)."""
    src = hom_module(C, g.source)
    dst = hom_module(C, g.target)
    cols = [dst.encode(g @ h) for h in src.generator_maps()]
    return ModuleMap(src.module, dst.module, Mat.from_cols(cols, C.ring, rows=dst.module.generators), check=False)


def solve_hom_equation(
    P: FPModule,
    Q: FPModule,
    target: ModuleMap,
    left: Optional[ModuleMap] = None,
    right: Optional[ModuleMap] = None,
) -> Optional[ModuleMap]:
    """A homomorphism ``X: P -> Q`` with ``left ∘ X ∘ right == target``, or ``None``.

    ``left`` defaults to the identity of ``Q`` and ``right`` to the identity of ``P``.
    """
    ring = P.ring
    left = left or ModuleMap.identity(Q)
    right = right or ModuleMap.identity(P)
    if left.source != Q or right.target != P or target.source != right.source or target.target != left.target:
        raise DimensionError("equation shapes do not line up")
    T = target.target
    q, p = Q.generators, P.generators
    Lb = _map_lattice(P, Q)
    if Lb.cols == 0:
        return ModuleMap.zero(P, Q) if target.is_zero() else None
    # left·unvec(Lb c)·right - target ∈ im(B_T)
    op = kron(right.matrix.T, left.matrix) @ Lb
    rows = T.generators * right.source.generators
    BT = kron(Mat.identity(ring, right.source.generators), T.relations)
    system = block([[op, BT]], [rows], [op.cols, BT.cols], ring)
    sol = solve_linear(system, vec(target.matrix))
    if sol is None:
        return None
    X = unvec(Lb.apply(sol[: Lb.cols]), q, p, ring)
    return ModuleMap(P, Q, X, check=False)


# -- homotopy transfer -------------------------------------------------------


def _require(cond: bool, identity: str) -> None:
    if not cond:
        raise DiagramError(f"diagram hypothesis fails: {identity}")


def check_transfer_diagram(d: dict) -> None:
    """Validate exact rows and commuting squares; raise on the first failure."""
    f, pi, eps, g = d["f"], d["pi"], d["eps"], d["g"]
    h, k, ell = d["h"], d["k"], d["ell"]
    _require(f.target == pi.source, "f and π are composable")
    _require(eps.target == g.source, "ε and g are composable")
    _require((pi @ f).is_zero(), "π∘f = 0")
    _require(pi.is_surjective(), "π is surjective")
    _require(pi.kernel() <= f.image(), "ker π ⊆ im f")
    _require(eps.is_injective(), "ε is injective")
    _require((g @ eps).is_zero(), "g∘ε = 0")
    _require(g.kernel() <= eps.image(), "ker g ⊆ im ε")
    _require(h.source == f.source and h.target == eps.source, "h: C → N")
    _require(k.source == f.target and k.target == eps.target, "k: C' → M")
    _require(ell.source == pi.target and ell.target == g.target, "ℓ: C'' → L")
    _require((k @ f).equals(eps @ h), "k∘f = ε∘h")
    _require((ell @ pi).equals(g @ k), "ℓ∘π = g∘k")


def homotopy_transfer(diagram: dict, direction: str, given: ModuleMap) -> ModuleMap:
    """Transfer a solution across the diagram.

    ``direction="q_to_p"``: from ``q: C'' -> M`` with ``g∘q = ℓ`` build ``p: C' -> N`` with ``p∘f = h``.
    ``direction="p_to_q"``: the converse.
    """
    check_transfer_diagram(diagram)
    f, pi, eps, g = diagram["f"], diagram["pi"], diagram["eps"], diagram["g"]
    h, k, ell = diagram["h"], diagram["k"], diagram["ell"]
    if direction == "q_to_p":
        _require((g @ given).equals(ell), "g∘q = ℓ")
        p = solve_hom_equation(f.target, eps.source, k - given @ pi, left=eps)
        if p is None:
            raise ArithmeticError("k - q∘π does not factor through ε")
        assert (p @ f).equals(h)
        return p
    if direction == "p_to_q":
        _require((given @ f).equals(h), "p∘f = h")
        q = solve_hom_equation(pi.target, g.source, k - eps @ given, right=pi)
        if q is None:
            raise ArithmeticError("k - ε∘p does not factor through π")
        assert (g @ q).equals(ell)
        return q
    raise ValueError(f"unknown direction {direction!r}")


# -- purity ------------------------------------------------------------------


@dataclass(frozen=True)
class PurityVerdict:
    verdict: str  # "Pure" | "NotPure"
    retraction: Optional[ModuleMap] = None
    r: object = None
    witness: Optional[tuple] = None

    @property
    def pure(self) -> bool:
        return self.verdict == "Pure"


def is_pure_submodule(inclusion: ModuleMap) -> PurityVerdict:
    """Pure with an explicit retraction, or a witness ``x ∈ (rM ∩ N) \\ rN``."""
    if not inclusion.is_injective():
        raise DiagramError("inclusion is not injective")
    N, M = inclusion.source, inclusion.target
    p = solve_hom_equation(M, N, ModuleMap.identity(N), right=inclusion)
    if p is not None:
        return PurityVerdict("Pure", retraction=p)
    ring = M.ring
    quotient = FPModule(ring, M.generators, block([[M.relations, inclusion.matrix]], [M.generators], [M.relations.cols, N.generators], ring))
    factors = quotient.invariant_factors
    image = inclusion.image()
    whole = Submodule.whole(M)
    for r in ring.divisors(factors[-1]) if factors else []:
        if ring.is_unit(r):
            continue
        x = whole.scaled(r).intersection(image).first_not_in(image.scaled(r))
        if x is not None:
            return PurityVerdict("NotPure", r=r, witness=canonical_vector(ring, x))
    raise ArithmeticError("no retraction and no purity witness; inconsistent input")


@dataclass(frozen=True)
class IntersectionVerdict:
    verdict: str  # "Equal" | "Unequal"
    witness: Optional[ModuleMap] = None
    composite: Optional[ModuleMap] = None


def pure_intersection_check(f: ModuleMap, M: FPModule, N: Submodule) -> IntersectionVerdict:
    """Decide ``Hom(C', M)f ∩ Hom(C, N) = Hom(C', N)f`` inside Hom(C, M)."""
    if N.ambient != M:
        raise DiagramError("N is not a submodule of M")
    C, C2 = f.source, f.target
    Nmod, eps = N.as_module()
    HCM = hom_module(C, M)
    pre_M = apply_hom_contra(f, M)
    into = apply_hom_co(eps, C)
    through_N = into @ apply_hom_contra(f, Nmod)
    lhs_a = pre_M.image()
    lhs = lhs_a.intersection(into.image())
    rhs = through_N.image()
    x = lhs.first_not_in(rhs)
    if x is None:
        return IntersectionVerdict("Equal")
    c = lhs_a.coefficients(x)
    k = hom_module(C2, M).decode(c)
    return IntersectionVerdict("Unequal", witness=k, composite=HCM.decode(x))


# -- torsion and divisibility ------------------------------------------------


def torsion_submodule(G: FPModule) -> tuple[Submodule, object]:
    """Torsion submodule and an annihilator (``1`` when it is zero)."""
    from .linalg import snf

    ring = G.ring
    factors = G.invariant_factors
    if G.relations.cols == 0 or not factors:
        return Submodule.zero(G), ring.one
    dec = snf(G.relations)
    idx = [i for i in range(dec.rank) if not ring.is_unit(dec.D.data[i][i])]
    gens = dec.Uinv.submatrix(range(G.generators), idx)
    return Submodule(G, gens), factors[-1]


def _check_probes(G: FPModule, S: Sequence) -> None:
    if not S:
        raise ValueError("probe set must be nonempty")
    if any(not r for r in S):
        raise ValueError("probe set must contain nonzero elements")
    if G.ring.is_field():
        raise ValueError("divisible part is only meaningful over a ring that is not a field")


def sampled_intersection(G: FPModule, S: Sequence) -> Submodule:
    """``∩_{r ∈ S} rG``."""
    _check_probes(G, S)
    whole = Submodule.whole(G)
    out = whole.scaled(S[0]).pruned()
    for r in S[1:]:
        out = out.intersection(whole.scaled(r))
    return out


def divisible_part(G: FPModule, S: Sequence) -> tuple[Submodule, Submodule]:
    """``(structural, sampled)``: the intersection over all nonzero ``r``, and over ``S`` only.

    Over a Euclidean domain that is not a field a finitely generated module has
    no nonzero element divisible by every nonzero scalar: a free coordinate
    is not divisible by a non-unit larger than it, and torsion dies under
    multiplication by the annihilator.  So the structural answer is zero.
    """
    _check_probes(G, S)
    return Submodule.zero(G), sampled_intersection(G, S)


@dataclass(frozen=True)
class MuVerdict:
    verdict: str  # "Injective" | "Kernel"
    kernel: Submodule
    element: Optional[tuple] = None

    @property
    def injective(self) -> bool:
        return self.verdict == "Injective"


def finite_mu_check(S: Sequence, G: FPModule) -> MuVerdict:
    """Injectivity of ``G -> ∏_{r ∈ S} G/rG``; its kernel is ``∩ rG``."""
    K = sampled_intersection(G, S).pruned()
    if K.gens.cols == 0:
        return MuVerdict("Injective", K)
    return MuVerdict("Kernel", K, canonical_vector(G.ring, K.gens.col(0)))
