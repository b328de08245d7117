"""Finitely presented modules, homomorphisms between them and submodules.

A module with ``n`` generators is ``R^n / im(relations)``; elements are
coordinate tuples of length ``n``.  A homomorphism is a matrix acting on
those coordinates, checked once at construction to respect relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .errors import DimensionError, NotWellDefinedError, RingMismatchError
from .linalg import (
    Mat,
    block_diag,
    cokernel_invariants,
    hstack,
    kernel_basis,
    kron,
    snf,
    solve_linear,
    solve_matrix,
)
from .rings import INTEGERS, EuclideanRing


@dataclass(frozen=True)
class FPModule:
    """``R^generators`` modulo the column span of ``relations``."""

    ring: EuclideanRing
    generators: int
    relations: Mat

    def __post_init__(self):
        if self.relations.rows != self.generators:
            raise DimensionError(f"relation matrix has {self.relations.rows} rows for {self.generators} generators")
        if self.relations.ring != self.ring:
            raise RingMismatchError("relation matrix over a different ring")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_relations(cls, relations: Mat) -> "FPModule":
        return cls(relations.ring, relations.rows, relations)

    @classmethod
    def free(cls, rank: int, ring: EuclideanRing = INTEGERS) -> "FPModule":
        return cls(ring, rank, Mat.zeros(ring, rank, 0))

    @classmethod
    def zero(cls, ring: EuclideanRing = INTEGERS) -> "FPModule":
        return cls.free(0, ring)

    @classmethod
    def cyclic(cls, a, ring: EuclideanRing = INTEGERS) -> "FPModule":
        """``R / aR``."""
        return cls(ring, 1, Mat(ring, 1, 1, [[a]]))

    @classmethod
    def from_invariants(cls, free_rank: int, factors: Sequence, ring: EuclideanRing = INTEGERS) -> "FPModule":
        n = len(factors) + free_rank
        rel = Mat.diag(ring, list(factors), rows=n, cols=len(factors))
        return cls(ring, n, rel)

    # -- structure ---------------------------------------------------------

    @cached_property
    def normal_form(self) -> tuple[int, tuple]:
        """``(free_rank, invariant_factors)``; two modules are isomorphic iff these agree."""
        factors, free_rank = cokernel_invariants(self.relations)
        return free_rank, factors

    @property
    def free_rank(self) -> int:
        return self.normal_form[0]

    @property
    def invariant_factors(self) -> tuple:
        return self.normal_form[1]

    def is_zero_module(self) -> bool:
        return self.normal_form == (0, ())

    def is_finite(self) -> bool:
        """Torsion (hence finite, over the supported rings)."""
        return self.free_rank == 0

    def is_isomorphic(self, other: "FPModule") -> bool:
        return self.ring == other.ring and self.normal_form == other.normal_form

    def describe(self) -> str:
        return render_normal_form(self.ring, *self.normal_form)

    def __repr__(self) -> str:
        return f"FPModule({self.describe()}, generators={self.generators})"

    # -- elements ----------------------------------------------------------

    def is_zero_element(self, x: Sequence) -> bool:
        if len(x) != self.generators:
            raise DimensionError(f"element of length {len(x)} in a module with {self.generators} generators")
        if not any(x):
            return True
        if self.relations.cols == 0:
            return False
        return solve_linear(self.relations, tuple(x)) is not None

    def elements_equal(self, x: Sequence, y: Sequence) -> bool:
        return self.is_zero_element(tuple(a - b for a, b in zip(x, y)))

    def basis_vector(self, i: int) -> tuple:
        z, o = self.ring.zero, self.ring.one
        return tuple(o if j == i else z for j in range(self.generators))

    def zero_vector(self) -> tuple:
        return (self.ring.zero,) * self.generators

    # -- simplification ----------------------------------------------------

    @cached_property
    def _simplified(self):
        dec = snf(self.relations)
        ring = self.ring
        keep = [i for i in range(self.generators) if i >= dec.rank or not ring.is_unit(dec.D.data[i][i])]
        torsion = [i for i in keep if i < dec.rank]
        rel_cols = []
        for t in torsion:
            col = [ring.zero] * len(keep)
            col[keep.index(t)] = dec.D.data[t][t]
            rel_cols.append(col)
        simple = FPModule(ring, len(keep), Mat.from_cols(rel_cols, ring, rows=len(keep)))
        to_simple = ModuleMap(self, simple, dec.U.submatrix(keep, range(self.generators)), check=False)
        from_simple = ModuleMap(simple, self, dec.Uinv.submatrix(range(self.generators), keep), check=False)
        return simple, to_simple, from_simple

    def simplify(self) -> tuple["FPModule", "ModuleMap", "ModuleMap"]:
        """Isomorphic diagonal presentation with mutually inverse isomorphisms ``(S, self->S, S->self)``."""
        return self._simplified


def render_normal_form(ring: EuclideanRing, free_rank: int, factors: Sequence) -> str:
    sym = ring.symbol
    parts = []
    if free_rank:
        parts.append(sym if free_rank == 1 else f"{sym}^{free_rank}")
    for d in factors:
        txt = ring.format(d)
        parts.append(f"{sym}/{txt}" if txt.isdigit() else f"{sym}/({txt})")
    return " ⊕ ".join(parts) if parts else "0"


def direct_sum(*modules: FPModule, ring: Optional[EuclideanRing] = None) -> FPModule:
    if not modules:
        return FPModule.zero(ring or INTEGERS)
    ring = modules[0].ring
    for m in modules:
        if m.ring != ring:
            raise RingMismatchError("direct sum across rings")
    rel = block_diag(*[m.relations for m in modules], ring=ring)
    return FPModule(ring, rel.rows, rel)


def module_power(M: FPModule, copies: int) -> FPModule:
    """``M^copies``; generators ordered copy-major."""
    rel = kron(Mat.identity(M.ring, copies), M.relations)
    return FPModule(M.ring, M.generators * copies, rel)


@dataclass(frozen=True, eq=False)
class ModuleMap:
    """Homomorphism ``source -> target`` given by a ``target.generators x source.generators`` matrix."""

    source: FPModule
    target: FPModule
    matrix: Mat
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.source.ring != self.target.ring or self.matrix.ring != self.source.ring:
            raise RingMismatchError("map between modules over different rings")
        if self.matrix.shape != (self.target.generators, self.source.generators):
            raise DimensionError(
                f"map matrix has shape {self.matrix.shape}, expected {(self.target.generators, self.source.generators)}"
            )
        if self.check:
            bad = self.first_relation_violation()
            if bad is not None:
                raise NotWellDefinedError(f"relation column {bad} of the source is not sent into the target relations")

    def first_relation_violation(self) -> Optional[int]:
        images = self.matrix @ self.source.relations
        for j in range(images.cols):
            if not self.target.is_zero_element(images.col(j)):
                return j
        return None

    @property
    def ring(self) -> EuclideanRing:
        return self.source.ring

    @classmethod
    def identity(cls, M: FPModule) -> "ModuleMap":
        return cls(M, M, Mat.identity(M.ring, M.generators), check=False)

    @classmethod
    def zero(cls, source: FPModule, target: FPModule) -> "ModuleMap":
        return cls(source, target, Mat.zeros(source.ring, target.generators, source.generators), check=False)

    @classmethod
    def scalar(cls, M: FPModule, r) -> "ModuleMap":
        return cls(M, M, Mat.identity(M.ring, M.generators).scale(r), check=False)

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        """Composition ``self ∘ other``."""
        if other.target != self.source:
            raise DimensionError("maps are not composable")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        self._same_ends(other)
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        self._same_ends(other)
        return ModuleMap(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, -self.matrix, check=False)

    def _same_ends(self, other: "ModuleMap") -> None:
        if self.source != other.source or self.target != other.target:
            raise DimensionError("maps have different source or target")

    def apply(self, x: Sequence) -> tuple:
        return self.matrix.apply(x)

    def equals(self, other: "ModuleMap") -> bool:
        self._same_ends(other)
        return (self - other).is_zero()

    def is_zero(self) -> bool:
        return all(self.target.is_zero_element(self.matrix.col(j)) for j in range(self.matrix.cols))

    def kernel(self) -> "Submodule":
        n = self.source.generators
        K = kernel_basis(hstack(self.matrix, self.target.relations, rows=self.target.generators))
        return Submodule(self.source, K.row_slice(0, n)).pruned()

    def image(self) -> "Submodule":
        return Submodule(self.target, self.matrix)

    def is_injective(self) -> bool:
        return self.kernel().is_zero()

    def is_surjective(self) -> bool:
        im = self.image()
        return all(im.contains(self.target.basis_vector(i)) for i in range(self.target.generators))

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


@dataclass(frozen=True, eq=False)
class Submodule:
    """Submodule of ``ambient`` generated by the columns of ``gens``."""

    ambient: FPModule
    gens: Mat

    def __post_init__(self):
        if self.gens.rows != self.ambient.generators:
            raise DimensionError("generator columns do not match the ambient module")

    @classmethod
    def whole(cls, M: FPModule) -> "Submodule":
        return cls(M, Mat.identity(M.ring, M.generators))

    @classmethod
    def zero(cls, M: FPModule) -> "Submodule":
        return cls(M, Mat.zeros(M.ring, M.generators, 0))

    @classmethod
    def of(cls, M: FPModule, vectors: Sequence[Sequence]) -> "Submodule":
        return cls(M, Mat.from_cols([tuple(v) for v in vectors], M.ring, rows=M.generators))

    @property
    def ring(self) -> EuclideanRing:
        return self.ambient.ring

    def _span(self) -> Mat:
        return hstack(self.gens, self.ambient.relations, rows=self.ambient.generators)

    def contains(self, x: Sequence) -> bool:
        if len(x) != self.ambient.generators:
            raise DimensionError("element does not live in the ambient module")
        if not any(x):
            return True
        span = self._span()
        if span.cols == 0:
            return False
        return solve_linear(span, tuple(x)) is not None

    def coefficients(self, x: Sequence) -> Optional[tuple]:
        """Coefficients ``c`` with ``gens @ c == x`` modulo relations, or ``None``."""
        span = self._span()
        if span.cols == 0:
            return () if not any(x) else None
        sol = solve_linear(span, tuple(x))
        return None if sol is None else sol[: self.gens.cols]

    def first_not_in(self, other: "Submodule") -> Optional[tuple]:
        """A generator of ``self`` outside ``other`` (a strictness certificate), or ``None``."""
        self._same_ambient(other)
        for j in range(self.gens.cols):
            v = self.gens.col(j)
            if not other.contains(v):
                return v
        return None

    def __le__(self, other: "Submodule") -> bool:
        return self.first_not_in(other) is None

    def equals(self, other: "Submodule") -> bool:
        return self <= other and other <= self

    def is_zero(self) -> bool:
        return all(self.ambient.is_zero_element(self.gens.col(j)) for j in range(self.gens.cols))

    def _same_ambient(self, other: "Submodule") -> None:
        if self.ambient != other.ambient:
            raise DimensionError("submodules of different ambient modules")

    def pruned(self) -> "Submodule":
        keep = [j for j in range(self.gens.cols) if not self.ambient.is_zero_element(self.gens.col(j))]
        return Submodule(self.ambient, self.gens.submatrix(range(self.gens.rows), keep))

    def scaled(self, r) -> "Submodule":
        return Submodule(self.ambient, self.gens.scale(r))

    def __add__(self, other: "Submodule") -> "Submodule":
        self._same_ambient(other)
        return Submodule(self.ambient, hstack(self.gens, other.gens, rows=self.ambient.generators))

    def intersection(self, other: "Submodule") -> "Submodule":
        self._same_ambient(other)
        n = self.ambient.generators
        s = self.gens.cols
        system = hstack(self.gens, -other.gens, self.ambient.relations, rows=n)
        if system.cols == 0:
            return Submodule.zero(self.ambient)
        K = kernel_basis(system)
        return Submodule(self.ambient, self.gens @ K.row_slice(0, s)).pruned()

    def as_module(self) -> tuple[FPModule, ModuleMap]:
        """``(N, inclusion)`` with ``N`` a presentation of this submodule."""
        s = self.gens.cols
        span = self._span()
        if span.cols == 0:
            N = FPModule.zero(self.ring)
            return N, ModuleMap(N, self.ambient, Mat.zeros(self.ring, self.ambient.generators, 0), check=False)
        K = kernel_basis(span)
        N = FPModule(self.ring, s, K.row_slice(0, s))
        return N, ModuleMap(N, self.ambient, self.gens, check=False)

    def image_under(self, f: ModuleMap) -> "Submodule":
        if f.source != self.ambient:
            raise DimensionError("map does not start at the ambient module")
        return Submodule(f.target, f.matrix @ self.gens)

    def __repr__(self) -> str:
        return f"Submodule(<{self.gens.cols} generators> of {self.ambient.describe()})"
