"""DG Lie algebras, DG Lie maps, validation and degreewise homology."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .errors import DegreeError, ValidationError
from .graded_lie import (FiniteLie, FreeLieAlgebra, GeneratorSet, LieElement, ONE,
                         sign, tree_leaves)
from .scalar_linear import EchelonForm, Quotient, SparseMatrix


def _adopt(algebra, value, what: str) -> LieElement:
    """Re-home ``value`` (a LieElement over an equal generator set, or 0) in ``algebra``."""
    if isinstance(value, LieElement):
        if value.algebra is algebra:
            return value
        if getattr(value.algebra, "generators", None) == algebra.generators:
            return LieElement(algebra, value.terms)
        raise ValidationError(f"{what}: value lives in a different algebra")
    if value == 0 or value is None:
        return algebra.zero()
    raise ValidationError(f"{what}: expected a Lie element, got {value!r}")


class FreeDgl(FreeLieAlgebra):
    """A free DG Lie algebra: generators plus the differential on generators.

    ``valid_through`` marks a truncated model.  When it is set, the algebra
    agrees with the intended one only in degrees up to that bound, and any
    computation that reaches past it raises CapTooLow.
    """

    def __init__(self, generators, differential: Mapping | None = None, name: str = "L",
                 valid_through: int | None = None):
        super().__init__(generators, name=name)
        self.valid_through = valid_through
        self._dgen: dict = {}
        self._dtree: dict = {}
        for gname, value in (differential or {}).items():
            i = self.generators.index(gname)
            if callable(value):
                value = value(self)
            self._dgen[i] = _adopt(self, value, f"d {gname}")

    def d_generator(self, i: int) -> LieElement:
        v = self._dgen.get(i)
        return self.zero() if v is None else v

    def differential_values(self) -> dict:
        return {self.generators.names[i]: self.d_generator(i) for i in range(len(self.generators))}

    def _d_tree(self, tree) -> LieElement:
        v = self._dtree.get(tree)
        if v is not None:
            return v
        if isinstance(tree, int):
            v = self.d_generator(tree)
        else:
            left, right = tree
            x = LieElement(self, {left: ONE})
            y = LieElement(self, {right: ONE})
            v = self.bracket(self._d_tree(left), y) + \
                sign(self.tree_degree(left)) * self.bracket(x, self._d_tree(right))
        self._dtree[tree] = v
        return v

    def differential(self, x: LieElement) -> LieElement:
        out: dict = {}
        for tree, c in x.terms.items():
            for t, k in self._d_tree(tree).terms.items():
                s = out.get(t, 0) + c * k
                if s:
                    out[t] = s
                else:
                    del out[t]
        return LieElement(self, out)

    def has_zero_differential(self) -> bool:
        return all(v.is_zero() for v in self._dgen.values())


def apply_differential(L, x: LieElement) -> LieElement:
    return L.differential(x)


def validate(L: FreeDgl) -> list:
    """Structural problems of a free DGL as human-readable strings (empty when fine)."""
    problems = []
    names = L.generators.names
    for i, deg in enumerate(L.generators.degrees):
        dv = L.d_generator(i)
        if dv.is_zero():
            continue
        parts = dv.homogeneous_parts()
        nonzero = [d for d, p in parts.items() if not p.is_zero()]
        if any(d != deg - 1 for d in nonzero):
            problems.append(f"d {names[i]}: degree {sorted(nonzero)} but expected {deg - 1}")
            continue
        ddv = L.differential(dv)
        if not ddv.is_zero():
            problems.append(f"d∘d is nonzero on generator {names[i]}: d(d {names[i]}) = {L.normal_form(ddv)}")
    return problems


def is_minimal(L: FreeDgl) -> bool:
    """True when no differential on a generator has a linear (length one) part."""
    for i in range(len(L.generators)):
        if any(len(w) == 1 for w in L.tensor_dict(L.d_generator(i))):
            return False
    return True


def quadratic_coefficients(L: FreeDgl, v) -> dict:
    """The coefficients c_ij (i <= j) of the length-two part of ``d(v)``.

    The length-two word ``(i, j)`` with ``i < j`` comes only from ``[v_i, v_j]``
    with coefficient one; ``(i, i)`` comes from ``[v_i, v_i]`` with
    coefficient two (zero for even ``v_i``).
    """
    k = v if isinstance(v, int) else L.generators.index(v)
    words = L.tensor_dict(L.d_generator(k))
    out = {}
    for w, c in words.items():
        if len(w) != 2:
            continue
        i, j = w
        if i < j:
            out[(i, j)] = Fraction(c)
        elif i == j:
            out[(i, i)] = Fraction(c) / 2
    return dict(sorted(out.items()))


# ----------------------------------------------------------------------------
# homology of a coefficient algebra


def differential_columns(A, n: int) -> list:
    """Coordinates in degree ``n - 1`` of ``d`` applied to each basis element of degree ``n``."""
    cache = A.__dict__.setdefault("_dcols_cache", {})
    cols = cache.get(n)
    if cols is None:
        cols = [A.coordinates(A.differential(b), n - 1) if n > 1 else {} for b in A.basis(n)]
        cache[n] = cols
    return cols


class HomologyData:
    """Cycles, boundaries and homology coordinates of one degree of a complex.

    ``outgoing`` are the images of the degree-n basis (coordinates in degree
    n-1, of dimension ``dim_below``); ``incoming`` the images of degree n+1.
    """

    def __init__(self, n: int, dim_below: int, outgoing: list, incoming: list, pivot=None):
        self.degree = n
        self.cycles = EchelonForm(SparseMatrix.from_columns(outgoing, dim_below), pivot=pivot).kernel()
        self.quotient = Quotient(self.cycles, incoming, pivot=pivot)
        self.dimension = self.quotient.dimension
        self.representatives = self.quotient.representatives

    def coordinates(self, z) -> list:
        return self.quotient.coordinates(z)


def homology_data(A, n: int, *, pivot: str | None = None) -> HomologyData:
    """Homology data in degree ``n``; an explicit ``pivot`` rule bypasses the cache."""
    if n < 1:
        raise DegreeError("homology degree must be >= 1")
    A.check_cap(n + 1)
    cache = A.__dict__.setdefault("_homology_cache", {})
    data = cache.get(n) if pivot is None else None
    if data is None:
        below = A.dim(n - 1) if n > 1 else 0
        data = HomologyData(n, below, differential_columns(A, n), differential_columns(A, n + 1), pivot=pivot)
        if pivot is None:
            cache[n] = data
    return data


def homology(A, n: int, *, pivot: str | None = None):
    """``(dimension, representative cycles)`` of ``H_n`` of a free or finite DGL."""
    data = homology_data(A, n, pivot=pivot)
    return data.dimension, [A.element(v, n) for v in data.representatives]


def homology_coordinates(A, x: LieElement, n: int) -> list:
    return homology_data(A, n).quotient.coordinates(A.coordinates(x, n))


# ----------------------------------------------------------------------------
# maps


class DglMap:
    """A DG Lie algebra map out of a free DGL, given on generators."""

    def __init__(self, source: FreeDgl, target, values: Mapping | None = None, name: str = "f"):
        if not isinstance(source, FreeLieAlgebra):
            raise ValidationError("the source of a DG Lie map must be free")
        self.source, self.target, self.name = source, target, name
        self._gen: dict = {}
        for gname, value in (values or {}).items():
            i = source.generators.index(gname)
            if callable(value):
                value = value(target)
            self._gen[i] = _adopt(target, value, f"{name} {gname}")
        self._tree_cache: dict = {}

    def on_generator(self, i: int) -> LieElement:
        v = self._gen.get(i)
        return self.target.zero() if v is None else v

    def values(self) -> dict:
        return {self.source.generators.names[i]: self.on_generator(i) for i in range(len(self.source.generators))}

    def _tree(self, tree) -> LieElement:
        v = self._tree_cache.get(tree)
        if v is None:
            if isinstance(tree, int):
                v = self.on_generator(tree)
            else:
                v = self.target.bracket(self._tree(tree[0]), self._tree(tree[1]))
            self._tree_cache[tree] = v
        return v

    def __call__(self, x: LieElement) -> LieElement:
        if x.algebra is not self.source:
            raise ValidationError("map applied to an element outside its source")
        return self.target.combination((c, self._tree(t)) for t, c in x.terms.items())

    def compose(self, phi: "DglMap", name: str | None = None) -> "DglMap":
        """The map ``phi ∘ self``."""
        if phi.source is not self.target:
            raise ValidationError("maps do not compose")
        return DglMap(self.source, phi.target,
                      {n: phi(self.on_generator(i)) for i, n in enumerate(self.source.generators.names)},
                      name=name or f"{phi.name}∘{self.name}")


def validate_map(psi: DglMap) -> list:
    problems = []
    S, T = psi.source, psi.target
    for i, (gname, deg) in enumerate(S.generators):
        value = psi.on_generator(i)
        if not value.is_zero():
            ds = {d for d, p in value.homogeneous_parts().items() if not p.is_zero()}
            if ds != {deg}:
                problems.append(f"{psi.name} {gname}: degree {sorted(ds)} but expected {deg}")
                continue
        lhs = psi(S.differential(S.gen(i)))
        rhs = T.differential(value)
        if not (lhs - rhs).is_zero():
            problems.append(f"{psi.name} does not commute with d on generator {gname}")
    return problems


def identity_map(L: FreeDgl) -> DglMap:
    return DglMap(L, L, {n: L.gen(n) for n in L.generators.names}, name="id")


def zero_map(L: FreeDgl, K) -> DglMap:
    return DglMap(L, K, {}, name="0")


# ----------------------------------------------------------------------------
# filtrations


class GeneratorFiltration:
    """Stages ``V(1) ⊂ V(2) ⊂ …`` with d(V(i)) inside the algebra on V(i-1)."""

    def __init__(self, L: FreeDgl, stages: Mapping):
        self.algebra = L
        self.stage = {}
        for gname, s in stages.items():
            if int(s) < 1:
                raise ValidationError(f"filtration stage of {gname} must be >= 1")
            self.stage[L.generators.index(gname)] = int(s)
        missing = [L.generators.names[i] for i in range(len(L.generators)) if i not in self.stage]
        if missing:
            raise ValidationError(f"filtration does not place {', '.join(missing)}")
        problems = self.violations()
        if problems:
            raise ValidationError("invalid filtration", violations=problems)

    @property
    def length(self) -> int:
        return max(self.stage.values(), default=0)

    def violations(self) -> list:
        L = self.algebra
        problems = []
        for i, s in self.stage.items():
            dv = L.normal_form(L.d_generator(i))
            for tree in dv.terms:
                if any(self.stage[j] >= s for j in tree_leaves(tree)):
                    problems.append(f"d {L.generators.names[i]} leaves stage {s - 1}")
                    break
        return problems

    def generators_below(self, r: int) -> list:
        return sorted(i for i, s in self.stage.items() if s <= r)


__all__ = [
    "FreeDgl", "FiniteLie", "GeneratorSet", "DglMap", "GeneratorFiltration",
    "apply_differential", "validate", "is_minimal", "quadratic_coefficients", "homology",
    "homology_data", "homology_coordinates", "validate_map", "identity_map", "zero_map",
]
