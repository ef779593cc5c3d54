"""Free graded Lie algebras over Q, bracket trees and the tensor normal form.

A bracket tree is either an ``int`` (the index of a generator, a leaf) or a
pair ``(left, right)`` of trees.  A :class:`LieElement` is a finite Q-linear
combination of trees attached to the algebra it lives in.

Equality in a free Lie algebra is decided by the embedding into the tensor
algebra, ``[a, b] -> a⊗b - (-1)^{|a||b|} b⊗a``.  Tensor words are tuples of
generator indices and compare lexicographically.

Finite-type Lie algebras given by structure constants (for instance a
homology Lie algebra with zero differential) use the same element class; their
trees are always leaves naming basis vectors.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from typing import Iterable, Mapping, Sequence

from .errors import AlgebraMismatch, DegreeError, ValidationError
from .scalar_linear import IncrementalSpan, axpy

ZERO = Fraction(0)
ONE = Fraction(1)


def sign(exponent: int) -> int:
    return -1 if exponent & 1 else 1


@lru_cache(maxsize=None)
def tree_key(tree):
    """Total order on trees used to orient brackets canonically."""
    if isinstance(tree, int):
        return (0, tree)
    return (1, tree_key(tree[0]), tree_key(tree[1]))


def tree_length(tree) -> int:
    if isinstance(tree, int):
        return 1
    return tree_length(tree[0]) + tree_length(tree[1])


def tree_leaves(tree) -> list:
    if isinstance(tree, int):
        return [tree]
    return tree_leaves(tree[0]) + tree_leaves(tree[1])


class GeneratorSet:
    """Ordered named generators with positive degrees."""

    __slots__ = ("names", "degrees", "_index")

    def __init__(self, pairs: Iterable):
        names, degrees = [], []
        for name, degree in pairs:
            if not isinstance(degree, int) or degree < 1:
                raise DegreeError(f"generator {name!r} has degree {degree!r}; degrees must be >= 1")
            names.append(str(name))
            degrees.append(degree)
        if len(set(names)) != len(names):
            raise ValidationError("generator names must be unique")
        self.names = tuple(names)
        self.degrees = tuple(degrees)
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(zip(self.names, self.degrees))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValidationError(f"unknown generator {name!r}") from None

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, GeneratorSet) and self.names == other.names and self.degrees == other.degrees

    def __hash__(self):
        return hash((self.names, self.degrees))

    def __repr__(self):
        return "GeneratorSet(" + ", ".join(f"{n}:{d}" for n, d in self) + ")"


class TensorCoordinates:
    """Coordinates of a homogeneous element in the tensor algebra."""

    __slots__ = ("degree", "coordinates")

    def __init__(self, degree: int, coordinates: Mapping):
        self.degree = degree
        self.coordinates = {w: Fraction(c) for w, c in sorted(coordinates.items()) if c}

    def __eq__(self, other):
        return isinstance(other, TensorCoordinates) and (
            self.coordinates == other.coordinates and (self.degree == other.degree or not self.coordinates))

    def __bool__(self):
        return bool(self.coordinates)

    def __repr__(self):
        return f"TensorCoordinates({self.degree}, {self.coordinates})"


class LieElement:
    """An immutable Q-linear combination of bracket trees in a fixed algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms: Mapping | None = None):
        self.algebra = algebra
        self.terms = {t: c for t, c in (terms or {}).items() if c}

    # arithmetic ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, LieElement):
            return NotImplemented
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("elements belong to different algebras")
        return None

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        bad = self._check(other)
        if bad is NotImplemented:
            return bad
        out = dict(self.terms)
        axpy(out, 1, other.terms)
        return LieElement(self.algebra, out)

    __radd__ = __add__

    def __sub__(self, other):
        bad = self._check(other)
        if bad is NotImplemented:
            return bad
        out = dict(self.terms)
        axpy(out, -1, other.terms)
        return LieElement(self.algebra, out)

    def __neg__(self):
        return LieElement(self.algebra, {t: -c for t, c in self.terms.items()})

    def __mul__(self, scalar):
        if isinstance(scalar, LieElement):
            return NotImplemented
        scalar = Fraction(scalar)
        if not scalar:
            return LieElement(self.algebra)
        return LieElement(self.algebra, {t: c * scalar for t, c in self.terms.items()})

    __rmul__ = __mul__

    def bracket(self, other):
        return self.algebra.bracket(self, other)

    # structure ----------------------------------------------------------
    def degrees(self) -> set:
        return {self.algebra.tree_degree(t) for t in self.terms}

    @property
    def degree(self) -> int:
        """Degree of a homogeneous nonzero element (raises DegreeError otherwise)."""
        ds = self.degrees()
        if len(ds) != 1:
            raise DegreeError("element is zero or inhomogeneous" if not ds else
                              f"inhomogeneous element with degrees {sorted(ds)}")
        return next(iter(ds))

    def homogeneous_parts(self) -> dict:
        parts: dict = {}
        for t, c in self.terms.items():
            parts.setdefault(self.algebra.tree_degree(t), {})[t] = c
        return {d: LieElement(self.algebra, p) for d, p in sorted(parts.items())}

    def is_zero(self) -> bool:
        return self.algebra.is_zero(self)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, LieElement):
            return NotImplemented
        if other.algebra is not self.algebra:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return self.algebra.format(self)


# ----------------------------------------------------------------------------
# the algebra protocol shared by free and finite-type algebras


class _AlgebraBase:
    """Methods common to every coefficient algebra."""

    valid_through = None

    def zero(self) -> LieElement:
        return LieElement(self)

    def combination(self, pairs: Iterable) -> LieElement:
        out: dict = {}
        for c, x in pairs:
            axpy(out, c, x.terms)
        return LieElement(self, out)

    def check_cap(self, n: int) -> None:
        """Raise CapTooLow when degree ``n`` lies beyond a truncated model."""
        from .errors import CapTooLow
        if self.valid_through is not None and n > self.valid_through:
            raise CapTooLow(f"{self.name}: degree {n} needed but the model is only "
                            f"valid through degree {self.valid_through}",
                            needed=n, cap=self.valid_through)

    def element(self, vector: Mapping, n: int) -> LieElement:
        basis = self.basis_trees(n)
        return LieElement(self, {basis[i]: c for i, c in vector.items() if c})

    def basis(self, n: int) -> list:
        return [LieElement(self, {t: ONE}) for t in self.basis_trees(n)]

    def dim(self, n: int) -> int:
        return len(self.basis_trees(n))

    def is_nilpotent_bounded(self) -> bool:
        return self.top_degree() is not None


class FreeLieAlgebra(_AlgebraBase):
    """The free graded Lie algebra on a :class:`GeneratorSet`."""

    def __init__(self, generators, name: str = "L"):
        if not isinstance(generators, GeneratorSet):
            generators = GeneratorSet(generators)
        self.generators = generators
        self.name = name
        self._deg_cache: dict = {}
        self._tensor_cache: dict = {}
        self._basis: dict = {}

    # generators ---------------------------------------------------------
    def gen(self, name_or_index) -> LieElement:
        i = name_or_index if isinstance(name_or_index, int) else self.generators.index(name_or_index)
        return LieElement(self, {i: ONE})

    def gens(self) -> list:
        return [LieElement(self, {i: ONE}) for i in range(len(self.generators))]

    def tree_degree(self, tree) -> int:
        if isinstance(tree, int):
            return self.generators.degrees[tree]
        d = self._deg_cache.get(tree)
        if d is None:
            d = self.tree_degree(tree[0]) + self.tree_degree(tree[1])
            self._deg_cache[tree] = d
        return d

    # brackets -----------------------------------------------------------
    def bracket_trees(self, left, right):
        """Canonically oriented ``[left, right]`` as ``(coefficient, tree)``.

        Returns ``(0, None)`` when graded antisymmetry forces zero.
        """
        dl, dr = self.tree_degree(left), self.tree_degree(right)
        if left == right:
            return (0, None) if dl % 2 == 0 else (1, (left, right))
        if tree_key(left) > tree_key(right):
            return -sign(dl * dr), (right, left)
        return 1, (left, right)

    def bracket(self, x: LieElement, y: LieElement) -> LieElement:
        if x.algebra is not self or y.algebra is not self:
            raise AlgebraMismatch("bracket of elements from different algebras")
        out: dict = {}
        for tl, cl in x.terms.items():
            for tr, cr in y.terms.items():
                s, t = self.bracket_trees(tl, tr)
                if s:
                    v = out.get(t, 0) + s * cl * cr
                    if v:
                        out[t] = v
                    else:
                        del out[t]
        return LieElement(self, out)

    # tensor normal form -------------------------------------------------
    def tree_tensor(self, tree) -> dict:
        """Integer tensor coordinates of a single tree (cached)."""
        t = self._tensor_cache.get(tree)
        if t is not None:
            return t
        if isinstance(tree, int):
            t = {(tree,): 1}
        else:
            a, b = self.tree_tensor(tree[0]), self.tree_tensor(tree[1])
            s = sign(self.tree_degree(tree[0]) * self.tree_degree(tree[1]))
            t = {}
            for u, cu in a.items():
                for w, cw in b.items():
                    k = u + w
                    t[k] = t.get(k, 0) + cu * cw
            for w, cw in b.items():
                for u, cu in a.items():
                    k = w + u
                    t[k] = t.get(k, 0) - s * cu * cw
            t = {k: c for k, c in t.items() if c}
        self._tensor_cache[tree] = t
        return t

    def tensor_dict(self, x: LieElement) -> dict:
        out: dict = {}
        for tree, c in x.terms.items():
            for w, k in self.tree_tensor(tree).items():
                v = out.get(w, 0) + c * k
                if v:
                    out[w] = v
                else:
                    del out[w]
        return out

    def to_tensor(self, x: LieElement) -> TensorCoordinates:
        if x.algebra is not self:
            raise AlgebraMismatch("element from another algebra")
        ds = x.degrees()
        if len(ds) > 1:
            raise DegreeError(f"to_tensor needs a homogeneous element, got degrees {sorted(ds)}")
        return TensorCoordinates(next(iter(ds)) if ds else 0, self.tensor_dict(x))

    def is_zero(self, x: LieElement) -> bool:
        if not x.terms:
            return True
        return all(not self.tensor_dict(p) for p in x.homogeneous_parts().values())

    # per-degree bases ---------------------------------------------------
    def _degree_data(self, n: int):
        data = self._basis.get(n)
        if data is not None:
            return data
        trees: list = []
        span = IncrementalSpan()
        if n >= 1:
            candidates = [i for i, d in enumerate(self.generators.degrees) if d == n]
            for g, dg in enumerate(self.generators.degrees):
                if dg < n:
                    candidates.extend((g, b) for b in self._degree_data(n - dg)[0])
            for tree in candidates:
                if span.add(self.tree_tensor(tree), tag=len(trees)):
                    trees.append(tree)
        data = (trees, span)
        self._basis[n] = data
        return data

    def basis_trees(self, n: int) -> list:
        """Deterministic trees whose tensor images form a basis of degree ``n``."""
        return list(self._degree_data(n)[0])

    def coordinates(self, x: LieElement, n: int | None = None) -> dict:
        """Coordinates of a homogeneous element in :meth:`basis_trees`."""
        if x.algebra is not self:
            raise AlgebraMismatch("element from another algebra")
        if not x.terms:
            return {}
        d = x.degree
        if n is not None and d != n:
            raise DegreeError(f"expected degree {n}, element has degree {d}")
        combo, rest = self._degree_data(d)[1].express(self.tensor_dict(x))
        if rest:
            raise DegreeError("element is not in the free Lie algebra (tensor image outside the span)")
        return {k: c for k, c in combo.items() if c}

    def normal_form(self, x: LieElement) -> LieElement:
        """Rewrite ``x`` on the degreewise bases (a canonical representative)."""
        out: dict = {}
        for d, part in x.homogeneous_parts().items():
            trees = self.basis_trees(d)
            for i, c in self.coordinates(part, d).items():
                out[trees[i]] = c
        return LieElement(self, out)

    def top_degree(self):
        """Largest nonzero degree, or None when the algebra is infinite."""
        degs = self.generators.degrees
        if not degs:
            return 0
        if len(degs) == 1:
            return degs[0] * (2 if degs[0] % 2 else 1)
        return None

    # printing -----------------------------------------------------------
    def format_tree(self, tree) -> str:
        if isinstance(tree, int):
            return self.generators.names[tree]
        return f"[{self.format_tree(tree[0])},{self.format_tree(tree[1])}]"

    def format(self, x: LieElement) -> str:
        return format_terms(x, self.format_tree)


def format_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_terms(x: LieElement, show) -> str:
    if not x.terms:
        return "0"
    items = sorted(x.terms.items(), key=lambda tc: (x.algebra.tree_degree(tc[0]), tree_key(tc[0])))
    parts = []
    for k, (tree, c) in enumerate(items):
        neg = c < 0
        mag = -c if neg else c
        body = show(tree) if mag == 1 else f"{format_scalar(mag)} {show(tree)}"
        if k == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def lie_basis(gens, n: int) -> list:
    """Bracket trees forming a basis of the degree-``n`` part of the free Lie algebra."""
    if n < 1:
        raise DegreeError("lie_basis needs n >= 1")
    return FreeLieAlgebra(gens).basis_trees(n)


def bracket(x: LieElement, y: LieElement) -> LieElement:
    if x.algebra is not y.algebra:
        raise AlgebraMismatch("bracket of elements from different algebras")
    return x.algebra.bracket(x, y)


def to_tensor(x: LieElement) -> TensorCoordinates:
    return x.algebra.to_tensor(x)


# ----------------------------------------------------------------------------
# finite-type Lie algebras


class FiniteLie(_AlgebraBase):
    """A finite-dimensional DG Lie algebra given by structure constants.

    ``basis`` is a list of ``(name, degree)``; ``brackets`` maps a pair of
    basis names to a ``{name: coefficient}`` dict (unlisted pairs bracket to
    zero, and the opposite order is filled in by antisymmetry); ``differential``
    maps a basis name to a ``{name: coefficient}`` dict.  Antisymmetry,
    Jacobi, Leibniz and d∘d = 0 are checked on construction.
    """

    def __init__(self, basis: Sequence, brackets: Mapping | None = None,
                 differential: Mapping | None = None, name: str = "H", check: bool = True):
        self.name = name
        self.generators = GeneratorSet(basis)
        degs = self.generators.degrees
        self._by_degree: dict = {}
        for i, d in enumerate(degs):
            self._by_degree.setdefault(d, []).append(i)
        self._position = {}
        for d, idx in self._by_degree.items():
            for k, i in enumerate(idx):
                self._position[i] = k
        self._br: dict = {}
        for (a, b), value in (brackets or {}).items():
            i, j = self.generators.index(a), self.generators.index(b)
            vec = self._vector(value, degs[i] + degs[j], f"[{a},{b}]")
            s = -sign(degs[i] * degs[j])
            if (i, j) in self._br or (j, i) in self._br:
                raise ValidationError(f"bracket [{a},{b}] given twice")
            self._br[(i, j)] = vec
            if i != j:
                self._br[(j, i)] = {k: s * c for k, c in vec.items()}
            elif vec and degs[i] % 2 == 0:
                raise ValidationError(f"[{a},{a}] must vanish for even degree")
        self._d: dict = {}
        for a, value in (differential or {}).items():
            i = self.generators.index(a)
            self._d[i] = self._vector(value, degs[i] - 1, f"d {a}")
        if check:
            problems = self.check_axioms()
            if problems:
                raise ValidationError("finite Lie algebra fails its axioms", violations=problems)

    def _vector(self, value: Mapping, degree: int, what: str) -> dict:
        out = {}
        for name, c in value.items():
            k = self.generators.index(name)
            if self.generators.degrees[k] != degree:
                raise ValidationError(f"{what}: {name} has degree {self.generators.degrees[k]}, expected {degree}")
            if c:
                out[k] = Fraction(c)
        return out

    def tree_degree(self, tree) -> int:
        if not isinstance(tree, int):
            raise DegreeError("finite Lie algebra elements are combinations of basis vectors")
        return self.generators.degrees[tree]

    def gen(self, name_or_index) -> LieElement:
        i = name_or_index if isinstance(name_or_index, int) else self.generators.index(name_or_index)
        return LieElement(self, {i: ONE})

    def bracket(self, x: LieElement, y: LieElement) -> LieElement:
        if x.algebra is not self or y.algebra is not self:
            raise AlgebraMismatch("bracket of elements from different algebras")
        out: dict = {}
        for i, ci in x.terms.items():
            for j, cj in y.terms.items():
                vec = self._br.get((i, j))
                if vec:
                    axpy(out, ci * cj, vec)
        return LieElement(self, out)

    def differential(self, x: LieElement) -> LieElement:
        out: dict = {}
        for i, c in x.terms.items():
            vec = self._d.get(i)
            if vec:
                axpy(out, c, vec)
        return LieElement(self, out)

    def is_zero(self, x: LieElement) -> bool:
        return not x.terms

    def basis_trees(self, n: int) -> list:
        return list(self._by_degree.get(n, []))

    def coordinates(self, x: LieElement, n: int | None = None) -> dict:
        out = {}
        for i, c in x.terms.items():
            if n is not None and self.generators.degrees[i] != n:
                raise DegreeError(f"expected degree {n}")
            out[self._position[i]] = c
        return out

    def normal_form(self, x: LieElement) -> LieElement:
        return x

    def top_degree(self):
        return max(self.generators.degrees, default=0)

    def degrees(self) -> list:
        return sorted(self._by_degree)

    def has_zero_differential(self) -> bool:
        return not any(self._d.values())

    def structure(self):
        """Brackets and differential as name-keyed dicts (for serialization)."""
        names = self.generators.names
        brackets = {}
        for (i, j), vec in sorted(self._br.items()):
            if i <= j and vec:
                brackets[(names[i], names[j])] = {names[k]: c for k, c in sorted(vec.items())}
        diff = {names[i]: {names[k]: c for k, c in sorted(v.items())} for i, v in sorted(self._d.items()) if v}
        return brackets, diff

    def check_axioms(self) -> list:
        problems = []
        n = len(self.generators)
        degs = self.generators.degrees
        e = [self.gen(i) for i in range(n)]
        for i, j, k in iproduct(range(n), repeat=3):
            x, y, z = e[i], e[j], e[k]
            lhs = self.bracket(x, self.bracket(y, z))
            rhs = self.bracket(self.bracket(x, y), z) + sign(degs[i] * degs[j]) * self.bracket(y, self.bracket(x, z))
            if not (lhs - rhs).is_zero():
                names = self.generators.names
                problems.append(f"Jacobi fails on ({names[i]}, {names[j]}, {names[k]})")
        for i in range(n):
            ddx = self.differential(self.differential(e[i]))
            if ddx.terms:
                problems.append(f"d∘d is nonzero on {self.generators.names[i]}")
            for j in range(n):
                lhs = self.differential(self.bracket(e[i], e[j]))
                rhs = self.bracket(self.differential(e[i]), e[j]) + \
                    sign(degs[i]) * self.bracket(e[i], self.differential(e[j]))
                if not (lhs - rhs).is_zero():
                    names = self.generators.names
                    problems.append(f"Leibniz fails on ({names[i]}, {names[j]})")
        return problems

    def format_tree(self, tree) -> str:
        return self.generators.names[tree]

    def format(self, x: LieElement) -> str:
        return format_terms(x, self.format_tree)


FiniteDgl = FiniteLie
