"""ψ-derivations, the derivation complex, the mapping cone of the adjoint, and lifting.

For a DG Lie map ``ψ: L -> K`` out of a free DGL, a ψ-derivation of degree
``n`` is fixed by its values on generators and evaluated on brackets by

    θ([x, y]) = [θ x, ψ y] + (-1)^{n|x|} [ψ x, θ y].

``D(θ) = d_K θ - (-1)^n θ d_L`` and ``ad(α)(x) = [α, ψ x]``.  The cone of
``ad`` has ``Rel_n = K_{n-1} ⊕ Der_n`` and ``δ(χ, θ) = (-d χ, ad χ + D θ)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .dgl import DglMap, FreeDgl, HomologyData, differential_columns, homology_data, is_minimal
from .errors import CapTooLow, DegreeError, NotACycle, QuasiIsoViolation, ValidationError
from .graded_lie import LieElement, sign
from .scalar_linear import EchelonForm, NoSolution, SparseMatrix, dense


class PsiDerivation:
    """A ψ-derivation of a fixed degree, given on the generators of ``ψ.source``.

    ``values`` is either a mapping from generator names or indices to target
    elements, or a function ``index -> element`` evaluated lazily.
    """

    def __init__(self, psi: DglMap, degree: int, values: Mapping | Callable | None = None):
        self.psi = psi
        self.degree = degree
        self._lazy = values if callable(values) else None
        self._gen: dict = {}
        if values is not None and not callable(values):
            gens = psi.source.generators
            for key, value in values.items():
                i = key if isinstance(key, int) else gens.index(key)
                if isinstance(value, LieElement) and value.algebra is not psi.target:
                    raise ValidationError("derivation value lives outside the target algebra")
                self._gen[i] = psi.target.zero() if (value is None or (not isinstance(value, LieElement) and value == 0)) else value
        self._tree_cache: dict = {}

    @property
    def source(self):
        return self.psi.source

    @property
    def target(self):
        return self.psi.target

    def on_generator(self, i: int) -> LieElement:
        v = self._gen.get(i)
        if v is None:
            v = self._lazy(i) if self._lazy is not None else self.target.zero()
            self._gen[i] = v
        return v

    def values(self) -> dict:
        names = self.source.generators.names
        return {names[i]: self.on_generator(i) for i in range(len(names))}

    def _tree(self, tree) -> LieElement:
        v = self._tree_cache.get(tree)
        if v is None:
            if isinstance(tree, int):
                v = self.on_generator(tree)
            else:
                left, right = tree
                K, psi = self.target, self.psi
                s = sign(self.degree * self.source.tree_degree(left))
                v = K.bracket(self._tree(left), psi._tree(right)) + \
                    s * K.bracket(psi._tree(left), self._tree(right))
            self._tree_cache[tree] = v
        return v

    def __call__(self, x: LieElement) -> LieElement:
        if x.algebra is not self.source:
            raise ValidationError("derivation applied to an element outside its source")
        return self.target.combination((c, self._tree(t)) for t, c in x.terms.items())

    # linear structure ---------------------------------------------------
    def _like(self, other):
        if not isinstance(other, PsiDerivation) or other.psi is not self.psi:
            raise ValidationError("derivations over different maps")
        if other.degree != self.degree:
            raise DegreeError(f"degrees {self.degree} and {other.degree} differ")

    def __add__(self, other):
        self._like(other)
        return PsiDerivation(self.psi, self.degree, lambda i: self.on_generator(i) + other.on_generator(i))

    def __sub__(self, other):
        self._like(other)
        return PsiDerivation(self.psi, self.degree, lambda i: self.on_generator(i) - other.on_generator(i))

    def __neg__(self):
        return PsiDerivation(self.psi, self.degree, lambda i: -self.on_generator(i))

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return PsiDerivation(self.psi, self.degree, lambda i: scalar * self.on_generator(i))

    __rmul__ = __mul__

    def materialize(self, normalize: bool = False) -> "PsiDerivation":
        """A copy with every generator value computed (and optionally put in normal form)."""
        K = self.target
        values = {i: self.on_generator(i) for i in range(len(self.source.generators))}
        if normalize:
            values = {i: K.normal_form(v) for i, v in values.items()}
        return PsiDerivation(self.psi, self.degree, values)

    def is_zero(self) -> bool:
        return all(self.on_generator(i).is_zero() for i in range(len(self.source.generators)))

    def equals(self, other: "PsiDerivation") -> bool:
        return other.degree == self.degree and all(
            (self.on_generator(i) - other.on_generator(i)).is_zero() for i in range(len(self.source.generators)))

    def __repr__(self):
        body = ", ".join(f"{n} ↦ {v}" for n, v in self.values().items())
        return f"PsiDerivation(deg {self.degree}: {body})"


def evaluate(theta: PsiDerivation, x: LieElement) -> LieElement:
    return theta(x)


def zero_derivation(psi: DglMap, degree: int) -> PsiDerivation:
    return PsiDerivation(psi, degree, {})


def D_psi(theta: PsiDerivation) -> PsiDerivation:
    """``d_K ∘ θ - (-1)^{|θ|} θ ∘ d_L``, a ψ-derivation of one lower degree."""
    L, K, n = theta.source, theta.target, theta.degree
    s = sign(n)

    def value(i):
        return K.differential(theta.on_generator(i)) - s * theta(L.differential(L.gen(i)))
    return PsiDerivation(theta.psi, n - 1, value)


def ad_psi(psi: DglMap, alpha: LieElement, degree: int | None = None) -> PsiDerivation:
    """``x ↦ [α, ψ(x)]``."""
    if degree is None:
        degree = alpha.degree
    K = psi.target
    return PsiDerivation(psi, degree, lambda i: K.bracket(alpha, psi.on_generator(i)))


def compose(phi: DglMap, theta: PsiDerivation, psi_after: DglMap | None = None) -> PsiDerivation:
    """``φ ∘ θ`` as a derivation over ``φ ∘ ψ`` (pass that composite to share it)."""
    over = psi_after or theta.psi.compose(phi)
    return PsiDerivation(over, theta.degree, lambda i: phi(theta.on_generator(i)))


# ----------------------------------------------------------------------------
# the mapping cone of ad


class RelElement:
    """A pair ``(χ, θ)`` in ``Rel_p(ad_ψ) = K_{p-1} ⊕ Der_p``."""

    __slots__ = ("chi", "theta")

    def __init__(self, chi: LieElement, theta: PsiDerivation):
        if chi.algebra is not theta.target:
            raise ValidationError("χ must live in the target of ψ")
        if not chi.is_zero() and chi.degree != theta.degree - 1:
            raise DegreeError(f"χ has degree {chi.degree}, expected {theta.degree - 1}")
        self.chi, self.theta = chi, theta

    @property
    def degree(self) -> int:
        return self.theta.degree

    @property
    def psi(self) -> DglMap:
        return self.theta.psi

    def __add__(self, other):
        return RelElement(self.chi + other.chi, self.theta + other.theta)

    def __sub__(self, other):
        return RelElement(self.chi - other.chi, self.theta - other.theta)

    def __neg__(self):
        return RelElement(-self.chi, -self.theta)

    def __mul__(self, scalar):
        return RelElement(scalar * self.chi, scalar * self.theta)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.chi.is_zero() and self.theta.is_zero()

    def equals(self, other: "RelElement") -> bool:
        return (self - other).is_zero()

    def __repr__(self):
        return f"RelElement(χ = {self.chi}, θ = {self.theta})"


def rel_differential(z: RelElement) -> RelElement:
    K = z.theta.target
    chi = -K.differential(z.chi)
    theta = ad_psi(z.psi, z.chi, z.degree - 1) + D_psi(z.theta)
    return RelElement(chi, theta)


def is_rel_cycle(z: RelElement) -> bool:
    return rel_differential(z).is_zero()


def is_der_cycle(theta: PsiDerivation) -> bool:
    return D_psi(theta).is_zero()


# ----------------------------------------------------------------------------
# coordinatized complexes


@dataclass
class HomologyClass:
    """A homology class with its cycle representative and coordinates."""

    complex: str
    degree: int
    representative: object
    coordinates: list = field(default_factory=list)


class BoundaryTest:
    """Outcome of a boundary test: truthy when the input is a boundary.

    ``witness`` solves ``δ(w) = z`` when it exists; otherwise ``certificate``
    is a left null vector of the boundary matrix pairing nontrivially with z.
    """

    def __init__(self, is_boundary: bool, witness=None, certificate=None):
        self.is_boundary = is_boundary
        self.witness = witness
        self.certificate = certificate

    def __bool__(self):
        return self.is_boundary

    def __repr__(self):
        return f"BoundaryTest({self.is_boundary})"


class _Complex:
    """Shared machinery for the derivation complex and the cone of ad."""

    tag = "?"

    def __init__(self, psi: DglMap, cap: int | None = None):
        if not isinstance(psi.source, FreeDgl):
            raise ValidationError("the source of ψ must be a free DGL")
        self.psi = psi
        self.cap = cap
        self._cols: dict = {}
        self._hom: dict = {}
        self._solvers: dict = {}

    def check_cap(self, n: int) -> None:
        if self.cap is not None and n > self.cap:
            raise CapTooLow(f"{self.tag} degree {n} needed but the cap is {self.cap}", needed=n, cap=self.cap)

    # Der part -----------------------------------------------------------
    def der_layout(self, n: int) -> list:
        """``(generator index, target degree, offset, dimension)`` blocks of Der_n."""
        K, L = self.psi.target, self.psi.source
        out, offset = [], 0
        for i, deg in enumerate(L.generators.degrees):
            m = deg + n
            K.check_cap(m)
            dim = K.dim(m)
            out.append((i, m, offset, dim))
            offset += dim
        return out

    def der_dim(self, n: int) -> int:
        if n < 1:
            return 0
        return sum(b[3] for b in self.der_layout(n))

    def der_vector(self, theta: PsiDerivation, offset: int = 0) -> dict:
        K = self.psi.target
        vec = {}
        for i, m, off, _ in self.der_layout(theta.degree):
            value = theta.on_generator(i)
            if value.terms:
                for k, c in K.coordinates(value, m).items():
                    vec[offset + off + k] = c
        return vec

    def der_element(self, vec: Mapping, n: int, offset: int = 0) -> PsiDerivation:
        K = self.psi.target
        values = {}
        for i, m, off, dim in self.der_layout(n):
            part = {k - off - offset: c for k, c in vec.items() if off + offset <= k < off + offset + dim}
            values[i] = K.element(part, m)
        return PsiDerivation(self.psi, n, values)

    def der_basis(self, n: int) -> list:
        K = self.psi.target
        out = []
        for i, m, _, dim in self.der_layout(n):
            for b in K.basis(m):
                out.append(PsiDerivation(self.psi, n, {i: b}))
        return out

    # homology -----------------------------------------------------------
    def columns(self, n: int) -> list:
        cols = self._cols.get(n)
        if cols is None:
            cols = [self.vector(self.boundary(e)) if n > 1 else {} for e in self.basis(n)]
            self._cols[n] = cols
        return cols

    def homology_data(self, n: int, *, pivot: str | None = None) -> HomologyData:
        if n < 2:
            raise DegreeError("homology is only computed in degrees >= 2")
        self.check_cap(n + 1)
        data = self._hom.get(n) if pivot is None else None
        if data is None:
            data = HomologyData(n, self.dim(n - 1), self.columns(n), self.columns(n + 1), pivot=pivot)
            if pivot is None:
                self._hom[n] = data
        return data

    def homology(self, n: int) -> tuple:
        data = self.homology_data(n)
        classes = []
        for k, v in enumerate(data.representatives):
            coords = [Fraction(int(j == k)) for j in range(data.dimension)]
            classes.append(HomologyClass(self.tag, n, self.element(v, n), coords))
        return data.dimension, classes

    def class_coordinates(self, z) -> list:
        n = z.degree
        return self.homology_data(n).coordinates(self.vector(z))

    def is_boundary(self, z) -> BoundaryTest:
        if not self.is_cycle(z):
            raise NotACycle(f"{self.tag} element of degree {z.degree} is not a cycle")
        n = z.degree
        self.check_cap(n + 1)
        vec = self.vector(z)
        if not vec:
            return BoundaryTest(True, witness=self.element({}, n + 1))
        solver = self._solvers.get(n)
        if solver is None:
            cols = self.columns(n + 1)
            solver = EchelonForm(SparseMatrix.from_columns(cols, self.dim(n)), track=True)
            self._solvers[n] = solver
        try:
            x = solver.solve(vec)
        except NoSolution as exc:
            return BoundaryTest(False, certificate=exc.certificate)
        return BoundaryTest(True, witness=self.element(x, n + 1))


class DerComplex(_Complex):
    """``Der(L, K; ψ)`` with differential ``D``, coordinatized degreewise."""

    tag = "Der"

    def dim(self, n: int) -> int:
        return self.der_dim(n)

    def basis(self, n: int) -> list:
        return self.der_basis(n) if n >= 1 else []

    def vector(self, theta: PsiDerivation) -> dict:
        return self.der_vector(theta)

    def element(self, vec: Mapping, n: int) -> PsiDerivation:
        return self.der_element(vec, n)

    def boundary(self, theta: PsiDerivation) -> PsiDerivation:
        return D_psi(theta)

    def is_cycle(self, theta: PsiDerivation) -> bool:
        return is_der_cycle(theta)


class RelComplex(_Complex):
    """The cone ``Rel(ad_ψ)`` with ``Rel_n = K_{n-1} ⊕ Der_n``."""

    tag = "Rel"

    def k_dim(self, n: int) -> int:
        K = self.psi.target
        if n - 1 < 1:
            return 0
        K.check_cap(n - 1)
        return K.dim(n - 1)

    def dim(self, n: int) -> int:
        return self.k_dim(n) + self.der_dim(n)

    def basis(self, n: int) -> list:
        K = self.psi.target
        out = []
        if n - 1 >= 1:
            out = [RelElement(b, zero_derivation(self.psi, n)) for b in K.basis(n - 1)]
        out += [RelElement(K.zero(), e) for e in self.der_basis(n)]
        return out

    def vector(self, z: RelElement) -> dict:
        K = self.psi.target
        vec = dict(K.coordinates(z.chi, z.degree - 1)) if z.chi.terms else {}
        vec.update(self.der_vector(z.theta, offset=self.k_dim(z.degree)))
        return vec

    def element(self, vec: Mapping, n: int) -> RelElement:
        K = self.psi.target
        kd = self.k_dim(n)
        chi = K.element({k: c for k, c in vec.items() if k < kd}, n - 1) if kd else K.zero()
        theta = self.der_element({k: c for k, c in vec.items() if k >= kd}, n, offset=kd)
        return RelElement(chi, theta)

    def boundary(self, z: RelElement) -> RelElement:
        return rel_differential(z)

    def is_cycle(self, z: RelElement) -> bool:
        return is_rel_cycle(z)


def _complex_cache(psi: DglMap, kind, cap):
    store = psi.__dict__.setdefault("_complexes", {})
    key = (kind.tag, cap)
    if key not in store:
        store[key] = kind(psi, cap)
    return store[key]


def der_complex(psi: DglMap, cap: int | None = None) -> DerComplex:
    return _complex_cache(psi, DerComplex, cap)


def rel_complex(psi: DglMap, cap: int | None = None) -> RelComplex:
    return _complex_cache(psi, RelComplex, cap)


def der_homology(psi: DglMap, n: int, cap: int | None = None):
    """``(dimension, [HomologyClass])`` of ``H_n(Der(L, K; ψ))``."""
    return der_complex(psi, cap).homology(n)


def rel_homology(psi: DglMap, n: int, cap: int | None = None):
    """``(dimension, [HomologyClass])`` of ``H_n(Rel(ad_ψ))``."""
    return rel_complex(psi, cap).homology(n)


def is_boundary(z, cap: int | None = None) -> BoundaryTest:
    if isinstance(z, RelElement):
        return rel_complex(z.psi, cap).is_boundary(z)
    return der_complex(z.psi, cap).is_boundary(z)


# ----------------------------------------------------------------------------
# lifting through a surjective quasi-isomorphism


def check_surjective_quasi_iso(phi: DglMap, cap: int) -> None:
    """Raise QuasiIsoViolation unless φ is onto and a homology isomorphism in degrees ≤ cap."""
    K, K2 = phi.source, phi.target
    for m in range(1, cap + 1):
        images = [K2.coordinates(phi(b), m) for b in K.basis(m)]
        span = EchelonForm(SparseMatrix.from_columns(images, K2.dim(m)))
        if span.rank != K2.dim(m):
            raise QuasiIsoViolation(f"{phi.name} is not surjective in degree {m}", degree=m)
    for m in range(1, cap):
        h, reps = homology_data(K, m), None
        h2 = homology_data(K2, m)
        if h.dimension != h2.dimension:
            raise QuasiIsoViolation(
                f"{phi.name}: homology dimensions differ in degree {m} ({h.dimension} vs {h2.dimension})", degree=m)
        reps = [K.element(v, m) for v in h.representatives]
        images = [h2.coordinates(K2.coordinates(phi(r), m)) for r in reps]
        r = EchelonForm(SparseMatrix.from_rows(images, h2.dimension)).rank if images else 0
        if r != h2.dimension:
            raise QuasiIsoViolation(f"{phi.name} is not a homology isomorphism in degree {m}", degree=m)


def _solve_in(columns: list, nrows: int, rhs: dict, degree: int, what: str) -> dict:
    try:
        return EchelonForm(SparseMatrix.from_columns(columns, nrows), track=True).solve(rhs)
    except NoSolution as exc:
        raise QuasiIsoViolation(f"lifting failed in degree {degree}: {what}", degree=degree) from exc


def lift_through_quasi_iso(theta_prime: PsiDerivation, phi: DglMap, psi: DglMap):
    """Lift a ``D``-cycle over ``φψ`` to one over ``ψ``.

    Returns ``(θ, θ'')`` with ``D_ψ θ = 0`` and ``φ∘θ = θ' + D(θ'')``, built
    generator by generator in nondecreasing degree.
    """
    L, K, K2 = psi.source, psi.target, phi.target
    if phi.source is not K:
        raise ValidationError("φ must start where ψ ends")
    if theta_prime.target is not K2:
        raise ValidationError("θ' must take values in the target of φ")
    if not is_minimal(L):
        raise ValidationError("lifting needs a minimal source")
    if not is_der_cycle(theta_prime):
        raise NotACycle("θ' is not a D-cycle")
    p = theta_prime.degree
    phipsi = theta_prime.psi
    s = sign(p)
    theta_vals: dict = {}
    theta2_vals: dict = {}
    theta = PsiDerivation(psi, p, lambda i: theta_vals[i])
    theta2 = PsiDerivation(phipsi, p + 1, lambda i: theta2_vals[i])
    order = sorted(range(len(L.generators)), key=lambda i: (L.generators.degrees[i], i))
    for i in order:
        m = L.generators.degrees[i] + p
        K.check_cap(m + 1)
        dx = L.differential(L.gen(i))
        theta._tree_cache.clear()
        theta2._tree_cache.clear()
        y = s * theta(dx)
        # z with d z = y
        if y.is_zero():
            z = K.zero()
        else:
            zc = _solve_in(differential_columns(K, m), K.dim(m - 1), K.coordinates(y, m - 1), m,
                           "θ(dx) is not a boundary in the source of φ")
            z = K.element(zc, m)
        c = theta_prime.on_generator(i) + s * theta2(dx) - phi(z)
        # cycle zbar and α with φ(zbar) - d α = c
        cycles = homology_data(K, m).cycles if m >= 1 else []
        cyc_elems = [K.element(v, m) for v in cycles]
        cols = [K2.coordinates(phi(e), m) for e in cyc_elems]
        up = K2.basis(m + 1)
        cols += [{k: -x for k, x in K2.coordinates(K2.differential(b), m).items()} for b in up]
        sol = _solve_in(cols, K2.dim(m), K2.coordinates(c, m) if c.terms else {}, m,
                        "no cycle maps onto the required class")
        zbar = K.combination((sol.get(k, 0), e) for k, e in enumerate(cyc_elems))
        alpha = K2.combination((sol.get(len(cyc_elems) + k, 0), b) for k, b in enumerate(up))
        theta_vals[i] = K.normal_form(zbar + z)
        theta2_vals[i] = K2.normal_form(alpha)
    theta._tree_cache.clear()
    theta2._tree_cache.clear()
    return (PsiDerivation(psi, p, dict(theta_vals)), PsiDerivation(phipsi, p + 1, dict(theta2_vals)))


def check_lift(theta_prime, phi, theta, theta2) -> bool:
    """Exact check of ``D_ψ θ = 0`` and ``φ∘θ = θ' + D(θ'')``."""
    if not is_der_cycle(theta):
        return False
    lhs = compose(phi, theta, theta_prime.psi)
    rhs = theta_prime + D_psi(theta2)
    return lhs.equals(rhs)


__all__ = [
    "PsiDerivation", "RelElement", "HomologyClass", "BoundaryTest", "DerComplex", "RelComplex",
    "evaluate", "D_psi", "ad_psi", "compose", "rel_differential", "der_homology", "rel_homology",
    "is_boundary", "lift_through_quasi_iso", "check_lift", "check_surjective_quasi_iso",
    "der_complex", "rel_complex", "zero_derivation", "is_rel_cycle", "is_der_cycle", "dense",
]
