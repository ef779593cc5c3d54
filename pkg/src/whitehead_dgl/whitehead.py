"""Whitehead products on cycles of derivation complexes and mapping cones.

The construction runs through extension algebras ``L(a_1, …, a_n)``: free
DGLs obtained from ``L = 𝕃(V; d)`` by adjoining a generator ``a_i`` of degree
``p_i - 1`` and a shifted copy ``S_{a_i} V`` of the generators, with

    ∂(a_i) = 0,    ∂(S_{a_i} v) = (-1)^{p_i - 1} [a_i, v] + (-1)^{p_i} S_{a_i}(d v).

A product of two cone cycles is the image of a universal cycle living in the
cone of ``ad_λ`` for the inclusion ``λ: L -> L(a, b)``, pushed forward along the
map ``L(a, b) -> K`` that the two cycles determine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .derivations import (D_psi, PsiDerivation, RelElement, compose, der_complex, is_der_cycle,
                          is_rel_cycle, rel_complex)
from .dgl import DglMap, FreeDgl, identity_map
from .errors import CapTooLow, DegreeError, NotACycle, ValidationError
from .graded_lie import LieElement, sign
from .scalar_linear import IncrementalSpan


def universal_sign(p: int, q: int) -> int:
    """Sign of ``[a, b]`` in the first component of the universal cycle.

    Forced by the cycle condition in the cone of ``ad_λ``; see
    ``universal_example``.
    """
    return sign(q + 1)


# ----------------------------------------------------------------------------
# extension algebras


class ExtensionAlgebra:
    """``L(a_1, …, a_n)`` with its inclusion ``λ`` and suspension derivations.

    ``overrides`` maps an attached generator name to a function
    ``(extension) -> LieElement`` replacing the default differential; it is
    how variants with extra relations are assembled.
    """

    def __init__(self, base: FreeDgl, degrees: Sequence[int], labels: Sequence[str] | None = None,
                 overrides: dict | None = None, name: str | None = None):
        degrees = [int(p) for p in degrees]
        bad = [p for p in degrees if p <= 1]
        if bad:
            raise DegreeError(f"attached degrees must exceed 1, got {bad}")
        if labels is None:
            labels = list("abcdefgh"[:len(degrees)]) if len(degrees) <= 8 else \
                [f"a{i + 1}" for i in range(len(degrees))]
            taken = set(base.generators.names)
            while taken.intersection(labels) or any(self.suspended_name(x, v) in taken
                                                    for x in labels for v in taken):
                labels = [x + "'" for x in labels]
        if len(labels) != len(degrees):
            raise ValidationError("one label per attached degree is required")
        self.base, self.degrees, self.labels = base, degrees, list(labels)
        names = list(base.generators.names)
        gdeg = list(base.generators.degrees)
        pairs = list(zip(names, gdeg))
        pairs += [(lab, p - 1) for lab, p in zip(self.labels, degrees)]
        for lab, p in zip(self.labels, degrees):
            pairs += [(self.suspended_name(lab, v), dv + p) for v, dv in zip(names, gdeg)]
        taken = set(names)
        for n, _ in pairs[len(names):]:
            if n in taken:
                raise ValidationError(f"generator name {n} is already used by the base algebra")
            taken.add(n)
        label = name or f"{base.name}({','.join(self.labels)})"
        A = FreeDgl(pairs, name=label, valid_through=base.valid_through)
        A.extension = self
        self.algebra = A
        self.inclusion = DglMap(base, A, {v: A.gen(v) for v in names}, name="λ")
        self.identity = identity_map(A)
        nv = len(names)
        for i in range(nv):
            A._dgen[i] = self.include(base.d_generator(i))
        overrides = overrides or {}
        for k, (lab, p) in enumerate(zip(self.labels, degrees)):
            ia = self.label_index(k)
            if lab in overrides:
                A._dgen[ia] = overrides[lab](self)
            S = self.suspension(k)
            for j, v in enumerate(names):
                key = self.suspended_name(lab, v)
                gi = A.generators.index(key)
                if key in overrides:
                    A._dgen[gi] = overrides[key](self)
                else:
                    A._dgen[gi] = sign(p - 1) * A.bracket(A.gen(ia), A.gen(j)) + \
                        sign(p) * S(base.differential(base.gen(j)))

    @staticmethod
    def suspended_name(label: str, v: str) -> str:
        return f"S{label}({v})"

    def label_index(self, k: int) -> int:
        return len(self.base.generators) + k

    def label_element(self, k: int) -> LieElement:
        return self.algebra.gen(self.label_index(k))

    def suspended_index(self, k: int, j: int) -> int:
        nv = len(self.base.generators)
        return nv + len(self.degrees) + k * nv + j

    def include(self, x: LieElement) -> LieElement:
        return self.inclusion(x)

    def suspension(self, k: int) -> PsiDerivation:
        """``S_{a_k}`` as a λ-derivation of degree ``p_k``."""
        A = self.algebra
        nv = len(self.base.generators)
        return PsiDerivation(self.inclusion, self.degrees[k],
                             {j: A.gen(self.suspended_index(k, j)) for j in range(nv)})

    def theta(self, k: int) -> PsiDerivation:
        """``Θ_{a_k}``: a derivation of the whole algebra, ``v ↦ S_{a_k} v`` and zero elsewhere."""
        A = self.algebra
        nv = len(self.base.generators)
        return PsiDerivation(self.identity, self.degrees[k],
                             {j: A.gen(self.suspended_index(k, j)) for j in range(nv)})

    def restrict(self, theta: PsiDerivation) -> PsiDerivation:
        """``Θ ∘ λ``."""
        A = self.algebra
        return PsiDerivation(self.inclusion, theta.degree, lambda j: theta(A.gen(j)))

    def validate(self) -> list:
        from .dgl import validate
        return validate(self.algebra)


def build_extension(L: FreeDgl, degrees: Sequence[int], labels: Sequence[str] | None = None) -> ExtensionAlgebra:
    return ExtensionAlgebra(L, degrees, labels)


def extension(L: FreeDgl, degrees: Sequence[int]) -> ExtensionAlgebra:
    """Cached ``L(a_1, …, a_n)`` for the given degrees."""
    store = L.__dict__.setdefault("_extensions", {})
    key = tuple(degrees)
    ext = store.get(key)
    if ext is None:
        ext = store[key] = ExtensionAlgebra(L, degrees)
    return ext


# ----------------------------------------------------------------------------
# derivations of a DGL and the pre-Whitehead pairing


def commutator(theta: PsiDerivation, phi: PsiDerivation) -> PsiDerivation:
    """``[θ, φ] = θ∘φ - (-1)^{|θ||φ|} φ∘θ`` for derivations of one algebra."""
    psi = theta.psi
    if phi.psi is not psi or psi.source is not psi.target:
        raise ValidationError("commutators need derivations of the same algebra")
    s = sign(theta.degree * phi.degree)

    def value(i):
        return theta(phi.on_generator(i)) - s * phi(theta.on_generator(i))
    return PsiDerivation(psi, theta.degree + phi.degree, value)


def pre_whitehead(x, y):
    """``{x, y} = (-1)^{|x|+1} [x, d y]`` in a DGL or among derivations of a DGL."""
    if isinstance(x, PsiDerivation):
        return sign(x.degree + 1) * commutator(x, D_psi(y))
    A = x.algebra
    if x.is_zero() or y.is_zero():
        return A.zero()
    return sign(x.degree + 1) * A.bracket(x, A.differential(y))


def theta_pairing(ext: ExtensionAlgebra, i: int = 0, j: int = 1) -> PsiDerivation:
    """``{Θ_{a_i}, Θ_{a_j}}`` as a derivation of the extension algebra."""
    return pre_whitehead(ext.theta(i), ext.theta(j))


def _ext_for(L: FreeDgl, p: int, q: int, ext: ExtensionAlgebra | None) -> ExtensionAlgebra:
    if ext is None:
        return extension(L, (p, q))
    if ext.base is not L or list(ext.degrees[:2]) != [p, q]:
        raise ValidationError("extension algebra does not match the requested degrees")
    return ext


def universal_example(L: FreeDgl, p: int, q: int, ext: ExtensionAlgebra | None = None) -> RelElement:
    """The universal product cycle ``(±[a, b], {Θ_a, Θ_b}∘λ)`` in ``Rel_{p+q-1}(ad_λ)``."""
    ext = _ext_for(L, p, q, ext)
    cache = ext.__dict__.setdefault("_universal", {})
    z = cache.get((0, 1))
    if z is None:
        A = ext.algebra
        chi = universal_sign(p, q) * A.bracket(ext.label_element(0), ext.label_element(1))
        theta = ext.restrict(theta_pairing(ext, 0, 1)).materialize()
        z = cache[(0, 1)] = RelElement(chi, theta)
    return z


def closed_formula_on_generator(L: FreeDgl, p: int, q: int, v, ext: ExtensionAlgebra | None = None) -> LieElement:
    """``{Θ_a, Θ_b}∘λ(v)`` by the three-term closed expression."""
    ext = _ext_for(L, p, q, ext)
    A = ext.algebra
    j = v if isinstance(v, int) else L.generators.index(v)
    a, b = ext.label_element(0), ext.label_element(1)
    Sa = A.gen(ext.suspended_index(0, j))
    Sb = A.gen(ext.suspended_index(1, j))
    tail = ext.theta(1)(ext.theta(0)(ext.include(L.differential(L.gen(j)))))
    return sign(q * (p + 1)) * A.bracket(b, Sa) + sign(p) * A.bracket(a, Sb) + sign((p + 1) * (q + 1)) * tail


# ----------------------------------------------------------------------------
# products on the cone of ad_ψ


def _require_rel_cycle(z: RelElement, what: str) -> None:
    if not is_rel_cycle(z):
        raise NotACycle(f"{what} is not a cycle of the cone")


def induced_map(psi: DglMap, cycles: Sequence[RelElement], ext: ExtensionAlgebra) -> DglMap:
    """``(ζ_1 | … | ζ_n)_ψ : L(a_1, …, a_n) -> K``.

    ``v ↦ ψ v``, ``a_i ↦ (-1)^{p_i} χ_i`` and ``S_{a_i} v ↦ θ_i(v)``.
    """
    L, K, A = psi.source, psi.target, ext.algebra
    if ext.base is not L:
        raise ValidationError("extension algebra is built on a different source")
    if [z.degree for z in cycles] != list(ext.degrees):
        raise DegreeError("cycle degrees do not match the extension algebra")
    values = {}
    for j, v in enumerate(L.generators.names):
        values[v] = psi.on_generator(j)
    for k, z in enumerate(cycles):
        values[ext.labels[k]] = sign(ext.degrees[k]) * z.chi
        for j, v in enumerate(L.generators.names):
            values[ext.suspended_name(ext.labels[k], v)] = z.theta.on_generator(j)
    return DglMap(A, K, values, name="(ζ|ζ)")


def push_rel(phi: DglMap, z: RelElement, psi: DglMap) -> RelElement:
    """Image of a cone element over λ under a map ``φ`` with ``φ∘λ = ψ``."""
    return RelElement(phi(z.chi), compose(phi, z.theta, psi))


def rel_whitehead(psi: DglMap, za: RelElement, zb: RelElement, *, check: bool = True) -> RelElement:
    """``⟦ζ_a, ζ_b⟧``: the universal cycle pushed along ``(ζ_a | ζ_b)_ψ``."""
    if check:
        _require_rel_cycle(za, "first argument")
        _require_rel_cycle(zb, "second argument")
    L = psi.source
    p, q = za.degree, zb.degree
    ext = extension(L, (p, q))
    U = universal_example(L, p, q, ext)
    phi = induced_map(psi, [za, zb], ext)
    out = push_rel(phi, U, psi)
    K = psi.target
    return RelElement(K.normal_form(out.chi), out.theta.materialize(normalize=True))


def rel_pairing(psi: DglMap, za: RelElement, zb: RelElement) -> PsiDerivation:
    """``{ζ_a, ζ_b}``, the derivation part of the product."""
    return rel_whitehead(psi, za, zb).theta


def der_whitehead(psi: DglMap, theta_a: PsiDerivation, theta_b: PsiDerivation) -> PsiDerivation:
    """``⟦θ_a, θ_b⟧ = {(0, θ_a), (0, θ_b)}`` on D-cycles."""
    for name, t in (("first", theta_a), ("second", theta_b)):
        if not is_der_cycle(t):
            raise NotACycle(f"{name} argument is not a D-cycle")
    K = psi.target
    z = rel_whitehead(psi, RelElement(K.zero(), theta_a), RelElement(K.zero(), theta_b), check=False)
    return z.theta


def iterated_whitehead(psi: DglMap, cycles: Sequence[RelElement]) -> RelElement:
    """Left-normed ``⟦…⟦⟦ζ_1, ζ_2⟧, ζ_3⟧ …, ζ_n⟧``."""
    if len(cycles) < 2:
        raise ValidationError("an iterated product needs at least two cycles")
    acc = cycles[0]
    for z in cycles[1:]:
        acc = rel_whitehead(psi, acc, z)
    return acc


def iterated_signs(degrees: Sequence[int]) -> tuple:
    """Signs ``(ε, ε')`` with the left fold equal to ``(ε w(χ), ε' (ζ)_*(w(Θ)∘λ))``.

    Each binary step contributes its universal sign and the factor
    ``(-1)^{p+q}`` with which the induced map rescales ``a`` and ``b``.
    """
    eps = 1
    deg = degrees[0]
    for q in degrees[1:]:
        eps *= universal_sign(deg, q) * sign(deg + q)
        deg = deg + q - 1
    return eps, 1


def universal_iterated(L: FreeDgl, degrees: Sequence[int], ext: ExtensionAlgebra | None = None) -> RelElement:
    """The single-shot cycle ``(±w(a_1, …, a_n), ±w(Θ_{a_1}, …, Θ_{a_n})∘λ)``.

    ``w`` is the left-normed bracket, respectively the left-normed
    pre-Whitehead pairing.  The first-component sign is chosen so that the
    induced map sends it to the left fold of binary products.
    """
    ext = ext or extension(L, tuple(degrees))
    A = ext.algebra
    eps, eps_theta = iterated_signs(degrees)
    # the induced map multiplies a_i by (-1)^{p_i}; undo that here
    chi_sign = eps
    for p in degrees:
        chi_sign *= sign(p)
    w = ext.label_element(0)
    W = ext.theta(0)
    for k in range(1, len(degrees)):
        w = A.bracket(w, ext.label_element(k))
        W = pre_whitehead(W, ext.theta(k))
    return RelElement(chi_sign * w, eps_theta * ext.restrict(W).materialize())


def single_shot_iterated(psi: DglMap, cycles: Sequence[RelElement]) -> RelElement:
    """``(ζ_1 | … | ζ_n)_ψ`` applied to the single-shot universal cycle."""
    L = psi.source
    degrees = tuple(z.degree for z in cycles)
    ext = extension(L, degrees)
    U = universal_iterated(L, degrees, ext)
    phi = induced_map(psi, cycles, ext)
    out = push_rel(phi, U, psi)
    return RelElement(psi.target.normal_form(out.chi), out.theta.materialize(normalize=True))


# ----------------------------------------------------------------------------
# the cone of a DGL map


@dataclass
class ConePair:
    """``(a, α)`` in ``Rel_p(ψ) = L_{p-1} ⊕ K_p`` for a DGL map ``ψ: L -> K``."""

    a: LieElement
    alpha: LieElement
    degree: int

    def __sub__(self, other):
        return ConePair(self.a - other.a, self.alpha - other.alpha, self.degree)

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.alpha.is_zero()


def cone_differential(psi: DglMap, z: ConePair) -> ConePair:
    L, K = psi.source, psi.target
    return ConePair(-L.differential(z.a), psi(z.a) + K.differential(z.alpha), z.degree - 1)


def cone_whitehead(psi: DglMap, za: ConePair, zb: ConePair, *, check: bool = True) -> ConePair:
    """``⟦(a, α), (b, β)⟧ = ((-1)^p [a, b], {α, β})``."""
    if check:
        for name, z in (("first", za), ("second", zb)):
            if not cone_differential(psi, z).is_zero():
                raise NotACycle(f"{name} argument is not a cycle of the cone")
    L = psi.source
    p = za.degree
    return ConePair(sign(p) * L.bracket(za.a, zb.a), pre_whitehead(za.alpha, zb.alpha), p + zb.degree - 1)


def cone_boundary_witness(psi: DglMap, zc: ConePair, zb: ConePair) -> ConePair:
    """When ``ζ_a = δ(c, γ)``, the element ``((-1)^p [c, b], -{γ, β})`` bounding ``⟦ζ_a, ζ_b⟧``."""
    L = psi.source
    p = zc.degree - 1
    return ConePair(sign(p) * L.bracket(zc.a, zb.a), -pre_whitehead(zc.alpha, zb.alpha), p + zb.degree)


# ----------------------------------------------------------------------------
# Whitehead length


class WhiteheadLength(NamedTuple):
    length: int
    exhausted: bool


@dataclass
class LengthSearch:
    """Full record of a Whitehead length search."""

    which: str
    cap: int
    length: int
    exhausted: bool
    levels: list = field(default_factory=list)
    witness: object = None

    def result(self) -> WhiteheadLength:
        return WhiteheadLength(self.length, self.exhausted)


def _vanishing_bound(psi: DglMap, which: str):
    """A degree above which the complex is zero, when the target is finite."""
    top = psi.target.top_degree()
    if top is None:
        return None
    degs = psi.source.generators.degrees
    der_top = top - min(degs) if degs else 0
    return der_top if which == "Der" else max(top + 1, der_top)


def whitehead_length_search(psi: DglMap, which: str = "Rel", cap: int = 5) -> LengthSearch:
    """Search left-normed products of homology basis classes in degrees ≤ cap.

    Level ``r`` holds a basis (in homology coordinates, per degree) of the
    span of all length-``r`` products.  The length is the last nonempty
    level; ``exhausted`` holds when the complex provably vanishes above the
    cap, so nothing beyond it can contribute.
    """
    which = "Rel" if which.lower().startswith("r") else "Der"
    if cap < 3:
        raise CapTooLow("products live in degree >= 3; raise the cap", needed=3, cap=cap)
    cx = rel_complex(psi) if which == "Rel" else der_complex(psi)

    def product(x, y):
        if which == "Rel":
            return rel_whitehead(psi, x, y, check=False)
        return der_whitehead(psi, x, y)

    base = []
    for n in range(2, cap + 1):
        _, classes = cx.homology(n)
        base += [(n, c.representative) for c in classes]
    # no classes at all still counts as length 1: every product vanishes
    search = LengthSearch(which, cap, 1, False)
    search.levels.append([(n, 1) for n, _ in base])
    level = base
    r = 1
    while level:
        spans: dict = {}
        nxt = []
        for n1, x in level:
            for n2, y in base:
                n = n1 + n2 - 1
                if n > cap:
                    continue
                z = product(x, y)
                coords = cx.class_coordinates(z)
                if not any(coords):
                    continue
                span = spans.setdefault(n, IncrementalSpan())
                if span.add({i: c for i, c in enumerate(coords) if c}, tag=len(nxt)):
                    nxt.append((n, z))
        r += 1
        if not nxt:
            break
        search.length = r
        search.witness = nxt[0]
        search.levels.append([(n, r) for n, _ in nxt])
        level = nxt
    bound = _vanishing_bound(psi, which)
    search.exhausted = bound is not None and cap >= bound
    return search


def whitehead_length(psi: DglMap, which: str = "Rel", cap: int = 5) -> WhiteheadLength:
    """``(k, exhausted)``: certified lower bound on the length and whether it is exact."""
    return whitehead_length_search(psi, which, cap).result()


__all__ = [
    "ExtensionAlgebra", "build_extension", "extension", "commutator", "pre_whitehead", "theta_pairing",
    "universal_example", "universal_sign", "closed_formula_on_generator", "induced_map", "push_rel",
    "rel_whitehead", "rel_pairing", "der_whitehead", "iterated_whitehead", "iterated_signs",
    "universal_iterated", "single_shot_iterated", "ConePair", "cone_differential", "cone_whitehead",
    "cone_boundary_witness", "WhiteheadLength", "LengthSearch", "whitehead_length",
    "whitehead_length_search",
]
