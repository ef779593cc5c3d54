"""Rational homotopy of function-space components from a Quillen model of a map.

For ``f: X -> Y`` with model ``ℒ_f: ℒ_X -> ℒ_Y`` the based component has
``π_n ≅ H_n(Der(ℒ_X, ℒ_Y; ℒ_f))`` and the free component has
``π_n ≅ H_n(Rel(ad_{ℒ_f}))`` for ``n >= 2``, with Whitehead products given by
the products of :mod:`whitehead_dgl.whitehead`.  This module packages those
computations into reports, adds the classifier for even-sphere targets and
the consistency checks between Whitehead lengths of maps and of targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .derivations import RelElement, check_surjective_quasi_iso, compose, der_complex, rel_complex
from .dgl import (DglMap, FreeDgl, GeneratorFiltration, homology_data, quadratic_coefficients,
                  validate)
from .errors import CapTooLow, DegreeError, ValidationError
from .graded_lie import format_scalar
from .scalar_linear import EchelonForm, IncrementalSpan, SparseMatrix
from .whitehead import (LengthSearch, WhiteheadLength, der_whitehead, rel_whitehead,
                        whitehead_length_search)

MODES = ("based", "free")


def _mode(mode: str) -> str:
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def component_complex(f: DglMap, mode: str):
    """The derivation complex (based) or the cone of ``ad_f`` (free)."""
    return der_complex(f) if _mode(mode) == "based" else rel_complex(f)


def component_product(f: DglMap, mode: str, x, y):
    """Whitehead product of two cycles of the component complex."""
    if _mode(mode) == "based":
        return der_whitehead(f, x, y)
    return rel_whitehead(f, x, y)


def format_cycle(z) -> str:
    """Readable form of a derivation or cone element, listing nonzero generator values."""
    if isinstance(z, RelElement):
        K = z.theta.target
        return f"({K.format(z.chi)} ; {format_cycle(z.theta)})"
    K, L = z.target, z.source
    parts = []
    for i, name in enumerate(L.generators.names):
        value = z.on_generator(i)
        if not value.is_zero():
            parts.append(f"{name} -> {K.format(K.normal_form(value))}")
    return "{" + ", ".join(parts) + "}"


# ----------------------------------------------------------------------------
# component reports


@dataclass
class ClassEntry:
    label: str
    degree: int
    index: int
    representative: object


@dataclass
class ProductEntry:
    left: str
    right: str
    degree: int
    coordinates: list


@dataclass
class ComponentReport:
    """Homotopy groups and Whitehead products of one component, within a window."""

    map_name: str
    mode: str
    window: tuple
    cap: int
    dimensions: dict
    classes: list
    products: list
    length: WhiteheadLength | None
    search: LengthSearch | None = None

    def product(self, left: str, right: str) -> ProductEntry:
        for p in self.products:
            if p.left == left and p.right == right:
                return p
        raise KeyError((left, right))

    def class_by_label(self, label: str) -> ClassEntry:
        for c in self.classes:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "map": self.map_name,
            "mode": self.mode,
            "window": list(self.window),
            "cap": self.cap,
            "dimensions": {str(n): d for n, d in sorted(self.dimensions.items())},
            "classes": [{"label": c.label, "degree": c.degree,
                         "representative": format_cycle(c.representative)} for c in self.classes],
            "products": [{"left": p.left, "right": p.right, "degree": p.degree,
                          "coordinates": [format_scalar(Fraction(x)) for x in p.coordinates]}
                         for p in self.products],
            "whitehead_length": None if self.length is None else
            {"length": self.length.length, "exhausted": self.length.exhausted},
        }


def _check_window(window, cap: int) -> tuple:
    lo, hi = (int(window[0]), int(window[1]))
    if lo < 2:
        raise DegreeError("the degree window starts at 2 or above")
    if hi < lo:
        raise DegreeError(f"empty degree window {lo}..{hi}")
    if hi > cap:
        raise CapTooLow(f"window reaches degree {hi} beyond the cap {cap}", needed=hi, cap=cap)
    return lo, hi


def component_classes(f: DglMap, mode: str, window) -> list:
    """Homology basis classes in the window, labelled ``"<degree>.<index>"``."""
    cx = component_complex(f, mode)
    out = []
    for n in range(window[0], window[1] + 1):
        _, classes = cx.homology(n)
        for k, c in enumerate(classes):
            out.append(ClassEntry(f"{n}.{k}", n, k, c.representative))
    return out


def analyze_component(f: DglMap, mode: str = "free", window=(2, 4), cap: int = 5, *,
                      products: bool = True, length: bool = True) -> ComponentReport:
    """Dimensions, the product table and the Whitehead length of a component.

    Products are listed for every ordered pair of window classes whose
    product lands in degree ``<= cap``; the coordinates are with respect to
    the homology basis of that degree.
    """
    mode = _mode(mode)
    if not isinstance(f.source, FreeDgl):
        raise ValidationError("the source model must be a free DGL")
    lo, hi = _check_window(window, cap)
    cx = component_complex(f, mode)
    dims = {n: cx.homology_data(n).dimension for n in range(lo, hi + 1)}
    classes = component_classes(f, mode, (lo, hi))
    table = []
    if products:
        for a in classes:
            for b in classes:
                n = a.degree + b.degree - 1
                if n > cap:
                    continue
                z = component_product(f, mode, a.representative, b.representative)
                table.append(ProductEntry(a.label, b.label, n, cx.class_coordinates(z)))
    search = wl = None
    if length:
        search = whitehead_length_search(f, "Der" if mode == "based" else "Rel", cap)
        wl = search.result()
    return ComponentReport(f.name, mode, (lo, hi), cap, dims, classes, table, wl, search)


def component_whitehead_length(f: DglMap, mode: str, cap: int) -> WhiteheadLength:
    return whitehead_length_search(f, "Der" if _mode(mode) == "based" else "Rel", cap).result()


# ----------------------------------------------------------------------------
# Whitehead length of a target, read off its homology Lie algebra


def _level_search(base: list, product, coordinates, cap: int) -> int:
    """Length of the longest nonzero left-normed product of ``base`` classes.

    ``base`` holds ``(degree, element)`` pairs; level ``r`` keeps a basis
    of the span of length-``r`` products in each degree.
    """
    length, level = 1, base
    while level:
        spans: dict = {}
        nxt = []
        for n1, x in level:
            for n2, y in base:
                n = n1 + n2
                if n > cap:
                    continue
                z = product(x, y)
                coords = coordinates(z, n)
                if not any(coords):
                    continue
                span = spans.setdefault(n, IncrementalSpan())
                if span.add({i: c for i, c in enumerate(coords) if c}):
                    nxt.append((n, z))
        if not nxt:
            break
        length += 1
        level = nxt
    return length


def lie_whitehead_length(K, cap: int) -> WhiteheadLength:
    """Whitehead length of the space modelled by ``K``, from brackets in ``H(K)``.

    Homotopy degree ``n`` sits in Lie degree ``n - 1``; degrees ``2..cap`` of
    homotopy are searched.  The result is exact when ``K`` vanishes above
    Lie degree ``cap - 1``.
    """
    if cap < 3:
        raise CapTooLow("products live in degree >= 3; raise the cap", needed=3, cap=cap)
    top = cap - 1
    base = []
    for m in range(1, top + 1):
        data = homology_data(K, m)
        base += [(m, K.element(v, m)) for v in data.representatives]

    def coordinates(z, m):
        return homology_data(K, m).coordinates(K.coordinates(z, m))

    length = _level_search(base, K.bracket, coordinates, top)
    k_top = K.top_degree()
    return WhiteheadLength(length, k_top is not None and k_top <= top)


# ----------------------------------------------------------------------------
# coformal replacement


class CoformalReplacement:
    """A validated surjective quasi-isomorphism ``ρ: ℒ_Y -> (H, 0)``.

    ``transport(f)`` is ``ρ∘f``; derivations and cone elements over ``f``
    are carried along by composing with ``ρ``.
    """

    def __init__(self, rho: DglMap, cap: int):
        H = rho.target
        if not H.has_zero_differential():
            raise ValidationError("a coformal replacement must land in an algebra with zero differential")
        check_surjective_quasi_iso(rho, cap)
        self.rho, self.cap = rho, cap
        self._maps: dict = {}

    @property
    def source(self):
        return self.rho.source

    @property
    def target(self):
        return self.rho.target

    def transport(self, f: DglMap) -> DglMap:
        if f.target is not self.rho.source:
            raise ValidationError("the map must land in the source of ρ")
        entry = self._maps.get(id(f))
        if entry is None:
            entry = self._maps[id(f)] = (f, f.compose(self.rho, name=f"ρ∘{f.name}"))
        return entry[1]

    def transport_cycle(self, f: DglMap, z):
        g = self.transport(f)
        if isinstance(z, RelElement):
            return RelElement(self.rho(z.chi), compose(self.rho, z.theta, g))
        return compose(self.rho, z, g)


def coformal_replace(LY, rho: DglMap, cap: int) -> CoformalReplacement:
    if rho.source is not LY:
        raise ValidationError("ρ must start at the given model")
    return CoformalReplacement(rho, cap)


# ----------------------------------------------------------------------------
# even-sphere targets


def sphere_model(n: int, name: str = "S") -> FreeDgl:
    """``𝕃(u)`` with ``|u| = n - 1``, the minimal model of ``Sⁿ``."""
    if n < 2:
        raise DegreeError("spheres of dimension >= 2 only")
    return FreeDgl([("u", n - 1)], name=name)


def _pair(i: int, j: int) -> tuple:
    return (i, j) if i <= j else (j, i)


@dataclass
class SphereProblem:
    """Quadratic data of a model of ``X`` and a map to ``Sⁿ``.

    ``basis`` lists ``(name, cohomology degree)``; the generator dual to a
    class of degree ``m`` has Lie degree ``m - 1``.  ``coefficients[v]``
    maps index pairs ``(i, j)``, ``i <= j``, to the coefficient of
    ``[v_i, v_j]`` in ``d v``.  ``k`` names the degree ``n`` class carrying
    the map, with ``f(v_k) = c_k u``; ``c_k = 0`` encodes a map that is zero
    on rational cohomology.
    """

    basis: list
    coefficients: dict
    n: int
    c_k: Fraction = Fraction(0)
    k: str | None = None

    def __post_init__(self):
        self.basis = [(str(a), int(b)) for a, b in self.basis]
        self.c_k = Fraction(self.c_k)
        self.validate()

    @property
    def names(self) -> list:
        return [a for a, _ in self.basis]

    def lie_degree(self, i: int) -> int:
        return self.basis[i][1] - 1

    def coefficient(self, v: str, i: int, j: int) -> Fraction:
        return Fraction(self.coefficients.get(v, {}).get(_pair(i, j), 0))

    def validate(self) -> None:
        problems = []
        if self.n < 2:
            problems.append("n must be at least 2")
        degs = [d for _, d in self.basis]
        if any(d < 2 for d in degs):
            problems.append("reduced cohomology starts in degree 2")
        if degs != sorted(degs):
            problems.append("basis degrees must be nondecreasing")
        names = self.names
        if len(set(names)) != len(names):
            problems.append("repeated basis name")
        for v, table in self.coefficients.items():
            if v not in names:
                problems.append(f"coefficients given for unknown class {v}")
                continue
            vd = self.lie_degree(names.index(v))
            for (i, j), c in table.items():
                if not c:
                    continue
                if not (0 <= i <= j < len(names)):
                    problems.append(f"bad index pair {(i, j)} for {v}")
                    continue
                if i == j and self.lie_degree(i) % 2 == 0:
                    problems.append(f"c_{{{names[i]},{names[i]}}}({v}) must vanish for an even generator")
                if self.lie_degree(i) + self.lie_degree(j) + 1 != vd:
                    problems.append(f"[{names[i]},{names[j]}] cannot occur in d {v} for degree reasons")
        if self.k is not None:
            if self.k not in names:
                problems.append(f"unknown class {self.k} carrying the map")
            elif self.basis[names.index(self.k)][1] != self.n:
                problems.append(f"{self.k} must have degree {self.n}")
        elif self.c_k:
            problems.append("a nonzero c_k needs the class k that carries it")
        if problems:
            raise ValidationError("malformed sphere problem", violations=problems)

    @classmethod
    def from_model(cls, LX: FreeDgl, f: DglMap, n: int) -> "SphereProblem":
        """Read the quadratic data off a minimal model and a map to ``𝕃(u)``."""
        S = f.target
        if f.source is not LX:
            raise ValidationError("the map must start at the given model")
        if len(S.generators) != 1 or S.generators.degrees[0] != n - 1:
            raise ValidationError(f"the target must be 𝕃(u) with |u| = {n - 1}")
        names, degs = LX.generators.names, LX.generators.degrees
        order = sorted(range(len(names)), key=lambda i: (degs[i], i))
        if order != list(range(len(names))):
            raise ValidationError("generators must be listed in nondecreasing degree")
        coeffs = {}
        for i, v in enumerate(names):
            table = quadratic_coefficients(LX, i)
            if table:
                coeffs[v] = table
        carriers = []
        for i, v in enumerate(names):
            value = f.on_generator(i)
            if not value.is_zero():
                c = S.coordinates(value, n - 1).get(0, Fraction(0))
                carriers.append((v, c))
        if len(carriers) > 1:
            raise ValidationError("arrange the degree n basis so that one generator carries the map")
        k, c_k = carriers[0] if carriers else (None, Fraction(0))
        if k is None:
            deg_n = [v for v, d in zip(names, degs) if d == n - 1]
            k = deg_n[0] if deg_n else None
        return cls([(v, d + 1) for v, d in zip(names, degs)], coeffs, n, c_k, k)

    def to_model(self):
        """``(ℒ_X, 𝕃(u), f)`` realizing the quadratic data."""
        names = self.names
        gens = [(a, d - 1) for a, d in self.basis]

        def dv(table):
            def build(A):
                return A.combination((Fraction(c), A.bracket(A.gen(names[i]), A.gen(names[j])))
                                     for (i, j), c in table.items() if c)
            return build
        LX = FreeDgl(gens, {v: dv(t) for v, t in self.coefficients.items()}, name="X")
        problems = validate(LX)
        if problems:
            raise ValidationError("the quadratic data do not square to zero", violations=problems)
        S = sphere_model(self.n)
        values = {self.k: self.c_k * S.gen(0)} if self.k is not None and self.c_k else {}
        return LX, S, DglMap(LX, S, values, name="f")


@dataclass
class SphereClassification:
    based: int
    free: int
    certificate: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"based": self.based, "free": self.free, "certificate": self.certificate}


def sphere_classify(problem: SphereProblem) -> SphereClassification:
    """Whitehead length (1 or 2) of the based and free components of ``X -> Sⁿ``.

    For even ``n`` a based product of length two exists exactly when some
    pair ``i <= j`` of classes of degree ``<= n - 2`` satisfies

    (i)   ``c_ij(v) != 0`` for some ``v``;
    (ii)  ``c_k c_ik(w) = c_k c_jk(w) = 0`` for every ``w``;
    (iii) no ``v`` with ``c_ij(v) != 0`` has ``c_k c_rk(v) != 0`` for any ``r``.

    The free component has length 2 when ``c_k = 0``.  When ``c_k != 0`` the
    class ``ad(u)``, supported on ``v_k``, bounds in the cone, so a based
    witness also has to satisfy

    (iv)  ``c_ij(v_k) = 0``.
    """
    n, names = problem.n, problem.names
    if n % 2:
        return SphereClassification(1, 1, {"reason": "odd sphere: every component is equivalent to the null one"})
    ck = problem.c_k
    kidx = names.index(problem.k) if problem.k is not None else None
    candidates = [i for i in range(len(names)) if problem.lie_degree(i) <= n - 3]
    rejected = []
    based_witness = free_witness = None
    for a, i in enumerate(candidates):
        for j in candidates[a:]:
            hits = [v for v in names if problem.coefficient(v, i, j)]
            if not hits:
                continue
            pair = [names[i], names[j]]
            if ck and kidx is not None:
                bad = [w for w in names if problem.coefficient(w, i, kidx) or problem.coefficient(w, j, kidx)]
                if bad:
                    rejected.append({"pair": pair, "condition": "ii", "generator": bad[0]})
                    continue
                bad = [(v, names[r]) for v in hits for r in range(len(names))
                       if problem.coefficient(v, r, kidx)]
                if bad:
                    rejected.append({"pair": pair, "condition": "iii", "generator": bad[0][0],
                                     "partner": bad[0][1]})
                    continue
            if based_witness is None:
                based_witness = {"pair": pair, "generators": hits}
            if ck and problem.k in hits:
                rejected.append({"pair": pair, "condition": "iv", "generator": problem.k})
                continue
            free_witness = {"pair": pair, "generators": hits}
            break
        if free_witness:
            break
    based = 2 if based_witness else 1
    free = 2 if (not ck or free_witness) else 1
    cert = {"c_k": format_scalar(ck), "based_witness": based_witness,
            "free_witness": free_witness if ck else None,
            "candidates": [names[i] for i in candidates], "rejected": rejected}
    return SphereClassification(based, free, cert)


# ----------------------------------------------------------------------------
# theorem checks on fixtures


@dataclass
class WlFixture:
    """A map with optional extra structure used by :func:`wl_property_suite`.

    ``rho`` is a coformal replacement of the target; a target with zero
    differential counts as its own.  ``filtration`` is a generator
    filtration of the source.
    """

    name: str
    f: DglMap
    cap: int
    rho: DglMap | None = None
    filtration: GeneratorFiltration | None = None


@dataclass
class PropertyCheck:
    fixture: str
    statement: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"fixture": self.fixture, "statement": self.statement, "passed": self.passed,
                "detail": self.detail}


def _is_zero_map(f: DglMap) -> bool:
    return all(f.on_generator(i).is_zero() for i in range(len(f.source.generators)))


def homology_surjective(f: DglMap, cap: int) -> bool:
    """Whether ``H(f)`` is onto in Lie degrees ``1..cap-1``."""
    S, K = f.source, f.target
    for m in range(1, cap):
        hk = homology_data(K, m)
        if not hk.dimension:
            continue
        hs = homology_data(S, m)
        images = [hk.coordinates(K.coordinates(f(S.element(v, m)), m)) for v in hs.representatives]
        rank = EchelonForm(SparseMatrix.from_rows(images, hk.dimension)).rank if images else 0
        if rank != hk.dimension:
            return False
    return True


def wl_property_suite(fixtures: Sequence[WlFixture]) -> list:
    """Check the relations between lengths of components and of targets.

    * null map: the free length equals the target's;
    * coformal target: both lengths are bounded by the target's;
    * co-H source, coformal target, ``H(f)`` onto: the free length is 1;
    * filtered source: the based length is bounded by the filtration length.

    Within a cap only lower bounds are available unless a search is
    exhausted, so each inequality is asserted in the direction the
    available bounds support.
    """
    checks = []
    for fx in fixtures:
        f, cap = fx.f, fx.cap
        K = f.target
        based = component_whitehead_length(f, "based", cap)
        free = component_whitehead_length(f, "free", cap)
        coformal = fx.rho is not None or K.has_zero_differential()
        H = K
        if fx.rho is not None:
            H = coformal_replace(K, fx.rho, cap).target
        lie = lie_whitehead_length(H if coformal else K, cap)

        if _is_zero_map(f):
            ok = free.length >= lie.length
            if lie.exhausted:
                ok = ok and free.length == lie.length
            checks.append(PropertyCheck(fx.name, "null map: free length equals the target's",
                                        ok, f"free={tuple(free)} target={tuple(lie)}"))
        if coformal and lie.exhausted:
            ok = based.length <= lie.length and free.length <= lie.length
            checks.append(PropertyCheck(fx.name, "coformal target bounds both lengths", ok,
                                        f"based={tuple(based)} free={tuple(free)} target={tuple(lie)}"))
        if coformal and f.source.has_zero_differential() and homology_surjective(f, cap):
            checks.append(PropertyCheck(fx.name, "co-H source onto coformal target: free length 1",
                                        free.length <= 1, f"free={tuple(free)}"))
        stages = None
        if fx.filtration is not None:
            stages = fx.filtration.length
        elif f.source.has_zero_differential():
            stages = 1
        if stages is not None:
            checks.append(PropertyCheck(fx.name, "based length bounded by filtration length",
                                        based.length <= stages, f"based={tuple(based)} stages={stages}"))
    return checks


__all__ = [
    "MODES", "ClassEntry", "ProductEntry", "ComponentReport", "analyze_component", "component_classes",
    "component_complex", "component_product", "component_whitehead_length", "format_cycle",
    "lie_whitehead_length", "CoformalReplacement", "coformal_replace", "sphere_model", "SphereProblem",
    "SphereClassification", "sphere_classify", "WlFixture", "PropertyCheck", "homology_surjective",
    "wl_property_suite",
]
