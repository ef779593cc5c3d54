"""Exact rational linear algebra on sparse vectors.

Vectors are ``dict[int, Fraction]`` with no stored zeros.  Matrices keep one
such dict per row.  Every routine is exact; nothing here ever touches a float.

Two pivot rules are available.  ``"bitsize"`` (the default) picks the entry
whose numerator and denominator have the smallest combined bit length, ties
going to the lowest ``(row, col)``.  ``"first"`` takes the first live row and
its leftmost entry; it exists so tests can check that results do not depend
on the pivot rule.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidComplex, NotACycle

Vector = dict

PIVOT_RULES = ("bitsize", "first")
_default_pivot = "bitsize"


def set_default_pivot(rule: str) -> str:
    """Switch the process-wide pivot rule; returns the previous one."""
    global _default_pivot
    if rule not in PIVOT_RULES:
        raise ValueError(f"unknown pivot rule {rule!r}")
    previous, _default_pivot = _default_pivot, rule
    return previous


def get_default_pivot() -> str:
    return _default_pivot


class NoSolution(Exception):
    """Raised by :func:`solve` when ``m x = b`` is inconsistent.

    ``certificate`` is a dense left null vector ``y`` of ``m`` with ``y·b != 0``.
    """

    def __init__(self, certificate):
        super().__init__("linear system has no solution")
        self.certificate = certificate


# ----------------------------------------------------------------------------
# vector helpers


def as_vector(v) -> Vector:
    """Coerce a dense sequence or a mapping into a sparse Fraction vector."""
    if isinstance(v, Mapping):
        items = v.items()
    else:
        items = enumerate(v)
    out = {}
    for i, c in items:
        if c:
            out[i] = Fraction(c)
    return out


def dense(v: Mapping, length: int) -> list:
    out = [Fraction(0)] * length
    for i, c in v.items():
        out[i] = c
    return out


def axpy(y: Vector, a, x: Mapping) -> None:
    """In place ``y += a*x`` keeping ``y`` free of zeros."""
    if not a:
        return
    for i, c in x.items():
        s = y.get(i, 0) + a * c
        if s:
            y[i] = s
        else:
            y.pop(i, None)


def combine(pairs: Iterable) -> Vector:
    """Sum of ``c * v`` over ``(c, v)`` pairs."""
    out: Vector = {}
    for c, v in pairs:
        axpy(out, c, v)
    return out


def dot(x: Mapping, y: Mapping):
    if len(x) > len(y):
        x, y = y, x
    return sum((c * y[i] for i, c in x.items() if i in y), Fraction(0))


def _bits(q: Fraction) -> int:
    return q.numerator.bit_length() + q.denominator.bit_length()


# ----------------------------------------------------------------------------
# matrices


class SparseMatrix:
    """Immutable sparse matrix over Q stored by rows."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries: Iterable = ()):
        rows = [dict() for _ in range(nrows)]
        for r, c, value in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            if (c in rows[r]):
                raise ValueError(f"duplicate entry ({r}, {c})")
            value = Fraction(value)
            if value:
                rows[r][c] = value
        self.nrows, self.ncols, self._rows = nrows, ncols, rows

    @classmethod
    def from_dense(cls, table: Sequence[Sequence]) -> "SparseMatrix":
        nrows = len(table)
        ncols = len(table[0]) if nrows else 0
        return cls(nrows, ncols, ((r, c, x) for r, row in enumerate(table)
                                  for c, x in enumerate(row) if x))

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping], ncols: int) -> "SparseMatrix":
        m = cls(0, ncols)
        m.nrows = len(rows)
        m._rows = [as_vector(r) for r in rows]
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[Mapping], nrows: int) -> "SparseMatrix":
        rows = [dict() for _ in range(nrows)]
        for c, col in enumerate(columns):
            for r, x in col.items():
                if x:
                    rows[r][c] = Fraction(x)
        m = cls(0, len(columns))
        m.nrows = nrows
        m._rows = rows
        return m

    @property
    def entries(self) -> list:
        return [(r, c, x) for r, row in enumerate(self._rows) for c, x in sorted(row.items())]

    def row(self, r: int) -> Vector:
        return dict(self._rows[r])

    def rows(self) -> list:
        return [dict(r) for r in self._rows]

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows, ((c, r, x) for r, c, x in self.entries))

    def matvec(self, x) -> Vector:
        x = as_vector(x)
        out = {}
        for r, row in enumerate(self._rows):
            s = dot(row, x)
            if s:
                out[r] = s
        return out

    def vecmat(self, y) -> Vector:
        out: Vector = {}
        for r, c in as_vector(y).items():
            axpy(out, c, self._rows[r])
        return out

    def to_dense(self) -> list:
        return [dense(r, self.ncols) for r in self._rows]

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self._rows))})"


# ----------------------------------------------------------------------------
# elimination


def _choose_pivot(live, rule):
    """Return the index into ``live`` and the column of the next pivot."""
    if rule == "first":
        best = min(range(len(live)), key=lambda k: live[k][0])
        return best, min(live[best][1])
    best = None
    for k, (origin, row, _) in enumerate(live):
        col = min(row, key=lambda c: (_bits(row[c]), c))
        key = (_bits(row[col]), origin, col)
        if best is None or key < best[0]:
            best = (key, k, col)
            if key[0] == 2:  # ±1 cannot be beaten and rows come in order
                break
    return best[1], best[2]


class EchelonForm:
    """Reduced row echelon form of a matrix, optionally with the row operations.

    ``pivots`` lists ``(col, row)`` with ``row[col] == 1`` and every other
    pivot column absent from ``row``.  With ``track=True`` each pivot row has a
    transform ``t`` (a combination of original rows) and ``left_null`` spans
    the left kernel, which is what :meth:`solve` needs for certificates.
    """

    def __init__(self, matrix: SparseMatrix, *, track: bool = False, pivot: str | None = None):
        rule = pivot or _default_pivot
        self.ncols = matrix.ncols
        self.nrows = matrix.nrows
        self.track = track
        live = []
        self.left_null = []
        for r, row in enumerate(matrix._rows):
            t = {r: Fraction(1)} if track else None
            if row:
                live.append((r, dict(row), t))
            elif track:
                self.left_null.append(t)
        done = []
        while live:
            k, col = _choose_pivot(live, rule)
            origin, prow, ptrans = live.pop(k)
            inv = 1 / prow[col]
            if inv != 1:
                prow = {c: x * inv for c, x in prow.items()}
                if track:
                    ptrans = {c: x * inv for c, x in ptrans.items()}
            still = []
            for o, row, t in live:
                f = row.get(col)
                if f:
                    axpy(row, -f, prow)
                    if track:
                        axpy(t, -f, ptrans)
                if row:
                    still.append((o, row, t))
                elif track:
                    self.left_null.append(t)
            live = still
            for entry in done:
                f = entry[1].get(col)
                if f:
                    axpy(entry[1], -f, prow)
                    if track:
                        axpy(entry[2], -f, ptrans)
            done.append((col, prow, ptrans))
        done.sort(key=lambda e: e[0])
        self.pivots = [(c, r) for c, r, _ in done]
        self.transforms = [t for _, _, t in done] if track else None

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def pivot_columns(self) -> list:
        return [c for c, _ in self.pivots]

    def kernel(self) -> list:
        """Sparse basis of the right kernel in canonical reduced form."""
        pivot_cols = {c for c, _ in self.pivots}
        basis = []
        for f in range(self.ncols):
            if f in pivot_cols:
                continue
            v = {f: Fraction(1)}
            for c, row in self.pivots:
                x = row.get(f)
                if x:
                    v[c] = -x
            basis.append(v)
        return canonical_basis(basis)

    def solve(self, b) -> Vector:
        """Sparse ``x`` with ``m x = b``; raises :class:`NoSolution`."""
        if not self.track:
            raise ValueError("EchelonForm built without track=True cannot solve")
        b = as_vector(b)
        for y in self.left_null:
            if dot(y, b):
                raise NoSolution(dense(y, self.nrows))
        x = {}
        for (c, _), t in zip(self.pivots, self.transforms):
            s = dot(t, b)
            if s:
                x[c] = s
        return x


def canonical_basis(vectors: Iterable[Mapping]) -> list:
    """Reduced echelon basis of the span: leading 1s, increasing leading positions.

    The result depends only on the span, never on the input order or pivot rule.
    """
    pivots: list = []  # (lead, vector) kept fully reduced
    for v in vectors:
        v = as_vector(v)
        for lead, w in pivots:
            f = v.get(lead)
            if f:
                axpy(v, -f, w)
        if not v:
            continue
        lead = min(v)
        inv = 1 / v[lead]
        v = {i: x * inv for i, x in v.items()}
        for _, w in pivots:
            f = w.get(lead)
            if f:
                axpy(w, -f, v)
        pivots.append((lead, v))
    pivots.sort(key=lambda p: p[0])
    return [v for _, v in pivots]


# ----------------------------------------------------------------------------
# public operations


def _matrix(m) -> SparseMatrix:
    if isinstance(m, SparseMatrix):
        return m
    return SparseMatrix.from_dense(m)


def rank(m, *, pivot: str | None = None) -> int:
    return EchelonForm(_matrix(m), pivot=pivot).rank


def kernel_basis(m, *, pivot: str | None = None) -> list:
    """Dense vectors spanning ``{x : m x = 0}`` in canonical echelon form."""
    m = _matrix(m)
    return [dense(v, m.ncols) for v in EchelonForm(m, pivot=pivot).kernel()]


def solve(m, b, *, pivot: str | None = None) -> list:
    """Dense ``x`` with ``m x = b``; raises :class:`NoSolution` with a certificate."""
    m = _matrix(m)
    b = as_vector(b)
    if b and max(b) >= m.nrows:
        raise ValueError("right-hand side longer than the number of rows")
    x = EchelonForm(m, track=True, pivot=pivot).solve(b)
    return dense(x, m.ncols)


class Quotient:
    """Coordinates on ``span(cycles) / span(boundaries)``.

    ``representatives`` are chosen among the canonical cycle basis vectors,
    in order, skipping those already in the span of the boundaries and the
    earlier choices.
    """

    def __init__(self, cycles: Sequence[Mapping], boundaries: Sequence[Mapping], *,
                 pivot: str | None = None):
        cyc = canonical_basis(cycles)
        bnd = canonical_basis(boundaries)
        span = IncrementalSpan(pivot)
        for v in cyc:
            span.add(v)
        for v in bnd:
            if span.express(v)[1]:
                raise InvalidComplex("a boundary vector is not in the span of the cycles")
        quotient_span = IncrementalSpan(pivot)
        for v in bnd:
            quotient_span.add(v)
        reps = []
        for v in cyc:
            if quotient_span.add(v, tag=len(reps)):
                reps.append(v)
        self.representatives = reps
        self.boundary_rank = len(bnd)
        self._span = quotient_span
        self.dimension = len(reps)

    def __call__(self, z) -> list:
        return self.coordinates(z)

    def coordinates(self, z) -> list:
        """Coefficients of ``z`` on the representatives, modulo boundaries."""
        combo, rest = self._span.express(as_vector(z))
        if rest:
            raise NotACycle("vector is not in the cycle space")
        coords = [Fraction(0)] * self.dimension
        for tag, c in combo.items():
            if tag is not None:
                coords[tag] += c
        return coords

    def is_boundary(self, z) -> bool:
        return not any(self.coordinates(z))


def quotient_coordinates(cycles, boundaries, *, pivot: str | None = None):
    """Return ``(dimension, projection)`` for ``span(cycles)/span(boundaries)``."""
    q = Quotient([as_vector(c) for c in cycles], [as_vector(b) for b in boundaries], pivot=pivot)
    return q.dimension, q


class IncrementalSpan:
    """A growing subspace kept in fully reduced echelon form.

    Each stored row remembers which added vectors it came from, so a vector in
    the span can be written back in terms of the added vectors.  Added vectors
    carry an optional ``tag``; :meth:`express` sums coefficients per tag
    (untagged inputs are collected under ``None``).
    """

    def __init__(self, pivot: str | None = None):
        self._rule = pivot or _default_pivot
        self._lead: dict = {}      # lead index -> position in _rows
        self._rows: list = []      # (lead, vector, combination over tags)

    def __len__(self):
        return len(self._rows)

    def reduce(self, v: Mapping) -> Vector:
        v = dict(v)
        for lead in [i for i in v if i in self._lead]:
            f = v.get(lead)
            if f:
                axpy(v, -f, self._rows[self._lead[lead]][1])
        return v

    def express(self, v: Mapping):
        """Return ``(combination, remainder)`` with ``v = Σ combination + remainder``."""
        v = dict(v)
        combo: dict = {}
        hits = [(self._lead[i], c) for i, c in v.items() if i in self._lead]
        for pos, c in hits:
            lead, row, tags = self._rows[pos]
            axpy(v, -c, row)
            for tag, x in tags.items():
                s = combo.get(tag, 0) + c * x
                if s:
                    combo[tag] = s
                else:
                    combo.pop(tag, None)
        return combo, v

    def add(self, v: Mapping, tag=None) -> bool:
        """Add ``v``; returns False (and changes nothing) when it is dependent."""
        combo, rest = self.express(as_vector(v))
        if not rest:
            return False
        tags = {tag: Fraction(1)}
        for t, c in combo.items():
            s = tags.get(t, 0) - c
            if s:
                tags[t] = s
            else:
                tags.pop(t, None)
        if self._rule == "first":
            lead = min(rest)
        else:
            lead = min(rest, key=lambda i: (_bits(rest[i]), i))
        inv = 1 / rest[lead]
        rest = {i: x * inv for i, x in rest.items()}
        tags = {t: x * inv for t, x in tags.items()}
        for pos, (l, row, rtags) in enumerate(self._rows):
            f = row.get(lead)
            if f:
                axpy(row, -f, rest)
                for t, x in tags.items():
                    s = rtags.get(t, 0) - f * x
                    if s:
                        rtags[t] = s
                    else:
                        rtags.pop(t, None)
        self._lead[lead] = len(self._rows)
        self._rows.append((lead, rest, tags))
        return True
