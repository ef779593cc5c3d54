"""Independent brute-force oracles used by the test-suite.

Nothing here imports the package's linear algebra: rank and kernels are
computed by plain dense elimination over Fractions, and the Sullivan-model
cohomology is computed directly on monomials.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# ---------------------------------------------------------------- dense linear algebra

def dense_rref(rows):
    """Reduced row echelon form of a list of lists; returns (rref rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        k = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def dense_rank(rows) -> int:
    return len(dense_rref(rows)[1]) if rows else 0


def det(m):
    n = len(m)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i in range(n):
            prod *= m[i][perm[i]]
            if not prod:
                break
        total += -prod if inv % 2 else prod
    return total


def rank_by_minors(m) -> int:
    """Largest k with a nonzero k×k minor."""
    rows, cols = len(m), len(m[0]) if m else 0
    for k in range(min(rows, cols), 0, -1):
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                if det([[m[i][j] for j in cs] for i in rs]):
                    return k
    return 0


# ---------------------------------------------------------------- free Lie dimensions

def tensor_words(degrees, n):
    """All words (tuples of generator indices) of total degree n."""
    out = []

    def go(prefix, left):
        if left == 0:
            out.append(tuple(prefix))
            return
        for i, d in enumerate(degrees):
            if d <= left:
                go(prefix + [i], left - d)
    go([], n)
    return out


def all_trees(degrees, n, _memo=None):
    """Every bracket tree (int leaf or pair) of total degree n."""
    memo = {} if _memo is None else _memo
    if n in memo:
        return memo[n]
    trees = [i for i, d in enumerate(degrees) if d == n]
    for k in range(1, n):
        for left in all_trees(degrees, k, memo):
            for right in all_trees(degrees, n - k, memo):
                trees.append((left, right))
    memo[n] = trees
    return trees


def tree_word_expansion(degrees, tree):
    if isinstance(tree, int):
        return {(tree,): 1}, degrees[tree]
    a, da = tree_word_expansion(degrees, tree[0])
    b, db = tree_word_expansion(degrees, tree[1])
    s = -1 if (da * db) % 2 else 1
    out = {}
    for u, cu in a.items():
        for w, cw in b.items():
            out[u + w] = out.get(u + w, 0) + cu * cw
            out[w + u] = out.get(w + u, 0) - s * cu * cw
    return {k: c for k, c in out.items() if c}, da + db


def free_lie_dimension(degrees, n, max_trees=4000) -> int:
    """dim of the degree-n part of the free graded Lie algebra, by tensor rank of all trees."""
    words = tensor_words(degrees, n)
    index = {w: i for i, w in enumerate(words)}
    trees = all_trees(degrees, n)[:max_trees]
    rows = []
    for t in trees:
        exp, _ = tree_word_expansion(degrees, t)
        row = [0] * len(words)
        for w, c in exp.items():
            row[index[w]] = c
        rows.append(row)
    return dense_rank(rows) if rows else 0


# ---------------------------------------------------------------- Sullivan algebras

class Sullivan:
    """A free graded-commutative algebra on named generators with a differential.

    Monomials are exponent tuples; odd generators have exponent 0 or 1.
    ``d`` maps a generator name to a polynomial {exponents: coefficient}.
    """

    def __init__(self, gens, d):
        self.names = [g for g, _ in gens]
        self.deg = [k for _, k in gens]
        self.d = {self.names.index(k): v for k, v in d.items()}

    def degree(self, mono):
        return sum(e * k for e, k in zip(mono, self.deg))

    def monomials(self, n):
        out = []

        def go(i, left, acc):
            if i == len(self.deg):
                if left == 0:
                    out.append(tuple(acc))
                return
            top = 1 if self.deg[i] % 2 else left // self.deg[i]
            for e in range(top + 1):
                if e * self.deg[i] <= left:
                    go(i + 1, left - e * self.deg[i], acc + [e])
        go(0, n, [])
        return out

    def mul_mono(self, m1, m2):
        """Product of two monomials: (sign, monomial) or (0, None)."""
        sgn = 1
        for i, e in enumerate(m1):
            if e == 0:
                continue
            # moving the factor x_i^e of m1 past the generators j < i in m2
            if self.deg[i] % 2:
                odd_before = sum(m2[j] for j in range(i) if self.deg[j] % 2)
                if odd_before % 2:
                    sgn = -sgn
        out = []
        for i, (a, b) in enumerate(zip(m1, m2)):
            if self.deg[i] % 2 and a + b > 1:
                return 0, None
            out.append(a + b)
        return sgn, tuple(out)

    def mul(self, p1, p2):
        out = {}
        for m1, c1 in p1.items():
            for m2, c2 in p2.items():
                s, m = self.mul_mono(m1, m2)
                if s:
                    out[m] = out.get(m, 0) + s * c1 * c2
        return {m: c for m, c in out.items() if c}

    def gen_poly(self, i):
        return {tuple(1 if j == i else 0 for j in range(len(self.deg))): Fraction(1)}

    def differential(self, mono):
        """Leibniz: d(x_1^{e_1} … ) summed over factors, Koszul signs."""
        out = {}
        prefix_deg = 0
        for i, e in enumerate(mono):
            if e and i in self.d:
                for t in range(e):
                    # x_i^e = x_i^t · x_i · x_i^{e-t-1}
                    left = tuple(mono[:i]) + (t,) + tuple(0 for _ in mono[i + 1:])
                    right = tuple(0 for _ in mono[:i]) + (e - t - 1,) + tuple(mono[i + 1:])
                    s0 = -1 if (prefix_deg + t * self.deg[i]) % 2 else 1
                    term = self.mul(self.mul({left: Fraction(1)}, self.d[i]), {right: Fraction(1)})
                    for m, c in term.items():
                        out[m] = out.get(m, 0) + s0 * c
            prefix_deg += e * self.deg[i]
        return {m: c for m, c in out.items() if c}

    def cohomology(self, top):
        """Per degree 1..top: a basis of cohomology given by monomial representatives.

        Works when cycles modulo boundaries admit monomial representatives
        chosen as the non-pivot monomials among cycle coordinates.
        Returns {degree: [(mono, poly)]} together with a projection function.
        """
        result = {}
        projections = {}
        for n in range(1, top + 1):
            monos = self.monomials(n)
            below = self.monomials(n - 1)
            above = self.monomials(n + 1)
            idx = {m: i for i, m in enumerate(monos)}
            aidx = {m: i for i, m in enumerate(above)}
            # cycles: kernel of d on degree n
            dmat = []
            for m in monos:
                row = [0] * len(above)
                for mm, c in self.differential(m).items():
                    row[aidx[mm]] = c
                dmat.append(row)
            # kernel vectors via RREF of the transpose
            cols = list(map(list, zip(*dmat))) if above and monos else []
            kernel = []
            if not above or not monos:
                kernel = [[Fraction(int(i == j)) for j in range(len(monos))] for i in range(len(monos))]
            else:
                rref, piv = dense_rref(cols)
                free = [j for j in range(len(monos)) if j not in piv]
                for f in free:
                    v = [Fraction(0)] * len(monos)
                    v[f] = Fraction(1)
                    for r, pc in zip(rref, piv):
                        v[pc] = -r[f]
                    kernel.append(v)
            bnd = []
            for m in below:
                row = [Fraction(0)] * len(monos)
                for mm, c in self.differential(m).items():
                    row[idx[mm]] += c
                if any(row):
                    bnd.append(row)
            # extend a basis of boundaries by cycles
            basis_rows = list(bnd)
            reps = []
            r0 = dense_rank(basis_rows) if basis_rows else 0
            for v in kernel:
                if dense_rank(basis_rows + [v]) > r0:
                    basis_rows.append(v)
                    r0 += 1
                    reps.append(v)
            result[n] = [{monos[i]: c for i, c in enumerate(v) if c} for v in reps]
            projections[n] = (monos, bnd, reps)
        self._proj = projections
        return result

    def class_coordinates(self, poly, n):
        """Coordinates of a cycle in the chosen cohomology basis of degree n."""
        monos, bnd, reps = self._proj[n]
        idx = {m: i for i, m in enumerate(monos)}
        target = [Fraction(0)] * len(monos)
        for m, c in poly.items():
            target[idx[m]] += c
        k = len(reps)
        # solve target = Σ x_i reps_i + Σ y_j bnd_j
        cols = reps + bnd
        if not cols:
            return []
        aug = [[cols[j][i] for j in range(len(cols))] + [target[i]] for i in range(len(monos))]
        rref, piv = dense_rref(aug)
        if len(cols) in piv:
            raise ValueError("not a cycle class")
        sol = [Fraction(0)] * len(cols)
        for row, pc in zip(rref, piv):
            sol[pc] = row[-1]
        return sol[:k]


def example_sullivan():
    """Λ(x1, x2, x3, y) with |x1| = 2, |x2| = |x3| = 3, |y| = 7 and dy = x1 x2 x3."""
    return Sullivan([("x1", 2), ("x2", 3), ("x3", 3), ("y", 7)],
                    {"y": {(1, 1, 1, 0): Fraction(1)}})


def quillen_quadratic_part(S: Sullivan, top: int):
    """Generators and quadratic differentials dual to the cup product.

    Returns (generators [(name, lie_degree)], d {name: {(i, j): coefficient}})
    where the class basis is the cohomology basis from ``S.cohomology``.  The
    coefficient of [w_i, w_j] (i < j) in d(w_k) is (-1)^{|x_i|} times the
    x_k-coordinate of x_i x_j, and of [w_i, w_i] half of that.
    """
    H = S.cohomology(top)
    classes = []
    for n in range(1, top + 1):
        for k, poly in enumerate(H[n]):
            classes.append((n, k, poly))
    gens = [(f"c{n}_{k}", n - 1) for n, k, _ in classes]
    d = {name: {} for name, _ in gens}
    for i, (ni, _, pi) in enumerate(classes):
        for j, (nj, _, pj) in enumerate(classes):
            if j < i or ni + nj > top:
                continue
            prod = S.mul(pi, pj)
            coords = S.class_coordinates(prod, ni + nj) if prod else []
            for k, c in enumerate(coords):
                if not c:
                    continue
                target = next(t for t, (n, kk, _) in enumerate(classes) if n == ni + nj and kk == k)
                coef = Fraction(c) * (-1 if ni % 2 else 1)
                if i == j:
                    coef /= 2
                d[gens[target][0]][(i, j)] = d[gens[target][0]].get((i, j), 0) + coef
    return gens, d, classes


def pbw_lie_dimensions(degrees, top):
    """dim L_n for n <= top from the PBW identity U(L(V)) = T(V).

    The tensor algebra has Hilbert series 1/(1 - Σ t^{d_i}); the enveloping
    algebra of a graded Lie algebra has Π_{n odd}(1+t^n)^{l_n} / Π_{n even}(1-t^n)^{l_n}.
    Both are expanded as truncated integer power series and l_n is read off
    degree by degree.
    """
    tensor = [0] * (top + 1)
    tensor[0] = 1
    for n in range(1, top + 1):
        tensor[n] = sum(tensor[n - d] for d in degrees if d <= n)

    def mul(a, b):
        out = [0] * (top + 1)
        for i, x in enumerate(a):
            if x:
                for j in range(top + 1 - i):
                    out[i + j] += x * b[j]
        return out

    def factor(n, power):
        step = [0] * (top + 1)
        if n % 2:
            step[0] = step[n] = 1                     # 1 + t^n
        else:
            step = [1 if k % n == 0 else 0 for k in range(top + 1)]   # 1/(1 - t^n)
        series = [1] + [0] * top
        for _ in range(power):
            series = mul(series, step)
        return series

    dims = {}
    envelope = [1] + [0] * top
    for n in range(1, top + 1):
        # the new factor adds exactly l_n to the coefficient of t^n
        dims[n] = tensor[n] - envelope[n]
        envelope = mul(envelope, factor(n, dims[n]))
    return dims
