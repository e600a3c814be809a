"""Differential graded algebras, coalgebras, modules and comodules.

Structure maps are stored as functions on basis keys with memoisation, so a
truncated object only ever evaluates products and diagonals that land inside
its window.  ``mul_map``/``comul_map`` materialise them as homogeneous maps
for serialisation and blockwise verification.
"""
from __future__ import annotations

from itertools import combinations, product
from math import comb
from typing import Callable, Mapping, Sequence

from .exact_linear import CoefficientRing, ExactMatrix, Scalar, kernel_basis, solve
from .graded import (ChainComplex, GradedModule, HomModule, HomogeneousMap, Key, TensorModule,
                     TruncationWindow, Vector, WindowError, hom_complex, sign, vec_add_into,
                     vec_clean)

PairVector = dict[tuple[Key, Key], Scalar]


class StructureError(ValueError):
    """A structure map violates one of its defining identities."""


def _pv_clean(pv: PairVector, ring: CoefficientRing) -> PairVector:
    out = {}
    for k, v in pv.items():
        v = ring.reduce(v)
        if v != 0:
            out[k] = v
    return out


def _zero_degree(module: GradedModule, q: int) -> bool:
    dim = module.dim(q)
    if dim is None:
        raise WindowError(f"degree {q} is outside the truncation window")
    return dim == 0


# --------------------------------------------------------------------------
# algebras


class DGAlgebra:
    def __init__(self, complex: ChainComplex, mul_fn: Callable[[Key, Key], Mapping[Key, Scalar]],
                 unit: Mapping[Key, Scalar], aug: Mapping[Key, Scalar] | None = None,
                 name: str = "A") -> None:
        self.complex = complex
        self.module = complex.module
        self.ring = complex.ring
        self._mul_fn = mul_fn
        self._cache: dict[tuple[Key, Key], Vector] = {}
        self.unit = dict(unit)
        self.aug = None if aug is None else {k: v for k, v in aug.items() if v != 0}
        self.name = name
        self.diagonal: "DGCoalgebra | None" = None

    @property
    def d(self) -> HomogeneousMap:
        return self.complex.d

    def mul_keys(self, a: Key, b: Key) -> Vector:
        q = a[0] + b[0]
        if _zero_degree(self.module, q):
            return {}
        key = (a, b)
        hit = self._cache.get(key)
        if hit is None:
            hit = vec_clean(dict(self._mul_fn(a, b)), self.ring)
            self._cache[key] = hit
        return hit

    def mul(self, x: Mapping[Key, Scalar], y: Mapping[Key, Scalar]) -> Vector:
        acc: Vector = {}
        for a, ca in x.items():
            for b, cb in y.items():
                vec_add_into(acc, self.mul_keys(a, b), ca * cb)
        return vec_clean(acc, self.ring)

    def augment(self, x: Mapping[Key, Scalar]) -> Scalar:
        if self.aug is None:
            raise StructureError(f"{self.name} has no augmentation")
        return self.ring.reduce(sum(self.aug.get(k, 0) * v for k, v in x.items()))

    @property
    def unit_key(self) -> Key:
        """The basis key of the unit (requires an adapted basis)."""
        if len(self.unit) != 1 or next(iter(self.unit.values())) != 1:
            raise StructureError(f"{self.name}: unit is not a basis element")
        return next(iter(self.unit))

    def is_adapted(self) -> bool:
        if self.aug is None or len(self.unit) != 1:
            return False
        u = next(iter(self.unit))
        return self.unit[u] == 1 and self.aug == {u: 1}

    def ideal_keys(self, q: int) -> list[Key]:
        """Basis of the augmentation ideal in degree ``q`` (adapted bases only)."""
        if not self.is_adapted():
            raise StructureError(f"{self.name}: augmentation ideal needs an adapted basis")
        u = self.unit_key
        return [k for k in self.module.keys(q) if k != u]

    def mul_map(self) -> HomogeneousMap:
        T = TensorModule(self.module, self.module)

        def fn(key: Key) -> Vector:
            a, b = T.pair(key)
            return self.mul_keys(a, b)

        return HomogeneousMap.from_function(T, self.module, 0, fn)

    def check(self, max_failures: int = 1) -> list[str]:
        """Associativity, unit, Leibniz and augmentation identities on the window."""
        fails: list[str] = []
        M = self.module
        keys = M.keys()
        ring = self.ring

        def known(*degs: int) -> bool:
            return all(M.dim(q) is not None for q in degs)

        for a in keys:
            if self.mul(self.unit, {a: 1}) != {a: 1} or self.mul({a: 1}, self.unit) != {a: 1}:
                fails.append(f"{self.name}: unit law fails at degree {a[0]}, basis {M.label(a)}")
                break
        for a in keys:
            for b in keys:
                if not known(a[0] + b[0], a[0] + b[0] - 1):
                    continue
                ab = self.mul_keys(a, b)
                if self.d.known(a[0] + b[0]) and self.d.known(a[0]) and self.d.known(b[0]):
                    lhs = self.d.apply(ab)
                    rhs = self.mul(self.d.apply_key(a), {b: 1})
                    vec_add_into(rhs, self.mul({a: 1}, self.d.apply_key(b)), sign(a[0]))
                    if vec_clean(rhs, ring) != lhs:
                        fails.append(f"{self.name}: Leibniz rule fails at degree {a[0] + b[0]}, "
                                     f"basis {M.label(a)}·{M.label(b)}")
                if self.aug is not None and a[0] == 0 and b[0] == 0:
                    if self.augment(ab) != ring.reduce(self.augment({a: 1}) * self.augment({b: 1})):
                        fails.append(f"{self.name}: augmentation not multiplicative at {M.label(a)}·{M.label(b)}")
                for c in keys:
                    if not known(a[0] + b[0] + c[0]):
                        continue
                    if self.mul(ab, {c: 1}) != self.mul({a: 1}, self.mul_keys(b, c)):
                        fails.append(f"{self.name}: associativity fails at degree {a[0] + b[0] + c[0]}, "
                                     f"basis {M.label(a)}·{M.label(b)}·{M.label(c)}")
                        break
                if max_failures and len(fails) >= max_failures:
                    return fails
        if self.aug is not None:
            if self.augment(self.unit) != 1:
                fails.append(f"{self.name}: augmentation does not send the unit to 1")
            for k in self.module.keys(1):
                if self.d.known(1) and self.augment(self.d.apply_key(k)) != 0:
                    fails.append(f"{self.name}: augmentation is not a chain map at {M.label(k)}")
                    break
        for k, _ in self.unit.items():
            if self.d.known(0) and self.d.apply(self.unit):
                fails.append(f"{self.name}: unit is not a cycle")
            break
        return fails[:max_failures] if max_failures else fails


class DGCoalgebra:
    def __init__(self, complex: ChainComplex, comul_fn: Callable[[Key], Mapping[tuple[Key, Key], Scalar]],
                 counit: Mapping[Key, Scalar], coaug: Mapping[Key, Scalar] | None = None,
                 name: str = "C") -> None:
        self.complex = complex
        self.module = complex.module
        self.ring = complex.ring
        self._comul_fn = comul_fn
        self._cache: dict[Key, PairVector] = {}
        self.counit = {k: v for k, v in counit.items() if v != 0}
        self.coaug = None if coaug is None else dict(coaug)
        self.name = name
        self.product: DGAlgebra | None = None

    @property
    def d(self) -> HomogeneousMap:
        return self.complex.d

    def comul_key(self, c: Key) -> PairVector:
        hit = self._cache.get(c)
        if hit is None:
            hit = _pv_clean(dict(self._comul_fn(c)), self.ring)
            self._cache[c] = hit
        return hit

    def comul(self, x: Mapping[Key, Scalar]) -> PairVector:
        acc: PairVector = {}
        for c, v in x.items():
            for pr, w in self.comul_key(c).items():
                acc[pr] = acc.get(pr, 0) + v * w
        return _pv_clean(acc, self.ring)

    def counit_of(self, x: Mapping[Key, Scalar]) -> Scalar:
        return self.ring.reduce(sum(self.counit.get(k, 0) * v for k, v in x.items()))

    @property
    def coaug_key(self) -> Key:
        if self.coaug is None or len(self.coaug) != 1 or next(iter(self.coaug.values())) != 1:
            raise StructureError(f"{self.name}: coaugmentation is not a basis element")
        return next(iter(self.coaug))

    def is_adapted(self) -> bool:
        if self.coaug is None or len(self.coaug) != 1:
            return False
        u = next(iter(self.coaug))
        return self.coaug[u] == 1 and self.counit == {u: 1}

    def coideal_keys(self, q: int) -> list[Key]:
        u = self.coaug_key
        if not self.is_adapted():
            raise StructureError(f"{self.name}: coaugmentation coideal needs an adapted basis")
        return [k for k in self.module.keys(q) if k != u]

    def reduced_comul_key(self, c: Key) -> PairVector:
        """``Δc − 1⊗c − c⊗1`` for ``c`` in the coideal (adapted bases)."""
        u = self.coaug_key
        if c == u:
            return {}
        return {pr: v for pr, v in self.comul_key(c).items() if pr[0] != u and pr[1] != u}

    def comul_map(self) -> HomogeneousMap:
        T = TensorModule(self.module, self.module)

        def fn(key: Key) -> Vector:
            out: Vector = {}
            for (a, b), v in self.comul_key(key).items():
                k = T.lookup(a, b)
                if k is None:
                    raise WindowError("diagonal leaves the tensor window")
                out[k] = v
            return out

        return HomogeneousMap.from_function(self.module, T, 0, fn,
                                            [q for q in self.module.degrees() if q in T.window])

    def check(self, max_failures: int = 1) -> list[str]:
        fails: list[str] = []
        M = self.module
        ring = self.ring
        for c in M.keys():
            dc = self.comul_key(c)
            left: Vector = {}
            right: Vector = {}
            for (a, b), v in dc.items():
                ea = self.counit.get(a, 0)
                if ea:
                    left[b] = left.get(b, 0) + ea * v
                eb = self.counit.get(b, 0)
                if eb:
                    right[a] = right.get(a, 0) + eb * v
            if vec_clean(left, ring) != {c: 1} or vec_clean(right, ring) != {c: 1}:
                fails.append(f"{self.name}: counit law fails at degree {c[0]}, basis {M.label(c)}")
            # coassociativity
            lhs: dict[tuple[Key, Key, Key], Scalar] = {}
            rhs: dict[tuple[Key, Key, Key], Scalar] = {}
            for (a, b), v in dc.items():
                for (a1, a2), w in self.comul_key(a).items():
                    lhs[(a1, a2, b)] = lhs.get((a1, a2, b), 0) + v * w
                for (b1, b2), w in self.comul_key(b).items():
                    rhs[(a, b1, b2)] = rhs.get((a, b1, b2), 0) + v * w
            if _pv_clean(lhs, ring) != _pv_clean(rhs, ring):  # type: ignore[arg-type]
                fails.append(f"{self.name}: coassociativity fails at degree {c[0]}, basis {M.label(c)}")
            # co-Leibniz: Δd = (d⊗1 + 1⊗d)Δ
            if self.d.known(c[0]) and all(self.d.known(a[0]) and self.d.known(b[0]) for a, b in dc):
                lhs2 = self.comul(self.d.apply_key(c))
                rhs2: PairVector = {}
                for (a, b), v in dc.items():
                    for ka, va in self.d.apply_key(a).items():
                        rhs2[(ka, b)] = rhs2.get((ka, b), 0) + v * va
                    s = sign(a[0])
                    for kb, vb in self.d.apply_key(b).items():
                        rhs2[(a, kb)] = rhs2.get((a, kb), 0) + s * v * vb
                if lhs2 != _pv_clean(rhs2, ring):
                    fails.append(f"{self.name}: diagonal is not a chain map at degree {c[0]}, basis {M.label(c)}")
            if max_failures and len(fails) >= max_failures:
                return fails
        if self.coaug is not None:
            if self.counit_of(self.coaug) != 1:
                fails.append(f"{self.name}: counit∘coaugmentation ≠ id")
            if self.d.known(0) and self.d.apply(self.coaug):
                fails.append(f"{self.name}: coaugmentation is not a cycle")
            if self.comul(self.coaug) != _pv_clean({(a, b): va * vb for a, va in self.coaug.items()
                                                    for b, vb in self.coaug.items()}, ring):
                fails.append(f"{self.name}: coaugmentation is not a coalgebra map")
        return fails[:max_failures] if max_failures else fails


# --------------------------------------------------------------------------
# modules and comodules


class DGModule:
    """Left (``a·n``) or right (``n·a``) differential graded module."""

    def __init__(self, algebra: DGAlgebra, complex: ChainComplex,
                 act_fn: Callable[[Key, Key], Mapping[Key, Scalar]], side: str = "left",
                 name: str = "N") -> None:
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        if algebra.ring != complex.ring:
            raise ValueError("ring mismatch")
        self.algebra = algebra
        self.complex = complex
        self.module = complex.module
        self.ring = complex.ring
        self.side = side
        self.name = name
        self._act_fn = act_fn
        self._cache: dict[tuple[Key, Key], Vector] = {}

    @property
    def d(self) -> HomogeneousMap:
        return self.complex.d

    def act_keys(self, a: Key, n: Key) -> Vector:
        """Action of algebra basis ``a`` on module basis ``n`` (on the declared side)."""
        if _zero_degree(self.module, a[0] + n[0]):
            return {}
        key = (a, n)
        hit = self._cache.get(key)
        if hit is None:
            hit = vec_clean(dict(self._act_fn(a, n)), self.ring)
            self._cache[key] = hit
        return hit

    def act(self, a: Mapping[Key, Scalar], n: Mapping[Key, Scalar]) -> Vector:
        acc: Vector = {}
        for ka, ca in a.items():
            for kn, cn in n.items():
                vec_add_into(acc, self.act_keys(ka, kn), ca * cn)
        return vec_clean(acc, self.ring)

    def act_on(self, a: Mapping[Key, Scalar], n: Mapping[Key, Scalar]) -> Vector:
        """Action of ``a`` on ``n`` regardless of the side the module is declared on."""
        return self.act(a, n) if self.side == "left" else self.act(n, a)

    def check(self) -> list[str]:
        A, M, ring = self.algebra, self.module, self.ring
        right = self.side == "right"
        for n in M.keys():
            if self.act_on(A.unit, {n: 1}) != {n: 1}:
                return [f"{self.name}: unit acts nontrivially on {M.label(n)}"]
        akeys = A.module.keys()
        for a in akeys:
            for n in M.keys():
                q = a[0] + n[0]
                if M.dim(q) is None:
                    continue
                an = self.act_on({a: 1}, {n: 1})
                if M.dim(q - 1) is not None and A.d.known(a[0]) and self.d.known(n[0]) and self.d.known(q):
                    lhs = self.d.apply(an)
                    rhs = self.act_on(A.d.apply_key(a), {n: 1})
                    s = sign(n[0]) if right else 1
                    rhs = {k: s * v for k, v in rhs.items()}
                    vec_add_into(rhs, self.act_on({a: 1}, self.d.apply_key(n)), 1 if right else sign(a[0]))
                    if vec_clean(rhs, ring) != lhs:
                        return [f"{self.name}: action is not a chain map at degree {q}, "
                                f"basis {A.module.label(a)}, {M.label(n)}"]
                for b in akeys:
                    if M.dim(q + b[0]) is None or A.module.dim(a[0] + b[0]) is None:
                        continue
                    if right:
                        lhs = self.act_on({b: 1}, an)
                        rhs = self.act_on(A.mul_keys(a, b), {n: 1})
                    else:
                        lhs = self.act_on({b: 1}, an)
                        rhs = self.act_on(A.mul_keys(b, a), {n: 1})
                    if lhs != rhs:
                        return [f"{self.name}: action is not associative at basis "
                                f"{A.module.label(a)}, {A.module.label(b)}, {M.label(n)}"]
        return []


class DGComodule:
    """Left (``m ↦ Σ c⊗m'``) or right (``m ↦ Σ m'⊗c``) differential graded comodule."""

    def __init__(self, coalgebra: DGCoalgebra, complex: ChainComplex,
                 coact_fn: Callable[[Key], Mapping[tuple[Key, Key], Scalar]], side: str = "left",
                 name: str = "M") -> None:
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        self.coalgebra = coalgebra
        self.complex = complex
        self.module = complex.module
        self.ring = complex.ring
        self.side = side
        self.name = name
        self._coact_fn = coact_fn
        self._cache: dict[Key, PairVector] = {}

    @property
    def d(self) -> HomogeneousMap:
        return self.complex.d

    def coact_key(self, m: Key) -> PairVector:
        hit = self._cache.get(m)
        if hit is None:
            hit = _pv_clean(dict(self._coact_fn(m)), self.ring)
            self._cache[m] = hit
        return hit

    def coact(self, x: Mapping[Key, Scalar]) -> PairVector:
        acc: PairVector = {}
        for m, v in x.items():
            for pr, w in self.coact_key(m).items():
                acc[pr] = acc.get(pr, 0) + v * w
        return _pv_clean(acc, self.ring)

    def check(self) -> list[str]:
        C, M, ring = self.coalgebra, self.module, self.ring
        for m in M.keys():
            cm = self.coact_key(m)
            counit: Vector = {}
            lhs: dict = {}
            rhs: dict = {}
            for (x, y), v in cm.items():
                c, mm = (x, y) if self.side == "left" else (y, x)
                e = C.counit.get(c, 0)
                if e:
                    counit[mm] = counit.get(mm, 0) + e * v
                if self.side == "left":
                    for (c1, c2), w in C.comul_key(c).items():
                        lhs[(c1, c2, mm)] = lhs.get((c1, c2, mm), 0) + v * w
                    for (c2, m2), w in self.coact_key(mm).items():
                        rhs[(c, c2, m2)] = rhs.get((c, c2, m2), 0) + v * w
                else:
                    for (c1, c2), w in C.comul_key(c).items():
                        lhs[(mm, c1, c2)] = lhs.get((mm, c1, c2), 0) + v * w
                    for (m2, c1), w in self.coact_key(mm).items():
                        rhs[(m2, c1, c)] = rhs.get((m2, c1, c), 0) + v * w
            if vec_clean(counit, ring) != {m: 1}:
                return [f"{self.name}: counit law fails at degree {m[0]}, basis {M.label(m)}"]
            if _pv_clean(lhs, ring) != _pv_clean(rhs, ring):
                return [f"{self.name}: coaction is not coassociative at degree {m[0]}, basis {M.label(m)}"]
            if self.d.known(m[0]) and all(C.d.known(a[0]) and self.d.known(b[0]) or
                                           C.d.known(b[0]) and self.d.known(a[0]) for a, b in cm):
                lhs2 = self.coact(self.d.apply_key(m))
                rhs2: PairVector = {}
                for (x, y), v in cm.items():
                    dx = (C.d if self.side == "left" else self.d).apply_key(x)
                    dy = (self.d if self.side == "left" else C.d).apply_key(y)
                    for kx, vx in dx.items():
                        rhs2[(kx, y)] = rhs2.get((kx, y), 0) + v * vx
                    s = sign(x[0])
                    for ky, vy in dy.items():
                        rhs2[(x, ky)] = rhs2.get((x, ky), 0) + s * v * vy
                if lhs2 != _pv_clean(rhs2, ring):
                    return [f"{self.name}: coaction is not a chain map at degree {m[0]}, basis {M.label(m)}"]
        return []


def regular_module(A: DGAlgebra, side: str = "left") -> DGModule:
    if side == "left":
        return DGModule(A, A.complex, A.mul_keys, "left", A.name)
    return DGModule(A, A.complex, lambda n, a: A.mul_keys(n, a), "right", A.name)


def regular_comodule(C: DGCoalgebra, side: str = "left") -> DGComodule:
    return DGComodule(C, C.complex, C.comul_key, side, C.name)


def trivial_module(A: DGAlgebra, side: str = "left", degree: int = 0) -> DGModule:
    """The ground ring as a module through the augmentation."""
    if A.aug is None:
        raise StructureError(f"{A.name} has no augmentation")
    R = ChainComplex.zero_differential(GradedModule(A.ring, TruncationWindow(degree, degree),
                                                    {degree: ["1"]}, True, True))
    aug = A.aug

    def act(x: Key, y: Key) -> Vector:
        a = x if side == "left" else y
        n = y if side == "left" else x
        v = aug.get(a, 0)
        return {n: v} if v else {}

    return DGModule(A, R, act, side, "R")


def trivial_comodule(C: DGCoalgebra, side: str = "left", degree: int = 0) -> DGComodule:
    """The ground ring as a comodule through the coaugmentation."""
    if C.coaug is None:
        raise StructureError(f"{C.name} has no coaugmentation")
    R = ChainComplex.zero_differential(GradedModule(C.ring, TruncationWindow(degree, degree),
                                                    {degree: ["1"]}, True, True))
    coaug = C.coaug

    def coact(m: Key) -> PairVector:
        if side == "left":
            return {(c, m): v for c, v in coaug.items()}
        return {(m, c): v for c, v in coaug.items()}

    return DGComodule(C, R, coact, side, "R")


# --------------------------------------------------------------------------
# standard constructions


def _bounded(ring: CoefficientRing, basis: Mapping[int, Sequence[str]]) -> GradedModule:
    degs = [q for q, l in basis.items() if l] or [0]
    return GradedModule(ring, TruncationWindow(min(degs + [0]), max(degs)), basis, True, True)


def exterior_algebra(generator_degrees: Sequence[int], names: Sequence[str] | None = None,
                     ring: CoefficientRing | None = None) -> DGAlgebra:
    """Exterior algebra on odd generators with the Hopf diagonal making them primitive."""
    ring = ring or CoefficientRing.integers()
    for q in generator_degrees:
        if q <= 0 or q % 2 == 0:
            raise ValueError(f"exterior generators must have odd positive degree, got {q}")
    g = len(generator_degrees)
    names = list(names) if names is not None else _default_names("x", generator_degrees)
    if len(set(names)) != g:
        raise ValueError("generator names must be distinct")
    monos: dict[int, list[tuple[int, ...]]] = {}
    for r in range(g + 1):
        for S in combinations(range(g), r):
            monos.setdefault(sum(generator_degrees[i] for i in S), []).append(S)
    for q in monos:
        monos[q].sort()
    basis = {q: ["".join(names[i] for i in S) or "1" for S in lst] for q, lst in monos.items()}
    M = _bounded(ring, basis)
    index = {S: (q, i) for q, lst in monos.items() for i, S in enumerate(lst)}
    mono_of = {v: k for k, v in index.items()}
    degs = generator_degrees

    def mul(a: Key, b: Key) -> Vector:
        S, T = mono_of[a], mono_of[b]
        if set(S) & set(T):
            return {}
        s = 1
        for i in S:
            for j in T:
                if i > j:
                    s = -s
        return {index[tuple(sorted(S + T))]: s}

    def comul(c: Key) -> PairVector:
        S = mono_of[c]
        out: PairVector = {}
        for r in range(len(S) + 1):
            for T in combinations(S, r):
                U = tuple(i for i in S if i not in T)
                s = 1
                for i in T:
                    for j in U:
                        if j < i and degs[i] * degs[j] % 2:
                            s = -s
                out[(index[T], index[U])] = s
        return out

    X = ChainComplex.zero_differential(M)
    one = index[()]
    A = DGAlgebra(X, mul, {one: 1}, {one: 1}, name=f"Λ[{','.join(names)}]")
    A.diagonal = DGCoalgebra(X, comul, {one: 1}, {one: 1}, name=A.name)
    A.diagonal.product = A
    A.generators = [index[(i,)] for i in range(g)]  # type: ignore[attr-defined]
    return A


def _default_names(prefix: str, degrees: Sequence[int]) -> list[str]:
    names = []
    for q in degrees:
        base = f"{prefix}{q}"
        name = base
        k = 2
        while name in names:
            name = f"{base}_{k}"
            k += 1
        names.append(name)
    return names


def _gamma_label(i: int, name: str) -> str:
    return "1" if i == 0 else f"γ{i}({name})"


def divided_power_bialgebra(gen_degree: int, window: TruncationWindow | int, name: str = "u",
                            ring: CoefficientRing | None = None) -> DGAlgebra:
    """Divided power Hopf algebra Γ[name] truncated to the window; ``.diagonal`` is its coalgebra."""
    ring = ring or CoefficientRing.integers()
    if gen_degree <= 0 or gen_degree % 2:
        raise ValueError(f"divided power generator must have even positive degree, got {gen_degree}")
    w = window if isinstance(window, TruncationWindow) else TruncationWindow(0, window)
    if w.lo > 0:
        raise ValueError("divided power window must contain degree 0")
    top = w.hi // gen_degree
    M = GradedModule(ring, w, {i * gen_degree: [_gamma_label(i, name)] for i in range(top + 1)}, True, False)

    def mul(a: Key, b: Key) -> Vector:
        i, j = a[0] // gen_degree, b[0] // gen_degree
        return {((i + j) * gen_degree, 0): comb(i + j, j)}

    def comul(c: Key) -> PairVector:
        i = c[0] // gen_degree
        return {((j * gen_degree, 0), ((i - j) * gen_degree, 0)): 1 for j in range(i + 1)}

    X = ChainComplex.zero_differential(M)
    A = DGAlgebra(X, mul, {(0, 0): 1}, {(0, 0): 1}, name=f"Γ[{name}]")
    A.diagonal = DGCoalgebra(X, comul, {(0, 0): 1}, {(0, 0): 1}, name=f"Γ[{name}]")
    A.diagonal.product = A
    return A


def truncated_divided_coalgebra(n: int, gen_degree: int = 2, name: str = "w",
                                ring: CoefficientRing | None = None) -> DGCoalgebra:
    """Subcoalgebra of Γ[name] spanned by γ_0, …, γ_{n-1}."""
    ring = ring or CoefficientRing.integers()
    if n < 1:
        raise ValueError("n must be positive")
    if gen_degree <= 0 or gen_degree % 2:
        raise ValueError(f"divided power generator must have even positive degree, got {gen_degree}")
    M = GradedModule(ring, TruncationWindow(0, (n - 1) * gen_degree),
                     {i * gen_degree: [_gamma_label(i, name)] for i in range(n)}, True, True)

    def comul(c: Key) -> PairVector:
        i = c[0] // gen_degree
        return {((j * gen_degree, 0), ((i - j) * gen_degree, 0)): 1 for j in range(i + 1)}

    return DGCoalgebra(ChainComplex.zero_differential(M), comul, {(0, 0): 1}, {(0, 0): 1},
                       name=f"Γ_{n - 1}[{name}]")


def symmetric_coalgebra(cogen_degrees: Sequence[int], window: TruncationWindow | int,
                        names: Sequence[str] | None = None,
                        ring: CoefficientRing | None = None) -> DGCoalgebra:
    """Cofree cocommutative coalgebra on even cogenerators, divided-power monomial basis."""
    ring = ring or CoefficientRing.integers()
    for q in cogen_degrees:
        if q <= 0 or q % 2:
            raise ValueError(f"symmetric coalgebra cogenerators must have even positive degree, got {q}")
    w = window if isinstance(window, TruncationWindow) else TruncationWindow(0, window)
    names = list(names) if names is not None else _default_names("y", cogen_degrees)
    g = len(cogen_degrees)
    monos: dict[int, list[tuple[int, ...]]] = {}

    def rec(i: int, acc: tuple[int, ...], deg: int) -> None:
        if i == g:
            monos.setdefault(deg, []).append(acc)
            return
        e = 0
        while deg + e * cogen_degrees[i] <= w.hi:
            rec(i + 1, acc + (e,), deg + e * cogen_degrees[i])
            e += 1

    rec(0, (), 0)
    for q in monos:
        monos[q].sort(reverse=True)

    def label(e: tuple[int, ...]) -> str:
        parts = [_gamma_label(k, names[i]) for i, k in enumerate(e) if k]
        return "".join(parts) or "1"

    basis = {q: [label(e) for e in lst] for q, lst in monos.items()}
    M = GradedModule(ring, w, basis, True, not cogen_degrees)
    index = {e: (q, i) for q, lst in monos.items() for i, e in enumerate(lst)}
    mono_of = {v: k for k, v in index.items()}

    def comul(c: Key) -> PairVector:
        e = mono_of[c]
        out: PairVector = {}
        for b in product(*(range(k + 1) for k in e)):
            rest = tuple(k - j for k, j in zip(e, b))
            out[(index[b], index[rest])] = 1
        return out

    one = index[(0,) * g]
    C = DGCoalgebra(ChainComplex.zero_differential(M), comul, {one: 1}, {one: 1},
                    name=f"Σ′[{','.join(names)}]")
    C.cogenerators = [index[tuple(1 if j == i else 0 for j in range(g))] for i in range(g)]  # type: ignore[attr-defined]
    return C


# --------------------------------------------------------------------------
# endomorphism algebras


def endomorphism_dga(N: ChainComplex) -> DGAlgebra:
    """End(N): elementary maps ``x ↦ y``, composition product, Hom differential.

    ``.evaluation`` is N as a left End(N)-module.
    """
    H = hom_complex(N, N)
    E: HomModule = H.module  # type: ignore[assignment]

    def mul(a: Key, b: Key) -> Vector:
        x1, y1 = E.elems[a[0]][a[1]]
        x2, y2 = E.elems[b[0]][b[1]]
        if y2 != x1:
            return {}
        return {E.elem_index[(x2, y1)]: 1}

    unit = {E.elem_index[(k, k)]: 1 for k in N.module.keys()}
    A = DGAlgebra(H, mul, unit, None, name="End(N)")

    def act(a: Key, n: Key) -> Vector:
        x, y = E.elems[a[0]][a[1]]
        return {y: 1} if x == n else {}

    A.evaluation = DGModule(A, N, act, "left", "N")  # type: ignore[attr-defined]
    return A


def opposite_algebra(A: DGAlgebra) -> DGAlgebra:
    """``a * b = (-1)^{|a||b|} b a``."""
    def mul(a: Key, b: Key) -> Vector:
        s = sign(a[0] * b[0])
        return {k: s * v for k, v in A.mul_keys(b, a).items()}

    return DGAlgebra(A.complex, mul, A.unit, A.aug, name=f"{A.name}^op")


def opposite_module(M: DGModule, Aop: DGAlgebra) -> DGModule:
    """Left A-module as a right A^op-module: ``n·a = (-1)^{|a||n|} a n`` (and conversely)."""
    if M.side == "left":
        def act(n: Key, a: Key) -> Vector:
            s = sign(a[0] * n[0])
            return {k: s * v for k, v in M.act_keys(a, n).items()}
        return DGModule(Aop, M.complex, act, "right", M.name)

    def act_l(a: Key, n: Key) -> Vector:
        s = sign(a[0] * n[0])
        return {k: s * v for k, v in M.act_keys(n, a).items()}
    return DGModule(Aop, M.complex, act_l, "left", M.name)


def endomorphism_dga_op(N: ChainComplex) -> DGAlgebra:
    """End(N)^op with ``.action``: N as a right End(N)^op-module."""
    E = endomorphism_dga(N)
    Eop = opposite_algebra(E)
    Eop.evaluation = E.evaluation  # type: ignore[attr-defined]
    Eop.action = opposite_module(E.evaluation, Eop)  # type: ignore[attr-defined]
    Eop.plain = E  # type: ignore[attr-defined]
    return Eop


def nonnegative_endo_dga(N: ChainComplex) -> DGAlgebra:
    """Connective cover of End(N): all maps of positive degree plus the degree-zero chain maps.

    The basis is adapted to the augmentation (restriction to ``N_0``): the
    identity followed by a lattice basis of the degree-zero cycles that vanish
    on ``N_0``.  Requires ``N`` nonnegative with ``N_0`` of rank one and no
    differential into ``N_0``.
    """
    Mod = N.module
    if not Mod.bounded_below or Mod.window.lo < 0 or any(q < 0 for q in Mod.degrees()):
        raise StructureError("augmented endomorphism algebra needs a nonnegative complex")
    if len(Mod.labels(0)) != 1:
        raise StructureError("augmented endomorphism algebra needs N_0 of rank one")
    if Mod.dim(1) and not N.d.block(1).is_zero():
        raise StructureError("augmented endomorphism algebra needs d = 0 on N_1")
    full = endomorphism_dga(N)
    E: HomModule = full.module  # type: ignore[assignment]
    ring = N.ring
    x0 = (0, 0)
    e00 = E.elem_index[(x0, x0)]
    d0 = full.d.block(0)
    keys0 = E.keys(0)
    # degree-zero cycles with vanishing N_0 component
    rows = [d0.row(r) for r in range(d0.rows)]
    constraint = ExactMatrix(ring, len(rows) + 1, len(keys0),
                             {**{r: row for r, row in enumerate(rows) if row}, len(rows): {e00[1]: 1}})
    ideal0 = kernel_basis(constraint)
    identity = dict(full.unit)
    basis0 = [identity] + [{(0, i): v for i, v in vec.items()} for vec in ideal0]
    top = max(q for q in E.degrees())
    labels: dict[int, list[str]] = {0: ["id"] + [_vector_label(E, v) for v in basis0[1:]]}
    for r in range(1, top + 1):
        if E.labels(r):
            labels[r] = list(E.labels(r))
    M = GradedModule(ring, TruncationWindow(0, max(top, 0)), labels, True, True)
    cols0 = ExactMatrix.from_columns(ring, len(keys0), [{k[1]: v for k, v in b.items()} for b in basis0])

    def to_sub(vec: Vector) -> Vector:
        out: Vector = {}
        deg0 = {k[1]: v for k, v in vec.items() if k[0] == 0}
        for k, v in vec.items():
            if k[0] < 0:
                raise StructureError("product left the nonnegative part")
            if k[0] > 0:
                out[k] = v
        if deg0:
            coords = solve(cols0, deg0)
            if coords is None:
                raise StructureError("degree-zero element is not a chain map")
            for i, v in coords.items():
                out[(0, i)] = v
        return vec_clean(out, ring)

    def from_sub(k: Key) -> Vector:
        return basis0[k[1]] if k[0] == 0 else {k: 1}

    def mul(a: Key, b: Key) -> Vector:
        return to_sub(full.mul(from_sub(a), from_sub(b)))

    d = HomogeneousMap.from_function(M, M, -1, lambda k: to_sub(full.d.apply(from_sub(k))))
    A = DGAlgebra(ChainComplex(M, d), mul, {(0, 0): 1}, {(0, 0): 1}, name="End(N)≥0")
    A.ambient = full  # type: ignore[attr-defined]
    A.to_ambient = lambda vec: _combine_vectors(from_sub, vec, ring)  # type: ignore[attr-defined]
    A.from_ambient = to_sub  # type: ignore[attr-defined]
    return A


def _combine_vectors(lift: Callable[[Key], Vector], vec: Mapping[Key, Scalar], ring: CoefficientRing) -> Vector:
    acc: Vector = {}
    for k, v in vec.items():
        vec_add_into(acc, lift(k), v)
    return vec_clean(acc, ring)


def _vector_label(M: GradedModule, vec: Mapping[Key, Scalar]) -> str:
    return "(" + M.format_vector(vec) + ")"


# --------------------------------------------------------------------------
# duals


def _dual_label(label: str) -> str:
    return label[:-1] if label.endswith("*") else label + "*"


def dual_module(M: GradedModule) -> GradedModule:
    w = TruncationWindow(-M.window.hi, -M.window.lo)
    return GradedModule(M.ring, w, {-q: [_dual_label(l) for l in M.labels(q)] for q in M.degrees()},
                        M.bounded_above, M.bounded_below)


def dual_complex(X: ChainComplex) -> ChainComplex:
    """``Hom(X, R)`` with ``(Dα)(x) = −(−1)^{|α|} α(dx)``; basis ``x*`` in degree ``−|x|``."""
    D = dual_module(X.module)

    def fn(key: Key) -> Vector:
        q, i = key  # dual of (-q, i)
        src = (-q, i)
        out: Vector = {}
        # α = src*, (Dα)(x) for x in degree -q+1
        s = -sign(q)
        for x in X.module.keys(-q + 1):
            c = X.d.apply_key(x).get(src, 0)
            if c:
                out[(q - 1, x[1])] = s * c
        return out

    degrees = [q for q in D.degrees() if X.d.known(-q + 1) or X.module.dim(-q + 1) == 0]
    return ChainComplex(D, HomogeneousMap.from_function(D, D, -1, fn, degrees))


def _dual_key(k: Key) -> Key:
    return (-k[0], k[1])


def dual_coalgebra_of(A: DGAlgebra) -> DGCoalgebra:
    """Finite-type dual of an algebra: ``Δα = Σ (−1)^{|a||b|} α(ab) a*⊗b*``."""
    X = dual_complex(A.complex)
    M = A.module

    def comul(c: Key) -> PairVector:
        target = _dual_key(c)
        q = target[0]
        out: PairVector = {}
        for p in M.degrees():
            for a in M.keys(p):
                for b in M.keys(q - p):
                    v = A.mul_keys(a, b).get(target, 0)
                    if v:
                        out[(_dual_key(a), _dual_key(b))] = sign(a[0] * b[0]) * v
        return out

    counit = {_dual_key(k): v for k, v in A.unit.items()}
    coaug = None if A.aug is None else {_dual_key(k): v for k, v in A.aug.items()}
    C = DGCoalgebra(X, comul, counit, coaug, name=_dual_label(A.name))
    return C


def dual_algebra_of(C: DGCoalgebra) -> DGAlgebra:
    """Finite-type dual of a coalgebra: ``(fg)(c) = Σ (−1)^{|g||c′|} f(c′) g(c″)``."""
    X = dual_complex(C.complex)
    Mc = C.module

    def mul(a: Key, b: Key) -> Vector:
        ca, cb = _dual_key(a), _dual_key(b)
        q = ca[0] + cb[0]
        out: Vector = {}
        for c in Mc.keys(q):
            v = C.comul_key(c).get((ca, cb), 0)
            if v:
                out[_dual_key(c)] = sign(ca[0] * cb[0]) * v
        return out

    unit = {_dual_key(k): v for k, v in C.counit.items()}
    aug = None if C.coaug is None else {_dual_key(k): v for k, v in C.coaug.items()}
    return DGAlgebra(X, mul, unit, aug, name=_dual_label(C.name))


def dualize(obj: DGAlgebra | DGCoalgebra | DGModule | ChainComplex):
    """Finite-type dual: algebra ↔ coalgebra, left module ↔ right module, complex ↔ complex."""
    if isinstance(obj, DGAlgebra):
        C = dual_coalgebra_of(obj)
        if obj.diagonal is not None:
            C.product = dual_algebra_of(obj.diagonal)
        return C
    if isinstance(obj, DGCoalgebra):
        A = dual_algebra_of(obj)
        if obj.product is not None:
            A.diagonal = dual_coalgebra_of(obj.product)
        return A
    if isinstance(obj, DGModule):
        return dual_module_action(obj)
    if isinstance(obj, ChainComplex):
        return dual_complex(obj)
    raise TypeError(f"cannot dualize {type(obj).__name__}")


def dual_module_action(Nmod: DGModule) -> DGModule:
    """Left module N gives right module N* with ``(f·a)(n) = f(a·n)`` (and symmetrically)."""
    X = dual_complex(Nmod.complex)
    A = Nmod.algebra
    Mn = Nmod.module

    if Nmod.side == "left":
        def act(f: Key, a: Key) -> Vector:
            target = _dual_key(f)
            out: Vector = {}
            for n in Mn.keys(target[0] - a[0]):
                v = Nmod.act_keys(a, n).get(target, 0)
                if v:
                    out[_dual_key(n)] = v
            return out
        return DGModule(A, X, act, "right", _dual_label(Nmod.name))

    def act_l(a: Key, f: Key) -> Vector:
        target = _dual_key(f)
        out: Vector = {}
        for n in Mn.keys(target[0] - a[0]):
            v = Nmod.act_keys(n, a).get(target, 0)
            if v:
                out[_dual_key(n)] = v
        return out
    return DGModule(A, X, act_l, "left", _dual_label(Nmod.name))


def canonical_double_dual_sign(k: Key) -> int:
    """Sign of the evaluation isomorphism ``x ↦ (−1)^{|x|} x**`` on a basis element."""
    return sign(k[0])


# --------------------------------------------------------------------------
# tensor products and small acyclic objects


def tensor_algebra(A: DGAlgebra, B: DGAlgebra, window: TruncationWindow | None = None) -> DGAlgebra:
    """``A ⊗ B`` with ``(a⊗b)(a′⊗b′) = (−1)^{|b||a′|} aa′⊗bb′``."""
    from .graded import tensor
    X = tensor(A.complex, B.complex, window)
    T: TensorModule = X.module  # type: ignore[assignment]

    def mul(x: Key, y: Key) -> Vector:
        a, b = T.pair(x)
        a2, b2 = T.pair(y)
        s = sign(b[0] * a2[0])
        out: Vector = {}
        for ka, va in A.mul_keys(a, a2).items():
            for kb, vb in B.mul_keys(b, b2).items():
                tk = T.lookup(ka, kb)
                if tk is None:
                    raise WindowError("product leaves the tensor window")
                out[tk] = out.get(tk, 0) + s * va * vb
        return out

    def lift(u: Mapping[Key, Scalar], w: Mapping[Key, Scalar] | None) -> dict | None:
        if w is None:
            return None
        out = {}
        for ka, va in u.items():
            for kb, vb in w.items():
                tk = T.lookup(ka, kb)
                if tk is not None:
                    out[tk] = va * vb
        return out

    unit = lift(A.unit, B.unit)
    aug = lift(A.aug, B.aug) if A.aug is not None else None
    return DGAlgebra(X, mul, unit, aug, name=f"{A.name}⊗{B.name}")


def tensor_coalgebra(C: DGCoalgebra, K: DGCoalgebra, window: TruncationWindow | None = None) -> DGCoalgebra:
    """``C ⊗ K`` with ``Δ(c⊗k) = Σ (−1)^{|k′||c″|} (c′⊗k′)⊗(c″⊗k″)``."""
    from .graded import tensor
    X = tensor(C.complex, K.complex, window)
    T: TensorModule = X.module  # type: ignore[assignment]

    def comul(x: Key) -> PairVector:
        c, k = T.pair(x)
        out: PairVector = {}
        for (c1, c2), vc in C.comul_key(c).items():
            for (k1, k2), vk in K.comul_key(k).items():
                l, r = T.lookup(c1, k1), T.lookup(c2, k2)
                if l is None or r is None:
                    raise WindowError("diagonal leaves the tensor window")
                pr = (l, r)
                out[pr] = out.get(pr, 0) + sign(k1[0] * c2[0]) * vc * vk
        return out

    def lift(u: Mapping[Key, Scalar], w: Mapping[Key, Scalar]) -> dict:
        return {T.lookup(a, b): va * vb for a, va in u.items() for b, vb in w.items()
                if T.lookup(a, b) is not None}

    counit = lift(C.counit, K.counit)
    coaug = lift(C.coaug, K.coaug) if C.coaug is not None and K.coaug is not None else None
    return DGCoalgebra(X, comul, counit, coaug, name=f"{C.name}⊗{K.name}")


def acyclic_pair(low_degree: int, names: Sequence[str] = ("x", "y"),
                 ring: CoefficientRing | None = None) -> DGAlgebra:
    """``R ⊕ R{x, y}`` with ``dy = x`` and ``|y| = |x| + 1``: square-zero algebra, primitive coalgebra.

    ``.diagonal`` holds the coalgebra structure.
    """
    ring = ring or CoefficientRing.integers()
    if low_degree <= 0:
        raise ValueError("generators must sit in positive degree")
    xn, yn = names
    p = low_degree
    M = GradedModule(ring, TruncationWindow(0, p + 1), {0: ["1"], p: [xn], p + 1: [yn]}, True, True)
    X = ChainComplex.from_blocks(M, {p + 1: ExactMatrix.identity(ring, 1)})
    one = (0, 0)

    def mul(a: Key, b: Key) -> Vector:
        if a == one:
            return {b: 1}
        if b == one:
            return {a: 1}
        return {}

    def comul(c: Key) -> PairVector:
        if c == one:
            return {(one, one): 1}
        return {(one, c): 1, (c, one): 1}

    A = DGAlgebra(X, mul, {one: 1}, {one: 1}, name=f"R[{xn},{yn}]")
    A.diagonal = DGCoalgebra(X, comul, {one: 1}, {one: 1}, name=A.name)
    A.diagonal.product = A
    return A


def comodule_of_dual(Nmod: DGModule, Astar: DGCoalgebra) -> DGComodule:
    """Right A-module N as a left A*-comodule: ``n ↦ Σ_a (−1)^{|a| + |a||n|} a*⊗(n·a)``."""
    if Nmod.side != "right":
        raise StructureError("expected a right module")
    A = Nmod.algebra
    keys = A.module.keys()

    def coact(n: Key) -> PairVector:
        out: PairVector = {}
        for a in keys:
            s = sign(a[0] + a[0] * n[0])
            for k, v in Nmod.act_keys(n, a).items():
                pr = (_dual_key(a), k)
                out[pr] = out.get(pr, 0) + s * v
        return out

    return DGComodule(Astar, Nmod.complex, coact, "left", Nmod.name)
