"""Twisting cochains: cup and cap pairings, twisted tensor products and Hom-objects,
homotopies of twisting cochains and the isomorphisms they induce.

Sign conventions
----------------
* ``(f∪g)(c) = Σ (−1)^{|g||c′|} μ(f(c′) ⊗ g(c″))``.
* Left cap on ``M ⊗ N`` (``M`` a right comodule, ``N`` a left module):
  ``φ∩(m⊗n) = Σ (−1)^{|φ||m′|} m′ ⊗ φ(c″)·n``; the twisted differential is ``d − τ∩``.
* Right cap on ``N ⊗ M`` (``N`` a right module, ``M`` a left comodule):
  ``φ∩(n⊗m) = Σ (−1)^{|φ||n|} n·φ(c′) ⊗ m″``; the twisted differential is ``d + τ∩``.
* Twisted Hom: ``δ^τ f = (−1)^{|f|} f∪τ`` added to the Hom differential.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .dg import (DGAlgebra, DGCoalgebra, DGComodule, DGModule, PairVector, StructureError,
                 dual_algebra_of, dual_coalgebra_of, regular_comodule, regular_module)
from .exact_linear import Scalar
from .graded import (ChainComplex, HomModule, HomogeneousMap, Key, TensorModule,
                     TruncationWindow, Vector, WindowError, hom_differential_of_map, sign,
                     tensor_differential, vec_add_into, vec_clean)


class TwistingError(ValueError):
    """A twisting cochain or homotopy fails its defining identity."""


def _describe(f: HomogeneousMap) -> tuple[int, str] | None:
    bad = f.first_nonzero()
    if bad is None:
        return None
    return bad[0], bad[1]


# --------------------------------------------------------------------------
# cup products


def unit_counit(C: DGCoalgebra, A: DGAlgebra) -> HomogeneousMap:
    """``ηε``: the unit of the cup algebra Hom(C, A)."""
    unit = A.unit

    def fn(c: Key) -> Vector:
        e = C.counit.get(c, 0)
        return {k: e * v for k, v in unit.items()} if e else {}

    return HomogeneousMap.from_function(C.module, A.module, 0, fn, tolerant=True)


def cup(f: HomogeneousMap, g: HomogeneousMap, C: DGCoalgebra, A: DGAlgebra) -> HomogeneousMap:
    """Cup product in Hom(C, A)."""
    if f.source != C.module or g.source != C.module or f.target != A.module or g.target != A.module:
        raise ValueError("cup: maps do not belong to Hom(C, A)")
    gs = g.shift

    def fn(c: Key) -> Vector:
        acc: Vector = {}
        for (c1, c2), k in C.comul_key(c).items():
            fc1 = f.apply_key(c1)
            if not fc1:
                continue
            gc2 = g.apply_key(c2)
            if not gc2:
                continue
            vec_add_into(acc, A.mul(fc1, gc2), sign(gs * c1[0]) * k)
        return vec_clean(acc, A.ring)

    return HomogeneousMap.from_function(C.module, A.module, f.shift + g.shift, fn, tolerant=True)


def cup_module(f: HomogeneousMap, h: HomogeneousMap, M: DGComodule, Nmod: DGModule) -> HomogeneousMap:
    """``(f∪h)(m) = Σ (−1)^{|h||m′|} f(m′)·h(c″)`` for ``f: M → N`` and ``h: C → A``.

    ``M`` is a right comodule and ``N`` a right module.
    """
    if M.side != "right" or Nmod.side != "right":
        raise ValueError("cup_module needs a right comodule and a right module")
    hs = h.shift

    def fn(m: Key) -> Vector:
        acc: Vector = {}
        for (m1, c2), k in M.coact_key(m).items():
            fm = f.apply_key(m1)
            if not fm:
                continue
            hc = h.apply_key(c2)
            if not hc:
                continue
            vec_add_into(acc, Nmod.act(fm, hc), sign(hs * m1[0]) * k)
        return vec_clean(acc, Nmod.ring)

    return HomogeneousMap.from_function(M.module, Nmod.module, f.shift + h.shift, fn, tolerant=True)


def hom_D(f: HomogeneousMap, source: ChainComplex, target: ChainComplex) -> HomogeneousMap:
    return hom_differential_of_map(f, source.d, target.d)


# --------------------------------------------------------------------------
# twisting cochains


class TwistingCochain:
    """Degree −1 map ``τ: C → A`` with ``Dτ = τ∪τ``, ``τη = 0`` and ``ετ = 0``."""

    def __init__(self, coalgebra: DGCoalgebra, algebra: DGAlgebra, map: HomogeneousMap,
                 name: str = "τ") -> None:
        if map.shift != -1:
            raise ValueError("a twisting cochain has degree −1")
        if map.source != coalgebra.module or map.target != algebra.module:
            raise ValueError("twisting cochain does not map C to A")
        self.coalgebra = coalgebra
        self.algebra = algebra
        self.map = map
        self.name = name

    @classmethod
    def from_function(cls, C: DGCoalgebra, A: DGAlgebra, fn: Callable[[Key], Mapping[Key, Scalar]],
                      name: str = "τ") -> "TwistingCochain":
        return cls(C, A, HomogeneousMap.from_function(C.module, A.module, -1, fn, tolerant=True), name)

    @classmethod
    def zero(cls, C: DGCoalgebra, A: DGAlgebra, name: str = "0") -> "TwistingCochain":
        return cls(C, A, HomogeneousMap.zero(C.module, A.module, -1), name)

    def value(self, c: Key) -> Vector:
        return self.map.apply_key(c)

    def defect(self) -> HomogeneousMap:
        """``Dτ − τ∪τ`` on the window."""
        C, A = self.coalgebra, self.algebra
        return hom_D(self.map, C.complex, A.complex) - cup(self.map, self.map, C, A)

    def failure(self) -> str | None:
        """First violated identity, phrased with degree and basis element, or ``None``."""
        C, A = self.coalgebra, self.algebra
        if C.coaug is not None:
            val = self.map.apply(C.coaug) if self.map.known(0) else {}
            if val:
                return f"twisting: τη ≠ 0 ({self.name})"
        if A.aug is not None:
            for c in C.module.keys():
                if self.map.known(c[0]) and A.augment(self.map.apply_key(c)) != 0:
                    return f"twisting: ετ ≠ 0 at degree {c[0]}, basis {C.module.label(c)}"
        bad = _describe(self.defect())
        if bad is not None:
            return f"twisting: Dτ ≠ τ∪τ at degree {bad[0]}, basis {bad[1]}"
        return None

    def is_valid(self) -> bool:
        return self.failure() is None

    def require_valid(self) -> None:
        msg = self.failure()
        if msg is not None:
            raise TwistingError(msg)


# --------------------------------------------------------------------------
# cap products and twisted tensor products


def left_cap(phi: HomogeneousMap, M: DGComodule, Nmod: DGModule, T: TensorModule) -> HomogeneousMap:
    """``φ∩(m⊗n) = Σ (−1)^{|φ||m′|} m′ ⊗ φ(c″)·n`` on ``M ⊗ N``."""
    if M.side != "right" or Nmod.side != "left":
        raise ValueError("left cap needs a right comodule and a left module")
    if T.left != M.module or T.right != Nmod.module:
        raise ValueError("tensor module does not match the factors")
    ps = phi.shift

    def fn(key: Key) -> Vector:
        m, n = T.pair(key)
        acc: Vector = {}
        for (m1, c2), k in M.coact_key(m).items():
            val = phi.apply_key(c2)
            if not val:
                continue
            s = sign(ps * m1[0]) * k
            for kn, vn in Nmod.act(val, {n: 1}).items():
                tk = T.lookup(m1, kn)
                if tk is None:
                    raise WindowError("cap product leaves the tensor window")
                acc[tk] = acc.get(tk, 0) + s * vn
        return vec_clean(acc, T.ring)

    return HomogeneousMap.from_function(T, T, ps, fn, tolerant=True)


def right_cap(phi: HomogeneousMap, Nmod: DGModule, M: DGComodule, T: TensorModule) -> HomogeneousMap:
    """``φ∩(n⊗m) = Σ (−1)^{|φ||n|} n·φ(c′) ⊗ m″`` on ``N ⊗ M``."""
    if M.side != "left" or Nmod.side != "right":
        raise ValueError("right cap needs a right module and a left comodule")
    if T.left != Nmod.module or T.right != M.module:
        raise ValueError("tensor module does not match the factors")
    ps = phi.shift

    def fn(key: Key) -> Vector:
        n, m = T.pair(key)
        acc: Vector = {}
        s0 = sign(ps * n[0])
        for (c1, m2), k in M.coact_key(m).items():
            val = phi.apply_key(c1)
            if not val:
                continue
            for kn, vn in Nmod.act({n: 1}, val).items():
                tk = T.lookup(kn, m2)
                if tk is None:
                    raise WindowError("cap product leaves the tensor window")
                acc[tk] = acc.get(tk, 0) + s0 * k * vn
        return vec_clean(acc, T.ring)

    return HomogeneousMap.from_function(T, T, ps, fn, tolerant=True)


@dataclass
class TwistedTensor:
    """``M ⊗_τ N`` (order ``"CA"``) or ``N ⊗_τ M`` (order ``"AC"``) with its inherited structures."""

    complex: ChainComplex
    tensor: TensorModule
    tau: TwistingCochain
    order: str
    comodule: DGComodule
    module: DGModule
    untwisted: HomogeneousMap
    perturbation: HomogeneousMap
    left_comodule: DGComodule | None = None
    right_module: DGModule | None = None
    left_module: DGModule | None = None
    right_comodule: DGComodule | None = None


def twisted_tensor(M: DGComodule, Nmod: DGModule, tau: TwistingCochain,
                   window: TruncationWindow | None = None,
                   left_coaction: DGComodule | None = None,
                   right_action: DGModule | None = None, check: bool = True) -> TwistedTensor:
    """``M ⊗_τ N`` with differential ``d − τ∩`` (left cap).

    ``left_coaction`` (a left C-comodule structure on M's complex) and
    ``right_action`` (a right module structure on N's complex) are carried over
    to the twisted tensor product.
    """
    if M.coalgebra is not tau.coalgebra and M.coalgebra.module != tau.coalgebra.module:
        raise StructureError("comodule is not over the twisting cochain's coalgebra")
    if Nmod.algebra is not tau.algebra and Nmod.algebra.module != tau.algebra.module:
        raise StructureError("module is not over the twisting cochain's algebra")
    if check:
        tau.require_valid()
    T = TensorModule(M.module, Nmod.module, window)
    d0 = tensor_differential(T, M.d, Nmod.d)
    cap = left_cap(tau.map, M, Nmod, T)
    X = ChainComplex(T, d0 - cap)
    tt = TwistedTensor(X, T, tau, "CA", M, Nmod, d0, -cap)
    if left_coaction is not None:
        if left_coaction.complex.module != M.module or left_coaction.side != "left":
            raise StructureError("left coaction must live on the comodule's complex")
        lc = left_coaction

        def coact(key: Key) -> PairVector:
            m, n = T.pair(key)
            out: PairVector = {}
            for (c, m1), v in lc.coact_key(m).items():
                tk = T.lookup(m1, n)
                if tk is not None:
                    out[(c, tk)] = v
            return out

        tt.left_comodule = DGComodule(lc.coalgebra, X, coact, "left", "M⊗τN")
    if right_action is not None:
        if right_action.complex.module != Nmod.module or right_action.side != "right":
            raise StructureError("right action must live on the module's complex")
        ra = right_action

        def act(key: Key, a: Key) -> Vector:
            m, n = T.pair(key)
            out: Vector = {}
            for kn, v in ra.act_keys(n, a).items():
                tk = T.lookup(m, kn)
                if tk is None:
                    raise WindowError("action leaves the tensor window")
                out[tk] = v
            return out

        tt.right_module = DGModule(ra.algebra, X, act, "right", "M⊗τN")
    return tt


def twisted_tensor_ac(Nmod: DGModule, M: DGComodule, tau: TwistingCochain,
                      window: TruncationWindow | None = None,
                      left_action: DGModule | None = None,
                      right_coaction: DGComodule | None = None, check: bool = True) -> TwistedTensor:
    """``N ⊗_τ M`` with differential ``d + τ∩`` (right cap)."""
    if check:
        tau.require_valid()
    T = TensorModule(Nmod.module, M.module, window)
    d0 = tensor_differential(T, Nmod.d, M.d)
    cap = right_cap(tau.map, Nmod, M, T)
    X = ChainComplex(T, d0 + cap)
    tt = TwistedTensor(X, T, tau, "AC", M, Nmod, d0, cap)
    if left_action is not None:
        if left_action.complex.module != Nmod.module or left_action.side != "left":
            raise StructureError("left action must live on the module's complex")
        la = left_action

        def act(a: Key, key: Key) -> Vector:
            n, m = T.pair(key)
            out: Vector = {}
            for kn, v in la.act_keys(a, n).items():
                tk = T.lookup(kn, m)
                if tk is None:
                    raise WindowError("action leaves the tensor window")
                out[tk] = v
            return out

        tt.left_module = DGModule(la.algebra, X, act, "left", "N⊗τM")
    if right_coaction is not None:
        if right_coaction.complex.module != M.module or right_coaction.side != "right":
            raise StructureError("right coaction must live on the comodule's complex")
        rc = right_coaction

        def coact(key: Key) -> PairVector:
            n, m = T.pair(key)
            out: PairVector = {}
            for (m1, c), v in rc.coact_key(m).items():
                tk = T.lookup(n, m1)
                if tk is not None:
                    out[(tk, c)] = v
            return out

        tt.right_comodule = DGComodule(rc.coalgebra, X, coact, "right", "N⊗τM")
    return tt


def standard_twisted_tensor(tau: TwistingCochain, window: TruncationWindow | None = None) -> TwistedTensor:
    """``C ⊗_τ A`` with its left C-comodule and right A-module structures."""
    C, A = tau.coalgebra, tau.algebra
    return twisted_tensor(regular_comodule(C, "right"), regular_module(A, "left"), tau, window,
                          left_coaction=regular_comodule(C, "left"),
                          right_action=regular_module(A, "right"))


def standard_twisted_tensor_ac(tau: TwistingCochain, window: TruncationWindow | None = None) -> TwistedTensor:
    """``A ⊗_τ C`` with its left A-module and right C-comodule structures."""
    C, A = tau.coalgebra, tau.algebra
    return twisted_tensor_ac(regular_module(A, "right"), regular_comodule(C, "left"), tau, window,
                             left_action=regular_module(A, "left"),
                             right_coaction=regular_comodule(C, "right"))


# --------------------------------------------------------------------------
# twisted Hom-objects


class _FactorIndex:
    """For each basis ``x`` of C: every ``(c, c″, coefficient)`` with ``(x, c″)`` in ``Δc``."""

    def __init__(self, M: DGComodule) -> None:
        self.by_left: dict[Key, list[tuple[Key, Key, Scalar]]] = {}
        for c in M.module.keys():
            for (x, c2), v in M.coact_key(c).items():
                self.by_left.setdefault(x, []).append((c, c2, v))


@dataclass
class TwistedHom:
    complex: ChainComplex
    hom: HomModule
    tau: TwistingCochain
    coalgebra_comodule: DGComodule
    module: DGModule
    untwisted: HomogeneousMap
    perturbation: HomogeneousMap

    def map_of(self, vec: Mapping[Key, Scalar], shift: int) -> HomogeneousMap:
        return self.hom.map_of(vec, shift)

    def vector_of(self, f: HomogeneousMap) -> Vector:
        return self.hom.vector_of(f)


def twisted_hom(C: DGCoalgebra, Nmod: DGModule, tau: TwistingCochain,
                window: TruncationWindow | None = None, check: bool = True) -> TwistedHom:
    """``Hom^τ(C, N)``: the Hom complex with ``D + δ^τ``, ``δ^τ f = (−1)^{|f|} f∪τ``."""
    if Nmod.side != "right":
        raise StructureError("twisted Hom needs a right module")
    if check:
        tau.require_valid()
    from .graded import hom_complex
    base = hom_complex(C.complex, Nmod.complex, window)
    H: HomModule = base.module  # type: ignore[assignment]
    Mc = regular_comodule(C, "right")
    idx = _FactorIndex(Mc)
    tmap = tau.map

    def fn(key: Key) -> Vector:
        r = key[0]
        x, y = H.elems[r][key[1]]
        acc: Vector = {}
        # (E(x→y) ∪ τ)(c) = Σ_{(x, c″) ∈ Δc} (−1)^{|τ||x|} y·τ(c″)
        for c, c2, k in idx.by_left.get(x, ()):
            t = tmap.apply_key(c2)
            if not t:
                continue
            s = sign(r) * sign(x[0]) * k
            for kn, v in Nmod.act({y: 1}, t).items():
                ek = H.elem_index.get((c, kn))
                if ek is None:
                    raise WindowError("twisted Hom differential leaves the window")
                acc[ek] = acc.get(ek, 0) + s * v
        return vec_clean(acc, H.ring)

    delta = HomogeneousMap.from_function(H, H, -1, fn, tolerant=True)
    delta = delta.with_unknown(base.d.unknown)
    X = ChainComplex(H, base.d + delta)
    return TwistedHom(X, H, tau, Mc, Nmod, base.d, delta)


def hom_left_action(th: TwistedHom, Cstar: DGAlgebra) -> DGModule:
    """Hom(C, N) as a left C*-module: ``(f·φ)(c) = Σ (−1)^{|φ||c′|} f(c′) φ(c″)``."""
    H = th.hom
    C = th.tau.coalgebra
    idx = _FactorIndex(th.coalgebra_comodule)

    def act(f: Key, phi: Key) -> Vector:
        cf = (-f[0], f[1])  # f = cf*
        x, y = H.elems[phi[0]][phi[1]]
        acc: Vector = {}
        for c, c2, k in idx.by_left.get(cf, ()):
            if c2 != x:
                continue
            ek = H.elem_index.get((c, y))
            if ek is None:
                raise WindowError("action leaves the Hom window")
            acc[ek] = acc.get(ek, 0) + sign(phi[0] * cf[0]) * k
        return acc

    if Cstar.module.window.lo > -C.module.window.hi and not C.module.bounded_above:
        raise WindowError("dual algebra window does not cover the coalgebra")
    return DGModule(Cstar, th.complex, act, "left", "Hom^τ(C,N)")


# --------------------------------------------------------------------------
# homotopies of twisting cochains


class TwistingHomotopy:
    """Degree-0 ``ψ: C → A`` with ``Dψ = τ₁∪ψ − ψ∪τ₂``, ``ψη = η``, ``εψ = ε``."""

    def __init__(self, source: TwistingCochain, target: TwistingCochain, map: HomogeneousMap) -> None:
        if map.shift != 0:
            raise ValueError("a homotopy of twisting cochains has degree 0")
        if source.coalgebra is not target.coalgebra or source.algebra is not target.algebra:
            raise ValueError("homotopic twisting cochains must share C and A")
        self.tau1 = source
        self.tau2 = target
        self.map = map

    @property
    def coalgebra(self) -> DGCoalgebra:
        return self.tau1.coalgebra

    @property
    def algebra(self) -> DGAlgebra:
        return self.tau1.algebra

    def failure(self) -> str | None:
        C, A, psi = self.coalgebra, self.algebra, self.map
        if C.coaug is not None and psi.known(0) and psi.apply(C.coaug) != vec_clean(dict(A.unit), A.ring):
            return "homotopy: ψη ≠ η"
        if A.aug is not None:
            for c in C.module.keys():
                if psi.known(c[0]) and A.augment(psi.apply_key(c)) != C.counit.get(c, 0):
                    return f"homotopy: εψ ≠ ε at degree {c[0]}, basis {C.module.label(c)}"
        lhs = hom_D(psi, C.complex, A.complex)
        rhs = cup(self.tau1.map, psi, C, A) - cup(psi, self.tau2.map, C, A)
        bad = _describe(lhs - rhs)
        if bad is not None:
            return f"homotopy: Dψ ≠ τ₁∪ψ − ψ∪τ₂ at degree {bad[0]}, basis {bad[1]}"
        return None

    def is_valid(self) -> bool:
        return self.failure() is None


def _height(C: DGCoalgebra) -> int:
    return C.module.window.height


def homotopy_inverse(psi: TwistingHomotopy) -> TwistingHomotopy:
    """``ψ⁻¹ = Σ_k (−ψ̃)^{∪k}`` with ``ψ̃ = ψ − ηε``, truncated where the terms vanish."""
    C, A = psi.coalgebra, psi.algebra
    if C.coaug is None or C.module.dim(0) != 1:
        raise TwistingError("homotopy inverse needs a connected coalgebra (degree zero equal to R)")
    ee = unit_counit(C, A)
    tilde = psi.map - ee
    neg = -tilde
    total = ee
    term = ee
    for _ in range(_height(C) + 2):
        term = cup(term, neg, C, A)
        if term.is_zero():
            return TwistingHomotopy(psi.tau2, psi.tau1, total.with_unknown(term.unknown))
        total = total + term
    raise TwistingError("homotopy inverse series did not terminate within the window height")


def cap_isomorphism(psi: TwistingHomotopy, M: DGComodule, Nmod: DGModule,
                    window: TruncationWindow | None = None) -> tuple[HomogeneousMap, TwistedTensor, TwistedTensor]:
    """``ψ∩·: M ⊗_{τ₂} N → M ⊗_{τ₁} N`` together with source and target complexes."""
    src = twisted_tensor(M, Nmod, psi.tau2, window)
    tgt = twisted_tensor(M, Nmod, psi.tau1, window)
    return left_cap(psi.map, M, Nmod, src.tensor), src, tgt


def cup_shift_isomorphism(psi: TwistingHomotopy, Nmod: DGModule,
                          window: TruncationWindow | None = None) -> tuple[HomogeneousMap, TwistedHom, TwistedHom]:
    """``φ ↦ φ∪ψ: Hom^{τ₁}(C, N) → Hom^{τ₂}(C, N)``."""
    C = psi.coalgebra
    src = twisted_hom(C, Nmod, psi.tau1, window)
    tgt = twisted_hom(C, Nmod, psi.tau2, window)
    H = src.hom
    Mc = src.coalgebra_comodule

    def fn(key: Key) -> Vector:
        f = H.map_of({key: 1}, key[0])
        g = cup_module(f, psi.map, Mc, Nmod)
        return H.vector_of(g)

    return HomogeneousMap.from_function(H, H, 0, fn, tolerant=True), src, tgt


def chain_map_defect(f: HomogeneousMap, X: ChainComplex, Y: ChainComplex) -> tuple[int, str] | None:
    """First ``(degree, basis)`` where ``d f − (−1)^{|f|} f d`` is nonzero."""
    return _describe(hom_differential_of_map(f, X.d, Y.d))


# --------------------------------------------------------------------------
# duals and adjunction


def dual_twisting_cochain(tau: TwistingCochain, dual_algebra: DGCoalgebra | None = None,
                          dual_coalgebra: DGAlgebra | None = None) -> TwistingCochain:
    """``τ*(α) = (−1)^{|α|} α∘τ`` from ``A*`` to ``C*``."""
    C, A = tau.coalgebra, tau.algebra
    Astar = dual_algebra or dual_coalgebra_of(A)
    Cstar = dual_coalgebra or dual_algebra_of(C)
    by_target: dict[Key, list[tuple[Key, Scalar]]] = {}
    for c in C.module.keys():
        if not tau.map.known(c[0]):
            continue
        for a, v in tau.map.apply_key(c).items():
            by_target.setdefault(a, []).append((c, v))

    def fn(alpha: Key) -> Vector:
        a = (-alpha[0], alpha[1])
        s = sign(alpha[0])
        return {(-c[0], c[1]): s * v for c, v in by_target.get(a, ())}

    degrees = [q for q in Astar.module.degrees()
               if C.module.dim(-q + 1) is not None and all(tau.map.known(p) for p in [-q + 1] if C.module.dim(p))]
    m = HomogeneousMap.from_function(Astar.module, Cstar.module, -1, fn, degrees)
    return TwistingCochain(Astar, Cstar, m, name=f"{tau.name}*")


def curry(alpha: HomogeneousMap, tt: TwistedTensor, Nmod: DGModule) -> HomogeneousMap:
    """``Φ_α(c⊗a) = α(c)·a`` from ``C ⊗_τ A`` to a right A-module ``N``."""
    if tt.order != "CA":
        raise ValueError("curry expects C ⊗_τ A")
    T = tt.tensor

    def fn(key: Key) -> Vector:
        c, a = T.pair(key)
        val = alpha.apply_key(c)
        return Nmod.act(val, {a: 1}) if val else {}

    return HomogeneousMap.from_function(T, Nmod.module, alpha.shift, fn, tolerant=True)


def uncurry(phi: HomogeneousMap, tt: TwistedTensor) -> HomogeneousMap:
    """``α_Φ(c) = Φ(c⊗1)``."""
    T = tt.tensor
    A = tt.tau.algebra
    unit = A.unit_key

    def fn(c: Key) -> Vector:
        tk = T.lookup(c, unit)
        if tk is None:
            raise WindowError("unit term outside the tensor window")
        return phi.apply_key(tk)

    return HomogeneousMap.from_function(tt.tau.coalgebra.module, phi.target, phi.shift, fn, tolerant=True)


def hom_as_tensor(th: TwistedHom, dual_algebra: DGAlgebra | None = None,
                  dual_coalgebra: DGCoalgebra | None = None) -> tuple[HomogeneousMap, TwistedTensor]:
    """Finite-type identification ``Hom^τ(C, N) ≅ C* ⊗_{τ*} N``: ``E(c↦n) ↦ (−1)^{|c||n|} c*⊗n``.

    N is read as a left A*-comodule through :func:`comodule_of_dual`.
    """
    from .dg import comodule_of_dual
    tau = th.tau
    Cstar = dual_algebra or dual_algebra_of(tau.coalgebra)
    Astar = dual_coalgebra or dual_coalgebra_of(tau.algebra)
    ts = dual_twisting_cochain(tau, Astar, Cstar)
    M = comodule_of_dual(th.module, Astar)
    tt = twisted_tensor_ac(regular_module(Cstar, "right"), M, ts)
    H = th.hom

    def fn(key: Key) -> Vector:
        c, n = H.elems[key[0]][key[1]]
        tk = tt.tensor.lookup((-c[0], c[1]), n)
        if tk is None:
            raise WindowError("identification leaves the tensor window")
        return {tk: sign(c[0] * n[0])}

    return HomogeneousMap.from_function(H, tt.tensor, 0, fn, tolerant=True), tt
