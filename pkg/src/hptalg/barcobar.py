"""Reduced bar and cobar constructions, universal twisting cochains and their adjoints."""
from __future__ import annotations

from dataclasses import dataclass

from .dg import DGAlgebra, DGCoalgebra, PairVector, StructureError
from .exact_linear import Scalar
from .graded import (ChainComplex, GradedModule, HomogeneousMap, Key, TruncationWindow, Vector,
                     WindowError, homology, is_quasi_isomorphism, sign, vec_clean)
from .twist import TwistingCochain, standard_twisted_tensor

Word = tuple[Key, ...]


def _enumerate_words(letters: dict[int, list[Key]], weight, lo: int, hi: int) -> dict[int, list[Word]]:
    """All words whose total weight lies in ``[lo, hi]``; every letter has positive weight."""
    out: dict[int, list[Word]] = {}

    def rec(prefix: Word, total: int) -> None:
        if total >= lo:
            out.setdefault(total, []).append(prefix)
        for w, keys in letters.items():
            if total + w > hi:
                continue
            for k in keys:
                rec(prefix + (k,), total + w)

    rec((), 0)
    for q in out:
        out[q].sort(key=lambda word: (len(word), word))
    return out


def _window(hi: int | TruncationWindow) -> int:
    return hi.hi if isinstance(hi, TruncationWindow) else int(hi)


@dataclass
class BarConstruction:
    algebra: DGAlgebra
    coalgebra: DGCoalgebra
    words: dict[Key, Word]
    index: dict[Word, Key]
    internal: HomogeneousMap
    perturbation: HomogeneousMap
    tau: TwistingCochain

    def key(self, word: Word) -> Key:
        return self.index[word]


def bar(A: DGAlgebra, window: int | TruncationWindow) -> BarConstruction:
    """Reduced bar construction of an augmented algebra with nonnegative augmentation ideal.

    ``[α₁|…|α_j]`` has degree ``Σ(|α_i| + 1)``.  With ``ᾱ = (−1)^{|α|+1}α``::

        d[α₁|…|α_j] = −Σ [ᾱ₁|…|ᾱ_{ν−1}|dα_ν|α_{ν+1}|…] + Σ [ᾱ₁|…|ᾱ_{ν−1}|ᾱ_ν α_{ν+1}|…]
    """
    if not A.is_adapted():
        raise StructureError(f"{A.name}: bar construction needs an adapted augmented basis")
    M = A.module
    unit = A.unit_key
    if any(q < 0 for q in M.degrees()):
        raise StructureError(f"{A.name}: bar construction needs a nonnegative algebra")
    hi = _window(window)
    if not M.bounded_above:
        hi = min(hi, M.window.hi + 1)
    letters: dict[int, list[Key]] = {}
    for q in M.degrees():
        ks = [k for k in M.keys(q) if k != unit]
        if ks and q + 1 <= hi:
            letters[q + 1] = ks
    by_degree = _enumerate_words(letters, None, 0, hi)
    labels = {q: ["[" + "|".join(M.label(k) for k in w) + "]" for w in ws] for q, ws in by_degree.items()}
    B = GradedModule(A.ring, TruncationWindow(0, hi), labels, True, False)
    words = {(q, i): w for q, ws in by_degree.items() for i, w in enumerate(ws)}
    index = {w: k for k, w in words.items()}
    ring = A.ring

    def bar_sign(w: Word, upto: int) -> int:
        return sign(sum(k[0] + 1 for k in w[:upto]))

    def lookup(w: Word) -> Key:
        k = index.get(w)
        if k is None:
            raise WindowError("bar differential leaves the window")
        return k

    def d_int(key: Key) -> Vector:
        w = words[key]
        acc: Vector = {}
        for nu, a in enumerate(w):
            s = -bar_sign(w, nu)
            for k, v in A.d.apply_key(a).items():
                if k == unit:
                    continue
                tk = lookup(w[:nu] + (k,) + w[nu + 1:])
                acc[tk] = acc.get(tk, 0) + s * v
        return vec_clean(acc, ring)

    def d_ext(key: Key) -> Vector:
        w = words[key]
        acc: Vector = {}
        for nu in range(len(w) - 1):
            s = bar_sign(w, nu + 1)
            for k, v in A.mul_keys(w[nu], w[nu + 1]).items():
                if k == unit:
                    continue
                tk = lookup(w[:nu] + (k,) + w[nu + 2:])
                acc[tk] = acc.get(tk, 0) + s * v
        return vec_clean(acc, ring)

    internal = HomogeneousMap.from_function(B, B, -1, d_int, tolerant=True)
    pert = HomogeneousMap.from_function(B, B, -1, d_ext, tolerant=True)
    X = ChainComplex(B, internal + pert)
    empty = index[()]

    def comul(key: Key) -> PairVector:
        w = words[key]
        return {(index[w[:i]], index[w[i:]]): 1 for i in range(len(w) + 1)}

    C = DGCoalgebra(X, comul, {empty: 1}, {empty: 1}, name=f"B̄{A.name}")

    def tau_fn(key: Key) -> Vector:
        w = words[key]
        return {w[0]: 1} if len(w) == 1 else {}

    tau = TwistingCochain.from_function(C, A, tau_fn, name="τ_B")
    return BarConstruction(A, C, words, index, internal, pert, tau)


@dataclass
class CobarConstruction:
    coalgebra: DGCoalgebra
    algebra: DGAlgebra
    words: dict[Key, Word]
    index: dict[Word, Key]
    tau: TwistingCochain

    def key(self, word: Word) -> Key:
        return self.index[word]


def cobar(C: DGCoalgebra, window: int | TruncationWindow) -> CobarConstruction:
    """Reduced cobar construction of a coaugmented coalgebra whose coideal starts in degree 2.

    ``⟨c₁|…|c_j⟩`` has degree ``Σ(|c_i| − 1)``; on generators
    ``d⟨c⟩ = −⟨dc⟩ + Σ (−1)^{|c′|} ⟨c′|c″⟩`` over the reduced diagonal, extended as a derivation.
    """
    if not C.is_adapted():
        raise StructureError(f"{C.name}: cobar construction needs an adapted coaugmented basis")
    M = C.module
    unit = C.coaug_key
    if any(q < 0 for q in M.degrees()) or M.dim(1) or len(M.labels(0)) != 1:
        raise StructureError(f"{C.name}: cobar construction needs C_0 = R and C_1 = 0")
    hi = _window(window)
    if not M.bounded_above:
        hi = min(hi, M.window.hi - 1)
    letters: dict[int, list[Key]] = {}
    for q in M.degrees():
        if q >= 2 and q - 1 <= hi:
            letters[q - 1] = list(M.keys(q))
    by_degree = _enumerate_words(letters, None, 0, hi)
    labels = {q: ["⟨" + "|".join(M.label(k) for k in w) + "⟩" for w in ws] for q, ws in by_degree.items()}
    Om = GradedModule(C.ring, TruncationWindow(0, hi), labels, True, False)
    words = {(q, i): w for q, ws in by_degree.items() for i, w in enumerate(ws)}
    index = {w: k for k, w in words.items()}
    ring = C.ring

    def lookup(w: Word) -> Key:
        k = index.get(w)
        if k is None:
            raise WindowError("cobar differential leaves the window")
        return k

    def d_letter(c: Key) -> dict[Word, Scalar]:
        out: dict[Word, Scalar] = {}
        for k, v in C.d.apply_key(c).items():
            if k != unit:
                out[(k,)] = out.get((k,), 0) - v
        for (c1, c2), v in C.reduced_comul_key(c).items():
            out[(c1, c2)] = out.get((c1, c2), 0) + sign(c1[0]) * v
        return out

    def d_fn(key: Key) -> Vector:
        w = words[key]
        acc: Vector = {}
        deg = 0
        for nu, c in enumerate(w):
            s = sign(deg)
            for piece, v in d_letter(c).items():
                tk = lookup(w[:nu] + piece + w[nu + 1:])
                acc[tk] = acc.get(tk, 0) + s * v
            deg += c[0] - 1
        return vec_clean(acc, ring)

    d = HomogeneousMap.from_function(Om, Om, -1, d_fn, tolerant=True)
    X = ChainComplex(Om, d)
    empty = index[()]

    def mul(a: Key, b: Key) -> Vector:
        return {lookup(words[a] + words[b]): 1}

    A = DGAlgebra(X, mul, {empty: 1}, {empty: 1}, name=f"Ω{C.name}")

    def tau_fn(c: Key) -> Vector:
        if c == unit:
            return {}
        return {index[(c,)]: 1} if (c,) in index else {}

    degrees = [q for q in M.degrees() if q == 0 or q - 1 <= hi]
    tau = TwistingCochain(C, A, HomogeneousMap.from_function(M, Om, -1, tau_fn, degrees), name="τ_Ω")
    return CobarConstruction(C, A, words, index, tau)


# --------------------------------------------------------------------------
# adjoints


def _iterated_reduced(C: DGCoalgebra, c: Key, parts: int) -> dict[Word, Scalar]:
    """``Δ̄^{(parts)} c`` as words of coideal keys."""
    if parts == 1:
        return {(c,): 1}
    out: dict[Word, Scalar] = {}
    for (c1, c2), v in C.reduced_comul_key(c).items():
        for rest, w in _iterated_reduced(C, c2, parts - 1).items():
            word = (c1,) + rest
            out[word] = out.get(word, 0) + v * w
    return out


def adjoint_coalgebra_map(tau: TwistingCochain, B: BarConstruction) -> HomogeneousMap:
    """``c ↦ Σ_j [τc₁|…|τc_j]`` from ``C`` to ``B̄A``."""
    C, A = tau.coalgebra, tau.algebra
    if B.algebra is not A:
        raise StructureError("bar construction is not built on the twisting cochain's algebra")
    unit = C.coaug_key
    Ab_unit = A.unit_key

    def fn(c: Key) -> Vector:
        if c == unit:
            return {B.index[()]: 1}
        acc: Vector = {}
        for parts in range(1, c[0] + 1):
            for word, v in _iterated_reduced(C, c, parts).items():
                terms: dict[Word, Scalar] = {(): v}
                for ci in word:
                    val = tau.map.apply_key(ci)
                    if Ab_unit in val and val[Ab_unit]:
                        raise StructureError("twisting cochain is not augmented")
                    nxt: dict[Word, Scalar] = {}
                    for w0, x in terms.items():
                        for a, y in val.items():
                            nxt[w0 + (a,)] = nxt.get(w0 + (a,), 0) + x * y
                    terms = nxt
                    if not terms:
                        break
                for w0, x in terms.items():
                    k = B.index.get(w0)
                    if k is None:
                        raise WindowError("adjoint leaves the bar window")
                    acc[k] = acc.get(k, 0) + x
        return vec_clean(acc, C.ring)

    return HomogeneousMap.from_function(C.module, B.coalgebra.module, 0, fn, tolerant=True)


def adjoint_algebra_map(tau: TwistingCochain, Om: CobarConstruction) -> HomogeneousMap:
    """``⟨c₁|…|c_j⟩ ↦ τ(c₁)⋯τ(c_j)`` from ``ΩC`` to ``A``."""
    C, A = tau.coalgebra, tau.algebra
    if Om.coalgebra is not C:
        raise StructureError("cobar construction is not built on the twisting cochain's coalgebra")

    def fn(key: Key) -> Vector:
        acc: Vector = dict(A.unit)
        for c in Om.words[key]:
            acc = A.mul(acc, tau.map.apply_key(c))
            if not acc:
                break
        return acc

    return HomogeneousMap.from_function(Om.algebra.module, A.module, 0, fn, tolerant=True)


def is_acyclic(tau: TwistingCochain, window: TruncationWindow | None = None) -> tuple[bool, dict]:
    """Whether ``C ⊗_τ A`` has homology ``R`` in degree 0 on all reliable degrees."""
    tt = standard_twisted_tensor(tau, window)
    H = homology(tt.complex)
    ok = all((g.free_rank, g.torsion) == ((1, ()) if q == 0 else (0, ()))
             for q, g in H.items() if g.reliable)
    return ok, H


def adjoint_is_quasi_isomorphism(f: HomogeneousMap, X: ChainComplex, Y: ChainComplex) -> bool:
    return is_quasi_isomorphism(f, X, Y)
