"""Koszul pair, duality functors, resolution contractions and the circle-action model."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .dg import (DGAlgebra, DGCoalgebra, DGComodule, DGModule, StructureError,
                 divided_power_bialgebra, dual_algebra_of, dual_coalgebra_of,
                 endomorphism_dga, exterior_algebra, regular_comodule, regular_module,
                 symmetric_coalgebra, truncated_divided_coalgebra)
from .exact_linear import CoefficientRing, HomologyGroup
from .graded import (ChainComplex, GradedModule, HomogeneousMap, Key, TensorModule,
                     TruncationWindow, Vector, WindowError, homology)
from .hpt import (Contraction, ContractionError, contraction_onto_ground, perturb,
                  repair_side_conditions, swap_inclusion, swap_projection, tensor_contraction)
from .twist import (TwistedHom, TwistedTensor, TwistingCochain, dual_twisting_cochain,
                    hom_left_action, twisted_hom, twisted_tensor, twisted_tensor_ac)


@dataclass
class KoszulPair:
    lam: DGAlgebra
    sigma_prime: DGCoalgebra
    tau: TwistingCochain

    @property
    def generators(self) -> list[Key]:
        return list(self.lam.generators)  # type: ignore[attr-defined]


def koszul_pair(generator_degrees: Sequence[int], window: int | TruncationWindow,
                ring: CoefficientRing | None = None) -> KoszulPair:
    """``Λ[V]``, ``Σ′[sV]`` and the desuspension twisting cochain ``y_{d+1} ↦ x_d``."""
    if any(d <= 0 or d % 2 == 0 for d in generator_degrees):
        raise ValueError("Koszul generators must have odd positive degree")
    ring = ring or CoefficientRing.integers()
    lam = exterior_algebra(generator_degrees, ring=ring)
    sig = symmetric_coalgebra([d + 1 for d in generator_degrees], window, ring=ring)
    pairs = dict(zip(sig.cogenerators, lam.generators))  # type: ignore[attr-defined]
    tau = TwistingCochain.from_function(sig, lam, lambda c: {pairs[c]: 1} if c in pairs else {},
                                        name="τ")
    return KoszulPair(lam, sig, tau)


# --------------------------------------------------------------------------
# duality functors


def functor_t(Nmod: DGModule, tau: TwistingCochain,
              window: TruncationWindow | None = None) -> TwistedTensor:
    """``t(N) = C ⊗_τ N`` for a left A-module, with its left C-comodule structure."""
    if Nmod.side != "left":
        raise StructureError("t needs a left module")
    C = tau.coalgebra
    return twisted_tensor(regular_comodule(C, "right"), Nmod, tau, window,
                          left_coaction=regular_comodule(C, "left"))


def functor_h(M: DGComodule, tau: TwistingCochain,
              window: TruncationWindow | None = None) -> TwistedTensor:
    """``h(M) = A ⊗_τ M`` for a left C-comodule, with its left A-module structure."""
    if M.side != "left":
        raise StructureError("h needs a left comodule")
    A = tau.algebra
    return twisted_tensor_ac(regular_module(A, "right"), M, tau, window,
                             left_action=regular_module(A, "left"))


def functor_t_star(Nmod: DGModule, tau: TwistingCochain,
                   window: TruncationWindow | None = None) -> tuple[TwistedHom, DGModule]:
    """``t*(N) = Hom^τ(C, N)`` for a right A-module, with its left C*-module structure."""
    th = twisted_hom(tau.coalgebra, Nmod, tau, window)
    Cstar = dual_algebra_of(tau.coalgebra)
    return th, hom_left_action(th, Cstar)


def functor_h_star(Mmod: DGModule, tau: TwistingCochain,
                   window: TruncationWindow | None = None) -> TwistedTensor:
    """``h*(M) ≅ A* ⊗_{τ*} M`` for a left C*-module (finite-type model of ``Hom^τ(A, M)``)."""
    if Mmod.side != "left":
        raise StructureError("h* needs a left C*-module")
    Cstar = Mmod.algebra
    Astar = dual_coalgebra_of(tau.algebra)
    ts = dual_twisting_cochain(tau, Astar, Cstar)
    return twisted_tensor(regular_comodule(Astar, "right"), Mmod, ts, window)


# --------------------------------------------------------------------------
# resolutions


def _difference(full: ChainComplex, partial: ChainComplex) -> HomogeneousMap:
    return full.d - partial.d


def _nested_contraction(outer: TensorModule, pair_contraction: Contraction,
                        target: ChainComplex) -> tuple[HomogeneousMap, HomogeneousMap, HomogeneousMap]:
    """``s ⊗ id`` on ``X ⊗ (Y ⊗ M)``, where ``s`` contracts ``X ⊗ Y`` onto R.

    The maps act on the first two factors only, so reassociating carries no sign.
    """
    inner: TensorModule = outer.right  # type: ignore[assignment]
    pair_T: TensorModule = pair_contraction.big.module  # type: ignore[assignment]
    s = pair_contraction.htpy
    M = target.module
    unit_pair = pair_contraction.incl.apply_key((0, 0))
    counit = pair_contraction.proj

    def split(key: Key) -> tuple[Key, Key, Key]:
        x, rest = outer.pair(key)
        y, m = inner.pair(rest)
        return x, y, m

    def join(x: Key, y: Key, m: Key) -> Key:
        r = inner.lookup(y, m)
        if r is None:
            raise WindowError("resolution leaves the window")
        k = outer.lookup(x, r)
        if k is None:
            raise WindowError("resolution leaves the window")
        return k

    def h_fn(key: Key) -> Vector:
        x, y, m = split(key)
        pk = pair_T.lookup(x, y)
        if pk is None:
            raise WindowError("resolution leaves the window")
        out: Vector = {}
        for t, v in s.apply_key(pk).items():
            a, b = pair_T.pair(t)
            k = join(a, b, m)
            out[k] = out.get(k, 0) + v
        return out

    def incl_fn(m: Key) -> Vector:
        out: Vector = {}
        for t, v in unit_pair.items():
            a, b = pair_T.pair(t)
            out[join(a, b, m)] = v
        return out

    def proj_fn(key: Key) -> Vector:
        x, y, m = split(key)
        pk = pair_T.lookup(x, y)
        if pk is None or pk[0] != 0:
            return {}
        v = counit.apply_key(pk).get((0, 0), 0)
        return {m: v} if v else {}

    h = HomogeneousMap.from_function(outer, outer, 1, h_fn, tolerant=True)
    incl = HomogeneousMap.from_function(M, outer, 0, incl_fn, tolerant=True)
    proj = HomogeneousMap.from_function(outer, M, 0, proj_fn, tolerant=True)
    return incl, proj, h


def _pair_contraction(tt: TwistedTensor) -> Contraction:
    """Contraction of ``C ⊗_τ A`` (or ``A ⊗_τ C``) onto R with ``∇ = η⊗η`` and ``π = ε⊗ε``."""
    tau = tt.tau
    C, A = tau.coalgebra, tau.algebra
    T = tt.tensor
    u = T.lookup(C.coaug_key, A.unit_key) if tt.order == "CA" else T.lookup(A.unit_key, C.coaug_key)
    counit: dict[Key, int] = {}
    for k in T.keys(0):
        a, b = T.pair(k)
        c, x = (a, b) if tt.order == "CA" else (b, a)
        v = C.counit.get(c, 0) * A.aug.get(x, 0) if A.aug is not None else 0
        if v:
            counit[k] = v
    return contraction_onto_ground(tt.complex, {u: 1}, counit)


@dataclass
class Resolution:
    contraction: Contraction
    structured_map: HomogeneousMap
    base: Contraction
    perturbation: HomogeneousMap
    complex: TwistedTensor


def resolve_comodule(M: DGComodule, tau: TwistingCochain,
                     window: TruncationWindow | None = None) -> Resolution:
    """Contraction of ``t(h(M)) = C ⊗_τ A ⊗_τ M`` onto ``M`` whose inclusion is ``m ↦ Σ m₍₋₁₎⊗1⊗m₍₀₎``."""
    C, A = tau.coalgebra, tau.algebra
    hM = functor_h(M, tau)
    full = functor_t(hM.left_module, tau, window)  # type: ignore[arg-type]
    # A ⊗ M untwisted, as a left A-module
    untw = ChainComplex(hM.tensor, hM.untwisted)
    untw_mod = DGModule(A, untw, hM.left_module._act_fn, "left", "A⊗M")  # type: ignore[union-attr]
    partial = twisted_tensor(regular_comodule(C, "right"), untw_mod, tau, window, check=False)
    outer: TensorModule = full.tensor
    if partial.tensor != outer:
        raise ContractionError("resolution: tensor windows disagree")
    pair = _pair_contraction(twisted_tensor(regular_comodule(C, "right"), regular_module(A, "left"), tau))
    incl, proj, h = _nested_contraction(outer, pair, M.complex)
    base = repair_side_conditions(partial.complex, M.complex, incl, proj, h)
    inner: TensorModule = outer.right  # type: ignore[assignment]
    filt = {k: inner.pair(outer.pair(k)[1])[1][0] for k in outer.keys()}
    base.filtration = filt
    delta = _difference(full.complex, partial.complex)
    D, pc = perturb(base, delta)
    if not D.is_zero():
        raise ContractionError("resolution: induced perturbation of M is nonzero")
    pc = Contraction(pc.big, M.complex, pc.incl, pc.proj, pc.htpy, pc.filtration)

    def structured(m: Key) -> Vector:
        out: Vector = {}
        for (c, m0), v in M.coact_key(m).items():
            r = inner.lookup(A.unit_key, m0)
            k = outer.lookup(c, r) if r is not None else None
            if k is None:
                raise WindowError("coaction leaves the window")
            out[k] = out.get(k, 0) + v
        return out

    nab = HomogeneousMap.from_function(M.module, outer, 0, structured, tolerant=True)
    final = swap_inclusion(pc, nab)
    return Resolution(final, nab, base, delta, full)


def resolve_module(Nmod: DGModule, tau: TwistingCochain,
                   window: TruncationWindow | None = None) -> Resolution:
    """Contraction of ``h(t(N)) = A ⊗_τ C ⊗_τ N`` onto ``N`` whose projection is ``a⊗c⊗n ↦ ε(c) a·n``."""
    C, A = tau.coalgebra, tau.algebra
    tN = functor_t(Nmod, tau)
    full = functor_h(tN.left_comodule, tau, window)  # type: ignore[arg-type]
    untw = ChainComplex(tN.tensor, tN.untwisted)
    untw_comod = DGComodule(C, untw, tN.left_comodule._coact_fn, "left", "C⊗N")  # type: ignore[union-attr]
    partial = twisted_tensor_ac(regular_module(A, "right"), untw_comod, tau, window, check=False)
    outer: TensorModule = full.tensor
    if partial.tensor != outer:
        raise ContractionError("resolution: tensor windows disagree")
    pair = _pair_contraction(twisted_tensor_ac(regular_module(A, "right"), regular_comodule(C, "left"), tau))
    incl, proj, h = _nested_contraction(outer, pair, Nmod.complex)
    base = repair_side_conditions(partial.complex, Nmod.complex, incl, proj, h)
    inner: TensorModule = outer.right  # type: ignore[assignment]
    filt = {k: inner.pair(outer.pair(k)[1])[0][0] for k in outer.keys()}
    base.filtration = filt
    delta = _difference(full.complex, partial.complex)
    D, pc = perturb(base, delta)
    if not D.is_zero():
        raise ContractionError("resolution: induced perturbation of N is nonzero")
    pc = Contraction(pc.big, Nmod.complex, pc.incl, pc.proj, pc.htpy, pc.filtration)

    def structured(key: Key) -> Vector:
        a, rest = outer.pair(key)
        c, n = inner.pair(rest)
        e = C.counit.get(c, 0)
        if not e:
            return {}
        return {k: e * v for k, v in Nmod.act_keys(a, n).items()}

    pr = HomogeneousMap.from_function(outer, Nmod.module, 0, structured, tolerant=True)
    final = swap_projection(pc, pr)
    return Resolution(final, pr, base, delta, full)


# --------------------------------------------------------------------------
# differential Tor and Cotor


def differential_tor(Nprime: DGModule, Nmod: DGModule, tau: TwistingCochain,
                     window: TruncationWindow | None = None) -> tuple[ChainComplex, dict[int, HomologyGroup]]:
    """Homology of ``N′ ⊗_τ C ⊗_τ N``."""
    if Nprime.side != "right" or Nmod.side != "left":
        raise StructureError("Tor needs a right module and a left module")
    tN = functor_t(Nmod, tau)
    tt = twisted_tensor_ac(Nprime, tN.left_comodule, tau, window)  # type: ignore[arg-type]
    return tt.complex, homology(tt.complex)


def differential_cotor(Mprime: DGComodule, M: DGComodule, tau: TwistingCochain,
                       window: TruncationWindow | None = None) -> tuple[ChainComplex, dict[int, HomologyGroup]]:
    """Homology of ``M′ ⊗_τ A ⊗_τ M``."""
    if Mprime.side != "right" or M.side != "left":
        raise StructureError("Cotor needs a right comodule and a left comodule")
    hM = functor_h(M, tau)
    tt = twisted_tensor(Mprime, hM.left_module, tau, window)  # type: ignore[arg-type]
    return tt.complex, homology(tt.complex)


# --------------------------------------------------------------------------
# the circle-action model


@dataclass
class Example71Config:
    n: int
    window: TruncationWindow
    ring: CoefficientRing = field(default_factory=CoefficientRing.integers)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.window.hi < 2 * self.n:
            raise WindowError(f"window must reach degree {2 * self.n}")
        if self.window.lo > 0:
            raise WindowError("window must contain degree 0")


@dataclass
class Example71Result:
    config: Example71Config
    circle: DGCoalgebra
    exterior: DGAlgebra
    theta: TwistingCochain
    fibre: DGModule
    fibre_contraction: Contraction
    tensored: Contraction
    derived: HomogeneousMap
    perturbed: Contraction
    tau: TwistingCochain
    twisted: TwistedTensor
    sign: int
    homology: dict[int, HomologyGroup]
    verification: dict[str, bool]


def sphere_model(n: int, circle: DGCoalgebra, exterior: DGAlgebra,
                 theta: TwistingCochain) -> DGModule:
    """``Λ[v] ⊗_ϑ Γ_{n−1}[w]`` as a left ``Λ[v]``-module; ``d γ_k(w) = v⊗γ_{k−1}(w)``."""
    Tn = truncated_divided_coalgebra(n, 2, "w", ring=exterior.ring)
    comod = DGComodule(circle, Tn.complex, Tn.comul_key, "left", Tn.name)
    tt = twisted_tensor_ac(regular_module(exterior, "right"), comod, theta,
                           left_action=regular_module(exterior, "left"))
    return tt.left_module  # type: ignore[return-value]


def sphere_contraction(N: DGModule, n: int) -> Contraction:
    """Contraction of the sphere model onto ``{1, v⊗γ_{n−1}(w)}``: ``h(v⊗γ_{k−1}(w)) = −γ_k(w)``."""
    X = N.complex
    M = X.module
    one = (0, 0)
    top = (2 * n - 1, 0)
    H = GradedModule(M.ring, TruncationWindow(0, 2 * n - 1),
                     {0: [M.label(one)], 2 * n - 1: [M.label(top)]}, True, True)
    small = ChainComplex.zero_differential(H)
    kept = {one: (0, 0), top: (2 * n - 1, 0)}

    def incl_fn(k: Key) -> Vector:
        return {one: 1} if k[0] == 0 else {top: 1}

    def proj_fn(k: Key) -> Vector:
        return {kept[k]: 1} if k in kept else {}

    def h_fn(k: Key) -> Vector:
        q = k[0]
        if q % 2 == 1 and k != top:  # v⊗γ_{k−1}(w) in degree 2k − 1
            return {(q + 1, 0): -1}
        return {}

    incl = HomogeneousMap.from_function(H, M, 0, incl_fn)
    proj = HomogeneousMap.from_function(M, H, 0, proj_fn)
    h = HomogeneousMap.from_function(M, M, 1, h_fn)
    return repair_side_conditions(X, small, incl, proj, h)


def example_71(cfg: Example71Config) -> Example71Result:
    n, w, ring = cfg.n, cfg.window, cfg.ring
    G = divided_power_bialgebra(2, TruncationWindow(0, w.hi), "u", ring=ring).diagonal
    L = exterior_algebra([1], ["v"], ring=ring)
    v = L.module.find("v")
    theta = TwistingCochain.from_function(G, L, lambda k: {v: 1} if k == (2, 0) else {}, name="ϑ")
    N = sphere_model(n, G, L, theta)
    cN = sphere_contraction(N, n)
    # Γ[u] ⊗ (contraction of N onto H), then perturb by −ϑ∩
    c0 = tensor_contraction(G.complex, cN, True, TruncationWindow(0, w.hi))
    twisted_big = twisted_tensor(regular_comodule(G, "right"), N, theta, TruncationWindow(0, w.hi))
    if twisted_big.tensor != c0.big.module:
        raise WindowError("tensor windows disagree")
    delta = twisted_big.perturbation
    filt = {k: c0.big.module.pair(k)[0][0] for k in c0.big.module.keys()}
    c0.filtration = filt
    D, pc = perturb(c0, delta)
    # the candidate twisting cochain Γ[u] → End(H)
    Hc = cN.small
    E = endomorphism_dga(Hc)
    HE = E.module
    gen = (2 * n - 1, 0)
    elem = HE.elem_index[((0, 0), gen)]
    tau = TwistingCochain.from_function(G, E, lambda k: {elem: 1} if k == (2 * n, 0) else {}, name="τ")
    tw = twisted_tensor(regular_comodule(G, "right"), E.evaluation, tau,  # type: ignore[attr-defined]
                        TruncationWindow(0, w.hi), check=False)
    if tw.tensor != pc.small.module:
        raise WindowError("small tensor windows disagree")
    sgn = 0
    if D.equals(tw.perturbation):
        sgn = 1
    elif D.equals(-tw.perturbation):
        sgn = -1
    H = homology(pc.small)
    verification = {
        "d_squared": pc.small.d_squared_failure() is None and pc.big.d_squared_failure() is None,
        "contraction_axioms": cN.is_valid() and pc.is_valid(),
        "tc_valid": theta.is_valid() and tau.is_valid(),
        "derived_matches_twisted": sgn != 0,
        "fibre_differential": _check_fibre(N, n),
    }
    return Example71Result(cfg, G, L, theta, N, cN, c0, D, pc, tau, tw, sgn, H, verification)


def _check_fibre(N: DGModule, n: int) -> bool:
    """``d γ_k(w) = v⊗γ_{k−1}(w)`` and ``d(v⊗γ_k(w)) = 0``."""
    for k in range(1, n):
        if N.d.apply_key((2 * k, 0)) != {(2 * k - 1, 0): 1}:
            return False
    return all(not N.d.apply_key((2 * k + 1, 0)) for k in range(n))


def expected_projective_space(n: int, H: dict[int, HomologyGroup]) -> bool:
    """``ℤ`` in degrees ``0, 2, …, 2n−2`` and zero in every other reliable degree."""
    for q, g in H.items():
        if not g.reliable:
            continue
        want = 1 if (q % 2 == 0 and 0 <= q <= 2 * n - 2) else 0
        if g.free_rank != want or g.torsion:
            return False
    return True
