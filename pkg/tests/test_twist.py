import random

import pytest
from hypothesis import given, strategies as st

from hptalg.dg import (acyclic_pair, divided_power_bialgebra, dual_algebra_of, dual_coalgebra_of,
                       dual_module_action, endomorphism_dga, exterior_algebra, regular_comodule,
                       regular_module, symmetric_coalgebra, tensor_algebra, tensor_coalgebra,
                       trivial_module)
from hptalg.exact_linear import CoefficientRing, ExactMatrix
from hptalg.graded import (ChainComplex, GradedModule, HomogeneousMap, TensorModule,
                           TruncationWindow, homology, sign)
from hptalg.koszul import koszul_pair, sphere_model
from hptalg.twist import (TwistingCochain, TwistingError, TwistingHomotopy, cap_isomorphism,
                          chain_map_defect, cup, cup_module, cup_shift_isomorphism, curry,
                          dual_twisting_cochain, hom_as_tensor, hom_D, homotopy_inverse,
                          hom_left_action, left_cap, right_cap, standard_twisted_tensor, standard_twisted_tensor_ac,
                          twisted_hom, twisted_tensor, twisted_tensor_ac, unit_counit, uncurry)
from randomized import random_exterior_module, random_symmetric_comodule

Z = CoefficientRing.integers()
seeds = st.integers(0, 10**6)


def random_map(rng, src, tgt, shift, bound=2):
    return HomogeneousMap.from_function(
        src, tgt, shift, lambda c: {k: rng.randint(-bound, bound) for k in tgt.keys(c[0] + shift)},
        tolerant=True)


def circle(window=10):
    """Γ[u] with |u| = 2, Λ[v] with |v| = 1 and ϑ(γ₁(u)) = v."""
    G = divided_power_bialgebra(2, window, "u").diagonal
    L = exterior_algebra([1], ["v"])
    v = L.module.find("v")
    theta = TwistingCochain.from_function(G, L, lambda k: {v: 1} if k == (2, 0) else {}, name="ϑ")
    return G, L, theta


def groups(H):
    return {q: (g.free_rank, g.torsion) for q, g in H.items() if g.reliable}


# ---------------------------------------------------------------- cup products

def test_unit_counit_is_a_two_sided_unit():
    rng = random.Random(0)
    S, L = symmetric_coalgebra([2, 4], 10), exterior_algebra([1, 3])
    one = unit_counit(S, L)
    for shift in (-3, -1, 0):
        f = random_map(rng, S.module, L.module, shift)
        assert cup(one, f, S, L).equals(f) and cup(f, one, S, L).equals(f)


def test_cup_square_of_circle_cochain_vanishes():
    G, L, theta = circle()
    sq = cup(theta.map, theta.map, G, L)
    assert sq.is_zero()


@given(seeds)
def test_cup_is_associative(seed):
    rng = random.Random(seed)
    S, L = symmetric_coalgebra([2, 4], 10), exterior_algebra([1, 3])
    f, g, h = (random_map(rng, S.module, L.module, rng.choice([-3, -2, -1, 0])) for _ in range(3))
    assert cup(cup(f, g, S, L), h, S, L).equals(cup(f, cup(g, h, S, L), S, L))


@given(seeds)
def test_hom_differential_is_a_derivation_of_cup(seed):
    rng = random.Random(seed)
    K1, K2 = acyclic_pair(1), acyclic_pair(2)
    C = tensor_coalgebra(symmetric_coalgebra([2], 8), K2.diagonal, TruncationWindow(0, 8))
    A = tensor_algebra(exterior_algebra([1]), K1)
    r1, r2 = rng.choice([-2, -1, 0]), rng.choice([-2, -1, 0])
    f, g = random_map(rng, C.module, A.module, r1), random_map(rng, C.module, A.module, r2)
    D = lambda m: hom_D(m, C.complex, A.complex)
    lhs = D(cup(f, g, C, A))
    rhs = cup(D(f), g, C, A) + cup(f, D(g), C, A).scale(sign(r1))
    assert lhs.equals(rhs)


# ---------------------------------------------------------------- caps

def test_unit_counit_caps_to_identity():
    S, L = symmetric_coalgebra([2, 4], 8), exterior_algebra([1, 3])
    T = TensorModule(S.module, L.module)
    one = unit_counit(S, L)
    assert left_cap(one, regular_comodule(S, "right"), regular_module(L, "left"), T).equals(
        HomogeneousMap.identity(T))
    T2 = TensorModule(L.module, S.module)
    assert right_cap(one, regular_module(L, "right"), regular_comodule(S, "left"), T2).equals(
        HomogeneousMap.identity(T2))


def test_circle_cochain_caps_first_divided_power():
    G, L, theta = circle()
    T = TensorModule(G.module, L.module)
    cap = left_cap(theta.map, regular_comodule(G, "right"), regular_module(L, "left"), T)
    g1, one, v = G.module.find("γ1(u)"), L.unit_key, L.module.find("v")
    assert cap.apply_key(T.lookup(g1, one)) == {T.lookup(G.coaug_key, v): 1}


def _three_term_complex():
    M = GradedModule(Z, TruncationWindow(0, 2), {0: ["a", "b"], 1: ["c"], 2: ["e"]}, True, True)
    return ChainComplex.from_blocks(M, {1: ExactMatrix.from_dense(Z, [[1], [-1]])})


@given(seeds)
def test_left_cap_is_an_action_and_right_cap_an_antiaction(seed):
    # End(X) is not graded commutative, so the order of composition is visible
    rng = random.Random(seed)
    S = symmetric_coalgebra([2], 6)
    E = endomorphism_dga(_three_term_complex())
    ev = E.evaluation
    f = random_map(rng, S.module, E.module, rng.choice([-2, -1, 0]))
    h = random_map(rng, S.module, E.module, rng.choice([-2, -1, 0]))
    T = TensorModule(S.module, ev.module)
    Mr = regular_comodule(S, "right")
    lc = lambda phi: left_cap(phi, Mr, ev, T)
    assert lc(cup(f, h, S, E)).equals(lc(f) @ lc(h))
    evr = dual_module_action(ev)
    T2 = TensorModule(evr.module, S.module)
    Ml = regular_comodule(S, "left")
    rc = lambda phi: right_cap(phi, evr, Ml, T2)
    assert rc(cup(f, h, S, E)).equals((rc(h) @ rc(f)).scale(sign(f.shift * h.shift)))


# ---------------------------------------------------------------- validity

def test_cochain_that_is_not_a_cycle_is_rejected():
    # target R{x₂, y₃} with dy = x: τ(γ₁(y4)) = y has Dτ = x·ε but τ∪τ = 0 there
    S = symmetric_coalgebra([4], 8)
    K = acyclic_pair(2)
    y = K.module.find("y")
    bad = TwistingCochain.from_function(S, K, lambda c: {y: 1} if c == S.cogenerators[0] else {})
    assert bad.failure() == "twisting: Dτ ≠ τ∪τ at degree 4, basis γ1(y4)"
    with pytest.raises(TwistingError):
        bad.require_valid()
    with pytest.raises(TwistingError):
        twisted_tensor(regular_comodule(S, "right"), regular_module(K, "left"), bad)
    assert koszul_pair([1], 8).tau.is_valid()


def test_cochain_with_nonzero_counit_is_rejected():
    K = acyclic_pair(1)
    L = exterior_algebra([1])
    x = K.module.find("x")
    bad = TwistingCochain.from_function(K.diagonal, L, lambda c: {L.unit_key: 1} if c == x else {})
    assert bad.failure() == "twisting: ετ ≠ 0 at degree 1, basis x"


@given(seeds, st.sampled_from([[1], [1, 3], [3, 5]]))
def test_validity_agrees_with_square_zero_twisted_differential(seed, degs):
    rng = random.Random(seed)
    S = koszul_pair(degs, 8).sigma_prime
    L = tensor_algebra(exterior_algebra(degs), acyclic_pair(2))
    vals = {c: {a: rng.choice([-1, 0, 0, 1]) for a in L.module.keys(c[0] - 1) if a[0] > 0}
            for c in S.module.keys() if c[0] > 0}
    tau = TwistingCochain.from_function(S, L, lambda c: vals.get(c, {}))
    tt = twisted_tensor(regular_comodule(S, "right"), regular_module(L, "left"), tau, check=False)
    assert tau.is_valid() == (tt.complex.d_squared_failure() is None)


# ---------------------------------------------------------------- twisted tensor products

@pytest.mark.parametrize("degs", [[1], [1, 3], [3, 5]])
def test_koszul_twisted_tensor_is_acyclic(degs):
    kp = koszul_pair(degs, 12)
    for tt in (standard_twisted_tensor(kp.tau), standard_twisted_tensor_ac(kp.tau)):
        H = groups(homology(tt.complex))
        assert H[0] == (1, ())
        assert all(g == (0, ()) for q, g in H.items() if q != 0)


def test_standard_twisted_tensors_carry_their_structures():
    kp = koszul_pair([1, 3], 10)
    tt = standard_twisted_tensor(kp.tau)
    assert tt.left_comodule.check() == [] and tt.right_module.check() == []
    tt2 = standard_twisted_tensor_ac(kp.tau)
    assert tt2.left_module.check() == [] and tt2.right_comodule.check() == []


def test_zero_cochain_gives_untwisted_tensor():
    S, L = symmetric_coalgebra([2], 8), exterior_algebra([1])
    tt = standard_twisted_tensor(TwistingCochain.zero(S, L))
    assert tt.perturbation.is_zero() and tt.complex.d.equals(tt.untwisted)


def test_sphere_model_differential():
    G, L, theta = circle(12)
    N = sphere_model(4, G, L, theta)
    M = N.module
    for k in range(1, 4):
        below = f"v⊗γ{k - 1}(w)" if k > 1 else "v⊗1"
        assert N.d.apply_key(M.find(f"1⊗γ{k}(w)")) == {M.find(below): 1}
    assert N.check() == []
    assert groups(homology(N.complex)) == {0: (1, ()), 1: (0, ()), 2: (0, ()), 3: (0, ()),
                                            4: (0, ()), 5: (0, ()), 6: (0, ()), 7: (1, ())}


@given(seeds)
def test_twisted_tensor_of_random_module_has_comodule_structure(seed):
    rng = random.Random(seed)
    _, N = random_exterior_module(rng)
    kp = koszul_pair([1], 8)
    if N.algebra.module != kp.lam.module:
        return
    tt = twisted_tensor(regular_comodule(kp.sigma_prime, "right"), N, kp.tau,
                        left_coaction=regular_comodule(kp.sigma_prime, "left"))
    assert tt.complex.d_squared_failure() is None
    assert tt.left_comodule.check() == []


# ---------------------------------------------------------------- twisted Hom

def test_twisted_hom_into_ground_ring_is_untwisted():
    kp = koszul_pair([1, 3], 8)
    th = twisted_hom(kp.sigma_prime, trivial_module(kp.lam, "right"), kp.tau)
    assert th.perturbation.is_zero()
    H = groups(homology(th.complex))
    # Hom(Σ′[y₂, y₄], ℤ): one copy of ℤ in each degree −2a − 4b
    assert all(H[q] == (len(th.complex.module.labels(q)), ()) for q in H)


@pytest.mark.parametrize("degs, top", [([1], 1), ([1, 3], 4)])
def test_twisted_hom_into_exterior_algebra_sits_in_top_degree(degs, top):
    # Ext over an exterior algebra with coefficients in itself is one copy of ℤ at the top class
    kp = koszul_pair(degs, 10)
    th = twisted_hom(kp.sigma_prime, regular_module(kp.lam, "right"), kp.tau)
    assert th.complex.d_squared_failure() is None
    H = groups(homology(th.complex))
    assert {q: g for q, g in H.items() if g != (0, ())} == {top: (1, ())}


def test_twisted_hom_matches_tensor_with_duals():
    kp = koszul_pair([1, 3], 8)
    N = regular_module(kp.lam, "right")
    th = twisted_hom(kp.sigma_prime, N, kp.tau)
    iso, tt = hom_as_tensor(th)
    assert chain_map_defect(iso, th.complex, tt.complex) is None
    for q in th.complex.module.degrees():
        b = iso.block(q)
        if tt.complex.module.dim(q):
            assert b.rows == b.cols and abs(sum(v for _, _, v in b.entries())) <= b.cols
            assert sorted(c for _, c, _ in b.entries()) == list(range(b.cols))


def test_left_cstar_action_on_twisted_hom():
    kp = koszul_pair([1], 8)
    th = twisted_hom(kp.sigma_prime, regular_module(kp.lam, "right"), kp.tau)
    assert hom_left_action(th, dual_algebra_of(kp.sigma_prime)).check() == []


# ---------------------------------------------------------------- homotopies between twisting cochains

def test_inverse_of_trivial_homotopy():
    kp = koszul_pair([1], 8)
    one = unit_counit(kp.sigma_prime, kp.lam)
    psi = TwistingHomotopy(kp.tau, kp.tau, one)
    assert psi.is_valid()
    assert homotopy_inverse(psi).map.equals(one)


def test_homotopy_inverse_of_two_term_series():
    # ψ = ηε + φ with φ(y₄) = x₁x₃; φ∪φ vanishes, so ψ⁻¹ = ηε − φ
    kp = koszul_pair([1, 3], 10)
    S, L = kp.sigma_prime, kp.lam
    y4 = S.cogenerators[1]
    one = unit_counit(S, L)
    phi = HomogeneousMap.from_function(S.module, L.module, 0,
                                       lambda c: {(4, 0): 1} if c == y4 else {}, tolerant=True)
    inv = homotopy_inverse(TwistingHomotopy(kp.tau, kp.tau, one + phi))
    assert inv.map.equals(one - phi)


@given(seeds)
def test_homotopy_inverse_is_a_two_sided_inverse(seed):
    rng = random.Random(seed)
    kp = koszul_pair([1, 3], 10)
    S, L = kp.sigma_prime, kp.lam
    one = unit_counit(S, L)
    tilde = HomogeneousMap.from_function(
        S.module, L.module, 0,
        lambda c: {k: rng.randint(-2, 2) for k in L.module.keys(c[0])} if c[0] > 0 else {}, tolerant=True)
    psi = TwistingHomotopy(kp.tau, kp.tau, one + tilde)
    inv = homotopy_inverse(psi)
    assert cup(psi.map, inv.map, S, L).equals(one)
    assert cup(inv.map, psi.map, S, L).equals(one)


def _conjugated_cochain(kp, a):
    """``τ₁ = (ψ∪τ₂ + Dψ)∪ψ⁻¹`` for ``ψ = ηε + φ``, ``φ(y₄) = a·x₁x₃``."""
    S, L = kp.sigma_prime, kp.lam
    one = unit_counit(S, L)
    y4 = S.cogenerators[1]
    phi = HomogeneousMap.from_function(S.module, L.module, 0,
                                       lambda c: {(4, 0): a} if c == y4 else {}, tolerant=True)
    psi = one + phi
    tau2 = kp.tau
    inv = homotopy_inverse(TwistingHomotopy(tau2, tau2, psi)).map
    Dpsi = hom_D(psi, S.complex, L.complex)
    t1 = cup(cup(psi, tau2.map, S, L) + Dpsi, inv, S, L)
    tau1 = TwistingCochain(S, L, t1, name="τ₁")
    return TwistingHomotopy(tau1, tau2, psi)


@pytest.mark.parametrize("a", [1, -2, 3])
def test_conjugated_cochain_and_homotopy_are_valid(a):
    kp = koszul_pair([1, 3], 10)
    h = _conjugated_cochain(kp, a)
    assert h.tau1.is_valid() and h.is_valid()
    back = homotopy_inverse(h)
    assert back.is_valid()


@pytest.mark.parametrize("a", [1, -2])
def test_cap_isomorphism_is_an_invertible_chain_map(a):
    kp = koszul_pair([1, 3], 10)
    h = _conjugated_cochain(kp, a)
    S, L = kp.sigma_prime, kp.lam
    Mr, Nl = regular_comodule(S, "right"), regular_module(L, "left")
    f, src, tgt = cap_isomorphism(h, Mr, Nl)
    assert chain_map_defect(f, src.complex, tgt.complex) is None
    g, src2, tgt2 = cap_isomorphism(homotopy_inverse(h), Mr, Nl)
    ident = HomogeneousMap.identity(src.tensor)
    assert (g @ f).equals(ident) and (f @ g).equals(ident)


@pytest.mark.parametrize("a", [1, 3])
def test_cup_shift_is_an_invertible_chain_map(a):
    kp = koszul_pair([1, 3], 10)
    h = _conjugated_cochain(kp, a)
    N = regular_module(kp.lam, "right")
    f, src, tgt = cup_shift_isomorphism(h, N)
    assert chain_map_defect(f, src.complex, tgt.complex) is None
    g, _, _ = cup_shift_isomorphism(homotopy_inverse(h), N)
    ident = HomogeneousMap.identity(src.hom)
    assert (g @ f).equals(ident) and (f @ g).equals(ident)


def test_invalid_homotopy_is_reported():
    kp = koszul_pair([1], 8)
    S, L = kp.sigma_prime, kp.lam
    psi = TwistingHomotopy(kp.tau, kp.tau, unit_counit(S, L).scale(2))
    assert not psi.is_valid() and psi.failure().startswith("homotopy:")


# ---------------------------------------------------------------- duals and adjunction

@pytest.mark.parametrize("degs", [[1], [1, 3], [3, 5]])
def test_dual_cochain_is_valid(degs):
    kp = koszul_pair(degs, 10)
    ts = dual_twisting_cochain(kp.tau)
    assert ts.is_valid()
    tss = dual_twisting_cochain(ts, dual_coalgebra_of(ts.algebra), dual_algebra_of(ts.coalgebra))
    # each dualisation contributes (−1)^{|source|}; |c| + |τ(c)| is odd, so τ** = −τ
    for c in kp.sigma_prime.module.keys():
        assert tss.value(c) == {a: -v for a, v in kp.tau.value(c).items()}


def test_curry_of_counit_is_augmentation():
    kp = koszul_pair([1], 8)
    S, L = kp.sigma_prime, kp.lam
    tt = standard_twisted_tensor(kp.tau)
    eps = HomogeneousMap.from_function(S.module, L.module, 0,
                                       lambda c: {L.unit_key: 1} if c[0] == 0 else {}, tolerant=True)
    R = trivial_module(L, "right")
    phi = curry(HomogeneousMap.from_function(S.module, R.module, 0,
                                             lambda c: {(0, 0): 1} if c[0] == 0 else {}, tolerant=True), tt, R)
    T = tt.tensor
    for key in T.keys():
        c, a = T.pair(key)
        expect = {(0, 0): 1} if c[0] == 0 and a[0] == 0 else {}
        assert phi.apply_key(key) == expect
    assert chain_map_defect(phi, tt.complex, R.complex) is None
    assert uncurry(curry(eps, tt, regular_module(L, "right")), tt).equals(eps)


@given(seeds)
def test_curry_turns_cap_into_cup(seed):
    rng = random.Random(seed)
    kp = koszul_pair([1, 3], 8)
    S, L = kp.sigma_prime, kp.lam
    tt = standard_twisted_tensor(kp.tau)
    R = regular_module(L, "right")
    alpha = random_map(rng, S.module, L.module, rng.choice([-1, 0]))
    phi = random_map(rng, S.module, L.module, rng.choice([-2, -1, 0]))
    lhs = curry(cup(alpha, phi, S, L), tt, R)
    cap = left_cap(phi, regular_comodule(S, "right"), regular_module(L, "left"), tt.tensor)
    rhs = curry(alpha, tt, R) @ cap
    assert lhs.equals(rhs)
    assert uncurry(curry(alpha, tt, R), tt).equals(alpha)


@given(seeds)
def test_cup_module_on_regular_module_is_cup(seed):
    rng = random.Random(seed)
    kp = koszul_pair([1], 8)
    S, L = kp.sigma_prime, kp.lam
    f = random_map(rng, S.module, L.module, rng.choice([-1, 0]))
    h = random_map(rng, S.module, L.module, rng.choice([-1, 0]))
    assert cup_module(f, h, regular_comodule(S, "right"), regular_module(L, "right")).equals(cup(f, h, S, L))


@given(seeds)
def test_random_comodule_twisted_by_koszul_cochain(seed):
    rng = random.Random(seed)
    S, M = random_symmetric_comodule(rng)
    L = exterior_algebra([1])
    x = L.generators[0]
    tau = TwistingCochain.from_function(S, L, lambda c: {x: 1} if c == S.cogenerators[0] else {})
    if not tau.is_valid():
        return
    tt = twisted_tensor_ac(regular_module(L, "right"), M, tau, left_action=regular_module(L, "left"))
    assert tt.complex.d_squared_failure() is None and tt.left_module.check() == []
