import random

import pytest
from hypothesis import given, strategies as st

from hptalg.dg import (DGComodule, DGModule, StructureError, acyclic_pair, divided_power_bialgebra,
                       dual_module_action, exterior_algebra, nonnegative_endo_dga, regular_module,
                       symmetric_coalgebra, trivial_module, truncated_divided_coalgebra)
from hptalg.exact_linear import CoefficientRing, ExactMatrix
from hptalg.fixtures import rp2_complex
from hptalg.graded import (ChainComplex, GradedModule, HomogeneousMap, TruncationWindow, homology,
                           is_quasi_isomorphism)
from hptalg.hpt import (Contraction, ContractionError, Perturbation, PerturbationError,
                        contraction_onto_ground, contraction_onto_homology, drop_unit_factor,
                        identity_contraction, idempotent_twisting_cochain, is_algebra_map,
                        is_coalgebra_map, lift_homotopy, perturb, repair_side_conditions,
                        splitting_check, swap_inclusion, swap_projection, tensor_contraction,
                        transfer_along_algebra_contraction, transfer_along_coalgebra_contraction)
from hptalg.twist import (TwistingCochain, chain_map_defect, twisted_tensor_ac, unit_counit)
from oracles import flatten, perturbation_formulas
from randomized import random_algebra_transfer, random_coalgebra_transfer, random_filtered_contraction

Z = CoefficientRing.integers()
seeds = st.integers(0, 10**6)


def groups(H):
    return {q: (g.free_rank, g.torsion) for q, g in H.items() if g.reliable}


def two_cell():
    """``a₁ → b₀`` with ``d a = b`` plus a free class ``m₀``."""
    M = GradedModule(Z, TruncationWindow(0, 1), {0: ["b", "m"], 1: ["a"]}, True, True)
    X = ChainComplex.from_blocks(M, {1: ExactMatrix.from_dense(Z, [[1], [0]])})
    H = GradedModule(Z, TruncationWindow(0, 1), {0: ["m"]}, True, True)
    return X, ChainComplex.zero_differential(H)


def two_cell_maps(X, Hc):
    m, b, a = X.module.find("m"), X.module.find("b"), X.module.find("a")
    incl = HomogeneousMap.from_function(Hc.module, X.module, 0, lambda k: {m: 1})
    proj = HomogeneousMap.from_function(X.module, Hc.module, 0, lambda k: {(0, 0): 1} if k == m else {})
    h = HomogeneousMap.from_function(X.module, X.module, 1, lambda k: {a: -1} if k == b else {})
    return incl, proj, h


# ---------------------------------------------------------------- contractions

def test_identity_contraction_is_valid():
    assert identity_contraction(rp2_complex()).is_valid()


def test_hand_contraction_and_failure_messages():
    X, Hc = two_cell()
    incl, proj, h = two_cell_maps(X, Hc)
    assert Contraction(X, Hc, incl, proj, h).is_valid()
    bad = Contraction(X, Hc, incl, proj, h.scale(2))
    assert bad.failures()[0] == "contraction: Dh = ∇π − 1 fails at degree 0, basis b"
    with pytest.raises(ContractionError):
        bad.require_valid()


def test_contraction_rejects_wrong_degrees():
    X, Hc = two_cell()
    incl, proj, h = two_cell_maps(X, Hc)
    with pytest.raises(ContractionError):
        Contraction(X, Hc, incl, proj, HomogeneousMap.zero(X.module, X.module, 0))


def test_repair_leaves_valid_contraction_unchanged():
    X, Hc = two_cell()
    incl, proj, h = two_cell_maps(X, Hc)
    c = repair_side_conditions(X, Hc, incl, proj, h)
    assert c.htpy.equals(h)


@given(seeds)
def test_repair_fixes_side_conditions(seed):
    # h + dk − kd still satisfies Dh = ∇π − 1 for any degree-2 k, but not the side conditions
    rng = random.Random(seed)
    c = random_filtered_contraction(rng).contraction
    N = c.big.module
    k = HomogeneousMap.from_function(N, N, 2, lambda x: {t: rng.randint(-2, 2) for t in N.keys(x[0] + 2)},
                                     tolerant=True)
    h = c.htpy + (c.big.d @ k) - (k @ c.big.d)
    assert Contraction(c.big, c.small, c.incl, c.proj, h).defects()["Dh = ∇π − 1"].is_zero()
    assert repair_side_conditions(c.big, c.small, c.incl, c.proj, h).is_valid()


def test_repair_rejects_broken_homotopy_equation():
    X, Hc = two_cell()
    incl, proj, h = two_cell_maps(X, Hc)
    with pytest.raises(ContractionError):
        repair_side_conditions(X, Hc, incl, proj, HomogeneousMap.zero(X.module, X.module, 1))


def test_contraction_onto_homology_of_free_complex():
    X, _ = two_cell()
    c = contraction_onto_homology(X)
    assert c.is_valid() and groups(homology(c.small)) == groups(homology(X))


def test_contraction_onto_homology_refuses_torsion():
    with pytest.raises(ContractionError):
        contraction_onto_homology(rp2_complex())


def test_contraction_onto_homology_works_over_a_field():
    F3 = CoefficientRing.prime_field(3)
    X = rp2_complex(F3)
    c = contraction_onto_homology(X)
    assert c.is_valid() and groups(homology(c.small)) == {0: (1, ()), 1: (0, ()), 2: (0, ())}


@given(seeds)
def test_swapping_structure_maps_keeps_a_contraction(seed):
    rng = random.Random(seed)
    inst = random_filtered_contraction(rng)
    c = inst.contraction
    assert c.is_valid()
    # ∇″ = ∇ + dk + kd and π″ = π + dj + jd, with k and j killed by π and ∇ through q = 1 − ∇π
    M, N = c.small.module, c.big.module
    q = HomogeneousMap.identity(N) - (c.incl @ c.proj)
    k = q @ HomogeneousMap.from_function(M, N, 1, lambda x: {t: rng.randint(-1, 1) for t in N.keys(x[0] + 1)},
                                         tolerant=True)
    new_incl = c.incl + (c.big.d @ k) + (k @ c.small.d)
    assert swap_inclusion(c, new_incl).is_valid()
    j = HomogeneousMap.from_function(N, M, 1, lambda x: {t: rng.randint(-1, 1) for t in M.keys(x[0] + 1)},
                                     tolerant=True) @ q
    new_proj = c.proj + (c.small.d @ j) + (j @ c.big.d)
    assert swap_projection(c, new_proj).is_valid()


# ---------------------------------------------------------------- perturbation lemma

def test_zero_perturbation_changes_nothing():
    inst = random_filtered_contraction(random.Random(3))
    c = inst.contraction
    zero = HomogeneousMap.zero(c.big.module, c.big.module, -1)
    D, c2 = perturb(c, zero, inst.filtration)
    assert D.is_zero()
    assert c2.incl.equals(c.incl) and c2.proj.equals(c.proj) and c2.htpy.equals(c.htpy)


@given(seeds)
def test_perturbed_contraction_is_valid_and_matches_dense_formulas(seed):
    inst = random_filtered_contraction(random.Random(seed))
    c = inst.contraction
    assert Perturbation(c.big, inst.perturbation).failure(inst.filtration) is None
    D, c2 = perturb(c, inst.perturbation, inst.filtration)
    assert c2.failures() == []
    assert c2.big.d_squared_failure() is None and c2.small.d_squared_failure() is None
    # independent dense evaluation of the same series
    big, small = c.big.module.keys(), c.small.module.keys()
    n = len(big)
    Dd, nab, pi, h = perturbation_formulas(flatten(c.incl, small, big), flatten(c.proj, big, small),
                                           flatten(c.htpy, big, big), flatten(inst.perturbation, big, big), n)
    assert flatten(D, small, small) == Dd
    assert flatten(c2.incl, small, big) == nab
    assert flatten(c2.proj, big, small) == pi
    assert flatten(c2.htpy, big, big) == h
    assert groups(homology(c2.small)) == groups(homology(c2.big))


def test_non_lowering_perturbation_is_rejected():
    X, Hc = two_cell()
    incl, proj, h = two_cell_maps(X, Hc)
    c = Contraction(X, Hc, incl, proj, h)
    # ∂(a) = m keeps d + ∂ square-zero but does not lower a constant filtration
    m, a = X.module.find("m"), X.module.find("a")
    delta = HomogeneousMap.from_function(X.module, X.module, -1, lambda k: {m: 1} if k == a else {})
    flat = {k: 0 for k in X.module.keys()}
    with pytest.raises(PerturbationError, match="does not lower filtration"):
        perturb(c, delta, flat)


def test_perturbation_that_breaks_square_zero_is_rejected():
    X = rp2_complex()
    e0, e1 = X.module.find("e0"), X.module.find("e1")
    delta = HomogeneousMap.from_function(X.module, X.module, -1, lambda k: {e0: 1} if k == e1 else {})
    assert Perturbation(X, delta).failure() == "perturbation: d∂ + ∂d + ∂∂ ≠ 0 at degree 2, basis e2"
    assert Perturbation(X, HomogeneousMap.zero(X.module, X.module, 0)).failure() == \
        "perturbation: not a degree −1 endomorphism"


def test_non_nilpotent_series_raises():
    # h∂ = identity on a: d a = b, h b = −a and ∂ a = −b gives h∂ a = a
    X, Hc = two_cell()
    incl, proj, h = two_cell_maps(X, Hc)
    c = Contraction(X, Hc, incl, proj, h)
    a, b = X.module.find("a"), X.module.find("b")
    delta = HomogeneousMap.from_function(X.module, X.module, -1, lambda k: {b: -1} if k == a else {})
    with pytest.raises(PerturbationError, match="does not terminate"):
        perturb(c, delta, None)


# ---------------------------------------------------------------- tensoring contractions

def test_tensor_contraction_with_acyclic_pair():
    K = acyclic_pair(2)
    cK = contraction_onto_ground(K.complex, K.unit, K.aug)
    assert cK.is_valid()
    S = symmetric_coalgebra([2], 8)
    c = tensor_contraction(S.complex, cK, True, TruncationWindow(0, 8))
    assert c.is_valid()
    c2 = drop_unit_factor(c)
    assert c2.is_valid() and c2.small.module == S.module
    assert is_quasi_isomorphism(c2.incl, c2.small, c2.big)


# ---------------------------------------------------------------- transferring twisting cochains

@given(seeds)
def test_coalgebra_transfer(seed):
    inst = random_coalgebra_transfer(random.Random(seed))
    c, Cp = inst.contraction, inst.coalgebra
    assert is_coalgebra_map(c.incl, inst.sigma.coalgebra, Cp)
    xi = transfer_along_coalgebra_contraction(inst.sigma, Cp, c)
    assert xi.failure() is None
    assert (xi.map @ c.incl).equals(inst.sigma.map)
    assert (xi.map @ c.htpy).is_zero()


@given(seeds)
def test_algebra_transfer(seed):
    inst = random_algebra_transfer(random.Random(seed))
    c, Ap = inst.contraction, inst.algebra
    assert is_algebra_map(c.proj, Ap, inst.sigma.algebra)
    xi = transfer_along_algebra_contraction(inst.sigma, Ap, c)
    assert xi.failure() is None
    assert (c.proj @ xi.map).equals(inst.sigma.map)
    assert (c.htpy @ xi.map).is_zero()


def test_transfer_with_zero_homotopy_is_composite():
    # with h = 0 the recursion stops after one step: ξ = σπ
    S, L = symmetric_coalgebra([2], 8), exterior_algebra([1])
    sigma = TwistingCochain.from_function(S, L, lambda c: {L.generators[0]: 1} if c == S.cogenerators[0] else {})
    c = identity_contraction(S.complex)
    xi = transfer_along_coalgebra_contraction(sigma, S, c)
    assert xi.map.equals(sigma.map)


@given(seeds)
def test_lifted_homotopy_links_transferred_and_included_cochains(seed):
    inst = random_algebra_transfer(random.Random(seed))
    c, Ap, sigma = inst.contraction, inst.algebra, inst.sigma
    S, L = sigma.coalgebra, sigma.algebra
    xi = transfer_along_algebra_contraction(sigma, Ap, c)
    t2 = TwistingCochain(S, Ap, c.incl @ sigma.map)
    assert t2.is_valid()
    psi = lift_homotopy(xi, t2, c, unit_counit(S, L))
    assert psi.failure() is None
    assert (c.proj @ psi.map).equals(unit_counit(S, L))


# ---------------------------------------------------------------- idempotent-twisted cochains

def _circle_fibre(n):
    G = divided_power_bialgebra(2, 8 * n, "u").diagonal
    L = exterior_algebra([1], ["v"])
    v = L.module.find("v")
    theta = TwistingCochain.from_function(G, L, lambda k: {v: 1} if k == (2, 0) else {})
    Tn = truncated_divided_coalgebra(n, 2, "w")
    comod = DGComodule(G, Tn.complex, Tn.comul_key, "left")
    tt = twisted_tensor_ac(regular_module(L, "right"), comod, theta, left_action=regular_module(L, "left"))
    return G, L, theta, tt.left_module


def test_idempotent_cochain_with_identity_and_zero_homotopy():
    # p = 1, ℏ = 0: only the one-letter component survives and the identity holds trivially
    _, _, _, Nsh = _circle_fibre(2)
    U = nonnegative_endo_dga(Nsh.complex)
    one = dict(U.unit)
    it = idempotent_twisting_cochain(U, one, {}, 6)
    assert it.failure() is None


def test_idempotent_cochain_from_sphere_contraction():
    _, _, _, Nsh = _circle_fibre(2)
    U = nonnegative_endo_dga(Nsh.complex)
    c = contraction_onto_homology(Nsh.complex)
    E = U.ambient
    p = U.from_ambient(E.module.vector_of(c.incl @ c.proj))
    hbar = U.from_ambient(E.module.vector_of(-c.htpy))
    assert idempotent_twisting_cochain(U, p, hbar, 8).failure() is None
    # with +h the homotopy equation dℏ = 1 − p fails, which is refused up front
    with pytest.raises(StructureError, match="dℏ ≠ 1 − p"):
        idempotent_twisting_cochain(U, p, U.from_ambient(E.module.vector_of(c.htpy)), 8)


# ---------------------------------------------------------------- splitting

def test_split_instance_untwists():
    G, L, theta, _ = _circle_fibre(2)
    M = GradedModule(Z, TruncationWindow(0, 2), {0: ["x"], 1: ["y"], 2: ["z"]}, True, True)
    X = ChainComplex.from_blocks(M, {2: ExactMatrix.from_dense(Z, [[1]])})

    def act(a, m):
        if a == L.unit_key:
            return {m: 1}
        return {(1, 0): 1} if m == (0, 0) else {}

    N = DGModule(L, X, act, "left")
    assert N.check() == []
    rep = splitting_check(theta, dual_module_action(N))
    assert rep.split and rep.obstruction_degree is None
    iso, inv = rep.untwisting, rep.untwisting_inverse
    one = HomogeneousMap.identity(iso.source)
    assert (iso @ inv).equals(one) and (inv @ iso).equals(one)
    assert chain_map_defect(iso, rep.twisted_complex, rep.untwisted_complex) is None
    assert chain_map_defect(inv, rep.untwisted_complex, rep.twisted_complex) is None


def test_trivial_action_is_split_by_the_unit():
    G, L, theta, _ = _circle_fibre(1)
    rep = splitting_check(theta, trivial_module(L, "right"))
    assert rep.split


def test_circle_fibre_of_odd_sphere_is_obstructed():
    _, _, theta, Nsh = _circle_fibre(2)
    rep = splitting_check(theta, dual_module_action(Nsh))
    assert not rep.split
    assert (rep.obstruction_degree, rep.obstruction_basis) == (4, "γ2(u)")
    assert rep.certified
    assert groups(rep.twisted_homology) != groups(rep.untwisted_homology)
