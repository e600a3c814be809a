"""End-to-end acceptance checks, one per criterion.

Each check returns ``(ok, detail)``.  Under pytest every criterion is a test and
the verdicts are printed as ``criterion N: PASS|FAIL`` in the terminal summary;
``python tests/test_acceptance.py`` prints the same lines directly.
"""
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hptalg.barcobar import bar, is_acyclic  # noqa: E402
from hptalg.dg import (DGModule, divided_power_bialgebra, dual_module_action,  # noqa: E402
                       exterior_algebra, nonnegative_endo_dga)
from hptalg.exact_linear import CoefficientRing, ExactMatrix  # noqa: E402
from hptalg.fixtures import rp2_complex  # noqa: E402
from hptalg.graded import (ChainComplex, GradedModule, HomogeneousMap, TruncationWindow,  # noqa: E402
                           homology)
from hptalg.hpt import (contraction_onto_homology, idempotent_twisting_cochain, perturb,  # noqa: E402
                        splitting_check, transfer_along_algebra_contraction,
                        transfer_along_coalgebra_contraction)
from hptalg.koszul import (Example71Config, example_71, expected_projective_space,  # noqa: E402
                           koszul_pair, resolve_comodule, resolve_module, sphere_model)
from hptalg.twist import TwistingCochain, chain_map_defect  # noqa: E402
from oracles import flatten, perturbation_formulas, subset_sums_bar_rank  # noqa: E402
from randomized import (random_algebra_transfer, random_coalgebra_transfer,  # noqa: E402
                        random_exterior_module, random_filtered_contraction,
                        random_symmetric_comodule)

Z = CoefficientRing.integers()
RESULTS: dict[int, tuple[bool, str]] = {}


def groups(H, reliable_only=True):
    return {q: (g.free_rank, g.torsion) for q, g in H.items() if g.reliable or not reliable_only}


# ---------------------------------------------------------------- 1 and 2: circle action on odd spheres

def criterion_1():
    details = []
    for n in (1, 2, 3, 4):
        t0 = time.perf_counter()
        res = example_71(Example71Config(n, TruncationWindow(0, 4 * n)))
        dt = time.perf_counter() - t0
        H = groups(res.homology)
        want = {q: ((1, ()) if q % 2 == 0 and q <= 2 * n - 2 else (0, ())) for q in H}
        ok = H == want and expected_projective_space(n, res.homology) and dt < 5.0
        details.append(f"n={n} {'ok' if ok else 'bad'} {dt:.2f}s")
        if not ok:
            return False, "; ".join(details)
    return True, "; ".join(details)


def _expected_derived(res, n):
    """``γ_k⊗1 ↦ γ_{k−n}⊗g`` for ``k ≥ n`` and every other basis element to zero."""
    small = res.perturbed.small.module
    top = (2 * n - 1, 0)
    out = {}
    for key in small.keys():
        c, x = small.pair(key)
        k = c[0] // 2
        target = small.lookup((2 * (k - n), 0), top) if x == (0, 0) and k >= n else None
        out[key] = {target: 1} if target is not None else {}
    return out


def criterion_2():
    details = []
    for n in (1, 2, 3, 4):
        res = example_71(Example71Config(n, TruncationWindow(0, 4 * n)))
        D = res.derived
        signs = set()
        for key, want in _expected_derived(res, n).items():
            got = D.apply_key(key)
            if not want:
                if got:
                    return False, f"n={n}: 𝒟 is nonzero on {res.perturbed.small.module.label(key)}"
                continue
            ((t, v),) = want.items()
            if set(got) != {t} or abs(got[t]) != 1:
                return False, f"n={n}: 𝒟 has the wrong support on {res.perturbed.small.module.label(key)}"
            signs.add(got[t] * v)
        if len(signs) != 1:
            return False, f"n={n}: signs {sorted(signs)} are not uniform"
        # τ vanishes off γ_n(u) and sends γ_n(u) to ±(1 ↦ g)
        E = res.tau.algebra.module
        elem = E.elem_index[((0, 0), (2 * n - 1, 0))]
        for c in res.circle.module.keys():
            val = res.tau.value(c)
            if c == (2 * n, 0):
                if set(val) != {elem} or abs(val[elem]) != 1:
                    return False, f"n={n}: τ(γ_n) is not ±(1 ↦ g)"
            elif val:
                return False, f"n={n}: τ nonzero on {res.circle.module.label(c)}"
        if res.sign not in (1, -1):
            return False, f"n={n}: 𝒟 differs from ±τ∩"
        details.append(f"n={n}: 𝒟(γ_k⊗1) = {signs.pop():+d}·γ_(k−n)⊗g")
    return True, "; ".join(details)


# ---------------------------------------------------------------- 3: Koszul acyclicity

def criterion_3():
    t0 = time.perf_counter()
    for degs in ([1], [1, 3], [3, 5]):
        kp = koszul_pair(degs, 14)
        ok, H = is_acyclic(kp.tau)
        H = groups(H)
        if not ok or H.get(0) != (1, ()) or max(H) < 13:
            return False, f"{degs}: {H}"
    dt = time.perf_counter() - t0
    return dt < 10.0, f"three pairs through degree 14 in {dt:.2f}s"


# ---------------------------------------------------------------- 4: bar of Λ[v]

def criterion_4():
    hi = 14
    B = bar(exterior_algebra([1], ["v"]), hi)
    X = B.coalgebra.complex
    ranks = {q: len(X.module.labels(q)) for q in range(0, hi + 1)}
    gamma = divided_power_bialgebra(2, hi).module
    ok = (ranks == {q: (1 if q % 2 == 0 else 0) for q in ranks}
          and all(ranks[q] == subset_sums_bar_rank([1], q) for q in ranks)
          and all(ranks[q] == len(gamma.labels(q)) for q in ranks)
          and X.d.is_zero())
    return ok, f"ranks through {hi}: {[ranks[q] for q in range(0, hi + 1)]}"


# ---------------------------------------------------------------- 5: perturbation lemma

def criterion_5(target=100):
    t0 = time.perf_counter()
    seed, total, nonzero = 0, 0, 0
    while nonzero < target:
        inst = random_filtered_contraction(random.Random(seed), max_rank=6, max_height=10, entry_bound=3)
        seed += 1
        c = inst.contraction
        D, c2 = perturb(c, inst.perturbation, inst.filtration)
        total += 1
        if c2.failures():
            return False, f"seed {seed - 1}: {c2.failures()[0]}"
        big, small = c.big.module.keys(), c.small.module.keys()
        dense = perturbation_formulas(flatten(c.incl, small, big), flatten(c.proj, big, small),
                                      flatten(c.htpy, big, big), flatten(inst.perturbation, big, big), len(big))
        got = (flatten(D, small, small), flatten(c2.incl, small, big),
               flatten(c2.proj, big, small), flatten(c2.htpy, big, big))
        if got != tuple(dense):
            return False, f"seed {seed - 1}: disagrees with the dense formulas"
        if not inst.perturbation.is_zero():
            nonzero += 1
    dt = time.perf_counter() - t0
    return dt < 60.0, f"{total} contractions, {nonzero} with nonzero perturbation, {dt:.2f}s"


# ---------------------------------------------------------------- 6: transfer

def criterion_6(count=50):
    for seed in range(count):
        inst = random_coalgebra_transfer(random.Random(seed))
        c = inst.contraction
        xi = transfer_along_coalgebra_contraction(inst.sigma, inst.coalgebra, c)
        if xi.failure() or not (xi.map @ c.incl).equals(inst.sigma.map) or not (xi.map @ c.htpy).is_zero():
            return False, f"coalgebra side, seed {seed}"
    for seed in range(count):
        inst = random_algebra_transfer(random.Random(seed))
        c = inst.contraction
        xi = transfer_along_algebra_contraction(inst.sigma, inst.algebra, c)
        if xi.failure() or not (c.proj @ xi.map).equals(inst.sigma.map) or not (c.htpy @ xi.map).is_zero():
            return False, f"algebra side, seed {seed}"
    return True, f"{count} instances each way"


# ---------------------------------------------------------------- 7: idempotent twisting

def _circle(n, hi):
    G = divided_power_bialgebra(2, hi, "u").diagonal
    L = exterior_algebra([1], ["v"])
    v = L.module.find("v")
    theta = TwistingCochain.from_function(G, L, lambda k: {v: 1} if k == (2, 0) else {}, name="ϑ")
    return G, L, theta


def criterion_7():
    G, L, theta = _circle(2, 16)
    N = sphere_model(2, G, L, theta)
    U = nonnegative_endo_dga(N.complex)
    c = contraction_onto_homology(N.complex)
    E = U.ambient
    p = U.from_ambient(E.module.vector_of(c.incl @ c.proj))
    hbar = U.from_ambient(E.module.vector_of(-c.htpy))
    it = idempotent_twisting_cochain(U, p, hbar, 8)
    fail = it.failure()
    return fail is None, fail or "(D + δ)τ = τ⊙τ through degree 8"


# ---------------------------------------------------------------- 8: splitting dichotomy

def criterion_8():
    G, L, theta = _circle(2, 16)
    M = GradedModule(Z, TruncationWindow(0, 2), {0: ["x"], 1: ["y"], 2: ["z"]}, True, True)
    X = ChainComplex.from_blocks(M, {2: ExactMatrix.from_dense(Z, [[1]])})
    N = DGModule(L, X, lambda a, m: {m: 1} if a == L.unit_key else ({(1, 0): 1} if m == (0, 0) else {}), "left")
    rep = splitting_check(theta, dual_module_action(N))
    if not rep.split:
        return False, "constructed instance not split"
    f, g = rep.untwisting, rep.untwisting_inverse
    one = HomogeneousMap.identity(f.source)
    if not ((f @ g).equals(one) and (g @ f).equals(one)
            and chain_map_defect(f, rep.twisted_complex, rep.untwisted_complex) is None
            and chain_map_defect(g, rep.untwisted_complex, rep.twisted_complex) is None):
        return False, "untwisting is not an inverse pair of chain maps"
    rep2 = splitting_check(theta, dual_module_action(sphere_model(2, G, L, theta)))
    ok = (not rep2.split) and rep2.certified and rep2.obstruction_degree is not None
    return ok, f"split instance untwists; obstruction at degree {rep2.obstruction_degree}, {rep2.obstruction_basis}"


# ---------------------------------------------------------------- 9: resolutions

def criterion_9(count=20):
    kp = koszul_pair([1], 8)
    compared = 0
    for seed in range(count):
        _, N = random_exterior_module(random.Random(seed))
        r = resolve_module(N, kp.tau)
        if r.contraction.failures():
            return False, f"module seed {seed}: {r.contraction.failures()[0]}"
        HN = groups(homology(N.complex))
        for q, g in groups(homology(r.complex.complex)).items():
            if g != HN.get(q, (0, ())):
                return False, f"module seed {seed}: degree {q}"
            compared += 1
        _, M = random_symmetric_comodule(random.Random(seed))
        r = resolve_comodule(M, kp.tau)
        if r.contraction.failures():
            return False, f"comodule seed {seed}: {r.contraction.failures()[0]}"
        HM = groups(homology(M.complex))
        for q, g in groups(homology(r.complex.complex)).items():
            if g != HM.get(q, (0, ())):
                return False, f"comodule seed {seed}: degree {q}"
            compared += 1
    return True, f"{count} modules and {count} comodules, {compared} degrees compared"


# ---------------------------------------------------------------- 10: integer torsion

def criterion_10():
    H = groups(homology(rp2_complex()))
    return H == {0: (1, ()), 1: (0, (2,)), 2: (0, ())}, str(H)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def evaluate(number):
    try:
        ok, detail = CRITERIA[number]()
    except Exception as exc:  # a crash is a failure, reported with its message
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    RESULTS[number] = (ok, detail)
    return ok, detail


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, detail = evaluate(number)
    assert ok, detail


if __name__ == "__main__":
    for k in sorted(CRITERIA):
        ok, detail = evaluate(k)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
