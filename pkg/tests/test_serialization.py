import json
import random

import pytest
from hypothesis import given, strategies as st

from hptalg import fixtures
from hptalg.dg import (divided_power_bialgebra, exterior_algebra, regular_module, symmetric_coalgebra)
from hptalg.exact_linear import CoefficientRing
from hptalg.graded import homology
from hptalg.koszul import koszul_pair
from hptalg.serialization import (Registry, SchemaError, bundle, complex_from_json, complex_to_json,
                                  comodule_from_json, comodule_to_json, content_hash,
                                  contraction_from_json, contraction_to_json, dga_from_json,
                                  dga_to_json, dgc_from_json, dgc_to_json, dumps, module_from_json,
                                  module_to_json, tc_from_json, tc_to_json)
from randomized import (random_complex, random_exterior_module, random_filtered_contraction,
                        random_symmetric_comodule)

seeds = st.integers(0, 10**6)


@given(seeds)
def test_complex_round_trip(seed):
    X = random_complex(random.Random(seed))
    doc = complex_to_json(X)
    Y = complex_from_json(json.loads(dumps(doc)))
    assert complex_to_json(Y) == doc
    assert Y.d.equals(X.d)


def test_ring_is_preserved():
    X = fixtures.rp2_complex(CoefficientRing.prime_field(5))
    doc = complex_to_json(X)
    assert doc["ring"] == "zp:5"
    assert complex_from_json(doc).ring.spelling() == "zp:5"


@pytest.mark.parametrize("build", [lambda: exterior_algebra([1, 3]), lambda: divided_power_bialgebra(2, 8)])
def test_algebra_round_trip(build):
    A = build()
    doc = dga_to_json(A)
    B = dga_from_json(doc)
    assert dga_to_json(B) == doc
    assert B.check(0) == []


@pytest.mark.parametrize("build", [lambda: symmetric_coalgebra([2, 4], 8),
                                   lambda: divided_power_bialgebra(2, 8).diagonal])
def test_coalgebra_round_trip(build):
    C = build()
    doc = dgc_to_json(C)
    D = dgc_from_json(doc)
    assert dgc_to_json(D) == doc and D.check(0) == []


@given(seeds)
def test_module_and_comodule_round_trip(seed):
    rng = random.Random(seed)
    L, N = random_exterior_module(rng)
    doc = module_to_json(N, content_hash(dga_to_json(L)))
    N2 = module_from_json(doc, dga_from_json(dga_to_json(L)))
    assert module_to_json(N2, content_hash(dga_to_json(L))) == doc and N2.check() == []
    S, M = random_symmetric_comodule(rng)
    doc = comodule_to_json(M)
    M2 = comodule_from_json(doc, S)
    assert comodule_to_json(M2) == doc and M2.check() == []


def test_twisting_cochain_round_trip():
    kp = koszul_pair([1, 3], 8)
    doc = tc_to_json(kp.tau)
    tau = tc_from_json(doc, kp.sigma_prime, kp.lam)
    assert tau.map.equals(kp.tau.map) and tau.is_valid()


@given(seeds)
def test_contraction_round_trip(seed):
    inst = random_filtered_contraction(random.Random(seed))
    c = inst.contraction
    c.filtration = inst.filtration
    doc = contraction_to_json(c)
    c2 = contraction_from_json(doc)
    assert contraction_to_json(c2) == doc and c2.is_valid()


def test_wrong_schema_is_rejected():
    with pytest.raises(SchemaError):
        complex_from_json({"schema": "dga.v1"})
    with pytest.raises(SchemaError):
        complex_from_json({"schema": "complex.v1"})


def test_dumps_is_stable_and_hash_ignores_key_order():
    doc = {"b": [1, 2], "a": {"y": 1, "x": "γ"}}
    same = {"a": {"x": "γ", "y": 1}, "b": [1, 2]}
    assert dumps(doc) == dumps(same)
    assert content_hash(doc) == content_hash(same)
    assert content_hash(doc) != content_hash({"a": {"x": "γ", "y": 2}, "b": [1, 2]})
    assert content_hash(doc).startswith("sha256:")


def test_registry_resolves_references_in_any_order():
    kp = koszul_pair([1], 8)
    lam, sig = dga_to_json(kp.lam), dgc_to_json(kp.sigma_prime)
    tau = tc_to_json(kp.tau, content_hash(sig), content_hash(lam))
    reg = Registry()
    reg.add_document(bundle({"z_tau": tau, "a_lambda": lam, "m_sigma": sig}))
    reg.resolve()
    assert reg.get("z_tau").is_valid()
    mod = module_to_json(regular_module(kp.lam, "left"), content_hash(lam))
    reg2 = Registry()
    reg2.add("module", mod)
    reg2.add("lam", lam)
    assert reg2.resolve().get("module").check() == []


def test_registry_reports_dangling_reference_and_duplicates():
    kp = koszul_pair([1], 8)
    lam, sig = dga_to_json(kp.lam), dgc_to_json(kp.sigma_prime)
    tau = tc_to_json(kp.tau, content_hash(sig), "sha256:" + "0" * 64)
    reg = Registry()
    reg.add_document(bundle({"tau": tau, "sig": sig, "lam": lam}))
    with pytest.raises(SchemaError, match="does not match"):
        reg.resolve()
    reg = Registry()
    reg.add("x", lam)
    with pytest.raises(SchemaError, match="duplicate"):
        reg.add("x", lam)


@pytest.mark.parametrize("name", ["exterior_v", "divided_power_u", "koszul_x1", "koszul_x1_x3",
                                  "koszul_x3_x5", "rp2", "circle_action_n2"])
def test_shipped_fixtures_are_reproducible(name):
    assert fixtures.load(name) == fixtures.build(name)
    assert fixtures.path(name).read_text(encoding="utf-8") == dumps(fixtures.build(name))


def test_rp2_fixture_homology():
    X = complex_from_json(fixtures.load("rp2"))
    H = homology(X)
    assert [(q, H[q].free_rank, H[q].torsion) for q in sorted(H)] == [(0, 1, ()), (1, 0, (2,)), (2, 0, ())]
