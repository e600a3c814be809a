"""Shipped JSON fixtures: small named objects for tests, docs and the command line."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .dg import DGModule, divided_power_bialgebra, dual_module_action, exterior_algebra
from .exact_linear import CoefficientRing, ExactMatrix
from .graded import ChainComplex, GradedModule, TruncationWindow
from .koszul import koszul_pair, sphere_model
from .serialization import (Doc, bundle, complex_to_json, content_hash, dga_to_json, dgc_to_json,
                            dumps, module_to_json, tc_to_json)
from .twist import TwistingCochain

NAMES = ("exterior_v", "divided_power_u", "koszul_x1", "koszul_x1_x3", "koszul_x3_x5",
         "rp2", "circle_action_n2")


def rp2_complex(ring: CoefficientRing | None = None) -> ChainComplex:
    """Cellular chains of the real projective plane: one cell per degree, ``d₂ = 2``."""
    ring = ring or CoefficientRing.integers()
    M = GradedModule(ring, TruncationWindow(0, 2), {0: ["e0"], 1: ["e1"], 2: ["e2"]}, True, True)
    return ChainComplex.from_blocks(M, {2: ExactMatrix.from_dense(ring, [[2]]),
                                        1: ExactMatrix.zeros(ring, 1, 1)})


def _koszul(degrees: list[int], window: int) -> Doc:
    kp = koszul_pair(degrees, window)
    lam, sig = dga_to_json(kp.lam), dgc_to_json(kp.sigma_prime)
    return bundle({"lambda": lam, "sigma_prime": sig,
                   "tau": tc_to_json(kp.tau, content_hash(sig), content_hash(lam))})


def _circle_action(n: int, window: int) -> Doc:
    """``ϑ: Γ[u] → Λ[v]`` and the dual of the sphere model as a right ``Λ[v]``-module."""
    G = divided_power_bialgebra(2, window, "u").diagonal
    L = exterior_algebra([1], ["v"])
    v = L.module.find("v")
    theta = TwistingCochain.from_function(G, L, lambda k: {v: 1} if k == (2, 0) else {}, name="ϑ")
    N: DGModule = dual_module_action(sphere_model(n, G, L, theta))
    g, a = dgc_to_json(G), dga_to_json(L)
    return bundle({"coalgebra": g, "algebra": a,
                   "tau": tc_to_json(theta, content_hash(g), content_hash(a)),
                   "module": module_to_json(N, content_hash(a))})


def build(name: str) -> Doc:
    if name == "exterior_v":
        return dga_to_json(exterior_algebra([1], ["v"]))
    if name == "divided_power_u":
        G = divided_power_bialgebra(2, 12, "u")
        return bundle({"algebra": dga_to_json(G), "coalgebra": dgc_to_json(G.diagonal)})
    if name == "koszul_x1":
        return _koszul([1], 14)
    if name == "koszul_x1_x3":
        return _koszul([1, 3], 14)
    if name == "koszul_x3_x5":
        return _koszul([3, 5], 14)
    if name == "rp2":
        return complex_to_json(rp2_complex())
    if name == "circle_action_n2":
        return _circle_action(2, 10)
    raise KeyError(f"unknown fixture {name!r}")


def path(name: str) -> Path:
    return Path(str(resources.files("hptalg") / "data" / f"{name}.json"))


def load(name: str) -> Doc:
    with open(path(name), encoding="utf-8") as fh:
        return json.load(fh)


def write_all(directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name in NAMES:
        p = directory / f"{name}.json"
        p.write_text(dumps(build(name)), encoding="utf-8")
        out.append(p)
    return out


if __name__ == "__main__":
    for p in write_all(Path(__file__).parent / "data"):
        print(p)
