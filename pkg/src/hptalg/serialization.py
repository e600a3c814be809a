"""Deterministic JSON documents for complexes, (co)algebras, (co)modules, twisting cochains,
contractions and reports.

Every document carries a ``schema`` field.  Cross references (a twisting cochain's
source and target, a module's algebra) are content hashes of the referenced
document, so a set of documents can be shipped as a ``bundle.v1`` and resolved
in any order.  ``to_*`` followed by ``from_*`` reproduces the document exactly.
"""
from __future__ import annotations

import hashlib
import json
from typing import Any, Mapping

from .dg import DGAlgebra, DGCoalgebra, DGComodule, DGModule, PairVector
from .exact_linear import CoefficientRing, ExactMatrix, HomologyGroup, Scalar
from .graded import (ChainComplex, GradedModule, HomogeneousMap, Key, TruncationWindow, Vector,
                     WindowError)
from .hpt import Contraction
from .twist import TwistingCochain

Doc = dict[str, Any]


class SchemaError(ValueError):
    """A document does not match its declared schema."""


def canonical(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def dumps(doc: Any) -> str:
    """Pretty, byte-stable rendering used for every file and report."""
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def content_hash(doc: Doc) -> str:
    return "sha256:" + hashlib.sha256(canonical(doc).encode("utf-8")).hexdigest()


def _need(doc: Mapping[str, Any], field: str) -> Any:
    if field not in doc:
        raise SchemaError(f"missing field {field!r}")
    return doc[field]


def _expect(doc: Mapping[str, Any], schema: str) -> None:
    got = doc.get("schema") if isinstance(doc, Mapping) else None
    if got != schema:
        raise SchemaError(f"expected schema {schema!r}, got {got!r}")


# --------------------------------------------------------------------------
# modules and maps


def module_fields(M: GradedModule) -> Doc:
    return {
        "ring": M.ring.spelling(),
        "window": [M.window.lo, M.window.hi],
        "bounded": [M.bounded_below, M.bounded_above],
        "basis": {str(q): list(M.labels(q)) for q in M.degrees()},
    }


def module_from_fields(doc: Mapping[str, Any], ring: CoefficientRing | None = None) -> GradedModule:
    try:
        r = ring or CoefficientRing.parse(_need(doc, "ring"))
        lo, hi = _need(doc, "window")
        below, above = doc.get("bounded", [True, True])
        basis = {int(q): list(labs) for q, labs in _need(doc, "basis").items()}
        return GradedModule(r, TruncationWindow(int(lo), int(hi)), basis, bool(below), bool(above))
    except SchemaError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise SchemaError(f"bad module description: {exc}") from exc


def blocks_to_json(f: HomogeneousMap) -> Doc:
    ring = f.ring
    blocks = {}
    for q in sorted(f.blocks):
        ents = [[r, c, ring.to_json(v)] for r, c, v in f.blocks[q].entries()]
        if ents:
            blocks[str(q)] = ents
    return {"shift": f.shift, "blocks": blocks, "unknown": sorted(f.unknown)}


def blocks_from_json(doc: Mapping[str, Any], source: GradedModule, target: GradedModule) -> HomogeneousMap:
    try:
        shift = int(_need(doc, "shift"))
        blocks: dict[int, ExactMatrix] = {}
        for q, ents in _need(doc, "blocks").items():
            q = int(q)
            rows, cols = target.dim(q + shift), source.dim(q)
            if rows is None or cols is None:
                raise SchemaError(f"block for degree {q} lies outside the window")
            blocks[q] = ExactMatrix.from_entries(source.ring, rows, cols, [(r, c, v) for r, c, v in ents])
        return HomogeneousMap(source, target, shift, blocks, [int(q) for q in doc.get("unknown", [])])
    except SchemaError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise SchemaError(f"bad map blocks: {exc}") from exc


def map_to_json(f: HomogeneousMap) -> Doc:
    return {"schema": "map.v1", **blocks_to_json(f)}


def map_from_json(doc: Mapping[str, Any], source: GradedModule, target: GradedModule) -> HomogeneousMap:
    _expect(doc, "map.v1")
    return blocks_from_json(doc, source, target)


# --------------------------------------------------------------------------
# complexes


def complex_to_json(X: ChainComplex) -> Doc:
    d = blocks_to_json(X.d)
    return {"schema": "complex.v1", **module_fields(X.module),
            "differential": d["blocks"], "unknown": d["unknown"]}


def _complex_body(doc: Mapping[str, Any]) -> ChainComplex:
    M = module_from_fields(doc)
    d = blocks_from_json({"shift": -1, "blocks": _need(doc, "differential"),
                          "unknown": doc.get("unknown", [])}, M, M)
    return ChainComplex(M, d)


def complex_from_json(doc: Mapping[str, Any]) -> ChainComplex:
    _expect(doc, "complex.v1")
    return _complex_body(doc)



def _vector_json(v: Mapping[Key, Scalar], ring: CoefficientRing) -> list:
    return [[k[0], k[1], ring.to_json(x)] for k, x in sorted(v.items()) if x != 0]


def _vector_from(items: list, ring: CoefficientRing) -> Vector:
    return {(int(q), int(i)): ring.coerce(v) for q, i, v in items}


# --------------------------------------------------------------------------
# algebras and coalgebras


def dga_to_json(A: DGAlgebra) -> Doc:
    M, ring = A.module, A.ring
    mul = []
    for a in M.keys():
        for b in M.keys():
            if M.dim(a[0] + b[0]) is None:
                continue
            for k, v in sorted(A.mul_keys(a, b).items()):
                mul.append([a[0], a[1], b[0], b[1], k[0], k[1], ring.to_json(v)])
    doc = complex_to_json(A.complex)
    doc.update({"schema": "dga.v1", "name": A.name, "mul": mul,
                "unit": _vector_json(A.unit, ring),
                "aug": None if A.aug is None else _vector_json(A.aug, ring)})
    return doc


def dga_from_json(doc: Mapping[str, Any]) -> DGAlgebra:
    _expect(doc, "dga.v1")
    X = _complex_body(doc)
    ring, M = X.ring, X.module
    table: dict[tuple[Key, Key], Vector] = {}
    for qa, ia, qb, ib, qc, ic, v in _need(doc, "mul"):
        tgt = table.setdefault(((qa, ia), (qb, ib)), {})
        tgt[(qc, ic)] = ring.coerce(v)

    def mul(a: Key, b: Key) -> Vector:
        if M.dim(a[0] + b[0]) is None:
            raise WindowError("product leaves the window")
        return table.get((a, b), {})

    aug = doc.get("aug")
    return DGAlgebra(X, mul, _vector_from(_need(doc, "unit"), ring),
                     None if aug is None else _vector_from(aug, ring), name=doc.get("name", "A"))


def dgc_to_json(C: DGCoalgebra) -> Doc:
    ring = C.ring
    comul = []
    for c in C.module.keys():
        for (a, b), v in sorted(C.comul_key(c).items()):
            comul.append([c[0], c[1], a[0], a[1], b[0], b[1], ring.to_json(v)])
    doc = complex_to_json(C.complex)
    doc.update({"schema": "dgc.v1", "name": C.name, "comul": comul,
                "counit": _vector_json(C.counit, ring),
                "coaug": None if C.coaug is None else _vector_json(C.coaug, ring)})
    return doc


def dgc_from_json(doc: Mapping[str, Any]) -> DGCoalgebra:
    _expect(doc, "dgc.v1")
    X = _complex_body(doc)
    ring = X.ring
    table: dict[Key, PairVector] = {}
    for qc, ic, qa, ia, qb, ib, v in _need(doc, "comul"):
        table.setdefault((qc, ic), {})[((qa, ia), (qb, ib))] = ring.coerce(v)
    coaug = doc.get("coaug")
    return DGCoalgebra(X, lambda c: table.get(c, {}), _vector_from(_need(doc, "counit"), ring),
                       None if coaug is None else _vector_from(coaug, ring), name=doc.get("name", "C"))


# --------------------------------------------------------------------------
# modules and comodules


def module_to_json(N: DGModule, algebra_hash: str | None = None) -> Doc:
    A, M, ring = N.algebra, N.module, N.ring
    action = []
    for a in A.module.keys():
        for n in M.keys():
            if M.dim(a[0] + n[0]) is None:
                continue
            vec = N.act_keys(a, n) if N.side == "left" else N.act_keys(n, a)
            for k, v in sorted(vec.items()):
                action.append([a[0], a[1], n[0], n[1], k[0], k[1], ring.to_json(v)])
    doc = complex_to_json(N.complex)
    doc.update({"schema": "module.v1", "name": N.name, "side": N.side,
                "algebra": algebra_hash or content_hash(dga_to_json(A)), "action": action})
    return doc


def module_from_json(doc: Mapping[str, Any], algebra: DGAlgebra) -> DGModule:
    _expect(doc, "module.v1")
    X = _complex_body(doc)
    ring, M = X.ring, X.module
    side = _need(doc, "side")
    table: dict[tuple[Key, Key], Vector] = {}
    for qa, ia, qn, in_, qm, im, v in _need(doc, "action"):
        table.setdefault(((qa, ia), (qn, in_)), {})[(qm, im)] = ring.coerce(v)

    def act(x: Key, y: Key) -> Vector:
        a, n = (x, y) if side == "left" else (y, x)
        if M.dim(a[0] + n[0]) is None:
            raise WindowError("action leaves the window")
        return table.get((a, n), {})

    return DGModule(algebra, X, act, side, doc.get("name", "N"))


def comodule_to_json(Mc: DGComodule, coalgebra_hash: str | None = None) -> Doc:
    ring = Mc.ring
    coaction = []
    for m in Mc.module.keys():
        for (a, b), v in sorted(Mc.coact_key(m).items()):
            coaction.append([m[0], m[1], a[0], a[1], b[0], b[1], ring.to_json(v)])
    doc = complex_to_json(Mc.complex)
    doc.update({"schema": "comodule.v1", "name": Mc.name, "side": Mc.side,
                "coalgebra": coalgebra_hash or content_hash(dgc_to_json(Mc.coalgebra)),
                "coaction": coaction})
    return doc


def comodule_from_json(doc: Mapping[str, Any], coalgebra: DGCoalgebra) -> DGComodule:
    _expect(doc, "comodule.v1")
    X = _complex_body(doc)
    ring = X.ring
    table: dict[Key, PairVector] = {}
    for qm, im, qa, ia, qb, ib, v in _need(doc, "coaction"):
        table.setdefault((qm, im), {})[((qa, ia), (qb, ib))] = ring.coerce(v)
    return DGComodule(coalgebra, X, lambda m: table.get(m, {}), _need(doc, "side"), doc.get("name", "M"))


# --------------------------------------------------------------------------
# twisting cochains and contractions


def tc_to_json(tau: TwistingCochain, source_hash: str | None = None,
               target_hash: str | None = None) -> Doc:
    return {"schema": "tc.v1", "name": tau.name,
            "source": source_hash or content_hash(dgc_to_json(tau.coalgebra)),
            "target": target_hash or content_hash(dga_to_json(tau.algebra)),
            **blocks_to_json(tau.map)}


def tc_from_json(doc: Mapping[str, Any], coalgebra: DGCoalgebra, algebra: DGAlgebra) -> TwistingCochain:
    _expect(doc, "tc.v1")
    f = blocks_from_json(doc, coalgebra.module, algebra.module)
    if f.shift != -1:
        raise SchemaError("a twisting cochain has degree −1")
    return TwistingCochain(coalgebra, algebra, f, name=doc.get("name", "τ"))


def contraction_to_json(c: Contraction) -> Doc:
    doc: Doc = {"schema": "contraction.v1", "big": complex_to_json(c.big),
                "small": complex_to_json(c.small), "incl": blocks_to_json(c.incl),
                "proj": blocks_to_json(c.proj), "htpy": blocks_to_json(c.htpy)}
    doc["filtration"] = (None if c.filtration is None else
                         [[k[0], k[1], c.filtration[k]] for k in sorted(c.filtration)])
    return doc


def contraction_from_json(doc: Mapping[str, Any]) -> Contraction:
    _expect(doc, "contraction.v1")
    big = complex_from_json(_need(doc, "big"))
    small = complex_from_json(_need(doc, "small"))
    N, M = big.module, small.module
    filt = doc.get("filtration")
    return Contraction(big, small, blocks_from_json(_need(doc, "incl"), M, N),
                       blocks_from_json(_need(doc, "proj"), N, M),
                       blocks_from_json(_need(doc, "htpy"), N, N),
                       None if filt is None else {(q, i): int(v) for q, i, v in filt})


# --------------------------------------------------------------------------
# bundles


class Registry:
    """Objects of a ``bundle.v1`` (or several documents) indexed by role and content hash."""

    def __init__(self) -> None:
        self.docs: dict[str, Doc] = {}
        self.by_hash: dict[str, Any] = {}
        self.objects: dict[str, Any] = {}

    def add(self, role: str, doc: Doc) -> None:
        if not isinstance(doc, Mapping) or "schema" not in doc:
            raise SchemaError(f"{role}: not a schema document")
        if role in self.docs:
            raise SchemaError(f"duplicate role {role!r}")
        self.docs[role] = dict(doc)

    def add_document(self, doc: Doc, role: str | None = None, prefix: str = "") -> None:
        if isinstance(doc, Mapping) and doc.get("schema") == "bundle.v1":
            for r, d in sorted(_need(doc, "objects").items()):
                self.add(prefix + r, d)
        else:
            self.add(prefix + (role or f"input{len(self.docs)}"), doc)

    def resolve(self) -> "Registry":
        pending = dict(self.docs)
        loaders = {"complex.v1": lambda d: complex_from_json(d), "dga.v1": dga_from_json,
                   "dgc.v1": dgc_from_json, "contraction.v1": contraction_from_json}
        for role, d in sorted(pending.items()):
            if d["schema"] in loaders:
                obj = loaders[d["schema"]](d)
                self.objects[role] = obj
                self.by_hash[content_hash(d)] = obj
        for role, d in sorted(pending.items()):
            s = d["schema"]
            if s == "tc.v1":
                self.objects[role] = tc_from_json(d, self._ref(d, "source", DGCoalgebra),
                                                  self._ref(d, "target", DGAlgebra))
            elif s == "module.v1":
                self.objects[role] = module_from_json(d, self._ref(d, "algebra", DGAlgebra))
            elif s == "comodule.v1":
                self.objects[role] = comodule_from_json(d, self._ref(d, "coalgebra", DGCoalgebra))
            elif s in ("map.v1", "report.v1"):
                self.objects[role] = d
            elif s not in loaders:
                raise SchemaError(f"{role}: unknown schema {s!r}")
        return self

    def _ref(self, d: Mapping[str, Any], field: str, kind: type) -> Any:
        h = _need(d, field)
        obj = self.by_hash.get(h)
        if obj is None or not isinstance(obj, kind):
            raise SchemaError(f"reference {field} = {h} does not match any {kind.__name__} in the input")
        return obj

    def get(self, role: str, kind: type | None = None) -> Any:
        if role not in self.objects:
            raise SchemaError(f"input has no object with role {role!r}")
        obj = self.objects[role]
        if kind is not None and not isinstance(obj, kind):
            raise SchemaError(f"role {role!r} is not a {kind.__name__}")
        return obj

    def first(self, kind: type) -> Any:
        for role in sorted(self.objects):
            if isinstance(self.objects[role], kind):
                return self.objects[role]
        raise SchemaError(f"input contains no {kind.__name__}")


def bundle(objects: Mapping[str, Doc]) -> Doc:
    return {"schema": "bundle.v1", "objects": dict(objects)}


# --------------------------------------------------------------------------
# reports


def homology_table(H: Mapping[int, HomologyGroup]) -> list[Doc]:
    return [{"degree": q, "free_rank": g.free_rank, "torsion": list(g.torsion), "reliable": g.reliable}
            for q, g in sorted(H.items())]


def report(command: str, config: Mapping[str, Any], **fields: Any) -> Doc:
    out: Doc = {"schema": "report.v1", "command": command, "config": dict(config)}
    out.update(fields)
    return out
