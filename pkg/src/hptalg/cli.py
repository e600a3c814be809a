"""Command-line front end.

Exit codes: 0 success, 1 parse or usage error, 2 a verification failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Sequence

from .barcobar import bar, cobar
from .dg import (DGAlgebra, DGCoalgebra, DGComodule, DGModule, StructureError, regular_module,
                 trivial_comodule, trivial_module)
from .exact_linear import CoefficientRing, CompositionError
from .graded import ChainComplex, HomogeneousMap, TruncationWindow, WindowError, homology
from .hpt import (Contraction, ContractionError, PerturbationError, perturb, splitting_check,
                  transfer_along_algebra_contraction, transfer_along_coalgebra_contraction)
from .koszul import (Example71Config, KoszulPair, differential_cotor, differential_tor,
                     example_71, expected_projective_space, functor_h, functor_h_star, functor_t,
                     functor_t_star, koszul_pair)
from .serialization import (Doc, Registry, SchemaError, blocks_to_json, content_hash,
                            contraction_to_json, dga_to_json, dgc_to_json, dumps, homology_table,
                            map_from_json, report, tc_to_json)
from .twist import TwistingCochain, TwistingError, chain_map_defect


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    def __init__(self, message: str, doc: Doc | None = None) -> None:
        super().__init__(message)
        self.doc = doc


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        raise UsageError(message)


# --------------------------------------------------------------------------
# input helpers


def _read(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _with_ring(doc: Any, ring: CoefficientRing | None) -> Any:
    if ring is None:
        return doc
    if isinstance(doc, dict):
        out = {k: _with_ring(v, ring) for k, v in doc.items()}
        if "ring" in out and "schema" in out:
            out["ring"] = ring.spelling()
        return out
    if isinstance(doc, list):
        return [_with_ring(v, ring) for v in doc]
    return doc


def _registry(paths: Sequence[str], ring: CoefficientRing | None,
              seed: dict[str, Doc] | None = None) -> Registry:
    reg = Registry()
    for role, doc in (seed or {}).items():
        reg.add(role, doc)
    for i, p in enumerate(paths):
        reg.add_document(_with_ring(_read(p), ring), prefix=f"{i}:" if len(paths) > 1 else "")
    return reg.resolve()


def _window(args: argparse.Namespace, default_hi: int) -> TruncationWindow:
    if args.window is not None and args.max_degree is not None:
        raise UsageError("give either --window or --max-degree, not both")
    if args.window is not None:
        try:
            return TruncationWindow.parse(args.window)
        except ValueError as exc:
            raise UsageError(f"bad --window {args.window!r}: {exc}") from exc
    hi = default_hi if args.max_degree is None else args.max_degree
    if hi < 0:
        raise UsageError("--max-degree must be nonnegative")
    return TruncationWindow(0, hi)


def _ring(args: argparse.Namespace) -> CoefficientRing | None:
    if args.ring is None:
        return None
    try:
        return CoefficientRing.parse(args.ring)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _degrees(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --degrees {text!r}") from exc


def _window_json(w: TruncationWindow) -> list[int]:
    return [w.lo, w.hi]


def _d_squared(X: ChainComplex) -> str | None:
    bad = X.d_squared_failure()
    return None if bad is None else f"complex: d∘d ≠ 0 at degree {bad[0]}, basis {bad[1]}"


# --------------------------------------------------------------------------
# subcommands


def cmd_verify(args: argparse.Namespace) -> Doc:
    reg = _registry(args.inputs, _ring(args))
    checks = []
    for role in sorted(reg.objects):
        obj = reg.objects[role]
        fails: list[str] = []
        if isinstance(obj, ChainComplex):
            msg = _d_squared(obj)
            fails = [msg] if msg else []
            kind = "complex"
        elif isinstance(obj, (DGAlgebra, DGCoalgebra)):
            msg = _d_squared(obj.complex)
            fails = [msg] if msg else obj.check()
            kind = "dga" if isinstance(obj, DGAlgebra) else "dgc"
        elif isinstance(obj, (DGModule, DGComodule)):
            msg = _d_squared(obj.complex)
            fails = [msg] if msg else obj.check()
            kind = "module" if isinstance(obj, DGModule) else "comodule"
        elif isinstance(obj, TwistingCochain):
            msg = obj.failure()
            fails = [msg] if msg else []
            kind = "tc"
        elif isinstance(obj, Contraction):
            fails = obj.failures()
            kind = "contraction"
        else:
            continue
        checks.append({"role": role, "kind": kind, "ok": not fails, "failures": fails})
    doc = report("verify", {"inputs": list(args.inputs)}, checks=checks)
    bad = [c for c in checks if not c["ok"]]
    if bad:
        raise VerificationFailure(bad[0]["failures"][0], doc)
    return doc


def _complex_of(obj: Any) -> ChainComplex:
    if isinstance(obj, ChainComplex):
        return obj
    if isinstance(obj, (DGAlgebra, DGCoalgebra, DGModule, DGComodule)):
        return obj.complex
    if isinstance(obj, Contraction):
        return obj.big
    raise SchemaError("input has no complex")


def cmd_homology(args: argparse.Namespace) -> Doc:
    reg = _registry([args.input], _ring(args))
    role = args.role or sorted(reg.objects)[0]
    X = _complex_of(reg.get(role))
    msg = _d_squared(X)
    if msg:
        raise VerificationFailure(msg, report("homology", {"role": role}, failures=[msg]))
    w = None if args.window is None and args.max_degree is None else _window(args, 0)
    H = homology(X, w)
    return report("homology", {"role": role, "ring": X.ring.spelling(),
                               "window": _window_json(w or X.module.window)},
                  homology=homology_table(H))


def cmd_bar(args: argparse.Namespace) -> Doc:
    reg = _registry([args.input], _ring(args))
    A = reg.first(DGAlgebra)
    B = bar(A, _window(args, 8))
    fails = B.coalgebra.check() or ([B.tau.failure()] if B.tau.failure() else [])
    if fails:
        raise VerificationFailure(fails[0])
    return dgc_to_json(B.coalgebra)


def cmd_cobar(args: argparse.Namespace) -> Doc:
    reg = _registry([args.input], _ring(args))
    C = reg.first(DGCoalgebra)
    Om = cobar(C, _window(args, 8))
    fails = Om.algebra.check() or ([Om.tau.failure()] if Om.tau.failure() else [])
    if fails:
        raise VerificationFailure(fails[0])
    return dga_to_json(Om.algebra)


def cmd_perturb(args: argparse.Namespace) -> Doc:
    reg = _registry([args.input], _ring(args))
    c = reg.get("contraction", Contraction)
    pert = map_from_json(reg.get("perturbation"), c.big.module, c.big.module)
    cfg = {"input": args.input}
    base_fail = c.failures()
    if base_fail:
        raise VerificationFailure(base_fail[0], report("perturb", cfg, failures=base_fail))
    try:
        D, new = perturb(c, pert)
    except PerturbationError as exc:
        raise VerificationFailure(str(exc), report("perturb", cfg, failures=[str(exc)])) from exc
    fails = new.failures()
    doc = report("perturb", cfg, derived=blocks_to_json(D), contraction=contraction_to_json(new),
                 homology=homology_table(homology(new.small)),
                 verification={"contraction_axioms": not fails, "d_squared": _d_squared(new.big) is None})
    if fails:
        raise VerificationFailure(fails[0], doc)
    return doc


def cmd_transfer(args: argparse.Namespace) -> Doc:
    reg = _registry([args.input], _ring(args))
    sigma = reg.get("sigma", TwistingCochain)
    c = reg.get("contraction", Contraction)
    if args.direction == "coalgebra":
        Cp = reg.get("big", DGCoalgebra)
        xi = transfer_along_coalgebra_contraction(sigma, Cp, c)
        back = (xi.map @ c.incl).equals(sigma.map)
        side = (xi.map @ c.htpy).is_zero()
        src, tgt = dgc_to_json(Cp), dga_to_json(sigma.algebra)
    else:
        Ap = reg.get("big", DGAlgebra)
        xi = transfer_along_algebra_contraction(sigma, Ap, c)
        back = (c.proj @ xi.map).equals(sigma.map)
        side = (c.htpy @ xi.map).is_zero()
        src, tgt = dgc_to_json(sigma.coalgebra), dga_to_json(Ap)
    msg = xi.failure()
    ver = {"tc_valid": msg is None, "restricts_to_sigma": back, "annihilates_homotopy": side}
    doc = report("transfer", {"input": args.input, "direction": args.direction},
                 xi=tc_to_json(xi, content_hash(src), content_hash(tgt)), verification=ver)
    if not all(ver.values()):
        raise VerificationFailure(msg or "transfer: uniqueness identities fail", doc)
    return doc


def _pair(args: argparse.Namespace) -> tuple[KoszulPair, TruncationWindow, CoefficientRing]:
    w = _window(args, 10)
    ring = _ring(args) or CoefficientRing.integers()
    try:
        kp = koszul_pair(_degrees(args.degrees), w, ring)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return kp, w, ring


def _seeded(kp: KoszulPair, path: str | None, ring: CoefficientRing, role_kind: type, default: Any) -> Any:
    if path is None:
        return default
    seed = {"lambda": dga_to_json(kp.lam), "sigma_prime": dgc_to_json(kp.sigma_prime)}
    reg = _registry([path], ring, seed)
    for role in sorted(reg.objects):
        if role not in seed and isinstance(reg.objects[role], role_kind):
            return reg.objects[role]
    raise SchemaError(f"{path}: no {role_kind.__name__} found")


def _pair_config(kp: KoszulPair, w: TruncationWindow, ring: CoefficientRing, args: argparse.Namespace) -> Doc:
    return {"degrees": _degrees(args.degrees), "window": _window_json(w), "ring": ring.spelling()}


def _module_checks(obj: Any) -> list[str]:
    msg = _d_squared(obj.complex)
    return [msg] if msg else obj.check()


def cmd_koszul_t(args: argparse.Namespace) -> Doc:
    kp, w, ring = _pair(args)
    N = _seeded(kp, args.module, ring, DGModule, trivial_module(kp.lam, "left"))
    tt = functor_t(N, kp.tau)
    fails = _module_checks(tt.left_comodule)
    doc = report("koszul-t", _pair_config(kp, w, ring, args), homology=homology_table(homology(tt.complex)),
                 verification={"d_squared": _d_squared(tt.complex) is None, "comodule": not fails})
    if fails:
        raise VerificationFailure(fails[0], doc)
    return doc


def cmd_koszul_h(args: argparse.Namespace) -> Doc:
    kp, w, ring = _pair(args)
    M = _seeded(kp, args.comodule, ring, DGComodule, trivial_comodule(kp.sigma_prime, "left"))
    tt = functor_h(M, kp.tau)
    fails = _module_checks(tt.left_module)
    doc = report("koszul-h", _pair_config(kp, w, ring, args), homology=homology_table(homology(tt.complex)),
                 verification={"d_squared": _d_squared(tt.complex) is None, "module": not fails})
    if fails:
        raise VerificationFailure(fails[0], doc)
    return doc


def cmd_koszul_tstar(args: argparse.Namespace) -> Doc:
    kp, w, ring = _pair(args)
    N = _seeded(kp, args.module, ring, DGModule, trivial_module(kp.lam, "right"))
    th, Mm = functor_t_star(N, kp.tau)
    fails = _module_checks(Mm)
    doc = report("koszul-tstar", _pair_config(kp, w, ring, args), homology=homology_table(homology(th.complex)),
                 verification={"d_squared": _d_squared(th.complex) is None, "module": not fails})
    if fails:
        raise VerificationFailure(fails[0], doc)
    return doc


def cmd_koszul_hstar(args: argparse.Namespace) -> Doc:
    kp, w, ring = _pair(args)
    N = _seeded(kp, args.module, ring, DGModule, regular_module(kp.lam, "right"))
    th, Mm = functor_t_star(N, kp.tau)
    tt = functor_h_star(Mm, kp.tau)
    Hrt, HN = homology(tt.complex), homology(N.complex)
    agree = all((g.free_rank, g.torsion) == ((HN[q].free_rank, HN[q].torsion) if q in HN else (0, ()))
                for q, g in Hrt.items() if g.reliable)
    doc = report("koszul-hstar", _pair_config(kp, w, ring, args), homology=homology_table(Hrt),
                 module_homology=homology_table(HN),
                 verification={"d_squared": _d_squared(tt.complex) is None, "round_trip_homology": agree})
    if not agree:
        raise VerificationFailure("h*(t*(N)) and N have different homology", doc)
    return doc


def cmd_tor(args: argparse.Namespace) -> Doc:
    kp, w, ring = _pair(args)
    N = _seeded(kp, args.left, ring, DGModule, trivial_module(kp.lam, "left"))
    Np = _seeded(kp, args.right, ring, DGModule, trivial_module(kp.lam, "right"))
    X, H = differential_tor(Np, N, kp.tau)
    return report("tor", _pair_config(kp, w, ring, args), homology=homology_table(H),
                  verification={"d_squared": _d_squared(X) is None})


def cmd_cotor(args: argparse.Namespace) -> Doc:
    kp, w, ring = _pair(args)
    M = _seeded(kp, args.left, ring, DGComodule, trivial_comodule(kp.sigma_prime, "left"))
    Mp = _seeded(kp, args.right, ring, DGComodule, trivial_comodule(kp.sigma_prime, "right"))
    X, H = differential_cotor(Mp, M, kp.tau)
    return report("cotor", _pair_config(kp, w, ring, args), homology=homology_table(H),
                  verification={"d_squared": _d_squared(X) is None})


def cmd_example71(args: argparse.Namespace) -> Doc:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    w = _window(args, 4 * args.n)
    ring = _ring(args) or CoefficientRing.integers()
    r = example_71(Example71Config(args.n, w, ring))
    ver = dict(r.verification)
    ver["homology_matches"] = expected_projective_space(args.n, r.homology)
    doc = report("example71", {"n": args.n, "window": _window_json(w), "ring": ring.spelling()},
                 homology=homology_table(r.homology),
                 derived_tc={"name": r.tau.name, "sign": r.sign, **blocks_to_json(r.tau.map)},
                 derived=blocks_to_json(r.derived), verification=ver)
    if not all(ver.values()):
        failed = sorted(k for k, v in ver.items() if not v)
        raise VerificationFailure(f"example71: checks failed: {', '.join(failed)}", doc)
    return doc


def cmd_split_check(args: argparse.Namespace) -> Doc:
    from .fixtures import load
    ring = _ring(args)
    if args.input is None:
        reg = Registry()
        reg.add_document(_with_ring(load("circle_action_n2"), ring))
        reg.resolve()
        source = "circle_action_n2"
    else:
        reg = _registry([args.input], ring)
        source = args.input
    tau = reg.get("tau", TwistingCochain)
    N = reg.get("module", DGModule)
    rep = splitting_check(tau, N)
    ver: dict[str, bool] = {}
    out: dict[str, Any] = {"split": rep.split}
    if rep.split:
        tw, un = rep.twisted_complex, rep.untwisted_complex
        f, g = rep.untwisting, rep.untwisting_inverse
        ver["untwisting_chain_map"] = chain_map_defect(f, tw, un) is None
        ver["inverse_chain_map"] = chain_map_defect(g, un, tw) is None
        ver["inverse_both_ways"] = ((g @ f).equals(HomogeneousMap.identity(tw.module))
                                    and (f @ g).equals(HomogeneousMap.identity(un.module)))
        out["homotopy"] = blocks_to_json(rep.homotopy)
    else:
        out["obstruction"] = {"degree": rep.obstruction_degree, "basis": rep.obstruction_basis}
        ver["certified"] = bool(rep.certified)
    out["twisted_homology"] = homology_table(rep.twisted_homology)
    out["untwisted_homology"] = homology_table(rep.untwisted_homology)
    doc = report("split-check", {"input": source}, verification=ver, notes=list(rep.notes), **out)
    if not all(ver.values()):
        raise VerificationFailure("split-check: " + ", ".join(k for k, v in ver.items() if not v), doc)
    return doc


# --------------------------------------------------------------------------
# text rendering


def render_text(doc: Doc) -> str:
    lines = [f"{doc.get('schema', '')} {doc.get('command', '')}".strip()]
    for key in sorted(doc):
        if key in ("schema", "command"):
            continue
        val = doc[key]
        if key.endswith("homology") and isinstance(val, list):
            lines.append(f"{key}:")
            for row in val:
                grp = " + ".join(([f"Z^{row['free_rank']}" if row['free_rank'] > 1 else "Z"]
                                  if row["free_rank"] else []) + [f"Z/{t}" for t in row["torsion"]]) or "0"
                flag = "" if row["reliable"] else "  (edge-unreliable)"
                lines.append(f"  H_{row['degree']} = {grp}{flag}")
        elif key in ("verification", "config"):
            lines.append(f"{key}: " + ", ".join(f"{k}={v}" for k, v in sorted(val.items())))
        elif isinstance(val, (dict, list)):
            lines.append(f"{key}: {json.dumps(val, sort_keys=True, ensure_ascii=False)}")
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", metavar="LO:HI", help="truncation window")
    p.add_argument("--max-degree", type=int, metavar="HI", help="alias for --window 0:HI")
    p.add_argument("--ring", metavar="z|q|zp:<p>", help="coefficient ring")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hptalg", description="Exact homological perturbation computations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    table: dict[str, tuple[Callable[[argparse.Namespace], Doc], str]] = {
        "verify": (cmd_verify, "check every structure in the inputs"),
        "homology": (cmd_homology, "integer homology of a complex"),
        "bar": (cmd_bar, "reduced bar construction of a DGA (dgc.v1 output)"),
        "cobar": (cmd_cobar, "reduced cobar construction of a DGC (dga.v1 output)"),
        "perturb": (cmd_perturb, "perturbation lemma on a contraction"),
        "transfer": (cmd_transfer, "transfer a twisting cochain along a contraction"),
        "koszul-t": (cmd_koszul_t, "t(N) = Σ′ ⊗_τ N"),
        "koszul-h": (cmd_koszul_h, "h(M) = Λ ⊗_τ M"),
        "koszul-tstar": (cmd_koszul_tstar, "t*(N) = Hom^τ(Σ′, N)"),
        "koszul-hstar": (cmd_koszul_hstar, "h*(t*(N)) round trip"),
        "tor": (cmd_tor, "differential Tor over Λ"),
        "cotor": (cmd_cotor, "differential Cotor over Σ′"),
        "example71": (cmd_example71, "circle action on an odd sphere"),
        "split-check": (cmd_split_check, "splitting homotopy or certified obstruction"),
    }
    for name, (fn, help_text) in table.items():
        p = sub.add_parser(name, help=help_text)
        _common(p)
        p.set_defaults(func=fn)
        if name == "verify":
            p.add_argument("inputs", nargs="+", help="JSON files or - for standard input")
        elif name == "homology":
            p.add_argument("input")
            p.add_argument("--role", help="object of a bundle to use")
        elif name in ("bar", "cobar", "perturb"):
            p.add_argument("input")
        elif name == "transfer":
            p.add_argument("input", help="bundle with roles sigma, contraction, big")
            p.add_argument("--direction", choices=("coalgebra", "algebra"), required=True)
        elif name.startswith("koszul") or name in ("tor", "cotor"):
            p.add_argument("--degrees", default="1", help="odd generator degrees, e.g. 1,3")
            if name in ("koszul-t", "koszul-tstar", "koszul-hstar"):
                p.add_argument("--module", help="module.v1 over the exterior algebra")
            elif name == "koszul-h":
                p.add_argument("--comodule", help="comodule.v1 over the symmetric coalgebra")
            else:
                p.add_argument("--left")
                p.add_argument("--right")
        elif name == "example71":
            p.add_argument("--n", type=int, default=2)
        elif name == "split-check":
            p.add_argument("input", nargs="?", help="bundle with roles tau and module")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    fmt = getattr(args, "format", "json")
    try:
        doc = args.func(args)
        code = 0
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        doc = exc.doc or report(args.command, {}, failures=[str(exc)])
        doc.setdefault("failures", [str(exc)])
        code = 2
    except (TwistingError, CompositionError, ContractionError, PerturbationError, StructureError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        doc = report(args.command, {}, failures=[str(exc)])
        code = 2
    except (UsageError, SchemaError, WindowError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render_text(doc) if fmt == "text" else dumps(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
