"""Contractions and the perturbation lemma, with the transfer constructions built on them.

A contraction ``(∇, π, h)`` of ``N`` onto ``M`` satisfies ``π∇ = 1``,
``dh + hd = ∇π − 1`` and the side conditions ``πh = 0``, ``h∇ = 0``, ``hh = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .dg import DGAlgebra, DGCoalgebra, DGModule, StructureError, endomorphism_dga_op
from .exact_linear import ExactMatrix, Scalar, inverse, smith_normal_form
from .graded import (ChainComplex, GradedModule, HomModule, HomogeneousMap, Key, TensorModule,
                     TruncationWindow, Vector, WindowError, homology, sign,
                     tensor_maps, vec_add_into, vec_clean)
from .twist import (TwistingCochain, TwistingHomotopy, cup, cup_shift_isomorphism, hom_D,
                    homotopy_inverse, twisted_hom, unit_counit)


class ContractionError(ValueError):
    """Contraction data violate a defining identity, or a construction cannot produce one."""


class PerturbationError(ValueError):
    """The perturbation series does not terminate within the window."""


def _first(f: HomogeneousMap) -> tuple[int, str] | None:
    bad = f.first_nonzero()
    return None if bad is None else (bad[0], bad[1])


@dataclass
class Contraction:
    big: ChainComplex
    small: ChainComplex
    incl: HomogeneousMap
    proj: HomogeneousMap
    htpy: HomogeneousMap
    filtration: dict[Key, int] | None = None

    def __post_init__(self) -> None:
        N, M = self.big.module, self.small.module
        if self.incl.source != M or self.incl.target != N or self.incl.shift != 0:
            raise ContractionError("∇ must be a degree-0 map from the small to the big complex")
        if self.proj.source != N or self.proj.target != M or self.proj.shift != 0:
            raise ContractionError("π must be a degree-0 map from the big to the small complex")
        if self.htpy.source != N or self.htpy.target != N or self.htpy.shift != 1:
            raise ContractionError("h must be a degree +1 endomorphism of the big complex")

    # identities -------------------------------------------------------------
    def defects(self) -> dict[str, HomogeneousMap]:
        d, dm = self.big.d, self.small.d
        nab, pi, h = self.incl, self.proj, self.htpy
        one_n = HomogeneousMap.identity(self.big.module)
        one_m = HomogeneousMap.identity(self.small.module)
        return {
            "π∇ = 1": (pi @ nab) - one_m,
            "Dh = ∇π − 1": (d @ h) + (h @ d) - ((nab @ pi) - one_n),
            "πh = 0": pi @ h,
            "h∇ = 0": h @ nab,
            "hh = 0": h @ h,
            "∇ chain map": (d @ nab) - (nab @ dm),
            "π chain map": (dm @ pi) - (pi @ d),
        }

    def failures(self) -> list[str]:
        out = []
        for name, f in self.defects().items():
            bad = _first(f)
            if bad is not None:
                out.append(f"contraction: {name} fails at degree {bad[0]}, basis {bad[1]}")
        return out

    def is_valid(self) -> bool:
        return not self.failures()

    def require_valid(self) -> None:
        f = self.failures()
        if f:
            raise ContractionError(f[0])


def identity_contraction(X: ChainComplex) -> Contraction:
    one = HomogeneousMap.identity(X.module)
    return Contraction(X, X, one, one, HomogeneousMap.zero(X.module, X.module, 1))


def repair_side_conditions(big: ChainComplex, small: ChainComplex, incl: HomogeneousMap,
                           proj: HomogeneousMap, htpy: HomogeneousMap,
                           filtration: dict[Key, int] | None = None) -> Contraction:
    """Replace ``h`` by ``−(qhq) d (qhq)`` with ``q = 1 − ∇π`` so the side conditions hold."""
    c = Contraction(big, small, incl, proj, htpy, filtration)
    defects = c.defects()
    for name in ("π∇ = 1", "Dh = ∇π − 1"):
        bad = _first(defects[name])
        if bad is not None:
            raise ContractionError(f"contraction: {name} fails at degree {bad[0]}, basis {bad[1]}")
    q = HomogeneousMap.identity(big.module) - (incl @ proj)
    k = q @ htpy @ q
    new_h = -(k @ big.d @ k)
    return Contraction(big, small, incl, proj, new_h, filtration)


# --------------------------------------------------------------------------
# perturbation lemma


@dataclass
class Perturbation:
    on: ChainComplex
    op: HomogeneousMap

    def failure(self, filtration: Mapping[Key, int] | None = None) -> str | None:
        if self.op.shift != -1 or self.op.source != self.on.module or self.op.target != self.on.module:
            return "perturbation: not a degree −1 endomorphism"
        d, p = self.on.d, self.op
        bad = _first((d @ p) + (p @ d) + (p @ p))
        if bad is not None:
            return f"perturbation: d∂ + ∂d + ∂∂ ≠ 0 at degree {bad[0]}, basis {bad[1]}"
        if filtration is not None:
            M = self.on.module
            for k in M.keys():
                if not p.known(k[0]):
                    continue
                for t in p.apply_key(k):
                    if filtration[t] >= filtration[k]:
                        return (f"perturbation: does not lower filtration at degree {k[0]}, "
                                f"basis {M.label(k)}")
        return None


def _geometric_series(T: HomogeneousMap, bound: int) -> HomogeneousMap:
    """``Σ_{n≥0} Tⁿ`` for a degreewise nilpotent degree-0 endomorphism."""
    total = HomogeneousMap.identity(T.source)
    power = total
    for _ in range(bound + 1):
        power = T @ power
        if power.is_zero():
            return total.with_unknown(power.unknown)
        total = total + power
    raise PerturbationError(
        f"perturbation: series Σ(h∂)ⁿ does not terminate within {bound} iterations "
        "(filtration not complete on the window)")


def perturb(c: Contraction, delta: HomogeneousMap,
            filtration: Mapping[Key, int] | None = None) -> tuple[HomogeneousMap, Contraction]:
    """Perturbation lemma.

    Returns the induced perturbation ``𝒟 = π∂Σ(h∂)ⁿ∇`` of the small differential
    and the contraction ``(Σ(h∂)ⁿ∇, πΣ(∂h)ⁿ, Σ(h∂)ⁿh)`` between the perturbed complexes.
    """
    filt = filtration if filtration is not None else c.filtration
    pert = Perturbation(c.big, delta)
    msg = pert.failure(filt)
    if msg is not None:
        raise PerturbationError(msg)
    h = c.htpy
    bound = c.big.module.window.height + 1
    S = _geometric_series(h @ delta, bound)
    nab = S @ c.incl
    h_new = S @ h
    pi_new = c.proj + (c.proj @ delta @ S @ h)
    D = c.proj @ delta @ S @ c.incl
    big = ChainComplex(c.big.module, c.big.d + delta)
    small = ChainComplex(c.small.module, c.small.d + D)
    return D, Contraction(big, small, nab, pi_new, h_new, dict(filt) if filt is not None else None)


# --------------------------------------------------------------------------
# swapping the structure maps


def swap_inclusion(c: Contraction, new_incl: HomogeneousMap) -> Contraction:
    """Replace ``∇`` by another chain section ``∇″`` of ``π``: ``h″ = h − h(∇″ − ∇)π``, then repair."""
    h = c.htpy - (c.htpy @ (new_incl - c.incl) @ c.proj)
    return repair_side_conditions(c.big, c.small, new_incl, c.proj, h, c.filtration)


def swap_projection(c: Contraction, new_proj: HomogeneousMap) -> Contraction:
    """Replace ``π`` by another chain retraction ``π″`` of ``∇``: ``h″ = h − ∇(π″ − π)h``, then repair."""
    h = c.htpy - (c.incl @ (new_proj - c.proj) @ c.htpy)
    return repair_side_conditions(c.big, c.small, c.incl, new_proj, h, c.filtration)


# --------------------------------------------------------------------------
# tensoring contractions


def tensor_contraction(X: ChainComplex, c: Contraction, on_left: bool = True,
                       window: TruncationWindow | None = None) -> Contraction:
    """``X ⊗ c`` (``on_left``) or ``c ⊗ X`` with Koszul signs."""
    from .graded import tensor
    one = HomogeneousMap.identity(X.module)
    if on_left:
        big = tensor(X, c.big, window)
        small = tensor(X, c.small, big.window if window is None else window)
        T_big, T_small = big.module, small.module
        nab = tensor_maps(one, c.incl, T_small, T_big)
        pi = tensor_maps(one, c.proj, T_big, T_small)
        h = tensor_maps(one, c.htpy, T_big, T_big)
    else:
        big = tensor(c.big, X, window)
        small = tensor(c.small, X, big.window if window is None else window)
        T_big, T_small = big.module, small.module
        nab = tensor_maps(c.incl, one, T_small, T_big)
        pi = tensor_maps(c.proj, one, T_big, T_small)
        h = tensor_maps(c.htpy, one, T_big, T_big)
    return Contraction(big, small, nab, pi, h)


def drop_unit_factor(c: Contraction) -> Contraction:
    """Replace a small complex ``X ⊗ R`` or ``R ⊗ X`` by ``X`` through the unit isomorphism."""
    T = c.small.module
    if not isinstance(T, TensorModule):
        raise ContractionError("small complex is not a tensor product")
    ground = lambda M: M.degrees() == [0] and len(M.labels(0)) == 1 and M.bounded_below and M.bounded_above
    if ground(T.right):
        X, pos = T.left, 1
    elif ground(T.left):
        X, pos = T.right, 0
    else:
        raise ContractionError("small complex has no ground-ring factor")
    r = (0, 0)

    def to_x(key: Key) -> Vector:
        pr = T.pair(key)
        return {pr[1 - pos]: 1}

    def from_x(key: Key) -> Vector:
        tk = T.lookup(key, r) if pos == 1 else T.lookup(r, key)
        if tk is None:
            raise WindowError("unit factor leaves the tensor window")
        return {tk: 1}

    to_small = HomogeneousMap.from_function(T, X, 0, to_x)
    from_small = HomogeneousMap.from_function(X, T, 0, from_x, tolerant=True)
    dX = to_small @ c.small.d @ from_small
    small = ChainComplex(X, dX)
    return Contraction(c.big, small, c.incl @ from_small, to_small @ c.proj, c.htpy, c.filtration)


# --------------------------------------------------------------------------
# contraction onto homology


def contraction_onto_homology(X: ChainComplex) -> Contraction:
    """Contraction of a complex onto its homology; over ℤ the homology must be free.

    Degrees whose homology is not determined by the window are left unknown.
    """
    ring = X.ring
    M = X.module
    degrees = sorted(set(M.degrees()))
    decomp: dict[int, tuple[ExactMatrix, int]] = {}  # q -> (V, rank of d_q)
    for q in degrees:
        n = len(M.labels(q))
        b = X.d.block(q)
        if b is None:
            continue
        if b.rows == 0 or b.is_zero():
            decomp[q] = (ExactMatrix.identity(ring, n), 0)
            continue
        sf = smith_normal_form(b)
        decomp[q] = (sf.V, sf.rank)

    def xs(q: int) -> ExactMatrix:
        V, r = decomp[q]
        return V.submatrix(range(V.rows), range(r))

    def known(q: int) -> bool:
        if q not in decomp:
            return False
        up = M.dim(q + 1)
        if up is None:
            return False
        return up == 0 or (q + 1) in decomp

    pinv: dict[int, ExactMatrix] = {}
    layout: dict[int, tuple[int, int, int]] = {}  # (r_x, r_b, r_g)
    gens: dict[int, ExactMatrix] = {}
    for q in degrees:
        if not known(q):
            continue
        n = len(M.labels(q))
        V, r = decomp[q]
        K = V.submatrix(range(n), range(r, n))
        if (q + 1) in decomp and decomp[q + 1][1]:
            Xup = xs(q + 1)
            B = X.d.block(q + 1) @ Xup
            Vinv = inverse(V)
            if not (Vinv.submatrix(range(r), range(n)) @ B).is_zero():
                raise ContractionError(f"contraction onto homology: d∘d ≠ 0 at degree {q + 1}")
            Bk = Vinv.submatrix(range(r, n), range(n)) @ B
            sf = smith_normal_form(Bk)
            if any(abs(dv) != 1 for dv in sf.divisors):
                raise ContractionError(f"contraction onto homology: homology in degree {q} has torsion "
                                       f"{sorted(abs(dv) for dv in sf.divisors if abs(dv) != 1)}")
            Uinv = inverse(sf.U)
            G = K @ Uinv.submatrix(range(Uinv.rows), range(B.cols, Uinv.cols))
        else:
            B = ExactMatrix.zeros(ring, n, 0)
            G = K
        P = ExactMatrix.block(ring, [[xs(q), B, G]]) if n else ExactMatrix.zeros(ring, 0, 0)
        pinv[q] = inverse(P) if n else P
        layout[q] = (r, B.cols, G.cols)
        gens[q] = G

    known_degs = sorted(layout)
    if not known_degs:
        raise ContractionError("contraction onto homology: no degree is determined by the window")
    lo, hi = known_degs[0], known_degs[-1]
    labels: dict[int, list[str]] = {}
    for q in known_degs:
        G = gens[q]
        labs = []
        for j in range(G.cols):
            col = {(q, i): v for i, v in G.column(j).items()}
            if len(col) == 1 and next(iter(col.values())) == 1:
                labs.append(M.label(next(iter(col))))
            else:
                labs.append("[" + M.format_vector(col) + "]")
        if len(set(labs)) != len(labs):
            labs = [f"{l}#{i}" for i, l in enumerate(labs)]
        labels[q] = labs
    H = GradedModule(ring, TruncationWindow(lo, hi), labels,
                     M.bounded_below and not any(q < lo for q in degrees),
                     M.bounded_above and not any(q > hi for q in degrees))
    small = ChainComplex.zero_differential(H)
    nab_blocks = {q: gens[q] for q in known_degs if gens[q].cols}
    pi_blocks = {}
    h_blocks = {}
    for q in known_degs:
        rx, rb, rg = layout[q]
        n = len(M.labels(q))
        Pi = pinv[q]
        if rg:
            pi_blocks[q] = Pi.submatrix(range(rx + rb, n), range(n))
        if rb:
            h_blocks[q] = -(xs(q + 1) @ Pi.submatrix(range(rx, rx + rb), range(n)))
    unknown = [q for q in degrees if q not in layout]
    nab = HomogeneousMap(H, M, 0, nab_blocks)
    pi = HomogeneousMap(M, H, 0, pi_blocks, unknown)
    h_unknown = set(unknown)
    h = HomogeneousMap(M, M, 1, h_blocks, h_unknown)
    return Contraction(X, small, nab, pi, h)


def contraction_onto_ground(X: ChainComplex, unit: Mapping[Key, Scalar],
                            counit: Mapping[Key, Scalar]) -> Contraction:
    """Contraction of a complex with homology ``R`` in degree 0 onto ``R`` with ``∇ = η``, ``π = ε``."""
    from .graded import ground_ring_complex
    ring = X.ring
    c = contraction_onto_homology(X)
    H = c.small.module
    if any(q != 0 for q in H.degrees()) or len(H.labels(0)) != 1:
        raise ContractionError(f"contraction onto the ground ring: homology is {H.basis()}")
    R = ground_ring_complex(ring).module
    g = c.incl.apply_key((0, 0))
    scale = ring.reduce(sum(counit.get(k, 0) * v for k, v in g.items()))
    if scale not in (1, -1) and not (ring.is_field and scale != 0):
        raise ContractionError("contraction onto the ground ring: counit does not detect homology")
    to_R = HomogeneousMap(H, R, 0, {0: ExactMatrix.from_dense(ring, [[scale]])})
    from_R = HomogeneousMap(R, H, 0, {0: ExactMatrix.from_dense(ring, [[ring.inverse(scale)]])})
    eta = HomogeneousMap(R, X.module, 0, {0: ExactMatrix.from_columns(
        ring, len(X.module.labels(0)), [{k[1]: v for k, v in unit.items()}])})
    eps = HomogeneousMap(X.module, R, 0, {0: ExactMatrix.from_entries(
        ring, 1, len(X.module.labels(0)), [(0, k[1], v) for k, v in counit.items()])})
    base = Contraction(X, ChainComplex.zero_differential(R), c.incl @ from_R, to_R @ c.proj, c.htpy)
    return swap_projection(swap_inclusion(base, eta), eps)


# --------------------------------------------------------------------------
# transfer of twisting cochains


def _stabilise(step, start: HomogeneousMap, bound: int, what: str) -> HomogeneousMap:
    cur = start
    for _ in range(bound + 2):
        nxt = step(cur)
        if nxt.equals(cur) and nxt.unknown == cur.unknown:
            return nxt
        cur = nxt
    raise PerturbationError(f"{what}: recursion did not stabilise within the window height")


def is_coalgebra_map(f: HomogeneousMap, C: DGCoalgebra, Cp: DGCoalgebra) -> bool:
    for c in C.module.keys():
        if not f.known(c[0]):
            continue
        lhs = Cp.comul(f.apply_key(c))
        rhs: dict = {}
        for (a, b), v in C.comul_key(c).items():
            for ka, va in f.apply_key(a).items():
                for kb, vb in f.apply_key(b).items():
                    rhs[(ka, kb)] = rhs.get((ka, kb), 0) + v * va * vb
        if lhs != {k: v for k, v in rhs.items() if C.ring.reduce(v) != 0}:
            return False
    return True


def is_algebra_map(f: HomogeneousMap, A: DGAlgebra, B: DGAlgebra) -> bool:
    for a in A.module.keys():
        for b in A.module.keys():
            if A.module.dim(a[0] + b[0]) is None or not f.known(a[0] + b[0]):
                continue
            if not (f.known(a[0]) and f.known(b[0])):
                continue
            if f.apply(A.mul_keys(a, b)) != B.mul(f.apply_key(a), f.apply_key(b)):
                return False
    return True


def transfer_along_coalgebra_contraction(sigma: TwistingCochain, Cp: DGCoalgebra,
                                         c: Contraction) -> TwistingCochain:
    """``ξ = σπ − (ξ∪ξ)h`` for a contraction of ``C′`` onto ``C`` whose ``∇`` is a coalgebra map."""
    C, A = sigma.coalgebra, sigma.algebra
    if c.big.module != Cp.module or c.small.module != C.module:
        raise ContractionError("contraction does not relate C′ and C")
    base = sigma.map @ c.proj
    xi = _stabilise(lambda x: base - (cup(x, x, Cp, A) @ c.htpy), base,
                    Cp.module.window.height, "transfer")
    return TwistingCochain(Cp, A, xi, name="ξ")


def transfer_along_algebra_contraction(sigma: TwistingCochain, Ap: DGAlgebra,
                                       c: Contraction) -> TwistingCochain:
    """``ξ = ∇σ − h(ξ∪ξ)`` for a contraction of ``A′`` onto ``A`` whose ``π`` is an algebra map."""
    C, A = sigma.coalgebra, sigma.algebra
    if c.big.module != Ap.module or c.small.module != A.module:
        raise ContractionError("contraction does not relate A′ and A")
    base = c.incl @ sigma.map
    xi = _stabilise(lambda x: base - (c.htpy @ cup(x, x, C, Ap)), base,
                    C.module.window.height, "transfer")
    return TwistingCochain(C, Ap, xi, name="ξ")


def lift_homotopy(t1: TwistingCochain, t2: TwistingCochain, c: Contraction,
                  hB: HomogeneousMap) -> TwistingHomotopy:
    """``h^𝒜 = ∇h^ℬ − h(t₁∪h^𝒜 − h^𝒜∪t₂)`` for a contraction of 𝒜 onto ℬ with π multiplicative."""
    C, A = t1.coalgebra, t1.algebra
    base = c.incl @ hB

    def step(x: HomogeneousMap) -> HomogeneousMap:
        return base - (c.htpy @ (cup(t1.map, x, C, A) - cup(x, t2.map, C, A)))

    hA = _stabilise(step, base, C.module.window.height, "homotopy lifting")
    return TwistingHomotopy(t1, t2, hA)


# --------------------------------------------------------------------------
# idempotent twisting cochains


@dataclass
class IdempotentTwisting:
    bar: object
    tau: HomogeneousMap
    idempotent: Vector
    hbar: Vector
    algebra: DGAlgebra

    def circ_cup(self, f: HomogeneousMap, g: HomogeneousMap) -> HomogeneousMap:
        """Cup pairing with respect to ``α∘β = αpβ``."""
        B, U, p = self.bar.coalgebra, self.algebra, self.idempotent  # type: ignore[attr-defined]
        gs = g.shift

        def fn(w: Key) -> Vector:
            acc: Vector = {}
            for (w1, w2), k in B.comul_key(w).items():
                a = f.apply_key(w1)
                if not a:
                    continue
                b = g.apply_key(w2)
                if not b:
                    continue
                vec_add_into(acc, U.mul(U.mul(a, p), b), sign(gs * w1[0]) * k)
            return vec_clean(acc, U.ring)

        return HomogeneousMap.from_function(B.module, U.module, f.shift + g.shift, fn, tolerant=True)

    def defect(self) -> HomogeneousMap:
        """``(D + δ)τ − τ⊙τ``; the Hom differential uses the full bar differential."""
        B = self.bar.coalgebra  # type: ignore[attr-defined]
        return hom_D(self.tau, B.complex, self.algebra.complex) - self.circ_cup(self.tau, self.tau)

    def failure(self) -> str | None:
        bad = _first(self.defect())
        if bad is None:
            return None
        return f"twisting: (D+δ)τ ≠ τ⊙τ at degree {bad[0]}, basis {bad[1]}"


def idempotent_twisting_cochain(U: DGAlgebra, p: Mapping[Key, Scalar], hbar: Mapping[Key, Scalar],
                                window: TruncationWindow | int) -> IdempotentTwisting:
    """``τ_j[α₁|…|α_j] = α₁ ℏ α₂ ⋯ ℏ α_j`` on the bar construction of ``U``."""
    from .barcobar import bar
    p = dict(p)
    hbar = dict(hbar)
    if U.mul(p, p) != vec_clean(dict(p), U.ring):
        raise StructureError("idempotent: p² ≠ p")
    one = vec_clean(dict(U.unit), U.ring)
    target = dict(one)
    vec_add_into(target, p, -1)
    if any(k[0] != 1 for k in hbar) or U.d.apply(hbar) != vec_clean(target, U.ring):
        raise StructureError("idempotent: dℏ ≠ 1 − p")
    Bc = bar(U, window)
    words = Bc.words

    def fn(w: Key) -> Vector:
        letters = words[w]
        if not letters:
            return {}
        acc: Vector = {letters[0]: 1}
        for a in letters[1:]:
            acc = U.mul(U.mul(acc, hbar), {a: 1})
            if not acc:
                break
        return acc

    tau = HomogeneousMap.from_function(Bc.coalgebra.module, U.module, -1, fn, tolerant=True)
    return IdempotentTwisting(Bc, tau, p, hbar, U)


# --------------------------------------------------------------------------
# splitting


def endomorphism_contraction(c: Contraction, E: DGAlgebra, EH: DGAlgebra) -> Contraction:
    """Contraction of End(N) onto End(H) induced by a contraction of N onto H.

    ``Π(α) = πα∇``, ``∇(β) = ∇βπ``, ``H(α) = hα + (−1)^{|α|} ∇π α h``.
    """
    HN: HomModule = E.module  # type: ignore[assignment]
    HH: HomModule = EH.module  # type: ignore[assignment]
    nab, pi, h = c.incl, c.proj, c.htpy
    p = nab @ pi

    def as_map(M: HomModule, key: Key) -> HomogeneousMap:
        return M.map_of({key: 1}, key[0])

    def Pi(key: Key) -> Vector:
        a = as_map(HN, key)
        return HH.vector_of(pi @ a @ nab)

    def Nab(key: Key) -> Vector:
        b = as_map(HH, key)
        return HN.vector_of(nab @ b @ pi)

    def Hh(key: Key) -> Vector:
        a = as_map(HN, key)
        r = key[0]
        val = (h @ a) + (p @ a @ h).scale(sign(r))
        if val.shift not in HN.window:
            return {}
        return HN.vector_of(val)

    proj = HomogeneousMap.from_function(HN, HH, 0, Pi, tolerant=True)
    incl = HomogeneousMap.from_function(HH, HN, 0, Nab, tolerant=True)
    htpy = HomogeneousMap.from_function(HN, HN, 1, Hh, tolerant=True)
    return Contraction(E.complex, EH.complex, incl, proj, htpy)


@dataclass
class SplittingReport:
    split: bool
    homotopy: HomogeneousMap | None
    composite: TwistingCochain
    obstruction_degree: int | None
    obstruction_basis: str | None
    certified: bool
    twisted_homology: dict
    untwisted_homology: dict
    untwisting: HomogeneousMap | None = None
    untwisting_inverse: HomogeneousMap | None = None
    twisted_complex: ChainComplex | None = None
    untwisted_complex: ChainComplex | None = None
    notes: list[str] = field(default_factory=list)


def action_representation(Nmod: DGModule, Eop: DGAlgebra) -> HomogeneousMap:
    """``ρ: A → End(N)^op`` with ``ρ(a)(n) = (−1)^{|a||n|} n·a``, so ``n·ρ(a) = n·a``."""
    A = Nmod.algebra
    HN: HomModule = Eop.module  # type: ignore[assignment]
    M = Nmod.module

    def fn(a: Key) -> Vector:
        out: Vector = {}
        for n in M.keys():
            if M.dim(n[0] + a[0]) is None:
                raise WindowError("action leaves the module window")
            s = sign(a[0] * n[0])
            for t, v in Nmod.act({n: 1}, {a: 1}).items():
                out[HN.elem_index[(n, t)]] = s * v
        return out

    return HomogeneousMap.from_function(A.module, HN, 0, fn,
                                        [q for q in A.module.degrees() if HN.dim(q) is not None])


def splitting_check(tau: TwistingCochain, Nmod: DGModule) -> SplittingReport:
    """Search for a splitting homotopy of ``Hom^τ(C, N)`` and certify obstructions by homology."""
    C = tau.coalgebra
    if Nmod.side != "right":
        raise StructureError("splitting check needs a right module")
    tau.require_valid()
    cN = contraction_onto_homology(Nmod.complex)
    Eop = endomorphism_dga_op(Nmod.complex)
    act = Eop.action  # type: ignore[attr-defined]
    rho = action_representation(Nmod, Eop)
    comp = TwistingCochain(C, Eop, rho @ tau.map, name="τ′")
    notes = []
    msg = comp.failure()
    if msg is not None:
        raise StructureError(f"composite twisting cochain invalid: {msg}")

    EH = endomorphism_dga_op(cN.small)
    cE = endomorphism_contraction(cN, Eop, EH)

    # homology comparison (necessary condition for a splitting)
    tw = twisted_hom(C, Nmod, tau)
    zero = TwistingCochain.zero(C, Eop)
    untw = twisted_hom(C, act, zero)
    Htw = homology(tw.complex)
    Hun = homology(untw.complex)
    certified_deg = None
    for q in sorted(Htw):
        a, b = Htw[q], Hun.get(q)
        if b is None or not (a.reliable and b.reliable):
            continue
        if (a.free_rank, a.torsion) != (b.free_rank, b.torsion):
            certified_deg = q
            break

    # recursion h = ηε − H(τ′∪h), degree by degree along C
    Cm, Em = C.module, Eop.module
    ee = unit_counit(C, Eop)
    values: dict[Key, Vector] = {}
    obstruction: tuple[int, str] | None = None
    stop_degree = None
    for q in sorted(Cm.degrees()):
        if Em.dim(q) is None:
            stop_degree = q
            break
        for c in Cm.keys(q):
            acc: Vector = {}
            for (c1, c2), k in C.comul_key(c).items():
                t = comp.map.apply_key(c1)
                if not t:
                    continue
                hv = values.get(c2)
                if hv is None:
                    if c2[0] >= q:
                        continue
                    hv = {}
                vec_add_into(acc, Eop.mul(t, hv), k)  # sign (−1)^{|h||c′|} = 1
            X = vec_clean(acc, C.ring)
            if X and cE.proj.known(q - 1) and cE.proj.apply(X) and obstruction is None:
                obstruction = (q, Cm.label(c))
            val = ee.apply_key(c) if ee.known(q) else {}
            val = dict(val)
            if X:
                vec_add_into(val, cE.htpy.apply(X), -1)
            values[c] = vec_clean(val, C.ring)
        if obstruction is not None:
            stop_degree = q
            break

    if obstruction is not None or certified_deg is not None:
        if obstruction is None:
            notes.append("recursion completed but homology comparison differs")
        return SplittingReport(False, None, comp,
                               obstruction[0] if obstruction else certified_deg,
                               obstruction[1] if obstruction else None,
                               certified_deg is not None, Htw, Hun, notes=notes)

    known_degs = [q for q in Cm.degrees() if stop_degree is None or q < stop_degree]
    hmap = HomogeneousMap.from_function(Cm, Em, 0, lambda c: values.get(c, {}), known_degs)
    psi = TwistingHomotopy(comp, zero, hmap)
    fail = psi.failure()
    if fail is not None:
        notes.append(fail)
        return SplittingReport(False, hmap, comp, None, None, False, Htw, Hun, notes=notes)
    iso, src, tgt = cup_shift_isomorphism(psi, act)
    inv_psi = homotopy_inverse(psi)
    inv, _, _ = cup_shift_isomorphism(inv_psi, act)
    return SplittingReport(True, hmap, comp, None, None, False, Htw, Hun, iso, inv,
                           src.complex, tgt.complex, notes)
