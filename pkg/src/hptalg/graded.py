"""Finite-type graded modules, homogeneous maps and chain complexes.

Objects live on a truncation window ``[lo, hi]``.  A module may additionally
declare that it vanishes below and/or above its window; otherwise degrees
outside the window are *unknown* and every map or homology group that would
need them is either left undefined or flagged as unreliable.

Basis elements are addressed by keys ``(degree, index)``; elements are sparse
dictionaries ``{key: coefficient}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .exact_linear import (CoefficientRing, CompositionError, ExactMatrix, HomologyGroup,
                           Scalar, subquotient_homology)

Key = tuple[int, int]
Vector = dict[Key, Scalar]


def sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def vec_add_into(acc: Vector, vec: Mapping[Key, Scalar], coef: Scalar = 1) -> None:
    for k, v in vec.items():
        acc[k] = acc.get(k, 0) + coef * v


def vec_clean(vec: Vector, ring: CoefficientRing) -> Vector:
    red = ring.reduce
    out = {}
    for k, v in vec.items():
        v = red(v)
        if v != 0:
            out[k] = v
    return out


@dataclass(frozen=True)
class TruncationWindow:
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty window [{self.lo}, {self.hi}]")

    def __contains__(self, q: object) -> bool:
        return isinstance(q, int) and self.lo <= q <= self.hi

    @property
    def height(self) -> int:
        return self.hi - self.lo

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    @classmethod
    def parse(cls, text: str) -> "TruncationWindow":
        lo, hi = text.split(":")
        return cls(int(lo), int(hi))


class WindowError(ValueError):
    """A requested degree cannot be represented on the available window."""


class GradedModule:
    """Free graded module with a labelled basis per degree inside a window."""

    def __init__(self, ring: CoefficientRing, window: TruncationWindow,
                 basis: Mapping[int, Sequence[str]],
                 bounded_below: bool = False, bounded_above: bool = False) -> None:
        self.ring = ring
        self.window = window
        self.bounded_below = bounded_below
        self.bounded_above = bounded_above
        clean: dict[int, tuple[str, ...]] = {}
        for q in sorted(basis):
            labels = tuple(basis[q])
            if not labels:
                continue
            if q not in window:
                raise WindowError(f"basis in degree {q} lies outside window [{window.lo}, {window.hi}]")
            if len(set(labels)) != len(labels):
                raise ValueError(f"duplicate basis labels in degree {q}")
            clean[q] = labels
        self._basis = clean
        self._index = {q: {lab: i for i, lab in enumerate(labs)} for q, labs in clean.items()}
        self._ident = (ring, window, tuple(clean.items()), bounded_below, bounded_above)

    # identity ------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedModule):
            return NotImplemented
        return self is other or self._ident == other._ident

    def __hash__(self) -> int:
        return hash(self._ident)

    def __repr__(self) -> str:
        ranks = {q: len(l) for q, l in self._basis.items()}
        return f"GradedModule(window=[{self.window.lo},{self.window.hi}], ranks={ranks})"

    # queries -------------------------------------------------------------
    def degrees(self) -> list[int]:
        return list(self._basis)

    def labels(self, q: int) -> tuple[str, ...]:
        return self._basis.get(q, ())

    def basis(self) -> dict[int, tuple[str, ...]]:
        return dict(self._basis)

    def dim(self, q: int) -> int | None:
        """Rank in degree ``q``; ``None`` when ``q`` is outside the window and unknown."""
        if q in self.window:
            return len(self._basis.get(q, ()))
        if q < self.window.lo:
            return 0 if self.bounded_below else None
        return 0 if self.bounded_above else None

    def keys(self, q: int | None = None) -> list[Key]:
        if q is not None:
            return [(q, i) for i in range(len(self._basis.get(q, ())))]
        return [(d, i) for d, labs in self._basis.items() for i in range(len(labs))]

    def label(self, key: Key) -> str:
        return self._basis[key[0]][key[1]]

    def key(self, q: int, label: str) -> Key:
        try:
            return (q, self._index[q][label])
        except KeyError:
            raise KeyError(f"no basis element {label!r} in degree {q}") from None

    def find(self, label: str) -> Key:
        hits = [(q, idx[label]) for q, idx in self._index.items() if label in idx]
        if len(hits) != 1:
            raise KeyError(f"label {label!r} occurs {len(hits)} times")
        return hits[0]

    def total_rank(self) -> int:
        return sum(len(l) for l in self._basis.values())

    def format_vector(self, vec: Mapping[Key, Scalar]) -> str:
        if not vec:
            return "0"
        parts = []
        for k in sorted(vec):
            c = vec[k]
            lab = self.label(k)
            parts.append(lab if c == 1 else (f"-{lab}" if c == -1 else f"{c}*{lab}"))
        return " + ".join(parts).replace("+ -", "- ")

    def truncated(self, window: TruncationWindow) -> "GradedModule":
        """Restriction to a smaller window (unknown outside it unless already zero)."""
        if window.lo < self.window.lo and not self.bounded_below:
            raise WindowError("cannot widen an unbounded window")
        if window.hi > self.window.hi and not self.bounded_above:
            raise WindowError("cannot widen an unbounded window")
        basis = {q: l for q, l in self._basis.items() if q in window}
        below = self.bounded_below and window.lo <= self.window.lo
        above = self.bounded_above and window.hi >= self.window.hi
        below = below or not any(q < window.lo for q in self._basis) and self.bounded_below
        above = above or not any(q > window.hi for q in self._basis) and self.bounded_above
        return GradedModule(self.ring, window, basis, below, above)


class TensorModule(GradedModule):
    """``U ⊗ V`` with basis pairs ordered by (degree of the left factor, indices)."""

    def __init__(self, left: GradedModule, right: GradedModule,
                 window: TruncationWindow | None = None) -> None:
        if left.ring != right.ring:
            raise ValueError("ring mismatch in tensor product")
        lo, hi, below, above = _tensor_window(left, right)
        if window is not None:
            if window.lo < lo and not below:
                raise WindowError("requested tensor window extends below the reliable range")
            if window.hi > hi and not above:
                raise WindowError("requested tensor window extends above the reliable range")
            below = below and window.lo <= lo
            above = above and window.hi >= hi
            lo, hi = window.lo, window.hi
        w = TruncationWindow(lo, hi)
        pairs: dict[int, list[tuple[Key, Key]]] = {}
        for p in left.degrees():
            for q in right.degrees():
                n = p + q
                if n in w:
                    lst = pairs.setdefault(n, [])
                    for i in range(len(left.labels(p))):
                        for j in range(len(right.labels(q))):
                            lst.append(((p, i), (q, j)))
        for n in pairs:
            pairs[n].sort(key=lambda pr: (pr[0][0], pr[0][1], pr[1][1]))
        basis = {n: [f"{left.label(a)}⊗{right.label(b)}" for a, b in lst] for n, lst in pairs.items()}
        _dedupe_labels(basis, pairs)
        super().__init__(left.ring, w, basis, below, above)
        self.left = left
        self.right = right
        self.pairs = pairs
        self.pair_index: dict[tuple[Key, Key], Key] = {
            pr: (n, i) for n, lst in pairs.items() for i, pr in enumerate(lst)}

    def pair(self, key: Key) -> tuple[Key, Key]:
        return self.pairs[key[0]][key[1]]

    def lookup(self, a: Key, b: Key) -> Key | None:
        return self.pair_index.get((a, b))


def _dedupe_labels(basis: dict[int, list[str]], pairs: Mapping[int, list[tuple[Key, Key]]]) -> None:
    for n, labs in basis.items():
        if len(set(labs)) != len(labs):
            basis[n] = [f"{lab}@{a[0]},{b[0]}" for lab, (a, b) in zip(labs, pairs[n])]


def _tensor_window(U: GradedModule, V: GradedModule) -> tuple[int, int, bool, bool]:
    """Largest window on which every degree of ``U ⊗ V`` is complete."""
    his = []
    if U.bounded_above and V.bounded_above:
        his.append(U.window.hi + V.window.hi)
    if not U.bounded_above:
        if not V.bounded_below:
            raise WindowError("tensor of modules unbounded on opposite sides")
        his.append(U.window.hi + V.window.lo)
    if not V.bounded_above:
        if not U.bounded_below:
            raise WindowError("tensor of modules unbounded on opposite sides")
        his.append(V.window.hi + U.window.lo)
    los = []
    if U.bounded_below and V.bounded_below:
        los.append(U.window.lo + V.window.lo)
    if not U.bounded_below:
        if not V.bounded_above:
            raise WindowError("tensor of modules unbounded on opposite sides")
        los.append(U.window.lo + V.window.hi)
    if not V.bounded_below:
        if not U.bounded_above:
            raise WindowError("tensor of modules unbounded on opposite sides")
        los.append(V.window.lo + U.window.hi)
    hi = min(his)
    lo = max(los)
    if lo > hi:
        raise WindowError("tensor product has an empty reliable window")
    return lo, hi, U.bounded_below and V.bounded_below, U.bounded_above and V.bounded_above


# --------------------------------------------------------------------------
# homogeneous maps


class HomogeneousMap:
    """Degree-``shift`` map stored as one exact matrix per source degree.

    ``blocks[q]`` maps ``basis(q)`` to ``basis(q + shift)``; degrees listed in
    ``unknown`` are not determined by the truncated data.  Any degree whose
    source or target rank is zero is implicitly a zero block.
    """

    def __init__(self, source: GradedModule, target: GradedModule, shift: int,
                 blocks: Mapping[int, ExactMatrix], unknown: Iterable[int] = ()) -> None:
        if source.ring != target.ring:
            raise ValueError("ring mismatch")
        self.source = source
        self.target = target
        self.shift = shift
        unknown = set(unknown)
        clean: dict[int, ExactMatrix] = {}
        for q in source.degrees():
            tdim = target.dim(q + shift)
            if tdim is None:
                unknown.add(q)
                continue
            if q in unknown:
                continue
            if tdim == 0:
                continue
            b = blocks.get(q)
            sdim = len(source.labels(q))
            if b is None:
                b = ExactMatrix.zeros(source.ring, tdim, sdim)
            if b.shape != (tdim, sdim):
                raise ValueError(f"block in degree {q} has shape {b.shape}, expected {(tdim, sdim)}")
            clean[q] = b
        for q in blocks:
            if q not in clean and q not in unknown and source.dim(q) not in (0, None) and target.dim(q + shift) not in (0,):
                raise ValueError(f"block given for degree {q} outside the source window")
        self.blocks = clean
        self.unknown = frozenset(q for q in unknown if source.dim(q))

    @property
    def ring(self) -> CoefficientRing:
        return self.source.ring

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, source: GradedModule, target: GradedModule, shift: int) -> "HomogeneousMap":
        return cls(source, target, shift, {})

    @classmethod
    def identity(cls, module: GradedModule) -> "HomogeneousMap":
        return cls(module, module, 0, {q: ExactMatrix.identity(module.ring, len(module.labels(q)))
                                       for q in module.degrees()})

    @classmethod
    def from_function(cls, source: GradedModule, target: GradedModule, shift: int,
                      fn: Callable[[Key], Mapping[Key, Scalar]],
                      degrees: Iterable[int] | None = None,
                      tolerant: bool = False) -> "HomogeneousMap":
        """Evaluate ``fn`` on every basis key; ``degrees`` restricts where it is known.

        With ``tolerant``, a ``WindowError`` raised by ``fn`` marks that degree unknown.
        """
        allowed = None if degrees is None else set(degrees)
        ring = source.ring
        blocks: dict[int, ExactMatrix] = {}
        unknown = set()
        for q in source.degrees():
            tq = q + shift
            tdim = target.dim(tq)
            if tdim is None or (allowed is not None and q not in allowed):
                unknown.add(q)
                continue
            if tdim == 0:
                continue
            cols = []
            try:
                values = [fn(key) for key in source.keys(q)]
            except WindowError:
                if not tolerant:
                    raise
                unknown.add(q)
                continue
            for value in values:
                col: dict[int, Scalar] = {}
                for (d, j), v in value.items():
                    if d != tq:
                        raise ValueError(f"value in degree {q} has a term in degree {d}, expected {tq}")
                    v = ring.reduce(v)
                    if v != 0:
                        col[j] = ring.reduce(col.get(j, 0) + v)
                cols.append({j: v for j, v in col.items() if v != 0})
            blocks[q] = ExactMatrix.from_columns(ring, tdim, cols)
        return cls(source, target, shift, blocks, unknown)

    # access -------------------------------------------------------------------
    def known(self, q: int) -> bool:
        return q not in self.unknown

    def block(self, q: int) -> ExactMatrix | None:
        if q in self.unknown:
            return None
        b = self.blocks.get(q)
        if b is not None:
            return b
        sdim = self.source.dim(q) or 0
        tdim = self.target.dim(q + self.shift) or 0
        return ExactMatrix.zeros(self.ring, tdim, sdim)

    def apply_key(self, key: Key) -> Vector:
        q, i = key
        if q in self.unknown:
            raise WindowError(f"map is not determined in degree {q}")
        b = self.blocks.get(q)
        if b is None:
            return {}
        tq = q + self.shift
        return {(tq, j): v for j, v in b.column(i).items()}

    def apply(self, vec: Mapping[Key, Scalar]) -> Vector:
        acc: Vector = {}
        for k, c in vec.items():
            if c == 0:
                continue
            vec_add_into(acc, self.apply_key(k), c)
        return vec_clean(acc, self.ring)

    # algebra --------------------------------------------------------------------
    def __matmul__(self, other: "HomogeneousMap") -> "HomogeneousMap":
        """Composite ``self ∘ other``."""
        if other.target != self.source:
            raise ValueError("module mismatch in composition")
        shift = self.shift + other.shift
        blocks: dict[int, ExactMatrix] = {}
        unknown = set()
        for q in other.source.degrees():
            if q in other.unknown:
                unknown.add(q)
                continue
            if self.target.dim(q + shift) is None:
                unknown.add(q)
                continue
            fb = other.blocks.get(q)
            if fb is None or fb.is_zero():
                continue
            mid = q + other.shift
            if mid in self.unknown:
                unknown.add(q)
                continue
            gb = self.blocks.get(mid)
            if gb is None:
                continue
            blocks[q] = gb @ fb
        return HomogeneousMap(other.source, self.target, shift, blocks, unknown)

    def _combine(self, other: "HomogeneousMap", coef: int) -> "HomogeneousMap":
        if other.source != self.source or other.target != self.target or other.shift != self.shift:
            raise ValueError("maps are not parallel")
        unknown = self.unknown | other.unknown
        blocks = {}
        for q in self.source.degrees():
            if q in unknown:
                continue
            a = self.blocks.get(q)
            b = other.blocks.get(q)
            if a is None and b is None:
                continue
            if a is None:
                blocks[q] = b.scale(coef)  # type: ignore[union-attr]
            elif b is None:
                blocks[q] = a
            else:
                blocks[q] = a + b if coef == 1 else a - b
        return HomogeneousMap(self.source, self.target, self.shift, blocks, unknown)

    def __add__(self, other: "HomogeneousMap") -> "HomogeneousMap":
        return self._combine(other, 1)

    def __sub__(self, other: "HomogeneousMap") -> "HomogeneousMap":
        return self._combine(other, -1)

    def __neg__(self) -> "HomogeneousMap":
        return self.scale(-1)

    def scale(self, c: object) -> "HomogeneousMap":
        return HomogeneousMap(self.source, self.target, self.shift,
                              {q: b.scale(c) for q, b in self.blocks.items()}, self.unknown)

    def with_unknown(self, degrees: Iterable[int]) -> "HomogeneousMap":
        return HomogeneousMap(self.source, self.target, self.shift, self.blocks,
                              set(self.unknown) | set(degrees))

    # comparison -----------------------------------------------------------------
    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks.values())

    def first_nonzero(self) -> tuple[int, str, str] | None:
        """``(source degree, source basis label, target basis label)`` of the first nonzero entry."""
        for q in sorted(self.blocks):
            ent = self.blocks[q].entries()
            if ent:
                cols = sorted(ent, key=lambda e: (e[1], e[0]))
                r, c, _ = cols[0]
                return q, self.source.label((q, c)), self.target.label((q + self.shift, r))
        return None

    def equals(self, other: "HomogeneousMap") -> bool:
        """Equality on all degrees where both maps are known."""
        return (self - other).is_zero()

    def known_degrees(self) -> list[int]:
        return [q for q in self.source.degrees() if q not in self.unknown]

    def __repr__(self) -> str:
        return f"HomogeneousMap(shift={self.shift}, known={self.known_degrees()}, unknown={sorted(self.unknown)})"


def tensor_maps(f: HomogeneousMap, g: HomogeneousMap, source: TensorModule,
                target: TensorModule) -> HomogeneousMap:
    """``(f ⊗ g)(x ⊗ y) = (-1)^{|g||x|} f(x) ⊗ g(y)``."""
    if source.left != f.source or source.right != g.source:
        raise ValueError("source factors do not match")
    if target.left != f.target or target.right != g.target:
        raise ValueError("target factors do not match")
    ring = source.ring
    unknown = set()
    shift = f.shift + g.shift

    def fn(key: Key) -> Vector:
        a, b = source.pair(key)
        s = sign(g.shift * a[0])
        fa = f.apply_key(a)
        gb = g.apply_key(b)
        out: Vector = {}
        for ka, va in fa.items():
            for kb, vb in gb.items():
                k = target.lookup(ka, kb)
                if k is None:
                    raise WindowError("tensor value falls outside the target window")
                out[k] = out.get(k, 0) + s * va * vb
        return vec_clean(out, ring)

    degrees = []
    for q in source.degrees():
        ok = True
        for a, b in source.pairs[q]:
            if not f.known(a[0]) or not g.known(b[0]):
                ok = False
                break
        if ok:
            degrees.append(q)
        else:
            unknown.add(q)
    return HomogeneousMap.from_function(source, target, shift, fn, degrees)


# --------------------------------------------------------------------------
# chain complexes


class ChainComplex:
    """A graded module with a differential of degree -1."""

    def __init__(self, module: GradedModule, d: HomogeneousMap) -> None:
        if d.source != module or d.target != module or d.shift != -1:
            raise ValueError("differential must be a degree -1 endomorphism of the module")
        self.module = module
        self.d = d

    @property
    def ring(self) -> CoefficientRing:
        return self.module.ring

    @property
    def window(self) -> TruncationWindow:
        return self.module.window

    @classmethod
    def from_blocks(cls, module: GradedModule, blocks: Mapping[int, ExactMatrix]) -> "ChainComplex":
        return cls(module, HomogeneousMap(module, module, -1, blocks))

    @classmethod
    def zero_differential(cls, module: GradedModule) -> "ChainComplex":
        return cls(module, HomogeneousMap.zero(module, module, -1))

    def d_squared_failure(self) -> tuple[int, str, str] | None:
        """First ``(degree, basis label, output label)`` where ``d∘d`` is nonzero."""
        return (self.d @ self.d).first_nonzero()

    def check(self) -> None:
        bad = self.d_squared_failure()
        if bad is not None:
            q, src, tgt = bad
            raise CompositionError(f"complex: d∘d ≠ 0 at degree {q}, basis {src}")

    def homology(self, window: TruncationWindow | None = None) -> dict[int, HomologyGroup]:
        return homology(self, window)

    def __repr__(self) -> str:
        return f"ChainComplex({self.module!r})"


def _incoming(X: ChainComplex, q: int) -> ExactMatrix | None:
    M = X.module
    dim_q = M.dim(q) or 0
    up = M.dim(q + 1)
    if up is None:
        return None
    if up == 0:
        return ExactMatrix.zeros(X.ring, dim_q, 0)
    return X.d.block(q + 1)


def _outgoing(X: ChainComplex, q: int) -> ExactMatrix | None:
    M = X.module
    dim_q = M.dim(q) or 0
    down = M.dim(q - 1)
    if down is None:
        return None
    if dim_q == 0:
        return ExactMatrix.zeros(X.ring, down, 0)
    return X.d.block(q)


def homology(X: ChainComplex, window: TruncationWindow | None = None) -> dict[int, HomologyGroup]:
    """Per-degree homology; degrees whose neighbours are unknown are flagged unreliable."""
    w = window or X.window
    out: dict[int, HomologyGroup] = {}
    ring = X.ring
    for q in w.degrees():
        dim_q = X.module.dim(q)
        if dim_q is None:
            raise WindowError(f"degree {q} lies outside the complex's window")
        d_in = _incoming(X, q)
        d_out = _outgoing(X, q)
        reliable = d_in is not None and d_out is not None
        if d_in is None:
            d_in = ExactMatrix.zeros(ring, dim_q, 0)
        if d_out is None:
            d_out = ExactMatrix.zeros(ring, 0, dim_q)
        try:
            g = subquotient_homology(d_in, d_out)
        except CompositionError as exc:
            raise CompositionError(f"homology: d∘d ≠ 0 at degree {q + 1}") from exc
        out[q] = HomologyGroup(g.free_rank, g.torsion, reliable)
    return out


def tensor(U: ChainComplex, V: ChainComplex, window: TruncationWindow | None = None) -> ChainComplex:
    """Tensor product with ``d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy``."""
    if U.ring != V.ring:
        raise ValueError("ring mismatch in tensor product")
    T = TensorModule(U.module, V.module, window)
    return ChainComplex(T, tensor_differential(T, U.d, V.d))


def tensor_differential(T: TensorModule, dU: HomogeneousMap, dV: HomogeneousMap) -> HomogeneousMap:
    ring = T.ring

    def fn(key: Key) -> Vector:
        a, b = T.pair(key)
        out: Vector = {}
        for ka, va in dU.apply_key(a).items():
            k = T.lookup(ka, b)
            if k is None:
                raise WindowError("differential leaves the tensor window")
            out[k] = out.get(k, 0) + va
        s = sign(a[0])
        for kb, vb in dV.apply_key(b).items():
            k = T.lookup(a, kb)
            if k is None:
                raise WindowError("differential leaves the tensor window")
            out[k] = out.get(k, 0) + s * vb
        return vec_clean(out, ring)

    degrees = [n for n in T.degrees()
               if T.dim(n - 1) is not None
               and all(dU.known(a[0]) and dV.known(b[0]) for a, b in T.pairs[n])]
    return HomogeneousMap.from_function(T, T, -1, fn, degrees)


def ground_ring_complex(ring: CoefficientRing, degree: int = 0, label: str = "1") -> ChainComplex:
    M = GradedModule(ring, TruncationWindow(degree, degree), {degree: [label]}, True, True)
    return ChainComplex.zero_differential(M)


def suspend(U: ChainComplex, times: int = 1) -> ChainComplex:
    """``(sU)_n = U_{n-1}`` with ``d(sx) = -s(dx)``; negative ``times`` desuspends."""
    X = U
    step = 1 if times >= 0 else -1
    for _ in range(abs(times)):
        X = _suspend_once(X, step)
    return X


def _suspend_once(U: ChainComplex, step: int) -> ChainComplex:
    M = U.module
    prefix = "s" if step == 1 else "s⁻¹"
    w = TruncationWindow(M.window.lo + step, M.window.hi + step)
    S = GradedModule(M.ring, w, {q + step: [f"{prefix}{lab}" for lab in M.labels(q)] for q in M.degrees()},
                     M.bounded_below, M.bounded_above)
    blocks = {q + step: (-b) for q, b in U.d.blocks.items()}
    return ChainComplex(S, HomogeneousMap(S, S, -1, blocks, {q + step for q in U.d.unknown}))


# --------------------------------------------------------------------------
# Hom complexes


class HomModule(GradedModule):
    """Degree-``r`` basis: elementary maps ``x ↦ y`` with ``|y| - |x| = r``."""

    def __init__(self, source: GradedModule, target: GradedModule,
                 window: TruncationWindow | None = None) -> None:
        if source.ring != target.ring:
            raise ValueError("ring mismatch")
        if not (target.bounded_above and target.bounded_below):
            raise WindowError("Hom complexes need a target bounded on both sides")
        if not source.bounded_below:
            raise WindowError("Hom complexes need a source bounded below")
        t_lo, t_hi = target.window.lo, target.window.hi
        s_lo, s_hi = source.window.lo, source.window.hi
        hi = t_hi - s_lo
        if source.bounded_above:
            lo = t_lo - s_hi
            below = True
        else:
            lo = t_hi - s_hi
            below = False
        if window is not None:
            if window.lo < lo and not below:
                raise WindowError(f"Hom window below {lo} is not determined by the truncated source")
            below = below and window.lo <= lo
            lo, hi = window.lo, window.hi
        if lo > hi:
            raise WindowError("window too small to represent any Hom degree")
        w = TruncationWindow(lo, hi)
        elems: dict[int, list[tuple[Key, Key]]] = {}
        for p in source.degrees():
            for q in target.degrees():
                r = q - p
                if r in w:
                    lst = elems.setdefault(r, [])
                    for i in range(len(source.labels(p))):
                        for j in range(len(target.labels(q))):
                            lst.append(((p, i), (q, j)))
        for r in elems:
            elems[r].sort()
        basis = {r: [f"{source.label(a)}↦{target.label(b)}" for a, b in lst] for r, lst in elems.items()}
        for r, labs in basis.items():
            if len(set(labs)) != len(labs):
                basis[r] = [f"{source.label(a)}@{a[0]}↦{target.label(b)}@{b[0]}" for a, b in elems[r]]
        super().__init__(source.ring, w, basis, below, True)
        self.hom_source = source
        self.hom_target = target
        self.elems = elems
        self.elem_index = {pr: (r, i) for r, lst in elems.items() for i, pr in enumerate(lst)}

    def vector_of(self, f: HomogeneousMap) -> Vector:
        """Coordinates of a homogeneous map in the elementary basis."""
        if f.source != self.hom_source or f.target != self.hom_target:
            raise ValueError("map does not belong to this Hom module")
        if f.shift not in self.window:
            raise WindowError(f"degree {f.shift} outside the Hom window")
        out: Vector = {}
        for q, b in f.blocks.items():
            for r, c, v in b.entries():
                out[self.elem_index[((q, c), (q + f.shift, r))]] = v
        return out

    def map_of(self, vec: Mapping[Key, Scalar], shift: int) -> HomogeneousMap:
        entries: dict[int, list[tuple[int, int, Scalar]]] = {}
        for (r, i), v in vec.items():
            if r != shift:
                raise ValueError("vector is not homogeneous of the requested degree")
            a, b = self.elems[r][i]
            entries.setdefault(a[0], []).append((b[1], a[1], v))
        S, T = self.hom_source, self.hom_target
        blocks = {}
        for q in S.degrees():
            tdim = T.dim(q + shift)
            if not tdim:
                continue
            blocks[q] = ExactMatrix.from_entries(S.ring, tdim, len(S.labels(q)), entries.get(q, []))
        return HomogeneousMap(S, T, shift, blocks)


def hom_differential_of_map(f: HomogeneousMap, dU: HomogeneousMap, dV: HomogeneousMap) -> HomogeneousMap:
    """``Dφ = dφ − (−1)^{|φ|} φd``."""
    return (dV @ f) - (f @ dU).scale(sign(f.shift))


def hom_complex(U: ChainComplex, V: ChainComplex, window: TruncationWindow | None = None) -> ChainComplex:
    """Complex of homogeneous maps ``U → V`` with differential ``Dφ = dφ − (−1)^{|φ|}φd``."""
    H = HomModule(U.module, V.module, window)
    ring = U.ring
    dU, dV = U.d, V.d

    def fn(key: Key) -> Vector:
        r = key[0]
        a, b = H.elems[r][key[1]]
        out: Vector = {}
        # d ∘ E(a→b) = Σ dV(b) coefficients, from a
        for kb, v in dV.apply_key(b).items():
            out[H.elem_index[(a, kb)]] = out.get(H.elem_index[(a, kb)], 0) + v
        # E(a→b) ∘ dU: sources x with a in dU(x)
        s = -sign(r)
        for x, v in _preimage_terms(dU, a):
            k = H.elem_index.get((x, b))
            if k is None:
                raise WindowError("Hom differential leaves the window")
            out[k] = out.get(k, 0) + s * v
        return vec_clean(out, ring)

    degrees = [r for r in H.degrees() if H.dim(r - 1) is not None]
    return ChainComplex(H, HomogeneousMap.from_function(H, H, -1, fn, degrees))


def _preimage_terms(f: HomogeneousMap, target_key: Key) -> list[tuple[Key, Scalar]]:
    """All ``(x, c)`` with ``f(x)`` containing ``c * target_key``."""
    q = target_key[0] - f.shift
    if q in f.unknown:
        raise WindowError(f"map unknown in degree {q}")
    b = f.blocks.get(q)
    if b is None:
        return []
    return [((q, c), v) for c, v in b.row(target_key[1]).items()]


# --------------------------------------------------------------------------
# direct sums and mapping cones


class DirectSumModule(GradedModule):
    def __init__(self, parts: Sequence[GradedModule], tags: Sequence[str] | None = None) -> None:
        ring = parts[0].ring
        # the sum is determined only where every summand is
        open_lo = [p.window.lo for p in parts if not p.bounded_below]
        open_hi = [p.window.hi for p in parts if not p.bounded_above]
        lo = max(open_lo) if open_lo else min(p.window.lo for p in parts)
        hi = min(open_hi) if open_hi else max(p.window.hi for p in parts)
        if lo > hi:
            raise WindowError("summands have disjoint windows")
        tags = tags or [str(i) for i in range(len(parts))]
        basis: dict[int, list[str]] = {}
        self.offsets: list[dict[int, int]] = []
        for p, t in zip(parts, tags):
            off = {}
            for q in range(lo, hi + 1):
                off[q] = len(basis.get(q, []))
                if q in p.window:
                    basis.setdefault(q, []).extend(f"{t}:{lab}" for lab in p.labels(q))
            self.offsets.append(off)
        super().__init__(ring, TruncationWindow(lo, hi), basis, not open_lo, not open_hi)
        self.parts = list(parts)

    def inject(self, part: int, key: Key) -> Key:
        return (key[0], self.offsets[part][key[0]] + key[1])

    def locate(self, key: Key) -> tuple[int, Key]:
        q, i = key
        for n in range(len(self.parts) - 1, -1, -1):
            off = self.offsets[n].get(q, 0)
            if i >= off and i - off < len(self.parts[n].labels(q)):
                return n, (q, i - off)
        raise KeyError(key)


def mapping_cone(f: HomogeneousMap, X: ChainComplex, Y: ChainComplex) -> ChainComplex:
    """Cone of a chain map ``f: X → Y``: degree n is ``Y_n ⊕ X_{n-1}``; ``d(y, sx) = (dy + f x, -s dx)``."""
    if f.shift != 0 or f.source != X.module or f.target != Y.module:
        raise ValueError("cone needs a degree-0 map X → Y")
    sX = suspend(X)
    S = DirectSumModule([Y.module, sX.module], ["y", "x"])

    def fn(key: Key) -> Vector:
        part, k = S.locate(key)
        out: Vector = {}
        if part == 0:
            for kk, v in Y.d.apply_key(k).items():
                out[S.inject(0, kk)] = v
        else:
            xk = (k[0] - 1, k[1])
            for kk, v in sX.d.apply_key(k).items():
                out[S.inject(1, kk)] = out.get(S.inject(1, kk), 0) + v
            for kk, v in f.apply_key(xk).items():
                out[S.inject(0, kk)] = out.get(S.inject(0, kk), 0) + v
        return vec_clean(out, X.ring)

    degrees = []
    for n in S.degrees():
        ok = S.dim(n - 1) is not None and Y.d.known(n) and sX.d.known(n) and f.known(n - 1)
        if ok:
            degrees.append(n)
    return ChainComplex(S, HomogeneousMap.from_function(S, S, -1, fn, degrees))


def is_quasi_isomorphism(f: HomogeneousMap, X: ChainComplex, Y: ChainComplex) -> bool:
    """True when the mapping cone is acyclic on every reliable degree."""
    C = mapping_cone(f, X, Y)
    return all(g.is_zero() for g in homology(C).values() if g.reliable)


def iter_terms(vec: Mapping[Key, Scalar]) -> Iterator[tuple[Key, Scalar]]:
    for k in sorted(vec):
        yield k, vec[k]
