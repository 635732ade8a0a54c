"""Truncated isotypic decomposition of ``Lambda^i V* (x) S`` into the E^{ij}.

The lowest components E^{jj} are kernels of Y, the others are X-chains
``E^{ij} = X^{i-j} E^{jj}``.  All of X, Y and the projections preserve the
torus weight ``mu`` (see :func:`symspin.forms.weight`), and a weight block of
form degree ``i`` is a finite set of at most ``C(2l, i)`` basis keys.  So the
decomposition is computed block by block with small exact solves.

A block of level ``lambda = sum(mu)`` has polynomial degrees at most
``lambda + min(i, 2l - i)``, so it fits under the cap N exactly when that
bound (the actual maximum, in fact) is ``<= N``.  The guard band is the set of
blocks of level ``<= N - B``; with ``B >= min(i, 2l - i)`` every such block is
complete.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .forms import FormTerms, Key, RicciLikeTensor, SpinorForm, _X_raw, _Y_raw, op_Sigma, op_Theta
from .linalg import SpanSolver, SparseMatrix, Vector, kernel_basis, rank
from .results import FAIL, PASS, VACUOUS, CheckResult, form_to_json
from .scalars import ONE

Weight = Tuple[int, ...]

__all__ = [
    "XiIndex",
    "SpanningFailure",
    "InjectivityFailure",
    "ContainmentViolation",
    "Component",
    "WeightBlock",
    "IsotypicDecomposition",
    "block_keys",
    "weights_at_level",
    "lowest_component",
    "build_component",
    "kernel_dims_by_degree",
    "projections",
    "verify_neighbour_containment",
]


class SpanningFailure(RuntimeError):
    """A requested weight block does not fit under the polynomial cap."""

    def __init__(self, form_degree: int, mu: Weight, required: int, N: int):
        self.form_degree = form_degree
        self.weight = mu
        self.level = sum(mu)
        self.parity = (self.level + form_degree) % 2
        self.required = required
        self.N = N
        super().__init__(
            f"block (form degree {form_degree}, parity {self.parity}, level {self.level}, weight {mu}) "
            f"needs polynomial degree {required} > N={N}; raise N (--max-deg) to at least {required}")


class InjectivityFailure(RuntimeError):
    """X dropped rank on a lowest-component chain."""


class ContainmentViolation(AssertionError):
    """An operator image has a component in a slot it should never reach."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class XiIndex:
    """The index triangle of the decomposition for a given ``l``."""

    l: int

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("l must be positive")

    def m(self, i: int) -> int:
        if not 0 <= i <= 2 * self.l:
            raise ValueError(f"form degree {i} outside 0..{2 * self.l}")
        return i if i <= self.l else 2 * self.l - i

    def contains(self, i: int, j: int) -> bool:
        return 0 <= i <= 2 * self.l and 0 <= j <= self.m(i)

    def slots(self, i: int) -> Tuple[int, ...]:
        if not 0 <= i <= 2 * self.l:
            return ()
        return tuple(range(self.m(i) + 1))

    @property
    def pairs(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((i, j) for i in range(2 * self.l + 1) for j in self.slots(i))

    @property
    def plus(self) -> Tuple[Tuple[int, int], ...]:
        """Pairs off the diagonal ``(i, i), i <= l``."""
        return tuple(p for p in self.pairs if not (p[0] == p[1] and p[0] <= self.l))

    @property
    def minus(self) -> Tuple[Tuple[int, int], ...]:
        """Pairs off the antidiagonal ``(i, 2l - i), i >= l``."""
        return tuple(p for p in self.pairs if not (p[0] >= self.l and p[1] == 2 * self.l - p[0]))

    def column_sizes(self) -> Tuple[int, ...]:
        return tuple(len(self.slots(i)) for i in range(2 * self.l + 1))

    def neighbours(self, i: int, j: int) -> Tuple[int, ...]:
        """Slots ``k`` of form degree ``i + 1`` with ``|k - j| <= 1``."""
        return tuple(k for k in (j - 1, j, j + 1) if self.contains(i + 1, k))

    def arrows(self) -> Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...]:
        return tuple(((i, j), (i + 1, k)) for i, j in self.pairs if i < 2 * self.l
                     for k in self.neighbours(i, j))

    def adjacency(self) -> dict:
        return {
            "l": self.l,
            "nodes": [list(p) for p in self.pairs],
            "columns": list(self.column_sizes()),
            "arrows": [[list(a), list(b)] for a, b in self.arrows()],
        }


# --- weight blocks -----------------------------------------------------------

@lru_cache(maxsize=None)
def block_keys(l: int, i: int, mu: Weight) -> Tuple[Key, ...]:
    """All basis keys ``(I, alpha)`` of form degree ``i`` and weight ``mu``."""
    keys = []
    for I_ in combinations(range(2 * l), i):
        alpha = list(mu)
        for k in I_:
            if k < l:
                alpha[k] += 1
            else:
                alpha[k - l] -= 1
        if min(alpha) >= 0:
            keys.append((I_, tuple(alpha)))
    return tuple(keys)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def weights_at_level(l: int, i: int, level: int) -> Tuple[Weight, ...]:
    """Weights of level ``level`` with a nonempty form-degree-``i`` block."""
    if level < -l:
        return ()
    out = []
    for nu in _compositions(level + l, l):
        mu = tuple(x - 1 for x in nu)
        if block_keys(l, i, mu):
            out.append(mu)
    return tuple(out)


def min_level(l: int, i: int) -> int:
    return -min(i, l)


def _max_degree(keys: Sequence[Key]) -> int:
    return max(sum(a) for _, a in keys)


def _coords(terms: FormTerms, index: Dict[Key, int]) -> Vector:
    return {index[k]: c for k, c in terms.items()}


def _terms(vec: Vector, keys: Sequence[Key]) -> FormTerms:
    return {keys[n]: c for n, c in vec.items()}


def _y_matrix(l: int, j: int, mu: Weight) -> SparseMatrix:
    dom = block_keys(l, j, mu)
    cod = {k: n for n, k in enumerate(block_keys(l, j - 1, mu))}
    ent = {}
    for col, key in enumerate(dom):
        for k, x in _Y_raw({key: ONE}, l).items():
            ent[(cod[k], col)] = x
    return SparseMatrix(len(cod), len(dom), ent)


@lru_cache(maxsize=None)
def _lowest(l: int, j: int, mu: Weight) -> Tuple[FormTerms, ...]:
    """Basis of ``ker Y`` on the full weight block ``(j, mu)``."""
    keys = block_keys(l, j, mu)
    if j == 0:
        return tuple({k: ONE} for k in keys)
    return tuple(_terms(v, keys) for v in kernel_basis(_y_matrix(l, j, mu)))


@lru_cache(maxsize=None)
def _chain(l: int, i: int, j: int, mu: Weight) -> Tuple[FormTerms, ...]:
    """``X^{i-j}`` applied to the ker-Y basis of block ``(j, mu)``."""
    if i == j:
        return _lowest(l, j, mu)
    prev = _chain(l, i - 1, j, mu)
    out = tuple(_X_raw(t, l) for t in prev)
    if out:
        index = {k: n for n, k in enumerate(block_keys(l, i, mu))}
        r = rank(SparseMatrix.from_columns([_coords(t, index) for t in out], len(index)))
        if r != len(out):
            raise InjectivityFailure(
                f"X: E^({i - 1},{j}) -> form degree {i} has rank {r} < {len(out)} on weight {mu}")
    return out


class WeightBlock:
    """Exact decomposition of one complete weight block of form degree ``i``."""

    def __init__(self, l: int, i: int, mu: Weight, xi: XiIndex):
        self.l, self.i, self.mu = l, i, mu
        self.level = sum(mu)
        self.parity = (self.level + i) % 2
        self.keys = block_keys(l, i, mu)
        self.index = {k: n for n, k in enumerate(self.keys)}
        self.max_degree = _max_degree(self.keys)
        self.components: Dict[int, Tuple[FormTerms, ...]] = {}
        basis: List[Vector] = []
        self.slices: Dict[int, Tuple[int, int]] = {}
        for j in xi.slots(i):
            vecs = _chain(l, i, j, mu)
            self.components[j] = vecs
            start = len(basis)
            basis.extend(_coords(t, self.index) for t in vecs)
            self.slices[j] = (start, len(basis))
        self.basis = basis
        self.rank = rank(SparseMatrix.from_columns(basis, len(self.keys))) if basis else 0
        self._solver: Optional[SpanSolver] = None

    @property
    def dim(self) -> int:
        return len(self.keys)

    def dims(self) -> Dict[int, int]:
        return {j: len(v) for j, v in self.components.items()}

    def spans(self) -> bool:
        """Direct-sum rank accounting: sizes add up and the union is independent."""
        return len(self.basis) == self.dim == self.rank

    @property
    def solver(self) -> SpanSolver:
        if self._solver is None:
            if not self.spans():
                raise RuntimeError(f"weight block {self.mu} of form degree {self.i} does not decompose")
            self._solver = SpanSolver(self.basis, self.dim)
        return self._solver

    def split(self, terms: FormTerms) -> Dict[int, FormTerms]:
        """Components of a block element, keyed by slot ``j`` (zero slots omitted)."""
        c = self.solver.coordinates(_coords(terms, self.index))
        out: Dict[int, FormTerms] = {}
        for j, (a, b) in self.slices.items():
            acc: Vector = {}
            for n in range(a, b):
                if c[n]:
                    for r, x in self.basis[n].items():
                        y = acc.get(r)
                        y = c[n] * x if y is None else y + c[n] * x
                        if y:
                            acc[r] = y
                        else:
                            del acc[r]
            if acc:
                out[j] = _terms(acc, self.keys)
        return out

    def projection_matrix(self, j: int) -> SparseMatrix:
        """``p^{ij}`` on this block in the key basis."""
        cols = []
        for n in range(self.dim):
            part = self.split({self.keys[n]: ONE}).get(j, {})
            cols.append(_coords(part, self.index))
        return SparseMatrix.from_columns(cols, self.dim)


# --- truncated components by cap -----------------------------------------------

@dataclass
class Component:
    """Basis of a truncated E^{ij}, grouped by weight."""

    l: int
    i: int
    j: int
    N: int
    blocks: Dict[Weight, List[SpinorForm]] = field(default_factory=dict)
    spill: int = 0

    @property
    def vectors(self) -> List[SpinorForm]:
        return [v for mu in sorted(self.blocks) for v in self.blocks[mu]]

    def __len__(self) -> int:
        return sum(len(v) for v in self.blocks.values())

    def by_parity(self) -> Dict[int, List[SpinorForm]]:
        out: Dict[int, List[SpinorForm]] = {0: [], 1: []}
        for mu in sorted(self.blocks):
            out[(sum(mu) + self.i) % 2].extend(self.blocks[mu])
        return out

    def dims_by_level(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for mu, vs in self.blocks.items():
            out[sum(mu)] = out.get(sum(mu), 0) + len(vs)
        return dict(sorted(out.items()))


def _truncated_weights(l: int, i: int, N: int) -> Iterator[Weight]:
    """Weights whose form-degree-``i`` block meets ``Lambda^i (x) S_{<=N}``."""
    # a key of degree d has level <= d + min(i, l)
    for level in range(min_level(l, i), N + min(i, l) + 1):
        for mu in weights_at_level(l, i, level):
            if min(sum(a) for _, a in block_keys(l, i, mu)) <= N:
                yield mu


def lowest_component(l: int, j: int, N: int) -> Component:
    """Exact ``ker Y`` on ``Lambda^j (x) S_{<=N}``, grouped by weight (parity-homogeneous)."""
    if not 0 <= j <= l:
        raise ValueError(f"lowest components exist for 0 <= j <= l, got j={j}")
    comp = Component(l, j, j, N)
    for mu in _truncated_weights(l, j, N):
        keys = [k for k in block_keys(l, j, mu) if sum(k[1]) <= N]
        if j == 0:
            vecs = [{k: ONE} for k in keys]
        else:
            cod = {k: n for n, k in enumerate(block_keys(l, j - 1, mu))}
            ent = {}
            for col, key in enumerate(keys):
                for k, x in _Y_raw({key: ONE}, l).items():
                    ent[(cod[k], col)] = x
            M = SparseMatrix(len(cod), len(keys), ent)
            vecs = [_terms(v, keys) for v in kernel_basis(M)]
        if vecs:
            comp.blocks[mu] = [SpinorForm._wrap(l, j, t, N) for t in vecs]
    return comp


def build_component(l: int, i: int, j: int, N: int, B: int = 3) -> Component:
    """``X^{i-j}`` of the truncated lowest component, filtered to degree ``<= N``.

    Each X step is rank-checked; a drop on a guard-band block (level
    ``<= N - B``) raises :class:`InjectivityFailure`.
    """
    xi = XiIndex(l)
    if not xi.contains(i, j):
        raise ValueError(f"({i}, {j}) is not an index pair for l={l}")
    low = lowest_component(l, j, N)
    comp = Component(l, i, j, N)
    for mu, vecs in low.blocks.items():
        cur = [v.terms for v in vecs]
        for step in range(j + 1, i + 1):
            nxt = [_X_raw(t, l) for t in cur]
            index = {k: n for n, k in enumerate(block_keys(l, step, mu))}
            r = rank(SparseMatrix.from_columns([_coords(t, index) for t in nxt], len(index))) if nxt else 0
            if r != len(nxt) and sum(mu) <= N - B:
                raise InjectivityFailure(
                    f"X drops rank ({r} < {len(nxt)}) at form degree {step}, weight {mu}")
            cur = nxt
        kept = []
        for t in cur:
            if t and max(sum(a) for _, a in t) > N:
                comp.spill += 1
            else:
                kept.append(SpinorForm._wrap(l, i, t, N))
        if kept:
            comp.blocks[mu] = kept
    return comp


def kernel_dims_by_degree(l: int, j: int, N: int) -> Dict[int, Tuple[int, int]]:
    """For each degree ``d <= N``: ``(dim ker Y|_{Lambda^j (x) Sym_d}, dim - rank)``.

    The two entries come from an explicit kernel basis and from rank-nullity,
    so they double as a self-check.
    """
    from .forms import form_basis
    out = {}
    for d in range(N + 1):
        dom = [k for k in form_basis(l, j, d) if sum(k[1]) == d]
        cod_keys = sorted({k for key in dom for k in _Y_raw({key: ONE}, l)})
        cod = {k: n for n, k in enumerate(cod_keys)}
        ent = {}
        for col, key in enumerate(dom):
            for k, x in _Y_raw({key: ONE}, l).items():
                ent[(cod[k], col)] = x
        M = SparseMatrix(len(cod), len(dom), ent)
        out[d] = (len(kernel_basis(M)), len(dom) - rank(M))
    return out


# --- the decomposition object ---------------------------------------------------

class IsotypicDecomposition:
    """Lazily built E^{ij} decomposition with cap ``N`` and guard band ``B``.

    Blocks are cached; the object is otherwise immutable.
    """

    def __init__(self, l: int, N: int, B: int = 3):
        if l < 1 or N < 0 or B < 0:
            raise ValueError("need l >= 1, N >= 0, B >= 0")
        self.l, self.N, self.B = l, N, B
        self.xi = XiIndex(l)
        self._blocks: Dict[Tuple[int, Weight], WeightBlock] = {}

    # -- blocks
    def block(self, i: int, mu: Weight) -> WeightBlock:
        key = (i, tuple(mu))
        blk = self._blocks.get(key)
        if blk is None:
            keys = block_keys(self.l, i, key[1])
            if not keys:
                raise ValueError(f"empty block (form degree {i}, weight {mu})")
            top = _max_degree(keys)
            if top > self.N:
                raise SpanningFailure(i, key[1], top, self.N)
            blk = WeightBlock(self.l, i, key[1], self.xi)
            self._blocks[key] = blk
        return blk

    def guard_levels(self, i: int, extra: int = 0) -> range:
        """Levels of the guard band, shrunk by ``extra`` for operator checks."""
        return range(min_level(self.l, i), self.N - self.B - extra + 1)

    def guard_blocks(self, i: int, extra: int = 0) -> Iterator[WeightBlock]:
        for level in self.guard_levels(i, extra):
            for mu in weights_at_level(self.l, i, level):
                yield self.block(i, mu)

    def operator_top_level(self, i: int, shift: int, level_shift: int = 2) -> int:
        """Highest level whose images under an operator raising form degree by
        at most ``shift`` and level by at most ``level_shift`` stay in complete blocks."""
        l = self.l
        worst = max(min(r, 2 * l - r) for r in range(max(0, i), min(2 * l, i + shift) + 1))
        return self.N - max(self.B, worst + level_shift)

    def operator_band(self, i: int, shift: int, level_shift: int = 2) -> Iterator[WeightBlock]:
        """Guard-band blocks that are safe inputs for such an operator."""
        l = self.l
        top = self.operator_top_level(i, shift, level_shift)
        for level in range(min_level(l, i), top + 1):
            for mu in weights_at_level(l, i, level):
                yield self.block(i, mu)

    # -- accounting
    def rank_accounting(self, i: int) -> List[dict]:
        """Per (parity, level) totals on the guard band; ``ok`` when the sum is direct and spanning."""
        rows: Dict[Tuple[int, int], dict] = {}
        for blk in self.guard_blocks(i):
            row = rows.setdefault((blk.parity, blk.level), {
                "form_degree": i, "parity": blk.parity, "level": blk.level,
                "dim": 0, "rank": 0, "components": {j: 0 for j in self.xi.slots(i)}, "blocks": 0, "ok": True})
            row["dim"] += blk.dim
            row["rank"] += blk.rank
            row["blocks"] += 1
            for j, d in blk.dims().items():
                row["components"][j] += d
            row["ok"] = row["ok"] and blk.spans()
        return [rows[k] for k in sorted(rows, key=lambda t: (t[1], t[0]))]

    def dimension_table(self) -> List[dict]:
        """Guard-band dimensions of every E^{ij} by parity and level."""
        out = []
        for i in range(2 * self.l + 1):
            table: Dict[Tuple[int, int, int], int] = {}
            for blk in self.guard_blocks(i):
                for j, d in blk.dims().items():
                    k = (j, blk.parity, blk.level)
                    table[k] = table.get(k, 0) + d
            for (j, p, lev), d in sorted(table.items()):
                out.append({"i": i, "j": j, "parity": p, "level": lev, "dim": d})
        return out

    # -- projections
    def components(self, psi: SpinorForm) -> Dict[int, SpinorForm]:
        """All nonzero components ``p^{ij} psi``."""
        i = psi.r
        acc: Dict[int, FormTerms] = {}
        for mu, part in psi.blocks().items():
            for j, t in self.block(i, mu).split(part.terms).items():
                acc.setdefault(j, {}).update(t)
        return {j: SpinorForm._wrap(self.l, i, t, max(psi.cap, self.N)) for j, t in sorted(acc.items())}

    def project(self, j: int, psi: SpinorForm) -> SpinorForm:
        """``p^{ij} psi`` (zero for slots outside the triangle)."""
        i = psi.r
        if not self.xi.contains(i, j):
            return SpinorForm._wrap(self.l, i, {}, psi.cap)
        out: FormTerms = {}
        for mu, part in psi.blocks().items():
            out.update(self.block(i, mu).split(part.terms).get(j, {}))
        return SpinorForm._wrap(self.l, i, out, max(psi.cap, self.N))

    def component_basis(self, i: int, j: int, extra: int = 0) -> List[SpinorForm]:
        """Guard-band basis of E^{ij} in weight order."""
        return [SpinorForm._wrap(self.l, i, t, self.N)
                for blk in self.guard_blocks(i, extra) for t in blk.components.get(j, ())]


class ProjectionFamily:
    """The maps ``p^{ij}`` for a fixed form degree ``i``."""

    def __init__(self, decomp: IsotypicDecomposition, i: int):
        self.decomp, self.i = decomp, i
        self.slots = decomp.xi.slots(i)

    def __call__(self, j: int, psi: SpinorForm) -> SpinorForm:
        if psi.r != self.i:
            raise ValueError(f"expected form degree {self.i}, got {psi.r}")
        return self.decomp.project(j, psi)

    def matrices(self, mu: Weight) -> Dict[int, SparseMatrix]:
        blk = self.decomp.block(self.i, mu)
        return {j: blk.projection_matrix(j) for j in self.slots}


def projections(decomp: IsotypicDecomposition, i: int) -> ProjectionFamily:
    """Projection family on form degree ``i``; checks guard-band spanning first."""
    for blk in decomp.guard_blocks(i):
        if not blk.spans():
            raise SpanningFailure(i, blk.mu, blk.max_degree, decomp.N)
    return ProjectionFamily(decomp, i)


# --- operator containment ---------------------------------------------------------

def _forbidden(xi: XiIndex, target_degree: int, j: int) -> Tuple[int, ...]:
    return tuple(k for k in xi.slots(target_degree) if abs(k - j) > 1)


def verify_neighbour_containment(decomp: IsotypicDecomposition, i: int, j: int, sigma: RicciLikeTensor,
                 vectors: Optional[Iterable[SpinorForm]] = None) -> CheckResult:
    """Sigma and Theta move E^{ij} only to neighbouring slots.

    Sigma lands in form degree ``i + 1``, Theta stays in form degree ``i``;
    forbidden slots are those at distance ``>= 2`` from ``j``.  By default
    every basis vector of E^{ij} on the operator band is checked.
    """
    xi = decomp.xi
    if not xi.contains(i, j):
        raise ValueError(f"({i}, {j}) is not an index pair")
    name = f"neighbour-containment({i},{j})"
    anchor = "Sigma and Theta map E^{ij} into the slots j-1, j, j+1 (form degrees i+1 and i)"
    forb_s = _forbidden(xi, i + 1, j) if i < 2 * xi.l else ()
    forb_t = _forbidden(xi, i, j)
    if not forb_s and not forb_t:
        return CheckResult(name, anchor, VACUOUS, details={"reason": "no forbidden slot"})
    if vectors is None:
        vectors = [SpinorForm._wrap(decomp.l, i, t, decomp.N)
                   for blk in decomp.operator_band(i, shift=1) for t in blk.components.get(j, ())]
    S, T = op_Sigma(sigma), op_Theta(sigma)
    checked = 0
    for psi in vectors:
        checked += 1
        for op, forb in ((S, forb_s), (T, forb_t)):
            if not forb:
                continue
            parts = decomp.components(op(psi))
            bad = [k for k in forb if k in parts]
            if bad:
                return CheckResult(name, anchor, FAIL, witness={
                    "operator": op.name, "slot": bad[0], "psi": form_to_json(psi),
                    "component": form_to_json(parts[bad[0]])},
                    dims={"checked": checked})
    status = PASS if checked else VACUOUS
    return CheckResult(name, anchor, status, dims={"checked": checked},
                       details={"forbidden_sigma": list(forb_s), "forbidden_theta": list(forb_t),
                                "sigma_zero": sigma.is_zero()})
