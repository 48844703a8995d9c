"""Chain families for tests and the CLI, and a trajectory sampler.

Random families draw small integer weights from numpy's PCG64 generator
(``numpy.random.default_rng(seed)``) and normalize them as rationals, so a
recipe realizes to the same exact kernel on every platform.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .backend import format_scalar, to_fraction
from .chain_core import MarkovKernel, as_measure, is_conservative_kernel
from .errors import BadParameter, EmptySample, NonConservativeKernel

RNG_ALGORITHM = "PCG64"
KINDS = ("identity", "cycle", "two_state", "birth_death", "block_diagonal",
         "random_stochastic", "random_reversible", "random_substochastic")
_SEED_MASK = (1 << 64) - 1


def make_rng(seed) -> np.random.Generator:
    """PCG64 stream for any 64-bit seed (negative seeds are taken mod 2**64)."""
    return np.random.Generator(np.random.PCG64(int(seed) & _SEED_MASK))


def _prob(value, name) -> Fraction:
    try:
        v = to_fraction(value)
    except (TypeError, ValueError) as exc:
        raise BadParameter(f"{name}: {exc}") from None
    if not 0 <= v <= 1:
        raise BadParameter(f"{name} must lie in [0, 1], got {value!r}")
    return v


def _size(value, name="n") -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise BadParameter(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ChainRecipe:
    """A chain family and its parameters, e.g. ``ChainRecipe("two_state", {"a": "0.4", "b": "0.2"})``."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadParameter(f"unknown recipe kind {self.kind!r}")

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, ChainRecipe):
                return v.to_dict()
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, Fraction):
                return format_scalar(v)
            return v
        return {"kind": self.kind, **{key: enc(v) for key, v in self.params.items()}}

    @classmethod
    def from_dict(cls, data: dict) -> "ChainRecipe":
        if not isinstance(data, dict) or "kind" not in data:
            raise BadParameter("recipe must be an object with a 'kind' field")
        params = {key: v for key, v in data.items() if key != "kind"}
        if data["kind"] == "block_diagonal":
            params["blocks"] = [cls.from_dict(b) for b in params.get("blocks", [])]
        return cls(data["kind"], params)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ChainRecipe":
        return cls.from_dict(json.loads(text))


def identity(n):
    return ChainRecipe("identity", {"n": n})


def cycle(n, clockwise=1):
    return ChainRecipe("cycle", {"n": n, "clockwise": clockwise})


def two_state(a, b):
    return ChainRecipe("two_state", {"a": a, "b": b})


def birth_death(n, up, down):
    return ChainRecipe("birth_death", {"n": n, "up": list(up), "down": list(down)})


def block_diagonal(*blocks):
    return ChainRecipe("block_diagonal", {"blocks": list(blocks)})


def random_stochastic(n, seed):
    return ChainRecipe("random_stochastic", {"n": n, "seed": seed})


def random_reversible(n, seed, sparsity=0.5):
    return ChainRecipe("random_reversible", {"n": n, "seed": seed, "sparsity": sparsity})


def random_substochastic(n, seed, leak=0.5):
    return ChainRecipe("random_substochastic", {"n": n, "seed": seed, "leak": leak})


def _normalize_rows(w):
    return [[Fraction(int(v), int(sum(row))) for v in row] for row in w]


def _reversible_weights(n, rng, sparsity):
    w = np.zeros((n, n), dtype=np.int64)
    for x in range(n):
        w[x, x] = rng.integers(0, 10)
        for y in range(x + 1, n):
            keep = rng.random() >= sparsity
            v = rng.integers(1, 10)
            if keep:
                w[x, y] = w[y, x] = v
    for x in range(n):
        if w[x].sum() == 0:
            w[x, x] = 1
    return w


def realize(recipe: ChainRecipe):
    """Build ``(kernel, known_measure)`` for a recipe.

    ``known_measure`` is a measure the kernel is reversible for, when the
    family provides one in closed form, else ``None``. Kernels are exact.
    """
    kind, prm = recipe.kind, recipe.params
    try:
        return _REALIZERS[kind](prm)
    except KeyError as exc:
        raise BadParameter(f"{kind}: missing parameter {exc.args[0]!r}") from None


def _realize_identity(prm):
    n = _size(prm["n"])
    p = [[Fraction(int(x == y)) for y in range(n)] for x in range(n)]
    return MarkovKernel(p, exact=True), np.array([Fraction(1, n)] * n, dtype=object)


def _realize_cycle(prm):
    n = _size(prm["n"])
    q = _prob(prm.get("clockwise", 1), "clockwise")
    p = [[Fraction(0)] * n for _ in range(n)]
    for x in range(n):
        p[x][(x + 1) % n] += q
        p[x][(x - 1) % n] += 1 - q
    known = None
    if n <= 2 or q == Fraction(1, 2):
        known = np.array([Fraction(1, n)] * n, dtype=object)
    return MarkovKernel(p, exact=True), known


def _realize_two_state(prm):
    a, b = _prob(prm["a"], "a"), _prob(prm["b"], "b")
    p = [[1 - a, a], [b, 1 - b]]
    if a + b == 0:
        known = np.array([Fraction(1, 2)] * 2, dtype=object)
    else:
        known = np.array([b / (a + b), a / (a + b)], dtype=object)
    return MarkovKernel(p, exact=True), known


def _realize_birth_death(prm):
    n = _size(prm["n"])
    up = [_prob(v, "up") for v in prm["up"]]
    down = [_prob(v, "down") for v in prm["down"]]
    if len(up) != n - 1 or len(down) != n - 1:
        raise BadParameter("birth_death needs n-1 up and n-1 down probabilities")
    p = [[Fraction(0)] * n for _ in range(n)]
    for x in range(n):
        out = Fraction(0)
        if x < n - 1:
            p[x][x + 1] = up[x]
            out += up[x]
        if x > 0:
            p[x][x - 1] = down[x - 1]
            out += down[x - 1]
        if out > 1:
            raise BadParameter(f"up + down exceeds 1 at state {x}")
        p[x][x] = 1 - out
    known = None
    if all(v > 0 for v in up + down):
        w = [Fraction(1)]
        for x in range(n - 1):
            w.append(w[-1] * up[x] / down[x])
        total = sum(w)
        known = np.array([v / total for v in w], dtype=object)
    return MarkovKernel(p, exact=True), known


def _realize_block_diagonal(prm):
    blocks = prm["blocks"]
    if not blocks:
        raise BadParameter("block_diagonal needs at least one block")
    parts = [realize(b if isinstance(b, ChainRecipe) else ChainRecipe.from_dict(b)) for b in blocks]
    n = sum(k.n for k, _ in parts)
    p = [[Fraction(0)] * n for _ in range(n)]
    known = [] if all(m is not None for _, m in parts) else None
    off = 0
    for k, m in parts:
        for x in range(k.n):
            for y in range(k.n):
                p[off + x][off + y] = k.p[x, y]
        if known is not None:
            # size-proportional mixture of the block measures
            known.extend(Fraction(k.n, n) * v for v in m)
        off += k.n
    if known is not None:
        known = np.array(known, dtype=object)
    return MarkovKernel(p, exact=True), known


def _realize_random_stochastic(prm):
    n = _size(prm["n"])
    rng = make_rng(prm["seed"])
    w = rng.integers(0, 10, size=(n, n))
    for x in range(n):
        if w[x].sum() == 0:
            w[x, rng.integers(0, n)] = 1
    return MarkovKernel(_normalize_rows(w), exact=True), None


def _realize_random_reversible(prm):
    n = _size(prm["n"])
    sparsity = float(prm.get("sparsity", 0.5))
    if not 0 <= sparsity <= 1:
        raise BadParameter(f"sparsity must lie in [0, 1], got {sparsity}")
    rng = make_rng(prm["seed"])
    w = _reversible_weights(n, rng, sparsity)
    W = w.sum(axis=1)
    m = np.array([Fraction(int(v), int(W.sum())) for v in W], dtype=object)
    return MarkovKernel(_normalize_rows(w), exact=True), m


def _realize_random_substochastic(prm):
    n = _size(prm["n"])
    leak = _prob(prm.get("leak", Fraction(1, 2)), "leak")
    rng = make_rng(prm["seed"])
    w = _reversible_weights(n, rng, float(prm.get("sparsity", 0.5)))
    leaky = rng.random(n) < 0.5
    if not leaky.any():
        leaky[rng.integers(0, n)] = True
    p = _normalize_rows(w)
    for x in range(n):
        if leaky[x]:
            p[x] = [v * (1 - leak) for v in p[x]]
    return MarkovKernel(p, exact=True), None


_REALIZERS = {
    "identity": _realize_identity,
    "cycle": _realize_cycle,
    "two_state": _realize_two_state,
    "birth_death": _realize_birth_death,
    "block_diagonal": _realize_block_diagonal,
    "random_stochastic": _realize_random_stochastic,
    "random_reversible": _realize_random_reversible,
    "random_substochastic": _realize_random_substochastic,
}


def random_corpus(n, count, seed) -> list[ChainRecipe]:
    """A deterministic mix of conservative families of size ``n``: random
    stochastic, random reversible, two-block reversible and cycles whose
    clockwise probability runs through 0, 1/4, 1/2, 3/4, 1."""
    out = []
    for i in range(count):
        s = (seed + i) & _SEED_MASK
        family = i % 4
        if family == 0:
            out.append(random_stochastic(n, s))
        elif family == 1:
            out.append(random_reversible(n, s))
        elif family == 2 and n >= 2:
            half = n // 2
            out.append(block_diagonal(random_reversible(half, s), random_reversible(n - half, s + 1)))
        else:
            out.append(cycle(n, Fraction((i // 4) % 5, 4)))
    return out


class _Absorbed:
    __slots__ = ()

    def __repr__(self):
        return "ABSORBED"


ABSORBED = _Absorbed()


def sample_step(k: MarkovKernel, x: int, rng: np.random.Generator):
    """One step from ``x``: a state, or ``ABSORBED`` with the row's missing mass."""
    u = rng.random()
    acc = 0.0
    for y, prob in enumerate(k.p[x]):
        acc += float(prob)
        if u < acc:
            return y
    return ABSORBED


@dataclass(frozen=True)
class EmpiricalJoint:
    counts: np.ndarray
    total: int

    def frequencies(self) -> np.ndarray:
        return self.counts / self.total


def empirical_sigma(k: MarkovKernel, m, N: int, rng: np.random.Generator) -> EmpiricalJoint:
    """Tally ``N`` independent pairs ``x0 ~ m``, ``x1 ~ p(x0, .)``."""
    if not is_conservative_kernel(k):
        raise NonConservativeKernel("sampling pairs needs a conservative kernel")
    if N < 1:
        raise BadParameter("N must be positive")
    m = np.array([float(v) for v in as_measure(k, m)])
    m /= m.sum()
    n = k.n
    x0 = rng.choice(n, size=N, p=m)
    counts = np.zeros((n, n), dtype=np.int64)
    for x in range(n):
        idx = np.flatnonzero(x0 == x)
        if idx.size == 0:
            continue
        row = np.array([float(v) for v in k.p[x]])
        x1 = rng.choice(n, size=idx.size, p=row / row.sum())
        np.add.at(counts[x], x1, 1)
    return EmpiricalJoint(counts, N)


def symmetry_statistic(e: EmpiricalJoint) -> float:
    """``max_{x<y} |counts(x,y) - counts(y,x)| / N``."""
    if e.total <= 0:
        raise EmptySample("no samples")
    diff = np.abs(e.counts - e.counts.T)
    return float(diff.max()) / e.total
