"""k-average-free integer sets built from constant-norm lattice shells.

A set A is k-average-free when no multiset x_1..x_k of its elements that is
not all-equal sums to k*xbar for any xbar in A. The construction partitions
the cube [p]^d by squared norm, takes a largest shell, and maps its vectors
to integers digit-wise in base q = (k+1)p. Sums of up to k digits never
carry, so an average relation between encoded values would force the same
relation between shell vectors, which a strictly convex norm forbids.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import BudgetError, ConstructionViolation, InputError

DEFAULT_TUPLE_BUDGET = 10**8


@dataclass(frozen=True)
class ConstructionParams:
    """Parameter block threaded through every stage and manifest.

    Stage-independent fields are set on creation; Delta, ell and D are filled
    in by the stage that determines them. epsilon/delta are exact rationals
    when present.
    """

    k: int
    p: int | None = None
    d: int | None = None
    epsilon: Fraction | None = None
    delta: Fraction | None = None
    q: int | None = None
    N: int | None = None
    r_star: int | None = None
    Delta: int | None = None
    ell: int | None = None
    D: int | None = None
    fixture: bool = False
    advisory_k: int | None = None
    avgfree_verified: bool = False
    flags: tuple[str, ...] = field(default_factory=tuple)

    def validate(self) -> None:
        if self.k < 1:
            raise InputError(f"k must be >= 1, got {self.k}")
        if self.p is not None:
            if self.p < 2:
                raise InputError(f"p must be >= 2, got {self.p}")
            if self.q is not None and self.q != (self.k + 1) * self.p:
                raise ConstructionViolation("q != (k+1)*p")
        if self.d is not None and self.d < 1:
            raise InputError(f"d must be >= 1, got {self.d}")
        if self.q is not None and self.d is not None and self.N is not None:
            if self.N != self.q**self.d:
                raise ConstructionViolation("N != q^d")
        if self.epsilon is not None:
            if not 0 < self.epsilon <= 1:
                raise InputError(f"epsilon must be in (0, 1], got {self.epsilon}")
            if self.d is not None and self.d != math.ceil(3 / self.epsilon):
                raise ConstructionViolation("d != ceil(3/epsilon)")
            if self.delta is not None and self.delta != Fraction(1, 2 * self.d * self.d):
                raise ConstructionViolation("delta != 1/(2 d^2)")
        if self.Delta is not None and self.ell is not None:
            if self.ell != 3 * self.Delta:
                raise ConstructionViolation("ell != 3*Delta")
            if self.D is not None and self.D != self.Delta * self.ell + self.Delta - 1:
                raise ConstructionViolation("D != Delta*ell + (Delta-1)")

    def with_stage(self, **kw) -> "ConstructionParams":
        out = replace(self, **kw)
        out.validate()
        return out

    def to_json_obj(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, tuple):
                return list(v)
            return v

        return {k: enc(v) for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class AvgFreeSet:
    """Sorted k-average-free subset of [1, universe_N]."""

    universe_N: int
    k: int
    elements: np.ndarray
    provenance: dict

    def __post_init__(self):
        elems = np.asarray(self.elements, dtype=np.int64)
        object.__setattr__(self, "elements", elems)
        if elems.size == 0:
            raise InputError("empty set")
        if (np.diff(elems) <= 0).any():
            raise InputError("elements must be strictly increasing")
        if elems[0] < 1 or elems[-1] > self.universe_N:
            raise InputError("elements must lie in [1, N]")
        if self.k < 1:
            raise InputError(f"k must be >= 1, got {self.k}")

    def to_json_obj(self) -> dict:
        prov = self.provenance
        return {
            "N": self.universe_N,
            "k": self.k,
            "p": prov.get("p"),
            "d": prov.get("d"),
            "r_star": prov.get("r_star"),
            "elements": [int(x) for x in self.elements],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "AvgFreeSet":
        prov = {k: obj.get(k) for k in ("p", "d", "r_star") if obj.get(k) is not None}
        if not prov:
            prov = {"manual": True}
        return cls(int(obj["N"]), int(obj["k"]), np.array(obj["elements"], dtype=np.int64), prov)


def build_shell(p: int, d: int) -> tuple[int, np.ndarray]:
    """Largest constant-squared-norm slice of [p]^d, smallest norm on ties.

    Returns (r_star, shell) with shell as an (S, d) array in lexicographic
    row order.
    """
    if p < 1 or d < 1:
        raise InputError(f"need p >= 1 and d >= 1, got p={p}, d={d}")
    vectors = np.array(list(itertools.product(range(1, p + 1), repeat=d)), dtype=np.int64)
    norms = (vectors**2).sum(axis=1)
    counts = np.bincount(norms)
    r_star = int(np.argmax(counts))  # argmax returns the first, i.e. smallest, maximizer
    return r_star, vectors[norms == r_star]


def encode_vector(v, k: int, p: int) -> int:
    """Digit encoding sum_j v_j * q^(j-1) with q = (k+1)p.

    Base q leaves headroom for k-fold digit sums (k*p < q), so encoding
    commutes with summing up to k vectors; that carry-freeness is what the
    average-freeness proof leans on.
    """
    arr = np.asarray(v, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("vector must be a nonempty 1-d sequence")
    if (arr < 1).any() or (arr > p).any():
        raise InputError(f"coordinates must lie in [1, {p}]")
    q = (k + 1) * p
    return int(sum(int(c) * q**j for j, c in enumerate(arr)))


def build_avgfree(p: int, d: int, k: int, size_cap: int | None = None) -> AvgFreeSet:
    if p < 2 or d < 1 or k < 1:
        raise InputError(f"need p >= 2, d >= 1, k >= 1, got p={p}, d={d}, k={k}")
    r_star, shell = build_shell(p, d)
    q = (k + 1) * p
    powers = q ** np.arange(d, dtype=np.int64)
    encoded = shell @ powers
    elements = np.unique(encoded)
    if len(elements) != len(shell):
        raise ConstructionViolation("digit encoding collided on the shell")
    if size_cap is not None:
        elements = elements[:size_cap]
    return AvgFreeSet(
        universe_N=int(q**d),
        k=k,
        elements=elements,
        provenance={"p": p, "d": d, "r_star": r_star, "encoding": f"digits base {q}"},
    )


def verify_avgfree(
    a: AvgFreeSet,
    mode: str = "exhaustive",
    trials: int = 10_000,
    seed: int = 0,
    budget: int = DEFAULT_TUPLE_BUDGET,
) -> list[tuple[tuple[int, ...], int]]:
    """Search for violations; empty list means none found.

    Exhaustive mode enumerates all k-multisets (sums are permutation
    invariant, so multisets cover all tuples) and refuses when the k-tuple
    count |A|^k exceeds the budget. Sampled mode draws uniform k-tuples.
    Each violation is (offending multiset, the element equal to its mean).
    """
    elems = a.elements
    k = a.k
    elem_set = set(int(x) for x in elems)
    violations: list[tuple[tuple[int, ...], int]] = []

    def check(tup) -> None:
        if all(t == tup[0] for t in tup[1:]):
            return
        s = int(sum(tup))
        if s % k == 0 and s // k in elem_set:
            violations.append((tuple(int(t) for t in tup), s // k))

    if mode == "exhaustive":
        needed = len(elems) ** k
        if needed > budget:
            raise BudgetError(
                f"exhaustive verification needs |A|^k = {needed} tuples, "
                f"over the budget of {budget}; raise the budget or sample"
            )
        for tup in itertools.combinations_with_replacement(elems.tolist(), k):
            check(tup)
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        draws = rng.integers(0, len(elems), size=(trials, k))
        for row in draws:
            check(tuple(int(elems[i]) for i in row))
    else:
        raise InputError(f"unknown mode {mode!r}")
    return violations
