"""Prime-field arithmetic, nested coset codes, and typical-codeword selection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import BudgetExceededError
from .typicality import is_relative_typical

__all__ = [
    "PrimeField",
    "NestedCosetCode",
    "EncoderState",
    "coset_sum",
    "select_typical",
    "field_vectors",
]


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_q with component-wise array arithmetic.

    Parameters
    ----------
    q : int
        Field order; must be prime.
    """

    q: int

    def __post_init__(self) -> None:
        if not _is_prime(self.q):
            raise ValueError(f"field order must be prime, got {self.q}")

    def add(self, a, b) -> np.ndarray:
        return np.mod(np.asarray(a) + np.asarray(b), self.q)

    def sub(self, a, b) -> np.ndarray:
        return np.mod(np.asarray(a) - np.asarray(b), self.q)

    def mul(self, a, b) -> np.ndarray:
        return np.mod(np.asarray(a) * np.asarray(b), self.q)

    def matmul(self, a, b) -> np.ndarray:
        """Matrix product over F_q (int64 internally; shapes follow numpy)."""
        return np.mod(np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64), self.q)

    def validate_array(self, arr, name: str = "array") -> np.ndarray:
        out = np.asarray(arr, dtype=np.int64)
        if out.size and (out.min() < 0 or out.max() >= self.q):
            raise ValueError(f"{name} has entries outside F_{self.q}")
        return out


def field_vectors(q: int, length: int, budget: int = 2**24) -> np.ndarray:
    """All ``q**length`` vectors over F_q as rows, in lexicographic order."""
    total = q**length
    if total > budget:
        raise BudgetExceededError(
            f"enumerating {q}^{length} = {total} vectors exceeds budget {budget}"
        )
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(total, dtype=np.int64)
    digits = np.empty((total, length), dtype=np.int64)
    for pos in range(length - 1, -1, -1):
        digits[:, pos] = idx % q
        idx //= q
    return digits


@dataclass(frozen=True)
class NestedCosetCode:
    """A nested coset code v(a, m) = a g_inner + m g_outer + dither over F_q.

    The inner generator rows span the coset containing a given message m;
    the outer rows index the cosets themselves.  ``k + l`` may exceed ``n``
    (overcomplete generators are allowed).

    Parameters
    ----------
    field : PrimeField
    n, k, l : int
        Blocklength, inner rows, outer rows.  All positive, k and l >= 0.
    g_inner : (k, n) int array
    g_outer : (l, n) int array
    dither : (n,) int array
    """

    field: PrimeField
    n: int
    k: int
    l: int
    g_inner: np.ndarray
    g_outer: np.ndarray
    dither: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 0 or self.l < 0:
            raise ValueError(f"invalid dimensions n={self.n} k={self.k} l={self.l}")
        gi = self.field.validate_array(self.g_inner, "g_inner")
        go = self.field.validate_array(self.g_outer, "g_outer")
        b = self.field.validate_array(self.dither, "dither")
        if gi.shape != (self.k, self.n):
            raise ValueError(f"g_inner shape {gi.shape} != ({self.k}, {self.n})")
        if go.shape != (self.l, self.n):
            raise ValueError(f"g_outer shape {go.shape} != ({self.l}, {self.n})")
        if b.shape != (self.n,):
            raise ValueError(f"dither shape {b.shape} != ({self.n},)")
        object.__setattr__(self, "g_inner", gi)
        object.__setattr__(self, "g_outer", go)
        object.__setattr__(self, "dither", b)

    def codeword(self, a, m) -> np.ndarray:
        """The word a g_inner + m g_outer + dither, mod q.

        ``a`` and ``m`` may be single vectors of lengths k, l or batches with
        matching leading dimensions.
        """
        a = np.atleast_1d(self.field.validate_array(a, "a"))
        m = np.atleast_1d(self.field.validate_array(m, "m"))
        if a.shape[-1] != self.k:
            raise ValueError(f"a has last dimension {a.shape[-1]}, expected k={self.k}")
        if m.shape[-1] != self.l:
            raise ValueError(f"m has last dimension {m.shape[-1]}, expected l={self.l}")
        word = self.field.matmul(a, self.g_inner) + self.field.matmul(m, self.g_outer)
        return np.mod(word + self.dither, self.field.q)

    def coset(self, m) -> np.ndarray:
        """All q**k words of the coset indexed by message ``m``, as rows."""
        a_all = field_vectors(self.field.q, self.k)
        m = np.asarray(m, dtype=np.int64)
        return self.codeword(a_all, np.broadcast_to(m, (a_all.shape[0], self.l)))

    def messages(self) -> np.ndarray:
        """All q**l messages as rows, in lexicographic order."""
        return field_vectors(self.field.q, self.l)

    def range_words(self, budget: int = 2**24) -> np.ndarray:
        """All distinct words v(a, m) over every (a, m) pair, as rows."""
        q = self.field.q
        total = q ** (self.k + self.l)
        if total > budget:
            raise BudgetExceededError(
                f"range enumeration of {total} label pairs exceeds budget {budget}"
            )
        am = field_vectors(q, self.k + self.l)
        words = self.codeword(am[:, : self.k], am[:, self.k :])
        return np.unique(words, axis=0)


def coset_sum(code_a: NestedCosetCode, code_b: NestedCosetCode) -> NestedCosetCode:
    """The sum code of two nested coset codes sharing generators.

    Both codes must agree in field, dimensions, and both generator matrices;
    only the dithers may differ.  The result keeps the common generators and
    adds the dithers, so its range is exactly the set of sums of words from
    the two inputs.
    """
    if code_a.field.q != code_b.field.q:
        raise ValueError("coset_sum requires codes over the same field")
    same_shape = (code_a.n, code_a.k, code_a.l) == (code_b.n, code_b.k, code_b.l)
    if not same_shape:
        raise ValueError("coset_sum requires codes with matching (n, k, l)")
    if not (
        np.array_equal(code_a.g_inner, code_b.g_inner)
        and np.array_equal(code_a.g_outer, code_b.g_outer)
    ):
        raise ValueError("coset_sum requires identical generator matrices")
    return NestedCosetCode(
        field=code_a.field,
        n=code_a.n,
        k=code_a.k,
        l=code_a.l,
        g_inner=code_a.g_inner,
        g_outer=code_a.g_outer,
        dither=code_a.field.add(code_a.dither, code_b.dither),
    )


@dataclass(frozen=True)
class EncoderState:
    """Result of typical-codeword selection for every message of a code.

    Attributes
    ----------
    code : NestedCosetCode
    pmf : ndarray
        Target letter distribution over F_q.
    delta : float
        Relative typicality slack used during selection.
    chosen : dict
        message tuple -> chosen inner index a (length-k ndarray).  Messages
        whose coset has no typical word get the all-zero sentinel.
    theta : dict
        message tuple -> number of typical words in the coset.
    failed : frozenset
        Messages with theta == 0 (encoding error flag).
    """

    code: NestedCosetCode
    pmf: np.ndarray
    delta: float
    chosen: dict
    theta: dict
    failed: frozenset

    def codeword_for(self, m) -> np.ndarray:
        """The transmitted word for message ``m`` (sentinel coset member if failed)."""
        key = tuple(int(x) for x in np.asarray(m).reshape(-1))
        return self.code.codeword(self.chosen[key], np.asarray(m))


def select_typical(
    code: NestedCosetCode,
    pmf,
    delta: float,
    rng: np.random.Generator,
    budget: int = 2**24,
) -> EncoderState:
    """Pick, for each message, a uniformly random typical word from its coset.

    Scans all q**(k+l) coset members (exact, no sampling).  A message whose
    coset contains no delta-typical word receives the all-zero inner index as
    a sentinel and is recorded in ``failed``.

    Parameters
    ----------
    code : NestedCosetCode
    pmf : array of length q
        Target letter distribution.
    delta : float
        Relative letter-frequency slack.
    rng : numpy Generator
        Source for the uniform choice among typical members.  The typical
        counts ``theta`` do not depend on it.
    budget : int
        Upper bound on q**(k+l) enumeration size.
    """
    q = code.field.q
    pmf = np.asarray(pmf, dtype=float)
    if pmf.shape != (q,):
        raise ValueError(f"pmf must have length {q}")
    if abs(pmf.sum() - 1.0) > 1e-9 or pmf.min() < 0:
        raise ValueError("pmf must be a probability vector")
    total = q ** (code.k + code.l)
    if total > budget:
        raise BudgetExceededError(
            f"typical-word scan of {total} coset members exceeds budget {budget}"
        )

    a_all = field_vectors(q, code.k)
    chosen: dict = {}
    theta: dict = {}
    failed = []
    for m in code.messages():
        words = code.codeword(a_all, np.broadcast_to(m, (a_all.shape[0], code.l)))
        freq = np.stack([(words == v).mean(axis=1) for v in range(q)], axis=1)
        mask = np.all(np.abs(freq - pmf) <= delta * pmf + 1e-12, axis=1)
        key = tuple(int(x) for x in m)
        count = int(mask.sum())
        theta[key] = count
        if count == 0:
            chosen[key] = np.zeros(code.k, dtype=np.int64)
            failed.append(key)
        else:
            pick = rng.integers(count)
            chosen[key] = a_all[np.flatnonzero(mask)[pick]].copy()
    return EncoderState(
        code=code,
        pmf=pmf,
        delta=delta,
        chosen=chosen,
        theta=theta,
        failed=frozenset(failed),
    )
