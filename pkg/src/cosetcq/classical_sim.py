"""Monte Carlo simulation of the binary classical interference channel.

The channel is the commuting worked example: receiver 1 sees
x1 + v2 + v3 + noise(delta1), receivers 2 and 3 see their own word through
noise(delta).  Decoders are exhaustive typicality (or minimum-distance)
searches; receiver 1 searches the coset-sum code's range instead of the
product of the two senders' codebooks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .field_codes import NestedCosetCode, coset_sum, field_vectors, select_typical
from .regions import conv, hb

__all__ = [
    "ClassicalIcInstance",
    "SimReport",
    "simulate",
    "simulate_independent",
    "capacity_report",
    "wilson_interval",
]


def _popcount(arr: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr)
    # fallback: byte-wise lookup
    lut = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)
    bytes_view = arr.astype(np.uint64).view(np.uint8).reshape(arr.shape + (8,))
    return lut[bytes_view].sum(axis=-1).astype(np.int64)


def _pack_bits(words: np.ndarray) -> np.ndarray:
    """Pack rows of 0/1 ints (length <= 63) into uint64 masks."""
    n = words.shape[-1]
    weights = (1 << np.arange(n, dtype=np.uint64))
    return (words.astype(np.uint64) * weights).sum(axis=-1)


def wilson_interval(errors: int, trials: int, z: float = 1.96) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    spread = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return float(max(0.0, center - spread)), float(min(1.0, center + spread))


@dataclass(frozen=True)
class ClassicalIcInstance:
    """One simulated configuration of the classical 3-to-1 channel.

    Parameters
    ----------
    delta1, delta : float
        Flip biases at receiver 1 and at receivers 2, 3.
    tau : float
        Per-word Hamming weight budget for sender 1 (fraction of n).
    n : int
        Blocklength (at most 63 so words pack into one machine word).
    code2, code3 : NestedCosetCode
        Binary nested coset codes sharing generator matrices.
    codebook1 : tuple
        Sender-1 words as int arrays; every word must respect ``tau``.
    """

    delta1: float
    delta: float
    tau: float
    n: int
    code2: NestedCosetCode
    code3: NestedCosetCode
    codebook1: tuple

    def __post_init__(self) -> None:
        for name, val in (("delta1", self.delta1), ("delta", self.delta)):
            if not 0.0 <= val <= 0.5:
                raise ValueError(f"{name} must lie in [0, 0.5], got {val}")
        if self.n < 1 or self.n > 63:
            raise ValueError(f"blocklength must lie in [1, 63], got {self.n}")
        for code in (self.code2, self.code3):
            if code.field.q != 2:
                raise ValueError("only binary codes are simulated")
            if code.n != self.n:
                raise ValueError("code blocklength does not match the instance")
        if not (
            np.array_equal(self.code2.g_inner, self.code3.g_inner)
            and np.array_equal(self.code2.g_outer, self.code3.g_outer)
        ):
            raise ValueError("sender 2/3 codes must share generator matrices")
        words = tuple(np.asarray(w, dtype=np.int64) for w in self.codebook1)
        if not words:
            raise ValueError("sender-1 codebook is empty")
        for w in words:
            if w.shape != (self.n,) or w.min() < 0 or w.max() > 1:
                raise ValueError("sender-1 words must be binary of length n")
            if w.sum() > self.tau * self.n + 1e-9:
                raise ValueError("sender-1 word exceeds the weight budget tau")
        object.__setattr__(self, "codebook1", words)


@dataclass(frozen=True)
class SimReport:
    """Error counts and Wilson intervals from one simulation run."""

    trials: int
    errors: tuple  # (rx1, rx2, rx3)
    config: dict

    def rate(self, receiver: int) -> float:
        return self.errors[receiver - 1] / self.trials

    def interval(self, receiver: int, z: float = 1.96) -> tuple:
        return wilson_interval(self.errors[receiver - 1], self.trials, z)


def _weight_band(n: int, bias: float, slack: float) -> tuple:
    lo = int(np.ceil(n * bias * (1.0 - slack) - 1e-9))
    hi = int(np.floor(n * bias * (1.0 + slack) + 1e-9))
    return max(lo, 0), min(hi, n)


def _decode_counts(
    noise_weights: np.ndarray, group_ids: np.ndarray, n_groups: int, band: tuple
) -> np.ndarray:
    """Per-trial bitmask of groups owning at least one in-band candidate.

    noise_weights : (trials, candidates) Hamming weights
    group_ids : (candidates,) decoded-value index of each candidate
    Returns a boolean (trials, n_groups) table.
    """
    in_band = (noise_weights >= band[0]) & (noise_weights <= band[1])
    table = np.zeros((noise_weights.shape[0], n_groups), dtype=bool)
    for g in range(n_groups):
        cols = group_ids == g
        if cols.any():
            table[:, g] = in_band[:, cols].any(axis=1)
    return table


def _ambiguity_errors(table: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Error indicator: the decoded set must equal exactly {truth}."""
    trials = table.shape[0]
    hit_truth = table[np.arange(trials), truth]
    extras = table.sum(axis=1) - hit_truth.astype(int)
    return ~hit_truth | (extras > 0)


def _ml_errors(
    noise_weights: np.ndarray,
    group_ids: np.ndarray,
    truth: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Minimum-distance decoding; cross-group ties break uniformly at random.

    Random tie-breaking keeps the useless-channel limit honest: at flip
    bias 1/2 the output carries no information and the error rate sits at
    1 - 1/n_groups instead of saturating to 1.
    """
    best = noise_weights.min(axis=1)
    is_best = noise_weights == best[:, None]
    groups = np.asarray(group_ids)
    err = np.zeros(noise_weights.shape[0], dtype=bool)
    for t in range(noise_weights.shape[0]):
        winners = np.unique(groups[is_best[t]])
        pick = winners[0] if winners.size == 1 else rng.choice(winners)
        err[t] = pick != truth[t]
    return err


def simulate(
    instance: ClassicalIcInstance,
    trials: int,
    rng: np.random.Generator,
    enc_delta: float = 0.25,
    dec_delta: float = 0.5,
    decoder: str = "typicality",
    chunk: int = 2048,
) -> SimReport:
    """Run the structured (coset-sum decoding) simulation.

    Senders 2 and 3 transmit typical coset words of their nested codes;
    receiver 1 exhaustively tests (own word, interference word) pairs with
    the interference ranging over the coset-sum code's distinct range words.
    A receiver errs when the set of decoded values differs from the truth
    singleton (typicality decoder) or when minimum distance, with ties
    broken uniformly at random, lands elsewhere (ml decoder).

    Every trial checks that the transmitted interference sum lies in the
    coset-sum range; a violation raises ConsistencyError.
    """
    if decoder not in ("typicality", "ml"):
        raise ValueError(f"unknown decoder {decoder!r}")
    n = instance.n
    uniform = np.array([0.5, 0.5])
    enc2 = select_typical(instance.code2, uniform, enc_delta, rng)
    enc3 = select_typical(instance.code3, uniform, enc_delta, rng)
    msgs2 = instance.code2.messages()
    words2 = np.stack([enc2.codeword_for(m) for m in msgs2])
    words3 = np.stack([enc3.codeword_for(m) for m in msgs2])
    sum_code = coset_sum(instance.code2, instance.code3)
    sum_words = sum_code.range_words()
    sum_packed = np.sort(_pack_bits(sum_words))

    book1 = np.stack(instance.codebook1)
    packed1 = _pack_bits(book1)
    packed2 = _pack_bits(words2)
    packed3 = _pack_bits(words3)

    # Receiver-1 candidate pairs (x1 candidate, interference candidate).
    pair_masks = (packed1[:, None] ^ _pack_bits(sum_words)[None, :]).reshape(-1)
    pair_groups = np.repeat(np.arange(len(packed1)), sum_words.shape[0])
    # Receivers 2/3 search their full code range, grouped by message.
    range23 = []
    group23 = []
    a_all = field_vectors(2, instance.code2.k)
    for idx, m in enumerate(msgs2):
        coset2 = instance.code2.codeword(
            a_all, np.broadcast_to(m, (a_all.shape[0], instance.code2.l))
        )
        range23.append(coset2)
        group23.extend([idx] * a_all.shape[0])
    cands2 = _pack_bits(np.concatenate(range23))
    groups2 = np.array(group23)
    offset23 = _pack_bits(instance.code3.dither) ^ _pack_bits(instance.code2.dither)
    cands3 = cands2 ^ offset23  # same generators, shifted dither

    band1 = _weight_band(n, instance.delta1, dec_delta)
    band23 = _weight_band(n, instance.delta, dec_delta)

    n_msgs = len(msgs2)
    errors = [0, 0, 0]
    done = 0
    while done < trials:
        batch = min(chunk, trials - done)
        m1 = rng.integers(len(packed1), size=batch)
        m2 = rng.integers(n_msgs, size=batch)
        m3 = rng.integers(n_msgs, size=batch)
        noise1 = _pack_bits(rng.random((batch, n)) < instance.delta1)
        noise2 = _pack_bits(rng.random((batch, n)) < instance.delta)
        noise3 = _pack_bits(rng.random((batch, n)) < instance.delta)
        tx_sum = packed2[m2] ^ packed3[m3]
        missing = ~np.isin(tx_sum, sum_packed)
        if missing.any():
            raise ConsistencyError("transmitted interference sum left the coset-sum range")
        y1 = packed1[m1] ^ tx_sum ^ noise1
        y2 = packed2[m2] ^ noise2
        y3 = packed3[m3] ^ noise3

        w1 = _popcount(y1[:, None] ^ pair_masks[None, :])
        w2 = _popcount(y2[:, None] ^ cands2[None, :])
        w3 = _popcount(y3[:, None] ^ cands3[None, :])
        if decoder == "typicality":
            t1 = _decode_counts(w1, pair_groups, len(packed1), band1)
            t2 = _decode_counts(w2, groups2, n_msgs, band23)
            t3 = _decode_counts(w3, groups2, n_msgs, band23)
            errors[0] += int(_ambiguity_errors(t1, m1).sum())
            errors[1] += int(_ambiguity_errors(t2, m2).sum())
            errors[2] += int(_ambiguity_errors(t3, m3).sum())
        else:
            errors[0] += int(_ml_errors(w1, pair_groups, m1, rng).sum())
            errors[1] += int(_ml_errors(w2, groups2, m2, rng).sum())
            errors[2] += int(_ml_errors(w3, groups2, m3, rng).sum())
        done += batch
    config = {
        "mode": "structured",
        "decoder": decoder,
        "trials": trials,
        "n": n,
        "delta1": instance.delta1,
        "delta": instance.delta,
        "tau": instance.tau,
        "enc_delta": enc_delta,
        "dec_delta": dec_delta,
        "sum_candidates": int(sum_words.shape[0]),
    }
    return SimReport(trials, tuple(errors), config)


def simulate_independent(
    instance: ClassicalIcInstance,
    trials: int,
    rng: np.random.Generator,
    dec_delta: float = 0.5,
    decoder: str = "typicality",
    chunk: int = 2048,
) -> SimReport:
    """Baseline run with unstructured i.i.d. codebooks for senders 2 and 3.

    Each sender gets an independent uniformly random codebook with the same
    message count as the structured instance; receiver 1 must consider every
    pairwise sum of their words, so its search space grows from the
    coset-sum range to (up to) the product of the codebook sizes.
    """
    if decoder not in ("typicality", "ml"):
        raise ValueError(f"unknown decoder {decoder!r}")
    n = instance.n
    n_msgs = 2**instance.code2.l
    book2 = rng.integers(0, 2, size=(n_msgs, n))
    book3 = rng.integers(0, 2, size=(n_msgs, n))
    packed2 = _pack_bits(book2)
    packed3 = _pack_bits(book3)
    book1 = np.stack(instance.codebook1)
    packed1 = _pack_bits(book1)

    sums = np.unique((packed2[:, None] ^ packed3[None, :]).reshape(-1))
    pair_masks = (packed1[:, None] ^ sums[None, :]).reshape(-1)
    pair_groups = np.repeat(np.arange(len(packed1)), sums.size)

    band1 = _weight_band(n, instance.delta1, dec_delta)
    band23 = _weight_band(n, instance.delta, dec_delta)
    groups23 = np.arange(n_msgs)

    errors = [0, 0, 0]
    done = 0
    while done < trials:
        batch = min(chunk, trials - done)
        m1 = rng.integers(len(packed1), size=batch)
        m2 = rng.integers(n_msgs, size=batch)
        m3 = rng.integers(n_msgs, size=batch)
        noise1 = _pack_bits(rng.random((batch, n)) < instance.delta1)
        noise2 = _pack_bits(rng.random((batch, n)) < instance.delta)
        noise3 = _pack_bits(rng.random((batch, n)) < instance.delta)
        y1 = packed1[m1] ^ packed2[m2] ^ packed3[m3] ^ noise1
        y2 = packed2[m2] ^ noise2
        y3 = packed3[m3] ^ noise3
        w1 = _popcount(y1[:, None] ^ pair_masks[None, :])
        w2 = _popcount(y2[:, None] ^ packed2[None, :])
        w3 = _popcount(y3[:, None] ^ packed3[None, :])
        if decoder == "typicality":
            t1 = _decode_counts(w1, pair_groups, len(packed1), band1)
            t2 = _decode_counts(w2, groups23, n_msgs, band23)
            t3 = _decode_counts(w3, groups23, n_msgs, band23)
            errors[0] += int(_ambiguity_errors(t1, m1).sum())
            errors[1] += int(_ambiguity_errors(t2, m2).sum())
            errors[2] += int(_ambiguity_errors(t3, m3).sum())
        else:
            errors[0] += int(_ml_errors(w1, pair_groups, m1, rng).sum())
            errors[1] += int(_ml_errors(w2, groups23, m2, rng).sum())
            errors[2] += int(_ml_errors(w3, groups23, m3, rng).sum())
        done += batch
    config = {
        "mode": "independent",
        "decoder": decoder,
        "trials": trials,
        "n": n,
        "delta1": instance.delta1,
        "delta": instance.delta,
        "tau": instance.tau,
        "dec_delta": dec_delta,
        "sum_candidates": int(sums.size),
    }
    return SimReport(trials, tuple(errors), config)


def capacity_report(delta1: float, delta: float, tau: float) -> dict:
    """Closed-form capacity quantities of the commuting worked example.

    The unstructured sum-rate test compares the three point-to-point
    capacities against the receiver-1 bound with random interference; the
    structured feasibility asks that sender 1's effective bias stays below
    the side receivers' bias, conv(tau, delta1) < delta < 1/2.
    """
    cap1 = hb(conv(tau, delta1)) - hb(delta1)
    capj = 1.0 - hb(delta)
    lhs = cap1 + 2.0 * capj
    rhs = 1.0 - hb(delta1)
    return {
        "tx1_capacity": cap1,
        "ptp_capacity": capj,
        "unstructured_lhs": lhs,
        "unstructured_rhs": rhs,
        "unstructured_impossible": bool(lhs > rhs),
        "structured_feasible": bool(conv(tau, delta1) <= delta + 1e-9 and delta < 0.5),
        "effective_bias": conv(tau, delta1),
    }
