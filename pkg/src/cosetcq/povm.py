"""Exact finite-blocklength projectors and square-root decoders.

Everything here is dense and exact: spectral typical projectors, their
conditional variants, the coset-code point-to-point decoder, the receiver-1
sum-decoder, and the pinching-overlap sweep.  Spaces are capped at dimension
2**12; constructions refuse to run beyond that.

Eigenvalue-label sequences are kept when their sample surprisal
-(1/n) log2 prod(eigenvalue) sits within delta of the (average) von Neumann
entropy; labels on zero eigenvalues never pass.  Classical codeword
indicators use the relative letter-frequency flavor, matching codeword
selection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, ConsistencyError
from .field_codes import EncoderState, NestedCosetCode, coset_sum, field_vectors
from .linalg import eig_hermitian, trace_norm
from .typicality import is_relative_typical, pair_sequence

__all__ = [
    "DIM_BUDGET",
    "TypicalProjector",
    "Povm",
    "Rx1Setup",
    "PinchingRow",
    "typical_projector",
    "conditional_typical_projector",
    "build_ptp_povm",
    "ptp_block_error",
    "rx1_setup_from_channel",
    "build_rx1_povm",
    "rx1_success_probability",
    "verify_pinching",
    "gentle_measurement_check",
]

DIM_BUDGET = 2**12


def _as_matrix(op) -> np.ndarray:
    return np.asarray(getattr(op, "matrix", op), dtype=complex)


def _kron_chain(mats) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def _check_dim_budget(dim: int, n: int, budget: int) -> int:
    total = dim**n
    if total > budget:
        raise BudgetExceededError(
            f"projector space of dimension {dim}^{n} = {total} exceeds budget {budget}"
        )
    return total


@dataclass(frozen=True)
class TypicalProjector:
    """An orthogonal projector onto a typical subspace of a product space."""

    n: int
    delta: float
    kind: str
    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))


def typical_projector(
    rho, n: int, delta: float, budget: int = DIM_BUDGET
) -> TypicalProjector:
    """Projector onto the span of n-fold eigenvector products with typical labels.

    The base state is spectrally decomposed; a label sequence is kept when
    the sample surprisal of its eigenvalue product lies within ``delta`` of
    the von Neumann entropy (labels on zero eigenvalues never pass).

    Parameters
    ----------
    rho : density operator or ndarray
    n : int
        Number of tensor factors.
    delta : float
        Entropy-window slack in bits.
    budget : int
        Maximum allowed total dimension dim(rho)**n.
    """
    mat = _as_matrix(rho)
    dim = mat.shape[0]
    _check_dim_budget(dim, n, budget)
    w, v = eig_hermitian(mat)
    spectrum = np.clip(w, 0.0, None)
    seqs = field_vectors_any(dim, n)
    mask = _entropy_mask(seqs, spectrum, delta)
    basis = _kron_chain([v] * n)
    cols = basis[:, mask]
    return TypicalProjector(n, delta, "state", cols @ cols.conj().T)


def field_vectors_any(alphabet: int, length: int) -> np.ndarray:
    """All label sequences over an arbitrary (not necessarily prime) alphabet."""
    if alphabet == 1:
        return np.zeros((1, length), dtype=np.int64)
    idx = np.arange(alphabet**length, dtype=np.int64)
    out = np.empty((alphabet**length, length), dtype=np.int64)
    for pos in range(length - 1, -1, -1):
        out[:, pos] = idx % alphabet
        idx //= alphabet
    return out


def _surprisal(spectrum: np.ndarray) -> np.ndarray:
    out = np.full(spectrum.shape, np.inf)
    pos = spectrum > 0.0
    out[pos] = -np.log2(spectrum[pos])
    return out


def _spectrum_entropy(spectrum: np.ndarray) -> float:
    pos = spectrum[spectrum > 0.0]
    return float(-(pos * np.log2(pos)).sum())


def _entropy_mask(seqs: np.ndarray, spectrum: np.ndarray, delta: float) -> np.ndarray:
    logs = _surprisal(spectrum)
    sample = logs[seqs].mean(axis=1)
    target = _spectrum_entropy(spectrum)
    return np.isfinite(sample) & (np.abs(sample - target) <= delta + 1e-12)


def conditional_typical_projector(
    states,
    vn,
    delta: float,
    pmf=None,
    budget: int = DIM_BUDGET,
) -> TypicalProjector:
    """Projector onto conditionally typical eigenvector products given ``vn``.

    Each letter state is decomposed separately; a label sequence is kept
    when its sample surprisal -(1/n) log2 prod_t eig(states[vn_t]) lies
    within ``delta`` of the average letter entropy (1/n) sum_t S(states[vn_t]).

    When ``pmf`` is given, ``vn`` itself is first tested for *relative*
    delta-typicality against it; an atypical conditioning word yields the
    zero projector (the decoder's indicator clause).
    """
    vn = np.asarray(vn, dtype=np.int64)
    n = vn.size
    mats = [_as_matrix(s) for s in states]
    dim = mats[0].shape[0]
    if any(m.shape != (dim, dim) for m in mats):
        raise ValueError("letter states must share one dimension")
    total = _check_dim_budget(dim, n, budget)
    if pmf is not None and not is_relative_typical(vn, np.asarray(pmf, float), delta):
        return TypicalProjector(n, delta, "conditional", np.zeros((total, total), dtype=complex))
    eigs = {}
    for v in np.unique(vn):
        w, basis = eig_hermitian(mats[v])
        eigs[int(v)] = (np.clip(w, 0.0, None), basis)
    seqs = field_vectors_any(dim, n)
    surpr = np.stack([_surprisal(eigs[int(v)][0]) for v in vn])
    sample = surpr[np.arange(n)[None, :], seqs].mean(axis=1)
    target = float(np.mean([_spectrum_entropy(eigs[int(v)][0]) for v in vn]))
    mask = np.isfinite(sample) & (np.abs(sample - target) <= delta + 1e-12)
    basis = _kron_chain([eigs[int(v)][1] for v in vn])
    cols = basis[:, mask]
    return TypicalProjector(n, delta, "conditional", cols @ cols.conj().T)


@dataclass(frozen=True)
class Povm:
    """A labeled POVM; the completion element carries the label ``None``.

    Construction verifies positivity of every element (eigenvalues above
    -1e-8) and that the elements sum to the identity within 1e-8 entrywise.
    """

    labels: tuple
    elements: tuple

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.elements):
            raise ValueError("labels and elements must have equal length")
        dim = self.elements[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for label, el in zip(self.labels, self.elements):
            if el.shape != (dim, dim):
                raise ValueError(f"element {label} has shape {el.shape}")
            wmin = float(np.linalg.eigvalsh(0.5 * (el + el.conj().T)).min())
            if wmin < -1e-8:
                raise ConsistencyError(
                    f"POVM element {label} has eigenvalue {wmin:.3e} below -1e-8"
                )
            total += el
        if np.abs(total - np.eye(dim)).max() > 1e-8:
            raise ConsistencyError("POVM elements do not sum to the identity within 1e-8")

    def element(self, label) -> np.ndarray:
        return self.elements[self.labels.index(label)]

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]


def _inverse_sqrt_on_support(mat: np.ndarray, cutoff: float = 1e-10) -> np.ndarray:
    w, v = eig_hermitian(mat)
    inv = np.where(w > cutoff, 1.0 / np.sqrt(np.clip(w, cutoff, None)), 0.0)
    return (v * inv) @ v.conj().T


def build_ptp_povm(
    code: NestedCosetCode,
    encoder: EncoderState,
    states,
    delta: float,
    budget: int = DIM_BUDGET,
    label_budget: int = 2**16,
) -> Povm:
    """Square-root decoder POVM for a point-to-point coset code.

    For every pair (a, m) the intermediate operator is
    pi_rho . Pi_{v(a,m)} . pi_rho, zeroed when the word is not relative
    delta-typical for the code pmf; square-root normalization and an
    off-support completion element make the collection a POVM with labels
    (a, m) plus ``None``.
    """
    q = code.field.q
    mats = [_as_matrix(s) for s in states]
    if len(mats) != q:
        raise ValueError(f"expected {q} letter states, got {len(mats)}")
    dim = mats[0].shape[0]
    total_labels = q ** (code.k + code.l)
    if total_labels > label_budget:
        raise BudgetExceededError(
            f"{total_labels} POVM labels exceed budget {label_budget}"
        )
    total_dim = _check_dim_budget(dim, code.n, budget)
    pmf = encoder.pmf
    rho_bar = sum(p * m for p, m in zip(pmf, mats))
    pi_rho = typical_projector(rho_bar, code.n, delta, budget).matrix
    gammas = []
    labels = []
    for a in field_vectors(q, code.k):
        for m in code.messages():
            word = code.codeword(a, m)
            proj = conditional_typical_projector(
                mats, word, delta, pmf=pmf, budget=budget
            ).matrix
            gammas.append(pi_rho @ proj @ pi_rho)
            labels.append((tuple(int(x) for x in a), tuple(int(x) for x in m)))
    total = sum(gammas)
    norm = _inverse_sqrt_on_support(total)
    elements = [norm @ g @ norm for g in gammas]
    completion = np.eye(total_dim, dtype=complex) - sum(elements)
    labels.append(None)
    elements.append(completion)
    return Povm(tuple(labels), tuple(elements))


def ptp_block_error(povm: Povm, encoder: EncoderState, states) -> float:
    """Exact average block error probability of the square-root decoder.

    Messages are uniform; the channel maps the selected word to the tensor
    product of letter states.  The decoder succeeds on any outcome (a, m)
    with the correct message part.
    """
    code = encoder.code
    q = code.field.q
    mats = [_as_matrix(s) for s in states]
    message_elements: dict = {}
    for label, el in zip(povm.labels, povm.elements):
        if label is None:
            continue
        _, m = label
        message_elements[m] = message_elements.get(m, 0) + el
    success = 0.0
    messages = code.messages()
    for m in messages:
        key = tuple(int(x) for x in m)
        word = encoder.codeword_for(m)
        rho = _kron_chain([mats[int(v)] for v in word])
        success += float(np.trace(message_elements[key] @ rho).real)
    return 1.0 - success / len(messages)


@dataclass(frozen=True)
class Rx1Setup:
    """Inputs of the receiver-1 sum decoder.

    Attributes
    ----------
    cond_states : dict
        (x1, u) -> receiver-1 letter state ndarray.
    p_x1, p_u : ndarrays
        Letter distributions of sender 1 and of the interference sum.
    codebook1 : tuple of int ndarrays
        Sender-1 words, indexed by its message.
    sum_code : NestedCosetCode
        The coset-sum code whose words enumerate the decodable interference;
        its dither is the sum of the two senders' dithers.
    """

    cond_states: dict
    p_x1: np.ndarray
    p_u: np.ndarray
    codebook1: tuple
    sum_code: NestedCosetCode


def rx1_setup_from_channel(channel, dist, codebook1, code2, code3) -> Rx1Setup:
    """Assemble the receiver-1 decoding problem from a 3-to-1 channel.

    The conditional letter states come from the receiver-1 block-diagonal
    state at the given input pmf; the interference code is the coset sum of
    the two senders' codes (their generators must match).  The receiver-1
    reduction must depend on the auxiliaries only through their sum, so that
    per-letter states indexed by (x1, u) describe the channel exactly; this
    is verified and a ModelViolationError raised otherwise.
    """
    from .channels import sigma1
    from .errors import ModelViolationError
    from .linalg import trace_distance

    q = dist.q
    s1 = sigma1(channel, dist)
    cond = {lab: mat for lab, (_, mat) in s1.blocks.items()}
    # Sufficiency of the sum: every (v2, v3) with one sum must induce the
    # same receiver-1 letter state as the sum-conditioned average.
    dim1 = channel.output_dims[0]
    for x1 in range(channel.input_sizes[0]):
        for v2 in range(q):
            for v3 in range(q):
                u = (v2 + v3) % q
                if (x1, u) not in cond:
                    continue
                acc = np.zeros((dim1, dim1), dtype=complex)
                weight = 0.0
                for x2 in range(channel.input_sizes[1]):
                    for x3 in range(channel.input_sizes[2]):
                        wgt = dist.p_v2x2[v2, x2] * dist.p_v3x3[v3, x3]
                        if wgt <= 0.0:
                            continue
                        acc += wgt * channel.output_marginal((x1, x2, x3), 0)
                        weight += wgt
                if weight <= 0.0:
                    continue
                if trace_distance(acc / weight, cond[(x1, u)]) > 1e-9:
                    raise ModelViolationError(
                        "receiver-1 reduction is not a function of the "
                        f"auxiliary sum at x1={x1}, (v2, v3)=({v2}, {v3})"
                    )
    return Rx1Setup(
        cond_states=cond,
        p_x1=np.asarray(dist.p_x1, dtype=float),
        p_u=dist.p_u(),
        codebook1=tuple(np.asarray(w, dtype=np.int64) for w in codebook1),
        sum_code=coset_sum(code2, code3),
    )


def build_rx1_povm(setup: Rx1Setup, delta: float, budget: int = DIM_BUDGET) -> Povm:
    """Square-root decoder for (message 1, interference sum) at receiver 1.

    Labels are (m1, a, w): sender-1 message index, inner index and coset
    index of the interference word.  The sandwich for one label is
    pi_rho . pi_{m1} . pi^{a,w}_{m1} . pi_{m1} . pi_rho with the outer
    projector built from the average state, the middle one conditioned on
    sender 1's word alone, and the inner one conditioned on the
    (x1, u) pair sequence; pairs that are not relative delta-typical for
    p_x1 x p_u contribute zero.
    """
    code = setup.sum_code
    q = code.field.q
    n = code.n
    n_x1 = setup.p_x1.size
    dim = next(iter(setup.cond_states.values())).shape[0]
    total_dim = _check_dim_budget(dim, n, budget)
    labels_total = len(setup.codebook1) * q ** (code.k + code.l)
    if labels_total > 2**16:
        raise BudgetExceededError(f"{labels_total} receiver-1 labels exceed budget")

    # Average and x1-conditional letter states.
    rho_bar = np.zeros((dim, dim), dtype=complex)
    rho_x1 = [np.zeros((dim, dim), dtype=complex) for _ in range(n_x1)]
    for (x1, u), mat in setup.cond_states.items():
        rho_bar += setup.p_x1[x1] * setup.p_u[u] * mat
        rho_x1[x1] += setup.p_u[u] * mat
    pi_rho = typical_projector(rho_bar, n, delta, budget).matrix

    # Pair-conditioned family: condition alphabet is (x1, u) flattened.
    pair_states = [
        setup.cond_states[(x1, u)]
        for x1 in range(n_x1)
        for u in range(q)
    ]
    pair_pmf = np.concatenate(
        [setup.p_x1[x1] * setup.p_u for x1 in range(n_x1)]
    )

    gammas = []
    labels = []
    a_all = field_vectors(q, code.k)
    w_all = code.messages()
    for m1, x1_word in enumerate(setup.codebook1):
        pi_m1 = conditional_typical_projector(rho_x1, x1_word, delta, budget=budget).matrix
        outer = pi_rho @ pi_m1
        for a in a_all:
            for w in w_all:
                u_word = code.codeword(a, w)
                pair_seq = x1_word * q + u_word
                inner = conditional_typical_projector(
                    pair_states, pair_seq, delta, pmf=pair_pmf, budget=budget
                ).matrix
                gammas.append(outer @ inner @ outer.conj().T)
                labels.append(
                    (
                        m1,
                        tuple(int(x) for x in a),
                        tuple(int(x) for x in w),
                    )
                )
    total = sum(gammas)
    norm = _inverse_sqrt_on_support(total)
    elements = [norm @ g @ norm for g in gammas]
    completion = np.eye(total_dim, dtype=complex) - sum(elements)
    labels.append(None)
    elements.append(completion)
    return Povm(tuple(labels), tuple(elements))


def rx1_success_probability(
    povm: Povm,
    setup: Rx1Setup,
    enc2: EncoderState,
    enc3: EncoderState,
) -> float:
    """Exact probability that receiver 1 outputs the correct (m1, a, w) label.

    Messages of all three senders are uniform.  The correct label packs the
    sum of the two encoders' chosen inner indices and the message sum; the
    corresponding interference word automatically equals the sum of the two
    transmitted words.
    """
    q = setup.sum_code.field.q
    code2, code3 = enc2.code, enc3.code
    success = 0.0
    combos = 0
    for m1, x1_word in enumerate(setup.codebook1):
        for m2 in code2.messages():
            v2 = enc2.codeword_for(m2)
            a2 = enc2.chosen[tuple(int(x) for x in m2)]
            for m3 in code3.messages():
                v3 = enc3.codeword_for(m3)
                a3 = enc3.chosen[tuple(int(x) for x in m3)]
                u_word = (v2 + v3) % q
                rho = _kron_chain(
                    [
                        setup.cond_states[(int(x1), int(u))]
                        for x1, u in zip(x1_word, u_word)
                    ]
                )
                label = (
                    m1,
                    tuple(int(x) for x in (a2 + a3) % q),
                    tuple(int(x) for x in (m2 + m3) % q),
                )
                success += float(np.trace(povm.element(label) @ rho).real)
                combos += 1
    return success / combos


@dataclass(frozen=True)
class PinchingRow:
    n: int
    delta: float
    trace: float
    deficiency: float


def verify_pinching(
    p_ab,
    states_b,
    n_list,
    delta: float,
    budget: int = DIM_BUDGET,
) -> list:
    """Exact overlap sweep for the pinching bound.

    For each blocklength a deterministic delta/4-typical pair (a^n, b^n) is
    built, and the quantity tr(Pi_rho Pi_{a^n} Pi_rho rho_{b^n}) evaluated
    with both projectors at slack ``delta``.  Rows report the trace and its
    deficiency 1 - trace, which the bound drives to zero exponentially.
    """
    p_ab = np.asarray(p_ab, dtype=float)
    if p_ab.ndim != 2 or p_ab.min() < 0 or abs(p_ab.sum() - 1.0) > 1e-9:
        raise ValueError("p_ab must be a joint probability matrix")
    mats = [_as_matrix(s) for s in states_b]
    if len(mats) != p_ab.shape[1]:
        raise ValueError("one letter state per column of p_ab is required")
    p_a = p_ab.sum(axis=1)
    dim = mats[0].shape[0]
    cond_states = []
    for a in range(p_ab.shape[0]):
        if p_a[a] <= 0.0:
            cond_states.append(np.zeros((dim, dim), dtype=complex))
            continue
        cond_states.append(sum(p_ab[a, b] / p_a[a] * mats[b] for b in range(p_ab.shape[1])))
    rho_bar = sum(p_a[a] * cond_states[a] for a in range(p_ab.shape[0]))
    rows = []
    for n in n_list:
        a_seq, b_seq = pair_sequence(p_ab, int(n), delta / 4.0)
        pi_rho = typical_projector(rho_bar, int(n), delta, budget).matrix
        pi_a = conditional_typical_projector(cond_states, a_seq, delta, budget=budget).matrix
        rho_bn = _kron_chain([mats[int(b)] for b in b_seq])
        sandwich = pi_rho @ pi_a @ pi_rho
        trace = float(np.trace(sandwich @ rho_bn).real)
        rows.append(PinchingRow(int(n), delta, trace, 1.0 - trace))
    return rows


def gentle_measurement_check(rho, projector, slack: float = 1e-6) -> tuple:
    """Verify the gentle-operator inequality for a (state, projector) pair.

    Returns (epsilon, disturbance, ok) where epsilon = 1 - tr(P rho) and
    disturbance = trace norm of rho - P rho P; ok requires
    disturbance <= 2 sqrt(epsilon) + slack.
    """
    mat = _as_matrix(rho)
    p = _as_matrix(projector)
    eps = max(0.0, 1.0 - float(np.trace(p @ mat).real))
    disturbance = trace_norm(mat - p @ mat @ p)
    return eps, disturbance, disturbance <= 2.0 * np.sqrt(eps) + slack
