"""Quantum implementations of arbitrary (possibly non-unifilar) generators.

Each transition ``s -> s'`` emitting ``x`` is realised by an interaction

    U |sigma_s>|0>|0> = sum_{s', x} sqrt(T[x][s', s]) |sigma_{s'}> |x> |psi(s, s', x)>

after which the output register is dephased and the auxiliary register
discarded. The auxiliary states ``psi`` must be orthonormal over the possible
end states of every (start state, symbol) pair; the default encoding writes
the end-state label itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import (
    ConsistencyError,
    ConvergenceError,
    EncodingError,
    ShapeError,
    SpectrumError,
    TraceError,
)
from .hmm import Generator
from .info import NEG_EIG_TOL, entropy_of_spectrum, shannon_entropy, spectrum
from .serialize import encode_array, sig

RANK_TOL = 1e-10
ORTHO_TOL = 1e-10
FIXED_POINT_TOL = 1e-12
MAX_ITERATIONS = 100_000
ISOMETRY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EncodingScheme:
    """Choice of auxiliary states ``psi(s, s', x)``.

    Use the constructors :meth:`end_state`, :meth:`phase_only` and
    :meth:`custom` rather than instantiating directly.
    """

    mode: str
    phases: np.ndarray | None = None
    psi: Callable[[int, int, int], np.ndarray] | None = None
    aux_dim: int | None = None

    @classmethod
    def end_state(cls) -> EncodingScheme:
        return cls("end-state")

    @classmethod
    def phase_only(cls, phases=None) -> EncodingScheme:
        """One-dimensional auxiliary space carrying ``exp(i phases[s, x])``.

        ``None`` means all phases zero. Only valid for unifilar generators.
        """
        return cls("phase", phases=None if phases is None else np.asarray(phases, dtype=float))

    @classmethod
    def custom(cls, psi: Callable[[int, int, int], np.ndarray], aux_dim: int) -> EncodingScheme:
        """Arbitrary ``psi(s, s_next, x) -> vector of length aux_dim`` (indices, not labels)."""
        return cls("custom", psi=psi, aux_dim=int(aux_dim))

    def dimension(self, gen: Generator) -> int:
        if self.mode == "end-state":
            return gen.n_states
        if self.mode == "phase":
            return 1
        return self.aux_dim

    def branch_tensor(self, gen: Generator) -> np.ndarray:
        """``B[x, a, s', s] = sqrt(T[x][s', s]) * psi_a(s, s', x)`` (dense, complex)."""
        root = np.sqrt(gen.tensor())
        if self.mode == "end-state":
            nx, ns, _ = root.shape
            out = np.zeros((nx, ns, ns, ns), dtype=complex)
            idx = np.arange(ns)
            out[:, idx, idx, :] = root
            return out
        if self.mode == "phase":
            ph = self._phases(gen)
            return (root * np.exp(1j * ph.T)[:, None, :])[:, None, :, :]
        nx, ns, _ = root.shape
        out = np.zeros((nx, self.aux_dim, ns, ns), dtype=complex)
        for x, t, s in zip(*np.nonzero(root)):
            vec = np.asarray(self.psi(int(s), int(t), int(x)), dtype=complex)
            if vec.shape != (self.aux_dim,):
                raise EncodingError(f"psi{(s, t, x)} has shape {vec.shape}, expected ({self.aux_dim},)")
            out[x, :, t, s] = root[x, t, s] * vec
        return out

    def _phases(self, gen: Generator) -> np.ndarray:
        if self.phases is None:
            return np.zeros((gen.n_states, gen.n_symbols))
        if self.phases.shape != (gen.n_states, gen.n_symbols):
            raise EncodingError(
                f"phase table shape {self.phases.shape} != ({gen.n_states}, {gen.n_symbols})"
            )
        return self.phases

    def validate(self, gen: Generator) -> None:
        """Raise EncodingError unless auxiliary states are orthonormal over end states."""
        if self.mode == "end-state":
            return
        if self.mode == "phase":
            if not gen.is_unifilar:
                raise EncodingError("phase-only encoding requires a unifilar generator")
            self._phases(gen)
            return
        if self.mode != "custom" or self.psi is None or not self.aux_dim:
            raise EncodingError(f"malformed encoding {self.mode!r}")
        tensor = gen.tensor()
        for x in range(gen.n_symbols):
            for s in range(gen.n_states):
                ends = np.nonzero(tensor[x, :, s])[0]
                if ends.size == 0:
                    continue
                vecs = np.array([np.asarray(self.psi(s, int(t), x), dtype=complex) for t in ends])
                if vecs.shape[1:] != (self.aux_dim,):
                    raise EncodingError(f"psi vectors must have length {self.aux_dim}")
                overlap = vecs.conj() @ vecs.T
                dev = np.max(np.abs(overlap - np.eye(len(ends))))
                if dev > ORTHO_TOL:
                    raise EncodingError(
                        f"auxiliary states for state {gen.states[s]!r}, symbol "
                        f"{gen.alphabet[x]!r} deviate from orthonormal by {dev:.2e}"
                    )


def encoding_from_name(name: str) -> EncodingScheme:
    if name in ("end-state", "end_state", "endstate"):
        return EncodingScheme.end_state()
    if name in ("phase", "phase-only"):
        return EncodingScheme.phase_only()
    raise EncodingError(f"unknown encoding {name!r}")


def check_gram(gram: np.ndarray, tol: float = 1e-9) -> None:
    """Raise SpectrumError unless ``gram`` is Hermitian, unit-diagonal and PSD."""
    g = np.asarray(gram)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ShapeError(f"Gram matrix must be square, got {g.shape}")
    if np.max(np.abs(g - g.conj().T), initial=0.0) > tol:
        raise SpectrumError("Gram matrix is not Hermitian")
    if np.max(np.abs(np.diagonal(g) - 1.0), initial=0.0) > tol:
        raise SpectrumError("Gram matrix diagonal is not 1")
    spectrum(g)


def _end_state_overlaps(gen: Generator) -> np.ndarray:
    c = None
    for m in gen.matrices:
        r = m.sqrt()
        term = (r.T @ r).toarray()
        c = term if c is None else c + term
    return c


def solve_overlaps(gen: Generator, enc: EncodingScheme | None = None) -> np.ndarray:
    """Gram matrix ``c[j, k] = <sigma_j | sigma_k>`` of the memory states.

    Unitarity of the interaction forces the self-consistency condition

        c[j, k] = sum_{x, j', k'} sqrt(T[x][j', j] T[x][k', k])
                  <psi(j, j', x) | psi(k, k', x)> c[j', k'].

    With the end-state encoding the auxiliary overlap is a Kronecker delta on
    the end states and the right-hand side no longer depends on ``c``, so a
    single evaluation is exact. Otherwise the map is iterated from the all-ones
    matrix until the largest entry change drops below 1e-12.
    """
    enc = enc or EncodingScheme.end_state()
    enc.validate(gen)
    if enc.mode == "end-state":
        return _end_state_overlaps(gen)

    if enc.mode == "phase":
        ph = enc._phases(gen)
        branches = []
        for x, m in enumerate(gen.matrices):
            b = sp.csr_array(m.sqrt() @ sp.diags_array(np.exp(1j * ph[:, x])))
            branches.append((b, sp.csr_array(b.conj().T)))
        real = not np.any(ph)
    else:
        bt = enc.branch_tensor(gen)
        branches = [
            (sp.csr_array(bt[x, a]), sp.csr_array(bt[x, a].conj().T))
            for x in range(bt.shape[0])
            for a in range(bt.shape[1])
            if np.any(bt[x, a])
        ]
        real = not np.iscomplexobj(bt) or not np.any(bt.imag)

    ns = gen.n_states
    c = np.ones((ns, ns), dtype=float if real else complex)
    for _ in range(MAX_ITERATIONS):
        new = np.zeros_like(c)
        for b, bh in branches:
            term = bh @ (b.T @ c.T).T
            new += term.real if real else term
        delta = np.max(np.abs(new - c))
        c = new
        if delta < FIXED_POINT_TOL:
            return c
    raise ConvergenceError(f"overlap iteration did not converge in {MAX_ITERATIONS} steps")


def weighted_gram(gram: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``sqrt(w_j w_k) c[j, k]``; shares its spectrum with ``sum_s w_s |sigma_s><sigma_s|``."""
    r = np.sqrt(np.asarray(weights, dtype=float))
    return r[:, None] * gram * r[None, :]


def memory_spectrum(gram: np.ndarray, pi: np.ndarray) -> np.ndarray:
    return spectrum(weighted_gram(gram, pi))


def _rank(eigenvalues: np.ndarray) -> int:
    top = eigenvalues.max(initial=0.0)
    return int(np.count_nonzero(eigenvalues > RANK_TOL * top))


def quantum_memory(gram: np.ndarray, pi: np.ndarray) -> tuple[float, float]:
    """``(D, C)`` of the stationary memory state, from the spectrum of the weighted Gram matrix."""
    w = memory_spectrum(gram, pi)
    return float(np.log2(_rank(w))), entropy_of_spectrum(w)


def embed_states(gram: np.ndarray) -> np.ndarray:
    """Explicit memory state vectors reproducing ``gram``.

    Returns ``A`` of shape (rank, |S|) with ``A^dagger A = gram``; column ``s``
    is ``|sigma_s>`` in an orthonormal basis of the memory space.
    """
    g = np.asarray(gram)
    w, v = np.linalg.eigh(g)
    if w[0] < -NEG_EIG_TOL:
        raise SpectrumError(f"Gram matrix has negative eigenvalue {w[0]:.3e}")
    keep = w > RANK_TOL * w[-1]
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    return np.sqrt(w)[:, None] * v.conj().T


@dataclass(frozen=True, eq=False)
class Isometry:
    """Interaction restricted to the memory space.

    ``matrix`` maps the ``memory_dim``-dimensional memory space into
    memory (x) output (x) auxiliary, flattened in that order.
    """

    matrix: np.ndarray
    memory_dim: int
    n_symbols: int
    aux_dim: int

    def blocks(self) -> np.ndarray:
        """``K[x, a]``: memory-to-memory block for output ``x`` and auxiliary basis state ``a``."""
        v = self.matrix.reshape(self.memory_dim, self.n_symbols, self.aux_dim, self.memory_dim)
        return v.transpose(1, 2, 0, 3)

    def kraus_operators(self) -> list[np.ndarray]:
        """Kraus operators of the memory-to-(memory, output) channel, one per (x, a)."""
        d, nx = self.memory_dim, self.n_symbols
        out = []
        for x in range(nx):
            for a in range(self.aux_dim):
                k = np.zeros((d * nx, d), dtype=self.matrix.dtype)
                k[x::nx, :] = self.blocks()[x, a]
                out.append(k)
        return out

    def unitary(self) -> np.ndarray:
        """Complete to a unitary acting on memory (x) output (x) auxiliary.

        Columns for inputs ``|m>|0>|0>`` are those of ``matrix``; the rest is an
        arbitrary orthonormal completion.
        """
        n = self.matrix.shape[0]
        comp = scipy.linalg.null_space(self.matrix.conj().T)
        u = np.zeros((n, n), dtype=complex)
        inputs = np.arange(self.memory_dim) * self.n_symbols * self.aux_dim
        u[:, inputs] = self.matrix
        u[:, np.setdiff1d(np.arange(n), inputs)] = comp
        return u


def transition_outputs(gen: Generator, emb: np.ndarray, enc: EncodingScheme) -> np.ndarray:
    """Target vectors ``y_s`` as columns of a (rank * |X| * d, |S|) matrix."""
    root = np.sqrt(gen.tensor())
    if enc.mode == "end-state":
        # psi(s, s', x) = |s'>: y[r, x, a, s] = A[r, a] sqrt(T[x][a, s])
        y = np.einsum("ra,xas->rxas", emb, root)
    else:
        y = np.einsum("rt,xats->rxas", emb, enc.branch_tensor(gen))
    return y.reshape(-1, gen.n_states)


def build_isometry(
    gen: Generator, emb: np.ndarray, enc: EncodingScheme | None = None, tol: float = ISOMETRY_TOL
) -> Isometry:
    """Solve ``V A = Y`` for the interaction on the span of the memory states.

    Raises ConsistencyError when the Gram matrices of the target outputs and
    of the memory states differ by more than ``tol``; that would mean ``emb``
    does not come from the overlap solver for this encoding.
    """
    enc = enc or EncodingScheme.end_state()
    enc.validate(gen)
    emb = np.asarray(emb)
    if emb.shape[1] != gen.n_states:
        raise ShapeError(f"embedding has {emb.shape[1]} columns for {gen.n_states} states")
    y = transition_outputs(gen, emb, enc)
    dev = np.max(np.abs(y.conj().T @ y - emb.conj().T @ emb))
    if dev > tol:
        raise ConsistencyError(f"output Gram deviates from memory Gram by {dev:.2e}")
    v = y @ np.linalg.pinv(emb)
    if not np.any(v.imag if np.iscomplexobj(v) else 0):
        v = v.real
    return Isometry(v, emb.shape[0], gen.n_symbols, enc.dimension(gen))


def _check_density(rho: np.ndarray, dim: int) -> None:
    if rho.shape != (dim, dim):
        raise ShapeError(f"density matrix shape {rho.shape}, expected ({dim}, {dim})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-9:
        raise TraceError(f"trace {tr:.12g} differs from 1")


def apply_channel(iso: Isometry, rho: np.ndarray) -> np.ndarray:
    """Run one step: isometry, dephase the output, discard the auxiliary system.

    Returns the joint memory (x) output density matrix, indexed
    ``memory * |X| + symbol``.
    """
    rho = np.asarray(rho)
    d, nx, na = iso.memory_dim, iso.n_symbols, iso.aux_dim
    _check_density(rho, d)
    big = (iso.matrix @ rho @ iso.matrix.conj().T).reshape(d, nx, na, d, nx, na)
    reduced = np.einsum("ixajya->ixjy", big)
    reduced = reduced * np.eye(nx)[None, :, None, :]
    return reduced.reshape(d * nx, d * nx)


def conditional_update(iso: Isometry, rho: np.ndarray) -> np.ndarray:
    """Unnormalised memory states ``E_x(rho)`` for every symbol, shape (|X|, d, d)."""
    k = iso.blocks()
    return np.einsum("xaij,jk,xalk->xil", k, rho, k.conj())


def channel_word_distribution(iso: Isometry, rho: np.ndarray, length: int) -> np.ndarray:
    """Probabilities of all output words of ``length`` from iterating the channel.

    Ordered like :func:`hmmq.hmm.forward_vectors` (first symbol most significant).
    """
    _check_density(np.asarray(rho), iso.memory_dim)
    states = np.asarray(rho)[None]
    for _ in range(length):
        states = np.concatenate([conditional_update(iso, r) for r in states])
    return np.real(np.einsum("wii->w", states))


def implementation_residual(gen: Generator, emb: np.ndarray, iso: Isometry) -> float:
    """Largest entrywise deviation from ``Phi(|s><s|) = sum T |s'><s'| (x) |x><x|`` over basis inputs."""
    tensor = gen.tensor()
    nx = gen.n_symbols
    proj = np.einsum("is,js->sij", emb, emb.conj())
    worst = 0.0
    for s in range(gen.n_states):
        out = apply_channel(iso, proj[s])
        target = np.zeros_like(out, dtype=complex)
        for x in range(nx):
            block = np.einsum("t,tij->ij", tensor[x, :, s], proj)
            target[x::nx, x::nx] = block
        worst = max(worst, float(np.max(np.abs(out - target))))
    return worst


def output_state_entropy(gen: Generator, gram: np.ndarray) -> float:
    """Von Neumann entropy of ``sum_{s, s', x} pi(s) T[x][s', s] |sigma_s'><sigma_s'| (x) |x><x|``.

    The state is block diagonal in ``x``; each block's spectrum comes from the
    Gram matrix weighted by ``q_x(s') = sum_s pi(s) T[x][s', s]``.
    """
    total = 0.0
    px = []
    for m in gen.matrices:
        q = m @ gen.stationary
        p = q.sum()
        px.append(p)
        if p <= 0:
            continue
        support = np.nonzero(q > 0)[0]
        block = weighted_gram(gram[np.ix_(support, support)], q[support] / p)
        total += p * entropy_of_spectrum(spectrum(block))
    return shannon_entropy(px) + total


def quantum_work(gen: Generator, gram: np.ndarray) -> float:
    """Asymptotic work per step ``S(rho) - S(rho_{S'X})`` in units of k_B T ln 2."""
    _, c = quantum_memory(gram, gen.stationary)
    return float(c - output_state_entropy(gen, gram))


@dataclass(frozen=True, eq=False)
class QuantumReport:
    D: float
    C: float
    W: float
    rank: int
    gram: np.ndarray
    spectrum: np.ndarray
    state_vectors: np.ndarray | None = None
    dissipation: float | None = None

    def to_dict(self) -> dict:
        out = {
            "D": sig(self.D),
            "C": sig(self.C),
            "W": sig(self.W),
            "rank": self.rank,
            "gram": encode_array(self.gram),
            "spectrum": encode_array(self.spectrum),
        }
        if self.dissipation is not None:
            out["dissipation"] = sig(self.dissipation)
        return out


def quantum_report(
    gen: Generator,
    enc: EncodingScheme | None = None,
    gram: np.ndarray | None = None,
    h_mu: float | None = None,
    embed: bool = False,
) -> QuantumReport:
    """Memory and work costs of the quantum implementation of ``gen``.

    ``gram`` may be supplied to skip the overlap solver (e.g. closed-form
    renewal states).
    """
    from .classical import locality_dissipation

    if gram is None:
        gram = solve_overlaps(gen, enc)
    w = memory_spectrum(gram, gen.stationary)
    rank = _rank(w)
    C = entropy_of_spectrum(w)
    W = float(C - output_state_entropy(gen, gram))
    return QuantumReport(
        D=float(np.log2(rank)),
        C=C,
        W=W,
        rank=rank,
        gram=gram,
        spectrum=w[::-1],
        state_vectors=embed_states(gram) if embed else None,
        dissipation=locality_dissipation(W, h_mu) if h_mu is not None else None,
    )
