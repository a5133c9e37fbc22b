"""Edge-emitting hidden Markov model generators.

A generator is a set of states, an alphabet, and transition probabilities
``T[x][s', s] = P(s', x | s)``. Matrices are stored per symbol as sparse
column-stochastic blocks (columns index the start state), so the stationary
distribution is the fixed point of ``sum_x T[x] @ pi``.
"""

from __future__ import annotations

import itertools
import json
import os
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from .errors import (
    AlphabetError,
    InputError,
    NotUnifilarError,
    NumericalError,
    ReducibilityError,
    ResourceError,
    RowSumError,
)
from .info import shannon_entropy

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10
MORPH_TOL = 1e-9
#: upper bound on |X|**L for exhaustive word enumeration
WORD_BUDGET = 2**22
#: above this state count the stationary vector is found by a sparse solve
DENSE_EIG_LIMIT = 400
DEFAULT_MAX_STATES = 2000

Word = tuple[str, ...]


@dataclass(frozen=True)
class GeneratorSpec:
    """Raw, unvalidated description of a generator.

    ``transitions`` holds ``(from_state, to_state, symbol, probability)``.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: tuple[tuple[str, str, str, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "alphabet", tuple(str(x) for x in self.alphabet))
        object.__setattr__(
            self,
            "transitions",
            tuple((str(a), str(b), str(x), float(p)) for a, b, x, p in self.transitions),
        )

    @classmethod
    def from_dict(cls, data: dict) -> GeneratorSpec:
        try:
            transitions = [(t["from"], t["to"], t["symbol"], t["p"]) for t in data["transitions"]]
            return cls(tuple(data["states"]), tuple(data["alphabet"]), tuple(transitions))
        except (KeyError, TypeError) as exc:
            raise AlphabetError(f"malformed generator spec: {exc!r}") from exc

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "alphabet": list(self.alphabet),
            "transitions": [
                {"from": a, "to": b, "symbol": x, "p": p} for a, b, x, p in self.transitions
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        # repr-precision doubles round-trip exactly
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)


def max_states() -> int:
    return int(os.environ.get("HMMQ_MAX_STATES", DEFAULT_MAX_STATES))


def load_spec(path: str | os.PathLike, limit: int | None = None) -> GeneratorSpec:
    """Read a generator spec from a UTF-8 JSON file.

    ``limit`` defaults to the ``HMMQ_MAX_STATES`` environment variable.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    spec = GeneratorSpec.from_dict(data)
    limit = max_states() if limit is None else limit
    if len(spec.states) > limit:
        raise ResourceError(f"{path}: {len(spec.states)} states exceeds limit {limit}")
    return spec


def dump_spec(spec: GeneratorSpec, path: str | os.PathLike) -> None:
    Path(path).write_text(spec.to_json() + "\n", encoding="utf-8")


@dataclass(frozen=True, eq=False)
class Generator:
    """A validated, irreducible generator with its stationary distribution.

    Build instances with :func:`validate_spec` or :meth:`from_tensor`.
    """

    spec: GeneratorSpec
    matrices: tuple[sp.csr_array, ...]
    stationary: np.ndarray
    is_unifilar: bool
    is_retrodictive: bool
    _symbol_index: dict = field(repr=False, default_factory=dict)

    @property
    def states(self) -> tuple[str, ...]:
        return self.spec.states

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.spec.alphabet

    @property
    def n_states(self) -> int:
        return len(self.spec.states)

    @property
    def n_symbols(self) -> int:
        return len(self.spec.alphabet)

    def tensor(self) -> np.ndarray:
        """Dense ``T[x, s', s]``."""
        return np.stack([m.toarray() for m in self.matrices])

    def total(self) -> sp.csr_array:
        """Symbol-marginal transition matrix ``T[s', s]``."""
        out = self.matrices[0].copy()
        for m in self.matrices[1:]:
            out = out + m
        return sp.csr_array(out)

    def emission_probabilities(self) -> np.ndarray:
        """``P(x | s)`` as an array of shape (|X|, |S|)."""
        return np.stack([np.asarray(m.sum(axis=0)).ravel() for m in self.matrices])

    def symbol_indices(self, word: Sequence[str] | str) -> list[int]:
        if isinstance(word, str) and word not in self._symbol_index:
            word = list(word)
        elif isinstance(word, str):
            word = [word]
        try:
            return [self._symbol_index[x] for x in word]
        except KeyError as exc:
            raise AlphabetError(f"symbol {exc.args[0]!r} not in alphabet") from None

    @classmethod
    def from_tensor(
        cls,
        tensor: np.ndarray,
        states: Sequence[str] | None = None,
        alphabet: Sequence[str] | None = None,
    ) -> Generator:
        """Validate a dense ``T[x, s', s]`` array; zero entries are omitted."""
        tensor = np.asarray(tensor, dtype=float)
        # rounding can push deterministic edges a few ulps above one
        tensor = np.where(np.abs(tensor - 1.0) < 1e-12, 1.0, tensor)
        nx, ns, _ = tensor.shape
        states = tuple(states) if states is not None else tuple(f"s{i}" for i in range(ns))
        alphabet = tuple(alphabet) if alphabet is not None else tuple(str(i) for i in range(nx))
        x_idx, t_idx, s_idx = np.nonzero(tensor)
        transitions = tuple(
            (states[s], states[t], alphabet[x], float(tensor[x, t, s]))
            for x, t, s in zip(x_idx, t_idx, s_idx)
        )
        return validate_spec(GeneratorSpec(states, alphabet, transitions))


def _check_unique(labels: Iterable[str], what: str) -> dict[str, int]:
    index: dict[str, int] = {}
    for i, label in enumerate(labels):
        if label in index:
            raise AlphabetError(f"duplicate {what} {label!r}")
        index[label] = i
    return index


def _stationary_gth(col_stochastic: np.ndarray) -> np.ndarray:
    """Subtraction-free elimination; keeps relative accuracy for tiny occupations."""
    a = col_stochastic.T.copy()
    n = a.shape[0]
    for k in range(n - 1, 0, -1):
        s = a[k, :k].sum()
        a[:k, k] /= s
        a[:k, :k] += np.outer(a[:k, k], a[k, :k])
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ a[:k, k]
    return pi


def _stationary(total: sp.csr_array) -> np.ndarray:
    n = total.shape[0]
    if n <= DENSE_EIG_LIMIT:
        pi = _stationary_gth(total.toarray())
    else:
        # sparse route: (T - I) pi = 0 with one equation replaced by normalization
        a = sp.lil_array(total - sp.identity(n, format="csr"))
        a[n - 1, :] = np.ones(n)
        b = np.zeros(n)
        b[-1] = 1.0
        pi = spsolve(sp.csc_array(a), b)
    pi = pi / pi.sum()
    pi[(pi < 0) & (pi > -1e-14)] = 0.0
    pi = pi / pi.sum()
    if np.any(pi <= 0):
        raise NumericalError("stationary distribution has non-positive entries")
    residual = np.max(np.abs(total @ pi - pi))
    if residual > STATIONARY_TOL:
        raise NumericalError(f"stationarity residual {residual:.2e}")
    return pi


def validate_spec(spec: GeneratorSpec) -> Generator:
    """Check a spec and return the corresponding :class:`Generator`.

    Raises
    ------
    AlphabetError
        Unknown or duplicate labels, duplicate edges, probabilities outside (0, 1].
    RowSumError
        Some state's outgoing probabilities do not sum to 1 within 1e-12.
    ReducibilityError
        The support digraph is not strongly connected.
    """
    s_index = _check_unique(spec.states, "state")
    x_index = _check_unique(spec.alphabet, "symbol")
    ns, nx = len(s_index), len(x_index)
    if ns == 0 or nx == 0:
        raise AlphabetError("generator needs at least one state and one symbol")

    seen = set()
    rows: list[list[int]] = [[] for _ in range(nx)]
    cols: list[list[int]] = [[] for _ in range(nx)]
    vals: list[list[float]] = [[] for _ in range(nx)]
    for a, b, x, p in spec.transitions:
        if a not in s_index or b not in s_index:
            raise AlphabetError(f"transition {a!r}->{b!r} references an unknown state")
        if x not in x_index:
            raise AlphabetError(f"transition {a!r}->{b!r} emits unknown symbol {x!r}")
        if not (0.0 < p <= 1.0):
            raise AlphabetError(f"transition {a!r}->{b!r} on {x!r} has probability {p!r}")
        if (a, b, x) in seen:
            raise AlphabetError(f"duplicate transition {a!r}->{b!r} on {x!r}")
        seen.add((a, b, x))
        k = x_index[x]
        rows[k].append(s_index[b])
        cols[k].append(s_index[a])
        vals[k].append(p)

    matrices = tuple(
        sp.csr_array((vals[k], (rows[k], cols[k])), shape=(ns, ns)) for k in range(nx)
    )
    out = np.zeros(ns)
    for m in matrices:
        out += np.asarray(m.sum(axis=0)).ravel()
    bad = np.nonzero(np.abs(out - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        s = bad[0]
        raise RowSumError(f"state {spec.states[s]!r}: outgoing probability sums to {out[s]!r}")

    total = matrices[0]
    for m in matrices[1:]:
        total = total + m
    total = sp.csr_array(total)
    n_comp, _ = connected_components(total, directed=True, connection="strong")
    if n_comp != 1:
        raise ReducibilityError(f"transition graph has {n_comp} strongly connected components")

    pi = _stationary(total)
    return Generator(
        spec=spec,
        matrices=matrices,
        stationary=pi,
        is_unifilar=_at_most_one_per_column(matrices),
        is_retrodictive=_at_most_one_per_row(matrices),
        _symbol_index=x_index,
    )


def _at_most_one_per_column(matrices) -> bool:
    return all(np.all(np.diff(m.tocsc().indptr) <= 1) for m in matrices)


def _at_most_one_per_row(matrices) -> bool:
    return all(np.all(np.diff(m.indptr) <= 1) for m in matrices)


def is_unifilar(gen: Generator) -> bool:
    """True iff each (state, symbol) pair has at most one successor state."""
    return _at_most_one_per_column(gen.matrices)


def is_retrodictive(gen: Generator) -> bool:
    """True iff each (end state, symbol) pair has at most one predecessor state."""
    return _at_most_one_per_row(gen.matrices)


def word_probability(gen: Generator, word: Sequence[str] | str) -> float:
    """Stationary probability of observing ``word``.

    Single-character alphabets accept plain strings, e.g. ``"0110"``.
    """
    v = gen.stationary
    for k in gen.symbol_indices(word):
        v = gen.matrices[k] @ v
    return float(v.sum())


def _check_budget(n_symbols: int, length: int, budget: int) -> None:
    if n_symbols**length > budget:
        raise ResourceError(
            f"{n_symbols}**{length} words exceeds enumeration budget {budget}"
        )


def forward_vectors(gen: Generator, length: int, budget: int = WORD_BUDGET) -> np.ndarray:
    """Unnormalised end-state vectors for every word of ``length`` symbols.

    Row ``i`` belongs to the word whose symbol indices are the base-|X| digits
    of ``i`` (first symbol most significant); summing a row gives P(word).
    """
    _check_budget(gen.n_symbols, length, budget)
    f = gen.stationary[None, :]
    for _ in range(length):
        # (words, S) -> (words, X, S)
        f = np.stack([(m @ f.T).T for m in gen.matrices], axis=1)
        f = f.reshape(-1, gen.n_states)
    return f


def block_distribution(gen: Generator, length: int, budget: int = WORD_BUDGET) -> np.ndarray:
    """P(x_0 ... x_{L-1}) as an array with one axis per position."""
    p = forward_vectors(gen, length, budget).sum(axis=1)
    return p.reshape((gen.n_symbols,) * length)


def all_words(gen: Generator, length: int) -> list[Word]:
    return [tuple(w) for w in itertools.product(gen.alphabet, repeat=length)]


def block_entropy(gen: Generator, length: int, budget: int = WORD_BUDGET) -> float:
    if length == 0:
        return 0.0
    return shannon_entropy(forward_vectors(gen, length, budget).sum(axis=1))


def entropy_rate_estimate(gen: Generator, L_max: int, budget: int = WORD_BUDGET) -> float:
    """Block-entropy difference ``H(L_max) - H(L_max - 1)`` in bits.

    This is the conditional entropy of the next symbol given ``L_max - 1``
    previous ones, so it approaches the entropy rate from above.
    """
    if L_max < 1:
        raise InputError("L_max must be at least 1")
    _check_budget(gen.n_symbols, L_max, budget)
    f = forward_vectors(gen, L_max - 1, budget)
    prev = shannon_entropy(f.sum(axis=1)) if L_max > 1 else 0.0
    nxt = np.stack([(m @ f.T).T.sum(axis=1) for m in gen.matrices], axis=1)
    return shannon_entropy(nxt) - prev


def entropy_rate_unifilar(gen: Generator) -> float:
    """Exact entropy rate ``sum_s pi(s) H(X | s)`` of a unifilar generator."""
    if not gen.is_unifilar:
        raise NotUnifilarError("exact entropy rate formula needs a unifilar generator")
    emit = gen.emission_probabilities()
    return float(sum(pi * shannon_entropy(emit[:, s]) for s, pi in enumerate(gen.stationary)))


def future_morph_vectors(gen: Generator, tol: float = 1e-10) -> np.ndarray:
    """Conditional word probabilities ``P(w | S_0 = s)`` for a spanning set of words.

    Words are explored breadth first (so length never exceeds |S| - 1) and a
    word is kept only if its probability vector is linearly independent of the
    ones already kept. Every other word's vector lies in their span, so two
    states agree on all kept words iff they have the same future morph.
    Returns an array of shape (kept words, |S|).
    """
    ns = gen.n_states
    kept = [np.ones(ns)]
    basis = [np.ones(ns) / np.sqrt(ns)]
    queue = deque([kept[0]])
    while queue and len(kept) < ns:
        beta = queue.popleft()
        for m in gen.matrices:
            cand = m.T @ beta  # P(x w | s) = sum_s' T[x][s', s] P(w | s')
            r = cand.copy()
            for q in basis:
                r -= (q @ r) * q
            for q in basis:
                r -= (q @ r) * q
            norm = np.linalg.norm(r)
            if norm > tol * max(1.0, np.linalg.norm(cand)):
                kept.append(cand)
                basis.append(r / norm)
                queue.append(cand)
                if len(kept) == ns:
                    break
    return np.array(kept)


def merge_equivalent_states(gen: Generator, tol: float = MORPH_TOL) -> Generator:
    """Merge states whose conditional future distributions coincide.

    Incoming transitions of merged states are redirected to the class
    representative (its label is kept) and summed; the merged state's outgoing
    transitions are the stationary-weighted average of its members', which
    keeps the class occupation stationary. Returns ``gen`` itself when there is
    nothing to merge.
    """
    morphs = future_morph_vectors(gen)
    ns = gen.n_states
    label = -np.ones(ns, dtype=int)
    reps: list[int] = []
    for s in range(ns):
        for c, r in enumerate(reps):
            if np.max(np.abs(morphs[:, s] - morphs[:, r])) <= tol:
                label[s] = c
                break
        else:
            label[s] = len(reps)
            reps.append(s)
    if len(reps) == ns:
        return gen

    nc = len(reps)
    pi = gen.stationary
    weight = np.zeros((nc, ns))
    weight[label, np.arange(ns)] = pi
    weight /= weight.sum(axis=1, keepdims=True)
    lump = np.zeros((nc, ns))
    lump[label, np.arange(ns)] = 1.0
    tensor = np.stack([lump @ (m @ weight.T) for m in gen.matrices])
    tensor[tensor < 1e-300] = 0.0
    # renormalise away roundoff so the merged spec passes the 1e-12 row check
    tensor /= tensor.sum(axis=(0, 1), keepdims=True)
    return Generator.from_tensor(tensor, [gen.states[r] for r in reps], gen.alphabet)


def sample_trajectory(gen: Generator, L: int, seed: int | None = None) -> Word:
    """Sample ``L`` symbols, starting from a stationary-distributed state.

    The stream is a deterministic function of ``seed``.
    """
    if L < 0:
        raise InputError("L must be non-negative")
    rng = np.random.default_rng(seed)
    ns = gen.n_states
    # per start state: cumulative probabilities over (symbol, end state) edges
    edges = []
    for s in range(ns):
        targets, symbols, probs = [], [], []
        for k, m in enumerate(gen.matrices):
            col = m[:, [s]].tocoo()
            targets.extend(col.row.tolist())
            symbols.extend([k] * col.nnz)
            probs.extend(col.data.tolist())
        cum = np.cumsum(probs)
        cum[-1] = np.inf
        edges.append((np.array(targets), np.array(symbols), cum))
    s = int(rng.choice(ns, p=gen.stationary))
    u = rng.random(L)
    out = np.empty(L, dtype=int)
    for t in range(L):
        targets, symbols, cum = edges[s]
        j = int(np.searchsorted(cum, u[t], side="right"))
        out[t] = symbols[j]
        s = int(targets[j])
    return tuple(gen.alphabet[k] for k in out)
