"""Small reference generators and random generator ensembles."""

from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import connected_components

from .hmm import Generator, GeneratorSpec, validate_spec

KINDS = ("general", "unifilar", "retrodictive")


def fair_coin() -> Generator:
    return validate_spec(GeneratorSpec(("s",), ("0", "1"), (("s", "s", "0", 0.5), ("s", "s", "1", 0.5))))


def constant() -> Generator:
    return validate_spec(GeneratorSpec(("s",), ("0",), (("s", "s", "0", 1.0),)))


def period_two() -> Generator:
    return validate_spec(
        GeneratorSpec(("a", "b"), ("0", "1"), (("a", "b", "0", 1.0), ("b", "a", "1", 1.0)))
    )


def _irreducible(tensor: np.ndarray) -> bool:
    n, _ = connected_components(tensor.sum(axis=0) > 0, directed=True, connection="strong")
    return n == 1


def _weights(rng: np.random.Generator, k: int, floor: float) -> np.ndarray:
    # Dirichlet weights kept away from zero so every edge is clearly present
    w = rng.dirichlet(np.ones(k))
    return floor + (1 - k * floor) * w


def random_tensor(
    rng: np.random.Generator,
    n_states: int,
    n_symbols: int,
    kind: str = "general",
    density: float = 0.5,
    floor: float = 0.05,
) -> np.ndarray:
    """Random irreducible ``T[x, s', s]`` of the requested structural kind.

    ``general`` places each (symbol, end state) edge independently with
    probability ``density``; ``unifilar`` sends each emitted symbol to a single
    end state; ``retrodictive`` builds each symbol's edges from a permutation so
    no (end state, symbol) pair has two sources. Draws are repeated until the
    support digraph is strongly connected.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    while True:
        t = np.zeros((n_symbols, n_states, n_states))
        perms = [rng.permutation(n_states) for _ in range(n_symbols)]
        for s in range(n_states):
            if kind == "general":
                mask = rng.random((n_symbols, n_states)) < density
                if not mask.any():
                    mask[rng.integers(n_symbols), rng.integers(n_states)] = True
                xs, ts = np.nonzero(mask)
            else:
                k = rng.integers(1, n_symbols + 1)
                xs = rng.choice(n_symbols, size=k, replace=False)
                if kind == "unifilar":
                    ts = rng.integers(n_states, size=k)
                else:
                    ts = np.array([perms[x][s] for x in xs])
            f = min(floor, 0.5 / len(xs))
            t[xs, ts, s] = _weights(rng, len(xs), f)
        if _irreducible(t):
            return t


def random_generator(
    rng: np.random.Generator, n_states: int, n_symbols: int, kind: str = "general", **kw
) -> Generator:
    return Generator.from_tensor(random_tensor(rng, n_states, n_symbols, kind, **kw))


def random_suite(seed: int, count: int, max_states: int = 5, max_symbols: int = 3) -> list[Generator]:
    """``count`` random generators cycling through the structural kinds."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = KINDS[i % len(KINDS)]
        ns = int(rng.integers(1, max_states + 1))
        nx = int(rng.integers(1, max_symbols + 1))
        out.append(random_generator(rng, ns, nx, kind))
    return out
