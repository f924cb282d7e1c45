"""Free-group words, simple random walks on F_k and hitting experiments for balls.

Letters are nonzero integers: generator ``i`` is ``i`` and its inverse ``-i``.
The walk is non-lazy: each step multiplies on the right by one of the ``2k``
letters chosen uniformly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .seeding import rng

Word = tuple[int, ...]

CHUNK = 1000  # trials per random stream; fixes results independently of threads


def free_reduce(word: Iterable[int]) -> Word:
    stack: list[int] = []
    for letter in word:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def is_reduced(word: Sequence[int]) -> bool:
    return all(a != -b for a, b in zip(word, word[1:]))


def cyclic_reduce(word: Iterable[int]) -> Word:
    w = free_reduce(word)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i:j + 1]


def word_length(word: Iterable[int]) -> int:
    """Word metric distance from the identity in F_k."""
    return len(free_reduce(word))


def ball_size(k: int, r: int) -> int:
    """|B_r(id)| in F_k with the standard generators."""
    if r < 0:
        return 0
    if k == 1:
        return 2 * r + 1
    return 1 + 2 * k * ((2 * k - 1) ** r - 1) // (2 * k - 2)


def sphere_size(k: int, n: int) -> int:
    return 1 if n == 0 else 2 * k * (2 * k - 1) ** (n - 1)


def letters_from_codes(codes: np.ndarray, k: int) -> np.ndarray:
    """Map uniform codes 0..2k-1 to letters 1..k, -1..-k."""
    codes = np.asarray(codes)
    return np.where(codes < k, codes + 1, k - 1 - codes).astype(np.int8)


def random_letters(gen: np.random.Generator, k: int, size) -> np.ndarray:
    return letters_from_codes(gen.integers(0, 2 * k, size=size), k)


@dataclass(frozen=True)
class Trajectory:
    lengths: np.ndarray
    final: Word


def simple_random_walk(k: int, steps: int, seed: int, start: Sequence[int] = ()) -> Trajectory:
    """Word lengths ``|w_0| .. |w_steps|`` of the simple random walk on F_k."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    letters = random_letters(rng(seed, "walk-trajectory"), k, steps)
    lengths, final = kernels.walk_lengths(letters, np.asarray(free_reduce(start), dtype=np.int8))
    return Trajectory(lengths, tuple(int(x) for x in final))


def return_probabilities(k: int, n_max: int) -> np.ndarray:
    """log P(w_n = e) for n = 0..n_max, -inf for odd n.

    The reduced length is a birth-death chain: 0 -> 1 surely, otherwise up
    with probability (2k-1)/2k and down with probability 1/2k.
    """
    up = (2 * k - 1) / (2 * k)
    down = 1 / (2 * k)
    prob = np.zeros(n_max + 2)
    prob[0] = 1.0
    log_scale = 0.0
    out = np.full(n_max + 1, -np.inf)
    out[0] = 0.0
    for n in range(1, n_max + 1):
        nxt = np.zeros_like(prob)
        nxt[1] += prob[0]
        nxt[2:] += up * prob[1:-1]
        nxt[:-2] += down * prob[1:-1]
        total = nxt.sum()
        prob = nxt / total
        log_scale += math.log(total)
        if prob[0] > 0:
            out[n] = math.log(prob[0]) + log_scale
    return out


def estimate_spectral_radius(k: int, n_max: int) -> float:
    """max over even n <= n_max of P(w_n = e)^(1/n); a lower estimate of the radius."""
    if n_max % 2 or n_max < 2:
        raise ValueError("n_max must be a positive even integer")
    if k < 1:
        raise ValueError("k must be >= 1")
    logp = return_probabilities(k, n_max)
    n = np.arange(2, n_max + 1, 2)
    return float(np.exp(np.max(logp[n] / n)))


def kesten_radius(k: int) -> float:
    return math.sqrt(2 * k - 1) / k


def phi_holds(k: int, kappa: float, nu: float, phi: int, r_max: int = 1000) -> bool:
    """(2k kappa^phi)^r / (1 - kappa) <= nu^-r for every r in 1..r_max."""
    base = math.log(2 * k) + phi * math.log(kappa) + math.log(nu)
    r = np.arange(1, r_max + 1)
    return bool(np.all(r * base - math.log(1 - kappa) <= 1e-12))


def compute_phi(k: int, kappa: float, nu: float, r_max: int = 1000) -> int:
    """Smallest positive integer phi satisfying :func:`phi_holds`."""
    if not 0 < kappa < 1:
        raise ValueError("kappa must lie in (0, 1)")
    if not nu > 1:
        raise ValueError("nu must be > 1")
    # r = 1 is the binding case once the base is below one
    phi = max(1, math.ceil((math.log(1 - kappa) - math.log(2 * k * nu)) / math.log(kappa)) - 2)
    while phi > 1 and phi_holds(k, kappa, nu, phi - 1, r_max):
        phi -= 1
    while not phi_holds(k, kappa, nu, phi, r_max):
        phi += 1
    return phi


@dataclass(frozen=True)
class WalkParams:
    k: int
    kappa: float
    nu: float
    phi: int
    r: int
    horizon: int
    trials: int
    seed: int
    random_start: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if not self.nu > 1:
            raise ValueError("nu must be > 1")
        if self.phi < 1 or self.r < 1:
            raise ValueError("phi and r must be >= 1")
        if self.horizon < self.phi * self.r:
            raise ValueError("horizon must be >= phi * r")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def truncation_tail(k: int, kappa: float, r: int, horizon: int) -> float:
    """Bound on P(hit B_r at some step n > horizon): |B_r| kappa^(T+1) / (1 - kappa)."""
    return ball_size(k, r) * kappa ** (horizon + 1) / (1 - kappa)


def default_horizon(k: int, kappa: float, phi: int, r: int, tail: float = 1e-4) -> int:
    T = phi * r
    while truncation_tail(k, kappa, r, T) > tail:
        T += 1
    return T


def start_word(params: WalkParams) -> Word:
    """Reduced word at distance exactly (1 + phi) r from the identity."""
    n = (1 + params.phi) * params.r
    if not params.random_start:
        return (1,) * n
    gen = rng(params.seed, "walk-start")
    word: list[int] = []
    while len(word) < n:
        letter = int(random_letters(gen, params.k, 1)[0])
        if not word or word[-1] != -letter:
            word.append(letter)
    return tuple(word)


@dataclass
class HittingReport:
    trials: int
    hits: int
    empirical_freq: float
    bound: float
    truncation_tail: float
    sigma: float
    first_hit_min: int | None
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def hitting_experiment(params: WalkParams, threads: int = 1,
                       start: Sequence[int] | None = None) -> HittingReport:
    """Monte Carlo frequency of the walk entering B_r(id) within the horizon."""
    word = start_word(params) if start is None else free_reduce(start)
    if len(word) < (1 + params.phi) * params.r:
        raise ValueError("start must lie at distance >= (1 + phi) r from the identity")
    init = np.asarray(word, dtype=np.int8)

    def run_chunk(i: int) -> np.ndarray:
        size = min(CHUNK, params.trials - i * CHUNK)
        letters = random_letters(rng(params.seed, "walk-hit", params.r, i),
                                 params.k, (size, params.horizon))
        return kernels.walk_hits(letters, init, params.r)

    n_chunks = -(-params.trials // CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run_chunk, range(n_chunks)))
    else:
        parts = [run_chunk(i) for i in range(n_chunks)]
    first = np.concatenate(parts)
    hit = first >= 0
    hits = int(hit.sum())
    freq = hits / params.trials
    bound = params.nu ** (-params.r)
    tail = truncation_tail(params.k, params.kappa, params.r, params.horizon)
    b = min(1.0, bound + tail)
    sigma = math.sqrt(b * (1 - b) / params.trials)
    return HittingReport(
        trials=params.trials,
        hits=hits,
        empirical_freq=freq,
        bound=bound,
        truncation_tail=tail,
        sigma=sigma,
        first_hit_min=int(first[hit].min()) if hits else None,
        passed=freq <= bound + tail + 3 * sigma,
    )
