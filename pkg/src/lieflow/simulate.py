"""Monte Carlo paths of killed Levy processes with constant characteristics.

Each step of length ``h`` right-multiplies by ``exp(b~ h + sqrt(h) L eta)``
with ``L L^T = 2a`` and then by a Poisson(``mu(G) h``) number of jumps drawn
from ``mu / mu(G)``.  The drift ``b~ = b - sum w x(t)`` absorbs the jump
compensator (x extended by zero off the chart).  Killing has rate ``c``.

On the torus the group is commutative, so drift, Gaussian and jump
increments are summed per path in closed form; this has the same law as the
stepped scheme and no discretisation bias.

Random numbers come from Philox keyed by ``(seed, chunk index)``; chunks have
a fixed size, so ensembles do not depend on the number of worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InfiniteJumpMass, NonConstantCharacteristics
from .fourier import FourierCoefficients, evaluate
from .generator import Characteristics
from .groups import GroupElement, GroupId, exp_params, identity, mul_params

CHUNK = 8192


@dataclass(frozen=True)
class PathConfig:
    t_end: float
    steps: int = 1
    n_paths: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.steps < 1 or self.n_paths < 1:
            raise ValueError("steps and n_paths must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    group: GroupId
    points: np.ndarray   # (n_paths, p) endpoint parameters
    alive: np.ndarray    # (n_paths,) bool
    meta: dict = field(default_factory=dict)

    @property
    def endpoints(self) -> list[GroupElement]:
        return [GroupElement(self.group, p) for p in self.points]

    @property
    def surviving_fraction(self) -> float:
        return float(np.mean(self.alive))

    def __len__(self):
        return len(self.alive)


def _rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) | (int(chunk) << 64)))


def _diffusion_factor(a: np.ndarray) -> np.ndarray:
    # L with L L^T = 2a; eigen-factorisation tolerates singular a
    lam, vec = np.linalg.eigh(2.0 * 0.5 * (a + a.T))
    return vec * np.sqrt(np.clip(lam, 0.0, None))


def _chunk(char, c, drift, chol, jumps, cfg: PathConfig, start: np.ndarray, idx: int, n: int):
    group = char.group
    rng = _rng(cfg.seed, idx)
    t, steps = cfg.t_end, cfg.steps
    h = t / steps
    mass = jumps.total_mass
    probs = jumps.weights / mass if mass > 0 else None
    dim = group.dim
    if group.is_torus:
        x = np.broadcast_to(drift * t, (n, dim)).copy()
        if np.any(chol):
            x += np.sqrt(t) * rng.standard_normal((n, dim)) @ chol.T
        if mass > 0:
            counts = rng.poisson(mass * t, size=n)
            which = rng.choice(len(probs), size=int(counts.sum()), p=probs)
            owner = np.repeat(np.arange(n), counts)
            np.add.at(x, owner, jumps.points[which])
        pts = mul_params(group, start[None, :], x)
    else:
        pts = np.broadcast_to(start, (n, group.param_size)).copy()
        diffuse = bool(np.any(chol))
        for _ in range(steps):
            v = np.broadcast_to(drift * h, (n, dim))
            if diffuse:
                v = v + np.sqrt(h) * rng.standard_normal((n, dim)) @ chol.T
            pts = mul_params(group, pts, exp_params(group, v))
            if mass > 0:
                counts = rng.poisson(mass * h, size=n)
                for r in range(int(counts.max(initial=0))):
                    sel = np.nonzero(counts > r)[0]
                    which = rng.choice(len(probs), size=len(sel), p=probs)
                    pts[sel] = mul_params(group, pts[sel], jumps.points[which])
    if c > 0:
        alive = rng.random(n) < np.exp(-c * t)
    else:
        alive = np.ones(n, dtype=bool)
    return pts, alive


def simulate_paths(
    char: Characteristics,
    cfg: PathConfig,
    start: GroupElement | None = None,
    threads: int = 1,
) -> PathEnsemble:
    if not char.is_constant:
        raise NonConstantCharacteristics("simulation needs constant characteristics")
    start = start or identity(char.group)
    c, b, a = char.constant_values()
    jumps = char.jumps
    mass = jumps.total_mass
    if not np.isfinite(mass) or np.any(~np.isfinite(jumps.weights)):
        raise InfiniteJumpMass("Levy measure mass is not finite")
    if np.any(jumps.weights < 0):
        raise ValueError("negative Levy weights cannot be simulated")
    drift = b - jumps.first_moment
    chol = _diffusion_factor(a)
    sizes = [min(CHUNK, cfg.n_paths - i) for i in range(0, cfg.n_paths, CHUNK)]
    args = [(char, c, drift, chol, jumps, cfg, start.params, i, n) for i, n in enumerate(sizes)]
    if threads > 1 and len(args) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda x: _chunk(*x), args))
    else:
        parts = [_chunk(*x) for x in args]
    points = np.concatenate([p for p, _ in parts])
    alive = np.concatenate([al for _, al in parts])
    meta = dict(t_end=cfg.t_end, steps=cfg.steps, n_paths=cfg.n_paths, seed=cfg.seed,
                start=start.params.tolist())
    return PathEnsemble(char.group, points, alive, meta)


def empirical_semigroup(f: FourierCoefficients | Callable, ens: PathEnsemble) -> tuple[float, float]:
    """Mean of ``f`` over endpoints, dead paths counted as 0, and its standard error."""
    vals = evaluate(f, ens.points) if isinstance(f, FourierCoefficients) else f(ens.points)
    vals = np.where(ens.alive, np.asarray(vals, dtype=float), 0.0)
    n = len(vals)
    se = float(np.std(vals, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return float(np.mean(vals)), se


def small_time_limit(
    char: Characteristics,
    f: FourierCoefficients | Callable,
    start: GroupElement | None,
    ts: Sequence[float],
    n_paths: int = 100_000,
    seed: int = 0,
    threads: int = 1,
) -> list[tuple[float, float, float]]:
    """``(t, E[f(Y_t)] / t, standard error / t)`` for each ``t`` (single-step paths)."""
    rows = []
    for t in ts:
        ens = simulate_paths(char, PathConfig(t, 1, n_paths, seed), start, threads)
        est, se = empirical_semigroup(f, ens)
        rows.append((float(t), est / t, se / t))
    return rows
