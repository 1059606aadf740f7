"""Positive-maximum-principle checks and recovery of characteristics.

``pmp_check`` locates the maximum of each test function on a grid, polishes
it by Newton/gradient ascent in the chart at that point and tests
``Af(max) <= tol`` whenever ``f(max) >= 0``.

``extract_characteristics`` treats a left-invariant operator as a black box
``A(f, sigma)``.  It only evaluates ``A`` at the identity, on band-limited
approximations of localised test functions:

* ``c = -A1(e)``;
* the plateau ``psi`` (0 near e, 1 outside the delta-ball) gives the jump
  mass away from e;
* ``eps * x_i`` and ``eps * (xi . x)^2 / 2`` (``eps`` a bump equal to 1 near
  e, 0 outside the delta-ball) give the drift and the diffusion matrix;
* ``psi * x_i`` with a smooth cutoff at the chart edge gives the jump first
  moment, needed to undo the compensator drift.

Exact jets of the band-limited approximations are used in the linear
solves, so truncation error only enters through values at the jump targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidTestFunction, SeparationViolated
from .fourier import FourierCoefficients, constant, evaluate, forward_ft, jet, multiply_functions, real_part
from .groups import (
    Chart,
    GroupElement,
    GroupId,
    exp_params,
    haar_quadrature,
    identity,
    identity_params,
    log_params,
    mul_params,
    random_elements,
)
from .reps import enumerate_weights, irrep

Operator = Callable[[FourierCoefficients, GroupElement], float]


class Violation(NamedTuple):
    function_id: int
    point: np.ndarray
    value: float
    generator_value: float


@dataclass
class PmpReport:
    n_tested: int
    violations: list = field(default_factory=list)
    tol: float = 1e-7
    n_skipped: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return dict(
            n_tested=self.n_tested,
            n_skipped=self.n_skipped,
            tol=self.tol,
            ok=self.ok,
            violations=[
                dict(function_id=v.function_id, point=[float(x) for x in v.point],
                     value=float(v.value), generator_value=float(v.generator_value))
                for v in self.violations
            ],
        )


def default_grid(group: GroupId) -> np.ndarray:
    return haar_quadrature(group, 256 if group.is_torus and group.d == 1 else 24).points


def _polish(f: FourierCoefficients, p: np.ndarray, iters: int = 20) -> tuple[np.ndarray, float]:
    group = f.group
    cur = p.copy()
    val = float(evaluate(f, cur)[0])
    step = 0.5
    for _ in range(iters):
        j = jet(f, cur, order=2)
        grad, hess = j.grad[0], j.hess[0]
        hs = 0.5 * (hess + hess.T)
        if np.linalg.norm(grad) < 1e-11:
            break
        if np.all(np.linalg.eigvalsh(hs) < 0):
            v = -np.linalg.solve(hs, grad)
        else:
            v = step * grad
        for _ in range(12):
            cand = mul_params(group, cur, exp_params(group, v))
            cval = float(evaluate(f, cand[None])[0])
            if cval >= val:
                break
            v = 0.5 * v
        else:
            break
        cur, val = cand, cval
    return cur, val


def locate_max(f: FourierCoefficients, grid: np.ndarray, n_candidates: int = 8, iters: int = 20):
    """Polished global maximum: parameters and value."""
    vals = np.asarray(evaluate(f, grid), dtype=float)
    order = np.argsort(-vals, kind="stable")[:n_candidates]
    best_p, best_v = grid[order[0]], vals[order[0]]
    for i in order:
        p, v = _polish(f, grid[i], iters)
        if v > best_v:
            best_p, best_v = p, v
    return best_p, best_v


def locate_maxima(test_fns, grid: np.ndarray | None = None, polish_iters: int = 20) -> list:
    """Polished maxima of each test function; reusable across operators."""
    if not test_fns:
        return []
    grid = default_grid(test_fns[0].group) if grid is None else np.atleast_2d(grid)
    return [locate_max(f, grid, iters=polish_iters) for f in test_fns]


def pmp_check(
    A: Operator,
    test_fns: Sequence[FourierCoefficients],
    grid: np.ndarray | None = None,
    tol: float = 1e-7,
    polish_iters: int = 20,
    maxima: Sequence | None = None,
) -> PmpReport:
    """PMP test of ``A`` over ``test_fns``; ``maxima`` may come from :func:`locate_maxima`."""
    if not test_fns:
        return PmpReport(0, [], tol)
    group = test_fns[0].group
    if maxima is None:
        maxima = locate_maxima(test_fns, grid, polish_iters)
    report = PmpReport(len(test_fns), [], tol)
    for fid, (f, (p, v)) in enumerate(zip(test_fns, maxima)):
        if v < 0:
            report.n_skipped += 1
            continue
        av = float(np.real(A(f, GroupElement(group, p))))
        if av > tol:
            report.violations.append(Violation(fid, np.array(p), v, av))
    return report


def almost_positive_check(
    A: Operator,
    test_fns: Sequence[FourierCoefficients],
    tol: float = 1e-7,
    grid: np.ndarray | None = None,
) -> PmpReport:
    """``Af(e) >= -tol`` for test functions with ``f >= 0`` and ``f(e) = 0``."""
    if not test_fns:
        return PmpReport(0, [], tol)
    group = test_fns[0].group
    grid = default_grid(group) if grid is None else np.atleast_2d(grid)
    e = identity(group)
    report = PmpReport(len(test_fns), [], tol)
    for fid, f in enumerate(test_fns):
        fe = float(evaluate(f, e)[0])
        fmin = float(np.min(evaluate(f, grid)))
        if abs(fe) > 1e-10 or fmin < -tol:
            raise InvalidTestFunction(f"test function {fid}: f(e) = {fe:.3g}, min f = {fmin:.3g}")
        av = float(np.real(A(f, e)))
        if av < -tol:
            report.violations.append(Violation(fid, e.params.copy(), fe, av))
    return report


def _default_norm(group: GroupId) -> int:
    return 8 if group.is_torus else 4


def random_test_functions(
    group: GroupId, n: int = 100, seed: int = 0, max_norm: float | None = None
) -> list[FourierCoefficients]:
    """Real band-limited functions with Gaussian coefficients scaled by ``|lambda|^-4``."""
    max_norm = _default_norm(group) if max_norm is None else max_norm
    rng = np.random.default_rng(seed)
    weights = enumerate_weights(group, max_norm)
    out = []
    for _ in range(n):
        entries = {}
        for w in weights:
            d = irrep(group, w.label).dim
            scale = 1.0 if w.norm == 0 else w.norm**-4
            entries[w.label] = scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        out.append(real_part(FourierCoefficients(group, entries, max_norm, real=False)))
    return out


def anchored_test_functions(
    group: GroupId, n: int = 100, seed: int = 0, max_norm: float | None = None
) -> list[FourierCoefficients]:
    """Squares ``(g - g(e))^2`` of random band-limited ``g``: nonnegative, zero at e."""
    base = random_test_functions(group, n, seed, (max_norm or _default_norm(group)) / 2)
    e = identity(group)
    out = []
    for g in base:
        h = g - constant(group, float(evaluate(g, e)[0]))
        out.append(multiply_functions(h, h))
    return out


# ---------------------------------------------------------------------------
# extraction


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


@dataclass
class ExtractedCharacteristics:
    c: float
    b: np.ndarray
    a: np.ndarray
    jump_mass_outside: float
    jump_first_moment: np.ndarray
    delta: float
    residuals: dict

    def to_dict(self) -> dict:
        return dict(
            c=self.c, b=self.b.tolist(), a=self.a.tolist(),
            jump_mass_outside=self.jump_mass_outside,
            jump_first_moment=self.jump_first_moment.tolist(),
            delta=self.delta, residuals=self.residuals,
        )


def _extraction_norm(group: GroupId, resolution: int | None) -> tuple[int, int]:
    if resolution is None:
        resolution = {1: 2049, 2: 129, 3: 41}.get(group.d, 41) if group.is_torus else 27
    m = (resolution - 1) // 4 if group.is_torus else (resolution - 3) // 2
    return max(m, 1), resolution


def _probe_points(group: GroupId, resolution: int) -> np.ndarray:
    # off-node sample for measuring the sup error of band-limited test functions
    if group.is_torus:
        pts = haar_quadrature(group, min(resolution, 4096 if group.d == 1 else 64)).points
        return pts + np.pi / min(resolution, 4096 if group.d == 1 else 64)
    return random_elements(group, 4096, np.random.default_rng(0))


class _Scale(NamedTuple):
    c: float
    b: np.ndarray
    a: np.ndarray
    mass: float
    first: np.ndarray
    leak: dict


def _solve_once(A: Operator, group: GroupId, chart: Chart, delta: float, max_norm: int, resolution: int) -> _Scale:
    dim = group.dim
    e = identity(group)
    ep = identity_params(group)
    probe = _probe_points(group, resolution)

    def A_e(F):
        return float(np.real(A(F, e)))

    def approx(func):
        F = forward_ft(func, group, max_norm, resolution)
        return F, float(np.max(np.abs(evaluate(F, probe) - func(probe))))

    def radius(p):
        return np.linalg.norm(log_params(group, p), axis=-1)

    def bump(p):
        return smooth_step((delta - radius(p)) / (0.5 * delta))

    edge = 0.1 * chart.radius

    def edge_cut(p):
        return smooth_step((chart.radius - radius(p)) / edge)

    c = -A_e(constant(group, 1.0))

    psi, leak_psi = approx(lambda p: 1.0 - bump(p))
    moments, leak_first = [], 0.0
    for i in range(dim):
        F, lk = approx(lambda p, i=i: (1.0 - bump(p)) * edge_cut(p) * log_params(group, p)[..., i])
        moments.append(F)
        leak_first = max(leak_first, lk)
    tests = []
    for i in range(dim):
        tests.append(approx(lambda p, i=i: bump(p) * log_params(group, p)[..., i]))
    pairs = [(j, k) for j in range(dim) for k in range(j, dim)]
    for j, k in pairs:
        xi = np.zeros(dim)
        xi[j] += 1.0
        if k != j:
            xi[k] += 1.0
        tests.append(approx(lambda p, xi=xi: bump(p) * 0.5 * (log_params(group, p) @ xi) ** 2))

    values = {id(F): A_e(F) for F in [psi, *moments] + [F for F, _ in tests]}
    jets = {key: jet(F, ep, order=2) for key, F in
            [(id(F), F) for F in [psi, *moments] + [F for F, _ in tests]]}

    def residual_part(F, b, a, mass, first):
        # A F(e) minus every term except the far-jump values sum_w F(t)
        j = jets[id(F)]
        local = -c * j.value[0] + b @ j.grad[0] + np.sum(a * j.hess[0])
        return values[id(F)] - local + mass * j.value[0] + first @ j.grad[0]

    b = np.zeros(dim)
    a = np.zeros((dim, dim))
    mass, first = 0.0, np.zeros(dim)
    # the local jets of the test functions are tiny, so a few sweeps converge
    for _ in range(4):
        mass = residual_part(psi, b, a, mass, first)
        first = np.array([residual_part(F, b, a, mass, first) for F in moments])
        rows, rhs = [], []
        for F, _ in tests:
            jt = jets[id(F)]
            h = 0.5 * (jt.hess[0] + jt.hess[0].T)
            rows.append(np.concatenate([jt.grad[0], [h[j, k] * (1 if j == k else 2) for j, k in pairs]]))
            rhs.append(values[id(F)] + c * jt.value[0] + mass * jt.value[0] + first @ jt.grad[0])
        sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        b = sol[:dim]
        a = np.zeros((dim, dim))
        for (j, k), v in zip(pairs, sol[dim:]):
            a[j, k] = a[k, j] = v
    leak = dict(
        psi=leak_psi,
        first=leak_first,
        linear=max(lk for _, lk in tests[:dim]),
        quadratic=max(lk for _, lk in tests[dim:]),
    )
    return _Scale(c, b, a, mass, first, leak)


def extract_characteristics(
    A: Operator,
    group: GroupId,
    chart: Chart | None = None,
    delta: float = 1.0,
    resolution: int | None = None,
) -> ExtractedCharacteristics:
    """Recover ``(c, b, a)`` and the jump mass outside the delta-ball from ``A``.

    ``A`` must be left-invariant with jumps separated from e by more than
    ``delta``.  ``resolution`` is the quadrature resolution of the test
    functions (their band limit follows the resolution rule).  Residuals
    bound the truncation error at the jump targets (sup error of each test
    function times the extracted mass) plus the change of each field between
    ``delta`` and ``0.75 * delta``.  Raises :class:`SeparationViolated` when
    the jump correction moves by more than 10% between the two scales.
    """
    chart = chart or Chart()
    if not 0 < delta < chart.radius:
        raise ValueError("delta must lie in (0, chart radius)")
    max_norm, resolution = _extraction_norm(group, resolution)
    s1 = _solve_once(A, group, chart, delta, max_norm, resolution)
    s2 = _solve_once(A, group, chart, 0.75 * delta, max_norm, resolution)
    far = abs(s1.mass)
    lk = s1.leak
    res_mass = abs(s1.mass - s2.mass) + far * lk["psi"]
    res_first = float(np.abs(s1.first - s2.first).max() + far * lk["first"])
    jump_shift = abs(s1.mass - s2.mass) + float(np.abs(s1.first - s2.first).max())
    res = dict(
        c=float(abs(s1.c - s2.c)),
        b=float(np.abs(s1.b - s2.b).max() + far * lk["linear"] + res_first),
        a=float(np.abs(s1.a - s2.a).max() + far * lk["quadratic"]),
        jump_mass_outside=float(res_mass),
        jump_first_moment=res_first,
    )
    floor = 1e-6
    scale = abs(s1.mass) + float(np.abs(s1.first).max(initial=0.0))
    if jump_shift > floor and jump_shift > 0.1 * scale:
        raise SeparationViolated(
            f"jump correction changes by {jump_shift:.3g} between delta and 0.75*delta; "
            "jumps are not separated from the identity"
        )
    return ExtractedCharacteristics(s1.c, s1.b, s1.a, s1.mass, s1.first, delta, res)
