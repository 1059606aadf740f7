"""Unitary dual, representation matrices and derived representations.

Weights are labelled by integer tuples: ``(n_1, ..., n_d)`` on the torus and
``(k,)`` with ``k = 2l`` on SU(2).  The weight norm is the Euclidean norm of
``n`` on the torus and ``k`` on SU(2).

SU(2) representations use the standard angular-momentum basis
``|l, m>``, ``m = l, l-1, ..., -l``, where the derived representation is
``dpi(X_j) = -i J_j``.  In that basis ``dpi(X_3)`` is diagonal and
``pi(g) = exp(alpha dpi(X_3)) exp(beta dpi(X_2)) exp(gamma dpi(X_3))``
for the ZYZ Euler angles of ``g``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .groups import GroupElement, GroupId, euler_from_params


@dataclass(frozen=True, order=True)
class Weight:
    norm: float
    label: tuple

    @classmethod
    def of(cls, label) -> "Weight":
        label = tuple(int(v) for v in np.atleast_1d(label))
        return cls(float(np.sqrt(sum(v * v for v in label))), label)


@dataclass(frozen=True)
class Irrep:
    group: GroupId
    weight: Weight

    @property
    def label(self) -> tuple:
        return self.weight.label

    @property
    def dim(self) -> int:
        if self.group.is_torus:
            return 1
        return self.weight.label[0] + 1


def irrep(group: GroupId, label) -> Irrep:
    w = Weight.of(label)
    if group.is_torus and len(w.label) != group.d:
        raise ValueError(f"torus{group.d} weights need {group.d} integers, got {w.label}")
    if not group.is_torus and (len(w.label) != 1 or w.label[0] < 0):
        raise ValueError(f"SU2 weights are a single k >= 0, got {w.label}")
    return Irrep(group, w)


def enumerate_weights(group: GroupId, max_norm: float) -> list[Weight]:
    """All weights with ``|lambda| <= max_norm``, sorted by (norm, label)."""
    if max_norm < 0:
        return []
    m = int(np.floor(max_norm + 1e-12))
    if group.is_torus:
        labels = [
            lab for lab in itertools.product(range(-m, m + 1), repeat=group.d)
            if sum(v * v for v in lab) <= max_norm**2 + 1e-9
        ]
    else:
        labels = [(k,) for k in range(m + 1)]
    return sorted(Weight.of(lab) for lab in labels)


@lru_cache(maxsize=1024)
def _derived(group: GroupId, label: tuple) -> np.ndarray:
    if group.is_torus:
        d = 1j * np.asarray(label, dtype=float)
        out = d.reshape(group.d, 1, 1).astype(complex)
    else:
        k = label[0]
        ell = k / 2.0
        m = ell - np.arange(k + 1)
        j3 = np.diag(m).astype(complex)
        # J+ |m> = sqrt(l(l+1) - m(m+1)) |m+1>; basis index i has m = l - i
        jp = np.zeros((k + 1, k + 1), dtype=complex)
        for i in range(1, k + 1):
            mm = m[i]
            jp[i - 1, i] = np.sqrt(ell * (ell + 1) - mm * (mm + 1))
        jm = jp.conj().T
        j1 = 0.5 * (jp + jm)
        j2 = -0.5j * (jp - jm)
        out = -1j * np.stack([j1, j2, j3])
    out.setflags(write=False)
    return out


def derived_rep(ir: Irrep) -> np.ndarray:
    """Matrices ``dpi(X_i)`` stacked as an array of shape (dim, d_pi, d_pi)."""
    return _derived(ir.group, ir.label)


@lru_cache(maxsize=1024)
def _derived_products(group: GroupId, label: tuple) -> np.ndarray:
    d = _derived(group, label)
    out = np.einsum("jab,kbc->jkac", d, d)
    out.setflags(write=False)
    return out


def derived_products(ir: Irrep) -> np.ndarray:
    """``dpi(X_j) dpi(X_k)`` as an array of shape (dim, dim, d_pi, d_pi)."""
    return _derived_products(ir.group, ir.label)


def casimir(ir: Irrep) -> np.ndarray:
    d = derived_rep(ir)
    return np.einsum("iab,ibc->ac", d, d)


def _su2_small_d(ir: Irrep, beta: np.ndarray) -> np.ndarray:
    x2 = derived_rep(ir)[1]
    ub, inv = np.unique(beta, return_inverse=True)
    mats = scipy.linalg.expm(ub[:, None, None] * x2[None])
    return mats[inv.reshape(-1)]


def rep_matrices(ir: Irrep, points: np.ndarray) -> np.ndarray:
    """``pi(g)`` for a batch of parameter vectors; shape (n, d_pi, d_pi)."""
    points = np.atleast_2d(points)
    if ir.group.is_torus:
        n = np.asarray(ir.label, dtype=float)
        return np.exp(1j * points @ n)[:, None, None]
    k = ir.label[0]
    if k == 0:
        return np.ones((len(points), 1, 1), dtype=complex)
    alpha, beta, gamma = euler_from_params(points)
    m = k / 2.0 - np.arange(k + 1)
    ea = np.exp(-1j * alpha[:, None] * m[None, :])
    eg = np.exp(-1j * gamma[:, None] * m[None, :])
    return ea[:, :, None] * _su2_small_d(ir, beta) * eg[:, None, :]


def rep_matrix(ir: Irrep, g: GroupElement) -> np.ndarray:
    if g.group != ir.group:
        raise ValueError(f"irrep of {ir.group} evaluated on {g.group}")
    return rep_matrices(ir, g.params[None, :])[0]


@lru_cache(maxsize=256)
def _conjugator(group: GroupId, label: tuple) -> np.ndarray:
    # complex conjugation of matrix coefficients: conj(pi(g)) = C pi(g) C^{-1}
    # with C = pi(exp(pi X_2)) because conj(g) = w g w^{-1} for w = exp(pi X_2)
    ir = Irrep(group, Weight.of(label))
    c = scipy.linalg.expm(np.pi * derived_rep(ir)[1])
    c = np.real_if_close(c, tol=1000).astype(complex)
    c.setflags(write=False)
    return c


def conjugation_matrix(ir: Irrep) -> np.ndarray:
    """Matrix ``C`` with ``conj(pi(g)) = C pi(g) C^{-1}`` (SU2 only)."""
    if ir.group.is_torus:
        raise ValueError("on the torus conjugation maps the weight n to -n")
    return _conjugator(ir.group, ir.label)
