"""Error-detection and Knill-Laflamme checks, error-of-state functionals,
worst-codeword search, and the symmetric absorption-emission codewords."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .spin import (
    SpinJ,
    SpinOperator,
    SpinState,
    apply,
    expectation_and_variance,
)

ORTHONORMAL_TOL = 1e-10
_GRID_POLAR = 32
_GRID_AZIMUTH = 64


@dataclass
class CodeSpace:
    """Orthonormal list of codewords sharing one spin-J space."""

    j: SpinJ
    codewords: list[SpinState]

    def __post_init__(self):
        if not self.codewords:
            raise ValueError("code space needs at least one codeword")
        for w in self.codewords:
            if w.j != self.j:
                raise ValueError("codeword dimension does not match the code space")
        basis = self.basis_matrix()
        gram = basis.conj().T @ basis
        if float(np.max(np.abs(gram - np.eye(len(self.codewords))))) > ORTHONORMAL_TOL:
            raise ValueError("codewords are not pairwise orthonormal")

    def basis_matrix(self) -> np.ndarray:
        """dim x K matrix whose columns are the codeword amplitudes."""
        return np.column_stack([w.amplitudes for w in self.codewords])

    def to_json_dict(self) -> dict:
        return {
            "twice_j": self.j.twice_j,
            "codewords": [w.to_json_dict() for w in self.codewords],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CodeSpace":
        if not isinstance(doc, dict):
            raise ValueError("code space document must be a JSON object")
        try:
            j = SpinJ(doc["twice_j"])
            words = [SpinState.from_json_dict(w) for w in doc["codewords"]]
        except KeyError as exc:
            raise ValueError(f"code space document missing field {exc}") from None
        for w in words:
            if w.j != j:
                raise ValueError("codeword twice_j does not match the code space")
        return cls(j, words)


@dataclass
class ErrorSet:
    """Error operators; need not be unitary or Hermitian."""

    ops: list[SpinOperator]

    def __post_init__(self):
        if not self.ops:
            raise ValueError("error set is empty")
        j = self.ops[0].j
        for op in self.ops:
            if op.j != j:
                raise ValueError("error operators act on different spin spaces")
        self.j = j


@dataclass
class RecoverySet:
    """Recovery operators with sum R^dag R <= identity (completeness not required)."""

    ops: list[SpinOperator]

    def __post_init__(self):
        if not self.ops:
            raise ValueError("recovery set is empty")
        j = self.ops[0].j
        total = np.zeros((j.dim, j.dim), dtype=complex)
        for op in self.ops:
            if op.j != j:
                raise ValueError("recovery operators act on different spin spaces")
            total += op.matrix.conj().T @ op.matrix
        slack = np.linalg.eigvalsh(np.eye(j.dim) - total)
        if float(slack.min()) < -1e-9:
            raise ValueError("recovery set exceeds identity: sum R^dag R > I")
        self.j = j


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of an error-detection or Knill-Laflamme check.

    ``violation`` is the worst deviation from the delta_ij structure; it
    mixes two failure modes that are also reported separately:
    ``max_off_diagonal`` (codeword shuffling) and ``max_diagonal_spread``
    (codeword-dependent diagonal, measured against the per-error mean).
    """

    c_matrix: np.ndarray
    violation: float
    passed: bool
    max_off_diagonal: float
    max_diagonal_spread: float


def _delta_structure_violation(block: np.ndarray) -> tuple[complex, float, float]:
    """Fit <i|E|j> = delta_ij * C and measure the residuals."""
    diag = np.diag(block)
    c = complex(diag.mean())
    off = block - np.diag(diag)
    max_off = float(np.max(np.abs(off))) if block.shape[0] > 1 else 0.0
    max_spread = float(np.max(np.abs(diag - c)))
    return c, max_off, max_spread


def detection_check(code: CodeSpace, errors: ErrorSet, tol: float) -> ConditionReport:
    """Check the detection condition <i|E_a|j> = delta_ij C_a for every error."""
    if errors.j != code.j:
        raise ValueError("error set does not match the code space dimension")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    basis = code.basis_matrix()
    c_vec = np.zeros(len(errors.ops), dtype=complex)
    max_off = 0.0
    max_spread = 0.0
    for a, err in enumerate(errors.ops):
        block = basis.conj().T @ err.matrix @ basis
        c_vec[a], off, spread = _delta_structure_violation(block)
        max_off = max(max_off, off)
        max_spread = max(max_spread, spread)
    violation = max(max_off, max_spread)
    return ConditionReport(c_vec, violation, violation <= tol, max_off, max_spread)


def kl_check(code: CodeSpace, errors: ErrorSet, tol: float) -> ConditionReport:
    """Check the Knill-Laflamme condition <i|E_a^dag E_b|j> = delta_ij C_ab."""
    if errors.j != code.j:
        raise ValueError("error set does not match the code space dimension")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    basis = code.basis_matrix()
    images = [err.matrix @ basis for err in errors.ops]
    n = len(errors.ops)
    c_mat = np.zeros((n, n), dtype=complex)
    max_off = 0.0
    max_spread = 0.0
    for a in range(n):
        for b in range(n):
            block = images[a].conj().T @ images[b]
            c_mat[a, b], off, spread = _delta_structure_violation(block)
            max_off = max(max_off, off)
            max_spread = max(max_spread, spread)
    violation = max(max_off, max_spread)
    return ConditionReport(c_mat, violation, violation <= tol, max_off, max_spread)


def error_of_state(psi: SpinState, u: SpinOperator) -> float:
    """Leakage probability 1 - |<psi|U|psi>|^2 of a unitary error."""
    if not u.is_unitary():
        raise ValueError(f"operator {u.label!r} is not unitary")
    ov = abs(complex(np.vdot(psi.amplitudes, apply(u, psi))))
    return min(max(1.0 - ov * ov, 0.0), 1.0)


def error_small_theta(psi: SpinState, g: SpinOperator, theta: float) -> float:
    """Small-angle error theta^2 (<G^2> - <G>^2) of exp(-i theta G)."""
    if abs(theta) > 0.1:
        raise ValueError(f"|theta| must be <= 0.1 for the small-angle form, got {theta!r}")
    _, var = expectation_and_variance(psi, g)
    return theta * theta * var


def error_with_recovery(psi: SpinState, errors: ErrorSet, recoveries: RecoverySet) -> float:
    """Residual error sum over all (recovery, error) pairs after recovery.

    Evaluates sum_{a,r} <E^dag R^dag R E> - |<R E>|^2 for the given state,
    unweighted, exactly as the condition is stated (no channel weights).
    """
    if errors.j != psi.j or recoveries.j != psi.j:
        raise ValueError("operator dimensions do not match the state")
    total = 0.0
    for err in errors.ops:
        img = err.matrix @ psi.amplitudes
        for rec in recoveries.ops:
            w = rec.matrix @ img
            total += float(np.real(np.vdot(w, w))) - abs(complex(np.vdot(psi.amplitudes, w))) ** 2
    return max(total, 0.0)


def _variance_on_subspace(c: np.ndarray, a2: np.ndarray, a1: np.ndarray) -> float:
    """Var(G) at the unit coefficient vector c, with A2 = B'G^2B, A1 = B'GB."""
    mean = float(np.real(np.vdot(c, a1 @ c)))
    return float(np.real(np.vdot(c, a2 @ c))) - mean * mean


def _refine_on_sphere(c0: np.ndarray, a2: np.ndarray, a1: np.ndarray) -> np.ndarray:
    """Local ascent of Var(G) over unit vectors of the codeword subspace."""
    k = c0.size

    def split(x: np.ndarray) -> np.ndarray:
        return x[:k] + 1j * x[k:]

    def neg_var_and_grad(x: np.ndarray):
        z = split(x)
        w = float(np.real(np.vdot(z, z)))
        a2z = a2 @ z
        a1z = a1 @ z
        u = float(np.real(np.vdot(z, a2z)))
        v = float(np.real(np.vdot(z, a1z)))
        f = u / w - (v / w) ** 2
        # Wirtinger d f / d conj(z), then the real 2k-vector gradient
        gz = (a2z * w - u * z) / w**2 - 2.0 * (v / w) * (a1z * w - v * z) / w**2
        grad = np.concatenate([2.0 * np.real(gz), 2.0 * np.imag(gz)])
        return -f, -grad

    x0 = np.concatenate([np.real(c0), np.imag(c0)])
    res = optimize.minimize(
        neg_var_and_grad,
        x0,
        jac=True,
        method="BFGS",
        options={"gtol": 1e-10, "maxiter": 500},
    )
    z = split(res.x)
    return z / np.linalg.norm(z)


def max_error_over_code(
    code: CodeSpace, g: SpinOperator, theta: float
) -> tuple[SpinState, float]:
    """Worst codeword-superposition error theta^2 max Var(G) over the code.

    Multi-start search: a 32x64 polar/azimuth grid on every codeword pair,
    plus the bare codewords, each refined by gradient ascent on the unit
    sphere of the code subspace.  Deterministic for a fixed code (grid ties
    go to the first index), and never below the value at any bare codeword.
    """
    if abs(theta) > 0.1:
        raise ValueError(f"|theta| must be <= 0.1 for the small-angle form, got {theta!r}")
    if not g.is_hermitian():
        raise ValueError(f"operator {g.label!r} is not Hermitian")
    if g.j != code.j:
        raise ValueError("generator does not match the code space dimension")
    basis = code.basis_matrix()
    k = len(code.codewords)
    a2 = basis.conj().T @ (g.matrix @ g.matrix) @ basis
    a1 = basis.conj().T @ g.matrix @ basis

    starts: list[np.ndarray] = []
    for i in range(k):
        e = np.zeros(k, dtype=complex)
        e[i] = 1.0
        starts.append(e)
    polar = np.linspace(0.0, math.pi, _GRID_POLAR)
    azimuth = np.linspace(0.0, 2.0 * math.pi, _GRID_AZIMUTH, endpoint=False)
    for i in range(k):
        for l in range(i + 1, k):
            idx = [i, l]
            a2_p = a2[np.ix_(idx, idx)]
            a1_p = a1[np.ix_(idx, idx)]
            best_val = -np.inf
            best_c2 = None
            for t in polar:
                for ph in azimuth:
                    c2 = np.array([math.cos(t / 2.0), math.sin(t / 2.0) * np.exp(1j * ph)])
                    val = _variance_on_subspace(c2, a2_p, a1_p)
                    if val > best_val:
                        best_val = val
                        best_c2 = c2
            c = np.zeros(k, dtype=complex)
            c[i], c[l] = best_c2
            starts.append(c)

    best_c = starts[0]
    best_var = _variance_on_subspace(best_c, a2, a1)
    for c0 in starts:
        for cand in (c0, _refine_on_sphere(c0, a2, a1)):
            val = _variance_on_subspace(cand, a2, a1)
            if val > best_var:
                best_var = val
                best_c = cand

    vec = basis @ best_c
    vec = vec / np.linalg.norm(vec)
    return SpinState(code.j, vec), theta * theta * best_var


def ae_codewords(j: SpinJ, m1: int, m2: int) -> CodeSpace:
    """Symmetric two-codeword space on m-levels separated by at least 3.

    |w0> = (|J,m1> + |J,-m1>)/sqrt2 and |w1> mixes |J,0> with |J,+-m2>, so
    every pair of occupied levels across the two codewords differs by at
    least 3 units of m and ladder-operator products up to distance 2 can
    neither connect nor distinguish them.
    """
    if not j.is_integer:
        raise ValueError(f"codewords use the m=0 level, so J must be an integer: 2J={j.twice_j}")
    if j.twice_j < 12:
        raise ValueError(f"validity rule J >= 6 violated: J = {j.j:g}")
    if m1 < 3:
        raise ValueError(f"validity rule m1 >= 3 violated: m1 = {m1}")
    if m2 < m1 + 3:
        raise ValueError(f"validity rule m2 >= m1 + 3 violated: m1 = {m1}, m2 = {m2}")
    if 2 * m2 > j.twice_j:
        raise ValueError(f"validity rule m2 <= J violated: m2 = {m2}, J = {j.j:g}")

    w0 = np.zeros(j.dim, dtype=complex)
    w0[j.index_of(2 * m1)] = 1.0 / math.sqrt(2.0)
    w0[j.index_of(-2 * m1)] = 1.0 / math.sqrt(2.0)

    ratio = (m1 * m1) / (m2 * m2)
    w1 = np.zeros(j.dim, dtype=complex)
    w1[j.index_of(0)] = math.sqrt(1.0 - ratio)
    w1[j.index_of(2 * m2)] = math.sqrt(ratio / 2.0)
    w1[j.index_of(-2 * m2)] = math.sqrt(ratio / 2.0)

    return CodeSpace(j, [SpinState(j, w0), SpinState(j, w1)])


def dfs_check(code: CodeSpace, g: SpinOperator, tol: float = 1e-10) -> bool:
    """True when all codewords are degenerate eigenstates of the generator,
    i.e. the code space is decoherence-free for exp(-i theta G)."""
    if not g.is_hermitian():
        raise ValueError(f"operator {g.label!r} is not Hermitian")
    eigvals = []
    for w in code.codewords:
        mean, var = expectation_and_variance(w, g)
        if var > tol:
            return False
        eigvals.append(mean)
    return (max(eigvals) - min(eigvals)) <= tol


__all__ = [
    "CodeSpace",
    "ErrorSet",
    "RecoverySet",
    "ConditionReport",
    "detection_check",
    "kl_check",
    "error_of_state",
    "error_small_theta",
    "error_with_recovery",
    "max_error_over_code",
    "ae_codewords",
    "dfs_check",
]
