"""Spin-J states, angular-momentum operator matrices, and rotation unitaries.

Basis convention: amplitude index 0 corresponds to m = J and the index
increases as m decreases down to -J.  J is stored as the integer 2J so
half-integer spins are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
AXIS_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SpinJ:
    """Total angular momentum, stored as 2J so half-integer values stay exact."""

    twice_j: int

    def __post_init__(self):
        if isinstance(self.twice_j, bool) or not isinstance(self.twice_j, (int, np.integer)):
            raise TypeError(f"twice_j must be an integer, got {type(self.twice_j).__name__}")
        if self.twice_j < 0:
            raise ValueError(f"twice_j must be non-negative, got {self.twice_j}")
        object.__setattr__(self, "twice_j", int(self.twice_j))

    @property
    def j(self) -> float:
        return self.twice_j / 2.0

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    @property
    def is_integer(self) -> bool:
        return self.twice_j % 2 == 0

    def twice_m_values(self) -> np.ndarray:
        """The 2m ladder in index order: 2J, 2J-2, ..., -2J."""
        return np.arange(self.twice_j, -self.twice_j - 1, -2)

    def m_values(self) -> np.ndarray:
        return self.twice_m_values() / 2.0

    def index_of(self, twice_m: int) -> int:
        """Amplitude index of the level with 2m = twice_m."""
        if (self.twice_j - twice_m) % 2 != 0 or abs(twice_m) > self.twice_j:
            raise ValueError(f"2m={twice_m} is not a level of 2J={self.twice_j}")
        return (self.twice_j - twice_m) // 2


@dataclass
class SpinState:
    """Normalized pure spin-J state with amplitudes ordered m = J down to -J."""

    j: SpinJ
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.j.dim,):
            raise ValueError(
                f"amplitude vector must have length {self.j.dim}, got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm_sq!r}")
        self.amplitudes = _frozen(amps)

    def amplitude(self, twice_m: int) -> complex:
        return complex(self.amplitudes[self.j.index_of(twice_m)])

    def to_json_dict(self) -> dict:
        """Serialize to ``{"twice_j": int, "amplitudes": [{"m_times_2", "re", "im"}]}``.

        Zero amplitudes are omitted; readers treat missing m entries as zero.
        """
        entries = []
        for twice_m, a in zip(self.j.twice_m_values(), self.amplitudes):
            if a != 0:
                entries.append({"m_times_2": int(twice_m), "re": float(a.real), "im": float(a.imag)})
        return {"twice_j": self.j.twice_j, "amplitudes": entries}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SpinState":
        if not isinstance(doc, dict):
            raise ValueError("spin state document must be a JSON object")
        try:
            j = SpinJ(doc["twice_j"])
            entries = doc["amplitudes"]
        except KeyError as exc:
            raise ValueError(f"spin state document missing field {exc}") from None
        amps = np.zeros(j.dim, dtype=complex)
        seen = set()
        for entry in entries:
            try:
                twice_m = entry["m_times_2"]
                value = complex(entry["re"], entry["im"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"bad amplitude entry {entry!r}: {exc}") from None
            if twice_m in seen:
                raise ValueError(f"duplicate amplitude entry for m_times_2={twice_m}")
            seen.add(twice_m)
            amps[j.index_of(twice_m)] = value
        return cls(j, amps)


def basis_state(j: SpinJ, twice_m: int) -> SpinState:
    """The eigenstate |J, m> with 2m = twice_m."""
    amps = np.zeros(j.dim, dtype=complex)
    amps[j.index_of(twice_m)] = 1.0
    return SpinState(j, amps)


def overlap(a: SpinState, b: SpinState) -> complex:
    """Inner product <a|b>."""
    if a.j != b.j:
        raise ValueError(f"dimension mismatch: 2J={a.j.twice_j} vs 2J={b.j.twice_j}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


@dataclass
class SpinOperator:
    """Labeled dense complex operator on a spin-J space."""

    j: SpinJ
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (self.j.dim, self.j.dim):
            raise ValueError(
                f"matrix must be {self.j.dim}x{self.j.dim}, got shape {mat.shape}"
            )
        self.matrix = _frozen(mat)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        m = self.matrix
        scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
        return float(np.max(np.abs(m - m.conj().T))) <= tol * scale

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.j.dim)))) <= tol

    def dagger(self) -> "SpinOperator":
        return SpinOperator(self.j, self.matrix.conj().T, label=f"{self.label}^dag")

    def to_json_dict(self) -> dict:
        return {
            "twice_j": self.j.twice_j,
            "label": self.label,
            "matrix_re": self.matrix.real.tolist(),
            "matrix_im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SpinOperator":
        if not isinstance(doc, dict):
            raise ValueError("operator document must be a JSON object")
        try:
            j = SpinJ(doc["twice_j"])
            re = np.asarray(doc["matrix_re"], dtype=float)
            im = np.asarray(doc["matrix_im"], dtype=float)
        except KeyError as exc:
            raise ValueError(f"operator document missing field {exc}") from None
        if re.shape != im.shape:
            raise ValueError("matrix_re and matrix_im shapes differ")
        return cls(j, re + 1j * im, label=str(doc.get("label", "")))


@dataclass(frozen=True)
class RotationAxis:
    """Unit 3-vector (ux, uy, uz) specifying a rotation direction."""

    u: np.ndarray

    def __post_init__(self):
        vec = np.array(self.u, dtype=float)
        if vec.shape != (3,):
            raise ValueError(f"axis must be a 3-vector, got shape {vec.shape}")
        if abs(np.linalg.norm(vec) - 1.0) > AXIS_TOL:
            raise ValueError(f"axis must be a unit vector, |u| = {np.linalg.norm(vec)!r}")
        object.__setattr__(self, "u", _frozen(vec))

    @classmethod
    def from_vector(cls, v: Iterable[float]) -> "RotationAxis":
        """Normalize an arbitrary nonzero 3-vector into an axis."""
        vec = np.asarray(list(v), dtype=float)
        n = np.linalg.norm(vec)
        if n == 0:
            raise ValueError("cannot normalize the zero vector into an axis")
        return cls(vec / n)

    @classmethod
    def x(cls) -> "RotationAxis":
        return cls(np.array([1.0, 0.0, 0.0]))

    @classmethod
    def y(cls) -> "RotationAxis":
        return cls(np.array([0.0, 1.0, 0.0]))

    @classmethod
    def z(cls) -> "RotationAxis":
        return cls(np.array([0.0, 0.0, 1.0]))


@dataclass
class SpinOperatorSet:
    """The standard operators on one spin-J space."""

    jx: SpinOperator
    jy: SpinOperator
    jz: SpinOperator
    jplus: SpinOperator
    jminus: SpinOperator
    jsq: SpinOperator


def build_spin_operators(j: SpinJ) -> SpinOperatorSet:
    """Dense matrices for Jx, Jy, Jz, J+, J-, and J^2.

    Jz is diagonal with entries m; J+ carries sqrt(J(J+1) - m(m+1)) one
    step up the ladder; Jx = (J+ + J-)/2 and Jy = (J+ - J-)/(2i).
    """
    dim = j.dim
    m = j.m_values()
    jz = np.diag(m).astype(complex)
    jp = np.zeros((dim, dim), dtype=complex)
    jphys = j.j
    for col in range(1, dim):
        # raises m[col] to m[col] + 1, landing on row col-1
        jp[col - 1, col] = np.sqrt(jphys * (jphys + 1) - m[col] * (m[col] + 1))
    jm = jp.conj().T
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    jsq = jx @ jx + jy @ jy + jz @ jz
    return SpinOperatorSet(
        jx=SpinOperator(j, jx, "Jx"),
        jy=SpinOperator(j, jy, "Jy"),
        jz=SpinOperator(j, jz, "Jz"),
        jplus=SpinOperator(j, jp, "J+"),
        jminus=SpinOperator(j, jm, "J-"),
        jsq=SpinOperator(j, jsq, "J^2"),
    )


def axis_generator(j: SpinJ, u: RotationAxis) -> SpinOperator:
    """The Hermitian generator u . J of rotations about the axis u."""
    ops = build_spin_operators(j)
    mat = u.u[0] * ops.jx.matrix + u.u[1] * ops.jy.matrix + u.u[2] * ops.jz.matrix
    return SpinOperator(j, mat, label=f"u.J[{u.u[0]:g},{u.u[1]:g},{u.u[2]:g}]")


def generator_unitary(g: SpinOperator, theta: float) -> SpinOperator:
    """exp(-i * theta * G) for Hermitian G, via eigendecomposition.

    Exact for this operator family up to the eigensolver, so the result is
    unitary to far better than the 1e-10 contract.
    """
    if not g.is_hermitian():
        raise ValueError(f"generator {g.label!r} is not Hermitian")
    w, v = np.linalg.eigh(g.matrix)
    mat = (v * np.exp(-1j * theta * w)) @ v.conj().T
    return SpinOperator(g.j, mat, label=f"exp(-i*{theta:g}*{g.label or 'G'})")


def rotation_unitary(j: SpinJ, theta: float, u: RotationAxis) -> SpinOperator:
    """The rotation exp(-i * theta * u . J) about the unit axis u."""
    return generator_unitary(axis_generator(j, u), theta)


def apply(op: SpinOperator, psi: SpinState) -> np.ndarray:
    """Matrix-vector product op|psi> as a raw, unnormalized vector."""
    if op.j != psi.j:
        raise ValueError(f"dimension mismatch: operator 2J={op.j.twice_j}, state 2J={psi.j.twice_j}")
    return op.matrix @ psi.amplitudes


def expectation_and_variance(psi: SpinState, g: SpinOperator) -> tuple[float, float]:
    """Mean <G> and variance <G^2> - <G>^2 of a Hermitian G in the state psi.

    The variance is computed as ||G psi||^2 - <G>^2 and clamped at zero to
    absorb -1e-12-scale round-off (downstream code takes square roots).
    """
    if not g.is_hermitian():
        raise ValueError(f"operator {g.label!r} is not Hermitian")
    gpsi = apply(g, psi)
    mean = float(np.real(np.vdot(psi.amplitudes, gpsi)))
    second = float(np.real(np.vdot(gpsi, gpsi)))
    return mean, max(second - mean * mean, 0.0)
