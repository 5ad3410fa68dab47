"""Dense density-operator algebra for registers of up to six qubits.

Wires are numbered from 0 inside this module. Pipelines translate to the
1-based party numbering used for output pair labels.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_WIRES = 6
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
ISOMETRY_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

_I2 = np.eye(2, dtype=complex)
# basis operators of the canonical two-qubit expansion, indexed [i], [i], [i, j]
_LOCAL_A = np.array([np.kron(s, _I2) for s in PAULIS])
_LOCAL_B = np.array([np.kron(_I2, s) for s in PAULIS])
_CORRELATION = np.array([[np.kron(a, b) for b in PAULIS] for a in PAULIS])


class QBroadcastError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(QBroadcastError):
    """An operation would produce a register wider than MAX_WIRES."""


class InvalidStateError(QBroadcastError, ValueError):
    """A matrix violates a density-operator invariant."""

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class WireError(QBroadcastError, ValueError):
    """Bad wire index, permutation or placement."""


def _wire_count(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise InvalidStateError(f"dimension {dim} is not a power of two >= 2")
    return n


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityOp:
    """Validated density matrix on ``wire_count`` qubits.

    Construction checks hermiticity, unit trace and positivity with the
    module tolerances and raises :class:`InvalidStateError` otherwise.
    The stored matrix is a private read-only copy.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"expected a square matrix, got shape {m.shape}")
        n = _wire_count(m.shape[0])
        if n > MAX_WIRES:
            raise CapacityError(f"{n} wires exceeds the {MAX_WIRES}-wire limit")
        herm = np.abs(m - m.conj().T).max()
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"not Hermitian (max deviation {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr.real:.15g}, expected 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < PSD_TOL:
            raise InvalidStateError(f"not positive semidefinite (min eigenvalue {lo:.3e})", lo)
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def wire_count(self) -> int:
        return self.dim.bit_length() - 1

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def allclose(self, other: DensityOp, atol: float = 1e-12) -> bool:
        return self.dim == other.dim and np.allclose(self.matrix, other.matrix, rtol=0, atol=atol)

    @classmethod
    def from_ket(cls, ket) -> DensityOp:
        v = np.asarray(ket, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def basis(cls, bits: str) -> DensityOp:
        """Computational basis projector, e.g. ``DensityOp.basis("01")``."""
        v = np.zeros(2 ** len(bits))
        v[int(bits, 2)] = 1
        return cls.from_ket(v)

    @classmethod
    def maximally_mixed(cls, wires: int) -> DensityOp:
        d = 2**wires
        return cls(np.eye(d) / d)


@dataclass(frozen=True, eq=False)
class CanonicalTwoQubit:
    """Bloch vectors and correlation matrix of a two-qubit operator.

    ``x`` belongs to the first wire, ``y`` to the second and
    ``T[i, j] = Tr[rho (sigma_i x sigma_j)]``.
    """

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(3)
        y = np.array(self.y, dtype=float).reshape(3)
        T = np.array(self.T, dtype=float).reshape(3, 3)
        object.__setattr__(self, "x", _readonly(x))
        object.__setattr__(self, "y", _readonly(y))
        object.__setattr__(self, "T", _readonly(T))

    @classmethod
    def zero(cls) -> CanonicalTwoQubit:
        return cls(np.zeros(3), np.zeros(3), np.zeros((3, 3)))

    def max_deviation(self, other: CanonicalTwoQubit) -> float:
        return float(
            max(
                np.abs(self.x - other.x).max(),
                np.abs(self.y - other.y).max(),
                np.abs(self.T - other.T).max(),
            )
        )

    def swapped(self) -> CanonicalTwoQubit:
        """Same state with the two wires exchanged."""
        return CanonicalTwoQubit(self.y, self.x, self.T.T)

    def as_dict(self) -> dict:
        return {"x": self.x.tolist(), "y": self.y.tolist(), "T": self.T.tolist()}


@dataclass(frozen=True, eq=False)
class Isometry:
    """Linear map V with V^dagger V = identity; ``entries`` is out_dim x in_dim."""

    entries: np.ndarray

    def __post_init__(self):
        v = np.array(self.entries, dtype=complex)
        if v.ndim != 2:
            raise ValueError("isometry entries must be a matrix")
        _wire_count(v.shape[0])
        _wire_count(v.shape[1])
        if v.shape[0] < v.shape[1]:
            raise ValueError(f"out_dim {v.shape[0]} < in_dim {v.shape[1]}")
        dev = np.abs(v.conj().T @ v - np.eye(v.shape[1])).max()
        if dev > ISOMETRY_TOL:
            raise ValueError(f"V^dagger V deviates from identity by {dev:.3e}")
        object.__setattr__(self, "entries", _readonly(v))

    @property
    def in_dim(self) -> int:
        return self.entries.shape[1]

    @property
    def out_dim(self) -> int:
        return self.entries.shape[0]

    @property
    def in_wires(self) -> int:
        return self.in_dim.bit_length() - 1

    @property
    def out_wires(self) -> int:
        return self.out_dim.bit_length() - 1

    @classmethod
    def identity(cls, wires: int) -> Isometry:
        return cls(np.eye(2**wires))


@dataclass(frozen=True)
class WireMap:
    """Wire relabelling: output wire ``i`` is input wire ``perm[i]``.

    ``party_of_wire`` tags each output wire with its owner ("A" or "B").
    """

    perm: tuple[int, ...]
    party_of_wire: tuple[str, ...] = field(default=())

    def __post_init__(self):
        perm = tuple(int(i) for i in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise WireError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        object.__setattr__(self, "perm", perm)
        if self.party_of_wire and len(self.party_of_wire) != len(perm):
            raise WireError("party_of_wire must tag every wire")

    @classmethod
    def interleave(cls, per_party: int) -> WireMap:
        """Map [A1..Ak, B1..Bk] to the alternating order A1 B1 A2 B2 ...

        This puts party A on odd and party B on even 1-based positions.
        """
        perm = []
        for i in range(per_party):
            perm += [i, per_party + i]
        return cls(tuple(perm), ("A", "B") * per_party)


def tensor(a: DensityOp, b: DensityOp) -> DensityOp:
    if a.wire_count + b.wire_count > MAX_WIRES:
        raise CapacityError(
            f"tensor of {a.wire_count} and {b.wire_count} wires exceeds {MAX_WIRES}"
        )
    return DensityOp(np.kron(a.matrix, b.matrix))


def _check_wires(wires: Sequence[int], n: int, what: str) -> list[int]:
    ws = [int(w) for w in wires]
    if len(set(ws)) != len(ws):
        raise WireError(f"repeated wire in {what}: {ws}")
    for w in ws:
        if not 0 <= w < n:
            raise WireError(f"wire {w} out of range for a {n}-wire state")
    return ws


def _reduce_tensor(t: np.ndarray, n: int, keep: list[int]) -> np.ndarray:
    """Partial trace of an operator tensor with 2n qubit axes."""
    letters = string.ascii_letters
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for w in range(n):
        if w not in keep:
            cols[w] = rows[w]
    out = "".join(rows[w] for w in keep) + "".join(cols[w] for w in keep)
    d = 2 ** len(keep)
    return np.einsum("".join(rows) + "".join(cols) + "->" + out, t).reshape(d, d)


def partial_trace(rho: DensityOp, keep: Sequence[int]) -> DensityOp:
    """Reduced state on ``keep``, with wires in the listed order."""
    n = rho.wire_count
    ws = _check_wires(keep, n, "keep")
    if not ws:
        raise WireError("keep must name at least one wire")
    return DensityOp(_reduce_tensor(rho.matrix.reshape((2,) * (2 * n)), n, ws))


def permute_wires(rho: DensityOp, perm: WireMap | Sequence[int]) -> DensityOp:
    p = perm.perm if isinstance(perm, WireMap) else WireMap(tuple(perm)).perm
    n = rho.wire_count
    if len(p) != n:
        raise WireError(f"permutation of length {len(p)} for a {n}-wire state")
    t = rho.matrix.reshape((2,) * (2 * n)).transpose(list(p) + [n + i for i in p])
    return DensityOp(t.reshape(rho.dim, rho.dim))


def apply_isometry(
    rho: DensityOp,
    iso: Isometry,
    targets: Sequence[int],
    discard: Sequence[int] = (),
) -> DensityOp:
    """Return V rho V^dagger with V acting on ``targets``.

    The first ``len(targets)`` kept output wires of ``iso`` take the places
    of the targets; further kept outputs are appended after the untouched
    wires, in the isometry's own order. ``discard`` lists output wires of
    the isometry (0-based, in its own numbering) that are traced out while
    applying, so registers wider than MAX_WIRES only ever exist as a
    purification and never as a density matrix.
    """
    n = rho.wire_count
    ts = _check_wires(targets, n, "targets")
    if 2 ** len(ts) != iso.in_dim:
        raise WireError(f"isometry takes {iso.in_wires} wires, got {len(ts)} targets")
    m = iso.out_wires
    drop = _check_wires(discard, m, "discard")
    kept_out = [w for w in range(m) if w not in drop]
    if len(kept_out) < len(ts):
        raise WireError("cannot discard so many outputs that targets lose their place")
    n_out = n - len(ts) + len(kept_out)
    if n_out > MAX_WIRES:
        raise CapacityError(f"result would have {n_out} wires")

    # purification rho = A A^dagger
    lam, vecs = np.linalg.eigh(rho.matrix)
    live = lam > 0
    amp = vecs[:, live] * np.sqrt(lam[live])
    r = amp.shape[1]
    psi = amp.reshape((2,) * n + (r,))
    v = iso.entries.reshape((2,) * m + (2,) * len(ts))
    psi = np.tensordot(v, psi, axes=(list(range(m, m + len(ts))), ts))
    # axes now: iso outputs (m), untouched wires (in order), rank index
    rest = [w for w in range(n) if w not in ts]
    axis_of = {("out", j): j for j in range(m)}
    axis_of.update({("old", w): m + i for i, w in enumerate(rest)})

    order = []
    placed = iter(kept_out[: len(ts)])
    slot = dict(zip(ts, placed))
    for w in range(n):
        order.append(axis_of[("out", slot[w])] if w in slot else axis_of[("old", w)])
    order += [axis_of[("out", j)] for j in kept_out[len(ts) :]]
    traced = [axis_of[("out", j)] for j in drop] + [psi.ndim - 1]

    red = np.tensordot(psi, psi.conj(), axes=(traced, traced))
    # red axes: remaining psi axes (sorted), then their conjugate copies
    remaining = [a for a in range(psi.ndim) if a not in traced]
    pos = [remaining.index(a) for a in order]
    k = len(remaining)
    red = red.transpose(pos + [k + i for i in pos])
    d = 2**n_out
    return DensityOp(red.reshape(d, d))


def canonical_matrix(x, y, T) -> np.ndarray:
    """Batched two-qubit matrix from canonical data (leading axes broadcast).

    No validation is done; callers that need a checked state should use
    :func:`from_canonical`.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    T = np.asarray(T, dtype=float)
    m = (
        np.eye(4, dtype=complex)
        + np.einsum("...i,ijk->...jk", x, _LOCAL_A)
        + np.einsum("...i,ijk->...jk", y, _LOCAL_B)
        + np.einsum("...ij,ijkl->...kl", T, _CORRELATION)
    )
    return m / 4


def to_canonical(rho: DensityOp) -> CanonicalTwoQubit:
    if rho.dim != 4:
        raise WireError(f"canonical form needs a two-qubit state, got dim {rho.dim}")
    m = rho.matrix
    x = np.einsum("jk,ikj->i", m, _LOCAL_A).real
    y = np.einsum("jk,ikj->i", m, _LOCAL_B).real
    T = np.einsum("kl,ijlk->ij", m, _CORRELATION).real
    return CanonicalTwoQubit(x, y, T)


def from_canonical(c: CanonicalTwoQubit) -> DensityOp:
    m = canonical_matrix(c.x, c.y, c.T)
    lo = float(np.linalg.eigvalsh(m)[0])
    if lo < PSD_TOL:
        raise InvalidStateError(
            f"canonical triple is not a state (min eigenvalue {lo:.6g})", lo
        )
    return DensityOp(m)
