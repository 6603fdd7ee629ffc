"""Reduced coin dynamics in the unitary frame, and its channel machinery.

The similarity W_eta(k) = eta(k) W_c(k) eta(k)^{-1} is unitary in the
unbroken regime. Starting the walker at the origin with coin state rho_c,
the reduced coin state after t steps is the momentum average

    rho_c(t) = (1/L) sum_k W_eta(k)^t rho_c W_eta(k)†^t .

The t-step map is represented by a 4x4 matrix L(t, 0) acting on row-major
vectorized coin states, with columns vec(map(E_ij)) over the matrix units
in the order E11, E12, E21, E22. Map composition is matrix multiplication,
so the one-step intermediate map is L(t+1, t) = L(t+1, 0) L(t, 0)^{-1}, and
its Choi matrix is

    C = devec[ U23 (L (x) I4) U23 vec(|Phi><Phi|) ],

where |Phi> = (|00> + |11>)/sqrt(2) and U23 swaps the middle two tensor
factors of the four-qubit index.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BrokenRegime, LightConeViolation, NotPositive
from .linalg import devec
from .metric import MetricSpec, build_metric
from .walk import BlockOperator, WalkParams, is_unbroken, walk_operator

# Condition number beyond which the intermediate-map inversion is flagged
# and a cutoff pseudo-inverse is used instead of a direct solve.
ILL_CONDITION_LIMIT = 1e12
PINV_RCOND = 1e-12

_MATRIX_UNITS = np.zeros((4, 2, 2), dtype=complex)
for _i in range(2):
    for _j in range(2):
        _MATRIX_UNITS[2 * _i + _j, _i, _j] = 1.0

_SWAP23 = np.kron(
    np.eye(2),
    np.kron(
        np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
        np.eye(2),
    ),
)
_PHI = np.zeros(4, dtype=complex)
_PHI[0] = _PHI[3] = 1.0 / np.sqrt(2.0)
_VEC_PHI = np.outer(_PHI, _PHI.conj()).reshape(16)


@dataclass(frozen=True)
class EuclideanWalk:
    """Walk mapped to the unitary frame of a chosen metric."""

    params: WalkParams
    spec: MetricSpec
    metric: BlockOperator
    eta_blocks: BlockOperator
    eta_inv_blocks: BlockOperator
    w_eta_blocks: BlockOperator
    unitarity_residual: float


@dataclass(frozen=True)
class CoinTrajectory:
    """Reduced coin states rho_c(0..t_max); states has shape (t_max+1, 2, 2)."""

    steps: np.ndarray
    states: np.ndarray


@dataclass(frozen=True)
class ChannelMatrix:
    """4x4 representation of the reduced map from step t_from to t_to."""

    t_from: int
    t_to: int
    matrix: np.ndarray
    condition_number: float
    ill_conditioned: bool = False


def build_euclidean_walk(p: WalkParams, spec: MetricSpec) -> EuclideanWalk:
    """Construct the metric, its square root and the unitary blocks W_eta(k)."""
    if not is_unbroken(p) and not (p.gamma == 0.0 and spec.kind == "g1_flat"):
        raise BrokenRegime("walk is at or beyond its exceptional point")
    g = build_metric(p, spec)
    w = walk_operator(p)
    etas = np.empty_like(g.blocks)
    eta_invs = np.empty_like(g.blocks)
    w_etas = np.empty_like(g.blocks)
    for i, block in enumerate(g.blocks):
        vals, vecs = np.linalg.eigh(block)
        if vals.min() <= 0:
            raise NotPositive(f"metric block {i} not positive definite")
        etas[i] = (vecs * np.sqrt(vals)) @ vecs.conj().T
        eta_invs[i] = (vecs / np.sqrt(vals)) @ vecs.conj().T
        w_etas[i] = etas[i] @ w.blocks[i] @ eta_invs[i]
    residual = max(
        float(np.abs(b.conj().T @ b - np.eye(2)).max()) for b in w_etas
    )
    return EuclideanWalk(
        params=p,
        spec=spec,
        metric=g,
        eta_blocks=BlockOperator(g.points, etas),
        eta_inv_blocks=BlockOperator(g.points, eta_invs),
        w_eta_blocks=BlockOperator(g.points, w_etas),
        unitarity_residual=residual,
    )


def _check_state(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"coin state must be 2x2, got {rho.shape}")
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise ValueError(f"coin state trace {np.trace(rho)} != 1")
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise ValueError("coin state not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("coin state not positive semidefinite")
    return rho


def _check_horizon(ew: EuclideanWalk, t: int) -> None:
    if t < 0:
        raise ValueError("step count must be nonnegative")
    if ew.params.lattice_size < 2 * t + 1:
        raise LightConeViolation(
            f"lattice size {ew.params.lattice_size} < 2*{t}+1 needed for the light cone"
        )


def reduced_coin_state(ew: EuclideanWalk, rho0: np.ndarray, t: int) -> np.ndarray:
    """Reduced coin state after t steps of the unitary-frame walk."""
    rho0 = _check_state(rho0)
    _check_horizon(ew, t)
    powers = np.linalg.matrix_power(ew.w_eta_blocks.blocks, t)
    rho = np.einsum("kab,bc,kdc->ad", powers, rho0, powers.conj()) / len(ew.w_eta_blocks)
    return (rho + rho.conj().T) / 2.0


def coin_trajectory(ew: EuclideanWalk, rho0: np.ndarray, t_max: int) -> CoinTrajectory:
    """Reduced coin states for every step 0..t_max (incremental block powers)."""
    rho0 = _check_state(rho0)
    _check_horizon(ew, t_max)
    w = ew.w_eta_blocks.blocks
    n = len(ew.w_eta_blocks)
    states = np.empty((t_max + 1, 2, 2), dtype=complex)
    states[0] = rho0
    acc = np.tile(np.eye(2, dtype=complex), (n, 1, 1))
    for t in range(1, t_max + 1):
        acc = np.einsum("kab,kbc->kac", w, acc)
        rho = np.einsum("kab,bc,kdc->ad", acc, rho0, acc.conj()) / n
        states[t] = (rho + rho.conj().T) / 2.0
    return CoinTrajectory(np.arange(t_max + 1), states)


def _channel_from_powers(powers: np.ndarray, t: int) -> ChannelMatrix:
    mapped = np.einsum("kab,xbc,kdc->xad", powers, _MATRIX_UNITS, powers.conj())
    mapped /= powers.shape[0]
    matrix = np.stack([mapped[x].reshape(4) for x in range(4)], axis=1)
    sv = np.linalg.svd(matrix, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    return ChannelMatrix(0, t, matrix, cond)


def channel_matrix(ew: EuclideanWalk, t: int) -> ChannelMatrix:
    """Matrix L(t, 0) of the t-step reduced map on vectorized coin states."""
    _check_horizon(ew, t)
    powers = np.linalg.matrix_power(ew.w_eta_blocks.blocks, t)
    return _channel_from_powers(powers, t)


def channel_matrix_series(ew: EuclideanWalk, t_max: int) -> list[ChannelMatrix]:
    """L(t, 0) for t = 0..t_max, sharing the incremental block powers."""
    _check_horizon(ew, t_max)
    w = ew.w_eta_blocks.blocks
    acc = np.tile(np.eye(2, dtype=complex), (len(ew.w_eta_blocks), 1, 1))
    out = [_channel_from_powers(acc, 0)]
    for t in range(1, t_max + 1):
        acc = np.einsum("kab,kbc->kac", w, acc)
        out.append(_channel_from_powers(acc, t))
    return out


def intermediate_from(l_from: ChannelMatrix, l_to: ChannelMatrix) -> ChannelMatrix:
    """L(t+1, t) from L(t, 0) and L(t+1, 0); pseudo-inverse fallback when near-singular."""
    cond = l_from.condition_number
    flagged = not np.isfinite(cond) or cond > ILL_CONDITION_LIMIT
    if flagged:
        inv = np.linalg.pinv(l_from.matrix, rcond=PINV_RCOND)
        matrix = l_to.matrix @ inv
    else:
        matrix = np.linalg.solve(l_from.matrix.conj().T, l_to.matrix.conj().T).conj().T
    return ChannelMatrix(l_from.t_to, l_to.t_to, matrix, cond, flagged)


def intermediate_map(ew: EuclideanWalk, t: int) -> ChannelMatrix:
    """One-step map L(t+1, t) = L(t+1, 0) L(t, 0)^{-1}.

    The recorded condition number is that of L(t, 0); above 1e12 the inverse
    is replaced by a cutoff pseudo-inverse and the result is flagged.
    """
    series = channel_matrix_series(ew, t + 1)
    return intermediate_from(series[t], series[t + 1])


def choi_matrix(lmat) -> np.ndarray:
    """Choi matrix of the channel with 4x4 matrix representation ``lmat``.

    Accepts a ChannelMatrix or a raw 4x4 array. For a completely positive
    trace-preserving map the result is PSD with unit trace norm; trace-norm
    excess over 1 witnesses failure of complete positivity.
    """
    m = lmat.matrix if isinstance(lmat, ChannelMatrix) else np.asarray(lmat, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"channel matrix must be 4x4, got {m.shape}")
    v = _SWAP23 @ (np.kron(m, np.eye(4)) @ (_SWAP23 @ _VEC_PHI))
    return devec(v)


def channel_to_json_dict(cm: ChannelMatrix) -> dict:
    """JSON-friendly export of a channel matrix for external verification."""
    return {
        "t_from": cm.t_from,
        "t_to": cm.t_to,
        "condition_number": cm.condition_number,
        "ill_conditioned": cm.ill_conditioned,
        "matrix_re": cm.matrix.real.tolist(),
        "matrix_im": cm.matrix.imag.tolist(),
    }


def channel_from_json_dict(d: dict) -> ChannelMatrix:
    matrix = np.asarray(d["matrix_re"], dtype=float) + 1j * np.asarray(
        d["matrix_im"], dtype=float
    )
    return ChannelMatrix(
        d["t_from"], d["t_to"], matrix, d["condition_number"], d["ill_conditioned"]
    )


def write_trajectory_csv(traj: CoinTrajectory, path) -> None:
    """CSV export: one row per step with re/im of the four coin-state entries."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["t", "re_r11", "im_r11", "re_r12", "im_r12", "re_r21", "im_r21", "re_r22", "im_r22"]
        )
        for t, state in zip(traj.steps, traj.states):
            row = [int(t)]
            for entry in state.reshape(-1):
                row += [repr(float(entry.real)), repr(float(entry.imag))]
            writer.writerow(row)
