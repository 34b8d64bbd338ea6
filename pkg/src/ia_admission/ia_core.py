"""Interference alignment for the active network and the rate formulas.

Covers the alignment solver (alternating minimization of total interference
leakage between transmit precoders and receive interference subspaces),
construction of interference-subspace bases and zero-forcing equalizers, the
exact achievable sum-rate expressions with and without secondary
transmitters, and the variable/equation properness count used as the
feasibility indicator.

All rates are in b/s/Hz (log base 2) and every transmitter splits its power
equally over its streams.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    AlignmentViolationError,
    ConfigurationError,
    DegenerateAlignmentError,
    DegenerateChannelError,
    IAConvergenceError,
)
from .linalg import (
    column_space_basis,
    complement_basis,
    eigh_ascending,
    eigh_descending,
    haar_orthonormal,
    rank_from_singular_values,
)

__all__ = [
    "IASolution",
    "ActiveLinkState",
    "PropernessReport",
    "solve_ia",
    "interference_basis",
    "zf_equalizer",
    "build_active_state",
    "solve_active_network",
    "projected_signal_inverse",
    "active_sum_rate",
    "active_sum_rate_with_secondary",
    "secondary_sum_rate",
    "ia_residuals",
    "properness_check",
    "three_user_group_dims",
    "three_user_group_counts",
]


@dataclass(frozen=True)
class IASolution:
    """Converged precoders of an alignment run plus solver diagnostics."""

    precoders: tuple
    iterations: int
    leakage: float


@dataclass(frozen=True)
class ActiveLinkState:
    """Per-active-user solution: precoder F_i, interference basis C_i,
    signal-space projection P_i = I - C_i C_i*, and ZF equalizer W_i."""

    precoders: tuple
    interference_bases: tuple
    projections: tuple
    equalizers: tuple
    leakage: float
    iterations: int

    @property
    def num_users(self):
        return len(self.precoders)


@dataclass(frozen=True)
class PropernessReport:
    """Variable/equation count of an alignment system; proper iff N_v >= N_e."""

    N_v: int
    N_e: int

    @property
    def proper(self):
        return self.N_v >= self.N_e


def _total_leakage(H, F, proj, users):
    leak = 0.0
    for i in users:
        for k in users:
            if k == i:
                continue
            r = proj[i] @ (H[(i, k)] @ F[k])
            leak += float(np.real(np.vdot(r, r)))
    return leak


def solve_ia(
    channels,
    users=None,
    streams=None,
    rng=0,
    leakage_tol=1e-12,
    polish_tol=1e-26,
    stall_rel_change=1e-9,
    max_iters=5000,
):
    """Align the interference of the given users by leakage minimization.

    Alternates between the interference-subspace update at each receiver
    (principal eigenvectors of the incoming interference covariance) and the
    precoder update at each transmitter (least-significant eigenvectors of
    the outgoing projected-interference Gram matrix), starting from random
    orthonormal precoders drawn from ``rng``.

    The iteration keeps polishing until the total leakage drops below
    ``polish_tol`` or stops making relative progress; the solution counts as
    converged when the final leakage is below ``leakage_tol``. Splitting the
    two thresholds keeps residual cross terms far below the feasibility bar
    (the cross-leakage norms scale like the square root of the leakage).

    Returns an :class:`IASolution`; raises :class:`IAConvergenceError` with
    the final leakage when the configuration does not align.
    """
    cfg = channels.config
    if users is None:
        users = list(range(cfg.K_a))
    users = list(users)
    if not users:
        raise ConfigurationError("solve_ia needs at least one user")
    if streams is None:
        streams = [cfg.streams(k) for k in users]
    elif np.isscalar(streams):
        streams = [int(streams)] * len(users)
    rng = np.random.default_rng(rng)

    d = dict(zip(users, streams))
    F = {k: haar_orthonormal(rng, channels[(k, k)].shape[1], d[k]) for k in users}
    if len(users) == 1:
        return IASolution((F[users[0]],), 0, 0.0)

    proj = {}
    leak = np.inf
    iters = 0
    for iters in range(1, max_iters + 1):
        # Receiver step: keep the strongest interference directions.
        for i in users:
            n_i = channels[(i, i)].shape[0]
            cov = np.zeros((n_i, n_i), dtype=complex)
            for k in users:
                if k == i:
                    continue
                g = channels[(i, k)] @ F[k]
                cov += g @ g.conj().T
            _, vecs = eigh_descending(cov)
            c = vecs[:, : n_i - d[i]]
            proj[i] = np.eye(n_i) - c @ c.conj().T
        # Transmitter step: steer into everyone's interference subspace.
        for k in users:
            m_k = channels[(k, k)].shape[1]
            gram = np.zeros((m_k, m_k), dtype=complex)
            for i in users:
                if i == k:
                    continue
                g = proj[i] @ channels[(i, k)]
                gram += channels[(i, k)].conj().T @ g
            _, vecs = eigh_ascending(gram)
            F[k] = vecs[:, : d[k]]
        prev = leak
        leak = _total_leakage(channels, F, proj, users)
        if leak < polish_tol:
            break
        if abs(prev - leak) < stall_rel_change * max(leak, 1e-300):
            break

    if leak > leakage_tol:
        raise IAConvergenceError(
            f"alignment stalled at leakage {leak:.3e} after {iters} iterations",
            leakage=leak,
            iterations=iters,
        )
    return IASolution(tuple(F[k] for k in users), iters, leak)


def interference_basis(channels, precoders, i):
    """Orthonormal basis of the interference subspace at receiver ``i``.

    Spans the stacked cross-link interference ``[H_ik F_k]`` for k != i; when
    that space has fewer than N_i - d_i dimensions, it is padded with
    directions orthogonal to both the interference and the desired signal,
    so the returned basis always has exactly N_i - d_i columns.
    """
    n_i = channels[(i, i)].shape[0]
    d_i = precoders[i].shape[1]
    target = n_i - d_i
    blocks = [
        channels[(i, k)] @ precoders[k] for k in range(len(precoders)) if k != i
    ]
    stacked = np.hstack(blocks) if blocks else np.zeros((n_i, 0), dtype=complex)
    basis = column_space_basis(stacked)
    if basis.shape[1] > target:
        raise AlignmentViolationError(
            f"interference at receiver {i} spans {basis.shape[1]} dimensions, "
            f"more than the N-d = {target} available"
        )
    if basis.shape[1] < target:
        signal = channels[(i, i)] @ precoders[i]
        pad = complement_basis(np.hstack([signal, stacked]))
        basis = np.hstack([basis, pad[:, : target - basis.shape[1]]])
    return basis


def zf_equalizer(H_ii, F_i, C_i):
    """Zero-forcing receive filter: first d_i rows of [H_ii F_i, C_i]^-1.

    Satisfies W H_ii F_i = I and W C_i = 0 whenever the concatenation is
    invertible.
    """
    d_i = F_i.shape[1]
    a = np.hstack([H_ii @ F_i, C_i])
    if a.shape[0] != a.shape[1]:
        raise ConfigurationError(
            f"[H F, C] must be square, got {a.shape}; check stream/antenna counts"
        )
    s = np.linalg.svd(a, compute_uv=False)
    if rank_from_singular_values(s, a.shape) < a.shape[0]:
        raise DegenerateChannelError("signal/interference concatenation is singular")
    return np.linalg.inv(a)[:d_i, :]


def build_active_state(channels, precoders, leakage=0.0, iterations=0):
    """Assemble interference bases, projections and ZF equalizers."""
    bases, projections, equalizers = [], [], []
    for i, F_i in enumerate(precoders):
        C_i = interference_basis(channels, precoders, i)
        P_i = np.eye(C_i.shape[0]) - C_i @ C_i.conj().T
        W_i = zf_equalizer(channels[(i, i)], F_i, C_i)
        bases.append(C_i)
        projections.append(P_i)
        equalizers.append(W_i)
    return ActiveLinkState(
        precoders=tuple(precoders),
        interference_bases=tuple(bases),
        projections=tuple(projections),
        equalizers=tuple(equalizers),
        leakage=float(leakage),
        iterations=int(iterations),
    )


def solve_active_network(channels, rng=0, **solver_options):
    """Solve alignment for the active users and build the full link state."""
    sol = solve_ia(channels, rng=rng, **solver_options)
    return build_active_state(channels, sol.precoders, sol.leakage, sol.iterations)


def projected_signal_inverse(channels, state, i):
    """Q_i = (F_i* H_ii* P_i H_ii F_i)^-1, the per-stream noise weights."""
    g = state.projections[i] @ (channels[(i, i)] @ state.precoders[i])
    gram = (channels[(i, i)] @ state.precoders[i]).conj().T @ g
    d_i = gram.shape[0]
    w = np.linalg.eigvalsh((gram + gram.conj().T) / 2.0)
    if w[0] <= d_i * np.finfo(float).eps * max(w[-1], 0.0) or w[0] <= 0.0:
        raise DegenerateAlignmentError("projected signal gram matrix is singular")
    return np.linalg.inv(gram)


def active_sum_rate(channels, state, gamma_o):
    """Sum rate of the active users alone under ZF reception (b/s/Hz)."""
    total = 0.0
    for i in range(state.num_users):
        Q = projected_signal_inverse(channels, state, i)
        d_i = Q.shape[0]
        for n in range(d_i):
            total += np.log2(1.0 + (gamma_o / d_i) / Q[n, n].real)
    return float(total)


def active_sum_rate_with_secondary(channels, state, secondary_precoders, gamma_o):
    """Active-user sum rate with secondary transmitters on air.

    The per-stream denominators pick up the residual secondary interference
    after each ZF equalizer; with perfectly confined secondaries this reduces
    term by term to :func:`active_sum_rate`.
    """
    cfg = channels.config
    total = 0.0
    for i in range(state.num_users):
        D = projected_signal_inverse(channels, state, i)
        d_i = D.shape[0]
        for j, F_k in enumerate(secondary_precoders):
            k = cfg.K_a + j
            d_k = F_k.shape[1]
            g = state.equalizers[i] @ (channels[(i, k)] @ F_k)
            D = D + (gamma_o / d_k) * (g @ g.conj().T)
        for n in range(d_i):
            total += np.log2(1.0 + (gamma_o / d_i) / D[n, n].real)
    return float(total)


def secondary_sum_rate(channels, active_precoders, secondary_precoders, gamma_o):
    """Sum rate of the secondary users, interference treated as noise."""
    cfg = channels.config
    all_precoders = list(active_precoders) + list(secondary_precoders)
    total = 0.0
    for j in range(len(secondary_precoders)):
        k = cfg.K_a + j
        n_k = channels[(k, k)].shape[0]
        icov = np.eye(n_k, dtype=complex)
        for i, F_i in enumerate(all_precoders):
            if i == k:
                continue
            g = channels[(k, i)] @ F_i
            icov += (gamma_o / F_i.shape[1]) * (g @ g.conj().T)
        b = channels[(k, k)] @ all_precoders[k]
        d_k = b.shape[1]
        inner = np.eye(d_k) + (gamma_o / d_k) * (b.conj().T @ np.linalg.solve(icov, b))
        sign, logdet = np.linalg.slogdet(inner)
        total += logdet / np.log(2.0)
    return float(total)


def ia_residuals(channels, state):
    """Worst-case alignment residuals of an active-network solution.

    Returns (max cross-leakage ||W_i H_ik F_k||_F over i != k, min singular
    value of W_i H_ii F_i over i), the two quantities the alignment
    feasibility conditions bound.
    """
    max_cross = 0.0
    min_signal = np.inf
    for i in range(state.num_users):
        for k in range(state.num_users):
            g = state.equalizers[i] @ (channels[(i, k)] @ state.precoders[k])
            if k == i:
                min_signal = min(min_signal, float(np.linalg.svd(g, compute_uv=False)[-1]))
            else:
                max_cross = max(max_cross, float(np.linalg.norm(g)))
    return max_cross, min_signal


def properness_check(dims):
    """Count alignment variables and equations for per-user (M, N, d) triples.

    N_v sums d_k (M_k + N_k - 2 d_k) over users; N_e counts d_i d_k over all
    ordered pairs i != k. The system is proper when N_v >= N_e.
    """
    dims = list(dims)
    if not dims:
        raise ConfigurationError("properness_check needs at least one user")
    d = np.array([u[2] for u in dims], dtype=np.int64)
    n_v = int(sum(dd * (m + n - 2 * dd) for (m, n, dd) in dims))
    n_e = int(np.sum(d) ** 2 - np.sum(d**2))
    return PropernessReport(N_v=n_v, N_e=n_e)


def three_user_group_dims(num_groups, heavy_group=1, heavy_streams=1, heavy_index=0):
    """Dimension list for the layered admission scenario used as the
    properness stress case: ``num_groups`` groups of three users, group g
    having 3g - 1 antennas per node, single streams everywhere except one
    designated user."""
    if not 1 <= heavy_group <= num_groups:
        raise ConfigurationError("heavy_group out of range")
    if not 0 <= heavy_index < 3:
        raise ConfigurationError("heavy_index must be 0, 1 or 2")
    dims = []
    for g in range(1, num_groups + 1):
        antennas = 3 * g - 1
        for j in range(3):
            d = heavy_streams if (g == heavy_group and j == heavy_index) else 1
            dims.append((antennas, antennas, d))
    return dims


def three_user_group_counts(num_groups, heavy_group, heavy_streams):
    """Closed-form N_v / N_e for :func:`three_user_group_dims`."""
    K, i, d_l = num_groups, heavy_group, heavy_streams
    n_v = 9 * K**2 - 3 * K - 6 * i + 4 + d_l * (6 * i - 2 - 2 * d_l)
    n_e = (3 * K - 1) * (3 * K - 2 + 2 * d_l)
    return PropernessReport(N_v=int(n_v), N_e=int(n_e))
