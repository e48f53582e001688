"""Eigenvalue clusters and biorthogonal Jordan chains.

The interior restriction of a walk operator is a (generally
non-normal) contraction.  Everything downstream — resonance lists,
pole expansions of the scattering matrix, tunneling asymptotics —
consumes its spectral data in one fixed shape:

* eigenvalues are merged into *clusters* (numerically coincident
  eigenvalues are one resonance with multiplicity),
* each cluster carries right Jordan chains ``v_1, ..., v_L`` with
  ``(M - λ) v_l = v_{l-1}`` (``v_0 = 0``),
* and co-chains ``w_1, ..., w_L`` with ``(M* - λ̄) w_l = w_{l+1}``
  (``w_{L+1} = 0``), normalized so that ``<v, w>`` pairs to the
  identity across the cluster.

The co-chains are *not* built by running the chain algorithm on the
adjoint: they are the dual basis of the right chains inside the left
generalized eigenspace.  If ``M V = V J`` on the cluster and ``W`` is
dual to ``V`` there, then automatically ``M* W = W J*``, which is
exactly the co-chain recursion — so biorthogonality is exact by
construction and the chain relations hold to the accuracy of the
eigenspace bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_CIRCLE_TOL = 1e-8
CLUSTER_REL_TOL = 1e-8
RANK_REL_TOL = 1e-10
GRAM_REL_TOL = 1e-12
ZERO_VALUE_TOL = 1e-9


class ClusterAmbiguity(ValueError):
    """Greedy eigenvalue clustering depends on processing order."""


class IllConditionedChain(ValueError):
    def __init__(self, value: complex, condition: float):
        self.value = value
        self.condition = condition
        super().__init__(
            f"left/right chain pairing at eigenvalue {value:.6g} is numerically "
            f"singular (condition {condition:.3e}); chain data is unreliable"
        )


class NotSimple(ValueError):
    """The operation requires a multiplicity-one cluster."""


class ZeroCluster(ValueError):
    """The eigenvalue-zero cluster has no resonant-state extension."""


@dataclass(frozen=True)
class Cluster:
    value: complex
    eigenvalues: tuple
    chains: tuple  # of ndarrays, shape (length, dim); row l-1 is v_l
    co_chains: tuple  # matching shapes
    on_unit_circle: bool

    @property
    def multiplicity(self) -> int:
        return sum(c.shape[0] for c in self.chains)

    @property
    def is_simple(self) -> bool:
        return self.multiplicity == 1

    def right_basis(self) -> np.ndarray:
        """All chain vectors as columns, chain-major, l ascending."""
        return np.concatenate(self.chains, axis=0).T

    def left_basis(self) -> np.ndarray:
        return np.concatenate(self.co_chains, axis=0).T

    def project(self, f: np.ndarray) -> np.ndarray:
        """Spectral (oblique) projection of ``f`` onto this cluster."""
        v = self.right_basis()
        w = self.left_basis()
        return v @ (w.conj().T @ f)


@dataclass(frozen=True)
class EigenSystem:
    matrix: np.ndarray
    clusters: tuple
    tol_cluster: float
    tol_circle: float

    def off_circle(self):
        return [c for c in self.clusters if not c.on_unit_circle]

    def on_circle(self):
        return [c for c in self.clusters if c.on_unit_circle]

    def zero_cluster(self):
        for c in self.clusters:
            if abs(c.value) <= ZERO_VALUE_TOL:
                return c
        return None

    def nearest_cluster(self, value: complex) -> Cluster:
        return min(self.clusters, key=lambda c: abs(c.value - value))


def _cluster_indices(values: np.ndarray, tol: float):
    """Transitive merge of eigenvalues closer than ``tol``.

    Union-find is order-independent; ambiguity is flagged afterwards if
    transitivity stretched a cluster beyond diameter 2*tol, which is
    exactly when a greedy pass would have been order-dependent.
    """
    n = len(values)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(n):
        for b in range(a + 1, n):
            if abs(values[a] - values[b]) <= tol:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra

    groups: dict = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(a)

    for idx in groups.values():
        for pos, a in enumerate(idx):
            for b in idx[pos + 1 :]:
                if abs(values[a] - values[b]) > 2 * tol:
                    raise ClusterAmbiguity(
                        f"eigenvalues {values[a]:.9g} and {values[b]:.9g} were "
                        f"merged only through intermediaries (tolerance {tol:.3e})"
                    )
    # deterministic cluster order: by mean eigenvalue, lexicographic
    ordered = sorted(groups.values(), key=lambda idx: _sort_key(values[idx].mean()))
    return ordered


def _sort_key(z: complex):
    return (round(z.real, 12), round(z.imag, 12))


def _null_dim(sigmas: np.ndarray, total: int, floor: float) -> int:
    if len(sigmas) == 0:
        return total
    thr = max(RANK_REL_TOL * sigmas[0], floor)
    return int(np.sum(sigmas < thr)) + (total - len(sigmas))


def _nilpotent_chains(r: np.ndarray, floor: float):
    """Jordan chains of a (numerically) nilpotent matrix.

    Returns a list of chains, each an array of rows ``v_1 .. v_L`` with
    ``r @ v_l = v_{l-1}``.  The staircase is the textbook one: count
    nullities of powers, then pick chain tops in ``null(r^k)`` that are
    independent of ``null(r^(k-1))`` and of the vectors already occupied
    by longer chains.
    """
    m = r.shape[0]
    if m == 1:
        return [np.eye(1, dtype=complex)]

    null_bases = [np.zeros((m, 0), dtype=complex)]
    dims = [0]
    power = np.eye(m, dtype=complex)
    kmax = m
    for k in range(1, m + 1):
        power = power @ r
        u, s, vh = np.linalg.svd(power)
        d = max(_null_dim(s, m, floor), dims[-1])
        null_bases.append(vh[m - d :].conj().T if d else np.zeros((m, 0), dtype=complex))
        dims.append(d)
        if d >= m:
            kmax = k
            break
    else:
        # numerically the nilpotency never completed; force it
        dims[-1] = m
        null_bases[-1] = np.eye(m, dtype=complex)
        kmax = len(dims) - 1

    # r_k = chains of length >= k
    geq = [dims[k] - dims[k - 1] for k in range(1, kmax + 1)]
    chains = []
    for k in range(kmax, 0, -1):
        longer = geq[k] if k < kmax else 0
        n_new = geq[k - 1] - longer
        if n_new <= 0:
            continue
        occupied = [c[k - 1] for c in chains]  # height-k vectors of longer chains
        blockers = [null_bases[k - 1]] + [v.reshape(m, 1) for v in occupied]
        blocker = np.concatenate(blockers, axis=1)
        candidates = null_bases[k]
        if blocker.shape[1]:
            q, _ = np.linalg.qr(blocker)
            candidates = candidates - q @ (q.conj().T @ candidates)
        u, s, vh = np.linalg.svd(candidates)
        tops = u[:, :n_new]
        for t in tops.T:
            rows = [t]
            for _ in range(k - 1):
                rows.append(r @ rows[-1])
            chains.append(np.array(rows[::-1]))  # v_1 first
    # longest chains first, deterministic
    chains.sort(key=lambda c: -c.shape[0])
    return chains


def eigen_decompose(
    matrix: np.ndarray,
    tol_cluster: float | None = None,
    tol_circle: float = DEFAULT_CIRCLE_TOL,
) -> EigenSystem:
    """Cluster the spectrum of ``matrix`` and build biorthogonal chains."""
    m = np.asarray(matrix, dtype=complex)
    n = m.shape[0]
    scale = float(np.linalg.norm(m, 2)) if n else 0.0
    if tol_cluster is None:
        tol_cluster = CLUSTER_REL_TOL * max(scale, 1e-300)
    if n == 0:
        return EigenSystem(m, (), tol_cluster, tol_circle)

    values = np.linalg.eigvals(m)
    floor = 1e-12 * max(scale, 1.0)
    clusters = []
    for idx in _cluster_indices(values, tol_cluster):
        lam = complex(values[idx].mean())
        mult = len(idx)
        if mult == n:
            v0 = np.eye(n, dtype=complex)
            w0 = np.eye(n, dtype=complex)
        else:
            power = np.linalg.matrix_power(m - lam * np.eye(n), mult)
            u, s, vh = np.linalg.svd(power)
            v0 = vh[n - mult :].conj().T
            w0 = u[:, n - mult :]

        restricted = v0.conj().T @ (m - lam * np.eye(n)) @ v0
        small_chains = _nilpotent_chains(restricted, floor)
        big_chains = []
        for chain in small_chains:
            lifted = chain @ v0.T  # rows are chain vectors in the big space
            eigvec = lifted[0]
            norm = float(np.linalg.norm(eigvec))
            if norm < floor:
                raise IllConditionedChain(lam, float("inf"))
            pivot = int(np.argmax(np.abs(eigvec)))
            phase = eigvec[pivot] / abs(eigvec[pivot])
            big_chains.append(lifted / (norm * phase))

        right = np.concatenate(big_chains, axis=0).T
        gram = w0.conj().T @ right
        sig = np.linalg.svd(gram, compute_uv=False)
        if sig[-1] < GRAM_REL_TOL * sig[0]:
            raise IllConditionedChain(lam, float(sig[0] / sig[-1]))
        left = w0 @ np.linalg.inv(gram).conj().T

        co_chains = []
        offset = 0
        for chain in big_chains:
            length = chain.shape[0]
            co_chains.append(left[:, offset : offset + length].T)
            offset += length

        clusters.append(
            Cluster(
                value=lam,
                eigenvalues=tuple(sorted(map(complex, values[idx]), key=_sort_key)),
                chains=tuple(big_chains),
                co_chains=tuple(co_chains),
                on_unit_circle=abs(abs(lam) - 1.0) <= tol_circle,
            )
        )

    return EigenSystem(m, tuple(clusters), tol_cluster, tol_circle)


def projection_apply(system: EigenSystem, cluster: Cluster, f: np.ndarray) -> np.ndarray:
    """Apply the spectral projection of ``cluster`` to a vector."""
    return cluster.project(f)


# ---------------------------------------------------------------------------
# Resonances and resonant-state boundary data


@dataclass(frozen=True)
class Resonance:
    value: complex
    multiplicity: int
    on_unit_circle: bool


def resonance_set(walk, tol_cluster: float | None = None, tol_circle: float = DEFAULT_CIRCLE_TOL):
    """All resonances of the walk: interior eigenvalues, zero included.

    Nonzero interior eigenvalues are resonances with their algebraic
    multiplicity; eigenvalue zero is reported as the conventional zero
    resonance.  Values on the unit circle are flagged — those are true
    eigenvalues of the full walk.
    """
    system = eigen_decompose(walk.interior, tol_cluster, tol_circle)
    out = []
    for c in system.clusters:
        value = 0j if abs(c.value) <= ZERO_VALUE_TOL else c.value
        out.append(Resonance(value, c.multiplicity, c.on_unit_circle))
    return out, system


@dataclass(frozen=True)
class ResonantStateBoundary:
    """Innermost tail amplitudes of a simple resonance pair.

    ``interior`` is the unit right eigenvector, ``co_interior`` its dual
    left eigenvector.  ``out_data`` holds the outgoing-state values on
    the first outgoing tail arcs, ``in_data_co`` the incoming co-state
    values on the first incoming tail arcs.  For a unit-circle
    resonance both tail vectors vanish identically; the flag records
    that they were not computed but *are* exactly zero.
    """

    value: complex
    interior: np.ndarray
    co_interior: np.ndarray
    out_data: np.ndarray
    in_data_co: np.ndarray
    on_circle: bool


def boundary_data(walk, cluster: Cluster) -> ResonantStateBoundary:
    if not cluster.is_simple:
        raise NotSimple(
            f"cluster at {cluster.value:.6g} has multiplicity {cluster.multiplicity}"
        )
    lam = cluster.value
    v = cluster.chains[0][0]
    w = cluster.co_chains[0][0]
    nt = walk.n_tails
    if cluster.on_unit_circle:
        zero = np.zeros(nt, dtype=complex)
        return ResonantStateBoundary(lam, v, w, zero, zero.copy(), True)
    if abs(lam) <= ZERO_VALUE_TOL:
        raise ZeroCluster(
            "the zero resonance has no incoming/outgoing tail extension"
        )
    out_data = (walk.interior_to_tail @ v) / lam
    in_data_co = (walk.tail_to_interior.conj().T @ w) / np.conj(lam)
    return ResonantStateBoundary(lam, v, w, out_data, in_data_co, False)
