"""Feature-domain operations: interpolation, sampling, clustering, PCA, FID."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import vaegan
from .errors import (
    InsufficientData,
    NonFiniteResult,
    NotAffine,
    TooFewPoints,
    TooFewSamples,
)

LATENT_DIM = vaegan.LATENT_DIM


def interpolate2(z1: np.ndarray, z2: np.ndarray, nu: float) -> np.ndarray:
    """Affine blend nu*z1 + (1-nu)*z2; extrapolates outside [0, 1]."""
    z1 = np.asarray(z1, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    return nu * z1 + (1.0 - nu) * z2


def interpolate3(
    z1: np.ndarray,
    z2: np.ndarray,
    z3: np.ndarray,
    alpha: float,
    beta: float,
    gamma: float,
) -> np.ndarray:
    if abs(alpha + beta + gamma - 1.0) > 1e-9:
        raise NotAffine(f"coefficients sum to {alpha + beta + gamma}, need 1")
    return (
        alpha * np.asarray(z1, dtype=np.float64)
        + beta * np.asarray(z2, dtype=np.float64)
        + gamma * np.asarray(z3, dtype=np.float64)
    )


def sample_airfoils(decoder, n: int, seed: int) -> np.ndarray:
    """Decode n standard-normal latent draws; (n, 200), deterministic per seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    if n == 0:
        return np.empty((0, decoder.out_dim))
    z = rng.standard_normal((n, LATENT_DIM))
    return vaegan.decode(decoder, z)


# --- K-means ---------------------------------------------------------------


@dataclass
class KMeansResult:
    k: int
    centroids: np.ndarray  # (k, d)
    assignments: np.ndarray  # (n,)
    inertia: float


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeanspp_init(
    points: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    closest = np.sum((points - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total <= 0:
            centroids[i] = points[rng.integers(n)]
            continue
        probs = closest / total
        centroids[i] = points[rng.choice(n, p=probs)]
        closest = np.minimum(closest, np.sum((points - centroids[i]) ** 2, axis=1))
    return centroids


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding; empty clusters are reseeded
    to the farthest point."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k > n or k < 1:
        raise TooFewPoints(f"k={k} with only {n} points")
    rng = np.random.Generator(np.random.PCG64(seed))
    centroids = _kmeanspp_init(points, k, rng)
    prev_inertia = np.inf
    for _ in range(max_iter):
        d2 = _squared_distances(points, centroids)
        assignments = np.argmin(d2, axis=1)
        for j in range(k):
            members = points[assignments == j]
            if members.shape[0] == 0:
                far = np.argmax(np.min(d2, axis=1))
                centroids[j] = points[far]
            else:
                centroids[j] = members.mean(axis=0)
        d2 = _squared_distances(points, centroids)
        assignments = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(n), assignments].sum())
        if prev_inertia - inertia < tol:
            break
        prev_inertia = inertia
    return KMeansResult(k=k, centroids=centroids, assignments=assignments, inertia=inertia)


# --- PCA baseline ----------------------------------------------------------


@dataclass
class PcaModel:
    mean: np.ndarray  # (d,)
    components: np.ndarray  # (n_components, d), orthonormal rows
    explained_variance: np.ndarray  # (n_components,)


def pca_fit(data: np.ndarray, n_components: int = 32) -> PcaModel:
    data = np.asarray(data, dtype=np.float64)
    if data.shape[0] < n_components + 1:
        raise InsufficientData(
            f"need at least {n_components + 1} samples, got {data.shape[0]}"
        )
    mean = data.mean(axis=0)
    centered = data - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    variance = s**2 / (data.shape[0] - 1)
    return PcaModel(
        mean=mean,
        components=vt[:n_components],
        explained_variance=variance[:n_components],
    )


def pca_encode(model: PcaModel, x: np.ndarray) -> np.ndarray:
    return (np.asarray(x, dtype=np.float64) - model.mean) @ model.components.T


def pca_decode(model: PcaModel, z: np.ndarray) -> np.ndarray:
    return model.mean + np.asarray(z, dtype=np.float64) @ model.components


# --- FID -------------------------------------------------------------------


def _sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + mat.T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def fid(features_a: np.ndarray, features_b: np.ndarray) -> float:
    """Frechet distance between Gaussians fitted to two feature sets."""
    a = np.asarray(features_a, dtype=np.float64)
    b = np.asarray(features_b, dtype=np.float64)
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise TooFewSamples("need at least 2 samples per feature set")
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    sig_a = np.atleast_2d(np.cov(a, rowvar=False))
    sig_b = np.atleast_2d(np.cov(b, rowvar=False))
    sqrt_a = _sqrtm_psd(sig_a)
    # tr sqrt(Sa Sb) via the symmetrized product sqrt(Sa) Sb sqrt(Sa)
    inner = sqrt_a @ sig_b @ sqrt_a
    vals = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    tr_sqrt = float(np.sum(np.sqrt(np.clip(vals, 0.0, None))))
    value = float(
        np.sum((mu_a - mu_b) ** 2) + np.trace(sig_a) + np.trace(sig_b) - 2.0 * tr_sqrt
    )
    if not np.isfinite(value):
        raise NonFiniteResult("FID is not finite")
    if value < -1e-6:
        raise NonFiniteResult(f"FID {value} below numerical tolerance")
    return max(value, 0.0)
