"""Interferometer constructors and unitary-matrix utilities.

Conventions: an m-mode interferometer U maps input creation operators to
output ones, a_j^dag -> sum_k U[j, k] b_k^dag, so rows index input modes
and columns index output modes.  All functions are pure and safe to call
concurrently.
"""

from __future__ import annotations

import numpy as np

UNITARY_ATOL = 1e-10


def is_unitary(matrix: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    """Return True if matrix is square and unitary within atol (max norm)."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    m = matrix.shape[0]
    return bool(np.abs(matrix.conj().T @ matrix - np.eye(m)).max() <= atol)


def require_unitary(matrix: np.ndarray, atol: float = UNITARY_ATOL) -> np.ndarray:
    """Validate and return matrix as a complex unitary array."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("unitary must be a square matrix")
    if matrix.shape[0] < 1:
        raise ValueError("unitary dimension must be at least 1")
    if not is_unitary(matrix, atol):
        raise ValueError("matrix fails the unitarity check")
    return matrix


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Draw a Haar-distributed dim x dim unitary.

    Complex Ginibre matrix followed by QR, with the R diagonal phases
    absorbed into Q so that the distribution is exactly Haar rather than
    the QR-convention-dependent one.

    Parameters
    ----------
    dim : positive int
    seed : anything accepted by numpy.random.default_rng; same seed gives
        the same matrix.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases[np.newaxis, :]


def fourier_matrix(dim: int) -> np.ndarray:
    """Discrete-Fourier interferometer F[j, k] = exp(-2 pi i j k / dim) / sqrt(dim).

    Indices here are 0-based; with 1-based mode labels j', k' the entry is
    exp(-2 pi i (j'-1)(k'-1) / dim) / sqrt(dim).
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    idx = np.arange(dim)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / dim) / np.sqrt(dim)


def embed_uniform_loss(unitary: np.ndarray, transmissivity: float) -> np.ndarray:
    """Embed an m-mode unitary with uniform loss into a 2m-mode unitary.

    Each input mode i meets a real beam splitter that keeps amplitude
    sqrt(t) in the physical mode and sends sqrt(1-t) to environment mode
    m+i (the second diagonal carries -sqrt(t) so each block is orthogonal),
    after which the lossless unitary acts on the physical block and the
    identity on the environment block.

    Returns the 2m x 2m unitary; modes 1..m are physical, m+1..2m are the
    environment.
    """
    u = require_unitary(unitary)
    t = float(transmissivity)
    if not 0.0 <= t <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    m = u.shape[0]
    a = np.sqrt(t)
    b = np.sqrt(1.0 - t)
    splitter = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    for i in range(m):
        splitter[i, i] = a
        splitter[i, m + i] = b
        splitter[m + i, i] = b
        splitter[m + i, m + i] = -a
    full = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    full[:m, :m] = u
    full[m:, m:] = np.eye(m)
    return splitter @ full


def unitary_to_json(unitary: np.ndarray) -> dict:
    """JSON-serializable form: {"dim": m, "re": [[...]], "im": [[...]]}."""
    u = np.asarray(unitary, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("unitary must be a square matrix")
    return {
        "dim": int(u.shape[0]),
        "re": u.real.tolist(),
        "im": u.imag.tolist(),
    }


def unitary_from_json(obj: dict) -> np.ndarray:
    """Parse and validate the {"dim", "re", "im"} unitary format."""
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed unitary object: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError("unitary re/im blocks must be dim x dim")
    return require_unitary(re + 1j * im)
