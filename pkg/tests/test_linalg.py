import json

import numpy as np
import pytest

from bosonbin import (
    embed_uniform_loss,
    fourier_matrix,
    haar_unitary,
    is_unitary,
    require_unitary,
    unitary_from_json,
    unitary_to_json,
)


def test_fourier_matrix_is_unitary():
    for dim in (1, 2, 3, 8, 64):
        f = fourier_matrix(dim)
        assert f.shape == (dim, dim)
        assert is_unitary(f)


def test_fourier_matrix_entries():
    f = fourier_matrix(2)
    assert np.allclose(f, np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def test_haar_unitary_is_unitary_and_deterministic():
    u1 = haar_unitary(5, 42)
    u2 = haar_unitary(5, 42)
    u3 = haar_unitary(5, 43)
    assert is_unitary(u1)
    assert np.array_equal(u1, u2)
    assert not np.allclose(u1, u3)


def test_haar_first_entry_second_moment():
    # E |U_00|^2 = 1/m; Var |U_00|^2 = 2/(m(m+1)) - 1/m^2
    dim, draws = 4, 4000
    seeds = np.random.SeedSequence(7).spawn(draws)
    values = np.array([abs(haar_unitary(dim, s)[0, 0]) ** 2 for s in seeds])
    var = 2.0 / (dim * (dim + 1)) - 1.0 / dim ** 2
    assert abs(values.mean() - 1.0 / dim) < 3.0 * np.sqrt(var / draws)


def test_require_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        require_unitary(np.ones((2, 2)))
    with pytest.raises(ValueError):
        require_unitary(np.eye(3)[:2])


def test_embed_uniform_loss_is_unitary():
    rng = np.random.default_rng(3)
    for _ in range(20):
        dim = int(rng.integers(1, 7))
        t = float(rng.uniform(0.0, 1.0))
        big = embed_uniform_loss(haar_unitary(dim, rng.integers(2 ** 32)), t)
        assert big.shape == (2 * dim, 2 * dim)
        assert is_unitary(big)


def test_embed_uniform_loss_endpoints():
    u = haar_unitary(3, 11)
    full = embed_uniform_loss(u, 1.0)
    # t = 1: the system block is u itself, nothing couples to the environment
    assert np.allclose(full[:3, :3], u)
    assert np.allclose(np.abs(full[3:, :3]), 0.0)
    none = embed_uniform_loss(u, 0.0)
    # t = 0: every photon ends up in the environment block
    assert np.allclose(np.abs(none[:3, :3]), 0.0)


def test_embed_uniform_loss_rejects_bad_transmissivity():
    u = haar_unitary(2, 0)
    for t in (-0.1, 1.1):
        with pytest.raises(ValueError):
            embed_uniform_loss(u, t)


def test_unitary_json_round_trip():
    u = haar_unitary(4, 9)
    text = json.dumps(unitary_to_json(u))
    back = unitary_from_json(json.loads(text))
    assert np.allclose(u, back, atol=1e-15)


def test_unitary_from_json_rejects_garbage():
    with pytest.raises(ValueError):
        unitary_from_json({"dim": 2, "re": [[1, 0], [0, 1]]})
    with pytest.raises(ValueError):
        unitary_from_json({"dim": 2,
                           "re": [[2, 0], [0, 2]],
                           "im": [[0, 0], [0, 0]]})
