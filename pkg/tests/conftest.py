import numpy as np
import pytest
from hypothesis import strategies as st


def random_spd(rng, n, cond=50.0):
    """SPD matrix with eigenvalues spread over ``[1, cond]`` in a random basis."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(0.0, np.log(cond), n))
    return (q * lam) @ q.T


def random_system(rng, n, with_mass=False, curved=True):
    """Coefficient set with SPD ``a``, random ``b``, ``c0`` and symmetric ``d_tau``."""
    from ttbc import SystemCoefficients

    a = random_spd(rng, n)
    b = tuple(rng.standard_normal((n, n)) for _ in range(2))
    c0 = rng.standard_normal((n, n)) if curved else None
    j = random_spd(rng, n, cond=5.0) if with_mass else None
    d = None
    if not with_mass:
        d = tuple(0.1 * (m + m.T) for m in (rng.standard_normal((n, n)) for _ in range(2)))
    return SystemCoefficients(a=a, b=b, c0=c0, j=j, d_tau=d)


@st.composite
def spd_matrices(draw, max_n=8, cond=1e3):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    c = draw(st.floats(1.0, cond))
    return random_spd(rng, n, cond=c)


@st.composite
def seeds(draw):
    return np.random.default_rng(draw(st.integers(0, 2**32 - 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
