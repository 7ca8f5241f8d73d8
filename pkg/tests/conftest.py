import numpy as np
import pytest

from whitham_lab.spectral import FieldPair, Grid, gradient, random_bandlimited


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def grid1():
    return Grid(1, 16 * np.pi, 256)


@pytest.fixture(scope="session")
def grid2():
    return Grid(2, 8 * np.pi, 64)


def dealiased(g, f):
    return g.ifft(g.dealias_mask * g.fft(f)).real


def random_state(g, rng, amplitude=0.3, dealias=True):
    k = (g.n - 1) // 3
    eta = random_bandlimited(g, rng, k, amplitude)
    if g.dim == 1:
        v = random_bandlimited(g, rng, k, amplitude)
    else:
        v = gradient(g, random_bandlimited(g, rng, k, amplitude))
    if dealias:
        eta, v = dealiased(g, eta), dealiased(g, v)
    return FieldPair(g, eta, v)


def gaussian_state(g, amplitude):
    if g.dim == 1:
        x = g.x
        return FieldPair(g, amplitude * np.exp(-(x / 4) ** 2),
                         0.7 * amplitude * np.exp(-((x - 3) / 5) ** 2))
    x1, x2 = g.x
    eta = amplitude * np.exp(-((x1 - 2) ** 2 + x2**2) / 20)
    v = gradient(g, 5 * amplitude * np.exp(-(x1**2 + x2**2) / 30))
    return FieldPair(g, eta, v)
