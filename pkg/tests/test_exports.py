import numpy as np

from magweyl import fields as F
from magweyl import grid as G

QUAD = F.Quadrature(16)


def test_kernel_csv_export_roundtrip(tmp_path):
    g = G.PhaseSpaceGrid(1, 8, 4.0)
    k = G.kernel_from_symbol(G.gaussian_symbol(1, x_width=0.8, p_width=0.8), None, g, QUAD)
    path = tmp_path / "kernel.csv"
    k.to_csv(path)
    data = np.loadtxt(path, delimiter=",")
    back = (data[:, 0] + 1j * data[:, 1]).reshape(g.size, g.size)
    assert np.abs(back - k.kernel).max() < 1e-12
    assert path.read_text().startswith("#")  # index-order header present


def test_symbol_csv_export_roundtrip(tmp_path):
    g = G.PhaseSpaceGrid(1, 8, 4.0)
    tab = G.gaussian_symbol(1, x_width=0.8, p_width=0.8).sample(g, "midpoint")
    path = tmp_path / "symbol.csv"
    tab.to_csv(path)
    data = np.loadtxt(path, delimiter=",")
    back = (data[:, 0] + 1j * data[:, 1]).reshape(tab.values.shape)
    assert np.abs(back - tab.values).max() < 1e-12
    assert "midpoint" in path.read_text().splitlines()[0]


# the calculus is dimension-generic up to the supported N = 3

def test_three_dimensional_smoke():
    g = G.PhaseSpaceGrid(3, 4, 3.0)
    ident = G.kernel_from_symbol(G.constant_symbol(3), None, g, QUAD)
    expect = np.eye(g.size) / g.config_weight
    assert np.abs(ident.kernel - expect).max() * g.config_weight < 1e-10

    u = G.WaveFunction(g, np.random.default_rng(0).normal(size=g.shape))
    back = G.fourier_config(G.WaveFunction(g, G.fourier_config(u, "forward")), "inverse")
    assert np.abs(back - u.values).max() / np.abs(u.values).max() < 1e-12


def test_three_dimensional_symbol_roundtrip():
    g = G.PhaseSpaceGrid(3, 8, 4.0)
    f = G.gaussian_symbol(3, x_width=0.3, p_width=0.25)
    k = G.kernel_from_symbol(f, None, g, QUAD)
    rec = G.symbol_from_kernel(k, None, QUAD)
    expect = f.sample(g, "midpoint")
    assert np.abs(rec.inner_band() - expect.inner_band()).max() < 1e-8
