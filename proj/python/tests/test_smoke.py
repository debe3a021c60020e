import math

import numpy as np
import pytest

import domino


def test_single_node_kramers_time():
    assert domino.kramers_1d(domino.NodeParams(0.01), 0.03) == pytest.approx(611.1259709771632, rel=1e-12)


def test_gradient_matches_finite_differences():
    p = domino.NodeParams(0.01)
    net = domino.Network.pair(0.2, 0.0)
    x = np.array([0.3, -0.2])
    g = domino.gradient(x, p, net)
    for i in range(2):
        e = np.zeros(2)
        e[i] = 1e-6
        fd = (domino.coupled_potential(x + e, p, net) - domino.coupled_potential(x - e, p, net)) / 2e-6
        assert abs(fd - g[i]) < 1e-6


def test_monte_carlo_is_reproducible():
    p = domino.NodeParams(0.01)
    net = domino.Network.chain(3, 0.1, 0.05)
    cfg = domino.SimulationConfig()
    cfg.n_samples = 40
    cfg.master_seed = 7
    a = domino.monte_carlo(p, net, cfg, threads=1)
    b = domino.monte_carlo(p, net, cfg, threads=4)
    assert np.array_equal(a.tau, b.tau)
    assert a.tau.shape == (40, 3)
    table = domino.sequence_table(a.records)
    assert sum(r.probability for r in table.rows) + table.censored_fraction == pytest.approx(1.0)
    for r in a.records:
        if not r.censored:
            assert sum(r.gaps) == max(r.tau_node)


def test_pair_boundaries():
    p = domino.NodeParams(0.01)
    b = domino.detect_boundaries(p, domino.Network.pair(0.0, 0.0))
    assert b.beta3 is None
    assert b.beta2 == pytest.approx(domino.beta2_pitchfork(p), abs=1e-6)
    assert abs(b.beta1 - 0.0101) < 1e-3
    counts = [domino.census(domino.equilibria_at(p, domino.Network.pair(beta, 0.0), beta)).total
              for beta in (0.005, 0.05, 0.2)]
    assert counts == [9, 5, 3]


def test_errors_carry_their_kind():
    with pytest.raises(domino.DominoError) as info:
        domino.NodeParams(1.5)
    assert info.value.kind == "InvalidArgument"
    with pytest.raises(domino.DominoError) as info:
        domino.regime_T20("strong", domino.NodeParams(0.01), 0.05, 0.03)
    assert info.value.kind == "WrongRegime"


def test_strong_regime_estimate():
    est = domino.regime_T20("strong", domino.NodeParams(0.01), 0.2, 0.03)
    assert est.legs[0].barrier == pytest.approx(2 * (4 / 3) * 0.01 ** 1.5, rel=1e-10)
    assert math.isfinite(est.T20)
