import numpy as np
import pytest

from dfie.oracle import OracleDivergenceError, oracle_all, oracle_symbol
from dfie.symbols import (JUMP_CONSTANTS, OP_DESCRIPTIONS, OP_IDS, TraceSymbolError, jump_block, one_sided, pv,
                          scalar_single_layer_symbol, trace_symbol)


@pytest.fixture(scope="module")
def oracle_n2():
    return oracle_all(2, 1, 1.5 + 0.5j)


def test_every_op_described():
    assert set(OP_DESCRIPTIONS) == set(OP_IDS) == set(JUMP_CONSTANTS)


def test_oracle_subset_m_nonzero(oracle_n2):
    # closed forms never see m; the quadrature oracle at m = 1 must still agree
    k = 1.5 + 0.5j
    for op, res in oracle_n2.items():
        np.testing.assert_allclose(res.average, pv(op, 2, k), atol=1e-7, err_msg=op)
        np.testing.assert_allclose(res.jump, jump_block(op, 2, k), atol=1e-7, err_msg=op)


def test_oracle_m_independence():
    a = oracle_symbol("M", 1, 0, 2.0)
    b = oracle_symbol("M", 1, 1, 2.0)
    np.testing.assert_allclose(a.exterior, b.exterior, atol=1e-8)
    np.testing.assert_allclose(a.interior, b.interior, atol=1e-8)


def test_oracle_input_validation():
    with pytest.raises(ValueError):
        oracle_all(1, 2, 1.0)
    with pytest.raises(ValueError):
        oracle_all(1, 0, 1.0, h_sequence=(1e-3, 2e-3, 4e-3))
    with pytest.raises(ValueError):
        oracle_symbol("M", 0, 0, 1.0)


def test_oracle_divergence_is_detected():
    with pytest.raises(OracleDivergenceError):
        oracle_all(1, 0, 1.0, h_sequence=(4e-1, 2e-1, 1e-1), divergence_tol=1e-12)


@pytest.mark.parametrize("k", [1.0, 2 + 1j, 1e-2, 0.0])
@pytest.mark.parametrize("n", [1, 3, 8])
def test_jumps_of_closed_forms(n, k):
    for op in OP_IDS:
        d = one_sided(op, n, k, "ext") - one_sided(op, n, k, "int")
        np.testing.assert_allclose(d, JUMP_CONSTANTS[op] * np.eye(*d.shape), atol=1e-12, err_msg=op)


@pytest.mark.parametrize("n", [1, 2, 6])
def test_divS_t_on_V_is_minus_L_times_scalar_symbol(n):
    # div S[V] = S[div_S V] = -sqrt(n(n+1)) S[Y]
    k = 0.7 + 0.3j
    L = np.sqrt(n * (n + 1))
    assert abs(pv("divS_t", n, k)[0, 0] + L * scalar_single_layer_symbol(n, k)) < 1e-13
    assert abs(pv("divS_t", n, k)[0, 1]) < 1e-15  # W is divergence free


def test_static_limit_is_laplace():
    for n in range(6):
        assert scalar_single_layer_symbol(n, 0.0) == pytest.approx(1 / (2 * n + 1))
        assert pv("Sp", n, 0.0)[0, 0] == pytest.approx(-1 / (2 * (2 * n + 1)))
        assert abs(pv("S", n, 1e-9)[0, 0] - pv("S", n, 0.0)[0, 0]) < 1e-8


def test_trace_symbol_record():
    s = trace_symbol("nxS_t", 3, 1.0)
    assert s.block.shape == (2, 2) and s.input_kind == "t" and s.output_kind == "t" and s.jump == 0.0
    assert trace_symbol("D", 0, 1.0).block.shape == (1, 1)
    assert trace_symbol("nxgradS", 0, 1.0).block.shape == (0, 1)


def test_errors():
    with pytest.raises(TraceSymbolError):
        pv("nope", 1, 1.0)
    with pytest.raises(TraceSymbolError):
        pv("M", 0, 1.0)
    with pytest.raises(TraceSymbolError):
        pv("S", 1, 1 - 1j)
    with pytest.raises(TraceSymbolError):
        pv("S", -1, 1.0)
