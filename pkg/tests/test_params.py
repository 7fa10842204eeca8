import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from sparsejl.params import (JLParams, ParameterError, derive_params, hadamard_threshold,
                             validate_assumptions)

# Frozen from a 50-digit mpmath evaluation of the closed forms (see _mp_oracle).
FROZEN = {
    (0.5, 0.05): dict(k=144, c=6083, alpha=0.25108135803610969347, sigma_star_sq=0.0086880649863618728713, b=524288),
    (0.01, 0.05): dict(k=359488, c=1194776, alpha=6.3338569608999862042, sigma_star_sq=2.0400839418561916404e-05,
                       b=134217728),
    (0.3, 0.01): dict(k=615, c=29864, alpha=0.30229401227065317725, sigma_star_sq=0.0021175512394644764710,
                      b=4194304),
}


def _mp_oracle(eps, delta):
    mpmath.mp.dps = 50
    e, dl = mpmath.mpf(eps), mpmath.mpf(delta)
    k = int(mpmath.ceil(12 / e**2 * mpmath.log(1 / dl)))
    c = int(mpmath.ceil(16 / e * mpmath.log(1 / dl) * mpmath.log(k / dl) ** 2))
    alpha = 1 / (e * mpmath.log(k / dl))
    bmin = 6 * c * mpmath.log(3 * c / dl)
    b = 2 ** int(mpmath.ceil(mpmath.log(bmin, 2)))
    return dict(k=k, c=c, alpha=float(alpha), sigma_star_sq=float((1 + alpha) / k), b=b)


@pytest.mark.parametrize("eps,delta", list(FROZEN))
def test_frozen_values(eps, delta):
    p = derive_params(eps, delta, 4096, 1)
    want = FROZEN[(eps, delta)]
    assert (p.k, p.c, p.b) == (want["k"], want["c"], want["b"])
    assert p.alpha == pytest.approx(want["alpha"], rel=1e-14)
    assert p.sigma_star_sq == pytest.approx(want["sigma_star_sq"], rel=1e-14)


@pytest.mark.parametrize("eps,delta", list(FROZEN))
def test_frozen_values_match_oracle(eps, delta):
    want = _mp_oracle(eps, delta)
    for key in ("k", "c", "b"):
        assert want[key] == FROZEN[(eps, delta)][key]


def test_example_half_five_percent():
    p = derive_params(0.5, 0.05, 4096, 1)
    assert p.k == math.ceil(48 * math.log(20))
    assert p.c == math.ceil(32 * math.log(20) * math.log(p.k / 0.05) ** 2)


def test_deterministic():
    assert derive_params(0.5, 0.05, 4096, 1) == derive_params(0.5, 0.05, 4096, 1)


@pytest.mark.parametrize("eps,delta,d,msg", [
    (1.2, 0.05, 10, "epsilon"),
    (0.0, 0.05, 10, "epsilon"),
    (0.5, 0.1, 10, "delta"),
    (0.5, 0.0, 10, "delta"),
    (0.5, 0.05, 0, "dimension"),
])
def test_domain_errors(eps, delta, d, msg):
    with pytest.raises(ParameterError, match=msg):
        derive_params(eps, delta, d, 1)


def test_seed_must_be_u64():
    with pytest.raises(ParameterError):
        derive_params(0.5, 0.05, 10, 2**64)


def test_b_power_of_two_above_threshold():
    p = derive_params(0.5, 0.05, 10)
    assert p.b & (p.b - 1) == 0
    assert p.b >= hadamard_threshold(p.c, p.delta)
    assert p.b // 2 < hadamard_threshold(p.c, p.delta)


@given(st.floats(0.05, 0.95), st.floats(0.001, 0.099), st.floats(0.5, 0.99))
def test_monotone(eps, delta, shrink):
    a = derive_params(eps, delta, 1)
    b = derive_params(eps * shrink, delta, 1)
    c = derive_params(eps, delta * shrink, 1)
    assert b.k >= a.k and b.c >= a.c
    assert c.k >= a.k and c.c >= a.c


def test_warnings_half():
    p = derive_params(0.5, 0.05, 4096, 1)
    assert p.alpha == pytest.approx(1 / (0.5 * math.log(p.k / 0.05)))
    codes = {w.code for w in validate_assumptions(p)}
    assert codes == {"alpha", "hg-dimension", "delta-vs-k"}
    assert validate_assumptions(p) == validate_assumptions(p)


def test_warnings_small_eps():
    p = derive_params(0.01, 0.05, 4096, 1)
    assert 1 / (0.01 * math.log(p.k / 0.05)) > 3
    assert "alpha" not in {w.code for w in validate_assumptions(p)}


def test_no_dimension_warning_when_hg_possible():
    p = derive_params(0.5, 0.05, 1 << 19, 1)
    assert "hg-dimension" not in {w.code for w in validate_assumptions(p)}


def test_record_round_trip():
    p = derive_params(0.3, 0.01, 777, 99)
    text = p.to_record()
    names = [ln.split("=")[0] for ln in text.splitlines()]
    assert names == ["epsilon", "delta", "d", "seed", "k", "c", "alpha", "sigma_star_sq", "b"]
    assert JLParams.from_record(text) == p


def test_record_rejects_tampered_field():
    text = derive_params(0.3, 0.01, 777, 99).to_record().replace("k=615", "k=600")
    with pytest.raises(ParameterError):
        JLParams.from_record(text)
