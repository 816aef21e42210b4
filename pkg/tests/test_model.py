import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mowave import (
    AffineAlpha,
    Bump,
    ConfigError,
    ConstantAlpha,
    ConstantBeta,
    DampingParams,
    ExponentialBeta,
    GridSamples,
    ManufacturedField,
    PolynomialBeta,
    ProblemSpec,
    SaturatingAlpha,
    SineMode,
    eval_alpha,
    eval_beta,
    spec_from_dict,
    spec_to_dict,
    sup_alpha_prime,
    validate_assumptions,
)


def make_spec(**overrides):
    base = dict(
        damping=DampingParams(a=1.0, b=1.0, rho=1.0),
        beta=ExponentialBeta(beta0=1.0, mu=0.1),
        alpha=SaturatingAlpha(k=0.5, tau=1.0),
        init=SineMode(m=1, amp_u0=1.0, amp_u1=0.0),
        horizon=10.0,
    )
    base.update(overrides)
    return ProblemSpec(**base)


# strategies for admissible families
alphas = st.one_of(
    st.just(ConstantAlpha()),
    st.floats(0.0, 0.95).map(AffineAlpha),
    st.tuples(st.floats(0.0, 2.0), st.floats(0.05, 0.95)).map(
        lambda kt: SaturatingAlpha(k=kt[0], tau=max(kt[0] / kt[1], 0.1))
    ),
)
betas = st.one_of(
    st.floats(0.01, 10.0).map(ConstantBeta),
    st.tuples(st.floats(0.1, 5.0), st.floats(0.0, 2.0)).map(
        lambda bm: ExponentialBeta(beta0=bm[0], mu=bm[1])
    ),
    st.lists(st.floats(0.0, 3.0), min_size=1, max_size=4).map(
        lambda cs: PolynomialBeta(coeffs=(1.0 + cs[0],) + tuple(cs[1:]))
    ),
)


class TestAlphaFamilies:
    def test_constant(self):
        assert eval_alpha(ConstantAlpha(), 3.7) == (1.0, 0.0, 0.0)
        assert sup_alpha_prime(ConstantAlpha()) == 0.0

    def test_affine(self):
        al, ap, app = eval_alpha(AffineAlpha(0.5), 2.0)
        assert al == 2.0 and ap == 0.5 and app == 0.0
        assert sup_alpha_prime(AffineAlpha(0.5)) == 0.5

    def test_saturating(self):
        fam = SaturatingAlpha(k=0.5, tau=2.0)
        al, ap, app = eval_alpha(fam, 0.0)
        assert al == 1.0
        assert ap == 0.25
        assert app == -0.125
        assert sup_alpha_prime(fam) == 0.25
        # approaches 1 + k
        assert eval_alpha(fam, 1e3)[0] == pytest.approx(1.5)

    def test_saturating_needs_positive_tau(self):
        with pytest.raises(ConfigError):
            SaturatingAlpha(k=0.5, tau=0.0)

    @settings(max_examples=60)
    @given(alphas, st.floats(0.001, 50.0))
    def test_admissible_families_expand_subcharacteristically(self, fam, t):
        al, ap, _ = eval_alpha(fam, t)
        assert al >= 1.0
        assert 0.0 <= ap < 1.0
        assert ap <= sup_alpha_prime(fam) + 1e-12

    @settings(max_examples=40)
    @given(alphas, st.floats(0.1, 20.0))
    def test_derivatives_match_central_differences(self, fam, t):
        h = 1e-5
        al_m, ap_m, _ = eval_alpha(fam, t - h)
        al, ap, app = eval_alpha(fam, t)
        al_p, ap_p, _ = eval_alpha(fam, t + h)
        assert (al_p - al_m) / (2 * h) == pytest.approx(ap, abs=1e-8, rel=1e-6)
        assert (ap_p - ap_m) / (2 * h) == pytest.approx(app, abs=1e-8, rel=1e-6)


class TestBetaFamilies:
    def test_constant(self):
        assert eval_beta(ConstantBeta(2.5), 9.0) == (2.5, 0.0)

    def test_exponential(self):
        val, der = eval_beta(ExponentialBeta(beta0=2.0, mu=0.3), 1.0)
        assert val == pytest.approx(2.0 * math.exp(0.3))
        assert der == pytest.approx(0.6 * math.exp(0.3))

    def test_polynomial_horner(self):
        beta = PolynomialBeta(coeffs=(1.0, 2.0, 3.0))
        val, der = eval_beta(beta, 2.0)
        assert val == pytest.approx(1.0 + 4.0 + 12.0)
        assert der == pytest.approx(2.0 + 12.0)

    def test_polynomial_empty_rejected(self):
        with pytest.raises(ConfigError):
            PolynomialBeta(coeffs=())

    @settings(max_examples=60)
    @given(betas, st.floats(0.0, 30.0))
    def test_admissible_families_positive_nondecreasing(self, fam, t):
        val, der = eval_beta(fam, t)
        assert val > 0.0
        assert der >= -1e-12 * max(1.0, abs(val))


class TestInitialData:
    def test_sine_mode_nodes(self):
        y = np.linspace(0.0, 1.0, 5)
        u0, u1 = SineMode(m=1, amp_u0=1.0, amp_u1=0.0).sample(y)
        s = math.sqrt(2.0) / 2.0
        assert u0 == pytest.approx([0.0, s, 1.0, s, 0.0], abs=1e-15)
        assert u1 == pytest.approx([0.0] * 5)

    def test_sine_mode_m2_vanishes_midpoint(self):
        y = np.linspace(0.0, 1.0, 5)
        u0, _ = SineMode(m=2, amp_u0=3.0).sample(y)
        assert u0[2] == pytest.approx(0.0, abs=1e-14)
        assert u0[1] == pytest.approx(3.0)

    def test_bump_support_and_positivity(self):
        y = np.linspace(0.0, 1.0, 101)
        u0, u1 = Bump(center=0.5, width=0.2, amp=2.0).sample(y)
        assert u0[0] == 0.0 and u0[-1] == 0.0
        assert np.all(u0[np.abs(y - 0.5) >= 0.2] == 0.0)
        assert np.all(u0[np.abs(y - 0.5) < 0.19] > 0.0)
        assert u0.max() == pytest.approx(2.0)
        assert np.all(u1 == 0.0)

    def test_grid_samples_length_mismatch(self):
        data = GridSamples(u0=(0.0, 1.0, 0.0), u1=(0.0, 0.0, 0.0))
        with pytest.raises(ConfigError):
            data.sample(np.linspace(0.0, 1.0, 9))

    def test_grid_samples_unequal_lengths(self):
        with pytest.raises(ConfigError):
            GridSamples(u0=(0.0, 1.0, 0.0), u1=(0.0, 0.0))


class TestValidation:
    def test_reference_spec_accepted(self):
        report = validate_assumptions(make_spec())
        assert report.ok, report.summary()

    def test_affine_k1_fails_a1_with_diagnostic(self):
        report = validate_assumptions(make_spec(alpha=AffineAlpha(1.0)))
        assert not report.ok
        (failure,) = report.failures
        assert failure.name == "A1"
        assert "sup α'(t)<1" in failure.detail

    def test_shrinking_domain_fails(self):
        report = validate_assumptions(make_spec(alpha=AffineAlpha(-0.1)))
        assert not report.ok

    def test_negative_mu_fails_a2(self):
        report = validate_assumptions(make_spec(beta=ExponentialBeta(1.0, -0.5)))
        assert any(c.name == "A2" and not c.passed for c in report.checks)

    def test_nonpositive_rho_fails_a3(self):
        report = validate_assumptions(make_spec(damping=DampingParams(1.0, 1.0, 0.0)))
        assert any(c.name == "A3" and not c.passed for c in report.checks)

    def test_nonpositive_a_fails(self):
        report = validate_assumptions(make_spec(damping=DampingParams(0.0, 1.0, 1.0)))
        assert any(c.name == "damping" and not c.passed for c in report.checks)

    def test_b_zero_accepted(self):
        report = validate_assumptions(make_spec(damping=DampingParams(1.0, 0.0, 1.0)))
        assert report.ok

    def test_bump_leaving_interval_fails(self):
        report = validate_assumptions(make_spec(init=Bump(center=0.1, width=0.25)))
        assert any(c.name == "init" and not c.passed for c in report.checks)

    def test_grid_samples_nonzero_endpoint_fails(self):
        init = GridSamples(u0=(0.5, 1.0, 0.0), u1=(0.0, 0.0, 0.0))
        report = validate_assumptions(make_spec(init=init))
        assert any(c.name == "init" and not c.passed for c in report.checks)

    def test_linear_mode_flagged_not_failed(self):
        report = validate_assumptions(make_spec(linear_mode=True))
        assert report.ok
        a2 = next(c for c in report.checks if c.name == "A2")
        assert "linear_mode" in a2.detail

    def test_nonpositive_horizon_fails(self):
        report = validate_assumptions(make_spec(horizon=0.0))
        assert any(c.name == "horizon" and not c.passed for c in report.checks)


class TestConfigParsing:
    def config(self):
        return {
            "damping": {"a": 1.0, "b": 1.0, "rho": 1.0},
            "beta": {"variant": "exponential", "beta0": 1.0, "mu": 0.1},
            "alpha": {"variant": "saturating", "k": 0.5, "tau": 1.0},
            "init": {"variant": "sine", "m": 1, "amp_u0": 1.0, "amp_u1": 0.0},
            "horizon": 10.0,
        }

    def test_roundtrip(self):
        spec = spec_from_dict(self.config())
        assert spec_from_dict(spec_to_dict(spec)) == spec

    def test_roundtrip_all_variants(self):
        cfg = self.config()
        cfg["beta"] = {"variant": "polynomial", "coeffs": [1.0, 0.5]}
        cfg["alpha"] = {"variant": "affine", "k": 0.25}
        cfg["init"] = {"variant": "bump", "center": 0.5, "width": 0.2, "amp": 1.5}
        cfg["manufactured"] = {"amp": 1.0, "rate": 2.0, "mode": 2}
        spec = spec_from_dict(cfg)
        assert isinstance(spec.beta, PolynomialBeta)
        assert isinstance(spec.source, ManufacturedField)
        assert spec_from_dict(spec_to_dict(spec)) == spec

    def test_unknown_top_level_key_rejected(self):
        cfg = self.config()
        cfg["extra"] = 1
        with pytest.raises(ConfigError, match="unknown keys"):
            spec_from_dict(cfg)

    def test_unknown_section_key_rejected(self):
        cfg = self.config()
        cfg["beta"]["rate"] = 1.0
        with pytest.raises(ConfigError, match="unknown keys"):
            spec_from_dict(cfg)

    def test_missing_key_rejected(self):
        cfg = self.config()
        del cfg["horizon"]
        with pytest.raises(ConfigError, match="missing keys"):
            spec_from_dict(cfg)

    def test_unknown_variant_rejected(self):
        cfg = self.config()
        cfg["alpha"] = {"variant": "quadratic", "k": 0.5}
        with pytest.raises(ConfigError, match="variant"):
            spec_from_dict(cfg)

    def test_bool_is_not_a_number(self):
        cfg = self.config()
        cfg["damping"]["a"] = True
        with pytest.raises(ConfigError, match="expected a number"):
            spec_from_dict(cfg)

    def test_non_finite_rejected(self):
        with pytest.raises(ConfigError, match="finite"):
            DampingParams(a=float("inf"), b=1.0, rho=1.0)

    def test_linear_mode_not_in_schema(self):
        cfg = self.config()
        cfg["linear_mode"] = True
        with pytest.raises(ConfigError, match="unknown keys"):
            spec_from_dict(cfg)
