"""Grid, quadrature, time stepping, and manufactured-solution machinery."""

import math

import numpy as np
import pytest

from mowave import (
    AffineAlpha,
    BlowUpError,
    Bump,
    ConfigError,
    ConstantAlpha,
    ConstantBeta,
    DampingParams,
    ExponentialBeta,
    Grid,
    GridSamples,
    ManufacturedField,
    ProblemSpec,
    ReferenceState,
    ResourceLimitError,
    SaturatingAlpha,
    SineMode,
    Trajectory,
    ValidationError,
    energy,
    exact_reference_fields,
    initialize,
    manufactured_forcing,
    rhs,
    simulate,
    step_size,
)
from mowave.solver import simpson_weights


def make_spec(**kw):
    base = dict(
        damping=DampingParams(a=1.0, b=1.0, rho=1.0),
        beta=ConstantBeta(1.0),
        alpha=ConstantAlpha(),
        init=SineMode(m=1, amp_u0=1.0, amp_u1=0.0),
        horizon=1.0,
    )
    base.update(kw)
    return ProblemSpec(**base)


class TestGrid:
    def test_rejects_small_n(self):
        with pytest.raises(ConfigError):
            Grid(4)
        with pytest.raises(ConfigError):
            Grid(0)

    def test_rejects_non_integer(self):
        with pytest.raises(ConfigError):
            Grid(10.0)
        with pytest.raises(ConfigError):
            Grid(True)

    def test_nodes_and_spacing(self):
        g = Grid(8)
        assert g.dy == pytest.approx(0.125)
        assert g.y[0] == 0.0 and g.y[-1] == 1.0
        assert np.allclose(np.diff(g.y), g.dy)

    def test_nodes_are_read_only(self):
        g = Grid(16)
        with pytest.raises(ValueError):
            g.y[0] = 5.0


class TestSimpsonWeights:
    @pytest.mark.parametrize("n", [8, 10, 100, 9, 11, 101])
    def test_exact_on_cubics(self, n):
        # both the Simpson body and the 3/8 tail integrate cubics exactly
        dy = 1.0 / n
        y = np.linspace(0.0, 1.0, n + 1)
        w = simpson_weights(n, dy)
        assert w.sum() == pytest.approx(1.0, abs=1e-14)
        assert w @ y**2 == pytest.approx(1.0 / 3.0, abs=1e-14)
        assert w @ y**3 == pytest.approx(1.0 / 4.0, abs=1e-14)

    def test_quartic_error_is_fourth_order(self):
        vals = []
        for n in (16, 32):
            y = np.linspace(0.0, 1.0, n + 1)
            w = simpson_weights(n, 1.0 / n)
            vals.append(abs(w @ y**4 - 0.2))
        assert vals[0] / vals[1] > 12.0  # ~16 for genuine O(dy^4)


class TestStepSize:
    def test_cylindrical(self):
        dt = step_size(make_spec(), Grid(100))
        assert dt == pytest.approx(0.005, abs=1e-15)

    def test_expanding_slows_the_step(self):
        spec = make_spec(alpha=AffineAlpha(k=0.5))
        dt = step_size(spec, Grid(100))
        assert dt == pytest.approx(0.5 * 0.01 / 1.5, abs=1e-15)

    def test_scales_with_cfl(self):
        spec = make_spec()
        assert step_size(spec, Grid(100), cfl=0.25) == pytest.approx(
            0.5 * step_size(spec, Grid(100), cfl=0.5)
        )

    def test_rejects_bad_cfl(self):
        with pytest.raises(ConfigError):
            step_size(make_spec(), Grid(100), cfl=0.0)
        with pytest.raises(ConfigError):
            step_size(make_spec(), Grid(100), cfl=float("nan"))


class TestInitialize:
    def test_sine_mode_values(self):
        state = initialize(make_spec(), Grid(8))
        assert state.t == 0.0
        assert np.allclose(state.v, np.sin(np.pi * np.linspace(0, 1, 9)), atol=1e-15)
        assert np.all(state.w == 0.0)

    def test_endpoints_clamped(self):
        # a bump whose numerical tails are not exactly zero at the nodes
        spec = make_spec(init=Bump(center=0.5, width=0.49, amp=1.0))
        state = initialize(spec, Grid(10))
        assert state.v[0] == 0.0 and state.v[-1] == 0.0
        assert state.w[0] == 0.0 and state.w[-1] == 0.0

    def test_grid_samples_roundtrip(self):
        g = Grid(8)
        u0 = np.sin(np.pi * g.y)
        u1 = 0.3 * np.sin(2 * np.pi * g.y)
        state = initialize(make_spec(init=GridSamples(u0=tuple(u0), u1=tuple(u1))), g)
        assert np.allclose(state.v, u0, atol=1e-15)
        assert np.allclose(state.w, u1, atol=1e-15)

    def test_grid_samples_length_mismatch(self):
        spec = make_spec(init=GridSamples(u0=(0.0,) * 9, u1=(0.0,) * 9))
        with pytest.raises(ConfigError):
            initialize(spec, Grid(16))

    def test_manufactured_overrides_init(self):
        field = ManufacturedField(amp=1.0, rate=0.5, mode=2)
        spec = make_spec(source=field, init=SineMode(m=1, amp_u0=7.0, amp_u1=0.0))
        g = Grid(16)
        state = initialize(spec, g)
        v_fn, w_fn = exact_reference_fields(field, spec)
        assert np.allclose(state.v, v_fn(g.y, 0.0), atol=1e-14)
        assert np.allclose(state.w, w_fn(g.y, 0.0), atol=1e-14)


class TestRhs:
    def test_reduces_to_laplacian(self):
        # alpha = 1, a = b = 0, nonlinearity off: dw = v_yy
        spec = make_spec(
            damping=DampingParams(a=0.0, b=0.0, rho=1.0),
            linear_mode=True,
        )
        g = Grid(200)
        v = np.sin(np.pi * g.y)
        state = ReferenceState(0.0, v, np.zeros_like(v))
        dv, dw = rhs(state, spec, g)
        assert np.all(dv == 0.0)
        interior = slice(1, -1)
        expected = -np.pi**2 * np.sin(np.pi * g.y)
        assert np.allclose(dw[interior], expected[interior], atol=2e-3)
        assert dw[0] == 0.0 and dw[-1] == 0.0

    def test_damping_terms_enter_linearly(self):
        spec0 = make_spec(damping=DampingParams(a=0.0, b=0.0, rho=1.0), linear_mode=True)
        spec_a = make_spec(damping=DampingParams(a=2.0, b=0.0, rho=1.0), linear_mode=True)
        spec_b = make_spec(damping=DampingParams(a=0.0, b=3.0, rho=1.0), linear_mode=True)
        g = Grid(32)
        v = np.sin(np.pi * g.y)
        w = 0.5 * np.sin(2 * np.pi * g.y)
        state = ReferenceState(0.0, v, w)
        _, dw0 = rhs(state, spec0, g)
        _, dwa = rhs(state, spec_a, g)
        _, dwb = rhs(state, spec_b, g)
        inner = slice(1, -1)
        # alpha' = 0 so u_t = w: the a term subtracts a*w, the b term b*v
        assert np.allclose(dwa[inner], (dw0 - 2.0 * w)[inner], atol=1e-12)
        assert np.allclose(dwb[inner], (dw0 - 3.0 * v)[inner], atol=1e-12)

    def test_nonlinear_term_sign_and_power(self):
        spec_lin = make_spec(damping=DampingParams(a=0.0, b=0.0, rho=2.0), linear_mode=True)
        spec_non = make_spec(
            damping=DampingParams(a=0.0, b=0.0, rho=2.0),
            beta=ConstantBeta(4.0),
        )
        g = Grid(32)
        v = 0.5 * np.sin(np.pi * g.y)
        state = ReferenceState(0.0, v, np.zeros_like(v))
        _, dw_lin = rhs(state, spec_lin, g)
        _, dw_non = rhs(state, spec_non, g)
        inner = slice(1, -1)
        assert np.allclose(
            dw_non[inner], (dw_lin - 4.0 * np.abs(v) ** 2 * v)[inner], atol=1e-12
        )

    def test_non_finite_state_raises(self):
        g = Grid(8)
        v = np.zeros(9)
        v_bad = v.copy()
        v_bad[4] = np.nan
        with pytest.raises(BlowUpError):
            rhs(ReferenceState(0.25, v_bad, v), make_spec(), g)


class TestSimulate:
    def test_zero_data_stays_zero(self):
        spec = make_spec(init=SineMode(m=1, amp_u0=0.0, amp_u1=0.0), horizon=0.5)
        traj = simulate(spec, Grid(16))
        for s in traj.states:
            assert np.all(s.v == 0.0) and np.all(s.w == 0.0)
        assert energy(traj.states[-1], spec, traj.grid).E == 0.0

    def test_boundary_rows_exactly_zero(self):
        spec = make_spec(alpha=SaturatingAlpha(k=0.5, tau=1.0), horizon=0.5)
        traj = simulate(spec, Grid(32))
        for s in traj.states:
            assert s.v[0] == 0.0 and s.v[-1] == 0.0
            assert s.w[0] == 0.0 and s.w[-1] == 0.0

    def test_snapshot_times(self):
        spec = make_spec(horizon=0.5)
        traj = simulate(spec, Grid(16), sample_every=3)
        times = traj.times
        assert times[0] == 0.0
        assert times[-1] == pytest.approx(0.5, abs=1e-12)
        assert np.all(np.diff(times) > 0)
        # interior snapshots land on multiples of 3 dt
        for t in times[1:-1]:
            assert (t / traj.dt) % 3 == pytest.approx(0.0, abs=1e-9)

    def test_invalid_spec_raises(self):
        spec = make_spec(alpha=AffineAlpha(k=1.0))
        with pytest.raises(ValidationError):
            simulate(spec, Grid(16))

    def test_unstable_cfl_blows_up(self):
        spec = make_spec(horizon=1.0)
        with pytest.raises(BlowUpError) as exc:
            simulate(spec, Grid(64), cfl=10.0)
        assert 0.0 < exc.value.time <= 1.0
        assert "blew up" in str(exc.value)

    def test_snapshot_cap(self):
        spec = make_spec(horizon=1.0)
        with pytest.raises(ResourceLimitError):
            simulate(spec, Grid(64), snapshot_cap_bytes=1024)

    def test_bad_sample_every(self):
        with pytest.raises(ConfigError):
            simulate(make_spec(), Grid(16), sample_every=0)

    def test_energy_decays_for_reference_setup(self):
        spec = make_spec(
            beta=ExponentialBeta(beta0=1.0, mu=0.1),
            alpha=SaturatingAlpha(k=0.5, tau=1.0),
            horizon=2.0,
        )
        traj = simulate(spec, Grid(64), sample_every=10)
        e = [energy(s, spec, traj.grid).E for s in traj.states]
        assert e[-1] < 0.5 * e[0]


class TestTrajectoryInvariants:
    def test_must_start_at_zero(self):
        g = Grid(8)
        z = np.zeros(9)
        with pytest.raises(ConfigError):
            Trajectory(make_spec(), g, (ReferenceState(0.5, z, z),), dt=0.1)

    def test_times_strictly_increasing(self):
        g = Grid(8)
        z = np.zeros(9)
        s0 = ReferenceState(0.0, z, z)
        with pytest.raises(ConfigError):
            Trajectory(make_spec(horizon=1.0), g, (s0, s0), dt=0.1)

    def test_must_end_at_horizon(self):
        g = Grid(8)
        z = np.zeros(9)
        states = (ReferenceState(0.0, z, z), ReferenceState(0.5, z, z))
        with pytest.raises(ConfigError):
            Trajectory(make_spec(horizon=1.0), g, states, dt=0.1)


class TestManufactured:
    def test_static_field_forcing_is_the_laplacian_defect(self):
        # u = sin(pi x), alpha = 1, a = b = 0, nonlinearity off:
        # f = u_tt - u_xx = pi^2 sin(pi y)
        field = ManufacturedField(amp=1.0, rate=0.0, mode=1)
        spec = make_spec(
            damping=DampingParams(a=0.0, b=0.0, rho=1.0),
            linear_mode=True,
            source=field,
        )
        forcing = manufactured_forcing(field, spec)
        g = Grid(16)
        f = forcing(g.y, 0.7)
        assert np.allclose(f, np.pi**2 * np.sin(np.pi * g.y), atol=1e-12)

    def test_forced_run_tracks_exact_field(self):
        field = ManufacturedField(amp=1.0, rate=1.0, mode=1)
        spec = make_spec(alpha=AffineAlpha(k=0.5), horizon=1.0, source=field)
        g = Grid(100)
        traj = simulate(spec, g, sample_every=1000)
        v_fn, _ = exact_reference_fields(field, spec)
        err = np.max(np.abs(traj.states[-1].v - v_fn(g.y, traj.states[-1].t)))
        assert err < 5e-4

    def test_exact_reference_fields_satisfy_boundary(self):
        field = ManufacturedField(amp=2.0, rate=0.3, mode=3)
        spec = make_spec(alpha=SaturatingAlpha(k=0.5, tau=1.0))
        v_fn, w_fn = exact_reference_fields(field, spec)
        for t in (0.0, 0.4, 1.7):
            vals = v_fn(np.array([0.0, 1.0]), t)
            assert np.allclose(vals, 0.0, atol=1e-12)
