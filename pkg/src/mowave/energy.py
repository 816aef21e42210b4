"""Energy functional, boundary flux, and the exact identities behind decay.

Everything here evaluates on reference-frame snapshots but measures physical
quantities: with y = x/alpha, dx = alpha dy, u_t = w - (y alpha'/alpha) v_y
and u_x = v_y / alpha. Spatial integrals use the grid's composite Simpson
weights; space-time integrals add a trapezoid rule over snapshot times.

Three checks are provided.

1. Energy rate. Multiplying the equation by u_t and transporting the time
   derivative across the moving domain gives the exact rate

       dE/dt = -a ||u_t||^2 - flux(t) + (beta'(t)/(rho+2)) int |u|^(rho+2) dx
               [ + int f u_t dx  when a manufactured source is active ]

   with flux(t) = (1/2) alpha' (1 - alpha'^2) u_x(alpha(t), t)^2 >= 0.
   energy_rate_residual measures the defect of the snapshot series against
   this identity with second-order time differences.

2. Boundary sign. boundary_flux returns the flux above; its sign is manifest
   whenever 0 <= alpha' < 1, which is the one-dimensional boundary-sign
   argument (the lateral boundary is time-like and the domain expands).

3. Multiplier identity. Multiplying instead by (u_t + lambda u) phi(t) with
   phi = exp(s t) and integrating over the space-time slab yields a sum of
   roughly twenty-five integrals that cancels exactly for solutions.
   multiplier_identity_residual evaluates every term separately (grouped by
   the equation piece it came from: u_tt, -u_xx, a u_t, b u, the nonlinear
   term, and the source), exposing both the total defect and the grouped
   lateral-boundary contribution whose nonnegativity the decay proof needs.

Lateral-boundary integrals reduce in one dimension to endpoint evaluations
with n_t dsigma = -alpha'(t) dt and n_x dsigma = dt at the moving endpoint
(the fixed endpoint has n_t = 0 and contributes nothing since u_t = 0
there). On the moving boundary u = 0 gives u_t = -alpha' u_x, an identity
the discretization inherits exactly because w and v vanish on the boundary
row, so either form may be used in the endpoint integrands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import ProblemSpec, eval_alpha
from .solver import Grid, ReferenceState, Trajectory, manufactured_forcing


def first_derivative(values: np.ndarray, dy: float) -> np.ndarray:
    """Second-order d/dy on the uniform grid: central inside, 3-point one-sided ends."""
    d = np.empty_like(values)
    d[1:-1] = (values[2:] - values[:-2]) / (2.0 * dy)
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dy)
    d[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * dy)
    return d


def physical_fields(state: ReferenceState, spec: ProblemSpec, grid: Grid):
    """Reconstruct (u_t, u_x) node values from a reference snapshot."""
    al, ap, _ = eval_alpha(spec.alpha, state.t)
    v_y = first_derivative(state.v, grid.dy)
    u_t = state.w - (grid.y * (ap / al)) * v_y
    u_x = v_y / al
    return u_t, u_x


@dataclass(frozen=True)
class EnergySample:
    """Energy value at one time with its four addends and the boundary flux."""

    t: float
    E: float
    kinetic: float
    gradient: float
    restoring: float
    nonlinear: float
    flux: float


def energy(
    state: ReferenceState,
    spec: ProblemSpec,
    grid: Grid,
    paper_literal: bool = False,
) -> EnergySample:
    """Energy E(t) = int (1/2 u_t^2 + 1/2 u_x^2 + b/2 u^2 + beta/(rho+2) |u|^(rho+2)) dx.

    paper_literal swaps the restoring weight b/2 for the literal 1/2; the
    identity checks always use the exact-primitive form regardless.
    """
    al, ap, _ = eval_alpha(spec.alpha, state.t)
    bt, _ = spec.beta_at(state.t)
    u_t, u_x = physical_fields(state, spec, grid)
    weights = grid.quad_weights * al  # dx = alpha dy
    restoring_coeff = 0.5 if paper_literal else 0.5 * spec.damping.b
    kinetic = float(weights @ (0.5 * u_t**2))
    gradient = float(weights @ (0.5 * u_x**2))
    restoring = float(weights @ (restoring_coeff * state.v**2))
    if bt != 0.0:
        nonlinear = float(weights @ ((bt / (spec.damping.rho + 2.0)) * np.abs(state.v) ** (spec.damping.rho + 2.0)))
    else:
        nonlinear = 0.0
    flux = boundary_flux(state, spec, grid)
    total = kinetic + gradient + restoring + nonlinear
    return EnergySample(
        t=state.t,
        E=total,
        kinetic=kinetic,
        gradient=gradient,
        restoring=restoring,
        nonlinear=nonlinear,
        flux=flux,
    )


def boundary_flux(state: ReferenceState, spec: ProblemSpec, grid: Grid) -> float:
    """Moving-endpoint flux (1/2) alpha' (1 - alpha'^2) u_x(alpha(t), t)^2.

    Nonnegative for every accepted family: 0 <= alpha' < 1 under (A1).
    """
    al, ap, _ = eval_alpha(spec.alpha, state.t)
    v = state.v
    # one-sided 3-point endpoint slope of v, divided by alpha
    u_x_end = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * grid.dy * al)
    return 0.5 * ap * (1.0 - ap * ap) * u_x_end**2


@dataclass(frozen=True)
class EnergySeries:
    """Energy samples of one trajectory, in time order."""

    samples: tuple[EnergySample, ...]

    @classmethod
    def from_trajectory(cls, traj: Trajectory, paper_literal: bool = False) -> "EnergySeries":
        return cls(tuple(energy(s, traj.spec, traj.grid, paper_literal) for s in traj.states))

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def E(self) -> np.ndarray:
        return np.array([s.E for s in self.samples])

    @property
    def e0(self) -> float:
        return self.samples[0].E


def write_energy_csv(series: EnergySeries, path, bound=None) -> None:
    """Write the series as CSV with columns t,E,kinetic,gradient,restoring,nonlinear,flux,bound.

    bound is an optional array of certificate values C E(0) exp(-lambda t);
    the column is left empty when no certificate exists. Floats are written
    with repr so identical runs produce bit-identical files.
    """
    rows = ["t,E,kinetic,gradient,restoring,nonlinear,flux,bound"]
    for i, s in enumerate(series.samples):
        cells = [s.t, s.E, s.kinetic, s.gradient, s.restoring, s.nonlinear, s.flux]
        text = [repr(float(c)) for c in cells]
        text.append(repr(float(bound[i])) if bound is not None else "")
        rows.append(",".join(text))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


# ---------------------------------------------------------------------------
# energy-rate identity


def _nonuniform_center_derivative(f0, f1, f2, t0, t1, t2):
    # three-point derivative at t1, exact on quadratics for any spacing
    h1 = t1 - t0
    h2 = t2 - t1
    return (
        -h2 / (h1 * (h1 + h2)) * f0
        + (h2 - h1) / (h1 * h2) * f1
        + h1 / (h2 * (h1 + h2)) * f2
    )


def energy_rate_residual(traj: Trajectory) -> float:
    """Sup over interior snapshots of the energy-rate identity defect.

    Compares a second-order time difference of E against the exact rate
    -a ||u_t||^2 - flux + (beta'/(rho+2)) int |u|^(rho+2) dx, plus the
    source work int f u_t dx when the run is forced.
    """
    if len(traj.states) < 3:
        raise ConfigError("energy_rate_residual needs at least 3 snapshots")
    spec = traj.spec
    grid = traj.grid
    a = spec.damping.a
    rho = spec.damping.rho
    forcing = manufactured_forcing(spec.source, spec) if spec.source is not None else None

    times = [s.t for s in traj.states]
    E = [energy(s, spec, grid).E for s in traj.states]
    rate = []
    for s in traj.states:
        al, _, _ = eval_alpha(spec.alpha, s.t)
        _, bt_p = spec.beta_at(s.t)
        u_t, _ = physical_fields(s, spec, grid)
        weights = grid.quad_weights * al
        value = -a * float(weights @ u_t**2) - boundary_flux(s, spec, grid)
        if bt_p != 0.0:
            value += (bt_p / (rho + 2.0)) * float(weights @ np.abs(s.v) ** (rho + 2.0))
        if forcing is not None:
            value += float(weights @ (forcing(grid.y, s.t) * u_t))
        rate.append(value)

    worst = 0.0
    for k in range(1, len(times) - 1):
        dE = _nonuniform_center_derivative(
            E[k - 1], E[k], E[k + 1], times[k - 1], times[k], times[k + 1]
        )
        worst = max(worst, abs(dE - rate[k]))
    return float(worst)


# ---------------------------------------------------------------------------
# multiplier identity


@dataclass(frozen=True)
class IdentityTerm:
    name: str
    group: str
    value: float


@dataclass(frozen=True)
class IdentityReport:
    """Term-by-term evaluation of the multiplier identity plus the rate defect.

    residual_plu is the signed sum of every term; it vanishes for exact
    solutions, so its size on a computed trajectory is pure discretization
    error. boundary_group collects the lateral-boundary terms whose
    nonnegativity is the decay proof's sign argument.
    """

    residual_rate: float
    residual_plu: float
    terms: tuple[IdentityTerm, ...]
    lam: float
    phi_rate: float

    @property
    def scale(self) -> float:
        return sum(abs(term.value) for term in self.terms)

    @property
    def relative_residual(self) -> float:
        scale = self.scale
        return abs(self.residual_plu) / scale if scale > 0.0 else 0.0

    @property
    def boundary_group(self) -> float:
        return sum(t.value for t in self.terms if t.group == "boundary")

    def term(self, name: str) -> float:
        for t in self.terms:
            if t.name == name:
                return t.value
        raise KeyError(name)


def multiplier_identity_residual(traj: Trajectory, lam: float, phi_rate: float) -> IdentityReport:
    """Evaluate every integral of the multiplier identity with phi = exp(s t).

    The equation is multiplied by (u_t + lambda u) phi and integrated over
    the space-time slab; each piece is integrated by parts in its natural
    direction. Volume integrals are Simpson in y and trapezoid in t; the
    endpoint (lateral-boundary) integrals are trapezoid in t; the t = 0 and
    t = T slices come from the first and last snapshots.
    """
    if len(traj.states) < 3:
        raise ConfigError("multiplier_identity_residual needs at least 3 snapshots")
    if not (lam > 0.0) or not (phi_rate > 0.0):
        raise ConfigError("multiplier_identity_residual needs lam > 0 and phi_rate > 0")

    spec = traj.spec
    grid = traj.grid
    a = spec.damping.a
    b = spec.damping.b
    rho = spec.damping.rho
    s_rate = phi_rate
    forcing = manufactured_forcing(spec.source, spec) if spec.source is not None else None

    times = np.array([st.t for st in traj.states])
    nsnap = times.size

    # per-snapshot spatial integrals (physical measure) and endpoint slopes
    vol = {
        "ut2": np.zeros(nsnap),
        "uut": np.zeros(nsnap),
        "ux2": np.zeros(nsnap),
        "u2": np.zeros(nsnap),
        "nl": np.zeros(nsnap),  # int |u|^(rho+2) dx
        "fut": np.zeros(nsnap),
        "fu": np.zeros(nsnap),
    }
    ux_end = np.zeros(nsnap)
    ap_series = np.zeros(nsnap)
    beta_series = np.zeros(nsnap)
    betap_series = np.zeros(nsnap)

    for i, st in enumerate(traj.states):
        al, ap, _ = eval_alpha(spec.alpha, st.t)
        bt, bt_p = spec.beta_at(st.t)
        u_t, u_x = physical_fields(st, spec, grid)
        weights = grid.quad_weights * al
        vol["ut2"][i] = weights @ u_t**2
        vol["uut"][i] = weights @ (st.v * u_t)
        vol["ux2"][i] = weights @ u_x**2
        vol["u2"][i] = weights @ st.v**2
        vol["nl"][i] = weights @ np.abs(st.v) ** (rho + 2.0)
        if forcing is not None:
            f_vals = forcing(grid.y, st.t)
            vol["fut"][i] = weights @ (f_vals * u_t)
            vol["fu"][i] = weights @ (f_vals * st.v)
        ux_end[i] = u_x[-1]
        ap_series[i] = ap
        beta_series[i] = bt
        betap_series[i] = bt_p

    phi = np.exp(s_rate * times)
    phi_p = s_rate * phi
    phi0 = float(phi[0])
    phiT = float(phi[-1])

    def tint(values: np.ndarray) -> float:
        return float(np.trapezoid(values, times))

    terms: list[IdentityTerm] = []

    def add(name: str, group: str, value: float):
        terms.append(IdentityTerm(name=name, group=group, value=float(value)))

    # ---- u_tt piece: (1/2 u_t^2 phi + lambda phi u u_t)_t expansion
    add("ut2_T", "eq2", 0.5 * phiT * vol["ut2"][-1])
    add("uut_T", "eq2", lam * phiT * vol["uut"][-1])
    add("ut2_0", "eq2", -0.5 * phi0 * vol["ut2"][0])
    add("uut_0", "eq2", -lam * phi0 * vol["uut"][0])
    # lateral boundary: + int 1/2 u_t^2 phi n_t dsigma, with u_t = -alpha' u_x there
    add("bdry_ut2", "boundary", tint(-0.5 * ap_series**3 * ux_end**2 * phi))
    add("vol_lam_ut2", "eq2", -lam * tint(phi * vol["ut2"]))
    add("vol_phip_ut2", "eq2", -0.5 * tint(phi_p * vol["ut2"]))
    add("vol_lam_phip_uut", "eq2", -lam * tint(phi_p * vol["uut"]))

    # ---- -u_xx piece
    add("ux2_T", "eq3", 0.5 * phiT * vol["ux2"][-1])
    add("ux2_0", "eq3", -0.5 * phi0 * vol["ux2"][0])
    # lateral boundary: + int 1/2 u_x^2 phi n_t dsigma
    add("bdry_ux2", "boundary", tint(-0.5 * ap_series * ux_end**2 * phi))
    # - int [u_x u_t phi] at the endpoints; only the moving endpoint survives
    add("div_uxut", "boundary", tint(ap_series * ux_end**2 * phi))
    add("vol_phip_ux2", "eq3", -0.5 * tint(phi_p * vol["ux2"]))
    add("vol_lam_ux2", "eq3", lam * tint(phi * vol["ux2"]))

    # ---- a u_t piece
    add("vol_a_ut2", "eq4", a * tint(phi * vol["ut2"]))
    add("vol_a_lam_uut", "eq4", a * lam * tint(phi * vol["uut"]))

    # ---- b u piece
    add("u2_T", "eq5", 0.5 * b * phiT * vol["u2"][-1])
    add("u2_0", "eq5", -0.5 * b * phi0 * vol["u2"][0])
    add("vol_b_phip_u2", "eq5", -0.5 * b * tint(phi_p * vol["u2"]))
    add("vol_b_lam_u2", "eq5", b * lam * tint(phi * vol["u2"]))

    # ---- nonlinear piece
    add("nl_T", "eq6", (beta_series[-1] * phiT / (rho + 2.0)) * vol["nl"][-1])
    add("nl_0", "eq6", -(beta_series[0] * phi0 / (rho + 2.0)) * vol["nl"][0])
    add("vol_betp_nl", "eq6", -tint(betap_series * phi * vol["nl"]) / (rho + 2.0))
    add("vol_bet_phip_nl", "eq6", -tint(beta_series * phi_p * vol["nl"]) / (rho + 2.0))
    add("vol_lam_bet_nl", "eq6", lam * tint(beta_series * phi * vol["nl"]))

    # ---- source piece (zero unless manufactured)
    if forcing is not None:
        add("vol_f", "source", -tint(phi * (vol["fut"] + lam * vol["fu"])))

    residual_plu = float(sum(t.value for t in terms))
    residual_rate = energy_rate_residual(traj)
    return IdentityReport(
        residual_rate=residual_rate,
        residual_plu=residual_plu,
        terms=tuple(terms),
        lam=float(lam),
        phi_rate=float(s_rate),
    )


def write_identity_csv(report: IdentityReport, path) -> None:
    """Persist the term breakdown as CSV rows term,group,value plus summary rows."""
    rows = ["term,group,value"]
    for term in report.terms:
        rows.append(f"{term.name},{term.group},{repr(float(term.value))}")
    rows.append(f"residual_plu,summary,{repr(float(report.residual_plu))}")
    rows.append(f"relative_residual,summary,{repr(float(report.relative_residual))}")
    rows.append(f"residual_rate,summary,{repr(float(report.residual_rate))}")
    rows.append(f"boundary_group,summary,{repr(float(report.boundary_group))}")
    rows.append(f"lambda,summary,{repr(float(report.lam))}")
    rows.append(f"phi_rate,summary,{repr(float(report.phi_rate))}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")
