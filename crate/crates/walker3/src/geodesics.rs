//! Geodesics of `g_f`, parallel transport, and the incompleteness
//! experiment on the plane-wave family.
//!
//! The geodesic system in adapted coordinates is
//! `x'' = 0`, `y'' = −f_y x'²`, `x̃'' = f_x x'² + 2 f_y x' y'`,
//! read off from the Christoffel symbols.  The quantity
//! `g_f(γ̇,γ̇) = −2f x'² + 2x'x̃' + y'²` is conserved and tracked on every
//! run.

use serde_json::{json, Value};

use crate::expr::{Expr2, ExprError, Var};
use crate::metric::riemann;
use crate::ode::{integrate, OdeOptions, OdeSolution, Termination};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub pos: [f64; 3],
    pub vel: [f64; 3],
}

impl GeodesicState {
    pub fn new(t: f64, pos: [f64; 3], vel: [f64; 3]) -> Self {
        GeodesicState { t, pos, vel }
    }

    fn pack(&self) -> [f64; 6] {
        [
            self.pos[0],
            self.pos[1],
            self.pos[2],
            self.vel[0],
            self.vel[1],
            self.vel[2],
        ]
    }

    fn unpack(t: f64, s: &[f64]) -> Self {
        GeodesicState {
            t,
            pos: [s[0], s[1], s[2]],
            vel: [s[3], s[4], s[5]],
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicTrajectory {
    pub states: Vec<GeodesicState>,
    pub termination: Termination,
    /// `g_f(γ̇,γ̇)` at the initial point.
    pub energy0: f64,
    /// Max `|energy(t) − energy0|` over accepted nodes.
    pub energy_drift: f64,
    sol: OdeSolution,
}

impl GeodesicTrajectory {
    pub fn t_end(&self) -> f64 {
        self.sol.t_end()
    }

    /// Dense-output sample of the full state at `t`.
    pub fn sample(&self, t: f64) -> GeodesicState {
        GeodesicState::unpack(t, &self.sol.sample(t))
    }

    pub fn to_csv(&self, f: &Expr2) -> String {
        let mut out = String::from("t,x,y,xt,xp,yp,xtp,energy\n");
        for s in &self.states {
            let e = energy(f, s).unwrap_or(f64::NAN);
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                s.t, s.pos[0], s.pos[1], s.pos[2], s.vel[0], s.vel[1], s.vel[2], e
            ));
        }
        out
    }
}

/// Right-hand side of the geodesic system: returns
/// `(x', y', x̃', x'', y'', x̃'')`.
pub fn geodesic_rhs(f: &Expr2, state: &GeodesicState) -> Result<[f64; 6], ExprError> {
    let fx = f.diff(Var::X);
    let fy = f.diff(Var::Y);
    let (x, y) = (state.pos[0], state.pos[1]);
    let fxv = fx.eval(x, y)?;
    let fyv = fy.eval(x, y)?;
    let [xp, yp, _] = state.vel;
    Ok([
        state.vel[0],
        state.vel[1],
        state.vel[2],
        0.0,
        -fyv * xp * xp,
        fxv * xp * xp + 2.0 * fyv * xp * yp,
    ])
}

/// `g_f(γ̇, γ̇)` at a state.
pub fn energy(f: &Expr2, state: &GeodesicState) -> Result<f64, ExprError> {
    let fv = f.eval(state.pos[0], state.pos[1])?;
    let [xp, yp, xtp] = state.vel;
    Ok(-2.0 * fv * xp * xp + 2.0 * xp * xtp + yp * yp)
}

/// Integrate a geodesic with per-step tolerance `tol`.
pub fn integrate_geodesic(
    f: &Expr2,
    initial: &GeodesicState,
    tmax: f64,
    tol: f64,
) -> Result<GeodesicTrajectory, ExprError> {
    let span = (tmax - initial.t).abs().max(1e-6);
    let opts = OdeOptions {
        max_step: (span / 200.0).max(0.05),
        ..OdeOptions::with_tol(tol)
    };
    integrate_geodesic_with(f, initial, tmax, &opts)
}

pub fn integrate_geodesic_with(
    f: &Expr2,
    initial: &GeodesicState,
    tmax: f64,
    opts: &OdeOptions,
) -> Result<GeodesicTrajectory, ExprError> {
    let fx = f.diff(Var::X);
    let fy = f.diff(Var::Y);
    let rhs = |_t: f64, s: &[f64], ds: &mut [f64]| {
        let (Ok(fxv), Ok(fyv)) = (fx.eval(s[0], s[1]), fy.eval(s[0], s[1])) else {
            return false;
        };
        ds[0] = s[3];
        ds[1] = s[4];
        ds[2] = s[5];
        ds[3] = 0.0;
        ds[4] = -fyv * s[3] * s[3];
        ds[5] = fxv * s[3] * s[3] + 2.0 * fyv * s[3] * s[4];
        true
    };
    let sol = integrate(rhs, initial.t, &initial.pack(), tmax, opts);
    let states: Vec<GeodesicState> = sol
        .nodes
        .iter()
        .map(|n| GeodesicState::unpack(n.t, &n.y))
        .collect();
    let energy0 = energy(f, initial)?;
    let mut drift = 0.0_f64;
    for s in &states {
        if let Ok(e) = energy(f, s) {
            drift = drift.max((e - energy0).abs());
        }
    }
    Ok(GeodesicTrajectory {
        states,
        termination: sol.termination,
        energy0,
        energy_drift: drift,
        sol,
    })
}

/// Closed-form `y(t)` of the `𝒩_b` geodesic with `x(t) = αt + β`:
/// `y(t) = b⁻¹ ln((b²C₁²/2α²) sech²(½ b C₁ (t + C₂)))`.
pub fn nb_closed_form(b: f64, alpha: f64, c1: f64, c2: f64, t: f64) -> f64 {
    let u = 0.5 * b * c1 * (t + c2);
    let sech = 1.0 / u.cosh();
    ((b * b * c1 * c1) / (2.0 * alpha * alpha) * sech * sech).ln() / b
}

/// `y'(t)` of the closed form (`−C₁ tanh(½ b C₁ (t + C₂))`).
pub fn nb_closed_form_deriv(b: f64, c1: f64, c2: f64, t: f64) -> f64 {
    -c1 * (0.5 * b * c1 * (t + c2)).tanh()
}

/// Self-check of the oracle: max residual of `y'' + α² b⁻¹ e^{by}` on a
/// sample grid, with `y''` from a five-point finite-difference stencil.
pub fn nb_closed_form_residual(b: f64, alpha: f64, c1: f64, c2: f64, ts: &[f64]) -> f64 {
    let h = 1e-2;
    let mut worst = 0.0_f64;
    for &t in ts {
        let y = |tt: f64| nb_closed_form(b, alpha, c1, c2, tt);
        let ypp = (-y(t - 2.0 * h) + 16.0 * y(t - h) - 30.0 * y(t) + 16.0 * y(t + h)
            - y(t + 2.0 * h))
            / (12.0 * h * h);
        let rhs = -alpha * alpha / b * (b * y(t)).exp();
        worst = worst.max((ypp - rhs).abs());
    }
    worst
}

/// A transported vector alongside the carrying geodesic state.
#[derive(Debug, Clone, Copy)]
pub struct TransportSample {
    pub t: f64,
    pub pos: [f64; 3],
    pub vel: [f64; 3],
    pub y: [f64; 3],
}

/// Parallel-transport `y0` along the trajectory by re-integrating the
/// geodesic jointly with `∇_{γ̇} Y = 0`; samples are returned at the
/// trajectory's node times.
pub fn parallel_transport(
    f: &Expr2,
    traj: &GeodesicTrajectory,
    y0: [f64; 3],
) -> Result<Vec<TransportSample>, ExprError> {
    let fx = f.diff(Var::X);
    let fy = f.diff(Var::Y);
    let initial = traj.states[0];
    let mut s0 = [0.0; 9];
    s0[..6].copy_from_slice(&initial.pack());
    s0[6..].copy_from_slice(&y0);
    let rhs = |_t: f64, s: &[f64], ds: &mut [f64]| {
        let (Ok(fxv), Ok(fyv)) = (fx.eval(s[0], s[1]), fy.eval(s[0], s[1])) else {
            return false;
        };
        let (xp, yp) = (s[3], s[4]);
        ds[0] = s[3];
        ds[1] = s[4];
        ds[2] = s[5];
        ds[3] = 0.0;
        ds[4] = -fyv * xp * xp;
        ds[5] = fxv * xp * xp + 2.0 * fyv * xp * yp;
        // Y'^c = −Γ^c_{ab} γ'^a Y^b; only Γ^y_xx, Γ^x̃_xx, Γ^x̃_xy survive
        let (yx, yy) = (s[6], s[7]);
        ds[6] = 0.0;
        ds[7] = -fyv * xp * yx;
        ds[8] = fxv * xp * yx + fyv * (xp * yy + yp * yx);
        true
    };
    let opts = OdeOptions {
        max_step: 0.05,
        ..OdeOptions::with_tol(1e-10)
    };
    let sol = integrate(rhs, initial.t, &s0, traj.t_end(), &opts);
    Ok(traj
        .states
        .iter()
        .map(|st| {
            let s = sol.sample(st.t);
            TransportSample {
                t: st.t,
                pos: [s[0], s[1], s[2]],
                vel: [s[3], s[4], s[5]],
                y: [s[6], s[7], s[8]],
            }
        })
        .collect())
}

/// `g_f(u, v)` for coordinate vectors at `(x, y)`.
pub fn inner_product(f: &Expr2, x: f64, y: f64, u: [f64; 3], v: [f64; 3]) -> Result<f64, ExprError> {
    let fv = f.eval(x, y)?;
    Ok(-2.0 * fv * u[0] * v[0] + u[0] * v[2] + u[2] * v[0] + u[1] * v[1])
}

/// One row of the blowup table.
#[derive(Debug, Clone, Copy)]
pub struct BlowupRow {
    pub t: f64,
    pub state: GeodesicState,
    pub energy: f64,
    /// `R(γ̇, Y, Y, γ̇)` from the full curvature tensor.
    pub curvature: f64,
    /// Reference value `2(1−t)^{−2}`.
    pub curvature_ref: f64,
    pub ip_gamma_y: f64,
    pub ip_y_y: f64,
    /// Magnitude of the largest term in the energy sum; conservation is
    /// only meaningful relative to this scale near the blowup.
    pub energy_scale: f64,
}

#[derive(Debug, Clone)]
pub struct BlowupReport {
    pub f: Expr2,
    pub rows: Vec<BlowupRow>,
    pub termination: Termination,
    /// Last time reached before blowup.
    pub t_star: f64,
    pub energy_drift: f64,
}

impl BlowupReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,xt,xp,yp,xtp,energy,curvature\n");
        for r in &self.rows {
            let s = &r.state;
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                r.t, s.pos[0], s.pos[1], s.pos[2], s.vel[0], s.vel[1], s.vel[2], r.energy,
                r.curvature
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "termination": format!("{:?}", self.termination),
            "t_star": self.t_star,
            "energy_drift": self.energy_drift,
            "rows": self.rows.iter().map(|r| json!({
                "t": r.t,
                "curvature": r.curvature,
                "curvature_ref": r.curvature_ref,
                "energy": r.energy,
                "ip_gamma_y": r.ip_gamma_y,
                "ip_y_y": r.ip_y_y,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Closed-form `φ(t) = (1−t)^{1/2}(a₁cos(√7 ln(1−t)/2) + a₂sin(√7 ln(1−t)/2))`
/// solving `φ_tt + 2(1−t)^{−2}φ = 0`.
pub fn pc_phi_closed_form(a1: f64, a2: f64, t: f64) -> f64 {
    let l = (1.0 - t).ln();
    let th = 7.0_f64.sqrt() * l / 2.0;
    (1.0 - t).sqrt() * (a1 * th.cos() + a2 * th.sin())
}

/// `φ_t` of the closed form.
pub fn pc_phi_closed_form_deriv(a1: f64, a2: f64, t: f64) -> f64 {
    let s7 = 7.0_f64.sqrt();
    let u = 1.0 - t;
    let th = s7 * u.ln() / 2.0;
    // d/dt = -d/du with u = 1 - t
    -(0.5 * u.powf(-0.5) * (a1 * th.cos() + a2 * th.sin())
        + u.sqrt() * (-a1 * th.sin() + a2 * th.cos()) * s7 / (2.0 * u))
}

/// The incompleteness experiment on `f = (1−x)^{−2} y²`.
///
/// The geodesic is `γ(t) = (t, φ(t), ψ(t))` with `γ(0) = (0, 1, 0)`,
/// `φ_t(0) = 0`, and `ψ_t(0) = xt_dot0`.  The default `xt_dot0 = 3/2`
/// normalizes `g(γ̇,γ̇) = −2f + 2ψ_t = 1`; the value `3` that appears in
/// print gives `g(γ̇,γ̇) = 4` and is available through the parameter.
/// A parallel field `Y` with `Y(0) = ∂y` rides along; the table reports
/// `R(γ̇,Y,Y,γ̇)` against `2(1−t)^{−2}` until the curvature passes `1e6`.
pub fn blowup_experiment_pc(tol: f64, xt_dot0: Option<f64>) -> BlowupReport {
    let f = Expr2::mul(
        Expr2::pow(Expr2::sub(Expr2::constant(1.0), Expr2::x()), -2),
        Expr2::pow(Expr2::y(), 2),
    );
    let psi_t0 = xt_dot0.unwrap_or(1.5);
    let initial = GeodesicState::new(0.0, [0.0, 1.0, 0.0], [1.0, 0.0, psi_t0]);
    let opts = OdeOptions {
        max_step: 0.01,
        ..OdeOptions::with_tol(tol)
    };
    let traj = integrate_geodesic_with(&f, &initial, 2.0, &opts).expect("polynomial f evaluates");
    let transport = parallel_transport(&f, &traj, [0.0, 1.0, 0.0]).expect("transport evaluates");
    let mut rows = Vec::new();
    for ts in &transport {
        let state = GeodesicState::new(ts.t, ts.pos, ts.vel);
        let Ok(r) = riemann(&f, (ts.pos[0], ts.pos[1])) else {
            break;
        };
        let curvature = r.contract(&[ts.vel, ts.y, ts.y, ts.vel]);
        let curvature_ref = 2.0 * (1.0 - ts.t).powi(-2);
        let energy = energy(&f, &state).unwrap_or(f64::NAN);
        let fv = f.eval(ts.pos[0], ts.pos[1]).unwrap_or(f64::NAN);
        let [xp, yp, xtp] = ts.vel;
        let energy_scale = 1.0_f64
            .max((2.0 * fv * xp * xp).abs())
            .max((2.0 * xp * xtp).abs())
            .max(yp * yp);
        let ip_gy = inner_product(&f, ts.pos[0], ts.pos[1], ts.vel, ts.y).unwrap_or(f64::NAN);
        let ip_yy = inner_product(&f, ts.pos[0], ts.pos[1], ts.y, ts.y).unwrap_or(f64::NAN);
        rows.push(BlowupRow {
            t: ts.t,
            state,
            energy,
            curvature,
            curvature_ref,
            ip_gamma_y: ip_gy,
            ip_y_y: ip_yy,
            energy_scale,
        });
        if curvature.abs() > 1e6 {
            break;
        }
    }
    BlowupReport {
        f,
        rows,
        termination: traj.termination,
        t_star: traj.t_end(),
        energy_drift: traj.energy_drift,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        // flat: all second derivatives zero
        let flat = Expr2::constant(0.0);
        let s = GeodesicState::new(0.0, [1.0, 2.0, 3.0], [0.5, -0.5, 2.0]);
        let d = geodesic_rhs(&flat, &s).unwrap();
        assert_eq!(&d[3..], &[0.0, 0.0, 0.0]);
        // N_b reduces to the printed system
        let b = 2.0;
        let f = Expr2::parse("exp(b*y)/(b*b)", &[("b", b)]).unwrap();
        let st = GeodesicState::new(0.0, [0.0, 0.3, 0.0], [1.5, 0.7, 0.0]);
        let d2 = geodesic_rhs(&f, &st).unwrap();
        let e = (b * 0.3).exp() / b;
        assert!((d2[4] - (-1.5 * 1.5 * e)).abs() < 1e-12);
        assert!((d2[5] - (2.0 * 1.5 * 0.7 * e)).abs() < 1e-12);
        // x' = 0: straight line
        let st3 = GeodesicState::new(0.0, [0.0, 0.0, 0.0], [0.0, 1.0, 2.0]);
        let d3 = geodesic_rhs(&f, &st3).unwrap();
        assert_eq!(&d3[3..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn oracle_self_check() {
        let ts: Vec<f64> = (0..20).map(|i| -2.0 + 0.25 * i as f64).collect();
        let r = nb_closed_form_residual(1.0, 1.0, 1.0, 0.0, &ts);
        assert!(r < 1e-9, "residual {r}");
        // even about t = -C2
        let y1 = nb_closed_form(1.0, 1.0, 1.0, 0.5, 1.0);
        let y2 = nb_closed_form(1.0, 1.0, 1.0, 0.5, -2.0);
        assert!((y1 - y2).abs() < 1e-14);
        // no poles: finite at large |t|
        assert!(nb_closed_form(1.0, 1.0, 1.0, 0.0, 500.0).is_finite());
    }

    #[test]
    fn nb_numeric_matches_closed_form() {
        let (b, alpha, c1, c2) = (1.0, 1.0, 1.0, 0.0);
        let f = Expr2::parse("exp(y)", &[]).unwrap();
        let y0 = nb_closed_form(b, alpha, c1, c2, 0.0);
        let yp0 = nb_closed_form_deriv(b, c1, c2, 0.0);
        let init = GeodesicState::new(0.0, [0.0, y0, 0.0], [alpha, yp0, 0.0]);
        let traj = integrate_geodesic(&f, &init, 10.0, 1e-10).unwrap();
        assert_eq!(traj.termination, Termination::ReachedTmax);
        for i in 0..=100 {
            let t = 0.1 * i as f64;
            let num = traj.sample(t).pos[1];
            let exact = nb_closed_form(b, alpha, c1, c2, t);
            assert!(
                (num - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
                "t={t}: {num} vs {exact}"
            );
        }
        assert!(traj.energy_drift < 1e-8);
    }

    #[test]
    fn flat_straight_line() {
        let f = Expr2::constant(0.0);
        let init = GeodesicState::new(0.0, [0.0, 0.0, 0.0], [1.0, 2.0, 3.0]);
        let traj = integrate_geodesic(&f, &init, 5.0, 1e-10).unwrap();
        let end = traj.states.last().unwrap();
        assert!((end.pos[0] - 5.0).abs() < 1e-10);
        assert!((end.pos[1] - 10.0).abs() < 1e-10);
        assert!((end.pos[2] - 15.0).abs() < 1e-10);
        assert!(traj.energy_drift < 1e-12);
    }

    #[test]
    fn nb_completeness_probe() {
        let f = Expr2::parse("exp(y)", &[]).unwrap();
        let init = GeodesicState::new(0.0, [0.0, 0.0, 0.0], [1.0, 0.5, -0.3]);
        let traj = integrate_geodesic(&f, &init, 1e3, 1e-8).unwrap();
        assert_eq!(traj.termination, Termination::ReachedTmax);
        assert!(traj.states.len() < 1_000_000);
    }

    #[test]
    fn transport_flat_and_conservation() {
        let flat = Expr2::constant(0.0);
        let init = GeodesicState::new(0.0, [0.0, 0.0, 0.0], [1.0, 1.0, 0.0]);
        let traj = integrate_geodesic(&flat, &init, 1.0, 1e-10).unwrap();
        let tr = parallel_transport(&flat, &traj, [0.5, -1.0, 2.0]).unwrap();
        for s in &tr {
            assert!((s.y[0] - 0.5).abs() < 1e-12);
            assert!((s.y[1] + 1.0).abs() < 1e-12);
            assert!((s.y[2] - 2.0).abs() < 1e-12);
        }
        // curved case: norms conserved
        let f = Expr2::parse("exp(y) + x*y^2", &[]).unwrap();
        let init2 = GeodesicState::new(0.0, [0.0, 0.0, 0.0], [1.0, 0.2, 0.4]);
        let traj2 = integrate_geodesic(&f, &init2, 1.0, 1e-10).unwrap();
        let y0 = [0.0, 1.0, 0.7];
        let tr2 = parallel_transport(&f, &traj2, y0).unwrap();
        let n0 = inner_product(&f, 0.0, 0.0, y0, y0).unwrap();
        for s in &tr2 {
            let n = inner_product(&f, s.pos[0], s.pos[1], s.y, s.y).unwrap();
            assert!((n - n0).abs() < 1e-7, "t={}: {n} vs {n0}", s.t);
            let ip = inner_product(&f, s.pos[0], s.pos[1], s.vel, s.y).unwrap();
            let ip0 = inner_product(&f, 0.0, 0.0, init2.vel, y0).unwrap();
            assert!((ip - ip0).abs() < 1e-7);
        }
    }

    #[test]
    fn pc_phi_closed_form_solves_ode() {
        // finite-difference check of phi_tt + 2(1-t)^-2 phi = 0
        let (a1, a2) = (1.0, 1.0 + 1.0 / 7.0_f64.sqrt());
        let h = 1e-3;
        for i in 0..9 {
            let t = 0.1 * i as f64;
            let p = |tt: f64| pc_phi_closed_form(a1, a2, tt);
            let ptt = (p(t - h) - 2.0 * p(t) + p(t + h)) / (h * h);
            let res = ptt + 2.0 * (1.0 - t).powi(-2) * p(t);
            // FD truncation grows like (1−t)^{−7/2}
            let tol = 1e-4 * (1.0 - t).powf(-3.5);
            assert!(res.abs() < tol, "t={t}: {res}");
            // derivative consistency
            let pd = (p(t + h) - p(t - h)) / (2.0 * h);
            assert!((pd - pc_phi_closed_form_deriv(a1, a2, t)).abs() < tol);
        }
        // the printed coefficients give phi(0) = 1
        assert!((pc_phi_closed_form(a1, a2, 0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn blowup_experiment() {
        let report = blowup_experiment_pc(1e-10, None);
        // terminates just before t = 1 with huge curvature
        assert!(matches!(
            report.termination,
            Termination::NonFinite | Termination::StepUnderflow | Termination::LeftDomain
        ));
        assert!(1.0 - report.t_star < 1e-3, "t* = {}", report.t_star);
        let last = report.rows.last().unwrap();
        assert!(last.curvature > 1e6);
        for r in &report.rows {
            assert!(
                (r.curvature - r.curvature_ref).abs() <= 1e-4 * r.curvature_ref.abs(),
                "t={}: {} vs {}",
                r.t,
                r.curvature,
                r.curvature_ref
            );
            assert!((r.energy - 1.0).abs() < 1e-6 * r.energy_scale);
            assert!(r.ip_gamma_y.abs() < 1e-6 * r.energy_scale.sqrt());
            assert!((r.ip_y_y - 1.0).abs() < 1e-6);
        }
        // spot values of the reference formula
        assert!((report.rows[0].curvature - 2.0).abs() < 1e-9);
        let near09 = report
            .rows
            .iter()
            .min_by(|a, b| {
                (a.t - 0.9).abs().partial_cmp(&(b.t - 0.9).abs()).unwrap()
            })
            .unwrap();
        assert!((near09.curvature_ref - 2.0 / (1.0 - near09.t).powi(2)).abs() < 1e-9);
        // CSV has the full column set
        let csv = report.to_csv();
        assert!(csv.starts_with("t,x,y,xt,xp,yp,xtp,energy,curvature"));
    }

    #[test]
    fn blowup_y_matches_printed_phi_family() {
        // the trajectory's y(t) solves Eq. (1.d); with y(0)=1, y'(0)=0 the
        // Euler-basis coefficients are a1 = 1, a2 = -1/sqrt(7)
        let report = blowup_experiment_pc(1e-10, None);
        let (a1, a2) = (1.0, -1.0 / 7.0_f64.sqrt());
        for r in &report.rows {
            if r.t > 0.99 {
                break;
            }
            let exact = pc_phi_closed_form(a1, a2, r.t);
            assert!(
                (r.state.pos[1] - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
                "t={}: {} vs {exact}",
                r.t,
                r.state.pos[1]
            );
        }
    }
}
