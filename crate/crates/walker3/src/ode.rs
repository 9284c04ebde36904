//! Adaptive explicit Runge–Kutta integration.
//!
//! A Dormand–Prince 4(5) pair with PI step-size control and cubic-Hermite
//! dense output.  The same kernel drives geodesic integration, parallel
//! transport, and the second-order ODEs for isometry construction.

/// Why an integration run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedTmax,
    StepUnderflow,
    NonFinite,
    LeftDomain,
    MaxSteps,
}

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// States with any component above this magnitude terminate the run.
    pub state_bound: f64,
    /// Upper bound on the step size; keeps the cubic-Hermite dense output
    /// accurate when the error controller would otherwise take huge steps.
    pub max_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 10_000_000,
            state_bound: 1e12,
            max_step: f64::INFINITY,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            rel_tol: tol,
            abs_tol: tol * 1e-2,
            ..OdeOptions::default()
        }
    }
}

/// Accepted node with its derivative (for Hermite interpolation).
#[derive(Debug, Clone)]
pub struct OdeNode {
    pub t: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub nodes: Vec<OdeNode>,
    pub termination: Termination,
    pub steps_taken: usize,
}

impl OdeSolution {
    pub fn t_end(&self) -> f64 {
        self.nodes.last().map(|n| n.t).unwrap_or(f64::NAN)
    }

    pub fn final_state(&self) -> &OdeNode {
        self.nodes.last().expect("solution has at least one node")
    }

    /// Cubic Hermite interpolation between the bracketing accepted nodes.
    /// `t` is clamped to the covered interval.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let first = &self.nodes[0];
        let last = self.nodes.last().unwrap();
        if t <= first.t {
            return first.y.clone();
        }
        if t >= last.t {
            return last.y.clone();
        }
        let i = match self
            .nodes
            .binary_search_by(|n| n.t.partial_cmp(&t).unwrap())
        {
            Ok(i) => return self.nodes[i].y.clone(),
            Err(i) => i,
        };
        let (a, b) = (&self.nodes[i - 1], &self.nodes[i]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        (0..a.y.len())
            .map(|j| h00 * a.y[j] + h10 * h * a.dy[j] + h01 * b.y[j] + h11 * h * b.dy[j])
            .collect()
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights (same as the last A row; FSAL pair).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// 4th-order embedded weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const H_MIN: f64 = 1e-14;

/// Integrate `y' = rhs(t, y)` from `t0` to `tmax`.
///
/// `rhs` writes the derivative into its third argument and returns `false`
/// if the state left the domain of definition (the run then terminates
/// with [`Termination::LeftDomain`]).
pub fn integrate<F>(mut rhs: F, t0: f64, y0: &[f64], tmax: f64, opts: &OdeOptions) -> OdeSolution
where
    F: FnMut(f64, &[f64], &mut [f64]) -> bool,
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut dy = vec![0.0; n];
    if !rhs(t, &y, &mut dy) || !dy.iter().all(|v| v.is_finite()) {
        return OdeSolution {
            nodes: vec![OdeNode {
                t,
                y,
                dy: vec![0.0; n],
            }],
            termination: Termination::LeftDomain,
            steps_taken: 0,
        };
    }
    let mut nodes = vec![OdeNode {
        t,
        y: y.clone(),
        dy: dy.clone(),
    }];
    let span = (tmax - t0).abs().max(1e-3);
    let mut h = (span * 1e-4).min(0.1);
    let mut err_prev: f64 = 1.0;
    let mut k = vec![vec![0.0; n]; 7];
    k[0].copy_from_slice(&dy);
    let mut steps = 0usize;
    let terminate = |nodes: Vec<OdeNode>, termination, steps| OdeSolution {
        nodes,
        termination,
        steps_taken: steps,
    };
    loop {
        if steps >= opts.max_steps {
            return terminate(nodes, Termination::MaxSteps, steps);
        }
        if t >= tmax {
            return terminate(nodes, Termination::ReachedTmax, steps);
        }
        if h < H_MIN * (1.0 + t.abs()) {
            return terminate(nodes, Termination::StepUnderflow, steps);
        }
        let h_step = h.min(opts.max_step).min(tmax - t);
        // stages
        let mut ok = true;
        let mut ytmp = vec![0.0; n];
        for s in 1..7 {
            for j in 0..n {
                let mut acc = 0.0;
                for (p, kp) in k.iter().enumerate().take(s) {
                    let a = A[s][p];
                    if a != 0.0 {
                        acc += a * kp[j];
                    }
                }
                ytmp[j] = y[j] + h_step * acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            if !rhs(t + C[s] * h_step, &ytmp, &mut tail[0]) {
                ok = false;
                break;
            }
            if !tail[0].iter().all(|v| v.is_finite()) {
                ok = false;
                break;
            }
        }
        if !ok {
            // try to resolve a domain edge by shrinking the step
            h *= 0.5;
            steps += 1;
            if h < H_MIN * (1.0 + t.abs()) {
                return terminate(nodes, Termination::LeftDomain, steps);
            }
            continue;
        }
        // 5th-order solution and embedded error
        let mut ynew = vec![0.0; n];
        let mut err_norm_sq = 0.0;
        for j in 0..n {
            let mut v5 = 0.0;
            let mut v4 = 0.0;
            for s in 0..7 {
                v5 += B5[s] * k[s][j];
                v4 += B4[s] * k[s][j];
            }
            ynew[j] = y[j] + h_step * v5;
            let e = h_step * (v5 - v4);
            let sc = opts.abs_tol + opts.rel_tol * y[j].abs().max(ynew[j].abs());
            err_norm_sq += (e / sc) * (e / sc);
        }
        let err = (err_norm_sq / n as f64).sqrt().max(1e-16);
        steps += 1;
        if err <= 1.0 {
            // accept; FSAL: k[6] is the derivative at the new point
            t += h_step;
            y.copy_from_slice(&ynew);
            if !y.iter().all(|v| v.is_finite()) {
                return terminate(nodes, Termination::NonFinite, steps);
            }
            nodes.push(OdeNode {
                t,
                y: y.clone(),
                dy: k[6].clone(),
            });
            if y.iter().any(|v| v.abs() > opts.state_bound) {
                return terminate(nodes, Termination::NonFinite, steps);
            }
            let k6 = k[6].clone();
            k[0].copy_from_slice(&k6);
            // PI controller
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h = h_step * fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            h = h_step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
}

/// Solve the scalar second-order problem `u'' = rhs(x, u, u')` from
/// `x0` to `x1` with initial data `(u0, du0)`; returns the solution over
/// `[x0, x1]` with state `(u, u')`.
pub fn integrate_second_order<F>(
    mut rhs: F,
    x0: f64,
    u0: f64,
    du0: f64,
    x1: f64,
    opts: &OdeOptions,
) -> OdeSolution
where
    F: FnMut(f64, f64, f64) -> Option<f64>,
{
    integrate(
        |x, y, dy| match rhs(x, y[0], y[1]) {
            Some(a) => {
                dy[0] = y[1];
                dy[1] = a;
                true
            }
            None => false,
        },
        x0,
        &[u0, du0],
        x1,
        opts,
    )
}

/// Trapezoid quadrature of `w` at the accepted nodes of `sol`, returning
/// the cumulative integral at each node starting from 0.
pub fn cumulative_trapezoid<F>(sol: &OdeSolution, mut w: F) -> Vec<f64>
where
    F: FnMut(&OdeNode) -> f64,
{
    let mut out = Vec::with_capacity(sol.nodes.len());
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for node in &sol.nodes {
        let v = w(node);
        if let Some((tp, vp)) = prev {
            acc += 0.5 * (node.t - tp) * (v + vp);
        }
        prev = Some((node.t, v));
        out.push(acc);
    }
    out
}
