//! Embedded Dormand-Prince 5(4) Runge-Kutta pair with adaptive step
//! control, terminal event detection and an optional fixed-step mode used
//! by convergence-order checks.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t} after {steps} steps")]
    MaxSteps { t: f64, steps: usize },
    #[error("right-hand side produced a non-finite value at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: Option<f64>,
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            initial_step: None,
            max_step: None,
            max_steps: 2_000_000,
        }
    }
}

/// Direction of the zero crossing that makes an event fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingDirection {
    Rising,
    Falling,
}

/// Terminal event: integration stops when `func` crosses zero in the given
/// direction between two accepted steps.
pub struct Event<'a> {
    pub func: &'a dyn Fn(f64, &[f64]) -> f64,
    pub direction: CrossingDirection,
}

#[derive(Debug, Clone)]
pub struct OdeResult {
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evaluations: usize,
    /// Index of the event that terminated the integration, if any.
    pub event: Option<usize>,
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
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// The nominal global convergence order of the accepted solution.
pub const NOMINAL_ORDER: u32 = 5;

struct Workspace {
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y5: Vec<f64>,
    y4: Vec<f64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            y_stage: vec![0.0; dim],
            y5: vec![0.0; dim],
            y4: vec![0.0; dim],
        }
    }
}

/// One Dormand-Prince step from `(t, y)` with size `h`. Returns the error
/// estimate (y5 - y4) in `ws.y4`; the solution lands in `ws.y5`.
fn dp_step(
    rhs: &mut dyn FnMut(f64, &[f64], &mut [f64]),
    t: f64,
    y: &[f64],
    h: f64,
    ws: &mut Workspace,
    rhs_evals: &mut usize,
) {
    let dim = y.len();
    let (k_first, _) = ws.k.split_at_mut(1);
    rhs(t, y, &mut k_first[0]);
    *rhs_evals += 1;
    for stage in 1..7 {
        for i in 0..dim {
            let mut acc = 0.0;
            for (j, a) in A[stage].iter().enumerate().take(stage) {
                acc += a * ws.k[j][i];
            }
            ws.y_stage[i] = y[i] + h * acc;
        }
        let (done, rest) = ws.k.split_at_mut(stage);
        let _ = done;
        rhs(t + C[stage] * h, &ws.y_stage, &mut rest[0]);
        *rhs_evals += 1;
    }
    for i in 0..dim {
        let mut acc5 = 0.0;
        let mut acc4 = 0.0;
        for s in 0..7 {
            acc5 += B5[s] * ws.k[s][i];
            acc4 += B4[s] * ws.k[s][i];
        }
        ws.y5[i] = y[i] + h * acc5;
        ws.y4[i] = y[i] + h * acc4;
    }
}

fn error_norm(y: &[f64], y5: &[f64], y4: &[f64], rel: f64, abs: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..y.len() {
        let scale = abs + rel * y[i].abs().max(y5[i].abs());
        let e = (y5[i] - y4[i]) / scale;
        acc += e * e;
    }
    (acc / y.len() as f64).sqrt()
}

fn crossed(direction: CrossingDirection, g_prev: f64, g_new: f64) -> bool {
    match direction {
        CrossingDirection::Rising => g_prev <= 0.0 && g_new > 0.0,
        CrossingDirection::Falling => g_prev >= 0.0 && g_new < 0.0,
    }
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end` (forward only) with
/// adaptive steps. `observer` sees every accepted step including the final
/// one; terminal `events` stop the integration at a bisected crossing.
pub fn integrate_adaptive(
    rhs: &mut dyn FnMut(f64, &[f64], &mut [f64]),
    t0: f64,
    y0: &[f64],
    t_end: f64,
    options: &OdeOptions,
    events: &[Event<'_>],
    observer: &mut dyn FnMut(f64, &[f64]),
) -> Result<OdeResult, OdeError> {
    assert!(t_end >= t0, "integration must run forward in time");
    let dim = y0.len();
    let mut ws = Workspace::new(dim);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut rhs_evals = 0usize;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let span = t_end - t0;
    let max_step = options.max_step.unwrap_or(span.max(1e-30));
    let mut h = options
        .initial_step
        .unwrap_or((span / 100.0).max(1e-12))
        .min(max_step);
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(t, &y)).collect();
    observer(t, &y);
    if span == 0.0 {
        return Ok(OdeResult {
            t_end: t,
            y_end: y,
            steps_accepted: 0,
            steps_rejected: 0,
            rhs_evaluations: rhs_evals,
            event: None,
        });
    }

    while t < t_end {
        if accepted + rejected >= options.max_steps {
            return Err(OdeError::MaxSteps {
                t,
                steps: accepted + rejected,
            });
        }
        h = h.min(t_end - t).min(max_step);
        if h <= t.abs().max(1.0) * 1e-15 {
            return Err(OdeError::StepUnderflow { t });
        }
        dp_step(rhs, t, &y, h, &mut ws, &mut rhs_evals);
        if ws.y5.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFinite { t });
        }
        let err = error_norm(&y, &ws.y5, &ws.y4, options.rel_tol, options.abs_tol);
        if err <= 1.0 {
            let t_new = t + h;
            // Event check on the accepted interval.
            let mut fired: Option<usize> = None;
            let mut g_new = vec![0.0; events.len()];
            for (idx, event) in events.iter().enumerate() {
                g_new[idx] = (event.func)(t_new, &ws.y5);
                if fired.is_none() && crossed(event.direction, g_prev[idx], g_new[idx]) {
                    fired = Some(idx);
                }
            }
            if let Some(idx) = fired {
                let event = &events[idx];
                // Bisect the step fraction until the crossing is bracketed
                // tightly, re-taking partial steps from the step start.
                let mut lo = 0.0f64;
                let mut hi = 1.0f64;
                let mut y_hit = ws.y5.clone();
                let mut t_hit = t_new;
                for _ in 0..48 {
                    let mid = 0.5 * (lo + hi);
                    dp_step(rhs, t, &y, h * mid, &mut ws, &mut rhs_evals);
                    let g_mid = (event.func)(t + h * mid, &ws.y5);
                    if crossed(event.direction, g_prev[idx], g_mid) {
                        hi = mid;
                        y_hit.copy_from_slice(&ws.y5);
                        t_hit = t + h * mid;
                    } else {
                        lo = mid;
                    }
                    if (hi - lo) * h.abs() < 1e-12 * t_hit.abs().max(1.0) {
                        break;
                    }
                }
                accepted += 1;
                observer(t_hit, &y_hit);
                return Ok(OdeResult {
                    t_end: t_hit,
                    y_end: y_hit,
                    steps_accepted: accepted,
                    steps_rejected: rejected,
                    rhs_evaluations: rhs_evals,
                    event: Some(idx),
                });
            }
            t = t_new;
            y.copy_from_slice(&ws.y5);
            g_prev.copy_from_slice(&g_new);
            accepted += 1;
            observer(t, &y);
        } else {
            rejected += 1;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }

    Ok(OdeResult {
        t_end: t,
        y_end: y,
        steps_accepted: accepted,
        steps_rejected: rejected,
        rhs_evaluations: rhs_evals,
        event: None,
    })
}

/// Fixed-step integration (no events, no step control); the last step is
/// shortened to land exactly on `t_end`.
pub fn integrate_fixed(
    rhs: &mut dyn FnMut(f64, &[f64], &mut [f64]),
    t0: f64,
    y0: &[f64],
    t_end: f64,
    h: f64,
    observer: &mut dyn FnMut(f64, &[f64]),
) -> Result<OdeResult, OdeError> {
    assert!(h > 0.0 && t_end >= t0);
    let mut ws = Workspace::new(y0.len());
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut rhs_evals = 0usize;
    let mut accepted = 0usize;
    observer(t, &y);
    while t < t_end {
        let step = h.min(t_end - t);
        dp_step(rhs, t, &y, step, &mut ws, &mut rhs_evals);
        if ws.y5.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFinite { t });
        }
        t += step;
        y.copy_from_slice(&ws.y5);
        accepted += 1;
        observer(t, &y);
    }
    Ok(OdeResult {
        t_end: t,
        y_end: y,
        steps_accepted: accepted,
        steps_rejected: 0,
        rhs_evaluations: rhs_evals,
        event: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_rhs(_t: f64, y: &[f64], dydt: &mut [f64]) {
        dydt[0] = y[0];
    }

    #[test]
    fn adaptive_matches_exponential() {
        let r = integrate_adaptive(
            &mut exp_rhs,
            0.0,
            &[1.0],
            1.0,
            &OdeOptions::default(),
            &[],
            &mut |_, _| {},
        )
        .unwrap();
        assert!((r.y_end[0] - 1.0f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn fixed_step_shows_fifth_order() {
        // Harmonic oscillator over one period; halving h should cut the
        // error by about 2^5.
        let mut rhs = |_t: f64, y: &[f64], dydt: &mut [f64]| {
            dydt[0] = y[1];
            dydt[1] = -y[0];
        };
        let t_end = 2.0 * std::f64::consts::PI;
        let mut err_at = |h: f64| {
            let r =
                integrate_fixed(&mut rhs, 0.0, &[1.0, 0.0], t_end, h, &mut |_, _| {}).unwrap();
            ((r.y_end[0] - 1.0).powi(2) + r.y_end[1].powi(2)).sqrt()
        };
        let e1 = err_at(t_end / 64.0);
        let e2 = err_at(t_end / 128.0);
        let ratio = e1 / e2;
        let nominal = 2f64.powi(NOMINAL_ORDER as i32);
        assert!(
            (ratio - nominal).abs() < 0.2 * nominal,
            "order ratio {ratio}, expected about {nominal}"
        );
    }

    #[test]
    fn event_stops_at_crossing() {
        // y' = 1, event at y = 0.5 rising.
        let mut rhs = |_t: f64, _y: &[f64], dydt: &mut [f64]| {
            dydt[0] = 1.0;
        };
        let event_fn = |_t: f64, y: &[f64]| y[0] - 0.5;
        let events = [Event {
            func: &event_fn,
            direction: CrossingDirection::Rising,
        }];
        let r = integrate_adaptive(
            &mut rhs,
            0.0,
            &[0.0],
            10.0,
            &OdeOptions::default(),
            &events,
            &mut |_, _| {},
        )
        .unwrap();
        assert_eq!(r.event, Some(0));
        assert!((r.t_end - 0.5).abs() < 1e-9, "stopped at {}", r.t_end);
    }
}
