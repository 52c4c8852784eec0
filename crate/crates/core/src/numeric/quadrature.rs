//! Adaptive Simpson quadrature with absolute/relative error control.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge: {subdivisions} subdivisions, last error estimate {estimate:.3e}")]
    NoConvergence { subdivisions: usize, estimate: f64 },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_depth: 40,
        }
    }
}

/// Integrates `f` over `[a, b]` with recursive Simpson refinement.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    options: QuadratureOptions,
) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    let fa = eval(f, a)?;
    let fb = eval(f, b)?;
    let m = 0.5 * (a + b);
    let fm = eval(f, m)?;
    let whole = simpson(a, b, fa, fm, fb);
    // Coarse magnitude estimate for the relative tolerance scale.
    let scale = whole.abs().max(1e-30);
    let mut depth_exceeded = false;
    let value = recurse(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        options,
        scale,
        options.max_depth,
        &mut depth_exceeded,
    )?;
    if depth_exceeded {
        return Err(QuadratureError::NoConvergence {
            subdivisions: options.max_depth,
            estimate: scale * options.rel_tol,
        });
    }
    Ok(value)
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadratureError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadratureError::NonFinite { x })
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    options: QuadratureOptions,
    scale: f64,
    depth: usize,
    depth_exceeded: &mut bool,
) -> Result<f64, QuadratureError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let error = left + right - whole;
    let tol = (options.abs_tol).max(options.rel_tol * scale);
    if error.abs() <= 15.0 * tol || (b - a).abs() < 1e-14 {
        return Ok(left + right + error / 15.0);
    }
    if depth == 0 {
        *depth_exceeded = true;
        return Ok(left + right);
    }
    let lv = recurse(
        f,
        a,
        m,
        fa,
        flm,
        fm,
        left,
        options,
        scale * 0.5,
        depth - 1,
        depth_exceeded,
    )?;
    let rv = recurse(
        f,
        m,
        b,
        fm,
        frm,
        fb,
        right,
        options,
        scale * 0.5,
        depth - 1,
        depth_exceeded,
    )?;
    Ok(lv + rv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        // Simpson is exact for cubics.
        let v = integrate(&|x: f64| x * x * x, 0.0, 2.0, QuadratureOptions::default()).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn integrates_oscillatory_integrand() {
        let v = integrate(&f64::sin, 0.0, std::f64::consts::PI, QuadratureOptions::default())
            .unwrap();
        assert!((v - 2.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn rejects_non_finite_integrand() {
        let r = integrate(&|x: f64| 1.0 / x, -1.0, 1.0, QuadratureOptions::default());
        assert!(matches!(r, Err(QuadratureError::NonFinite { .. })));
    }

    #[test]
    fn halved_tolerance_numbers_agree() {
        let opts = QuadratureOptions::default();
        let tight = QuadratureOptions {
            rel_tol: opts.rel_tol / 2.0,
            ..opts
        };
        let f = |x: f64| (x.sin() * 3.0).exp();
        let a = integrate(&f, 0.0, 4.0, opts).unwrap();
        let b = integrate(&f, 0.0, 4.0, tight).unwrap();
        assert!(((a - b) / b).abs() < 1e-8);
    }
}
