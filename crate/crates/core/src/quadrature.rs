//! Simpson-rule quadrature for matrix-valued integrands and sampled signals.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Absolute tolerance per matrix entry used by the Gramian quadrature path.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;

/// Maximum number of panels before adaptive Simpson gives up.
pub const MAX_PANELS: usize = 1 << 20;

const INITIAL_PANELS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature<T: Scalar> {
    pub value: DMatrix<T>,
    /// Number of accepted Simpson panels.
    pub panels: usize,
}

struct Panel<T: Scalar> {
    a: T,
    b: T,
    fa: DMatrix<T>,
    fm: DMatrix<T>,
    fb: DMatrix<T>,
    whole: DMatrix<T>,
}

fn simpson<T: Scalar>(a: T, b: T, fa: &DMatrix<T>, fm: &DMatrix<T>, fb: &DMatrix<T>) -> DMatrix<T> {
    (fa + fm * T::lit(4.0) + fb) * ((b - a) / T::lit(6.0))
}

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// A panel is accepted when its two halves change the estimate by at most
/// `15 * tol * width / (b - a)` in every entry; the accepted value carries the
/// Richardson correction. Fails with [`Error::QuadratureNonConvergence`] once
/// more than [`MAX_PANELS`] panels would be needed.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, abs_tol: T) -> Result<Quadrature<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<DMatrix<T>>,
{
    if !a.finite() || !b.finite() || !abs_tol.finite() {
        return Err(Error::NonFinite("quadrature bounds"));
    }
    if b < a {
        return Err(Error::param("b", "upper limit below lower limit"));
    }
    if abs_tol <= T::zero() {
        return Err(Error::param("abs_tol", "must be > 0"));
    }
    let f0 = f(a)?;
    if b == a {
        return Ok(Quadrature {
            value: DMatrix::zeros(f0.nrows(), f0.ncols()),
            panels: 0,
        });
    }

    let half = T::lit(0.5);
    let span = b - a;
    let fifteen = T::lit(15.0);

    let mut stack = Vec::new();
    let n0 = T::from_usize_lossy(INITIAL_PANELS);
    let mut left = a;
    let mut f_left = f0;
    for i in 1..=INITIAL_PANELS {
        let right = if i == INITIAL_PANELS { b } else { a + span * T::from_usize_lossy(i) / n0 };
        let mid = (left + right) * half;
        let fm = f(mid)?;
        let fr = f(right)?;
        let whole = simpson(left, right, &f_left, &fm, &fr);
        stack.push(Panel { a: left, b: right, fa: f_left, fm, fb: fr.clone(), whole });
        left = right;
        f_left = fr;
    }

    let mut total = DMatrix::zeros(stack[0].fa.nrows(), stack[0].fa.ncols());
    let mut accepted = 0usize;
    while let Some(p) = stack.pop() {
        let mid = (p.a + p.b) * half;
        let lm = (p.a + mid) * half;
        let rm = (mid + p.b) * half;
        let flm = f(lm)?;
        let frm = f(rm)?;
        let sl = simpson(p.a, mid, &p.fa, &flm, &p.fm);
        let sr = simpson(mid, p.b, &p.fm, &frm, &p.fb);
        let refined = &sl + &sr;
        let delta = &refined - &p.whole;
        let local_tol = abs_tol * (p.b - p.a) / span;
        if delta.amax() <= fifteen * local_tol || mid <= p.a || mid >= p.b {
            total += refined + delta / fifteen;
            accepted += 1;
        } else {
            if accepted + stack.len() + 2 > MAX_PANELS {
                return Err(Error::QuadratureNonConvergence { panels: MAX_PANELS });
            }
            stack.push(Panel { a: p.a, b: mid, fa: p.fa, fm: flm, fb: p.fm.clone(), whole: sl });
            stack.push(Panel { a: mid, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: sr });
        }
    }
    Ok(Quadrature { value: total, panels: accepted })
}

/// Composite Simpson rule on uniformly spaced samples with step `h`.
///
/// An odd number of intervals finishes with the 3/8 rule on the last three;
/// a single interval falls back to the trapezoid rule.
pub fn composite_simpson<T: Scalar>(samples: &[T], h: T) -> T {
    let intervals = samples.len().saturating_sub(1);
    let third = h / T::lit(3.0);
    let simpson_even = |ys: &[T]| -> T {
        let mut acc = ys[0] + ys[ys.len() - 1];
        for (i, &y) in ys.iter().enumerate().take(ys.len() - 1).skip(1) {
            acc += y * if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        }
        acc * third
    };
    match intervals {
        0 => T::zero(),
        1 => (samples[0] + samples[1]) * h * T::lit(0.5),
        n if n % 2 == 0 => simpson_even(samples),
        n => {
            let head = if n > 3 { simpson_even(&samples[..n - 2]) } else { T::zero() };
            let y = &samples[n - 3..];
            let tail = (y[0] + (y[1] + y[2]) * T::lit(3.0) + y[3]) * h * T::lit(3.0) / T::lit(8.0);
            head + tail
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let f = |t: f64| Ok(DMatrix::from_row_slice(1, 2, &[t * t * t, 1.0]));
        let q = adaptive_simpson(f, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value[(0, 0)] - 4.0).abs() < 1e-14);
        assert!((q.value[(0, 1)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integrand() {
        let f = |t: f64| Ok(DMatrix::from_element(1, 1, (5.0 * t).sin().powi(2) * (-t).exp()));
        let q = adaptive_simpson(f, 0.0, 10.0, 1e-10).unwrap();
        // int_0^10 sin^2(5t) e^{-t} dt, closed form
        let exact = 0.5 * (1.0 - (-10.0f64).exp())
            - 0.5 * (1.0 - (-10.0f64).exp() * ((100.0f64).cos() - 10.0 * (100.0f64).sin())) / 101.0;
        assert!((q.value[(0, 0)] - exact).abs() < 1e-10, "{} vs {exact}", q.value[(0, 0)]);
    }

    #[test]
    fn empty_interval() {
        let q = adaptive_simpson(|_| Ok(DMatrix::from_element(2, 2, 1.0)), 1.0, 1.0, 1e-10).unwrap();
        assert_eq!(q.value, DMatrix::zeros(2, 2));
        assert_eq!(q.panels, 0);
    }

    #[test]
    fn non_convergence_reported() {
        // Deterministic noise never settles.
        let f = |t: f64| Ok(DMatrix::from_element(1, 1, ((t * 1e4).sin() * 43_758.545_3).fract()));
        let r = adaptive_simpson(f, 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn composite_rules() {
        let h = 0.01;
        for n in [1usize, 2, 3, 4, 7, 100, 101] {
            let xs: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
            let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
            let exact = xs[n].powi(3) / 3.0;
            let tol = if n == 1 { 1e-6 } else { 1e-15 };
            assert!((composite_simpson(&ys, h) - exact).abs() < tol, "n={n}");
        }
        assert_eq!(composite_simpson::<f64>(&[3.0], 0.1), 0.0);
    }
}
