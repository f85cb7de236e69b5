//! Matrix exponentials: a general scaling-and-squaring evaluator and the
//! closed forms for oscillator-shaped 2x2 dynamics.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{all_finite, Scalar};

/// Upper bound on the 1-norm of the scaled matrix fed to the Taylor series.
pub const SCALED_NORM_BOUND: f64 = 0.5;

/// Outside this distance from `zeta = 1` the trig/hyperbolic forms are used;
/// inside it the power series in `(1 - zeta^2) omega_n^2 t^2`.
pub const NEAR_CRITICAL_BAND: f64 = 1e-6;

const MAX_TAYLOR_TERMS: usize = 60;

/// Result of [`scaling_and_squaring`] with its evaluation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledExpm<T: Scalar> {
    pub value: DMatrix<T>,
    /// Number of squarings applied after the Taylor evaluation.
    pub squarings: u32,
    /// Taylor terms summed (including the identity).
    pub taylor_terms: usize,
}

/// Which closed-form branch evaluated an oscillator exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormBranch {
    Undamped,
    Underdamped,
    /// Series expansion around critical damping; covers the critically damped regime.
    NearCritical,
    Overdamped,
}

fn one_norm<T: Scalar>(m: &DMatrix<T>) -> T {
    m.column_iter()
        .map(|c| c.iter().fold(T::zero(), |acc, x| acc + x.abs()))
        .fold(T::zero(), T::max)
}

fn validate<T: Scalar>(a: &DMatrix<T>, t: T) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !all_finite(a) {
        return Err(Error::NonFinite("A"));
    }
    if !t.finite() {
        return Err(Error::NonFinite("t"));
    }
    Ok(())
}

/// `e^{A t}` by truncated Taylor series on `A t / 2^s`, where `s` is the
/// smallest count bringing the 1-norm to at most [`SCALED_NORM_BOUND`],
/// followed by `s` squarings.
pub fn scaling_and_squaring<T: Scalar>(a: &DMatrix<T>, t: T) -> Result<ScaledExpm<T>> {
    validate(a, t)?;
    let n = a.nrows();
    let mut x = a * t;
    let bound = T::lit(SCALED_NORM_BOUND);
    let two = T::lit(2.0);
    let mut norm = one_norm(&x);
    let mut squarings = 0u32;
    while norm > bound {
        norm /= two;
        squarings += 1;
    }
    if squarings > 0 {
        x /= two.powi(squarings as i32);
    }

    let eps = T::machine_epsilon();
    let mut sum = DMatrix::<T>::identity(n, n);
    let mut term = DMatrix::<T>::identity(n, n);
    let mut terms = 1;
    for k in 1..MAX_TAYLOR_TERMS {
        term = &term * &x / T::from_usize_lossy(k);
        sum += &term;
        terms += 1;
        let tn = one_norm(&term);
        if tn <= T::lit(0.1) * eps * one_norm(&sum) || tn == T::zero() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(ScaledExpm {
        value: sum,
        squarings,
        taylor_terms: terms,
    })
}

/// Reads `(sigma, omega_n^2)` from a matrix of the form
/// `[[0, 1], [-omega_n^2, -2 sigma]]` with `omega_n > 0`, `sigma >= 0`.
fn oscillator_shape<T: Scalar>(a: &DMatrix<T>) -> Option<(T, T)> {
    if a.nrows() != 2 || a.ncols() != 2 {
        return None;
    }
    let (a00, a01, a10, a11) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    if a00 != T::zero() || a01 != T::one() || !(a10 < T::zero()) || !(a11 <= T::zero()) {
        return None;
    }
    if !a10.finite() || !a11.finite() {
        return None;
    }
    Some((-a11 / T::lit(2.0), -a10))
}

/// Cosine-like and sine-like series `sum z^k/(2k)!` and `sum z^k/(2k+1)!`,
/// with `z = -q t^2`.
fn near_critical_series<T: Scalar>(z: T) -> (T, T) {
    let eps = T::machine_epsilon();
    let mut c = T::one();
    let mut s = T::one();
    let mut term_c = T::one();
    let mut term_s = T::one();
    for k in 1..40usize {
        let k2 = T::from_usize_lossy(2 * k);
        term_c = term_c * z / ((k2 - T::one()) * k2);
        term_s = term_s * z / (k2 * (k2 + T::one()));
        c += term_c;
        s += term_s;
        if term_c.abs() <= eps * c.abs() && term_s.abs() <= eps * s.abs() {
            break;
        }
    }
    (c, s)
}

/// Closed-form `e^{A t}` for oscillator-shaped `A`, or `None` when `A` does
/// not have that shape.
///
/// With `sigma = zeta omega_n` and `N = A + sigma I`, `N^2 = -q I` where
/// `q = omega_n^2 - sigma^2`, so `e^{A t} = e^{-sigma t} (C(t) I + S(t) N)`
/// with `C, S` the cos/sin (q > 0), cosh/sinh (q < 0) or polynomial (q = 0)
/// pair.
pub fn oscillator_closed_form<T: Scalar>(
    a: &DMatrix<T>,
    t: T,
) -> Option<(DMatrix<T>, ClosedFormBranch)> {
    let (sigma, w2) = oscillator_shape(a)?;
    if !t.finite() {
        return None;
    }
    let omega = w2.sqrt();
    let zeta = sigma / omega;
    let q = w2 - sigma * sigma;

    let (c, s, decay, branch) = if sigma == T::zero() {
        let (sn, cs) = (omega * t).sin_cos();
        (cs, sn / omega, T::one(), ClosedFormBranch::Undamped)
    } else if (zeta - T::one()).abs() < T::lit(NEAR_CRITICAL_BAND)
        && (q * t * t).abs() <= T::one()
    {
        let (c, s) = near_critical_series(-q * t * t);
        (c, s * t, (-sigma * t).exp(), ClosedFormBranch::NearCritical)
    } else if q > T::zero() {
        let wd = q.sqrt();
        let (sn, cs) = (wd * t).sin_cos();
        (cs, sn / wd, (-sigma * t).exp(), ClosedFormBranch::Underdamped)
    } else {
        let gamma = (-q).sqrt();
        let gt = gamma * t;
        if gt.abs() < T::lit(20.0) {
            (gt.cosh(), gt.sinh() / gamma, (-sigma * t).exp(), ClosedFormBranch::Overdamped)
        } else {
            // e^{-sigma t} cosh(gamma t) without overflowing the hyperbolic factor.
            let half = T::lit(0.5);
            let ep = ((gamma - sigma) * t).exp();
            let em = (-(gamma + sigma) * t).exp();
            ((ep + em) * half, (ep - em) * half / gamma, T::one(), ClosedFormBranch::Overdamped)
        }
    };

    let cd = c * decay;
    let sd = s * decay;
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[cd + sd * sigma, sd, -sd * w2, cd - sd * sigma],
    );
    Some((m, branch))
}

/// `e^{A t}`. Oscillator-shaped matrices use the regime closed form, anything
/// else goes through [`scaling_and_squaring`].
pub fn matrix_exponential<T: Scalar>(a: &DMatrix<T>, t: T) -> Result<DMatrix<T>> {
    validate(a, t)?;
    if let Some((m, _)) = oscillator_closed_form(a, t) {
        return Ok(m);
    }
    Ok(scaling_and_squaring(a, t)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{make_oscillator, OscillatorParams};
    use std::f64::consts::FRAC_PI_2;

    fn osc(z: f64, w: f64) -> DMatrix<f64> {
        make_oscillator(&OscillatorParams::new(z, w).unwrap()).a().clone()
    }

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax()
    }

    #[test]
    fn zero_time_is_identity() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, -4.0, 5.0, 6.0, 0.5, 0.0, -1.0]);
        let e = scaling_and_squaring(&a, 0.0).unwrap();
        assert_eq!(e.value, DMatrix::identity(3, 3));
        assert_eq!(e.squarings, 0);
        assert_eq!(matrix_exponential(&osc(0.3, 2.0), 0.0).unwrap(), DMatrix::identity(2, 2));
    }

    #[test]
    fn quarter_rotation() {
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let closed = matrix_exponential(&osc(0.0, 1.0), FRAC_PI_2).unwrap();
        assert!(max_abs_diff(&closed, &expected) < 1e-15);
        let general = scaling_and_squaring(&osc(0.0, 1.0), FRAC_PI_2).unwrap();
        assert!(max_abs_diff(&general.value, &expected) < 1e-14);
        assert!(general.squarings >= 2);
    }

    // Frozen from a 40-digit evaluation of exp([[0,1],[-1,-1]]).
    const EXPM_HALF_DAMPED_T1: [f64; 4] = [
        0.659_700_153_391_701_7,
        0.533_507_195_114_693,
        -0.533_507_195_114_693,
        0.126_192_958_277_008_7,
    ];

    #[test]
    fn underdamped_against_oracle() {
        let expected = DMatrix::from_row_slice(2, 2, &EXPM_HALF_DAMPED_T1);
        let oracle = scaling_and_squaring(&osc(0.5, 1.0), 1.0).unwrap().value;
        assert!(max_abs_diff(&oracle, &expected) < 1e-14);
        let (closed, branch) = oscillator_closed_form(&osc(0.5, 1.0), 1.0).unwrap();
        assert_eq!(branch, ClosedFormBranch::Underdamped);
        assert!(max_abs_diff(&closed, &oracle) < 1e-9);
        assert!(max_abs_diff(&closed, &expected) < 1e-14);
    }

    #[test]
    fn branch_dispatch() {
        let cases = [
            (0.0, ClosedFormBranch::Undamped),
            (0.3, ClosedFormBranch::Underdamped),
            (1.0, ClosedFormBranch::NearCritical),
            (1.0 + 5e-7, ClosedFormBranch::NearCritical),
            (1.0 - 5e-7, ClosedFormBranch::NearCritical),
            (1.0 + 1e-4, ClosedFormBranch::Overdamped),
            (3.0, ClosedFormBranch::Overdamped),
        ];
        for (z, want) in cases {
            let (_, b) = oscillator_closed_form(&osc(z, 1.5), 0.7).unwrap();
            assert_eq!(b, want, "zeta = {z}");
        }
        let general = DMatrix::from_row_slice(2, 2, &[0.1, 1.0, -1.0, 0.0]);
        assert!(oscillator_closed_form(&general, 1.0).is_none());
    }

    #[test]
    fn closed_forms_match_general_path() {
        for z in [0.0, 0.3, 1.0 - 1e-4, 1.0 - 3e-7, 1.0, 1.0 + 3e-7, 1.0 + 1e-4, 3.0] {
            for w in [0.5, 1.0, 2.0] {
                for t in [-1.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
                    let a = osc(z, w);
                    let (cf, _) = oscillator_closed_form(&a, t).unwrap();
                    let ss = scaling_and_squaring(&a, t).unwrap().value;
                    assert!(
                        max_abs_diff(&cf, &ss) < 1e-9,
                        "zeta={z} w={w} t={t}: {cf} vs {ss}"
                    );
                }
            }
        }
    }

    #[test]
    fn critical_band_continuity() {
        // The exact exponential moves by O(delta) when zeta moves by delta, so
        // continuity at delta = 1e-4 is checked through the symmetric mean,
        // whose deviation from the critical form is O(delta^2).
        for w in [0.5, 1.0, 2.0] {
            for k in 0..=50 {
                let t = 0.1 * k as f64;
                let crit = matrix_exponential(&osc(1.0, w), t).unwrap();
                let lo = matrix_exponential(&osc(1.0 - 1e-4, w), t).unwrap();
                let hi = matrix_exponential(&osc(1.0 + 1e-4, w), t).unwrap();
                assert!(max_abs_diff(&((lo + hi) * 0.5), &crit) < 1e-6, "w={w} t={t}");
                for delta in [1e-6, 1e-7, 1e-9, 1e-11] {
                    for z in [1.0 - delta, 1.0 + delta] {
                        let e = matrix_exponential(&osc(z, w), t).unwrap();
                        assert!(max_abs_diff(&e, &crit) < 1e-6, "z={z} w={w} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn overdamped_large_time_stays_finite() {
        let a = osc(50.0, 1.0);
        let (e, _) = oscillator_closed_form(&a, 40.0).unwrap();
        assert!(e.iter().all(|x| x.is_finite()));
        let ss = scaling_and_squaring(&a, 40.0).unwrap().value;
        assert!(max_abs_diff(&e, &ss) < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let a = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(matrix_exponential(&a, 1.0), Err(Error::DimensionMismatch(_))));
        let mut a = DMatrix::<f64>::zeros(2, 2);
        a[(1, 1)] = f64::INFINITY;
        assert!(matches!(matrix_exponential(&a, 1.0), Err(Error::NonFinite("A"))));
        assert!(matches!(
            matrix_exponential(&DMatrix::<f64>::zeros(2, 2), f64::NAN),
            Err(Error::NonFinite("t"))
        ));
    }

    #[test]
    fn single_precision() {
        let a = make_oscillator(&OscillatorParams::<f32>::new(0.5, 1.0).unwrap()).a().clone();
        let cf = matrix_exponential(&a, 1.0f32).unwrap();
        let ss = scaling_and_squaring(&a, 1.0f32).unwrap().value;
        assert!((cf - ss).amax() < 1e-5);
    }
}
