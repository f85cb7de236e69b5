//! Minimum control energy and the open-loop minimum-energy input.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expm::matrix_exponential;
use crate::gramian::{
    finite_horizon_gramian, gramian_spectrum, FiniteHorizonMethod, GramianResult, UNCONTROLLABLE_RATIO,
};
use crate::lti::StateSpaceModel;
use crate::quadrature::composite_simpson;
use crate::scalar::Scalar;
use crate::simulate::{simulate, uniform_grid};

/// Minimum number of grid steps accepted by [`synthesize_min_energy_control`].
pub const MIN_SYNTHESIS_STEPS: usize = 100;

/// Sampled minimum-energy input steering `x(0) = 0` to `target` at time `horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlProfile<T: Scalar> {
    pub times: Vec<T>,
    pub values: Vec<DVector<T>>,
    pub target: DVector<T>,
    /// `x_f^T W_T^{-1} x_f`.
    pub predicted_energy: T,
    pub horizon: T,
}

impl<T: Scalar> ControlProfile<T> {
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    /// Same profile with every sample multiplied by `factor`; the target and
    /// predicted energy are left untouched.
    pub fn scaled_samples(&self, factor: T) -> Self {
        Self {
            values: self.values.iter().map(|u| u * factor).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyVerificationReport<T: Scalar> {
    pub achieved_final_state: DVector<T>,
    /// `|x(T) - x_f| / |x_f|`, or the absolute error when `x_f = 0`.
    pub final_state_error: T,
    /// Composite Simpson estimate of `int_0^T |u|^2 dt`.
    pub measured_energy: T,
    /// `|measured - predicted| / predicted`, or `measured` when `predicted = 0`.
    pub energy_mismatch: T,
}

fn check_positive_definite<T: Scalar>(g: &GramianResult<T>) -> Result<()> {
    let s = gramian_spectrum(g);
    let (lmin, lmax) = (s.lambda_min(), s.lambda_max());
    if !(lmin > T::zero()) || lmin <= T::lit(UNCONTROLLABLE_RATIO) * lmax {
        return Err(Error::SingularGramian {
            lambda_min: lmin.as_f64(),
            lambda_max: lmax.as_f64(),
        });
    }
    Ok(())
}

/// `W^{-1} x` through a Cholesky factorization.
fn gramian_solve<T: Scalar>(g: &GramianResult<T>, x: &DVector<T>) -> Result<DVector<T>> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "target has length {}, Gramian is {}x{}",
            x.len(),
            g.dim(),
            g.dim()
        )));
    }
    if !x.iter().all(|v| v.finite()) {
        return Err(Error::NonFinite("x_f"));
    }
    check_positive_definite(g)?;
    let chol = g.matrix().clone().cholesky().ok_or_else(|| {
        let s = gramian_spectrum(g);
        Error::SingularGramian {
            lambda_min: s.lambda_min().as_f64(),
            lambda_max: s.lambda_max().as_f64(),
        }
    })?;
    Ok(chol.solve(x))
}

/// `E* = x_f^T W^{-1} x_f`.
pub fn min_control_energy<T: Scalar>(g: &GramianResult<T>, x_f: &DVector<T>) -> Result<T> {
    let y = gramian_solve(g, x_f)?;
    Ok(x_f.dot(&y))
}

/// Bounds `[1/lambda_max, 1/lambda_min]` on the energy of unit-norm targets.
pub fn unit_target_energy_bounds<T: Scalar>(g: &GramianResult<T>) -> Result<(T, T)> {
    check_positive_definite(g)?;
    let s = gramian_spectrum(g);
    Ok((T::one() / s.lambda_max(), T::one() / s.lambda_min()))
}

/// Samples `u*(t) = B^T e^{A^T (T - t)} W_T^{-1} x_f` on a uniform grid of
/// `steps` intervals over `[0, horizon]`.
pub fn synthesize_min_energy_control<T: Scalar>(
    model: &StateSpaceModel<T>,
    horizon: T,
    x_f: &DVector<T>,
    steps: usize,
) -> Result<ControlProfile<T>> {
    if !horizon.finite() {
        return Err(Error::NonFinite("T"));
    }
    if horizon <= T::zero() {
        return Err(Error::param("T", format!("horizon must be > 0 (got {horizon})")));
    }
    if steps < MIN_SYNTHESIS_STEPS {
        return Err(Error::param(
            "steps",
            format!("need at least {MIN_SYNTHESIS_STEPS} steps (got {steps})"),
        ));
    }
    if x_f.len() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "target has length {}, model has n = {}",
            x_f.len(),
            model.n()
        )));
    }
    let w_t = finite_horizon_gramian(model, horizon, FiniteHorizonMethod::AugmentedExpm)?;
    let costate = gramian_solve(&w_t, x_f)?;
    let predicted_energy = x_f.dot(&costate);

    let times = uniform_grid(horizon, steps);
    let bt: DMatrix<T> = model.b().transpose();
    let values = times
        .iter()
        .map(|&t| {
            let e = matrix_exponential(model.a(), horizon - t)?;
            Ok(&bt * (e.transpose() * &costate))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ControlProfile {
        times,
        values,
        target: x_f.clone(),
        predicted_energy,
        horizon,
    })
}

/// Replays `profile` from `x(0) = 0` and compares against its target and
/// predicted energy.
pub fn verify_control<T: Scalar>(
    model: &StateSpaceModel<T>,
    profile: &ControlProfile<T>,
) -> Result<EnergyVerificationReport<T>> {
    if profile.times.len() < 2 || profile.values.len() != profile.times.len() {
        return Err(Error::DimensionMismatch(format!(
            "profile has {} times and {} samples",
            profile.times.len(),
            profile.values.len()
        )));
    }
    if profile.target.len() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "profile target has length {}, model has n = {}",
            profile.target.len(),
            model.n()
        )));
    }
    let steps = profile.steps();
    let traj = simulate(
        model,
        &profile.values,
        &DVector::zeros(model.n()),
        profile.horizon,
        steps,
    )?;
    let achieved = traj.final_state().clone();
    let miss = (&achieved - &profile.target).norm();
    let target_norm = profile.target.norm();
    let final_state_error = if target_norm > T::zero() { miss / target_norm } else { miss };

    let power: Vec<T> = profile.values.iter().map(|u| u.norm_squared()).collect();
    let h = profile.horizon / T::from_usize_lossy(steps);
    let measured_energy = composite_simpson(&power, h);
    let energy_mismatch = if profile.predicted_energy > T::zero() {
        (measured_energy - profile.predicted_energy).abs() / profile.predicted_energy
    } else {
        measured_energy.abs()
    };

    Ok(EnergyVerificationReport {
        achieved_final_state: achieved,
        final_state_error,
        measured_energy,
        energy_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gramian::{oscillator_gramian_closed_form, GramianMethod, Horizon};
    use crate::lti::{make_oscillator, OscillatorParams};

    fn params(z: f64, w: f64) -> OscillatorParams<f64> {
        OscillatorParams::new(z, w).unwrap()
    }

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn reference_energy_values() {
        let g = oscillator_gramian_closed_form(&params(0.5, 1.0)).unwrap();
        assert!((min_control_energy(&g, &v(&[1.0, 0.0])).unwrap() - 2.0).abs() < 1e-14);
        let g = oscillator_gramian_closed_form(&params(0.5, 2.0)).unwrap();
        assert!((min_control_energy(&g, &v(&[1.0, 1.0])).unwrap() - 20.0).abs() < 1e-13);
        assert_eq!(min_control_energy(&g, &v(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn singular_gramian_rejected() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let g = GramianResult::new(w, Horizon::Infinite, GramianMethod::ClosedForm, None).unwrap();
        assert!(matches!(
            min_control_energy(&g, &v(&[1.0, 0.0])),
            Err(Error::SingularGramian { .. })
        ));
        let g = oscillator_gramian_closed_form(&params(0.5, 1.0)).unwrap();
        assert!(matches!(
            min_control_energy(&g, &v(&[1.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn zero_target_gives_zero_profile() {
        let m = make_oscillator(&params(0.5, 1.0));
        let p = synthesize_min_energy_control(&m, 5.0, &v(&[0.0, 0.0]), 200).unwrap();
        assert_eq!(p.predicted_energy, 0.0);
        assert!(p.values.iter().all(|u| u[0] == 0.0));
        let r = verify_control(&m, &p).unwrap();
        assert_eq!(r.measured_energy, 0.0);
        assert_eq!(r.final_state_error, 0.0);
    }

    #[test]
    fn round_trip_reaches_target() {
        let m = make_oscillator(&params(0.5, 1.0));
        let xf = v(&[1.0, 0.0]);
        let p = synthesize_min_energy_control(&m, 5.0, &xf, 2000).unwrap();
        assert_eq!(p.times.len(), 2001);
        assert_eq!(p.times[0], 0.0);
        assert_eq!(*p.times.last().unwrap(), 5.0);
        let r = verify_control(&m, &p).unwrap();
        assert!(r.final_state_error < 1e-4, "{}", r.final_state_error);
        assert!(r.energy_mismatch < 1e-3, "{}", r.energy_mismatch);
    }

    #[test]
    fn doubling_target_is_exact() {
        let m = make_oscillator(&params(0.3, 1.7));
        let xf = v(&[0.4, -1.3]);
        let p1 = synthesize_min_energy_control(&m, 3.0, &xf, 300).unwrap();
        let p2 = synthesize_min_energy_control(&m, 3.0, &(&xf * 2.0), 300).unwrap();
        for (a, b) in p1.values.iter().zip(&p2.values) {
            assert_eq!(a * 2.0, *b);
        }
        assert_eq!(p1.predicted_energy * 4.0, p2.predicted_energy);
    }

    #[test]
    fn perturbed_samples_scale_energy() {
        let m = make_oscillator(&params(0.5, 1.0));
        let p = synthesize_min_energy_control(&m, 5.0, &v(&[1.0, 0.0]), 2000).unwrap();
        let base = verify_control(&m, &p).unwrap().measured_energy;
        let bumped = verify_control(&m, &p.scaled_samples(1.1)).unwrap().measured_energy;
        assert!((bumped / base - 1.21).abs() < 1e-9);
    }

    #[test]
    fn synthesis_validation() {
        let m = make_oscillator(&params(0.5, 1.0));
        let xf = v(&[1.0, 0.0]);
        assert!(matches!(
            synthesize_min_energy_control(&m, 0.0, &xf, 200),
            Err(Error::InvalidParameter { name: "T", .. })
        ));
        assert!(matches!(
            synthesize_min_energy_control(&m, 1.0, &xf, 99),
            Err(Error::InvalidParameter { name: "steps", .. })
        ));
        let uncontrollable = StateSpaceModel::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]),
            DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
        )
        .unwrap();
        assert!(matches!(
            synthesize_min_energy_control(&uncontrollable, 1.0, &xf, 200),
            Err(Error::SingularGramian { .. })
        ));
    }

    #[test]
    fn unit_bounds_hit_at_eigenvectors() {
        let g = oscillator_gramian_closed_form(&params(0.5, 2.0)).unwrap();
        let (lo, hi) = unit_target_energy_bounds(&g).unwrap();
        assert_eq!((lo, hi), (4.0, 16.0));
        assert!((min_control_energy(&g, &v(&[1.0, 0.0])).unwrap() - hi).abs() < 1e-13);
        assert!((min_control_energy(&g, &v(&[0.0, 1.0])).unwrap() - lo).abs() < 1e-13);
    }
}
