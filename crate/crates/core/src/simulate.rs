//! Fixed-step RK4 integration of `x' = A x + B u`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lti::StateSpaceModel;
use crate::scalar::Scalar;

/// Sampled trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Scalar> {
    pub times: Vec<T>,
    pub states: Vec<DVector<T>>,
    pub inputs: Vec<DVector<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn final_state(&self) -> &DVector<T> {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn step(&self) -> T {
        self.times[1] - self.times[0]
    }
}

/// Uniform grid `t_i = i T / steps`, `i = 0..=steps`. The last node is exactly `T`.
pub fn uniform_grid<T: Scalar>(horizon: T, steps: usize) -> Vec<T> {
    let n = T::from_usize_lossy(steps);
    (0..=steps)
        .map(|i| {
            if i == steps {
                horizon
            } else {
                horizon * T::from_usize_lossy(i) / n
            }
        })
        .collect()
}

/// Integrates the model from `x0` over `[0, horizon]` with `steps` RK4 steps.
///
/// `inputs` holds one sample per grid node (`steps + 1` in total). Midpoint
/// inputs are linearly interpolated, so fourth-order convergence holds only
/// while the input is itself well resolved by the grid.
pub fn simulate<T: Scalar>(
    model: &StateSpaceModel<T>,
    inputs: &[DVector<T>],
    x0: &DVector<T>,
    horizon: T,
    steps: usize,
) -> Result<Trajectory<T>> {
    if steps == 0 {
        return Err(Error::param("steps", "must be >= 1"));
    }
    if !horizon.finite() {
        return Err(Error::NonFinite("T"));
    }
    if horizon <= T::zero() {
        return Err(Error::param("T", format!("horizon must be > 0 (got {horizon})")));
    }
    if x0.len() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has length {}, model has n = {}",
            x0.len(),
            model.n()
        )));
    }
    if inputs.len() != steps + 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected {} input samples, got {}",
            steps + 1,
            inputs.len()
        )));
    }
    if let Some(bad) = inputs.iter().find(|u| u.len() != model.m()) {
        return Err(Error::DimensionMismatch(format!(
            "input sample has length {}, model has m = {}",
            bad.len(),
            model.m()
        )));
    }
    if !x0.iter().all(|v| v.finite()) {
        return Err(Error::NonFinite("x0"));
    }
    if !inputs.iter().flat_map(|u| u.iter()).all(|v| v.finite()) {
        return Err(Error::NonFinite("u"));
    }

    let times = uniform_grid(horizon, steps);
    let h = horizon / T::from_usize_lossy(steps);
    let half = T::lit(0.5);
    let (a, b): (&DMatrix<T>, &DMatrix<T>) = (model.a(), model.b());
    let f = |x: &DVector<T>, u: &DVector<T>| a * x + b * u;

    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.clone());
    let mut x = x0.clone();
    for i in 0..steps {
        let u0 = &inputs[i];
        let u1 = &inputs[i + 1];
        let um = (u0 + u1) * half;
        let k1 = f(&x, u0);
        let k2 = f(&(&x + &k1 * (h * half)), &um);
        let k3 = f(&(&x + &k2 * (h * half)), &um);
        let k4 = f(&(&x + &k3 * h), u1);
        x += (k1 + (k2 + k3) * T::lit(2.0) + k4) * (h / T::lit(6.0));
        states.push(x.clone());
    }
    Ok(Trajectory {
        times,
        states,
        inputs: inputs.to_vec(),
    })
}

/// Convenience wrapper for the unforced response.
pub fn simulate_free<T: Scalar>(
    model: &StateSpaceModel<T>,
    x0: &DVector<T>,
    horizon: T,
    steps: usize,
) -> Result<Trajectory<T>> {
    let zeros = vec![DVector::zeros(model.m()); steps + 1];
    simulate(model, &zeros, x0, horizon, steps)
}
