//! Fisher-information duality and entropy measures derived from the Gramian.
//!
//! The Fisher information matrix only enters through its determinant, tied to
//! the Gramian by `det(W_c) * det(I) = c`. The constant `c` is a convention
//! (default 1) and is carried explicitly in every report. All entropies are
//! in nats; thermodynamic entropies are in units of `k_B` unless a physical
//! value is supplied.

use crate::error::{Error, Result};
use crate::gramian::{gramian_determinant, oscillator_gramian_closed_form, GramianResult};
use crate::lti::OscillatorParams;
use crate::scalar::Scalar;

/// Boltzmann constant in J/K, for display in SI units.
pub const BOLTZMANN_SI: f64 = 1.380_649e-23;

/// Tolerance on `sum(p) = 1` accepted by [`shannon_entropy`].
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Determinant fed to [`gaussian_differential_entropy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianDeterminant<T> {
    /// `det(Sigma)`.
    Covariance(T),
    /// `det(I)`, with `Sigma = I^{-1}`.
    Fisher(T),
}

fn positive<T: Scalar>(name: &'static str, x: T) -> Result<T> {
    if !x.finite() {
        return Err(Error::NonFinite(name));
    }
    if x <= T::zero() {
        return Err(Error::param(name, format!("must be > 0 (got {x})")));
    }
    Ok(x)
}

/// `det(I) = c / det(W_c)`.
pub fn fisher_dual_determinant<T: Scalar>(det_wc: T, c: T) -> Result<T> {
    let det_wc = positive("det_wc", det_wc)?;
    let c = positive("c", c)?;
    Ok(c / det_wc)
}

/// Differential entropy of an `n`-dimensional Gaussian, in nats:
/// `1/2 ln((2 pi e)^n det(Sigma))`, or `n/2 ln(2 pi e) - 1/2 ln(det(I))`.
pub fn gaussian_differential_entropy<T: Scalar>(det: GaussianDeterminant<T>, n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::param("n", "dimension must be >= 1"));
    }
    let half = T::lit(0.5);
    let base = T::from_usize_lossy(n) * half * ln_two_pi_e::<T>();
    match det {
        GaussianDeterminant::Covariance(d) => Ok(base + half * positive("det_sigma", d)?.ln()),
        GaussianDeterminant::Fisher(d) => Ok(base - half * positive("det_i", d)?.ln()),
    }
}

/// `ln(2 pi e)`.
pub fn ln_two_pi_e<T: Scalar>() -> T {
    (T::two_pi()).ln() + T::one()
}

/// `H = -sum p_i ln p_i` in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy<T: Scalar>(p: &[T]) -> Result<T> {
    if p.is_empty() {
        return Err(Error::param("p", "distribution is empty"));
    }
    let mut sum = T::zero();
    for &x in p {
        if !x.finite() {
            return Err(Error::NonFinite("p"));
        }
        if x < T::zero() {
            return Err(Error::param("p", format!("negative probability {x}")));
        }
        sum += x;
    }
    if (sum - T::one()).abs() > T::lit(PROBABILITY_SUM_TOL) {
        return Err(Error::param("p", format!("probabilities sum to {sum}, not 1")));
    }
    Ok(p
        .iter()
        .filter(|&&x| x > T::zero())
        .fold(T::zero(), |acc, &x| acc - x * x.ln()))
}

/// `S = k_B H`.
pub fn thermodynamic_entropy<T: Scalar>(entropy_nats: T, k_b: T) -> Result<T> {
    if !entropy_nats.finite() {
        return Err(Error::NonFinite("H"));
    }
    Ok(positive("k_b", k_b)? * entropy_nats)
}

/// Boltzmann entropy `S = k_B ln(Omega)` for a microstate count `Omega >= 1`.
pub fn boltzmann_entropy<T: Scalar>(microstates: T, k_b: T) -> Result<T> {
    if !microstates.finite() {
        return Err(Error::NonFinite("omega"));
    }
    if microstates < T::one() {
        return Err(Error::param("omega", format!("microstate count must be >= 1 (got {microstates})")));
    }
    Ok(positive("k_b", k_b)? * microstates.ln())
}

pub fn nats_to_bits<T: Scalar>(nats: T) -> T {
    nats / T::LN_2()
}

pub fn bits_to_nats<T: Scalar>(bits: T) -> T {
    bits * T::LN_2()
}

/// `ln(det(W_c))` of the oscillator closed-form Gramian:
/// `-ln 16 - 2 ln zeta - 4 ln omega_n` for `zeta > 0`, `-2 ln omega_n` for
/// `zeta = 0`. Proportional to the associated thermodynamic entropy only up
/// to an unspecified constant.
pub fn oscillator_entropy_index<T: Scalar>(zeta: T, omega_n: T) -> Result<T> {
    let params = OscillatorParams::new(zeta, omega_n)?;
    Ok(gramian_determinant(&oscillator_gramian_closed_form(&params)?).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoEntropyReport<T> {
    pub n: usize,
    pub det_wc: T,
    /// Duality constant `c` in `det(W_c) det(I) = c`.
    pub duality_c: T,
    pub det_i: T,
    pub differential_entropy_nats: T,
    pub k_b: T,
    /// `k_B * differential_entropy_nats`.
    pub thermodynamic_entropy: T,
    /// `ln(det(W_c))`.
    pub entropy_index: T,
}

/// Runs the Gramian -> Fisher -> differential entropy -> thermodynamic chain.
pub fn info_entropy_report<T: Scalar>(g: &GramianResult<T>, c: T, k_b: T) -> Result<InfoEntropyReport<T>> {
    let det_wc = gramian_determinant(g);
    if !(det_wc > T::zero()) {
        return Err(Error::SingularGramian {
            lambda_min: det_wc.as_f64(),
            lambda_max: f64::NAN,
        });
    }
    let n = g.dim();
    let det_i = fisher_dual_determinant(det_wc, c)?;
    let h = gaussian_differential_entropy(GaussianDeterminant::Fisher(det_i), n)?;
    Ok(InfoEntropyReport {
        n,
        det_wc,
        duality_c: c,
        det_i,
        differential_entropy_nats: h,
        k_b,
        thermodynamic_entropy: thermodynamic_entropy(h, k_b)?,
        entropy_index: det_wc.ln(),
    })
}
