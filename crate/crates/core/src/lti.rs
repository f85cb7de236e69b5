//! Linear time-invariant models and the damped harmonic oscillator.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{all_finite, Scalar};

/// Half-width of the band around `zeta = 1` that classifies as critically damped.
pub const CRITICAL_BAND: f64 = 1e-9;

/// Damping regime of a second-order oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DampingRegime {
    Undamped,
    Underdamped,
    CriticallyDamped,
    Overdamped,
}

impl DampingRegime {
    /// Snake-case label used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            DampingRegime::Undamped => "undamped",
            DampingRegime::Underdamped => "underdamped",
            DampingRegime::CriticallyDamped => "critically_damped",
            DampingRegime::Overdamped => "overdamped",
        }
    }
}

impl std::fmt::Display for DampingRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies a damping factor. `zeta` within [`CRITICAL_BAND`] of one is
/// critically damped; exactly zero is undamped.
pub fn classify_regime<T: Scalar>(zeta: T) -> Result<DampingRegime> {
    if !zeta.finite() {
        return Err(Error::NonFinite("zeta"));
    }
    if zeta < T::zero() {
        return Err(Error::param("zeta", format!("must be >= 0 (got {zeta})")));
    }
    let one = T::one();
    Ok(if zeta == T::zero() {
        DampingRegime::Undamped
    } else if (zeta - one).abs() < T::lit(CRITICAL_BAND) {
        DampingRegime::CriticallyDamped
    } else if zeta < one {
        DampingRegime::Underdamped
    } else {
        DampingRegime::Overdamped
    })
}

/// Mass, damping coefficient and stiffness of a physical oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub mass: T,
    pub damping: T,
    pub stiffness: T,
}

/// Normalized oscillator parameters `(zeta, omega_n)`, optionally remembering
/// the physical triple they were derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams<T> {
    zeta: T,
    omega_n: T,
    omega_d: Option<T>,
    physical: Option<PhysicalParams<T>>,
}

impl<T: Scalar> OscillatorParams<T> {
    /// Builds parameters from the damping factor and natural frequency (rad/s).
    pub fn new(zeta: T, omega_n: T) -> Result<Self> {
        if !zeta.finite() {
            return Err(Error::NonFinite("zeta"));
        }
        if !omega_n.finite() {
            return Err(Error::NonFinite("omega_n"));
        }
        if zeta < T::zero() {
            return Err(Error::param("zeta", format!("must be >= 0 (got {zeta})")));
        }
        if omega_n <= T::zero() {
            return Err(Error::param("omega_n", format!("must be > 0 (got {omega_n})")));
        }
        let omega_d = if zeta < T::one() {
            let wd = omega_n * (T::one() - zeta * zeta).sqrt();
            (wd > T::zero()).then_some(wd)
        } else {
            None
        };
        Ok(Self {
            zeta,
            omega_n,
            omega_d,
            physical: None,
        })
    }

    /// Builds parameters from mass `m`, damping coefficient `c` and stiffness `k`:
    /// `zeta = c / (2 sqrt(m k))`, `omega_n = sqrt(k / m)`.
    pub fn from_physical(m: T, c: T, k: T) -> Result<Self> {
        for (name, v) in [("m", m), ("c", c), ("k", k)] {
            if !v.finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if m <= T::zero() {
            return Err(Error::param("m", format!("mass must be > 0 (got {m})")));
        }
        if c < T::zero() {
            return Err(Error::param("c", format!("damping coefficient must be >= 0 (got {c})")));
        }
        if k <= T::zero() {
            return Err(Error::param("k", format!("stiffness must be > 0 (got {k})")));
        }
        let zeta = c / (T::lit(2.0) * (m * k).sqrt());
        let omega_n = (k / m).sqrt();
        let mut p = Self::new(zeta, omega_n)?;
        p.physical = Some(PhysicalParams {
            mass: m,
            damping: c,
            stiffness: k,
        });
        Ok(p)
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn omega_n(&self) -> T {
        self.omega_n
    }

    /// Damped frequency `omega_n sqrt(1 - zeta^2)`, present only below critical damping.
    pub fn omega_d(&self) -> Option<T> {
        self.omega_d
    }

    pub fn physical(&self) -> Option<&PhysicalParams<T>> {
        self.physical.as_ref()
    }

    pub fn regime(&self) -> DampingRegime {
        classify_regime(self.zeta).expect("validated on construction")
    }
}

/// Continuous-time model `x' = A x + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel<T: Scalar> {
    a: DMatrix<T>,
    b: DMatrix<T>,
}

impl<T: Scalar> StateSpaceModel<T> {
    pub fn new(a: DMatrix<T>, b: DMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n || b.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "B must be {n}xm with m >= 1, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        if !all_finite(&a) {
            return Err(Error::NonFinite("A"));
        }
        if !all_finite(&b) {
            return Err(Error::NonFinite("B"));
        }
        Ok(Self { a, b })
    }

    /// Oscillator model `A = [[0, 1], [-omega_n^2, -2 zeta omega_n]]`, `B = [[0], [1]]`.
    pub fn oscillator(params: &OscillatorParams<T>) -> Self {
        let (z, w) = (params.zeta(), params.omega_n());
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[T::zero(), T::one(), -(w * w), -(T::lit(2.0) * z * w)],
        );
        let b = DMatrix::from_row_slice(2, 1, &[T::zero(), T::one()]);
        Self { a, b }
    }

    pub fn a(&self) -> &DMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<T> {
        &self.b
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Input dimension.
    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    /// `B B^T`.
    pub fn input_gram(&self) -> DMatrix<T> {
        &self.b * self.b.transpose()
    }

    /// Kalman matrix `[B, AB, ..., A^(n-1) B]`.
    pub fn controllability_matrix(&self) -> DMatrix<T> {
        let (n, m) = (self.n(), self.m());
        let mut out = DMatrix::zeros(n, n * m);
        let mut block = self.b.clone();
        for k in 0..n {
            out.columns_mut(k * m, m).copy_from(&block);
            block = &self.a * block;
        }
        out
    }
}

/// Builds the oscillator state-space model.
pub fn make_oscillator<T: Scalar>(params: &OscillatorParams<T>) -> StateSpaceModel<T> {
    StateSpaceModel::oscillator(params)
}

/// Numerical rank of the Kalman controllability matrix. Singular values below
/// `max(rows, cols) * eps * sigma_max` count as zero.
pub fn controllability_rank<T: Scalar>(model: &StateSpaceModel<T>) -> usize {
    let k = model.controllability_matrix();
    let sv = k.clone().singular_values();
    let sigma_max = sv.iter().copied().fold(T::zero(), T::max);
    if sigma_max == T::zero() {
        return 0;
    }
    let tol = T::from_usize_lossy(k.nrows().max(k.ncols())) * T::machine_epsilon() * sigma_max;
    sv.iter().filter(|&&s| s > tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_matrices() {
        let p = OscillatorParams::new(0.5, 2.0).unwrap();
        let m = make_oscillator(&p);
        assert_eq!(m.a(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0, -2.0]));
        assert_eq!(m.b(), &DMatrix::from_row_slice(2, 1, &[0.0, 1.0]));

        let p = OscillatorParams::new(0.0, 1.0).unwrap();
        let m = make_oscillator(&p);
        assert_eq!(m.a(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn physical_triple_maps_to_critical() {
        let p = OscillatorParams::from_physical(1.0, 2.0, 1.0).unwrap();
        assert_eq!(p.zeta(), 1.0);
        assert_eq!(p.omega_n(), 1.0);
        assert_eq!(p.regime(), DampingRegime::CriticallyDamped);
        assert!(p.omega_d().is_none());
        let m = make_oscillator(&p);
        assert_eq!(m.a(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -2.0]));
    }

    #[test]
    fn physical_triple_consistency() {
        let (m, c, k) = (2.5, 0.7, 9.0);
        let p = OscillatorParams::from_physical(m, c, k).unwrap();
        let zeta = c / (2.0 * f64::sqrt(m * k));
        let wn = f64::sqrt(k / m);
        assert!(((p.zeta() - zeta) / zeta).abs() < 1e-12);
        assert!(((p.omega_n() - wn) / wn).abs() < 1e-12);
        let wd = p.omega_d().unwrap();
        assert!(wd > 0.0 && wd <= p.omega_n());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(
            OscillatorParams::new(-0.1, 1.0),
            Err(Error::InvalidParameter { name: "zeta", .. })
        ));
        assert!(matches!(
            OscillatorParams::new(0.1, 0.0),
            Err(Error::InvalidParameter { name: "omega_n", .. })
        ));
        assert!(matches!(OscillatorParams::new(f64::NAN, 1.0), Err(Error::NonFinite("zeta"))));
        assert!(matches!(
            OscillatorParams::new(0.5, f64::INFINITY),
            Err(Error::NonFinite("omega_n"))
        ));
        assert!(OscillatorParams::from_physical(0.0, 1.0, 1.0).is_err());
        assert!(OscillatorParams::from_physical(1.0, -1.0, 1.0).is_err());
        assert!(OscillatorParams::from_physical(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(0.0).unwrap(), DampingRegime::Undamped);
        assert_eq!(classify_regime(0.5).unwrap(), DampingRegime::Underdamped);
        assert_eq!(classify_regime(1.0).unwrap(), DampingRegime::CriticallyDamped);
        assert_eq!(classify_regime(2.0).unwrap(), DampingRegime::Overdamped);
        assert_eq!(classify_regime(1.0 + 5e-10).unwrap(), DampingRegime::CriticallyDamped);
        assert_eq!(classify_regime(1.0 - 5e-10).unwrap(), DampingRegime::CriticallyDamped);
        assert_eq!(classify_regime(1.0 - 2e-9).unwrap(), DampingRegime::Underdamped);
        assert_eq!(classify_regime(1.0 + 2e-9).unwrap(), DampingRegime::Overdamped);
        assert!(classify_regime(-1e-300).is_err());
        assert!(classify_regime(f64::NAN).is_err());
    }

    #[test]
    fn model_validation() {
        let a = DMatrix::<f64>::zeros(2, 3);
        let b = DMatrix::<f64>::zeros(2, 1);
        assert!(matches!(StateSpaceModel::new(a, b), Err(Error::DimensionMismatch(_))));
        let a = DMatrix::<f64>::zeros(2, 2);
        let b = DMatrix::<f64>::zeros(3, 1);
        assert!(matches!(StateSpaceModel::new(a, b), Err(Error::DimensionMismatch(_))));
        let mut a = DMatrix::<f64>::zeros(2, 2);
        a[(0, 1)] = f64::NAN;
        let b = DMatrix::<f64>::zeros(2, 1);
        assert!(matches!(StateSpaceModel::new(a, b), Err(Error::NonFinite("A"))));
    }

    #[test]
    fn rank_cases() {
        for (z, w) in [(0.0, 1.0), (0.5, 2.0), (1.0, 0.3), (4.0, 7.0)] {
            let m = make_oscillator(&OscillatorParams::new(z, w).unwrap());
            assert_eq!(controllability_rank(&m), 2);
        }
        let zero_b = StateSpaceModel::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -1.0]),
            DMatrix::zeros(2, 1),
        )
        .unwrap();
        assert_eq!(controllability_rank(&zero_b), 0);
        let decoupled = StateSpaceModel::new(
            DMatrix::zeros(2, 2),
            DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(controllability_rank(&decoupled), 1);
    }
}
