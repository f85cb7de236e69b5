//! Controllability Gramians: finite horizon, infinite horizon through the
//! Lyapunov equation, and the oscillator closed forms.

use nalgebra::{DMatrix, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::expm::{matrix_exponential, scaling_and_squaring, SCALED_NORM_BOUND};
use crate::lti::{OscillatorParams, StateSpaceModel};
use crate::quadrature::{adaptive_simpson, DEFAULT_ABS_TOL};
use crate::scalar::Scalar;

/// Eigenvalue real parts must lie below `-HURWITZ_MARGIN`.
pub const HURWITZ_MARGIN: f64 = 1e-12;

/// `lambda_min <= UNCONTROLLABLE_RATIO * lambda_max` marks a numerically
/// uncontrollable direction.
pub const UNCONTROLLABLE_RATIO: f64 = 1e-14;

/// Time horizon a Gramian refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon<T> {
    Finite(T),
    Infinite,
    /// The undamped oscillator value `diag(1/omega_n^2, 1)`. The defining
    /// integral diverges for this case; the value is a convention, not a limit.
    AdoptedUndamped,
}

impl<T> Horizon<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Horizon::Finite(_) => "finite",
            Horizon::Infinite => "infinite",
            Horizon::AdoptedUndamped => "paper_adopted_undamped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramianMethod {
    ClosedForm,
    Lyapunov,
    AugmentedExpm,
    Quadrature,
}

impl GramianMethod {
    pub fn label(self) -> &'static str {
        match self {
            GramianMethod::ClosedForm => "closed_form",
            GramianMethod::Lyapunov => "lyapunov",
            GramianMethod::AugmentedExpm => "augmented_expm",
            GramianMethod::Quadrature => "quadrature",
        }
    }
}

/// Evaluation route for [`finite_horizon_gramian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteHorizonMethod {
    AugmentedExpm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramianResult<T: Scalar> {
    w: DMatrix<T>,
    horizon: Horizon<T>,
    method: GramianMethod,
    residual: Option<T>,
}

impl<T: Scalar> GramianResult<T> {
    /// Wraps a Gramian, replacing it with its symmetric part.
    pub fn new(
        w: DMatrix<T>,
        horizon: Horizon<T>,
        method: GramianMethod,
        residual: Option<T>,
    ) -> Result<Self> {
        if w.nrows() != w.ncols() || w.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "Gramian must be square, got {}x{}",
                w.nrows(),
                w.ncols()
            )));
        }
        if !w.iter().all(|x| x.finite()) {
            return Err(Error::NonFinite("W"));
        }
        let w = (&w + w.transpose()) * T::lit(0.5);
        Ok(Self {
            w,
            horizon,
            method,
            residual,
        })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.w
    }

    pub fn horizon(&self) -> Horizon<T> {
        self.horizon
    }

    pub fn method(&self) -> GramianMethod {
        self.method
    }

    /// Frobenius norm of `A W + W A^T + B B^T` for Lyapunov-path results.
    pub fn residual(&self) -> Option<T> {
        self.residual
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }
}

/// `W_T = int_0^T e^{A t} B B^T e^{A^T t} dt`.
pub fn finite_horizon_gramian<T: Scalar>(
    model: &StateSpaceModel<T>,
    horizon: T,
    method: FiniteHorizonMethod,
) -> Result<GramianResult<T>> {
    if !horizon.finite() {
        return Err(Error::NonFinite("T"));
    }
    if horizon < T::zero() {
        return Err(Error::param("T", format!("horizon must be >= 0 (got {horizon})")));
    }
    match method {
        FiniteHorizonMethod::AugmentedExpm => augmented_expm_gramian(model, horizon),
        FiniteHorizonMethod::Quadrature => quadrature_gramian(model, horizon, T::lit(DEFAULT_ABS_TOL)),
    }
}

/// Van Loan block exponential: with `M = [[-A, B B^T], [0, A^T]]` and
/// `e^{M h} = [[., F12], [0, F22]]`, `W_h = F22^T F12` and `e^{A h} = F22^T`.
///
/// The block exponential is only taken over `h = T / 2^s`, small enough that
/// `|M h|_1 <= 1/2`. A single exponential over the whole horizon multiplies
/// a growing block by a decaying one and loses all accuracy once the
/// eigenvalues of `A` are spread. The horizon is then rebuilt by doubling:
/// `W_2h = W_h + e^{A h} W_h e^{A^T h}`.
fn augmented_expm_gramian<T: Scalar>(model: &StateSpaceModel<T>, horizon: T) -> Result<GramianResult<T>> {
    let n = model.n();
    let a = model.a();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(-a));
    m.view_mut((0, n), (n, n)).copy_from(&model.input_gram());
    m.view_mut((n, n), (n, n)).copy_from(&a.transpose());

    let mut doublings = 0i32;
    let mut h = horizon;
    let bound = T::lit(SCALED_NORM_BOUND);
    let norm = m.column_iter().map(|c| c.iter().fold(T::zero(), |s, x| s + x.abs())).fold(T::zero(), T::max);
    while norm * h > bound {
        h /= T::lit(2.0);
        doublings += 1;
    }

    let e = scaling_and_squaring(&m, h)?.value;
    let mut w: DMatrix<T> = e.view((n, n), (n, n)).transpose() * e.view((0, n), (n, n));
    let mut phi: DMatrix<T> = e.view((n, n), (n, n)).transpose();
    for _ in 0..doublings {
        w = &w + &phi * &w * phi.transpose();
        phi = &phi * &phi;
    }
    GramianResult::new(w, Horizon::Finite(horizon), GramianMethod::AugmentedExpm, None)
}

/// Adaptive Simpson on the Gramian integrand with per-entry absolute tolerance `abs_tol`.
pub fn quadrature_gramian<T: Scalar>(
    model: &StateSpaceModel<T>,
    horizon: T,
    abs_tol: T,
) -> Result<GramianResult<T>> {
    let bbt = model.input_gram();
    let integrand = |t: T| -> Result<DMatrix<T>> {
        let e = matrix_exponential(model.a(), t)?;
        Ok(&e * &bbt * e.transpose())
    };
    let q = adaptive_simpson(integrand, T::zero(), horizon, abs_tol)?;
    GramianResult::new(q.value, Horizon::Finite(horizon), GramianMethod::Quadrature, None)
}

/// Largest real part among the eigenvalues of `a`.
pub fn spectral_abscissa<T: Scalar>(a: &DMatrix<T>) -> Result<T> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch("spectral abscissa needs a square matrix".into()));
    }
    let schur = Schur::try_new(a.clone(), T::machine_epsilon(), 10_000)
        .ok_or(Error::SingularSystem("eigenvalue iteration did not converge"))?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(T::lit(f64::NEG_INFINITY), T::max))
}

pub fn is_hurwitz<T: Scalar>(a: &DMatrix<T>) -> Result<bool> {
    Ok(spectral_abscissa(a)? < -T::lit(HURWITZ_MARGIN))
}

/// Solves `A X + X A^T = -Q` through the Kronecker form
/// `(I (x) A + A (x) I) vec(X) = -vec(Q)`.
pub fn solve_lyapunov<T: Scalar>(a: &DMatrix<T>, q: &DMatrix<T>) -> Result<DMatrix<T>> {
    let n = a.nrows();
    if a.ncols() != n || q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch("Lyapunov operands must be n x n".into()));
    }
    let eye = DMatrix::<T>::identity(n, n);
    let k = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = -DMatrix::from_column_slice(n * n, 1, q.as_slice());
    let x = k
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem("Lyapunov operator"))?;
    Ok(DMatrix::from_column_slice(n, n, x.as_slice()))
}

/// `W_inf` as the solution of `A W + W A^T = -B B^T` for Hurwitz `A`.
pub fn infinite_horizon_gramian_lyapunov<T: Scalar>(model: &StateSpaceModel<T>) -> Result<GramianResult<T>> {
    let abscissa = spectral_abscissa(model.a())?;
    if !(abscissa < -T::lit(HURWITZ_MARGIN)) {
        return Err(Error::NonHurwitz {
            max_real_part: abscissa.as_f64(),
        });
    }
    let bbt = model.input_gram();
    let w = solve_lyapunov(model.a(), &bbt)?;
    let w = (&w + w.transpose()) * T::lit(0.5);
    let a = model.a();
    let residual = (a * &w + &w * a.transpose() + &bbt).norm();
    GramianResult::new(w, Horizon::Infinite, GramianMethod::Lyapunov, Some(residual))
}

/// Oscillator Gramian: `diag(1/(4 zeta omega_n^3), 1/(4 zeta omega_n))` for
/// `zeta > 0`, and the adopted `diag(1/omega_n^2, 1)` for `zeta = 0`.
/// Fails with `InvalidParameter` when an entry overflows.
pub fn oscillator_gramian_closed_form<T: Scalar>(params: &OscillatorParams<T>) -> Result<GramianResult<T>> {
    let (z, w) = (params.zeta(), params.omega_n());
    let (w11, w22, horizon) = if z > T::zero() {
        let four_zw = T::lit(4.0) * z * w;
        (T::one() / (four_zw * w * w), T::one() / four_zw, Horizon::Infinite)
    } else {
        (T::one() / (w * w), T::one(), Horizon::AdoptedUndamped)
    };
    if !(w11.finite() && w22.finite()) {
        return Err(Error::param(
            "omega_n",
            format!("Gramian overflows for zeta = {z}, omega_n = {w}"),
        ));
    }
    let m = DMatrix::from_row_slice(2, 2, &[w11, T::zero(), T::zero(), w22]);
    GramianResult::new(m, horizon, GramianMethod::ClosedForm, None)
}

pub fn gramian_determinant<T: Scalar>(g: &GramianResult<T>) -> T {
    g.matrix().determinant()
}

/// Eigen-summary of a Gramian.
#[derive(Debug, Clone, PartialEq)]
pub struct GramianSpectrum<T: Scalar> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Unit eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: DMatrix<T>,
    pub trace: T,
    /// `lambda_max / lambda_min`; infinite when `lambda_min <= 0`.
    pub condition: T,
    /// Set when `lambda_min <= 1e-14 lambda_max`.
    pub uncontrollable_direction: bool,
}

impl<T: Scalar> GramianSpectrum<T> {
    pub fn lambda_min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> T {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

pub fn gramian_spectrum<T: Scalar>(g: &GramianResult<T>) -> GramianSpectrum<T> {
    symmetric_spectrum(g.matrix())
}

pub(crate) fn symmetric_spectrum<T: Scalar>(w: &DMatrix<T>) -> GramianSpectrum<T> {
    let eig = SymmetricEigen::new(w.clone());
    let n = w.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    let lmin = eigenvalues[0];
    let lmax = eigenvalues[n - 1];
    let condition = if lmin > T::zero() {
        lmax / lmin
    } else {
        T::lit(f64::INFINITY)
    };
    GramianSpectrum {
        eigenvalues,
        eigenvectors,
        trace: w.trace(),
        condition,
        uncontrollable_direction: lmin <= T::lit(UNCONTROLLABLE_RATIO) * lmax,
    }
}
