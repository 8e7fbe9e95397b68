//! Forward problem: spectra of `J` and `J(θ)`, paired by the signed-index
//! convention, with the identities that link them checked numerically.

use alloc::vec::Vec;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{c, cabs, Real};
use crate::summation::{compensated_sum, ComplexProduct, PositiveProduct};
use crate::tridiag::{self, check_pole_distance, EigenDecomposition};
use crate::types::{default_zero_tolerance, pair_spectra, enumerate_spectrum, JacobiMatrix, Shift, SpectrumPair, Theta};

/// Relative tolerance applied to the identity checks unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// One numerical identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            residual,
            tolerance,
        }
    }

    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// `θ = 1`: both spectra coincide.
    Degenerate,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Degenerate => "DEGENERATE",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DirectOptions<T> {
    /// Eigenvalues this close to zero are treated as zero. Defaults to
    /// `1e−10·max(1, ‖J‖)`.
    pub zero_tolerance: Option<T>,
    pub tolerance: f64,
}

impl<T> Default for DirectOptions<T> {
    fn default() -> Self {
        Self {
            zero_tolerance: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Output of [`spectra_pair`].
#[derive(Clone, Debug)]
pub struct DirectReport<T = f64> {
    pub pair: SpectrumPair<T>,
    pub theta: Theta<T>,
    /// Normalizing constants of `J(θ)`, aligned with `pair.mus()`.
    pub alpha: Vec<T>,
    pub diagnostics: Vec<Check>,
    pub status: Status,
}

/// Spectra of `j` and `j(θ)` with default options.
pub fn spectra_pair<T: Real>(j: &JacobiMatrix<T>, theta: &Theta<T>) -> Result<DirectReport<T>> {
    spectra_pair_with(j, theta, &DirectOptions::default())
}

pub fn spectra_pair_with<T: Real>(
    j: &JacobiMatrix<T>,
    theta: &Theta<T>,
    options: &DirectOptions<T>,
) -> Result<DirectReport<T>> {
    let perturbed = j.apply_theta(theta);
    let eig = tridiag::eigen(j)?;
    let eig_theta = tridiag::eigen(&perturbed)?;
    let zero_tol = options
        .zero_tolerance
        .clone()
        .unwrap_or_else(|| default_zero_tolerance(&j.norm_bound().max_of(perturbed.norm_bound())));
    let lams = enumerate_spectrum(&eig.eigenvalues, &zero_tol)?;
    let pair = pair_spectra(&lams, &eig_theta.eigenvalues, &zero_tol)?;

    let diagnostics = identity_checks(j, theta, &pair, &eig, options.tolerance)?;
    let status = if theta.is_one() {
        Status::Degenerate
    } else if diagnostics.iter().all(Check::passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(DirectReport {
        alpha: eig_theta.normalizing_constants(),
        pair,
        theta: theta.clone(),
        diagnostics,
        status,
    })
}

fn identity_checks<T: Real>(
    j: &JacobiMatrix<T>,
    theta: &Theta<T>,
    pair: &SpectrumPair<T>,
    eig: &EigenDecomposition<T>,
    tolerance: f64,
) -> Result<Vec<Check>> {
    let theta_sq = theta.squared();
    let expected_shift = if theta.is_one() {
        Shift::Degenerate
    } else if theta.get() > T::one() {
        Shift::RightPos
    } else {
        Shift::LeftPos
    };
    let mut checks = alloc::vec![Check::new(
        "shift_direction",
        if pair.shift() == expected_shift { 0.0 } else { 1.0 },
        0.0,
    )];

    let q1 = j.q1().clone();
    let lhs = compensated_sum(pair.iter().map(|(_, l, m)| m.clone() - l.clone()));
    let rhs = q1.clone() * (theta_sq.clone() - T::one());
    let scale = T::one() + q1.abs() * theta_sq.clone().max_of(T::one());
    checks.push(Check::new(
        "trace_shift",
        ((lhs - rhs).abs() / scale).to_f64(),
        tolerance,
    ));

    if !pair.has_zero() {
        // det J(θ) = θ² det J, so the eigenvalue ratios multiply to θ².
        let mut product = PositiveProduct::new();
        let mut sensitivity = T::zero();
        let norm = j.norm_bound().max_of(T::one());
        for (_, l, m) in pair.iter() {
            product.mul(m.clone() / l.clone());
            sensitivity += norm.clone() / l.abs() + norm.clone() / m.abs();
        }
        let residual = match product.ln() {
            Some(log) => (log - theta_sq.ln()).abs().to_f64(),
            None => f64::INFINITY,
        };
        let n = T::from_usize(j.dim());
        let roundoff = (c::<T>(64.0) * n * T::epsilon() * sensitivity).to_f64();
        checks.push(Check::new("determinant_ratio", residual, tolerance + roundoff));
    }

    let height = j.norm_bound().max_of(T::one());
    let zeta = Complex::new(c::<T>(0.25) * height.clone(), height);
    let product = mgoth_eval(pair, &zeta)?;
    let via_m = mgoth_from_eigen(eig, theta, &zeta)?;
    let rel = cabs(&(product - via_m.clone())) / cabs(&via_m);
    checks.push(Check::new("mgoth_two_forms", rel.to_f64(), tolerance));
    Ok(checks)
}

/// `dλ_k/dθ = 2λ_k(θ)/(θ α_k(θ))` at the eigenvalue of `J(θ)` with signed index `k`.
pub fn eigenvalue_derivative<T: Real>(j: &JacobiMatrix<T>, theta: &Theta<T>, k: i64) -> Result<T> {
    let perturbed = j.apply_theta(theta);
    let eig = tridiag::eigen(&perturbed)?;
    let spectrum = enumerate_spectrum(&eig.eigenvalues, &default_zero_tolerance(&perturbed.norm_bound()))?;
    let lambda = spectrum.get(k).ok_or(Error::IndexNotFound(k))?.clone();
    if lambda.is_zero() {
        return Ok(T::zero());
    }
    let alpha = tridiag::normalizing_constants_at(&perturbed, core::slice::from_ref(&lambda))?
        .pop()
        .expect("one point in, one constant out");
    Ok(c::<T>(2.0) * lambda / (theta.get() * alpha))
}

/// `(Σ_k (μ_k − λ_k), q₁(θ₂² − θ₁²))` for the spectra of `J(θ₁)` and `J(θ₂)`.
pub fn trace_shift<T: Real>(j: &JacobiMatrix<T>, theta1: &Theta<T>, theta2: &Theta<T>) -> Result<(T, T)> {
    if theta1.get() > theta2.get() {
        return Err(Error::InvalidTheta(theta1.get().to_f64()));
    }
    let first = j.apply_theta(theta1);
    let second = j.apply_theta(theta2);
    let zero_tol = default_zero_tolerance(&first.norm_bound().max_of(second.norm_bound()));
    let lams = enumerate_spectrum(&tridiag::eigenvalues(&first)?, &zero_tol)?;
    let pair = pair_spectra(&lams, &tridiag::eigenvalues(&second)?, &zero_tol)?;
    let lhs = compensated_sum(pair.iter().map(|(_, l, m)| m.clone() - l.clone()));
    let rhs = j.q1().clone() * (theta2.squared() - theta1.squared());
    Ok((lhs, rhs))
}

/// `𝔪(ζ) = Π_k (ζ − μ_k)/(ζ − λ_k)`, accumulated in log-modulus/phase form.
pub fn mgoth_eval<T: Real>(pair: &SpectrumPair<T>, z: &Complex<T>) -> Result<Complex<T>> {
    check_pole_distance(pair.lambdas().values(), z)?;
    check_pole_distance(pair.mus().values(), z)?;
    let mut product = ComplexProduct::new();
    for (_, l, m) in pair.iter() {
        let num = z.clone() - Complex::new(m.clone(), T::zero());
        let den = z.clone() - Complex::new(l.clone(), T::zero());
        product.mul(num / den);
    }
    Ok(product.value())
}

/// `𝔪(ζ) = ζ(θ² − 1) m(ζ) + θ²` through the Weyl function of `j`.
pub fn mgoth_via_m<T: Real>(j: &JacobiMatrix<T>, theta: &Theta<T>, z: &Complex<T>) -> Result<Complex<T>> {
    mgoth_from_eigen(&tridiag::eigen(j)?, theta, z)
}

fn mgoth_from_eigen<T: Real>(
    eig: &EigenDecomposition<T>,
    theta: &Theta<T>,
    z: &Complex<T>,
) -> Result<Complex<T>> {
    let m = tridiag::weyl_m_from(eig, z)?;
    let theta_sq = theta.squared();
    Ok(z.clone() * m.scale(theta_sq.clone() - T::one()) + Complex::new(theta_sq, T::zero()))
}
