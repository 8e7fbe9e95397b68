//! Gates deciding whether two candidate spectra come from some `J` and `J(θ)`.
//!
//! The chain is: interlacing, the gap sum, positivity of the candidate
//! weights, positive definiteness of the moment Hankel matrices, and
//! nonsingularity of the moment Gram matrix. At finite size the gap sum and
//! the moments are always finite, so those gates report diagnostics instead
//! of failing.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::inverse::{self, ZeroCaseHint};
use crate::real::{c, Real};
use crate::summation::CompensatedSum;
use crate::types::{Shift, SpectralMeasure, SpectrumPair, Theta};

/// Interlacing pattern check. The error names the first violation.
pub fn check_interlacing<T: Real>(lams: &[T], mus: &[T], zero_tolerance: &T) -> Result<SpectrumPair<T>> {
    SpectrumPair::from_values(lams, mus, zero_tolerance)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumReport<T = f64> {
    /// `Σ (μ_k − λ_k)`.
    pub sum: T,
    pub finite: bool,
    /// Partial sums with the terms taken in order of increasing `|λ_k|`.
    pub partial_sums: Vec<f64>,
    /// Share of `Σ |μ_k − λ_k|` carried by the quarter of terms with largest `|λ_k|`.
    pub tail_fraction: f64,
}

pub fn check_sum<T: Real>(pair: &SpectrumPair<T>) -> SumReport<T> {
    let mut terms: Vec<(T, T)> = pair
        .iter()
        .map(|(_, l, m)| (l.abs(), m.clone() - l.clone()))
        .collect();
    terms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut sum = CompensatedSum::new();
    let mut abs_total = CompensatedSum::new();
    let mut tail = CompensatedSum::new();
    let tail_start = terms.len() - terms.len().div_ceil(4);
    let mut partial_sums = Vec::with_capacity(terms.len());
    for (i, (_, d)) in terms.into_iter().enumerate() {
        abs_total.add(d.abs());
        if i >= tail_start {
            tail.add(d.abs());
        }
        sum.add(d);
        partial_sums.push(sum.value().to_f64());
    }
    let total = abs_total.value();
    let tail_fraction = if total.is_zero() {
        0.0
    } else {
        (tail.value() / total).to_f64()
    };
    let sum = sum.value();
    SumReport {
        finite: sum.is_finite(),
        sum,
        partial_sums,
        tail_fraction,
    }
}

/// Candidate weights `τ_k` computed from the explicit formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct TauReport<T = f64> {
    pub theta_sq: T,
    /// In index order of the pair.
    pub weights: Vec<T>,
    /// Signed index of the first weight that is not positive.
    pub first_nonpositive: Option<i64>,
    pub sum: T,
}

impl<T: Real> TauReport<T> {
    pub fn positive(&self) -> bool {
        self.first_nonpositive.is_none()
    }
}

/// Builds the candidate weights. Without zero in the spectra `θ` comes from
/// the ratio product; with zero it comes from the hint, unchecked against
/// the bound, so a bad `θ` surfaces as a non-positive weight.
pub fn build_tau<T: Real>(pair: &SpectrumPair<T>, hint: Option<&ZeroCaseHint<T>>) -> Result<TauReport<T>> {
    let theta = if pair.has_zero() {
        Theta::from_squared(inverse::zero_case_theta_sq(pair, hint)?)?
    } else {
        inverse::recover_theta(pair)?
    };
    let weights = inverse::raw_weights(pair, &theta)?;
    let first_nonpositive = pair
        .lambdas()
        .indices()
        .zip(&weights)
        .find(|(_, w)| !(w.is_finite() && w.is_positive()))
        .map(|(k, _)| k);
    let mut sum = CompensatedSum::new();
    sum.extend(weights.iter().cloned());
    Ok(TauReport {
        theta_sq: theta.squared(),
        weights,
        first_nonpositive,
        sum: sum.value(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HankelReport {
    /// Largest `n` whose Hankel matrix `[s_{i+j}]_{i,j≤n}` was tested.
    pub max_order: usize,
    /// Sign of `det H_n` for `n = 0..=max_order`.
    pub signs: Vec<i8>,
    /// `log₁₀ det H_n`, NaN where the determinant is not positive.
    pub log10_det: Vec<f64>,
    /// `log₁₀` of the ratio of `det H_n` to `det [s_{i+j+4}]_{i,j≤n−2}`, for `n ≥ 2`.
    pub log10_dprime_ratio: Vec<f64>,
    /// First `n` whose pivot fails the positivity threshold.
    pub first_failure: Option<usize>,
    /// `log₁₀` of the smallest eigenvalue of `H_{max_order}` (the Gram matrix of
    /// `1, t, …, t^{max_order}`), when it is positive definite.
    pub log10_min_gram_eigenvalue: Option<f64>,
}

impl HankelReport {
    pub fn positive_definite(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Unpivoted LDLᵀ of a symmetric matrix stored row-major; unpivoted so that
/// the leading pivots give the leading principal minors.
struct Ldl<T> {
    n: usize,
    lower: Vec<T>,
    pivots: Vec<T>,
}

impl<T: Real> Ldl<T> {
    fn factor(a: &[T], n: usize) -> Self {
        let mut lower = vec![T::zero(); n * n];
        let mut pivots: Vec<T> = Vec::with_capacity(n);
        for j in 0..n {
            let mut d = a[j * n + j].clone();
            for k in 0..j {
                let l = lower[j * n + k].clone();
                d -= l.clone() * l * pivots[k].clone();
            }
            lower[j * n + j] = T::one();
            for i in j + 1..n {
                let mut v = a[i * n + j].clone();
                for k in 0..j {
                    v -= lower[i * n + k].clone() * lower[j * n + k].clone() * pivots[k].clone();
                }
                lower[i * n + j] = if d.is_zero() { T::zero() } else { v / d.clone() };
            }
            pivots.push(d);
        }
        Self { n, lower, pivots }
    }

    fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = self.lower[i * n + k].clone() * y[k].clone();
                y[i] -= t;
            }
        }
        for (yi, d) in y.iter_mut().zip(&self.pivots) {
            *yi /= d.clone();
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.lower[k * n + i].clone() * y[k].clone();
                y[i] -= t;
            }
        }
        y
    }

    /// Smallest eigenvalue by inverse iteration.
    fn min_eigenvalue(&self) -> T {
        let n = self.n;
        let mut x: Vec<T> = (0..n).map(|i| T::one() + c::<T>(0.01) * T::from_usize(i)).collect();
        let mut estimate = T::zero();
        for _ in 0..60 {
            let norm = norm2(&x);
            x.iter_mut().for_each(|v| *v /= norm.clone());
            let y = self.solve(&x);
            estimate = T::one() / norm2(&y);
            x = y;
        }
        estimate
    }
}

fn norm2<T: Real>(x: &[T]) -> T {
    let mut s = CompensatedSum::new();
    s.extend(x.iter().map(|v| v.clone() * v.clone()));
    s.value().sqrt()
}

fn hankel<T: Real>(moments: &[T], offset: usize, n: usize) -> Vec<T> {
    let mut h = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            h.push(moments[offset + i + j].clone());
        }
    }
    h
}

fn log10<T: Real>(x: &T) -> f64 {
    if x.is_positive() {
        (x.ln() / c::<T>(core::f64::consts::LN_10)).to_f64()
    } else {
        f64::NAN
    }
}

/// Moments of the candidate measure and positive definiteness of the Hankel
/// matrices `H_0, …, H_{max_order}`. Pivots at or below
/// `16·(max_order+1)·ε·trace(H)` count as failures.
pub fn check_moments_and_hamburger<T: Real>(
    points: &[T],
    weights: &[T],
    max_order: usize,
) -> Result<HankelReport> {
    let size = max_order + 1;
    let moments = inverse::weighted_moments(points, weights, 2 * max_order + 1);
    if let Some(bad) = moments.iter().position(|s| !s.is_finite()) {
        return Err(Error::Overflow {
            safe_order: (bad / 2).saturating_sub(1),
        });
    }
    let h = hankel(&moments, 0, size);
    let trace = (0..size).fold(T::zero(), |acc, i| acc + h[i * size + i].abs());
    let threshold = c::<T>(16.0) * T::from_usize(size) * T::epsilon() * trace;
    let ldl = Ldl::factor(&h, size);

    let mut signs = Vec::with_capacity(size);
    let mut log10_det = Vec::with_capacity(size);
    let mut first_failure = None;
    let mut sign = 1i8;
    let mut log_det = CompensatedSum::new();
    for (n, d) in ldl.pivots.iter().enumerate() {
        if !(*d > threshold) && first_failure.is_none() {
            first_failure = Some(n);
        }
        if d.is_negative() {
            sign = -sign;
        } else if d.is_zero() {
            sign = 0;
        }
        log_det.add(d.abs().ln());
        signs.push(sign);
        log10_det.push(if sign > 0 && first_failure.is_none() {
            (log_det.value() / c::<T>(core::f64::consts::LN_10)).to_f64()
        } else {
            f64::NAN
        });
    }

    let mut log10_dprime_ratio = Vec::new();
    if max_order >= 2 {
        let shifted = Ldl::factor(&hankel(&moments, 4, max_order - 1), max_order - 1);
        let mut log_den = 0.0;
        for (pivot, det) in shifted.pivots.iter().zip(&log10_det[2..]) {
            log_den += log10(pivot);
            log10_dprime_ratio.push(det - log_den);
        }
    }

    let log10_min_gram_eigenvalue = if first_failure.is_none() {
        Some(log10(&ldl.min_eigenvalue()))
    } else {
        None
    };
    Ok(HankelReport {
        max_order,
        signs,
        log10_det,
        log10_dprime_ratio,
        first_failure,
        log10_min_gram_eigenvalue,
    })
}

/// Gate that rejected a candidate pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    ConditionA,
    Theta,
    Positivity,
    Normalization,
    MomentOverflow,
    Hankel,
    GramSingular,
}

impl Gate {
    pub fn name(self) -> &'static str {
        match self {
            Gate::ConditionA => "condition_a",
            Gate::Theta => "theta",
            Gate::Positivity => "positivity",
            Gate::Normalization => "normalization",
            Gate::MomentOverflow => "condition_c",
            Gate::Hankel => "hamburger",
            Gate::GramSingular => "condition_d_surrogate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Admissible,
    Rejected(Gate),
}

impl Verdict {
    pub fn is_admissible(self) -> bool {
        self == Verdict::Admissible
    }
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport<T = f64> {
    /// Detected shift, or the pairing error.
    pub condition_a: core::result::Result<Shift, Error>,
    pub condition_b: Option<SumReport<T>>,
    pub tau: Option<TauReport<T>>,
    /// Error raised while determining `θ`, if any.
    pub theta_error: Option<Error>,
    /// Largest moment order tested, and whether moments overflowed.
    pub condition_c: Option<(usize, bool)>,
    pub hamburger: Option<HankelReport>,
    pub verdict: Verdict,
}

impl<T: Real> AdmissibilityReport<T> {
    fn rejected(mut self, gate: Gate) -> Self {
        self.verdict = Verdict::Rejected(gate);
        self
    }

    /// The candidate spectral measure, when every gate passed.
    pub fn measure(&self, pair: &SpectrumPair<T>) -> Option<SpectralMeasure<T>> {
        let tau = self.tau.as_ref()?;
        if !self.verdict.is_admissible() {
            return None;
        }
        SpectralMeasure::new(pair.lambdas().values().to_vec(), tau.weights.clone()).ok()
    }
}

/// Runs the full gate chain on two raw spectra.
pub fn admissible<T: Real>(
    lams: &[T],
    mus: &[T],
    hint: Option<&ZeroCaseHint<T>>,
    zero_tolerance: &T,
) -> AdmissibilityReport<T> {
    let mut report = AdmissibilityReport {
        condition_a: Err(Error::EmptyResult),
        condition_b: None,
        tau: None,
        theta_error: None,
        condition_c: None,
        hamburger: None,
        verdict: Verdict::Admissible,
    };
    let pair = match check_interlacing(lams, mus, zero_tolerance) {
        Ok(p) if p.shift() != Shift::Degenerate => p,
        Ok(_) => {
            report.condition_a = Err(Error::ThetaIsOne);
            return report.rejected(Gate::ConditionA);
        }
        Err(e) => {
            report.condition_a = Err(e);
            return report.rejected(Gate::ConditionA);
        }
    };
    report.condition_a = Ok(pair.shift());
    report.condition_b = Some(check_sum(&pair));

    let tau = match build_tau(&pair, hint) {
        Ok(t) => t,
        Err(e) => {
            report.theta_error = Some(e);
            return report.rejected(Gate::Theta);
        }
    };
    let positive = tau.positive();
    let normalized = (tau.sum.clone() - T::one()).abs() <= c(SpectralMeasure::<T>::NORMALIZATION_TOLERANCE);
    let weights = tau.weights.clone();
    report.tau = Some(tau);
    if !positive {
        return report.rejected(Gate::Positivity);
    }
    if !normalized {
        return report.rejected(Gate::Normalization);
    }

    let max_order = lams.len() - 1;
    match check_moments_and_hamburger(pair.lambdas().values(), &weights, max_order) {
        Ok(h) => {
            report.condition_c = Some((max_order, false));
            let pd = h.positive_definite();
            let gram_ok = h.log10_min_gram_eigenvalue.is_some_and(|v| v.is_finite());
            report.hamburger = Some(h);
            if !pd {
                return report.rejected(Gate::Hankel);
            }
            if !gram_ok {
                return report.rejected(Gate::GramSingular);
            }
        }
        Err(Error::Overflow { safe_order }) => {
            report.condition_c = Some((safe_order, true));
            return report.rejected(Gate::MomentOverflow);
        }
        Err(e) => {
            report.theta_error = Some(e);
            return report.rejected(Gate::MomentOverflow);
        }
    }
    report
}
