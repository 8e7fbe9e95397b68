//! Inverse problem: from the spectra of `J` and `J(θ)` recover `θ`, the
//! spectral measure of `J`, and `J` itself.

use alloc::vec;
use alloc::vec::Vec;

use crate::direct::Check;
use crate::error::{Error, Result};
use crate::real::{c, Real};
use crate::summation::{compensated_sum, CompensatedSum, PositiveProduct};
use crate::tridiag;
use crate::types::{JacobiMatrix, Shift, SpectralMeasure, SpectrumPair, Theta};

/// Forward-check tolerance unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Extra datum needed when zero is an eigenvalue of both matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroCaseHint<T = f64> {
    /// The first diagonal entry of `J`.
    Q1(T),
    /// The normalizing constant of the zero eigenvalue; must exceed 1.
    Alpha0(T),
    Theta(Theta<T>),
}

#[derive(Clone, Debug)]
pub struct InverseInput<T = f64> {
    pair: SpectrumPair<T>,
    hint: Option<ZeroCaseHint<T>>,
}

impl<T: Real> InverseInput<T> {
    /// A hint is required exactly when the spectra contain zero.
    pub fn new(pair: SpectrumPair<T>, hint: Option<ZeroCaseHint<T>>) -> Result<Self> {
        match (&hint, pair.has_zero()) {
            (None, true) => return Err(Error::HintMissing),
            (Some(_), false) => {
                return Err(Error::UninformativeHint(
                    "the spectra do not contain zero",
                ))
            }
            (Some(ZeroCaseHint::Alpha0(a)), true) if !(a.is_finite() && *a > T::one()) => {
                return Err(Error::UninformativeHint("alpha0 must exceed 1"))
            }
            _ => {}
        }
        Ok(Self { pair, hint })
    }

    pub fn pair(&self) -> &SpectrumPair<T> {
        &self.pair
    }

    pub fn hint(&self) -> Option<&ZeroCaseHint<T>> {
        self.hint.as_ref()
    }
}

#[derive(Clone, Debug)]
pub struct InverseSolution<T = f64> {
    pub matrix: JacobiMatrix<T>,
    pub theta: Theta<T>,
    pub measure: SpectralMeasure<T>,
    /// Forward and cross-check residuals, plus the `1/|θ² − 1|` conditioning figure.
    pub residuals: Vec<Check>,
}

/// `θ² = Π μ_k/λ_k`, valid when zero is not an eigenvalue.
pub fn recover_theta<T: Real>(pair: &SpectrumPair<T>) -> Result<Theta<T>> {
    if pair.has_zero() {
        return Err(Error::ZeroInSpectrum);
    }
    let mut product = PositiveProduct::new();
    for (_, l, m) in pair.iter() {
        product.mul(m.clone() / l.clone());
    }
    let log = product.ln().ok_or(Error::NonPositiveProduct)?;
    Theta::new((log / c::<T>(2.0)).exp())
}

/// `Π′ = Π_{k≠0} μ_k/λ_k` (the full product when zero is absent).
pub fn reduced_ratio_product<T: Real>(pair: &SpectrumPair<T>) -> Result<T> {
    let mut product = PositiveProduct::new();
    for (k, l, m) in pair.iter() {
        if k != 0 {
            product.mul(m.clone() / l.clone());
        }
    }
    product.value().ok_or(Error::NonPositiveProduct)
}

/// Checks `θ² < Π′` for a left shift on ℝ₊ and `θ² > Π′` otherwise.
pub fn check_theta_bound<T: Real>(pair: &SpectrumPair<T>, theta_sq: &T) -> Result<()> {
    let bound = reduced_ratio_product(pair)?;
    let ok = theta_sq.is_finite()
        && theta_sq.is_positive()
        && match pair.shift() {
            Shift::LeftPos => *theta_sq < bound,
            Shift::RightPos => *theta_sq > bound,
            Shift::Degenerate => false,
        };
    if ok {
        Ok(())
    } else {
        Err(Error::BoundViolated {
            theta_sq: theta_sq.to_f64(),
            bound: bound.to_f64(),
        })
    }
}

/// Recovers `θ` when zero is in both spectra, from one auxiliary datum.
pub fn recover_theta_zero_case<T: Real>(
    pair: &SpectrumPair<T>,
    hint: Option<&ZeroCaseHint<T>>,
) -> Result<Theta<T>> {
    let theta_sq = zero_case_theta_sq(pair, hint)?;
    check_theta_bound(pair, &theta_sq)?;
    Theta::from_squared(theta_sq)
}

/// `θ²` implied by the hint, before the bound check.
pub fn zero_case_theta_sq<T: Real>(pair: &SpectrumPair<T>, hint: Option<&ZeroCaseHint<T>>) -> Result<T> {
    Ok(match hint.ok_or(Error::HintMissing)? {
        ZeroCaseHint::Theta(t) => t.squared(),
        ZeroCaseHint::Alpha0(alpha0) => {
            let product = reduced_ratio_product(pair)?;
            (alpha0.clone() * product - T::one()) / (alpha0.clone() - T::one())
        }
        ZeroCaseHint::Q1(q1) => {
            if q1.is_zero() {
                return Err(Error::UninformativeHint("q1 = 0 leaves theta undetermined"));
            }
            // The 1/ζ coefficient of 𝔪 is Σ(λ_k − μ_k) = q₁(1 − θ²).
            let gap = compensated_sum(pair.iter().map(|(_, l, m)| m.clone() - l.clone()));
            T::one() + gap / q1.clone()
        }
    })
}

/// `θ` from the pair and the hint, whichever formula applies.
pub fn recover_any_theta<T: Real>(pair: &SpectrumPair<T>, hint: Option<&ZeroCaseHint<T>>) -> Result<Theta<T>> {
    if pair.has_zero() {
        recover_theta_zero_case(pair, hint)
    } else {
        recover_theta(pair)
    }
}

/// Weights `τ_k` from the explicit formulas, in index order, without any
/// sign or normalization check.
pub fn raw_weights<T: Real>(pair: &SpectrumPair<T>, theta: &Theta<T>) -> Result<Vec<T>> {
    if theta.is_one() || pair.shift() == Shift::Degenerate {
        return Err(Error::ThetaIsOne);
    }
    let theta_sq = theta.squared();
    let denom = theta_sq.clone() - T::one();
    let lams = pair.lambdas().values();
    let mus = pair.mus().values();
    let mut weights = Vec::with_capacity(lams.len());
    for (n, (k, lambda, mu)) in pair.iter().enumerate() {
        if k == 0 {
            let product = reduced_ratio_product(pair)?;
            weights.push((theta_sq.clone() - product) / denom.clone());
            continue;
        }
        let mut w = (mu.clone() - lambda.clone()) / (lambda.clone() * denom.clone());
        for (i, (l, m)) in lams.iter().zip(mus).enumerate() {
            if i != n {
                w *= (m.clone() - lambda.clone()) / (l.clone() - lambda.clone());
            }
        }
        weights.push(w);
    }
    Ok(weights)
}

/// The spectral measure of `J`: atoms at the `λ_k`, weights `τ_k`, checked
/// for positivity and unit mass.
pub fn recover_weights<T: Real>(pair: &SpectrumPair<T>, theta: &Theta<T>) -> Result<SpectralMeasure<T>> {
    let weights = raw_weights(pair, theta)?;
    for ((k, _), w) in pair.lambdas().iter().zip(&weights) {
        if !(w.is_finite() && w.is_positive()) {
            return Err(Error::NonPositiveWeight {
                index: k,
                value: w.to_f64(),
            });
        }
    }
    SpectralMeasure::new(pair.lambdas().values().to_vec(), weights)
}

/// Moments `s_0, …, s_{count−1}` of the measure.
pub fn moments<T: Real>(measure: &SpectralMeasure<T>, count: usize) -> Vec<T> {
    weighted_moments(measure.points(), measure.weights(), count)
}

/// `Σ_k w_k x_kʲ` for `j < count`, for arbitrary (possibly signed) weights.
pub fn weighted_moments<T: Real>(points: &[T], weights: &[T], count: usize) -> Vec<T> {
    let mut sums = vec![CompensatedSum::new(); count];
    for (x, w) in points.iter().zip(weights) {
        let mut term = w.clone();
        for s in sums.iter_mut() {
            s.add(term.clone());
            term *= x.clone();
        }
    }
    sums.iter().map(CompensatedSum::value).collect()
}

/// Recurrence coefficients of the orthonormal polynomials of a discrete
/// measure: Lanczos on `diag(points)` started from `√weights`, with every
/// new vector orthogonalized against all previous ones.
pub fn reconstruct_jacobi<T: Real>(measure: &SpectralMeasure<T>) -> Result<JacobiMatrix<T>> {
    let n = measure.len();
    let points = measure.points();
    let breakdown = c::<T>(1e-12) * measure.diameter();
    let start: Vec<T> = measure.weights().iter().map(|w| w.sqrt()).collect();
    let norm = dot(&start, &start).sqrt();
    let mut basis: Vec<Vec<T>> = vec![start.into_iter().map(|x| x / norm.clone()).collect()];
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));

    for k in 0..n {
        let v = &basis[k];
        let mut w: Vec<T> = points.iter().zip(v).map(|(x, y)| x.clone() * y.clone()).collect();
        diag.push(dot(&w, v));
        if k + 1 == n {
            break;
        }
        for u in &basis {
            let h = dot(&w, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= h.clone() * ui.clone();
            }
        }
        let b = dot(&w, &w).sqrt();
        if !(b > breakdown) {
            return Err(Error::BreakdownAtStep {
                step: k + 1,
                value: b.to_f64(),
            });
        }
        basis.push(w.into_iter().map(|x| x / b.clone()).collect());
        off.push(b);
    }
    JacobiMatrix::new(diag, off)
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.clone() * y.clone();
    }
    acc
}

/// Largest per-eigenvalue error `|computed − expected| / max(1, |expected|)`.
fn spectrum_residual<T: Real>(computed: &[T], expected: &[T]) -> T {
    computed
        .iter()
        .zip(expected)
        .map(|(a, b)| (a.clone() - b.clone()).abs() / b.abs().max_of(T::one()))
        .fold(T::zero(), T::max_of)
}

pub fn solve<T: Real>(input: &InverseInput<T>) -> Result<InverseSolution<T>> {
    solve_with(input, DEFAULT_TOLERANCE)
}

/// Full pipeline with an explicit forward-check tolerance.
pub fn solve_with<T: Real>(input: &InverseInput<T>, tolerance: f64) -> Result<InverseSolution<T>> {
    let pair = &input.pair;
    let theta = recover_any_theta(pair, input.hint())?;
    let measure = recover_weights(pair, &theta)?;
    let matrix = reconstruct_jacobi(&measure)?;

    let lams = tridiag::eigenvalues(&matrix)?;
    let mus = tridiag::eigenvalues(&matrix.apply_theta(&theta))?;
    let forward = spectrum_residual(&lams, pair.lambdas().values())
        .max_of(spectrum_residual(&mus, pair.mus().values()))
        .to_f64();
    if !(forward <= tolerance) {
        return Err(Error::ForwardCheckFailure { residual: forward });
    }

    let s = moments(&measure, 3);
    let q1 = matrix.q1().clone();
    let b1_sq = matrix
        .off()
        .first()
        .map_or_else(T::zero, |b| b.clone() * b.clone());
    let scale = matrix.norm_bound().max_of(T::one());
    let q1_residual = ((q1 - s[1].clone()).abs() / scale.clone()).to_f64();
    let variance = s[2].clone() - s[1].clone() * s[1].clone();
    let b1_residual = ((b1_sq - variance).abs() / (scale.clone() * scale)).to_f64();
    let residuals = vec![
        Check::new("forward_spectra", forward, tolerance),
        Check::new("q1_moment", q1_residual, tolerance),
        Check::new("b1_moment", b1_residual, tolerance),
        Check::new(
            "theta_condition",
            (T::one() / (theta.squared() - T::one()).abs()).to_f64(),
            f64::INFINITY,
        ),
    ];
    if let Some(bad) = residuals.iter().find(|r| !r.passed()) {
        return Err(Error::IdentityCheck {
            name: bad.name,
            residual: bad.residual,
        });
    }
    Ok(InverseSolution {
        matrix,
        theta,
        measure,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::direct::spectra_pair;

    fn jm(q: &[f64], b: &[f64]) -> JacobiMatrix {
        JacobiMatrix::from_f64(q, b).unwrap()
    }

    fn th(x: f64) -> Theta {
        Theta::new(x).unwrap()
    }

    fn pair(l: &[f64], m: &[f64]) -> SpectrumPair {
        SpectrumPair::from_values(l, m, &1e-12).unwrap()
    }

    fn measure(points: &[f64], weights: &[f64]) -> SpectralMeasure {
        SpectralMeasure::new(points.to_vec(), weights.to_vec()).unwrap()
    }

    #[test]
    fn theta_from_products() {
        assert_relative_eq!(recover_theta(&pair(&[-1.0, 1.0], &[-1.0, 1.0])).unwrap().get(), 1.0);
        assert_relative_eq!(recover_theta(&pair(&[-1.0, 1.0], &[-2.0, 2.0])).unwrap().get(), 2.0, epsilon = 1e-15);
        let t = recover_theta(&pair(&[1.0, 3.0], &[2.0, 4.0])).unwrap();
        assert_relative_eq!(t.squared(), 8.0 / 3.0, epsilon = 1e-14);
        assert_eq!(recover_theta(&pair(&[0.0, 2.0], &[0.0, 3.0])), Err(Error::ZeroInSpectrum));
    }

    #[test]
    fn theta_from_products_reproduces_the_pair() {
        // Brute-force oracle: the 2×2 matrix with the recovered data has spectrum {2, 4} after perturbation.
        let p = pair(&[1.0, 3.0], &[2.0, 4.0]);
        let sol = solve(&InverseInput::new(p, None).unwrap()).unwrap();
        let mus = tridiag::eigen(&sol.matrix.apply_theta(&sol.theta)).unwrap().eigenvalues;
        assert_relative_eq!(mus[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(mus[1], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_case_with_each_hint() {
        let j = jm(&[1.0, 1.0], &[1.0]);
        let r = spectra_pair(&j, &th(2.0)).unwrap();
        let p = r.pair;
        let from_q1 = recover_theta_zero_case(&p, Some(&ZeroCaseHint::Q1(1.0))).unwrap();
        assert_relative_eq!(from_q1.squared(), 4.0, epsilon = 1e-12);

        let alpha0 = tridiag::eigen(&j).unwrap().normalizing_constants()[0];
        let from_alpha = recover_theta_zero_case(&p, Some(&ZeroCaseHint::Alpha0(alpha0))).unwrap();
        assert_relative_eq!(from_alpha.squared(), 4.0, epsilon = 1e-12);

        let pass = recover_theta_zero_case(&p, Some(&ZeroCaseHint::Theta(th(2.0)))).unwrap();
        assert_eq!(pass.get(), 2.0);

        assert_eq!(recover_theta_zero_case(&p, None), Err(Error::HintMissing));
        assert!(matches!(
            recover_theta_zero_case(&p, Some(&ZeroCaseHint::Alpha0(1.0))),
            Err(Error::BoundViolated { .. })
        ));
        // θ² between 1 and Π′ is on the wrong side for a right shift.
        let bound = reduced_ratio_product(&p).unwrap();
        let wrong = Theta::from_squared(0.5 * (1.0 + bound)).unwrap();
        assert!(matches!(
            recover_theta_zero_case(&p, Some(&ZeroCaseHint::Theta(wrong))),
            Err(Error::BoundViolated { .. })
        ));
    }

    #[test]
    fn input_validates_hints() {
        let zero = pair(&[0.0, 2.0], &[0.0, 3.0]);
        assert_eq!(InverseInput::new(zero.clone(), None).unwrap_err(), Error::HintMissing);
        assert!(InverseInput::new(zero, Some(ZeroCaseHint::Alpha0(0.5))).is_err());
        let plain = pair(&[1.0, 3.0], &[2.0, 4.0]);
        assert!(InverseInput::new(plain, Some(ZeroCaseHint::Q1(1.0))).is_err());
    }

    #[test]
    fn weights_examples() {
        let m = recover_weights(&pair(&[-1.0, 1.0], &[-2.0, 2.0]), &th(2.0)).unwrap();
        assert_relative_eq!(m.weights()[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.weights()[1], 0.5, epsilon = 1e-15);

        let c = 1.7;
        let m = recover_weights(&pair(&[c], &[4.0 * c]), &th(2.0)).unwrap();
        assert_relative_eq!(m.weights()[0], 1.0, epsilon = 1e-15);

        let m = recover_weights(&pair(&[-3.0, -1.0, 1.0, 3.0], &[-3.5, -1.2, 1.2, 3.5]), &th(1.5));
        if let Ok(m) = m {
            assert_relative_eq!(m.weights()[0], m.weights()[3], max_relative = 1e-13);
            assert_relative_eq!(m.weights()[1], m.weights()[2], max_relative = 1e-13);
        }
        let raw = raw_weights(&pair(&[-3.0, -1.0, 1.0, 3.0], &[-3.5, -1.2, 1.2, 3.5]), &th(1.5)).unwrap();
        assert_relative_eq!(raw[0], raw[3], max_relative = 1e-13);
        assert_relative_eq!(raw[1], raw[2], max_relative = 1e-13);

        assert_eq!(
            recover_weights(&pair(&[1.0, 2.0], &[1.0, 2.0]), &th(1.0)).unwrap_err(),
            Error::ThetaIsOne
        );
    }

    #[test]
    fn moment_examples() {
        let s = moments(&measure(&[-1.0, 1.0], &[0.5, 0.5]), 5);
        assert_eq!(s, vec![1.0, 0.0, 1.0, 0.0, 1.0]);
        let s = moments(&measure(&[2.5], &[1.0]), 4);
        assert_eq!(s, vec![1.0, 2.5, 6.25, 15.625]);

        let j = jm(&[-2.0, -2.0, -2.0], &[1.0, 1.0]);
        let s = moments(&tridiag::spectral_measure(&j).unwrap(), 3);
        assert_relative_eq!(s[1], -2.0, epsilon = 1e-13);
        assert_relative_eq!(s[2], 5.0, epsilon = 1e-12);
    }

    #[test]
    fn reconstruction_examples() {
        let j = reconstruct_jacobi(&measure(&[-1.0, 1.0], &[0.5, 0.5])).unwrap();
        assert!(j.diag().iter().all(|q| q.abs() < 1e-15));
        assert_relative_eq!(j.off()[0], 1.0, epsilon = 1e-15);

        let target = jm(&[-2.0, -2.0, -2.0], &[1.0, 1.0]);
        let j = reconstruct_jacobi(&tridiag::spectral_measure(&target).unwrap()).unwrap();
        for (a, b) in j.diag().iter().zip(target.diag()) {
            assert!((a - b).abs() < 1e-10);
        }
        for (a, b) in j.off().iter().zip(target.off()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn reconstruction_round_trips_the_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let n = rng.gen_range(2..10);
            let mut points: Vec<f64> = (0..n).map(|i| i as f64 + rng.gen_range(0.1..0.9)).collect();
            points.iter_mut().for_each(|x| *x -= n as f64 / 2.0);
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let m = measure(&points, &raw.iter().map(|w| w / total).collect::<Vec<_>>());
            let j = reconstruct_jacobi(&m).unwrap();
            let back = tridiag::spectral_measure(&j).unwrap();
            for (a, b) in back.points().iter().zip(m.points()) {
                assert!((a - b).abs() < 1e-9);
            }
            for (a, b) in back.weights().iter().zip(m.weights()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn reconstruction_detects_collapsed_support() {
        let m = measure(&[0.0, 1.0, 1.0 + 1e-13], &[0.25, 0.5, 0.25]);
        assert!(matches!(
            reconstruct_jacobi(&m),
            Err(Error::BreakdownAtStep { step: 2, .. })
        ));
    }

    #[test]
    fn solve_two_by_two() {
        let r = spectra_pair(&jm(&[0.0, 0.0], &[1.0]), &th(2.0)).unwrap();
        let sol = solve(&InverseInput::new(r.pair, None).unwrap()).unwrap();
        assert_relative_eq!(sol.theta.get(), 2.0, epsilon = 1e-14);
        assert!(sol.matrix.diag().iter().all(|q| q.abs() < 1e-12));
        assert_relative_eq!(sol.matrix.off()[0], 1.0, epsilon = 1e-12);
        assert!(sol.residuals[0].residual < 1e-12);
    }

    #[test]
    fn solve_small_random_matrices() {
        // Small N keeps the smallest weights well above f64 roundoff.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let n = rng.gen_range(2..=6);
            let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.8..2.0)).collect();
            let j = jm(&q, &b);
            let theta = th([0.5, 0.7, 1.5, 2.0][rng.gen_range(0..4)]);
            let r = spectra_pair(&j, &theta).unwrap();
            let sol = solve(&InverseInput::new(r.pair, None).unwrap()).unwrap();
            assert!((sol.theta.squared() / theta.squared() - 1.0).abs() < 1e-10);
            for (a, b) in sol.matrix.diag().iter().zip(&q) {
                assert!((a - b).abs() < 1e-8 * 2.0);
            }
            for (a, b) in sol.matrix.off().iter().zip(&b) {
                assert!((a - b).abs() < 1e-8 * 2.0);
            }
        }
    }

    #[test]
    fn weights_are_inverse_normalizing_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let n = rng.gen_range(2..=6);
            let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.8..2.0)).collect();
            let j = jm(&q, &b);
            let r = spectra_pair(&j, &th(rng.gen_range(0.3..3.0))).unwrap();
            let theta = recover_theta(&r.pair).unwrap();
            let m = recover_weights(&r.pair, &theta).unwrap();
            let alpha = tridiag::normalizing_constants(&j).unwrap();
            for (t, a) in m.weights().iter().zip(alpha) {
                assert_relative_eq!(*t, 1.0 / a, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn broken_interlacing_is_reported_by_pairing() {
        let r = spectra_pair(&jm(&[0.0, 0.0, 0.5], &[1.0, 1.0]), &th(2.0)).unwrap();
        let mut mus = r.pair.mus().values().to_vec();
        mus[2] = mus[1] + 0.5 * (r.pair.lambdas().values()[2] - mus[1]);
        mus.swap(1, 2);
        mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let err = SpectrumPair::from_values(r.pair.lambdas().values(), &mus, &1e-12).unwrap_err();
        assert_eq!(err.name(), "NotInterlacing");
    }
}
