//! Spectral kernel for symmetric tridiagonal matrices: eigenvalues with first
//! eigenvector components, orthogonal polynomials of the first and second
//! kind, normalizing constants and the Weyl m-function.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{c, cabs, Real};
use crate::summation::{compensated_sum, CompensatedSum};
use crate::types::{JacobiMatrix, SpectralMeasure};

const MAX_QL_ITERATIONS: usize = 60;
const RESCALE_EVERY: usize = 50;

/// Eigenvalues in increasing order with the first entry `u₁(n) > 0` of each
/// unit eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition<T = f64> {
    pub eigenvalues: Vec<T>,
    pub first_components: Vec<T>,
}

impl<T: Real> EigenDecomposition<T> {
    /// Spectral weights `u₁(n)²`.
    pub fn weights(&self) -> Vec<T> {
        self.first_components
            .iter()
            .map(|u| u.clone() * u.clone())
            .collect()
    }

    /// `α_n = 1/u₁(n)²`.
    pub fn normalizing_constants(&self) -> Vec<T> {
        self.weights().into_iter().map(|w| T::one() / w).collect()
    }

    pub fn measure(&self) -> Result<SpectralMeasure<T>> {
        SpectralMeasure::new(self.eigenvalues.clone(), self.weights())
    }

    /// Smallest gap between consecutive eigenvalues, `None` for a 1×1 matrix.
    pub fn min_gap(&self) -> Option<T> {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .reduce(|a, b| a.min_of(b))
    }
}

fn with_sign<T: Real>(magnitude: T, sign_of: &T) -> T {
    if sign_of.is_negative() {
        -magnitude.abs()
    } else {
        magnitude.abs()
    }
}

/// Implicit-shift QL on the tridiagonal matrix, rotating only the first row
/// of the eigenvector matrix.
pub fn eigen<T: Real>(j: &JacobiMatrix<T>) -> Result<EigenDecomposition<T>> {
    ql(j, true)
}

/// Eigenvalues alone, in ascending order; skips the first-row rotations.
pub fn eigenvalues<T: Real>(j: &JacobiMatrix<T>) -> Result<Vec<T>> {
    ql(j, false).map(|e| e.eigenvalues)
}

fn ql<T: Real>(j: &JacobiMatrix<T>, track_first_row: bool) -> Result<EigenDecomposition<T>> {
    let n = j.dim();
    let mut d = j.diag().to_vec();
    let mut e = j.off().to_vec();
    e.push(T::zero());
    let mut z = vec![T::zero(); n];
    z[0] = T::one();
    let eps = T::epsilon();
    let two = c::<T>(2.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps.clone() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == MAX_QL_ITERATIONS {
                return Err(Error::ConvergenceFailure {
                    index: l,
                    residual: e[l].abs().to_f64(),
                });
            }
            iter += 1;

            let mut g = (d[l + 1].clone() - d[l].clone()) / (two.clone() * e[l].clone());
            let mut r = g.hypot(&T::one());
            g = d[m].clone() - d[l].clone() + e[l].clone() / (g.clone() + with_sign(r, &g));
            let (mut s, mut cs, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s.clone() * e[i].clone();
                let b = cs.clone() * e[i].clone();
                r = f.hypot(&g);
                e[i + 1] = r.clone();
                if r.is_zero() {
                    d[i + 1] -= p.clone();
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                let inv = T::one() / r;
                s = f * inv.clone();
                cs = g.clone() * inv;
                g = d[i + 1].clone() - p.clone();
                r = (d[i].clone() - g.clone()) * s.clone() + two.clone() * cs.clone() * b.clone();
                p = s.clone() * r.clone();
                d[i + 1] = g + p.clone();
                g = cs.clone() * r - b;

                if track_first_row {
                    let f = z[i + 1].clone();
                    z[i + 1] = s.clone() * z[i].clone() + cs.clone() * f.clone();
                    z[i] = cs.clone() * z[i].clone() - s.clone() * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }

    let mut pairs: Vec<(T, T)> = d.into_iter().zip(z.into_iter().map(|u| u.abs())).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let (eigenvalues, first_components) = pairs.into_iter().unzip();
    Ok(EigenDecomposition {
        eigenvalues,
        first_components,
    })
}

/// Points at which the polynomial recurrences can be evaluated: real or complex.
pub trait Point<T: Real>:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_real(x: T) -> Self;
    fn modulus(&self) -> T;
}

impl<T: Real> Point<T> for T {
    fn from_real(x: T) -> Self {
        x
    }
    fn modulus(&self) -> T {
        self.abs()
    }
}

impl<T: Real> Point<T> for Complex<T> {
    fn from_real(x: T) -> Self {
        Complex::new(x, T::zero())
    }
    fn modulus(&self) -> T {
        cabs(self)
    }
}

/// First-kind `P_k` and second-kind `Q_k` polynomials at one point, stored
/// scaled: the true values are `p[k]·exp(log_scale[k])`, `q[k]·exp(log_scale[k])`.
#[derive(Clone, Debug)]
pub struct PolynomialTable<Z, T> {
    pub p: Vec<Z>,
    pub q: Vec<Z>,
    pub log_scale: Vec<T>,
}

impl<T: Real, Z: Point<T>> PolynomialTable<Z, T> {
    /// Number of stored entries minus one.
    pub fn degree(&self) -> usize {
        self.p.len() - 1
    }

    pub fn p_value(&self, k: usize) -> Z {
        self.p[k].clone() * Z::from_real(self.log_scale[k].exp())
    }

    pub fn q_value(&self, k: usize) -> Z {
        self.q[k].clone() * Z::from_real(self.log_scale[k].exp())
    }

    /// `b_k (P_{k−1} Q_k − P_k Q_{k−1})`, which is identically 1, paired
    /// with the magnitude of the larger cancelling term.
    pub fn wronskian(&self, k: usize, b_k: &T) -> (Z, T) {
        let scale = Z::from_real(
            (self.log_scale[k - 1].clone() + self.log_scale[k].clone()).exp() * b_k.clone(),
        );
        let left = self.p[k - 1].clone() * self.q[k].clone() * scale.clone();
        let right = self.p[k].clone() * self.q[k - 1].clone() * scale;
        let magnitude = left.modulus().max_of(right.modulus());
        (left - right, magnitude)
    }
}

/// Off-diagonal `b_k` for the recurrence step `k` (1-based); the step past the
/// last row uses `b_N = 1`, so that `P_N` is the normalized characteristic polynomial.
fn step_b<T: Real>(j: &JacobiMatrix<T>, k: usize) -> T {
    j.off().get(k - 1).cloned().unwrap_or_else(T::one)
}

/// Evaluates `P_0..P_n` and `Q_0..Q_n` at `z` by the three-term recurrence
/// `b_k P_k = (z − q_k) P_{k−1} − b_{k−1} P_{k−2}`, `P_{−1} = 0`, `P_0 = 1`,
/// with `Q_0 = 0`, `Q_1 = 1/b_1`.
pub fn poly_table<T: Real, Z: Point<T>>(
    j: &JacobiMatrix<T>,
    z: &Z,
    n: usize,
) -> Result<PolynomialTable<Z, T>> {
    if n > j.dim() {
        return Err(Error::InvalidMatrix(alloc::format!(
            "polynomial degree {n} exceeds matrix size {}",
            j.dim()
        )));
    }
    let zero = Z::from_real(T::zero());
    let mut p = vec![Z::from_real(T::one())];
    let mut q = vec![zero.clone()];
    let mut log_scale = vec![T::zero()];
    let mut scale = T::zero();
    // Working values (P_{k−2}, P_{k−1}) and (Q_{k−2}, Q_{k−1}), all at the current scale.
    let (mut p_prev, mut p_cur) = (zero.clone(), Z::from_real(T::one()));
    let (mut q_prev, mut q_cur) = (zero.clone(), zero);

    for k in 1..=n {
        let b_k = Z::from_real(step_b(j, k));
        let shift = z.clone() - Z::from_real(j.diag()[k - 1].clone());
        let (p_next, q_next) = if k == 1 {
            (shift * p_cur.clone() / b_k.clone(), Z::from_real(T::one()) / b_k)
        } else {
            let b_prev = Z::from_real(j.off()[k - 2].clone());
            (
                (shift.clone() * p_cur.clone() - b_prev.clone() * p_prev.clone()) / b_k.clone(),
                (shift * q_cur.clone() - b_prev * q_prev.clone()) / b_k,
            )
        };
        p_prev = p_cur;
        p_cur = p_next;
        q_prev = q_cur;
        q_cur = q_next;

        if k % RESCALE_EVERY == 0 {
            let big = p_cur
                .modulus()
                .max_of(p_prev.modulus())
                .max_of(q_cur.modulus())
                .max_of(q_prev.modulus());
            if big.is_positive() && big.is_finite() {
                let inv = Z::from_real(T::one() / big.clone());
                p_cur = p_cur * inv.clone();
                p_prev = p_prev * inv.clone();
                q_cur = q_cur * inv.clone();
                q_prev = q_prev * inv;
                scale += big.ln();
            }
        }
        p.push(p_cur.clone());
        q.push(q_cur.clone());
        log_scale.push(scale.clone());
    }
    Ok(PolynomialTable { p, q, log_scale })
}

/// `α_n = Σ_{k=0}^{N−1} P_k(λ_n)²` for every eigenvalue of `j`.
pub fn normalizing_constants<T: Real>(j: &JacobiMatrix<T>) -> Result<Vec<T>> {
    let eig = eigen(j)?;
    normalizing_constants_at(j, &eig.eigenvalues)
}

/// `Σ_{k=0}^{N−1} P_k(x)²` at each of the given points.
pub fn normalizing_constants_at<T: Real>(j: &JacobiMatrix<T>, points: &[T]) -> Result<Vec<T>> {
    let n = j.dim();
    points
        .iter()
        .map(|x| {
            let table = poly_table(j, x, n - 1)?;
            Ok(compensated_sum((0..n).map(|k| {
                let v = table.p[k].clone();
                v.clone() * v * (c::<T>(2.0) * table.log_scale[k].clone()).exp()
            })))
        })
        .collect()
}

/// Distance below which an evaluation point counts as sitting on the pole
/// `λ_n`: `1e−8` times the local eigenvalue gap.
fn pole_guard<T: Real>(eigenvalues: &[T], n: usize) -> T {
    let left = n
        .checked_sub(1)
        .map(|i| eigenvalues[n].clone() - eigenvalues[i].clone());
    let right = eigenvalues
        .get(n + 1)
        .map(|x| x.clone() - eigenvalues[n].clone());
    let gap = match (left, right) {
        (Some(a), Some(b)) => a.min_of(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => eigenvalues[n].abs().max_of(T::one()),
    };
    c::<T>(1e-8) * gap
}

/// Nearest pole to `z` among `points`, as `(position, distance)`.
pub(crate) fn nearest<T: Real>(points: &[T], z: &Complex<T>) -> (usize, T) {
    let mut best = (0, cabs(&(z.clone() - Complex::new(points[0].clone(), T::zero()))));
    for (i, x) in points.iter().enumerate().skip(1) {
        let d = cabs(&(z.clone() - Complex::new(x.clone(), T::zero())));
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub(crate) fn check_pole_distance<T: Real>(points: &[T], z: &Complex<T>) -> Result<()> {
    let (i, d) = nearest(points, z);
    if d < pole_guard(points, i) {
        return Err(Error::PoleProximity {
            distance: d.to_f64(),
        });
    }
    Ok(())
}

/// `m(ζ) = ⟨δ₁, (J − ζ)⁻¹ δ₁⟩ = Σ_n u₁(n)²/(λ_n − ζ)`.
pub fn weyl_m<T: Real>(j: &JacobiMatrix<T>, z: &Complex<T>) -> Result<Complex<T>> {
    weyl_m_from(&eigen(j)?, z)
}

/// Weyl m-function from a precomputed eigendecomposition.
pub fn weyl_m_from<T: Real>(eig: &EigenDecomposition<T>, z: &Complex<T>) -> Result<Complex<T>> {
    check_pole_distance(&eig.eigenvalues, z)?;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (lambda, u) in eig.eigenvalues.iter().zip(&eig.first_components) {
        let w = u.clone() * u.clone();
        let term = Complex::new(w, T::zero()) / (Complex::new(lambda.clone(), T::zero()) - z.clone());
        re.add(term.re);
        im.add(term.im);
    }
    Ok(Complex::new(re.value(), im.value()))
}

/// One step of `b_n² m_n(ζ) = q_n − ζ − 1/m_{n−1}(ζ)`: the m-function of the
/// matrix with one more leading row and column removed.
pub fn riccati_next<T: Real>(
    m_prev: &Complex<T>,
    q_n: &T,
    b_n: &T,
    z: &Complex<T>,
) -> Result<Complex<T>> {
    let norm = m_prev.norm_sqr();
    let inv = if norm.is_zero() {
        return Err(Error::ZeroMFunction);
    } else {
        Complex::new(m_prev.re.clone() / norm.clone(), -m_prev.im.clone() / norm)
    };
    if !(inv.re.is_finite() && inv.im.is_finite()) {
        return Err(Error::ZeroMFunction);
    }
    let b2 = b_n.clone() * b_n.clone();
    Ok((Complex::new(q_n.clone(), T::zero()) - z.clone() - inv).unscale(b2))
}

/// Moments `(s₀, s₁, s₂)` of the spectral measure, the coefficients of
/// `m(ζ) = −s₀/ζ − s₁/ζ² − s₂/ζ³ + O(ζ⁻⁴)`. They must equal
/// `(1, q₁, q₁² + b₁²)`; a mismatch beyond `1e−10` (scaled by the norm) is an error.
pub fn asymptotic_coeffs<T: Real>(j: &JacobiMatrix<T>) -> Result<[T; 3]> {
    let eig = eigen(j)?;
    let w = eig.weights();
    let s0 = compensated_sum(w.iter().cloned());
    let s1 = compensated_sum(
        eig.eigenvalues
            .iter()
            .zip(&w)
            .map(|(l, w)| l.clone() * w.clone()),
    );
    let s2 = compensated_sum(
        eig.eigenvalues
            .iter()
            .zip(&w)
            .map(|(l, w)| l.clone() * l.clone() * w.clone()),
    );
    let q1 = j.q1().clone();
    let b1 = j.off().first().cloned().unwrap_or_else(T::zero);
    let scale = j.norm_bound().max_of(T::one());
    let checks = [
        ("s0 = 1", (s0.clone() - T::one()).abs(), c::<T>(1e-12)),
        ("s1 = q1", (s1.clone() - q1.clone()).abs(), c::<T>(1e-10) * scale.clone()),
        (
            "s2 = q1^2 + b1^2",
            (s2.clone() - (q1.clone() * q1 + b1.clone() * b1)).abs(),
            c::<T>(1e-10) * scale.clone() * scale,
        ),
    ];
    for (name, residual, tol) in checks {
        if residual > tol {
            return Err(Error::IdentityCheck {
                name,
                residual: residual.to_f64(),
            });
        }
    }
    Ok([s0, s1, s2])
}

/// Spectral measure of `j`: atoms at the eigenvalues with weights `u₁(n)²`.
pub fn spectral_measure<T: Real>(j: &JacobiMatrix<T>) -> Result<SpectralMeasure<T>> {
    eigen(j)?.measure()
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn jm(q: &[f64], b: &[f64]) -> JacobiMatrix {
        JacobiMatrix::from_f64(q, b).unwrap()
    }

    /// Number of eigenvalues below `x` from the signs of the LDLᵀ pivots of `J − x`.
    fn sturm_count(j: &JacobiMatrix, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for k in 0..j.dim() {
            let b2 = if k == 0 { 0.0 } else { j.off()[k - 1].powi(2) };
            d = j.diag()[k] - x - if k == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = 1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bisect_eigenvalue(j: &JacobiMatrix, index: usize) -> f64 {
        let r = j.norm_bound() + 1.0;
        let (mut lo, mut hi) = (-r, r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(j, mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn random_jacobi(rng: &mut ChaCha8Rng, n: usize) -> JacobiMatrix {
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let b: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.5..3.0)).collect();
        jm(&q, &b)
    }

    #[test]
    fn eigen_two_by_two_exchange() {
        let e = eigen(&jm(&[0.0, 0.0], &[1.0])).unwrap();
        assert_relative_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-15);
        for u in &e.first_components {
            assert_relative_eq!(*u, 0.5f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn eigen_uniform_three_by_three() {
        let e = eigen(&jm(&[-2.0, -2.0, -2.0], &[1.0, 1.0])).unwrap();
        let s = 2.0f64.sqrt();
        let expected = [-2.0 - s, -2.0, -2.0 + s];
        for (got, want) in e.eigenvalues.iter().zip(expected) {
            assert_relative_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn eigen_single_entry() {
        let e = eigen(&jm(&[3.5], &[])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.5]);
        assert_eq!(e.first_components, vec![1.0]);
    }

    #[test]
    fn eigen_matches_sturm_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..15);
            let j = random_jacobi(&mut rng, n);
            let e = eigen(&j).unwrap();
            for (i, l) in e.eigenvalues.iter().enumerate() {
                let oracle = bisect_eigenvalue(&j, i);
                assert!((l - oracle).abs() < 1e-12 * (1.0 + j.norm_bound()), "{l} vs {oracle}");
            }
            let sum_sq: f64 = e.weights().iter().sum();
            assert!((sum_sq - 1.0).abs() < 1e-12);
            assert!(e.first_components.iter().all(|u| *u > 0.0));
        }
    }

    #[test]
    fn spectra_are_simple() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(2..12);
            let j = random_jacobi(&mut rng, n);
            let e = eigen(&j).unwrap();
            let backward = f64::EPSILON * j.norm_bound() * n as f64;
            assert!(e.min_gap().unwrap() > 1e3 * backward);
        }
    }

    #[test]
    fn first_moment_is_q1() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(2..20);
            let j = random_jacobi(&mut rng, n);
            let e = eigen(&j).unwrap();
            let s1: f64 = e
                .eigenvalues
                .iter()
                .zip(e.weights())
                .map(|(l, w)| l * w)
                .sum();
            assert!((s1 - j.q1()).abs() <= 1e-10 * j.q1().abs().max(1.0));
        }
    }

    #[test]
    fn poly_table_examples() {
        let t = poly_table(&jm(&[0.0, 0.0], &[1.0]), &0.0, 1).unwrap();
        assert_eq!(t.p, vec![1.0, 0.0]);
        assert_eq!(t.q, vec![0.0, 1.0]);

        let j = jm(&[-2.0, -2.0, -2.0], &[1.0, 1.0]);
        let t = poly_table(&j, &-2.0, 2).unwrap();
        assert_eq!(t.p, vec![1.0, 0.0, -1.0]);

        let t = poly_table(&j, &Complex::new(0.3, 1.0), 0).unwrap();
        assert_eq!(t.p, vec![Complex::new(1.0, 0.0)]);
        assert_eq!(t.q, vec![Complex::new(0.0, 0.0)]);
        assert!(poly_table(&j, &0.0, 4).is_err());
    }

    #[test]
    fn last_polynomial_vanishes_on_the_spectrum() {
        let j = jm(&[1.0, -0.5, 2.0, 0.25], &[0.7, 1.3, 0.4]);
        let e = eigen(&j).unwrap();
        for l in &e.eigenvalues {
            let t = poly_table(&j, l, 4).unwrap();
            let scale = (0..4).map(|k| t.p_value(k).abs()).fold(1.0, f64::max);
            assert!(t.p_value(4).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn wronskian_identity_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = rng.gen_range(2..30);
            let j = random_jacobi(&mut rng, n);
            for _ in 0..20 {
                let z = Complex::new(rng.gen_range(-8.0..8.0), rng.gen_range(-3.0..3.0));
                let t = poly_table(&j, &z, n).unwrap();
                let x = z.re;
                let tr = poly_table(&j, &x, n).unwrap();
                for k in 1..=n {
                    let b = step_b(&j, k);
                    let (w, mag) = t.wronskian(k, &b);
                    assert!((w - 1.0).norm() <= 1e-10 * mag.max(1.0));
                    let (w, mag) = tr.wronskian(k, &b);
                    assert!((w - 1.0).abs() <= 1e-10 * mag.max(1.0));
                }
            }
        }
    }

    #[test]
    fn rescaling_keeps_long_recurrences_finite() {
        let n = 400;
        let j = jm(&vec![0.0; n], &vec![0.1; n - 1]);
        let t = poly_table(&j, &Complex::new(30.0, 30.0), n).unwrap();
        assert!(t.p.iter().all(|p| p.re.is_finite() && p.im.is_finite()));
        assert!(t.log_scale[n] > 700.0);
        let (w, mag) = t.wronskian(n - 1, &0.1);
        // The unscaled identity overflows; compare in scaled form.
        assert!(!mag.is_finite() || (w - 1.0).norm() <= 1e-10 * mag);
    }

    #[test]
    fn normalizing_constant_examples() {
        let a = normalizing_constants(&jm(&[0.0, 0.0], &[1.0])).unwrap();
        assert_relative_eq!(a[0], 2.0, epsilon = 1e-14);
        assert_relative_eq!(a[1], 2.0, epsilon = 1e-14);

        let j = jm(&[-2.0, -2.0, -2.0], &[1.0, 1.0]);
        let a = normalizing_constants(&j).unwrap();
        assert_relative_eq!(a[1], 2.0, epsilon = 1e-12);

        assert_eq!(normalizing_constants(&jm(&[4.0], &[])).unwrap(), vec![1.0]);
    }

    #[test]
    fn normalizing_constants_match_first_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let n = rng.gen_range(2..8);
            let j = random_jacobi(&mut rng, n);
            let e = eigen(&j).unwrap();
            let a = normalizing_constants(&j).unwrap();
            for (alpha, inv) in a.iter().zip(e.normalizing_constants()) {
                assert_relative_eq!(*alpha, inv, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn weyl_m_examples() {
        let j = jm(&[0.0, 0.0], &[1.0]);
        let m = weyl_m(&j, &Complex::new(0.0, 1.0)).unwrap();
        assert!((m - Complex::new(0.0, 0.5)).norm() < 1e-15);

        let m = weyl_m(&jm(&[2.5], &[]), &Complex::new(1.0, 2.0)).unwrap();
        let want = Complex::new(1.0, 0.0) / Complex::new(1.5, -2.0);
        assert!((m - want).norm() < 1e-15);

        let z = Complex::new(0.0, 1e6);
        let m = weyl_m(&jm(&[1.0, -2.0, 0.5], &[1.0, 2.0]), &z).unwrap();
        let lead = -Complex::new(1.0, 0.0) / z;
        assert!((m - lead).norm() <= 1e-5 * lead.norm());
    }

    #[test]
    fn weyl_m_rejects_poles() {
        let j = jm(&[0.0, 0.0], &[1.0]);
        assert!(matches!(
            weyl_m(&j, &Complex::new(1.0, 0.0)),
            Err(Error::PoleProximity { .. })
        ));
        assert!(weyl_m(&j, &Complex::new(1.0, 1e-3)).is_ok());
    }

    #[test]
    fn weyl_m_is_herglotz() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let j = random_jacobi(&mut rng, 10);
            for _ in 0..10 {
                let z = Complex::new(rng.gen_range(-10.0..10.0), rng.gen_range(-4.0..4.0));
                if z.im.abs() < 1e-3 {
                    continue;
                }
                let m = weyl_m(&j, &z).unwrap();
                assert!(m.im / z.im > 0.0);
            }
        }
    }

    #[test]
    fn riccati_examples() {
        let z = Complex::new(0.0, 1.0);
        let m1 = riccati_next(&Complex::new(0.0, 0.5), &0.0, &1.0, &z).unwrap();
        assert!((m1 - Complex::new(0.0, 1.0)).norm() < 1e-15);

        let m = riccati_next(&Complex::new(1e16, 0.0), &0.0, &1.0, &z).unwrap();
        assert!((m - Complex::new(0.0, -1.0)).norm() < 1e-15);

        assert_eq!(
            riccati_next(&Complex::new(0.0, 0.0), &0.0, &1.0, &z),
            Err(Error::ZeroMFunction)
        );
    }

    #[test]
    fn riccati_chain_reproduces_truncations() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let n = rng.gen_range(2..12);
            let j = random_jacobi(&mut rng, n);
            let z = Complex::new(rng.gen_range(-5.0..5.0), rng.gen_range(1.0..4.0));
            let mut prev = weyl_m(&j, &z).unwrap();
            for depth in 1..n {
                let m = riccati_next(&prev, &j.diag()[depth - 1], &j.off()[depth - 1], &z).unwrap();
                let direct = weyl_m(&j.truncated(depth).unwrap(), &z).unwrap();
                assert!((m - direct).norm() <= 1e-10 * direct.norm().max(1.0));
                prev = direct;
            }
        }
    }

    #[test]
    fn zeros_of_m_are_the_truncated_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.gen_range(2..10);
            let j = random_jacobi(&mut rng, n);
            let e = eigen(&j).unwrap();
            let inner = eigen(&j.truncated(1).unwrap()).unwrap();
            let m_real = |x: f64| -> f64 {
                e.eigenvalues.iter().zip(e.weights()).map(|(l, w)| w / (l - x)).sum()
            };
            for (w, zero) in e.eigenvalues.windows(2).zip(&inner.eigenvalues) {
                // m runs from −∞ to +∞ between consecutive poles.
                let gap = w[1] - w[0];
                let (mut lo, mut hi) = (w[0] + 1e-14 * gap, w[1] - 1e-14 * gap);
                assert!(m_real(lo) < 0.0 && m_real(hi) > 0.0);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if m_real(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                assert!((0.5 * (lo + hi) - zero).abs() < 1e-9 * (1.0 + zero.abs()));
            }
        }
    }

    #[test]
    fn asymptotic_coefficient_examples() {
        let s = asymptotic_coeffs(&jm(&[0.0, 0.0], &[1.0])).unwrap();
        assert_relative_eq!(s[0], 1.0, epsilon = 1e-14);
        assert!(s[1].abs() < 1e-14);
        assert_relative_eq!(s[2], 1.0, epsilon = 1e-14);

        let s = asymptotic_coeffs(&jm(&[3.0, 2.0], &[4.0])).unwrap();
        assert_relative_eq!(s[1], 3.0, epsilon = 1e-13);
        assert_relative_eq!(s[2], 25.0, epsilon = 1e-12);

        let s = asymptotic_coeffs(&jm(&[-2.0, -2.0, -2.0], &[1.0, 1.0])).unwrap();
        assert_relative_eq!(s[1], -2.0, epsilon = 1e-13);
        assert_relative_eq!(s[2], 5.0, epsilon = 1e-12);
    }
}
