//! Domain types: Jacobi matrices, the θ-perturbation, signed spectrum
//! enumeration and spectrum pairing.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Region, Result};
use crate::real::{c, Real};
use crate::summation::compensated_sum;

/// Finite symmetric tridiagonal matrix with diagonal `q₁..q_N` and strictly
/// positive off-diagonal `b₁..b_{N−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiMatrix<T = f64> {
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Real> JacobiMatrix<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidMatrix("empty diagonal".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} diagonal entries need {} off-diagonal entries, got {}",
                diag.len(),
                diag.len() - 1,
                off.len()
            )));
        }
        if let Some(i) = diag.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!("q[{}] is not finite", i + 1)));
        }
        if let Some(i) = off.iter().position(|x| !(x.is_finite() && x.is_positive())) {
            return Err(Error::InvalidMatrix(format!(
                "b[{}] = {} must be positive and finite",
                i + 1,
                off[i]
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn from_f64(diag: &[f64], off: &[f64]) -> Result<Self> {
        Self::new(
            diag.iter().map(|&x| T::from_f64(x)).collect(),
            off.iter().map(|&x| T::from_f64(x)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off(&self) -> &[T] {
        &self.off
    }

    pub fn q1(&self) -> &T {
        &self.diag[0]
    }

    pub fn into_parts(self) -> (Vec<T>, Vec<T>) {
        (self.diag, self.off)
    }

    pub fn apply_theta(&self, theta: &Theta<T>) -> Self {
        let t = theta.get();
        let mut diag = self.diag.clone();
        let mut off = self.off.clone();
        diag[0] = t.clone() * t.clone() * diag[0].clone();
        if let Some(b1) = off.first_mut() {
            *b1 = t * b1.clone();
        }
        Self { diag, off }
    }

    /// The matrix with its first `depth` rows and columns removed.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        if depth >= self.dim() {
            return Err(Error::InvalidMatrix(format!(
                "cannot remove {depth} rows from a {}x{} matrix",
                self.dim(),
                self.dim()
            )));
        }
        Ok(Self {
            diag: self.diag[depth..].to_vec(),
            off: self.off[depth..].to_vec(),
        })
    }

    pub fn trace(&self) -> T {
        compensated_sum(self.diag.iter().cloned())
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> T {
        let n = self.dim();
        let mut best = T::zero();
        for i in 0..n {
            let mut r = self.diag[i].abs();
            if i > 0 {
                r += self.off[i - 1].clone();
            }
            if i + 1 < n {
                r += self.off[i].clone();
            }
            best = best.max_of(r);
        }
        best
    }

    /// Determinant by the continuant recurrence `D_k = q_k D_{k−1} − b_{k−1}² D_{k−2}`.
    pub fn determinant(&self) -> T {
        let mut prev = T::one();
        let mut cur = self.diag[0].clone();
        for k in 1..self.dim() {
            let b = self.off[k - 1].clone();
            let next = self.diag[k].clone() * cur.clone() - b.clone() * b * prev;
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// Returns `J(θ)`: `q₁ → θ²q₁`, `b₁ → θb₁`, every other entry unchanged.
pub fn apply_theta<T: Real>(j: &JacobiMatrix<T>, theta: &Theta<T>) -> JacobiMatrix<T> {
    j.apply_theta(theta)
}

/// Perturbation parameter `θ > 0`. Physically `θ² = m₁/(m₁ + Δm)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Theta<T = f64>(T);

impl<T: Real> Theta<T> {
    pub fn new(value: T) -> Result<Self> {
        if value.is_finite() && value.is_positive() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidTheta(value.to_f64()))
        }
    }

    pub fn from_squared(theta_sq: T) -> Result<Self> {
        if theta_sq.is_finite() && theta_sq.is_positive() {
            Ok(Self(theta_sq.sqrt()))
        } else {
            Err(Error::InvalidTheta(theta_sq.to_f64()))
        }
    }

    pub fn get(&self) -> T {
        self.0.clone()
    }

    pub fn squared(&self) -> T {
        self.0.clone() * self.0.clone()
    }

    pub fn recip(&self) -> Self {
        Self(T::one() / self.0.clone())
    }

    pub fn is_one(&self) -> bool {
        self.0 == T::one()
    }
}

/// `1e−10 · max(1, radius)`: eigenvalues this close to zero are treated as zero.
pub fn default_zero_tolerance<T: Real>(spectral_radius: &T) -> T {
    c::<T>(1e-10) * spectral_radius.clone().max_of(T::one())
}

/// Eigenvalues labelled by signed indices: negatives get `−n..−1`, a zero
/// eigenvalue (if any) gets `0`, positives get `1..p`. Without a zero the
/// labels jump from −1 to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedSpectrum<T = f64> {
    values: Vec<T>,
    negative: usize,
    has_zero: bool,
}

impl<T: Real> IndexedSpectrum<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn has_zero(&self) -> bool {
        self.has_zero
    }

    pub fn negative_count(&self) -> usize {
        self.negative
    }

    pub fn positive_count(&self) -> usize {
        self.values.len() - self.negative - usize::from(self.has_zero)
    }

    pub fn index_at(&self, position: usize) -> i64 {
        let neg = self.negative as i64;
        let pos = position as i64;
        if pos < neg || self.has_zero {
            pos - neg
        } else {
            pos - neg + 1
        }
    }

    pub fn position_of(&self, index: i64) -> Option<usize> {
        let neg = self.negative as i64;
        let pos = if index < 0 {
            index + neg
        } else if index == 0 {
            if !self.has_zero {
                return None;
            }
            neg
        } else if self.has_zero {
            index + neg
        } else {
            index + neg - 1
        };
        (pos >= 0 && (pos as usize) < self.values.len()).then_some(pos as usize)
    }

    pub fn get(&self, index: i64) -> Option<&T> {
        self.position_of(index).map(|p| &self.values[p])
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.values.len()).map(move |p| self.index_at(p))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(p, v)| (self.index_at(p), v))
    }

    fn negatives(&self) -> &[T] {
        &self.values[..self.negative]
    }

    fn positives(&self) -> &[T] {
        &self.values[self.negative + usize::from(self.has_zero)..]
    }
}

/// Labels a strictly increasing list of eigenvalues with signed indices.
/// The entry within `zero_tolerance` of zero (at most one) is stored as exact zero.
pub fn enumerate_spectrum<T: Real>(values: &[T], zero_tolerance: &T) -> Result<IndexedSpectrum<T>> {
    if let Some(p) = values.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::DuplicateValues { position: p + 1 });
    }
    let mut zero = None;
    for (i, v) in values.iter().enumerate() {
        if v.abs() <= *zero_tolerance {
            if let Some(first) = zero {
                return Err(Error::MultipleZeros { first, second: i });
            }
            zero = Some(i);
        }
    }
    let mut values = values.to_vec();
    let negative = match zero {
        Some(i) => {
            values[i] = T::zero();
            i
        }
        None => values.iter().filter(|v| v.is_negative()).count(),
    };
    Ok(IndexedSpectrum {
        values,
        negative,
        has_zero: zero.is_some(),
    })
}

/// Direction in which the second spectrum is displaced relative to the first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    /// `λ_k < μ_k < λ_{k+1}` on ℝ₊ and `μ_k < λ_k < μ_{k+1}` on ℝ₋ (θ > 1).
    RightPos,
    /// The mirrored pattern (θ < 1).
    LeftPos,
    /// Identical spectra (θ = 1).
    Degenerate,
}

impl Shift {
    pub fn name(self) -> &'static str {
        match self {
            Shift::RightPos => "RIGHT_POS",
            Shift::LeftPos => "LEFT_POS",
            Shift::Degenerate => "DEGENERATE",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "RIGHT_POS" => Some(Shift::RightPos),
            "LEFT_POS" => Some(Shift::LeftPos),
            "DEGENERATE" => Some(Shift::Degenerate),
            _ => None,
        }
    }
}

/// Two spectra indexed over the same set, interlacing in the pattern named by `shift`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPair<T = f64> {
    lambdas: IndexedSpectrum<T>,
    mus: IndexedSpectrum<T>,
    shift: Shift,
}

impl<T: Real> SpectrumPair<T> {
    /// Enumerates both raw lists and pairs them.
    pub fn from_values(lambdas: &[T], mus: &[T], zero_tolerance: &T) -> Result<Self> {
        let lams = enumerate_spectrum(lambdas, zero_tolerance)?;
        pair_spectra(&lams, mus, zero_tolerance)
    }

    pub fn lambdas(&self) -> &IndexedSpectrum<T> {
        &self.lambdas
    }

    pub fn mus(&self) -> &IndexedSpectrum<T> {
        &self.mus
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn has_zero(&self) -> bool {
        self.lambdas.has_zero
    }

    /// `(k, λ_k, μ_k)` in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &T, &T)> + '_ {
        self.lambdas
            .iter()
            .zip(self.mus.values.iter())
            .map(|((k, l), m)| (k, l, m))
    }
}

/// Checks `lead_k < follow_k < lead_{k+1}` across one half-line.
/// `first_index` is the signed label of position 0.
fn check_leads<T: Real>(
    lead: &[T],
    follow: &[T],
    first_index: i64,
) -> core::result::Result<(), (i64, [f64; 3])> {
    for k in 0..lead.len() {
        let next = lead.get(k + 1);
        let ok = lead[k] < follow[k] && next.is_none_or(|n| follow[k] < *n);
        if !ok {
            let triple = [
                lead[k].to_f64(),
                follow[k].to_f64(),
                next.map_or(f64::NAN, |n| n.to_f64()),
            ];
            return Err((first_index + k as i64, triple));
        }
    }
    Ok(())
}

fn region_pattern<T: Real>(
    lams: &[T],
    mus: &[T],
    region: Region,
    shift: Shift,
) -> core::result::Result<(), (i64, [f64; 3])> {
    let first_index = match region {
        Region::Positive => 1,
        Region::Negative => -(lams.len() as i64),
    };
    // On ℝ₊ the right shift puts λ first; on ℝ₋ it puts μ first.
    let lambda_leads = matches!(
        (region, shift),
        (Region::Positive, Shift::RightPos) | (Region::Negative, Shift::LeftPos)
    );
    if lambda_leads {
        check_leads(lams, mus, first_index)
    } else {
        check_leads(mus, lams, first_index)
    }
}

/// Indexes `mus_raw` over the index set of `lams` and classifies the shift.
pub fn pair_spectra<T: Real>(
    lams: &IndexedSpectrum<T>,
    mus_raw: &[T],
    zero_tolerance: &T,
) -> Result<SpectrumPair<T>> {
    if lams.len() != mus_raw.len() {
        return Err(Error::CardinalityMismatch {
            lambdas: lams.len(),
            mus: mus_raw.len(),
        });
    }
    let mus = enumerate_spectrum(mus_raw, zero_tolerance)?;
    if lams.has_zero != mus.has_zero {
        return Err(Error::ZeroMismatch);
    }
    if lams.values == mus.values {
        return Ok(SpectrumPair {
            lambdas: lams.clone(),
            mus,
            shift: Shift::Degenerate,
        });
    }
    for (region, l, m) in [
        (Region::Positive, lams.positives(), mus.positives()),
        (Region::Negative, lams.negatives(), mus.negatives()),
    ] {
        if l.len() != m.len() {
            let index = match region {
                Region::Positive => l.len().min(m.len()) as i64 + 1,
                Region::Negative => -(l.len().min(m.len()) as i64) - 1,
            };
            return Err(Error::NotInterlacing {
                region,
                index,
                triple: [f64::NAN; 3],
            });
        }
    }

    let (pl, pm) = (lams.positives(), mus.positives());
    let (nl, nm) = (lams.negatives(), mus.negatives());
    let shift = if let (Some(l), Some(m)) = (pl.first(), pm.first()) {
        if m > l {
            Shift::RightPos
        } else {
            Shift::LeftPos
        }
    } else {
        // Only the negative half-line is populated; μ left of λ means a right shift on ℝ₊.
        if nm[nm.len() - 1] < nl[nl.len() - 1] {
            Shift::RightPos
        } else {
            Shift::LeftPos
        }
    };

    region_pattern(pl, pm, Region::Positive, shift).map_err(|(index, triple)| {
        Error::NotInterlacing {
            region: Region::Positive,
            index,
            triple,
        }
    })?;
    if let Err((index, triple)) = region_pattern(nl, nm, Region::Negative, shift) {
        let mirrored = match shift {
            Shift::RightPos => Shift::LeftPos,
            _ => Shift::RightPos,
        };
        if !pl.is_empty() && region_pattern(nl, nm, Region::Negative, mirrored).is_ok() {
            return Err(Error::InconsistentShift);
        }
        return Err(Error::NotInterlacing {
            region: Region::Negative,
            index,
            triple,
        });
    }
    Ok(SpectrumPair {
        lambdas: lams.clone(),
        mus,
        shift,
    })
}

/// Discrete probability measure `Σ τ_k δ_{λ_k}` with distinct atoms and positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure<T = f64> {
    points: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> SpectralMeasure<T> {
    /// Weight sums further than this from one are rejected.
    pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

    pub fn new(points: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms with {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(p) = points.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidMeasure(format!(
                "atoms not strictly increasing at position {}",
                p + 1
            )));
        }
        if let Some(i) = points.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMeasure(format!("atom {i} is not finite")));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && w.is_positive())) {
            return Err(Error::NonPositiveWeight {
                index: i as i64,
                value: weights[i].to_f64(),
            });
        }
        let sum = compensated_sum(weights.iter().cloned());
        if (sum.clone() - T::one()).abs() > c(Self::NORMALIZATION_TOLERANCE) {
            return Err(Error::NormalizationFailure { sum: sum.to_f64() });
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn diameter(&self) -> T {
        self.points[self.points.len() - 1].clone() - self.points[0].clone()
    }
}
