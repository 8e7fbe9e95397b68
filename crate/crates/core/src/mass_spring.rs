//! Chains of masses joined by springs, fixed to a wall at the first spring.
//!
//! Spring `k_j` joins mass `j` to mass `j − 1` (`k_1` to the wall); the
//! terminal spring `k_{N+1} ≥ 0` ties the last mass to a second wall, with
//! `0` meaning a free end. The equations of motion give a Jacobi matrix
//! with `q_j = −(k_j + k_{j+1})/m_j` and `b_j = k_{j+1}/√(m_j m_{j+1})`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::real::{c, Real};
use crate::types::{JacobiMatrix, Theta};

#[derive(Clone, Debug, PartialEq)]
pub struct MassSpringChain<T = f64> {
    masses: Vec<T>,
    springs: Vec<T>,
    terminal: T,
}

impl<T: Real> MassSpringChain<T> {
    /// `springs` holds `k_1..k_N`; `terminal` is `k_{N+1}`.
    pub fn new(masses: Vec<T>, springs: Vec<T>, terminal: T) -> Result<Self> {
        if masses.is_empty() || masses.len() != springs.len() {
            return Err(Error::InvalidChain(format!(
                "{} masses with {} springs",
                masses.len(),
                springs.len()
            )));
        }
        let positive = |v: &T| v.is_finite() && v.is_positive();
        if let Some(i) = masses.iter().position(|m| !positive(m)) {
            return Err(Error::InvalidChain(format!("mass {} is not positive", i + 1)));
        }
        if let Some(i) = springs.iter().position(|k| !positive(k)) {
            return Err(Error::InvalidChain(format!("spring {} is not positive", i + 1)));
        }
        if !(terminal.is_finite() && !terminal.is_negative()) {
            return Err(Error::InvalidChain("terminal spring is negative".into()));
        }
        Ok(Self {
            masses,
            springs,
            terminal,
        })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn springs(&self) -> &[T] {
        &self.springs
    }

    pub fn terminal(&self) -> &T {
        &self.terminal
    }

    /// `k_{j+1}` for 0-based mass position `j`, including the terminal spring.
    fn right_spring(&self, j: usize) -> &T {
        self.springs.get(j + 1).unwrap_or(&self.terminal)
    }

    /// The chain with the first mass replaced by `m₁/θ²`.
    pub fn with_first_mass_scaled(&self, theta: &Theta<T>) -> Self {
        let mut out = self.clone();
        out.masses[0] = out.masses[0].clone() / theta.squared();
        out
    }
}

pub fn chain_to_jacobi<T: Real>(chain: &MassSpringChain<T>) -> JacobiMatrix<T> {
    let n = chain.len();
    let m = chain.masses();
    let k = chain.springs();
    let diag = (0..n)
        .map(|j| -(k[j].clone() + chain.right_spring(j).clone()) / m[j].clone())
        .collect();
    let off = (0..n - 1)
        .map(|j| k[j + 1].clone() / (m[j].clone() * m[j + 1].clone()).sqrt())
        .collect();
    JacobiMatrix::new(diag, off).expect("positive springs give positive off-diagonal entries")
}

/// Relative slack allowed for a terminal spring that should be exactly zero.
const TERMINAL_SLACK: f64 = 1e-10;

/// Rebuilds the chain from `J` and the first spring and mass.
pub fn jacobi_to_chain<T: Real>(j: &JacobiMatrix<T>, k1: T, m1: T) -> Result<MassSpringChain<T>> {
    if !(k1.is_positive() && m1.is_positive()) {
        return Err(Error::InadmissibleSeed { step: 0 });
    }
    let n = j.dim();
    let (q, b) = (j.diag(), j.off());
    let mut springs = Vec::with_capacity(n);
    let mut masses = Vec::with_capacity(n);
    springs.push(k1);
    masses.push(m1);
    for step in 1..n {
        let (kj, mj) = (springs[step - 1].clone(), masses[step - 1].clone());
        let k_next = -(kj + q[step - 1].clone() * mj.clone());
        if !k_next.is_positive() {
            return Err(Error::InadmissibleSeed { step });
        }
        let bj = b[step - 1].clone();
        let m_next = k_next.clone() * k_next.clone() / (mj * bj.clone() * bj);
        if !(m_next.is_positive() && m_next.is_finite()) {
            return Err(Error::InadmissibleSeed { step });
        }
        springs.push(k_next);
        masses.push(m_next);
    }
    let (kn, mn) = (springs[n - 1].clone(), masses[n - 1].clone());
    let load = q[n - 1].clone() * mn;
    let scale = kn.clone() + load.abs();
    let terminal = -(kn + load);
    if terminal < -(c::<T>(TERMINAL_SLACK) * scale) {
        return Err(Error::InadmissibleSeed { step: n });
    }
    MassSpringChain::new(masses, springs, terminal.max_of(T::zero()))
}

/// Ratios `r_j = k_j/m_j` from `r_1` by the continued fraction
/// `r_{j+1} = −b_j²/(q_j + r_j)`, built upwards from the seed. The last ratio
/// must leave a non-negative terminal spring, `q_N + r_N ≤ 0`.
pub fn frequency_ratio_chain<T: Real>(j: &JacobiMatrix<T>, r1: T) -> Result<Vec<T>> {
    if !r1.is_positive() {
        return Err(Error::InadmissibleSeed { step: 0 });
    }
    let n = j.dim();
    let (q, b) = (j.diag(), j.off());
    let mut ratios = Vec::with_capacity(n);
    ratios.push(r1);
    for step in 1..n {
        let r = ratios[step - 1].clone();
        let x = q[step - 1].clone() + r.clone();
        if x.abs() < c::<T>(1e-13) * (q[step - 1].abs() + r) {
            return Err(Error::DivisionNearZero { step });
        }
        let bj = b[step - 1].clone();
        let r_next = -(bj.clone() * bj) / x;
        if !r_next.is_positive() {
            return Err(Error::InadmissibleSeed { step });
        }
        ratios.push(r_next);
    }
    let r = ratios[n - 1].clone();
    let x = q[n - 1].clone() + r.clone();
    if x > c::<T>(TERMINAL_SLACK) * (q[n - 1].abs() + r) {
        return Err(Error::InadmissibleSeed { step: n });
    }
    Ok(ratios)
}

/// Log-spaced seed grid for [`admissible_ratio_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl ScanGrid {
    /// Spans six decades either side of `max |q_j|`.
    pub fn for_matrix<T: Real>(j: &JacobiMatrix<T>) -> Self {
        let scale = j
            .diag()
            .iter()
            .map(|q| q.abs().to_f64())
            .fold(1e-300, f64::max);
        Self {
            lo: scale * 1e-6,
            hi: scale * 1e6,
            points: 2401,
        }
    }
}

/// Maximal intervals of seeds `r_1 = k_1/m_1` for which every ratio is
/// positive and the terminal spring is non-negative. Interior endpoints are
/// refined by bisection to `1e−12` relative; endpoints on the grid edge stay there.
/// This is a numerical scan, not a characterization.
pub fn admissible_ratio_scan<T: Real>(j: &JacobiMatrix<T>, grid: &ScanGrid) -> Result<Vec<(T, T)>> {
    if !(grid.lo > 0.0 && grid.hi > grid.lo && grid.points >= 2) {
        return Err(Error::InvalidChain(format!("invalid scan grid {grid:?}")));
    }
    let ok = |r: &T| frequency_ratio_chain(j, r.clone()).is_ok();
    let (log_lo, log_hi) = (c::<T>(grid.lo).ln(), c::<T>(grid.hi).ln());
    let step = (log_hi.clone() - log_lo.clone()) / T::from_usize(grid.points - 1);
    let seeds: Vec<T> = (0..grid.points)
        .map(|i| (log_lo.clone() + step.clone() * T::from_usize(i)).exp())
        .collect();
    let flags: Vec<bool> = seeds.iter().map(ok).collect();

    let refine = |mut good: T, mut bad: T| -> T {
        for _ in 0..200 {
            let gap = (good.clone() - bad.clone()).abs();
            if gap <= c::<T>(1e-12) * good.abs() {
                break;
            }
            let mid = (good.clone() + bad.clone()) / c::<T>(2.0);
            if ok(&mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };

    let mut intervals = Vec::new();
    let mut i = 0;
    while i < seeds.len() {
        if !flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < seeds.len() && flags[i + 1] {
            i += 1;
        }
        let lo = if start == 0 {
            seeds[0].clone()
        } else {
            refine(seeds[start].clone(), seeds[start - 1].clone())
        };
        let hi = if i + 1 == seeds.len() {
            seeds[i].clone()
        } else {
            refine(seeds[i].clone(), seeds[i + 1].clone())
        };
        intervals.push((lo, hi));
        i += 1;
    }
    if intervals.is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(intervals)
}
