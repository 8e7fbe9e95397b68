//! Compensated sums and log-space products.

use num_complex::Complex;

use crate::real::{cabs, Real};

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Debug)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum.clone() + x.clone();
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum.clone() - t.clone()) + x;
        } else {
            self.compensation += (x - t.clone()) + self.sum.clone();
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum.clone() + self.compensation.clone()
    }
}

impl<T: Real> Extend<T> for CompensatedSum<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(iter: I) -> T {
    let mut acc = CompensatedSum::new();
    acc.extend(iter);
    acc.value()
}

/// Product of positive reals accumulated as a sum of logarithms.
///
/// A non-positive factor poisons the product; [`PositiveProduct::value`]
/// then returns `None`.
#[derive(Clone, Debug)]
pub struct PositiveProduct<T> {
    log: CompensatedSum<T>,
    poisoned: bool,
}

impl<T: Real> Default for PositiveProduct<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> PositiveProduct<T> {
    pub fn new() -> Self {
        Self {
            log: CompensatedSum::new(),
            poisoned: false,
        }
    }

    pub fn mul(&mut self, factor: T) {
        if factor.is_positive() && factor.is_finite() {
            self.log.add(factor.ln());
        } else {
            self.poisoned = true;
        }
    }

    pub fn ln(&self) -> Option<T> {
        (!self.poisoned).then(|| self.log.value())
    }

    pub fn value(&self) -> Option<T> {
        self.ln().map(|l| l.exp())
    }
}

/// Product of nonzero complex numbers: log-modulus summed, unit phases multiplied.
#[derive(Clone, Debug)]
pub struct ComplexProduct<T> {
    log_modulus: CompensatedSum<T>,
    phase: Complex<T>,
    zero: bool,
}

impl<T: Real> Default for ComplexProduct<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> ComplexProduct<T> {
    pub fn new() -> Self {
        Self {
            log_modulus: CompensatedSum::new(),
            phase: Complex::new(T::one(), T::zero()),
            zero: false,
        }
    }

    pub fn mul(&mut self, factor: Complex<T>) {
        let r = cabs(&factor);
        if r.is_zero() {
            self.zero = true;
            return;
        }
        self.log_modulus.add(r.ln());
        self.phase = self.phase.clone() * factor.unscale(r);
    }

    pub fn value(&self) -> Complex<T> {
        if self.zero {
            return Complex::new(T::zero(), T::zero());
        }
        let drift = cabs(&self.phase);
        let magnitude = self.log_modulus.value().exp();
        self.phase.clone().unscale(drift).scale(magnitude)
    }
}
