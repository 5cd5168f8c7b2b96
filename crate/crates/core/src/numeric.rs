//! Floating-point helpers: unit phases and compensated accumulation.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `e(x) = exp(2 pi i x)`, reducing `x` modulo 1 first.
pub fn e(x: f64) -> Complex64 {
    let t = x - x.floor();
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// `e(k / q)` computed from the exact residue `k mod q`.
pub fn e_ratio(k: u64, q: u64) -> Complex64 {
    let k = k % q;
    let (s, c) = (TAU * (k as f64 / q as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Table of `e(k / q)` for `k = 0..q`.
#[derive(Debug, Clone)]
pub struct RootTable {
    q: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(q: u64) -> Self {
        let roots = (0..q).map(|k| e_ratio(k, q)).collect();
        RootTable { q, roots }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        self.roots[(k % self.q) as usize]
    }
}

/// Neumaier-compensated sum of `f64` terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated accumulator for complex terms (real and imaginary parts
/// carried separately).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_phases() {
        assert!((e(0.25) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((e(-0.5) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((e_ratio(7, 4) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        let t = RootTable::new(3);
        let s = t.get(0) + t.get(1) + t.get(2);
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1e16);
        for _ in 0..1000 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn million_unit_vectors() {
        // Sum of all 10^6-th roots of unity is zero.
        let q = 1_000_000u64;
        let s: ComplexSum = (0..q).map(|k| e_ratio(k, q)).collect();
        assert!(s.value().norm() < 1e-8);
    }
}
