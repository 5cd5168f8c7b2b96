//! Integer-coefficient polynomials in one variable.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A polynomial with arbitrary-precision integer coefficients, stored in
/// ascending order (`coeffs[i]` multiplies `x^i`). Always normalised: the
/// highest stored coefficient is nonzero, and the zero polynomial has no
/// stored coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

/// Leading coefficient and sum of absolute coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffStats {
    pub leading: BigInt,
    pub abs_sum: BigInt,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_coeffs<T: Into<BigInt>, I: IntoIterator<Item = T>>(coeffs: I) -> Self {
        Self::new(coeffs.into_iter().map(Into::into).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.evaluate(&BigInt::from(x))
    }

    /// Horner evaluation in `i128`; `None` on overflow or oversized coefficients.
    pub fn eval_i128(&self, x: i64) -> Option<i128> {
        let x = x as i128;
        let mut acc: i128 = 0;
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(x)?.checked_add(c.to_i128()?)?;
        }
        Some(acc)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `gcd(a_1, ..., a_k)`; the constant term is excluded.
    pub fn content(&self) -> Result<BigInt> {
        match self.degree() {
            None | Some(0) => Err(Error::Domain("content needs degree >= 1".into())),
            Some(_) => Ok(self.coeffs[1..]
                .iter()
                .fold(BigInt::zero(), |g, c| g.gcd(c))),
        }
    }

    /// `h(r + d x) / lam`, requiring every expanded coefficient to be
    /// divisible by `lam`.
    pub fn shift_scale_divide(&self, r: &BigInt, d: &BigInt, lam: &BigInt) -> Result<IntPoly> {
        if !lam.is_positive() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        let k = match self.degree() {
            None => return Ok(IntPoly::zero()),
            Some(k) => k,
        };
        let r_pows = powers(r, k);
        let mut out = Vec::with_capacity(k + 1);
        let mut d_pow = BigInt::one();
        for i in 0..=k {
            // sum_{j >= i} a_j C(j, i) r^{j-i}
            let mut acc = BigInt::zero();
            let mut binom = BigInt::one();
            for j in i..=k {
                if j > i {
                    binom = binom * BigInt::from(j) / BigInt::from(j - i);
                }
                acc += &self.coeffs[j] * &binom * &r_pows[j - i];
            }
            acc *= &d_pow;
            let (q, rem) = acc.div_rem(lam);
            if !rem.is_zero() {
                return Err(Error::NonIntegralQuotient { index: i });
            }
            out.push(q);
            d_pow *= d;
        }
        Ok(IntPoly::new(out))
    }

    pub fn coeff_stats(&self) -> Result<CoeffStats> {
        let leading = self
            .leading()
            .cloned()
            .ok_or_else(|| Error::Domain("zero polynomial has no leading coefficient".into()))?;
        let abs_sum = self.coeffs.iter().map(|c| c.abs()).sum();
        Ok(CoeffStats { leading, abs_sum })
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Coefficients reduced into `[0, m)` for fast modular evaluation.
    pub fn reduce_mod(&self, m: u64) -> ModPoly {
        ModPoly::new(self, m)
    }
}

fn powers(x: &BigInt, n: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = BigInt::one();
    for _ in 0..=n {
        out.push(acc.clone());
        acc *= x;
    }
    out
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { "-" } else { "+" })?;
            }
            first = false;
            let mag = c.abs();
            if i == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// A polynomial reduced modulo a machine-word modulus.
#[derive(Clone, Debug)]
pub struct ModPoly {
    m: u64,
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: &IntPoly, m: u64) -> Self {
        assert!(m >= 1, "modulus must be positive");
        let mb = BigInt::from(m);
        let coeffs = p
            .coeffs
            .iter()
            .map(|c| c.mod_floor(&mb).to_u64().expect("residue fits u64"))
            .collect();
        ModPoly { m, coeffs }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// `p(x) mod m` for `x` already reduced or not.
    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        let m = self.m as u128;
        let x = x as u128 % m;
        let mut acc: u128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c as u128) % m;
        }
        acc as u64
    }

    /// Evaluate at a signed integer.
    #[inline]
    pub fn eval_i64(&self, x: i64) -> u64 {
        self.eval(x.rem_euclid(self.m as i64) as u64)
    }

    /// True if every reduced coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(c.iter().copied())
    }

    #[test]
    fn normalisation() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0]).is_zero());
        assert_eq!(p(&[]).degree(), None);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(p(&[0, 0, 1]).eval_i64(3), BigInt::from(9));
        assert_eq!(p(&[-1, 0, 1]).eval_i64(1), BigInt::from(0));
        let f = p(&[0, 1, 0, 3]);
        assert_eq!(f.eval_i64(-2), BigInt::from(-26));
        // naive power loop
        let naive: i64 = [0i64, 1, 0, 3].iter().enumerate().map(|(i, c)| c * (-2i64).pow(i as u32)).sum();
        assert_eq!(naive, -26);
        assert_eq!(f.eval_i128(-2), Some(-26));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p(&[0, 0, 0, 1]).derivative(), p(&[0, 0, 3]));
        assert!(p(&[7]).derivative().is_zero());
        assert_eq!(p(&[-1, 0, 1]).derivative(), p(&[0, 2]));
    }

    #[test]
    fn content_examples() {
        assert_eq!(p(&[3, 4, 2]).content().unwrap(), BigInt::from(2));
        assert_eq!(p(&[0, 0, 1]).content().unwrap(), BigInt::from(1));
        assert_eq!(p(&[5, 0, 9, 6]).content().unwrap(), BigInt::from(3));
        assert!(p(&[5]).content().is_err());
        assert!(IntPoly::zero().content().is_err());
    }

    #[test]
    fn shift_scale_divide_examples() {
        let b = |x: i64| BigInt::from(x);
        let sq = p(&[0, 0, 1]);
        assert_eq!(sq.shift_scale_divide(&b(0), &b(3), &b(9)).unwrap(), sq);
        assert_eq!(sq.shift_scale_divide(&b(0), &b(1), &b(1)).unwrap(), sq);
        let h = p(&[-1, 0, 1]);
        let h6 = h.shift_scale_divide(&b(-5), &b(6), &b(6)).unwrap();
        assert_eq!(h6, p(&[4, -10, 6]));
        for x in 1..=20 {
            assert_eq!(h6.eval_i64(x) * 6, h.eval_i64(-5 + 6 * x));
        }
        let err = sq.shift_scale_divide(&b(1), &b(3), &b(9)).unwrap_err();
        assert_eq!(err, Error::NonIntegralQuotient { index: 0 });
    }

    #[test]
    fn coeff_stats_examples() {
        let s = p(&[0, 0, 1]).coeff_stats().unwrap();
        assert_eq!((s.leading, s.abs_sum), (BigInt::from(1), BigInt::from(1)));
        let s = p(&[4, -10, 6]).coeff_stats().unwrap();
        assert_eq!((s.leading, s.abs_sum), (BigInt::from(6), BigInt::from(20)));
        let s = p(&[0, 1, 0, -2]).coeff_stats().unwrap();
        assert_eq!((s.leading, s.abs_sum), (BigInt::from(-2), BigInt::from(3)));
        assert!(IntPoly::zero().coeff_stats().is_err());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[4, -10, 6]).to_string(), "6x^2-10x+4");
        assert_eq!(p(&[0, 1, 0, 3]).to_string(), "3x^3+x");
        assert_eq!(p(&[-1, 0, -1]).to_string(), "-x^2-1");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }

    #[test]
    fn modular_eval_matches_exact() {
        let f = p(&[-7, 3, 0, 5]);
        let mp = f.reduce_mod(13);
        for x in -20i64..20 {
            let exact = f.eval_i64(x).mod_floor(&BigInt::from(13));
            assert_eq!(BigInt::from(mp.eval_i64(x)), exact);
        }
    }
}
