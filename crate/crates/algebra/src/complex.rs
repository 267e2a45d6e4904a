//! Arbitrary-precision complex numbers and a polynomial root finder.

use std::fmt;
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;

use crate::error::{AlgebraError, Result};
use crate::poly::Poly;
use crate::rat::Rat;
use crate::traits::Field;

pub type Float = FBig<HalfEven, 2>;

/// Bits needed for `digits` decimal digits.
pub fn bits_for_digits(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 8
}

fn big_int(n: &num_bigint::BigInt) -> IBig {
    IBig::from_str(&n.to_string()).expect("decimal integer")
}

pub fn float_from_rat(r: &Rat, bits: usize) -> Float {
    let n = Float::from(big_int(r.numer())).with_precision(bits).value();
    let d = Float::from(big_int(r.denom())).with_precision(bits).value();
    n / d
}

fn zero_at(bits: usize) -> Float {
    Float::ZERO.with_precision(bits).value()
}

/// `re + i·im` at a fixed binary precision.
#[derive(Clone)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
    bits: usize,
}

impl BigComplex {
    pub fn new(re: Float, im: Float, bits: usize) -> Self {
        BigComplex {
            re: re.with_precision(bits).value(),
            im: im.with_precision(bits).value(),
            bits,
        }
    }

    pub fn from_rat(r: &Rat, bits: usize) -> Self {
        BigComplex {
            re: float_from_rat(r, bits),
            im: zero_at(bits),
            bits,
        }
    }

    pub fn from_parts(re: &Rat, im: &Rat, bits: usize) -> Self {
        BigComplex {
            re: float_from_rat(re, bits),
            im: float_from_rat(im, bits),
            bits,
        }
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        let re = Float::try_from(re).expect("finite").with_precision(bits).value();
        let im = Float::try_from(im).expect("finite").with_precision(bits).value();
        BigComplex { re, im, bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn norm_sqr(&self) -> Float {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64().value()
    }

    /// `log2 |z|`, `-inf` at zero.
    pub fn log2_abs(&self) -> f64 {
        let n = self.norm_sqr();
        if n == zero_at(self.bits) {
            return f64::NEG_INFINITY;
        }
        let s = n.to_f64().value();
        if s.is_finite() && s > 0.0 {
            return 0.5 * s.log2();
        }
        // extreme magnitudes: use the binary exponent
        let repr = n.repr();
        let digits = repr.significand().to_string().trim_start_matches('-').len() as f64;
        let e = repr.exponent() as f64 + digits * std::f64::consts::LOG2_10;
        0.5 * e
    }

    pub fn re_f64(&self) -> f64 {
        self.re.to_f64().value()
    }

    pub fn im_f64(&self) -> f64 {
        self.im.to_f64().value()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
            bits: self.bits,
        }
    }

    /// Sort key: real part, then imaginary part.
    pub fn lex_cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.re
            .partial_cmp(&o.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(self.im.partial_cmp(&o.im).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// Decimal rendering with `digits` significant digits per component.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let fmt = |x: &Float| -> String {
            let d = x.to_decimal().value();
            let d = d.with_precision(digits).value();
            d.to_string()
        };
        format!("{} + {}i", fmt(&self.re), fmt(&self.im))
    }
}

impl PartialEq for BigComplex {
    fn eq(&self, o: &Self) -> bool {
        self.re == o.re && self.im == o.im
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(20))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(20))
    }
}

impl Field for BigComplex {
    fn zero_like(&self) -> Self {
        BigComplex::from_rat(&Rat::zero(), self.bits)
    }
    fn one_like(&self) -> Self {
        BigComplex::from_rat(&Rat::one(), self.bits)
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        BigComplex::from_rat(r, self.bits)
    }
    fn is_zero(&self) -> bool {
        self.re == zero_at(self.bits) && self.im == zero_at(self.bits)
    }
    fn add_ref(&self, o: &Self) -> Self {
        BigComplex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            bits: self.bits,
        }
    }
    fn sub_ref(&self, o: &Self) -> Self {
        BigComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
            bits: self.bits,
        }
    }
    fn mul_ref(&self, o: &Self) -> Self {
        BigComplex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
            bits: self.bits,
        }
    }
    fn neg_ref(&self) -> Self {
        BigComplex {
            re: -self.re.clone(),
            im: -self.im.clone(),
            bits: self.bits,
        }
    }
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(BigComplex {
            re: &self.re / &n,
            im: -(&self.im / &n),
            bits: self.bits,
        })
    }
}

/// All complex roots of a squarefree rational polynomial by Aberth iteration,
/// sorted by (real, imaginary).
pub fn complex_roots(p: &Poly<Rat>, bits: usize) -> Result<Vec<BigComplex>> {
    let n = p.degree().ok_or(AlgebraError::ZeroPolynomial)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let work = bits + 32;
    let coeffs: Vec<BigComplex> = p.coeffs().iter().map(|c| BigComplex::from_rat(c, work)).collect();
    let dcoeffs: Vec<BigComplex> = p
        .derivative()
        .coeffs()
        .iter()
        .map(|c| BigComplex::from_rat(c, work))
        .collect();
    let horner = |cs: &[BigComplex], z: &BigComplex| -> BigComplex {
        let mut acc = z.zero_like();
        for c in cs.iter().rev() {
            acc = acc.mul_ref(z).add_ref(c);
        }
        acc
    };
    // Cauchy bound for the initial circle
    let lead = p.leading().to_f64().abs();
    let radius = 1.0
        + p.coeffs()[..n]
            .iter()
            .map(|c| c.to_f64().abs() / lead)
            .fold(0.0f64, f64::max);
    let mut z: Vec<BigComplex> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            BigComplex::from_f64(radius * t.cos(), radius * t.sin(), work)
        })
        .collect();
    let tol = -(bits as f64) + 4.0;
    for _ in 0..(20 * bits + 400) {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..n {
            let pv = horner(&coeffs, &z[k]);
            if pv.is_zero() {
                continue;
            }
            let dv = horner(&dcoeffs, &z[k]);
            let ratio = pv.div_ref(&dv)?;
            let mut s = z[k].zero_like();
            for j in 0..n {
                if j != k {
                    s = s.add_ref(&z[k].sub_ref(&z[j]).inv()?);
                }
            }
            let denom = z[k].one_like().sub_ref(&ratio.mul_ref(&s));
            let w = ratio.div_ref(&denom)?;
            let rel = w.log2_abs() - z[k].log2_abs().max(0.0);
            worst = worst.max(rel);
            z[k] = z[k].sub_ref(&w);
        }
        if worst < tol {
            let mut out: Vec<BigComplex> = z
                .into_iter()
                .map(|c| BigComplex::new(c.re, c.im, bits))
                .collect();
            out.sort_by(|a, b| a.lex_cmp(b));
            return Ok(out);
        }
    }
    Err(AlgebraError::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_z_squared_plus_one() {
        let r = complex_roots(&Poly::from_ints(&[1, 0, 1]), 200).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].im_f64() + 1.0).abs() < 1e-30);
        assert!((r[1].im_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn high_precision_sqrt_two() {
        let bits = bits_for_digits(128);
        let r = complex_roots(&Poly::from_ints(&[-2, 0, 1]), bits).unwrap();
        let sq = r[1].mul_ref(&r[1]);
        let err = sq.sub_ref(&BigComplex::from_rat(&Rat::from_int(2), bits));
        assert!(err.log2_abs() < -(bits as f64) + 8.0);
    }

    #[test]
    fn arithmetic_inverse() {
        let z = BigComplex::from_parts(&Rat::new(1, 3), &Rat::new(-2, 5), 300);
        let w = z.inv().unwrap();
        let one = z.mul_ref(&w);
        assert!(one.sub_ref(&z.one_like()).log2_abs() < -290.0);
    }
}
