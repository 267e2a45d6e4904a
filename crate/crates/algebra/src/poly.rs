//! Dense univariate polynomials over a field.

use std::fmt;

use crate::error::{AlgebraError, Result};
use crate::rat::Rat;
use crate::traits::Field;

/// Dense coefficient list, lowest degree first, never with a zero leading entry.
#[derive(Clone, PartialEq)]
pub struct Poly<F: Field> {
    coeffs: Vec<F>,
    zero: F,
}

impl<F: Field> Poly<F> {
    pub fn new(coeffs: Vec<F>, zero: F) -> Self {
        let zero = zero.zero_like();
        let mut p = Poly { coeffs, zero };
        p.trim();
        p
    }

    pub fn zero(sample: &F) -> Self {
        Poly {
            coeffs: Vec::new(),
            zero: sample.zero_like(),
        }
    }

    pub fn constant(c: F) -> Self {
        let zero = c.zero_like();
        Poly::new(vec![c], zero)
    }

    pub fn one(sample: &F) -> Self {
        Poly::constant(sample.one_like())
    }

    /// The monomial `c z^n`.
    pub fn monomial(c: F, n: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero.clone(); n];
        coeffs.push(c);
        Poly::new(coeffs, zero)
    }

    /// The identity polynomial `z`.
    pub fn var(sample: &F) -> Self {
        Poly::monomial(sample.one_like(), 1)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn zero_elem(&self) -> &F {
        &self.zero
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn leading(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i).add_ref(&o.coeff(i))).collect();
        Poly::new(c, self.zero.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i).sub_ref(&o.coeff(i))).collect();
        Poly::new(c, self.zero.clone())
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.neg_ref()).collect(), self.zero.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.zero);
        }
        let mut c = vec![self.zero.clone(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(c, self.zero.clone())
    }

    pub fn scale(&self, k: &F) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.mul_ref(k)).collect(), self.zero.clone())
    }

    pub fn scale_rat(&self, k: &Rat) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.scale(k)).collect(), self.zero.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one(&self.zero);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplication by `z^n`.
    pub fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.zero.clone(); n];
        c.extend(self.coeffs.iter().cloned());
        Poly::new(c, self.zero.clone())
    }

    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(AlgebraError::DivisionByZero)?;
        let lc_inv = d.leading().inv()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(&self.zero), self.clone()));
        }
        let mut q = vec![self.zero.clone(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].mul_ref(&lc_inv);
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = r[i + j].sub_ref(&c.mul_ref(dc));
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(q, self.zero.clone()), Poly::new(r, self.zero.clone())))
    }

    pub fn exact_div(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    /// Monic greatest common divisor; zero only when both inputs are zero.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let one = Poly::one(&self.zero);
        let zero = Poly::zero(&self.zero);
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (one.clone(), zero.clone());
        let (mut t0, mut t1) = (zero, one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = r0.leading().inv().expect("nonzero");
        (r0.scale(&k), s0.scale(&k), t0.scale(&k))
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&Rat::from_int(i as i64)))
            .collect();
        Poly::new(c, self.zero.clone())
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = self.zero.clone();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Poly::zero(&self.zero);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    pub fn map<G: Field>(&self, zero: &G, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect(), zero.zero_like())
    }

    /// Yun's algorithm: pairs `(factor, multiplicity)` whose product is the
    /// monic part of `self`. Characteristic zero is assumed.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.exact_div(&a).expect("gcd divides");
        let mut c = df.exact_div(&a).expect("gcd divides");
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a).expect("gcd divides");
            c = d.exact_div(&a).expect("gcd divides");
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let cs = if cs.contains(['+', ' ']) || (cs.contains('-') && !cs.starts_with('-')) {
                format!("({cs})")
            } else {
                cs
            };
            parts.push(match i {
                0 => cs,
                1 if c.is_one() => var.to_string(),
                1 => format!("{cs}*{var}"),
                _ if c.is_one() => format!("{var}^{i}"),
                _ => format!("{cs}*{var}^{i}"),
            });
        }
        parts.join(" + ")
    }
}

impl Poly<Rat> {
    pub fn from_rats(c: &[Rat]) -> Self {
        Poly::new(c.to_vec(), Rat::zero())
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| Rat::from_int(v)).collect(), Rat::zero())
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("z"))
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("z"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly<Rat> {
        Poly::from_ints(c)
    }

    #[test]
    fn division_round_trip() {
        let a = p(&[1, 0, 3, 4]);
        let b = p(&[2, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn gcd_and_bezout() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 2, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, p(&[1, 1]));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn yun_multiplicities() {
        // (z-1)^2 (z+2)
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]));
        let dec = f.squarefree_decomposition();
        assert_eq!(dec, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 2)]);
    }

    #[test]
    fn compose_and_eval() {
        let f = p(&[1, 1, 1]);
        let g = p(&[0, 2]);
        let h = f.compose(&g);
        assert_eq!(h, p(&[1, 2, 4]));
        assert_eq!(h.eval(&Rat::from_int(1)), Rat::from_int(7));
    }
}
