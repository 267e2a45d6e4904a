//! Univariate Laurent series over a field with explicit absolute precision.

use std::fmt;

use crate::error::{AlgebraError, Result};
use crate::poly::Poly;
use crate::rat::Rat;
use crate::traits::Field;

/// Precision used for series that are known exactly (finite sums).
pub const EXACT_PREC: i32 = i32::MAX / 4;

const MAX_WORKING_TERMS: i32 = 1 << 20;

/// `Σ_{i} c_i ζ^{start+i} + O(ζ^{prec})`.
#[derive(Clone, PartialEq)]
pub struct Laurent<F: Field> {
    start: i32,
    coeffs: Vec<F>,
    prec: i32,
    zero: F,
}

impl<F: Field> Laurent<F> {
    pub fn zero(sample: &F, prec: i32) -> Self {
        Laurent {
            start: prec,
            coeffs: Vec::new(),
            prec,
            zero: sample.zero_like(),
        }
    }

    pub fn new(start: i32, coeffs: Vec<F>, prec: i32, sample: &F) -> Self {
        let mut s = Laurent {
            start,
            coeffs,
            prec,
            zero: sample.zero_like(),
        };
        s.normalize();
        s
    }

    pub fn monomial(c: F, k: i32, prec: i32) -> Self {
        let z = c.zero_like();
        Laurent::new(k, vec![c], prec, &z)
    }

    pub fn from_poly(p: &Poly<F>, prec: i32) -> Self {
        Laurent::new(0, p.coeffs().to_vec(), prec, p.zero_elem())
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.start).max(0) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.start = self.prec;
        }
    }

    pub fn prec(&self) -> i32 {
        self.prec
    }

    /// Exponent of the first nonzero term, `None` when no term is known.
    pub fn valuation(&self) -> Option<i32> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    pub fn sample(&self) -> &F {
        &self.zero
    }

    /// Coefficient of `ζ^k`; errors when `k` is beyond the known precision.
    pub fn coeff(&self, k: i32) -> Result<F> {
        if k >= self.prec {
            return Err(AlgebraError::InsufficientCap(format!(
                "coefficient {k} requested at precision {}",
                self.prec
            )));
        }
        if k < self.start {
            return Ok(self.zero.clone());
        }
        Ok(self
            .coeffs
            .get((k - self.start) as usize)
            .cloned()
            .unwrap_or_else(|| self.zero.clone()))
    }

    fn get(&self, k: i32) -> F {
        if k < self.start {
            return self.zero.clone();
        }
        self.coeffs
            .get((k - self.start) as usize)
            .cloned()
            .unwrap_or_else(|| self.zero.clone())
    }

    pub fn truncate(&self, prec: i32) -> Self {
        Laurent::new(self.start, self.coeffs.clone(), prec.min(self.prec), &self.zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        let start = self.start.min(o.start);
        let end = (self.start + self.coeffs.len() as i32)
            .max(o.start + o.coeffs.len() as i32)
            .min(prec);
        let c = (start..end).map(|k| self.get(k).add_ref(&o.get(k))).collect();
        Laurent::new(start, c, prec, &self.zero)
    }

    pub fn neg(&self) -> Self {
        Laurent::new(
            self.start,
            self.coeffs.iter().map(|c| c.neg_ref()).collect(),
            self.prec,
            &self.zero,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &F) -> Self {
        Laurent::new(
            self.start,
            self.coeffs.iter().map(|c| c.mul_ref(k)).collect(),
            self.prec,
            &self.zero,
        )
    }

    pub fn scale_rat(&self, k: &Rat) -> Self {
        Laurent::new(
            self.start,
            self.coeffs.iter().map(|c| c.scale(k)).collect(),
            self.prec,
            &self.zero,
        )
    }

    /// Multiply by `ζ^k`.
    pub fn shift(&self, k: i32) -> Self {
        Laurent::new(self.start + k, self.coeffs.clone(), self.prec + k, &self.zero)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let va = self.valuation().unwrap_or(self.prec);
        let vb = o.valuation().unwrap_or(o.prec);
        let prec = (va + o.prec).min(vb + self.prec);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Laurent::zero(&self.zero, prec);
        }
        let start = self.start + o.start;
        let n = ((prec - start).max(0) as usize).min(self.coeffs.len() + o.coeffs.len() - 1);
        let mut c = vec![self.zero.clone(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= n {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                c[i + j] = c[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Laurent::new(start, c, prec, &self.zero)
    }

    pub fn inv(&self) -> Result<Self> {
        let v = self.valuation().ok_or_else(|| {
            AlgebraError::NonUnitLeading("no nonzero coefficient within precision".into())
        })?;
        let rel = self.prec - v;
        if rel > MAX_WORKING_TERMS {
            return Err(AlgebraError::InsufficientCap(
                "truncate an exact series before inverting it".into(),
            ));
        }
        let a0i = self.coeffs[0].inv()?;
        let mut b = vec![self.zero.clone(); rel.max(0) as usize];
        for n in 0..b.len() {
            let mut s = if n == 0 { self.zero.one_like() } else { self.zero.clone() };
            for k in 1..=n {
                if let Some(a) = self.coeffs.get(k) {
                    s = s.sub_ref(&a.mul_ref(&b[n - k]));
                }
            }
            b[n] = s.mul_ref(&a0i);
        }
        Ok(Laurent::new(-v, b, rel - v, &self.zero))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Laurent::monomial(self.zero.one_like(), 0, EXACT_PREC);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&Rat::from_int((self.start + i as i32) as i64)))
            .collect();
        Laurent::new(self.start - 1, c, self.prec - 1, &self.zero)
    }

    /// `self(inner(ζ))` for `inner` of positive valuation; `self` must be a
    /// power series or a Laurent series whose negative part is handled by
    /// inverting `inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let vi = inner.valuation().ok_or_else(|| {
            AlgebraError::NonUnitLeading("inner series vanishes to its precision".into())
        })?;
        if vi < 1 {
            return Err(AlgebraError::NonUnitLeading(
                "inner series must have positive valuation".into(),
            ));
        }
        // precision of the result: terms ζ^{k} of self with k ≥ prec contribute
        // at order ≥ prec·vi
        let mut cap = if self.prec >= 0 {
            self.prec.saturating_mul(vi)
        } else {
            self.prec
        };
        // an error O(ζ^p) in the inner series perturbs w^k at order p + (k-1)·vi
        let kmin = (0..self.coeffs.len())
            .map(|i| self.start + i as i32)
            .find(|&k| k != 0 && !self.get(k).is_zero());
        if let Some(k) = kmin {
            cap = cap.min(inner.prec.saturating_add((k - 1) * vi));
        }
        let mut acc = Laurent::zero(&self.zero, cap);
        if self.coeffs.is_empty() {
            return Ok(acc);
        }
        let top = self.start + self.coeffs.len() as i32;
        let mut p = inner.pow(self.start)?;
        for k in self.start..top {
            let c = self.get(k);
            if !c.is_zero() {
                acc = acc.add(&p.scale(&c).truncate(cap));
            }
            p = p.mul(inner);
        }
        Ok(acc.truncate(cap))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<F: Field> fmt::Debug for Laurent<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, "({c})ζ^{} + ", self.start + i as i32)?;
            }
        }
        write!(f, "O(ζ^{})", self.prec)
    }
}
