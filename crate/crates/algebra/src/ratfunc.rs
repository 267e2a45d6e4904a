//! Univariate rational functions `Q(t)` in lowest terms.

use std::fmt;

use crate::error::{AlgebraError, Result};
use crate::poly::Poly;
use crate::rat::Rat;
use crate::traits::Field;

/// `num/den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq)]
pub struct RatFunc {
    num: Poly<Rat>,
    den: Poly<Rat>,
}

impl RatFunc {
    pub fn new(num: Poly<Rat>, den: Poly<Rat>) -> Result<Self> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::from_poly(num));
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g)?;
        let den = den.exact_div(&g)?;
        let lc = den.leading().inv()?;
        Ok(RatFunc {
            num: num.scale(&lc),
            den: den.scale(&lc),
        })
    }

    pub fn from_poly(p: Poly<Rat>) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(&Rat::zero()),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// The indeterminate `t`.
    pub fn param() -> Self {
        RatFunc::from_poly(Poly::var(&Rat::zero()))
    }

    pub fn num(&self) -> &Poly<Rat> {
        &self.num
    }

    pub fn den(&self) -> &Poly<Rat> {
        &self.den
    }

    pub fn as_poly(&self) -> Option<&Poly<Rat>> {
        (self.den.degree() == Some(0)).then_some(&self.num)
    }

    pub fn as_const(&self) -> Option<Rat> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(Rat::zero()),
            (Some(0), Some(0)) => Some(self.num.coeff(0)),
            _ => None,
        }
    }

    pub fn eval(&self, t: &Rat) -> Result<Rat> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.num.eval(t) / d)
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.den.degree() == Some(0) {
            self.num.display_in(var)
        } else {
            format!("({})/({})", self.num.display_in(var), self.den.display_in(var))
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("t"))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("t"))
    }
}

impl Field for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc::constant(Rat::zero())
    }
    fn one_like(&self) -> Self {
        RatFunc::constant(Rat::one())
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        RatFunc::constant(r.clone())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone()).expect("nonzero den");
        }
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RatFunc::new(n, self.den.mul(&o.den)).expect("nonzero den")
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.neg_ref())
    }
    fn mul_ref(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return self.zero_like();
        }
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero den")
    }
    fn neg_ref(&self) -> Self {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }
    fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return self.zero_like();
        }
        RatFunc {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let t = RatFunc::param();
        let one = t.one_like();
        let a = t.mul_ref(&t).sub_ref(&one);
        let b = t.sub_ref(&one);
        let q = a.div_ref(&b).unwrap();
        assert_eq!(q, t.add_ref(&one));
        assert_eq!(q.den().degree(), Some(0));
    }

    #[test]
    fn evaluates() {
        let t = RatFunc::param();
        let f = t.one_like().div_ref(&t.add_ref(&t.one_like())).unwrap();
        assert_eq!(f.eval(&Rat::from_int(1)).unwrap(), Rat::new(1, 2));
        assert!(f.eval(&Rat::from_int(-1)).is_err());
    }
}
