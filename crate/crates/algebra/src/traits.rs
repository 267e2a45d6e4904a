//! Coefficient-domain abstractions.
//!
//! Every domain here is a Q-algebra: it can absorb rational scalars. Fields
//! carry their context (extension modulus and so on) inside each element, so
//! constants are produced from an existing element via the `*_like` methods.

use std::fmt;

use crate::error::{AlgebraError, Result};
use crate::rat::Rat;

/// Infallible field arithmetic.
pub trait Field: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rat_like(&self, r: &Rat) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn inv(&self) -> Result<Self>;

    fn div_ref(&self, o: &Self) -> Result<Self> {
        Ok(self.mul_ref(&o.inv()?))
    }

    fn is_one(&self) -> bool {
        self.sub_ref(&self.one_like()).is_zero()
    }

    fn scale(&self, r: &Rat) -> Self {
        self.mul_ref(&self.from_rat_like(r))
    }

    fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        Ok(acc)
    }
}

/// Commutative ring arithmetic whose operations may fail (truncation windows).
pub trait Ring: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn ring_zero_like(&self) -> Self;
    fn ring_one_like(&self) -> Self;
    fn ring_is_zero(&self) -> bool;
    fn try_add(&self, o: &Self) -> Result<Self>;
    fn try_sub(&self, o: &Self) -> Result<Self>;
    fn try_mul(&self, o: &Self) -> Result<Self>;
    fn ring_neg(&self) -> Self;
    /// Inverse of a unit, `NotUnit` otherwise.
    fn try_inv(&self) -> Result<Self>;
}

impl<F: Field> Ring for F {
    fn ring_zero_like(&self) -> Self {
        self.zero_like()
    }
    fn ring_one_like(&self) -> Self {
        self.one_like()
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn try_add(&self, o: &Self) -> Result<Self> {
        Ok(self.add_ref(o))
    }
    fn try_sub(&self, o: &Self) -> Result<Self> {
        Ok(self.sub_ref(o))
    }
    fn try_mul(&self, o: &Self) -> Result<Self> {
        Ok(self.mul_ref(o))
    }
    fn ring_neg(&self) -> Self {
        self.neg_ref()
    }
    fn try_inv(&self) -> Result<Self> {
        self.inv().map_err(|_| AlgebraError::NotUnit(self.to_string()))
    }
}

impl Field for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn one_like(&self) -> Self {
        Rat::one()
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self> {
        Rat::inv(self)
    }
    fn is_one(&self) -> bool {
        Rat::is_one(self)
    }
    fn scale(&self, r: &Rat) -> Self {
        self * r
    }
}
