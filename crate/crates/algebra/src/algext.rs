//! Quotient rings `F[θ]/(m(θ))` for a squarefree modulus `m`.

use std::fmt;
use std::sync::Arc;

use crate::error::{AlgebraError, Result};
use crate::poly::Poly;
use crate::rat::Rat;
use crate::traits::Field;

/// Residue class modulo a squarefree polynomial.
///
/// When the modulus is irreducible this is a number field; otherwise division
/// succeeds exactly for the units of the quotient ring.
#[derive(Clone)]
pub struct AlgExt<F: Field> {
    modulus: Arc<Poly<F>>,
    elem: Poly<F>,
}

impl<F: Field> AlgExt<F> {
    pub fn new(modulus: Arc<Poly<F>>, elem: Poly<F>) -> Result<Self> {
        if modulus.degree().unwrap_or(0) == 0 {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let elem = elem.rem(&modulus)?;
        Ok(AlgExt { modulus, elem })
    }

    /// The class of `θ` itself, a root of the modulus.
    pub fn generator(modulus: Arc<Poly<F>>) -> Result<Self> {
        let z = Poly::var(modulus.zero_elem());
        AlgExt::new(modulus, z)
    }

    pub fn from_base(modulus: Arc<Poly<F>>, c: F) -> Self {
        AlgExt {
            modulus,
            elem: Poly::constant(c),
        }
    }

    pub fn modulus(&self) -> &Arc<Poly<F>> {
        &self.modulus
    }

    pub fn elem(&self) -> &Poly<F> {
        &self.elem
    }

    /// The element as a base-field value when it has no `θ` component.
    pub fn as_base(&self) -> Option<F> {
        match self.elem.degree() {
            None => Some(self.modulus.zero_elem().clone()),
            Some(0) => Some(self.elem.coeff(0)),
            _ => None,
        }
    }

    fn same_ring(&self, o: &Self) {
        assert!(
            Arc::ptr_eq(&self.modulus, &o.modulus) || self.modulus == o.modulus,
            "{}",
            AlgebraError::ModulusMismatch
        );
    }

    fn wrap(&self, elem: Poly<F>) -> Self {
        AlgExt {
            modulus: self.modulus.clone(),
            elem,
        }
    }

    /// Trace of the multiplication-by-self map over the base field.
    pub fn trace(&self) -> F {
        let n = self.modulus.degree().unwrap_or(0);
        let zero = self.modulus.zero_elem().clone();
        let mut acc = zero.clone();
        let mut basis = Poly::one(&zero);
        let theta = Poly::var(&zero);
        for i in 0..n {
            let col = self.elem.mul(&basis).rem(&self.modulus).expect("nonzero modulus");
            acc = acc.add_ref(&col.coeff(i));
            basis = basis.mul(&theta).rem(&self.modulus).expect("nonzero modulus");
        }
        acc
    }
}

impl<F: Field> PartialEq for AlgExt<F> {
    fn eq(&self, o: &Self) -> bool {
        self.elem == o.elem && (Arc::ptr_eq(&self.modulus, &o.modulus) || self.modulus == o.modulus)
    }
}

impl<F: Field> fmt::Display for AlgExt<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.elem.display_in("θ"))
    }
}

impl<F: Field> fmt::Debug for AlgExt<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod ({})", self.elem.display_in("θ"), self.modulus.display_in("θ"))
    }
}

impl<F: Field> Field for AlgExt<F> {
    fn zero_like(&self) -> Self {
        self.wrap(Poly::zero(self.modulus.zero_elem()))
    }
    fn one_like(&self) -> Self {
        self.wrap(Poly::one(self.modulus.zero_elem()))
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        let c = self.modulus.zero_elem().from_rat_like(r);
        self.wrap(Poly::constant(c))
    }
    fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self.same_ring(o);
        self.wrap(self.elem.add(&o.elem))
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self.same_ring(o);
        self.wrap(self.elem.sub(&o.elem))
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.same_ring(o);
        self.wrap(self.elem.mul(&o.elem).rem(&self.modulus).expect("nonzero modulus"))
    }
    fn neg_ref(&self) -> Self {
        self.wrap(self.elem.neg())
    }
    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let (g, s, _) = self.elem.ext_gcd(&self.modulus);
        if g.degree() != Some(0) {
            return Err(AlgebraError::NotUnit(self.to_string()));
        }
        Ok(self.wrap(s.rem(&self.modulus)?))
    }
    fn scale(&self, r: &Rat) -> Self {
        self.wrap(self.elem.scale_rat(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_arithmetic() {
        let m = Arc::new(Poly::from_ints(&[-2, 0, 1]));
        let t = AlgExt::generator(m).unwrap();
        let two = t.from_rat_like(&Rat::from_int(2));
        assert_eq!(t.mul_ref(&t), two);
        let x = t.add_ref(&t.one_like());
        let y = x.inv().unwrap();
        assert!(x.mul_ref(&y).is_one());
        assert_eq!(t.trace(), Rat::zero());
        assert_eq!(two.trace(), Rat::from_int(4));
    }

    #[test]
    fn zero_divisors_are_rejected() {
        // z^2 - 1 is squarefree but reducible; θ - 1 is a zero divisor.
        let m = Arc::new(Poly::from_ints(&[-1, 0, 1]));
        let t = AlgExt::generator(m).unwrap();
        let d = t.sub_ref(&t.one_like());
        assert!(matches!(d.inv(), Err(AlgebraError::NotUnit(_))));
    }
}
