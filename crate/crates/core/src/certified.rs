//! Truncated series paired with per-variable exactness bounds.
//!
//! A coefficient is trusted only when every exponent is at most the bound of
//! its variable. Products propagate bounds through the least exponent of the
//! other factor, so missing high-order terms never leak into reported data.

use std::collections::BTreeMap;

use whr_algebra::{Rat, TruncatedSeries};

use crate::error::{CoreError, Result};

#[derive(Clone, Debug)]
pub struct CertSeries {
    pub series: TruncatedSeries,
    bounds: BTreeMap<String, i32>,
}

fn min_opt(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl CertSeries {
    /// Exact up to the layout caps.
    pub fn exact(series: TruncatedSeries) -> Self {
        CertSeries {
            series,
            bounds: BTreeMap::new(),
        }
    }

    pub fn zero_like(&self) -> Self {
        CertSeries::exact(TruncatedSeries::zero(self.series.vars()))
    }

    /// Tighten the bound of `name` to `value`.
    pub fn limit(mut self, name: &str, value: i32) -> Self {
        let cur = self.bound(name);
        let v = min_opt(cur, Some(value)).expect("some");
        self.bounds.insert(name.to_string(), v);
        self
    }

    /// Effective exactness bound of a variable (`None` means unbounded).
    pub fn bound(&self, name: &str) -> Option<i32> {
        let cap = self
            .series
            .vars()
            .iter()
            .find(|v| v.name == name)
            .and_then(|v| v.cap);
        min_opt(cap, self.bounds.get(name).copied())
    }

    fn names(&self) -> Vec<String> {
        self.series.vars().names()
    }

    /// Least exponent that an untrusted term could carry.
    fn least_possible(&self, name: &str) -> Result<Option<i32>> {
        let actual = self.series.min_exp(name)?;
        Ok(min_opt(actual, self.bound(name).map(|b| b + 1)))
    }

    fn combine_additive(&self, o: &Self, series: TruncatedSeries) -> Self {
        let mut bounds = BTreeMap::new();
        for n in self.names() {
            if let Some(b) = min_opt(self.bound(&n), o.bound(&n)) {
                bounds.insert(n, b);
            }
        }
        CertSeries { series, bounds }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(self.combine_additive(o, self.series.add(&o.series)?))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(self.combine_additive(o, self.series.sub(&o.series)?))
    }

    pub fn neg(&self) -> Self {
        CertSeries {
            series: self.series.neg(),
            bounds: self.bounds.clone(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        CertSeries {
            series: self.series.scale(k),
            bounds: self.bounds.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let series = self.series.mul(&o.series)?;
        let mut bounds = BTreeMap::new();
        for n in self.names() {
            let left = match (self.bound(&n), o.least_possible(&n)?) {
                (Some(b), Some(m)) => Some(b + m),
                (Some(_), None) => None,
                (None, _) => None,
            };
            let right = match (o.bound(&n), self.least_possible(&n)?) {
                (Some(b), Some(m)) => Some(b + m),
                _ => None,
            };
            if let Some(b) = min_opt(left, right) {
                bounds.insert(n, b);
            }
        }
        Ok(CertSeries { series, bounds })
    }

    /// Multiply by a series that is exact everywhere it is stored.
    pub fn mul_exact(&self, o: &TruncatedSeries) -> Result<Self> {
        self.mul(&CertSeries::exact(o.clone()))
    }

    /// Multiply by `Π v_i^{k_i}`; bounds move with the exponents.
    pub fn shift_var(&self, name: &str, k: i32) -> Result<Self> {
        let mut out = CertSeries {
            series: self.series.shift_var(name, k)?,
            bounds: self.bounds.clone(),
        };
        if let Some(b) = self.bound(name) {
            out.bounds.insert(name.to_string(), b + k);
        }
        Ok(out)
    }

    pub fn euler(&self, name: &str) -> Result<Self> {
        Ok(CertSeries {
            series: self.series.euler(name)?,
            bounds: self.bounds.clone(),
        })
    }

    /// The stored terms inside the trusted box.
    pub fn trusted(&self) -> TruncatedSeries {
        let bounds: Vec<Option<i32>> = self.names().iter().map(|n| self.bound(n)).collect();
        self.series
            .filter_terms(|e| e.iter().zip(&bounds).all(|(x, b)| b.is_none_or(|b| *x <= b)))
    }

    pub fn is_trusted_zero(&self) -> bool {
        self.trusted().is_zero()
    }

    /// Coefficient of `name^e` (exponent reset to zero), refusing untrusted degrees.
    pub fn slice(&self, name: &str, e: i32) -> Result<Self> {
        if let Some(b) = self.bound(name) {
            if e > b {
                return Err(CoreError::InsufficientCap(format!(
                    "coefficient of {name}^{e} requested, exact only to {name}^{b}"
                )));
            }
        }
        let mut bounds = self.bounds.clone();
        bounds.remove(name);
        Ok(CertSeries {
            series: self.series.slice(name, e)?,
            bounds,
        })
    }

    /// The first trusted nonzero term, for diagnostics.
    pub fn first_trusted_term(&self) -> Option<String> {
        let t = self.trusted();
        let (e, c) = t.terms().iter().next()?;
        let mono: Vec<String> = t
            .vars()
            .iter()
            .zip(e.iter())
            .filter(|(_, x)| **x != 0)
            .map(|(v, x)| format!("{}^{}", v.name, x))
            .collect();
        Some(format!("{c}·{}", mono.join("·")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use whr_algebra::{Var, Vars};

    #[test]
    fn product_bound_uses_least_exponent() {
        let vars = Vars::new(vec![Var::window("b", -5, Some(10))]);
        let a = CertSeries::exact(TruncatedSeries::var_pow(&vars, "b", -2).unwrap()).limit("b", 4);
        let b = CertSeries::exact(TruncatedSeries::one(&vars).add(&TruncatedSeries::var(&vars, "b").unwrap()).unwrap())
            .limit("b", 3);
        let p = a.mul(&b).unwrap();
        // a missing from b^5, b missing from b^4: min(4 + 0, 3 − 2)
        assert_eq!(p.bound("b"), Some(1));
    }

    #[test]
    fn slice_refuses_untrusted() {
        let vars = Vars::new(vec![Var::capped("x", 6)]);
        let a = CertSeries::exact(TruncatedSeries::var(&vars, "x").unwrap()).limit("x", 2);
        assert!(a.slice("x", 3).is_err());
        assert!(a.slice("x", 1).is_ok());
    }
}
