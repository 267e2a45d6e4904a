//! Exact multivariate formal series with per-variable truncation windows.
//!
//! Each variable carries a floor and an optional cap. Products silently drop
//! monomials above a cap; a surviving nonzero coefficient below a floor is a
//! hard error. Multiplication prunes on the first variable, so layouts should
//! list the grading variable first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{AlgebraError, Result};
use crate::rat::Rat;
use crate::traits::Ring;

pub type Exps = SmallVec<[i32; 8]>;

/// One series variable with its exponent window `[floor, cap]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub floor: i32,
    pub cap: Option<i32>,
}

impl Var {
    /// Nonnegative exponents up to `cap`.
    pub fn capped(name: &str, cap: i32) -> Self {
        Var {
            name: name.into(),
            floor: 0,
            cap: Some(cap),
        }
    }

    /// Polynomial variable with no truncation.
    pub fn free(name: &str) -> Self {
        Var {
            name: name.into(),
            floor: 0,
            cap: None,
        }
    }

    /// Laurent variable with window `[floor, cap]`.
    pub fn window(name: &str, floor: i32, cap: Option<i32>) -> Self {
        Var {
            name: name.into(),
            floor,
            cap,
        }
    }

    fn admits_above(&self, e: i32) -> bool {
        self.cap.is_none_or(|c| e <= c)
    }
}

/// A shared, ordered variable layout.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vars(Arc<Vec<Var>>);

impl Vars {
    pub fn new(vars: Vec<Var>) -> Self {
        Vars(Arc::new(vars))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &Var {
        &self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Var> {
        self.0.iter()
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.0
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.into()))
    }

    pub fn has(&self, name: &str) -> bool {
        self.0.iter().any(|v| v.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|v| v.name.clone()).collect()
    }

    fn same(&self, o: &Vars) -> bool {
        Arc::ptr_eq(&self.0, &o.0) || self.0 == o.0
    }

    /// A copy with one variable's window replaced.
    pub fn with_window(&self, name: &str, floor: i32, cap: Option<i32>) -> Result<Vars> {
        let i = self.index(name)?;
        let mut v = (*self.0).clone();
        v[i].floor = floor;
        v[i].cap = cap;
        Ok(Vars::new(v))
    }
}

impl fmt::Debug for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter().map(|v| &v.name)).finish()
    }
}

/// Serialized term of a series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exp: Vec<i32>,
    pub coef: Rat,
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries {
    vars: Vars,
    terms: BTreeMap<Exps, Rat>,
}

fn underflow(vars: &Vars, e: &Exps) -> Option<AlgebraError> {
    for (i, v) in vars.iter().enumerate() {
        if e[i] < v.floor {
            return Some(AlgebraError::WindowUnderflow {
                var: v.name.clone(),
                exp: e[i] as i64,
                floor: v.floor,
            });
        }
    }
    None
}

fn fits_caps(vars: &Vars, e: &Exps) -> bool {
    vars.iter().zip(e.iter()).all(|(v, &x)| v.admits_above(x))
}

impl TruncatedSeries {
    pub fn zero(vars: &Vars) -> Self {
        TruncatedSeries {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Rat) -> Self {
        let e: Exps = SmallVec::from_elem(0, vars.len());
        Self::monomial(vars, e, c).expect("constants lie inside every window")
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rat::one())
    }

    /// `c · Π v_i^{e_i}`; dropped when above a cap.
    pub fn monomial(vars: &Vars, e: Exps, c: Rat) -> Result<Self> {
        let mut s = Self::zero(vars);
        if c.is_zero() || !fits_caps(vars, &e) {
            return Ok(s);
        }
        if let Some(err) = underflow(vars, &e) {
            return Err(err);
        }
        s.terms.insert(e, c);
        Ok(s)
    }

    /// The variable `name` raised to `power`.
    pub fn var_pow(vars: &Vars, name: &str, power: i32) -> Result<Self> {
        let i = vars.index(name)?;
        let mut e: Exps = SmallVec::from_elem(0, vars.len());
        e[i] = power;
        Self::monomial(vars, e, Rat::one())
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        Self::var_pow(vars, name, 1)
    }

    /// Build from raw terms, dropping zeros and monomials above caps.
    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Exps, Rat)>) -> Result<Self> {
        let mut map: BTreeMap<Exps, Rat> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            if c.is_zero() || !fits_caps(vars, &e) {
                continue;
            }
            *map.entry(e).or_insert_with(Rat::zero) += &c;
        }
        map.retain(|_, c| !c.is_zero());
        for e in map.keys() {
            if let Some(err) = underflow(vars, e) {
                return Err(err);
            }
        }
        Ok(TruncatedSeries {
            vars: vars.clone(),
            terms: map,
        })
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Exps, Rat> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[i32]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Rat {
        let e: Exps = SmallVec::from_elem(0, self.vars.len());
        self.coeff(&e)
    }

    /// The series as a rational number when it is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn compat(&self, o: &Self) -> Result<()> {
        if self.vars.same(&o.vars) {
            Ok(())
        } else {
            Err(AlgebraError::IncompatibleVariables)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compat(o)?;
        let mut out = self.terms.clone();
        for (e, c) in &o.terms {
            let slot = out.entry(e.clone()).or_insert_with(Rat::zero);
            *slot += c;
            if slot.is_zero() {
                out.remove(e);
            }
        }
        Ok(TruncatedSeries {
            vars: self.vars.clone(),
            terms: out,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero(&self.vars);
        }
        TruncatedSeries {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn add_constant(&self, k: &Rat) -> Self {
        self.add(&Self::constant(&self.vars, k.clone())).expect("same layout")
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.compat(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(&self.vars));
        }
        let n = self.vars.len();
        let caps: Vec<Option<i32>> = self.vars.iter().map(|v| v.cap).collect();
        let rhs: Vec<(&Exps, &Rat)> = o.terms.iter().collect();
        let mut acc: HashMap<Exps, Rat> = HashMap::new();
        for (ea, ca) in &self.terms {
            let end = match caps.first().copied().flatten() {
                Some(c) if n > 0 => {
                    let lim = c - ea[0];
                    rhs.partition_point(|(e, _)| e[0] <= lim)
                }
                _ => rhs.len(),
            };
            'pairs: for (eb, cb) in &rhs[..end] {
                let mut e: Exps = SmallVec::with_capacity(n);
                for i in 0..n {
                    let s = ea[i] + eb[i];
                    if let Some(c) = caps[i] {
                        if s > c {
                            continue 'pairs;
                        }
                    }
                    e.push(s);
                }
                let prod = ca * *cb;
                match acc.get_mut(&e) {
                    Some(slot) => *slot += &prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        let mut terms = BTreeMap::new();
        for (e, c) in acc {
            if c.is_zero() {
                continue;
            }
            if let Some(err) = underflow(&self.vars, &e) {
                return Err(err);
            }
            terms.insert(e, c);
        }
        Ok(TruncatedSeries {
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiply by the monomial `Π v_i^{shift_i}`.
    pub fn shift(&self, shift: &[i32]) -> Result<Self> {
        let terms = self.terms.iter().map(|(e, c)| {
            let ne: Exps = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            (ne, c.clone())
        });
        Self::from_terms(&self.vars, terms)
    }

    /// Multiply by `name^k`.
    pub fn shift_var(&self, name: &str, k: i32) -> Result<Self> {
        let i = self.vars.index(name)?;
        let mut s = vec![0; self.vars.len()];
        s[i] = k;
        self.shift(&s)
    }

    fn max_order_hint(&self) -> usize {
        // A series without constant term is nilpotent once every monomial
        // raises a capped variable; this bounds the number of useful powers.
        let total: i64 = self
            .vars
            .iter()
            .map(|v| v.cap.map_or(64, |c| (c as i64 - v.floor as i64).max(0)))
            .sum();
        (total as usize).clamp(1, 4096) + 1
    }

    /// Geometric-series accumulation `Σ_{k≥0} coef(k)·u^k` until `u^k` vanishes.
    fn power_sum(&self, u: &Self, coef: impl Fn(usize) -> Rat) -> Result<Self> {
        let limit = u.max_order_hint();
        let mut acc = Self::constant(&self.vars, coef(0));
        let mut p = Self::one(&self.vars);
        for k in 1..=limit {
            p = p.mul(u)?;
            if p.is_zero() {
                return Ok(acc);
            }
            acc = acc.add(&p.scale(&coef(k)))?;
        }
        Err(AlgebraError::NonUnitLeading(
            "power series did not terminate within the truncation".into(),
        ))
    }

    /// Multiplicative inverse. Laurent monomials invert exactly; otherwise the
    /// constant term must be nonzero and the remainder nilpotent in the caps.
    pub fn inverse(&self) -> Result<Self> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            let ne: Exps = e.iter().map(|x| -x).collect();
            return Self::monomial(&self.vars, ne, c.inv()?);
        }
        let c0 = self.constant_term();
        if c0.is_zero() {
            return self.inverse_by_pivot();
        }
        let c0i = c0.inv()?;
        let u = Self::one(&self.vars).sub(&self.scale(&c0i))?;
        Ok(self.power_sum(&u, |_| Rat::one())?.scale(&c0i))
    }

    /// Factor out the unique term of least total degree in the capped
    /// variables and invert the unit that remains.
    fn inverse_by_pivot(&self) -> Result<Self> {
        let weight = |e: &Exps| -> i64 {
            e.iter()
                .zip(self.vars.iter())
                .filter(|(_, v)| v.cap.is_some())
                .map(|(x, _)| *x as i64)
                .sum()
        };
        let wmin = self.terms.keys().map(weight).min();
        let pivots: Vec<_> = self.terms.iter().filter(|(e, _)| Some(weight(e)) == wmin).collect();
        if pivots.len() != 1 {
            return Err(AlgebraError::NonUnitLeading(self.to_string()));
        }
        let (pe, pc) = pivots[0];
        // work in a layout without floors
        let open = Vars::new(
            self.vars
                .iter()
                .zip(pe.iter())
                .map(|(v, &p)| Var {
                    name: v.name.clone(),
                    floor: i32::MIN / 4,
                    cap: v.cap.map(|c| c - p),
                })
                .collect(),
        );
        let pci = pc.inv()?;
        let shifted = self.terms.iter().map(|(e, c)| {
            let y: Exps = e.iter().zip(pe.iter()).map(|(a, b)| a - b).collect();
            (y, c * &pci)
        });
        let unit = Self::from_terms(&open, shifted)?;
        let ui = unit.inverse()?;
        let back = ui.terms.iter().map(|(e, c)| {
            let y: Exps = e.iter().zip(pe.iter()).map(|(a, b)| a - b).collect();
            (y, c * &pci)
        });
        // valid up to `cap − 2·pivot` in each variable
        Self::from_terms(&self.vars, back)
    }

    /// `log(a)` for constant term 1.
    pub fn log(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(AlgebraError::ConstantTermNotOne(c0.to_string()));
        }
        let u = Self::one(&self.vars).sub(self)?;
        self.power_sum(&u, |k| {
            if k == 0 {
                Rat::zero()
            } else {
                -Rat::new(1, k as i64)
            }
        })
    }

    /// `exp(a)` for zero constant term.
    pub fn exp(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if !c0.is_zero() {
            return Err(AlgebraError::NonUnitLeading(format!(
                "exp needs zero constant term, found {c0}"
            )));
        }
        self.power_sum(self, |k| Rat::factorial(k as u32).inv().expect("nonzero"))
    }

    /// Terms whose exponent of `name` equals `e`, with that exponent reset to 0.
    pub fn slice(&self, name: &str, e: i32) -> Result<Self> {
        let i = self.vars.index(name)?;
        let terms = self.terms.iter().filter(|(x, _)| x[i] == e).map(|(x, c)| {
            let mut y = x.clone();
            y[i] = 0;
            (y, c.clone())
        });
        Self::from_terms(&self.vars, terms)
    }

    /// Keep only the terms where `name` has exponent in `[lo, hi]`.
    pub fn filter_var(&self, name: &str, lo: i32, hi: i32) -> Result<Self> {
        let i = self.vars.index(name)?;
        Ok(TruncatedSeries {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(x, _)| x[i] >= lo && x[i] <= hi)
                .map(|(x, c)| (x.clone(), c.clone()))
                .collect(),
        })
    }

    /// Keep terms whose exponent vector satisfies `pred`.
    pub fn filter_terms(&self, pred: impl Fn(&[i32]) -> bool) -> Self {
        TruncatedSeries {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(x, _)| pred(x))
                .map(|(x, c)| (x.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn min_exp(&self, name: &str) -> Result<Option<i32>> {
        let i = self.vars.index(name)?;
        Ok(self.terms.keys().map(|e| e[i]).min())
    }

    pub fn max_exp(&self, name: &str) -> Result<Option<i32>> {
        let i = self.vars.index(name)?;
        Ok(self.terms.keys().map(|e| e[i]).max())
    }

    /// `∂/∂name`.
    pub fn derivative(&self, name: &str) -> Result<Self> {
        let i = self.vars.index(name)?;
        let terms = self.terms.iter().filter(|(e, _)| e[i] != 0).map(|(e, c)| {
            let mut y = e.clone();
            y[i] -= 1;
            (y, c * &Rat::from_int(e[i] as i64))
        });
        Self::from_terms(&self.vars, terms)
    }

    /// Euler operator `name · ∂/∂name`.
    pub fn euler(&self, name: &str) -> Result<Self> {
        let i = self.vars.index(name)?;
        Ok(self.map_coeffs(|e, c| c * &Rat::from_int(e[i] as i64)))
    }

    /// Apply `f(exponents, coefficient)` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&[i32], &Rat) -> Rat) -> Self {
        TruncatedSeries {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f(e, c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Replace each term `c·m` by `c·m·f(e)` where `f` returns a series.
    pub fn map_terms(&self, f: impl Fn(&[i32]) -> Result<Self>) -> Result<Self> {
        let mut acc = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mono = Self::monomial(&self.vars, e.clone(), c.clone())?;
            acc = acc.add(&mono.mul(&f(e)?)?)?;
        }
        Ok(acc)
    }

    /// Evaluate variable `name` at a rational number.
    pub fn eval_var(&self, name: &str, value: &Rat) -> Result<Self> {
        let i = self.vars.index(name)?;
        let terms = self.terms.iter().map(|(e, c)| {
            let mut y = e.clone();
            y[i] = 0;
            (y, c * &value.pow(e[i]).expect("nonzero value for negative power"))
        });
        if value.is_zero() && self.terms.keys().any(|e| e[i] < 0) {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::from_terms(&self.vars, terms)
    }

    /// Substitute `name := s`, where `s` lives in the same layout.
    pub fn compose(&self, name: &str, s: &Self) -> Result<Self> {
        self.compat(s)?;
        let i = self.vars.index(name)?;
        let mut by_power: BTreeMap<i32, BTreeMap<Exps, Rat>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut y = e.clone();
            y[i] = 0;
            by_power.entry(e[i]).or_default().insert(y, c.clone());
        }
        let mut acc = Self::zero(&self.vars);
        let (lo, hi) = match (by_power.keys().next(), by_power.keys().last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Ok(acc),
        };
        let inv = if lo < 0 { Some(s.inverse()?) } else { None };
        let mut pos = Self::one(&self.vars);
        let mut pos_k = 0;
        for (&k, coeffs) in &by_power {
            let p = if k >= 0 {
                while pos_k < k {
                    pos = pos.mul(s)?;
                    pos_k += 1;
                }
                pos.clone()
            } else {
                inv.as_ref().unwrap().pow((-k) as u32)?
            };
            let cs = TruncatedSeries {
                vars: self.vars.clone(),
                terms: coeffs.clone(),
            };
            acc = acc.add(&cs.mul(&p)?)?;
        }
        let _ = hi;
        Ok(acc)
    }

    /// Solve `f(z) = x` for `z` as a series in `x`.
    ///
    /// `self` must be `z·u(z)` with `u` a unit whose constant term in `z` is
    /// invertible. The result is expressed in variable `x` of the same layout
    /// and is correct up to the cap of `x`.
    pub fn invert_composition(&self, z: &str, x: &str) -> Result<Self> {
        let zi = self.vars.index(z)?;
        let xi = self.vars.index(x)?;
        if self.terms.keys().any(|e| e[xi] != 0) {
            return Err(AlgebraError::NonUnitLeading(format!(
                "function to invert must not involve `{x}`"
            )));
        }
        if self.terms.keys().any(|e| e[zi] < 1) {
            return Err(AlgebraError::NonUnitLeading("input must vanish at z = 0".into()));
        }
        let lead = self.slice(z, 1)?;
        if lead.is_zero() {
            return Err(AlgebraError::NonUnitLeading("zero linear term".into()));
        }
        let u = self.shift_var(z, -1)?;
        let xs = Self::var(&self.vars, x)?;
        let xcap = self.vars.get(xi).cap.ok_or_else(|| {
            AlgebraError::InsufficientCap(format!("variable `{x}` needs a cap for inversion"))
        })?;
        // one order in x per sweep
        let mut g = xs.mul(&lead.inverse()?)?;
        for _ in 0..=xcap {
            let next = xs.mul(&u.compose(z, &g)?.inverse()?)?;
            if next == g {
                break;
            }
            g = next;
        }
        Ok(g)
    }

    /// Exact quotient by `(a − b)` for two variables of the layout.
    ///
    /// The input must be divisible as a polynomial in `a`; the truncation must
    /// not have cut any monomial that the division would need.
    pub fn div_difference(&self, a: &str, b: &str) -> Result<Self> {
        let ai = self.vars.index(a)?;
        let bi = self.vars.index(b)?;
        let mut slices: BTreeMap<i32, BTreeMap<Exps, Rat>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut y = e.clone();
            let k = y[ai];
            y[ai] = 0;
            slices.entry(k).or_default().insert(y, c.clone());
        }
        let mut out: BTreeMap<Exps, Rat> = BTreeMap::new();
        // P = (a - b) Q  =>  Q_{k-1} = P_k + b Q_k, descending in k
        let top = match slices.keys().last() {
            Some(&t) => t,
            None => return Ok(Self::zero(&self.vars)),
        };
        let bottom = *slices.keys().next().unwrap();
        let mut carry: BTreeMap<Exps, Rat> = BTreeMap::new();
        let mut k = top;
        while k > bottom {
            let mut q = slices.remove(&k).unwrap_or_default();
            for (e, c) in carry {
                let slot = q.entry(e).or_insert_with(Rat::zero);
                *slot += &c;
            }
            q.retain(|_, c| !c.is_zero());
            // q is now Q_{k-1}
            for (e, c) in &q {
                let mut y = e.clone();
                y[ai] = k - 1;
                out.insert(y, c.clone());
            }
            carry = q
                .into_iter()
                .map(|(mut e, c)| {
                    e[bi] += 1;
                    (e, c)
                })
                .collect();
            k -= 1;
        }
        let mut rem = slices.remove(&bottom).unwrap_or_default();
        for (e, c) in carry {
            if !fits_caps(&self.vars, &e) {
                continue;
            }
            let slot = rem.entry(e).or_insert_with(Rat::zero);
            *slot += &c;
        }
        if rem.values().any(|c| !c.is_zero()) {
            return Err(AlgebraError::InexactDivision);
        }
        Self::from_terms(&self.vars, out)
    }

    /// Move into another layout, mapping variables by name. Variables absent
    /// from the target must not occur in any term.
    pub fn reembed(&self, target: &Vars) -> Result<Self> {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|w| w.name == v.name))
            .collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let mut y: Exps = SmallVec::from_elem(0, target.len());
            for (i, &x) in e.iter().enumerate() {
                match map[i] {
                    Some(j) => y[j] = x,
                    None if x == 0 => {}
                    None => return Err(AlgebraError::UnknownVariable(self.vars.get(i).name.clone())),
                }
            }
            terms.push((y, c.clone()));
        }
        Self::from_terms(target, terms)
    }

    /// Rename one variable in place of another within the same layout.
    pub fn swap_vars(&self, a: &str, b: &str) -> Result<Self> {
        let ai = self.vars.index(a)?;
        let bi = self.vars.index(b)?;
        let terms = self.terms.iter().map(|(e, c)| {
            let mut y = e.clone();
            y.swap(ai, bi);
            (y, c.clone())
        });
        Self::from_terms(&self.vars, terms)
    }

    /// Apply a permutation of variable positions: exponent at `i` moves to `perm[i]`.
    pub fn permute_positions(&self, perm: &[usize]) -> Result<Self> {
        let terms = self.terms.iter().map(|(e, c)| {
            let mut y = e.clone();
            for (i, &j) in perm.iter().enumerate() {
                y[j] = e[i];
            }
            (y, c.clone())
        });
        Self::from_terms(&self.vars, terms)
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(e, c)| TermRecord {
                exp: e.to_vec(),
                coef: c.clone(),
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_records()).expect("serializable")
    }

    pub fn from_records(vars: &Vars, recs: &[TermRecord]) -> Result<Self> {
        Self::from_terms(
            vars,
            recs.iter().map(|r| (r.exp.iter().copied().collect(), r.coef.clone())),
        )
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| {
                    let n = &self.vars.get(i).name;
                    if x == 1 {
                        n.clone()
                    } else {
                        format!("{n}^{x}")
                    }
                })
                .collect();
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ring for TruncatedSeries {
    fn ring_zero_like(&self) -> Self {
        Self::zero(&self.vars)
    }
    fn ring_one_like(&self) -> Self {
        Self::one(&self.vars)
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn try_add(&self, o: &Self) -> Result<Self> {
        self.add(o)
    }
    fn try_sub(&self, o: &Self) -> Result<Self> {
        self.sub(o)
    }
    fn try_mul(&self, o: &Self) -> Result<Self> {
        self.mul(o)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn try_inv(&self) -> Result<Self> {
        self.inverse()
            .map_err(|_| AlgebraError::NotUnit(self.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_only(cap: i32) -> Vars {
        Vars::new(vec![Var::capped("x", cap)])
    }

    #[test]
    fn difference_of_squares() {
        let v = x_only(2);
        let x = TruncatedSeries::var(&v, "x").unwrap();
        let one = TruncatedSeries::one(&v);
        let p = one.add(&x).unwrap().mul(&one.sub(&x).unwrap()).unwrap();
        assert_eq!(p, one.sub(&x.pow(2).unwrap()).unwrap());
    }

    #[test]
    fn truncates_above_cap() {
        let v = x_only(1);
        let x = TruncatedSeries::var(&v, "x").unwrap();
        let a = TruncatedSeries::one(&v).add(&x).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, TruncatedSeries::one(&v).add(&x.scale(&Rat::from_int(2))).unwrap());
    }

    #[test]
    fn window_underflow_is_an_error() {
        let v = Vars::new(vec![Var::capped("x", 4), Var::window("beta", -1, Some(1))]);
        let t = TruncatedSeries::monomial(&v, SmallVec::from_slice(&[1, -1]), Rat::one()).unwrap();
        assert!(matches!(t.mul(&t), Err(AlgebraError::WindowUnderflow { .. })));
    }

    #[test]
    fn mercator_log() {
        let v = x_only(3);
        let x = TruncatedSeries::var(&v, "x").unwrap();
        let l = x.add_constant(&Rat::one()).log().unwrap();
        let want = x
            .sub(&x.pow(2).unwrap().scale(&Rat::new(1, 2)))
            .unwrap()
            .add(&x.pow(3).unwrap().scale(&Rat::new(1, 3)))
            .unwrap();
        assert_eq!(l, want);
        assert!(TruncatedSeries::one(&v).log().unwrap().is_zero());
    }

    #[test]
    fn log_exp_round_trip() {
        let v = Vars::new(vec![Var::capped("g", 4), Var::capped("x", 4)]);
        let x = TruncatedSeries::var(&v, "x").unwrap();
        let g = TruncatedSeries::var(&v, "g").unwrap();
        let a = x.add(&g.mul(&x.pow(2).unwrap()).unwrap()).unwrap();
        assert_eq!(a.exp().unwrap().log().unwrap(), a);
    }

    #[test]
    fn inversion_of_geometric() {
        let v = Vars::new(vec![Var::capped("x", 3), Var::capped("z", 3)]);
        let z = TruncatedSeries::var(&v, "z").unwrap();
        let f = z.mul(&z.add_constant(&Rat::one()).inverse().unwrap()).unwrap();
        let g = f.invert_composition("z", "x").unwrap();
        let x = TruncatedSeries::var(&v, "x").unwrap();
        let want = x.add(&x.pow(2).unwrap()).unwrap().add(&x.pow(3).unwrap()).unwrap();
        assert_eq!(g, want);
        assert_eq!(f.compose("z", &g).unwrap(), x);
    }

    #[test]
    fn inversion_with_laurent_parameter() {
        let v = Vars::new(vec![
            Var::window("gamma", -1, Some(6)),
            Var::capped("x", 5),
            Var::capped("z", 6),
        ]);
        let z = TruncatedSeries::var(&v, "z").unwrap();
        let gi = TruncatedSeries::var_pow(&v, "gamma", -1).unwrap();
        let f = z
            .mul(&gi)
            .unwrap()
            .mul(&z.add_constant(&Rat::one()).inverse().unwrap())
            .unwrap();
        let g = f.invert_composition("z", "x").unwrap();
        let back = f.compose("z", &g).unwrap();
        assert_eq!(back, TruncatedSeries::var(&v, "x").unwrap());
    }

    #[test]
    fn divides_by_variable_difference() {
        let v = Vars::new(vec![Var::free("a"), Var::free("b")]);
        let a = TruncatedSeries::var(&v, "a").unwrap();
        let b = TruncatedSeries::var(&v, "b").unwrap();
        let p = a.pow(3).unwrap().sub(&b.pow(3).unwrap()).unwrap();
        let q = p.div_difference("a", "b").unwrap();
        let want = a
            .pow(2)
            .unwrap()
            .add(&a.mul(&b).unwrap())
            .unwrap()
            .add(&b.pow(2).unwrap())
            .unwrap();
        assert_eq!(q, want);
        assert!(a.div_difference("a", "b").is_err());
    }

    #[test]
    fn records_sorted_lexicographically() {
        let v = Vars::new(vec![Var::capped("x", 3), Var::capped("y", 3)]);
        let s = TruncatedSeries::from_terms(
            &v,
            [
                (SmallVec::from_slice(&[1, 0]), Rat::new(1, 2)),
                (SmallVec::from_slice(&[0, 2]), Rat::from_int(-3)),
            ],
        )
        .unwrap();
        let j = serde_json::to_string(&s.to_records()).unwrap();
        assert_eq!(j, r#"[{"exp":[0,2],"coef":"-3"},{"exp":[1,0],"coef":"1/2"}]"#);
    }
}
