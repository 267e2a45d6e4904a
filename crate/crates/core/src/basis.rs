//! The adapted bases `Ψ^±_k`, the recursion operators `R_± = γ x G(±βD)`,
//! the pairing, the quantum spectral curve and the banded infinite systems.

use std::collections::BTreeMap;

use serde::Serialize;
use whr_algebra::{Exps, Poly, Rat, TruncatedSeries, Var, Vars};

use crate::certified::CertSeries;
use crate::config::WeightConfig;
use crate::error::{CoreError, Result};
use crate::partitions::complete_h_all;
use crate::tau::{g_at_multiple, rho};

pub const BETA: &str = "beta";
pub const GAMMA: &str = "gamma";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BasisVector {
    pub sign: Sign,
    pub k: i32,
    pub value: CertSeries,
}

/// Exponent windows of a basis layout.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub x_cap: i32,
    /// Lowest basis index that will be built.
    pub k_min: i32,
    /// `None` keeps β polynomial; negative indices then need a cap.
    pub beta_cap: Option<i32>,
}

impl Window {
    fn x_floor(&self) -> i32 {
        2 * self.k_min.min(0) - 8
    }
    fn beta_floor(&self) -> i32 {
        -2 * (self.x_cap - self.k_min.min(0)) - 4
    }
}

/// Layout `xs…, beta, gamma, s-symbols…` with the first x variable leading.
pub fn basis_layout(cfg: &WeightConfig, xs: &[&str], w: Window) -> Vars {
    let mut v: Vec<Var> = xs
        .iter()
        .map(|x| Var::window(x, w.x_floor(), Some(w.x_cap)))
        .collect();
    v.push(Var::window(BETA, w.beta_floor(), w.beta_cap));
    v.push(Var::window(GAMMA, 2 * w.x_floor() - 2, None));
    for s in cfg.s_symbols() {
        v.push(Var::window(&s, -64, None));
    }
    Vars::new(v)
}

pub(crate) fn beta_poly(p: &Poly<Rat>, vars: &Vars) -> Result<TruncatedSeries> {
    let ib = vars.index(BETA)?;
    let terms = p.coeffs().iter().enumerate().map(|(i, c)| {
        let mut e = Exps::from_elem(0, vars.len());
        e[ib] = i as i32;
        (e, c.clone())
    });
    Ok(TruncatedSeries::from_terms(vars, terms)?)
}

/// `num(β)/den(β)` with `den(0) = 1`, exact up to the β cap.
pub(crate) fn beta_quotient(num: &Poly<Rat>, den: &Poly<Rat>, vars: &Vars) -> Result<CertSeries> {
    let n = beta_poly(num, vars)?;
    let cap = vars.get(vars.index(BETA)?).cap;
    if den.degree() <= Some(0) {
        let c = den.coeff(0);
        let s = CertSeries::exact(n.scale(&c.inv()?));
        return Ok(s);
    }
    if cap.is_none() {
        return Err(CoreError::InsufficientCap(
            "a β-series expansion needs a β cap".into(),
        ));
    }
    let d = beta_poly(den, vars)?.inverse()?;
    Ok(CertSeries::exact(n.mul(&d)?))
}

/// Builds adapted-basis data in one layout.
#[derive(Clone, Debug)]
pub struct BasisContext {
    pub cfg: WeightConfig,
    pub vars: Vars,
    pub x: String,
    pub window: Window,
    h_plus: Vec<TruncatedSeries>,
    h_minus: Vec<TruncatedSeries>,
}

impl BasisContext {
    /// A layout with the single variable `x`.
    pub fn standard(cfg: &WeightConfig, window: Window) -> Result<Self> {
        let vars = basis_layout(cfg, &["x"], window);
        Self::new(cfg, vars, "x", window)
    }

    pub fn new(cfg: &WeightConfig, vars: Vars, x: &str, window: Window) -> Result<Self> {
        let inv_beta = TruncatedSeries::var_pow(&vars, BETA, -1)?;
        let mut t = Vec::new();
        for i in 1..=cfg.l() {
            t.push(cfg.s_series(i, &vars)?.mul(&inv_beta)?);
        }
        let jmax = (window.x_cap - window.k_min).max(0) as usize;
        let h_plus = complete_h_all(jmax, &t, &vars)?;
        let tn: Vec<TruncatedSeries> = t.iter().map(|s| s.neg()).collect();
        let h_minus = complete_h_all(jmax, &tn, &vars)?;
        Ok(BasisContext {
            cfg: cfg.clone(),
            vars,
            x: x.to_string(),
            window,
            h_plus,
            h_minus,
        })
    }

    /// `h_j(±β^{−1}s)`.
    pub fn h(&self, sign: Sign, j: usize) -> &TruncatedSeries {
        match sign {
            Sign::Plus => &self.h_plus[j],
            Sign::Minus => &self.h_minus[j],
        }
    }

    fn monomial(&self, x: i32, gamma: i32) -> Result<TruncatedSeries> {
        let mut e = Exps::from_elem(0, self.vars.len());
        e[self.vars.index(&self.x)?] = x;
        e[self.vars.index(GAMMA)?] = gamma;
        Ok(TruncatedSeries::monomial(&self.vars, e, Rat::one())?)
    }

    /// `ρ_n` (`inverse = false`) or `ρ_n^{−1}` as a series.
    pub fn rho_series(&self, n: i32, inverse: bool) -> Result<CertSeries> {
        let (_, b) = rho(n, &self.cfg)?;
        let (num, den, g) = if inverse {
            (b.den(), b.num(), -n)
        } else {
            (b.num(), b.den(), n)
        };
        let beta = beta_quotient(num, den, &self.vars)?;
        let mut e = Exps::from_elem(0, self.vars.len());
        e[self.vars.index(GAMMA)?] = g;
        let gam = TruncatedSeries::monomial(&self.vars, e, Rat::one())?;
        beta.mul_exact(&gam)
    }

    /// `Ψ^+_k = γ Σ_j ρ_{j+k−1} h_j(β^{−1}s) x^{j+k}`,
    /// `Ψ^−_k = Σ_j ρ_{−j−k}^{−1} h_j(−β^{−1}s) x^{j+k}`.
    pub fn psi(&self, sign: Sign, k: i32) -> Result<BasisVector> {
        if k < self.window.k_min {
            return Err(CoreError::WindowTooNarrow {
                lo: self.window.k_min,
                hi: self.window.x_cap,
                reason: format!("Ψ index {k} below the layout window"),
            });
        }
        let mut acc = CertSeries::exact(TruncatedSeries::zero(&self.vars));
        let top = self.window.x_cap - k;
        for j in 0..=top.max(-1) {
            let (coef, h) = match sign {
                Sign::Plus => (
                    self.rho_series(j + k - 1, false)?.shift_var(GAMMA, 1)?,
                    &self.h_plus[j as usize],
                ),
                Sign::Minus => (self.rho_series(-j - k, true)?, &self.h_minus[j as usize]),
            };
            let term = coef.mul_exact(h)?.mul_exact(&self.monomial(j + k, 0)?)?;
            acc = acc.add(&term)?;
        }
        let mut value = acc;
        if let Some(c) = self.window.beta_cap {
            value = value.limit(BETA, c - top.max(0));
        }
        Ok(BasisVector { sign, k, value })
    }

    /// `R_±^{±1}` applied diagonally in the x-grading: `x^n ↦ γ x^{n+1} G(±βn)`
    /// and its inverse `x^n ↦ γ^{−1} x^{n−1} / G(±β(n−1))`.
    pub fn apply_r(&self, sign: Sign, exponent: i32, v: &CertSeries) -> Result<CertSeries> {
        let g = self.cfg.g_poly()?;
        let ix = self.vars.index(&self.x)?;
        let mut by_x: BTreeMap<i32, TruncatedSeries> = BTreeMap::new();
        for (e, c) in v.series.terms() {
            let mut y = e.clone();
            y[ix] = 0;
            let t = TruncatedSeries::monomial(&self.vars, y, c.clone())?;
            let slot = by_x
                .entry(e[ix])
                .or_insert_with(|| TruncatedSeries::zero(&self.vars));
            *slot = slot.add(&t)?;
        }
        let mut out = v.zero_like();
        let mut beta_bound: Option<i32> = v.bound(BETA);
        for (n, coeff) in by_x {
            let (shift, factor) = match exponent {
                1 => (1, CertSeries::exact(beta_poly(&g_at_multiple(&g, sign.factor() * n as i64), &self.vars)?)),
                -1 => {
                    let d = g_at_multiple(&g, sign.factor() * (n as i64 - 1));
                    let q = beta_quotient(&Poly::one(&Rat::zero()), &d, &self.vars)?;
                    if d.degree() > Some(0) {
                        let cap = self.window.beta_cap.expect("checked by beta_quotient");
                        let least = coeff.min_exp(BETA)?.unwrap_or(0);
                        beta_bound = Some(beta_bound.map_or(cap + least, |b| b.min(cap + least)));
                    }
                    (-1, q)
                }
                _ => {
                    return Err(CoreError::Config(format!(
                        "R exponent must be ±1, got {exponent}"
                    )))
                }
            };
            let term = factor
                .mul_exact(&coeff)?
                .mul_exact(&self.monomial(n + shift, shift)?)?;
            out = out.add(&term)?;
        }
        if let Some(b) = v.bound(&self.x) {
            out = out.limit(&self.x, b + exponent);
        }
        if let Some(b) = beta_bound {
            out = out.limit(BETA, b);
        }
        Ok(out)
    }

    pub fn apply_r_vec(&self, sign: Sign, exponent: i32, v: &BasisVector) -> Result<BasisVector> {
        Ok(BasisVector {
            sign: v.sign,
            k: v.k + exponent,
            value: self.apply_r(sign, exponent, &v.value)?,
        })
    }

    /// Coefficient of `x^1` in `a·b`, the formal residue of `a b dx/x²`.
    pub fn pairing(&self, a: &BasisVector, b: &BasisVector) -> Result<CertSeries> {
        a.value.mul(&b.value)?.slice(&self.x, 1)
    }

    /// `βD` on a series in `x`.
    pub fn beta_d(&self, v: &CertSeries) -> Result<CertSeries> {
        v.euler(&self.x)?.shift_var(BETA, 1)
    }

    /// `(βD − S(R₊))Ψ⁺₀` or `(βD + S(R₋))Ψ⁻₀`.
    pub fn quantum_curve_residual(&self, sign: Sign) -> Result<CertSeries> {
        let psi0 = self.psi(sign, 0)?.value;
        let mut acc = self.beta_d(&psi0)?;
        let mut power = psi0;
        for k in 1..=self.cfg.l() {
            power = self.apply_r(sign, 1, &power)?;
            let coeff = self.cfg.s_series(k, &self.vars)?.scale(&Rat::from_int(k as i64));
            let term = power.mul_exact(&coeff)?;
            acc = match sign {
                Sign::Plus => acc.sub(&term)?,
                Sign::Minus => acc.add(&term)?,
            };
        }
        Ok(acc)
    }

    /// Row `m` of `P^±`: `βDΨ⁺_m = mβΨ⁺_m + Σ_j j s_j Ψ⁺_{m+j}` and
    /// `−βDΨ⁻_m = −mβΨ⁻_m + Σ_j j s_j Ψ⁻_{m+j}`.
    pub fn p_row(&self, sign: Sign, m: i32) -> Result<BTreeMap<i32, TruncatedSeries>> {
        let mut row = BTreeMap::new();
        let beta = TruncatedSeries::var(&self.vars, BETA)?;
        row.insert(m, beta.scale(&Rat::from_int(sign.factor() * m as i64)));
        for j in 1..=self.cfg.l() {
            let s = self.cfg.s_series(j, &self.vars)?.scale(&Rat::from_int(j as i64));
            if !s.is_zero() {
                row.insert(m + j as i32, s);
            }
        }
        Ok(row)
    }

    /// Row `m` of `G(P^±)`, so that row `k` of `Q^±` is row `k−1` here.
    pub fn g_of_p_row(&self, sign: Sign, m: i32) -> Result<BTreeMap<i32, TruncatedSeries>> {
        let g = self.cfg.g_poly()?.coeffs().to_vec();
        let mut power: BTreeMap<i32, TruncatedSeries> =
            BTreeMap::from([(m, TruncatedSeries::one(&self.vars))]);
        let mut acc: BTreeMap<i32, TruncatedSeries> = BTreeMap::new();
        for (i, gi) in g.iter().enumerate() {
            if i > 0 {
                let mut next: BTreeMap<i32, TruncatedSeries> = BTreeMap::new();
                for (col, val) in &power {
                    for (c2, p) in self.p_row(sign, *col)? {
                        let t = val.mul(&p)?;
                        let slot = next.entry(c2).or_insert_with(|| TruncatedSeries::zero(&self.vars));
                        *slot = slot.add(&t)?;
                    }
                }
                power = next;
            }
            if gi.is_zero() {
                continue;
            }
            for (col, val) in &power {
                let slot = acc.entry(*col).or_insert_with(|| TruncatedSeries::zero(&self.vars));
                *slot = slot.add(&val.scale(gi))?;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(acc)
    }

    /// Residuals of `βD Ψ⃗ = P Ψ⃗` and `(γx)^{−1} Ψ⃗ = Q Ψ⃗` on rows `k0..=k1`.
    pub fn infinite_system_window(&self, sign: Sign, k0: i32, k1: i32) -> Result<WindowReport> {
        let lm = (self.cfg.l() * self.cfg.m()) as i32;
        if k1 < k0 || k0 - 1 < self.window.k_min || k1 + lm > self.window.x_cap {
            return Err(CoreError::WindowTooNarrow {
                lo: k0,
                hi: k1,
                reason: format!(
                    "needs Ψ indices {}..={} inside {}..={}",
                    k0 - 1,
                    k1 + lm,
                    self.window.k_min,
                    self.window.x_cap
                ),
            });
        }
        let mut psi = BTreeMap::new();
        for k in (k0 - 1)..=(k1 + lm) {
            psi.insert(k, self.psi(sign, k)?.value);
        }
        let mut rows = Vec::new();
        let mut band: Option<(i32, i32)> = None;
        for k in k0..=k1 {
            let lhs_p = match sign {
                Sign::Plus => self.beta_d(&psi[&k])?,
                Sign::Minus => self.beta_d(&psi[&k])?.neg(),
            };
            let p_row = self.p_row(sign, k)?;
            let mut p_res = lhs_p;
            for (col, val) in &p_row {
                p_res = p_res.sub(&psi[col].mul_exact(val)?)?;
            }
            let lhs_q = psi[&k].shift_var(&self.x, -1)?.shift_var(GAMMA, -1)?;
            let q_row = self.g_of_p_row(sign, k - 1)?;
            let mut q_res = lhs_q;
            for (col, val) in &q_row {
                let rel = col - k;
                band = Some(band.map_or((rel, rel), |(lo, hi)| (lo.min(rel), hi.max(rel))));
                q_res = q_res.sub(&psi[col].mul_exact(val)?)?;
            }
            rows.push(WindowRow {
                k,
                p_diagonal: p_row[&k].clone(),
                p_residual: p_res,
                q_residual: q_res,
            });
        }
        Ok(WindowReport { sign, rows, q_band: band })
    }
}

#[derive(Clone, Debug)]
pub struct WindowRow {
    pub k: i32,
    pub p_diagonal: TruncatedSeries,
    pub p_residual: CertSeries,
    pub q_residual: CertSeries,
}

#[derive(Clone, Debug)]
pub struct WindowReport {
    pub sign: Sign,
    pub rows: Vec<WindowRow>,
    /// Measured support of `Q` relative to the diagonal.
    pub q_band: Option<(i32, i32)>,
}

impl WindowReport {
    pub fn all_zero(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.p_residual.is_trusted_zero() && r.q_residual.is_trusted_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Param, WeightSpec};

    fn cfg(g: &[i64], l: usize) -> WeightConfig {
        WeightConfig::new(
            WeightSpec::Coeffs(g.iter().map(|&x| Rat::from_int(x)).collect()),
            (1..=l).map(|i| Param::Symbol(format!("s{i}"))).collect(),
        )
    }

    fn ctx(c: &WeightConfig, x_cap: i32, k_min: i32, beta_cap: Option<i32>) -> BasisContext {
        BasisContext::standard(
            c,
            Window {
                x_cap,
                k_min,
                beta_cap,
            },
        )
        .unwrap()
    }

    fn term(b: &BasisContext, exps: &[(&str, i32)], c: Rat) -> TruncatedSeries {
        let mut e = Exps::from_elem(0, b.vars.len());
        for (n, x) in exps {
            e[b.vars.index(n).unwrap()] = *x;
        }
        TruncatedSeries::monomial(&b.vars, e, c).unwrap()
    }

    #[test]
    fn psi_leading_terms() {
        let c = cfg(&[1], 1);
        let b = ctx(&c, 4, 0, None);
        let p0 = b.psi(Sign::Plus, 0).unwrap().value.series;
        assert_eq!(p0.filter_var("x", 0, 0).unwrap(), TruncatedSeries::one(&b.vars));
        let want = term(&b, &[("x", 1), ("gamma", 1), ("beta", -1), ("s1", 1)], Rat::one());
        assert_eq!(p0.filter_var("x", 1, 1).unwrap(), want);
        let p1 = b.psi(Sign::Plus, 1).unwrap().value.series;
        assert_eq!(p1.min_exp("x").unwrap(), Some(1));
        assert_eq!(p1.filter_var("x", 1, 1).unwrap(), term(&b, &[("x", 1), ("gamma", 1)], Rat::one()));
        let m0 = b.psi(Sign::Minus, 0).unwrap().value.series;
        assert_eq!(m0.filter_var("x", 0, 0).unwrap(), TruncatedSeries::one(&b.vars));
        let want = term(&b, &[("x", 1), ("gamma", 1), ("beta", -1), ("s1", 1)], -Rat::one());
        assert_eq!(m0.filter_var("x", 1, 1).unwrap(), want);
    }

    #[test]
    fn recursion_steps() {
        let c = cfg(&[3, 2], 2);
        let b = ctx(&c, 6, -2, Some(14));
        for sign in [Sign::Plus, Sign::Minus] {
            for k in -1..3 {
                let v = b.psi(sign, k).unwrap();
                let up = b.apply_r_vec(sign, 1, &v).unwrap();
                let want = b.psi(sign, k + 1).unwrap();
                assert!(up.value.sub(&want.value).unwrap().is_trusted_zero(), "{sign} {k} up");
                let down = b.apply_r_vec(sign, -1, &want).unwrap();
                let diff = down.value.sub(&v.value).unwrap();
                assert!(diff.is_trusted_zero(), "{sign} {k} down: {:?}", diff.first_trusted_term());
            }
        }
    }

    #[test]
    fn euler_commutator() {
        let c = cfg(&[2], 1);
        let b = ctx(&c, 6, 0, None);
        let v = CertSeries::exact(TruncatedSeries::from_terms(
            &b.vars,
            (0..6).map(|i| {
                let mut e = Exps::from_elem(0, b.vars.len());
                e[0] = i;
                e[1] = (i % 3) - 1;
                (e, Rat::new(i as i64 * 7 - 3, i as i64 + 2))
            }),
        )
        .unwrap());
        for sign in [Sign::Plus, Sign::Minus] {
            let dr = b.apply_r(sign, 1, &v).unwrap().euler("x").unwrap();
            let rd = b.apply_r(sign, 1, &v.euler("x").unwrap()).unwrap();
            let r = b.apply_r(sign, 1, &v).unwrap();
            assert!(dr.sub(&rd).unwrap().sub(&r).unwrap().is_trusted_zero());
        }
    }

    #[test]
    fn pairing_examples_and_orthogonality() {
        let c = cfg(&[1], 1);
        let b = ctx(&c, 9, -3, Some(26));
        let gamma = term(&b, &[("gamma", 1)], Rat::one());
        let plus: BTreeMap<i32, BasisVector> = (-3..=4).map(|k| (k, b.psi(Sign::Plus, k).unwrap())).collect();
        let minus: BTreeMap<i32, BasisVector> = (-3..=4).map(|k| (k, b.psi(Sign::Minus, k).unwrap())).collect();
        for k in -3..=4 {
            for m in -3..=4 {
                let p = b.pairing(&plus[&k], &minus[&m]).unwrap();
                let want = if k + m == 1 { gamma.clone() } else { TruncatedSeries::zero(&b.vars) };
                let diff = p.sub(&CertSeries::exact(want)).unwrap();
                assert!(diff.bound(BETA).is_none_or(|x| x >= 0), "({k},{m}) bound {:?}", diff.bound(BETA));
                assert!(diff.is_trusted_zero(), "({k},{m}): {:?}", diff.first_trusted_term());
            }
        }
    }

    #[test]
    fn quantum_curve_vanishes() {
        for (g, l) in [(vec![1], 1), (vec![1], 2), (vec![3, 2], 2)] {
            let c = cfg(&g, l);
            let b = ctx(&c, 10, 0, None);
            for sign in [Sign::Plus, Sign::Minus] {
                let r = b.quantum_curve_residual(sign).unwrap();
                assert!(r.is_trusted_zero(), "{g:?} L={l} {sign}: {:?}", r.first_trusted_term());
            }
        }
    }

    #[test]
    fn window_system() {
        let c = cfg(&[3, 2], 2);
        let b = ctx(&c, 10, -2, Some(24));
        for sign in [Sign::Plus, Sign::Minus] {
            let rep = b.infinite_system_window(sign, -1, 2).unwrap();
            for r in &rep.rows {
                assert!(r.p_residual.is_trusted_zero(), "{sign} P row {}: {:?}", r.k, r.p_residual.first_trusted_term());
                assert!(r.q_residual.is_trusted_zero(), "{sign} Q row {}: {:?}", r.k, r.q_residual.first_trusted_term());
                let want = term(&b, &[("beta", 1)], Rat::from_int(sign.factor() * r.k as i64));
                assert_eq!(r.p_diagonal, want);
            }
            assert_eq!(rep.q_band, Some((-1, 3)));
        }
        assert!(b.infinite_system_window(Sign::Plus, 2, 1).is_err());
    }
}
