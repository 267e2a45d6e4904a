//! The pair correlator `K(x, x′)`, its n-point determinant, the
//! Christoffel–Darboux matrix `A`, the folded matrices `Ẽ, E, E′` and the
//! rank-one projector `M(x)`.

use std::collections::BTreeMap;

use whr_algebra::{Exps, Matrix, Rat, TruncatedSeries, Var, Vars};

use crate::basis::{beta_poly, BasisContext, Sign, Window, BETA, GAMMA};
use crate::certified::CertSeries;
use crate::config::WeightConfig;
use crate::error::{CoreError, Result};
use crate::tau::{evaluate_p_table, rho, PTable};

/// Layout `gamma (capped), names…, beta, s-symbols…, c-symbols…`.
pub fn kernel_layout(cfg: &WeightConfig, names: &[&str], gamma_cap: i32) -> Vars {
    let mut v = vec![Var::capped(GAMMA, gamma_cap)];
    for n in names {
        v.push(Var::free(n));
    }
    v.push(Var::window(BETA, -4 * gamma_cap - 8, None));
    for s in cfg.s_symbols().iter().chain(cfg.c_symbols().iter()) {
        v.push(Var::window(s, -64, None));
    }
    Vars::new(v)
}

/// Layout for scalar matrices: `beta, s-symbols…, c-symbols…`.
pub fn scalar_layout(cfg: &WeightConfig) -> Vars {
    let mut v = vec![Var::window(BETA, -64, None)];
    for s in cfg.s_symbols().iter().chain(cfg.c_symbols().iter()) {
        v.push(Var::window(s, -64, None));
    }
    Vars::new(v)
}

fn var_monomial(vars: &Vars, powers: &[(&str, i32)], c: Rat) -> Result<TruncatedSeries> {
    let mut e = Exps::from_elem(0, vars.len());
    for (n, p) in powers {
        e[vars.index(n)?] += p;
    }
    Ok(TruncatedSeries::monomial(vars, e, c)?)
}

/// `ρ_n` or `ρ_n^{−1}` when it is a polynomial in β (times a power of γ).
fn rho_poly(cfg: &WeightConfig, n: i32, inverse: bool, vars: &Vars) -> Result<TruncatedSeries> {
    let (_, b) = rho(n, cfg)?;
    let (num, den, g) = if inverse {
        (b.den(), b.num(), -n)
    } else {
        (b.num(), b.den(), n)
    };
    if den.degree() != Some(0) {
        return Err(CoreError::Config(format!("ρ_{n} is not polynomial in β")));
    }
    let p = beta_poly(&num.scale(&den.coeff(0).inv()?), vars)?;
    Ok(p.mul(&var_monomial(vars, &[(GAMMA, g)], Rat::one())?)?)
}

fn h_tables(cfg: &WeightConfig, vars: &Vars, jmax: usize) -> Result<(Vec<TruncatedSeries>, Vec<TruncatedSeries>)> {
    let inv_beta = TruncatedSeries::var_pow(vars, BETA, -1)?;
    let mut t = Vec::new();
    for i in 1..=cfg.l() {
        t.push(cfg.s_series(i, vars)?.mul(&inv_beta)?);
    }
    let tn: Vec<TruncatedSeries> = t.iter().map(|s| s.neg()).collect();
    Ok((
        crate::partitions::complete_h_all(jmax, &t, vars)?,
        crate::partitions::complete_h_all(jmax, &tn, vars)?,
    ))
}

/// Regular part `K − 1/(x−y)` from the hook expansion
/// `Σ_{a,b≥0} Σ_{j=1}^{b+1} ρ_a h_{a+j}(u) x^a ρ_{−b−1}^{−1} h_{b−j+1}(−u) y^b`, `u = β^{−1}s`,
/// over `a + b + 1 ≤ gamma_max`.
pub fn kernel_hook(cfg: &WeightConfig, vars: &Vars, x: &str, y: &str, gamma_max: i32) -> Result<TruncatedSeries> {
    let n = gamma_max.max(0) as usize;
    let (hp, hm) = h_tables(cfg, vars, n + 1)?;
    let mut acc = TruncatedSeries::zero(vars);
    for a in 0..n as i32 {
        let ra = rho_poly(cfg, a, false, vars)?.mul(&var_monomial(vars, &[(x, a)], Rat::one())?)?;
        for b in 0..(n as i32 - a) {
            let rb = rho_poly(cfg, -b - 1, true, vars)?.mul(&var_monomial(vars, &[(y, b)], Rat::one())?)?;
            let mut inner = TruncatedSeries::zero(vars);
            for j in 1..=(b + 1) {
                let t = hp[(a + j) as usize].mul(&hm[(b - j + 1) as usize])?;
                inner = inner.add(&t)?;
            }
            acc = acc.add(&ra.mul(&rb)?.mul(&inner)?)?;
        }
    }
    Ok(acc)
}

/// `p_k(β^{−1}s) = k s_k / β` for `k = 1..n`.
fn scaled_s_power_sums(cfg: &WeightConfig, vars: &Vars, n: usize) -> Result<Vec<TruncatedSeries>> {
    let inv_beta = TruncatedSeries::var_pow(vars, BETA, -1)?;
    (1..=n)
        .map(|k| Ok(cfg.s_series(k, vars)?.scale(&Rat::from_int(k as i64)).mul(&inv_beta)?))
        .collect()
}

/// `τ(Σ[x_i] − [y_i], β^{−1}s)` from the power-sum table.
pub fn tau_at_points(
    cfg: &WeightConfig,
    table: &PTable,
    vars: &Vars,
    xs: &[&str],
    ys: &[&str],
) -> Result<TruncatedSeries> {
    let n = table.gamma_cap as usize;
    let mut pt = Vec::with_capacity(n);
    for k in 1..=n as i32 {
        let mut acc = TruncatedSeries::zero(vars);
        for x in xs {
            acc = acc.add(&TruncatedSeries::var_pow(vars, x, k)?)?;
        }
        for y in ys {
            acc = acc.sub(&TruncatedSeries::var_pow(vars, y, k)?)?;
        }
        pt.push(acc);
    }
    let ps = scaled_s_power_sums(cfg, vars, n)?;
    evaluate_p_table(table, vars, &pt, &ps)
}

/// Regular part of `K` via `(x − y)K = τ([x] − [y], β^{−1}s)`.
pub fn kernel_from_tau(cfg: &WeightConfig, table: &PTable, vars: &Vars, x: &str, y: &str) -> Result<TruncatedSeries> {
    let tau = tau_at_points(cfg, table, vars, &[x], &[y])?;
    Ok(tau.add_constant(&-Rat::one()).div_difference(x, y)?)
}

fn difference(vars: &Vars, a: &str, b: &str) -> Result<TruncatedSeries> {
    Ok(TruncatedSeries::var(vars, a)?.sub(&TruncatedSeries::var(vars, b)?)?)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !prefix.contains(&i) {
                prefix.push(i);
                rec(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out.into_iter()
        .map(|p| {
            let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inv % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// Both sides of the n-point identity after clearing `Π_{i,j}(x_i − y_j)`.
#[derive(Clone, Debug)]
pub struct KnComparison {
    pub n: usize,
    /// `Π_{i<j}(x_j − x_i)(y_i − y_j) · τ(Σ[x_i] − [y_i])`.
    pub tau_route: TruncatedSeries,
    /// `det(K(x_i, y_j)) · Π_{i,j}(x_i − y_j)`.
    pub determinant_route: TruncatedSeries,
}

impl KnComparison {
    pub fn agrees(&self) -> bool {
        self.tau_route == self.determinant_route
    }
}

pub fn kernel_kn(cfg: &WeightConfig, table: &PTable, n: usize) -> Result<KnComparison> {
    if n == 0 {
        return Err(CoreError::Config("n must be positive".into()));
    }
    let gamma_cap = table.gamma_cap as i32;
    let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let names: Vec<&str> = xs.iter().chain(ys.iter()).map(String::as_str).collect();
    let vars = kernel_layout(cfg, &names, gamma_cap);
    let xr: Vec<&str> = xs.iter().map(String::as_str).collect();
    let yr: Vec<&str> = ys.iter().map(String::as_str).collect();

    let mut cauchy = TruncatedSeries::one(&vars);
    for i in 0..n {
        for j in i + 1..n {
            cauchy = cauchy
                .mul(&difference(&vars, xr[j], xr[i])?)?
                .mul(&difference(&vars, yr[i], yr[j])?)?;
        }
    }
    let tau = tau_at_points(cfg, table, &vars, &xr, &yr)?;
    let tau_route = cauchy.mul(&tau)?;

    let mut regular = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            regular.insert((i, j), kernel_hook(cfg, &vars, xr[i], yr[j], gamma_cap)?);
        }
    }
    let mut det = TruncatedSeries::zero(&vars);
    for (p, sign) in permutations(n) {
        let mut term = TruncatedSeries::constant(&vars, Rat::from_int(sign));
        for i in 0..n {
            let d = difference(&vars, xr[i], yr[p[i]])?;
            let entry = d.mul(&regular[&(i, p[i])])?.add_constant(&Rat::one());
            term = term.mul(&entry)?;
            for j in 0..n {
                if j != p[i] {
                    term = term.mul(&difference(&vars, xr[i], yr[j])?)?;
                }
            }
        }
        det = det.add(&term)?;
    }
    Ok(KnComparison {
        n,
        tau_route,
        determinant_route: det,
    })
}

// ---------------------------------------------------------------------------
// Operator calculus on functions Σ_m P_m(r, t)/(r − t)^m.

const R: &str = "r";
const T: &str = "t";

fn rt_layout(target: &Vars) -> Vars {
    let mut v = vec![Var::free(R), Var::free(T)];
    v.extend(target.iter().cloned());
    Vars::new(v)
}

#[derive(Clone, Debug)]
struct PoleSum {
    parts: Vec<TruncatedSeries>,
}

struct Calculus<'a> {
    cfg: &'a WeightConfig,
    vars: Vars,
    g: Vec<TruncatedSeries>,
}

impl<'a> Calculus<'a> {
    fn new(cfg: &'a WeightConfig, target: &Vars) -> Result<Self> {
        let vars = rt_layout(target);
        let g = cfg.g_coeff_series(&vars)?;
        Ok(Calculus { cfg, vars, g })
    }

    fn kernel(&self) -> PoleSum {
        PoleSum {
            parts: vec![TruncatedSeries::zero(&self.vars), TruncatedSeries::one(&self.vars)],
        }
    }

    fn s_of(&self, v: &str) -> Result<TruncatedSeries> {
        self.cfg.s_of(&TruncatedSeries::var(&self.vars, v)?)
    }

    fn mul(&self, f: &PoleSum, p: &TruncatedSeries) -> Result<PoleSum> {
        Ok(PoleSum {
            parts: f.parts.iter().map(|q| q.mul(p)).collect::<std::result::Result<_, _>>()?,
        })
    }

    fn add(&self, a: &PoleSum, b: &PoleSum, scale_b: &Rat) -> Result<PoleSum> {
        let n = a.parts.len().max(b.parts.len());
        let zero = TruncatedSeries::zero(&self.vars);
        let mut parts = Vec::with_capacity(n);
        for m in 0..n {
            let x = a.parts.get(m).unwrap_or(&zero);
            let y = b.parts.get(m).unwrap_or(&zero);
            parts.push(x.add(&y.scale(scale_b))?);
        }
        Ok(PoleSum { parts })
    }

    /// `Δ = S(v) + σβD_v` with `v ∈ {r, t}`.
    fn delta(&self, f: &PoleSum, v: &str, sigma: i64) -> Result<PoleSum> {
        let s = self.s_of(v)?;
        let beta = TruncatedSeries::var(&self.vars, BETA)?.scale(&Rat::from_int(sigma));
        let pole_sign = if v == R { -1 } else { 1 };
        let mut parts = vec![TruncatedSeries::zero(&self.vars); f.parts.len() + 1];
        let vv = TruncatedSeries::var(&self.vars, v)?;
        for (m, p) in f.parts.iter().enumerate() {
            let here = s.mul(p)?.add(&beta.mul(&p.euler(v)?)?)?;
            parts[m] = parts[m].add(&here)?;
            if m > 0 {
                let up = beta.mul(&vv)?.mul(p)?.scale(&Rat::from_int(pole_sign * m as i64));
                parts[m + 1] = parts[m + 1].add(&up)?;
            }
        }
        while parts.len() > 1 && parts.last().is_some_and(|p| p.is_zero()) {
            parts.pop();
        }
        Ok(PoleSum { parts })
    }

    /// `G(Δ)` applied to `f`.
    fn g_delta(&self, f: &PoleSum, v: &str, sigma: i64) -> Result<PoleSum> {
        let mut power = f.clone();
        let mut acc = self.mul(f, &self.g[0])?;
        for gk in &self.g[1..] {
            power = self.delta(&power, v, sigma)?;
            acc = self.add(&acc, &self.mul(&power, gk)?, &Rat::one())?;
        }
        Ok(acc)
    }

    /// Combine into one polynomial; the poles must cancel.
    fn finalize(&self, f: &PoleSum) -> Result<TruncatedSeries> {
        let top = f.parts.len().saturating_sub(1);
        let diff = difference(&self.vars, R, T)?;
        let mut num = TruncatedSeries::zero(&self.vars);
        for (m, p) in f.parts.iter().enumerate() {
            num = num.add(&p.mul(&diff.pow((top - m) as u32)?)?)?;
        }
        for _ in 0..top {
            num = num.div_difference(R, T)?;
        }
        Ok(num)
    }

    /// `(r V₋(t) − t V₊(r)) [1/(r−t)]`.
    fn a_pole_sum(&self) -> Result<(PoleSum, PoleSum)> {
        let k = self.kernel();
        let left = self.mul(&self.g_delta(&k, T, -1)?, &TruncatedSeries::var(&self.vars, R)?)?;
        let right = self.mul(&self.g_delta(&k, R, 1)?, &TruncatedSeries::var(&self.vars, T)?)?;
        Ok((left, right))
    }

    fn a_poly(&self) -> Result<TruncatedSeries> {
        let (l, r) = self.a_pole_sum()?;
        self.finalize(&self.add(&l, &r, &-Rat::one())?)
    }

    /// The β- and s-dependent part of Ẽ plus its `1/(γx)` coefficient.
    fn e_tilde_polys(&self) -> Result<(TruncatedSeries, TruncatedSeries)> {
        let (l, r) = self.a_pole_sum()?;
        let l = self.delta(&l, R, 1)?;
        let r = self.delta(&r, T, -1)?;
        let main = self.finalize(&self.add(&l, &r, &-Rat::one())?)?;
        let rt = TruncatedSeries::var(&self.vars, R)?.mul(&TruncatedSeries::var(&self.vars, T)?)?;
        let xi = rt.mul(&self.s_of(R)?.sub(&self.s_of(T)?)?)?.div_difference(R, T)?;
        Ok((main, xi.neg()))
    }

    fn coefficient_matrix(&self, p: &TruncatedSeries, n: usize, target: &Vars) -> Result<Matrix<TruncatedSeries>> {
        let (ir, it) = (self.vars.index(R)?, self.vars.index(T)?);
        let mut m = Matrix::zeros_like(n, n, &TruncatedSeries::zero(target));
        let mut by_cell: BTreeMap<(usize, usize), Vec<(Exps, Rat)>> = BTreeMap::new();
        for (e, c) in p.terms() {
            let (i, j) = (e[ir], e[it]);
            if i < 0 || j < 0 || i as usize >= n || j as usize >= n {
                return Err(CoreError::Config(format!(
                    "bivariate polynomial has a term r^{i} t^{j} outside {n}×{n}"
                )));
            }
            let mut y = e.clone();
            y[ir] = 0;
            y[it] = 0;
            by_cell.entry((i as usize, j as usize)).or_default().push((y, c.clone()));
        }
        for ((i, j), terms) in by_cell {
            let s = TruncatedSeries::from_terms(&self.vars, terms)?;
            m.set(i, j, s.reembed(target)?);
        }
        Ok(m)
    }
}

/// `A(r, t) = (r V₋(t) − t V₊(r))/(r − t)` as a series in `r, t` over `target`.
pub fn cd_polynomial_a(cfg: &WeightConfig, target: &Vars) -> Result<TruncatedSeries> {
    Calculus::new(cfg, target)?.a_poly()
}

/// `A_{ij}` = coefficient of `r^i t^j`, `0 ≤ i, j < LM`.
pub fn cd_matrix_a(cfg: &WeightConfig, target: &Vars) -> Result<Matrix<TruncatedSeries>> {
    let calc = Calculus::new(cfg, target)?;
    let a = calc.a_poly()?;
    let m = calc.coefficient_matrix(&a, cfg.l() * cfg.m(), target)?;
    if m.det()?.is_zero() {
        return Err(CoreError::SingularA);
    }
    Ok(m)
}

/// `(−1)^{LM(LM−1)/2} g_M^{LM−1} (L s_L)^{M(LM−1)}`.
pub fn det_a_closed_form(cfg: &WeightConfig, target: &Vars) -> Result<TruncatedSeries> {
    let (l, m) = (cfg.l(), cfg.m());
    let lm = (l * m) as u32;
    let gm = cfg.g_coeff_series(target)?.pop().expect("g_0 present");
    let ls = cfg.s_series(l, target)?.scale(&Rat::from_int(l as i64));
    let sign = if (lm * lm.saturating_sub(1) / 2).is_multiple_of(2) { 1 } else { -1 };
    Ok(gm
        .pow(lm.saturating_sub(1))?
        .mul(&ls.pow(m as u32 * lm.saturating_sub(1))?)?
        .scale(&Rat::from_int(sign)))
}

/// `Ẽ` with row = r-exponent, column = t-exponent; `1/(γx)` is written as
/// `gamma^{-1} x^{-1}` in the basis layout of `ctx`.
pub fn folded_e_tilde(ctx: &BasisContext) -> Result<Matrix<TruncatedSeries>> {
    let calc = Calculus::new(&ctx.cfg, &ctx.vars)?;
    let (main, xi_part) = calc.e_tilde_polys()?;
    let n = ctx.cfg.l() * ctx.cfg.m();
    let a = calc.coefficient_matrix(&main, n, &ctx.vars)?;
    let b = calc.coefficient_matrix(&xi_part, n, &ctx.vars)?;
    let xi = var_monomial(&ctx.vars, &[(&ctx.x, -1), (GAMMA, -1)], Rat::one())?;
    Ok(a.add(&b.try_map(|e| e.mul(&xi))?)?)
}

/// Express `Σ c_n r^n` in `r^0..r^{LM−1}` through `ξ r^k ≡ V_±(r) r^{k−1}`.
fn fold_row(ctx: &BasisContext, sign: Sign, mut row: BTreeMap<i32, TruncatedSeries>) -> Result<Vec<TruncatedSeries>> {
    let lm = (ctx.cfg.l() * ctx.cfg.m()) as i32;
    let xi = var_monomial(&ctx.vars, &[(&ctx.x, -1), (GAMMA, -1)], Rat::one())?;
    let zero = TruncatedSeries::zero(&ctx.vars);
    if lm == 1 {
        // ξ r = G₀₀ + G₀₁ r, hence r = G₀₀ u/(1 − G₀₁ u) with u = γx
        let g = ctx.g_of_p_row(sign, 0)?;
        let g00 = g.get(&0).cloned().unwrap_or_else(|| zero.clone());
        let g01 = g.get(&1).cloned().unwrap_or_else(|| zero.clone());
        let u = var_monomial(&ctx.vars, &[(&ctx.x, 1), (GAMMA, 1)], Rat::one())?;
        let r = g00
            .mul(&u)?
            .mul(&TruncatedSeries::one(&ctx.vars).sub(&g01.mul(&u)?)?.inverse()?)?;
        let mut out = row.remove(&0).unwrap_or_else(|| zero.clone());
        for (n, c) in row {
            out = out.add(&c.mul(&r.pow(n as u32)?)?)?;
        }
        return Ok(vec![out]);
    }
    loop {
        let top = row.iter().rev().find(|(_, c)| !c.is_zero()).map(|(n, _)| *n);
        let n = match top {
            Some(n) if n >= lm => n,
            _ => break,
        };
        let c = row.remove(&n).expect("present");
        let k = n - lm + 1;
        let g = ctx.g_of_p_row(sign, k - 1)?;
        let lead_inv = g
            .get(&n)
            .ok_or_else(|| CoreError::DegenerateS("vanishing leading band entry".into()))?
            .inverse()?;
        let cl = c.mul(&lead_inv)?;
        let slot = row.entry(k).or_insert_with(|| zero.clone());
        *slot = slot.add(&cl.mul(&xi)?)?;
        for (m, gm) in g.range(..n) {
            let slot = row.entry(*m).or_insert_with(|| zero.clone());
            *slot = slot.sub(&cl.mul(gm)?)?;
        }
    }
    Ok((0..lm).map(|i| row.get(&i).cloned().unwrap_or_else(|| zero.clone())).collect())
}

/// `E` (plus) or `E′` (minus) by folding the rows of `P^±`.
pub fn folded_e(ctx: &BasisContext, sign: Sign) -> Result<Matrix<TruncatedSeries>> {
    let lm = (ctx.cfg.l() * ctx.cfg.m()) as i32;
    let rows = (0..lm)
        .map(|k| fold_row(ctx, sign, ctx.p_row(sign, k)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows))
}

#[derive(Clone, Debug)]
pub struct FoldedData {
    pub a: Matrix<TruncatedSeries>,
    pub e: Matrix<TruncatedSeries>,
    pub e_prime: Matrix<TruncatedSeries>,
}

pub fn folded_data(ctx: &BasisContext) -> Result<FoldedData> {
    Ok(FoldedData {
        a: cd_matrix_a(&ctx.cfg, &ctx.vars)?,
        e: folded_e(ctx, Sign::Plus)?,
        e_prime: folded_e(ctx, Sign::Minus)?,
    })
}

/// `A E − E′ᵀ A`.
pub fn duality_residual(data: &FoldedData) -> Result<Matrix<TruncatedSeries>> {
    Ok(data.a.mul(&data.e)?.sub(&data.e_prime.transpose().mul(&data.a)?)?)
}

/// `(Aᵀ)^{−1} Ẽᵀ` and `A^{−1} Ẽ`.
pub fn e_from_tilde(ctx: &BasisContext) -> Result<(Matrix<TruncatedSeries>, Matrix<TruncatedSeries>)> {
    let a = cd_matrix_a(&ctx.cfg, &ctx.vars)?;
    let et = folded_e_tilde(ctx)?;
    let e = a.transpose().inverse_adjugate()?.mul(&et.transpose())?;
    let ep = a.inverse_adjugate()?.mul(&et)?;
    Ok((e, ep))
}

/// Residuals of `βDΨ⃗⁺ = EΨ⃗⁺` and `−βDΨ⃗⁻ = E′Ψ⃗⁻`.
pub fn folded_system_check(ctx: &BasisContext, data: &FoldedData) -> Result<Vec<(Sign, usize, CertSeries)>> {
    let lm = ctx.cfg.l() * ctx.cfg.m();
    let mut out = Vec::new();
    for (sign, e) in [(Sign::Plus, &data.e), (Sign::Minus, &data.e_prime)] {
        let psi = (0..lm as i32).map(|k| Ok(ctx.psi(sign, k)?.value)).collect::<Result<Vec<_>>>()?;
        for (k, pk) in psi.iter().enumerate() {
            let mut res = ctx.beta_d(pk)?;
            if sign == Sign::Minus {
                res = res.neg();
            }
            for (j, pj) in psi.iter().enumerate() {
                res = res.sub(&pj.mul_exact(e.get(k, j))?)?;
            }
            out.push((sign, k, res));
        }
    }
    Ok(out)
}

/// The projector `M = Ψ⃗⁻ Ψ⃗⁺ᵀ A` with its checks.
#[derive(Clone, Debug)]
pub struct ProjectorReport {
    pub m: Matrix<TruncatedSeries>,
    pub x_bound: i32,
    pub idempotent: bool,
    pub trace_one: bool,
    pub min_beta: Option<i32>,
    /// `βDM − [M, E′]`, trusted up to `x_bound − shift`.
    pub adjoint_residual_zero: bool,
    /// The form `βDM = [E, M]`.
    pub adjoint_e_form_zero: bool,
}

pub fn projector_m(ctx: &BasisContext, data: &FoldedData) -> Result<ProjectorReport> {
    let lm = ctx.cfg.l() * ctx.cfg.m();
    let plus = (0..lm as i32).map(|k| Ok(ctx.psi(Sign::Plus, k)?.value.series)).collect::<Result<Vec<_>>>()?;
    let minus = (0..lm as i32).map(|k| Ok(ctx.psi(Sign::Minus, k)?.value.series)).collect::<Result<Vec<_>>>()?;
    let col = Matrix::from_rows(minus.iter().map(|s| vec![s.clone()]).collect());
    let row = Matrix::from_rows(vec![plus.clone()]);
    let m = col.mul(&row)?.mul(&data.a)?;
    let x_bound = ctx.window.x_cap;

    let clip = |s: &TruncatedSeries, hi: i32| s.filter_var(&ctx.x, i32::MIN / 4, hi);
    let clip_m = |mm: &Matrix<TruncatedSeries>, hi: i32| mm.try_map(|s| clip(s, hi));

    let idempotent = clip_m(&m.mul(&m)?.sub(&m)?, x_bound)?.is_zero();
    let tr = m.trace()?;
    let trace_one = clip(&tr, x_bound)? == TruncatedSeries::one(&ctx.vars);
    let mut min_beta: Option<i32> = None;
    for e in m.entries() {
        if let Some(b) = e.min_exp(BETA)? {
            min_beta = Some(min_beta.map_or(b, |x: i32| x.min(b)));
        }
    }
    // x-shift carried by negative x-powers in E′ or E
    let shift = |e: &Matrix<TruncatedSeries>| -> Result<i32> {
        let mut s = 0;
        for v in e.entries() {
            if let Some(mn) = v.min_exp(&ctx.x)? {
                s = s.max(-mn);
            }
        }
        Ok(s)
    };
    let bdm = m.try_map(|s| s.euler(&ctx.x)?.shift_var(BETA, 1))?;
    let hi = x_bound - shift(&data.e_prime)?;
    let res = bdm.sub(&m.commutator(&data.e_prime)?)?;
    let adjoint_residual_zero = clip_m(&res, hi)?.is_zero();
    let hi_e = x_bound - shift(&data.e)?;
    let res_e = bdm.sub(&data.e.commutator(&m)?)?;
    let adjoint_e_form_zero = clip_m(&res_e, hi_e)?.is_zero();
    Ok(ProjectorReport {
        m,
        x_bound,
        idempotent,
        trace_one,
        min_beta,
        adjoint_residual_zero,
        adjoint_e_form_zero,
    })
}

/// Residual of `(x − x′)K(x, x′) = Σ A_{ij} Ψ⁺_i(x) Ψ⁻_j(x′)` on `x, x′ ≤ x_cap`, `γ ≤ gamma_cap`.
pub fn cd_identity_check(cfg: &WeightConfig, x_cap: i32, gamma_cap: i32) -> Result<CertSeries> {
    let window = Window {
        x_cap,
        k_min: 0,
        beta_cap: None,
    };
    let vars = crate::basis::basis_layout(cfg, &["x", "xp"], window);
    let bx = BasisContext::new(cfg, vars.clone(), "x", window)?;
    let by = BasisContext::new(cfg, vars.clone(), "xp", window)?;
    let lm = cfg.l() * cfg.m();
    let a = cd_matrix_a(cfg, &vars)?;
    let mut rhs = CertSeries::exact(TruncatedSeries::zero(&vars));
    let plus = (0..lm as i32).map(|k| Ok(bx.psi(Sign::Plus, k)?.value)).collect::<Result<Vec<_>>>()?;
    let minus = (0..lm as i32).map(|k| Ok(by.psi(Sign::Minus, k)?.value)).collect::<Result<Vec<_>>>()?;
    for i in 0..lm {
        for j in 0..lm {
            if a.get(i, j).is_zero() {
                continue;
            }
            rhs = rhs.add(&plus[i].mul(&minus[j])?.mul_exact(a.get(i, j))?)?;
        }
    }
    let hook = kernel_hook(cfg, &vars, "x", "xp", gamma_cap)?;
    let lhs = hook.mul(&difference(&vars, "x", "xp")?)?.add_constant(&Rat::one());
    Ok(CertSeries::exact(lhs).sub(&rhs)?.limit(GAMMA, gamma_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Caps, Param, WeightSpec};
    use crate::tau::tau_p_basis;

    fn cfg(g: &[i64], l: usize) -> WeightConfig {
        WeightConfig::new(
            WeightSpec::Coeffs(g.iter().map(|&x| Rat::from_int(x)).collect()),
            (1..=l).map(|i| Param::Symbol(format!("s{i}"))).collect(),
        )
    }

    fn with_gamma(c: WeightConfig, gamma: i32) -> WeightConfig {
        let caps = Caps { gamma, ..Caps::default() };
        c.with_caps(caps)
    }

    fn ctx(c: &WeightConfig, x_cap: i32) -> BasisContext {
        BasisContext::standard(c, Window { x_cap, k_min: 0, beta_cap: None }).unwrap()
    }

    #[test]
    fn a_small_examples() {
        // L = M = 1, symbolic c
        let c = WeightConfig::new(WeightSpec::SymbolicRoots(1), vec![Param::Symbol("s1".into())]);
        let vars = scalar_layout(&c);
        let a = cd_matrix_a(&c, &vars).unwrap();
        assert_eq!(a.rows(), 1);
        assert_eq!(*a.get(0, 0), TruncatedSeries::one(&vars));
        // G = 1 + 3z + 2z², L = 1: A = 1 − 2 s1² r t
        let c = cfg(&[3, 2], 1);
        let vars = scalar_layout(&c);
        let p = cd_polynomial_a(&c, &vars).unwrap();
        let rt = rt_layout(&vars);
        let want = TruncatedSeries::one(&rt)
            .sub(&var_monomial(&rt, &[("r", 1), ("t", 1), ("s1", 2)], Rat::from_int(2)).unwrap())
            .unwrap();
        assert_eq!(p, want);
        // G = 1 + c z, L = 2, S = s2 only: A = 1 − 2c s2 r t
        let c = WeightConfig::new(
            WeightSpec::SymbolicRoots(1),
            vec![Param::Value(Rat::zero()), Param::Symbol("s2".into())],
        );
        let vars = scalar_layout(&c);
        let p = cd_polynomial_a(&c, &vars).unwrap();
        let rt = rt_layout(&vars);
        let want = TruncatedSeries::one(&rt)
            .sub(&var_monomial(&rt, &[("r", 1), ("t", 1), ("s2", 1), ("c1", 1)], Rat::from_int(2)).unwrap())
            .unwrap();
        assert_eq!(p, want);
    }

    #[test]
    fn det_a_closed_form_holds() {
        for (g, l) in [(vec![1], 1), (vec![3, 2], 1), (vec![1], 2), (vec![3, 2], 2)] {
            let c = cfg(&g, l);
            let vars = scalar_layout(&c);
            let a = cd_matrix_a(&c, &vars).unwrap();
            assert_eq!(a.det().unwrap(), det_a_closed_form(&c, &vars).unwrap(), "{g:?} L={l}");
        }
        let c = WeightConfig::new(
            WeightSpec::SymbolicRoots(2),
            vec![Param::Symbol("s1".into()), Param::Symbol("s2".into())],
        );
        let vars = scalar_layout(&c);
        let a = cd_matrix_a(&c, &vars).unwrap();
        assert_eq!(a.det().unwrap(), det_a_closed_form(&c, &vars).unwrap());
    }

    #[test]
    fn a_top_degree_block() {
        let c = cfg(&[3, 2], 2);
        let vars = scalar_layout(&c);
        let a = cd_matrix_a(&c, &vars).unwrap();
        let lm = 4;
        let lead = TruncatedSeries::var_pow(&vars, "s2", 2).unwrap().scale(&Rat::from_int(-2 * 4));
        for j in 1..lm {
            assert_eq!(*a.get(j, lm - j), lead);
        }
    }

    #[test]
    fn kernel_routes_agree() {
        for (g, l) in [(vec![1], 1), (vec![3, 2], 2)] {
            let c = with_gamma(cfg(&g, l), 5);
            let table = tau_p_basis(&c).unwrap();
            let vars = kernel_layout(&c, &["x", "y"], 5);
            let hook = kernel_hook(&c, &vars, "x", "y", 5).unwrap();
            let tau = kernel_from_tau(&c, &table, &vars, "x", "y").unwrap();
            assert_eq!(hook, tau, "{g:?} L={l}");
            // constant term: γ h₁(β^{−1}s)
            let k00 = hook.filter_var("x", 0, 0).unwrap().filter_var("y", 0, 0).unwrap();
            let want = var_monomial(&vars, &[("gamma", 1), ("beta", -1), ("s1", 1)], Rat::one()).unwrap();
            assert_eq!(k00, want);
        }
        let c = with_gamma(cfg(&[1], 1), 0);
        let table = tau_p_basis(&c).unwrap();
        let vars = kernel_layout(&c, &["x", "y"], 0);
        assert!(kernel_from_tau(&c, &table, &vars, "x", "y").unwrap().is_zero());
    }

    #[test]
    fn kn_routes_agree() {
        let c = with_gamma(cfg(&[1], 1), 0);
        let t0 = tau_p_basis(&c).unwrap();
        let k = kernel_kn(&c, &t0, 2).unwrap();
        assert!(k.agrees());
        let c = with_gamma(cfg(&[1], 1), 4);
        let t = tau_p_basis(&c).unwrap();
        for n in 1..=3 {
            assert!(kernel_kn(&c, &t, n).unwrap().agrees(), "n = {n}");
        }
    }

    #[test]
    fn cd_identity_vanishes() {
        for (g, l) in [(vec![1], 1), (vec![3, 2], 2)] {
            let c = cfg(&g, l);
            let r = cd_identity_check(&c, 6, 4).unwrap();
            assert!(r.is_trusted_zero(), "{g:?} L={l}: {:?}", r.first_trusted_term());
        }
    }

    #[test]
    fn folded_systems_close() {
        for (g, l) in [(vec![1], 1), (vec![1], 2), (vec![3, 2], 1), (vec![3, 2], 2)] {
            let c = cfg(&g, l);
            let b = ctx(&c, 7);
            let data = folded_data(&b).unwrap();
            for (sign, k, r) in folded_system_check(&b, &data).unwrap() {
                assert!(r.is_trusted_zero(), "{g:?} L={l} {sign} row {k}: {:?}", r.first_trusted_term());
            }
            assert_eq!(data.a, data.a.transpose(), "{g:?} L={l} symmetric A");
            assert!(duality_residual(&data).unwrap().is_zero(), "{g:?} L={l} duality");
        }
    }

    #[test]
    fn e_tilde_matches_for_m_at_least_two() {
        for (g, l) in [(vec![3, 2], 1), (vec![3, 2], 2)] {
            let c = cfg(&g, l);
            let b = ctx(&c, 5);
            let data = folded_data(&b).unwrap();
            let (e, ep) = e_from_tilde(&b).unwrap();
            assert_eq!(e, data.e, "{g:?} L={l}");
            assert_eq!(ep, data.e_prime, "{g:?} L={l}");
        }
    }

    #[test]
    fn projector_properties() {
        for (g, l) in [(vec![1], 1), (vec![3, 2], 1), (vec![1], 2)] {
            let c = cfg(&g, l);
            let b = ctx(&c, 6);
            let data = folded_data(&b).unwrap();
            let rep = projector_m(&b, &data).unwrap();
            assert!(rep.idempotent, "{g:?} L={l}");
            assert!(rep.trace_one, "{g:?} L={l}");
            assert!(rep.min_beta.is_none_or(|b| b >= 0), "{g:?} L={l}: {:?}", rep.min_beta);
            assert!(rep.adjoint_residual_zero, "{g:?} L={l}");
            assert_eq!(rep.adjoint_e_form_zero, l * g.len() == 1, "{g:?} L={l}");
        }
    }
}
