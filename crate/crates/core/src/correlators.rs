//! Multicurrent correlators `W_n`, the generating functions `F_n`, their
//! connected versions and genus slices.

use serde::Serialize;
use whr_algebra::{Exps, Rat, TruncatedSeries, Vars};

use crate::basis::{BETA, GAMMA};
use crate::config::WeightConfig;
use crate::error::{CoreError, Result};
use crate::kernel::{kernel_hook, kernel_layout};
use crate::partitions::Partition;
use crate::tau::{evaluate_p_table, tau_connected_from, tau_p_basis, PTable};

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorTable {
    pub n: usize,
    pub connected: bool,
    pub genus: Option<u32>,
    pub series: TruncatedSeries,
}

#[derive(Serialize)]
struct TableJson<'a> {
    n: usize,
    connected: bool,
    genus: Option<u32>,
    terms: serde_json::Value,
    #[serde(skip)]
    _p: std::marker::PhantomData<&'a ()>,
}

impl CorrelatorTable {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TableJson {
            n: self.n,
            connected: self.connected,
            genus: self.genus,
            terms: self.series.to_json(),
            _p: std::marker::PhantomData,
        })
        .expect("plain data")
    }

    /// Invariant under every permutation of `x1..xn`.
    pub fn is_symmetric(&self) -> Result<bool> {
        for i in 1..self.n {
            let a = format!("x{i}");
            let b = format!("x{}", i + 1);
            if self.series.swap_vars(&a, &b)? != self.series {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn x_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Layout `gamma (cap), x1..xn, beta, s…`.
pub fn correlator_layout(cfg: &WeightConfig, n: usize, gamma_cap: i32) -> Vars {
    let names = x_names(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    kernel_layout(cfg, &refs, gamma_cap)
}

/// Connected table from the logarithm, refusing a β cap that could cut
/// nonzero connected numbers (their β-degree is at most `M(N−1)`).
pub fn connected_table(cfg: &WeightConfig) -> Result<PTable> {
    let need = cfg.m() as i32 * (cfg.caps.gamma - 1).max(0);
    if cfg.caps.beta_cap < need {
        return Err(CoreError::InsufficientCap(format!(
            "β cap {} below M(N−1) = {need}",
            cfg.caps.beta_cap
        )));
    }
    tau_connected_from(&tau_p_basis(cfg)?, cfg.caps.beta_cap)
}

fn s_product(cfg: &WeightConfig, nu: &Partition, vars: &Vars) -> Result<TruncatedSeries> {
    let mut acc = TruncatedSeries::one(vars);
    for &k in nu.parts() {
        acc = acc.mul(&cfg.s_series(k as usize, vars)?.scale(&Rat::from_int(k as i64)))?;
    }
    Ok(acc)
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Σ over (μ, ν, d) with ℓ(μ) = n of `c γ^{|μ|} β^{d−ℓ(ν)} p_ν(s) · x-part(μ)`.
fn transcribe(
    cfg: &WeightConfig,
    table: &PTable,
    n: usize,
    vars: &Vars,
    x_part: impl Fn(&Partition) -> Result<TruncatedSeries>,
) -> Result<TruncatedSeries> {
    let (ig, ib) = (vars.index(GAMMA)?, vars.index(BETA)?);
    let mut acc = TruncatedSeries::zero(vars);
    for ((mu, nu), poly) in &table.entries {
        if mu.len() != n {
            continue;
        }
        let mut terms = Vec::new();
        for (d, c) in poly.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut e = Exps::from_elem(0, vars.len());
            e[ig] = mu.weight() as i32;
            e[ib] = d as i32 - nu.len() as i32;
            terms.push((e, c.clone()));
        }
        let w = TruncatedSeries::from_terms(vars, terms)?;
        acc = acc.add(&w.mul(&s_product(cfg, nu, vars)?)?.mul(&x_part(mu)?)?)?;
    }
    Ok(acc)
}

/// `Σ_{σ∈S_n} Π_k f(μ_k) x_{σ(k)}^{μ_k − shift}`.
fn symmetrised(vars: &Vars, mu: &Partition, shift: i32, weight: impl Fn(u32) -> i64) -> Result<TruncatedSeries> {
    let names = x_names(mu.len());
    let mut acc = TruncatedSeries::zero(vars);
    for p in all_permutations(mu.len()) {
        let mut e = Exps::from_elem(0, vars.len());
        let mut c = 1i64;
        for (k, &part) in mu.parts().iter().enumerate() {
            e[vars.index(&names[p[k]])?] = part as i32 - shift;
            c *= weight(part);
        }
        acc = acc.add(&TruncatedSeries::monomial(vars, e, Rat::from_int(c))?)?;
    }
    Ok(acc)
}

/// `F_n = Σ γ^{|μ|} β^{d−ℓ(ν)} H^d(μ, ν) |aut μ| m_μ(x) p_ν(s)` over ℓ(μ) = n.
pub fn f_table(cfg: &WeightConfig, table: &PTable, n: usize, connected: bool) -> Result<CorrelatorTable> {
    let vars = correlator_layout(cfg, n, table.gamma_cap as i32);
    let series = transcribe(cfg, table, n, &vars, |mu| symmetrised(&vars, mu, 0, |_| 1))?;
    Ok(CorrelatorTable {
        n,
        connected,
        genus: None,
        series,
    })
}

/// `W_n = ∂ⁿ F_n / ∂x_1⋯∂x_n`.
pub fn w_from_f(f: &CorrelatorTable) -> Result<CorrelatorTable> {
    let mut s = f.series.clone();
    for x in x_names(f.n) {
        s = s.derivative(&x)?;
    }
    Ok(CorrelatorTable { series: s, ..f.clone() })
}

/// `Π∇(x_i) τ|_{t=0}` transcribed through `Σ_σ Π μ_k x_{σ(k)}^{μ_k−1}`.
pub fn w_from_nabla(cfg: &WeightConfig, table: &PTable, n: usize, connected: bool) -> Result<CorrelatorTable> {
    let vars = correlator_layout(cfg, n, table.gamma_cap as i32);
    let series = transcribe(cfg, table, n, &vars, |mu| symmetrised(&vars, mu, 1, |p| p as i64))?;
    Ok(CorrelatorTable {
        n,
        connected,
        genus: None,
        series,
    })
}

/// Connected `W̃_n` for `n ≤ 3` from the pair correlator, with
/// `τ_ij = (x_i − x_j) K(x_i, x_j) = 1 + (x_i − x_j) k_ij`.
pub fn connected_w_from_k(cfg: &WeightConfig, n: usize, gamma_cap: i32) -> Result<CorrelatorTable> {
    let names = x_names(n);
    let vars = correlator_layout(cfg, n.max(2), gamma_cap);
    let x = |i: usize| names[i].as_str();
    let diff = |a: &str, b: &str| -> Result<TruncatedSeries> {
        Ok(TruncatedSeries::var(&vars, a)?.sub(&TruncatedSeries::var(&vars, b)?)?)
    };
    let tau = |i: usize, j: usize| -> Result<TruncatedSeries> {
        let k = kernel_hook(cfg, &vars, x(i), x(j), gamma_cap)?;
        Ok(diff(x(i), x(j))?.mul(&k)?.add_constant(&Rat::one()))
    };
    let series = match n {
        1 => {
            // k(x, x′) at x′ = x, built in the two-point layout and folded
            let k = kernel_hook(cfg, &vars, "x1", "x2", gamma_cap)?;
            let folded = k.compose("x2", &TruncatedSeries::var(&vars, "x1")?)?;
            let target = correlator_layout(cfg, 1, gamma_cap);
            return Ok(CorrelatorTable {
                n,
                connected: true,
                genus: None,
                series: folded.reembed(&target)?,
            });
        }
        2 => tau(0, 1)?
            .mul(&tau(1, 0)?)?
            .add_constant(&-Rat::one())
            .div_difference("x1", "x2")?
            .div_difference("x1", "x2")?,
        3 => {
            let a = tau(0, 1)?.mul(&tau(1, 2)?)?.mul(&tau(2, 0)?)?;
            let b = tau(0, 2)?.mul(&tau(2, 1)?)?.mul(&tau(1, 0)?)?;
            a.sub(&b)?
                .div_difference("x1", "x2")?
                .div_difference("x2", "x3")?
                .div_difference("x3", "x1")?
        }
        _ => {
            return Err(CoreError::Config(format!(
                "determinant route implemented for n ≤ 3, got {n}"
            )))
        }
    };
    Ok(CorrelatorTable {
        n,
        connected: true,
        genus: None,
        series,
    })
}

/// `W_n = [ε_1⋯ε_n] τ(Σ[x_i + ε_i] − [x_i], β^{−1}s)` for `n ≤ 2`.
pub fn w_eps_extraction(cfg: &WeightConfig, table: &PTable, n: usize) -> Result<CorrelatorTable> {
    if !(1..=2).contains(&n) {
        return Err(CoreError::Config(format!("ε extraction implemented for n ≤ 2, got {n}")));
    }
    let xs = x_names(n);
    let es: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    let gamma_cap = table.gamma_cap as i32;
    let base = correlator_layout(cfg, n, gamma_cap);
    let mut v: Vec<whr_algebra::Var> = base.iter().cloned().collect();
    for e in &es {
        v.insert(1 + n, whr_algebra::Var::capped(e, 1));
    }
    let vars = Vars::new(v);
    let mut pt = Vec::new();
    for k in 1..=table.gamma_cap {
        let mut acc = TruncatedSeries::zero(&vars);
        for (x, e) in xs.iter().zip(&es) {
            let shifted = TruncatedSeries::var(&vars, x)?.add(&TruncatedSeries::var(&vars, e)?)?;
            acc = acc.add(&shifted.pow(k)?.sub(&TruncatedSeries::var_pow(&vars, x, k as i32)?)?)?;
        }
        pt.push(acc);
    }
    let inv_beta = TruncatedSeries::var_pow(&vars, BETA, -1)?;
    let ps = (1..=table.gamma_cap as usize)
        .map(|k| Ok(cfg.s_series(k, &vars)?.scale(&Rat::from_int(k as i64)).mul(&inv_beta)?))
        .collect::<Result<Vec<_>>>()?;
    let mut tau = evaluate_p_table(table, &vars, &pt, &ps)?;
    for e in &es {
        tau = tau.slice(e, 1)?;
    }
    Ok(CorrelatorTable {
        n,
        connected: false,
        genus: None,
        series: tau.reembed(&base)?,
    })
}

/// `[β^{2g−2+n}]` of a connected table, β reset to zero.
pub fn genus_slice(t: &CorrelatorTable, g: u32) -> Result<CorrelatorTable> {
    let e = 2 * g as i32 - 2 + t.n as i32;
    let floor = t.series.vars().get(t.series.vars().index(BETA)?).floor;
    if e < floor {
        return Err(CoreError::WindowTooNarrow {
            lo: floor,
            hi: e,
            reason: "β exponent below the stored window".into(),
        });
    }
    Ok(CorrelatorTable {
        n: t.n,
        connected: t.connected,
        genus: Some(g),
        series: t.series.slice(BETA, e)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Caps, Param, WeightSpec};
    use crate::hurwitz::weighted_hurwitz;
    use crate::partitions::partitions_of;
    use std::collections::BTreeMap;
    use whr_algebra::Poly;

    fn cfg(g: &[i64], s: Vec<Param>, gamma: i32, beta_cap: i32) -> WeightConfig {
        let caps = Caps {
            gamma,
            beta_cap,
            ..Caps::default()
        };
        WeightConfig::new(WeightSpec::Coeffs(g.iter().map(|&x| Rat::from_int(x)).collect()), s).with_caps(caps)
    }

    fn sym(l: usize) -> Vec<Param> {
        (1..=l).map(|i| Param::Symbol(format!("s{i}"))).collect()
    }

    #[test]
    fn n1_leading_term() {
        let c = cfg(&[1], sym(2), 1, 2);
        let t = tau_p_basis(&c).unwrap();
        let f = f_table(&c, &t, 1, false).unwrap();
        let vars = f.series.vars().clone();
        let mut e = Exps::from_elem(0, vars.len());
        e[vars.index("gamma").unwrap()] = 1;
        e[vars.index("x1").unwrap()] = 1;
        e[vars.index("beta").unwrap()] = -1;
        e[vars.index("s1").unwrap()] = 1;
        assert_eq!(f.series, TruncatedSeries::monomial(&vars, e, Rat::one()).unwrap());
        let w = w_from_f(&f).unwrap();
        assert_eq!(w.series.max_exp("x1").unwrap(), Some(0));
    }

    #[test]
    fn routes_agree_disconnected() {
        let c = cfg(&[3, 2], sym(2), 4, 8);
        let t = tau_p_basis(&c).unwrap();
        for n in 1..=3 {
            let a = w_from_f(&f_table(&c, &t, n, false).unwrap()).unwrap();
            let b = w_from_nabla(&c, &t, n, false).unwrap();
            assert_eq!(a, b, "n = {n}");
            assert!(a.is_symmetric().unwrap());
            if n <= 2 {
                assert_eq!(w_eps_extraction(&c, &t, n).unwrap().series, b.series, "ε n = {n}");
            }
        }
    }

    #[test]
    fn connected_routes_agree() {
        for (g, s) in [(vec![1], sym(2)), (vec![3, 2], sym(1))] {
            let c = cfg(&g, s, 5, 8);
            let t = connected_table(&c).unwrap();
            for n in 1..=3 {
                let a = w_from_nabla(&c, &t, n, true).unwrap();
                let f = w_from_f(&f_table(&c, &t, n, true).unwrap()).unwrap();
                let k = connected_w_from_k(&c, n, 5).unwrap();
                assert_eq!(a.series, f.series, "{g:?} n = {n}");
                assert_eq!(a.series, k.series.reembed(a.series.vars()).unwrap(), "{g:?} n = {n}");
                assert!(k.is_symmetric().unwrap());
            }
        }
    }

    #[test]
    fn connected_from_enumeration_matches_log_route() {
        // independent F̃ from the transitive oracle, N ≤ 4
        let c = cfg(&[1], vec![Param::Value(Rat::one()), Param::Value(Rat::new(1, 2))], 4, 3);
        let mut entries: BTreeMap<(Partition, Partition), Vec<Rat>> = BTreeMap::new();
        for n in 1..=4u32 {
            for mu in partitions_of(n) {
                for nu in partitions_of(n) {
                    let mut v = Vec::new();
                    for d in 0..=3 {
                        v.push(weighted_hurwitz(&c, &mu, &nu, d, true).unwrap().as_constant().unwrap());
                    }
                    if v.iter().any(|x| !x.is_zero()) {
                        entries.insert((mu.clone(), nu.clone()), v);
                    }
                }
            }
        }
        let oracle = PTable {
            gamma_cap: 4,
            entries: entries.into_iter().map(|(k, v)| (k, Poly::from_rats(&v))).collect(),
        };
        let log = connected_table(&c).unwrap();
        for n in 1..=2 {
            let a = w_from_f(&f_table(&c, &oracle, n, true).unwrap()).unwrap();
            let b = w_from_nabla(&c, &log, n, true).unwrap();
            assert_eq!(a.series, b.series, "n = {n}");
        }
    }

    #[test]
    fn genus_grading_and_parity() {
        let c = cfg(&[1], sym(2), 5, 8);
        let t = connected_table(&c).unwrap();
        for n in 1..=3 {
            let w = w_from_nabla(&c, &t, n, true).unwrap();
            for e in w.series.terms().keys() {
                let b = e[w.series.vars().index(BETA).unwrap()];
                assert_eq!((b - n as i32).rem_euclid(2), 0, "parity n = {n}");
                assert!(b >= n as i32 - 2);
            }
            let mut total = TruncatedSeries::zero(w.series.vars());
            for g in 0..=3 {
                let s = genus_slice(&w, g).unwrap();
                let shift = 2 * g as i32 - 2 + n as i32;
                total = total.add(&s.series.shift_var(BETA, shift).unwrap()).unwrap();
            }
            assert_eq!(total, w.series);
        }
        let w01 = genus_slice(&w_from_nabla(&c, &t, 1, true).unwrap(), 0).unwrap();
        assert!(!w01.series.is_zero());
    }

    #[test]
    fn insufficient_beta_cap_is_refused() {
        let c = cfg(&[3, 2], sym(1), 5, 4);
        assert!(connected_table(&c).is_err());
    }
}
