//! The hypergeometric tau function `τ = Σ_λ γ^{|λ|} r_λ s_λ(t) s_λ(s)`:
//! content products, the ρ sequence, the Schur and power-sum tables and the
//! connected (logarithmic) table.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use whr_algebra::{Exps, Poly, Rat, RatFunc, TruncatedSeries, Var, Vars};

use crate::config::WeightConfig;
use crate::error::{CoreError, Result};
use crate::partitions::{character, partitions_of, Partition};

/// `G(cβ)` as a polynomial in β.
pub(crate) fn g_at_multiple(g: &Poly<Rat>, c: i64) -> Poly<Rat> {
    let scaled: Vec<Rat> = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| a * &Rat::from_int(c).pow(i as i32).expect("integer power"))
        .collect();
    Poly::from_rats(&scaled)
}

/// `r_λ = Π_{(i,j)∈λ} G((j−i)β)` as a polynomial in β.
pub fn content_product(lambda: &Partition, cfg: &WeightConfig) -> Result<Poly<Rat>> {
    let g = cfg.g_poly()?;
    let mut acc = Poly::one(&Rat::zero());
    for c in lambda.contents() {
        acc = acc.mul(&g_at_multiple(&g, c));
    }
    Ok(acc)
}

/// `ρ_j = γ^j · b_j(β)`, returned as `(j, b_j)` with `b_j ∈ Q(β)`:
/// `b_j = Π_{i=1}^{j} G(iβ)` and `b_{−j} = Π_{i=0}^{j−1} G(−iβ)^{−1}`.
pub fn rho(j: i32, cfg: &WeightConfig) -> Result<(i32, RatFunc)> {
    let g = cfg.g_poly()?;
    let mut num = Poly::one(&Rat::zero());
    let mut den = Poly::one(&Rat::zero());
    if j >= 0 {
        for i in 1..=j {
            num = num.mul(&g_at_multiple(&g, i as i64));
        }
    } else {
        for i in 0..(-j) {
            den = den.mul(&g_at_multiple(&g, -(i as i64)));
        }
    }
    Ok((j, RatFunc::new(num, den)?))
}

/// Content products and ρ data of one configuration.
#[derive(Clone, Debug)]
pub struct ContentProduct {
    pub r: BTreeMap<Partition, Poly<Rat>>,
    pub rho: BTreeMap<i32, (i32, RatFunc)>,
}

impl ContentProduct {
    /// `r_λ` for `|λ| ≤ n_max` and `ρ_j` for `|j| ≤ j_max`.
    pub fn new(cfg: &WeightConfig, n_max: u32, j_max: i32) -> Result<Self> {
        let mut r = BTreeMap::new();
        for n in 0..=n_max {
            for l in partitions_of(n) {
                r.insert(l.clone(), content_product(&l, cfg)?);
            }
        }
        let mut rho_map = BTreeMap::new();
        for j in -j_max..=j_max {
            rho_map.insert(j, rho(j, cfg)?);
        }
        Ok(ContentProduct { r, rho: rho_map })
    }
}

/// Schur-basis coefficients: `λ → r_λ(β)`, the factor `γ^{|λ|}` implicit.
#[derive(Clone, Debug)]
pub struct TauSchur {
    pub gamma_cap: u32,
    pub coeffs: BTreeMap<Partition, Poly<Rat>>,
}

pub fn tau_schur(cfg: &WeightConfig) -> Result<TauSchur> {
    let cap = cfg.caps.gamma.max(0) as u32;
    let mut coeffs = BTreeMap::new();
    for n in 0..=cap {
        for l in partitions_of(n) {
            coeffs.insert(l.clone(), content_product(&l, cfg)?);
        }
    }
    Ok(TauSchur {
        gamma_cap: cap,
        coeffs,
    })
}

/// Power-sum table `(μ, ν) → Σ_d c_d β^d`, the factor `γ^{|μ|}` implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct PTable {
    pub gamma_cap: u32,
    pub entries: BTreeMap<(Partition, Partition), Poly<Rat>>,
}

impl PTable {
    /// Coefficient of `β^d γ^{|μ|} p_μ(t) p_ν(s)`.
    pub fn get(&self, mu: &Partition, nu: &Partition, d: u32) -> Rat {
        self.entries
            .get(&(mu.clone(), nu.clone()))
            .map(|p| p.coeff(d as usize))
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &Partition, u32, Rat)> {
        self.entries.iter().flat_map(|((m, n), p)| {
            p.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(d, c)| (m, n, d as u32, c.clone()))
        })
    }

    /// Entries keyed `"mu|nu|d"`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (m, n, d, c) in self.iter() {
            map.insert(format!("{m}|{n}|{d}"), serde_json::Value::String(c.to_string()));
        }
        serde_json::Value::Object(map)
    }
}

impl Serialize for PTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Expand `Σ_λ γ^{|λ|} r_λ s_λ(t) s_λ(s)` into `p_μ(t) p_ν(s)`.
pub fn tau_p_basis(cfg: &WeightConfig) -> Result<PTable> {
    let schur = tau_schur(cfg)?;
    let zero = Poly::zero(&Rat::zero());
    let mut entries: BTreeMap<(Partition, Partition), Poly<Rat>> = BTreeMap::new();
    for n in 0..=schur.gamma_cap {
        let ps = partitions_of(n);
        let zs: Vec<Rat> = ps
            .iter()
            .map(|m| Rat::from_bigint(m.z_order().into()))
            .collect();
        let mut chis: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (li, l) in ps.iter().enumerate() {
            for (mi, m) in ps.iter().enumerate() {
                chis.insert((li, mi), character(l, m)?);
            }
        }
        for (mi, mu) in ps.iter().enumerate() {
            for (ni, nu) in ps.iter().enumerate() {
                let mut acc = zero.clone();
                for (li, l) in ps.iter().enumerate() {
                    let c = chis[&(li, mi)] * chis[&(li, ni)];
                    if c == 0 {
                        continue;
                    }
                    acc = acc.add(&schur.coeffs[l].scale(&Rat::from_int(c)));
                }
                let acc = acc.scale(&(&zs[mi] * &zs[ni]).inv()?);
                if !acc.is_zero() {
                    entries.insert((mu.clone(), nu.clone()), acc);
                }
            }
        }
    }
    Ok(PTable {
        gamma_cap: schur.gamma_cap,
        entries,
    })
}

/// Layout `γ, β, p_1..p_n, q_1..q_n` used for the logarithm.
fn log_layout(gamma_cap: u32, beta_cap: i32) -> Vars {
    let mut v = vec![Var::capped("gamma", gamma_cap as i32), Var::capped("beta", beta_cap)];
    for i in 1..=gamma_cap {
        v.push(Var::free(&format!("p{i}")));
    }
    for i in 1..=gamma_cap {
        v.push(Var::free(&format!("q{i}")));
    }
    Vars::new(v)
}

fn encode(mu: &Partition, nu: &Partition, d: u32, n: usize) -> Exps {
    let mut e: Exps = Exps::from_elem(0, 2 + 2 * n);
    e[0] = mu.weight() as i32;
    e[1] = d as i32;
    for &p in mu.parts() {
        e[1 + p as usize] += 1;
    }
    for &q in nu.parts() {
        e[1 + n + q as usize] += 1;
    }
    e
}

fn decode(e: &[i32], n: usize) -> (Partition, Partition, u32) {
    let mut mu = Vec::new();
    let mut nu = Vec::new();
    for i in 1..=n {
        mu.extend(std::iter::repeat_n(i as u32, e[1 + i] as usize));
        nu.extend(std::iter::repeat_n(i as u32, e[1 + n + i] as usize));
    }
    (
        Partition::new(mu).expect("positive parts"),
        Partition::new(nu).expect("positive parts"),
        e[1] as u32,
    )
}

/// The τ table as a series in `γ, β, p, q`.
pub fn p_table_series(table: &PTable, beta_cap: i32) -> Result<TruncatedSeries> {
    let n = table.gamma_cap as usize;
    let vars = log_layout(table.gamma_cap, beta_cap);
    let terms = table
        .iter()
        .map(|(m, nu, d, c)| (encode(m, nu, d, n), c))
        .collect::<Vec<_>>();
    Ok(TruncatedSeries::from_terms(&vars, terms)?)
}

/// Coefficients of `ln τ`: the connected table, exact for `β^d` with `d ≤ beta_cap`.
pub fn tau_connected(cfg: &WeightConfig) -> Result<PTable> {
    tau_connected_from(&tau_p_basis(cfg)?, cfg.caps.beta_cap)
}

pub fn tau_connected_from(table: &PTable, beta_cap: i32) -> Result<PTable> {
    if beta_cap < 0 {
        return Err(CoreError::Config("beta cap must be nonnegative".into()));
    }
    let n = table.gamma_cap as usize;
    let log = p_table_series(table, beta_cap)?.log()?;
    let mut entries: BTreeMap<(Partition, Partition), Vec<Rat>> = BTreeMap::new();
    for (e, c) in log.terms() {
        let (mu, nu, d) = decode(e, n);
        let v = entries.entry((mu, nu)).or_default();
        if v.len() <= d as usize {
            v.resize(d as usize + 1, Rat::zero());
        }
        v[d as usize] = c.clone();
    }
    Ok(PTable {
        gamma_cap: table.gamma_cap,
        entries: entries
            .into_iter()
            .map(|(k, v)| (k, Poly::from_rats(&v)))
            .collect(),
    })
}

/// `Σ c γ^{|μ|} β^d p_μ(t) p_ν(s)` with `p_k(t) = pt[k−1]`, `p_k(s) = ps[k−1]`,
/// written in `vars` (which must contain `gamma` and `beta`).
pub fn evaluate_p_table(
    table: &PTable,
    vars: &Vars,
    pt: &[TruncatedSeries],
    ps: &[TruncatedSeries],
) -> Result<TruncatedSeries> {
    let ig = vars.index("gamma")?;
    let ib = vars.index("beta")?;
    let mut memo_t: BTreeMap<Partition, TruncatedSeries> = BTreeMap::new();
    let mut memo_s: BTreeMap<Partition, TruncatedSeries> = BTreeMap::new();
    let product = |mu: &Partition, p: &[TruncatedSeries]| -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::one(vars);
        for &k in mu.parts() {
            let f = p.get(k as usize - 1).ok_or_else(|| {
                CoreError::InsufficientCap(format!("power sum p_{k} not supplied"))
            })?;
            acc = acc.mul(f)?;
        }
        Ok(acc)
    };
    let mut acc = TruncatedSeries::zero(vars);
    for ((mu, nu), poly) in &table.entries {
        if !memo_t.contains_key(mu) {
            memo_t.insert(mu.clone(), product(mu, pt)?);
        }
        if !memo_s.contains_key(nu) {
            memo_s.insert(nu.clone(), product(nu, ps)?);
        }
        let mut gb = Vec::new();
        for (d, c) in poly.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut e = Exps::from_elem(0, vars.len());
            e[ig] = mu.weight() as i32;
            e[ib] = d as i32;
            gb.push((e, c.clone()));
        }
        let weight = TruncatedSeries::from_terms(vars, gb)?;
        acc = acc.add(&weight.mul(&memo_t[mu])?.mul(&memo_s[nu])?)?;
    }
    Ok(acc)
}

/// Bernoulli numbers `B_0..B_n` with `B_1 = −1/2`.
pub fn bernoulli(n: usize) -> Vec<Rat> {
    let mut b = vec![Rat::one()];
    for m in 1..=n {
        let mut acc = Rat::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += &(Rat::binomial(m as i64 + 1, k as i64) * bk);
        }
        b.push(-acc / Rat::from_int(m as i64 + 1));
    }
    b
}

/// `F_m(x) = Σ_{i=1}^{x} i^m` as a polynomial (Faulhaber), `F_m(0) = 0`.
pub fn faulhaber(m: usize) -> Poly<Rat> {
    let b = bernoulli(m);
    let mut c = vec![Rat::zero(); m + 2];
    for (j, bj) in b.iter().enumerate() {
        let bj = if j == 1 { -bj.clone() } else { bj.clone() };
        c[m + 1 - j] += &(Rat::binomial(m as i64 + 1, j as i64) * &bj / Rat::from_int(m as i64 + 1));
    }
    Poly::from_rats(&c)
}

/// `T(x) = x·log γ + Σ_{m≥1} ℓ_m β^m F_m(x)` with `log G(z) = Σ ℓ_m z^m`;
/// the unique polynomial-coefficient solution of `e^{T(x)−T(x−1)} = γG(βx)`,
/// `T(0) = 0`. The transcendental `log γ` part is kept implicit.
#[derive(Clone, Debug)]
pub struct TFunction {
    pub order: usize,
    /// The β-part as a series in `beta` (capped at `order`) and free `x`.
    pub beta_part: TruncatedSeries,
    pub rho: BTreeMap<i32, (i32, RatFunc)>,
}

impl TFunction {
    /// `e^{T(j) − j log γ}` as a β-series to the stored order.
    pub fn exp_at(&self, j: i64) -> Result<TruncatedSeries> {
        let vars = self.beta_part.vars().clone();
        let at = self.beta_part.eval_var("x", &Rat::from_int(j))?;
        Ok(at.exp()?.reembed(&vars)?)
    }

    /// `b_j` from `ρ_j = γ^j b_j(β)` expanded as a β-series to the stored order.
    pub fn rho_series(&self, j: i32) -> Result<TruncatedSeries> {
        let vars = self.beta_part.vars().clone();
        let (_, b) = self
            .rho
            .get(&j)
            .ok_or_else(|| CoreError::Config(format!("ρ_{j} outside the stored range")))?;
        let to_series = |p: &Poly<Rat>| -> Result<TruncatedSeries> {
            let terms = p.coeffs().iter().enumerate().map(|(i, c)| {
                let mut e = Exps::from_elem(0, vars.len());
                e[0] = i as i32;
                (e, c.clone())
            });
            Ok(TruncatedSeries::from_terms(&vars, terms)?)
        };
        Ok(to_series(b.num())?.mul(&to_series(b.den())?.inverse()?)?)
    }
}

pub fn t_of_x(cfg: &WeightConfig, order: usize, j_max: i32) -> Result<TFunction> {
    if order == 0 {
        return Err(CoreError::Config("order must be at least 1".into()));
    }
    let vars = Vars::new(vec![Var::capped("beta", order as i32), Var::free("x")]);
    let z = TruncatedSeries::var(&vars, "beta")?;
    let log_g = cfg.g_of(&z)?.log()?;
    let mut acc = TruncatedSeries::zero(&vars);
    for m in 1..=order {
        let lm = log_g.coeff(&[m as i32, 0]);
        if lm.is_zero() {
            continue;
        }
        let f = faulhaber(m);
        let terms = f.coeffs().iter().enumerate().map(|(k, c)| {
            let e: Exps = [m as i32, k as i32].into_iter().collect();
            (e, c * &lm)
        });
        acc = acc.add(&TruncatedSeries::from_terms(&vars, terms)?)?;
    }
    let mut rho_map = BTreeMap::new();
    for j in -j_max..=j_max {
        rho_map.insert(j, rho(j, cfg)?);
    }
    Ok(TFunction {
        order,
        beta_part: acc,
        rho: rho_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Caps, WeightSpec};
    use crate::hurwitz::weighted_hurwitz;
    use whr_algebra::Field;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn cfg(g: &[i64], gamma: i32) -> WeightConfig {
        let caps = Caps {
            gamma,
            ..Caps::default()
        };
        WeightConfig::new(
            WeightSpec::Coeffs(g.iter().map(|&x| Rat::from_int(x)).collect()),
            vec![],
        )
        .with_caps(caps)
    }

    #[test]
    fn content_product_examples() {
        let c = cfg(&[1], 3);
        assert_eq!(content_product(&Partition::empty(), &c).unwrap(), Poly::from_ints(&[1]));
        assert_eq!(content_product(&p(&[1]), &c).unwrap(), Poly::from_ints(&[1]));
        assert_eq!(content_product(&p(&[2]), &c).unwrap(), Poly::from_ints(&[1, 1]));
        // contents {0, -1}
        assert_eq!(content_product(&p(&[1, 1]), &c).unwrap(), Poly::from_ints(&[1, -1]));
    }

    #[test]
    fn rho_examples_and_telescoping() {
        let c = cfg(&[3, 2], 3);
        let (e0, r0) = rho(0, &c).unwrap();
        assert_eq!(e0, 0);
        assert!(r0.is_one());
        let (_, r1) = rho(1, &c).unwrap();
        assert_eq!(r1.num(), &Poly::from_ints(&[1, 3, 2]));
        let (em1, rm1) = rho(-1, &c).unwrap();
        assert_eq!(em1, -1);
        assert!(rm1.is_one());
        let g = c.g_poly().unwrap();
        for j in -4..=4 {
            let (_, a) = rho(j, &c).unwrap();
            let (_, b) = rho(j - 1, &c).unwrap();
            let want = RatFunc::from_poly(g_at_multiple(&g, j as i64));
            assert_eq!(a.div_ref(&b).unwrap(), want, "j = {j}");
        }
    }

    #[test]
    fn schur_and_p_examples() {
        let c = cfg(&[1], 2);
        let s = tau_schur(&c).unwrap();
        assert!(s.coeffs[&Partition::empty()].coeff(0).is_one());
        assert_eq!(s.coeffs[&p(&[2])], Poly::from_ints(&[1, 1]));
        let t = tau_p_basis(&c).unwrap();
        assert_eq!(t.get(&p(&[1]), &p(&[1]), 0), Rat::one());
        assert_eq!(t.get(&p(&[2]), &p(&[2]), 0), Rat::new(1, 2));
        for (m, n, d, v) in t.iter() {
            assert_eq!(t.get(n, m, d), v);
        }
    }

    #[test]
    fn p_basis_matches_weighted_small() {
        let c = cfg(&[3, 2], 4);
        let t = tau_p_basis(&c).unwrap();
        for n in 1..=4 {
            for mu in partitions_of(n) {
                for nu in partitions_of(n) {
                    for d in 0..=3 {
                        let w = weighted_hurwitz(&c, &mu, &nu, d, false).unwrap();
                        assert_eq!(t.get(&mu, &nu, d), w.as_constant().unwrap(), "{mu} {nu} {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn connected_examples() {
        let c = cfg(&[1], 4);
        let t = tau_connected(&c).unwrap();
        assert_eq!(t.get(&p(&[1]), &p(&[1]), 0), Rat::one());
        assert_eq!(t.get(&p(&[1, 1]), &p(&[1, 1]), 0), Rat::zero());
        for d in 0..=4 {
            for mu in partitions_of(3) {
                let w = weighted_hurwitz(&c, &mu, &p(&[2, 1]), d, true).unwrap();
                assert_eq!(t.get(&mu, &p(&[2, 1]), d), w.as_constant().unwrap());
            }
        }
    }

    #[test]
    fn faulhaber_sums() {
        for m in 0..6 {
            let f = faulhaber(m);
            let mut s = Rat::zero();
            for x in 0..8i64 {
                if x > 0 {
                    s += &Rat::from_int(x).pow(m as i32).unwrap();
                }
                assert_eq!(f.eval(&Rat::from_int(x)), s, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn t_function_reproduces_rho() {
        let c = cfg(&[3, 2], 3);
        let t = t_of_x(&c, 6, 4).unwrap();
        assert!(t.exp_at(0).unwrap().as_constant().unwrap().is_one());
        for j in -4..=4 {
            assert_eq!(t.exp_at(j as i64).unwrap(), t.rho_series(j).unwrap(), "j = {j}");
        }
        // e^{T_2 − T_1} = γ G(2β)
        let q = t.exp_at(2).unwrap().mul(&t.exp_at(1).unwrap().inverse().unwrap()).unwrap();
        let b = TruncatedSeries::var(q.vars(), "beta").unwrap().scale(&Rat::from_int(2));
        assert_eq!(q, c.g_of(&b).unwrap());
    }
}
