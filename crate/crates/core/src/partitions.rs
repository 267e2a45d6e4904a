//! Integer partitions, symmetric-group characters and the symmetric-function
//! bridges `m_λ`, `e_i`, `h_j`, `p_μ`, `s_λ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};
use whr_algebra::{Rat, TruncatedSeries, Vars};

use crate::error::{CoreError, Result};

/// A weakly decreasing list of positive parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl TryFrom<Vec<u32>> for Partition {
    type Error = CoreError;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.0
    }
}

impl Partition {
    /// Parts in any order; zeros are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(CoreError::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// `(1^n)`, the cycle type of the identity.
    pub fn identity(n: u32) -> Self {
        Partition(vec![1; n as usize])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `ℓ*(λ) = |λ| − ℓ(λ)`.
    pub fn colength(&self) -> u32 {
        self.weight() - self.len() as u32
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == 1)
    }

    /// `part → m_part(λ)`.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    pub fn conjugate(&self) -> Self {
        let first = self.0.first().copied().unwrap_or(0);
        Partition(
            (1..=first)
                .map(|j| self.0.iter().filter(|&&p| p >= j).count() as u32)
                .collect(),
        )
    }

    /// Cells `(i, j)` of the Young diagram, 0-based.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p).map(move |j| (i as u32, j)))
    }

    /// Contents `j − i` of all cells.
    pub fn contents(&self) -> Vec<i64> {
        self.cells().map(|(i, j)| j as i64 - i as i64).collect()
    }

    /// Hook lengths of all cells.
    pub fn hooks(&self) -> Vec<u32> {
        let conj = self.conjugate();
        self.cells()
            .map(|(i, j)| (self.0[i as usize] - j) + (conj.0[j as usize] - i) - 1)
            .collect()
    }

    pub fn hook_product(&self) -> u128 {
        self.hooks().iter().map(|&h| h as u128).product()
    }

    /// `z_μ = Π i^{m_i} m_i!`.
    pub fn z_order(&self) -> u128 {
        self.multiplicities()
            .iter()
            .map(|(&i, &m)| (i as u128).pow(m) * factorial(m))
            .product()
    }

    /// `|aut λ| = Π m_i!`.
    pub fn aut_order(&self) -> u128 {
        self.multiplicities().values().map(|&m| factorial(m)).product()
    }

    /// Size `N!/z_μ` of the conjugacy class.
    pub fn class_size(&self) -> u128 {
        factorial(self.weight()) / self.z_order()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// Partitions of `n` in reverse-lexicographic order, `(n)` first.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=max.min(n)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All partitions of weight `1..=n`, ordered by weight then reverse-lex.
pub fn partitions_up_to(n: u32) -> Vec<Partition> {
    (1..=n).flat_map(partitions_of).collect()
}

type CharKey = (Partition, Partition);

fn char_memo() -> &'static RwLock<HashMap<CharKey, i64>> {
    static MEMO: OnceLock<RwLock<HashMap<CharKey, i64>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `χ_λ(μ)` by the Murnaghan–Nakayama rule, memoized.
pub fn character(lambda: &Partition, mu: &Partition) -> Result<i64> {
    if lambda.weight() != mu.weight() {
        return Err(CoreError::WeightMismatch(lambda.weight(), mu.weight()));
    }
    Ok(character_unchecked(lambda, mu))
}

fn character_unchecked(lambda: &Partition, mu: &Partition) -> i64 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.clone(), mu.clone());
    if let Some(&v) = char_memo().read().expect("memo lock").get(&key) {
        return v;
    }
    let r = mu.0[0];
    let rest = Partition(mu.0[1..].to_vec());
    // beta-set of λ with ℓ(λ) beads; removing an r-rim hook moves one bead down by r
    let l = lambda.len();
    let beads: Vec<i64> = lambda
        .0
        .iter()
        .enumerate()
        .map(|(i, &p)| p as i64 + (l - 1 - i) as i64)
        .collect();
    let mut total = 0i64;
    for (idx, &b) in beads.iter().enumerate() {
        let nb = b - r as i64;
        if nb < 0 || beads.contains(&nb) {
            continue;
        }
        let height = beads.iter().filter(|&&x| x > nb && x < b).count();
        let mut next = beads.clone();
        next[idx] = nb;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let len = next.len();
        let parts: Vec<u32> = next
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - (len - 1 - i) as i64) as u32)
            .filter(|&p| p > 0)
            .collect();
        let v = character_unchecked(&Partition(parts), &rest);
        total += if height % 2 == 0 { v } else { -v };
    }
    char_memo().write().expect("memo lock").insert(key, total);
    total
}

/// Full character table of `S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharTable {
    pub n: u32,
    pub values: BTreeMap<(Partition, Partition), i64>,
}

impl CharTable {
    pub fn new(n: u32) -> Self {
        let ps = partitions_of(n);
        let mut values = BTreeMap::new();
        for l in &ps {
            for m in &ps {
                values.insert((l.clone(), m.clone()), character_unchecked(l, m));
            }
        }
        CharTable { n, values }
    }

    pub fn get(&self, lambda: &Partition, mu: &Partition) -> Option<i64> {
        self.values.get(&(lambda.clone(), mu.clone())).copied()
    }
}

/// `m_λ(c)`, zero-padding the variable list.
pub fn monomial_m(lambda: &Partition, c: &[Rat]) -> Rat {
    fn rec(parts: &[u32], c: &[Rat], used: &mut Vec<bool>) -> Rat {
        let Some((&p, rest)) = parts.split_first() else {
            return Rat::one();
        };
        let mut acc = Rat::zero();
        for i in 0..c.len() {
            if used[i] || c[i].is_zero() {
                continue;
            }
            used[i] = true;
            let v = c[i].pow(p as i32).expect("nonzero");
            acc += &(v * rec(rest, c, used));
            used[i] = false;
        }
        acc
    }
    let injective = rec(&lambda.0, c, &mut vec![false; c.len()]);
    injective / Rat::from_bigint((lambda.aut_order()).into())
}

/// Coefficients `g_1..g_M` of `Π (1 + c_i z)`; `M` pads with zeros.
pub fn elementary_from_roots(c: &[Rat], m: usize) -> Vec<Rat> {
    let mut e = vec![Rat::one()];
    for ci in c {
        let mut next = vec![Rat::zero(); e.len() + 1];
        for (k, ek) in e.iter().enumerate() {
            next[k] += ek;
            next[k + 1] += &(ek * ci);
        }
        e = next;
    }
    let mut g: Vec<Rat> = e.into_iter().skip(1).collect();
    g.resize(m.max(g.len()), Rat::zero());
    g.truncate(m.max(c.len()));
    g
}

/// `h_0..h_jmax` from `e^{Σ t_i ζ^i} = Σ h_j ζ^j`, with `t[i-1] = t_i`.
pub fn complete_h_all(jmax: usize, t: &[TruncatedSeries], vars: &Vars) -> Result<Vec<TruncatedSeries>> {
    let mut h = vec![TruncatedSeries::one(vars)];
    for j in 1..=jmax {
        // j h_j = Σ_{i=1}^{j} i t_i h_{j−i}
        let mut acc = TruncatedSeries::zero(vars);
        for i in 1..=j.min(t.len()) {
            let term = t[i - 1].mul(&h[j - i])?.scale(&Rat::from_int(i as i64));
            acc = acc.add(&term)?;
        }
        h.push(acc.scale(&Rat::new(1, j as i64)));
    }
    Ok(h)
}

/// `h_j(t)`; zero for negative `j`.
pub fn complete_h(j: i64, t: &[TruncatedSeries], vars: &Vars) -> Result<TruncatedSeries> {
    if j < 0 {
        return Ok(TruncatedSeries::zero(vars));
    }
    Ok(complete_h_all(j as usize, t, vars)?.pop().expect("nonempty"))
}

/// `s_λ = Σ_μ χ_λ(μ) p_μ / z_μ` as a table `μ → χ_λ(μ)/z_μ`.
pub fn schur_in_p(lambda: &Partition) -> BTreeMap<Partition, Rat> {
    partitions_of(lambda.weight())
        .into_iter()
        .filter_map(|mu| {
            let chi = character_unchecked(lambda, &mu);
            (chi != 0).then(|| {
                let z = Rat::from_bigint(mu.z_order().into());
                (mu, Rat::from_int(chi) / z)
            })
        })
        .collect()
}

/// `p_μ = Π p_{μ_i}` from a list of power sums `p[k-1] = p_k`.
pub fn p_mu(mu: &Partition, p: &[TruncatedSeries], vars: &Vars) -> Result<TruncatedSeries> {
    let mut acc = TruncatedSeries::one(vars);
    for &part in mu.parts() {
        match p.get(part as usize - 1) {
            Some(pk) => acc = acc.mul(pk)?,
            None => return Ok(TruncatedSeries::zero(vars)),
        }
    }
    Ok(acc)
}
