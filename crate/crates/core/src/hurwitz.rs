//! Pure and weighted Hurwitz numbers by permutation enumeration and by the
//! Frobenius character formula, plus the constellation census.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use whr_algebra::{Rat, TruncatedSeries, Vars};

use crate::config::WeightConfig;
use crate::error::{CoreError, Result};
use crate::partitions::{character, factorial, partitions_of, Partition};

/// A permutation of `0..n` as its image list.
pub type Perm = Vec<u8>;

/// Degree and ramification profiles of a branched cover of the sphere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchData {
    pub n: u32,
    pub profiles: Vec<Partition>,
    pub euler_characteristic: i64,
}

impl BranchData {
    pub fn new(n: u32, profiles: Vec<Partition>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(CoreError::EmptyProfileList);
        }
        for p in &profiles {
            if p.weight() != n {
                return Err(CoreError::WeightMismatch(p.weight(), n));
            }
        }
        let chi = 2 * n as i64 - profiles.iter().map(|p| p.colength() as i64).sum::<i64>();
        Ok(BranchData {
            n,
            profiles,
            euler_characteristic: chi,
        })
    }
}

/// `Σ_{|λ|=N} h_λ^{k−2} Π_i χ_λ(μ^{(i)})/z_{μ^{(i)}}`.
pub fn pure_hurwitz_frobenius(b: &BranchData) -> Result<Rat> {
    let k = b.profiles.len() as i32;
    let mut total = Rat::zero();
    for lambda in partitions_of(b.n) {
        let h = Rat::from_bigint(lambda.hook_product().into());
        let mut term = h.pow(k - 2)?;
        for mu in &b.profiles {
            let chi = character(&lambda, mu)?;
            if chi == 0 {
                term = Rat::zero();
                break;
            }
            term = term * Rat::from_int(chi) / Rat::from_bigint(mu.z_order().into());
        }
        total += &term;
    }
    Ok(total)
}

/// Connected version of [`pure_hurwitz_frobenius`]: the orbit of the first
/// point is peeled off, `T(μ⃗) = Σ_{ν⃗ ⊆ μ⃗} C(|ν|−1, N−1) C(ν⃗) T(μ⃗ − ν⃗)`, with `T = N!·H`.
pub fn pure_hurwitz_connected(b: &BranchData) -> Result<Rat> {
    let mut memo = HashMap::new();
    let c = transitive_count(&b.profiles, &mut memo)?;
    Ok(c / Rat::from_bigint(factorial(b.n).into()))
}

fn tuple_count(profiles: &[Partition]) -> Result<Rat> {
    let n = profiles[0].weight();
    let h = pure_hurwitz_frobenius(&BranchData::new(n, profiles.to_vec())?)?;
    Ok(h * Rat::from_bigint(factorial(n).into()))
}

fn sub_multisets(p: &Partition, m: u32) -> Vec<(Partition, Partition)> {
    let mult: Vec<(u32, u32)> = p.multiplicities().into_iter().collect();
    let mut out = Vec::new();
    fn rec(i: usize, left: u32, mult: &[(u32, u32)], taken: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == mult.len() {
            if left == 0 {
                out.push(taken.clone());
            }
            return;
        }
        let (part, count) = mult[i];
        for c in 0..=count.min(left / part) {
            taken.extend(std::iter::repeat_n(part, c as usize));
            rec(i + 1, left - c * part, mult, taken, out);
            taken.truncate(taken.len() - c as usize);
        }
    }
    let mut picks = Vec::new();
    rec(0, m, &mult, &mut Vec::new(), &mut picks);
    for pick in picks {
        let mut rest = p.parts().to_vec();
        for x in &pick {
            let i = rest.iter().position(|y| y == x).expect("picked from the parts");
            rest.remove(i);
        }
        out.push((Partition::new(pick).expect("parts"), Partition::new(rest).expect("parts")));
    }
    out
}

fn transitive_count(profiles: &[Partition], memo: &mut HashMap<Vec<Partition>, Rat>) -> Result<Rat> {
    if let Some(v) = memo.get(profiles) {
        return Ok(v.clone());
    }
    let n = profiles[0].weight();
    let mut c = tuple_count(profiles)?;
    for m in 1..n {
        let choices: Vec<Vec<(Partition, Partition)>> = profiles.iter().map(|p| sub_multisets(p, m)).collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let binom = Rat::from_bigint((factorial(n - 1) / (factorial(m - 1) * factorial(n - m))).into());
        let mut idx = vec![0usize; profiles.len()];
        loop {
            let inner: Vec<Partition> = idx.iter().zip(&choices).map(|(&i, c)| c[i].0.clone()).collect();
            let outer: Vec<Partition> = idx.iter().zip(&choices).map(|(&i, c)| c[i].1.clone()).collect();
            let ci = transitive_count(&inner, memo)?;
            if !ci.is_zero() {
                c = c - binom.clone() * ci * tuple_count(&outer)?;
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    memo.insert(profiles.to_vec(), c.clone());
    Ok(c)
}

/// All permutations of `0..n`.
pub fn all_perms(n: u32) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Perm = (0..n as u8).collect();
    fn rec(k: usize, cur: &mut Perm, out: &mut Vec<Perm>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out.sort();
    out
}

pub fn cycle_type(p: &[u8]) -> Partition {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
            len += 1;
        }
        parts.push(len);
    }
    Partition::new(parts).expect("cycle lengths are positive")
}

/// Left-to-right product: apply `a` first, then `b`.
pub fn compose(a: &[u8], b: &[u8]) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn inverse(a: &[u8]) -> Perm {
    let mut inv = vec![0u8; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x as usize] = i as u8;
    }
    inv
}

/// Whether the factors generate a transitive subgroup, by union–find.
pub fn is_transitive(n: usize, factors: &[&[u8]]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut comps = n;
    for f in factors {
        for (x, &y) in f.iter().enumerate() {
            let (a, b) = (find(&mut parent, x), find(&mut parent, y as usize));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
    }
    comps <= 1
}

/// Permutations of `S_n` grouped by cycle type.
pub fn classes(n: u32) -> HashMap<Partition, Vec<Perm>> {
    let mut map: HashMap<Partition, Vec<Perm>> = HashMap::new();
    for p in all_perms(n) {
        map.entry(cycle_type(&p)).or_default().push(p);
    }
    map
}

/// Number of tuples `(h_1..h_k)`, `h_i` of cycle type `μ^{(i)}`, with
/// `h_1⋯h_k = I` (and transitive when `connected`).
///
/// The first factor is pinned to a class representative and the count is
/// scaled by the class size; the last factor is the inverse of the partial
/// product.
pub fn count_factorizations(b: &BranchData, connected: bool, bound: u32) -> Result<u128> {
    if b.n > bound {
        return Err(CoreError::OracleBoundExceeded { n: b.n, bound });
    }
    let n = b.n;
    let cls = classes(n);
    let k = b.profiles.len();
    let id = Partition::identity(n);
    if k == 1 {
        let ok = b.profiles[0] == id && (!connected || n <= 1);
        return Ok(ok as u128);
    }
    // largest classes are pinned and solved for; the rest are enumerated
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(b.profiles[i].class_size()));
    let pinned = &b.profiles[order[0]];
    let solved = &b.profiles[order[1]];
    let free: Vec<&Vec<Perm>> = order[2..]
        .iter()
        .map(|&i| &cls[&b.profiles[i]])
        .collect();
    let rep = &cls[pinned][0];
    let mut count: u128 = 0;
    let mut stack: Vec<&[u8]> = Vec::with_capacity(k);
    fn walk<'a>(
        depth: usize,
        partial: Perm,
        free: &[&'a Vec<Perm>],
        stack: &mut Vec<&'a [u8]>,
        solved: &Partition,
        connected: bool,
        n: usize,
        count: &mut u128,
    ) {
        if depth == free.len() {
            let last = inverse(&partial);
            if cycle_type(&last) != *solved {
                return;
            }
            if connected {
                let mut all = stack.clone();
                all.push(&last);
                if !is_transitive(n, &all) {
                    return;
                }
            }
            *count += 1;
            return;
        }
        for h in free[depth] {
            let next = compose(&partial, h);
            stack.push(h);
            walk(depth + 1, next, free, stack, solved, connected, n, count);
            stack.pop();
        }
    }
    stack.push(rep);
    walk(0, rep.clone(), &free, &mut stack, solved, connected, n as usize, &mut count);
    Ok(count * pinned.class_size())
}

/// `(1/N!)·#{factorizations}`, optionally transitive only.
pub fn pure_hurwitz_oracle(b: &BranchData, connected: bool, bound: u32) -> Result<Rat> {
    let c = count_factorizations(b, connected, bound)?;
    Ok(Rat::from_bigint(c.into()) / Rat::from_bigint(factorial(b.n).into()))
}

/// Genus from `2 − 2g = ℓ(μ) + ℓ(ν) − d`.
pub fn genus_of(d: u32, mu: &Partition, nu: &Partition) -> Result<i64> {
    let two_minus_2g = mu.len() as i64 + nu.len() as i64 - d as i64;
    if two_minus_2g % 2 != 0 {
        return Err(CoreError::NonIntegerGenus(two_minus_2g));
    }
    Ok((2 - two_minus_2g) / 2)
}

/// `W_G` for ordered extra profiles with colengths `a`:
/// `(1/k!) Σ_{set partitions π} Π_B (−1)^{|B|−1}(|B|−1)! p_{Σ_B a}(c)`,
/// which equals `(|aut λ|/k!) m_λ(c)` for `λ` the sorted colengths.
pub fn weight_of_colengths(
    cfg: &WeightConfig,
    colengths: &[u32],
    layout: &Vars,
) -> Result<TruncatedSeries> {
    let k = colengths.len();
    let total: u32 = colengths.iter().sum();
    let p = cfg.c_power_sums(total as usize, layout)?;
    let mut acc = TruncatedSeries::zero(layout);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(
        i: usize,
        k: usize,
        blocks: &mut Vec<Vec<usize>>,
        a: &[u32],
        p: &[TruncatedSeries],
        layout: &Vars,
        acc: &mut TruncatedSeries,
    ) -> Result<()> {
        if i == k {
            let mut term = TruncatedSeries::one(layout);
            for bl in blocks.iter() {
                let s: u32 = bl.iter().map(|&j| a[j]).sum();
                let m = bl.len() as u32;
                let mut c = Rat::from_bigint(factorial(m - 1).into());
                if m.is_multiple_of(2) {
                    c = -c;
                }
                term = term.mul(&p[s as usize - 1].scale(&c))?;
            }
            *acc = acc.add(&term)?;
            return Ok(());
        }
        for bi in 0..blocks.len() {
            blocks[bi].push(i);
            rec(i + 1, k, blocks, a, p, layout, acc)?;
            blocks[bi].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, k, blocks, a, p, layout, acc)?;
        blocks.pop();
        Ok(())
    }
    if colengths.contains(&0) {
        return Err(CoreError::Config("extra profiles must not be the identity".into()));
    }
    rec(0, k, &mut blocks, colengths, &p, layout, &mut acc)?;
    Ok(acc.scale(&Rat::from_bigint(factorial(k as u32).into()).inv()?))
}

/// Multisets (as nondecreasing index lists into `candidates`) whose colengths sum to `d`.
fn profile_multisets(candidates: &[Partition], d: u32) -> Vec<Vec<usize>> {
    fn rec(start: usize, left: u32, cand: &[Partition], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..cand.len() {
            let c = cand[i].colength();
            if c <= left {
                cur.push(i);
                rec(i, left - c, cand, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, d, candidates, &mut Vec::new(), &mut out);
    out
}

/// `H^d_G(μ,ν) = Σ_k Σ' W_G(μ^{(1)},…,μ^{(k)}) H(μ^{(1)},…,μ^{(k)},μ,ν)`,
/// as a polynomial in the c symbols (a constant for numeric G).
pub fn weighted_hurwitz(
    cfg: &WeightConfig,
    mu: &Partition,
    nu: &Partition,
    d: u32,
    connected: bool,
) -> Result<TruncatedSeries> {
    if mu.weight() != nu.weight() {
        return Err(CoreError::WeightMismatch(mu.weight(), nu.weight()));
    }
    let n = mu.weight();
    let layout = cfg.c_layout();
    let candidates: Vec<Partition> = partitions_of(n)
        .into_iter()
        .filter(|p| !p.is_identity() && p.colength() <= d)
        .collect();
    let mut acc = TruncatedSeries::zero(&layout);
    let mut weights: HashMap<Vec<u32>, TruncatedSeries> = HashMap::new();
    for ms in profile_multisets(&candidates, d) {
        let k = ms.len() as u32;
        let mut profiles: Vec<Partition> = ms.iter().map(|&i| candidates[i].clone()).collect();
        let mut mult: BTreeMap<usize, u32> = BTreeMap::new();
        for &i in &ms {
            *mult.entry(i).or_insert(0) += 1;
        }
        let orderings = factorial(k) / mult.values().map(|&m| factorial(m)).product::<u128>();
        let mut cols: Vec<u32> = profiles.iter().map(|p| p.colength()).collect();
        cols.sort_unstable();
        let w = match weights.get(&cols) {
            Some(w) => w.clone(),
            None => {
                let w = weight_of_colengths(cfg, &cols, &layout)?;
                weights.insert(cols.clone(), w.clone());
                w
            }
        };
        if w.is_zero() {
            continue;
        }
        profiles.push(mu.clone());
        profiles.push(nu.clone());
        let b = BranchData::new(n, profiles)?;
        let h = if connected {
            pure_hurwitz_oracle(&b, true, cfg.caps.oracle_n)?
        } else {
            pure_hurwitz_frobenius(&b)?
        };
        if h.is_zero() {
            continue;
        }
        let scale = h * Rat::from_bigint(orderings.into());
        acc = acc.add(&w.scale(&scale))?;
    }
    Ok(acc)
}

/// One row of the constellation census.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusEntry {
    /// `(μ, μ^{(1)}, …, μ^{(k)}, ν)`.
    pub profiles: Vec<Partition>,
    /// Number of transitive factorizations `h_0 h_1 ⋯ h_{k+1} = I`.
    pub count: u128,
    pub genus: i64,
    /// `d = Σ ℓ*(μ^{(i)})` over the inner profiles.
    pub d: u32,
    /// `W_G` of the inner profiles as a polynomial in c.
    pub weight: TruncatedSeries,
    pub weight_monomial: String,
}

impl CensusEntry {
    pub fn mu(&self) -> &Partition {
        &self.profiles[0]
    }

    pub fn nu(&self) -> &Partition {
        self.profiles.last().expect("at least two profiles")
    }

    /// `count/N! · W_G`, the entry's contribution to `H̃^d_G(μ,ν)`.
    pub fn total_weight(&self) -> Result<TruncatedSeries> {
        let n = self.mu().weight();
        let s = Rat::from_bigint(self.count.into()) / Rat::from_bigint(factorial(n).into());
        Ok(self.weight.scale(&s))
    }
}

/// Transitive factorizations `I = h_0 h_1 ⋯ h_{k+1}` of `S_N`, grouped by
/// cycle-type tuple, with `h_1..h_k` non-identity.
pub fn constellation_census(cfg: &WeightConfig, n: u32, k: usize) -> Result<Vec<CensusEntry>> {
    if n > cfg.caps.oracle_n {
        return Err(CoreError::OracleBoundExceeded {
            n,
            bound: cfg.caps.oracle_n,
        });
    }
    let all = partitions_of(n);
    let inner: Vec<Partition> = all.iter().filter(|p| !p.is_identity()).cloned().collect();
    let layout = cfg.c_layout();
    let mut out = Vec::new();
    if k > 0 && inner.is_empty() {
        return Ok(out);
    }
    let mut tuple: Vec<usize> = vec![0; k];
    loop {
        for mu in &all {
            for nu in &all {
                let mut profiles = vec![mu.clone()];
                profiles.extend(tuple.iter().map(|&i| inner[i].clone()));
                profiles.push(nu.clone());
                if let Some(e) = census_entry(cfg, n, profiles, &layout)? {
                    out.push(e);
                }
            }
        }
        // odometer over inner profile tuples
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(out);
            }
            tuple[pos] += 1;
            if tuple[pos] < inner.len() {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

/// The census row of one profile tuple `(μ, μ^{(1)}, …, μ^{(k)}, ν)`, or `None`
/// when it has no transitive factorization.
pub fn census_entry(
    cfg: &WeightConfig,
    n: u32,
    profiles: Vec<Partition>,
    layout: &Vars,
) -> Result<Option<CensusEntry>> {
    let parity: u32 = profiles.iter().map(|p| p.colength()).sum();
    if !parity.is_multiple_of(2) {
        return Ok(None);
    }
    let b = BranchData::new(n, profiles.clone())?;
    let count = count_factorizations(&b, true, cfg.caps.oracle_n)?;
    if count == 0 {
        return Ok(None);
    }
    let k = profiles.len() - 2;
    let inner = &profiles[1..=k];
    let d: u32 = inner.iter().map(|p| p.colength()).sum();
    let two_minus_2g = b.euler_characteristic;
    let genus = (2 - two_minus_2g) / 2;
    let mut cols: Vec<u32> = inner.iter().map(|p| p.colength()).collect();
    cols.sort_unstable();
    let weight = if k == 0 {
        TruncatedSeries::one(layout)
    } else {
        weight_of_colengths(cfg, &cols, layout)?
    };
    let lambda = Partition::new(cols).expect("colengths positive");
    let mut mono = format!("gamma^{n}*beta^{d}");
    if k > 0 {
        write!(mono, "*({}/{}!)*m_{}(c)", lambda.aut_order(), k, lambda).expect("string");
    }
    write!(
        mono,
        "*p_{}(t)*p_{}(s)/{}!",
        profiles[0],
        profiles[k + 1],
        n
    )
    .expect("string");
    Ok(Some(CensusEntry {
        profiles,
        count,
        genus,
        d,
        weight,
        weight_monomial: mono,
    }))
}

/// Census rows as CSV with columns `profiles,count,genus,weight-monomial`.
pub fn census_csv(entries: &[CensusEntry]) -> String {
    let mut s = String::from("profiles,count,genus,weight-monomial\n");
    for e in entries {
        let profiles: Vec<String> = e.profiles.iter().map(|p| p.to_string()).collect();
        writeln!(
            s,
            "\"[{}]\",{},{},{}",
            profiles.join(","),
            e.count,
            e.genus,
            e.weight_monomial
        )
        .expect("string");
    }
    s
}

/// Whether `factors` multiply to the identity (left to right) and act transitively.
pub fn is_transitive_factorization(n: usize, factors: &[Perm]) -> bool {
    let mut prod: Perm = (0..n as u8).collect();
    for f in factors {
        prod = compose(&prod, f);
    }
    let refs: Vec<&[u8]> = factors.iter().map(|f| f.as_slice()).collect();
    prod.iter().enumerate().all(|(i, &x)| i == x as usize) && is_transitive(n, &refs)
}

/// Build a permutation of `1..=n` (1-based cycle notation) as a 0-based image list.
pub fn from_cycles(n: usize, cycles: &[&[u8]]) -> Perm {
    let mut p: Perm = (0..n as u8).collect();
    for c in cycles {
        for i in 0..c.len() {
            p[c[i] as usize - 1] = c[(i + 1) % c.len()] - 1;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Param, WeightSpec};

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn bd(n: u32, ps: &[&[u32]]) -> BranchData {
        BranchData::new(n, ps.iter().map(|v| p(v)).collect()).unwrap()
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(pure_hurwitz_frobenius(&bd(2, &[&[2], &[2]])).unwrap(), Rat::new(1, 2));
        assert_eq!(
            pure_hurwitz_frobenius(&bd(3, &[&[2, 1], &[2, 1]])).unwrap(),
            Rat::new(1, 2)
        );
        assert_eq!(pure_hurwitz_frobenius(&bd(2, &[&[1, 1]])).unwrap(), Rat::new(1, 2));
        assert!(BranchData::new(2, vec![]).is_err());
        assert!(BranchData::new(2, vec![p(&[2, 1])]).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(pure_hurwitz_oracle(&bd(2, &[&[2], &[2]]), false, 6).unwrap(), Rat::new(1, 2));
        assert_eq!(pure_hurwitz_oracle(&bd(2, &[&[2], &[2]]), true, 6).unwrap(), Rat::new(1, 2));
        assert_eq!(
            pure_hurwitz_oracle(&bd(2, &[&[1, 1], &[1, 1]]), false, 6).unwrap(),
            Rat::new(1, 2)
        );
        assert_eq!(pure_hurwitz_oracle(&bd(2, &[&[1, 1], &[1, 1]]), true, 6).unwrap(), Rat::zero());
        assert_eq!(
            pure_hurwitz_oracle(&bd(3, &[&[2, 1], &[2, 1]]), false, 6).unwrap(),
            Rat::new(1, 2)
        );
        assert!(matches!(
            pure_hurwitz_oracle(&bd(7, &[&[7], &[7]]), false, 6),
            Err(CoreError::OracleBoundExceeded { .. })
        ));
    }

    #[test]
    fn oracle_matches_frobenius_small() {
        for n in 1..=4 {
            let ps = partitions_of(n);
            for a in &ps {
                for b in &ps {
                    for c in &ps {
                        let br = BranchData::new(n, vec![a.clone(), b.clone(), c.clone()]).unwrap();
                        let f = pure_hurwitz_frobenius(&br).unwrap();
                        let o = pure_hurwitz_oracle(&br, false, 6).unwrap();
                        let oc = pure_hurwitz_oracle(&br, true, 6).unwrap();
                        assert_eq!(f, o, "{a} {b} {c}");
                        assert!(oc <= o);
                    }
                }
            }
        }
    }

    #[test]
    fn connected_frobenius_matches_transitive_oracle() {
        for n in 1..=4 {
            let ps = partitions_of(n);
            for a in &ps {
                for b in &ps {
                    for c in &ps {
                        let br = BranchData::new(n, vec![a.clone(), b.clone(), c.clone()]).unwrap();
                        let f = pure_hurwitz_connected(&br).unwrap();
                        assert_eq!(f, pure_hurwitz_oracle(&br, true, 6).unwrap(), "{a} {b} {c}");
                    }
                }
            }
        }
        assert_eq!(pure_hurwitz_connected(&bd(2, &[&[1, 1], &[1, 1]])).unwrap(), Rat::zero());
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus_of(0, &p(&[2]), &p(&[2])).unwrap(), 0);
        assert_eq!(genus_of(2, &p(&[1, 1]), &p(&[1, 1])).unwrap(), 0);
        assert_eq!(genus_of(4, &p(&[1, 1]), &p(&[1, 1])).unwrap(), 1);
        assert_eq!(genus_of(1, &p(&[2]), &p(&[1, 1])).unwrap(), 0);
        assert!(genus_of(1, &p(&[2]), &p(&[2])).is_err());
    }

    #[test]
    fn weight_matches_monomial_formula() {
        let c = vec![Rat::from_int(2), Rat::from_int(-3), Rat::new(1, 2)];
        let cfg = WeightConfig::new(WeightSpec::Roots(c.clone()), vec![]);
        let vars = cfg.c_layout();
        for cols in [vec![1], vec![1, 1], vec![1, 2], vec![2, 2, 1], vec![1, 1, 1]] {
            let w = weight_of_colengths(&cfg, &cols, &vars).unwrap();
            let lam = Partition::new(cols.clone()).unwrap();
            let want = crate::partitions::monomial_m(&lam, &c)
                * Rat::from_bigint(lam.aut_order().into())
                / Rat::from_bigint(factorial(cols.len() as u32).into());
            assert_eq!(w.as_constant().unwrap(), want, "{cols:?}");
        }
    }

    #[test]
    fn weighted_examples() {
        let sym = WeightConfig::new(WeightSpec::SymbolicRoots(1), vec![]);
        let vars = sym.c_layout();
        let c1 = TruncatedSeries::var(&vars, "c1").unwrap();
        // H((2),(2),(1,1)) = 1/2
        let h = weighted_hurwitz(&sym, &p(&[2]), &p(&[1, 1]), 1, false).unwrap();
        assert_eq!(h, c1.scale(&Rat::new(1, 2)));
        // H((2),(2),(2)) vanishes in S_2
        assert!(weighted_hurwitz(&sym, &p(&[2]), &p(&[2]), 1, false).unwrap().is_zero());
        let h0 = weighted_hurwitz(&sym, &p(&[2]), &p(&[2]), 0, false).unwrap();
        assert_eq!(h0.as_constant().unwrap(), Rat::new(1, 2));
        // M = 1: only λ = (d) survives
        let two = weighted_hurwitz(&sym, &p(&[1, 1, 1]), &p(&[1, 1, 1]), 2, false).unwrap();
        for e in two.terms().keys() {
            assert_eq!(e[0], 2);
        }
    }

    #[test]
    fn weighted_is_symmetric() {
        let cfg = WeightConfig::new(WeightSpec::SymbolicRoots(2), vec![]);
        for n in 1..=4 {
            let ps = partitions_of(n);
            for mu in &ps {
                for nu in &ps {
                    for d in 0..=3 {
                        let a = weighted_hurwitz(&cfg, mu, nu, d, false).unwrap();
                        let b = weighted_hurwitz(&cfg, nu, mu, d, false).unwrap();
                        assert_eq!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn figure_one_factorization() {
        let h0 = from_cycles(5, &[&[3, 2, 1]]);
        let h1 = from_cycles(5, &[&[1, 3, 5]]);
        let h2 = from_cycles(5, &[&[1, 5], &[2, 3]]);
        let h3 = from_cycles(5, &[&[1, 4]]);
        let h4 = from_cycles(5, &[&[1, 4]]);
        let f = vec![h0, h1, h2, h3, h4];
        assert!(is_transitive_factorization(5, &f));
        let types: Vec<Partition> = f.iter().map(|h| cycle_type(h)).collect();
        assert_eq!(
            types,
            vec![p(&[3, 1, 1]), p(&[3, 1, 1]), p(&[2, 2, 1]), p(&[2, 1, 1, 1]), p(&[2, 1, 1, 1])]
        );
        let cfg = WeightConfig::new(WeightSpec::SymbolicRoots(2), vec![Param::Value(Rat::one())]);
        let e = census_entry(&cfg, 5, types, &cfg.c_layout()).unwrap().unwrap();
        assert!(e.count > 0);
        assert_eq!(e.d, 5);
        assert_eq!(e.genus, 0);
    }

    #[test]
    fn census_totals_reproduce_connected_weighted() {
        let cfg = WeightConfig::new(WeightSpec::SymbolicRoots(2), vec![]);
        let layout = cfg.c_layout();
        let n = 3;
        let mut totals: BTreeMap<(Partition, Partition, u32), TruncatedSeries> = BTreeMap::new();
        for k in 0..=2 {
            for e in constellation_census(&cfg, n, k).unwrap() {
                assert!(e.genus >= 0);
                let key = (e.mu().clone(), e.nu().clone(), e.d);
                let t = totals.entry(key).or_insert_with(|| TruncatedSeries::zero(&layout));
                *t = t.add(&e.total_weight().unwrap()).unwrap();
            }
        }
        for mu in partitions_of(n) {
            for nu in partitions_of(n) {
                for d in 0..=2 {
                    let want = weighted_hurwitz(&cfg, &mu, &nu, d, true).unwrap();
                    let got = totals
                        .get(&(mu.clone(), nu.clone(), d))
                        .cloned()
                        .unwrap_or_else(|| TruncatedSeries::zero(&layout));
                    assert_eq!(got, want, "{mu} {nu} {d}");
                }
            }
        }
    }

    #[test]
    fn census_single_sheet_and_csv() {
        let cfg = WeightConfig::new(WeightSpec::Coeffs(vec![Rat::one()]), vec![]);
        let rows = constellation_census(&cfg, 1, 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].genus, 0);
        assert_eq!(rows[0].count, 1);
        let csv = census_csv(&rows);
        assert!(csv.starts_with("profiles,count,genus,weight-monomial\n"));
        assert!(csv.contains("gamma^1*beta^0"));
        // three transpositions never close in S_2
        assert!(constellation_census(&cfg, 2, 1)
            .unwrap()
            .iter()
            .all(|e| !(e.profiles.iter().all(|q| *q == p(&[2])))));
    }
}
