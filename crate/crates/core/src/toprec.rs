//! Topological recursion on the rational spectral curve.
//!
//! Stable forms are stored in the pole basis: `ω_{g,n} = Σ c Π_i ξ_{a_i,k_i}(z_i) dz_i`
//! with `ξ_{a,k}(z) = (z − a)^{−k}` and `a` running over the ramification
//! points. Every computation uses the γ-free pair `(X̂, Ŷ)`; the recursion
//! kernel `(Y − Y∘σ_a) dX` is invariant under `X → X/γ`, `Y → γY`.

use std::collections::BTreeMap;

use serde::Serialize;
use whr_algebra::{Field, Laurent, Poly, Rat, RatFunc, TruncatedSeries, Var, Vars};

use crate::basis::{BETA, GAMMA};
use crate::config::WeightConfig;
use crate::correlators::{correlator_layout, x_names, CorrelatorTable};
use crate::curve::{CurveField, SpectralCurve};
use crate::error::{CoreError, Result};

/// `(point index, pole order)` per variable.
pub type PoleKey = Vec<(usize, u32)>;

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaForm<F: Field> {
    pub g: u32,
    pub n: usize,
    pub terms: BTreeMap<PoleKey, F>,
}

/// Highest pole order a stable `ω_{g,n}` can carry in one variable.
pub fn max_pole_order(g: u32, n: usize) -> u32 {
    6 * g + 2 * n as u32 - 4
}

/// Default jet order: twice the largest pole order plus four.
pub fn default_jet_order(g: u32, n: usize) -> usize {
    2 * max_pole_order(g, n) as usize + 4
}

impl<F: CurveField> OmegaForm<F> {
    fn empty(g: u32, n: usize) -> Self {
        OmegaForm {
            g,
            n,
            terms: BTreeMap::new(),
        }
    }

    fn add_term(&mut self, key: PoleKey, c: F) {
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().add_ref(&c);
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = OmegaForm::empty(self.g, self.n);
        for (k, c) in &self.terms {
            let key: PoleKey = perm.iter().map(|&p| k[p]).collect();
            out.add_term(key, c.clone());
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        (1..self.n).all(|i| {
            let mut perm: Vec<usize> = (0..self.n).collect();
            perm.swap(i - 1, i);
            self.permuted(&perm) == *self
        })
    }

    /// Largest pole order per ramification point, over all variables.
    pub fn pole_orders(&self, points: usize) -> Vec<u32> {
        let mut out = vec![0; points];
        for k in self.terms.keys() {
            for &(a, o) in k {
                out[a] = out[a].max(o);
            }
        }
        out
    }

    /// Pole-basis terms with the point list; coefficients as strings.
    pub fn to_json(&self, points: &[F], parameter: &str) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, c)| {
                serde_json::json!({
                    "poles": k.iter().map(|&(a, o)| [a as u64, o as u64]).collect::<Vec<_>>(),
                    "coeff": c.render(parameter),
                })
            })
            .collect();
        serde_json::json!({
            "g": self.g,
            "n": self.n,
            "basis": "(z-a)^(-k) dz",
            "points": points.iter().map(|p| p.render(parameter)).collect::<Vec<_>>(),
            "terms": terms,
        })
    }

    /// Exact value at a point of `F^n` away from the poles.
    pub fn eval(&self, points: &[F], zs: &[F]) -> Result<F> {
        let mut acc = zs[0].zero_like();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (i, &(a, o)) in k.iter().enumerate() {
                t = t.mul_ref(&zs[i].sub_ref(&points[a]).pow(-(o as i64))?);
            }
            acc = acc.add_ref(&t);
        }
        Ok(acc)
    }
}

type SpecKey = Vec<Option<(usize, u32)>>;

/// A Laurent series in `t = z − a` per spectator pole assignment.
#[derive(Clone)]
struct Local<F: Field> {
    terms: BTreeMap<SpecKey, Laurent<F>>,
}

impl<F: CurveField> Local<F> {
    fn new() -> Self {
        Local { terms: BTreeMap::new() }
    }

    fn push(&mut self, key: SpecKey, s: Laurent<F>) {
        if s.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(old) => {
                let v = old.add(&s);
                self.terms.insert(key, v);
            }
            None => {
                self.terms.insert(key, s);
            }
        }
    }

    fn add(&mut self, o: Local<F>) {
        for (k, v) in o.terms {
            self.push(k, v);
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Local::new();
        for (ka, a) in &self.terms {
            for (kb, b) in &o.terms {
                let key: SpecKey = ka.iter().zip(kb).map(|(x, y)| x.or(*y)).collect();
                out.push(key, a.mul(b));
            }
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Arg {
    /// `z = a + t`
    Z,
    /// `σ_a(z) = a + u(t)`
    Sigma,
}

struct PointData<F: Field> {
    index: usize,
    t: Laurent<F>,
    u: Laurent<F>,
    /// `σ_a′ / (2(Ŷ(z) − Ŷ(σ_a z)) X̂′(z))`
    kappa: Laurent<F>,
    xi: BTreeMap<(usize, u32, Arg), Laurent<F>>,
}

/// Memoised recursion over one coefficient field.
pub struct TopRec<F: CurveField> {
    pub curve: SpectralCurve,
    pub points: Vec<F>,
    pub table: BTreeMap<(u32, usize), OmegaForm<F>>,
    pub jet_order: Option<usize>,
}

impl<F: CurveField> TopRec<F> {
    pub fn new(curve: &SpectralCurve, sample: &F, jet_order: Option<usize>) -> Result<Self> {
        curve.require_simple()?;
        let points = curve
            .ramification
            .iter()
            .map(|p| curve.point_in(&p.value, sample))
            .collect::<Result<Vec<_>>>()?;
        if points.is_empty() {
            return Err(CoreError::Config("the curve has no finite ramification points".into()));
        }
        Ok(TopRec {
            curve: curve.clone(),
            points,
            table: BTreeMap::new(),
            jet_order,
        })
    }

    fn sample(&self) -> F {
        self.points[0].zero_like()
    }

    fn point_data(&self, index: usize, jet: usize) -> Result<PointData<F>> {
        let a = &self.points[index];
        let prec = jet as i32 + 1;
        let u = self.curve.involution_jet(a, jet)?;
        let one = a.one_like();
        let t = Laurent::monomial(one.clone(), 1, prec);
        let y = self.curve.y_local(a, prec + 2)?;
        let dy = y.sub(&y.compose(&u)?);
        let xp = self.curve.x_local(a, prec + 2)?.derivative();
        let den = dy.mul(&xp).scale_rat(&Rat::from_int(2));
        let kappa = u.derivative().div(&den)?;
        Ok(PointData {
            index,
            t,
            u,
            kappa,
            xi: BTreeMap::new(),
        })
    }

    /// `ξ_{b,k}` at `z` or `σ_a(z)` near `a`.
    fn xi(&self, pd: &mut PointData<F>, b: usize, k: u32, arg: Arg) -> Result<Laurent<F>> {
        if let Some(s) = pd.xi.get(&(b, k, arg)) {
            return Ok(s.clone());
        }
        let base = match arg {
            Arg::Z => pd.t.clone(),
            Arg::Sigma => pd.u.clone(),
        };
        let shifted = if b == pd.index {
            base
        } else {
            let d = self.points[pd.index].sub_ref(&self.points[b]);
            base.add(&Laurent::monomial(d, 0, base.prec()))
        };
        let s = shifted.pow(-(k as i32))?;
        pd.xi.insert((b, k, arg), s.clone());
        Ok(s)
    }

    fn form(&self, g: u32, n: usize) -> Result<&OmegaForm<F>> {
        self.table.get(&(g, n)).ok_or(CoreError::MissingDependency(g, n as u32))
    }

    /// `ω(w, v_I)` with `w` local and the rest on spectator slots `slots`.
    fn local_one(&self, pd: &mut PointData<F>, g: u32, slots: &[usize], arg: Arg, width: usize) -> Result<Local<F>> {
        let mut out = Local::new();
        if g == 0 && slots.len() == 1 {
            // ω_{0,2}(w, v) = Σ_m (m+1) w^m ξ_{a,m+2}(v)
            let base = match arg {
                Arg::Z => pd.t.clone(),
                Arg::Sigma => pd.u.clone(),
            };
            let top = base.prec();
            let mut p = Laurent::monomial(base.sample().one_like(), 0, top);
            for m in 0..top.max(0) as u32 {
                let mut key = vec![None; width];
                key[slots[0]] = Some((pd.index, m + 2));
                out.push(key, p.scale_rat(&Rat::from_int(m as i64 + 1)));
                p = p.mul(&base);
            }
            return Ok(out);
        }
        let form = self.form(g, slots.len() + 1)?.clone();
        for (k, c) in &form.terms {
            let s = self.xi(pd, k[0].0, k[0].1, arg)?.scale(c);
            let mut key = vec![None; width];
            for (j, &slot) in slots.iter().enumerate() {
                key[slot] = Some(k[j + 1]);
            }
            out.push(key, s);
        }
        Ok(out)
    }

    /// `𝒲_{g,n}(z, σ_a(z), z_2..z_n)` as a coefficient of `dz dσ_a(z)`.
    fn assemble(&self, pd: &mut PointData<F>, g: u32, n: usize) -> Result<Local<F>> {
        let width = n - 1;
        let slots: Vec<usize> = (0..width).collect();
        let mut acc = Local::new();
        if g >= 1 {
            if g == 1 && n == 1 {
                let d = pd.t.sub(&pd.u).pow(-2)?;
                acc.push(vec![], d);
            } else {
                let form = self.form(g - 1, n + 1)?.clone();
                for (k, c) in &form.terms {
                    let s = self
                        .xi(pd, k[0].0, k[0].1, Arg::Z)?
                        .mul(&self.xi(pd, k[1].0, k[1].1, Arg::Sigma)?)
                        .scale(c);
                    let mut key = vec![None; width];
                    for (j, slot) in slots.iter().enumerate() {
                        key[*slot] = Some(k[j + 2]);
                    }
                    acc.push(key, s);
                }
            }
        }
        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0..(1usize << width) {
                let i1: Vec<usize> = slots.iter().copied().filter(|s| mask & (1 << s) != 0).collect();
                let i2: Vec<usize> = slots.iter().copied().filter(|s| mask & (1 << s) == 0).collect();
                if (g1 == 0 && i1.is_empty()) || (g2 == 0 && i2.is_empty()) {
                    continue;
                }
                let f1 = self.local_one(pd, g1, &i1, Arg::Z, width)?;
                let f2 = self.local_one(pd, g2, &i2, Arg::Sigma, width)?;
                acc.add(f1.mul(&f2));
            }
        }
        Ok(acc)
    }

    /// One recursion step; all lower forms must be present.
    pub fn tr_step(&self, g: u32, n: usize, jet: usize) -> Result<OmegaForm<F>> {
        if 2 * g as i64 - 2 + n as i64 <= 0 || n == 0 {
            return Err(CoreError::Config(format!("({g},{n}) is not a stable pair")));
        }
        let mut out = OmegaForm::empty(g, n);
        for index in 0..self.points.len() {
            let mut pd = self.point_data(index, jet)?;
            let w = self.assemble(&mut pd, g, n)?;
            let min_val = w.terms.values().filter_map(|s| s.valuation()).min();
            let Some(min_val) = min_val else { continue };
            let mut tm = Laurent::monomial(self.sample().one_like(), 0, pd.t.prec());
            let mut um = Laurent::monomial(self.sample().one_like(), 0, pd.u.prec());
            for m in 0..=(1 - min_val).max(0) {
                let km = tm.sub(&um).mul(&pd.kappa);
                for (key, s) in &w.terms {
                    let r = residue_pairing(&km, s, jet)?;
                    if r.is_zero() {
                        continue;
                    }
                    let mut full: PoleKey = vec![(index, m as u32 + 1)];
                    full.extend(key.iter().map(|k| k.expect("every spectator carries a pole")));
                    out.add_term(full, r);
                }
                tm = tm.mul(&pd.t);
                um = um.mul(&pd.u);
            }
        }
        Ok(out)
    }

    /// Compute `ω_{g,n}` and everything it depends on.
    pub fn compute(&mut self, g: u32, n: usize) -> Result<OmegaForm<F>> {
        if let Some(f) = self.table.get(&(g, n)) {
            return Ok(f.clone());
        }
        if g >= 1 && !(g == 1 && n == 1) {
            self.compute(g - 1, n + 1)?;
        }
        for g1 in 0..=g {
            for m in 0..n {
                let chi = 2 * g1 as i64 - 2 + m as i64 + 1;
                if chi > 0 && (g1, m + 1) != (g, n) && chi < 2 * g as i64 - 2 + n as i64 {
                    self.compute(g1, m + 1)?;
                }
            }
        }
        let jet = self.jet_order.unwrap_or_else(|| default_jet_order(g, n));
        let f = self.tr_step(g, n, jet)?;
        self.table.insert((g, n), f.clone());
        Ok(f)
    }

    /// Every stable `(g, n)` with `2g − 2 + n ≤ chi`, ordered by `2g − 2 + n`, then `g`.
    pub fn compute_upto(&mut self, chi: u32) -> Result<Vec<(u32, usize)>> {
        let mut done = Vec::new();
        for c in 1..=chi as i64 {
            for g in 0..=((c + 1) / 2) as u32 {
                let n = c + 2 - 2 * g as i64;
                if n >= 1 {
                    self.compute(g, n as usize)?;
                    done.push((g, n as usize));
                }
            }
        }
        Ok(done)
    }

    /// Recompute with two extra jet orders and compare.
    pub fn stabilised(&self, g: u32, n: usize) -> Result<bool> {
        let jet = self.jet_order.unwrap_or_else(|| default_jet_order(g, n));
        Ok(self.tr_step(g, n, jet + 2)? == *self.form(g, n)?)
    }
}

/// `[t^{-1}]` of `a·b`, refusing coefficients beyond the known precision.
fn residue_pairing<F: CurveField>(a: &Laurent<F>, b: &Laurent<F>, jet: usize) -> Result<F> {
    let zero = a.sample().zero_like();
    let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) else {
        return Ok(zero);
    };
    let mut acc = zero;
    for i in va..=(-1 - vb) {
        if i >= a.prec() || -1 - i >= b.prec() {
            return Err(CoreError::JetTooShort(jet));
        }
        acc = acc.add_ref(&a.coeff(i)?.mul_ref(&b.coeff(-1 - i)?));
    }
    Ok(acc)
}

/// `ω_{0,1} = Ŷ X̂′ dz = S(z)σ(z)/(z G(S(z))) dz`, as numerator and denominator.
pub fn omega_01(curve: &SpectralCurve) -> (Poly<RatFunc>, Poly<RatFunc>) {
    let num = curve.s.mul(&curve.sigma);
    let den = curve.x_num().mul(&curve.gs);
    (num, den)
}

/// Pole report for one stable form.
#[derive(Clone, Debug, Serialize)]
pub struct PoleReport {
    pub g: u32,
    pub n: usize,
    pub points: Vec<String>,
    pub pole_orders: Vec<u32>,
    /// Every per-variable slice has a denominator built from `z − a`, `a ∈ 𝒜`,
    /// and each recorded order is attained.
    pub only_ramification: bool,
    /// Numerator degree at most denominator degree − 2 in every variable.
    pub regular_at_infinity: bool,
    /// Pole order of the primitive `F̃_{g,n}` within `3(2g − 2 + n)`.
    pub primitive_order_within_bound: bool,
    pub symmetric: bool,
}

impl PoleReport {
    pub fn passed(&self) -> bool {
        self.only_ramification && self.regular_at_infinity && self.primitive_order_within_bound && self.symmetric
    }
}

pub fn pole_report<F: CurveField>(form: &OmegaForm<F>, points: &[F]) -> Result<PoleReport> {
    let orders = form.pole_orders(points.len());
    let zero = points[0].zero_like();
    let mut only = true;
    let mut regular = true;
    for var in 0..form.n {
        // group by the other variables' keys
        let mut slices: BTreeMap<PoleKey, Vec<(usize, u32, F)>> = BTreeMap::new();
        for (k, c) in &form.terms {
            let mut rest = k.clone();
            let (a, o) = rest.remove(var);
            slices.entry(rest).or_default().push((a, o, c.clone()));
        }
        for slice in slices.values() {
            let mut top = vec![0u32; points.len()];
            for (a, o, _) in slice {
                top[*a] = top[*a].max(*o);
            }
            let lin = |a: usize| Poly::new(vec![points[a].neg_ref(), zero.one_like()], zero.clone());
            let mut den = Poly::one(&zero);
            for (a, &k) in top.iter().enumerate() {
                den = den.mul(&lin(a).pow(k));
            }
            let mut num = Poly::zero(&zero);
            for (a, o, c) in slice {
                let mut term = Poly::constant(c.clone());
                for (b, &k) in top.iter().enumerate() {
                    let e = if b == *a { k - o } else { k };
                    term = term.mul(&lin(b).pow(e));
                }
                num = num.add(&term);
            }
            if num.is_zero() {
                continue;
            }
            let dn = num.degree().unwrap_or(0) as i64;
            let dd = den.degree().unwrap_or(0) as i64;
            if dn > dd - 2 {
                regular = false;
            }
            for (a, &k) in top.iter().enumerate() {
                if k > 0 && num.eval(&points[a]).is_zero() {
                    only = false;
                }
            }
        }
    }
    let chi = 2 * form.g as i64 - 2 + form.n as i64;
    let within = orders.iter().all(|&o| (o as i64 - 1) <= 3 * chi);
    Ok(PoleReport {
        g: form.g,
        n: form.n,
        points: points.iter().map(|p| p.render("s")).collect(),
        pole_orders: orders,
        only_ramification: only,
        regular_at_infinity: regular,
        primitive_order_within_bound: within,
        symmetric: form.is_symmetric(),
    })
}

/// `W̃_{g,n}` coefficients keyed by x-exponents, with `γ^{Σ(e_i+1)}` implicit.
pub type CoefficientMap<F> = BTreeMap<Vec<i32>, F>;

/// `z(x̂)`, the compositional inverse of `X̂`, to `x̂^{prec−1}`.
fn z_of_x<F: CurveField>(curve: &SpectralCurve, sample: &F, prec: i32) -> Laurent<F> {
    let gs: Vec<F> = curve.gs.coeffs().iter().map(|c| sample.lift(c)).collect();
    let x = Laurent::monomial(sample.one_like(), 1, prec);
    let mut z = Laurent::zero(sample, prec);
    for _ in 0..prec {
        let mut acc = Laurent::zero(sample, prec);
        for c in gs.iter().rev() {
            acc = acc.mul(&z).add(&Laurent::monomial(c.clone(), 0, prec));
        }
        z = x.mul(&acc).truncate(prec);
    }
    z
}

/// Pull `ω_{g,n}` back to `W̃_{g,n}(x̂)` for `γ`-degree `Σ(e_i + 1) ≤ gamma_cap`.
pub fn omega_to_w<F: CurveField>(
    curve: &SpectralCurve,
    points: &[F],
    form: &OmegaForm<F>,
    gamma_cap: i32,
) -> Result<CoefficientMap<F>> {
    let sample = points[0].zero_like();
    let prec = gamma_cap + 1;
    let z = z_of_x(curve, &sample, prec);
    let zp = z.derivative();
    let mut cache: BTreeMap<(usize, u32), Laurent<F>> = BTreeMap::new();
    for k in form.terms.keys() {
        for &(a, o) in k {
            if let std::collections::btree_map::Entry::Vacant(v) = cache.entry((a, o)) {
                let shifted = z.add(&Laurent::monomial(points[a].neg_ref(), 0, prec));
                v.insert(shifted.pow(-(o as i32))?.mul(&zp).truncate(prec));
            }
        }
    }
    let tuples = exponent_tuples(form.n, gamma_cap);
    let mut out = CoefficientMap::new();
    for e in tuples {
        let mut acc = sample.clone();
        for (k, c) in &form.terms {
            let mut t = c.clone();
            for (i, &(a, o)) in k.iter().enumerate() {
                t = t.mul_ref(&cache[&(a, o)].coeff(e[i])?);
                if t.is_zero() {
                    break;
                }
            }
            acc = acc.add_ref(&t);
        }
        if !acc.is_zero() {
            out.insert(e, acc);
        }
    }
    Ok(out)
}

fn exponent_tuples(n: usize, gamma_cap: i32) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &out {
            let used: i32 = t.iter().map(|e| e + 1).sum();
            for e in 0..(gamma_cap - used - 1 + 1).max(0) {
                let mut u = t.clone();
                u.push(e);
                next.push(u);
            }
        }
        out = next;
    }
    out.retain(|t| t.iter().map(|e| e + 1).sum::<i32>() <= gamma_cap);
    out
}

fn param_poly_to_ratfunc(p: &BTreeMap<i32, Rat>) -> RatFunc {
    let deg = p.keys().max().copied().unwrap_or(0).max(0) as usize;
    let mut c = vec![Rat::zero(); deg + 1];
    for (k, v) in p {
        c[*k as usize] = v.clone();
    }
    RatFunc::from_poly(Poly::from_rats(&c))
}

/// A correlator slice as coefficients in `Q(s)`, checking the γ-grading.
pub fn correlator_map(t: &CorrelatorTable, parameter: Option<&str>) -> Result<CoefficientMap<RatFunc>> {
    let vars = t.series.vars();
    let ig = vars.index(GAMMA)?;
    let xs: Vec<usize> = x_names(t.n).iter().map(|x| vars.index(x)).collect::<std::result::Result<_, _>>()?;
    let ip = parameter.map(|p| vars.index(p)).transpose()?;
    let mut grouped: BTreeMap<Vec<i32>, BTreeMap<i32, Rat>> = BTreeMap::new();
    for (e, c) in t.series.terms() {
        let xe: Vec<i32> = xs.iter().map(|&i| e[i]).collect();
        let grade: i32 = xe.iter().map(|v| v + 1).sum();
        for (i, v) in e.iter().enumerate() {
            let allowed = i == ig || xs.contains(&i) || Some(i) == ip;
            if *v != 0 && !allowed {
                return Err(CoreError::Config(format!(
                    "unexpected variable {} in a genus slice",
                    vars.get(i).name
                )));
            }
        }
        if e[ig] != grade {
            return Err(CoreError::Config(format!("γ-grading broken at {xe:?}")));
        }
        let pe = ip.map_or(0, |i| e[i]);
        *grouped.entry(xe).or_default().entry(pe).or_insert_with(Rat::zero) += c;
    }
    Ok(grouped
        .into_iter()
        .map(|(k, v)| (k, param_poly_to_ratfunc(&v)))
        .filter(|(_, v)| !v.is_zero())
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub g: u32,
    pub n: usize,
    pub gamma_cap: i32,
    pub compared: usize,
    pub mismatches: Vec<String>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare a pulled-back form with an enumerative slice; extension-field
/// coefficients must land in the base field.
pub fn compare_maps<F: CurveField>(
    g: u32,
    n: usize,
    gamma_cap: i32,
    tr: &CoefficientMap<F>,
    truth: &CoefficientMap<RatFunc>,
    to_base: impl Fn(&F) -> Option<RatFunc>,
) -> Comparison {
    let mut mismatches = Vec::new();
    let tuples = exponent_tuples(n, gamma_cap);
    for e in &tuples {
        let lhs = match tr.get(e) {
            Some(v) => to_base(v),
            None => Some(RatFunc::constant(Rat::zero())),
        };
        let rhs = truth.get(e).cloned().unwrap_or_else(|| RatFunc::constant(Rat::zero()));
        match lhs {
            Some(l) if l == rhs => {}
            Some(l) => mismatches.push(format!("x^{e:?}: recursion {l}, enumeration {rhs}")),
            None => mismatches.push(format!("x^{e:?}: coefficient outside the base field")),
        }
    }
    Comparison {
        g,
        n,
        gamma_cap,
        compared: tuples.len(),
        mismatches,
    }
}

/// `W̃_{0,1}(x) = γ Ŷ(z(γx))` in the correlator layout.
pub fn w01_from_curve(cfg: &WeightConfig, gamma_cap: i32) -> Result<TruncatedSeries> {
    let vars = correlator_layout(cfg, 1, gamma_cap);
    let xh = TruncatedSeries::var(&vars, GAMMA)?.mul(&TruncatedSeries::var(&vars, "x1")?)?;
    let z = z_series(cfg, &xh)?;
    // S(z)/z = Σ k s_k z^{k−1}
    let mut s_over_z = TruncatedSeries::zero(&vars);
    for k in (1..=cfg.l()).rev() {
        let c = cfg.s_series(k, &vars)?.scale(&Rat::from_int(k as i64));
        s_over_z = s_over_z.mul(&z)?.add(&c)?;
    }
    let y = s_over_z.mul(&cfg.g_of(&cfg.s_of(&z)?)?)?;
    Ok(y.mul(&TruncatedSeries::var(&vars, GAMMA)?)?)
}

fn z_series(cfg: &WeightConfig, xh: &TruncatedSeries) -> Result<TruncatedSeries> {
    let vars = xh.vars().clone();
    let mut z = TruncatedSeries::zero(&vars);
    let cap = vars.get(vars.index(GAMMA)?).cap.unwrap_or(0);
    for _ in 0..=cap {
        z = xh.mul(&cfg.g_of(&cfg.s_of(&z)?)?)?;
    }
    Ok(z)
}

/// `W̃_{0,2}(x_1, x_2) = γ² z′z′/(z_1 − z_2)² − 1/(x_1 − x_2)²` in the correlator layout.
pub fn w02_from_curve(cfg: &WeightConfig, gamma_cap: i32) -> Result<TruncatedSeries> {
    // one spare γ order absorbs the shift below
    let vars = correlator_layout(cfg, 2, gamma_cap + 1);
    let gamma = TruncatedSeries::var(&vars, GAMMA)?;
    let z = |x: &str| -> Result<TruncatedSeries> { z_series(cfg, &gamma.mul(&TruncatedSeries::var(&vars, x)?)?) };
    let (z1, z2) = (z("x1")?, z("x2")?);
    // z′(γx) = ∂_x z(γx) / γ
    let d1 = z1.derivative("x1")?.shift_var(GAMMA, -1)?;
    let d2 = z2.derivative("x2")?.shift_var(GAMMA, -1)?;
    let q = z1.sub(&z2)?.div_difference("x1", "x2")?.shift_var(GAMMA, -1)?;
    let num = d1.mul(&d2)?.sub(&q.mul(&q)?)?;
    let w = num
        .div_difference("x1", "x2")?
        .div_difference("x1", "x2")?
        .mul(&q.mul(&q)?.inverse()?)?;
    Ok(w.reembed(&correlator_layout(cfg, 2, gamma_cap))?)
}

/// `F̃_{0,3}` in closed form: `A(z) = X(z)/(X′(z)S′(z))` and the corrections
/// `C_b = X(b)/(X′(b)S″(b))` over the roots of `S′`.
#[derive(Clone, Debug)]
pub struct F03ClosedForm {
    pub a_num: Poly<RatFunc>,
    pub a_den: Poly<RatFunc>,
    pub corrections: Vec<(RatFunc, RatFunc)>,
}

pub fn f03_closed_form(curve: &SpectralCurve) -> Result<F03ClosedForm> {
    let sp = curve.s.derivative();
    let spp = sp.derivative();
    // X/X′ = z G(S)/σ
    let a_num = curve.x_num().mul(&curve.gs);
    let a_den = curve.sigma.mul(&sp);
    let mut corrections = Vec::new();
    match sp.degree() {
        Some(0) | None => {}
        Some(1) => {
            let b = sp.coeff(0).neg_ref().div_ref(&sp.coeff(1))?;
            let sigma_b = curve.sigma.eval(&b);
            let s2 = spp.eval(&b);
            if sigma_b.is_zero() || s2.is_zero() {
                return Err(CoreError::DegenerateS("a root of S′ is degenerate".into()));
            }
            let c = b.mul_ref(&curve.gs.eval(&b)).div_ref(&sigma_b.mul_ref(&s2))?;
            corrections.push((b, c));
        }
        Some(_) => {
            return Err(CoreError::UnsupportedFieldTower(
                "S′ of degree above one needs roots outside Q(s)".into(),
            ))
        }
    }
    Ok(F03ClosedForm {
        a_num,
        a_den,
        corrections,
    })
}

impl F03ClosedForm {
    /// Exact value at a point.
    pub fn eval(&self, z: [&RatFunc; 3]) -> Result<RatFunc> {
        let a = |w: &RatFunc| -> Result<RatFunc> { Ok(self.a_num.eval(w).div_ref(&self.a_den.eval(w))?) };
        let mut acc = RatFunc::constant(Rat::zero());
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let d = z[i].sub_ref(z[j]).mul_ref(&z[i].sub_ref(z[k]));
            acc = acc.add_ref(&a(z[i])?.div_ref(&d)?);
        }
        for (b, c) in &self.corrections {
            let mut d = RatFunc::constant(Rat::one());
            for w in z {
                d = d.mul_ref(&w.sub_ref(b));
            }
            acc = acc.sub_ref(&c.div_ref(&d)?);
        }
        Ok(acc)
    }
}

/// Exact check of `∂_{z_1}∂_{z_2}∂_{z_3} F̃_{0,3} = ω_{0,3}` as an identity of
/// rational functions, after clearing all denominators.
pub fn f03_matches(curve: &SpectralCurve, points: &[RatFunc], omega: &OmegaForm<RatFunc>) -> Result<bool> {
    let cf = f03_closed_form(curve)?;
    let param = curve.parameter.clone();
    let mut v = vec![Var::free("z1"), Var::free("z2"), Var::free("z3")];
    if let Some(p) = &param {
        v.push(Var::free(p));
    }
    let vars = Vars::new(v);
    let names = ["z1", "z2", "z3"];
    // s-denominators of every coefficient
    let mut lc = Poly::from_ints(&[1]);
    let mut note = |r: &RatFunc| {
        let g = lc.gcd(r.den());
        lc = lc.mul(&r.den().exact_div(&g).expect("gcd divides"));
    };
    for c in omega.terms.values() {
        note(c);
    }
    for (b, c) in &cf.corrections {
        note(b);
        note(c);
    }
    let lcr = RatFunc::from_poly(lc);
    let k = omega.pole_orders(points.len()).into_iter().max().unwrap_or(0).max(2);
    let coeff = |r: &RatFunc| -> Result<TruncatedSeries> {
        let r = r.mul_ref(&lcr);
        let p = r.as_poly().ok_or_else(|| CoreError::Config("denominator left after clearing".into()))?;
        rf_poly_series(p, &vars, param.as_deref(), None)
    };
    let lift = |p: &Poly<RatFunc>, z: &str| -> Result<TruncatedSeries> {
        let mut acc = TruncatedSeries::zero(&vars);
        for c in p.coeffs().iter().rev() {
            let cp = c.as_poly().ok_or_else(|| CoreError::Config("curve coefficient is not polynomial in s".into()))?;
            acc = acc.mul(&TruncatedSeries::var(&vars, z)?)?.add(&rf_poly_series(cp, &vars, param.as_deref(), None)?)?;
        }
        Ok(acc)
    };
    let zv = |i: usize| TruncatedSeries::var(&vars, names[i]);
    let sigma_k = curve.sigma.pow(k);
    let da = cf.a_den.clone();
    let p_of = |i: usize| -> Result<TruncatedSeries> { lift(&da.mul(&da).mul(&sigma_k), names[i]) };
    let lcs = coeff(&RatFunc::constant(Rat::one()))?;
    let mut lhs = TruncatedSeries::zero(&vars);
    let na = &cf.a_num;
    let a_prime_num = na.derivative().mul(&da).sub(&na.mul(&da.derivative()));
    for i in 0..3 {
        let (j, kk) = ((i + 1) % 3, (i + 2) % 3);
        let (zi, zj, zk) = (zv(i)?, zv(j)?, zv(kk)?);
        let dij = zi.sub(&zj)?;
        let dik = zi.sub(&zk)?;
        let djk = zj.sub(&zk)?;
        let inner = lift(&a_prime_num, names[i])?
            .mul(&dij)?
            .mul(&dik)?
            .sub(&lift(&na.mul(&da), names[i])?.mul(&dij.add(&dik)?)?.scale(&Rat::from_int(2)))?;
        let block = djk
            .pow(3)?
            .mul(&lift(&sigma_k, names[i])?)?
            .mul(&inner)?
            .mul(&p_of(j)?)?
            .mul(&p_of(kk)?)?
            .mul(&lcs)?
            .neg();
        lhs = lhs.add(&block)?;
    }
    let delta = zv(0)?.sub(&zv(1)?)?.mul(&zv(1)?.sub(&zv(2)?)?)?.mul(&zv(2)?.sub(&zv(0)?)?)?;
    let delta3 = delta.pow(3)?;
    for (b, c) in &cf.corrections {
        // P(z)/(z − b)² = σ^{k+2} (S′/(z − b))², with S′ = c₁(z − b)
        let c1 = curve.s.derivative().coeff(1);
        let reduced = sigma_k.mul(&curve.sigma.pow(2)).mul(&Poly::constant(c1.mul_ref(&c1)));
        let mut t = delta3.mul(&coeff(c)?)?;
        for name in names {
            t = t.mul(&lift(&reduced, name)?)?;
        }
        lhs = lhs.add(&t)?;
        let _ = b;
    }
    let mut rhs = TruncatedSeries::zero(&vars);
    for (key, c) in &omega.terms {
        let mut t = delta3.mul(&coeff(c)?)?;
        for (i, &(a, o)) in key.iter().enumerate() {
            let lin = Poly::new(vec![points[a].neg_ref(), points[a].one_like()], points[a].zero_like());
            let full = da.mul(&da).mul(&sigma_k);
            let reduced = full.exact_div(&lin.pow(o))?;
            t = t.mul(&lift(&reduced, names[i])?)?;
        }
        rhs = rhs.add(&t)?;
    }
    Ok(lhs == rhs)
}

fn rf_poly_series(p: &Poly<Rat>, vars: &Vars, param: Option<&str>, _z: Option<&str>) -> Result<TruncatedSeries> {
    match param {
        None => Ok(TruncatedSeries::constant(vars, p.coeff(0))),
        Some(name) => {
            let mut acc = TruncatedSeries::zero(vars);
            let s = TruncatedSeries::var(vars, name)?;
            for c in p.coeffs().iter().rev() {
                acc = acc.mul(&s)?.add_constant(c);
            }
            Ok(acc)
        }
    }
}

/// Drop the β variable bookkeeping from a correlator-layout series: the
/// generating-function side of the (0,1) and (0,2) checks.
pub fn strip_beta(t: &CorrelatorTable) -> Result<TruncatedSeries> {
    Ok(t.series.filter_var(BETA, 0, 0)?)
}
