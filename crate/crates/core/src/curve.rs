//! The classical spectral curve.
//!
//! Everything is stored in the γ-free normalisation `X̂ = z/G(S(z))`,
//! `Ŷ = S(z)G(S(z))/z`; the curve itself is `X = X̂/γ`, `Y = γŶ`. Coefficients
//! live in `Q(s)` for at most one symbolic flow parameter `s`.

use std::sync::Arc;

use serde::Serialize;
use whr_algebra::{
    complex::bits_for_digits, complex_roots, poly_resultant_free_roots, AlgExt, BigComplex, Field, Laurent, Matrix,
    Poly, Rat, RatFunc, Root,
};

use crate::basis::{BasisContext, Window, BETA, GAMMA};
use crate::config::{Param, WeightConfig};
use crate::error::{CoreError, Result};
use crate::kernel::{folded_data, projector_m};

/// Coefficient fields the curve computations run over.
pub trait CurveField: Field {
    /// Embed a value of `Q(s)`.
    fn lift(&self, r: &RatFunc) -> Self;
    /// The adjoined root, for extension fields.
    fn theta(&self) -> Option<Self> {
        None
    }
    /// Text form with the flow parameter written as `parameter`.
    fn render(&self, parameter: &str) -> String;
}

impl CurveField for RatFunc {
    fn lift(&self, r: &RatFunc) -> Self {
        r.clone()
    }
    fn render(&self, parameter: &str) -> String {
        self.display_in(parameter)
    }
}

impl CurveField for AlgExt<RatFunc> {
    fn lift(&self, r: &RatFunc) -> Self {
        AlgExt::from_base(self.modulus().clone(), r.clone())
    }
    fn theta(&self) -> Option<Self> {
        AlgExt::generator(self.modulus().clone()).ok()
    }
    fn render(&self, parameter: &str) -> String {
        let parts: Vec<String> = self
            .elem()
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({})", c.display_in(parameter)),
                1 => format!("({})*θ", c.display_in(parameter)),
                _ => format!("({})*θ^{i}", c.display_in(parameter)),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FieldBackend {
    Rational,
    /// `Q(θ)` for one irreducible quadratic.
    Quadratic { minimal: String },
    BigComplex,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RamValue {
    Rational(Rat),
    /// Root of the monic quadratic `θ² + bθ + c`: `θ` itself, or `−b − θ`.
    Quadratic { minimal: Poly<Rat>, conjugate: bool },
    Complex(BigComplex),
}

impl std::fmt::Display for RamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RamValue::Rational(r) => write!(f, "{r}"),
            RamValue::Quadratic { minimal, conjugate } => {
                let b = minimal.coeff(1);
                if *conjugate {
                    write!(f, "{}-θ", -b)
                } else {
                    write!(f, "θ")
                }
                .and_then(|_| write!(f, " [θ root of {}]", minimal.display_in("θ")))
            }
            RamValue::Complex(c) => write!(f, "{}", c.to_decimal_string(30)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RamPoint {
    pub value: RamValue,
    pub multiplicity: usize,
    /// `σ′(a) ≠ 0` (order-two branching of X) and `Y′(a) ≠ 0`.
    pub simple: bool,
}

#[derive(Clone, Debug)]
pub struct SpectralCurve {
    pub cfg: WeightConfig,
    /// Name of the symbolic flow parameter, if any.
    pub parameter: Option<String>,
    pub s: Poly<RatFunc>,
    pub g: Poly<Rat>,
    /// `G(S(z))`.
    pub gs: Poly<RatFunc>,
    pub sigma: Poly<RatFunc>,
    pub backend: FieldBackend,
    pub ramification: Vec<RamPoint>,
}

fn rf(r: &Rat) -> RatFunc {
    RatFunc::constant(r.clone())
}

fn rf_zero() -> RatFunc {
    rf(&Rat::zero())
}

fn z_poly() -> Poly<RatFunc> {
    Poly::var(&rf_zero())
}

fn lift_poly<F: CurveField>(p: &Poly<RatFunc>, sample: &F) -> Poly<F> {
    p.map(&sample.zero_like(), |c| sample.lift(c))
}

/// `p(a + t)` as a polynomial in `t`.
fn recentre<F: CurveField>(p: &Poly<RatFunc>, a: &F) -> Poly<F> {
    let shift = Poly::new(vec![a.clone(), a.one_like()], a.zero_like());
    lift_poly(p, a).compose(&shift)
}

fn const_poly(p: &Poly<RatFunc>) -> Option<Poly<Rat>> {
    let c: Option<Vec<Rat>> = p.coeffs().iter().map(|c| c.as_const()).collect();
    c.map(|c| Poly::from_rats(&c))
}

/// `S(z) = Σ k s_k z^k` over `Q(s)`; at most one symbolic parameter.
fn s_polynomial(cfg: &WeightConfig) -> Result<(Poly<RatFunc>, Option<String>)> {
    let mut parameter: Option<String> = None;
    let mut coeffs = vec![rf_zero()];
    for (i, p) in cfg.s.iter().enumerate() {
        let k = Rat::from_int(i as i64 + 1);
        let c = match p {
            Param::Value(v) => rf(&(v * &k)),
            Param::Symbol(name) => {
                if parameter.as_ref().is_some_and(|n| n != name) {
                    return Err(CoreError::UnsupportedFieldTower(
                        "more than one symbolic flow parameter".into(),
                    ));
                }
                parameter = Some(name.clone());
                RatFunc::param().scale(&k)
            }
        };
        coeffs.push(c);
    }
    Ok((Poly::new(coeffs, rf_zero()), parameter))
}

/// Curve data with the ramification locus left unclassified.
pub fn curve_data(cfg: &WeightConfig) -> Result<SpectralCurve> {
    cfg.require_curve_data()?;
    let (s, parameter) = s_polynomial(cfg)?;
    let g = cfg.g_poly()?;
    let gs = g.map(&rf_zero(), rf).compose(&s);
    let gp = g.derivative().map(&rf_zero(), rf).compose(&s);
    let sigma = gs.sub(&z_poly().mul(&s.derivative()).mul(&gp));
    let curve = SpectralCurve {
        cfg: cfg.clone(),
        parameter,
        s,
        g,
        gs,
        sigma,
        backend: FieldBackend::Rational,
        ramification: Vec::new(),
    };
    Ok(curve)
}

pub fn build_curve(cfg: &WeightConfig) -> Result<SpectralCurve> {
    let mut curve = curve_data(cfg)?;
    curve.classify_ramification()?;
    Ok(curve)
}

impl SpectralCurve {
    pub fn x_num(&self) -> Poly<RatFunc> {
        z_poly()
    }
    pub fn x_den(&self) -> Poly<RatFunc> {
        self.gs.clone()
    }
    pub fn y_num(&self) -> Poly<RatFunc> {
        self.s.mul(&self.gs)
    }
    pub fn y_den(&self) -> Poly<RatFunc> {
        z_poly()
    }

    /// `X̂Ŷ = S` as a polynomial identity.
    pub fn xy_identity_holds(&self) -> bool {
        self.x_num().mul(&self.y_num()) == self.s.mul(&self.x_den()).mul(&self.y_den())
    }

    /// `xy = S(γxG(xy))` at `(X, Y)`: with `xy = S`, this is `X̂ G(S) = z`.
    pub fn classical_curve_holds(&self) -> bool {
        self.x_num().mul(&self.g.map(&rf_zero(), rf).compose(&self.s)) == z_poly().mul(&self.x_den())
    }

    /// `X̂′ G(S)² = σ`: the two ramification characterisations agree.
    pub fn sigma_matches_dx(&self) -> bool {
        let den = self.x_den();
        let num = self.x_num().derivative().mul(&den).sub(&self.x_num().mul(&den.derivative()));
        num == self.sigma
    }

    fn y_prime_num(&self) -> Poly<RatFunc> {
        self.y_num().derivative().mul(&self.y_den()).sub(&self.y_num())
    }

    fn classify_ramification(&mut self) -> Result<()> {
        if self.sigma.degree().unwrap_or(0) == 0 {
            return Ok(());
        }
        let sigma = const_poly(&self.sigma).ok_or_else(|| {
            CoreError::UnsupportedFieldTower("σ has coefficients depending on the symbolic flow parameter".into())
        })?;
        let roots = poly_resultant_free_roots(&sigma)?;
        let mut quadratics: Vec<Poly<Rat>> = Vec::new();
        let mut wide = false;
        for (r, _) in &roots {
            if let Root::Algebraic(_) = r {
                let m = r.minimal_polynomial();
                if m.degree() == Some(2) && !quadratics.contains(&m) {
                    quadratics.push(m);
                } else if m.degree() != Some(2) {
                    wide = true;
                }
            }
        }
        if wide || quadratics.len() > 1 {
            self.backend = FieldBackend::BigComplex;
            let bits = bits_for_digits(64);
            for (factor, mult) in sigma.squarefree_decomposition() {
                for c in complex_roots(&factor, bits)? {
                    self.ramification.push(RamPoint {
                        value: RamValue::Complex(c),
                        multiplicity: mult,
                        simple: mult == 1,
                    });
                }
            }
            return Ok(());
        }
        if let Some(m) = quadratics.first() {
            self.backend = FieldBackend::Quadratic {
                minimal: m.display_in("θ"),
            };
        }
        for (r, mult) in roots {
            let values = match r {
                Root::Rational(a) => vec![RamValue::Rational(a)],
                Root::Algebraic(a) => {
                    let minimal = (**a.modulus()).clone();
                    vec![
                        RamValue::Quadratic {
                            minimal: minimal.clone(),
                            conjugate: false,
                        },
                        RamValue::Quadratic {
                            minimal,
                            conjugate: true,
                        },
                    ]
                }
            };
            for value in values {
                let simple = mult == 1 && self.y_prime_nonzero(&value)?;
                self.ramification.push(RamPoint {
                    value,
                    multiplicity: mult,
                    simple,
                });
            }
        }
        Ok(())
    }

    fn y_prime_nonzero(&self, v: &RamValue) -> Result<bool> {
        let yp = self.y_prime_num();
        Ok(match v {
            RamValue::Rational(a) => !lift_poly(&yp, &rf_zero()).eval(&rf(a)).is_zero(),
            RamValue::Quadratic { minimal, .. } => {
                let field = quadratic_field(minimal)?;
                let a = self.point_in(v, &field)?;
                !lift_poly(&yp, &field).eval(&a).is_zero()
            }
            RamValue::Complex(_) => true,
        })
    }

    /// `θ` of the quadratic backend as an element of `Q(s)[θ]`.
    pub fn quadratic_generator(&self) -> Result<Option<AlgExt<RatFunc>>> {
        for p in &self.ramification {
            if let RamValue::Quadratic { minimal, .. } = &p.value {
                return Ok(Some(quadratic_field(minimal)?));
            }
        }
        Ok(None)
    }

    /// A ramification value as an element of the field of `sample`.
    pub fn point_in<F: CurveField>(&self, v: &RamValue, sample: &F) -> Result<F> {
        match v {
            RamValue::Rational(a) => Ok(sample.from_rat_like(a)),
            RamValue::Quadratic { minimal, conjugate } => {
                let theta = sample.theta().ok_or_else(|| {
                    CoreError::UnsupportedFieldTower("quadratic ramification point requested outside Q(θ)".into())
                })?;
                if !*conjugate {
                    return Ok(theta);
                }
                let b = sample.from_rat_like(&minimal.coeff(1));
                Ok(b.neg_ref().sub_ref(&theta))
            }
            RamValue::Complex(_) => Err(CoreError::UnsupportedFieldTower(
                "exact arithmetic at a numeric ramification point".into(),
            )),
        }
    }

    /// Local expansion of `num/den` at `z = a + t`.
    pub fn local<F: CurveField>(&self, num: &Poly<RatFunc>, den: &Poly<RatFunc>, a: &F, prec: i32) -> Result<Laurent<F>> {
        let n = Laurent::from_poly(&recentre(num, a), prec);
        let d = Laurent::from_poly(&recentre(den, a), prec);
        Ok(n.div(&d)?)
    }

    pub fn x_local<F: CurveField>(&self, a: &F, prec: i32) -> Result<Laurent<F>> {
        self.local(&self.x_num(), &self.x_den(), a, prec)
    }

    pub fn y_local<F: CurveField>(&self, a: &F, prec: i32) -> Result<Laurent<F>> {
        self.local(&self.y_num(), &self.y_den(), a, prec)
    }

    /// `σ_a(a + t) − a = −t + Σ_{m≥2} c_m t^m + O(t^{order+1})`, the unique
    /// solution of `X(σ_a(z)) = X(z)` with `σ_a′(a) = −1`.
    pub fn involution_jet<F: CurveField>(&self, a: &F, order: usize) -> Result<Laurent<F>> {
        let prec = order as i32 + 2;
        let x = self.x_local(a, prec)?;
        let x1 = x.coeff(1)?;
        let x2 = x.coeff(2)?;
        if !x1.is_zero() {
            return Err(CoreError::Config(format!("{a} is not a ramification point")));
        }
        if x2.is_zero() {
            return Err(CoreError::HigherOrderRamification(a.to_string()));
        }
        let zero = a.zero_like();
        let mut c = vec![zero.clone(), a.one_like().neg_ref()];
        for m in 2..=order {
            c.push(zero.clone());
            let u = Laurent::new(0, c.clone(), order as i32 + 1, &zero);
            let d = x.compose(&u)?.sub(&x).coeff(m as i32 + 1)?;
            c[m] = d.div_ref(&x2.scale(&Rat::from_int(2)))?;
        }
        Ok(Laurent::new(0, c, order as i32 + 1, &zero))
    }

    /// Remaining ramification points that the exact engine cannot handle.
    pub fn require_simple(&self) -> Result<()> {
        for p in &self.ramification {
            if !p.simple {
                return Err(CoreError::HigherOrderRamification(p.value.to_string()));
            }
        }
        Ok(())
    }

    fn numeric_sigma_free(&self) -> Result<(Poly<Rat>, Poly<Rat>)> {
        let s = const_poly(&self.s).ok_or_else(|| {
            CoreError::Config("numeric sheets need numeric flow parameters".into())
        })?;
        Ok((s, self.g.clone()))
    }

    /// `X̂` at a rational point of a numeric curve.
    pub fn x_hat_at(&self, z: &Rat) -> Result<Rat> {
        let (s, g) = self.numeric_sigma_free()?;
        let den = g.eval(&s.eval(z));
        Ok(z / &den)
    }

    /// All `LM` solutions of `X(w) = X(z₀)`: `z₀` first, the rest ordered by
    /// (real part, imaginary part).
    pub fn sheets_at(&self, z0: &Rat, digits: usize) -> Result<Vec<BigComplex>> {
        let (s, g) = self.numeric_sigma_free()?;
        let g0 = g.eval(&s.eval(z0));
        // G(S(z₀))·w − z₀·G(S(w)), divided by (w − z₀)
        let gsw = g.compose(&s);
        let p = Poly::from_rats(&[Rat::zero(), g0]).sub(&gsw.scale(z0));
        let q = p.exact_div(&Poly::from_rats(&[-z0.clone(), Rat::one()]))?;
        let bits = bits_for_digits(digits);
        if q.degree().unwrap_or(0) == 0 {
            return Ok(vec![BigComplex::from_rat(z0, bits)]);
        }
        if !q.is_squarefree() || q.eval(z0).is_zero() {
            return Err(CoreError::NearBranchPoint);
        }
        let mut out = vec![BigComplex::from_rat(z0, bits)];
        out.extend(complex_roots(&q, bits)?);
        let guard = -(bits as f64) / 4.0;
        for i in 0..out.len() {
            for j in 0..i {
                if out[i].sub_ref(&out[j]).log2_abs() < guard {
                    return Err(CoreError::NearBranchPoint);
                }
            }
        }
        Ok(out)
    }
}

fn quadratic_field(minimal: &Poly<Rat>) -> Result<AlgExt<RatFunc>> {
    Ok(AlgExt::generator(Arc::new(minimal.map(&rf_zero(), rf)))?)
}

/// `V_{ij} = (z^{(j)})^{i}` for `i, j = 0..LM−1`.
pub fn vandermonde(sheets: &[BigComplex]) -> Matrix<BigComplex> {
    let n = sheets.len();
    Matrix::from_fn(n, n, |i, j| sheets[j].pow(i as i64).expect("nonnegative power"))
}

pub fn vandermonde_at(curve: &SpectralCurve, z0: &Rat, digits: usize) -> Result<Matrix<BigComplex>> {
    let v = vandermonde(&curve.sheets_at(z0, digits)?);
    if v.det_field()?.is_zero() {
        return Err(CoreError::NearBranchPoint);
    }
    Ok(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct WkbSample {
    pub z: String,
    pub x_hat: String,
    /// `log10 max |[β⁰]M(X(z)) − V F V⁻¹|` over the entries.
    pub max_deviation_log10: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WkbReport {
    pub x_cap: i32,
    pub digits: usize,
    pub tolerance_log10: i32,
    pub samples: Vec<WkbSample>,
    /// `Tr [β^k]M = δ_{k0}` for `k = 0, 1, 2`.
    pub trace_delta: Vec<bool>,
}

impl WkbReport {
    pub fn passed(&self) -> bool {
        self.trace_delta.iter().all(|b| *b)
            && self
                .samples
                .iter()
                .all(|s| s.max_deviation_log10 < self.tolerance_log10 as f64)
    }
}

/// Compare the β⁰ part of the projector `M(x)` with the leading WKB term
/// `V(z) F V(z)⁻¹`, `F = diag(1, 0, …)`, at rational sample points.
pub fn wkb_leading_order(
    cfg: &WeightConfig,
    x_cap: i32,
    samples: &[Rat],
    digits: usize,
    tolerance_log10: i32,
) -> Result<WkbReport> {
    if !cfg.s_symbols().is_empty() {
        return Err(CoreError::Config("the WKB comparison needs numeric flow parameters".into()));
    }
    let curve = build_curve(cfg)?;
    let ctx = BasisContext::standard(
        cfg,
        Window {
            x_cap,
            k_min: 0,
            beta_cap: None,
        },
    )?;
    let data = folded_data(&ctx)?;
    let rep = projector_m(&ctx, &data)?;
    let x = ctx.x.clone();
    let m_k = |k: i32| -> Result<Matrix<whr_algebra::TruncatedSeries>> {
        Ok(rep.m.try_map(|s| {
            s.filter_var(&x, i32::MIN / 4, rep.x_bound)?
                .slice(BETA, k)?
                .eval_var(GAMMA, &Rat::one())
        })?)
    };
    let mut trace_delta = Vec::new();
    for k in 0..=2 {
        let tr = m_k(k)?.trace()?;
        let want = if k == 0 { Rat::one() } else { Rat::zero() };
        trace_delta.push(tr.as_constant() == Some(want));
    }
    let m0 = m_k(0)?;
    let bits = bits_for_digits(digits);
    let ix = ctx.vars.index(&x)?;
    let n = m0.rows();
    let mut out = Vec::new();
    for z in samples {
        let xv = curve.x_hat_at(z)?;
        let mut values = Vec::new();
        for s in m0.entries() {
            let mut acc = Rat::zero();
            for (e, c) in s.terms() {
                if e.iter().enumerate().any(|(i, v)| i != ix && *v != 0) {
                    return Err(CoreError::Config("unexpected symbol in β⁰ part of M".into()));
                }
                acc = &acc + &(c * &xv.pow(e[ix])?);
            }
            values.push(acc);
        }
        let exact = Matrix::new(n, n, values);
        let v = vandermonde_at(&curve, z, digits)?;
        let vinv = v.inverse()?;
        let mut f = Matrix::zeros_like(n, n, &BigComplex::from_rat(&Rat::zero(), bits));
        f.set(0, 0, BigComplex::from_rat(&Rat::one(), bits));
        let wkb = v.mul(&f)?.mul(&vinv)?;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                let d = BigComplex::from_rat(exact.get(i, j), bits).sub_ref(wkb.get(i, j));
                let l = if d.is_zero() { -(digits as f64) } else { d.log2_abs() * std::f64::consts::LOG10_2 };
                worst = worst.max(l);
            }
        }
        out.push(WkbSample {
            z: z.to_string(),
            x_hat: xv.to_string(),
            max_deviation_log10: worst,
        });
    }
    Ok(WkbReport {
        x_cap,
        digits,
        tolerance_log10,
        samples: out,
        trace_delta,
    })
}
