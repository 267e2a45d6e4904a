//! Parameter pack shared by every layer: the weight generating function G,
//! the flow parameters s and truncation caps.

use serde::{Deserialize, Serialize};
use whr_algebra::{Poly, Rat, TruncatedSeries, Var, Vars};

use crate::error::{CoreError, Result};
use crate::partitions::elementary_from_roots;

/// How G is given. `g₀ = 1` is implicit in every variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSpec {
    /// `G(z) = Π (1 + c_i z)`.
    Roots(Vec<Rat>),
    /// `G(z) = 1 + Σ g_i z^i`.
    Coeffs(Vec<Rat>),
    /// `G(z) = Π (1 + c_i z)` with `c_1..c_M` kept as symbols.
    SymbolicRoots(usize),
}

/// A flow parameter `s_k`, numeric or a named symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Param {
    Value(Rat),
    Symbol(String),
}

impl Param {
    pub fn is_zero(&self) -> bool {
        matches!(self, Param::Value(v) if v.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Caps {
    pub gamma: i32,
    pub x: i32,
    pub beta_floor: i32,
    pub beta_cap: i32,
    pub d: u32,
    pub oracle_n: u32,
    pub jet_order: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            gamma: 6,
            x: 6,
            beta_floor: -6,
            beta_cap: 6,
            d: 4,
            oracle_n: 6,
            jet_order: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WeightConfig {
    pub weight: WeightSpec,
    pub s: Vec<Param>,
    pub caps: Caps,
}

impl WeightConfig {
    pub fn new(weight: WeightSpec, s: Vec<Param>) -> Self {
        WeightConfig {
            weight,
            s,
            caps: Caps::default(),
        }
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    /// Degree of G.
    pub fn m(&self) -> usize {
        match &self.weight {
            WeightSpec::Roots(c) => c.len(),
            WeightSpec::Coeffs(g) => g.len(),
            WeightSpec::SymbolicRoots(m) => *m,
        }
    }

    /// Degree of S: the index of the last nonzero `s_k`.
    pub fn l(&self) -> usize {
        self.s.iter().rposition(|p| !p.is_zero()).map_or(0, |i| i + 1)
    }

    /// `g_1..g_M`.
    pub fn g_coeffs(&self) -> Result<Vec<Rat>> {
        match &self.weight {
            WeightSpec::Roots(c) => Ok(elementary_from_roots(c, c.len())),
            WeightSpec::Coeffs(g) => Ok(g.clone()),
            WeightSpec::SymbolicRoots(_) => Err(CoreError::SymbolicWeight),
        }
    }

    pub fn roots(&self) -> Option<&[Rat]> {
        match &self.weight {
            WeightSpec::Roots(c) => Some(c),
            _ => None,
        }
    }

    /// `G` as a polynomial `1 + g_1 z + … + g_M z^M`.
    pub fn g_poly(&self) -> Result<Poly<Rat>> {
        let mut c = vec![Rat::one()];
        c.extend(self.g_coeffs()?);
        Ok(Poly::from_rats(&c))
    }

    /// Symbol names of the weight roots, `c1..cM`, when G is symbolic.
    pub fn c_symbols(&self) -> Vec<String> {
        match &self.weight {
            WeightSpec::SymbolicRoots(m) => (1..=*m).map(|i| format!("c{i}")).collect(),
            _ => Vec::new(),
        }
    }

    /// Layout carrying the weight symbols; empty for numeric G.
    pub fn c_layout(&self) -> Vars {
        Vars::new(self.c_symbols().iter().map(|n| Var::free(n)).collect())
    }

    /// Power sums `p_1(c)..p_kmax(c)` in `layout`, which must contain the c symbols
    /// when G is symbolic. For numeric G only the coefficients g are needed.
    pub fn c_power_sums(&self, kmax: usize, layout: &Vars) -> Result<Vec<TruncatedSeries>> {
        match &self.weight {
            WeightSpec::SymbolicRoots(_) => {
                let mut out = Vec::with_capacity(kmax);
                for k in 1..=kmax {
                    let mut acc = TruncatedSeries::zero(layout);
                    for name in self.c_symbols() {
                        acc = acc.add(&TruncatedSeries::var_pow(layout, &name, k as i32)?)?;
                    }
                    out.push(acc);
                }
                Ok(out)
            }
            _ => {
                let g = self.g_coeffs()?;
                let gi = |i: usize| g.get(i - 1).cloned().unwrap_or_default();
                // Newton: p_n = Σ_{i=1}^{n-1} (-1)^{i-1} g_i p_{n-i} + (-1)^{n-1} n g_n
                let mut p: Vec<Rat> = Vec::with_capacity(kmax);
                for n in 1..=kmax {
                    let mut acc = Rat::zero();
                    for i in 1..n {
                        let t = &gi(i) * &p[n - i - 1];
                        if i % 2 == 1 {
                            acc += &t;
                        } else {
                            acc -= &t;
                        }
                    }
                    let last = &gi(n) * &Rat::from_int(n as i64);
                    if n % 2 == 1 {
                        acc += &last;
                    } else {
                        acc -= &last;
                    }
                    p.push(acc);
                }
                Ok(p
                    .into_iter()
                    .map(|v| TruncatedSeries::constant(layout, v))
                    .collect())
            }
        }
    }

    /// `g_0..g_M` as series in `layout`; elementary symmetric in `c1..cM`
    /// when G is symbolic.
    pub fn g_coeff_series(&self, layout: &Vars) -> Result<Vec<TruncatedSeries>> {
        match &self.weight {
            WeightSpec::SymbolicRoots(_) => {
                // Π (1 + c_i z), tracked coefficientwise
                let mut e = vec![TruncatedSeries::one(layout)];
                for name in self.c_symbols() {
                    let c = TruncatedSeries::var(layout, &name)?;
                    let mut next = e.clone();
                    next.push(TruncatedSeries::zero(layout));
                    for (k, ek) in e.iter().enumerate() {
                        next[k + 1] = next[k + 1].add(&ek.mul(&c)?)?;
                    }
                    e = next;
                }
                Ok(e)
            }
            _ => Ok(self
                .g_poly()?
                .coeffs()
                .iter()
                .map(|g| TruncatedSeries::constant(layout, g.clone()))
                .collect()),
        }
    }

    /// Names of the symbolic flow parameters, in order.
    pub fn s_symbols(&self) -> Vec<String> {
        self.s
            .iter()
            .filter_map(|p| match p {
                Param::Symbol(n) => Some(n.clone()),
                Param::Value(_) => None,
            })
            .collect()
    }

    /// `s_k` (1-based) as a series in `layout`; zero beyond L.
    pub fn s_series(&self, k: usize, layout: &Vars) -> Result<TruncatedSeries> {
        match self.s.get(k.wrapping_sub(1)) {
            Some(Param::Value(v)) if k >= 1 => Ok(TruncatedSeries::constant(layout, v.clone())),
            Some(Param::Symbol(n)) if k >= 1 => Ok(TruncatedSeries::var(layout, n)?),
            _ => Ok(TruncatedSeries::zero(layout)),
        }
    }

    /// `S(z) = Σ k s_k z^k` for a series argument.
    pub fn s_of(&self, z: &TruncatedSeries) -> Result<TruncatedSeries> {
        let vars = z.vars().clone();
        let mut acc = TruncatedSeries::zero(&vars);
        for k in (1..=self.l()).rev() {
            let coeff = self.s_series(k, &vars)?.scale(&Rat::from_int(k as i64));
            acc = acc.add(&coeff)?.mul(z)?;
        }
        Ok(acc)
    }

    /// `G(z)` for a series argument (numeric G only).
    pub fn g_of(&self, z: &TruncatedSeries) -> Result<TruncatedSeries> {
        let g = self.g_coeffs()?;
        let vars = z.vars().clone();
        let mut acc = TruncatedSeries::zero(&vars);
        for gi in g.iter().rev() {
            acc = acc.add_constant(gi).mul(z)?;
        }
        Ok(acc.add_constant(&Rat::one()))
    }

    /// Check the invariants needed by the curve-side operations.
    pub fn require_curve_data(&self) -> Result<()> {
        if self.l() == 0 {
            return Err(CoreError::DegenerateS("all s_k vanish".into()));
        }
        if self.m() == 0 {
            return Err(CoreError::Config("G must have degree at least 1".into()));
        }
        let g = self.g_coeffs()?;
        if g.last().is_none_or(|x| x.is_zero()) {
            return Err(CoreError::Config("leading coefficient g_M vanishes".into()));
        }
        Ok(())
    }
}

/// Parse a rational written as `p/q`, an integer or a decimal such as `0.5`.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let t = text.trim();
    if let Some((int, frac)) = t.split_once('.') {
        if frac.chars().all(|c| c.is_ascii_digit()) && !frac.is_empty() {
            let neg = int.starts_with('-');
            let int_abs = int.trim_start_matches(['-', '+']);
            let whole: Rat = if int_abs.is_empty() {
                Rat::zero()
            } else {
                int_abs
                    .parse()
                    .map_err(|_| CoreError::Config(format!("bad number `{t}`")))?
            };
            let digits: Rat = frac
                .parse()
                .map_err(|_| CoreError::Config(format!("bad number `{t}`")))?;
            let scale = Rat::from_int(10).pow(frac.len() as i32).expect("nonzero");
            let v = whole + digits / scale;
            return Ok(if neg { -v } else { v });
        }
    }
    t.parse()
        .map_err(|_| CoreError::Config(format!("bad number `{t}`")))
}

/// Parse a comma-separated list of flow parameters, e.g. `s1,1/2`.
pub fn parse_params(text: &str) -> Result<Vec<Param>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            if item.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
                if item.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    Ok(Param::Symbol(item.to_string()))
                } else {
                    Err(CoreError::Config(format!("bad symbol `{item}`")))
                }
            } else {
                parse_rat(item).map(Param::Value)
            }
        })
        .collect()
}

/// Parse a polynomial in `z` such as `1+z`, `(1+z)(1+2z)` or `1+3z+2z^2`.
pub fn parse_g(text: &str) -> Result<Poly<Rat>> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = PolyParser { s: &chars, i: 0 };
    let poly = p.expr()?;
    if p.i != chars.len() {
        return Err(CoreError::Config(format!(
            "unexpected `{}` at position {} in `{text}`",
            chars[p.i], p.i
        )));
    }
    if poly.coeff(0) != Rat::one() {
        return Err(CoreError::Config(format!("G(0) must be 1 in `{text}`")));
    }
    Ok(poly)
}

struct PolyParser<'a> {
    s: &'a [char],
    i: usize,
}

impl PolyParser<'_> {
    fn peek(&self) -> Option<char> {
        self.s.get(self.i).copied()
    }

    fn err(&self, what: &str) -> CoreError {
        CoreError::Config(format!("{what} at position {}", self.i))
    }

    fn expr(&mut self) -> Result<Poly<Rat>> {
        let mut acc = Poly::zero(&Rat::zero());
        let mut sign = Rat::one();
        if let Some(c @ ('+' | '-')) = self.peek() {
            self.i += 1;
            if c == '-' {
                sign = -Rat::one();
            }
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&sign));
            match self.peek() {
                Some('+') => sign = Rat::one(),
                Some('-') => sign = -Rat::one(),
                _ => return Ok(acc),
            }
            self.i += 1;
        }
    }

    fn term(&mut self) -> Result<Poly<Rat>> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.i += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some('(' | 'z') | Some('0'..='9') => acc = acc.mul(&self.power()?),
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly<Rat>> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.i += 1;
            let start = self.i;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.i += 1;
            }
            let e: u32 = self.s[start..self.i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| self.err("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly<Rat>> {
        match self.peek() {
            Some('z') => {
                self.i += 1;
                Ok(Poly::var(&Rat::zero()))
            }
            Some('(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("missing `)`"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_digit() || c == '/' || c == '.')
                {
                    self.i += 1;
                }
                let text: String = self.s[start..self.i].iter().collect();
                Ok(Poly::constant(parse_rat(&text)?))
            }
            _ => Err(self.err("expected a number, `z` or `(`")),
        }
    }
}

impl WeightConfig {
    /// Build a numeric configuration from a G string and an s list.
    pub fn parse(g: &str, s: &str) -> Result<Self> {
        let poly = parse_g(g)?;
        let coeffs: Vec<Rat> = poly.coeffs().iter().skip(1).cloned().collect();
        Ok(WeightConfig::new(WeightSpec::Coeffs(coeffs), parse_params(s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_products_and_powers() {
        let p = parse_g("(1+z)(1+2z)").unwrap();
        assert_eq!(p, Poly::from_ints(&[1, 3, 2]));
        let q = parse_g("1 + 3z + 2z^2").unwrap();
        assert_eq!(p, q);
        assert_eq!(parse_g("(1+z)^2").unwrap(), Poly::from_ints(&[1, 2, 1]));
        assert!(parse_g("2+z").is_err());
        assert!(parse_g("1+").is_err());
    }

    #[test]
    fn parses_params() {
        let s = parse_params("s1, 1/2").unwrap();
        assert_eq!(s, vec![Param::Symbol("s1".into()), Param::Value(Rat::new(1, 2))]);
        assert_eq!(parse_params("1,0.5").unwrap()[1], Param::Value(Rat::new(1, 2)));
        assert_eq!(parse_rat("-1.25").unwrap(), Rat::new(-5, 4));
    }

    #[test]
    fn newton_power_sums_match_roots() {
        let cfg = WeightConfig::new(WeightSpec::Roots(vec![Rat::from_int(1), Rat::from_int(2)]), vec![]);
        let vars = Vars::new(vec![]);
        let p = cfg.c_power_sums(4, &vars).unwrap();
        let want = [3, 5, 9, 17];
        for (pk, w) in p.iter().zip(want) {
            assert_eq!(pk.as_constant().unwrap(), Rat::from_int(w));
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = WeightConfig::parse("1+z", "s1,1/2").unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: WeightConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.l(), 2);
    }
}
