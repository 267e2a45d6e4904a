//! One function per subcommand; each returns an [`Artifact`].

use clap::Args;
use serde_json::{json, Value};
use whr_algebra::{AlgExt, Field, Poly, Rat, RatFunc};
use whr_core::correlators::{
    connected_table, connected_w_from_k, f_table, genus_slice, w_eps_extraction, w_from_f, w_from_nabla,
    CorrelatorTable,
};
use whr_core::curve::{build_curve, wkb_leading_order, CurveField, FieldBackend, SpectralCurve};
use whr_core::hurwitz::{
    census_csv, constellation_census, pure_hurwitz_connected, pure_hurwitz_frobenius, pure_hurwitz_oracle,
    weighted_hurwitz, BranchData,
};
use whr_core::tau::{tau_connected, tau_p_basis};
use whr_core::toprec::{
    compare_maps, correlator_map, f03_matches, omega_01, omega_to_w, pole_report, w01_from_curve, w02_from_curve,
    TopRec,
};
use whr_core::{CoreError, Partition, WeightConfig};

use crate::error::{CliError, CliResult};
use crate::run_config::{BackendChoice, Format, RunConfig};

pub struct Artifact {
    pub command: String,
    pub result: Value,
    /// False when an identity failed.
    pub passed: bool,
    /// Plain rendering for `--format text`.
    pub text: Option<String>,
    pub default_format: Format,
}

impl Artifact {
    fn json(command: &str, result: Value, passed: bool) -> Self {
        Artifact {
            command: command.into(),
            result,
            passed,
            text: None,
            default_format: Format::Json,
        }
    }
}

fn partition(parts: Vec<u32>) -> CliResult<Partition> {
    Partition::new(parts).map_err(|e| CliError::Usage(e.to_string()))
}

fn partition_list(text: &str) -> CliResult<Partition> {
    let parts: CliResult<Vec<u32>> = text
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("bad part `{t}`"))))
        .collect();
    partition(parts?)
}

#[derive(Args, Debug, Clone)]
pub struct HurwitzArgs {
    /// Number of sheets.
    #[arg(long = "N", visible_alias = "n")]
    pub n: u32,
    /// Ramification profiles as JSON, e.g. "[[2,1],[2,1]]".
    #[arg(long)]
    pub profiles: Option<String>,
    /// Count transitive factorizations only.
    #[arg(long)]
    pub connected: bool,
    /// Constellation census with this many auxiliary profiles.
    #[arg(long)]
    pub census: Option<usize>,
    /// Weighted number H^d_G(μ, ν): μ as a comma list.
    #[arg(long, requires = "nu")]
    pub mu: Option<String>,
    #[arg(long, requires = "mu")]
    pub nu: Option<String>,
    /// Total colength d of the auxiliary profiles.
    #[arg(long, default_value_t = 0)]
    pub degree: u32,
}

pub fn cmd_hurwitz(cfg: &RunConfig, a: &HurwitzArgs) -> CliResult<Artifact> {
    let w = &cfg.weight;
    if let Some(k) = a.census {
        let rows = constellation_census(w, a.n, k)?;
        let csv = census_csv(&rows);
        return Ok(Artifact {
            command: "hurwitz".into(),
            result: json!({ "n": a.n, "k": k, "rows": rows.len(), "csv": csv }),
            passed: true,
            text: Some(csv),
            default_format: Format::Text,
        });
    }
    if let (Some(mu), Some(nu)) = (&a.mu, &a.nu) {
        let (mu, nu) = (partition_list(mu)?, partition_list(nu)?);
        let h = weighted_hurwitz(w, &mu, &nu, a.degree, a.connected)?;
        let value = match h.as_constant() {
            Some(c) => c.to_string(),
            None => h.to_string(),
        };
        return Ok(Artifact {
            command: "hurwitz".into(),
            result: json!({
                "mu": mu.to_string(), "nu": nu.to_string(), "d": a.degree,
                "connected": a.connected, "value": value,
            }),
            passed: true,
            text: Some(value),
            default_format: Format::Text,
        });
    }
    let text = a
        .profiles
        .as_deref()
        .ok_or_else(|| CliError::Usage("give --profiles, --census or --mu/--nu".into()))?;
    let raw: Vec<Vec<u32>> =
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("--profiles: {e}")))?;
    let profiles = raw.into_iter().map(partition).collect::<CliResult<Vec<_>>>()?;
    let b = BranchData::new(a.n, profiles.clone())?;
    let (value, oracle) = if a.connected {
        let v = pure_hurwitz_connected(&b)?;
        (v, pure_hurwitz_oracle(&b, true, w.caps.oracle_n).ok())
    } else {
        let v = pure_hurwitz_frobenius(&b)?;
        (v, pure_hurwitz_oracle(&b, false, w.caps.oracle_n).ok())
    };
    let agrees = oracle.as_ref().is_none_or(|o| *o == value);
    Ok(Artifact {
        command: "hurwitz".into(),
        result: json!({
            "n": a.n,
            "profiles": profiles.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "connected": a.connected,
            "euler-characteristic": b.euler_characteristic,
            "value": value.to_string(),
            "oracle": oracle.map(|o| o.to_string()),
        }),
        passed: agrees,
        text: Some(value.to_string()),
        default_format: Format::Text,
    })
}

#[derive(Args, Debug, Clone)]
pub struct TauArgs {
    /// Connected numbers via the logarithm.
    #[arg(long)]
    pub connected: bool,
}

pub fn cmd_tau(cfg: &RunConfig, a: &TauArgs) -> CliResult<Artifact> {
    let t = if a.connected {
        tau_connected(&cfg.weight)?
    } else {
        tau_p_basis(&cfg.weight)?
    };
    Ok(Artifact::json(
        "tau",
        json!({
            "connected": a.connected,
            "gamma-cap": t.gamma_cap,
            "key": "mu|nu|d",
            "entries": t.to_json(),
        }),
        true,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    /// Current insertions on the power-sum table.
    Nabla,
    /// Derivatives of the Hurwitz generating polynomial.
    F,
    /// Determinants of the pair kernel (connected, n ≤ 3).
    Kernel,
    /// ε-coefficients of shifted power sums (disconnected, n ≤ 2).
    Eps,
}

#[derive(Args, Debug, Clone)]
pub struct CorrelatorArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub connected: bool,
    /// Keep only this genus (connected only).
    #[arg(long, requires = "connected")]
    pub genus: Option<u32>,
    #[arg(long, value_enum, default_value_t = Route::Nabla)]
    pub route: Route,
}

pub fn cmd_correlators(cfg: &RunConfig, a: &CorrelatorArgs) -> CliResult<Artifact> {
    let w = &cfg.weight;
    let table = || -> CliResult<_> {
        Ok(if a.connected {
            connected_table(w)?
        } else {
            tau_p_basis(w)?
        })
    };
    let t: CorrelatorTable = match a.route {
        Route::Nabla => w_from_nabla(w, &table()?, a.n, a.connected)?,
        Route::F => w_from_f(&f_table(w, &table()?, a.n, a.connected)?)?,
        Route::Kernel => {
            if !a.connected {
                return Err(CliError::Usage("the kernel route gives connected correlators".into()));
            }
            connected_w_from_k(w, a.n, w.caps.gamma)?
        }
        Route::Eps => {
            if a.connected {
                return Err(CliError::Usage("the ε route gives disconnected correlators".into()));
            }
            w_eps_extraction(w, &table()?, a.n)?
        }
    };
    let t = match a.genus {
        Some(g) => genus_slice(&t, g)?,
        None => t,
    };
    let symmetric = t.is_symmetric()?;
    Ok(Artifact::json(
        "correlators",
        json!({ "route": format!("{:?}", a.route).to_lowercase(), "symmetric": symmetric, "table": t.to_json() }),
        symmetric,
    ))
}

/// `Σ c_i z^i` with coefficients in `Q(parameter)`.
pub fn show_poly(p: &Poly<RatFunc>, parameter: &str) -> String {
    let parts: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let c = c.display_in(parameter);
            match i {
                0 => format!("({c})"),
                1 => format!("({c})*z"),
                _ => format!("({c})*z^{i}"),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn parameter_name(curve: &SpectralCurve) -> String {
    curve.parameter.clone().unwrap_or_else(|| "s".into())
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// Also compare the leading WKB term of M at these z samples (numeric s only).
    #[arg(long)]
    pub wkb_samples: Option<String>,
    /// log10 tolerance for the WKB comparison.
    #[arg(long, default_value_t = -40, allow_hyphen_values = true)]
    pub wkb_tolerance: i32,
}

pub fn cmd_curve(cfg: &RunConfig, a: &CurveArgs) -> CliResult<Artifact> {
    let (curve, unsupported) = match build_curve(&cfg.weight) {
        Ok(c) => (c, None),
        Err(CoreError::UnsupportedFieldTower(why)) => (whr_core::curve::curve_data(&cfg.weight)?, Some(why)),
        Err(e) => return Err(e.into()),
    };
    let p = parameter_name(&curve);
    let (w01n, w01d) = omega_01(&curve);
    let identities = json!({
        "xy-equals-s": curve.xy_identity_holds(),
        "classical-curve": curve.classical_curve_holds(),
        "sigma-is-dx": curve.sigma_matches_dx(),
    });
    let mut passed = curve.xy_identity_holds() && curve.classical_curve_holds() && curve.sigma_matches_dx();
    let ramification = match unsupported {
        Some(why) => json!({ "unsupported": why }),
        None => curve
            .ramification
            .iter()
            .map(|r| json!({ "value": r.value.to_string(), "multiplicity": r.multiplicity, "simple": r.simple }))
            .collect(),
    };
    let mut result = json!({
        "parameter": curve.parameter,
        "S": show_poly(&curve.s, &p),
        "G": curve.g.display_in("z"),
        "G(S)": show_poly(&curve.gs, &p),
        "sigma": show_poly(&curve.sigma, &p),
        "X-hat": format!("z / ({})", show_poly(&curve.gs, &p)),
        "Y-hat": format!("({}) / z", show_poly(&curve.s.mul(&curve.gs), &p)),
        "normalization": "X = X-hat/gamma, Y = gamma*Y-hat",
        "omega01": { "num": show_poly(&w01n, &p), "den": show_poly(&w01d, &p) },
        "backend": curve.backend,
        "ramification": ramification,
        "identities": identities,
    });
    if let Some(samples) = &a.wkb_samples {
        let zs = samples
            .split(',')
            .map(|t| Ok(whr_core::config::parse_rat(t)?))
            .collect::<CliResult<Vec<Rat>>>()?;
        let rep = wkb_leading_order(&cfg.weight, cfg.weight.caps.x.max(12), &zs, cfg.digits, a.wkb_tolerance)?;
        passed &= rep.passed();
        result["wkb"] = serde_json::to_value(&rep)?;
    }
    Ok(Artifact::json("curve", result, passed))
}

#[derive(Args, Debug, Clone)]
pub struct TopRecArgs {
    /// Compute every stable ω_{g,n} with 2g − 2 + n ≤ chi.
    #[arg(long, default_value_t = 2)]
    pub chi: u32,
    /// Compare the γ-expansions with connected correlators up to --gamma.
    #[arg(long)]
    pub check: bool,
}

/// Forms, pole reports and optional correlator comparisons.
pub struct TrOutcome {
    pub forms: Vec<Value>,
    pub checks: Vec<Value>,
    pub passed: bool,
}

fn check_record(identity: &str, scope: String, passed: bool, detail: Value) -> Value {
    json!({ "identity": identity, "scope": scope, "passed": passed, "detail": detail })
}

pub fn run_toprec<F: CurveField>(
    weight: &WeightConfig,
    curve: &SpectralCurve,
    sample: &F,
    chi: u32,
    check: bool,
    to_base: impl Fn(&F) -> Option<RatFunc>,
    f03: impl Fn(&TopRec<F>) -> Option<whr_core::Result<bool>>,
) -> CliResult<TrOutcome> {
    let p = parameter_name(curve);
    let mut tr = TopRec::new(curve, sample, weight.caps.jet_order)?;
    let pairs = tr.compute_upto(chi)?;
    let mut forms = Vec::new();
    let mut checks = Vec::new();
    let mut passed = true;
    for &(g, n) in &pairs {
        let form = &tr.table[&(g, n)];
        let rep = pole_report(form, &tr.points)?;
        let stable = tr.stabilised(g, n)?;
        passed &= rep.passed() && stable;
        forms.push(json!({
            "form": form.to_json(&tr.points, &p),
            "poles": rep,
            "jet-stable": stable,
        }));
    }
    if let Some(r) = f03(&tr) {
        let ok = r?;
        passed &= ok;
        checks.push(check_record("F03 closed form", "(0,3)".into(), ok, Value::Null));
    }
    if check {
        let gamma = weight.caps.gamma;
        let mut wcfg = weight.clone();
        wcfg.caps.beta_cap = wcfg.caps.beta_cap.max(wcfg.m() as i32 * (gamma - 1));
        let table = connected_table(&wcfg)?;
        for n in 1..=2 {
            let w = genus_slice(&w_from_nabla(&wcfg, &table, n, true)?, 0)?;
            let ours = if n == 1 {
                w01_from_curve(&wcfg, gamma)?
            } else {
                w02_from_curve(&wcfg, gamma)?
            };
            let ok = ours == w.series.reembed(ours.vars()).map_err(CoreError::from)?;
            passed &= ok;
            checks.push(check_record("unstable pullback", format!("(0,{n}) gamma<={gamma}"), ok, Value::Null));
        }
        for &(g, n) in &pairs {
            let w = genus_slice(&w_from_nabla(&wcfg, &table, n, true)?, g)?;
            let truth = correlator_map(&w, curve.parameter.as_deref())?;
            let pulled = omega_to_w(curve, &tr.points, &tr.table[&(g, n)], gamma)?;
            let cmp = compare_maps(g, n, gamma, &pulled, &truth, &to_base);
            passed &= cmp.passed();
            checks.push(check_record(
                "recursion vs connected correlators",
                format!("({g},{n}) gamma<={gamma}"),
                cmp.passed(),
                serde_json::to_value(&cmp)?,
            ));
        }
    }
    Ok(TrOutcome { forms, checks, passed })
}

/// Dispatch on the field backend of the curve.
pub fn toprec_outcome(cfg: &RunConfig, chi: u32, check: bool) -> CliResult<(SpectralCurve, TrOutcome)> {
    let curve = build_curve(&cfg.weight)?;
    let backend = match (&cfg.backend, &curve.backend) {
        (BackendChoice::Auto, b) => b.clone(),
        (BackendChoice::Rational, FieldBackend::Rational) => FieldBackend::Rational,
        (BackendChoice::Quadratic, b @ FieldBackend::Quadratic { .. }) => b.clone(),
        (BackendChoice::Quadratic, FieldBackend::Rational) => {
            return Err(CliError::Usage("the ramification points are rational; use --backend rational".into()))
        }
        (_, b) => {
            return Err(CliError::Core(CoreError::UnsupportedFieldTower(format!(
                "the ramification locus needs {b:?}"
            ))))
        }
    };
    let outcome = match backend {
        FieldBackend::Rational => run_toprec(
            &cfg.weight,
            &curve,
            &RatFunc::constant(Rat::zero()),
            chi,
            check,
            |v| Some(v.clone()),
            |tr| tr.table.get(&(0, 3)).map(|w| f03_matches(&tr.curve, &tr.points, w)),
        )?,
        FieldBackend::Quadratic { .. } => {
            let theta: AlgExt<RatFunc> = curve
                .quadratic_generator()?
                .ok_or_else(|| CliError::Usage("no quadratic ramification point".into()))?;
            run_toprec(&cfg.weight, &curve, &theta.zero_like(), chi, check, |v| v.as_base(), |_| None)?
        }
        FieldBackend::BigComplex => {
            return Err(CliError::Core(CoreError::UnsupportedFieldTower(
                "the recursion runs over exact fields only".into(),
            )))
        }
    };
    Ok((curve, outcome))
}

pub fn cmd_toprec(cfg: &RunConfig, a: &TopRecArgs) -> CliResult<Artifact> {
    let (curve, out) = toprec_outcome(cfg, a.chi, a.check)?;
    Ok(Artifact::json(
        "toprec",
        json!({
            "backend": curve.backend,
            "chi": a.chi,
            "forms": out.forms,
            "checks": out.checks,
        }),
        out.passed,
    ))
}
