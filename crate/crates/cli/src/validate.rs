//! Invariant suites behind `whr validate`.

use clap::{Subcommand, ValueEnum};
use serde_json::{json, Value};
use whr_algebra::{Rat, TruncatedSeries};
use whr_core::basis::{BasisContext, Sign, Window, BETA};
use whr_core::certified::CertSeries;
use whr_core::curve::wkb_leading_order;
use whr_core::hurwitz::weighted_hurwitz;
use whr_core::kernel::{cd_identity_check, duality_residual, folded_data, folded_system_check, projector_m};
use whr_core::partitions::partitions_of;
use whr_core::tau::{tau_connected, tau_p_basis};
use whr_core::{Param, WeightConfig};

use crate::commands::{toprec_outcome, Artifact};
use crate::error::CliResult;
use crate::run_config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// N ≤ 4, γ ≤ 4, small x windows.
    Quick,
    /// N ≤ 6, γ ≤ 6, recursion up to 2g − 2 + n = 2.
    Full,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Suite {
    /// Both quantum curve equations on Ψ⁺ and Ψ⁻.
    QuantumCurve,
    /// Christoffel–Darboux identity for the kernel.
    Cd,
    /// Folded first-order systems, symmetry of A, duality.
    Folded,
    /// Projector M: idempotent, unit trace, adjoint equation, WKB.
    Projector,
    /// (Ψ⁺_k, Ψ⁻_m) = γ δ_{k+m,1}.
    Pairing,
    /// Tau against Hurwitz counts, and recursion against correlators.
    Crossval,
    /// Every suite above.
    All,
}

struct Budget {
    x: i32,
    gamma: i32,
    n: u32,
    pairing: (i32, i32, i32),
    chi: u32,
}

fn budget(p: Profile) -> Budget {
    match p {
        Profile::Quick => Budget {
            x: 8,
            gamma: 4,
            n: 4,
            pairing: (-2, 3, 26),
            chi: 1,
        },
        Profile::Full => Budget {
            x: 12,
            gamma: 6,
            n: 6,
            pairing: (-3, 4, 26),
            chi: 2,
        },
    }
}

#[derive(Default)]
struct Checks(Vec<Value>);

impl Checks {
    fn push(&mut self, identity: &str, scope: impl Into<String>, passed: bool, detail: Value) {
        self.0.push(json!({ "identity": identity, "scope": scope.into(), "passed": passed, "detail": detail }));
    }

    fn skip(&mut self, identity: &str, reason: &str) {
        self.0.push(json!({ "identity": identity, "skipped": reason }));
    }

    fn cert(&mut self, identity: &str, scope: impl Into<String>, r: &CertSeries) {
        let first = r.first_trusted_term();
        self.push(identity, scope, r.is_trusted_zero(), json!({ "first-nonzero": first }));
    }

    fn passed(&self) -> bool {
        self.0.iter().all(|c| c.get("passed").is_none_or(|p| p.as_bool() == Some(true)))
    }
}

fn ctx(w: &WeightConfig, x_cap: i32, k_min: i32, beta_cap: Option<i32>) -> CliResult<BasisContext> {
    Ok(BasisContext::standard(
        w,
        Window {
            x_cap,
            k_min,
            beta_cap,
        },
    )?)
}

fn quantum_curve(w: &WeightConfig, b: &Budget, out: &mut Checks) -> CliResult<()> {
    let c = ctx(w, b.x, 0, None)?;
    for sign in [Sign::Plus, Sign::Minus] {
        let r = c.quantum_curve_residual(sign)?;
        out.cert("quantum curve", format!("{sign} x<={}", b.x), &r);
    }
    Ok(())
}

fn cd(w: &WeightConfig, b: &Budget, out: &mut Checks) -> CliResult<()> {
    let (x, g) = (b.x.min(6), b.gamma.min(4));
    let r = cd_identity_check(w, x, g)?;
    out.cert("Christoffel-Darboux", format!("x,x'<={x} gamma<={g}"), &r);
    Ok(())
}

fn folded(w: &WeightConfig, b: &Budget, out: &mut Checks) -> CliResult<()> {
    let x = b.x.min(7);
    let c = ctx(w, x, 0, None)?;
    let data = folded_data(&c)?;
    for (sign, k, r) in folded_system_check(&c, &data)? {
        out.cert("folded system", format!("{sign} row {k} x<={x}"), &r);
    }
    out.push("A symmetric", "", data.a == data.a.transpose(), Value::Null);
    out.push("duality", "", duality_residual(&data)?.is_zero(), Value::Null);
    Ok(())
}

fn projector(w: &WeightConfig, b: &Budget, digits: usize, out: &mut Checks) -> CliResult<()> {
    let x = b.x.min(7);
    let c = ctx(w, x, 0, None)?;
    let data = folded_data(&c)?;
    let rep = projector_m(&c, &data)?;
    let scope = format!("x<={}", rep.x_bound);
    out.push("M^2 = M", scope.clone(), rep.idempotent, Value::Null);
    out.push("Tr M = 1", scope.clone(), rep.trace_one, Value::Null);
    out.push("no negative beta in M", scope.clone(), rep.min_beta.is_none_or(|m| m >= 0), json!(rep.min_beta));
    out.push("adjoint equation", scope, rep.adjoint_residual_zero, Value::Null);
    if w.s.iter().all(|p| matches!(p, Param::Value(_))) {
        let samples = [Rat::new(1, 5000), Rat::new(-1, 6000), Rat::new(1, 7000)];
        let rep = wkb_leading_order(w, 12, &samples, digits, -40)?;
        out.push("WKB leading order", format!("{digits} digits"), rep.passed(), serde_json::to_value(&rep)?);
    } else {
        out.skip("WKB leading order", "needs numeric flow parameters");
    }
    Ok(())
}

fn pairing(w: &WeightConfig, b: &Budget, out: &mut Checks) -> CliResult<()> {
    let (lo, hi, beta) = b.pairing;
    let c = ctx(w, 9, lo, Some(beta))?;
    let gamma = TruncatedSeries::var(&c.vars, "gamma").map_err(whr_core::CoreError::from)?;
    let plus = (lo..=hi).map(|k| c.psi(Sign::Plus, k)).collect::<Result<Vec<_>, _>>()?;
    let minus = (lo..=hi).map(|k| c.psi(Sign::Minus, k)).collect::<Result<Vec<_>, _>>()?;
    let mut bad = Vec::new();
    for (i, a) in plus.iter().enumerate() {
        for (j, m) in minus.iter().enumerate() {
            let (k, l) = (lo + i as i32, lo + j as i32);
            let want = if k + l == 1 { gamma.clone() } else { TruncatedSeries::zero(&c.vars) };
            let d = c.pairing(a, m)?.sub(&CertSeries::exact(want))?;
            if !d.is_trusted_zero() || d.bound(BETA).is_some_and(|x| x < 0) {
                bad.push(format!("({k},{l})"));
            }
        }
    }
    out.push("duality pairing", format!("k,m in [{lo},{hi}]"), bad.is_empty(), json!(bad));
    Ok(())
}

fn crossval(cfg: &RunConfig, b: &Budget, out: &mut Checks) -> CliResult<()> {
    let mut w = cfg.weight.clone();
    w.caps.gamma = b.gamma;
    w.caps.beta_cap = w.caps.beta_cap.max(w.m() as i32 * (b.gamma - 1));
    match tau_p_basis(&w) {
        Ok(table) => {
            let mut bad = Vec::new();
            let mut compared = 0;
            for n in 1..=b.n.min(b.gamma as u32) {
                for mu in partitions_of(n) {
                    for nu in partitions_of(n) {
                        for d in 0..=w.caps.d {
                            let h = weighted_hurwitz(&w, &mu, &nu, d, false)?;
                            let lhs = table.get(&mu, &nu, d);
                            compared += 1;
                            if h.as_constant().as_ref() != Some(&lhs) {
                                bad.push(json!({ "monomial": format!("{mu}|{nu}|{d}"), "lhs": lhs.to_string(), "rhs": h.to_string() }));
                            }
                        }
                    }
                }
            }
            out.push("tau = weighted Hurwitz", format!("N<={} d<={}", b.n.min(b.gamma as u32), w.caps.d), bad.is_empty(), json!({ "compared": compared, "mismatches": bad }));
            let conn = tau_connected(&w)?;
            let mut bad = Vec::new();
            let top = b.n.min(5).min(b.gamma as u32);
            for n in 1..=top {
                for mu in partitions_of(n) {
                    for nu in partitions_of(n) {
                        for d in 0..=w.caps.d {
                            let h = weighted_hurwitz(&w, &mu, &nu, d, true)?;
                            let lhs = conn.get(&mu, &nu, d);
                            if h.as_constant().as_ref() != Some(&lhs) {
                                bad.push(json!({ "monomial": format!("{mu}|{nu}|{d}"), "lhs": lhs.to_string(), "rhs": h.to_string() }));
                            }
                        }
                    }
                }
            }
            out.push("log tau = transitive count", format!("N<={top}"), bad.is_empty(), json!(bad));
        }
        Err(e) => out.skip("tau = weighted Hurwitz", &e.to_string()),
    }
    cd(&cfg.weight, b, out)?;
    let mut tr_cfg = cfg.clone();
    tr_cfg.weight.caps.gamma = b.gamma;
    match toprec_outcome(&tr_cfg, b.chi, true) {
        Ok((_, o)) => {
            for c in o.checks {
                out.0.push(c);
            }
            for f in &o.forms {
                let ok = f["poles"]["symmetric"] == json!(true) && f["jet-stable"] == json!(true);
                out.push("recursion form sane", format!("({},{})", f["form"]["g"], f["form"]["n"]), ok, f["poles"].clone());
            }
        }
        Err(e) => out.skip("topological recursion", &e.to_string()),
    }
    Ok(())
}

pub fn cmd_validate(cfg: &RunConfig, suite: &Suite, profile: Profile) -> CliResult<Artifact> {
    let b = budget(profile);
    let w = &cfg.weight;
    let mut out = Checks::default();
    let all = matches!(suite, Suite::All);
    if all || matches!(suite, Suite::QuantumCurve) {
        quantum_curve(w, &b, &mut out)?;
    }
    if all || matches!(suite, Suite::Cd) {
        cd(w, &b, &mut out)?;
    }
    if all || matches!(suite, Suite::Folded) {
        folded(w, &b, &mut out)?;
    }
    if all || matches!(suite, Suite::Projector) {
        projector(w, &b, cfg.digits, &mut out)?;
    }
    if all || matches!(suite, Suite::Pairing) {
        pairing(w, &b, &mut out)?;
    }
    if all || matches!(suite, Suite::Crossval) {
        crossval(cfg, &b, &mut out)?;
    }
    let passed = out.passed();
    let text = out
        .0
        .iter()
        .map(|c| {
            let tag = match c.get("passed").and_then(Value::as_bool) {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "SKIP",
            };
            format!(
                "{tag}  {} {}",
                c["identity"].as_str().unwrap_or(""),
                c.get("scope").and_then(Value::as_str).unwrap_or("")
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Artifact {
        command: "validate".into(),
        result: json!({ "profile": format!("{profile:?}").to_lowercase(), "checks": out.0, "passed": passed }),
        passed,
        text: Some(text),
        default_format: crate::run_config::Format::Json,
    })
}
