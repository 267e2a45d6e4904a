//! Acceptance run: one line per criterion, exit status 1 if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use whr_algebra::{Rat, RatFunc, TruncatedSeries};
use whr_core::basis::{BasisContext, BasisVector, Sign, Window, BETA};
use whr_core::certified::CertSeries;
use whr_core::config::{Caps, Param, WeightConfig, WeightSpec};
use whr_core::correlators::{
    connected_table, connected_w_from_k, f_table, genus_slice, w_eps_extraction, w_from_f, w_from_nabla,
};
use whr_core::curve::{build_curve, wkb_leading_order};
use whr_core::hurwitz::{
    all_perms, compose, cycle_type, inverse, is_transitive, pure_hurwitz_connected, pure_hurwitz_frobenius,
    pure_hurwitz_oracle, weighted_hurwitz, BranchData,
};
use whr_core::kernel::{
    cd_identity_check, cd_matrix_a, det_a_closed_form, duality_residual, folded_data, folded_system_check,
    projector_m, scalar_layout,
};
use whr_core::partitions::{factorial, partitions_of, Partition};
use whr_core::tau::{tau_connected, tau_p_basis};
use whr_core::toprec::{
    compare_maps, correlator_map, f03_matches, omega_to_w, pole_report, w01_from_curve, w02_from_curve, TopRec,
};

type Outcome = std::result::Result<String, String>;

fn ints(g: &[i64]) -> WeightSpec {
    WeightSpec::Coeffs(g.iter().map(|&x| Rat::from_int(x)).collect())
}

fn symbolic_s(l: usize) -> Vec<Param> {
    (1..=l).map(|i| Param::Symbol(format!("s{i}"))).collect()
}

fn caps(gamma: i32, beta_cap: i32) -> Caps {
    Caps {
        gamma,
        beta_cap,
        ..Caps::default()
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Brute-force transitive count over all of `S_N`, independent of the library oracle.
fn transitive_by_brute_force(n: u32, profiles: &[Partition]) -> Rat {
    let perms = all_perms(n);
    let k = profiles.len();
    let mut count: u128 = 0;
    let mut idx = vec![0usize; k.saturating_sub(1)];
    loop {
        let mut prod: Vec<u8> = (0..n as u8).collect();
        let mut tuple: Vec<&[u8]> = Vec::with_capacity(k);
        let mut ok = true;
        for (j, &i) in idx.iter().enumerate() {
            if cycle_type(&perms[i]) != profiles[j] {
                ok = false;
                break;
            }
            prod = compose(&prod, &perms[i]);
            tuple.push(&perms[i]);
        }
        if ok {
            let last = inverse(&prod);
            if cycle_type(&last) == profiles[k - 1] {
                tuple.push(&last);
                if is_transitive(n as usize, &tuple) {
                    count += 1;
                }
            }
        }
        let mut j = 0;
        while j < idx.len() {
            idx[j] += 1;
            if idx[j] < perms.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == idx.len() {
            break;
        }
    }
    Rat::from_bigint(count.into()) / Rat::from_bigint(factorial(n).into())
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for n in 1..=5u32 {
        let ps = partitions_of(n);
        let mut tuples: Vec<Vec<Partition>> = ps.iter().map(|p| vec![p.clone()]).collect();
        for a in &ps {
            for b in &ps {
                tuples.push(vec![a.clone(), b.clone()]);
                for c in &ps {
                    tuples.push(vec![a.clone(), b.clone(), c.clone()]);
                }
            }
        }
        for t in tuples {
            let br = BranchData::new(n, t.clone()).map_err(err)?;
            let f = pure_hurwitz_frobenius(&br).map_err(err)?;
            let o = pure_hurwitz_oracle(&br, false, 6).map_err(err)?;
            check(f == o, || format!("N={n} {t:?}: Frobenius {f}, oracle {o}"))?;
            let fc = pure_hurwitz_connected(&br).map_err(err)?;
            let oc = pure_hurwitz_oracle(&br, true, 6).map_err(err)?;
            check(fc == oc, || format!("N={n} {t:?}: connected {fc}, oracle {oc}"))?;
            if n <= 4 {
                let bf = transitive_by_brute_force(n, &t);
                check(bf == oc, || format!("N={n} {t:?}: brute force {bf}, oracle {oc}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} profile tuples"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for g in [vec![1], vec![3, 2]] {
        let cfg = WeightConfig::new(ints(&g), vec![]).with_caps(caps(6, 6));
        let table = tau_p_basis(&cfg).map_err(err)?;
        for n in 1..=6 {
            for mu in partitions_of(n) {
                for nu in partitions_of(n) {
                    for d in 0..=4 {
                        let w = weighted_hurwitz(&cfg, &mu, &nu, d, false).map_err(err)?;
                        let w = w.as_constant().ok_or("non-constant weight")?;
                        let t = table.get(&mu, &nu, d);
                        check(t == w, || format!("G={g:?} {mu} {nu} d={d}: tau {t}, Hurwitz {w}"))?;
                        checked += 1;
                    }
                }
            }
        }
        let cfg5 = WeightConfig::new(ints(&g), vec![]).with_caps(caps(5, 8));
        let conn = tau_connected(&cfg5).map_err(err)?;
        for n in 1..=5 {
            for mu in partitions_of(n) {
                for nu in partitions_of(n) {
                    for d in 0..=4 {
                        let w = weighted_hurwitz(&cfg5, &mu, &nu, d, true).map_err(err)?;
                        let w = w.as_constant().ok_or("non-constant weight")?;
                        let t = conn.get(&mu, &nu, d);
                        check(t == w, || format!("G={g:?} connected {mu} {nu} d={d}: log {t}, oracle {w}"))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} coefficients"))
}

fn context(cfg: &WeightConfig, x_cap: i32, k_min: i32, beta_cap: Option<i32>) -> Result<BasisContext, String> {
    BasisContext::standard(
        cfg,
        Window {
            x_cap,
            k_min,
            beta_cap,
        },
    )
    .map_err(err)
}

fn criterion_3() -> Outcome {
    for (g, l) in [(vec![1], 1), (vec![1], 2), (vec![3, 2], 1)] {
        let cfg = WeightConfig::new(ints(&g), symbolic_s(l));
        let ctx = context(&cfg, 12, 0, None)?;
        for sign in [Sign::Plus, Sign::Minus] {
            let r = ctx.quantum_curve_residual(sign).map_err(err)?;
            check(r.is_trusted_zero(), || {
                format!("G={g:?} L={l} {sign}: {:?}", r.first_trusted_term())
            })?;
            check(r.bound("x").is_none_or(|b| b >= 12), || {
                format!("G={g:?} L={l} {sign}: certified only to x^{:?}", r.bound("x"))
            })?;
            check(!ctx.psi(sign, 0).map_err(err)?.value.series.is_zero(), || "Ψ₀ vanished".into())?;
        }
    }
    Ok("(L,M) = (1,1), (2,1), (1,2), both signs, certified to x^12".into())
}

fn criterion_4() -> Outcome {
    let cfg = WeightConfig::new(ints(&[1]), symbolic_s(1));
    let ctx = context(&cfg, 9, -3, Some(26))?;
    let gamma = TruncatedSeries::var(&ctx.vars, "gamma").map_err(err)?;
    let psi = |sign| -> Result<Vec<(i32, BasisVector)>, String> {
        (-3..=4).map(|k| Ok((k, ctx.psi(sign, k).map_err(err)?))).collect()
    };
    let (plus, minus) = (psi(Sign::Plus)?, psi(Sign::Minus)?);
    for (k, a) in &plus {
        for (m, b) in &minus {
            let p = ctx.pairing(a, b).map_err(err)?;
            let want = if k + m == 1 { gamma.clone() } else { TruncatedSeries::zero(&ctx.vars) };
            let diff = p.sub(&CertSeries::exact(want)).map_err(err)?;
            check(diff.bound(BETA).is_none_or(|x| x >= 0), || format!("({k},{m}) certified only to β^{:?}", diff.bound(BETA)))?;
            check(diff.is_trusted_zero(), || format!("({k},{m}): {:?}", diff.first_trusted_term()))?;
        }
    }
    Ok("64 pairings".into())
}

fn criterion_5() -> Outcome {
    for (g, l) in [(vec![1], 1), (vec![3, 2], 1), (vec![1], 2), (vec![3, 2], 2)] {
        let cfg = WeightConfig::new(ints(&g), symbolic_s(l));
        let vars = scalar_layout(&cfg);
        let a = cd_matrix_a(&cfg, &vars).map_err(err)?;
        let det = a.det().map_err(err)?;
        let want = det_a_closed_form(&cfg, &vars).map_err(err)?;
        check(det == want, || format!("G={g:?} L={l}: det {det}, closed form {want}"))?;
    }
    Ok("(L,M) ∈ {1,2}²".into())
}

fn criterion_6() -> Outcome {
    for (g, l) in [(vec![1], 1), (vec![3, 2], 2)] {
        let cfg = WeightConfig::new(ints(&g), symbolic_s(l));
        let r = cd_identity_check(&cfg, 6, 4).map_err(err)?;
        check(r.is_trusted_zero(), || format!("G={g:?} L={l}: {:?}", r.first_trusted_term()))?;
    }
    Ok("two configurations, x, x′ ≤ 6, γ ≤ 4".into())
}

fn criterion_7() -> Outcome {
    for (g, l) in [(vec![1], 1), (vec![1], 2), (vec![3, 2], 1), (vec![3, 2], 2)] {
        let cfg = WeightConfig::new(ints(&g), symbolic_s(l));
        let ctx = context(&cfg, 6, 0, None)?;
        let data = folded_data(&ctx).map_err(err)?;
        for (sign, k, r) in folded_system_check(&ctx, &data).map_err(err)? {
            check(r.is_trusted_zero(), || {
                format!("G={g:?} L={l} {sign} row {k}: {:?}", r.first_trusted_term())
            })?;
        }
        check(data.a == data.a.transpose(), || format!("G={g:?} L={l}: A not symmetric"))?;
        check(duality_residual(&data).map_err(err)?.is_zero(), || format!("G={g:?} L={l}: duality"))?;
        let rep = projector_m(&ctx, &data).map_err(err)?;
        check(rep.idempotent, || format!("G={g:?} L={l}: M² ≠ M"))?;
        check(rep.trace_one, || format!("G={g:?} L={l}: Tr M ≠ 1"))?;
        check(rep.min_beta.is_none_or(|b| b >= 0), || format!("G={g:?} L={l}: β^{:?} in M", rep.min_beta))?;
        check(rep.adjoint_residual_zero, || format!("G={g:?} L={l}: adjoint equation"))?;
    }
    Ok("four configurations, x ≤ 6".into())
}

fn criterion_8() -> Outcome {
    let cfg = WeightConfig::new(ints(&[1]), vec![Param::Value(Rat::one()), Param::Value(Rat::new(1, 2))]);
    let samples = [Rat::new(1, 5000), Rat::new(-1, 6000), Rat::new(1, 7000)];
    let rep = wkb_leading_order(&cfg, 12, &samples, 128, -40).map_err(err)?;
    let worst = rep
        .samples
        .iter()
        .map(|s| s.max_deviation_log10)
        .fold(f64::NEG_INFINITY, f64::max);
    check(rep.passed(), || format!("traces {:?}, worst log10 deviation {worst:.1}", rep.trace_delta))?;
    Ok(format!("worst log10 deviation {worst:.1}"))
}

fn criterion_9() -> Outcome {
    let mut routes = 0;
    for (g, s) in [(vec![1], symbolic_s(2)), (vec![3, 2], symbolic_s(1))] {
        let m = g.len() as i32;
        let cfg = WeightConfig::new(ints(&g), s).with_caps(caps(6, m * 5));
        let table = connected_table(&cfg).map_err(err)?;
        for n in 1..=3 {
            let a = w_from_nabla(&cfg, &table, n, true).map_err(err)?;
            let f = w_from_f(&f_table(&cfg, &table, n, true).map_err(err)?).map_err(err)?;
            let k = connected_w_from_k(&cfg, n, 6).map_err(err)?;
            check(a.series == f.series, || format!("G={g:?} n={n}: ∇ and F routes differ"))?;
            let kk = k.series.reembed(a.series.vars()).map_err(err)?;
            check(a.series == kk, || format!("G={g:?} n={n}: determinant route differs"))?;
            routes += 3;
        }
        // ε-extraction covers the disconnected correlators
        let full = tau_p_basis(&cfg).map_err(err)?;
        for n in 1..=2 {
            let a = w_from_nabla(&cfg, &full, n, false).map_err(err)?;
            let e = w_eps_extraction(&cfg, &full, n).map_err(err)?;
            check(a.series == e.series, || format!("G={g:?} n={n}: ε route differs"))?;
            routes += 1;
        }
    }
    Ok(format!("{routes} route comparisons, γ ≤ 6"))
}

fn acceptance_curve_cfg(gamma: i32) -> WeightConfig {
    WeightConfig::new(ints(&[1]), vec![Param::Symbol("s1".into()), Param::Value(Rat::new(1, 2))])
        .with_caps(caps(gamma, gamma))
}

const STABLE: [(u32, usize); 4] = [(0, 3), (1, 1), (0, 4), (1, 2)];

fn engine() -> Result<TopRec<RatFunc>, String> {
    let curve = build_curve(&acceptance_curve_cfg(6)).map_err(err)?;
    let mut tr = TopRec::new(&curve, &RatFunc::constant(Rat::zero()), None).map_err(err)?;
    for (g, n) in STABLE {
        tr.compute(g, n).map_err(err)?;
    }
    Ok(tr)
}

fn criterion_10(tr: &TopRec<RatFunc>) -> Outcome {
    let gamma = 6;
    let cfg = acceptance_curve_cfg(gamma);
    let table = connected_table(&cfg).map_err(err)?;
    let mut compared = 0;
    for n in 1..=2 {
        let w = genus_slice(&w_from_nabla(&cfg, &table, n, true).map_err(err)?, 0).map_err(err)?;
        let curve_side = if n == 1 {
            w01_from_curve(&cfg, gamma)
        } else {
            w02_from_curve(&cfg, gamma)
        }
        .map_err(err)?;
        let truth = w.series.reembed(curve_side.vars()).map_err(err)?;
        check(curve_side == truth, || format!("(0,{n}) differs"))?;
    }
    for (g, n) in STABLE {
        let w = genus_slice(&w_from_nabla(&cfg, &table, n, true).map_err(err)?, g).map_err(err)?;
        let truth = correlator_map(&w, Some("s1")).map_err(err)?;
        let form = &tr.table[&(g, n)];
        let pulled = omega_to_w(&tr.curve, &tr.points, form, gamma).map_err(err)?;
        let cmp = compare_maps(g, n, gamma, &pulled, &truth, |v| Some(v.clone()));
        check(cmp.passed(), || format!("({g},{n}): {}", cmp.mismatches.join("; ")))?;
        check(tr.stabilised(g, n).map_err(err)?, || format!("({g},{n}) changes with a longer jet"))?;
        compared += cmp.compared;
    }
    Ok(format!("{compared} stable coefficients, γ ≤ {gamma}"))
}

fn criterion_11(tr: &TopRec<RatFunc>) -> Outcome {
    let ok = f03_matches(&tr.curve, &tr.points, &tr.table[&(0, 3)]).map_err(err)?;
    check(ok, || "∂³F̃_{0,3} differs from ω_{0,3}".into())?;
    Ok("polynomial identity after clearing denominators".into())
}

fn criterion_12(tr: &TopRec<RatFunc>) -> Outcome {
    let mut orders = Vec::new();
    for (g, n) in STABLE {
        let rep = pole_report(&tr.table[&(g, n)], &tr.points).map_err(err)?;
        check(rep.passed(), || format!("({g},{n}): {rep:?}"))?;
        orders.push(format!("({g},{n}):{:?}", rep.pole_orders));
    }
    Ok(format!("pole orders {}", orders.join(" ")))
}

fn run(id: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let secs = start.elapsed().as_secs_f64();
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("criterion {id:>2}: {tag}  {title} ({detail}) [{secs:.1}s]");
    ok
}

fn main() {
    let mut all = true;
    all &= run(1, "Frobenius formula equals the factorization oracle", criterion_1);
    all &= run(2, "tau coefficients equal weighted Hurwitz numbers", criterion_2);
    all &= run(3, "quantum spectral curve annihilates Ψ", criterion_3);
    all &= run(4, "duality pairing (Ψ⁺_k, Ψ⁻_m) = γδ_{k+m,1}", criterion_4);
    all &= run(5, "det A closed form", criterion_5);
    all &= run(6, "Christoffel–Darboux identity", criterion_6);
    all &= run(7, "folded system and projector M", criterion_7);
    all &= run(8, "WKB leading order of M", criterion_8);
    all &= run(9, "connected correlator routes agree", criterion_9);
    let start = Instant::now();
    let tr = catch_unwind(engine).unwrap_or_else(|_| Err("panicked".into()));
    println!("             recursion for {STABLE:?} took {:.1}s", start.elapsed().as_secs_f64());
    let with_tr = |f: fn(&TopRec<RatFunc>) -> Outcome| {
        let tr = &tr;
        move || match tr {
            Ok(t) => f(t),
            Err(e) => Err(format!("recursion failed: {e}")),
        }
    };
    all &= run(10, "topological recursion reproduces connected correlators", with_tr(criterion_10));
    all &= run(11, "F̃_{0,3} closed form matches ω_{0,3}", with_tr(criterion_11));
    all &= run(12, "poles only at ramification points", with_tr(criterion_12));
    if !all {
        std::process::exit(1);
    }
}
