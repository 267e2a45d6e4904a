//! Exact factorisation of rational polynomials and root representatives.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algext::AlgExt;
use crate::error::{AlgebraError, Result};
use crate::poly::Poly;
use crate::rat::Rat;

/// A root of a rational polynomial.
#[derive(Clone, Debug, PartialEq)]
pub enum Root {
    Rational(Rat),
    /// `θ` in `Q[θ]/(minimal)`; `minimal` is monic and irreducible over Q.
    Algebraic(AlgExt<Rat>),
}

impl Root {
    pub fn minimal_polynomial(&self) -> Poly<Rat> {
        match self {
            Root::Rational(r) => Poly::from_rats(&[-r.clone(), Rat::one()]),
            Root::Algebraic(a) => (**a.modulus()).clone(),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Root::Rational(_) => 1,
            Root::Algebraic(a) => a.modulus().degree().unwrap_or(0),
        }
    }
}

/// Integer coefficients with content 1 and positive leading coefficient.
pub fn primitive_part(p: &Poly<Rat>) -> Vec<BigInt> {
    let l = Rat::lcm_of_denominators(p.coeffs());
    let mut ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&l / c.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
    if !g.is_zero() {
        for c in ints.iter_mut() {
            *c /= &g;
        }
    }
    if ints.last().is_some_and(|c| c.is_negative()) {
        for c in ints.iter_mut() {
            *c = -&*c;
        }
    }
    ints
}

fn int_poly(c: &[BigInt]) -> Poly<Rat> {
    Poly::new(c.iter().cloned().map(Rat::from_bigint).collect(), Rat::zero())
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// All rational roots, each listed once.
pub fn rational_roots(p: &Poly<Rat>) -> Vec<Rat> {
    let mut out = Vec::new();
    if p.is_zero() {
        return out;
    }
    let mut ints = primitive_part(p);
    if ints.first().is_some_and(|c| c.is_zero()) {
        out.push(Rat::zero());
        while ints.first().is_some_and(|c| c.is_zero()) {
            ints.remove(0);
        }
    }
    if ints.len() < 2 {
        return out;
    }
    let q = int_poly(&ints);
    let lead = ints.last().unwrap().clone();
    let tail = ints[0].clone();
    for num in positive_divisors(&tail) {
        for den in positive_divisors(&lead) {
            for s in [1i64, -1] {
                let cand = Rat::from_big(&num * s, den.clone()).expect("nonzero");
                if !out.contains(&cand) && q.eval(&cand).is_zero() {
                    out.push(cand);
                }
            }
        }
    }
    out.sort();
    out
}

fn lagrange(xs: &[i64], ys: &[BigInt]) -> Poly<Rat> {
    let mut acc = Poly::zero(&Rat::zero());
    for (i, (&xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = Poly::one(&Rat::zero());
        let mut denom = Rat::one();
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis = basis.mul(&Poly::from_ints(&[-xj, 1]));
                denom *= &Rat::from_int(xi - xj);
            }
        }
        acc = acc.add(&basis.scale(&(Rat::from_bigint(yi.clone()) / denom)));
    }
    acc
}

/// Budget on divisor combinations tried per candidate degree.
const KRONECKER_BUDGET: u64 = 200_000;

/// Split an integer polynomial without rational roots into a nontrivial
/// factor of degree `d`, if one exists and the search fits the budget.
/// Returns `Err(())` when the budget was exhausted.
fn kronecker_factor(f: &Poly<Rat>, d: usize) -> std::result::Result<Option<Poly<Rat>>, ()> {
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    let mut x = 0i64;
    while xs.len() < d + 1 {
        let v = f.eval(&Rat::from_int(x));
        if !v.is_zero() {
            xs.push(x);
            vals.push(v.numer().clone());
        }
        x = if x <= 0 { 1 - x } else { -x };
    }
    let divs: Vec<Vec<BigInt>> = vals.iter().map(positive_divisors).collect();
    let mut total: u64 = 1;
    for (i, dv) in divs.iter().enumerate() {
        let branch = if i == 0 { dv.len() } else { 2 * dv.len() };
        total = total.saturating_mul(branch as u64);
    }
    if total > KRONECKER_BUDGET {
        return Err(());
    }
    let mut idx = vec![0usize; xs.len()];
    let mut signs = vec![false; xs.len()];
    loop {
        let ys: Vec<BigInt> = (0..xs.len())
            .map(|i| {
                let v = divs[i][idx[i]].clone();
                if signs[i] {
                    -v
                } else {
                    v
                }
            })
            .collect();
        let cand = lagrange(&xs, &ys);
        if cand.degree() == Some(d) && cand.coeffs().iter().all(|c| c.is_integer()) {
            if let Ok(q) = f.exact_div(&cand) {
                if q.coeffs().iter().all(|c| c.is_integer()) {
                    return Ok(Some(cand));
                }
            }
        }
        // odometer over divisor choices; the first sign is fixed positive
        let mut k = 0;
        loop {
            if k == xs.len() {
                return Ok(None);
            }
            if k > 0 && !signs[k] {
                signs[k] = true;
                break;
            }
            signs[k] = false;
            idx[k] += 1;
            if idx[k] < divs[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Factor a squarefree rational polynomial with no rational roots into monic
/// pieces. The flag reports whether every piece is proven irreducible.
pub fn split_without_linear(p: &Poly<Rat>) -> (Vec<Poly<Rat>>, bool) {
    let mut pending = vec![int_poly(&primitive_part(p))];
    let mut done = Vec::new();
    let mut certified = true;
    while let Some(f) = pending.pop() {
        let n = f.degree().unwrap_or(0);
        if n <= 3 {
            if n > 0 {
                done.push(f.monic());
            }
            continue;
        }
        let mut split = None;
        for d in 2..=n / 2 {
            match kronecker_factor(&f, d) {
                Ok(Some(g)) => {
                    split = Some(g);
                    break;
                }
                Ok(None) => {}
                Err(()) => certified = false,
            }
        }
        match split {
            Some(g) => {
                let h = f.exact_div(&g).expect("factor divides");
                pending.push(int_poly(&primitive_part(&g)));
                pending.push(int_poly(&primitive_part(&h)));
            }
            None => done.push(f.monic()),
        }
    }
    done.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| format!("{a}").cmp(&format!("{b}")))
    });
    (done, certified)
}

/// Roots of `p` with multiplicities: rational roots exactly, one algebraic
/// representative per irreducible nonlinear factor.
pub fn poly_resultant_free_roots(p: &Poly<Rat>) -> Result<Vec<(Root, usize)>> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        let mut rest = factor.clone();
        for r in rational_roots(&factor) {
            rest = rest.exact_div(&Poly::from_rats(&[-r.clone(), Rat::one()]))?;
            out.push((Root::Rational(r), mult));
        }
        if rest.degree().unwrap_or(0) > 0 {
            for irr in split_without_linear(&rest).0 {
                let theta = AlgExt::generator(Arc::new(irr))?;
                out.push((Root::Algebraic(theta), mult));
            }
        }
    }
    Ok(out)
}
