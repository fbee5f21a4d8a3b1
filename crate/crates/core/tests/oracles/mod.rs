//! Independent reference implementations used only by tests.
//!
//! Nothing here shares code with the library paths it checks: the analyzer
//! oracle walks raw category term lists with a naive double loop, and the
//! Student-t oracle integrates the density numerically.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

/// Raw counts, matched positions and intensities for `tokens` under a
/// lexicon given as plain `(category, terms)` lists.
pub struct OracleProfile {
    pub raw: BTreeMap<String, u64>,
    pub matched: u64,
    pub intensities: BTreeMap<String, f64>,
}

pub fn naive_analyze(tokens: &[String], categories: &[(String, Vec<String>)]) -> OracleProfile {
    let mut raw = BTreeMap::new();
    let mut matched_positions = vec![false; tokens.len()];
    for (name, terms) in categories {
        let mut count = 0u64;
        for i in 0..tokens.len() {
            let mut hit = false;
            for term in terms {
                let words: Vec<&str> = term.split('_').collect();
                if i + words.len() <= tokens.len() && words.iter().zip(&tokens[i..]).all(|(w, t)| *w == t.as_str()) {
                    hit = true;
                }
            }
            if hit {
                count += 1;
                matched_positions[i] = true;
            }
        }
        raw.insert(name.clone(), count);
    }
    let matched = matched_positions.iter().filter(|&&m| m).count() as u64;
    let intensities = raw
        .iter()
        .map(|(k, &v)| {
            let iv = if matched == 0 { 0.0 } else { v as f64 / matched as f64 };
            (k.clone(), iv)
        })
        .collect();
    OracleProfile {
        raw,
        matched,
        intensities,
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // split up front so sharply peaked integrands are not missed
    let pieces = 16;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = if k + 1 == pieces { b } else { lo + h };
            let (fa, fb) = (f(lo), f(hi));
            let fm = f(0.5 * (lo + hi));
            let whole = simpson(lo, hi, fa, fm, fb);
            adaptive(f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 50)
        })
        .sum()
}

/// Student-t CDF by quadrature. With `s = sqrt(df) tan(theta)` the density
/// becomes proportional to `cos(theta)^(df - 1)` on `(-pi/2, pi/2)`, so
/// `F(t) = 1/2 + sign(t) * int_0^atan(|t|/sqrt(df)) / (2 int_0^(pi/2))`.
pub fn student_t_cdf_quadrature(t: f64, df: f64) -> f64 {
    let f = move |th: f64| th.cos().max(0.0).powf(df - 1.0);
    let theta = (t.abs() / df.sqrt()).atan();
    let num = integrate(&f, 0.0, theta, 1e-15);
    let den = integrate(&f, 0.0, FRAC_PI_2, 1e-15);
    let half = 0.5 * num / den;
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

pub fn two_sided_p_quadrature(t: f64, df: f64) -> f64 {
    2.0 * student_t_cdf_quadrature(-t.abs(), df)
}

/// Plain two-pass mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
