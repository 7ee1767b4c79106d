//! Counting: kernel extension sums, trivalent closed forms, total map
//! counts, asymptotic equivalents and a brute-force oracle.

mod oracle;
mod table;

pub use oracle::{oracle_enumerate, Census};
pub use table::{DefectEntry, DefectTable, Provenance, TableValue};

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{binomial, catalan, double_factorial, factorial, ln_big, ln_binomial, log_sum_exp};

/// Below this many edges counts are computed exactly; at or above it in log space.
pub const EXACT_LIMIT: usize = 5000;

/// Error assumed for every log-space evaluation of a binomial product.
const LOG_EVAL_ERR: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("defect table is missing (f={f}, g={g}) entries for d in {missing:?}")]
    IncompleteTable { f: usize, g: usize, missing: Vec<usize> },
    #[error("defect table contains Monte Carlo entries for (f={f}, g={g}); exact mode refuses them")]
    NotExact { f: usize, g: usize },
    #[error("oracle budget exceeded: n_max = {n_max} > 6")]
    BudgetExceeded { n_max: usize },
    #[error("outside the asymptotic regime: {0}")]
    Regime(String),
    #[error("defect table: {0}")]
    Table(String),
    #[error("oracle inconsistency: {0}")]
    OracleInconsistent(String),
}

/// A count, exact or as a logarithm with a relative error bound.
#[derive(Clone, Debug, PartialEq)]
pub enum EnumValue {
    Exact(BigUint),
    Log { ln: f64, rel_err: f64 },
}

impl EnumValue {
    pub fn ln(&self) -> f64 {
        match self {
            EnumValue::Exact(x) => ln_big(x),
            EnumValue::Log { ln, .. } => *ln,
        }
    }

    pub fn rel_err(&self) -> f64 {
        match self {
            EnumValue::Exact(_) => 0.0,
            EnumValue::Log { rel_err, .. } => *rel_err,
        }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            EnumValue::Exact(x) => Some(x),
            EnumValue::Log { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            EnumValue::Exact(x) => x.is_zero(),
            EnumValue::Log { ln, .. } => *ln == f64::NEG_INFINITY,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, EnumValue::Exact(_))
    }
}

impl fmt::Display for EnumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnumValue::Exact(x) => write!(f, "{x}"),
            EnumValue::Log { ln, rel_err } => write!(f, "exp({ln:.12})(±{rel_err:.1e})"),
        }
    }
}

/// Which family the kernel lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Planar,
    Unicellular,
}

impl Model {
    /// Loop-edge density of the local limit of the kernel.
    pub fn loop_density(self) -> f64 {
        match self {
            Model::Planar => 1.0 - 3f64.sqrt() / 2.0,
            Model::Unicellular => 0.0,
        }
    }
}

/// `φ_n(c,k) = binom(c,k)·binom(2n,n+c)`, zero outside `1 ≤ k ≤ c ≤ n`.
pub fn phi_exact(n: usize, c: usize, k: usize) -> BigUint {
    if k == 0 || k > c || c > n {
        return BigUint::zero();
    }
    binomial(c as u64, k as u64) * binomial(2 * n as u64, (n + c) as u64)
}

pub fn ln_phi(n: usize, c: usize, k: usize) -> f64 {
    if k == 0 || k > c || c > n {
        return f64::NEG_INFINITY;
    }
    ln_binomial(c as u64, k as u64) + ln_binomial(2 * n as u64, (n + c) as u64)
}

pub fn phi(n: usize, c: usize, k: usize) -> EnumValue {
    if n < EXACT_LIMIT {
        EnumValue::Exact(phi_exact(n, c, k))
    } else {
        EnumValue::Log { ln: ln_phi(n, c, k), rel_err: LOG_EVAL_ERR }
    }
}

/// `φ_n(c,k)` for `c = k..=n`, built by incremental ratios.
pub fn phi_terms_exact(n: usize, k: usize) -> Vec<BigUint> {
    if k == 0 || k > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n - k + 1);
    let mut bc = BigUint::one();
    let mut bn = binomial(2 * n as u64, (n + k) as u64);
    for c in k..=n {
        if c > k {
            bc = bc * c / (c - k);
            bn = bn * (n - c + 1) / (n + c);
        }
        out.push(&bc * &bn);
    }
    out
}

pub fn phi_sum_exact(n: usize, k: usize) -> BigUint {
    phi_terms_exact(n, k).into_iter().sum()
}

/// `Rat_n(C,k) = φ_n(C,k)/φ_n(C−1,k)`, decreasing in `C`.
pub fn rat(n: usize, c: usize, k: usize) -> f64 {
    let (n, c, k) = (n as f64, c as f64, k as f64);
    c * (1.0 - c + n) / ((c + n) * (c - k))
}

/// Mode `C_{n,k}` of `c ↦ φ_n(c,k)`.
pub fn argmax_c(n: usize, k: usize) -> usize {
    let (n128, k128) = (n as u128, k as u128);
    let disc = (k128 + 1) * (k128 + 1) + 8 * n128 * k128;
    let root = isqrt(disc);
    let c = ((1 + k128 + root) / 4) as usize;
    c.clamp(k, n)
}

fn isqrt(x: u128) -> u128 {
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Range of core sizes kept by the log-space backend.
pub fn phi_window(n: usize, k: usize) -> (usize, usize) {
    let nf = n as f64;
    let half = (12.0 * (nf * nf.ln().max(1.0)).sqrt()).ceil() as usize;
    let mode = argmax_c(n, k);
    (mode.saturating_sub(half).max(k), (mode + half).min(n))
}

/// Log-space `Φ_n(k)` over the truncation window, with a certified tail bound.
pub fn phi_sum_log(n: usize, k: usize) -> EnumValue {
    if k == 0 || k > n {
        return EnumValue::Log { ln: f64::NEG_INFINITY, rel_err: 0.0 };
    }
    let (lo, hi) = phi_window(n, k);
    let terms: Vec<f64> = (lo..=hi).map(|c| ln_phi(n, c, k)).collect();
    let ln = log_sum_exp(&terms);
    let mut tail = 0.0;
    if hi < n {
        let r = rat(n, hi + 1, k);
        tail += geometric_tail(terms[terms.len() - 1] - ln, r);
    }
    if lo > k {
        let r = 1.0 / rat(n, lo, k);
        tail += geometric_tail(terms[0] - ln, r);
    }
    let rounding = terms.len() as f64 * f64::EPSILON;
    EnumValue::Log { ln, rel_err: tail + rounding + LOG_EVAL_ERR }
}

fn geometric_tail(ln_edge_share: f64, ratio: f64) -> f64 {
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    ln_edge_share.exp() * ratio / (1.0 - ratio)
}

/// `Φ_n(k) = Σ_c φ_n(c,k)`, exact below [`EXACT_LIMIT`] edges.
pub fn phi_sum(n: usize, k: usize) -> EnumValue {
    if n < EXACT_LIMIT {
        EnumValue::Exact(phi_sum_exact(n, k))
    } else {
        phi_sum_log(n, k)
    }
}

/// Rooted trivalent plane maps with `f` faces.
pub fn t0_planar_count(f: usize) -> Result<BigUint, EnumError> {
    if f < 3 {
        return Err(EnumError::Domain(format!("planar trivalent count needs f >= 3, got {f}")));
    }
    let f = f as u64;
    let num = (BigUint::one() << (2 * f - 3)) * double_factorial(3 * f as i64 - 6);
    Ok(num / (factorial(f - 1) * double_factorial(f as i64)))
}

/// Rooted trivalent one-face maps of genus `g`.
pub fn t0_unicellular_count(g: usize) -> Result<BigUint, EnumError> {
    if g < 1 {
        return Err(EnumError::Domain(format!("unicellular trivalent count needs g >= 1, got {g}")));
    }
    let g = g as u64;
    let num = BigUint::from(2u32) * factorial(6 * g - 3);
    Ok(num / (BigUint::from(12u32).pow(g as u32) * factorial(g) * factorial(3 * g - 2)))
}

/// Kernel edge count `3s − 6 − d`, or `None` when negative.
pub fn kernel_edges(s: usize, d: usize) -> Option<usize> {
    (3 * s).checked_sub(6 + d)
}

/// Number of rooted maps with `n` edges, `f` faces and genus `g`.
pub fn total_count(n: usize, f: usize, g: usize, table: &DefectTable) -> Result<EnumValue, EnumError> {
    if f == 0 || n == 0 {
        return Err(EnumError::Domain("need n >= 1 and f >= 1".into()));
    }
    let s = f + 2 * g;
    if s == 1 {
        return Ok(if n < EXACT_LIMIT {
            EnumValue::Exact(catalan(n as u64))
        } else {
            let nn = n as u64;
            EnumValue::Log { ln: ln_binomial(2 * nn, nn) - (nn as f64 + 1.0).ln(), rel_err: LOG_EVAL_ERR }
        });
    }
    if s == 2 {
        // Σ_{c=1..n} binom(2n, n+c) = (4^n − binom(2n,n))/2.
        let nn = n as u64;
        return Ok(if n < EXACT_LIMIT {
            EnumValue::Exact(((BigUint::one() << (2 * nn)) - binomial(2 * nn, nn)) >> 1)
        } else {
            let ratio = (ln_binomial(2 * nn, nn) - 2.0 * nn as f64 * std::f64::consts::LN_2).exp();
            EnumValue::Log {
                ln: (2 * nn - 1) as f64 * std::f64::consts::LN_2 + (-ratio).ln_1p(),
                rel_err: LOG_EVAL_ERR,
            }
        });
    }
    let entries = table.required_entries(n, f, g)?;
    let exact = n < EXACT_LIMIT && entries.iter().all(|(_, e)| matches!(e.value, TableValue::Exact(_)));
    if exact {
        let mut total = BigUint::zero();
        for (d, e) in &entries {
            if let TableValue::Exact(t) = &e.value {
                total += t * phi_sum_exact(n, kernel_edges(s, *d).unwrap());
            }
        }
        return Ok(EnumValue::Exact(total));
    }
    // Relative errors of the terms combine with weights equal to their shares.
    let mut logs = Vec::new();
    let mut errs = Vec::new();
    for (d, e) in &entries {
        let k = kernel_edges(s, *d).unwrap();
        let (ln_t, rel_t) = e.value.ln_with_err();
        let phi = phi_sum(n, k);
        logs.push(ln_t + phi.ln());
        errs.push(rel_t + phi.rel_err());
    }
    let ln = log_sum_exp(&logs);
    let rel_err = logs.iter().zip(&errs).map(|(&l, &e)| e * (l - ln).exp()).sum();
    Ok(EnumValue::Log { ln, rel_err })
}

/// `ln` of `e^{−√(γ/2)}/(2√(2πk)) · 4^n · (en/(2k))^{k/2}` with `γ = k³/n`, as displayed.
pub fn asymptotic_phi_sum(n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let gamma = kf.powi(3) / nf;
    -(gamma / 2.0).sqrt() - (2.0 * (2.0 * std::f64::consts::PI * kf).sqrt()).ln()
        + nf * 4f64.ln()
        + kf / 2.0 * (std::f64::consts::E * nf / (2.0 * kf)).ln()
}

/// Same as [`asymptotic_phi_sum`] with the central binomial taken as
/// `4^n/√(πn)`; exceeds the displayed expression by `ln √2`.
pub fn asymptotic_phi_sum_corrected(n: usize, k: usize) -> f64 {
    asymptotic_phi_sum(n, k) + 0.5 * std::f64::consts::LN_2
}

/// `ln` of the asymptotic equivalent of the number of rooted maps, in the
/// planar (`g = 0`) or unicellular (`f = 1`) regime with `s = O(n^{1/3})`.
pub fn asymptotic_map_count(n: usize, f: usize, g: usize) -> Result<f64, EnumError> {
    let nf = n as f64;
    let s = (f + 2 * g) as f64;
    if s.powi(3) > 1000.0 * nf {
        return Err(EnumError::Regime(format!("s = {s} exceeds 10·n^(1/3)")));
    }
    let pi = std::f64::consts::PI;
    let e = std::f64::consts::E;
    if g == 0 && f >= 2 {
        let ff = f as f64;
        let scaled = ff / nf.cbrt();
        Ok(-(2.0 - 3f64.sqrt()) * (1.5 * scaled).powf(1.5) - (4.0 * pi).ln() - 3.0 * nf.ln()
            + nf * 4f64.ln()
            + 1.5 * ff * (2f64.cbrt() * e * nf / ff).ln())
    } else if f == 1 && g >= 1 {
        let gf = g as f64;
        Ok(-(2.0 * pi).ln() - 0.5 * gf.ln() - 1.5 * nf.ln()
            + nf * 4f64.ln()
            + gf * (e * nf.powi(3) / (12.0 * gf)).ln())
    } else {
        Err(EnumError::Regime(format!("(f={f}, g={g}) is neither planar nor unicellular")))
    }
}

/// Mean of the limiting Poisson law of the defect: `3(1−λ)·√(1.5·s³/n)`.
pub fn poisson_defect_parameter(n: usize, s: usize, model: Model) -> f64 {
    let (nf, sf) = (n as f64, s as f64);
    3.0 * (1.0 - model.loop_density()) * (1.5 * sf.powi(3) / nf).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn u(x: BigUint) -> u64 {
        x.to_u64().unwrap()
    }

    #[test]
    fn phi_values() {
        assert_eq!(u(phi_exact(5, 3, 2)), 135);
        assert_eq!(u(phi_exact(2, 2, 1)), 2);
        assert!(phi_exact(5, 1, 2).is_zero());
        assert!(phi_exact(5, 6, 2).is_zero());
        assert_eq!(u(phi_sum_exact(2, 2)), 1);
        assert_eq!(u(phi_sum_exact(3, 2)), 9);
        assert!(phi_sum_exact(3, 4).is_zero());
        let terms = phi_terms_exact(30, 4);
        for (i, t) in terms.iter().enumerate() {
            assert_eq!(*t, phi_exact(30, 4 + i, 4));
        }
    }

    #[test]
    fn mode_location() {
        assert_eq!(argmax_c(100, 10), 25);
        for n in [10usize, 57, 200] {
            for k in 1..=n / 4 {
                let terms = phi_terms_exact(n, k);
                let best = terms.iter().max().unwrap();
                assert_eq!(&terms[argmax_c(n, k) - k], best, "n={n} k={k}");
            }
        }
        let (n, k) = (1000, 40);
        let c = argmax_c(n, k);
        assert!(rat(n, c, k) >= 1.0 && rat(n, c + 1, k) < 1.0);
    }

    #[test]
    fn log_backend_agrees_with_exact() {
        for &(n, k) in &[(50usize, 3usize), (400, 20), (2000, 1), (2000, 100), (2000, 2000)] {
            let exact = ln_big(&phi_sum_exact(n, k));
            let log = phi_sum_log(n, k);
            assert!(log.rel_err() <= 1e-8);
            assert!((exact - log.ln()).abs() <= 1e-8, "n={n} k={k}: {exact} vs {}", log.ln());
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(u(t0_planar_count(3).unwrap()), 4);
        assert_eq!(u(t0_planar_count(4).unwrap()), 32);
        assert_eq!(u(t0_unicellular_count(1).unwrap()), 1);
        assert_eq!(u(t0_unicellular_count(2).unwrap()), 105);
        assert!(t0_planar_count(2).is_err());
        assert!(t0_unicellular_count(0).is_err());
    }

    #[test]
    fn special_totals() {
        let table = DefectTable::default();
        let cat: Vec<u64> = (1..6).map(|n| u(total_count(n, 1, 0, &table).unwrap().exact().unwrap().clone())).collect();
        assert_eq!(cat, vec![1, 2, 5, 14, 42]);
        assert_eq!(u(total_count(1, 2, 0, &table).unwrap().exact().unwrap().clone()), 1);
        assert_eq!(u(total_count(2, 2, 0, &table).unwrap().exact().unwrap().clone()), 5);
    }

    #[test]
    fn asymptotic_expressions() {
        assert_eq!(poisson_defect_parameter(1_000_000, 0, Model::Planar), 0.0);
        // s³/n = 2/3: n = 12, s = 2.
        assert!((poisson_defect_parameter(12, 2, Model::Unicellular) - 3.0).abs() < 1e-12);
        assert!((poisson_defect_parameter(12, 2, Model::Planar) - 3.0 * 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!(asymptotic_map_count(100, 2, 3).is_err());
        assert!(asymptotic_map_count(10, 30, 0).is_err());
        assert!(asymptotic_map_count(1_000_000, 30, 0).is_ok());
    }
}
