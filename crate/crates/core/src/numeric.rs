//! Exact and log-space combinatorial helpers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `binom(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `Cat(n) = binom(2n, n) / (n + 1)`.
pub fn catalan(n: u64) -> BigUint {
    binomial(2 * n, n) / (n + 1)
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `n!!`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(n: i64) -> BigUint {
    let mut acc = BigUint::one();
    let mut i = n;
    while i > 1 {
        acc *= i as u64;
        i -= 2;
    }
    acc
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling error `ln m! − (m + ½) ln m + m − ½ ln 2π`.
fn stirling_error(m: u64) -> f64 {
    if m < 16 {
        let exact: f64 = (1..=m).map(|i| (i as f64).ln()).sum();
        let x = m as f64;
        return exact - (x + 0.5) * x.ln() + x - LN_SQRT_2PI;
    }
    let x = m as f64;
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let x = n as f64;
    (x + 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_error(n)
}

/// `ln binom(n, k)` in entropy form, accurate to about `1e-12` relative for large arguments.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let (nf, kf, rf) = (n as f64, k as f64, (n - k) as f64);
    let p = kf / nf;
    let entropy = -kf * p.ln() - rf * (-p).ln_1p();
    entropy - 0.5 * (2.0 * std::f64::consts::PI * kf * rf / nf).ln() + stirling_error(n)
        - stirling_error(k)
        - stirling_error(n - k)
}

/// Natural log of a big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln Σ exp(xᵢ)`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let cats: Vec<u64> = (0..8).map(|n| catalan(n).to_u64().unwrap()).collect();
        assert_eq!(cats, vec![1, 1, 2, 5, 14, 42, 132, 429]);
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(double_factorial(7), BigUint::from(105u32));
        assert_eq!(double_factorial(-1), BigUint::one());
        assert_eq!(factorial(6), BigUint::from(720u32));
    }

    #[test]
    fn log_binomial_matches_exact() {
        for &(n, k) in &[(10u64, 3u64), (200, 77), (3000, 1500), (5000, 17), (40, 39)] {
            let exact = ln_big(&binomial(n, k));
            let approx = ln_binomial(n, k);
            assert!((exact - approx).abs() < 1e-9 * exact.max(1.0), "{n} {k}: {exact} {approx}");
        }
        let exact = ln_big(&factorial(300));
        assert!((ln_factorial(300) - exact).abs() < 1e-9);
    }

    #[test]
    fn log_sum_exp_is_stable() {
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - 1000.0 - 2f64.ln()).abs() < 1e-12);
    }
}
