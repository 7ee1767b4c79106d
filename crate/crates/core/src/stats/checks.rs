use std::collections::BTreeMap;

use statrs::distribution::{Discrete, DiscreteCDF, Poisson};

use super::{
    anderson_darling_normal, chain_length_cdf, chi_square_gof, cycle_intensity_integral, ks_p_value,
    ks_statistic, mean_var, require, root_tree_cdf, skewness, StatReport, StatsError, KAPPA,
};
use crate::decompose::Kernel;
use crate::enumerate::{kernel_edges, phi_sum, poisson_defect_parameter, t0_unicellular_count, DefectEntry, DefectTable, Model, Provenance, TableValue};
use crate::forest::ForestCode;
use crate::map::RootedMap;
use crate::numeric::{catalan, ln_big};
use crate::rng::RngHandle;
use crate::sample::sample_kernel_with_defect;

/// Chi-square test of defects against the limiting Poisson law.
pub fn defect_gof(samples: &[usize], n: usize, s: usize, model: Model) -> Result<StatReport, StatsError> {
    require(samples.len(), 200)?;
    let lambda = poisson_defect_parameter(n, s, model);
    let zeros = samples.iter().filter(|&&d| d == 0).count() as f64 / samples.len() as f64;
    let report = StatReport::new("defect_gof", &format!("Poisson({lambda:.6})"), samples.len()).detail("p_zero", zeros);
    if lambda == 0.0 {
        let all_zero = samples.iter().all(|&d| d == 0);
        return Ok(report.statistic("nonzero_count", samples.iter().filter(|&&d| d > 0).count() as f64).judge("all samples 0", all_zero));
    }
    let law = Poisson::new(lambda).map_err(|e| StatsError::Domain(e.to_string()))?;
    let top = samples.iter().copied().max().unwrap_or(0).max(1);
    let mut observed = vec![0u64; top + 1];
    for &d in samples {
        observed[d] += 1;
    }
    let mut probs: Vec<f64> = (0..top).map(|d| law.pmf(d as u64)).collect();
    probs.push(1.0 - law.cdf(top as u64 - 1));
    let (stat, df, p) = chi_square_gof(&observed, &probs, 5.0);
    Ok(report.statistic("chi_square", stat).p_value(p).detail("df", df as f64).judge("p > 0.001", p > 0.001))
}

/// Chi-square test of defects against an exact finite law `probs[d]`.
pub fn defect_law_gof(samples: &[usize], probs: &[f64]) -> Result<StatReport, StatsError> {
    require(samples.len(), 200)?;
    let mut observed = vec![0u64; probs.len()];
    for &d in samples {
        if d >= probs.len() {
            return Err(StatsError::Domain(format!("defect {d} outside the law's support")));
        }
        observed[d] += 1;
    }
    let (stat, df, p) = chi_square_gof(&observed, probs, 5.0);
    Ok(StatReport::new("defect_law_gof", "exact defect law", samples.len())
        .statistic("chi_square", stat)
        .p_value(p)
        .detail("df", df as f64)
        .judge("p > 0.001", p > 0.001))
}

/// Mean core size against `√(1.5·n·s)`.
pub fn core_size_check(samples: &[usize], n: usize, s: usize, tolerance: f64) -> Result<StatReport, StatsError> {
    require(samples.len(), 2)?;
    let xs: Vec<f64> = samples.iter().map(|&c| c as f64).collect();
    let (mean, var) = mean_var(&xs);
    let scale = (1.5 * n as f64 * s as f64).sqrt();
    let dev = mean / scale - 1.0;
    let mut report = StatReport::new("core_size_check", "mean core edges ~ sqrt(1.5 n s)", samples.len())
        .statistic("mean/sqrt(1.5ns) - 1", dev)
        .detail("mean", mean)
        .detail("mean/sqrt(ns)", mean / (n as f64 * s as f64).sqrt())
        .detail("stderr_ratio", (var / xs.len() as f64).sqrt() / scale);
    if var > 0.0 {
        report = report.detail("skewness", skewness(&xs));
    }
    Ok(report.judge(format!("|dev| < {tolerance}"), dev.abs() < tolerance))
}

/// Central limit check for core sizes drawn at fixed kernel size `k`:
/// `2(C − c_n)/√n` with `c_n = (k + √(k² + 8nk))/4` should be standard normal.
pub fn core_size_clt(samples: &[usize], n: usize, k: usize) -> Result<StatReport, StatsError> {
    require(samples.len(), 200)?;
    let (nf, kf) = (n as f64, k as f64);
    let center = (kf + (kf * kf + 8.0 * nf * kf).sqrt()) / 4.0;
    let z: Vec<f64> = samples.iter().map(|&c| 2.0 * (c as f64 - center) / nf.sqrt()).collect();
    let (mean, var) = mean_var(&z);
    if var == 0.0 {
        return Err(StatsError::DegenerateInput("core sizes have zero variance".into()));
    }
    let skew = skewness(&z);
    let (a2, p) = anderson_darling_normal(&z);
    Ok(StatReport::new("core_size_clt", "N(0,1)", samples.len())
        .statistic("|skewness|", skew.abs())
        .p_value(p)
        .detail("anderson_darling", a2)
        .detail("mean", mean)
        .detail("variance", var)
        .judge("|skewness| < 0.1 and AD p > 0.01", skew.abs() < 0.1 && p > 0.01))
}

/// KS test of `√(s/n)`-rescaled chain lengths against Exp(mean 1/√6).
pub fn chain_length_test(rescaled: &[f64], tolerance: f64) -> Result<StatReport, StatsError> {
    require(rescaled.len(), 100)?;
    if rescaled.iter().all(|&x| x == rescaled[0]) {
        return Err(StatsError::DegenerateInput("all chain lengths are equal".into()));
    }
    let d = ks_statistic(rescaled, chain_length_cdf);
    let (mean, _) = mean_var(rescaled);
    Ok(StatReport::new("chain_length_test", "Exp(mean 1/sqrt 6)", rescaled.len())
        .statistic("ks", d)
        .p_value(ks_p_value(d, rescaled.len()))
        .detail("mean", mean)
        .detail("reference_mean", 1.0 / 6f64.sqrt())
        .judge(format!("ks < {tolerance}"), d < tolerance))
}

/// First tree of a forest code: `(A, R)` with `A` the first hitting time of −1 and `R` the mark.
pub fn first_tree(code: &ForestCode) -> (usize, usize) {
    (code.first_tree_time(), code.mark().index())
}

/// Distinguished-tree law: KS of `(c/(κn))²·A` against the marginal density
/// `κ e^{−κ²a/2}/√(2πa)`, and of `(R + ½)/A` against Uniform[0,1].
pub fn root_tree_test(
    samples: &[(usize, usize, usize)],
    n: usize,
    tol_size: f64,
    tol_mark: f64,
) -> Result<[StatReport; 2], StatsError> {
    require(samples.len(), 100)?;
    let scaled: Vec<f64> = samples
        .iter()
        .map(|&(a, _, c)| (c as f64 / (KAPPA * n as f64)).powi(2) * a as f64)
        .collect();
    let marks: Vec<f64> = samples.iter().map(|&(a, r, _)| (r as f64 + 0.5) / a as f64).collect();
    let d1 = ks_statistic(&scaled, root_tree_cdf);
    let d2 = ks_statistic(&marks, |x| x.clamp(0.0, 1.0));
    Ok([
        StatReport::new("root_tree_size", "kappa e^(-kappa^2 a/2)/sqrt(2 pi a)", samples.len())
            .statistic("ks", d1)
            .p_value(ks_p_value(d1, samples.len()))
            .judge(format!("ks < {tol_size}"), d1 < tol_size),
        StatReport::new("root_tree_mark", "Uniform[0,1]", samples.len())
            .statistic("ks", d2)
            .p_value(ks_p_value(d2, samples.len()))
            .judge(format!("ks < {tol_mark}"), d2 < tol_mark),
    ])
}

/// Windowed increments of the rescaled contour `(c/(κn))·W_{(κn/c)² t}` after
/// the first tree: their mean per unit time should be `−κ` and their variance
/// per unit time 1. Each path comes with its core size `c`.
pub fn contour_drift_test(paths: &[(ForestCode, usize)], n: usize, dt: f64) -> Result<[StatReport; 2], StatsError> {
    let mut drifts = Vec::new();
    let mut vars = Vec::new();
    let mut warnings = Vec::new();
    for (code, c) in paths {
        let c = *c as f64;
        let nf = n as f64;
        if c < 10.0 * nf.sqrt() || c > nf / 10.0 {
            warnings.push(format!("c = {c} is outside sqrt(n) << c << n"));
        }
        let space = c / (KAPPA * nf);
        let steps = (dt / (space * space)).round() as usize;
        if steps == 0 {
            continue;
        }
        let dt_eff = steps as f64 * space * space;
        let path = code.steps();
        let start = code.first_tree_time();
        let mut level = 0i64;
        let mut levels = Vec::with_capacity(path.len() + 1);
        levels.push(0);
        for i in 0..path.len() {
            level += path.step(i);
            levels.push(level);
        }
        let mut t = start;
        while t + steps <= path.len() {
            let inc = space * (levels[t + steps] - levels[t]) as f64;
            drifts.push(inc / dt_eff);
            vars.push(inc / dt_eff.sqrt());
            t += steps;
        }
    }
    let windows = drifts.len();
    let mut drift = StatReport::new("contour_drift", "Brownian motion with drift -sqrt(1.5)", windows);
    let mut variance = StatReport::new("contour_variance", "Brownian motion, unit variance", windows);
    if windows < 2 {
        // Zero-length window set: report without a verdict.
        return Ok([drift, variance]);
    }
    let (m, v) = mean_var(&drifts);
    let z_drift = (m + KAPPA) / (v / windows as f64).sqrt();
    let (_, v_inc) = mean_var(&vars);
    let se_var = v_inc * (2.0 / (windows as f64 - 1.0)).sqrt();
    let z_var = (v_inc - 1.0) / se_var;
    drift = drift
        .statistic("drift", m)
        .detail("z", z_drift)
        .detail("stderr", (v / windows as f64).sqrt())
        .judge("|z| <= 3", z_drift.abs() <= 3.0);
    variance = variance.statistic("variance", v_inc).detail("z", z_var).detail("stderr", se_var).judge("|z| <= 3", z_var.abs() <= 3.0);
    for w in warnings.iter().take(1) {
        drift = drift.warn(w.clone());
        variance = variance.warn(w.clone());
    }
    Ok([drift, variance])
}

/// Lengths of all simple cycles of the core (through kernel edges weighted by
/// chain lengths) of length at most `max_len`, each cycle once.
pub fn core_cycle_lengths(kernel: &RootedMap, lengths: &[usize], max_len: usize) -> Vec<usize> {
    let (vertex, vcount) = kernel.vertex_labels();
    let mut darts_at: Vec<Vec<u32>> = vec![Vec::new(); vcount];
    for d in 0..kernel.dart_count() as u32 {
        darts_at[vertex[d as usize] as usize].push(d);
    }
    let weight = |d: u32| lengths[d as usize / 2];
    let mut directed: BTreeMap<usize, usize> = BTreeMap::new();
    let mut on_path = vec![false; vcount];
    let mut used_edge = vec![false; kernel.edge_count()];
    // Iterative DFS: frames of (vertex, next dart index, length so far).
    for start in 0..vcount {
        on_path[start] = true;
        let mut stack: Vec<(usize, usize, usize, Option<u32>)> = vec![(start, 0, 0, None)];
        while let Some(frame) = stack.last_mut() {
            let (v, idx, len) = (frame.0, frame.1, frame.2);
            if idx == darts_at[v].len() {
                let (v, _, _, via) = stack.pop().unwrap();
                if v != start || via.is_some() {
                    on_path[v] = false;
                }
                if let Some(e) = via {
                    used_edge[e as usize] = false;
                }
                continue;
            }
            frame.1 += 1;
            let d = darts_at[v][idx];
            let e = d / 2;
            if used_edge[e as usize] {
                continue;
            }
            let total = len + weight(d);
            if total > max_len {
                continue;
            }
            let w = vertex[kernel.alpha(d) as usize] as usize;
            if w == start {
                *directed.entry(total).or_default() += 1;
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                used_edge[e as usize] = true;
                stack.push((w, 0, total, Some(e)));
            }
        }
        on_path[start] = false;
    }
    let mut out = Vec::new();
    for (len, count) in directed {
        debug_assert_eq!(count % 2, 0);
        out.extend(std::iter::repeat(len).take(count / 2));
    }
    out
}

/// Mean number of core cycles of rescaled length `√(12g/n)·ℓ ≤ t_max`
/// against `∫₀^{t_max} (cosh t − 1)/t dt`. Exploratory.
pub fn short_cycle_test(
    cores: &[(RootedMap, Vec<usize>)],
    n: usize,
    g: usize,
    t_max: f64,
    tolerance: f64,
) -> Result<StatReport, StatsError> {
    require(cores.len(), 1)?;
    let scale = (12.0 * g as f64 / n as f64).sqrt();
    let max_len = (t_max / scale).floor() as usize;
    let mut total = 0usize;
    for (kernel, lengths) in cores {
        if kernel.face_count() != 1 {
            return Err(StatsError::NotUnicellular);
        }
        total += core_cycle_lengths(kernel, lengths, max_len).len();
    }
    let mean = total as f64 / cores.len() as f64;
    let reference = cycle_intensity_integral(t_max);
    let rel = (mean - reference) / reference;
    Ok(StatReport::new("short_cycle_test", "(cosh t - 1)/t intensity", cores.len())
        .statistic("mean_count", mean)
        .detail("reference", reference)
        .detail("relative_error", rel)
        .detail("max_length", max_len as f64)
        .judge(format!("|rel| < {tolerance}"), rel.abs() < tolerance)
        .exploratory())
}

/// Mean fraction of loop edges among kernel edges.
pub fn loop_density_check(kernels: &[RootedMap], model: Model, tolerance: f64) -> Result<StatReport, StatsError> {
    require(kernels.len(), 1)?;
    let fractions: Vec<f64> = kernels.iter().map(|k| k.loop_count() as f64 / k.edge_count() as f64).collect();
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    Ok(StatReport::new("loop_density_check", &format!("loop density {:.4}", model.loop_density()), kernels.len())
        .statistic("loop_fraction", mean)
        .judge(format!("fraction < {tolerance}"), mean < tolerance))
}

/// Fraction of vertices whose radius-`radius` ball is a tree (has `3·2^r − 2` vertices).
pub fn tree_like_fraction(kernel: &RootedMap, radius: usize) -> f64 {
    let (vertex, vcount) = kernel.vertex_labels();
    let mut darts_at: Vec<Vec<u32>> = vec![Vec::new(); vcount];
    for d in 0..kernel.dart_count() as u32 {
        darts_at[vertex[d as usize] as usize].push(d);
    }
    let target = 3 * (1usize << radius) - 2;
    let mut seen = vec![usize::MAX; vcount];
    let mut good = 0;
    for v in 0..vcount {
        // Walks that revisit a vertex, or cross a loop or multi-edge, shrink the ball.
        let mut frontier = vec![(v, u32::MAX)];
        seen[v] = v;
        let mut count = 1;
        let mut tree = true;
        for _ in 0..radius {
            let mut next = Vec::new();
            for &(u, from) in &frontier {
                for &d in &darts_at[u] {
                    if from != u32::MAX && d == kernel.alpha(from) {
                        continue;
                    }
                    let w = vertex[kernel.alpha(d) as usize] as usize;
                    if seen[w] == v {
                        tree = false;
                        continue;
                    }
                    seen[w] = v;
                    count += 1;
                    next.push((w, d));
                }
            }
            frontier = next;
        }
        if tree && count == target {
            good += 1;
        }
    }
    good as f64 / vcount as f64
}

pub fn tree_like_ball_check(kernels: &[RootedMap], radius: usize, threshold: f64) -> Result<StatReport, StatsError> {
    require(kernels.len(), 1)?;
    let mean = kernels.iter().map(|k| tree_like_fraction(k, radius)).sum::<f64>() / kernels.len() as f64;
    Ok(StatReport::new("tree_like_ball_check", "three-regular tree", kernels.len())
        .statistic("tree_like_fraction", mean)
        .detail("radius", radius as f64)
        .judge(format!("fraction > {threshold}"), mean > threshold))
}

/// Estimate of `#T_d(1,g)/#T_{d−1}(1,g)` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// `Σ` over non-root non-loop edges `uw` of `Cat(deg u − 2)·Cat(deg w − 2)/(d·Cat(deg u + deg w − 4))`.
/// Its mean over uniform `T_{d−1}` is `#T_d/#T_{d−1}`: splitting a vertex of
/// degree `D` in all ways, weighted this way, gives `D − 3` per vertex.
pub fn split_weight(t: &RootedMap, d: usize) -> f64 {
    let (vertex, _) = t.vertex_labels();
    let degrees = t.vertex_degrees();
    let cat = |x: usize| ln_big(&catalan(x as u64));
    let mut total = 0.0;
    for e in 1..t.edge_count() as u32 {
        let (u, w) = (vertex[2 * e as usize] as usize, vertex[2 * e as usize + 1] as usize);
        if u == w {
            continue;
        }
        let (du, dw) = (degrees[u], degrees[w]);
        total += (cat(du - 2) + cat(dw - 2) - cat(du + dw - 4)).exp();
    }
    total / d as f64
}

pub fn ratio_estimator(g: usize, d: usize, budget: usize, rng: &mut RngHandle) -> Result<RatioEstimate, StatsError> {
    if d == 0 {
        return Err(StatsError::Domain("the ratio needs d >= 1".into()));
    }
    require(budget, 2)?;
    let values: Vec<f64> = (0..budget)
        .map(|_| sample_kernel_with_defect(g, d - 1, rng).map(|t| split_weight(&t, d)))
        .collect::<Result<_, _>>()?;
    let (mean, var) = mean_var(&values);
    Ok(RatioEstimate { value: mean, stderr: (var / budget as f64).sqrt(), samples: budget })
}

/// Unicellular defect table for maps with `n` edges: the closed form at
/// `d = 0`, then Monte Carlo ratios until the relative weight of `d` in the
/// defect law drops below `cutoff`.
pub fn monte_carlo_table(
    g: usize,
    n: usize,
    budget: usize,
    cutoff: f64,
    rng: &mut RngHandle,
) -> Result<DefectTable, StatsError> {
    let s = 1 + 2 * g;
    let mut table = DefectTable::default();
    let t0 = t0_unicellular_count(g)?;
    let mut ln_t = ln_big(&t0);
    let mut rel_var = 0.0;
    table.insert(1, g, 0, DefectEntry { value: TableValue::Exact(t0), provenance: Provenance::ClosedForm })?;
    let base = ln_t + phi_sum(n, kernel_edges(s, 0).unwrap()).ln();
    for d in 1..=2 * s - 5 {
        let Some(k) = kernel_edges(s, d).filter(|&k| k >= 1 && k <= n) else { break };
        let r = ratio_estimator(g, d, budget, rng)?;
        ln_t += r.value.ln();
        rel_var += (r.stderr / r.value).powi(2);
        table.insert(
            1,
            g,
            d,
            DefectEntry { value: TableValue::Estimate { ln: ln_t, rel_stderr: rel_var.sqrt() }, provenance: Provenance::MonteCarlo },
        )?;
        if ln_t + phi_sum(n, k).ln() - base < cutoff.ln() {
            break;
        }
    }
    Ok(table)
}

/// Kernel and chain lengths of a proper kernel, for cycle counting.
pub fn kernel_with_lengths(kernel: &Kernel, lengths: &[usize]) -> Option<(RootedMap, Vec<usize>)> {
    match kernel {
        Kernel::Proper(k) => Some((k.clone(), lengths.to_vec())),
        Kernel::Cycle => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::canonical_alpha;

    fn theta() -> RootedMap {
        RootedMap::new(canonical_alpha(6), vec![2, 5, 4, 1, 0, 3], 0).unwrap()
    }

    #[test]
    fn cycles_of_theta_and_bouquet() {
        // Theta: three 2-edge cycles.
        let mut lens = core_cycle_lengths(&theta(), &[1, 2, 3], 100);
        lens.sort();
        assert_eq!(lens, vec![3, 4, 5]);
        assert_eq!(core_cycle_lengths(&theta(), &[1, 2, 3], 4), vec![3, 4]);
        // Torus: one vertex, two loops.
        let torus = RootedMap::new(vec![1, 0, 3, 2], vec![2, 3, 1, 0], 0).unwrap();
        assert_eq!(core_cycle_lengths(&torus, &[5, 7], 100), vec![5, 7]);
    }

    #[test]
    fn split_weight_is_exact_on_the_torus() {
        let t0 = theta();
        // Two non-root non-loop edges between degree-3 vertices: 2·(1·1/2) = 1.
        assert!((split_weight(&t0, 1) - 1.0).abs() < 1e-12);
        let mut rng = RngHandle::new(1);
        let r = ratio_estimator(1, 1, 50, &mut rng).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(ratio_estimator(1, 0, 10, &mut rng).is_err());
    }

    #[test]
    fn tree_like_balls() {
        assert_eq!(tree_like_fraction(&theta(), 0), 1.0);
        assert_eq!(tree_like_fraction(&theta(), 1), 0.0);
    }

    #[test]
    fn defect_reports() {
        let zeros = vec![0usize; 300];
        assert!(defect_gof(&zeros, 1_000_000, 0, Model::Planar).unwrap().passed());
        let mut mixed = zeros.clone();
        mixed[0] = 1;
        assert!(!defect_gof(&mixed, 1_000_000, 0, Model::Planar).unwrap().passed());
        assert!(matches!(defect_gof(&zeros[..10], 10, 3, Model::Planar), Err(StatsError::TooFewSamples { .. })));
        assert!(matches!(chain_length_test(&[1.0; 200], 0.02), Err(StatsError::DegenerateInput(_))));
    }
}
