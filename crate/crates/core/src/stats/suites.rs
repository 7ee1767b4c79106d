//! Named verification suites with default parameters. The CLI `verify`
//! command and the acceptance test both run these.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::*;
use crate::decompose::{decompose, recompose};
use crate::enumerate::{
    asymptotic_phi_sum, asymptotic_phi_sum_corrected, kernel_edges, oracle_enumerate, phi_sum, phi_sum_exact,
    t0_planar_count, t0_unicellular_count, total_count, Census, DefectEntry, DefectTable, Model, Provenance,
    TableValue,
};
use crate::map::RootedMap;
use crate::numeric::{double_factorial, factorial, ln_big};
use crate::rng::RngHandle;
use crate::sample::{
    sample_config_tripods, sample_first_tree, sample_forest_code, sample_map_rejection, CensusKernels,
    CoreSizeSampler, DefaultKernels, Mode, Pipeline, UnicellularKernels,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    OracleIdentity,
    ClosedForms,
    ExactLaw,
    Uniformity,
    PhiRatio,
    PhiAsymptotics,
    CoreSize,
    CoreClt,
    ChainLengths,
    RootTree,
    ContourDrift,
    ConfigModel,
    RoundTrip,
    ShortCycles,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::OracleIdentity,
        Suite::ClosedForms,
        Suite::ExactLaw,
        Suite::Uniformity,
        Suite::PhiRatio,
        Suite::PhiAsymptotics,
        Suite::CoreSize,
        Suite::CoreClt,
        Suite::ChainLengths,
        Suite::RootTree,
        Suite::ContourDrift,
        Suite::ConfigModel,
        Suite::RoundTrip,
        Suite::ShortCycles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OracleIdentity => "oracle-identity",
            Suite::ClosedForms => "closed-forms",
            Suite::ExactLaw => "exact-law",
            Suite::Uniformity => "uniformity",
            Suite::PhiRatio => "phi-ratio",
            Suite::PhiAsymptotics => "phi-asymptotics",
            Suite::CoreSize => "core-size",
            Suite::CoreClt => "core-clt",
            Suite::ChainLengths => "chain-lengths",
            Suite::RootTree => "root-tree",
            Suite::ContourDrift => "contour-drift",
            Suite::ConfigModel => "config-model",
            Suite::RoundTrip => "round-trip",
            Suite::ShortCycles => "short-cycles",
        }
    }

    /// Position in the acceptance list, from 1.
    pub fn criterion(self) -> usize {
        Suite::ALL.iter().position(|&s| s == self).unwrap() + 1
    }

    /// Whether the suite's verdict is informative only.
    pub fn exploratory(self) -> bool {
        self == Suite::ShortCycles
    }

    /// Default `(n, s, samples)`; `s` is `1 + 2g` for the unicellular suites.
    pub fn defaults(self) -> SuiteParams {
        let p = |n, s, samples| SuiteParams { n: Some(n), s: Some(s), samples: Some(samples), ..SuiteParams::new(1) };
        match self {
            Suite::OracleIdentity => p(4, 0, 0),
            Suite::ClosedForms => p(3, 3, 0),
            Suite::ExactLaw => p(3, 3, 0),
            Suite::Uniformity => p(3, 3, 100_000),
            Suite::PhiRatio => p(1_000_000, 1000, 0),
            Suite::PhiAsymptotics => p(1_000_000, 0, 0),
            Suite::CoreSize => p(1_000_000, 31, 500),
            Suite::CoreClt => p(100_000, 300, 10_000),
            Suite::ChainLengths => p(1_000_000, 31, 10_000),
            Suite::RootTree => p(1_000_000, 31, 5000),
            Suite::ContourDrift => p(1_000_000, 31, 20),
            Suite::ConfigModel => p(50, 0, 100_000),
            Suite::RoundTrip => p(0, 0, 10_000),
            Suite::ShortCycles => p(1_000_000, 101, 2000),
        }
    }
}

impl FromStr for Suite {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| StatsError::Domain(format!("unknown suite {s:?}")))
    }
}

/// Parameters of a suite run; `None` fields take the suite default. The
/// meaning of `s` varies: kernel size `k` for `phi-ratio` and `core-clt`,
/// tripod count `v` for `config-model` (through `n`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub n: Option<usize>,
    pub s: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    /// Kernel draws per defect for Monte Carlo tables.
    pub table_budget: usize,
}

impl SuiteParams {
    pub fn new(seed: u64) -> Self {
        SuiteParams { n: None, s: None, samples: None, seed, table_budget: 200 }
    }

    fn resolve(&self, suite: Suite) -> (usize, usize, usize) {
        let d = suite.defaults();
        (
            self.n.or(d.n).unwrap_or(0),
            self.s.or(d.s).unwrap_or(0),
            self.samples.or(d.samples).unwrap_or(0),
        )
    }
}

/// Runs a suite and stamps each report with its running time.
pub fn run_suite(suite: Suite, params: &SuiteParams) -> Result<Vec<StatReport>, StatsError> {
    let start = Instant::now();
    let (n, s, samples) = params.resolve(suite);
    let seed = params.seed;
    let mut reports = match suite {
        Suite::OracleIdentity => oracle_identity(n),
        Suite::ClosedForms => closed_forms(),
        Suite::ExactLaw => exact_law(),
        Suite::Uniformity => uniformity(n, genus_of(s)?, samples, seed),
        Suite::PhiRatio => phi_ratio(n, s),
        Suite::PhiAsymptotics => phi_asymptotics(n),
        Suite::CoreSize => core_size(n, genus_of(s)?, samples, seed, params.table_budget),
        Suite::CoreClt => core_clt(n, s, samples, seed),
        Suite::ChainLengths => chain_lengths(n, genus_of(s)?, samples, seed, params.table_budget),
        Suite::RootTree => root_tree(n, genus_of(s)?, samples, seed, params.table_budget),
        Suite::ContourDrift => contour_drift(n, genus_of(s)?, samples, seed, params.table_budget),
        Suite::ConfigModel => config_model(n, samples, seed),
        Suite::RoundTrip => round_trip(samples, seed, params.table_budget),
        Suite::ShortCycles => short_cycles(n, genus_of(s)?, samples, seed, params.table_budget),
    }?;
    let ms = start.elapsed().as_millis() as u64;
    for r in &mut reports {
        r.runtime_ms = ms;
    }
    Ok(reports)
}

fn genus_of(s: usize) -> Result<usize, StatsError> {
    if s < 3 || s % 2 == 0 {
        return Err(StatsError::Domain(format!("unicellular suites need odd s >= 3, got {s}")));
    }
    Ok((s - 1) / 2)
}

/// Oracle census up to 4 edges, computed once per process.
pub fn small_census() -> &'static Census {
    static CENSUS: OnceLock<Census> = OnceLock::new();
    CENSUS.get_or_init(|| oracle_enumerate(4).expect("n_max = 4 is supported"))
}

/// Monte Carlo unicellular table, cached per `(g, n, seed, budget)`.
pub fn cached_mc_table(g: usize, n: usize, seed: u64, budget: usize) -> Result<DefectTable, StatsError> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, u64, usize), DefectTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&(g, n, seed, budget)) {
        return Ok(t.clone());
    }
    let mut rng = RngHandle::with_replica(seed, u64::MAX);
    let table = monte_carlo_table(g, n, budget, 1e-12, &mut rng)?;
    cache.lock().unwrap().insert((g, n, seed, budget), table.clone());
    Ok(table)
}

/// Runs `f` on `count` replica streams in parallel; results keep replica order.
fn replicas<T: Send>(
    count: usize,
    seed: u64,
    f: impl Fn(&mut RngHandle) -> Result<T, StatsError> + Sync,
) -> Result<Vec<T>, StatsError> {
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut RngHandle::with_replica(seed, i as u64)))
        .collect()
}

fn oracle_identity(n_max: usize) -> Result<Vec<StatReport>, StatsError> {
    let census = if n_max <= 4 { small_census().clone() } else { oracle_enumerate(n_max)? };
    let table = DefectTable::from_census(&census);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for n in 1..=n_max {
        for s in 1..=n + 1 {
            for g in 0..=s / 2 {
                let f = s - 2 * g;
                if f == 0 {
                    continue;
                }
                checked += 1;
                let got = total_count(n, f, g, &table)?;
                let want = BigUint::from(census.count(n, f, g));
                if got.exact() != Some(&want) {
                    mismatches.push(format!("(n={n}, f={f}, g={g}): {got} vs {want}"));
                }
            }
        }
    }
    let mut r = StatReport::new("oracle_identity", "oracle census", checked)
        .statistic("mismatches", mismatches.len() as f64)
        .judge("exact equality for every (n, f, g)", mismatches.is_empty());
    for m in mismatches {
        r = r.warn(m);
    }
    Ok(vec![r])
}

fn closed_forms() -> Result<Vec<StatReport>, StatsError> {
    let census = small_census();
    let planar = t0_planar_count(3)?;
    let listed = census.kernels(3, 0, 0).len();
    let uni = t0_unicellular_count(1)?;
    let listed_uni = census.kernels(1, 1, 0).len();
    let ok = planar == BigUint::from(listed) && planar == BigUint::from(4u32) && uni == BigUint::from(listed_uni);
    Ok(vec![StatReport::new("closed_forms", "oracle trivalent census", 2)
        .statistic("t0_planar(3)", ln_big(&planar).exp().round())
        .detail("oracle_planar", listed as f64)
        .detail("t0_unicellular(1)", ln_big(&uni).exp().round())
        .detail("oracle_unicellular", listed_uni as f64)
        .judge("exact equality", ok)])
}

/// `#T_0(1,1) = 1` from the closed form and `#T_1(1,1) = 1` from the oracle.
pub fn torus_table() -> DefectTable {
    let mut t = DefectTable::closed_forms(3);
    let one = DefectEntry { value: TableValue::Exact(BigUint::from(1u32)), provenance: Provenance::Oracle };
    t.insert(1, 1, 1, one).expect("valid entry");
    t
}

fn exact_law() -> Result<Vec<StatReport>, StatsError> {
    let census = small_census();
    let table = torus_table();
    let mut bad = Vec::new();
    for n in 2..=4 {
        let got = total_count(n, 1, 1, &table)?;
        let want = BigUint::from(census.count(n, 1, 1));
        if got.exact() != Some(&want) {
            bad.push(format!("n={n}: {got} vs {want}"));
        }
    }
    let m3 = total_count(3, 1, 1, &table)?;
    let ok = bad.is_empty() && m3.exact() == Some(&BigUint::from(10u32));
    let mut r = StatReport::new("exact_law", "oracle counts of genus-1 one-face maps", 3)
        .statistic("count(n=3)", m3.ln().exp().round())
        .detail("count(n=2)", total_count(2, 1, 1, &table)?.ln().exp().round())
        .judge("1 and 10, equal to the oracle", ok);
    for b in bad {
        r = r.warn(b);
    }
    Ok(vec![r])
}

fn uniformity(n: usize, g: usize, samples: usize, seed: u64) -> Result<Vec<StatReport>, StatsError> {
    require(samples, 1000)?;
    let census = small_census();
    let table = torus_table();
    let kernels = CensusKernels::new(census.clone());
    let pipeline = Pipeline::new(n, 1, g, Mode::Exact, &table, &kernels)?;
    let chunks = 100;
    let per = samples / chunks;
    let draw = |rejection: bool| -> Result<Vec<(Vec<u8>, usize)>, StatsError> {
        let parts = replicas(chunks, seed.wrapping_add(rejection as u64), |rng| {
            (0..per)
                .map(|_| {
                    let m = if rejection { sample_map_rejection(n, 1, g, rng)? } else { pipeline.draw_map(rng)? };
                    let d = decompose(&m).map_err(|e| StatsError::Domain(e.to_string()))?.defect();
                    Ok((m.canonical_code().0, d))
                })
                .collect::<Result<Vec<_>, StatsError>>()
        })?;
        Ok(parts.into_iter().flatten().collect())
    };
    let a = draw(false)?;
    let b = draw(true)?;
    let mut classes: BTreeMap<&[u8], (u64, u64)> = BTreeMap::new();
    for (code, _) in &a {
        classes.entry(code).or_default().0 += 1;
    }
    for (code, _) in &b {
        classes.entry(code).or_default().1 += 1;
    }
    let xa: Vec<u64> = classes.values().map(|v| v.0).collect();
    let xb: Vec<u64> = classes.values().map(|v| v.1).collect();
    let (stat, df, p) = two_sample_chi_square(&xa, &xb);
    let expected = census.count(n, 1, g) as usize;
    let uniform = StatReport::new("uniformity", "rejection sampler", a.len())
        .statistic("chi_square", stat)
        .p_value(p)
        .detail("df", df as f64)
        .detail("classes", classes.len() as f64)
        .detail("oracle_classes", expected as f64)
        .judge("p > 0.001 over all oracle classes", p > 0.001 && classes.len() == expected);
    // Defect law from the oracle: P(d) = #T_d·Φ_n(3s−6−d)/#maps.
    let s = 1 + 2 * g;
    let total = census.count(n, 1, g) as f64;
    let probs: Vec<f64> = (0..=2 * s - 5)
        .map(|d| {
            let t = census.kernels(1, g, d).len() as f64;
            let phi = kernel_edges(s, d).filter(|&k| k >= 1 && k <= n).map_or(0.0, |k| ln_big(&phi_sum_exact(n, k)).exp());
            t * phi / total
        })
        .collect();
    let defects: Vec<usize> = a.iter().map(|x| x.1).collect();
    let law = defect_law_gof(&defects, &probs)?.detail("p_zero_expected", probs[0]);
    Ok(vec![uniform, law])
}

fn phi_ratio(n: usize, k: usize) -> Result<Vec<StatReport>, StatsError> {
    let ratio = (k as f64 / n as f64).sqrt() * (phi_sum(n, k + 1).ln() - phi_sum(n, k).ln()).exp();
    Ok(vec![StatReport::new("phi_ratio", "limit 1/sqrt 2", 1)
        .statistic("sqrt(k/n) Phi(k+1)/Phi(k)", ratio)
        .detail("n", n as f64)
        .detail("k", k as f64)
        .judge("in [0.69, 0.725]", (0.69..=0.725).contains(&ratio))])
}

fn icbrt(n: usize) -> usize {
    let mut r = (n as f64).cbrt().round() as usize;
    while r * r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn phi_asymptotics(n_max: usize) -> Result<Vec<StatReport>, StatsError> {
    let ns: Vec<usize> = [n_max / 100, n_max / 10, n_max].into_iter().filter(|&n| n > 0).collect();
    let mut errs = Vec::new();
    let mut r = StatReport::new("phi_asymptotics", "displayed equivalent of Phi_n(k)", ns.len());
    for &n in &ns {
        // floor(3 n^(1/3)) without rounding error.
        let k = icbrt(27 * n);
        let exact = phi_sum(n, k).ln();
        let err = (exact - asymptotic_phi_sum(n, k)).abs();
        r = r.detail(&format!("err(n={n})", ), err).detail(
            &format!("err_corrected(n={n})"),
            (exact - asymptotic_phi_sum_corrected(n, k)).abs(),
        );
        errs.push(err);
    }
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let last = *errs.last().unwrap();
    Ok(vec![r
        .statistic("|log ratio| at largest n", last)
        .judge("decreasing and < 0.1 at the largest n", decreasing && last < 0.1)])
}

fn core_draws(
    n: usize,
    g: usize,
    samples: usize,
    seed: u64,
    budget: usize,
    with_kernel: bool,
) -> Result<Vec<crate::sample::CoreDraw>, StatsError> {
    let table = cached_mc_table(g, n, seed, budget)?;
    let pipeline = Pipeline::new(n, 1, g, Mode::Approximate, &table, &UnicellularKernels)?;
    replicas(samples, seed, |rng| Ok(pipeline.draw_core(with_kernel, rng)?))
}

fn core_size(n: usize, g: usize, samples: usize, seed: u64, budget: usize) -> Result<Vec<StatReport>, StatsError> {
    let draws = core_draws(n, g, samples, seed, budget, false)?;
    let s = 1 + 2 * g;
    let sizes: Vec<usize> = draws.iter().map(|d| d.core_edges).collect();
    let defects: Vec<usize> = draws.iter().map(|d| d.defect.unwrap_or(0)).collect();
    let mut out = vec![core_size_check(&sizes, n, s, 0.025)?.warn("defect weights from Monte Carlo table")];
    if samples >= 200 {
        out.push(defect_gof(&defects, n, s, Model::Unicellular)?);
    }
    Ok(out)
}

fn core_clt(n: usize, k: usize, samples: usize, seed: u64) -> Result<Vec<StatReport>, StatsError> {
    let sampler = CoreSizeSampler::new(n, k)?;
    let sizes = replicas(samples, seed, |rng| Ok(sampler.sample(rng)))?;
    Ok(vec![core_size_clt(&sizes, n, k)?])
}

fn chain_lengths(n: usize, g: usize, samples: usize, seed: u64, budget: usize) -> Result<Vec<StatReport>, StatsError> {
    // One non-root chain per map keeps the sample independent.
    let draws = core_draws(n, g, samples, seed, budget, false)?;
    let scale = ((1 + 2 * g) as f64 / n as f64).sqrt();
    let xs: Vec<f64> = draws.iter().map(|d| scale * d.chains.lengths[1] as f64).collect();
    Ok(vec![chain_length_test(&xs, 0.02)?])
}

fn root_tree(n: usize, g: usize, samples: usize, seed: u64, budget: usize) -> Result<Vec<StatReport>, StatsError> {
    let draws = core_draws(n, g, samples, seed, budget, false)?;
    let trees = replicas(samples, seed ^ 0x5eed, |rng| {
        let c = draws[rng.replica() as usize].core_edges;
        let (a, r) = sample_first_tree(n, c, rng)?;
        Ok((a, r, c))
    })?;
    Ok(root_tree_test(&trees, n, 0.03, 0.02)?.to_vec())
}

fn contour_drift(n: usize, g: usize, samples: usize, seed: u64, budget: usize) -> Result<Vec<StatReport>, StatsError> {
    let draws = core_draws(n, g, samples, seed, budget, false)?;
    let paths = replicas(samples, seed ^ 0x5eed, |rng| {
        let c = draws[rng.replica() as usize].core_edges;
        Ok((sample_forest_code(n, c, rng)?, c))
    })?;
    Ok(contour_drift_test(&paths, n, 1.0)?.to_vec())
}

/// `P(connected and one face)` for `v` tripods:
/// `3^{v−1}(v−1)!·#T_0(1,g)` over `(3v−1)!!` pairings.
pub fn config_model_probability(v: usize) -> Result<f64, StatsError> {
    if v < 2 || v % 2 != 0 || (v + 2) % 4 != 0 {
        return Err(StatsError::Domain(format!("one-face trivalent maps need v = 4g - 2, got {v}")));
    }
    let g = (v + 2) / 4;
    let good = BigUint::from(3u32).pow(v as u32 - 1) * factorial(v as u64 - 1) * t0_unicellular_count(g)?;
    let pairings = double_factorial(3 * v as i64 - 1);
    Ok((ln_big(&good) - ln_big(&pairings)).exp())
}

fn config_model(v: usize, samples: usize, seed: u64) -> Result<Vec<StatReport>, StatsError> {
    let p = config_model_probability(v)?;
    let chunks = 100;
    let per = samples / chunks;
    let hits: Vec<usize> = replicas(chunks, seed, |rng| {
        let mut h = 0;
        for _ in 0..per {
            let t = sample_config_tripods(v, rng)?;
            if t.connected && t.face_count() == 1 {
                h += 1;
            }
        }
        Ok(h)
    })?;
    let total = per * chunks;
    let phat = hits.iter().sum::<usize>() as f64 / total as f64;
    let se = (p * (1.0 - p) / total as f64).sqrt();
    let z = (phat - p) / se;
    Ok(vec![StatReport::new("config_model", "exact connectivity probability", total)
        .statistic("empirical", phat)
        .detail("exact", p)
        .detail("z", z)
        .judge("|z| <= 3", z.abs() <= 3.0)])
}

fn round_trip(samples: usize, seed: u64, budget: usize) -> Result<Vec<StatReport>, StatsError> {
    let census = small_census();
    let mut small = DefectTable::from_census(census);
    small.merge(&torus_table())?;
    let kernels = DefaultKernels::with_census(census.clone());
    let mc = cached_mc_table(2, 500, seed, budget.min(500))?;
    // Plane trees have no core and are left out.
    let mut regimes: Vec<(usize, usize, usize, Mode, &DefectTable)> =
        vec![(60, 2, 0, Mode::Exact, &small), (500, 1, 2, Mode::Approximate, &mc)];
    for n in 1..=4 {
        for (f, g) in [(2, 0), (3, 0), (1, 1), (4, 0), (2, 1)] {
            if f + 2 * g <= n + 1 {
                regimes.push((n, f, g, Mode::Exact, &small));
            }
        }
    }
    // Exact tables cover every defect of (3,0) and (1,1) at any size.
    regimes.extend([(200, 3, 0, Mode::Exact, &small), (200, 1, 1, Mode::Exact, &small), (20_000, 1, 1, Mode::Exact, &small)]);
    let pipelines: Vec<Pipeline> = regimes
        .iter()
        .map(|&(n, f, g, mode, table)| Pipeline::new(n, f, g, mode, table, &kernels))
        .collect::<Result<_, _>>()?;
    let per = samples.div_ceil(pipelines.len());
    let failures: Vec<String> = replicas(pipelines.len() * per, seed, |rng| {
        let i = rng.replica() as usize / per;
        let n = regimes[i].0;
        let m: RootedMap = pipelines[i].draw_map(rng)?;
        let back = decompose(&m).and_then(|d| recompose(&d, n));
        Ok(match back {
            Ok(b) if b.canonical_code() == m.canonical_code() => None,
            Ok(_) => Some(format!("(n={n}, f={}, g={}): code mismatch", regimes[i].1, regimes[i].2)),
            Err(e) => Some(format!("(n={n}, f={}, g={}): {e}", regimes[i].1, regimes[i].2)),
        })
    })?
    .into_iter()
    .flatten()
    .collect();
    let total = pipelines.len() * per;
    let mut r = StatReport::new("round_trip", "identity on canonical codes", total)
        .statistic("failures", failures.len() as f64)
        .detail("regimes", regimes.len() as f64)
        .judge("100% pass", failures.is_empty());
    for f in failures.into_iter().take(5) {
        r = r.warn(f);
    }
    Ok(vec![r])
}

fn short_cycles(n: usize, g: usize, samples: usize, seed: u64, budget: usize) -> Result<Vec<StatReport>, StatsError> {
    let draws = core_draws(n, g, samples, seed, budget, true)?;
    let cores: Vec<(RootedMap, Vec<usize>)> = draws
        .iter()
        .filter_map(|d| d.kernel.as_ref().and_then(|k| kernel_with_lengths(k, &d.chains.lengths)))
        .collect();
    let kernels: Vec<RootedMap> = cores.iter().map(|c| c.0.clone()).collect();
    Ok(vec![
        short_cycle_test(&cores, n, g, 1.0, 0.2)?,
        loop_density_check(&kernels, Model::Unicellular, 0.05)?.exploratory(),
        tree_like_ball_check(&kernels, 2, 0.9)?.exploratory(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(Suite::ShortCycles.criterion(), 14);
        assert!("nope".parse::<Suite>().is_err());
    }

    fn all_pairings(legs: Vec<u32>, alpha: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some((&a, rest)) = legs.split_first() else {
            out.push(alpha.clone());
            return;
        };
        for i in 0..rest.len() {
            let b = rest[i];
            alpha[a as usize] = b;
            alpha[b as usize] = a;
            let left: Vec<u32> = rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            all_pairings(left, alpha, out);
        }
    }

    #[test]
    fn connectivity_probability_matches_enumeration() {
        for v in [2usize, 6] {
            let m = 3 * v as u32;
            let sigma: Vec<u32> = (0..m).map(|d| if d % 3 == 2 { d - 2 } else { d + 1 }).collect();
            let mut pairings = Vec::new();
            all_pairings((0..m).collect(), &mut vec![0; m as usize], &mut pairings);
            let good = pairings
                .iter()
                .filter(|a| {
                    crate::map::reachable_darts(a, &sigma, 0) == m as usize && crate::map::face_count_of(a, &sigma) == 1
                })
                .count();
            let p = config_model_probability(v).unwrap();
            assert!((p - good as f64 / pairings.len() as f64).abs() < 1e-12, "v={v}");
        }
    }

    #[test]
    fn integer_cube_root() {
        assert_eq!(icbrt(1_000_000), 100);
        assert_eq!(icbrt(999_999), 99);
        assert_eq!(icbrt(10_000), 21);
        assert_eq!(icbrt(27 * 10_000), 64);
        assert_eq!(icbrt(27 * 100_000), 139);
    }

    #[test]
    fn cheap_suites_pass() {
        for s in [Suite::ClosedForms, Suite::ExactLaw] {
            let r = run_suite(s, &SuiteParams::new(1)).unwrap();
            assert!(r.iter().all(|x| x.passed()), "{s:?}: {r:?}");
        }
    }
}
