//! Uniform sampling of rooted maps with given edges, faces and genus.
//!
//! A non-tree map is drawn in three steps: a defect `d` with weight
//! `#T_d(f,g)·Φ_n(3s−6−d)` and a uniform kernel with that defect; a core size
//! `c` with weight `φ_n(c,k)` and uniform chain lengths; a uniform marked
//! forest code. [`recompose`] assembles the map.

mod kernel;

pub use kernel::{
    sample_config_tripods, sample_kernel_with_defect, sample_trivalent_unicellular,
    sample_trivalent_unicellular_counted, CensusKernels, DefaultKernels, KernelSampler, TripodPairing,
    UnicellularKernels,
};

use num_bigint::{BigUint, RandBigInt};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::{plane_tree, recompose, Chains, DecomposeError, Decomposition, Kernel};
use crate::enumerate::{
    kernel_edges, ln_phi, phi_terms_exact, phi_window, DefectTable, EnumError, TableValue, EXACT_LIMIT,
};
use crate::forest::{ForestCode, StepPath};
use crate::map::{canonical_alpha, face_count_of, reachable_darts, cycle_count, Dart, RootedMap};
use crate::numeric::{binomial, ln_binomial};
use crate::rng::RngHandle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("3v must be even, got v = {v}")]
    Parity { v: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    #[error("rejection budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exactly uniform: exact defect counts and an exact kernel sampler.
    Exact,
    /// Unicellular only; defect weights may be Monte Carlo estimates.
    Approximate,
}

/// Inverse-CDF sampling from fixed nonnegative weights.
#[derive(Clone, Debug)]
pub enum Categorical {
    Exact(Vec<BigUint>),
    Float(Vec<f64>),
}

impl Categorical {
    pub fn from_exact(weights: &[BigUint]) -> Result<Self, SampleError> {
        let mut prefix = Vec::with_capacity(weights.len());
        let mut acc = BigUint::default();
        for w in weights {
            acc += w;
            prefix.push(acc.clone());
        }
        if acc == BigUint::default() {
            return Err(SampleError::Domain("all weights are zero".into()));
        }
        Ok(Categorical::Exact(prefix))
    }

    /// Weights given by their logarithms.
    pub fn from_logs(logs: &[f64]) -> Result<Self, SampleError> {
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(SampleError::Domain("all weights are zero".into()));
        }
        let mut acc = 0.0;
        let cdf = logs
            .iter()
            .map(|l| {
                acc += (l - max).exp();
                acc
            })
            .collect();
        Ok(Categorical::Float(cdf))
    }

    pub fn len(&self) -> usize {
        match self {
            Categorical::Exact(p) => p.len(),
            Categorical::Float(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Probability of outcome `i`.
    pub fn probability(&self, i: usize) -> f64 {
        match self {
            Categorical::Exact(p) => {
                let total = crate::numeric::ln_big(p.last().unwrap());
                let lo = if i == 0 { BigUint::default() } else { p[i - 1].clone() };
                let w = &p[i] - lo;
                (crate::numeric::ln_big(&w) - total).exp()
            }
            Categorical::Float(p) => {
                let lo = if i == 0 { 0.0 } else { p[i - 1] };
                (p[i] - lo) / p.last().unwrap()
            }
        }
    }

    pub fn sample(&self, rng: &mut RngHandle) -> usize {
        match self {
            Categorical::Exact(p) => {
                let x = rng.gen_biguint_below(p.last().unwrap());
                p.partition_point(|q| q <= &x)
            }
            Categorical::Float(p) => {
                let x = rng.gen::<f64>() * p.last().unwrap();
                p.partition_point(|&q| q <= x).min(p.len() - 1)
            }
        }
    }
}

/// Draws `c` with probability `φ_n(c,k)/Φ_n(k)`.
#[derive(Clone, Debug)]
pub struct CoreSizeSampler {
    first: usize,
    dist: Categorical,
}

impl CoreSizeSampler {
    pub fn new(n: usize, k: usize) -> Result<Self, SampleError> {
        if k == 0 || k > n {
            return Err(SampleError::Domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        if n < EXACT_LIMIT {
            Ok(CoreSizeSampler { first: k, dist: Categorical::from_exact(&phi_terms_exact(n, k))? })
        } else {
            let (lo, hi) = phi_window(n, k);
            let logs: Vec<f64> = (lo..=hi).map(|c| ln_phi(n, c, k)).collect();
            Ok(CoreSizeSampler { first: lo, dist: Categorical::from_logs(&logs)? })
        }
    }

    /// Core sizes `c = 1..=n` of maps whose core is a cycle: weight `binom(2n, n+c)`.
    pub fn cycle(n: usize) -> Result<Self, SampleError> {
        if n == 0 {
            return Err(SampleError::Domain("n must be positive".into()));
        }
        let nn = n as u64;
        if n < EXACT_LIMIT {
            let w: Vec<BigUint> = (1..=nn).map(|c| binomial(2 * nn, nn + c)).collect();
            Ok(CoreSizeSampler { first: 1, dist: Categorical::from_exact(&w)? })
        } else {
            let nf = n as f64;
            let hi = ((12.0 * (nf * nf.ln()).sqrt()).ceil() as usize).min(n);
            let logs: Vec<f64> = (1..=hi as u64).map(|c| ln_binomial(2 * nn, nn + c)).collect();
            Ok(CoreSizeSampler { first: 1, dist: Categorical::from_logs(&logs)? })
        }
    }

    pub fn sample(&self, rng: &mut RngHandle) -> usize {
        self.first + self.dist.sample(rng)
    }

    pub fn probability(&self, c: usize) -> f64 {
        if c < self.first || c >= self.first + self.dist.len() {
            return 0.0;
        }
        self.dist.probability(c - self.first)
    }
}

pub fn sample_core_size(n: usize, k: usize, rng: &mut RngHandle) -> Result<usize, SampleError> {
    Ok(CoreSizeSampler::new(n, k)?.sample(rng))
}

/// Uniform composition `(N_0, …, N_k)` of `c + 1` into positive parts.
pub fn sample_chain_lengths(c: usize, k: usize, rng: &mut RngHandle) -> Result<Vec<usize>, SampleError> {
    if k == 0 || k > c {
        return Err(SampleError::Domain(format!("need 1 <= k <= c, got k={k}, c={c}")));
    }
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, c, k).into_iter().map(|i| i + 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k + 1);
    let mut prev = 0;
    for &x in &cuts {
        parts.push(x - prev);
        prev = x;
    }
    parts.push(c + 1 - prev);
    Ok(parts)
}

/// Chain lengths per kernel edge from a composition: the root chain has `N_0 + N_1 − 1` edges.
pub fn chains_from_composition(parts: &[usize]) -> Chains {
    let mut lengths = Vec::with_capacity(parts.len() - 1);
    lengths.push(parts[0] + parts[1] - 1);
    lengths.extend_from_slice(&parts[2..]);
    Chains { lengths, root_split: parts[0] }
}

/// Uniform ±1 path of length `len` with exactly `downs` down-steps.
pub fn sample_bridge(len: usize, downs: usize, rng: &mut RngHandle) -> StepPath {
    let mut path = StepPath::with_capacity(len);
    let mut left_down = downs as u64;
    for i in 0..len {
        let remaining = (len - i) as u64;
        let down = rng.gen_range(0..remaining) < left_down;
        if down {
            left_down -= 1;
        }
        path.push(!down);
    }
    path
}

/// Uniform marked forest code with `2c` trees and `n − c` edges.
pub fn sample_forest_code(n: usize, c: usize, rng: &mut RngHandle) -> Result<ForestCode, SampleError> {
    if c == 0 || c > n {
        return Err(SampleError::Domain(format!("need 1 <= c <= n, got c={c}, n={n}")));
    }
    let bridge = sample_bridge(2 * n, n + c, rng);
    Ok(ForestCode::from_bridge(&bridge).expect("bridge ends at -2c"))
}

/// `ln` of the number of forests of `t` plane trees with `m` edges in total.
fn ln_forests(t: usize, m: usize) -> f64 {
    if t == 0 {
        return if m == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let (t, m) = (t as u64, m as u64);
    (t as f64).ln() - ((2 * m + t) as f64).ln() + ln_binomial(2 * m + t, m)
}

/// First tree `(A, R)` of a uniform marked forest code, as in
/// [`sample_forest_code`], without building the path: `A = 2j + 1` has weight
/// `A·Cat(j)·#forests(2c − 1, n − c − j)` out of `binom(2n, n − c)` bridges,
/// and `R` is uniform in `0..A`.
pub fn sample_first_tree(n: usize, c: usize, rng: &mut RngHandle) -> Result<(usize, usize), SampleError> {
    if c == 0 || c > n {
        return Err(SampleError::Domain(format!("need 1 <= c <= n, got c={c}, n={n}")));
    }
    let (trees, edges) = (2 * c, n - c);
    let ln_total = ln_binomial(2 * n as u64, edges as u64);
    let weight = |j: usize| {
        let jj = j as u64;
        let ln_cat = ln_binomial(2 * jj, jj) - ((jj + 1) as f64).ln();
        ((2 * jj + 1) as f64).ln() + ln_cat + ln_forests(trees - 1, edges - j) - ln_total
    };
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut j = 0;
    while j < edges {
        acc += weight(j).exp();
        if acc > u {
            break;
        }
        j += 1;
    }
    let a = 2 * j + 1;
    Ok((a, rng.gen_range(0..a)))
}

/// Uniform Dyck path of length `2n`.
pub fn sample_dyck_path(n: usize, rng: &mut RngHandle) -> StepPath {
    let bridge = sample_bridge(2 * n + 1, n + 1, rng);
    let rotated = bridge.rotated(bridge.first_argmin() % bridge.len());
    (0..2 * n).map(|i| rotated.is_up(i)).collect()
}

/// Defect distribution for `(n, f, g)`: support and categorical law.
#[derive(Clone, Debug)]
pub struct DefectLaw {
    pub defects: Vec<usize>,
    pub dist: Categorical,
    /// True when Monte Carlo table entries were used.
    pub approximate: bool,
}

impl DefectLaw {
    pub fn new(n: usize, f: usize, g: usize, table: &DefectTable, mode: Mode) -> Result<Self, SampleError> {
        let s = f + 2 * g;
        if s < 3 {
            return Err(SampleError::Domain("defects need s >= 3".into()));
        }
        match mode {
            Mode::Exact => {
                let entries = table.required_exact(n, f, g)?;
                if n < EXACT_LIMIT {
                    let (defects, weights): (Vec<usize>, Vec<BigUint>) = entries
                        .iter()
                        .map(|&(d, t)| (d, t * crate::enumerate::phi_sum_exact(n, kernel_edges(s, d).unwrap())))
                        .unzip();
                    Ok(DefectLaw { defects, dist: Categorical::from_exact(&weights)?, approximate: false })
                } else {
                    let (defects, logs): (Vec<usize>, Vec<f64>) = entries
                        .iter()
                        .map(|&(d, t)| {
                            let k = kernel_edges(s, d).unwrap();
                            (d, crate::numeric::ln_big(t) + crate::enumerate::phi_sum(n, k).ln())
                        })
                        .unzip();
                    Ok(DefectLaw { defects, dist: Categorical::from_logs(&logs)?, approximate: false })
                }
            }
            Mode::Approximate => {
                if f != 1 {
                    return Err(SampleError::Unsupported("approximate mode is unicellular only".into()));
                }
                // Contiguous run of entries from d = 0; higher defects are truncated.
                let mut defects = Vec::new();
                let mut logs = Vec::new();
                let mut approximate = false;
                for d in crate::enumerate::DefectTable::relevant_defects(n, f, g) {
                    let Some(e) = table.get(f, g, d) else { break };
                    approximate |= matches!(e.value, TableValue::Estimate { .. });
                    let k = kernel_edges(s, d).unwrap();
                    defects.push(d);
                    logs.push(e.value.ln_with_err().0 + crate::enumerate::phi_sum(n, k).ln());
                }
                if defects.is_empty() {
                    return Err(EnumError::IncompleteTable { f, g, missing: vec![0] }.into());
                }
                Ok(DefectLaw { defects, dist: Categorical::from_logs(&logs)?, approximate })
            }
        }
    }

    pub fn sample(&self, rng: &mut RngHandle) -> usize {
        self.defects[self.dist.sample(rng)]
    }

    pub fn probability(&self, d: usize) -> f64 {
        self.defects.iter().position(|&x| x == d).map_or(0.0, |i| self.dist.probability(i))
    }
}

pub fn sample_defect(
    n: usize,
    f: usize,
    g: usize,
    table: &DefectTable,
    mode: Mode,
    rng: &mut RngHandle,
) -> Result<usize, SampleError> {
    Ok(DefectLaw::new(n, f, g, table, mode)?.sample(rng))
}

/// One pipeline draw before assembly.
#[derive(Clone, Debug)]
pub struct Draw {
    /// `None` for trees and cycle cores.
    pub defect: Option<usize>,
    pub kernel_edges: usize,
    pub core_edges: usize,
    pub body: DrawBody,
}

#[derive(Clone, Debug)]
pub enum DrawBody {
    Tree(StepPath),
    Decomposition(Decomposition),
}

impl Draw {
    pub fn decomposition(&self) -> Option<&Decomposition> {
        match &self.body {
            DrawBody::Decomposition(d) => Some(d),
            DrawBody::Tree(_) => None,
        }
    }

    pub fn into_map(self, n: usize) -> Result<RootedMap, SampleError> {
        match self.body {
            DrawBody::Tree(path) => Ok(plane_tree(&path)?),
            DrawBody::Decomposition(dec) => Ok(recompose(&dec, n)?),
        }
    }
}

/// The core part of a pipeline draw.
#[derive(Clone, Debug)]
pub struct CoreDraw {
    pub defect: Option<usize>,
    pub kernel: Option<Kernel>,
    pub kernel_edges: usize,
    pub core_edges: usize,
    pub chains: Chains,
}

enum Plan {
    Tree,
    Cycle(CoreSizeSampler),
    General { law: DefectLaw, cores: Vec<CoreSizeSampler> },
}

/// Precomputed sampler for maps with `n` edges, `f` faces and genus `g`.
pub struct Pipeline<'a> {
    n: usize,
    f: usize,
    g: usize,
    mode: Mode,
    plan: Plan,
    kernels: &'a dyn KernelSampler,
}

impl<'a> Pipeline<'a> {
    pub fn new(
        n: usize,
        f: usize,
        g: usize,
        mode: Mode,
        table: &DefectTable,
        kernels: &'a dyn KernelSampler,
    ) -> Result<Self, SampleError> {
        if n == 0 || f == 0 {
            return Err(SampleError::Domain("need n >= 1 and f >= 1".into()));
        }
        let s = f + 2 * g;
        if s > n + 1 {
            return Err(SampleError::Domain(format!("no map has n={n} edges and s={s}")));
        }
        let plan = match s {
            1 => Plan::Tree,
            2 => Plan::Cycle(CoreSizeSampler::cycle(n)?),
            _ => {
                let law = DefectLaw::new(n, f, g, table, mode)?;
                let mut cores = Vec::with_capacity(law.defects.len());
                for &d in &law.defects {
                    if !kernels.supports(f, g, d) && law.probability(d) > 0.0 {
                        return Err(SampleError::Unsupported(format!(
                            "no kernel sampler for (f={f}, g={g}, d={d})"
                        )));
                    }
                    cores.push(CoreSizeSampler::new(n, kernel_edges(s, d).unwrap())?);
                }
                Plan::General { law, cores }
            }
        };
        Ok(Pipeline { n, f, g, mode, plan, kernels })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn defect_law(&self) -> Option<&DefectLaw> {
        match &self.plan {
            Plan::General { law, .. } => Some(law),
            _ => None,
        }
    }

    /// Defect, kernel (optional), core size and chains, without the forest.
    pub fn draw_core(&self, with_kernel: bool, rng: &mut RngHandle) -> Result<CoreDraw, SampleError> {
        match &self.plan {
            Plan::Tree => Err(SampleError::Domain("trees have an empty core".into())),
            Plan::Cycle(sizes) => {
                let c = sizes.sample(rng);
                Ok(CoreDraw {
                    defect: None,
                    kernel: with_kernel.then_some(Kernel::Cycle),
                    kernel_edges: 0,
                    core_edges: c,
                    chains: Chains { lengths: vec![c], root_split: 1 },
                })
            }
            Plan::General { law, cores } => {
                let i = law.dist.sample(rng);
                let d = law.defects[i];
                let k = kernel_edges(self.f + 2 * self.g, d).unwrap();
                let kernel = if with_kernel {
                    let kernel = self.kernels.sample(self.f, self.g, d, rng)?;
                    debug_assert_eq!(kernel.edge_count(), k);
                    Some(Kernel::Proper(kernel))
                } else {
                    None
                };
                let c = cores[i].sample(rng);
                let chains = chains_from_composition(&sample_chain_lengths(c, k, rng)?);
                Ok(CoreDraw { defect: Some(d), kernel, kernel_edges: k, core_edges: c, chains })
            }
        }
    }

    pub fn draw(&self, rng: &mut RngHandle) -> Result<Draw, SampleError> {
        let n = self.n;
        if let Plan::Tree = self.plan {
            return Ok(Draw {
                defect: None,
                kernel_edges: 0,
                core_edges: 0,
                body: DrawBody::Tree(sample_dyck_path(n, rng)),
            });
        }
        let core = self.draw_core(true, rng)?;
        let forest = sample_forest_code(n, core.core_edges, rng)?;
        let dec = Decomposition { kernel: core.kernel.unwrap(), chains: core.chains, forest };
        Ok(Draw {
            defect: core.defect,
            kernel_edges: core.kernel_edges,
            core_edges: core.core_edges,
            body: DrawBody::Decomposition(dec),
        })
    }

    pub fn draw_map(&self, rng: &mut RngHandle) -> Result<RootedMap, SampleError> {
        let map = self.draw(rng)?.into_map(self.n)?;
        debug_assert!({
            let sig = map.euler_signature().unwrap();
            (sig.edges, sig.faces, sig.genus) == (self.n, self.f, self.g)
        });
        Ok(map)
    }
}

/// Uniform rooted map with `n` edges, `f` faces and genus `g`.
pub fn sample_map(
    n: usize,
    f: usize,
    g: usize,
    mode: Mode,
    table: &DefectTable,
    kernels: &dyn KernelSampler,
    rng: &mut RngHandle,
) -> Result<RootedMap, SampleError> {
    Pipeline::new(n, f, g, mode, table, kernels)?.draw_map(rng)
}

/// Maximum number of rotations tried by [`sample_map_rejection`].
pub const REJECTION_BUDGET: u64 = 100_000_000;

/// Ground truth: uniform rotation with the pairing fixed, accepted when it is
/// connected with the requested face count and genus.
pub fn sample_map_rejection(n: usize, f: usize, g: usize, rng: &mut RngHandle) -> Result<RootedMap, SampleError> {
    if n == 0 || n > 8 {
        return Err(SampleError::BudgetExceeded(format!("rejection sampling needs 1 <= n <= 8, got {n}")));
    }
    let m = 2 * n;
    let alpha = canonical_alpha(m);
    let mut sigma: Vec<Dart> = (0..m as Dart).collect();
    for _ in 0..REJECTION_BUDGET {
        sigma.shuffle(rng);
        if reachable_darts(&alpha, &sigma, 0) != m || face_count_of(&alpha, &sigma) != f {
            continue;
        }
        let v = cycle_count(&sigma);
        if v + f + 2 * g == n + 2 {
            return Ok(RootedMap::new(alpha, sigma, 0)?.canonical_form());
        }
    }
    Err(SampleError::BudgetExceeded(format!("no acceptance in {REJECTION_BUDGET} draws")))
}

impl From<crate::map::MapError> for SampleError {
    fn from(e: crate::map::MapError) -> Self {
        SampleError::Decompose(DecomposeError::Map(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{DefectEntry, Provenance};
    use std::collections::HashMap;

    fn torus_table() -> DefectTable {
        let mut t = DefectTable::closed_forms(3);
        let one = DefectEntry { value: TableValue::Exact(BigUint::from(1u32)), provenance: Provenance::Oracle };
        t.insert(1, 1, 1, one).unwrap();
        t
    }

    #[test]
    fn exact_small_laws() {
        let sizes = CoreSizeSampler::new(3, 2).unwrap();
        assert!((sizes.probability(2) - 2.0 / 3.0).abs() < 1e-12);
        assert!((sizes.probability(3) - 1.0 / 3.0).abs() < 1e-12);
        let law = DefectLaw::new(3, 1, 1, &torus_table(), Mode::Exact).unwrap();
        assert!((law.probability(0) - 0.1).abs() < 1e-12);
        assert!((law.probability(1) - 0.9).abs() < 1e-12);
        let law = DefectLaw::new(2, 1, 1, &torus_table(), Mode::Exact).unwrap();
        assert_eq!(law.defects, vec![1]);
        let mut rng = RngHandle::new(3);
        assert_eq!(sample_defect(2, 1, 1, &torus_table(), Mode::Exact, &mut rng).unwrap(), 1);
    }

    #[test]
    fn compositions_are_uniform() {
        let mut rng = RngHandle::new(11);
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..30_000 {
            let parts = sample_chain_lengths(3, 2, &mut rng).unwrap();
            assert_eq!(parts.iter().sum::<usize>(), 4);
            *seen.entry(parts).or_default() += 1;
        }
        assert_eq!(seen.len(), 3);
        for &count in seen.values() {
            assert!((count as f64 - 10_000.0).abs() < 400.0, "{count}");
        }
        assert_eq!(sample_chain_lengths(4, 4, &mut rng).unwrap(), vec![1; 5]);
    }

    #[test]
    fn forest_codes_cover_marked_paths_uniformly() {
        // (n=2, c=1): first-passage paths to -2 of length 4 with marks.
        let mut rng = RngHandle::new(5);
        let mut seen: HashMap<(String, usize), usize> = HashMap::new();
        let draws = 40_000;
        for _ in 0..draws {
            let code = sample_forest_code(2, 1, &mut rng).unwrap();
            assert_eq!(code.tree_count(), 2);
            *seen.entry((code.to_step_string(), code.mark().index())).or_default() += 1;
        }
        // binom(4,3) = 4 bridges, so 4 marked codes.
        assert_eq!(seen.len(), 4);
        for &count in seen.values() {
            assert!((count as f64 - draws as f64 / 4.0).abs() < 500.0);
        }
        let all_down = sample_forest_code(3, 3, &mut rng).unwrap();
        assert_eq!(all_down.to_step_string(), "dddddd");
        assert_eq!(all_down.mark(), crate::forest::RootMark::KeepCoreRoot);
    }

    #[test]
    fn trees_are_uniform() {
        let mut rng = RngHandle::new(9);
        let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
        for _ in 0..14_000 {
            let t = plane_tree(&sample_dyck_path(4, &mut rng)).unwrap();
            let sig = t.euler_signature().unwrap();
            assert_eq!((sig.faces, sig.genus), (1, 0));
            *seen.entry(t.canonical_code().0).or_default() += 1;
        }
        assert_eq!(seen.len(), 14);
        assert!(seen.values().all(|&c| (c as f64 - 1000.0).abs() < 150.0));
    }

    #[test]
    fn tripods_and_unicellular_kernels() {
        let mut rng = RngHandle::new(1);
        assert!(matches!(sample_config_tripods(3, &mut rng), Err(SampleError::Parity { v: 3 })));
        let p = sample_config_tripods(4, &mut rng).unwrap();
        assert_eq!(p.alpha.len(), 12);
        let g1 = sample_trivalent_unicellular(1, &mut rng).unwrap();
        for _ in 0..20 {
            assert_eq!(sample_trivalent_unicellular(1, &mut rng).unwrap().canonical_code(), g1.canonical_code());
        }
        let k = sample_kernel_with_defect(1, 1, &mut rng).unwrap();
        assert_eq!(k.vertex_degrees(), vec![4]);
        assert_eq!(k.face_count(), 1);
    }

    #[test]
    fn pipeline_respects_signature() {
        let table = torus_table();
        let kernels = UnicellularKernels;
        let mut rng = RngHandle::new(2);
        for (n, f, g) in [(2, 1, 1), (3, 1, 1), (7, 1, 1), (4, 1, 0), (5, 2, 0)] {
            let p = Pipeline::new(n, f, g, Mode::Exact, &table, &kernels).unwrap();
            for _ in 0..50 {
                let m = p.draw_map(&mut rng).unwrap();
                let sig = m.euler_signature().unwrap();
                assert_eq!((sig.edges, sig.faces, sig.genus), (n, f, g));
            }
        }
        assert!(Pipeline::new(4, 3, 0, Mode::Exact, &table, &kernels).is_err());
    }

    #[test]
    fn rejection_sampler_hits_target() {
        let mut rng = RngHandle::new(4);
        let m = sample_map_rejection(1, 2, 0, &mut rng).unwrap();
        assert_eq!(m.canonical_code(), RootedMap::loop_map().canonical_code());
        assert!(sample_map_rejection(9, 1, 0, &mut rng).is_err());
    }

    #[test]
    fn first_tree_matches_bridge_enumeration() {
        // All bridges of length 2n with n + c down-steps, n = 5, c = 2.
        let (n, c) = (5, 2);
        let mut exact: HashMap<(usize, usize), f64> = HashMap::new();
        let mut total = 0.0;
        for bits in 0u32..1 << (2 * n) {
            if bits.count_ones() as usize != n - c {
                continue;
            }
            let path: StepPath = (0..2 * n).map(|i| bits >> i & 1 == 1).collect();
            let code = ForestCode::from_bridge(&path).unwrap();
            *exact.entry((code.first_tree_time(), code.mark().index())).or_default() += 1.0;
            total += 1.0;
        }
        let mut rng = RngHandle::new(9);
        let draws = 40_000;
        let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
        for _ in 0..draws {
            *seen.entry(sample_first_tree(n, c, &mut rng).unwrap()).or_default() += 1.0;
        }
        for (key, count) in &exact {
            let p = count / total;
            let q = seen.get(key).copied().unwrap_or(0.0) / draws as f64;
            assert!((p - q).abs() < 4.0 * (p / draws as f64).sqrt() + 1e-3, "{key:?}: {p} vs {q}");
        }
        assert!(seen.keys().all(|k| exact.contains_key(k)));
    }
}
