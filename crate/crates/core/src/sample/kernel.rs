//! Kernel samplers: the configuration model on tripods, contraction of
//! random edge tuples with Catalan-weighted rejection, and uniform picks
//! from oracle lists.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use super::SampleError;
use crate::decompose::{blowup_weight, contract};
use crate::enumerate::Census;
use crate::map::{face_count_of, reachable_darts, Dart, RootedMap};
use crate::rng::RngHandle;

/// One draw of the configuration model: `v` tripods with legs `3i, 3i+1, 3i+2`
/// in cyclic order, legs paired uniformly. Leg 0 is the root.
#[derive(Clone, Debug)]
pub struct TripodPairing {
    pub alpha: Vec<Dart>,
    pub sigma: Vec<Dart>,
    pub connected: bool,
}

impl TripodPairing {
    pub fn face_count(&self) -> usize {
        face_count_of(&self.alpha, &self.sigma)
    }

    pub fn loop_count(&self) -> usize {
        (0..self.alpha.len()).filter(|&d| d < self.alpha[d] as usize && d / 3 == self.alpha[d] as usize / 3).count()
    }

    /// The rooted map, canonically labelled, when the pairing is connected.
    pub fn to_map(&self) -> Option<RootedMap> {
        if !self.connected {
            return None;
        }
        let raw = RootedMap::new(self.alpha.clone(), self.sigma.clone(), 0).ok()?;
        Some(raw.canonical_form())
    }
}

pub fn sample_config_tripods(v: usize, rng: &mut RngHandle) -> Result<TripodPairing, SampleError> {
    if v == 0 || (3 * v) % 2 != 0 {
        return Err(SampleError::Parity { v });
    }
    let m = 3 * v;
    let sigma: Vec<Dart> = (0..m as Dart).map(|d| if d % 3 == 2 { d - 2 } else { d + 1 }).collect();
    let mut legs: Vec<Dart> = (0..m as Dart).collect();
    legs.shuffle(rng);
    let mut alpha = vec![0; m];
    for pair in legs.chunks_exact(2) {
        alpha[pair[0] as usize] = pair[1];
        alpha[pair[1] as usize] = pair[0];
    }
    let connected = reachable_darts(&alpha, &sigma, 0) == m;
    Ok(TripodPairing { alpha, sigma, connected })
}

/// Uniform rooted trivalent one-face map of genus `g`, and the number of pairings tried.
pub fn sample_trivalent_unicellular_counted(g: usize, rng: &mut RngHandle) -> Result<(RootedMap, u64), SampleError> {
    if g == 0 {
        return Err(SampleError::Domain("genus must be at least 1".into()));
    }
    let v = 4 * g - 2;
    let mut trials = 0;
    loop {
        trials += 1;
        let p = sample_config_tripods(v, rng)?;
        if p.connected && p.face_count() == 1 {
            return Ok((p.to_map().expect("connected"), trials));
        }
    }
}

pub fn sample_trivalent_unicellular(g: usize, rng: &mut RngHandle) -> Result<RootedMap, SampleError> {
    sample_trivalent_unicellular_counted(g, rng).map(|(m, _)| m)
}

/// Uniform element of `T_d(1, g)`.
///
/// Draws a uniform trivalent `t0` and `d` distinct non-root edges; if they
/// form a forest the contraction `K` is kept with probability `2^d / ∏ Cat(deg − 2)`.
/// Each `K` arises from `d!·∏ Cat(deg − 2)` pairs, so accepted draws are uniform.
/// The factor `2^d` is the smallest value of the product on `T_d` and keeps the
/// acceptance probability at most 1.
pub fn sample_kernel_with_defect(g: usize, d: usize, rng: &mut RngHandle) -> Result<RootedMap, SampleError> {
    let s = 1 + 2 * g;
    if d + 5 > 2 * s {
        return Err(SampleError::Domain(format!("defect {d} exceeds 2s-5 = {}", 2 * s - 5)));
    }
    if d == 0 {
        return sample_trivalent_unicellular(g, rng);
    }
    loop {
        let t0 = sample_trivalent_unicellular(g, rng)?;
        let edges = t0.edge_count();
        // Edge 0 carries the root in canonical form.
        let picks = rand::seq::index::sample(rng, edges - 1, d);
        let darts: Vec<Dart> = picks.iter().map(|i| 2 * (i as Dart + 1)).collect();
        let Ok(k) = contract(&t0, &darts) else { continue };
        let weight = blowup_weight(&k).expect("contraction keeps min degree 3");
        let accept = 2f64.powi(d as i32) / weight.to_f64().unwrap_or(f64::INFINITY);
        if rng.gen::<f64>() < accept {
            return Ok(k.canonical_form());
        }
    }
}

/// Uniform kernels in `T_d(f, g)`.
pub trait KernelSampler: Send + Sync {
    fn supports(&self, f: usize, g: usize, d: usize) -> bool;
    fn sample(&self, f: usize, g: usize, d: usize, rng: &mut RngHandle) -> Result<RootedMap, SampleError>;
}

/// One-face kernels of any genus through [`sample_kernel_with_defect`].
#[derive(Clone, Copy, Debug, Default)]
pub struct UnicellularKernels;

impl KernelSampler for UnicellularKernels {
    fn supports(&self, f: usize, g: usize, _d: usize) -> bool {
        f == 1 && g >= 1
    }

    fn sample(&self, f: usize, g: usize, d: usize, rng: &mut RngHandle) -> Result<RootedMap, SampleError> {
        if f != 1 {
            return Err(SampleError::Unsupported(format!("f = {f} is not unicellular")));
        }
        sample_kernel_with_defect(g, d, rng)
    }
}

/// Uniform picks from the oracle's lists of small kernels.
#[derive(Clone, Debug)]
pub struct CensusKernels {
    census: Census,
}

impl CensusKernels {
    pub fn new(census: Census) -> Self {
        CensusKernels { census }
    }
}

impl KernelSampler for CensusKernels {
    fn supports(&self, f: usize, g: usize, d: usize) -> bool {
        !self.census.kernels(f, g, d).is_empty()
    }

    fn sample(&self, f: usize, g: usize, d: usize, rng: &mut RngHandle) -> Result<RootedMap, SampleError> {
        let list = self.census.kernels(f, g, d);
        list.choose(rng)
            .cloned()
            .ok_or_else(|| SampleError::Unsupported(format!("no listed kernels for (f={f}, g={g}, d={d})")))
    }
}

/// Unicellular kernels by rejection, everything else from the oracle lists.
#[derive(Clone, Debug, Default)]
pub struct DefaultKernels {
    census: Option<Census>,
}

impl DefaultKernels {
    pub fn with_census(census: Census) -> Self {
        DefaultKernels { census: Some(census) }
    }
}

impl KernelSampler for DefaultKernels {
    fn supports(&self, f: usize, g: usize, d: usize) -> bool {
        UnicellularKernels.supports(f, g, d) || self.census.as_ref().is_some_and(|c| !c.kernels(f, g, d).is_empty())
    }

    fn sample(&self, f: usize, g: usize, d: usize, rng: &mut RngHandle) -> Result<RootedMap, SampleError> {
        if f == 1 {
            return UnicellularKernels.sample(f, g, d, rng);
        }
        match &self.census {
            Some(c) if !c.kernels(f, g, d).is_empty() => {
                let list = c.kernels(f, g, d);
                Ok(list.choose(rng).unwrap().clone())
            }
            _ => Err(SampleError::Unsupported(format!(
                "no uniform kernel sampler for (f={f}, g={g}, d={d}); large planar kernels are out of reach"
            ))),
        }
    }
}
