//! Brute force over all vertex rotations with the edge pairing held fixed.
//!
//! With `alpha = (0 1)(2 3)...` and root dart 0, every rooted map with `n`
//! edges is produced by exactly `2^{n−1}(n−1)!` rotations `sigma`: the
//! relabellings that fix dart 0 and commute with `alpha`. Deduplicating by
//! canonical code checks this divisor directly.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::EnumError;
use crate::map::{canonical_alpha, CanonicalCode, Dart, RootedMap};

/// Largest size for which all maps are deduplicated, not only min-degree-3 ones.
const DEDUP_ALL_UP_TO: usize = 5;

/// Result of [`oracle_enumerate`].
#[derive(Clone, Debug, Default)]
pub struct Census {
    pub n_max: usize,
    /// Rooted maps by `(n, f, g)`.
    pub counts: BTreeMap<(usize, usize, usize), u64>,
    /// Canonical maps with minimum degree 3 by `(f, g, d)`, sorted by code.
    kernels: BTreeMap<(usize, usize, usize), Vec<RootedMap>>,
}

impl Census {
    pub fn count(&self, n: usize, f: usize, g: usize) -> u64 {
        self.counts.get(&(n, f, g)).copied().unwrap_or(0)
    }

    pub fn total(&self, n: usize) -> u64 {
        self.counts.iter().filter(|(k, _)| k.0 == n).map(|(_, &c)| c).sum()
    }

    pub fn kernels(&self, f: usize, g: usize, d: usize) -> &[RootedMap] {
        self.kernels.get(&(f, g, d)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn kernel_classes(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Vec<RootedMap>)> {
        self.kernels.iter()
    }
}

#[derive(Default)]
struct Block {
    counts: HashMap<(usize, usize), u64>,
    codes: HashMap<CanonicalCode, u64>,
    kernels: HashMap<(usize, usize, usize), HashMap<CanonicalCode, (RootedMap, u64)>>,
}

impl Block {
    fn merge(mut self, other: Block) -> Block {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        for (k, v) in other.codes {
            *self.codes.entry(k).or_default() += v;
        }
        for (k, maps) in other.kernels {
            let mine = self.kernels.entry(k).or_default();
            for (code, (map, c)) in maps {
                mine.entry(code).or_insert((map, 0)).1 += c;
            }
        }
        self
    }
}

/// Census of all rooted maps with `1 ≤ n ≤ n_max` edges.
pub fn oracle_enumerate(n_max: usize) -> Result<Census, EnumError> {
    if n_max > 6 {
        return Err(EnumError::BudgetExceeded { n_max });
    }
    let mut census = Census { n_max, ..Census::default() };
    let mut kernels: BTreeMap<(usize, usize, usize), Vec<(CanonicalCode, RootedMap)>> = BTreeMap::new();
    for n in 1..=n_max {
        let m = 2 * n;
        let divisor: u64 = (1u64 << (n - 1)) * (1..n as u64).product::<u64>();
        let prefixes: Vec<(Dart, Dart)> = (0..m as Dart)
            .flat_map(|a| (0..m as Dart).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let block = prefixes
            .par_iter()
            .map(|&(a, b)| scan_block(n, a, b))
            .reduce(Block::default, Block::merge);
        if n <= DEDUP_ALL_UP_TO {
            if let Some((_, &c)) = block.codes.iter().find(|(_, &c)| c != divisor) {
                return Err(EnumError::OracleInconsistent(format!("n={n}: a map occurs {c} times, expected {divisor}")));
            }
        }
        for ((f, g), raw) in block.counts {
            if raw % divisor != 0 {
                return Err(EnumError::OracleInconsistent(format!("n={n}: raw count {raw} not divisible by {divisor}")));
            }
            census.counts.insert((n, f, g), raw / divisor);
        }
        for (key, maps) in block.kernels {
            for (code, (map, c)) in maps {
                if c != divisor {
                    return Err(EnumError::OracleInconsistent(format!("n={n}: kernel occurs {c} times")));
                }
                kernels.entry(key).or_default().push((code, map));
            }
        }
    }
    census.kernels = kernels
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by(|a, b| a.0.cmp(&b.0));
            (k, v.into_iter().map(|(_, m)| m).collect())
        })
        .collect();
    Ok(census)
}

fn scan_block(n: usize, a: Dart, b: Dart) -> Block {
    let m = 2 * n;
    let alpha = canonical_alpha(m);
    let mut sigma: Vec<Dart> = vec![a, b];
    sigma.extend((0..m as Dart).filter(|&x| x != a && x != b));
    let mut out = Block::default();
    if m == 2 {
        sigma.truncate(2);
    }
    loop {
        if let Some((f, g, min_deg, v)) = classify(&sigma) {
            *out.counts.entry((f, g)).or_default() += 1;
            let dedup_all = n <= DEDUP_ALL_UP_TO;
            if dedup_all || min_deg >= 3 {
                let map = RootedMap::from_parts_unchecked(alpha.clone(), sigma.clone(), 0);
                let code = map.canonical_code();
                if min_deg >= 3 {
                    let d = 2 * n - 3 * v;
                    out.kernels
                        .entry((f, g, d))
                        .or_default()
                        .entry(code.clone())
                        .or_insert_with(|| (map.canonical_form(), 0))
                        .1 += 1;
                }
                if dedup_all {
                    *out.codes.entry(code).or_default() += 1;
                }
            }
        }
        if m <= 2 || !next_permutation(&mut sigma[2..]) {
            break;
        }
    }
    out
}

/// `(faces, genus, min degree, vertices)` of a connected rotation, `None` if disconnected.
fn classify(sigma: &[Dart]) -> Option<(usize, usize, usize, usize)> {
    let m = sigma.len();
    let mut seen: u32 = 1;
    let mut stack = [0u8; 16];
    let mut top = 1;
    while top > 0 {
        top -= 1;
        let x = stack[top] as usize;
        for y in [x ^ 1, sigma[x] as usize] {
            if seen & (1 << y) == 0 {
                seen |= 1 << y;
                stack[top] = y as u8;
                top += 1;
            }
        }
    }
    if seen.count_ones() as usize != m {
        return None;
    }
    let (mut vertices, mut min_deg) = (0, usize::MAX);
    let mut done: u32 = 0;
    for start in 0..m {
        if done & (1 << start) != 0 {
            continue;
        }
        vertices += 1;
        let mut len = 0;
        let mut x = start;
        while done & (1 << x) == 0 {
            done |= 1 << x;
            len += 1;
            x = sigma[x] as usize;
        }
        min_deg = min_deg.min(len);
    }
    let mut faces = 0;
    done = 0;
    for start in 0..m {
        if done & (1 << start) != 0 {
            continue;
        }
        faces += 1;
        let mut x = start;
        while done & (1 << x) == 0 {
            done |= 1 << x;
            x = sigma[x ^ 1] as usize;
        }
    }
    let n = m / 2;
    let genus = (2 + n - vertices - faces) / 2;
    Some((faces, genus, min_deg, vertices))
}

/// Lexicographic successor in place; `false` after the last permutation.
fn next_permutation(p: &mut [Dart]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
