//! Core–kernel decomposition, defects, edge contraction and its inverse.
//!
//! The core is what remains after repeatedly deleting degree-one vertices;
//! the kernel replaces every maximal chain of degree-two core vertices by a
//! single edge. A non-tree map with `n` edges is recovered exactly from its
//! kernel, the chain lengths, and a marked forest code of length `2n`
//! (see [`recompose`]).
//!
//! Root transfer: if the root edge survives in the core it stays the core
//! root. Otherwise the root lies in a tree grafted in the corner following
//! some core dart `x`; the core root becomes `alpha(x)`, so that this tree
//! sits in the first corner (the one following the tip of the core root).
//! Corners are numbered from the corner after `alpha(root)`, then in
//! canonical dart order of the core.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forest::{ForestCode, ForestError, RootMark, StepPath};
use crate::map::{canonical_alpha, Dart, MapDocument, MapError, RootedMap};
use crate::numeric::catalan;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("map is a plane tree; its core is empty")]
    Tree,
    #[error("core is a bare cycle of {core_edges} edge(s); the kernel degenerates")]
    DegenerateKernel { core_edges: usize },
    #[error("vertex of degree {degree} < 3")]
    MinDegreeViolation { degree: usize },
    #[error("inconsistent sizes: {0}")]
    InconsistentSizes(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Forest(#[from] ForestError),
}

/// Why an ordered edge list cannot be contracted.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NotGoodSubset {
    #[error("edge #{index} is the root edge")]
    RootEdge { index: usize },
    #[error("edge #{index} repeats an earlier edge")]
    Repeated { index: usize },
    #[error("edge #{index} closes a cycle (or is a loop)")]
    ClosesCycle { index: usize },
    #[error("edge #{index}: dart {dart} out of range")]
    OutOfRange { index: usize, dart: Dart },
}

/// Result of pruning degree-one vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Core {
    /// The input was a tree.
    Empty,
    Map(RootedMap),
}

impl Core {
    pub fn as_map(&self) -> Option<&RootedMap> {
        match self {
            Core::Empty => None,
            Core::Map(m) => Some(m),
        }
    }
}

/// Kernel part of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// A map with minimum degree 3, in canonical form.
    Proper(RootedMap),
    /// The core is a cycle (two-face planar maps): no vertex of degree ≥ 3.
    Cycle,
}

/// Chain lengths per kernel edge (canonical edge order) and the position of
/// the core root on the root chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chains {
    pub lengths: Vec<usize>,
    /// `N₀`: the core root is the `N₀`-th edge of the root chain, from the kernel root's origin.
    pub root_split: usize,
}

impl Chains {
    pub fn core_edges(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// `(N₀, N₁)` with `N₀ + N₁ - 1` the root chain length.
    pub fn root_parts(&self) -> (usize, usize) {
        (self.root_split, self.lengths[0] + 1 - self.root_split)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub kernel: Kernel,
    pub chains: Chains,
    pub forest: ForestCode,
}

impl Decomposition {
    pub fn root_mark(&self) -> RootMark {
        self.forest.mark()
    }

    pub fn core_edges(&self) -> usize {
        self.chains.core_edges()
    }

    pub fn kernel_edges(&self) -> usize {
        match &self.kernel {
            Kernel::Proper(k) => k.edge_count(),
            Kernel::Cycle => 0,
        }
    }

    /// Defect of the kernel (`0` for the cycle case).
    pub fn defect(&self) -> usize {
        match &self.kernel {
            Kernel::Proper(k) => defect(k).map(|d| d.0).unwrap_or(0),
            Kernel::Cycle => 0,
        }
    }

    pub fn to_document(&self) -> DecompositionDocument {
        DecompositionDocument {
            kernel: match &self.kernel {
                Kernel::Proper(k) => Some(k.to_document()),
                Kernel::Cycle => None,
            },
            chain_lengths: self.chains.lengths.clone(),
            root_split: self.chains.root_split,
            forest: self.forest.to_step_string(),
            root_mark: self.forest.mark().index(),
        }
    }
}

/// Text form of a decomposition. A missing kernel means the cycle case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionDocument {
    pub kernel: Option<MapDocument>,
    pub chain_lengths: Vec<usize>,
    pub root_split: usize,
    pub forest: String,
    pub root_mark: usize,
}

impl DecompositionDocument {
    pub fn into_decomposition(self) -> Result<Decomposition, DecomposeError> {
        let kernel = match self.kernel {
            Some(doc) => Kernel::Proper(doc.into_map()?),
            None => Kernel::Cycle,
        };
        let steps = StepPath::from_step_string(&self.forest)?;
        let forest = ForestCode::new(steps, RootMark::from_index(self.root_mark))?;
        Ok(Decomposition {
            kernel,
            chains: Chains { lengths: self.chain_lengths, root_split: self.root_split },
            forest,
        })
    }
}

/// Defect number `Σ (deg v − 3) = 2E − 3V` of a map with minimum degree 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DefectValue(pub usize);

pub fn defect(map: &RootedMap) -> Result<DefectValue, DecomposeError> {
    let degrees = map.vertex_degrees();
    if let Some(&degree) = degrees.iter().find(|&&d| d < 3) {
        return Err(DecomposeError::MinDegreeViolation { degree });
    }
    Ok(DefectValue(2 * map.edge_count() - 3 * degrees.len()))
}

/// `∏_v Cat(deg v − 2)`: the number of ways to blow every vertex up into a trivalent tree.
pub fn blowup_weight(map: &RootedMap) -> Result<BigUint, DecomposeError> {
    let mut w = BigUint::from(1u32);
    for degree in map.vertex_degrees() {
        if degree < 3 {
            return Err(DecomposeError::MinDegreeViolation { degree });
        }
        if degree > 3 {
            w *= catalan(degree as u64 - 2);
        }
    }
    Ok(w)
}

/// Core with transferred root.
pub fn core(map: &RootedMap) -> Core {
    match split_core(map) {
        Some((core, _)) => Core::Map(core),
        None => Core::Empty,
    }
}

/// Prunes trees, returning the canonical core and the marked forest code.
fn split_core(map: &RootedMap) -> Option<(RootedMap, ForestCode)> {
    let m = map.dart_count();
    let (vertex, vcount) = map.vertex_labels();
    let mut degree = vec![0u32; vcount];
    for &v in &vertex {
        degree[v as usize] += 1;
    }
    let mut alive = vec![true; m];
    let mut first_dart = vec![0 as Dart; vcount];
    for d in (0..m).rev() {
        first_dart[vertex[d] as usize] = d as Dart;
    }
    let mut queue: Vec<u32> = (0..vcount as u32).filter(|&v| degree[v as usize] == 1).collect();
    let mut alive_edges = map.edge_count();
    while let Some(v) = queue.pop() {
        if degree[v as usize] != 1 {
            continue;
        }
        let start = first_dart[v as usize];
        let mut x = start;
        while !alive[x as usize] {
            x = map.sigma(x);
            debug_assert_ne!(x, start);
        }
        let y = map.alpha(x);
        alive[x as usize] = false;
        alive[y as usize] = false;
        alive_edges -= 1;
        degree[v as usize] = 0;
        let w = vertex[y as usize];
        degree[w as usize] -= 1;
        if degree[w as usize] == 1 {
            queue.push(w);
        }
    }
    if alive_edges == 0 {
        return None;
    }

    // Contour every corner's tree once, recording where the root is met.
    let mut corner_start = vec![u32::MAX; m];
    let mut corner_len = vec![0u32; m];
    let mut all_steps = StepPath::with_capacity(2 * (map.edge_count() - alive_edges));
    let mut root_corner: Option<(Dart, usize)> = None;
    let root = map.root();
    let mut stack: Vec<Dart> = Vec::new();
    for x in 0..m as Dart {
        if !alive[x as usize] {
            continue;
        }
        let begin = all_steps.len();
        corner_start[x as usize] = begin as u32;
        let mut cur = map.sigma(x);
        loop {
            if let Some(&top) = stack.last() {
                if cur == top {
                    stack.pop();
                    all_steps.push(false);
                    if cur == root {
                        root_corner = Some((x, all_steps.len() - begin));
                    }
                    cur = map.sigma(map.alpha(cur));
                    continue;
                }
            } else if alive[cur as usize] {
                break;
            }
            all_steps.push(true);
            if cur == root {
                root_corner = Some((x, all_steps.len() - begin));
            }
            let back = map.alpha(cur);
            stack.push(back);
            cur = map.sigma(back);
        }
        corner_len[x as usize] = (all_steps.len() - begin) as u32;
    }

    let (core_root, mark) = match root_corner {
        None => (root, RootMark::KeepCoreRoot),
        Some((x, step)) => (map.alpha(x), RootMark::Step(step)),
    };

    // Compact core labels, then canonicalize.
    let mut compact = vec![u32::MAX; m];
    let mut kept: Vec<Dart> = Vec::with_capacity(2 * alive_edges);
    for d in 0..m {
        if alive[d] {
            compact[d] = kept.len() as u32;
            kept.push(d as Dart);
        }
    }
    let mut alpha = Vec::with_capacity(kept.len());
    let mut sigma = Vec::with_capacity(kept.len());
    for &d in &kept {
        alpha.push(compact[map.alpha(d) as usize]);
        let mut y = map.sigma(d);
        while !alive[y as usize] {
            y = map.sigma(y);
        }
        sigma.push(compact[y as usize]);
    }
    let raw_core = RootedMap::from_parts_unchecked(alpha, sigma, compact[core_root as usize]);
    let labels = raw_core.canonical_labels();
    let core = raw_core.relabel(&labels);

    let mut by_label = vec![0 as Dart; kept.len()];
    for (i, &d) in kept.iter().enumerate() {
        by_label[labels[i] as usize] = d;
    }
    let mut steps = StepPath::with_capacity(2 * map.edge_count());
    for label in corner_order(kept.len()) {
        let x = by_label[label as usize] as usize;
        let begin = corner_start[x] as usize;
        for i in begin..begin + corner_len[x] as usize {
            steps.push(all_steps.is_up(i));
        }
        steps.push(false);
    }
    let forest = ForestCode::new(steps, mark).expect("contour of a forest is a valid code");
    Some((core, forest))
}

/// Corner order on a canonical core: the corner after dart 1 (the tip of the
/// root), then the corners after 0, 2, 3, ...
fn corner_order(darts: usize) -> impl Iterator<Item = Dart> {
    std::iter::once(1).chain((0..darts as Dart).filter(|&d| d != 1))
}

/// Full decomposition of a non-tree map.
pub fn decompose(map: &RootedMap) -> Result<Decomposition, DecomposeError> {
    let (core, forest) = split_core(map).ok_or(DecomposeError::Tree)?;
    let (kernel, chains) = contract_chains(&core);
    Ok(Decomposition { kernel, chains, forest })
}

/// Kernel of a non-tree map together with the full decomposition.
pub fn kernel(map: &RootedMap) -> Result<(RootedMap, Decomposition), DecomposeError> {
    let dec = decompose(map)?;
    match &dec.kernel {
        Kernel::Proper(k) => Ok((k.clone(), dec)),
        Kernel::Cycle => Err(DecomposeError::DegenerateKernel { core_edges: dec.core_edges() }),
    }
}

fn contract_chains(core: &RootedMap) -> (Kernel, Chains) {
    let c = core.edge_count();
    let (vertex, _) = core.vertex_labels();
    let degrees = core.vertex_degrees();
    let deg = |d: Dart| degrees[vertex[d as usize] as usize];
    if degrees.iter().all(|&d| d == 2) {
        return (Kernel::Cycle, Chains { lengths: vec![c], root_split: 1 });
    }

    // Walk back from the core root to the kernel vertex its chain leaves from.
    let mut z = core.root();
    let mut split = 1;
    while deg(z) == 2 {
        z = core.alpha(core.sigma(z));
        split += 1;
    }

    let m = core.dart_count();
    let mut end = vec![u32::MAX; m];
    let mut length = vec![0usize; m];
    for x in 0..m as Dart {
        if deg(x) == 2 {
            continue;
        }
        let mut y = x;
        let mut len = 1;
        while deg(core.alpha(y)) == 2 {
            y = core.sigma(core.alpha(y));
            len += 1;
        }
        end[x as usize] = core.alpha(y);
        length[x as usize] = len;
    }
    let mut compact = vec![u32::MAX; m];
    let mut kept = Vec::new();
    for d in 0..m {
        if end[d] != u32::MAX {
            compact[d] = kept.len() as u32;
            kept.push(d as Dart);
        }
    }
    let alpha: Vec<Dart> = kept.iter().map(|&d| compact[end[d as usize] as usize]).collect();
    let sigma: Vec<Dart> = kept.iter().map(|&d| compact[core.sigma(d) as usize]).collect();
    let raw = RootedMap::from_parts_unchecked(alpha, sigma, compact[z as usize]);
    let labels = raw.canonical_labels();
    let kernel = raw.relabel(&labels);
    let mut lengths = vec![0; kernel.edge_count()];
    for (i, &d) in kept.iter().enumerate() {
        let l = labels[i] as usize;
        if l % 2 == 0 {
            lengths[l / 2] = length[d as usize];
        }
    }
    (Kernel::Proper(kernel), Chains { lengths, root_split: split })
}

/// Core obtained by subdividing every kernel edge into its chain.
pub fn expand_core(kernel: &Kernel, chains: &Chains) -> Result<RootedMap, DecomposeError> {
    if chains.lengths.iter().any(|&l| l == 0) {
        return Err(DecomposeError::InconsistentSizes("chain of length 0".into()));
    }
    let root_len = *chains
        .lengths
        .first()
        .ok_or_else(|| DecomposeError::InconsistentSizes("no chains".into()))?;
    if chains.root_split == 0 || chains.root_split > root_len {
        return Err(DecomposeError::InconsistentSizes(format!(
            "root split {} outside 1..={root_len}",
            chains.root_split
        )));
    }
    let c = chains.core_edges();
    let mut sigma = vec![0 as Dart; 2 * c];
    let fwd = |id: usize| (2 * id) as Dart;
    let bwd = |id: usize| (2 * id + 1) as Dart;
    match kernel {
        Kernel::Cycle => {
            if chains.lengths.len() != 1 {
                return Err(DecomposeError::InconsistentSizes(
                    "cycle kernel takes a single chain".into(),
                ));
            }
            for j in 0..c {
                let prev = (j + c - 1) % c;
                sigma[fwd(j) as usize] = bwd(prev);
                sigma[bwd(prev) as usize] = fwd(j);
            }
            Ok(RootedMap::from_parts_unchecked(canonical_alpha(2 * c), sigma, fwd(0)))
        }
        Kernel::Proper(k) => {
            let k = k.canonical_form();
            if chains.lengths.len() != k.edge_count() {
                return Err(DecomposeError::InconsistentSizes(format!(
                    "{} chain lengths for a kernel with {} edges",
                    chains.lengths.len(),
                    k.edge_count()
                )));
            }
            let mut offset = Vec::with_capacity(chains.lengths.len());
            let mut acc = 0;
            for &l in &chains.lengths {
                offset.push(acc);
                acc += l;
            }
            let image = |kd: Dart| -> Dart {
                let e = kd as usize / 2;
                if kd % 2 == 0 {
                    fwd(offset[e])
                } else {
                    bwd(offset[e] + chains.lengths[e] - 1)
                }
            };
            for kd in 0..k.dart_count() as Dart {
                sigma[image(kd) as usize] = image(k.sigma(kd));
            }
            for (e, &l) in chains.lengths.iter().enumerate() {
                for j in 0..l - 1 {
                    let (a, b) = (bwd(offset[e] + j), fwd(offset[e] + j + 1));
                    sigma[a as usize] = b;
                    sigma[b as usize] = a;
                }
            }
            let root = fwd(chains.root_split - 1);
            Ok(RootedMap::from_parts_unchecked(canonical_alpha(2 * c), sigma, root))
        }
    }
}

/// Rebuilds the map with `n` edges from its decomposition.
pub fn recompose(dec: &Decomposition, n: usize) -> Result<RootedMap, DecomposeError> {
    let core = expand_core(&dec.kernel, &dec.chains)?.canonical_form();
    let c = core.edge_count();
    if dec.forest.tree_count() != 2 * c {
        return Err(DecomposeError::InconsistentSizes(format!(
            "forest has {} trees for a core with {c} edges",
            dec.forest.tree_count()
        )));
    }
    if dec.forest.len() != 2 * n {
        return Err(DecomposeError::InconsistentSizes(format!(
            "forest code of length {} for n = {n}",
            dec.forest.len()
        )));
    }
    Ok(graft_forest(&core, &dec.forest))
}

/// Grafts the trees of `forest` into the corners of a canonical `core`.
pub(crate) fn graft_forest(core: &RootedMap, forest: &ForestCode) -> RootedMap {
    let n = forest.len() / 2;
    let mut sigma = Vec::with_capacity(2 * n);
    sigma.extend_from_slice(core.sigma_slice());
    let mut next = core.dart_count() as Dart;
    let mut root = core.root();
    let steps = forest.steps();
    let mark = forest.mark();
    let mut pos = 0usize;
    // Per open node: (insertion cursor, dart pointing to its parent).
    let mut stack: Vec<(Dart, Dart)> = Vec::new();
    for (tree, x) in corner_order(core.dart_count()).enumerate() {
        stack.clear();
        stack.push((x, u32::MAX));
        let mut step_in_tree = 0usize;
        loop {
            let up = steps.is_up(pos);
            pos += 1;
            if !up && stack.len() == 1 {
                break;
            }
            step_in_tree += 1;
            let traversed = if up {
                let (a, b) = (next, next + 1);
                next += 2;
                sigma.push(0);
                sigma.push(b);
                let cursor = &mut stack.last_mut().unwrap().0;
                sigma[a as usize] = sigma[*cursor as usize];
                sigma[*cursor as usize] = a;
                *cursor = a;
                stack.push((b, b));
                a
            } else {
                stack.pop().unwrap().1
            };
            if tree == 0 && mark == RootMark::Step(step_in_tree) {
                root = traversed;
            }
        }
    }
    RootedMap::from_parts_unchecked(canonical_alpha(2 * n), sigma, root)
}

/// Rooted plane tree whose contour is the Dyck path `dyck`; the root is the
/// first edge leaving the root vertex.
pub fn plane_tree(dyck: &StepPath) -> Result<RootedMap, DecomposeError> {
    let n = dyck.len() / 2;
    if n == 0 || dyck.endpoint() != 0 || dyck.len() % 2 != 0 {
        return Err(DecomposeError::InconsistentSizes("need a nonempty Dyck path".into()));
    }
    let mut sigma: Vec<Dart> = Vec::with_capacity(2 * n);
    // Per open vertex: (last inserted dart, if any; dart back to the parent).
    let mut stack: Vec<(Option<Dart>, Dart)> = vec![(None, u32::MAX)];
    for up in dyck.iter() {
        if up {
            let a = sigma.len() as Dart;
            let b = a + 1;
            sigma.push(a);
            sigma.push(b);
            let top = stack.last_mut().unwrap();
            if let Some(cursor) = top.0 {
                sigma[a as usize] = sigma[cursor as usize];
                sigma[cursor as usize] = a;
            }
            top.0 = Some(a);
            stack.push((Some(b), b));
        } else {
            stack.pop();
            if stack.is_empty() {
                return Err(DecomposeError::InconsistentSizes("path goes below zero".into()));
            }
        }
    }
    Ok(RootedMap::from_parts_unchecked(canonical_alpha(2 * n), sigma, 0))
}

/// Contracts an ordered list of edges (each given by one of its darts).
/// The list must be good: distinct, avoiding the root edge, and acyclic.
pub fn contract(map: &RootedMap, edges: &[Dart]) -> Result<RootedMap, NotGoodSubset> {
    let m = map.dart_count();
    let (vertex, vcount) = map.vertex_labels();
    let mut parent: Vec<u32> = (0..vcount as u32).collect();
    fn find(parent: &mut [u32], mut v: u32) -> u32 {
        while parent[v as usize] != v {
            parent[v as usize] = parent[parent[v as usize] as usize];
            v = parent[v as usize];
        }
        v
    }
    let mut used = vec![false; m];
    let root_edge = map.root().min(map.alpha(map.root()));
    for (index, &d) in edges.iter().enumerate() {
        if d as usize >= m {
            return Err(NotGoodSubset::OutOfRange { index, dart: d });
        }
        let e = d.min(map.alpha(d));
        if e == root_edge {
            return Err(NotGoodSubset::RootEdge { index });
        }
        if used[e as usize] {
            return Err(NotGoodSubset::Repeated { index });
        }
        used[e as usize] = true;
        let (u, w) = (find(&mut parent, vertex[d as usize]), find(&mut parent, vertex[map.alpha(d) as usize]));
        if u == w {
            return Err(NotGoodSubset::ClosesCycle { index });
        }
        parent[u as usize] = w;
    }

    let mut sigma = map.sigma_slice().to_vec();
    let mut sigma_inv = map.sigma_inverse();
    let mut dead = vec![false; m];
    for &d in edges {
        let (a, b) = (d, map.alpha(d));
        // Splice the rotation of b's vertex into a's, dropping a and b.
        let (pa, sa) = (sigma_inv[a as usize], sigma[a as usize]);
        let (pb, sb) = (sigma_inv[b as usize], sigma[b as usize]);
        if sa == a {
            sigma[pb as usize] = sb;
            sigma_inv[sb as usize] = pb;
        } else if sb == b {
            sigma[pa as usize] = sa;
            sigma_inv[sa as usize] = pa;
        } else {
            sigma[pa as usize] = sb;
            sigma_inv[sb as usize] = pa;
            sigma[pb as usize] = sa;
            sigma_inv[sa as usize] = pb;
        }
        dead[a as usize] = true;
        dead[b as usize] = true;
    }
    let mut compact = vec![u32::MAX; m];
    let mut count = 0;
    // Keep pairs adjacent so that edge e stays (2e, 2e+1).
    for d in 0..m as Dart {
        let a = map.alpha(d);
        if d < a && !dead[d as usize] {
            compact[d as usize] = count;
            compact[a as usize] = count + 1;
            count += 2;
        }
    }
    let mut alpha = vec![0; count as usize];
    let mut new_sigma = vec![0; count as usize];
    for d in 0..m {
        if dead[d] {
            continue;
        }
        let nd = compact[d] as usize;
        alpha[nd] = compact[map.alpha(d as Dart) as usize];
        new_sigma[nd] = compact[sigma[d] as usize];
    }
    Ok(RootedMap::from_parts_unchecked(alpha, new_sigma, compact[map.root() as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> RootedMap {
        RootedMap::new(vec![1, 0, 3, 2], vec![2, 3, 1, 0], 0).unwrap()
    }

    /// Theta graph on the sphere: two vertices joined by three edges.
    fn theta() -> RootedMap {
        RootedMap::new(canonical_alpha(6), vec![2, 5, 4, 1, 0, 3], 0).unwrap()
    }

    /// Loop at a vertex with a pendant edge attached.
    fn loop_with_pendant() -> RootedMap {
        // darts: 0,1 loop; 2 at the loop vertex, 3 at the leaf.
        RootedMap::new(canonical_alpha(4), vec![1, 2, 0, 3], 2).unwrap()
    }

    #[test]
    fn cores_of_small_maps() {
        assert_eq!(core(&RootedMap::bridge_map()), Core::Empty);
        let c = core(&RootedMap::loop_map());
        assert_eq!(c.as_map().unwrap().canonical_code(), RootedMap::loop_map().canonical_code());
        let c = core(&loop_with_pendant());
        assert_eq!(c.as_map().unwrap().canonical_code(), RootedMap::loop_map().canonical_code());
    }

    #[test]
    fn kernels() {
        assert!(matches!(
            kernel(&RootedMap::loop_map()),
            Err(DecomposeError::DegenerateKernel { core_edges: 1 })
        ));
        let (k, dec) = kernel(&torus()).unwrap();
        assert_eq!(k.canonical_code(), torus().canonical_code());
        assert_eq!(defect(&k), Ok(DefectValue(1)));
        assert_eq!(dec.chains.lengths, vec![1, 1]);
        let (k, dec) = kernel(&theta()).unwrap();
        assert_eq!(k.canonical_code(), theta().canonical_code());
        assert_eq!(dec.chains.lengths, vec![1, 1, 1]);
        assert_eq!(dec.defect(), 0);
        assert!(matches!(kernel(&RootedMap::bridge_map()), Err(DecomposeError::Tree)));
    }

    #[test]
    fn defects_and_blowups() {
        assert_eq!(defect(&theta()), Ok(DefectValue(0)));
        assert_eq!(blowup_weight(&theta()).unwrap(), BigUint::from(1u32));
        assert_eq!(blowup_weight(&torus()).unwrap(), BigUint::from(2u32));
        assert!(matches!(
            defect(&RootedMap::loop_map()),
            Err(DecomposeError::MinDegreeViolation { degree: 2 })
        ));
        // One vertex with four loops: degree 8 → Cat(6) = 132.
        let sigma = vec![2, 4, 3, 6, 5, 7, 1, 0];
        let flower = RootedMap::new(canonical_alpha(8), sigma, 0).unwrap();
        assert_eq!(flower.vertex_degrees(), vec![8]);
        assert_eq!(blowup_weight(&flower).unwrap(), BigUint::from(132u32));
    }

    #[test]
    fn contraction_of_theta() {
        let t = theta();
        let merged = contract(&t, &[2]).unwrap();
        assert_eq!(merged.edge_count(), 2);
        assert_eq!(merged.vertex_degrees(), vec![4]);
        let sig = merged.euler_signature().unwrap();
        assert_eq!((sig.faces, sig.genus), (3, 0));
        assert_eq!(defect(&merged), Ok(DefectValue(1)));
        assert_eq!(contract(&t, &[0]), Err(NotGoodSubset::RootEdge { index: 0 }));
        assert_eq!(contract(&t, &[1]), Err(NotGoodSubset::RootEdge { index: 0 }));
        assert_eq!(contract(&t, &[2, 3]), Err(NotGoodSubset::Repeated { index: 1 }));
        assert_eq!(contract(&t, &[2, 4]), Err(NotGoodSubset::ClosesCycle { index: 1 }));
        assert_eq!(contract(&torus(), &[2]), Err(NotGoodSubset::ClosesCycle { index: 0 }));
    }

    #[test]
    fn trivalent_kernel_recomposes_to_itself() {
        let dec = Decomposition {
            kernel: Kernel::Proper(theta()),
            chains: Chains { lengths: vec![1, 1, 1], root_split: 1 },
            forest: ForestCode::empty(6),
        };
        let m = recompose(&dec, 3).unwrap();
        assert_eq!(m.canonical_code(), theta().canonical_code());
    }

    #[test]
    fn cycle_family_round_trips() {
        // Core = 3-cycle, one pendant edge in the second corner, root kept.
        let steps = StepPath::from_step_string("dudddddd").unwrap();
        let dec = Decomposition {
            kernel: Kernel::Cycle,
            chains: Chains { lengths: vec![3], root_split: 1 },
            forest: ForestCode::new(steps, RootMark::KeepCoreRoot).unwrap(),
        };
        let m = recompose(&dec, 4).unwrap();
        let sig = m.euler_signature().unwrap();
        assert_eq!((sig.edges, sig.faces, sig.genus, sig.vertices), (4, 2, 0, 4));
        assert_eq!(decompose(&m).unwrap(), dec);
    }

    #[test]
    fn pendant_root_is_transferred() {
        let m = loop_with_pendant();
        let dec = decompose(&m).unwrap();
        assert_eq!(dec.kernel, Kernel::Cycle);
        assert_eq!(dec.forest.tree_sizes(), vec![1, 0]);
        assert_eq!(dec.root_mark(), RootMark::Step(1));
        assert_eq!(recompose(&dec, 2).unwrap().canonical_code(), m.canonical_code());
    }

    #[test]
    fn document_round_trip() {
        let dec = decompose(&loop_with_pendant()).unwrap();
        let doc = dec.to_document();
        let text = serde_json::to_string(&doc).unwrap();
        let back: DecompositionDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_decomposition().unwrap(), dec);
    }
}
