//! Rooted maps encoded as a pair of permutations on darts.
//!
//! `alpha` is the edge involution and `sigma` rotates darts counterclockwise
//! around their origin vertex. Faces are the orbits of `sigma ∘ alpha`
//! (apply `alpha`, then `sigma`).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a half-edge.
pub type Dart = u32;

const UNSET: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("alpha and sigma have different lengths ({alpha} vs {sigma})")]
    LengthMismatch { alpha: usize, sigma: usize },
    #[error("dart count {0} is not a positive even number")]
    BadDartCount(usize),
    #[error("{which} is not a permutation (dart {dart})")]
    NotPermutation { which: &'static str, dart: usize },
    #[error("alpha is not an involution at dart {0}")]
    NotInvolution(Dart),
    #[error("alpha has a fixed point at dart {0}")]
    FixedPoint(Dart),
    #[error("map is disconnected: {reached} of {total} darts reachable from the root")]
    Disconnected { reached: usize, total: usize },
    #[error("root dart {root} out of range for {darts} darts")]
    BadRoot { root: usize, darts: usize },
    #[error("odd or negative Euler characteristic (v={vertices}, e={edges}, f={faces})")]
    OddEulerCharacteristic { vertices: usize, edges: usize, faces: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// A connected rooted map. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootedMap {
    alpha: Vec<Dart>,
    sigma: Vec<Dart>,
    root: Dart,
}

/// Edge, face, genus, vertex and sparsity counts of a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EulerSignature {
    pub edges: usize,
    pub faces: usize,
    pub genus: usize,
    pub vertices: usize,
    pub sparsity: usize,
}

/// Byte string identifying a rooted map up to dart relabelling.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(pub Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

fn check_permutation(p: &[Dart], which: &'static str) -> Result<(), MapError> {
    let mut seen = vec![false; p.len()];
    for (d, &x) in p.iter().enumerate() {
        let x = x as usize;
        if x >= p.len() || seen[x] {
            return Err(MapError::NotPermutation { which, dart: d });
        }
        seen[x] = true;
    }
    Ok(())
}

/// Number of darts reachable from `start` under the group generated by `alpha` and `sigma`.
pub(crate) fn reachable_darts(alpha: &[Dart], sigma: &[Dart], start: Dart) -> usize {
    let mut seen = vec![false; alpha.len()];
    let mut stack = vec![start];
    seen[start as usize] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for y in [alpha[x as usize], sigma[x as usize]] {
            if !seen[y as usize] {
                seen[y as usize] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count
}

/// Number of cycles of a permutation.
pub(crate) fn cycle_count(p: &[Dart]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut count = 0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
        }
    }
    count
}

/// Number of faces (orbits of `sigma ∘ alpha`) without allocating the cycles.
pub(crate) fn face_count_of(alpha: &[Dart], sigma: &[Dart]) -> usize {
    let mut seen = vec![false; alpha.len()];
    let mut count = 0;
    for start in 0..alpha.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = sigma[alpha[x] as usize] as usize;
        }
    }
    count
}

pub(crate) fn inverse(p: &[Dart]) -> Vec<Dart> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as Dart;
    }
    inv
}

/// Canonical pairing `(0 1)(2 3)...` on `darts` darts.
pub fn canonical_alpha(darts: usize) -> Vec<Dart> {
    (0..darts as Dart).map(|d| d ^ 1).collect()
}

impl RootedMap {
    /// Validates and builds a map.
    pub fn new(alpha: Vec<Dart>, sigma: Vec<Dart>, root: Dart) -> Result<Self, MapError> {
        if alpha.len() != sigma.len() {
            return Err(MapError::LengthMismatch { alpha: alpha.len(), sigma: sigma.len() });
        }
        let m = alpha.len();
        if m == 0 || m % 2 == 1 || m >= UNSET as usize {
            return Err(MapError::BadDartCount(m));
        }
        if root as usize >= m {
            return Err(MapError::BadRoot { root: root as usize, darts: m });
        }
        check_permutation(&sigma, "sigma")?;
        for (d, &a) in alpha.iter().enumerate() {
            if a as usize >= m {
                return Err(MapError::NotPermutation { which: "alpha", dart: d });
            }
            if a as usize == d {
                return Err(MapError::FixedPoint(d as Dart));
            }
            if alpha[a as usize] as usize != d {
                return Err(MapError::NotInvolution(d as Dart));
            }
        }
        let reached = reachable_darts(&alpha, &sigma, root);
        if reached != m {
            return Err(MapError::Disconnected { reached, total: m });
        }
        Ok(RootedMap { alpha, sigma, root })
    }

    /// Builds without validation. Callers guarantee every invariant.
    pub(crate) fn from_parts_unchecked(alpha: Vec<Dart>, sigma: Vec<Dart>, root: Dart) -> Self {
        debug_assert!(RootedMap::new(alpha.clone(), sigma.clone(), root).is_ok());
        RootedMap { alpha, sigma, root }
    }

    /// The single-edge loop map.
    pub fn loop_map() -> Self {
        RootedMap { alpha: vec![1, 0], sigma: vec![1, 0], root: 0 }
    }

    /// The single-edge tree.
    pub fn bridge_map() -> Self {
        RootedMap { alpha: vec![1, 0], sigma: vec![0, 1], root: 0 }
    }

    pub fn dart_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn edge_count(&self) -> usize {
        self.alpha.len() / 2
    }

    pub fn root(&self) -> Dart {
        self.root
    }

    #[inline]
    pub fn alpha(&self, d: Dart) -> Dart {
        self.alpha[d as usize]
    }

    #[inline]
    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[d as usize]
    }

    /// Next dart along the face: `sigma(alpha(d))`.
    #[inline]
    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma[self.alpha[d as usize] as usize]
    }

    pub fn alpha_slice(&self) -> &[Dart] {
        &self.alpha
    }

    pub fn sigma_slice(&self) -> &[Dart] {
        &self.sigma
    }

    pub fn sigma_inverse(&self) -> Vec<Dart> {
        inverse(&self.sigma)
    }

    /// Face cycles, each listed from its smallest dart.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let mut seen = vec![false; self.dart_count()];
        let mut out = Vec::new();
        for start in 0..self.dart_count() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start as Dart;
            while !seen[x as usize] {
                seen[x as usize] = true;
                cycle.push(x);
                x = self.phi(x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn face_count(&self) -> usize {
        face_count_of(&self.alpha, &self.sigma)
    }

    pub fn vertex_count(&self) -> usize {
        cycle_count(&self.sigma)
    }

    /// Vertex index of every dart (vertices numbered by first dart) and the vertex count.
    pub fn vertex_labels(&self) -> (Vec<u32>, usize) {
        let mut label = vec![UNSET; self.dart_count()];
        let mut count = 0u32;
        for start in 0..self.dart_count() {
            if label[start] != UNSET {
                continue;
            }
            let mut x = start;
            while label[x] == UNSET {
                label[x] = count;
                x = self.sigma[x] as usize;
            }
            count += 1;
        }
        (label, count as usize)
    }

    /// Degree of every vertex, in the numbering of [`RootedMap::vertex_labels`].
    /// Loops count twice.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let (label, count) = self.vertex_labels();
        let mut deg = vec![0; count];
        for &v in &label {
            deg[v as usize] += 1;
        }
        deg
    }

    /// Degree of the vertex carrying dart `d`.
    pub fn degree_at(&self, d: Dart) -> usize {
        let mut k = 1;
        let mut x = self.sigma(d);
        while x != d {
            k += 1;
            x = self.sigma(x);
        }
        k
    }

    pub fn face_degrees(&self) -> Vec<usize> {
        self.faces().iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.vertex_degrees().into_iter().min().unwrap_or(0)
    }

    /// Whether the edge carrying `d` is a loop.
    pub fn is_loop(&self, d: Dart, vertex: &[u32]) -> bool {
        vertex[d as usize] == vertex[self.alpha(d) as usize]
    }

    pub fn loop_count(&self) -> usize {
        let (vertex, _) = self.vertex_labels();
        (0..self.dart_count() as Dart)
            .filter(|&d| d < self.alpha(d) && self.is_loop(d, &vertex))
            .count()
    }

    pub fn euler_signature(&self) -> Result<EulerSignature, MapError> {
        let vertices = self.vertex_count();
        let edges = self.edge_count();
        let faces = self.face_count();
        // 2 - 2g = v - e + f
        let chi = vertices as i64 - edges as i64 + faces as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(MapError::OddEulerCharacteristic { vertices, edges, faces });
        }
        let genus = ((2 - chi) / 2) as usize;
        Ok(EulerSignature { edges, faces, genus, vertices, sparsity: faces + 2 * genus })
    }

    /// Old-to-new dart labels of the canonical relabelling: breadth-first over
    /// `sigma` from the root, each newly met dart taking the next pair `(2e, 2e+1)`
    /// together with its `alpha` partner.
    pub fn canonical_labels(&self) -> Vec<Dart> {
        self.labels_from(self.root)
    }

    fn labels_from(&self, start: Dart) -> Vec<Dart> {
        let m = self.dart_count();
        let mut label = vec![UNSET; m];
        let mut order: Vec<Dart> = Vec::with_capacity(m);
        label[start as usize] = 0;
        label[self.alpha(start) as usize] = 1;
        order.push(start);
        order.push(self.alpha(start));
        let mut i = 0;
        while i < order.len() {
            let y = self.sigma(order[i]);
            if label[y as usize] == UNSET {
                let next = order.len() as Dart;
                label[y as usize] = next;
                label[self.alpha(y) as usize] = next + 1;
                order.push(y);
                order.push(self.alpha(y));
            }
            i += 1;
        }
        debug_assert_eq!(order.len(), m);
        label
    }

    /// Applies an old-to-new relabelling; the root follows its dart.
    pub fn relabel(&self, label: &[Dart]) -> RootedMap {
        let m = self.dart_count();
        let mut alpha = vec![0; m];
        let mut sigma = vec![0; m];
        for x in 0..m {
            let nx = label[x] as usize;
            alpha[nx] = label[self.alpha[x] as usize];
            sigma[nx] = label[self.sigma[x] as usize];
        }
        RootedMap { alpha, sigma, root: label[self.root as usize] }
    }

    /// The canonically relabelled copy: root 0, edges `(2e, 2e+1)`.
    pub fn canonical_form(&self) -> RootedMap {
        self.relabel(&self.canonical_labels())
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        let label = self.canonical_labels();
        let m = self.dart_count();
        let mut sigma = vec![0u32; m];
        for x in 0..m {
            sigma[label[x] as usize] = label[self.sigma[x] as usize];
        }
        let mut bytes = Vec::with_capacity(4 * (m + 1));
        bytes.extend_from_slice(&(m as u32).to_le_bytes());
        for s in sigma {
            bytes.extend_from_slice(&s.to_le_bytes());
        }
        CanonicalCode(bytes)
    }

    /// Same map rooted at another dart.
    pub fn rerooted(&self, root: Dart) -> RootedMap {
        RootedMap { alpha: self.alpha.clone(), sigma: self.sigma.clone(), root }
    }

    pub fn to_document(&self) -> MapDocument {
        MapDocument {
            darts: self.dart_count(),
            alpha: self.alpha.clone(),
            sigma: self.sigma.clone(),
            root: self.root,
        }
    }

    pub fn serialize(&self) -> Vec<u8> {
        serde_json::to_vec(&self.to_document()).expect("map document serialization")
    }

    pub fn deserialize(bytes: &[u8]) -> Result<RootedMap, MapError> {
        let doc: MapDocument =
            serde_json::from_slice(bytes).map_err(|e| MapError::Parse(e.to_string()))?;
        doc.into_map()
    }

    /// Graphviz rendering: one node per vertex, one edge per `alpha` orbit.
    pub fn to_dot(&self) -> String {
        let (vertex, count) = self.vertex_labels();
        let mut out = String::from("graph map {\n");
        for v in 0..count {
            let _ = writeln!(out, "  v{v};");
        }
        let root_edge = self.root.min(self.alpha(self.root));
        for d in 0..self.dart_count() as Dart {
            let a = self.alpha(d);
            if d > a {
                continue;
            }
            let (u, w) = (vertex[d as usize], vertex[a as usize]);
            if d == root_edge {
                let (from, to) = if d == self.root { (u, w) } else { (w, u) };
                let _ = writeln!(
                    out,
                    "  v{from} -- v{to} [label=\"root\", color=blue, penwidth=2, dir=forward];"
                );
            } else {
                let _ = writeln!(out, "  v{u} -- v{w};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Text form of a map: dart count, both permutations, root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDocument {
    pub darts: usize,
    pub alpha: Vec<Dart>,
    pub sigma: Vec<Dart>,
    pub root: Dart,
}

impl MapDocument {
    pub fn into_map(self) -> Result<RootedMap, MapError> {
        if self.alpha.len() != self.darts || self.sigma.len() != self.darts {
            return Err(MapError::Parse(format!(
                "declared {} darts but alpha has {} and sigma has {}",
                self.darts,
                self.alpha.len(),
                self.sigma.len()
            )));
        }
        RootedMap::new(self.alpha, self.sigma, self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> RootedMap {
        RootedMap::new(vec![1, 0, 3, 2], vec![2, 3, 1, 0], 0).unwrap()
    }

    #[test]
    fn small_maps_have_expected_signatures() {
        let sig = RootedMap::loop_map().euler_signature().unwrap();
        assert_eq!((sig.edges, sig.faces, sig.genus, sig.vertices, sig.sparsity), (1, 2, 0, 1, 2));
        let sig = RootedMap::bridge_map().euler_signature().unwrap();
        assert_eq!((sig.edges, sig.faces, sig.genus, sig.vertices, sig.sparsity), (1, 1, 0, 2, 1));
        let sig = torus().euler_signature().unwrap();
        assert_eq!((sig.edges, sig.faces, sig.genus, sig.vertices, sig.sparsity), (2, 1, 1, 1, 3));
    }

    #[test]
    fn face_cycles() {
        assert_eq!(RootedMap::loop_map().faces(), vec![vec![0], vec![1]]);
        assert_eq!(RootedMap::bridge_map().faces(), vec![vec![0, 1]]);
        assert_eq!(torus().faces().len(), 1);
        assert_eq!(torus().faces()[0].len(), 4);
    }

    #[test]
    fn build_errors_name_the_invariant() {
        assert_eq!(RootedMap::new(vec![0, 1], vec![0, 1], 0), Err(MapError::FixedPoint(0)));
        assert_eq!(
            RootedMap::new(vec![1, 2, 0, 3], vec![0, 1, 2, 3], 0),
            Err(MapError::NotInvolution(0))
        );
        assert!(matches!(
            RootedMap::new(vec![1, 0, 3, 2], vec![0, 1, 2, 3], 0),
            Err(MapError::Disconnected { reached: 2, total: 4 })
        ));
        assert!(matches!(
            RootedMap::new(vec![1, 0], vec![0, 1], 2),
            Err(MapError::BadRoot { .. })
        ));
        assert!(matches!(
            RootedMap::new(vec![1, 0], vec![0, 0], 0),
            Err(MapError::NotPermutation { which: "sigma", .. })
        ));
        assert!(matches!(RootedMap::new(vec![], vec![], 0), Err(MapError::BadDartCount(0))));
    }

    #[test]
    fn degree_sums() {
        let m = torus();
        assert_eq!(m.vertex_degrees(), vec![4]);
        assert_eq!(m.face_degrees().iter().sum::<usize>(), 4);
        assert_eq!(RootedMap::loop_map().vertex_degrees(), vec![2]);
        assert_eq!(RootedMap::loop_map().loop_count(), 1);
    }

    #[test]
    fn canonical_codes_distinguish_and_identify() {
        let bridge = RootedMap::bridge_map();
        let flipped = RootedMap::new(vec![1, 0], vec![0, 1], 1).unwrap();
        assert_eq!(bridge.canonical_code(), flipped.canonical_code());
        assert_ne!(bridge.canonical_code(), RootedMap::loop_map().canonical_code());
        let canon = torus().canonical_form();
        assert_eq!(canon.root(), 0);
        assert_eq!(canon.alpha_slice(), &[1, 0, 3, 2]);
    }

    #[test]
    fn serialization_round_trip_and_truncation() {
        let m = torus();
        let bytes = m.serialize();
        assert_eq!(RootedMap::deserialize(&bytes).unwrap(), m);
        assert!(matches!(
            RootedMap::deserialize(&bytes[..bytes.len() - 3]),
            Err(MapError::Parse(_))
        ));
        let bad = br#"{"darts":2,"alpha":[0,1],"sigma":[0,1],"root":0}"#;
        assert_eq!(RootedMap::deserialize(bad), Err(MapError::FixedPoint(0)));
    }

    #[test]
    fn dot_export_marks_root() {
        let dot = torus().to_dot();
        assert!(dot.contains("root"));
        assert_eq!(dot.matches("--").count(), 2);
    }
}
