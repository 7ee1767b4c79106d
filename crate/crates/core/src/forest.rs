//! Marked first-passage paths encoding ordered forests of plane trees.
//!
//! A forest of `trees` plane trees with `edges` edges in total is the
//! concatenation of the contour (Dyck) paths of its trees, each followed by a
//! down-step. The resulting ±1 path of length `2·edges + trees` first hits
//! `-trees` at its final step. The mark picks either the core root or an
//! oriented edge of the first tree (the step traversing it).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("path of length {len} ends at {end}, expected a negative endpoint")]
    BadEndpoint { len: usize, end: i64 },
    #[error("path reaches its final level {level} early, at step {step}")]
    EarlyPassage { step: usize, level: i64 },
    #[error("mark {mark} outside 1..{first_tree_time}")]
    BadMark { mark: usize, first_tree_time: usize },
    #[error("invalid step character {0:?}")]
    BadStep(char),
    #[error("forest code expected {expected} tree(s), found {found}")]
    TreeCount { expected: usize, found: usize },
}

/// Which oriented edge carries the root once trees are grafted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootMark {
    /// Root stays on the core root edge.
    KeepCoreRoot,
    /// Root is the dart traversed at this step (1-based) of the first tree's contour.
    Step(usize),
}

impl RootMark {
    /// The mark as an index in `0..A` with `0` meaning [`RootMark::KeepCoreRoot`].
    pub fn index(self) -> usize {
        match self {
            RootMark::KeepCoreRoot => 0,
            RootMark::Step(j) => j,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            RootMark::KeepCoreRoot
        } else {
            RootMark::Step(i)
        }
    }
}

/// Packed ±1 steps; bit set means up-step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct StepPath {
    words: Vec<u64>,
    len: usize,
}

impl StepPath {
    pub fn with_capacity(len: usize) -> Self {
        StepPath { words: Vec::with_capacity(len.div_ceil(64)), len: 0 }
    }

    #[inline]
    pub fn push(&mut self, up: bool) {
        let bit = self.len % 64;
        if bit == 0 {
            self.words.push(0);
        }
        if up {
            *self.words.last_mut().unwrap() |= 1 << bit;
        }
        self.len += 1;
    }

    #[inline]
    pub fn is_up(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.is_up(i))
    }

    /// Increment of step `i`.
    #[inline]
    pub fn step(&self, i: usize) -> i64 {
        if self.is_up(i) {
            1
        } else {
            -1
        }
    }

    pub fn endpoint(&self) -> i64 {
        let ups: usize = self.words.iter().map(|w| w.count_ones() as usize).sum();
        2 * ups as i64 - self.len as i64
    }

    /// Cyclic rotation starting at step `start`.
    pub fn rotated(&self, start: usize) -> StepPath {
        let mut out = StepPath::with_capacity(self.len);
        for i in 0..self.len {
            out.push(self.is_up((start + i) % self.len));
        }
        out
    }

    /// First time the walk attains its overall minimum.
    pub fn first_argmin(&self) -> usize {
        let (mut level, mut best, mut at) = (0i64, 0i64, 0usize);
        for i in 0..self.len {
            level += self.step(i);
            if level < best {
                best = level;
                at = i + 1;
            }
        }
        at
    }

    /// `u`/`d` string form.
    pub fn to_step_string(&self) -> String {
        self.iter().map(|up| if up { 'u' } else { 'd' }).collect()
    }

    pub fn from_step_string(s: &str) -> Result<StepPath, ForestError> {
        let mut out = StepPath::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                'u' | '+' => out.push(true),
                'd' | '-' => out.push(false),
                other => return Err(ForestError::BadStep(other)),
            }
        }
        Ok(out)
    }
}

impl FromIterator<bool> for StepPath {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = StepPath::default();
        for up in iter {
            out.push(up);
        }
        out
    }
}

/// A first-passage path to `-trees` together with a root mark.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForestCode {
    steps: StepPath,
    trees: usize,
    mark: RootMark,
}

impl ForestCode {
    /// Validates the first-passage property and the mark.
    pub fn new(steps: StepPath, mark: RootMark) -> Result<Self, ForestError> {
        let end = steps.endpoint();
        if end >= 0 {
            return Err(ForestError::BadEndpoint { len: steps.len(), end });
        }
        let mut level = 0i64;
        for i in 0..steps.len() - 1 {
            level += steps.step(i);
            if level <= end {
                return Err(ForestError::EarlyPassage { step: i + 1, level: end });
            }
        }
        let code = ForestCode { steps, trees: (-end) as usize, mark };
        if let RootMark::Step(j) = mark {
            let a = code.first_tree_time();
            if j == 0 || j >= a {
                return Err(ForestError::BadMark { mark: j, first_tree_time: a });
            }
        }
        Ok(code)
    }

    /// Empty forest on `trees` corners: all down-steps, root kept.
    pub fn empty(trees: usize) -> Self {
        ForestCode { steps: (0..trees).map(|_| false).collect(), trees, mark: RootMark::KeepCoreRoot }
    }

    /// Vervaat shift of a bridge ending below zero: rotate at the first time
    /// of the overall minimum. The mark is `len - argmin`, so that every
    /// (first-passage path, mark) pair arises from exactly one bridge.
    pub fn from_bridge(bridge: &StepPath) -> Result<Self, ForestError> {
        let m = bridge.first_argmin();
        let end = bridge.endpoint();
        if end >= 0 {
            return Err(ForestError::BadEndpoint { len: bridge.len(), end });
        }
        let len = bridge.len();
        let steps = bridge.rotated(m % len);
        let mark = RootMark::from_index(len - m);
        ForestCode::new(steps, mark)
    }

    /// Inverse of [`ForestCode::from_bridge`].
    pub fn to_bridge(&self) -> StepPath {
        let k = self.mark.index();
        self.steps.rotated(k)
    }

    pub fn steps(&self) -> &StepPath {
        &self.steps
    }

    pub fn mark(&self) -> RootMark {
        self.mark
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of trees (`2c` for a core with `c` edges).
    pub fn tree_count(&self) -> usize {
        self.trees
    }

    /// Total number of tree edges.
    pub fn edge_count(&self) -> usize {
        (self.steps.len() - self.trees) / 2
    }

    /// First hitting time of `-1`, i.e. `2·t₁ + 1` for a first tree with `t₁` edges.
    pub fn first_tree_time(&self) -> usize {
        let mut level = 0i64;
        for i in 0..self.steps.len() {
            level += self.steps.step(i);
            if level == -1 {
                return i + 1;
            }
        }
        unreachable!("first-passage path always reaches -1")
    }

    /// Edge counts of the trees, in order.
    pub fn tree_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.trees);
        // A tree ends at the down-step that first goes below its base level.
        let mut level = 0i64;
        let mut base = 0i64;
        let mut count = 0usize;
        for up in self.steps.iter() {
            if up {
                level += 1;
                count += 1;
            } else {
                level -= 1;
                if level < base {
                    sizes.push(count);
                    count = 0;
                    base = level;
                }
            }
        }
        sizes
    }

    pub fn to_step_string(&self) -> String {
        self.steps.to_step_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(s: &str) -> StepPath {
        StepPath::from_step_string(s).unwrap()
    }

    #[test]
    fn tree_sizes_and_first_tree_time() {
        let code = ForestCode::new(path("uuddduddd"), RootMark::Step(3)).unwrap();
        assert_eq!(code.tree_count(), 3);
        assert_eq!(code.tree_sizes(), vec![2, 1, 0]);
        assert_eq!(code.edge_count(), 3);
        assert_eq!(code.first_tree_time(), 5);
    }

    #[test]
    fn invalid_codes_are_rejected() {
        assert!(matches!(
            ForestCode::new(path("ddud"), RootMark::KeepCoreRoot),
            Err(ForestError::EarlyPassage { .. })
        ));
        assert!(matches!(
            ForestCode::new(path("ud"), RootMark::KeepCoreRoot),
            Err(ForestError::BadEndpoint { .. })
        ));
        assert!(matches!(
            ForestCode::new(path("udd"), RootMark::Step(3)),
            Err(ForestError::BadMark { .. })
        ));
    }

    #[test]
    fn vervaat_shift_is_inverted_by_to_bridge() {
        for s in ["dudd", "uddd", "ddud", "ddduuddd", "udududdd"] {
            let bridge = path(s);
            let code = ForestCode::from_bridge(&bridge).unwrap();
            assert_eq!(code.to_bridge(), bridge, "{s}");
        }
    }

    #[test]
    fn empty_forest_is_all_down() {
        let code = ForestCode::empty(4);
        assert_eq!(code.to_step_string(), "dddd");
        assert_eq!(code.first_tree_time(), 1);
        assert_eq!(code.mark(), RootMark::KeepCoreRoot);
    }
}
