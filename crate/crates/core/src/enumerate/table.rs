use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{kernel_edges, t0_planar_count, t0_unicellular_count, Census, EnumError};
use crate::numeric::ln_big;

const FORMAT: &str = "defect-table/1";

/// Where a table entry comes from; earlier variants take precedence on merge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    ClosedForm,
    Oracle,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TableValue {
    Exact(BigUint),
    /// Monte Carlo estimate of the logarithm, with the relative standard error of the value.
    Estimate { ln: f64, rel_stderr: f64 },
}

impl TableValue {
    pub fn ln_with_err(&self) -> (f64, f64) {
        match self {
            TableValue::Exact(x) => (ln_big(x), 0.0),
            TableValue::Estimate { ln, rel_stderr } => (*ln, *rel_stderr),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectEntry {
    pub value: TableValue,
    pub provenance: Provenance,
}

/// Counts `#T_d(f,g)` of rooted maps with minimum degree 3, `f` faces, genus `g` and defect `d`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DefectTable {
    entries: BTreeMap<(usize, usize, usize), DefectEntry>,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    f: usize,
    g: usize,
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ln: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rel_stderr: Option<f64>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    format: String,
    entries: Vec<EntryRecord>,
}

impl DefectTable {
    pub fn insert(&mut self, f: usize, g: usize, d: usize, entry: DefectEntry) -> Result<(), EnumError> {
        let s = f + 2 * g;
        if f == 0 || s < 3 || d + 5 > 2 * s {
            return Err(EnumError::Table(format!("(f={f}, g={g}, d={d}) violates d <= 2s-5 with s >= 3")));
        }
        if entry.provenance == Provenance::ClosedForm && d != 0 {
            return Err(EnumError::Table(format!("closed-form entry at d={d} != 0")));
        }
        if entry.provenance != Provenance::MonteCarlo && !matches!(entry.value, TableValue::Exact(_)) {
            return Err(EnumError::Table("only Monte Carlo entries may be estimates".into()));
        }
        self.entries.insert((f, g, d), entry);
        Ok(())
    }

    pub fn get(&self, f: usize, g: usize, d: usize) -> Option<&DefectEntry> {
        self.entries.get(&(f, g, d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize, usize), &DefectEntry)> {
        self.entries.iter()
    }

    /// Defects contributing to maps with `n` edges: `d ≤ 2s−5` and a kernel with at most `n` edges.
    pub fn relevant_defects(n: usize, f: usize, g: usize) -> Vec<usize> {
        let s = f + 2 * g;
        if s < 3 {
            return Vec::new();
        }
        (0..=2 * s - 5).filter(|&d| matches!(kernel_edges(s, d), Some(k) if k >= 1 && k <= n)).collect()
    }

    /// Entries needed for `#M_n(f,g)`, or the list of missing defects.
    pub fn required_entries(&self, n: usize, f: usize, g: usize) -> Result<Vec<(usize, &DefectEntry)>, EnumError> {
        let mut found = Vec::new();
        let mut missing = Vec::new();
        for d in Self::relevant_defects(n, f, g) {
            match self.get(f, g, d) {
                Some(e) => found.push((d, e)),
                None => missing.push(d),
            }
        }
        if missing.is_empty() {
            Ok(found)
        } else {
            Err(EnumError::IncompleteTable { f, g, missing })
        }
    }

    /// As [`DefectTable::required_entries`], refusing Monte Carlo entries.
    pub fn required_exact(&self, n: usize, f: usize, g: usize) -> Result<Vec<(usize, &BigUint)>, EnumError> {
        self.required_entries(n, f, g)?
            .into_iter()
            .map(|(d, e)| match &e.value {
                TableValue::Exact(x) => Ok((d, x)),
                TableValue::Estimate { .. } => Err(EnumError::NotExact { f, g }),
            })
            .collect()
    }

    /// Trivalent closed forms for every planar `f ≤ s_max` and unicellular `1 + 2g ≤ s_max`.
    pub fn closed_forms(s_max: usize) -> Self {
        let mut t = DefectTable::default();
        let entry = |x| DefectEntry { value: TableValue::Exact(x), provenance: Provenance::ClosedForm };
        for f in 3..=s_max {
            t.insert(f, 0, 0, entry(t0_planar_count(f).unwrap())).unwrap();
        }
        for g in 1..=(s_max.saturating_sub(1) / 2) {
            t.insert(1, g, 0, entry(t0_unicellular_count(g).unwrap())).unwrap();
        }
        t
    }

    /// Oracle counts (zeros included) for every `(f, g, d)` whose kernels have at most `n_max` edges.
    pub fn from_census(census: &Census) -> Self {
        let mut t = DefectTable::default();
        for s in 3..=census.n_max + 1 {
            for d in 0..=2 * s - 5 {
                if !matches!(kernel_edges(s, d), Some(k) if k >= 1 && k <= census.n_max) {
                    continue;
                }
                for g in 0..=(s - 1) / 2 {
                    let f = s - 2 * g;
                    let count = census.kernels(f, g, d).len();
                    let entry = DefectEntry { value: TableValue::Exact(BigUint::from(count)), provenance: Provenance::Oracle };
                    t.insert(f, g, d, entry).unwrap();
                }
            }
        }
        t
    }

    /// Adds the entries of `other`, keeping the stronger provenance. Exact
    /// values from different sources must agree.
    pub fn merge(&mut self, other: &DefectTable) -> Result<(), EnumError> {
        for (&key, e) in &other.entries {
            match self.entries.get(&key) {
                None => {
                    self.entries.insert(key, e.clone());
                }
                Some(mine) => {
                    if let (TableValue::Exact(a), TableValue::Exact(b)) = (&mine.value, &e.value) {
                        if a != b {
                            return Err(EnumError::Table(format!("conflicting exact values at {key:?}: {a} vs {b}")));
                        }
                    }
                    if e.provenance < mine.provenance {
                        self.entries.insert(key, e.clone());
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let entries = self
            .entries
            .iter()
            .map(|(&(f, g, d), e)| {
                let (value, ln, rel_stderr) = match &e.value {
                    TableValue::Exact(x) => (Some(x.to_string()), None, None),
                    TableValue::Estimate { ln, rel_stderr } => (None, Some(*ln), Some(*rel_stderr)),
                };
                EntryRecord { f, g, d, value, ln, rel_stderr, provenance: e.provenance }
            })
            .collect();
        let file = TableFile { format: FORMAT.into(), entries };
        serde_json::to_string_pretty(&file).expect("table serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, EnumError> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| EnumError::Table(e.to_string()))?;
        if file.format != FORMAT {
            return Err(EnumError::Table(format!("unknown format {:?}", file.format)));
        }
        let mut t = DefectTable::default();
        for r in file.entries {
            let value = match (r.value, r.ln, r.rel_stderr) {
                (Some(v), None, None) => TableValue::Exact(
                    v.parse().map_err(|_| EnumError::Table(format!("bad integer {v:?}")))?,
                ),
                (None, Some(ln), Some(rel_stderr)) => TableValue::Estimate { ln, rel_stderr },
                _ => {
                    return Err(EnumError::Table(format!(
                        "entry (f={}, g={}, d={}) needs either value or ln+rel_stderr",
                        r.f, r.g, r.d
                    )))
                }
            };
            t.insert(r.f, r.g, r.d, DefectEntry { value, provenance: r.provenance })?;
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, EnumError> {
        let text = std::fs::read_to_string(path).map_err(|e| EnumError::Table(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_table_and_round_trip() {
        let t = DefectTable::closed_forms(7);
        assert_eq!(t.get(1, 1, 0).unwrap().value, TableValue::Exact(BigUint::from(1u32)));
        assert_eq!(t.get(1, 2, 0).unwrap().value, TableValue::Exact(BigUint::from(105u32)));
        assert_eq!(t.get(3, 0, 0).unwrap().value, TableValue::Exact(BigUint::from(4u32)));
        let back = DefectTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn insert_checks_invariants() {
        let mut t = DefectTable::default();
        let exact = |p| DefectEntry { value: TableValue::Exact(BigUint::from(1u32)), provenance: p };
        assert!(t.insert(1, 1, 1, exact(Provenance::ClosedForm)).is_err());
        assert!(t.insert(1, 1, 2, exact(Provenance::Oracle)).is_err());
        assert!(t.insert(1, 1, 1, exact(Provenance::Oracle)).is_ok());
        let est = DefectEntry { value: TableValue::Estimate { ln: 0.0, rel_stderr: 0.1 }, provenance: Provenance::Oracle };
        assert!(t.insert(1, 2, 1, est).is_err());
    }

    #[test]
    fn missing_entries_are_listed() {
        let t = DefectTable::closed_forms(3);
        let err = t.required_entries(3, 1, 1).unwrap_err();
        assert_eq!(err, EnumError::IncompleteTable { f: 1, g: 1, missing: vec![1] });
        // With n = 2 only the d = 1 kernel (2 edges) matters.
        assert_eq!(DefectTable::relevant_defects(2, 1, 1), vec![1]);
    }
}
