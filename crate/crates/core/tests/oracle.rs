//! Counting and sampling checked against the brute-force census.

use std::collections::HashMap;

use num_bigint::BigUint;
use sparsemaps::decompose::decompose;
use sparsemaps::enumerate::{oracle_enumerate, t0_planar_count, t0_unicellular_count, total_count, DefectTable};
use sparsemaps::numeric::catalan;
use sparsemaps::sample::{sample_map_rejection, DefaultKernels, Mode, Pipeline};
use sparsemaps::stats::chi_square_gof;
use sparsemaps::RngHandle;

#[test]
fn displayed_sum_matches_census_up_to_four_edges() {
    let census = oracle_enumerate(4).unwrap();
    let table = DefectTable::from_census(&census);
    for n in 1..=4 {
        let mut total = 0u64;
        for s in 1..=n + 1 {
            for g in 0..=s / 2 {
                let f = s - 2 * g;
                if f == 0 {
                    continue;
                }
                let got = total_count(n, f, g, &table).unwrap();
                assert_eq!(got.exact(), Some(&BigUint::from(census.count(n, f, g))), "(n={n}, f={f}, g={g})");
                total += census.count(n, f, g);
            }
        }
        // All rooted maps: 2, 10, 74, 706.
        assert_eq!(total, [2, 10, 74, 706][n - 1]);
        assert_eq!(census.total(n), total);
    }
    // Plane trees.
    for n in 1..=4u64 {
        assert_eq!(BigUint::from(census.count(n as usize, 1, 0)), catalan(n));
    }
}

#[test]
fn closed_forms_match_listed_kernels() {
    let census = oracle_enumerate(4).unwrap();
    assert_eq!(t0_planar_count(3).unwrap(), BigUint::from(census.kernels(3, 0, 0).len()));
    assert_eq!(t0_unicellular_count(1).unwrap(), BigUint::from(census.kernels(1, 1, 0).len()));
    assert_eq!(census.kernels(1, 1, 1).len(), 1);
}

/// Pipeline frequencies over canonical classes against the uniform law.
fn uniform_over_classes(n: usize, f: usize, g: usize, draws: usize) {
    let census = oracle_enumerate(4).unwrap();
    let mut table = DefectTable::closed_forms(n + 1);
    table.merge(&DefectTable::from_census(&census)).unwrap();
    let kernels = DefaultKernels::with_census(census.clone());
    let p = Pipeline::new(n, f, g, Mode::Exact, &table, &kernels).unwrap();
    let mut rng = RngHandle::new(11);
    let mut counts: HashMap<Vec<u8>, u64> = HashMap::new();
    for _ in 0..draws {
        *counts.entry(p.draw_map(&mut rng).unwrap().canonical_code().0).or_default() += 1;
    }
    let classes = census.count(n, f, g) as usize;
    assert_eq!(counts.len(), classes, "(n={n}, f={f}, g={g})");
    let observed: Vec<u64> = counts.values().copied().collect();
    let probs = vec![1.0 / classes as f64; classes];
    let (_, _, pval) = chi_square_gof(&observed, &probs, 5.0);
    assert!(pval > 1e-4, "(n={n}, f={f}, g={g}): p = {pval}");
}

#[test]
fn pipeline_is_uniform_on_small_classes() {
    for (n, f, g) in [(4, 1, 1), (4, 3, 0), (4, 2, 1), (3, 2, 0), (4, 4, 0), (4, 1, 0)] {
        uniform_over_classes(n, f, g, 20_000);
    }
}

#[test]
fn rejection_sampler_covers_every_class() {
    let census = oracle_enumerate(3).unwrap();
    let mut rng = RngHandle::new(5);
    let mut seen = HashMap::new();
    for _ in 0..3000 {
        let m = sample_map_rejection(3, 1, 1, &mut rng).unwrap();
        *seen.entry(m.canonical_code()).or_insert(0) += 1;
    }
    assert_eq!(seen.len() as u64, census.count(3, 1, 1));
    // Defect zero means the map is its own trivalent kernel.
    let p0 = census.kernels(1, 1, 0).len() as f64 / census.count(3, 1, 1) as f64;
    let mut rng = RngHandle::new(6);
    let defects: Vec<usize> = (0..2000)
        .map(|_| decompose(&sample_map_rejection(3, 1, 1, &mut rng).unwrap()).unwrap().defect())
        .collect();
    let zero = defects.iter().filter(|&&d| d == 0).count() as f64 / defects.len() as f64;
    assert!((zero - p0).abs() < 4.0 * (p0 * (1.0 - p0) / 2000.0).sqrt(), "P(d = 0) = {zero}, expected {p0}");
}
