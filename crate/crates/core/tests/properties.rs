use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use sparsemaps::decompose::{contract, decompose, defect, recompose, DecompositionDocument};
use sparsemaps::enumerate::{oracle_enumerate, Census, DefectTable};
use sparsemaps::sample::{
    sample_forest_code, sample_trivalent_unicellular, DefaultKernels, Mode, Pipeline,
};
use sparsemaps::{ForestCode, RngHandle, RootedMap};

struct Fixture {
    census: Census,
    table: DefectTable,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let census = oracle_enumerate(4).unwrap();
        let mut table = DefectTable::closed_forms(11);
        table.merge(&DefectTable::from_census(&census)).unwrap();
        Fixture { census, table }
    })
}

/// Shapes the exact pipeline covers with the fixture: trees, cycle cores,
/// every class up to 4 edges, and (3,0), (1,1) at any size.
const SHAPES: [(usize, usize, usize); 9] =
    [(12, 1, 0), (12, 2, 0), (4, 2, 1), (4, 4, 0), (3, 1, 1), (25, 3, 0), (40, 1, 1), (4, 5, 0), (2, 3, 0)];

fn sample_shape(i: usize, seed: u64) -> RootedMap {
    let f = fixture();
    let kernels = DefaultKernels::with_census(f.census.clone());
    let (n, faces, g) = SHAPES[i];
    let p = Pipeline::new(n, faces, g, Mode::Exact, &f.table, &kernels).unwrap();
    p.draw_map(&mut RngHandle::new(seed)).unwrap()
}

fn arb_map() -> impl Strategy<Value = RootedMap> {
    (0..SHAPES.len(), any::<u64>()).prop_map(|(i, seed)| sample_shape(i, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_code_ignores_labels(m in arb_map(), seed in any::<u64>()) {
        let mut rng = RngHandle::new(seed);
        let mut label: Vec<u32> = (0..m.dart_count() as u32).collect();
        label.shuffle(&mut rng);
        let relabelled = m.relabel(&label);
        prop_assert_eq!(relabelled.canonical_code(), m.canonical_code());
        prop_assert_eq!(relabelled.euler_signature().unwrap(), m.euler_signature().unwrap());
    }

    #[test]
    fn rerooting_changes_only_the_root(m in arb_map(), pick in any::<u32>()) {
        let r = pick % m.dart_count() as u32;
        let other = m.rerooted(r);
        prop_assert_eq!(other.euler_signature().unwrap(), m.euler_signature().unwrap());
        prop_assert_eq!(other.rerooted(m.root()).canonical_code(), m.canonical_code());
    }

    #[test]
    fn serialization_round_trips(m in arb_map()) {
        let back = RootedMap::deserialize(&m.serialize()).unwrap();
        prop_assert_eq!(back, m.clone());
        let doc = m.to_document();
        prop_assert_eq!(doc.into_map().unwrap(), m);
    }

    #[test]
    fn recompose_inverts_decompose(m in arb_map()) {
        prop_assume!(m.face_count() + 2 * m.euler_signature().unwrap().genus > 1);
        let dec = decompose(&m).unwrap();
        let back = recompose(&dec, m.edge_count()).unwrap();
        prop_assert_eq!(back.canonical_code(), m.canonical_code());
        // The text form carries the whole decomposition.
        let json = serde_json::to_string(&dec.to_document()).unwrap();
        let doc: DecompositionDocument = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(doc.into_decomposition().unwrap(), dec);
    }

    #[test]
    fn contraction_defect_counts_edges(g in 1usize..4, seed in any::<u64>(), d in 1usize..4) {
        let mut rng = RngHandle::new(seed);
        let t0 = sample_trivalent_unicellular(g, &mut rng).unwrap();
        prop_assume!(d + 5 <= 2 * (1 + 2 * g));
        let picks = rand::seq::index::sample(&mut rng, t0.edge_count() - 1, d);
        let darts: Vec<u32> = picks.iter().map(|i| 2 * (i as u32 + 1)).collect();
        if let Ok(k) = contract(&t0, &darts) {
            prop_assert_eq!(defect(&k).unwrap().0, d);
            prop_assert_eq!(k.edge_count(), t0.edge_count() - d);
            prop_assert_eq!(k.face_count(), 1);
            prop_assert_eq!(k.euler_signature().unwrap().genus, g);
        }
    }

    #[test]
    fn forest_codes_biject_with_bridges(n in 1usize..200, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let c = 1 + ((n - 1) as f64 * frac) as usize;
        let mut rng = RngHandle::new(seed);
        let code = sample_forest_code(n, c, &mut rng).unwrap();
        prop_assert_eq!(code.tree_count(), 2 * c);
        prop_assert_eq!(code.edge_count(), n - c);
        prop_assert!(code.mark().index() < code.first_tree_time());
        prop_assert_eq!(ForestCode::from_bridge(&code.to_bridge()).unwrap(), code.clone());
        let sizes = code.tree_sizes();
        prop_assert_eq!(sizes.len(), 2 * c);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n - c);
        prop_assert_eq!(2 * sizes[0] + 1, code.first_tree_time());
    }

    #[test]
    fn streams_are_reproducible(seed in any::<u64>(), replica in any::<u64>()) {
        let mut a = RngHandle::with_replica(seed, replica);
        let mut b = RngHandle::with_replica(seed, replica);
        let xa: [u64; 4] = a.gen();
        let xb: [u64; 4] = b.gen();
        prop_assert_eq!(xa, xb);
    }
}
