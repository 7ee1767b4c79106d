use std::ffi::{CStr, CString};
use std::ptr;

use sparsemaps_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let mut needed = 0;
    unsafe { sm_last_error(buf.as_mut_ptr(), buf.len(), &mut needed) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn map_round_trip_through_handles() {
    // Torus with one vertex and two loops.
    let alpha = [1u32, 0, 3, 2];
    let sigma = [2u32, 3, 1, 0];
    let mut map = ptr::null_mut();
    unsafe {
        assert_eq!(sm_map_new(alpha.as_ptr(), sigma.as_ptr(), 4, 0, &mut map), SmStatus::SmOk);
        let (mut e, mut f, mut g) = (0, 0, 0);
        assert_eq!(sm_map_signature(map, &mut e, &mut f, &mut g), SmStatus::SmOk);
        assert_eq!((e, f, g), (2, 1, 1));

        let mut needed = 0;
        assert_eq!(sm_map_canonical_code(map, ptr::null_mut(), 0, &mut needed), SmStatus::SmErrBufferTooSmall);
        let mut code = vec![0u8; needed];
        assert_eq!(sm_map_canonical_code(map, code.as_mut_ptr(), code.len(), &mut needed), SmStatus::SmOk);
        assert_eq!(&code[..4], &4u32.to_le_bytes());

        let mut dec = SmDecomposition::default();
        assert_eq!(sm_map_decompose(map, &mut dec), SmStatus::SmOk);
        assert_eq!((dec.defect, dec.core_edges, dec.kernel_edges), (1, 2, 2));
        sm_map_free(map);
    }
}

#[test]
fn invalid_input_reports_status_and_message() {
    let alpha = [0u32, 1];
    let sigma = [0u32, 1];
    let mut map = ptr::null_mut();
    unsafe {
        assert_eq!(sm_map_new(alpha.as_ptr(), sigma.as_ptr(), 2, 0, &mut map), SmStatus::SmErrInvalid);
        assert!(map.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(sm_map_new(ptr::null(), sigma.as_ptr(), 2, 0, &mut map), SmStatus::SmErrNull);
        // Freeing null is a no-op.
        sm_map_free(ptr::null_mut());
        sm_table_free(ptr::null_mut());
        sm_sampler_free(ptr::null_mut());
    }
}

#[test]
fn counting_and_sampling() {
    let mut table = ptr::null_mut();
    unsafe {
        assert_eq!(sm_table_closed_forms(3, &mut table), SmStatus::SmOk);
        let mut ln = 0.0;
        let mut buf = vec![0 as std::ffi::c_char; 64];
        let mut needed = 0;
        // Catalan(5) plane trees.
        assert_eq!(sm_count(5, 1, 0, table, &mut ln, buf.as_mut_ptr(), buf.len(), &mut needed), SmStatus::SmOk);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "42");
        assert!((ln - 42f64.ln()).abs() < 1e-12);
        // The genus-1 table needs #T_1(1,1), which closed forms do not give.
        assert_eq!(sm_count(3, 1, 1, table, &mut ln, buf.as_mut_ptr(), buf.len(), &mut needed), SmStatus::SmErrInvalid);

        let mut sampler = ptr::null_mut();
        assert_eq!(sm_sampler_new(30, 2, 0, SmMode::SmModeExact, table, &mut sampler), SmStatus::SmOk);
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(sm_sampler_draw(sampler, 7, 3, &mut a), SmStatus::SmOk);
        assert_eq!(sm_sampler_draw(sampler, 7, 3, &mut b), SmStatus::SmOk);
        let (mut e, mut f, mut g) = (0, 0, 0);
        assert_eq!(sm_map_signature(a, &mut e, &mut f, &mut g), SmStatus::SmOk);
        assert_eq!((e, f, g), (30, 2, 0));
        let code = |m| {
            let mut needed = 0;
            sm_map_canonical_code(m, ptr::null_mut(), 0, &mut needed);
            let mut v = vec![0u8; needed];
            sm_map_canonical_code(m, v.as_mut_ptr(), v.len(), &mut needed);
            v
        };
        assert_eq!(code(a), code(b));
        sm_map_free(a);
        sm_map_free(b);
        sm_sampler_free(sampler);

        // Missing #T_1(3,0).
        assert_eq!(sm_sampler_new(10, 3, 0, SmMode::SmModeExact, table, &mut sampler), SmStatus::SmErrInvalid);
        sm_table_free(table);
    }
}

#[test]
fn table_files_load() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../tables/small");
    let c = CString::new(path).unwrap();
    let mut table = ptr::null_mut();
    unsafe {
        assert_eq!(sm_table_load(c.as_ptr(), &mut table), SmStatus::SmOk);
        let mut needed = 0;
        let mut buf = vec![0 as std::ffi::c_char; 64];
        let mut ln = 0.0;
        assert_eq!(sm_count(3, 1, 1, table, &mut ln, buf.as_mut_ptr(), buf.len(), &mut needed), SmStatus::SmOk);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "10");
        // Planar kernels are only available from the oracle, not through this interface.
        let mut sampler = ptr::null_mut();
        assert_eq!(sm_sampler_new(10, 3, 0, SmMode::SmModeExact, table, &mut sampler), SmStatus::SmErrUnsupported);
        assert!(last_error().contains("kernel"));
        sm_table_free(table);
        let missing = CString::new("/nonexistent/table").unwrap();
        assert_eq!(sm_table_load(missing.as_ptr(), &mut table), SmStatus::SmErrIo);
        let v = CStr::from_ptr(sm_version()).to_str().unwrap();
        assert!(!v.is_empty());
    }
}

#[test]
fn header_declares_the_interface() {
    let header = include_str!("../include/sparsemaps.h");
    for name in ["sm_map_new", "sm_sampler_draw", "sm_count", "SM_ERR_UNSUPPORTED", "typedef struct SmMap SmMap"] {
        assert!(header.contains(name), "{name}");
    }
}
