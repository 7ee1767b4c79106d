//! C interface: opaque handles for maps, defect tables and samplers, integer
//! status codes, and a thread-local message for the last error.
//!
//! Every handle returned through an out-pointer must be released with its
//! `*_free` function. Functions never unwind across the boundary.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sparsemaps::decompose::decompose;
use sparsemaps::enumerate::{total_count, DefectTable, EnumError, EnumValue};
use sparsemaps::sample::{Mode, Pipeline, SampleError, UnicellularKernels};
use sparsemaps::{RngHandle, RootedMap};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmStatus {
    SmOk = 0,
    SmErrNull = 1,
    SmErrInvalid = 2,
    SmErrDomain = 3,
    SmErrUnsupported = 4,
    SmErrBufferTooSmall = 5,
    SmErrIo = 6,
    SmErrPanic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmMode {
    SmModeExact = 0,
    SmModeApproximate = 1,
}

/// Opaque rooted map.
pub struct SmMap(RootedMap);

/// Opaque defect table.
pub struct SmTable(DefectTable);

/// Opaque sampler for one `(n, faces, genus)` class.
pub struct SmSampler(Pipeline<'static>);

static KERNELS: UnicellularKernels = UnicellularKernels;

/// Counts of the parts of a decomposition.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SmDecomposition {
    pub defect: usize,
    pub core_edges: usize,
    pub kernel_edges: usize,
    pub first_tree_time: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: SmStatus, msg: impl Into<String>) -> SmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn guard(f: impl FnOnce() -> SmStatus) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SmStatus::SmErrPanic, "internal panic"),
    }
}

fn enum_status(e: &EnumError) -> SmStatus {
    match e {
        EnumError::Domain(_) => SmStatus::SmErrDomain,
        EnumError::Regime(_) | EnumError::BudgetExceeded { .. } => SmStatus::SmErrUnsupported,
        _ => SmStatus::SmErrInvalid,
    }
}

fn sample_status(e: &SampleError) -> SmStatus {
    match e {
        SampleError::Domain(_) | SampleError::Parity { .. } => SmStatus::SmErrDomain,
        SampleError::Unsupported(_) | SampleError::BudgetExceeded(_) => SmStatus::SmErrUnsupported,
        SampleError::Enum(e) => enum_status(e),
        SampleError::Decompose(_) => SmStatus::SmErrInvalid,
    }
}

/// Copies `s` and a trailing NUL into `buf`; `needed` gets the full size.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> SmStatus {
    if !needed.is_null() {
        *needed = s.len() + 1;
    }
    if buf.is_null() || len < s.len() + 1 {
        return fail(SmStatus::SmErrBufferTooSmall, format!("need {} bytes", s.len() + 1));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    SmStatus::SmOk
}

/// Message of the last failed call on this thread.
#[no_mangle]
pub unsafe extern "C" fn sm_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> SmStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    write_str(&msg, buf, len, needed)
}

#[no_mangle]
pub extern "C" fn sm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a map from its edge involution `alpha`, vertex rotation `sigma`
/// (both of length `darts`) and root dart.
#[no_mangle]
pub unsafe extern "C" fn sm_map_new(
    alpha: *const u32,
    sigma: *const u32,
    darts: usize,
    root: u32,
    out: *mut *mut SmMap,
) -> SmStatus {
    guard(|| {
        if alpha.is_null() || sigma.is_null() || out.is_null() {
            return fail(SmStatus::SmErrNull, "null argument");
        }
        let a = std::slice::from_raw_parts(alpha, darts).to_vec();
        let s = std::slice::from_raw_parts(sigma, darts).to_vec();
        match RootedMap::new(a, s, root) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(SmMap(m)));
                SmStatus::SmOk
            }
            Err(e) => fail(SmStatus::SmErrInvalid, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn sm_map_free(map: *mut SmMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Edges, faces and genus of a map.
#[no_mangle]
pub unsafe extern "C" fn sm_map_signature(
    map: *const SmMap,
    edges: *mut usize,
    faces: *mut usize,
    genus: *mut usize,
) -> SmStatus {
    guard(|| {
        let Some(m) = map.as_ref() else { return fail(SmStatus::SmErrNull, "null map") };
        if edges.is_null() || faces.is_null() || genus.is_null() {
            return fail(SmStatus::SmErrNull, "null argument");
        }
        match m.0.euler_signature() {
            Ok(sig) => {
                (*edges, *faces, *genus) = (sig.edges, sig.faces, sig.genus);
                SmStatus::SmOk
            }
            Err(e) => fail(SmStatus::SmErrInvalid, e.to_string()),
        }
    })
}

/// Canonical code bytes; equal codes mean isomorphic rooted maps.
#[no_mangle]
pub unsafe extern "C" fn sm_map_canonical_code(
    map: *const SmMap,
    buf: *mut u8,
    len: usize,
    needed: *mut usize,
) -> SmStatus {
    guard(|| {
        let Some(m) = map.as_ref() else { return fail(SmStatus::SmErrNull, "null map") };
        let code = m.0.canonical_code();
        let bytes = code.as_bytes();
        if !needed.is_null() {
            *needed = bytes.len();
        }
        if buf.is_null() || len < bytes.len() {
            return fail(SmStatus::SmErrBufferTooSmall, format!("need {} bytes", bytes.len()));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        SmStatus::SmOk
    })
}

/// The map's dart permutations; each buffer must hold `2 * edges` entries.
#[no_mangle]
pub unsafe extern "C" fn sm_map_permutations(
    map: *const SmMap,
    alpha: *mut u32,
    sigma: *mut u32,
    len: usize,
    root: *mut u32,
) -> SmStatus {
    guard(|| {
        let Some(m) = map.as_ref() else { return fail(SmStatus::SmErrNull, "null map") };
        if alpha.is_null() || sigma.is_null() || root.is_null() {
            return fail(SmStatus::SmErrNull, "null argument");
        }
        let d = m.0.dart_count();
        if len < d {
            return fail(SmStatus::SmErrBufferTooSmall, format!("need {d} entries"));
        }
        ptr::copy_nonoverlapping(m.0.alpha_slice().as_ptr(), alpha, d);
        ptr::copy_nonoverlapping(m.0.sigma_slice().as_ptr(), sigma, d);
        *root = m.0.root();
        SmStatus::SmOk
    })
}

#[no_mangle]
pub unsafe extern "C" fn sm_map_decompose(map: *const SmMap, out: *mut SmDecomposition) -> SmStatus {
    guard(|| {
        let Some(m) = map.as_ref() else { return fail(SmStatus::SmErrNull, "null map") };
        if out.is_null() {
            return fail(SmStatus::SmErrNull, "null argument");
        }
        match decompose(&m.0) {
            Ok(d) => {
                *out = SmDecomposition {
                    defect: d.defect(),
                    core_edges: d.core_edges(),
                    kernel_edges: d.kernel_edges(),
                    first_tree_time: d.forest.first_tree_time(),
                };
                SmStatus::SmOk
            }
            Err(e) => fail(SmStatus::SmErrDomain, e.to_string()),
        }
    })
}

/// Closed-form trivalent counts for every `s ≤ s_max`.
#[no_mangle]
pub unsafe extern "C" fn sm_table_closed_forms(s_max: usize, out: *mut *mut SmTable) -> SmStatus {
    guard(|| {
        if out.is_null() {
            return fail(SmStatus::SmErrNull, "null argument");
        }
        *out = Box::into_raw(Box::new(SmTable(DefectTable::closed_forms(s_max.max(3)))));
        SmStatus::SmOk
    })
}

/// Loads a table file and merges it over the closed forms.
#[no_mangle]
pub unsafe extern "C" fn sm_table_load(path: *const c_char, out: *mut *mut SmTable) -> SmStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(SmStatus::SmErrNull, "null argument");
        }
        let Ok(p) = CStr::from_ptr(path).to_str() else {
            return fail(SmStatus::SmErrInvalid, "path is not UTF-8");
        };
        let loaded = match std::fs::read_to_string(p) {
            Ok(text) => DefectTable::from_json(&text),
            Err(e) => return fail(SmStatus::SmErrIo, format!("{p}: {e}")),
        };
        let mut table = DefectTable::closed_forms(41);
        match loaded.and_then(|t| table.merge(&t)) {
            Ok(()) => {
                *out = Box::into_raw(Box::new(SmTable(table)));
                SmStatus::SmOk
            }
            Err(e) => fail(enum_status(&e), e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn sm_table_free(table: *mut SmTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of rooted maps. Writes its natural log to `ln_out` and, when the
/// value is exact, its decimal digits to `buf` (`needed` is 0 otherwise).
#[no_mangle]
pub unsafe extern "C" fn sm_count(
    n: usize,
    faces: usize,
    genus: usize,
    table: *const SmTable,
    ln_out: *mut f64,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> SmStatus {
    guard(|| {
        let Some(t) = table.as_ref() else { return fail(SmStatus::SmErrNull, "null table") };
        match total_count(n, faces, genus, &t.0) {
            Ok(v) => {
                if !ln_out.is_null() {
                    *ln_out = v.ln();
                }
                match v {
                    EnumValue::Exact(x) => write_str(&x.to_string(), buf, len, needed),
                    EnumValue::Log { .. } => {
                        if !needed.is_null() {
                            *needed = 0;
                        }
                        SmStatus::SmOk
                    }
                }
            }
            Err(e) => fail(enum_status(&e), e.to_string()),
        }
    })
}

/// Sampler for maps with `n` edges, `faces` faces and genus `genus`. Trees,
/// one-face maps and cycle cores are supported; other classes need kernels
/// that only the CLI's oracle provides.
#[no_mangle]
pub unsafe extern "C" fn sm_sampler_new(
    n: usize,
    faces: usize,
    genus: usize,
    mode: SmMode,
    table: *const SmTable,
    out: *mut *mut SmSampler,
) -> SmStatus {
    guard(|| {
        let Some(t) = table.as_ref() else { return fail(SmStatus::SmErrNull, "null table") };
        if out.is_null() {
            return fail(SmStatus::SmErrNull, "null argument");
        }
        let mode = match mode {
            SmMode::SmModeExact => Mode::Exact,
            SmMode::SmModeApproximate => Mode::Approximate,
        };
        match Pipeline::new(n, faces, genus, mode, &t.0, &KERNELS) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(SmSampler(p)));
                SmStatus::SmOk
            }
            Err(e) => fail(sample_status(&e), e.to_string()),
        }
    })
}

/// One uniform map from the stream `(seed, replica)`.
#[no_mangle]
pub unsafe extern "C" fn sm_sampler_draw(
    sampler: *const SmSampler,
    seed: u64,
    replica: u64,
    out: *mut *mut SmMap,
) -> SmStatus {
    guard(|| {
        let Some(s) = sampler.as_ref() else { return fail(SmStatus::SmErrNull, "null sampler") };
        if out.is_null() {
            return fail(SmStatus::SmErrNull, "null argument");
        }
        let mut rng = RngHandle::with_replica(seed, replica);
        match s.0.draw_map(&mut rng) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(SmMap(m)));
                SmStatus::SmOk
            }
            Err(e) => fail(sample_status(&e), e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn sm_sampler_free(sampler: *mut SmSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}
