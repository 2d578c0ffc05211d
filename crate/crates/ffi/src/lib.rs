//! C ABI over `kgraph`.
//!
//! Every fallible function returns a [`KgStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`kg_last_error_message`] on the same thread. Handles and strings
//! returned by the library are released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kgraph::cli::simulate;
use kgraph::error::Error;
use kgraph::exactla::IntMatrix;
use kgraph::graphgen::AdjacencyMatrix;
use kgraph::invariants::{compute_invariant, KInvariant};
use kgraph::montecarlo::RunConfig;
use kgraph::theory::{named_constant, ConstantArgs, Status};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgStatus {
    Ok = 0,
    InvalidInput = 1,
    Unsupported = 2,
    Parse = 3,
    Assertion = 4,
    Io = 5,
    NullPointer = 6,
    Utf8 = 7,
    Panic = 8,
}

/// Tag of a limit constant.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgTheoryStatus {
    Theorem = 0,
    Conjecture = 1,
    Open = 2,
}

/// Opaque adjacency matrix.
pub struct KgMatrix {
    inner: AdjacencyMatrix,
}

/// Opaque classification record of one graph.
pub struct KgInvariant {
    inner: KInvariant,
}

/// Predicate flags of a [`KgInvariant`]; each field is 0 or 1.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KgPredicates {
    pub strongly_connected: u8,
    pub has_sink: u8,
    pub k0_cyclic: u8,
    pub stably_cuntz_polygon: u8,
    pub stably_cuntz_algebra: u8,
    pub exactly_cuntz_polygon: u8,
    pub exactly_cuntz_algebra: u8,
    pub flow_equiv_full_shift: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KgStatus {
    match e {
        Error::InvalidInput(_) => KgStatus::InvalidInput,
        Error::Unsupported(_) => KgStatus::Unsupported,
        Error::Parse { .. } => KgStatus::Parse,
        Error::Assertion { .. } => KgStatus::Assertion,
        Error::Io(_) => KgStatus::Io,
    }
}

fn fail(status: KgStatus, msg: impl Into<String>) -> KgStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), KgStatus>>(f: F) -> KgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(KgStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: kgraph::error::Result<T>) -> Result<T, KgStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn not_null<T>(p: *const T, what: &str) -> Result<(), KgStatus> {
    if p.is_null() {
        Err(fail(KgStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, KgStatus> {
    not_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(KgStatus::Utf8, format!("{what} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn kg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn kg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an `n × n` adjacency matrix from `n²` row-major entries.
///
/// # Safety
/// `entries` must point to `n * n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_matrix_new(n: usize, entries: *const u32, out: *mut *mut KgMatrix) -> KgStatus {
    guard(|| {
        not_null(out, "out")?;
        if n == 0 {
            return Err(fail(KgStatus::InvalidInput, "matrix must have at least one row"));
        }
        not_null(entries, "entries")?;
        let len = n
            .checked_mul(n)
            .ok_or_else(|| fail(KgStatus::InvalidInput, "matrix too large"))?;
        let data = std::slice::from_raw_parts(entries, len);
        let rows: Vec<Vec<u32>> = data.chunks(n).map(|r| r.to_vec()).collect();
        let inner = lift(AdjacencyMatrix::from_rows(&rows))?;
        *out = Box::into_raw(Box::new(KgMatrix { inner }));
        Ok(())
    })
}

/// Parses a matrix in the text format: a `rows cols` header, then one row
/// per line.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_matrix_parse(text: *const c_char, out: *mut *mut KgMatrix) -> KgStatus {
    guard(|| {
        not_null(out, "out")?;
        let text = read_str(text, "text")?;
        let m = lift(IntMatrix::parse(text))?;
        let inner = lift(AdjacencyMatrix::from_int_matrix(&m))?;
        *out = Box::into_raw(Box::new(KgMatrix { inner }));
        Ok(())
    })
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kg_matrix_size(m: *const KgMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.n())
}

/// # Safety
/// `m` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kg_matrix_free(m: *mut KgMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Classifies the graph of `m`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_invariant_compute(m: *const KgMatrix, out: *mut *mut KgInvariant) -> KgStatus {
    guard(|| {
        not_null(m, "matrix")?;
        not_null(out, "out")?;
        let inner = compute_invariant(&(*m).inner);
        *out = Box::into_raw(Box::new(KgInvariant { inner }));
        Ok(())
    })
}

/// # Safety
/// `inv` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kg_invariant_free(inv: *mut KgInvariant) {
    if !inv.is_null() {
        drop(Box::from_raw(inv));
    }
}

/// Rank of K₁.
///
/// # Safety
/// `inv` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_invariant_k1_rank(inv: *const KgInvariant, out: *mut usize) -> KgStatus {
    guard(|| {
        not_null(inv, "invariant")?;
        not_null(out, "out")?;
        *out = (*inv).inner.k1_rank;
        Ok(())
    })
}

/// Sign of `det(I − A)`: −1, 0 or 1.
///
/// # Safety
/// `inv` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_invariant_det_sign(inv: *const KgInvariant, out: *mut i32) -> KgStatus {
    guard(|| {
        not_null(inv, "invariant")?;
        not_null(out, "out")?;
        *out = i32::from((*inv).inner.det_sign());
        Ok(())
    })
}

/// Predicate flags.
///
/// # Safety
/// `inv` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_invariant_predicates(inv: *const KgInvariant, out: *mut KgPredicates) -> KgStatus {
    guard(|| {
        not_null(inv, "invariant")?;
        not_null(out, "out")?;
        let k = &(*inv).inner;
        *out = KgPredicates {
            strongly_connected: k.strongly_connected.into(),
            has_sink: k.has_sink.into(),
            k0_cyclic: k.k0_cyclic().into(),
            stably_cuntz_polygon: k.stably_cuntz_polygon().holds.into(),
            stably_cuntz_algebra: k.stably_cuntz_algebra().holds.into(),
            exactly_cuntz_polygon: k.exactly_cuntz_polygon().holds.into(),
            exactly_cuntz_algebra: k.exactly_cuntz_algebra().holds.into(),
            flow_equiv_full_shift: k.flow_equiv_full_shift().holds.into(),
        };
        Ok(())
    })
}

/// Full record as JSON; release with [`kg_string_free`].
///
/// # Safety
/// `inv` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_invariant_to_json(inv: *const KgInvariant, out: *mut *mut c_char) -> KgStatus {
    guard(|| {
        not_null(inv, "invariant")?;
        not_null(out, "out")?;
        *out = to_c_string((*inv).inner.to_json().to_string());
        Ok(())
    })
}

/// Looks up a named limit constant. `p` and `r` are ignored when 0.
///
/// # Safety
/// `name` must be a nul-terminated string; `value` and `status` writable.
#[no_mangle]
pub unsafe extern "C" fn kg_theory_constant(
    name: *const c_char,
    p: u64,
    r: u64,
    value: *mut f64,
    status: *mut KgTheoryStatus,
) -> KgStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        not_null(value, "value")?;
        not_null(status, "status")?;
        let args = ConstantArgs {
            p: (p != 0).then_some(p),
            r: (r != 0).then_some(r),
        };
        let v = lift(named_constant(name, args))?;
        *value = v.value;
        *status = match v.status {
            Status::Theorem => KgTheoryStatus::Theorem,
            Status::Conjecture => KgTheoryStatus::Conjecture,
            Status::Open => KgTheoryStatus::Open,
        };
        Ok(())
    })
}

/// Runs a simulation described by a run-config JSON object and returns the
/// summary JSON; release with [`kg_string_free`].
///
/// # Safety
/// `config_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_simulate_json(config_json: *const c_char, out: *mut *mut c_char) -> KgStatus {
    guard(|| {
        let text = read_str(config_json, "config")?;
        not_null(out, "out")?;
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| fail(KgStatus::InvalidInput, format!("bad config: {e}")))?;
        let summary = lift(simulate(&cfg, None))?;
        let json = serde_json::to_string(&summary).map_err(|e| fail(KgStatus::Io, e.to_string()))?;
        *out = to_c_string(json);
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
