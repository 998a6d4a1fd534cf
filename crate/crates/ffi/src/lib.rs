//! C ABI over `pda_workbench`.
//!
//! Grids live behind opaque `PdaHandle` pointers. Every fallible call returns
//! a `PdaStatus`; on failure `pda_last_error` describes what went wrong on the
//! calling thread. Users, rows and files are 1-based on this side.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use pda_workbench::bound::{exact_bound, greedy_bound, search_min_max, ExactLimits, SearchLimits, SearchMode};
use pda_workbench::construct::{bipartite_pda, grouping_pda, mn_pda, partition_pda, BipartiteSpec, PartitionSpec};
use pda_workbench::pda::text::{parse_pda, write_pda};
use pda_workbench::sim::{measure_rate, DemandSampler, DemandVector, FileLibrary};
use pda_workbench::{BoundCertificate, Error, PdaGrid};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdaStatus {
    Ok = 0,
    InvalidArgument = 1,
    ParseError = 2,
    Malformed = 3,
    VerificationFailed = 4,
    BudgetExceeded = 5,
    NullPointer = 6,
    Internal = 7,
}

/// A PDA owned by the library. Free with `pda_free`.
pub struct PdaHandle {
    grid: PdaGrid,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PdaParams {
    pub users: usize,
    pub rows: usize,
    pub stars: usize,
    pub symbols: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PdaBound {
    pub value: u64,
    /// Reduced `value / F`.
    pub rate_num: u64,
    pub rate_den: u64,
    pub exact: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: PdaStatus, msg: impl Into<String>) -> PdaStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> PdaStatus {
    match e {
        Error::Parse { .. } => PdaStatus::ParseError,
        Error::Malformed(_) | Error::NonUniformStars { .. } => PdaStatus::Malformed,
        Error::InvalidParams(_) | Error::Overflow(_) | Error::InvalidOrdering(_) => {
            PdaStatus::InvalidArgument
        }
        Error::Decode { .. } | Error::Undeliverable { .. } => PdaStatus::VerificationFailed,
    }
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), PdaStatus> + UnwindSafe) -> PdaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(f) {
        Ok(Ok(())) => PdaStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(PdaStatus::Internal, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, PdaStatus>;
}

impl<T> OrStatus<T> for pda_workbench::Result<T> {
    fn or_status(self) -> Result<T, PdaStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn handle_ref<'a>(h: *const PdaHandle) -> Result<&'a PdaHandle, PdaStatus> {
    h.as_ref().ok_or_else(|| fail(PdaStatus::NullPointer, "null handle"))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, PdaStatus> {
    p.as_mut().ok_or_else(|| fail(PdaStatus::NullPointer, "null output pointer"))
}

unsafe fn emit(out: *mut *mut PdaHandle, grid: PdaGrid) -> Result<(), PdaStatus> {
    *out_ref(out)? = Box::into_raw(Box::new(PdaHandle { grid }));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn pda_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_construct_partition(q: usize, m: usize, out: *mut *mut PdaHandle) -> PdaStatus {
    guard(|| {
        let grid = PartitionSpec::new(q, m).and_then(partition_pda).or_status()?;
        emit(out, grid)
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_construct_bipartite(
    m: usize,
    a: usize,
    b: usize,
    out: *mut *mut PdaHandle,
) -> PdaStatus {
    guard(|| {
        let grid = BipartiteSpec::new(m, a, b, 1).and_then(bipartite_pda).or_status()?;
        emit(out, grid)
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_construct_grouping(
    m: usize,
    a: usize,
    b: usize,
    h: usize,
    out: *mut *mut PdaHandle,
) -> PdaStatus {
    guard(|| {
        let grid = BipartiteSpec::new(m, a, b, h).and_then(grouping_pda).or_status()?;
        emit(out, grid)
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_construct_mn(users: usize, t: usize, out: *mut *mut PdaHandle) -> PdaStatus {
    guard(|| emit(out, mn_pda(users, t).or_status()?))
}

/// Parses the `PDA F K` text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_parse(text: *const c_char, out: *mut *mut PdaHandle) -> PdaStatus {
    guard(|| {
        if text.is_null() {
            return Err(fail(PdaStatus::NullPointer, "null text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| fail(PdaStatus::ParseError, "input is not UTF-8"))?;
        emit(out, parse_pda(text).or_status()?)
    })
}

/// # Safety
/// `handle` must be NULL or come from this library and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn pda_free(handle: *mut PdaHandle) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// `(K, F, Z, S)`. Fails with `MALFORMED` when columns disagree on `Z`.
///
/// # Safety
/// `handle` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_params(handle: *const PdaHandle, out: *mut PdaParams) -> PdaStatus {
    guard(|| {
        let p = handle_ref(handle)?.grid.params().or_status()?;
        *out_ref(out)? = PdaParams {
            users: p.users,
            rows: p.rows,
            stars: p.stars,
            symbols: p.symbols,
        };
        Ok(())
    })
}

/// Returns `OK` for a valid PDA and `VERIFICATION_FAILED` otherwise, with
/// the first violation as the error message.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pda_verify(handle: *const PdaHandle) -> PdaStatus {
    guard(|| {
        let v = handle_ref(handle)?.grid.verify();
        match v.violations().first() {
            None => Ok(()),
            Some(first) => Err(fail(
                PdaStatus::VerificationFailed,
                format!("{} violation(s); first: {first}", v.violations().len()),
            )),
        }
    })
}

/// Renders the grid in the `PDA F K` format. Release with `pda_string_free`.
///
/// # Safety
/// `handle` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_to_text(handle: *const PdaHandle, out: *mut *mut c_char) -> PdaStatus {
    guard(|| {
        let text = write_pda(&handle_ref(handle)?.grid);
        *out_ref(out)? = CString::new(text).expect("no NUL in output").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pda_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn write_bound(
    cert: &BoundCertificate,
    out: *mut PdaBound,
    witness: *mut usize,
    witness_len: usize,
) -> Result<(), PdaStatus> {
    let rate = cert.rate_bound();
    *out_ref(out)? = PdaBound {
        value: cert.value,
        rate_num: *rate.numer(),
        rate_den: *rate.denom(),
        exact: cert.exact,
    };
    if !witness.is_null() {
        let order = cert.witness.one_based();
        if witness_len < order.len() {
            return Err(fail(
                PdaStatus::InvalidArgument,
                format!("witness buffer holds {witness_len}, need {}", order.len()),
            ));
        }
        std::slice::from_raw_parts_mut(witness, order.len()).copy_from_slice(&order);
    }
    Ok(())
}

/// Exact ordering bound of the handle's star pattern. When the node budget
/// or `max_users` is exceeded the greedy value is written and
/// `BUDGET_EXCEEDED` returned. `witness` (1-based users) may be NULL.
///
/// # Safety
/// `handle` must be live, `out` valid for writes, and `witness` NULL or
/// valid for `witness_len` writes.
#[no_mangle]
pub unsafe extern "C" fn pda_bound_exact(
    handle: *const PdaHandle,
    max_users: usize,
    node_budget: u64,
    out: *mut PdaBound,
    witness: *mut usize,
    witness_len: usize,
) -> PdaStatus {
    guard(|| {
        let limits = ExactLimits { max_users, node_budget };
        let cert = exact_bound(&handle_ref(handle)?.grid.star_pattern(), limits);
        write_bound(&cert, out, witness, witness_len)?;
        if cert.exact {
            Ok(())
        } else {
            Err(fail(PdaStatus::BudgetExceeded, "exact bound not certified; greedy value returned"))
        }
    })
}

/// # Safety
/// As for `pda_bound_exact`.
#[no_mangle]
pub unsafe extern "C" fn pda_bound_greedy(
    handle: *const PdaHandle,
    out: *mut PdaBound,
    witness: *mut usize,
    witness_len: usize,
) -> PdaStatus {
    guard(|| {
        let cert = greedy_bound(&handle_ref(handle)?.grid.star_pattern());
        write_bound(&cert, out, witness, witness_len)
    })
}

/// Delivers and decodes one demand (`K` 1-based file indices, or NULL for
/// every one of the `files^K` demands) on seeded random files. Writes the
/// worst-case signal count; returns `VERIFICATION_FAILED` if any user fails
/// to recover its file.
///
/// # Safety
/// `handle` must be live, `demand` NULL or valid for `K` reads, and
/// `signals` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_simulate(
    handle: *const PdaHandle,
    files: usize,
    demand: *const usize,
    packet_len: usize,
    seed: u64,
    signals: *mut usize,
) -> PdaStatus {
    guard(|| {
        let grid = &handle_ref(handle)?.grid;
        let lib = FileLibrary::generate(files, grid.rows(), packet_len, seed).or_status()?;
        let sampler = if demand.is_null() {
            DemandSampler::All
        } else {
            let one_based = std::slice::from_raw_parts(demand, grid.cols());
            if one_based.contains(&0) {
                return Err(fail(PdaStatus::InvalidArgument, "demand entries are 1-based"));
            }
            let d = DemandVector::new(one_based.iter().map(|f| f - 1).collect(), files).or_status()?;
            DemandSampler::Fixed(vec![d])
        };
        let m = measure_rate(grid, &lib, &sampler).or_status()?;
        *out_ref(signals)? = m.max_signals;
        if m.all_decoded {
            Ok(())
        } else {
            Err(fail(PdaStatus::VerificationFailed, "decoded file differs from the original"))
        }
    })
}

/// Min over placements with `K` users, `F` rows and `Z` stars per column of
/// the exact ordering bound, with isomorphic placements skipped. Returns
/// `BUDGET_EXCEEDED` (with the best value found) when the search was cut
/// short.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pda_search(
    users: usize,
    rows: usize,
    stars: usize,
    placement_budget: u64,
    out: *mut PdaBound,
) -> PdaStatus {
    guard(|| {
        let limits = SearchLimits {
            placement_budget,
            ..Default::default()
        };
        let r = search_min_max(users, rows, stars, SearchMode::Canonical, limits).or_status()?;
        let rate = r.rate_bound();
        *out_ref(out)? = PdaBound {
            value: r.best_value,
            rate_num: *rate.numer(),
            rate_den: *rate.denom(),
            exact: r.exhaustive,
        };
        if r.exhaustive {
            Ok(())
        } else {
            Err(fail(PdaStatus::BudgetExceeded, "placement budget exhausted"))
        }
    })
}
