//! C interface to the mdres engine.
//!
//! A session owns a loaded instance and MD set. Operations write a JSON report
//! into a newly allocated string that the caller releases with
//! [`mdres_string_free`]. Every function returns an [`MdresStatus`]; on failure
//! [`mdres_last_error`] describes the problem.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use mdres::bundle::{Bundle, BundlePaths};
use mdres::query::{ConjunctiveQuery, Mode};
use mdres::report::{self, Report};
use mdres::resolve::Bounds;
use mdres::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdresStatus {
    Ok = 0,
    /// Malformed input files, query text or arguments.
    InvalidInput = 1,
    /// The MD set or query is outside the class the operation requires.
    Ineligible = 2,
    /// The exhaustive chase hit one of its bounds.
    BoundsExceeded = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
    /// A string argument was not valid UTF-8.
    Utf8 = 5,
    /// A file could not be read or written.
    Io = 6,
    /// An unexpected internal failure.
    Internal = 7,
}

/// A loaded instance with its MDs.
pub struct MdresSession {
    bundle: Bundle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no interior nul")));
}

struct Failure(MdresStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => MdresStatus::Io,
            _ => match e.exit_code() {
                2 => MdresStatus::Ineligible,
                3 => MdresStatus::BoundsExceeded,
                _ => MdresStatus::InvalidInput,
            },
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MdresStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MdresStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MdresStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MdresStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MdresStatus::Utf8, format!("{what} is not valid UTF-8")))
}

unsafe fn session<'a>(s: *const MdresSession) -> Result<&'a MdresSession, Failure> {
    s.as_ref()
        .ok_or_else(|| Failure(MdresStatus::NullPointer, "session is null".into()))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(MdresStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Failure(MdresStatus::Internal, "report contains nul".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_report(out: *mut *mut c_char, r: Report) -> Result<(), Failure> {
    put_string(out, r.json.to_string())
}

unsafe fn load(paths: BundlePaths, out: *mut *mut MdresSession) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(MdresStatus::NullPointer, "output pointer is null".into()));
    }
    let bundle = Bundle::load(&paths)?;
    *out = Box::into_raw(Box::new(MdresSession { bundle }));
    Ok(())
}

/// Loads a directory holding `schema.txt`, `data/`, `mds.txt` and optionally
/// `sims.txt`. On success `*out` owns a session freed by [`mdres_session_free`].
///
/// # Safety
/// `dir` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mdres_session_load_dir(
    dir: *const c_char,
    out: *mut *mut MdresSession,
) -> MdresStatus {
    guard(|| {
        let dir = PathBuf::from(text(dir, "dir")?);
        load(BundlePaths::in_dir(&dir), out)
    })
}

/// Loads a session from explicit paths. `sims` may be null, meaning equality only.
///
/// # Safety
/// Non-null string arguments must be nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mdres_session_load(
    schema: *const c_char,
    data_dir: *const c_char,
    mds: *const c_char,
    sims: *const c_char,
    out: *mut *mut MdresSession,
) -> MdresStatus {
    guard(|| {
        let paths = BundlePaths {
            schema: text(schema, "schema")?.into(),
            data: text(data_dir, "data_dir")?.into(),
            mds: text(mds, "mds")?.into(),
            sims: if sims.is_null() { None } else { Some(text(sims, "sims")?.into()) },
        };
        load(paths, out)
    })
}

/// Releases a session. Null is ignored.
///
/// # Safety
/// `s` must come from a load function and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mdres_session_free(s: *mut MdresSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Tractability class of the session's MD set, as JSON.
///
/// # Safety
/// `s` must be a live session and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mdres_classify_json(s: *const MdresSession, out: *mut *mut c_char) -> MdresStatus {
    guard(|| put_report(out, report::classify(&session(s)?.bundle)))
}

/// Closure blocks with value frequencies, as JSON.
///
/// # Safety
/// `s` must be a live session and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mdres_closure_json(s: *const MdresSession, out: *mut *mut c_char) -> MdresStatus {
    guard(|| put_report(out, report::closure(&session(s)?.bundle)))
}

/// The MRI family of a non-interacting or hit-simple-cyclic set, with up to
/// `max_materialized` MRIs listed.
///
/// # Safety
/// `s` must be a live session and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mdres_resolve_json(
    s: *const MdresSession,
    max_materialized: usize,
    out: *mut *mut c_char,
) -> MdresStatus {
    guard(|| put_report(out, report::resolve(&session(s)?.bundle, max_materialized)?))
}

/// Resolved answers to `query`. `mode` is `"auto"`, `"rewrite"` or `"oracle"`;
/// null means `"auto"`. The oracle runs under its default bounds.
///
/// # Safety
/// `s` must be a live session, string arguments nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mdres_answers_json(
    s: *const MdresSession,
    query: *const c_char,
    mode: *const c_char,
    out: *mut *mut c_char,
) -> MdresStatus {
    guard(|| {
        let b = &session(s)?.bundle;
        let q = ConjunctiveQuery::parse(text(query, "query")?, &b.schema)?;
        let mode: Mode = if mode.is_null() { Mode::Auto } else { text(mode, "mode")?.parse()? };
        put_report(out, report::answers(b, &q, mode, &Bounds::default())?)
    })
}

/// MRIs by exhaustive chase. `max_states` of zero keeps the default bound.
///
/// # Safety
/// `s` must be a live session and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mdres_oracle_json(
    s: *const MdresSession,
    max_states: usize,
    max_materialized: usize,
    out: *mut *mut c_char,
) -> MdresStatus {
    guard(|| {
        let mut bounds = Bounds::default();
        if max_states > 0 {
            bounds.max_states = max_states;
        }
        put_report(out, report::oracle(&session(s)?.bundle, &bounds, max_materialized)?)
    })
}

/// The Datalog program computing the closure.
///
/// # Safety
/// `s` must be a live session and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mdres_emit_datalog(s: *const MdresSession, out: *mut *mut c_char) -> MdresStatus {
    guard(|| put_string(out, report::datalog(&session(s)?.bundle)))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `p` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mdres_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mdres_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
