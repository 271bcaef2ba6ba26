//! C ABI over `radlab`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`RadlabStatus`]; the message of the last failure on the calling thread
//! is available from [`radlab_last_error`]. Strings returned to the caller
//! are NUL-terminated and must be released with [`radlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use radlab::formal::{lambda_extract, support_test, SupportVerdict};
use radlab::space::OperatorJson;
use radlab::spectral::operator_norm;
use radlab::{realize, Colour, ColourSequence, Error, FormalElement, SparseOperator, TruncatedBasis, Word};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotAColour = 4,
    Budget = 5,
    Schema = 6,
    BasisMismatch = 7,
    NoWitness = 8,
    Precondition = 9,
    NoConvergence = 10,
    Internal = 11,
}

/// A truncated basis of all words up to a fixed length.
pub struct RadlabBasis(TruncatedBasis);

/// A sparse operator on a truncated basis.
pub struct RadlabOperator(SparseOperator);

/// A finite linear combination of colour sequences.
pub struct RadlabElement(FormalElement);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("NUL removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(error: &Error) -> RadlabStatus {
    match error {
        Error::Parse { .. } | Error::EmptyInput => RadlabStatus::Parse,
        Error::NotAColour { .. } => RadlabStatus::NotAColour,
        Error::LengthCap { .. } | Error::Budget { .. } => RadlabStatus::Budget,
        Error::Schema { .. } => RadlabStatus::Schema,
        Error::BasisMismatch => RadlabStatus::BasisMismatch,
        Error::NoWitnessInTruncation { .. } => RadlabStatus::NoWitness,
        Error::NoConvergence { .. } => RadlabStatus::NoConvergence,
        _ => RadlabStatus::Precondition,
    }
}

struct Failure(RadlabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `body`, records any failure and turns panics into `Internal`.
fn guard<F: FnOnce() -> Result<(), Failure>>(body: F) -> RadlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RadlabStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            RadlabStatus::Internal
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure(RadlabStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| Failure(RadlabStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(ptr: *const T) -> Result<&'a T, Failure> {
    ptr.as_ref()
        .ok_or_else(|| Failure(RadlabStatus::NullPointer, "null handle".into()))
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(RadlabStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn store_string(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    let value = CString::new(value).map_err(|e| Failure(RadlabStatus::Internal, e.to_string()))?;
    store(out, value.into_raw())
}

fn sequence(colours: &str) -> Result<ColourSequence, Failure> {
    let colours = colours
        .split(',')
        .map(|c| c.trim().parse::<Colour>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ColourSequence::new(colours)?)
}

/// Copies the last error message of this thread into a new string, or
/// returns null if there was none.
#[no_mangle]
pub extern "C" fn radlab_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |m| m.clone().into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn radlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes the colour `μ(word)` as a new string.
///
/// # Safety
/// `word` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_colour_map(word: *const c_char, out: *mut *mut c_char) -> RadlabStatus {
    guard(|| {
        let word: Word = text(word)?.parse()?;
        store_string(out, word.colour()?.to_string())
    })
}

/// `log2` of the depth weight and of the path weight of `word`.
///
/// # Safety
/// `word` must be a NUL-terminated string; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_word_weights(
    word: *const c_char,
    weight_log2: *mut i64,
    path_weight_log2: *mut i64,
) -> RadlabStatus {
    guard(|| {
        let word: Word = text(word)?.parse()?;
        store(weight_log2, word.weight().log2())?;
        store(path_weight_log2, word.path_weight().log2())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_basis_new(max_len: usize, out: *mut *mut RadlabBasis) -> RadlabStatus {
    guard(|| {
        let basis = TruncatedBasis::new(max_len)?;
        store(out, Box::into_raw(Box::new(RadlabBasis(basis))))
    })
}

/// Number of words in the basis; 0 for a null handle.
///
/// # Safety
/// `basis` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn radlab_basis_dimension(basis: *const RadlabBasis) -> usize {
    use radlab::space::Basis;
    basis.as_ref().map_or(0, |b| b.0.dimension())
}

/// # Safety
/// `basis` must be null or a live handle, which is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn radlab_basis_free(basis: *mut RadlabBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Parses `{"terms": [{"coeff": [re, im], "colours": [...]}, ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_element_from_json(json: *const c_char, out: *mut *mut RadlabElement) -> RadlabStatus {
    guard(|| {
        let value: serde_json::Value = serde_json::from_str(text(json)?).map_err(|e| {
            Failure(RadlabStatus::Schema, e.to_string())
        })?;
        let element = FormalElement::from_json_value(&value)?;
        store(out, Box::into_raw(Box::new(RadlabElement(element))))
    })
}

/// # Safety
/// `element` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_element_to_json(element: *const RadlabElement, out: *mut *mut c_char) -> RadlabStatus {
    guard(|| {
        let element = handle(element)?;
        let json = serde_json::to_string(&element.0.to_json())
            .map_err(|e| Failure(RadlabStatus::Internal, e.to_string()))?;
        store_string(out, json)
    })
}

/// # Safety
/// `element` must be null or a live handle, which is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn radlab_element_free(element: *mut RadlabElement) {
    if !element.is_null() {
        drop(Box::from_raw(element));
    }
}

/// The operator of `element` on `basis`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_realize(
    element: *const RadlabElement,
    basis: *const RadlabBasis,
    out: *mut *mut RadlabOperator,
) -> RadlabStatus {
    guard(|| {
        let op = realize(&handle(element)?.0, &handle(basis)?.0);
        store(out, Box::into_raw(Box::new(RadlabOperator(op))))
    })
}

/// `a · b`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_operator_compose(
    a: *const RadlabOperator,
    b: *const RadlabOperator,
    out: *mut *mut RadlabOperator,
) -> RadlabStatus {
    guard(|| {
        let product = handle(a)?.0.compose(&handle(b)?.0)?;
        store(out, Box::into_raw(Box::new(RadlabOperator(product))))
    })
}

/// Largest singular value to relative accuracy `tol`.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_operator_norm(op: *const RadlabOperator, tol: f64, out: *mut f64) -> RadlabStatus {
    guard(|| {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Failure(RadlabStatus::Precondition, "tolerance must be positive".into()));
        }
        let norm = operator_norm(&handle(op)?.0, tol)?;
        store(out, norm.value)
    })
}

/// The entry `<T e_col, e_row>`.
///
/// # Safety
/// `op` must be a live handle; the words must be NUL-terminated; the
/// outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_operator_entry(
    op: *const RadlabOperator,
    row: *const c_char,
    col: *const c_char,
    re: *mut f64,
    im: *mut f64,
) -> RadlabStatus {
    guard(|| {
        let op = handle(op)?;
        let row: Word = text(row)?.parse()?;
        let col: Word = text(col)?.parse()?;
        let value = op.0.entry_at(&row, &col);
        store(re, value.re)?;
        store(im, value.im)
    })
}

/// Serializes as `{"max_len": L, "entries": [[row, col, re, im], ...]}`.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_operator_to_json(op: *const RadlabOperator, out: *mut *mut c_char) -> RadlabStatus {
    guard(|| {
        let json: OperatorJson = handle(op)?.0.to_json();
        let text = serde_json::to_string(&json).map_err(|e| Failure(RadlabStatus::Internal, e.to_string()))?;
        store_string(out, text)
    })
}

/// # Safety
/// `op` must be null or a live handle, which is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn radlab_operator_free(op: *mut RadlabOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Coefficient of the comma-separated colour sequence in `op`.
///
/// # Safety
/// `op` must be a live handle; `colours` must be NUL-terminated; the
/// outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_lambda_extract(
    op: *const RadlabOperator,
    colours: *const c_char,
    re: *mut f64,
    im: *mut f64,
) -> RadlabStatus {
    guard(|| {
        let op = handle(op)?;
        let value = lambda_extract(&op.0, &sequence(text(colours)?)?)?;
        store(re, value.re)?;
        store(im, value.im)
    })
}

/// First word whose colour trace is the comma-separated sequence, or an
/// empty string if none has length `<= max_len`.
///
/// # Safety
/// `colours` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn radlab_support_test(
    colours: *const c_char,
    max_len: usize,
    out: *mut *mut c_char,
) -> RadlabStatus {
    guard(|| {
        let verdict = support_test(&sequence(text(colours)?)?, max_len)?;
        let witness = match verdict {
            SupportVerdict::Witness(t) => t.to_string(),
            SupportVerdict::NoWitnessUpTo(_) => String::new(),
        };
        store_string(out, witness)
    })
}
