//! C ABI over `bnx-core`.
//!
//! Every fallible function returns a [`BnxStatus`]; on failure a message is
//! available from [`bnx_last_error`] on the same thread. Objects are opaque
//! handles released with their `_free` function; strings returned through
//! `char **` out-parameters are released with [`bnx_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bnx_core::classifier::Classifier;
use bnx_core::compiler::compile_classifier;
use bnx_core::dd::{Dd, Instance, Manager};
use bnx_core::explain::{explain_pi, mc_explanations};
use bnx_core::io::{
    deserialize_odd, load_classifier, load_odd, parse_classifier, save_odd, serialize_odd, to_dot,
};
use bnx_core::monotone::is_monotone;
use bnx_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnxStatus {
    Ok = 0,
    Io = 1,
    InvalidArgument = 2,
    Parse = 3,
    Capacity = 4,
    Verification = 5,
    Contract = 6,
    NullPointer = 7,
    InvalidUtf8 = 8,
    Internal = 9,
}

/// Explanation kinds for [`bnx_explain`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnxExplainKind {
    /// Minimum-cardinality explanations.
    Mc = 0,
    /// All prime-implicant explanations.
    Pi = 1,
    /// Shortest prime-implicant explanations only.
    PiShortest = 2,
}

/// A loaded classifier.
pub struct BnxClassifier {
    inner: Classifier,
}

/// A decision diagram together with the classifier feature order it was
/// compiled with (identity when loaded from a file).
pub struct BnxOdd {
    manager: Manager,
    root: Dd,
    order: Vec<usize>,
}

/// A set of explanations rendered as text, one string per explanation.
pub struct BnxExplanation {
    decision: bool,
    count: CString,
    items: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> BnxStatus {
    match e {
        Error::Io(_) => BnxStatus::Io,
        Error::Parse(_) | Error::Normalization { .. } | Error::Structure(_) | Error::Range(_) => {
            BnxStatus::Parse
        }
        Error::Capacity { .. } => BnxStatus::Capacity,
        Error::Verification(_) => BnxStatus::Verification,
        Error::Contract(_) => BnxStatus::Contract,
        _ => BnxStatus::InvalidArgument,
    }
}

struct Failure(BnxStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BnxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BnxStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BnxStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BnxStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BnxStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn instance_arg(values: *const usize, len: usize) -> Result<Instance, Failure> {
    Ok(Instance(slice_arg(values, len, "values")?.to_vec()))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

fn c_string(s: String) -> Result<CString, Failure> {
    CString::new(s).map_err(|_| Failure(BnxStatus::Internal, "string contains a NUL byte".into()))
}

/// Message for the most recent failure on this thread, or NULL. Valid until
/// the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn bnx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bnx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a classifier file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_classifier_load(
    path: *const c_char,
    out: *mut *mut BnxClassifier,
) -> BnxStatus {
    guard(|| {
        let c = load_classifier(str_arg(path, "path")?)?;
        put(out, Box::into_raw(Box::new(BnxClassifier { inner: c })))
    })
}

/// Parse a classifier from text in the classifier file format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_classifier_parse(
    text: *const c_char,
    out: *mut *mut BnxClassifier,
) -> BnxStatus {
    guard(|| {
        let c = parse_classifier(str_arg(text, "text")?)?;
        put(out, Box::into_raw(Box::new(BnxClassifier { inner: c })))
    })
}

/// # Safety
/// `c` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bnx_classifier_free(c: *mut BnxClassifier) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of features.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_classifier_num_features(
    c: *const BnxClassifier,
    out: *mut usize,
) -> BnxStatus {
    guard(|| put(out, deref(c, "classifier")?.inner.variables().len()))
}

/// Posterior of the positive class for feature values in declaration order.
///
/// # Safety
/// `c` must be a live handle; `values` must point to `len` entries; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_classifier_posterior(
    c: *const BnxClassifier,
    values: *const usize,
    len: usize,
    out: *mut f64,
) -> BnxStatus {
    guard(|| {
        let c = deref(c, "classifier")?;
        put(out, c.inner.posterior(&instance_arg(values, len)?)?)
    })
}

/// Decision (1 positive, 0 negative) for feature values in declaration order.
///
/// # Safety
/// As for [`bnx_classifier_posterior`].
#[no_mangle]
pub unsafe extern "C" fn bnx_classifier_decide(
    c: *const BnxClassifier,
    values: *const usize,
    len: usize,
    out: *mut c_int,
) -> BnxStatus {
    guard(|| {
        let c = deref(c, "classifier")?;
        put(
            out,
            c_int::from(c.inner.decide(&instance_arg(values, len)?)?),
        )
    })
}

/// Compile a classifier. `order` lists feature indices top to bottom; pass
/// NULL/0 for the default order (required for latent trees).
///
/// # Safety
/// `c` must be a live handle; `order` must point to `order_len` entries when
/// non-NULL; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_compile(
    c: *const BnxClassifier,
    order: *const usize,
    order_len: usize,
    out: *mut *mut BnxOdd,
) -> BnxStatus {
    guard(|| {
        let c = deref(c, "classifier")?;
        let order = if order.is_null() {
            None
        } else {
            Some(slice_arg(order, order_len, "order")?)
        };
        let odd = compile_classifier(&c.inner, order)?;
        let handle = BnxOdd {
            manager: odd.manager,
            root: odd.root,
            order: odd.order,
        };
        put(out, Box::into_raw(Box::new(handle)))
    })
}

fn identity_odd(manager: Manager, root: Dd) -> BnxOdd {
    let order = (0..manager.num_vars()).collect();
    BnxOdd {
        manager,
        root,
        order,
    }
}

/// Load a diagram file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_load(path: *const c_char, out: *mut *mut BnxOdd) -> BnxStatus {
    guard(|| {
        let (m, f) = load_odd(str_arg(path, "path")?)?;
        put(out, Box::into_raw(Box::new(identity_odd(m, f))))
    })
}

/// Parse a diagram from text in the diagram file format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_parse(text: *const c_char, out: *mut *mut BnxOdd) -> BnxStatus {
    guard(|| {
        let (m, f) = deserialize_odd(str_arg(text, "text")?)?;
        put(out, Box::into_raw(Box::new(identity_odd(m, f))))
    })
}

/// # Safety
/// `odd` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_free(odd: *mut BnxOdd) {
    if !odd.is_null() {
        drop(Box::from_raw(odd));
    }
}

/// Write a diagram file.
///
/// # Safety
/// `odd` must be a live handle; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_save(odd: *const BnxOdd, path: *const c_char) -> BnxStatus {
    guard(|| {
        let odd = deref(odd, "diagram")?;
        save_odd(&odd.manager, odd.root, str_arg(path, "path")?)?;
        Ok(())
    })
}

/// Diagram file text (`dot` = 0) or Graphviz text (`dot` ≠ 0). Free with
/// [`bnx_string_free`].
///
/// # Safety
/// `odd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_to_string(
    odd: *const BnxOdd,
    dot: c_int,
    out: *mut *mut c_char,
) -> BnxStatus {
    guard(|| {
        let odd = deref(odd, "diagram")?;
        let text = if dot != 0 {
            to_dot(&odd.manager, odd.root)?
        } else {
            serialize_odd(&odd.manager, odd.root)?
        };
        put(out, c_string(text)?.into_raw())
    })
}

/// Number of variables (diagram levels).
///
/// # Safety
/// `odd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_num_vars(odd: *const BnxOdd, out: *mut usize) -> BnxStatus {
    guard(|| put(out, deref(odd, "diagram")?.manager.num_vars()))
}

/// Classifier feature index tested at each level; writes `num_vars` entries.
///
/// # Safety
/// `odd` must be a live handle; `out` must have room for `num_vars` entries.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_order(odd: *const BnxOdd, out: *mut usize) -> BnxStatus {
    guard(|| {
        let odd = deref(odd, "diagram")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        ptr::copy_nonoverlapping(odd.order.as_ptr(), out, odd.order.len());
        Ok(())
    })
}

/// Number of internal nodes.
///
/// # Safety
/// `odd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_size(odd: *const BnxOdd, out: *mut usize) -> BnxStatus {
    guard(|| {
        let odd = deref(odd, "diagram")?;
        put(out, odd.manager.size(odd.root)?)
    })
}

/// Number of positive instances, in decimal. Free with [`bnx_string_free`].
///
/// # Safety
/// `odd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_model_count(
    odd: *const BnxOdd,
    out: *mut *mut c_char,
) -> BnxStatus {
    guard(|| {
        let odd = deref(odd, "diagram")?;
        put(
            out,
            c_string(odd.manager.model_count(odd.root)?.to_string())?.into_raw(),
        )
    })
}

/// Decision for values given in diagram level order.
///
/// # Safety
/// `odd` must be a live handle; `values` must point to `len` entries; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_evaluate(
    odd: *const BnxOdd,
    values: *const usize,
    len: usize,
    out: *mut c_int,
) -> BnxStatus {
    guard(|| {
        let odd = deref(odd, "diagram")?;
        put(
            out,
            c_int::from(
                odd.manager
                    .evaluate(odd.root, &instance_arg(values, len)?)?,
            ),
        )
    })
}

/// Whether the decision function is monotone (1) or not (0).
///
/// # Safety
/// `odd` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_odd_is_monotone(odd: *mut BnxOdd, out: *mut c_int) -> BnxStatus {
    guard(|| {
        let odd = deref_mut(odd, "diagram")?;
        put(
            out,
            c_int::from(is_monotone(&mut odd.manager, odd.root)?.monotone),
        )
    })
}

/// Explain the decision on an instance given in diagram level order.
///
/// # Safety
/// `odd` must be a live handle; `values` must point to `len` entries; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn bnx_explain(
    odd: *mut BnxOdd,
    values: *const usize,
    len: usize,
    kind: BnxExplainKind,
    out: *mut *mut BnxExplanation,
) -> BnxStatus {
    guard(|| {
        let odd = deref_mut(odd, "diagram")?;
        let x = instance_arg(values, len)?;
        let (m, f) = (&mut odd.manager, odd.root);
        let vars = m.vars().clone();
        let decision = m.evaluate(f, &x)?;
        let (count, items) = match kind {
            BnxExplainKind::Mc => {
                let s = mc_explanations(m, f, &x)?;
                let items = s
                    .explanations(m)?
                    .iter()
                    .map(|e| vars.format_instance(e))
                    .collect();
                (s.count(m)?, items)
            }
            BnxExplainKind::Pi | BnxExplainKind::PiShortest => {
                let mut s = explain_pi(m, f, &x)?;
                let zs = if kind == BnxExplainKind::Pi {
                    s.decode()
                } else {
                    s.shortest()
                };
                let count = if kind == BnxExplainKind::Pi {
                    s.count()
                } else {
                    zs.len().into()
                };
                (
                    count,
                    zs.iter()
                        .map(|z| vars.format_partial(z))
                        .collect::<Vec<_>>(),
                )
            }
        };
        let e = BnxExplanation {
            decision,
            count: c_string(count.to_string())?,
            items: items.into_iter().map(c_string).collect::<Result<_, _>>()?,
        };
        put(out, Box::into_raw(Box::new(e)))
    })
}

/// # Safety
/// `e` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bnx_explanation_free(e: *mut BnxExplanation) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Decision being explained: 1 positive, 0 negative, -1 for a NULL handle.
///
/// # Safety
/// `e` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bnx_explanation_decision(e: *const BnxExplanation) -> c_int {
    e.as_ref().map_or(-1, |e| c_int::from(e.decision))
}

/// Number of explanations held (0 for a NULL handle).
///
/// # Safety
/// `e` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bnx_explanation_len(e: *const BnxExplanation) -> usize {
    e.as_ref().map_or(0, |e| e.items.len())
}

/// Number of explanations in decimal (may exceed `size_t`). Owned by the
/// handle; do not free.
///
/// # Safety
/// `e` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bnx_explanation_count(e: *const BnxExplanation) -> *const c_char {
    e.as_ref().map_or(ptr::null(), |e| e.count.as_ptr())
}

/// Explanation `i` as space-separated value labels, `*` for free features.
/// Owned by the handle; NULL when out of range.
///
/// # Safety
/// `e` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn bnx_explanation_get(e: *const BnxExplanation, i: usize) -> *const c_char {
    e.as_ref()
        .and_then(|e| e.items.get(i))
        .map_or(ptr::null(), |s| s.as_ptr())
}
