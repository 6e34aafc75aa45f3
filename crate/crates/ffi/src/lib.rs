//! C ABI over the `cm2` classifier.
//!
//! Objects cross the boundary as opaque handles created by `*_new`, `*_load*`
//! or `*_parse*` functions and released with the matching `*_free`. Fallible
//! functions return a [`Cm2Status`]; on failure [`cm2_last_error`] describes
//! the most recent error on the calling thread. Strings returned as
//! `char *` are owned by the caller and released with [`cm2_string_free`];
//! `const char *` results are borrowed from their handle.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cm2::classifier::{explain, to_structured};
use cm2::ingest::{parse_hocr, parse_keywords_csv, parse_words_xml};
use cm2::registry::{build_matrix, load_registry, save_registry};
use cm2::{ClassificationResult, ClassifierConfig, CoordinateMatrix, Document, Error};

/// Outcome of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cm2Status {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed XML, hOCR, CSV or registry input.
    ParseError = 3,
    /// A training keyword does not occur in its sample document.
    KeywordNotFound = 4,
    /// Input parsed but violates a rule, such as a duplicate class.
    InvalidInput = 5,
    IoError = 6,
    /// A bug inside the library; the call had no effect.
    Panic = 7,
}

/// Matching and scoring parameters. Pass NULL wherever a config is accepted
/// to use [`cm2_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Cm2Config {
    pub max_penalty: u32,
    pub line_tolerance: u32,
    pub gap_tolerance: u32,
    pub page_index: u32,
}

impl From<Cm2Config> for ClassifierConfig {
    fn from(c: Cm2Config) -> Self {
        ClassifierConfig {
            max_penalty: c.max_penalty,
            line_tolerance: c.line_tolerance,
            gap_tolerance: c.gap_tolerance,
            page_index: c.page_index,
        }
    }
}

/// Registered classes and their keyword coordinates.
pub struct Cm2Registry {
    matrix: CoordinateMatrix,
}

/// A parsed OCR document.
pub struct Cm2Document {
    doc: Document,
}

/// Outcome of one classification.
pub struct Cm2Result {
    result: ClassificationResult,
    predicted: Option<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(Cm2Status, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Xml { .. }
            | Error::Schema { .. }
            | Error::OutOfBounds { .. }
            | Error::Csv { .. }
            | Error::Registry { .. } => Cm2Status::ParseError,
            Error::KeywordNotFound { .. } => Cm2Status::KeywordNotFound,
            Error::Io(_) => Cm2Status::IoError,
            _ => Cm2Status::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> Cm2Status {
    let outcome = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err(Failure(Cm2Status::Panic, "internal panic".into())));
    match outcome {
        Ok(()) => {
            set_last_error("");
            Cm2Status::Ok
        }
        Err(Failure(status, message)) => {
            set_last_error(&message);
            status
        }
    }
}

fn non_null<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller promises `p` is NULL or a live handle of type T.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(Cm2Status::NullArgument, format!("{name} is NULL")))
}

fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(Cm2Status::NullArgument, format!("{name} is NULL")));
    }
    // SAFETY: the caller promises a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure(Cm2Status::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn bytes_arg<'a>(data: *const u8, len: usize, name: &str) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(Failure(Cm2Status::NullArgument, format!("{name} is NULL")));
    }
    // SAFETY: the caller promises `len` readable bytes at `data`.
    Ok(unsafe { std::slice::from_raw_parts(data, len) })
}

fn config_arg(config: *const Cm2Config) -> Result<ClassifierConfig, Failure> {
    // SAFETY: NULL or a valid Cm2Config.
    let cfg = unsafe { config.as_ref() }.map_or_else(ClassifierConfig::default, |c| (*c).into());
    cfg.validate()?;
    Ok(cfg)
}

fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            Cm2Status::NullArgument,
            "output pointer is NULL".into(),
        ));
    }
    // SAFETY: `out` is non-null and writable per the caller's contract.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            Cm2Status::NullArgument,
            "output pointer is NULL".into(),
        ));
    }
    // SAFETY: as in `store`; cleared so a failed call leaves NULL behind.
    unsafe { *out = ptr::null_mut() };
    Ok(())
}

fn io_failure(path: &str, e: std::io::Error) -> Failure {
    Failure(Cm2Status::IoError, format!("{path}: {e}"))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or "" after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cm2_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn cm2_config_default() -> Cm2Config {
    let d = ClassifierConfig::default();
    Cm2Config {
        max_penalty: d.max_penalty,
        line_tolerance: d.line_tolerance,
        gap_tolerance: d.gap_tolerance,
        page_index: d.page_index,
    }
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer returned as `char *` by this library and
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cm2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an empty registry.
///
/// # Safety
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cm2_registry_new(out: *mut *mut Cm2Registry) -> Cm2Status {
    guard(|| {
        store(
            out,
            Cm2Registry {
                matrix: CoordinateMatrix::new(),
            },
        )
    })
}

/// Loads a registry file.
///
/// # Safety
/// `path` must be NULL or NUL-terminated; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cm2_registry_load_file(
    path: *const c_char,
    out: *mut *mut Cm2Registry,
) -> Cm2Status {
    guard(|| {
        check_out(out)?;
        let path = str_arg(path, "path")?;
        let file = fs::File::open(path).map_err(|e| io_failure(path, e))?;
        let matrix = load_registry(std::io::BufReader::new(file))?;
        store(out, Cm2Registry { matrix })
    })
}

/// Parses registry text held in memory.
///
/// # Safety
/// `data` must point to `len` readable bytes (or be NULL when `len` is 0);
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cm2_registry_load_bytes(
    data: *const u8,
    len: usize,
    out: *mut *mut Cm2Registry,
) -> Cm2Status {
    guard(|| {
        check_out(out)?;
        let matrix = load_registry(bytes_arg(data, len, "data")?)?;
        store(out, Cm2Registry { matrix })
    })
}

/// Writes the registry to `path`, replacing any existing file.
///
/// # Safety
/// `registry` must be NULL or a live handle; `path` NULL or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cm2_registry_save_file(
    registry: *const Cm2Registry,
    path: *const c_char,
) -> Cm2Status {
    guard(|| {
        let registry = non_null(registry, "registry")?;
        let path = str_arg(path, "path")?;
        let mut bytes = Vec::new();
        save_registry(&registry.matrix, &mut bytes)?;
        fs::write(path, bytes).map_err(|e| io_failure(path, e))
    })
}

/// Registers `class_id` from a sample document and its keyword CSV
/// (`keyword,value` records). On failure the registry is unchanged.
///
/// # Safety
/// Handles must be NULL or live; `class_id` NULL or NUL-terminated;
/// `keywords_csv` must point to `len` readable bytes; `config` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn cm2_registry_add_template(
    registry: *mut Cm2Registry,
    class_id: *const c_char,
    sample: *const Cm2Document,
    keywords_csv: *const u8,
    len: usize,
    config: *const Cm2Config,
) -> Cm2Status {
    guard(|| {
        // SAFETY: NULL or a live, exclusively borrowed handle.
        let registry = registry
            .as_mut()
            .ok_or_else(|| Failure(Cm2Status::NullArgument, "registry is NULL".into()))?;
        let class_id = str_arg(class_id, "class_id")?;
        let sample = non_null(sample, "sample")?;
        let cfg = config_arg(config)?;
        if registry.matrix.contains_class(class_id) {
            return Err(Failure(
                Cm2Status::InvalidInput,
                format!("class {class_id:?} is already registered"),
            ));
        }
        let keywords = parse_keywords_csv(bytes_arg(keywords_csv, len, "keywords_csv")?, class_id)?;
        let rows = build_matrix([(&sample.doc, keywords.as_slice())], &cfg)?;
        registry.matrix.append(rows)?;
        Ok(())
    })
}

/// Number of registered classes. 0 for NULL.
///
/// # Safety
/// `registry` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm2_registry_class_count(registry: *const Cm2Registry) -> usize {
    registry.as_ref().map_or(0, |r| r.matrix.class_count())
}

/// Number of keyword rows across all classes. 0 for NULL.
///
/// # Safety
/// `registry` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm2_registry_row_count(registry: *const Cm2Registry) -> usize {
    registry.as_ref().map_or(0, |r| r.matrix.total_keywords())
}

/// # Safety
/// `registry` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cm2_registry_free(registry: *mut Cm2Registry) {
    if !registry.is_null() {
        drop(Box::from_raw(registry));
    }
}

/// Parses a document in the canonical word XML format. `source_name` labels
/// error messages and may be NULL.
///
/// # Safety
/// `data` must point to `len` readable bytes; strings NULL or
/// NUL-terminated; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cm2_document_parse_xml(
    data: *const u8,
    len: usize,
    source_name: *const c_char,
    out: *mut *mut Cm2Document,
) -> Cm2Status {
    guard(|| {
        check_out(out)?;
        let name = if source_name.is_null() {
            "<memory>"
        } else {
            str_arg(source_name, "source_name")?
        };
        let doc = parse_words_xml(bytes_arg(data, len, "data")?, name)?;
        store(out, Cm2Document { doc })
    })
}

/// Parses an hOCR document and gives it the id `doc_id`.
///
/// # Safety
/// As for [`cm2_document_parse_xml`]; `doc_id` must be non-NULL.
#[no_mangle]
pub unsafe extern "C" fn cm2_document_parse_hocr(
    data: *const u8,
    len: usize,
    doc_id: *const c_char,
    out: *mut *mut Cm2Document,
) -> Cm2Status {
    guard(|| {
        check_out(out)?;
        let id = str_arg(doc_id, "doc_id")?;
        let doc = parse_hocr(bytes_arg(data, len, "data")?, id)?;
        store(out, Cm2Document { doc })
    })
}

/// Reads a document file: hOCR for `.hocr`, `.html`, `.htm` and `.xhtml`,
/// canonical word XML otherwise.
///
/// # Safety
/// `path` NULL or NUL-terminated; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cm2_document_load_file(
    path: *const c_char,
    out: *mut *mut Cm2Document,
) -> Cm2Status {
    guard(|| {
        check_out(out)?;
        let path_str = str_arg(path, "path")?;
        let bytes = fs::read(path_str).map_err(|e| io_failure(path_str, e))?;
        let path = Path::new(path_str);
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        let doc = match ext.as_deref() {
            Some("hocr" | "html" | "htm" | "xhtml") => {
                let id = path
                    .file_stem()
                    .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
                parse_hocr(&bytes, &id)?
            }
            _ => parse_words_xml(&bytes, path_str)?,
        };
        store(out, Cm2Document { doc })
    })
}

/// Words on all pages. 0 for NULL.
///
/// # Safety
/// `document` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm2_document_word_count(document: *const Cm2Document) -> usize {
    document.as_ref().map_or(0, |d| d.doc.word_count())
}

/// # Safety
/// `document` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cm2_document_free(document: *mut Cm2Document) {
    if !document.is_null() {
        drop(Box::from_raw(document));
    }
}

/// Classifies `document` against `registry`. A rejection is a successful
/// call; check [`cm2_result_is_rejected`].
///
/// # Safety
/// Handles NULL or live; `config` NULL or valid; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cm2_classify(
    registry: *const Cm2Registry,
    document: *const Cm2Document,
    config: *const Cm2Config,
    out: *mut *mut Cm2Result,
) -> Cm2Status {
    guard(|| {
        check_out(out)?;
        let registry = non_null(registry, "registry")?;
        let document = non_null(document, "document")?;
        let cfg = config_arg(config)?;
        let result = cm2::classify(&registry.matrix, &document.doc, &cfg)?;
        let predicted = match &result.predicted {
            Some(class) => Some(CString::new(class.as_str()).map_err(|_| {
                Failure(
                    Cm2Status::InvalidInput,
                    format!("class id {class:?} contains NUL"),
                )
            })?),
            None => None,
        };
        store(out, Cm2Result { result, predicted })
    })
}

/// True when no class scored below the maximum penalty. False for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm2_result_is_rejected(result: *const Cm2Result) -> bool {
    result.as_ref().is_some_and(|r| r.result.is_rejected())
}

/// Predicted class id, or NULL on rejection. Borrowed from `result`.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm2_result_predicted(result: *const Cm2Result) -> *const c_char {
    result
        .as_ref()
        .and_then(|r| r.predicted.as_ref())
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Winning mean distance as an exact fraction (the maximum penalty over 1 on
/// rejection).
///
/// # Safety
/// `result` NULL or live; `numerator` and `denominator` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cm2_result_score(
    result: *const Cm2Result,
    numerator: *mut u64,
    denominator: *mut u64,
) -> Cm2Status {
    guard(|| {
        let r = non_null(result, "result")?;
        if numerator.is_null() || denominator.is_null() {
            return Err(Failure(
                Cm2Status::NullArgument,
                "output pointer is NULL".into(),
            ));
        }
        *numerator = r.result.score.total();
        *denominator = r.result.score.count();
        Ok(())
    })
}

/// Winning mean distance as a double. NaN for NULL.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm2_result_score_f64(result: *const Cm2Result) -> f64 {
    result
        .as_ref()
        .map_or(f64::NAN, |r| r.result.score.as_f64())
}

/// Line-oriented `key=value` rendering. Free with [`cm2_string_free`].
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm2_result_to_structured(result: *const Cm2Result) -> *mut c_char {
    result
        .as_ref()
        .map_or(ptr::null_mut(), |r| owned_string(to_structured(&r.result)))
}

/// Per-keyword distance table. Free with [`cm2_string_free`].
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm2_result_explain(result: *const Cm2Result) -> *mut c_char {
    result
        .as_ref()
        .map_or(ptr::null_mut(), |r| owned_string(explain(&r.result)))
}

/// # Safety
/// `result` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cm2_result_free(result: *mut Cm2Result) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
