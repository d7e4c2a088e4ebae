//! C ABI for castmine.
//!
//! Objects are opaque handles created by `cm_*_new`/`cm_*_load`/`cm_*_fit`
//! and released by the matching `cm_*_free`. Every fallible call returns a
//! [`CmStatus`]; on failure `cm_last_error` describes what went wrong on the
//! calling thread. Strings handed out by the library are freed with
//! `cm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use castmine::corpus::{load_api_docs, load_frames, Document, DocumentKind, FrameSequence};
use castmine::detect::{video_similarity, ScoreOptions};
use castmine::doclink::{link_transcript, threshold_partition, LinkResult};
use castmine::topics::{
    lda_fit, preprocess_text, relevance_terms, LdaParams, PreprocessOptions, TopicModel,
};
use castmine::vectorspace::{
    cosine, jaccard, quantize_rgb, Algorithm, TermVector, TfidfIndex, Weighting,
};
use castmine::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Undefined = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmAlgorithm {
    Jaccard = 0,
    Cosine = 1,
    Lsi = 2,
}

impl From<CmAlgorithm> for Algorithm {
    fn from(a: CmAlgorithm) -> Self {
        match a {
            CmAlgorithm::Jaccard => Algorithm::Jaccard,
            CmAlgorithm::Cosine => Algorithm::Cosine,
            CmAlgorithm::Lsi => Algorithm::Lsi,
        }
    }
}

/// Exact counts behind a threshold split. `fraction_relevant_above` is NaN
/// when `relevant_total` is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmThresholdPartition {
    pub all_below: usize,
    pub all_total: usize,
    pub relevant_above: usize,
    pub relevant_total: usize,
    pub fraction_all_below: f64,
    pub fraction_relevant_above: f64,
}

/// Sparse non-negative term vector.
pub struct CmTermVector(TermVector);

/// Frames of one video, in time order.
pub struct CmFrameSequence {
    video_id: String,
    bags: Vec<TermVector>,
}

/// TF-IDF index over a directory of API documents.
pub struct CmDocIndex(TfidfIndex);

/// Ranked documents for one transcript.
pub struct CmLinkResult {
    result: LinkResult,
    ids: Vec<CString>,
}

/// Fitted LDA model.
pub struct CmTopicModel(TopicModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(CmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } | Error::Image { .. } | Error::MissingFrameDir(_) => CmStatus::Io,
            Error::Parse { .. } => CmStatus::Parse,
            Error::UndefinedSimilarity => CmStatus::Undefined,
            _ => CmStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CmStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Fail {
    Fail(CmStatus::InvalidArgument, message.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CmStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CmStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn as_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn into_handle<T>(value: T, out: *mut *mut T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn cm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn cm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a term vector from parallel arrays of term ids and non-negative
/// weights. Repeated ids are summed.
///
/// # Safety
/// `terms` and `weights` must point to `len` readable elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cm_term_vector_new(
    terms: *const u32,
    weights: *const f64,
    len: usize,
    out: *mut *mut CmTermVector,
) -> CmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let terms = as_slice(terms, len, "terms")?;
        let weights = as_slice(weights, len, "weights")?;
        let v = TermVector::from_pairs(terms.iter().copied().zip(weights.iter().copied()))?;
        into_handle(CmTermVector(v), out);
        Ok(())
    })
}

/// Quantized colour histogram of an interleaved RGB raster (`len` bytes,
/// a multiple of 3) keeping `bits` bits per channel.
///
/// # Safety
/// `rgb` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_term_vector_from_rgb(
    rgb: *const u8,
    len: usize,
    bits: u8,
    out: *mut *mut CmTermVector,
) -> CmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = quantize_rgb(as_slice(rgb, len, "rgb")?, bits)?;
        into_handle(CmTermVector(v), out);
        Ok(())
    })
}

/// Number of non-zero entries.
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_term_vector_len(v: *const CmTermVector) -> usize {
    v.as_ref().map_or(0, |v| v.0.len())
}

/// # Safety
/// `v` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_term_vector_free(v: *mut CmTermVector) {
    free_handle(v)
}

/// Extended Jaccard similarity. Two empty vectors are `CM_STATUS_UNDEFINED`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_jaccard(
    a: *const CmTermVector,
    b: *const CmTermVector,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        let s = jaccard(&as_ref(a, "a")?.0, &as_ref(b, "b")?.0)?;
        *as_mut(out, "out")? = s;
        Ok(())
    })
}

/// Cosine similarity. Two empty vectors are `CM_STATUS_UNDEFINED`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_cosine(
    a: *const CmTermVector,
    b: *const CmTermVector,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        let s = cosine(&as_ref(a, "a")?.0, &as_ref(b, "b")?.0)?;
        *as_mut(out, "out")? = s;
        Ok(())
    })
}

/// Empty frame sequence to be filled with `cm_frame_sequence_push`.
///
/// # Safety
/// `video_id` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_frame_sequence_new(
    video_id: *const c_char,
    out: *mut *mut CmFrameSequence,
) -> CmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let video_id = as_str(video_id, "video_id")?.to_owned();
        into_handle(
            CmFrameSequence {
                video_id,
                bags: Vec::new(),
            },
            out,
        );
        Ok(())
    })
}

/// Appends a copy of `frame` as the next frame.
///
/// # Safety
/// Both arguments must be live handles.
#[no_mangle]
pub unsafe extern "C" fn cm_frame_sequence_push(
    seq: *mut CmFrameSequence,
    frame: *const CmTermVector,
) -> CmStatus {
    guard(|| {
        let frame = as_ref(frame, "frame")?.0.clone();
        as_mut(seq, "seq")?.bags.push(frame);
        Ok(())
    })
}

/// Loads frame images named `<seconds>.png` or `<seconds>.ppm` from `dir`,
/// sampling one frame per `interval` seconds.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_frame_sequence_load(
    dir: *const c_char,
    interval: f64,
    bits: u8,
    out: *mut *mut CmFrameSequence,
) -> CmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let seq = load_frames(Path::new(as_str(dir, "dir")?), interval, bits)?;
        let bags = seq.bags().cloned().collect();
        into_handle(
            CmFrameSequence {
                video_id: seq.video_id,
                bags,
            },
            out,
        );
        Ok(())
    })
}

/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_frame_sequence_len(seq: *const CmFrameSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.bags.len())
}

/// # Safety
/// `seq` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_frame_sequence_free(seq: *mut CmFrameSequence) {
    free_handle(seq)
}

/// Mean similarity of consecutive frames. `binary` compares colour sets
/// instead of counts (ignored by LSI).
///
/// # Safety
/// `seq` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_video_similarity(
    seq: *const CmFrameSequence,
    algorithm: CmAlgorithm,
    binary: bool,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        let seq = as_ref(seq, "seq")?;
        let frames = FrameSequence::from_bags(seq.video_id.clone(), seq.bags.clone());
        let opts = ScoreOptions {
            algorithm: algorithm.into(),
            binary,
        };
        *as_mut(out, "out")? = video_similarity(&frames, opts)?.score;
        Ok(())
    })
}

fn link_options() -> PreprocessOptions {
    PreprocessOptions {
        drop_terms: Default::default(),
        ..PreprocessOptions::default()
    }
}

/// Indexes every `.html`, `.htm` and `.txt` file under `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_doc_index_load(
    dir: *const c_char,
    raw_counts: bool,
    out: *mut *mut CmDocIndex,
) -> CmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = link_options();
        let docs: Vec<Document> = load_api_docs(Path::new(as_str(dir, "dir")?))?
            .into_iter()
            .map(|d| d.tokenized(&opts))
            .collect();
        let weighting = if raw_counts {
            Weighting::RawCount
        } else {
            Weighting::TfIdf
        };
        into_handle(CmDocIndex(TfidfIndex::build(&docs, weighting)?), out);
        Ok(())
    })
}

/// # Safety
/// `index` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_doc_index_len(index: *const CmDocIndex) -> usize {
    index.as_ref().map_or(0, |i| i.0.num_docs())
}

/// # Safety
/// `index` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_doc_index_free(index: *mut CmDocIndex) {
    free_handle(index)
}

/// Ranks every indexed document against a transcript's text.
///
/// # Safety
/// `index` must be a live handle, `screencast_id` and `text` NUL-terminated
/// strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_link_transcript(
    index: *const CmDocIndex,
    screencast_id: *const c_char,
    text: *const c_char,
    top_n: usize,
    tau: f64,
    out: *mut *mut CmLinkResult,
) -> CmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let index = &as_ref(index, "index")?.0;
        let doc = Document::new(
            as_str(screencast_id, "screencast_id")?,
            DocumentKind::Transcript,
            as_str(text, "text")?,
        )
        .tokenized(&link_options());
        let result = link_transcript(index, &doc, top_n, tau)?;
        let ids = result
            .top()
            .iter()
            .map(|d| CString::new(d.doc_id.replace('\0', " ")).expect("NULs removed"))
            .collect();
        into_handle(CmLinkResult { result, ids }, out);
        Ok(())
    })
}

/// Number of returned documents (at most `top_n`).
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_link_result_len(r: *const CmLinkResult) -> usize {
    r.as_ref().map_or(0, |r| r.ids.len())
}

/// Documents in the full ranking scoring at least the threshold.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_link_result_above_threshold(r: *const CmLinkResult) -> usize {
    r.as_ref().map_or(0, |r| r.result.above_threshold)
}

/// Document id and score at `rank` (0-based). The id stays valid while `r`
/// lives.
///
/// # Safety
/// `r` must be a live handle; `doc_id` and `score` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_link_result_get(
    r: *const CmLinkResult,
    rank: usize,
    doc_id: *mut *const c_char,
    score: *mut f64,
) -> CmStatus {
    guard(|| {
        let r = as_ref(r, "result")?;
        let id = r.ids.get(rank).ok_or_else(|| {
            invalid(format!(
                "rank {rank} out of range for {} results",
                r.ids.len()
            ))
        })?;
        *as_mut(doc_id, "doc_id")? = id.as_ptr();
        *as_mut(score, "score")? = r.result.ranking[rank].score;
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_link_result_free(r: *mut CmLinkResult) {
    free_handle(r)
}

/// Counts scores strictly below `tau` and relevant scores at or above it.
///
/// # Safety
/// The arrays must hold the given number of readable elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cm_threshold_partition(
    all_scores: *const f64,
    all_len: usize,
    relevant_scores: *const f64,
    relevant_len: usize,
    tau: f64,
    out: *mut CmThresholdPartition,
) -> CmStatus {
    guard(|| {
        let p = threshold_partition(
            as_slice(all_scores, all_len, "all_scores")?,
            as_slice(relevant_scores, relevant_len, "relevant_scores")?,
            tau,
        )?;
        *as_mut(out, "out")? = CmThresholdPartition {
            all_below: p.all_below,
            all_total: p.all_total,
            relevant_above: p.relevant_above,
            relevant_total: p.relevant_total,
            fraction_all_below: p.fraction_all_below,
            fraction_relevant_above: p.fraction_relevant_above.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Fits LDA with `k` topics over `n_docs` raw texts, tokenized with the
/// default stopword list. `alpha <= 0` selects 50/k.
///
/// # Safety
/// `docs` must point to `n_docs` NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cm_topic_model_fit(
    docs: *const *const c_char,
    n_docs: usize,
    k: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    seed: u64,
    out: *mut *mut CmTopicModel,
) -> CmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = PreprocessOptions::default();
        let corpus = as_slice(docs, n_docs, "docs")?
            .iter()
            .map(|&d| Ok(preprocess_text(as_str(d, "document")?, &opts)))
            .collect::<Result<Vec<_>, Fail>>()?;
        let params = LdaParams {
            k,
            alpha: (alpha > 0.0).then_some(alpha),
            beta,
            iterations,
            seed,
        };
        into_handle(CmTopicModel(lda_fit(&corpus, &params)?), out);
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cm_topic_model_num_topics(m: *const CmTopicModel) -> usize {
    m.as_ref().map_or(0, |m| m.0.num_topics())
}

/// Top `top_n` terms of `topic` by relevance at `lambda`, as a JSON array of
/// `{"term": ..., "relevance": ...}`. Free `*json` with `cm_string_free`.
///
/// # Safety
/// `m` must be a live handle and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_topic_model_top_terms_json(
    m: *const CmTopicModel,
    topic: usize,
    lambda: f64,
    top_n: usize,
    json: *mut *mut c_char,
) -> CmStatus {
    guard(|| {
        let m = as_ref(m, "model")?;
        let out = as_mut(json, "json")?;
        let terms = relevance_terms(&m.0, topic, lambda, top_n)?;
        let s = serde_json::to_string(&terms).map_err(|e| invalid(e.to_string()))?;
        *out = CString::new(s)
            .map_err(|e| invalid(e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn cm_topic_model_free(m: *mut CmTopicModel) {
    free_handle(m)
}
