#ifndef CASTMINE_H
#define CASTMINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_INVALID_ARGUMENT = 2,
  CM_STATUS_IO = 3,
  CM_STATUS_PARSE = 4,
  CM_STATUS_UNDEFINED = 5,
  CM_STATUS_PANIC = 6,
} CmStatus;

typedef enum CmAlgorithm {
  CM_ALGORITHM_JACCARD = 0,
  CM_ALGORITHM_COSINE = 1,
  CM_ALGORITHM_LSI = 2,
} CmAlgorithm;

/**
 * TF-IDF index over a directory of API documents.
 */
typedef struct CmDocIndex CmDocIndex;

/**
 * Frames of one video, in time order.
 */
typedef struct CmFrameSequence CmFrameSequence;

/**
 * Ranked documents for one transcript.
 */
typedef struct CmLinkResult CmLinkResult;

/**
 * Sparse non-negative term vector.
 */
typedef struct CmTermVector CmTermVector;

/**
 * Fitted LDA model.
 */
typedef struct CmTopicModel CmTopicModel;

/**
 * Exact counts behind a threshold split. `fraction_relevant_above` is NaN
 * when `relevant_total` is 0.
 */
typedef struct CmThresholdPartition {
  size_t all_below;
  size_t all_total;
  size_t relevant_above;
  size_t relevant_total;
  double fraction_all_below;
  double fraction_relevant_above;
} CmThresholdPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *cm_last_error(void);

/**
 * Library version, statically allocated.
 */
const char *cm_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void cm_string_free(char *s);

/**
 * Builds a term vector from parallel arrays of term ids and non-negative
 * weights. Repeated ids are summed.
 *
 * # Safety
 * `terms` and `weights` must point to `len` readable elements; `out` must be
 * writable.
 */
enum CmStatus cm_term_vector_new(const uint32_t *terms,
                                 const double *weights,
                                 size_t len,
                                 struct CmTermVector **out);

/**
 * Quantized colour histogram of an interleaved RGB raster (`len` bytes,
 * a multiple of 3) keeping `bits` bits per channel.
 *
 * # Safety
 * `rgb` must point to `len` readable bytes; `out` must be writable.
 */
enum CmStatus cm_term_vector_from_rgb(const uint8_t *rgb,
                                      size_t len,
                                      uint8_t bits,
                                      struct CmTermVector **out);

/**
 * Number of non-zero entries.
 *
 * # Safety
 * `v` must be null or a live handle.
 */
size_t cm_term_vector_len(const struct CmTermVector *v);

/**
 * # Safety
 * `v` must be null or a live handle, freed once.
 */
void cm_term_vector_free(struct CmTermVector *v);

/**
 * Extended Jaccard similarity. Two empty vectors are `CM_STATUS_UNDEFINED`.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` writable.
 */
enum CmStatus cm_jaccard(const struct CmTermVector *a, const struct CmTermVector *b, double *out);

/**
 * Cosine similarity. Two empty vectors are `CM_STATUS_UNDEFINED`.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` writable.
 */
enum CmStatus cm_cosine(const struct CmTermVector *a, const struct CmTermVector *b, double *out);

/**
 * Empty frame sequence to be filled with `cm_frame_sequence_push`.
 *
 * # Safety
 * `video_id` must be a NUL-terminated string; `out` must be writable.
 */
enum CmStatus cm_frame_sequence_new(const char *video_id, struct CmFrameSequence **out);

/**
 * Appends a copy of `frame` as the next frame.
 *
 * # Safety
 * Both arguments must be live handles.
 */
enum CmStatus cm_frame_sequence_push(struct CmFrameSequence *seq, const struct CmTermVector *frame);

/**
 * Loads frame images named `<seconds>.png` or `<seconds>.ppm` from `dir`,
 * sampling one frame per `interval` seconds.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` must be writable.
 */
enum CmStatus cm_frame_sequence_load(const char *dir,
                                     double interval,
                                     uint8_t bits,
                                     struct CmFrameSequence **out);

/**
 * # Safety
 * `seq` must be null or a live handle.
 */
size_t cm_frame_sequence_len(const struct CmFrameSequence *seq);

/**
 * # Safety
 * `seq` must be null or a live handle, freed once.
 */
void cm_frame_sequence_free(struct CmFrameSequence *seq);

/**
 * Mean similarity of consecutive frames. `binary` compares colour sets
 * instead of counts (ignored by LSI).
 *
 * # Safety
 * `seq` must be a live handle and `out` writable.
 */
enum CmStatus cm_video_similarity(const struct CmFrameSequence *seq,
                                  enum CmAlgorithm algorithm,
                                  bool binary,
                                  double *out);

/**
 * Indexes every `.html`, `.htm` and `.txt` file under `dir`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` must be writable.
 */
enum CmStatus cm_doc_index_load(const char *dir, bool raw_counts, struct CmDocIndex **out);

/**
 * # Safety
 * `index` must be null or a live handle.
 */
size_t cm_doc_index_len(const struct CmDocIndex *index);

/**
 * # Safety
 * `index` must be null or a live handle, freed once.
 */
void cm_doc_index_free(struct CmDocIndex *index);

/**
 * Ranks every indexed document against a transcript's text.
 *
 * # Safety
 * `index` must be a live handle, `screencast_id` and `text` NUL-terminated
 * strings and `out` writable.
 */
enum CmStatus cm_link_transcript(const struct CmDocIndex *index,
                                 const char *screencast_id,
                                 const char *text,
                                 size_t top_n,
                                 double tau,
                                 struct CmLinkResult **out);

/**
 * Number of returned documents (at most `top_n`).
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t cm_link_result_len(const struct CmLinkResult *r);

/**
 * Documents in the full ranking scoring at least the threshold.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t cm_link_result_above_threshold(const struct CmLinkResult *r);

/**
 * Document id and score at `rank` (0-based). The id stays valid while `r`
 * lives.
 *
 * # Safety
 * `r` must be a live handle; `doc_id` and `score` writable.
 */
enum CmStatus cm_link_result_get(const struct CmLinkResult *r,
                                 size_t rank,
                                 const char **doc_id,
                                 double *score);

/**
 * # Safety
 * `r` must be null or a live handle, freed once.
 */
void cm_link_result_free(struct CmLinkResult *r);

/**
 * Counts scores strictly below `tau` and relevant scores at or above it.
 *
 * # Safety
 * The arrays must hold the given number of readable elements; `out` must be
 * writable.
 */
enum CmStatus cm_threshold_partition(const double *all_scores,
                                     size_t all_len,
                                     const double *relevant_scores,
                                     size_t relevant_len,
                                     double tau,
                                     struct CmThresholdPartition *out);

/**
 * Fits LDA with `k` topics over `n_docs` raw texts, tokenized with the
 * default stopword list. `alpha <= 0` selects 50/k.
 *
 * # Safety
 * `docs` must point to `n_docs` NUL-terminated strings; `out` must be
 * writable.
 */
enum CmStatus cm_topic_model_fit(const char *const *docs,
                                 size_t n_docs,
                                 size_t k,
                                 double alpha,
                                 double beta,
                                 size_t iterations,
                                 uint64_t seed,
                                 struct CmTopicModel **out);

/**
 * # Safety
 * `m` must be null or a live handle.
 */
size_t cm_topic_model_num_topics(const struct CmTopicModel *m);

/**
 * Top `top_n` terms of `topic` by relevance at `lambda`, as a JSON array of
 * `{"term": ..., "relevance": ...}`. Free `*json` with `cm_string_free`.
 *
 * # Safety
 * `m` must be a live handle and `json` writable.
 */
enum CmStatus cm_topic_model_top_terms_json(const struct CmTopicModel *m,
                                            size_t topic,
                                            double lambda,
                                            size_t top_n,
                                            char **json);

/**
 * # Safety
 * `m` must be null or a live handle, freed once.
 */
void cm_topic_model_free(struct CmTopicModel *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CASTMINE_H */
