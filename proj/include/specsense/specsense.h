/* specsense C API: opaque handles, integer status codes.
 *
 * Every function returning ss_status leaves a human-readable message for the
 * calling thread in ss_last_error() when it fails. Handles are owned by the
 * caller and released with the matching *_free function; a model handle is
 * immutable after creation and may be shared across threads for prediction. */
#ifndef SPECSENSE_H
#define SPECSENSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPECSENSE_BUILDING_LIBRARY)
#define SS_API __attribute__((visibility("default")))
#else
#define SS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
  SS_OK = 0,
  SS_ERR_INVALID_ARGUMENT = 1,
  SS_ERR_UNSUPPORTED = 2,
  SS_ERR_IO = 3,
  SS_ERR_BAD_MAGIC = 4,
  SS_ERR_VERSION = 5,
  SS_ERR_TRUNCATED = 6,
  SS_ERR_LABEL_RANGE = 7,
  SS_ERR_SHAPE = 8,
  SS_ERR_NON_FINITE = 9,
  SS_ERR_INTERNAL = 100
} ss_status;

typedef enum ss_task { SS_TASK_MODULATION = 0, SS_TASK_INTERFERENCE = 1 } ss_task;
typedef enum ss_representation { SS_REPR_IQ = 0, SS_REPR_AMP_PHASE = 1, SS_REPR_FFT = 2 } ss_representation;
typedef enum ss_model_scale { SS_SCALE_DESK = 0, SS_SCALE_FULL = 1 } ss_model_scale;

typedef struct ss_dataset ss_dataset;
typedef struct ss_model ss_model;
typedef struct ss_report ss_report;

SS_API const char* ss_version(void);
SS_API const char* ss_last_error(void);
SS_API const char* ss_status_string(ss_status status);

/* ---- datasets ---------------------------------------------------------- */

/* K * snr_count * per_class_per_snr captures of capture_length samples
 * (0 selects the default of 128). Deterministic in all arguments. */
SS_API ss_status ss_dataset_generate(ss_task task, uint32_t per_class_per_snr, const int16_t* snr_grid,
                                     size_t snr_count, uint64_t seed, size_t capture_length, ss_dataset** out);
SS_API ss_status ss_dataset_load(const char* path, ss_dataset** out);
SS_API ss_status ss_dataset_save(const ss_dataset* ds, const char* path);
SS_API void ss_dataset_free(ss_dataset* ds);

SS_API ss_task ss_dataset_task(const ss_dataset* ds);
SS_API size_t ss_dataset_size(const ss_dataset* ds);
SS_API size_t ss_dataset_num_classes(const ss_dataset* ds);
SS_API size_t ss_dataset_capture_length(const ss_dataset* ds);
/* NULL when k is out of range. The string lives as long as the handle. */
SS_API const char* ss_dataset_class_name(const ss_dataset* ds, size_t k);
/* Number of examples labelled k. */
SS_API size_t ss_dataset_class_count(const ss_dataset* ds, size_t k);
/* iq receives 2 * capture_length floats (I0, Q0, I1, Q1, ...); any output
 * pointer may be NULL. */
SS_API ss_status ss_dataset_example(const ss_dataset* ds, size_t index, float* iq, uint16_t* label,
                                    int16_t* snr_db);

/* ---- training ---------------------------------------------------------- */

typedef struct ss_train_options {
  ss_representation representation;
  ss_model_scale scale;
  double learning_rate;
  size_t batch_size;
  size_t epochs;
  uint64_t seed; /* initialization, shuffling, dropout and the data split */
  int deterministic;
  double train_fraction;
} ss_train_options;

/* Desk-scale defaults: IQ, desk network, lr 1e-3, batch 64, 15 epochs,
 * seed 0, deterministic, 67% training data. */
SS_API void ss_train_options_init(ss_train_options* options);

typedef void (*ss_epoch_callback)(void* user, size_t epoch, double train_loss, double val_loss, double val_acc);

SS_API ss_status ss_train(const ss_dataset* ds, const ss_train_options* options, ss_epoch_callback on_epoch,
                          void* user, ss_model** out);

SS_API ss_status ss_model_save(const ss_model* model, const char* path);
SS_API ss_status ss_model_load(const char* path, ss_model** out);
SS_API void ss_model_free(ss_model* model);

SS_API ss_task ss_model_task(const ss_model* model);
SS_API ss_representation ss_model_representation(const ss_model* model);
SS_API size_t ss_model_num_classes(const ss_model* model);
SS_API size_t ss_model_capture_length(const ss_model* model);
SS_API uint64_t ss_model_seed(const ss_model* model);
SS_API const char* ss_model_class_name(const ss_model* model, size_t k);

/* Training history; empty for loaded models. */
SS_API size_t ss_model_history_length(const ss_model* model);
SS_API ss_status ss_model_history_entry(const ss_model* model, size_t i, size_t* epoch, double* train_loss,
                                        double* val_loss, double* val_acc);
SS_API ss_status ss_model_write_history(const ss_model* model, const char* path);
/* Test-partition accuracy measured at the end of ss_train; NaN for loaded models. */
SS_API double ss_model_test_accuracy(const ss_model* model);

/* ---- evaluation and prediction ----------------------------------------- */

/* Scores the test partition of the split recorded in the model. */
SS_API ss_status ss_evaluate(const ss_model* model, const ss_dataset* ds, ss_report** out);
/* confusion.csv, per_snr.csv, summary.txt, curve.svg */
SS_API ss_status ss_report_write(const ss_report* report, const char* dir);
SS_API void ss_report_free(ss_report* report);

SS_API double ss_report_accuracy(const ss_report* report);
SS_API double ss_report_precision(const ss_report* report);
SS_API double ss_report_recall(const ss_report* report);
SS_API double ss_report_f1(const ss_report* report);
SS_API size_t ss_report_num_classes(const ss_report* report);
SS_API uint64_t ss_report_confusion(const ss_report* report, size_t truth, size_t pred);
SS_API size_t ss_report_snr_count(const ss_report* report);
SS_API ss_status ss_report_snr_entry(const ss_report* report, size_t i, int* snr_db, double* accuracy,
                                     size_t* count);

/* Classifies one raw capture of n_samples interleaved (I, Q) float pairs,
 * applying the model's representation. probabilities (may be NULL) receives
 * K values. */
SS_API ss_status ss_predict(const ss_model* model, const float* iq, size_t n_samples, size_t* label,
                            double* probabilities);

#ifdef __cplusplus
}
#endif

#endif /* SPECSENSE_H */
