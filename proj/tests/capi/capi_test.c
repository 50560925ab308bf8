/* Exercises the shared library through the C header only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "specsense/specsense.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static size_t epochs_seen = 0;

static void on_epoch(void* user, size_t epoch, double train_loss, double val_loss, double val_acc) {
  (void)user;
  (void)train_loss;
  (void)val_loss;
  epochs_seen = epoch;
  EXPECT(val_acc >= 0.0 && val_acc <= 1.0);
}

static void path_in(char* buf, size_t n, const char* dir, const char* name) { snprintf(buf, n, "%s/%s", dir, name); }

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  char ds_path[1024], model_path[1024], report_dir[1024], hist_path[1024];
  path_in(ds_path, sizeof ds_path, dir, "capi.ds");
  path_in(model_path, sizeof model_path, dir, "capi.model");
  path_in(report_dir, sizeof report_dir, dir, "capi_report");
  path_in(hist_path, sizeof hist_path, dir, "capi_history.csv");

  EXPECT(strlen(ss_version()) > 0);
  EXPECT(strcmp(ss_status_string(SS_OK), "") != 0);

  /* generation */
  const int16_t grid[2] = {0, 10};
  ss_dataset* ds = NULL;
  EXPECT(ss_dataset_generate(SS_TASK_MODULATION, 4, grid, 2, 3, 128, &ds) == SS_OK);
  if (!ds) return 1;
  EXPECT(ss_dataset_size(ds) == 88);
  EXPECT(ss_dataset_num_classes(ds) == 11);
  EXPECT(ss_dataset_capture_length(ds) == 128);
  EXPECT(ss_dataset_task(ds) == SS_TASK_MODULATION);
  EXPECT(strcmp(ss_dataset_class_name(ds, 0), "BPSK") == 0);
  EXPECT(ss_dataset_class_name(ds, 11) == NULL);
  EXPECT(ss_dataset_class_count(ds, 3) == 8);

  float iq[256];
  uint16_t label = 99;
  int16_t snr = 99;
  EXPECT(ss_dataset_example(ds, 87, iq, &label, &snr) == SS_OK);
  EXPECT(label == 10 && snr == 10);
  EXPECT(ss_dataset_example(ds, 88, iq, &label, &snr) == SS_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(ss_last_error()) > 0);

  /* argument errors */
  const int16_t bad_grid[1] = {40};
  ss_dataset* bad = NULL;
  EXPECT(ss_dataset_generate(SS_TASK_MODULATION, 1, bad_grid, 1, 1, 128, &bad) == SS_ERR_INVALID_ARGUMENT);
  EXPECT(bad == NULL);
  EXPECT(ss_dataset_generate(SS_TASK_MODULATION, 1, grid, 2, 1, 128, NULL) == SS_ERR_INVALID_ARGUMENT);
  EXPECT(ss_dataset_load("/nonexistent/specsense.ds", &bad) == SS_ERR_IO);

  /* persistence */
  EXPECT(ss_dataset_save(ds, ds_path) == SS_OK);
  ss_dataset* loaded = NULL;
  EXPECT(ss_dataset_load(ds_path, &loaded) == SS_OK);
  if (loaded) {
    float iq2[256];
    EXPECT(ss_dataset_example(loaded, 87, iq2, NULL, NULL) == SS_OK);
    EXPECT(memcmp(iq, iq2, sizeof iq) == 0);
    ss_dataset_free(loaded);
  }

  /* training */
  ss_train_options opt;
  ss_train_options_init(&opt);
  EXPECT(opt.batch_size == 64 && opt.epochs == 15);
  opt.epochs = 2;
  opt.seed = 5;
  ss_model* model = NULL;
  EXPECT(ss_train(ds, &opt, on_epoch, NULL, &model) == SS_OK);
  if (!model) return 1;
  EXPECT(epochs_seen == 2);
  EXPECT(ss_model_history_length(model) == 2);
  size_t epoch = 0;
  double tl = 0, vl = 0, va = 0;
  EXPECT(ss_model_history_entry(model, 1, &epoch, &tl, &vl, &va) == SS_OK);
  EXPECT(epoch == 2 && isfinite(tl) && isfinite(vl));
  EXPECT(ss_model_history_entry(model, 2, &epoch, &tl, &vl, &va) == SS_ERR_INVALID_ARGUMENT);
  EXPECT(ss_model_write_history(model, hist_path) == SS_OK);
  const double test_acc = ss_model_test_accuracy(model);
  EXPECT(test_acc >= 0.0 && test_acc <= 1.0);
  EXPECT(ss_model_seed(model) == 5);
  EXPECT(ss_model_representation(model) == SS_REPR_IQ);

  opt.batch_size = 0;
  ss_model* none = NULL;
  EXPECT(ss_train(ds, &opt, NULL, NULL, &none) == SS_ERR_INVALID_ARGUMENT);

  /* save / load / evaluate */
  EXPECT(ss_model_save(model, model_path) == SS_OK);
  ss_model* reloaded = NULL;
  EXPECT(ss_model_load(model_path, &reloaded) == SS_OK);
  if (!reloaded) return 1;
  EXPECT(ss_model_num_classes(reloaded) == 11);
  EXPECT(ss_model_capture_length(reloaded) == 128);
  EXPECT(ss_model_task(reloaded) == SS_TASK_MODULATION);
  EXPECT(strcmp(ss_model_class_name(reloaded, 3), "QAM16") == 0);
  EXPECT(ss_model_history_length(reloaded) == 0);
  EXPECT(isnan(ss_model_test_accuracy(reloaded)));

  ss_report* report = NULL;
  EXPECT(ss_evaluate(reloaded, ds, &report) == SS_OK);
  if (report) {
    EXPECT(fabs(ss_report_accuracy(report) - test_acc) <= 1e-9);
    EXPECT(ss_report_num_classes(report) == 11);
    uint64_t total = 0;
    for (size_t i = 0; i < 11; ++i)
      for (size_t j = 0; j < 11; ++j) total += ss_report_confusion(report, i, j);
    size_t counted = 0;
    for (size_t i = 0; i < ss_report_snr_count(report); ++i) {
      int s = 0;
      double a = 0;
      size_t c = 0;
      EXPECT(ss_report_snr_entry(report, i, &s, &a, &c) == SS_OK);
      counted += c;
    }
    EXPECT(total == counted && total > 0);
    EXPECT(ss_report_write(report, report_dir) == SS_OK);
    ss_report_free(report);
  }

  /* prediction */
  size_t pred = 99;
  double probs[11];
  EXPECT(ss_predict(reloaded, iq, 128, &pred, probs) == SS_OK);
  double sum = 0;
  for (size_t k = 0; k < 11; ++k) sum += probs[k];
  EXPECT(fabs(sum - 1.0) <= 1e-9);
  EXPECT(pred < 11);
  for (size_t k = 0; k < 11; ++k) EXPECT(probs[k] <= probs[pred]);
  EXPECT(ss_predict(reloaded, iq, 64, &pred, probs) == SS_ERR_SHAPE);
  iq[5] = NAN;
  EXPECT(ss_predict(reloaded, iq, 128, &pred, probs) != SS_OK);

  /* task mismatch */
  ss_dataset* other = NULL;
  EXPECT(ss_dataset_generate(SS_TASK_INTERFERENCE, 1, grid, 1, 1, 128, &other) == SS_OK);
  ss_report* mismatch = NULL;
  EXPECT(ss_evaluate(reloaded, other, &mismatch) == SS_ERR_SHAPE);
  EXPECT(mismatch == NULL);

  /* NULL handles are tolerated by the free functions */
  ss_dataset_free(NULL);
  ss_model_free(NULL);
  ss_report_free(NULL);

  ss_dataset_free(other);
  ss_model_free(reloaded);
  ss_model_free(model);
  ss_dataset_free(ds);

  if (failures) fprintf(stderr, "%d expectation(s) failed\n", failures);
  else printf("C API: all expectations met\n");
  return failures ? 1 : 0;
}
