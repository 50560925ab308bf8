#include "specsense/specsense.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "specsense/dataset.hpp"
#include "specsense/nnet/model_io.hpp"
#include "specsense/pipeline.hpp"
#include "specsense/transforms.hpp"

using namespace specsense;

struct ss_dataset {
  dataset::Dataset ds;
};

struct ss_model {
  nnet::Model model;
  std::vector<nnet::EpochStats> history;
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> class_names;
};

struct ss_report {
  pipeline::Evaluation ev;
  std::vector<std::string> class_names;
};

namespace {

thread_local std::string g_last_error;

ss_status set_error(ss_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

template <class F>
ss_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return SS_OK;
  } catch (const Error& e) {
    return set_error(static_cast<ss_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SS_ERR_INTERNAL, e.what());
  }
}

#define SS_REQUIRE_ARG(cond, msg) \
  if (!(cond)) return set_error(SS_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* ss_version(void) { return "0.1.0"; }

const char* ss_last_error(void) { return g_last_error.c_str(); }

const char* ss_status_string(ss_status status) {
  switch (status) {
    case SS_OK: return "ok";
    case SS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SS_ERR_UNSUPPORTED: return "unsupported";
    case SS_ERR_IO: return "i/o error";
    case SS_ERR_BAD_MAGIC: return "bad magic";
    case SS_ERR_VERSION: return "version mismatch";
    case SS_ERR_TRUNCATED: return "truncated";
    case SS_ERR_LABEL_RANGE: return "label out of range";
    case SS_ERR_SHAPE: return "shape mismatch";
    case SS_ERR_NON_FINITE: return "non-finite value";
    case SS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ss_status ss_dataset_generate(ss_task task, uint32_t per_class_per_snr, const int16_t* snr_grid, size_t snr_count,
                              uint64_t seed, size_t capture_length, ss_dataset** out) {
  SS_REQUIRE_ARG(out, "out is NULL");
  *out = nullptr;
  SS_REQUIRE_ARG(snr_grid || snr_count == 0, "snr_grid is NULL");
  SS_REQUIRE_ARG(task == SS_TASK_MODULATION || task == SS_TASK_INTERFERENCE, "unknown task");
  return guarded([&] {
    auto h = std::make_unique<ss_dataset>();
    h->ds = dataset::generate_dataset(static_cast<Task>(task), per_class_per_snr,
                                      std::span<const std::int16_t>(snr_grid, snr_count), seed,
                                      capture_length ? capture_length : dataset::kDefaultCaptureLength);
    *out = h.release();
  });
}

ss_status ss_dataset_load(const char* path, ss_dataset** out) {
  SS_REQUIRE_ARG(path && out, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<ss_dataset>();
    h->ds = dataset::load(path);
    *out = h.release();
  });
}

ss_status ss_dataset_save(const ss_dataset* ds, const char* path) {
  SS_REQUIRE_ARG(ds && path, "NULL argument");
  return guarded([&] { dataset::save(ds->ds, path); });
}

void ss_dataset_free(ss_dataset* ds) { delete ds; }

ss_task ss_dataset_task(const ss_dataset* ds) { return ds ? static_cast<ss_task>(ds->ds.task) : SS_TASK_MODULATION; }
size_t ss_dataset_size(const ss_dataset* ds) { return ds ? ds->ds.size() : 0; }
size_t ss_dataset_num_classes(const ss_dataset* ds) { return ds ? ds->ds.num_classes() : 0; }
size_t ss_dataset_capture_length(const ss_dataset* ds) { return ds ? ds->ds.capture_length : 0; }

const char* ss_dataset_class_name(const ss_dataset* ds, size_t k) {
  if (!ds || k >= ds->ds.num_classes()) return nullptr;
  return ds->ds.class_names[k].c_str();
}

size_t ss_dataset_class_count(const ss_dataset* ds, size_t k) {
  if (!ds) return 0;
  size_t n = 0;
  for (const auto& ex : ds->ds.examples) n += ex.label == k;
  return n;
}

ss_status ss_dataset_example(const ss_dataset* ds, size_t index, float* iq, uint16_t* label, int16_t* snr_db) {
  SS_REQUIRE_ARG(ds, "dataset is NULL");
  SS_REQUIRE_ARG(index < ds->ds.size(), "example index out of range");
  const auto& ex = ds->ds.examples[index];
  if (iq)
    for (size_t i = 0; i < ex.capture.size(); ++i) {
      iq[2 * i] = ex.capture.samples[i].real();
      iq[2 * i + 1] = ex.capture.samples[i].imag();
    }
  if (label) *label = ex.label;
  if (snr_db) *snr_db = ex.snr_db;
  return SS_OK;
}

void ss_train_options_init(ss_train_options* o) {
  if (!o) return;
  o->representation = SS_REPR_IQ;
  o->scale = SS_SCALE_DESK;
  o->learning_rate = 1e-3;
  o->batch_size = 64;
  o->epochs = 15;
  o->seed = 0;
  o->deterministic = 1;
  o->train_fraction = dataset::kDefaultTrainFraction;
}

ss_status ss_train(const ss_dataset* ds, const ss_train_options* options, ss_epoch_callback on_epoch, void* user,
                   ss_model** out) {
  SS_REQUIRE_ARG(ds && options && out, "NULL argument");
  *out = nullptr;
  SS_REQUIRE_ARG(options->representation >= SS_REPR_IQ && options->representation <= SS_REPR_FFT,
                 "unknown representation");
  SS_REQUIRE_ARG(options->scale == SS_SCALE_DESK || options->scale == SS_SCALE_FULL, "unknown model scale");
  return guarded([&] {
    pipeline::TrainOptions opt;
    opt.representation = static_cast<Representation>(options->representation);
    opt.model = options->scale == SS_SCALE_FULL ? nnet::ModelConfig::full() : nnet::ModelConfig::desk();
    opt.train.learning_rate = options->learning_rate;
    opt.train.batch_size = options->batch_size;
    opt.train.epochs = options->epochs;
    opt.train.seed = options->seed;
    opt.train.deterministic = options->deterministic != 0;
    opt.train_fraction = options->train_fraction;
    nnet::EpochCallback cb;
    if (on_epoch)
      cb = [&](const nnet::EpochStats& s) { on_epoch(user, s.epoch, s.train_loss, s.val_loss, s.val_accuracy); };
    pipeline::TrainOutcome result = pipeline::train(ds->ds, opt, cb);
    auto h = std::make_unique<ss_model>();
    h->model = std::move(result.model);
    h->history = std::move(result.history);
    h->test_accuracy = result.test_accuracy;
    h->class_names = ds->ds.class_names;
    *out = h.release();
  });
}

ss_status ss_model_save(const ss_model* model, const char* path) {
  SS_REQUIRE_ARG(model && path, "NULL argument");
  return guarded([&] { nnet::save_model(model->model, path); });
}

ss_status ss_model_load(const char* path, ss_model** out) {
  SS_REQUIRE_ARG(path && out, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<ss_model>();
    h->model = nnet::load_model(path);
    h->class_names = dataset::class_names(h->model.meta.task);
    require(h->class_names.size() == h->model.num_classes, ErrorCode::kShapeMismatch,
            "model K does not match its task's class inventory");
    *out = h.release();
  });
}

void ss_model_free(ss_model* model) { delete model; }

ss_task ss_model_task(const ss_model* m) { return m ? static_cast<ss_task>(m->model.meta.task) : SS_TASK_MODULATION; }
ss_representation ss_model_representation(const ss_model* m) {
  return m ? static_cast<ss_representation>(m->model.meta.representation) : SS_REPR_IQ;
}
size_t ss_model_num_classes(const ss_model* m) { return m ? m->model.num_classes : 0; }
size_t ss_model_capture_length(const ss_model* m) { return m ? m->model.input_size() / 2 : 0; }
uint64_t ss_model_seed(const ss_model* m) { return m ? m->model.meta.seed : 0; }

const char* ss_model_class_name(const ss_model* m, size_t k) {
  if (!m || k >= m->class_names.size()) return nullptr;
  return m->class_names[k].c_str();
}

size_t ss_model_history_length(const ss_model* m) { return m ? m->history.size() : 0; }

ss_status ss_model_history_entry(const ss_model* m, size_t i, size_t* epoch, double* train_loss, double* val_loss,
                                 double* val_acc) {
  SS_REQUIRE_ARG(m, "model is NULL");
  SS_REQUIRE_ARG(i < m->history.size(), "history index out of range");
  const auto& e = m->history[i];
  if (epoch) *epoch = e.epoch;
  if (train_loss) *train_loss = e.train_loss;
  if (val_loss) *val_loss = e.val_loss;
  if (val_acc) *val_acc = e.val_accuracy;
  return SS_OK;
}

ss_status ss_model_write_history(const ss_model* m, const char* path) {
  SS_REQUIRE_ARG(m && path, "NULL argument");
  return guarded([&] { pipeline::write_history_csv(m->history, path); });
}

double ss_model_test_accuracy(const ss_model* m) {
  return m ? m->test_accuracy : std::numeric_limits<double>::quiet_NaN();
}

ss_status ss_evaluate(const ss_model* model, const ss_dataset* ds, ss_report** out) {
  SS_REQUIRE_ARG(model && ds && out, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<ss_report>();
    h->ev = pipeline::evaluate(model->model, ds->ds);
    h->class_names = ds->ds.class_names;
    *out = h.release();
  });
}

ss_status ss_report_write(const ss_report* r, const char* dir) {
  SS_REQUIRE_ARG(r && dir, "NULL argument");
  return guarded([&] { eval::emit_report(r->ev.report, r->ev.confusion, r->class_names, dir); });
}

void ss_report_free(ss_report* r) { delete r; }

double ss_report_accuracy(const ss_report* r) { return r ? r->ev.report.accuracy : 0.0; }
double ss_report_precision(const ss_report* r) { return r ? r->ev.report.precision_avg : 0.0; }
double ss_report_recall(const ss_report* r) { return r ? r->ev.report.recall_avg : 0.0; }
double ss_report_f1(const ss_report* r) { return r ? r->ev.report.f1_avg : 0.0; }
size_t ss_report_num_classes(const ss_report* r) { return r ? r->ev.confusion.num_classes : 0; }

uint64_t ss_report_confusion(const ss_report* r, size_t truth, size_t pred) {
  if (!r || truth >= r->ev.confusion.num_classes || pred >= r->ev.confusion.num_classes) return 0;
  return r->ev.confusion.at(truth, pred);
}

size_t ss_report_snr_count(const ss_report* r) { return r ? r->ev.report.per_snr.size() : 0; }

ss_status ss_report_snr_entry(const ss_report* r, size_t i, int* snr_db, double* accuracy, size_t* count) {
  SS_REQUIRE_ARG(r, "report is NULL");
  SS_REQUIRE_ARG(i < r->ev.report.per_snr.size(), "SNR row index out of range");
  const auto& row = r->ev.report.per_snr[i];
  if (snr_db) *snr_db = row.snr_db;
  if (accuracy) *accuracy = row.accuracy;
  if (count) *count = row.count;
  return SS_OK;
}

ss_status ss_predict(const ss_model* model, const float* iq, size_t n_samples, size_t* label, double* probabilities) {
  SS_REQUIRE_ARG(model && iq, "NULL argument");
  const size_t n = model->model.input_size() / 2;
  if (n_samples != n)
    return set_error(SS_ERR_SHAPE, "capture has " + std::to_string(n_samples) + " samples, model expects " +
                                       std::to_string(n));
  return guarded([&] {
    IqVector capture;
    capture.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      require(std::isfinite(iq[2 * i]) && std::isfinite(iq[2 * i + 1]), ErrorCode::kNonFinite,
              "capture contains non-finite samples");
      capture.samples[i] = {iq[2 * i], iq[2 * i + 1]};
    }
    const auto features = transforms::featurize(capture, model->model.meta.representation);
    const nnet::Prediction p = nnet::predict(model->model, features.data);
    if (label) *label = p.label;
    if (probabilities) std::copy(p.probabilities.begin(), p.probabilities.end(), probabilities);
  });
}

}  // extern "C"
