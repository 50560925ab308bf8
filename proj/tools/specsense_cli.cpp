// specsense command-line front end. Talks to the library only through the C
// API in specsense/specsense.h.
//
// exit codes: 0 ok, 2 usage / malformed input, 3 I/O, 4 data or shape error

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specsense/specsense.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ss_status s) {
  switch (s) {
    case SS_OK: return kExitOk;
    case SS_ERR_INVALID_ARGUMENT: return kExitUsage;
    case SS_ERR_IO: return kExitIo;
    default: return kExitData;
  }
}

// Prints the library's message and converts the status into an exit code.
int report(ss_status s, const std::string& what) {
  if (s == SS_OK) return kExitOk;
  std::cerr << "specsense: " << what << ": " << ss_last_error() << " (" << ss_status_string(s) << ")\n";
  return exit_code(s);
}

long parse_int(const std::string& text, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || errno != 0) throw UsageError("bad " + what + " '" + text + "'");
  return v;
}

// "start:step:end" (inclusive), a comma list, or a single value.
std::vector<int16_t> parse_snr_grid(const std::string& spec) {
  std::vector<int16_t> grid;
  auto push = [&](long v) {
    if (v < -20 || v > 20) throw UsageError("SNR " + std::to_string(v) + " dB is outside [-20, 20]");
    grid.push_back(static_cast<int16_t>(v));
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("SNR grid must be start:step:end, got '" + spec + "'");
    const long start = parse_int(parts[0], "SNR start"), step = parse_int(parts[1], "SNR step"),
               end = parse_int(parts[2], "SNR end");
    if (step == 0) throw UsageError("SNR step must be non-zero");
    if ((step > 0 && start > end) || (step < 0 && start < end))
      throw UsageError("SNR range '" + spec + "' is empty");
    for (long v = start; step > 0 ? v <= end : v >= end; v += step) push(v);
  } else {
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) push(parse_int(p, "SNR value"));
  }
  if (grid.empty()) throw UsageError("empty SNR grid");
  return grid;
}

ss_task parse_task(const std::string& t) {
  if (t == "mod" || t == "modulation") return SS_TASK_MODULATION;
  if (t == "int" || t == "interference") return SS_TASK_INTERFERENCE;
  throw UsageError("unknown task '" + t + "' (mod|int)");
}

ss_representation parse_repr(const std::string& r) {
  if (r == "iq") return SS_REPR_IQ;
  if (r == "ap") return SS_REPR_AMP_PHASE;
  if (r == "fft") return SS_REPR_FFT;
  throw UsageError("unknown representation '" + r + "' (iq|ap|fft)");
}

const char* repr_name(ss_representation r) {
  switch (r) {
    case SS_REPR_IQ: return "iq";
    case SS_REPR_AMP_PHASE: return "ap";
    case SS_REPR_FFT: return "fft";
  }
  return "?";
}

// RAII wrappers over the C handles.
struct DatasetHandle {
  ss_dataset* h = nullptr;
  ~DatasetHandle() { ss_dataset_free(h); }
};
struct ModelHandle {
  ss_model* h = nullptr;
  ~ModelHandle() { ss_model_free(h); }
};
struct ReportHandle {
  ss_report* h = nullptr;
  ~ReportHandle() { ss_report_free(h); }
};

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string task = "mod";
  uint32_t per_class = 0;
  std::string snrs;
  std::optional<uint64_t> seed;
  std::string out;
  size_t length = 128;
};

int cmd_generate(const GenerateArgs& a) {
  if (!a.seed) throw UsageError("--seed is required");
  const ss_task task = parse_task(a.task);
  const std::vector<int16_t> grid = parse_snr_grid(a.snrs);
  if (a.per_class == 0) throw UsageError("--per-class must be >= 1");
  DatasetHandle ds;
  if (int rc = report(ss_dataset_generate(task, a.per_class, grid.data(), grid.size(), *a.seed, a.length, &ds.h),
                      "generate"))
    return rc;
  if (int rc = report(ss_dataset_save(ds.h, a.out.c_str()), "save " + a.out)) return rc;
  std::cout << "wrote " << ss_dataset_size(ds.h) << " records to " << a.out << '\n';
  for (size_t k = 0; k < ss_dataset_num_classes(ds.h); ++k)
    std::cout << "  " << std::left << std::setw(12) << ss_dataset_class_name(ds.h, k) << ' '
              << ss_dataset_class_count(ds.h, k) << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string dataset;
  std::string repr = "iq";
  std::string scale = "desk";
  std::optional<size_t> epochs;
  std::optional<size_t> batch;
  double lr = 1e-3;
  std::optional<uint64_t> seed;
  bool deterministic = false;
  double train_fraction = 0.67;
  std::string out;
  std::string history;
};

int cmd_train(const TrainArgs& a) {
  if (!a.seed) throw UsageError("--seed is required");
  ss_train_options opt;
  ss_train_options_init(&opt);
  opt.representation = parse_repr(a.repr);
  if (a.scale == "full") {
    opt.scale = SS_SCALE_FULL;
    opt.batch_size = 1024;
    opt.epochs = 70;
  } else if (a.scale != "desk") {
    throw UsageError("unknown model scale '" + a.scale + "' (desk|full)");
  }
  if (a.epochs) opt.epochs = *a.epochs;
  if (a.batch) opt.batch_size = *a.batch;
  if (opt.batch_size == 0) throw UsageError("--batch must be >= 1");
  if (!(a.lr > 0.0)) throw UsageError("--lr must be > 0");
  if (!(a.train_fraction > 0.0 && a.train_fraction < 1.0)) throw UsageError("--train-fraction must be in (0, 1)");
  opt.learning_rate = a.lr;
  opt.seed = *a.seed;
  opt.deterministic = a.deterministic ? 1 : 0;
  opt.train_fraction = a.train_fraction;

  DatasetHandle ds;
  if (int rc = report(ss_dataset_load(a.dataset.c_str(), &ds.h), "load " + a.dataset)) return rc;
  ModelHandle model;
  auto on_epoch = [](void*, size_t epoch, double train_loss, double val_loss, double val_acc) {
    std::cout << "epoch " << epoch << "  train_loss " << std::fixed << std::setprecision(4) << train_loss
              << "  val_loss " << val_loss << "  val_acc " << val_acc << std::endl;
  };
  if (int rc = report(ss_train(ds.h, &opt, on_epoch, nullptr, &model.h), "train")) return rc;
  if (int rc = report(ss_model_save(model.h, a.out.c_str()), "save " + a.out)) return rc;
  const std::string history =
      a.history.empty() ? (std::filesystem::path(a.out).parent_path() / "history.csv").string() : a.history;
  if (int rc = report(ss_model_write_history(model.h, history.c_str()), "write " + history)) return rc;
  std::cout << "model: " << a.out << "\nhistory: " << history << "\ntest_accuracy " << std::defaultfloat
            << std::setprecision(17) << ss_model_test_accuracy(model.h) << '\n';
  return kExitOk;
}

struct EvaluateArgs {
  std::string model, dataset, out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  ModelHandle model;
  if (int rc = report(ss_model_load(a.model.c_str(), &model.h), "load " + a.model)) return rc;
  DatasetHandle ds;
  if (int rc = report(ss_dataset_load(a.dataset.c_str(), &ds.h), "load " + a.dataset)) return rc;
  ReportHandle rep;
  if (int rc = report(ss_evaluate(model.h, ds.h, &rep.h), "evaluate")) return rc;
  if (int rc = report(ss_report_write(rep.h, a.out.c_str()), "write report to " + a.out)) return rc;
  std::cout << std::setprecision(17) << "accuracy " << ss_report_accuracy(rep.h) << std::fixed
            << std::setprecision(6) << "\nprecision "
            << ss_report_precision(rep.h) << "\nrecall " << ss_report_recall(rep.h) << "\nf1 " << ss_report_f1(rep.h)
            << '\n';
  for (size_t i = 0; i < ss_report_snr_count(rep.h); ++i) {
    int snr = 0;
    double acc = 0;
    size_t count = 0;
    ss_report_snr_entry(rep.h, i, &snr, &acc, &count);
    std::cout << "  snr " << std::setw(4) << snr << " dB  acc " << acc << "  (n=" << count << ")\n";
  }
  std::cout << "report: " << a.out << '\n';
  return kExitOk;
}

struct PredictArgs {
  std::string model, input, dataset;
  std::optional<size_t> index;
  size_t top = 0;
};

int cmd_predict(const PredictArgs& a) {
  ModelHandle model;
  if (int rc = report(ss_model_load(a.model.c_str(), &model.h), "load " + a.model)) return rc;
  const size_t n = ss_model_capture_length(model.h);
  std::vector<float> iq(2 * n);
  if (!a.input.empty() == !a.dataset.empty()) throw UsageError("give exactly one of --input or --dataset/--index");
  if (!a.input.empty()) {
    std::ifstream in(a.input, std::ios::binary | std::ios::ate);
    if (!in) {
      std::cerr << "specsense: cannot open " << a.input << '\n';
      return kExitIo;
    }
    const auto size = static_cast<size_t>(in.tellg());
    if (size != iq.size() * sizeof(float))
      throw UsageError("capture file " + a.input + " has " + std::to_string(size) + " bytes, expected " +
                       std::to_string(iq.size() * sizeof(float)) + " (" + std::to_string(n) +
                       " interleaved float32 I/Q pairs)");
    in.seekg(0);
    in.read(reinterpret_cast<char*>(iq.data()), static_cast<std::streamsize>(size));
    if (!in) {
      std::cerr << "specsense: read failed: " << a.input << '\n';
      return kExitIo;
    }
  } else {
    if (!a.index) throw UsageError("--index is required with --dataset");
    DatasetHandle ds;
    if (int rc = report(ss_dataset_load(a.dataset.c_str(), &ds.h), "load " + a.dataset)) return rc;
    if (ss_dataset_capture_length(ds.h) != n) {
      std::cerr << "specsense: dataset capture length " << ss_dataset_capture_length(ds.h) << " != model input "
                << n << '\n';
      return kExitData;
    }
    uint16_t label = 0;
    if (int rc = report(ss_dataset_example(ds.h, *a.index, iq.data(), &label, nullptr), "read example")) return rc;
    std::cout << "true class: " << ss_dataset_class_name(ds.h, label) << '\n';
  }
  const size_t k = ss_model_num_classes(model.h);
  std::vector<double> probs(k);
  size_t label = 0;
  if (int rc = report(ss_predict(model.h, iq.data(), n, &label, probs.data()), "predict")) return rc;
  std::vector<size_t> order(k);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) { return probs[x] > probs[y]; });
  std::cout << "representation: " << repr_name(ss_model_representation(model.h)) << '\n';
  std::cout << "predicted: " << ss_model_class_name(model.h, label) << '\n';
  const size_t shown = a.top == 0 ? k : std::min(a.top, k);
  for (size_t i = 0; i < shown; ++i)
    std::cout << "  " << std::left << std::setw(12) << ss_model_class_name(model.h, order[i]) << ' ' << std::fixed
              << std::setprecision(6) << probs[order[i]] << '\n';
  return kExitOk;
}

// CLI11 only reads config files at the top level, so a subcommand's
// --config is expanded here: each key=value becomes --key value unless the
// same option was given on the command line (flags win).
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
  if (args.empty()) return args;
  CLI::App* sub = app.get_subcommand_no_throw(args[0]);
  if (sub == nullptr) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  if (!std::filesystem::exists(path)) throw CLI::FileError::Missing(path);
  CLI::ConfigBase reader;
  reader.comment('#');
  for (const CLI::ConfigItem& item : reader.from_file(path)) {
    if (!item.parents.empty() && item.parents.front() != sub->get_name()) continue;
    const std::string flag = "--" + item.name;
    CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || flag == "--config") throw UsageError("unknown key '" + item.name + "' in " + path);
    const bool given = std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    if (opt->get_expected_min() == 0) {
      if (value.empty() || value == "true" || value == "1" || value == "yes" || value == "on") args.push_back(flag);
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specsense: RF signal classification experiments (generate, train, evaluate, predict)"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(ss_version()));

  std::string config_path;  // consumed by expand_config()
  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Synthesize a labelled dataset container");
  g->add_option("--config", config_path, "key=value file (# comments); command-line flags take precedence");
  g->add_option("--task", gen.task, "mod | int")->capture_default_str();
  g->add_option("--per-class", gen.per_class, "examples per class per SNR point")->required();
  g->add_option("--snrs", gen.snrs, "SNR grid start:step:end (inclusive) or comma list")->required();
  g->add_option("--seed", gen.seed, "master seed");
  g->add_option("--length", gen.length, "samples per capture")->capture_default_str();
  g->add_option("--out", gen.out, "output container path")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Featurize, split, train and save a model");
  t->add_option("--config", config_path, "key=value file (# comments); command-line flags take precedence");
  t->add_option("--dataset", tr.dataset, "dataset container")->required();
  t->add_option("--repr", tr.repr, "iq | ap | fft")->capture_default_str();
  t->add_option("--scale", tr.scale, "desk | full")->capture_default_str();
  t->add_option("--epochs", tr.epochs, "epochs (desk 15, full 70)");
  t->add_option("--batch", tr.batch, "batch size (desk 64, full 1024)");
  t->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
  t->add_option("--seed", tr.seed, "seed for init, shuffling, dropout and the split");
  t->add_flag("--deterministic", tr.deterministic, "fixed-order reductions (always on; accepted for scripts)");
  t->add_option("--train-fraction", tr.train_fraction, "training share of the split")->capture_default_str();
  t->add_option("--out", tr.out, "model output path")->required();
  t->add_option("--history", tr.history, "history CSV path (default: history.csv next to the model)");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score the recorded test split and write report files");
  e->add_option("--config", config_path, "key=value file (# comments); command-line flags take precedence");
  e->add_option("--model", ev.model, "model file")->required();
  e->add_option("--dataset", ev.dataset, "dataset container")->required();
  e->add_option("--out", ev.out, "report directory")->required();

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Classify one capture");
  p->add_option("--config", config_path, "key=value file (# comments); command-line flags take precedence");
  p->add_option("--model", pr.model, "model file")->required();
  p->add_option("--input", pr.input, "raw capture: N interleaved float32 (I, Q) pairs, little-endian");
  p->add_option("--dataset", pr.dataset, "take the capture from a dataset container instead");
  p->add_option("--index", pr.index, "record index with --dataset");
  p->add_option("--top", pr.top, "show only the k most likely classes (0 = all)");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
      args = expand_config(app, std::move(args));
    } catch (const UsageError& err) {
      std::cerr << "specsense: " << err.what() << '\n';
      return kExitUsage;
    }
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::FileError& err) {
    std::cerr << "specsense: " << err.what() << '\n';
    return kExitIo;
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen);
    if (t->parsed()) return cmd_train(tr);
    if (e->parsed()) return cmd_evaluate(ev);
    if (p->parsed()) return cmd_predict(pr);
  } catch (const UsageError& err) {
    std::cerr << "specsense: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
