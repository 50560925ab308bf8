#include "specsense/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace specsense::eval {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + p.string());
  return out;
}

// CSV field quoting for class names (they never need it today, but a comma
// in a name must not shift columns).
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_curve_svg(const std::vector<SnrAccuracy>& rows, const std::filesystem::path& path) {
  constexpr double kW = 480, kH = 320, kPad = 40;
  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  out << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kW - 2 * kPad << "\" height=\""
      << kH - 2 * kPad << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 8 << "\" text-anchor=\"middle\" font-size=\"12\">SNR (dB)</text>\n";
  out << "<text x=\"12\" y=\"" << kH / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 " << kH / 2
      << ")\" text-anchor=\"middle\">accuracy</text>\n";
  if (!rows.empty()) {
    const double lo = rows.front().snr_db, hi = rows.back().snr_db;
    const double span = hi > lo ? hi - lo : 1.0;
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double x = kPad + (rows[i].snr_db - lo) / span * (kW - 2 * kPad);
      const double y = kH - kPad - rows[i].accuracy * (kH - 2 * kPad);
      out << (i ? " " : "") << fixed(x, 2) << ',' << fixed(y, 2);
    }
    out << "\"/>\n";
    out << "<text x=\"" << kPad << "\" y=\"" << kH - kPad + 14 << "\" font-size=\"10\">" << rows.front().snr_db
        << "</text>\n";
    out << "<text x=\"" << kW - kPad << "\" y=\"" << kH - kPad + 14 << "\" font-size=\"10\" text-anchor=\"end\">"
        << rows.back().snr_db << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

ConfusionMatrix confusion(std::span<const std::size_t> preds, std::span<const std::size_t> truths,
                          std::size_t num_classes) {
  require(preds.size() == truths.size(), ErrorCode::kShapeMismatch, "confusion: sequence lengths differ");
  require(num_classes > 0, ErrorCode::kInvalidArgument, "confusion: K must be positive");
  ConfusionMatrix cm{num_classes, std::vector<std::uint64_t>(num_classes * num_classes, 0)};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    require(preds[i] < num_classes && truths[i] < num_classes, ErrorCode::kLabelOutOfRange,
            "confusion: label out of range at position " + std::to_string(i));
    ++cm.counts[truths[i] * num_classes + preds[i]];
  }
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::size_t k = cm.num_classes;
  const std::uint64_t total = cm.total();
  require(total > 0, ErrorCode::kInvalidArgument, "metrics: confusion matrix is empty");
  MetricsReport r;
  r.per_class.resize(k);
  std::uint64_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += cm.at(c, j);
      col += cm.at(j, c);
    }
    const auto tp = static_cast<double>(cm.at(c, c));
    correct += cm.at(c, c);
    ClassMetrics& m = r.per_class[c];
    m.support = row;
    if (col > 0) m.precision = tp / static_cast<double>(col);
    else r.notes.push_back("class " + std::to_string(c) + ": never predicted, precision set to 0");
    if (row > 0) m.recall = tp / static_cast<double>(row);
    else r.notes.push_back("class " + std::to_string(c) + ": no true examples, recall set to 0");
    if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    const double w = static_cast<double>(row) / static_cast<double>(total);
    r.precision_avg += w * m.precision;
    r.recall_avg += w * m.recall;
    r.f1_avg += w * m.f1;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  return r;
}

std::vector<SnrAccuracy> per_snr_accuracy(std::span<const std::size_t> preds, std::span<const std::size_t> truths,
                                          std::span<const std::int16_t> snr_db, std::span<const std::int16_t> grid,
                                          std::vector<std::string>* warnings) {
  require(preds.size() == truths.size() && preds.size() == snr_db.size(), ErrorCode::kShapeMismatch,
          "per_snr_accuracy: sequence lengths differ");
  std::map<int, std::pair<std::uint64_t, std::uint64_t>> buckets;  // snr -> (count, correct)
  for (std::size_t i = 0; i < preds.size(); ++i) {
    auto& b = buckets[snr_db[i]];
    ++b.first;
    b.second += preds[i] == truths[i];
  }
  if (warnings)
    for (std::int16_t s : grid)
      if (!buckets.count(s)) warnings->push_back("SNR " + std::to_string(s) + " dB: no test examples, skipped");
  std::vector<SnrAccuracy> rows;
  for (const auto& [snr, b] : buckets)
    rows.push_back({snr, b.first, static_cast<double>(b.second) / static_cast<double>(b.first)});
  return rows;
}

std::vector<SnrAccuracy> per_snr_accuracy(const nnet::Model& model, const nnet::FeatureSet& test_set) {
  const std::vector<std::size_t> preds = nnet::predict_labels(model, test_set);
  const std::vector<std::size_t> truths(test_set.labels.begin(), test_set.labels.end());
  return per_snr_accuracy(preds, truths, test_set.snr_db);
}

void emit_report(const MetricsReport& report, const ConfusionMatrix& cm, std::span<const std::string> class_names,
                 const std::filesystem::path& dir) {
  const std::size_t k = cm.num_classes;
  require(class_names.size() == k, ErrorCode::kShapeMismatch, "emit_report: class name count != K");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create report directory " + dir.string() + ": " + ec.message());

  {
    std::ofstream out = open_out(dir / "confusion.csv");
    out << "true\\pred";
    for (const auto& n : class_names) out << ',' << csv_field(n);
    out << '\n';
    for (std::size_t t = 0; t < k; ++t) {
      out << csv_field(class_names[t]);
      for (std::size_t p = 0; p < k; ++p) out << ',' << cm.at(t, p);
      out << '\n';
    }
  }
  {
    std::ofstream out = open_out(dir / "per_snr.csv");
    out << "snr_db,accuracy,count\n";
    for (const auto& row : report.per_snr) out << row.snr_db << ',' << num(row.accuracy) << ',' << row.count << '\n';
  }
  {
    std::ofstream out = open_out(dir / "summary.txt");
    out << "examples: " << cm.total() << '\n';
    out << "accuracy: " << num(report.accuracy) << '\n';
    out << "precision_weighted: " << num(report.precision_avg) << '\n';
    out << "recall_weighted: " << num(report.recall_avg) << '\n';
    out << "f1_weighted: " << num(report.f1_avg) << "\n\n";
    out << "class,precision,recall,f1,support\n";
    for (std::size_t c = 0; c < k; ++c) {
      const auto& m = report.per_class[c];
      out << csv_field(class_names[c]) << ',' << fixed(m.precision) << ',' << fixed(m.recall) << ','
          << fixed(m.f1) << ',' << m.support << '\n';
    }
    if (!report.notes.empty()) {
      out << '\n';
      for (const auto& n : report.notes) out << "* " << n << '\n';
    }
  }
  write_curve_svg(report.per_snr, dir / "curve.svg");
}

ConfusionMatrix read_confusion_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  std::vector<std::vector<std::uint64_t>> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    // The first field may be quoted; counts never are, so split from the right.
    std::vector<std::uint64_t> row;
    std::size_t end = line.size();
    while (true) {
      const std::size_t comma = line.rfind(',', end - 1);
      const std::string field = line.substr(comma + 1, end - comma - 1);
      if (comma == std::string::npos || field.empty() || field.find_first_not_of("0123456789") != std::string::npos)
        break;
      row.push_back(std::stoull(field));
      end = comma;
    }
    std::reverse(row.begin(), row.end());
    rows.push_back(std::move(row));
  }
  ConfusionMatrix cm;
  cm.num_classes = rows.size();
  for (const auto& row : rows) {
    require(row.size() == cm.num_classes, ErrorCode::kShapeMismatch, "confusion.csv: matrix is not square");
    cm.counts.insert(cm.counts.end(), row.begin(), row.end());
  }
  return cm;
}

}  // namespace specsense::eval
