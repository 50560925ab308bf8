#include "specsense/nnet/model_io.hpp"

#include <cstring>
#include <string>

#include "../byteio.hpp"

namespace specsense::nnet {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'E', 'C', 'N', 'N', '0', '1'};

enum KindCode : std::uint8_t {
  kCodeConvSame = 1,
  kCodeConvValid = 2,
  kCodeDense = 3,
  kCodeRelu = 4,
  kCodeDropout = 5,
  kCodeFlatten = 6,
  kCodeSoftmax = 7,
};

std::uint8_t kind_code(const Layer& l) {
  switch (l.kind) {
    case LayerKind::kConv2d: return l.pad_h == Padding::kSame ? kCodeConvSame : kCodeConvValid;
    case LayerKind::kDense: return kCodeDense;
    case LayerKind::kRelu: return kCodeRelu;
    case LayerKind::kDropout: return kCodeDropout;
    case LayerKind::kFlatten: return kCodeFlatten;
    case LayerKind::kSoftmax: return kCodeSoftmax;
  }
  return 0;
}

void write_shape(detail::ByteWriter& w, const Shape& s) {
  w.u32(static_cast<std::uint32_t>(s.size()));
  for (auto d : s) w.u32(static_cast<std::uint32_t>(d));
}

Shape read_shape(detail::ByteReader& r, const char* what) {
  const std::uint32_t n = r.u32(what);
  require(n <= 8, ErrorCode::kShapeMismatch, std::string("model file: implausible rank for ") + what);
  Shape s(n);
  for (auto& d : s) d = r.u32(what);
  return s;
}

std::vector<double> read_f32s(detail::ByteReader& r, std::size_t n, const char* what) {
  r.need(n * 4, what);
  std::vector<double> v(n);
  for (double& x : v) x = static_cast<double>(r.f32(what));
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Model& model) {
  model.shape_chain();  // refuse to write an inconsistent network
  detail::ByteWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(model.layers.size()));
  for (const Layer& l : model.layers) {
    w.u8(kind_code(l));
    if (l.kind == LayerKind::kDropout) {
      write_shape(w, {1});
      w.f32(static_cast<float>(l.rate));
      continue;
    }
    write_shape(w, l.weight_shape);
    for (double v : l.weights) w.f32(static_cast<float>(v));
    for (double v : l.bias) w.f32(static_cast<float>(v));
  }
  w.u32(static_cast<std::uint32_t>(model.num_classes));
  write_shape(w, model.input_shape);
  w.u8(static_cast<std::uint8_t>(model.meta.task));
  w.u8(static_cast<std::uint8_t>(model.meta.representation));
  w.u64(model.meta.seed);
  w.f64(model.meta.train_fraction);
  return w.take();
}

Model deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    fail(ErrorCode::kBadMagic, "model file: bad magic (expected SPECNN01)");
  detail::ByteReader r(bytes, "model file");
  r.raw(sizeof kMagic, "magic");
  const std::uint32_t version = r.u32("version");
  if (version != kModelVersion)
    fail(ErrorCode::kVersionMismatch, "model file: unsupported version " + std::to_string(version));
  const std::uint32_t count = r.u32("layer count");
  require(count <= 1024, ErrorCode::kShapeMismatch, "model file: implausible layer count");
  Model m;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint8_t code = r.u8("layer kind");
    const Shape dims = read_shape(r, "layer dims");
    switch (code) {
      case kCodeConvSame:
      case kCodeConvValid: {
        require(dims.size() == 4, ErrorCode::kShapeMismatch, "model file: conv layer needs 4 dims");
        Layer l = Layer::conv2d(dims[0], dims[1], dims[2], dims[3],
                                code == kCodeConvSame ? Padding::kSame : Padding::kValid);
        l.weights = read_f32s(r, l.weights.size(), "conv weights");
        l.bias = read_f32s(r, l.bias.size(), "conv biases");
        m.layers.push_back(std::move(l));
        break;
      }
      case kCodeDense: {
        require(dims.size() == 2, ErrorCode::kShapeMismatch, "model file: dense layer needs 2 dims");
        Layer l = Layer::dense(dims[0], dims[1]);
        l.weights = read_f32s(r, l.weights.size(), "dense weights");
        l.bias = read_f32s(r, l.bias.size(), "dense biases");
        m.layers.push_back(std::move(l));
        break;
      }
      case kCodeDropout:
        require(dims == Shape{1}, ErrorCode::kShapeMismatch, "model file: dropout layer needs dims [1]");
        m.layers.push_back(Layer::dropout(static_cast<double>(r.f32("dropout rate"))));
        break;
      case kCodeRelu:
      case kCodeFlatten:
      case kCodeSoftmax:
        require(dims.empty(), ErrorCode::kShapeMismatch, "model file: parameter-free layer with dims");
        m.layers.push_back(code == kCodeRelu ? Layer::relu() : code == kCodeFlatten ? Layer::flatten() : Layer::softmax());
        break;
      default: fail(ErrorCode::kUnsupported, "model file: unknown layer kind " + std::to_string(code));
    }
  }
  m.num_classes = r.u32("K");
  m.input_shape = read_shape(r, "input shape");
  const std::uint8_t task = r.u8("task");
  const std::uint8_t repr = r.u8("representation");
  if (task > static_cast<std::uint8_t>(Task::kInterference))
    fail(ErrorCode::kUnsupported, "model file: unknown task tag " + std::to_string(task));
  if (repr > static_cast<std::uint8_t>(Representation::kFft))
    fail(ErrorCode::kUnsupported, "model file: unknown representation tag " + std::to_string(repr));
  m.meta.task = static_cast<Task>(task);
  m.meta.representation = static_cast<Representation>(repr);
  m.meta.seed = r.u64("seed");
  m.meta.train_fraction = r.f64("train fraction");
  if (r.remaining() != 0) fail(ErrorCode::kTruncated, "model file: trailing bytes after metadata");

  const std::vector<Shape> chain = m.shape_chain();
  require(chain.back() == Shape{m.num_classes}, ErrorCode::kShapeMismatch,
          "model file: network output does not match K=" + std::to_string(m.num_classes));
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  detail::write_file(path.string(), serialize_model(model));
}

Model load_model(const std::filesystem::path& path) { return deserialize_model(detail::read_file(path.string())); }

}  // namespace specsense::nnet
