#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "echolevel/dsp.hpp"
#include "echolevel/error.hpp"
#include "echolevel/sirec.hpp"

namespace echolevel::sirec {

namespace {

std::string float_literal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(value)));
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s + "f";
}

template <typename T, typename Format>
void emit_array(std::ostringstream& out, const char* type, const char* name, const std::vector<T>& values,
                Format format) {
  out << "static const " << type << " " << name << "[" << std::max<std::size_t>(values.size(), 1) << "] = {";
  if (values.empty()) out << "0";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ",";
    out << (i % 8 == 0 ? "\n    " : " ") << format(values[i]);
  }
  out << "\n};\n";
}

const auto as_integer = [](auto v) { return std::to_string(v); };

constexpr const char* kRuntime = R"(
static float diff_mean(const float* v, uint16_t n) {
  float sum = 0.0f;
  for (uint16_t k = 0; k + 1 < n; ++k) sum += v[k] - v[k + 1];
  return sum / (float)(n - 1);
}

static float diff_std(const float* v, uint16_t n, float mean) {
  float sum = 0.0f;
  for (uint16_t k = 0; k + 1 < n; ++k) {
    const float d = v[k] - v[k + 1] - mean;
    sum += d * d;
  }
  return sqrtf(sum / (float)(n - 1));
}

// min/max over magnitude bins [1, size/2] of the zero-padded interval.
static float spectral_ratio(const float* v, uint16_t len, uint16_t size) {
  float re[kMaxFftSize];
  float im[kMaxFftSize];
  for (uint16_t i = 0; i < size; ++i) {
    re[i] = i < len ? v[i] : 0.0f;
    im[i] = 0.0f;
  }
  for (uint16_t i = 1, j = 0; i < size; ++i) {
    uint16_t bit = size >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      const float tr = re[i];
      re[i] = re[j];
      re[j] = tr;
    }
  }
  for (uint16_t span = 2; span <= size; span <<= 1) {
    const uint16_t half = span >> 1;
    const uint16_t stride = kMaxFftSize / span;
    for (uint16_t start = 0; start < size; start += span) {
      for (uint16_t k = 0; k < half; ++k) {
        const float wr = kTwiddleCos[k * stride];
        const float wi = -kTwiddleSin[k * stride];
        const uint16_t a = start + k;
        const uint16_t b = a + half;
        const float xr = re[b] * wr - im[b] * wi;
        const float xi = re[b] * wi + im[b] * wr;
        re[b] = re[a] - xr;
        im[b] = im[a] - xi;
        re[a] += xr;
        im[a] += xi;
      }
    }
  }
  float lo = sqrtf(re[1] * re[1] + im[1] * im[1]);
  float hi = lo;
  for (uint16_t k = 2; k <= size / 2; ++k) {
    const float m = sqrtf(re[k] * re[k] + im[k] * im[k]);
    if (m < lo) lo = m;
    if (m > hi) hi = m;
  }
  return hi > 0.0f ? lo / hi : 0.0f;
}

void features(uint16_t tree, const float* rir, float out[3]) {
  const uint16_t len = kIntervalLength[tree];
  out[0] = spectral_ratio(rir + kIntervalStart[tree], len, kFftSize[tree]);
  out[1] = diff_mean(rir, len);
  out[2] = diff_std(rir, len, out[1]);
}

// Index into kClassLabels of the leaf the tree reaches.
int32_t tree_class(uint16_t tree, const float* rir) {
  float f[3];
  features(tree, rir, f);
  const uint32_t root = kTreeRoot[tree];
  uint32_t node = root;
  while (kNodeFeature[node] >= 0) {
    const bool go_left = f[kNodeFeature[node]] <= kThresholds[kNodeValue[node]];
    node = root + (go_left ? kNodeLeft[node] : kNodeRight[node]);
  }
  return (int32_t)kNodeValue[node];
}

int32_t predict(const float* rir) {
  uint16_t votes[kClassCount];
  for (uint16_t c = 0; c < kClassCount; ++c) votes[c] = 0;
  for (uint16_t t = 0; t < kTreeCount; ++t) ++votes[tree_class(t, rir)];
  uint16_t best = 0;
  for (uint16_t c = 1; c < kClassCount; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return kClassLabels[best];
}

}  // namespace sirec_model
)";

}  // namespace

std::string export_portable_source(const SirecModel& model) {
  model.validate();
  const std::size_t tree_count = model.trees.size();
  constexpr std::size_t kMaxIndex = 0xFFFF;
  if (model.config.segment_length > kMaxIndex || tree_count > kMaxIndex || model.classes.size() > kMaxIndex) {
    throw ConfigError("model is too large for 16-bit indices");
  }

  std::vector<std::size_t> starts, lengths, fft_sizes, roots;
  std::vector<int> node_feature;
  std::vector<std::size_t> node_value, node_left, node_right;
  std::vector<double> thresholds;
  std::size_t max_fft = 2;

  for (const auto& member : model.trees) {
    starts.push_back(member.intervals.rnd_start);
    lengths.push_back(member.intervals.length);
    const std::size_t fft = dsp::next_power_of_two(member.intervals.length);
    fft_sizes.push_back(fft);
    max_fft = std::max(max_fft, fft);
    roots.push_back(node_feature.size());
    if (member.tree.nodes.size() > kMaxIndex) throw ConfigError("tree is too large for 16-bit node offsets");
    for (const auto& node : member.tree.nodes) {
      if (node.is_leaf) {
        node_feature.push_back(-1);
        const auto it = std::lower_bound(model.classes.begin(), model.classes.end(), node.label);
        node_value.push_back(static_cast<std::size_t>(it - model.classes.begin()));
        node_left.push_back(0);
        node_right.push_back(0);
      } else {
        node_feature.push_back(node.feature);
        node_value.push_back(thresholds.size());
        thresholds.push_back(node.threshold);
        node_left.push_back(static_cast<std::size_t>(node.left));
        node_right.push_back(static_cast<std::size_t>(node.right));
      }
    }
  }
  if (max_fft > 16384) throw ConfigError("interval lengths above 16384 samples are not supported by the export");
  if (thresholds.size() > kMaxIndex) throw ConfigError("model has too many splits for 16-bit indices");

  std::vector<double> twiddle_cos(max_fft / 2), twiddle_sin(max_fft / 2);
  for (std::size_t k = 0; k < max_fft / 2; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(max_fft);
    twiddle_cos[k] = std::cos(angle);
    twiddle_sin[k] = std::sin(angle);
  }

  std::ostringstream out;
  out << "// SIREC level classifier, generated from a trained model.\n"
      << "// Self-contained: no heap allocation, no dependencies beyond the C math library.\n"
      << "// Input: the first kSegmentLength samples of an RIR.\n\n"
      << "#include <math.h>\n#include <stdint.h>\n\n"
      << "namespace sirec_model {\n\n"
      << "static const uint16_t kSegmentLength = " << model.config.segment_length << ";\n"
      << "static const uint16_t kTreeCount = " << tree_count << ";\n"
      << "static const uint16_t kClassCount = " << model.classes.size() << ";\n"
      << "static const uint16_t kMaxFftSize = " << max_fft << ";\n"
      << "static const uint32_t kNodeCount = " << node_feature.size() << ";\n"
      << "static const uint16_t kSplitCount = " << thresholds.size() << ";\n\n";

  emit_array(out, "int32_t", "kClassLabels", model.classes, as_integer);
  emit_array(out, "uint16_t", "kIntervalStart", starts, as_integer);
  emit_array(out, "uint16_t", "kIntervalLength", lengths, as_integer);
  emit_array(out, "uint16_t", "kFftSize", fft_sizes, as_integer);
  emit_array(out, "uint32_t", "kTreeRoot", roots, as_integer);
  out << "\n// Leaves have feature -1 and store a class index in kNodeValue; splits store\n"
      << "// an index into kThresholds. Children are offsets from the tree root.\n";
  emit_array(out, "int8_t", "kNodeFeature", node_feature, as_integer);
  emit_array(out, "uint16_t", "kNodeValue", node_value, as_integer);
  emit_array(out, "uint16_t", "kNodeLeft", node_left, as_integer);
  emit_array(out, "uint16_t", "kNodeRight", node_right, as_integer);
  emit_array(out, "float", "kThresholds", thresholds, float_literal);
  out << "\n";
  emit_array(out, "float", "kTwiddleCos", twiddle_cos, float_literal);
  emit_array(out, "float", "kTwiddleSin", twiddle_sin, float_literal);
  out << kRuntime;
  return out.str();
}

}  // namespace echolevel::sirec
