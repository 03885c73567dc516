#include "echolevel/io/config_json.hpp"

#include <functional>
#include <json.hpp>
#include <map>

#include "echolevel/error.hpp"
#include "echolevel/io/dataset_csv.hpp"

namespace echolevel::io {

using Json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

Json parse(std::string_view text, const std::string& source) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(source + ": not valid JSON");
  return doc;
}

// Dispatches each key of an object to its handler; unknown keys are errors.
class Fields {
 public:
  using Handler = std::function<void(const Json&, const std::string& path)>;

  Fields(std::string source, std::string path) : source_(std::move(source)), path_(std::move(path)) {}

  Fields& on(const std::string& key, Handler h) {
    handlers_.emplace(key, std::move(h));
    return *this;
  }

  void apply(const Json& object) const {
    if (!object.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
    for (const auto& item : object.items()) {
      const auto it = handlers_.find(item.key());
      if (it == handlers_.end()) fail(join(path_, item.key()), "unknown field");
      it->second(item.value(), join(path_, item.key()));
    }
  }

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError(source_ + ": '" + path + "' " + msg);
  }

 private:
  std::string source_;
  std::string path_;
  std::map<std::string, Handler> handlers_;
};

struct Reader {
  std::string source;

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError(source + ": '" + path + "' " + msg);
  }
  double number(const Json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "must be a number");
    return v.get<double>();
  }
  std::uint64_t unsigned_int(const Json& v, const std::string& path) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    fail(path, "must be a non-negative integer");
  }
  bool boolean(const Json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "must be true or false");
    return v.get<bool>();
  }
  std::string string(const Json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "must be a string");
    return v.get<std::string>();
  }
  search::Range range(const Json& v, const std::string& path) const {
    if (!v.is_array() || v.size() != 2) fail(path, "must be a two-element array [lo, hi]");
    return {unsigned_int(v[0], path + "[0]"), unsigned_int(v[1], path + "[1]")};
  }
};

void read_sweep(const Json& obj, const std::string& path, const Reader& r, dsp::SweepConfig& c) {
  Fields(r.source, path)
      .on("f0_hz", [&](const Json& v, const std::string& p) { c.f0_hz = r.number(v, p); })
      .on("f1_hz", [&](const Json& v, const std::string& p) { c.f1_hz = r.number(v, p); })
      .on("f_step_hz", [&](const Json& v, const std::string& p) { c.f_step_hz = r.number(v, p); })
      .on("start_sample", [&](const Json& v, const std::string& p) { c.start_sample = r.unsigned_int(v, p); })
      .on("end_sample", [&](const Json& v, const std::string& p) { c.end_sample = r.unsigned_int(v, p); })
      .on("frame_len", [&](const Json& v, const std::string& p) { c.frame_len = r.unsigned_int(v, p); })
      .on("sample_rate_hz", [&](const Json& v, const std::string& p) { c.sample_rate_hz = r.number(v, p); })
      .apply(obj);
}

Json sweep_json(const dsp::SweepConfig& c) {
  return {{"f0_hz", c.f0_hz},         {"f1_hz", c.f1_hz},       {"f_step_hz", c.f_step_hz},
          {"start_sample", c.start_sample}, {"end_sample", c.end_sample}, {"frame_len", c.frame_len},
          {"sample_rate_hz", c.sample_rate_hz}};
}

dsp::WindowKind window_kind(const std::string& name, const Reader& r, const std::string& path) {
  if (name == "hann") return dsp::WindowKind::Hann;
  if (name == "rectangular") return dsp::WindowKind::Rectangular;
  r.fail(path, "must be \"hann\" or \"rectangular\"");
}

template <typename T>
T wrap(const std::string& source, const std::function<T()>& body) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

}  // namespace

dsp::SweepConfig parse_sweep_config(std::string_view json, const std::string& source) {
  const Json doc = parse(json, source);
  dsp::SweepConfig c;
  read_sweep(doc, "", Reader{source}, c);
  return wrap<dsp::SweepConfig>(source, [&] {
    c.validate();
    return c;
  });
}

synth::SceneConfig parse_scene_config(std::string_view json, const std::string& source) {
  const Json doc = parse(json, source);
  const Reader r{source};
  synth::SceneConfig c;
  Fields(source, "")
      .on("sweep", [&](const Json& v, const std::string& p) { read_sweep(v, p, r, c.sweep); })
      .on("snr_db", [&](const Json& v, const std::string& p) { c.snr_db = r.number(v, p); })
      .on("ir_length", [&](const Json& v, const std::string& p) { c.ir_length = r.unsigned_int(v, p); })
      .on("direct_gain", [&](const Json& v, const std::string& p) { c.direct_gain = r.number(v, p); })
      .on("direct_delay", [&](const Json& v, const std::string& p) { c.direct_delay = r.number(v, p); })
      .on("reflection_delay_empty",
          [&](const Json& v, const std::string& p) { c.reflection_delay_empty = r.number(v, p); })
      .on("reflection_delay_full", [&](const Json& v, const std::string& p) { c.reflection_delay_full = r.number(v, p); })
      .on("reflection_gain_empty", [&](const Json& v, const std::string& p) { c.reflection_gain_empty = r.number(v, p); })
      .on("reflection_gain_full", [&](const Json& v, const std::string& p) { c.reflection_gain_full = r.number(v, p); })
      .on("decay_fill_factor", [&](const Json& v, const std::string& p) { c.decay_fill_factor = r.number(v, p); })
      .on("max_bounces", [&](const Json& v, const std::string& p) { c.max_bounces = r.unsigned_int(v, p); })
      .on("gain_jitter", [&](const Json& v, const std::string& p) { c.gain_jitter = r.number(v, p); })
      .on("delay_jitter_samples", [&](const Json& v, const std::string& p) { c.delay_jitter_samples = r.number(v, p); })
      .on("materials",
          [&](const Json& v, const std::string& p) {
            if (!v.is_array()) r.fail(p, "must be an array");
            c.materials.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
              synth::Material m;
              const std::string ip = p + "[" + std::to_string(i) + "]";
              Fields(source, ip)
                  .on("name", [&](const Json& x, const std::string& q) { m.name = r.string(x, q); })
                  .on("decay", [&](const Json& x, const std::string& q) { m.decay = r.number(x, q); })
                  .apply(v[i]);
              if (m.name.empty()) r.fail(ip + ".name", "is required");
              c.materials.push_back(m);
            }
          })
      .on("buckets",
          [&](const Json& v, const std::string& p) {
            if (!v.is_array()) r.fail(p, "must be an array");
            c.buckets.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
              synth::Bucket b;
              bool have_label = false;
              const std::string ip = p + "[" + std::to_string(i) + "]";
              Fields(source, ip)
                  .on("label",
                      [&](const Json& x, const std::string& q) {
                        if (!x.is_number_integer()) r.fail(q, "must be an integer");
                        b.label = x.get<Label>();
                        have_label = true;
                      })
                  .on("fine_fills_percent",
                      [&](const Json& x, const std::string& q) {
                        if (!x.is_array()) r.fail(q, "must be an array");
                        for (std::size_t k = 0; k < x.size(); ++k) {
                          b.fine_fills_percent.push_back(r.number(x[k], q + "[" + std::to_string(k) + "]"));
                        }
                      })
                  .apply(v[i]);
              if (!have_label) r.fail(ip + ".label", "is required");
              c.buckets.push_back(b);
            }
          })
      .on("train_rows_per_fine_fill",
          [&](const Json& v, const std::string& p) { c.train_rows_per_fine_fill = r.unsigned_int(v, p); })
      .on("test_rows_per_fine_fill",
          [&](const Json& v, const std::string& p) { c.test_rows_per_fine_fill = r.unsigned_int(v, p); })
      .on("row_length", [&](const Json& v, const std::string& p) { c.row_length = r.unsigned_int(v, p); })
      .on("pipeline",
          [&](const Json& v, const std::string& p) {
            Fields(source, p)
                .on("alpha", [&](const Json& x, const std::string& q) { c.pipeline.alpha = r.number(x, q); })
                .on("relative_epsilon",
                    [&](const Json& x, const std::string& q) { c.pipeline.relative_epsilon = r.number(x, q); })
                .on("window",
                    [&](const Json& x, const std::string& q) { c.pipeline.window = window_kind(r.string(x, q), r, q); })
                .on("align_to_onset",
                    [&](const Json& x, const std::string& q) { c.pipeline.align_to_onset = r.boolean(x, q); })
                .apply(v);
          })
      .apply(doc);
  return wrap<synth::SceneConfig>(source, [&] {
    c.validate();
    return c;
  });
}

sirec::TrainConfig parse_train_config(std::string_view json, const std::string& source) {
  const Json doc = parse(json, source);
  const Reader r{source};
  sirec::TrainConfig c;
  Fields(source, "")
      .on("n_estimators", [&](const Json& v, const std::string& p) { c.n_estimators = r.unsigned_int(v, p); })
      .on("segment_length", [&](const Json& v, const std::string& p) { c.segment_length = r.unsigned_int(v, p); })
      .on("min_len", [&](const Json& v, const std::string& p) { c.bounds.min_len = r.unsigned_int(v, p); })
      .on("max_len", [&](const Json& v, const std::string& p) { c.bounds.max_len = r.unsigned_int(v, p); })
      .on("random_state", [&](const Json& v, const std::string& p) { c.random_state = r.unsigned_int(v, p); })
      .on("max_depth",
          [&](const Json& v, const std::string& p) {
            if (v.is_null()) {
              c.max_depth.reset();
            } else {
              c.max_depth = r.unsigned_int(v, p);
            }
          })
      .on("min_samples_leaf", [&](const Json& v, const std::string& p) { c.min_samples_leaf = r.unsigned_int(v, p); })
      .on("bootstrap", [&](const Json& v, const std::string& p) { c.bootstrap = r.boolean(v, p); })
      .apply(doc);
  return wrap<sirec::TrainConfig>(source, [&] {
    c.validate();
    return c;
  });
}

search::SearchSpace parse_search_space(std::string_view json, const std::string& source) {
  const Json doc = parse(json, source);
  const Reader r{source};
  search::SearchSpace s;
  Fields(source, "")
      .on("segment_length", [&](const Json& v, const std::string& p) { s.segment_length = r.range(v, p); })
      .on("n_estimators", [&](const Json& v, const std::string& p) { s.n_estimators = r.range(v, p); })
      .on("max_len", [&](const Json& v, const std::string& p) { s.max_len = r.range(v, p); })
      .on("min_len", [&](const Json& v, const std::string& p) { s.min_len = r.range(v, p); })
      .on("random_state", [&](const Json& v, const std::string& p) { s.random_state = r.range(v, p); })
      .apply(doc);
  return wrap<search::SearchSpace>(source, [&] {
    s.validate();
    return s;
  });
}

std::string to_json(const dsp::SweepConfig& cfg) { return sweep_json(cfg).dump(2) + "\n"; }

std::string to_json(const synth::SceneConfig& c) {
  Json materials = Json::array();
  for (const auto& m : c.materials) materials.push_back({{"name", m.name}, {"decay", m.decay}});
  Json buckets = Json::array();
  for (const auto& b : c.buckets) buckets.push_back({{"label", b.label}, {"fine_fills_percent", b.fine_fills_percent}});
  Json doc = {{"sweep", sweep_json(c.sweep)},
              {"snr_db", c.snr_db},
              {"ir_length", c.ir_length},
              {"direct_gain", c.direct_gain},
              {"direct_delay", c.direct_delay},
              {"reflection_delay_empty", c.reflection_delay_empty},
              {"reflection_delay_full", c.reflection_delay_full},
              {"reflection_gain_empty", c.reflection_gain_empty},
              {"reflection_gain_full", c.reflection_gain_full},
              {"decay_fill_factor", c.decay_fill_factor},
              {"max_bounces", c.max_bounces},
              {"gain_jitter", c.gain_jitter},
              {"delay_jitter_samples", c.delay_jitter_samples},
              {"materials", materials},
              {"buckets", buckets},
              {"train_rows_per_fine_fill", c.train_rows_per_fine_fill},
              {"test_rows_per_fine_fill", c.test_rows_per_fine_fill},
              {"row_length", c.row_length},
              {"pipeline",
               {{"alpha", c.pipeline.alpha},
                {"relative_epsilon", c.pipeline.relative_epsilon},
                {"window", c.pipeline.window == dsp::WindowKind::Hann ? "hann" : "rectangular"},
                {"align_to_onset", c.pipeline.align_to_onset}}}};
  return doc.dump(2) + "\n";
}

std::string to_json(const sirec::TrainConfig& c) {
  Json doc = {{"n_estimators", c.n_estimators},
              {"segment_length", c.segment_length},
              {"min_len", c.bounds.min_len},
              {"max_len", c.bounds.max_len},
              {"random_state", c.random_state}};
  doc["max_depth"] = c.max_depth ? Json(*c.max_depth) : Json(nullptr);
  doc["min_samples_leaf"] = c.min_samples_leaf;
  doc["bootstrap"] = c.bootstrap;
  return doc.dump(2) + "\n";
}

std::string to_json(const search::SearchSpace& s) {
  auto range = [](const search::Range& r) { return Json::array({r.lo, r.hi}); };
  Json doc = {{"segment_length", range(s.segment_length)},
              {"n_estimators", range(s.n_estimators)},
              {"max_len", range(s.max_len)},
              {"min_len", range(s.min_len)},
              {"random_state", range(s.random_state)}};
  return doc.dump(2) + "\n";
}

dsp::SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(read_text_file(path), path); }
synth::SceneConfig load_scene_config(const std::string& path) { return parse_scene_config(read_text_file(path), path); }
sirec::TrainConfig load_train_config(const std::string& path) { return parse_train_config(read_text_file(path), path); }
search::SearchSpace load_search_space(const std::string& path) {
  return parse_search_space(read_text_file(path), path);
}

}  // namespace echolevel::io
