#include <algorithm>
#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "echolevel/error.hpp"
#include "echolevel/sirec.hpp"

namespace echolevel::sirec {

using Json = nlohmann::ordered_json;

namespace {

// Walks a SAX event stream and remembers where it is, so a truncated file can
// be reported by the path it stopped in and the fields it never reached.
class PathTracker : public nlohmann::json_sax<Json> {
 public:
  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }

  bool start_object(std::size_t) override {
    value();
    frames_.push_back({true, "", 0, false});
    return true;
  }
  bool key(string_t& k) override {
    frames_.back().key = k;
    frames_.back().has_key = true;
    if (frames_.size() == 1) top_level_keys_.insert(k);
    return true;
  }
  bool end_object() override {
    frames_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    value();
    frames_.push_back({false, "", 0, false});
    return true;
  }
  bool end_array() override {
    frames_.pop_back();
    return true;
  }
  bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) override {
    position_ = position;
    message_ = ex.what();
    return false;
  }

  std::string path() const {
    std::string out;
    for (const auto& f : frames_) {
      if (f.is_object) {
        if (f.has_key) out += (out.empty() ? "" : ".") + f.key;
      } else {
        out += "[" + std::to_string(f.index) + "]";
      }
    }
    return out.empty() ? "<root>" : out;
  }
  const std::set<std::string>& top_level_keys() const { return top_level_keys_; }
  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }

 private:
  struct Frame {
    bool is_object;
    std::string key;
    std::size_t index;
    bool has_key;
  };

  bool value() {
    if (!frames_.empty() && !frames_.back().is_object) {
      if (frames_.back().has_key) ++frames_.back().index;
      frames_.back().has_key = true;
    }
    return true;
  }

  std::vector<Frame> frames_;
  std::set<std::string> top_level_keys_;
  std::size_t position_ = 0;
  std::string message_;
};

const std::vector<std::string> kTopLevelFields = {"format_version", "config", "classes", "trees"};

[[noreturn]] void report_parse_failure(std::string_view text) {
  PathTracker tracker;
  Json::sax_parse(text, &tracker);
  std::string missing;
  for (const auto& field : kTopLevelFields) {
    if (!tracker.top_level_keys().count(field)) missing += (missing.empty() ? "" : ", ") + field;
  }
  const bool truncated = tracker.position() >= text.size();
  std::string msg = truncated ? "model file is truncated: input ended inside '" + tracker.path() + "'"
                              : "model file is malformed at byte " + std::to_string(tracker.position()) +
                                    " inside '" + tracker.path() + "'";
  if (!missing.empty()) msg += "; missing field(s): " + missing;
  throw FormatError(msg);
}

// Strict object reader: required fields must exist, unknown ones are rejected.
class ObjectReader {
 public:
  ObjectReader(const Json& object, std::string path, const std::vector<std::string>& known)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw FormatError("'" + path_ + "' must be an object");
    for (const auto& item : object_.items()) {
      if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
        throw FormatError("unknown field '" + child(item.key()) + "'");
      }
    }
  }

  const Json& require(const std::string& key) const {
    auto it = object_.find(key);
    if (it == object_.end()) throw FormatError("missing field '" + child(key) + "'");
    return *it;
  }

  bool has(const std::string& key) const { return object_.contains(key) && !object_.at(key).is_null(); }

  std::uint64_t unsigned_field(const std::string& key) const {
    const Json& v = require(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw FormatError("field '" + child(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::int64_t integer_field(const std::string& key) const {
    const Json& v = require(key);
    if (!v.is_number_integer()) throw FormatError("field '" + child(key) + "' must be an integer");
    return v.get<std::int64_t>();
  }

  double number_field(const std::string& key) const {
    const Json& v = require(key);
    if (!v.is_number()) throw FormatError("field '" + child(key) + "' must be a number");
    return v.get<double>();
  }

  std::string string_field(const std::string& key) const {
    const Json& v = require(key);
    if (!v.is_string()) throw FormatError("field '" + child(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const Json& object_;
  std::string path_;
};

int major_version(const std::string& version) {
  const auto dot = version.find('.');
  try {
    return std::stoi(version.substr(0, dot));
  } catch (const std::exception&) {
    throw FormatError("format_version '" + version + "' is not of the form MAJOR.MINOR");
  }
}

}  // namespace

std::string serialize(const SirecModel& model) {
  Json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["config"] = {{"n_estimators", model.config.n_estimators},
                   {"segment_length", model.config.segment_length},
                   {"min_len", model.config.bounds.min_len},
                   {"max_len", model.config.bounds.max_len},
                   {"random_state", model.config.random_state}};
  doc["classes"] = model.classes;
  Json trees = Json::array();
  for (const auto& member : model.trees) {
    Json nodes = Json::array();
    for (const auto& n : member.tree.nodes) {
      if (n.is_leaf) {
        nodes.push_back({{"kind", "leaf"}, {"label", n.label}});
      } else {
        nodes.push_back({{"kind", "split"},
                         {"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back({{"rnd_start", member.intervals.rnd_start}, {"length", member.intervals.length}, {"nodes", nodes}});
  }
  doc["trees"] = std::move(trees);
  return doc.dump(1) + "\n";
}

SirecModel deserialize(std::string_view text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) report_parse_failure(text);

  const ObjectReader top(doc, "", kTopLevelFields);
  const std::string version = top.string_field("format_version");
  if (major_version(version) != major_version(kModelFormatVersion)) {
    throw FormatError("unsupported model format_version '" + version + "' (expected " + kModelFormatVersion + ")");
  }

  SirecModel model;
  const ObjectReader cfg(top.require("config"), "config",
                         {"n_estimators", "segment_length", "min_len", "max_len", "random_state"});
  model.config.n_estimators = cfg.unsigned_field("n_estimators");
  model.config.segment_length = cfg.unsigned_field("segment_length");
  model.config.bounds.min_len = cfg.unsigned_field("min_len");
  model.config.bounds.max_len = cfg.unsigned_field("max_len");
  model.config.random_state = cfg.unsigned_field("random_state");

  const Json& classes = top.require("classes");
  if (!classes.is_array()) throw FormatError("'classes' must be an array");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!classes[i].is_number_integer()) throw FormatError("'classes[" + std::to_string(i) + "]' must be an integer");
    model.classes.push_back(classes[i].get<Label>());
  }

  const Json& trees = top.require("trees");
  if (!trees.is_array()) throw FormatError("'trees' must be an array");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const std::string tree_path = "trees[" + std::to_string(t) + "]";
    const ObjectReader tree_reader(trees[t], tree_path, {"rnd_start", "length", "nodes"});
    SirecTree member;
    member.intervals.rnd_start = tree_reader.unsigned_field("rnd_start");
    member.intervals.length = tree_reader.unsigned_field("length");
    const Json& nodes = tree_reader.require("nodes");
    if (!nodes.is_array()) throw FormatError("'" + tree_path + ".nodes' must be an array");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const ObjectReader node_reader(nodes[k], tree_path + ".nodes[" + std::to_string(k) + "]",
                                     {"kind", "feature", "threshold", "left", "right", "label"});
      tree::Node node;
      const std::string kind = node_reader.string_field("kind");
      if (kind == "leaf") {
        node.is_leaf = true;
        node.label = node_reader.integer_field("label");
      } else if (kind == "split") {
        node.is_leaf = false;
        const auto feature = node_reader.unsigned_field("feature");
        if (feature >= features::kFeatureCount) {
          throw FormatError("field '" + node_reader.child("feature") + "' must be 0, 1 or 2");
        }
        node.feature = static_cast<std::uint8_t>(feature);
        node.threshold = node_reader.number_field("threshold");
        node.left = static_cast<std::int32_t>(node_reader.integer_field("left"));
        node.right = static_cast<std::int32_t>(node_reader.integer_field("right"));
      } else {
        throw FormatError("field '" + node_reader.child("kind") + "' must be \"leaf\" or \"split\"");
      }
      member.tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(member));
  }

  try {
    model.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid model config: ") + e.what());
  }
  return model;
}

}  // namespace echolevel::sirec
