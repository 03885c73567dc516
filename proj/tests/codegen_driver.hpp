#pragma once

// Builds the exported model source together with a small driver program and
// runs it over dataset rows, collecting per-tree features and votes.

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "echolevel/sirec.hpp"

namespace fixture {

using echolevel::Label;
using echolevel::LabeledDataset;
using echolevel::sirec::SirecModel;


// Reads rows of floats from stdin; per row prints the prediction, then per
// tree its three features and leaf class index.
inline const char* kDriver = R"(
#include <cstdio>
#include <vector>
#include "model.cpp"

int main() {
  std::vector<float> rir(sirec_model::kSegmentLength);
  for (;;) {
    for (auto& v : rir) {
      if (std::scanf("%f", &v) != 1) return 0;
    }
    std::printf("%d", (int)sirec_model::predict(rir.data()));
    for (uint16_t t = 0; t < sirec_model::kTreeCount; ++t) {
      float f[3];
      sirec_model::features(t, rir.data(), f);
      std::printf(" %.9g %.9g %.9g %d", f[0], f[1], f[2], (int)sirec_model::tree_class(t, rir.data()));
    }
    std::printf("\n");
  }
}
)";

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string build_driver(const SirecModel& model, const std::string& dir) {
  write_file(dir + "/model.cpp", echolevel::sirec::export_portable_source(model));
  write_file(dir + "/driver.cpp", kDriver);
  const std::string exe = dir + "/driver";
  const std::string cmd = std::string(ECHOLEVEL_CXX_COMPILER) + " -std=c++17 -O1 -Wall -Wextra -Werror -I" + dir +
                          " -o " + exe + " " + dir + "/driver.cpp 2> " + dir + "/compile.log";
  if (std::system(cmd.c_str()) != 0) throw std::runtime_error("compiling the exported source failed, see " + dir + "/compile.log");
  return exe;
}

struct DriverRow {
  Label prediction = 0;
  std::vector<std::array<double, 3>> features;
  std::vector<std::size_t> tree_class;
};

inline std::vector<DriverRow> run_driver(const std::string& exe, const SirecModel& model, const LabeledDataset& ds,
                                  const std::string& dir) {
  {
    std::ofstream in(dir + "/rows.txt");
    char buf[32];
    for (const auto& row : ds.rows) {
      for (std::size_t i = 0; i < model.config.segment_length; ++i) {
        std::snprintf(buf, sizeof buf, "%.9g ", static_cast<double>(static_cast<float>(row.rir[i])));
        in << buf;
      }
      in << "\n";
    }
  }
  const std::string cmd = exe + " < " + dir + "/rows.txt > " + dir + "/out.txt";
  if (std::system(cmd.c_str()) != 0) throw std::runtime_error("running the driver failed");
  std::ifstream out(dir + "/out.txt");
  std::vector<DriverRow> rows;
  std::string line;
  while (std::getline(out, line)) {
    std::istringstream ls(line);
    DriverRow r;
    ls >> r.prediction;
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
      std::array<double, 3> f{};
      std::size_t c = 0;
      ls >> f[0] >> f[1] >> f[2] >> c;
      r.features.push_back(f);
      r.tree_class.push_back(c);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// A tree disagreement is explained when some split threshold of that tree on
// feature j lies between the float and the double value of feature j.
inline bool explained_by_threshold(const echolevel::tree::DecisionTree& t, const std::array<double, 3>& fd,
                            const std::array<double, 3>& ff) {
  for (const auto& n : t.nodes) {
    if (n.is_leaf) continue;
    const double lo = std::min(fd[n.feature], ff[n.feature]);
    const double hi = std::max(fd[n.feature], ff[n.feature]);
    if (n.threshold >= lo && n.threshold <= hi) return true;
  }
  return false;
}

}  // namespace fixture
