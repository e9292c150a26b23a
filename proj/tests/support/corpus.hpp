#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skymission/analyzer.hpp"
#include "skymission/parser.hpp"
#include "skymission/scenario.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path corpus_dir() { return fs::path(SKYMISSION_CORPUS_DIR); }

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<fs::path> files(const std::string& sub, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(corpus_dir() / sub)) {
    if (e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline skymission::Mission load_mission(const std::string& name) {
  auto r = skymission::parse(read_file(corpus_dir() / "valid" / name));
  if (!r.mission) throw std::runtime_error(name + " does not parse");
  return std::move(*r.mission);
}

inline skymission::Scenario load_scenario(const std::string& name) {
  return skymission::parse_scenario(read_file(corpus_dir() / "scenarios" / name));
}

}  // namespace testing_support
