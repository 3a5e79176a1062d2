#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "pfclust/matrix.hpp"
#include "pfclust/preprocess.hpp"

namespace testing_support {

inline pfclust::Matrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                     double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  pfclust::Matrix m(n, d);
  for (double& v : m.values()) v = u(rng);
  return m;
}

inline pfclust::Dataset make_dataset(pfclust::Matrix points, std::string name = "t") {
  pfclust::Dataset data;
  data.name = std::move(name);
  data.points = std::move(points);
  return data;
}

inline pfclust::Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  pfclust::Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("pfclust_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Exit status of a shell command.
inline int run_command(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  if (raw == -1) return -1;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace testing_support
