#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace test_util {

// Unique scratch path under the system temp directory; removed by the caller
// when it matters, otherwise left for the OS.
inline std::string temp_path(const std::string& stem) {
  static int counter = 0;
  const std::string name = "targetbench_test_" + stem + "_" + std::to_string(counter++);
  return (std::filesystem::temp_directory_path() / name).string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

} // namespace test_util
