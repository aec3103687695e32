#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace test_support {

inline std::filesystem::path data_dir() { return ANSWERABILITY_DATA_DIR; }

// Fresh directory under the build tree, removed and recreated on each call.
inline std::filesystem::path scratch_dir(std::string_view name) {
  std::filesystem::path dir = std::filesystem::path(ANSWERABILITY_TEST_TMP) / std::string(name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return path;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace test_support
