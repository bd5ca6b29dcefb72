#ifndef RHC_TESTS_SUPPORT_TEST_PATHS_HPP_
#define RHC_TESTS_SUPPORT_TEST_PATHS_HPP_

#include <filesystem>
#include <string>

namespace rhc::testing {

// RHC_SOURCE_DIR is set by the test build.
inline std::filesystem::path SourcePath(const std::string& rel) {
  return std::filesystem::path(RHC_SOURCE_DIR) / rel;
}
inline std::filesystem::path DataPath(const std::string& rel) {
  return SourcePath("data") / rel;
}
inline std::filesystem::path FixturePath(const std::string& rel) {
  return SourcePath("tests/data") / rel;
}

}  // namespace rhc::testing

#endif  // RHC_TESTS_SUPPORT_TEST_PATHS_HPP_
