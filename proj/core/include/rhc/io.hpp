#ifndef RHC_IO_HPP_
#define RHC_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace rhc {

// Whole file as bytes. Throws Io.
std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over `path`, so readers see
// either the old file or the complete new one. Throws Io.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);

}  // namespace rhc

#endif  // RHC_IO_HPP_
