#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace rotbec::cli {

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string hex64(std::uint64_t v);

/// %.15g: the precision at which reruns are required to agree.
[[nodiscard]] std::string num15(double v);

/// Owns the output directory. Every file goes through write(), which writes
/// a temporary sibling and renames it into place, so readers never see a
/// partial file. Safe to call from several threads.
class ArtifactWriter {
 public:
  /// Creates the directory and probes that it is writable (ConfigError).
  explicit ArtifactWriter(std::filesystem::path dir);

  [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }
  [[nodiscard]] std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  [[nodiscard]] bool exists(const std::string& name) const;

  void write(const std::string& name, std::string_view content);

  /// Names written so far, in order.
  [[nodiscard]] std::vector<std::string> written() const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::vector<std::string> written_;
};

/// Whole file as bytes (ConfigError when unreadable).
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

}  // namespace rotbec::cli
