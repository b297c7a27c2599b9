#include "artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rotbec/error.hpp"

namespace rotbec::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num15(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("output directory " + dir_.string() + ": " + ec.message());
  const auto probe = dir_ / ".write-probe";
  {
    std::ofstream os(probe);
    if (!os) throw ConfigError("output directory " + dir_.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

bool ArtifactWriter::exists(const std::string& name) const { return std::filesystem::exists(path(name)); }

void ArtifactWriter::write(const std::string& name, std::string_view content) {
  const std::lock_guard lock(mu_);
  const auto target = path(name);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw ConfigError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
  written_.push_back(name);
}

std::vector<std::string> ArtifactWriter::written() const {
  const std::lock_guard lock(mu_);
  return written_;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace rotbec::cli
