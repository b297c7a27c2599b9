#include "rotbec/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "rotbec/error.hpp"

namespace rotbec {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[5] = {'R', 'B', 'E', 'C', '1'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, s_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string out = s_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  [[nodiscard]] bool done() const { return pos_ == s_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > s_.size()) throw ConfigError("snapshot is truncated");
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

std::vector<double> params_of(const PotentialSpec& spec) {
  if (const auto* p = std::get_if<PowerTrap>(&spec.kind())) return {p->s};
  if (const auto* q = std::get_if<QuarticQuadraticTrap>(&spec.kind())) return {q->k, q->q};
  const auto& b = std::get<ShiftedHarmonicTrap>(spec.kind()).b;
  return {b.x, b.y};
}

PotentialSpec spec_from(const std::string& tag, const std::vector<double>& p) {
  auto want = [&](std::size_t n) {
    if (p.size() != n) throw ConfigError("snapshot potential '" + tag + "' has the wrong parameter count");
  };
  if (tag == "power") {
    want(1);
    return PotentialSpec(PowerTrap{p[0]});
  }
  if (tag == "quartic_quadratic") {
    want(2);
    return PotentialSpec(QuarticQuadraticTrap{p[0], p[1]});
  }
  if (tag == "shifted_harmonic") {
    want(2);
    return PotentialSpec(ShiftedHarmonicTrap{{p[0], p[1]}});
  }
  throw ConfigError("snapshot has unknown potential tag '" + tag + "'");
}

}  // namespace

std::string encode_snapshot(const Field2D& u, double a, const EffectivePotential& eff) {
  const Grid2D& g = u.grid();
  if (!(g.center() == eff.concentration_point())) {
    throw ConfigError("snapshot grids must be centered on the concentration point");
  }
  std::string out(kMagic, sizeof(kMagic));
  put(out, static_cast<std::uint32_t>(g.n()));
  put(out, g.half_width());
  put(out, a);
  put(out, eff.omega());
  const std::string tag = eff.spec().tag();
  put(out, static_cast<std::uint32_t>(tag.size()));
  out += tag;
  const std::vector<double> params = params_of(eff.spec());
  put(out, static_cast<std::uint32_t>(params.size()));
  for (double p : params) put(out, p);
  out.reserve(out.size() + u.data().size() * 2 * sizeof(double));
  for (const cplx& z : u.data()) {
    put(out, z.real());
    put(out, z.imag());
  }
  return out;
}

Snapshot decode_snapshot(const std::string& bytes) {
  Reader in(bytes);
  if (in.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) throw ConfigError("not a field snapshot");
  const auto n = static_cast<int>(in.get<std::uint32_t>());
  const auto half_width = in.get<double>();
  const auto a = in.get<double>();
  const auto omega = in.get<double>();
  const std::string tag = in.bytes(in.get<std::uint32_t>());
  const auto count = in.get<std::uint32_t>();
  if (count > 16) throw ConfigError("snapshot has an implausible parameter count");
  std::vector<double> params(count);
  for (auto& p : params) p = in.get<double>();
  EffectivePotential eff(spec_from(tag, params), omega);
  const Grid2D grid(n, half_width, eff.concentration_point());
  CVector values(grid.size());
  for (auto& z : values) {
    const double re = in.get<double>();
    const double im = in.get<double>();
    z = {re, im};
  }
  if (!in.done()) throw ConfigError("snapshot has trailing bytes");
  return Snapshot{Field2D(grid, std::move(values)), a, std::move(eff)};
}

void write_snapshot(const std::filesystem::path& path, const Field2D& u, double a, const EffectivePotential& eff) {
  const std::string bytes = encode_snapshot(u, a, eff);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace rotbec
