#include "slp/constellation.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slp/errors.hpp"

namespace slp {

namespace {

constexpr double kPointTolerance = 1e-9;

std::uint32_t gray(std::uint32_t i) { return i ^ (i >> 1); }

int slice_axis(const std::vector<double>& levels, double v) {
  const int n = static_cast<int>(levels.size());
  // Levels are uniformly spaced: level[i] = (2i - n + 1) * unit.
  const double unit = levels.back() / (n - 1);
  int lo = static_cast<int>(std::floor((v / unit + n - 1) / 2.0));
  if (lo < 0) return 0;
  if (lo >= n - 1) return n - 1;
  const int hi = lo + 1;
  const double d_lo = std::abs(v - levels[lo]);
  const double d_hi = std::abs(v - levels[hi]);
  if (d_lo < d_hi) return lo;
  if (d_hi < d_lo) return hi;
  const double m_lo = std::abs(levels[lo]);
  const double m_hi = std::abs(levels[hi]);
  if (m_lo < m_hi) return lo;
  return hi;
}

}  // namespace

int ConstellationSpec::bits_per_symbol() const {
  return std::countr_zero(static_cast<unsigned>(order));
}

std::uint32_t ConstellationSpec::label_of(int real_index, int imag_index) const {
  return (gray(static_cast<std::uint32_t>(real_index)) << bits_per_axis()) |
         gray(static_cast<std::uint32_t>(imag_index));
}

PointType ComponentClass::type() const {
  if (real == AxisClass::Inner) return imag == AxisClass::Inner ? PointType::A : PointType::C;
  return imag == AxisClass::Inner ? PointType::B : PointType::D;
}

ConstellationSpec build_constellation(int order) {
  if (order != 4 && order != 16 && order != 64 && order != 256) {
    throw ConfigError("unsupported QAM order " + std::to_string(order) +
                          " (expected 4, 16, 64 or 256)",
                      "modulation");
  }
  ConstellationSpec spec;
  spec.order = order;
  const int n = static_cast<int>(std::lround(std::sqrt(order)));

  // Mean per-axis energy of odd levels {±1, ±3, ..., ±(n-1)} is (n² - 1) / 3.
  const double scale = 1.0 / std::sqrt(2.0 * (n * n - 1) / 3.0);
  spec.levels.resize(n);
  for (int i = 0; i < n; ++i) spec.levels[i] = (2 * i - n + 1) * scale;
  spec.max_level = spec.levels.back();

  spec.points.resize(order);
  for (int re = 0; re < n; ++re) {
    for (int im = 0; im < n; ++im) {
      spec.points[spec.label_of(re, im)] = {spec.levels[re], spec.levels[im]};
    }
  }
  return spec;
}

int level_index(const ConstellationSpec& spec, double amplitude) {
  for (int i = 0; i < spec.levels_per_axis(); ++i) {
    if (std::abs(spec.levels[i] - amplitude) <= kPointTolerance) return i;
  }
  return -1;
}

ComponentClass classify_component(const ConstellationSpec& spec, cdouble point) {
  if (level_index(spec, point.real()) < 0 || level_index(spec, point.imag()) < 0) {
    throw std::domain_error("symbol is not a point of the " +
                            std::to_string(spec.order) + "-QAM constellation");
  }
  auto axis = [&](double v) {
    return std::abs(std::abs(v) - spec.max_level) <= kPointTolerance ? AxisClass::Outer
                                                                      : AxisClass::Inner;
  };
  return {axis(point.real()), axis(point.imag())};
}

SymbolDecomposition decompose(cdouble point) {
  return {cdouble(point.real(), 0.0), cdouble(0.0, point.imag())};
}

std::vector<cdouble> modulate(const ConstellationSpec& spec,
                              std::span<const std::uint8_t> bits) {
  const auto q = static_cast<std::size_t>(spec.bits_per_symbol());
  if (bits.size() % q != 0) {
    throw std::domain_error("bit count " + std::to_string(bits.size()) +
                            " is not a multiple of " + std::to_string(q));
  }
  std::vector<cdouble> symbols;
  symbols.reserve(bits.size() / q);
  for (std::size_t i = 0; i < bits.size(); i += q) {
    std::uint32_t label = 0;
    for (std::size_t b = 0; b < q; ++b) label = (label << 1) | (bits[i + b] & 1u);
    symbols.push_back(spec.points[label]);
  }
  return symbols;
}

Decision demodulate(const ConstellationSpec& spec, cdouble r) {
  const int re = slice_axis(spec.levels, r.real());
  const int im = slice_axis(spec.levels, r.imag());
  const std::uint32_t label = spec.label_of(re, im);
  return {spec.points[label], label};
}

void append_label_bits(const ConstellationSpec& spec, std::uint32_t label,
                       std::vector<std::uint8_t>& out) {
  for (int b = spec.bits_per_symbol() - 1; b >= 0; --b) {
    out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
  }
}

}  // namespace slp
