#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace slp {

using cdouble = std::complex<double>;

// Square M-QAM with unit average symbol energy.
//
// Bit mapping: a label of log2(order) bits is split into a real-axis half
// (most significant bits) and an imaginary-axis half. Each half is the
// binary-reflected Gray code g(i) = i ^ (i >> 1) of the level index i, with
// levels indexed in ascending amplitude order (-L+1, ..., -1, 1, ..., L-1).
struct ConstellationSpec {
  int order = 0;
  // Ascending per-axis amplitudes, symmetric about zero.
  std::vector<double> levels;
  // points[label] is the symbol carrying that label.
  std::vector<cdouble> points;
  double max_level = 0.0;

  int bits_per_symbol() const;
  int bits_per_axis() const { return bits_per_symbol() / 2; }
  int levels_per_axis() const { return static_cast<int>(levels.size()); }

  std::uint32_t label_of(int real_index, int imag_index) const;
};

enum class AxisClass { Inner, Outer };

// Inner/outer letters used for the QAM constellation quadrant typology:
// A = (inner, inner), B = (outer, inner), C = (inner, outer), D = (outer, outer).
enum class PointType { A, B, C, D };

struct ComponentClass {
  AxisClass real = AxisClass::Inner;
  AxisClass imag = AxisClass::Inner;

  PointType type() const;
  bool operator==(const ComponentClass&) const = default;
};

struct SymbolDecomposition {
  cdouble s_a;  // real part, as a complex number with zero imaginary part
  cdouble s_b;  // j * imaginary part
};

struct Decision {
  cdouble point;
  std::uint32_t label = 0;
};

// Throws ConfigError unless order is one of 4, 16, 64, 256.
ConstellationSpec build_constellation(int order);

// Throws std::domain_error if point is not a constellation point (1e-9).
ComponentClass classify_component(const ConstellationSpec& spec, cdouble point);

SymbolDecomposition decompose(cdouble point);

// bits holds one 0/1 value per element, grouped MSB first per symbol.
std::vector<cdouble> modulate(const ConstellationSpec& spec,
                              std::span<const std::uint8_t> bits);

// Nearest-point hard decision via per-axis slicing. An exact tie between two
// levels goes to the one with the smaller magnitude, and to the positive
// level at the zero boundary.
Decision demodulate(const ConstellationSpec& spec, cdouble r);

// Appends the bits_per_symbol() bits of label, MSB first.
void append_label_bits(const ConstellationSpec& spec, std::uint32_t label,
                       std::vector<std::uint8_t>& out);

int level_index(const ConstellationSpec& spec, double amplitude);

}  // namespace slp
