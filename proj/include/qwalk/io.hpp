#pragma once

#include <string>
#include <vector>

#include "qwalk/observe.hpp"
#include "qwalk/state.hpp"

// CSV and binary export. CSV values are written with 17 significant digits
// and '.' decimal separator, so identical data produces identical bytes.
//
// Binary state dump, little-endian:
//   bytes 0-3   magic "QWLK"
//   byte  4     format version (1)
//   byte  5     family (0 Weyl, 1 Dirac)
//   byte  6     dimension
//   byte  7     grid kind (0 cubic, 1 BCC)
//   byte  8     coin dimension
//   byte  9     domain (0 position, 1 momentum)
//   bytes 10-11 zero padding
//   f64         mass
//   i64         time
//   u64 x d     grid sizes
//   f64 x d     origin anchor
//   then one (f64 real, f64 imag) pair per amplitude, sites in storage
//   order with the coin index fastest.

namespace qwalk {

void write_position_series_csv(const std::string& path, const PositionSeries& series,
                               int dimension);

void write_decomposition_series_csv(const std::string& path, const DecompositionSeries& series,
                                    int dimension);

// Long-format marginal: one row per kept-axes coordinate tuple plus the
// probability column. Axis columns are named x, y, z by index.
void write_marginal_csv(const std::string& path, const Eigen::VectorXd& values,
                        const GridSpec& grid, const std::vector<int>& axes);

void dump_state(const std::string& path, const FieldState& state);
FieldState load_state(const std::string& path);

}  // namespace qwalk
