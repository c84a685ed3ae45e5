#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace qwalk {

// Raised where the spectral closed forms hit a 0/0 point (sin omega = 0 for
// Hamiltonian-based quantities, |sin omega_weyl| = 0 for the eigenvector
// parametrization) and the caller asked for something that has no value there.
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

// Worker cap for the data-parallel loops. Default 1 (serial); results are
// independent of the cap because parallel loops only ever do disjoint writes
// and every reduction runs in a fixed serial order.
void set_max_threads(int n);
int max_threads();

// Runs fn(begin, end) over a partition of [0, n). Serial when max_threads()
// is 1 or the range is small.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

// Principal representative of an angle in [-pi, pi).
double wrap_angle(double a);

// Shortest signed displacement x - y on a ring of circumference extent,
// result in [-extent/2, extent/2).
double wrap_delta(double x, double y, double extent);

// Shortest-format decimal with 17 significant digits (round-trip exact for
// doubles); '.' decimal separator regardless of locale.
std::string format_double(double v);

}  // namespace qwalk
