#pragma once

#include <cstdint>

#include "qwalk/state.hpp"

// Time evolution engines. All engines preserve the domain tag of their input
// and advance its time stamp; integer step counts only.

namespace qwalk {

// Local update psi(x, t+1) = sum_h U_h psi(x - h, t) with periodic wrap,
// using the model's transition matrices. Position domain only.
FieldState step_position(const FieldState& state, std::int64_t steps);

// Cached per-slot spectral data of (grid, model); apply multiplies momentum
// amplitudes by U(kappa)^t slot by slot.
class SpectralPropagator {
  public:
    SpectralPropagator(const GridSpec& grid, const WalkModel& model);

    void apply(Eigen::VectorXcd& momentum_amps, std::int64_t t) const;
    const std::vector<SlotAction>& slots() const { return slots_; }
    const GridSpec& grid() const { return grid_; }
    const WalkModel& model() const { return model_; }

  private:
    GridSpec grid_;
    WalkModel model_;
    std::vector<SlotAction> slots_;
};

FieldState evolve_spectral(const FieldState& state, std::int64_t t);

// Truncated dispersive evolution: multiplies each slot by the scalar phase
// exp(-i s omega~(kappa) t), where s is the branch sign of the spec and
// omega~ is the Taylor expansion of omega about the snapped k' up to the
// given order, in wrapped differences taken in (-pi, pi]. The eigenvector
// structure of the state is untouched, so the input must be a single-branch
// packet for the result to approximate the true evolution.
// Passing kExactDispersion evaluates the exact omega through the same phase
// path, giving the definitional limit of the truncation.
constexpr int kExactDispersion = -1;

FieldState evolve_truncated(const FieldState& state, const ParticleStateSpec& spec, int order,
                            std::int64_t t);

// Computable part of the overlap lower bound for order-n truncated evolution:
// 1 - epsilon - gamma Sigma^{n+1} t with Sigma = max sigma_i and
// gamma = (n+1) * [sum_{|alpha|=n+1} |omega^(alpha)(k')| / alpha!] * (mass of
// the state in the sigma box). The Sigma^{n+3} t remainder is not computable
// from available data and is reported as a scale only.
struct ApproximationBound {
    double bound = 0.0;
    double gamma = 0.0;
    double remainder_scale = 0.0;
};

ApproximationBound approximation_bound(const FieldState& state,
                                       const std::array<double, 3>& kprime,
                                       const std::array<double, 3>& sigma, double epsilon,
                                       int order, double t);

}  // namespace qwalk
