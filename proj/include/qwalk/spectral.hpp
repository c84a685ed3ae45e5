#pragma once

#include <Eigen/Dense>
#include <utility>

#include "qwalk/lattice.hpp"

namespace qwalk {

// Centred unitary DFT pair on a cubic grid, one value per site/slot in the
// grid's storage order:
//
//   fhat(k) = N^{-1/2} sum_n f(n) exp(-i kappa(k).n)
//   f(n)    = N^{-1/2} sum_k fhat(k) exp(+i kappa(k).n)
//
// with kappa(k)_i = 2 pi (k_i - p_i) / N_i, p_i = floor(N_i / 2). A plane
// wave exp(+i kappa.x) therefore transforms to a delta at the slot carrying
// kappa. Realized as a plain FFT with a pre/post modulation by
// exp(+-2 pi i p.n / N).
Eigen::VectorXcd dft_rect(const GridSpec& grid, const Eigen::VectorXcd& f);
Eigen::VectorXcd idft_rect(const GridSpec& grid, const Eigen::VectorXcd& fhat);

// Same transform pair on a BCC grid, reduced to exactly two rectangular
// transforms over the generating region plus the family phase
// a(k) = exp(-i kappa(k).t), t = (1,1,1):
//
//   fhat0(k) = (F(f0)(k) - a(k) F(f1)(k)) / sqrt(2)   "minus" sequence
//   fhat1(k) = (F(f0)(k) + a(k) F(f1)(k)) / sqrt(2)   "plus" sequence
//
// where f0/f1 are the even/odd-sublattice subsequences. fhat0 is the offset
// wave-vector family (GridSpec slot block 0), fhat1 the plain one (block 1).
// Inversion:
//
//   f0 = F^{-1}((fhat0 + fhat1) / sqrt(2))
//   f1 = F^{-1}(conj(a) (fhat1 - fhat0) / sqrt(2))
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> bcc_dft(const GridSpec& grid,
                                                      const Eigen::VectorXcd& f);
Eigen::VectorXcd bcc_idft(const GridSpec& grid, const Eigen::VectorXcd& fhat0,
                          const Eigen::VectorXcd& fhat1);

// Whole-grid transform in slot storage order: cubic grids dispatch to
// dft_rect/idft_rect, BCC grids to the two-sequence reduction with the
// result packed as [fhat0 | fhat1].
Eigen::VectorXcd grid_dft(const GridSpec& grid, const Eigen::VectorXcd& f);
Eigen::VectorXcd grid_idft(const GridSpec& grid, const Eigen::VectorXcd& fhat);

}  // namespace qwalk
