// SPDX-License-Identifier: Apache-2.0
#ifndef RISFB_BEAMFORMING_HPP
#define RISFB_BEAMFORMING_HPP

#include <Eigen/Dense>
#include <vector>

#include "risfb/channel.hpp"
#include "risfb/config.hpp"

namespace risfb {

/// Zero-forcing precoder for stacked user rows (K x M, K <= M):
/// columns of H^H (H H^H)^{-1}, each normalized to unit norm.
/// Throws on a rank-deficient stack (condition number > 1e10).
MatrixXcd zf_precoder(const MatrixXcd &stacked_rows);

/// Per-user log2(1 + SINR) terms for effective rows h_k^H and precoders v_i,
/// with per-user power gamma/K and unit noise variance.
Eigen::VectorXd user_rates(const MatrixXcd &effective_rows, const MatrixXcd &precoders,
                           double gamma);

/// K-average rate of one realization, with the effective channels built
/// from the TRUE channels and the given RIS phases.
double per_user_rate(const std::vector<CascadedChannel> &true_channels,
                     const VectorXcd &phases, const MatrixXcd &precoders, double gamma);

struct CeoResult {
    VectorXcd phases;                // N unit-modulus entries, best ever sampled
    std::vector<int> levels;         // the same configuration as level indexes
    std::vector<double> best_trace;  // best objective after each iteration
    Eigen::MatrixXd table;           // final N x P probability table
};

/// Cross-entropy search over discrete RIS phase configurations. The
/// objective is the mean user rate under ZF precoding computed on the
/// PROVIDED CSI (fed-back or perfect); evaluation against the true channel
/// is the caller's job. Deterministic given ceo.seed.
CeoResult ceo_optimize(const std::vector<CascadedChannel> &csi, const SystemConfig &cfg,
                       const CeoParams &ceo);

/// phi_n = exp(j 2 pi levels[n] / P).
VectorXcd phases_from_levels(const std::vector<int> &levels, int phase_levels);

} // namespace risfb

#endif
