// SPDX-License-Identifier: Apache-2.0
#ifndef RISFB_CHANNEL_HPP
#define RISFB_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "risfb/config.hpp"

namespace risfb {

using Eigen::MatrixXcd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;

/// One dominant propagation path between the BS and the RIS.
struct BsRisPath {
    std::complex<double> gain;  // alpha_i
    double aod;                 // departure angle at the BS
    double aoa_azimuth;         // arrival azimuth at the RIS
    double aoa_elevation;       // arrival elevation at the RIS
};

/// One dominant propagation path between the RIS and one user.
struct RisUePath {
    std::complex<double> gain;  // beta_{k,j}
    double aod_azimuth;         // departure azimuth at the RIS
    double aod_elevation;       // departure elevation at the RIS
};

/// Sampled geometry for one channel realization: L1 shared BS-RIS paths
/// and L2 user-specific RIS-UE paths per user.
struct PathSet {
    std::vector<BsRisPath> bs_ris;
    std::vector<std::vector<RisUePath>> ris_ue;  // [user][path]
};

/// Spatial-domain cascaded channel of one user plus the direct BS-UE link.
struct CascadedChannel {
    MatrixXcd H;       // N x M, diag(h_r^H) * G
    VectorXcd direct;  // length M, h_d (zero when the direct link is disabled)
};

/// ULA steering vector, entry m = (1/sqrt(M)) exp(j 2 pi spacing m sin(phi)).
VectorXcd ula_steering(double phi, int m, double spacing);

/// UPA steering vector, vertical (N2) factor Kronecker horizontal (N1) factor.
/// Entry n2*N1 + n1 = (1/sqrt(N)) exp(j 2 pi spacing (n2 sin(theta) + n1 cos(theta) sin(phi))).
VectorXcd upa_steering(double phi, double theta, int n1, int n2, double spacing);

/// Unit-norm UPA vector parameterized directly by its horizontal/vertical
/// spatial frequencies u, v. Entry n2*N1 + n1 = (1/sqrt(N)) exp(j 2 pi spacing (n2 v + n1 u)).
VectorXcd freq_steering(double u, double v, int n1, int n2, double spacing);

/// Effective spatial frequencies (u, v) of a cascaded arrival:
/// u = cos(t1) sin(p1) - cos(t2) sin(p2), v = sin(t1) - sin(t2).
std::pair<double, double> cascaded_frequencies(const RisUePath &ue, const BsRisPath &bs);

/// Cascaded steering vector diag(b2^H) b1, computed as the element-wise
/// product conj(b2) .* b1. Norm is 1/sqrt(N).
VectorXcd cascaded_steering(const RisUePath &ue, const BsRisPath &bs, const SystemConfig &cfg);

/// Draws path angles uniform on [-pi/2, pi/2] and gains CN(0, 1/L).
/// With cfg.on_grid_aod the BS-RIS AoDs are snapped so sin(phi) lies
/// exactly on the G_t sine grid.
PathSet sample_paths(const SystemConfig &cfg, std::mt19937_64 &rng);

/// H_k = sum_i sum_j alpha_i beta_{k,j} b(i,k,j) a^H(aod_i); the direct
/// link h_d is drawn i.i.d. CN(0, 1/M) when enabled, zero otherwise.
CascadedChannel build_cascaded_channel(const PathSet &paths, int user,
                                       const SystemConfig &cfg, std::mt19937_64 &rng);

/// h_DL^H = h_d^H + phi^T H. Rejects phase entries off the unit circle
/// by more than 1e-9.
RowVectorXcd effective_downlink_channel(const CascadedChannel &ch, const VectorXcd &phases);

} // namespace risfb

#endif
