// SPDX-License-Identifier: Apache-2.0
#ifndef RISFB_ANGULAR_HPP
#define RISFB_ANGULAR_HPP

#include <Eigen/Dense>
#include <vector>

#include "risfb/channel.hpp"
#include "risfb/config.hpp"

namespace risfb {

/// AoD dictionary: column g is the ULA steering vector at sine value
/// s_g = -1 + 2g/G_t (uniform grid over [-1, 1)).
struct AodDictionary {
    MatrixXcd columns;         // M x G_t, unit-norm columns
    std::vector<double> grid;  // the G_t sine values
};

/// Hybrid-domain channel: BS side angular, RIS side spatial. Column i of
/// `columns` is the non-zero hybrid column sitting at grid index support[i].
struct HybridChannel {
    std::vector<int> support;  // strictly increasing grid indexes, size L1
    MatrixXcd columns;         // N x L1
};

AodDictionary build_dictionary(int m, int g_t, double spacing);

/// Dictionary for a config; rejects G_t < L1.
AodDictionary build_dictionary(const SystemConfig &cfg);

/// Nearest grid index to sin(phi); ties break toward the lower index.
int aod_to_grid_index(double phi_aod, const AodDictionary &dict);

/// Least-squares hybrid coefficients on an explicit M x L basis:
/// returns C = H * B * (B^H B)^{-1}, the best Frobenius fit H ~ C B^H.
/// Rejects bases with condition number of B^H B above 1e8.
MatrixXcd extract_on_basis(const MatrixXcd &H, const MatrixXcd &basis);

/// Hybrid extraction on the dictionary columns selected by `support`.
HybridChannel extract_hybrid(const MatrixXcd &H, const std::vector<int> &support,
                             const AodDictionary &dict);

/// Indexes of the L1 largest-energy columns of H * Theta_T, sorted ascending.
std::vector<int> detect_support(const MatrixXcd &H, const AodDictionary &dict, int l1);

MatrixXcd reconstruct_on_basis(const MatrixXcd &columns, const MatrixXcd &basis);

/// Sum_i columns[i] * Theta_T[:, support[i]]^H.
MatrixXcd reconstruct_spatial(const HybridChannel &hybrid, const AodDictionary &dict);

/// Diagnostic RIS-side dictionary over the cascaded spatial-frequency plane:
/// g1 x g2 uniform grid of (u, v) over [-2, 2)^2.
MatrixXcd build_ris_dictionary(int n1, int n2, double spacing, int g1, int g2);

/// Indexes of the `count` largest-energy rows of Theta_R^H * H, sorted
/// ascending. Used only to exhibit the user-specific row-side sparsity.
std::vector<int> ris_row_support(const MatrixXcd &H, const MatrixXcd &ris_dict, int count);

} // namespace risfb

#endif
