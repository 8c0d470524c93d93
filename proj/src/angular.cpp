// SPDX-License-Identifier: Apache-2.0
#include "risfb/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risfb {

AodDictionary build_dictionary(int m, int g_t, double spacing) {
    if (m < 1 || g_t < 1)
        throw std::invalid_argument("dictionary dimensions must be >= 1");
    AodDictionary dict;
    dict.grid.resize(g_t);
    dict.columns.resize(m, g_t);
    for (int g = 0; g < g_t; ++g) {
        double s = -1.0 + 2.0 * g / g_t;
        dict.grid[g] = s;
        dict.columns.col(g) = ula_steering(std::asin(s), m, spacing);
    }
    return dict;
}

AodDictionary build_dictionary(const SystemConfig &cfg) {
    if (cfg.aod_grid < cfg.bs_ris_paths)
        throw std::invalid_argument("AoD grid resolution G_t must be >= L1");
    return build_dictionary(cfg.bs_antennas, cfg.aod_grid, cfg.bs_spacing);
}

int aod_to_grid_index(double phi_aod, const AodDictionary &dict) {
    double s = std::sin(phi_aod);
    int best = 0;
    double best_dist = std::abs(s - dict.grid[0]);
    for (int g = 1; g < static_cast<int>(dict.grid.size()); ++g) {
        double d = std::abs(s - dict.grid[g]);
        if (d < best_dist) {  // strict: ties keep the lower index
            best_dist = d;
            best = g;
        }
    }
    return best;
}

MatrixXcd extract_on_basis(const MatrixXcd &H, const MatrixXcd &basis) {
    if (H.cols() != basis.rows())
        throw std::invalid_argument("basis row count must match channel column count");
    MatrixXcd gram = basis.adjoint() * basis;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e8)
        throw std::runtime_error("selected dictionary columns are ill-conditioned "
                                 "(colliding grid indexes?)");
    return H * basis * gram.inverse();
}

HybridChannel extract_hybrid(const MatrixXcd &H, const std::vector<int> &support,
                             const AodDictionary &dict) {
    std::vector<int> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("duplicate support indexes");
    for (int g : sorted)
        if (g < 0 || g >= dict.columns.cols())
            throw std::out_of_range("support index outside the dictionary grid");

    MatrixXcd basis(dict.columns.rows(), sorted.size());
    for (size_t i = 0; i < sorted.size(); ++i)
        basis.col(static_cast<Eigen::Index>(i)) = dict.columns.col(sorted[i]);

    HybridChannel hy;
    hy.support = std::move(sorted);
    hy.columns = extract_on_basis(H, basis);
    return hy;
}

std::vector<int> detect_support(const MatrixXcd &H, const AodDictionary &dict, int l1) {
    if (l1 < 1 || l1 > dict.columns.cols())
        throw std::invalid_argument("path count must lie in [1, G_t]");
    // Greedy successive projection with cyclic replacement refinement. A
    // one-shot top-L1 energy ranking is not enough on an oversampled grid
    // (G_t > M): side lobes of a strong path out-rank weaker paths. Greedy
    // peeling fixes most of that; the replacement sweeps repair the
    // remaining cases where a first pick lands between two close paths.
    const int m = static_cast<int>(dict.columns.rows());
    const int g_t = static_cast<int>(dict.columns.cols());
    const double total_energy = H.squaredNorm();
    if (total_energy == 0.0)
        throw std::runtime_error("degenerate channel: zero energy");

    // Exact subspace test first: the row space of H is spanned by the true
    // steering columns, so an on-grid column g is in the support iff its
    // whole energy lies inside that space. The span (hence the hit set) is
    // identical for every user sharing the BS-side paths.
    {
        Eigen::BDCSVD<MatrixXcd> svd(H, Eigen::ComputeThinV);
        const auto &sv = svd.singularValues();
        int rank = 0;
        while (rank < sv.size() && sv(rank) > 1e-10 * sv(0))
            ++rank;
        MatrixXcd v = svd.matrixV().leftCols(rank);
        Eigen::VectorXd score = (v.adjoint() * dict.columns).colwise().squaredNorm();
        std::vector<int> hits;
        for (int g = 0; g < score.size(); ++g)
            if (score(g) >= 1.0 - 1e-9)
                hits.push_back(g);
        if (static_cast<int>(hits.size()) == l1)
            return hits;
        if (static_cast<int>(hits.size()) > l1) {
            std::stable_sort(hits.begin(), hits.end(),
                             [&](int a, int b) { return score(a) > score(b); });
            hits.resize(l1);
            std::sort(hits.begin(), hits.end());
            return hits;
        }
        if (!hits.empty())
            throw std::runtime_error(
                "degenerate channel: column support collapses below L1");
        // No exact hit: off-grid AoDs, fall through to the greedy search.
    }

    auto ls_residual = [&](const std::vector<int> &sup) {
        MatrixXcd basis(m, sup.size());
        for (size_t i = 0; i < sup.size(); ++i)
            basis.col(static_cast<Eigen::Index>(i)) = dict.columns.col(sup[i]);
        MatrixXcd gram = basis.adjoint() * basis;
        MatrixXcd coeffs = gram.ldlt().solve(basis.adjoint() * H.adjoint()).adjoint();
        return MatrixXcd(H - coeffs * basis.adjoint());
    };

    std::vector<int> support;
    for (int l = 0; l < l1; ++l) {
        MatrixXcd residual = support.empty() ? H : ls_residual(support);
        Eigen::VectorXd energy = (residual * dict.columns).colwise().squaredNorm();
        for (int s : support)
            energy(s) = -1.0;
        int pick = 0;
        for (int g = 1; g < g_t; ++g)
            if (energy(g) > energy(pick))
                pick = g;
        if (energy(pick) <= 1e-18 * total_energy)
            throw std::runtime_error(
                "degenerate channel: column support collapses below L1");
        support.push_back(pick);
    }

    for (int sweep = 0; sweep < 8; ++sweep) {
        bool changed = false;
        for (int i = 0; i < l1; ++i) {
            std::vector<int> others;
            for (int j = 0; j < l1; ++j)
                if (j != i)
                    others.push_back(support[j]);
            MatrixXcd basis(m, others.size());
            for (size_t j = 0; j < others.size(); ++j)
                basis.col(static_cast<Eigen::Index>(j)) = dict.columns.col(others[j]);
            MatrixXcd gram = basis.adjoint() * basis;
            // Orthogonalize every grid column against the fixed picks and
            // score its fit to the corresponding channel residual.
            MatrixXcd perp =
                dict.columns -
                basis * gram.ldlt().solve(basis.adjoint() * dict.columns);
            Eigen::VectorXd denom = perp.colwise().squaredNorm();
            MatrixXcd resid = ls_residual(others);
            Eigen::VectorXd numer = (resid * perp).colwise().squaredNorm();
            int best = support[i];
            double best_score =
                denom(best) > 1e-12 ? numer(best) / denom(best) : -1.0;
            for (int g = 0; g < g_t; ++g) {
                if (denom(g) <= 1e-12)
                    continue;
                double score = numer(g) / denom(g);
                if (score > best_score * (1.0 + 1e-12) &&
                    std::find(others.begin(), others.end(), g) == others.end()) {
                    best_score = score;
                    best = g;
                }
            }
            if (best != support[i]) {
                support[i] = best;
                changed = true;
            }
        }
        if (!changed || ls_residual(support).squaredNorm() <= 1e-24 * total_energy)
            break;
    }
    std::sort(support.begin(), support.end());
    return support;
}

MatrixXcd reconstruct_on_basis(const MatrixXcd &columns, const MatrixXcd &basis) {
    return columns * basis.adjoint();
}

MatrixXcd reconstruct_spatial(const HybridChannel &hybrid, const AodDictionary &dict) {
    MatrixXcd basis(dict.columns.rows(), hybrid.support.size());
    for (size_t i = 0; i < hybrid.support.size(); ++i)
        basis.col(static_cast<Eigen::Index>(i)) = dict.columns.col(hybrid.support[i]);
    return reconstruct_on_basis(hybrid.columns, basis);
}

MatrixXcd build_ris_dictionary(int n1, int n2, double spacing, int g1, int g2) {
    MatrixXcd dict(n1 * n2, g1 * g2);
    for (int a = 0; a < g1; ++a) {
        double u = -2.0 + 4.0 * a / g1;
        for (int b = 0; b < g2; ++b) {
            double v = -2.0 + 4.0 * b / g2;
            dict.col(a * g2 + b) = freq_steering(u, v, n1, n2, spacing);
        }
    }
    return dict;
}

std::vector<int> ris_row_support(const MatrixXcd &H, const MatrixXcd &ris_dict, int count) {
    Eigen::VectorXd energy = (ris_dict.adjoint() * H).rowwise().squaredNorm();
    if (count < 1 || count > energy.size())
        throw std::invalid_argument("row support count out of range");
    std::vector<int> idx(energy.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + count, idx.end(),
                      [&](int a, int b) {
                          if (energy(a) != energy(b)) return energy(a) > energy(b);
                          return a < b;
                      });
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace risfb
