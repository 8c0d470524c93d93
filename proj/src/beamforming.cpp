// SPDX-License-Identifier: Apache-2.0
#include "risfb/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace risfb {

MatrixXcd zf_precoder(const MatrixXcd &stacked_rows) {
    const Eigen::Index k = stacked_rows.rows();
    if (k > stacked_rows.cols())
        throw std::invalid_argument("zero forcing needs K <= M");
    MatrixXcd gram = stacked_rows * stacked_rows.adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e10)
        throw std::runtime_error("degenerate channel: user stack is rank deficient");
    MatrixXcd v = stacked_rows.adjoint() * gram.inverse();
    for (Eigen::Index i = 0; i < k; ++i)
        v.col(i).normalize();
    return v;
}

Eigen::VectorXd user_rates(const MatrixXcd &effective_rows, const MatrixXcd &precoders,
                           double gamma) {
    const Eigen::Index k = effective_rows.rows();
    const double power = gamma / static_cast<double>(k);
    MatrixXcd cross = effective_rows * precoders;  // (k, i) -> h_k^H v_i
    Eigen::VectorXd rates(k);
    for (Eigen::Index u = 0; u < k; ++u) {
        double signal = power * std::norm(cross(u, u));
        double interference = 0.0;
        for (Eigen::Index i = 0; i < k; ++i)
            if (i != u)
                interference += power * std::norm(cross(u, i));
        rates(u) = std::log2(1.0 + signal / (1.0 + interference));
    }
    return rates;
}

double per_user_rate(const std::vector<CascadedChannel> &true_channels,
                     const VectorXcd &phases, const MatrixXcd &precoders, double gamma) {
    const int k = static_cast<int>(true_channels.size());
    MatrixXcd eff(k, true_channels[0].H.cols());
    for (int u = 0; u < k; ++u)
        eff.row(u) = effective_downlink_channel(true_channels[u], phases);
    return user_rates(eff, precoders, gamma).mean();
}

VectorXcd phases_from_levels(const std::vector<int> &levels, int phase_levels) {
    VectorXcd phases(levels.size());
    for (size_t n = 0; n < levels.size(); ++n) {
        double ang = 2.0 * std::numbers::pi * levels[n] / phase_levels;
        phases(static_cast<Eigen::Index>(n)) = std::polar(1.0, ang);
    }
    return phases;
}

CeoResult ceo_optimize(const std::vector<CascadedChannel> &csi, const SystemConfig &cfg,
                       const CeoParams &ceo) {
    ceo.validate();
    if (csi.empty())
        throw std::invalid_argument("CEO needs at least one CSI channel");

    const int n = static_cast<int>(csi[0].H.rows());
    const int m = static_cast<int>(csi[0].H.cols());
    const int k = static_cast<int>(csi.size());
    const int p = ceo.phase_levels;
    const int s = ceo.population;
    const int elites = std::max(1, static_cast<int>(std::ceil(ceo.elite_fraction * s)));
    const double gamma = cfg.snr_linear();

    // Stack users once so each candidate costs one (1 x N)(N x KM) product.
    MatrixXcd h_all(n, k * m);
    MatrixXcd hd_rows(k, m);
    for (int u = 0; u < k; ++u) {
        h_all.middleCols(u * m, m) = csi[u].H;
        hd_rows.row(u) = csi[u].direct.adjoint();
    }

    // Phase lookup per level.
    VectorXcd level_phase(p);
    for (int l = 0; l < p; ++l)
        level_phase(l) = std::polar(1.0, 2.0 * std::numbers::pi * l / p);

    Eigen::MatrixXd table = Eigen::MatrixXd::Constant(n, p, 1.0 / p);
    std::mt19937_64 rng(ceo.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    CeoResult result;
    result.levels.assign(n, 0);
    double best_obj = -std::numeric_limits<double>::infinity();

    std::vector<std::vector<int>> samples(s, std::vector<int>(n));
    std::vector<double> objective(s);
    MatrixXcd phi_mat(s, n);

    for (int it = 0; it < ceo.iterations; ++it) {
        for (int c = 0; c < s; ++c) {
            for (int e = 0; e < n; ++e) {
                double r = unif(rng);
                double acc = 0.0;
                int lvl = p - 1;
                for (int l = 0; l < p; ++l) {
                    acc += table(e, l);
                    if (r < acc) {
                        lvl = l;
                        break;
                    }
                }
                samples[c][e] = lvl;
                phi_mat(c, e) = level_phase(lvl);
            }
        }

        MatrixXcd eff_all = phi_mat * h_all;  // S x KM
        for (int c = 0; c < s; ++c) {
            MatrixXcd eff(k, m);
            for (int u = 0; u < k; ++u)
                eff.row(u) = hd_rows.row(u) + eff_all.row(c).segment(u * m, m);
            try {
                MatrixXcd v = zf_precoder(eff);
                objective[c] = user_rates(eff, v, gamma).mean();
            } catch (const std::runtime_error &) {
                objective[c] = -std::numeric_limits<double>::infinity();
            }
            if (objective[c] > best_obj) {
                best_obj = objective[c];
                result.levels = samples[c];
            }
        }

        std::vector<int> order(s);
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + elites, order.end(),
                          [&](int a, int b) {
                              if (objective[a] != objective[b]) return objective[a] > objective[b];
                              return a < b;
                          });

        Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(n, p);
        int counted = 0;
        for (int r = 0; r < elites; ++r) {
            int c = order[r];
            if (!std::isfinite(objective[c]))
                continue;
            for (int e = 0; e < n; ++e)
                freq(e, samples[c][e]) += 1.0;
            ++counted;
        }
        if (counted > 0) {
            freq /= counted;
            table = ceo.smoothing * freq + (1.0 - ceo.smoothing) * table;
        }
        result.best_trace.push_back(best_obj);
    }

    result.phases = phases_from_levels(result.levels, p);
    result.table = table;
    return result;
}

} // namespace risfb
