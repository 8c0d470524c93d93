// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "risfb/beamforming.hpp"
#include "risfb/rng.hpp"

using namespace risfb;

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

MatrixXcd random_rows(int k, int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    MatrixXcd rows(k, m);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j)
            rows(i, j) = complex_gaussian(rng);
    return rows;
}

} // namespace

TEST_CASE("single-user ZF is the matched filter") {
    MatrixXcd rows = random_rows(1, 8, 11);
    MatrixXcd v = zf_precoder(rows);
    REQUIRE(v.rows() == 8);
    REQUIRE(v.cols() == 1);
    CHECK(std::abs(v.col(0).norm() - 1.0) < 1e-12);
    // Collinear with h: the effective gain equals the full channel norm.
    std::complex<double> ip = (rows.row(0) * v.col(0)).value();
    CHECK(std::abs(ip) == doctest::Approx(rows.row(0).norm()).epsilon(1e-12));
}

TEST_CASE("ZF kills cross-user interference") {
    MatrixXcd rows = random_rows(4, 16, 13);
    MatrixXcd v = zf_precoder(rows);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(v.col(k).norm() - 1.0) < 1e-12);
        for (int i = 0; i < 4; ++i) {
            std::complex<double> cross = (rows.row(k) * v.col(i)).value();
            if (i != k)
                CHECK(std::abs(cross) < 1e-9);
            else
                CHECK(std::abs(cross) > 1e-6);
        }
    }

    // Orthogonal rows: ZF columns are the conjugated rows themselves.
    MatrixXcd eye = MatrixXcd::Identity(3, 6) * 2.0;
    MatrixXcd ve = zf_precoder(eye);
    CHECK((ve - MatrixXcd::Identity(6, 3)).norm() < 1e-12);
}

TEST_CASE("rank-deficient row stack is rejected") {
    MatrixXcd rows = random_rows(3, 8, 17);
    rows.row(2) = rows.row(0) * std::complex<double>(2.0, -1.0);
    CHECK_THROWS_AS(zf_precoder(rows), std::runtime_error);
}

TEST_CASE("rate terms: closed forms") {
    // Zero channel gives zero rate.
    MatrixXcd zero_rows = MatrixXcd::Zero(2, 4);
    MatrixXcd v = MatrixXcd::Identity(4, 2);
    CHECK(user_rates(zero_rows, v, 10.0).sum() == 0.0);

    // Single user, |h^H v|^2 = 1, gamma/K = 1 -> log2(2) = 1.
    MatrixXcd h = MatrixXcd::Zero(1, 4);
    h(0, 0) = 1.0;
    MatrixXcd mf = MatrixXcd::Zero(4, 1);
    mf(0, 0) = 1.0;
    CHECK(user_rates(h, mf, 1.0)(0) == doctest::Approx(1.0).epsilon(1e-12));

    // Two users, hand-built signal and interference terms.
    MatrixXcd rows(2, 2), prec(2, 2);
    rows << 1.0, 0.0, 0.5, 0.5;
    prec << 1.0, 0.0, 0.0, 1.0;
    double gamma = 4.0;  // per-user power 2
    Eigen::VectorXd r = user_rates(rows, prec, gamma);
    CHECK(r(0) == doctest::Approx(std::log2(1.0 + 2.0)).epsilon(1e-12));
    CHECK(r(1) == doctest::Approx(std::log2(1.0 + 2.0 * 0.25 / (1.0 + 2.0 * 0.25))));

    // Global phase on a precoder column leaves every rate unchanged.
    MatrixXcd rot = prec;
    rot.col(1) *= std::exp(kI * 1.3);
    CHECK((user_rates(rows, rot, gamma) - r).norm() < 1e-12);
}

TEST_CASE("per_user_rate matches the effective-channel path") {
    SystemConfig cfg;
    cfg.bs_antennas = 8;
    cfg.ris_horizontal = 2;
    cfg.ris_vertical = 2;
    cfg.users = 2;
    std::mt19937_64 rng(19);
    PathSet paths = sample_paths(cfg, rng);
    std::vector<CascadedChannel> chans;
    for (int u = 0; u < cfg.users; ++u)
        chans.push_back(build_cascaded_channel(paths, u, cfg, rng));

    VectorXcd phases = phases_from_levels({0, 1, 2, 3}, 4);
    MatrixXcd rows(cfg.users, cfg.bs_antennas);
    for (int u = 0; u < cfg.users; ++u)
        rows.row(u) = effective_downlink_channel(chans[u], phases);
    MatrixXcd v = zf_precoder(rows);
    double want = user_rates(rows, v, cfg.snr_linear()).mean();
    CHECK(per_user_rate(chans, phases, v, cfg.snr_linear()) ==
          doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("phases_from_levels lies on the P-th roots of unity") {
    VectorXcd p = phases_from_levels({0, 1, 2, 3}, 4);
    CHECK(std::abs(p(0) - 1.0) < 1e-12);
    CHECK(std::abs(p(1) - kI) < 1e-12);
    CHECK(std::abs(p(2) + 1.0) < 1e-12);
    CHECK(std::abs(p(3) + kI) < 1e-12);
}

TEST_CASE("CEO on a one-element RIS finds the enumerated optimum") {
    SystemConfig cfg;
    cfg.bs_antennas = 4;
    cfg.ris_horizontal = 1;
    cfg.ris_vertical = 1;
    cfg.users = 2;
    // With one RIS element and no direct link every user row is collinear
    // with the single BS-RIS row; the direct link restores full rank.
    cfg.include_direct = true;
    std::mt19937_64 rng(23);
    PathSet paths = sample_paths(cfg, rng);
    std::vector<CascadedChannel> csi;
    for (int u = 0; u < cfg.users; ++u)
        csi.push_back(build_cascaded_channel(paths, u, cfg, rng));

    CeoParams ceo;
    ceo.population = 16;
    ceo.iterations = 5;
    ceo.phase_levels = 2;
    ceo.seed = 5;
    CeoResult got = ceo_optimize(csi, cfg, ceo);

    // Brute force both configurations of the single phase shifter.
    double best = -1.0;
    for (int lvl = 0; lvl < 2; ++lvl) {
        VectorXcd phases = phases_from_levels({lvl}, 2);
        MatrixXcd rows(cfg.users, cfg.bs_antennas);
        for (int u = 0; u < cfg.users; ++u)
            rows.row(u) = effective_downlink_channel(csi[u], phases);
        best = std::max(best, user_rates(rows, zf_precoder(rows), cfg.snr_linear()).mean());
    }
    CHECK(got.best_trace.back() == doctest::Approx(best).epsilon(1e-10));
    CHECK((got.phases - phases_from_levels(got.levels, 2)).norm() < 1e-12);
}

TEST_CASE("CEO invariants: monotone best trace, stochastic table, determinism") {
    SystemConfig cfg;
    cfg.bs_antennas = 8;
    cfg.ris_horizontal = 4;
    cfg.ris_vertical = 2;
    cfg.users = 2;
    std::mt19937_64 rng(29);
    PathSet paths = sample_paths(cfg, rng);
    std::vector<CascadedChannel> csi;
    for (int u = 0; u < cfg.users; ++u)
        csi.push_back(build_cascaded_channel(paths, u, cfg, rng));

    CeoParams ceo;
    ceo.population = 30;
    ceo.iterations = 8;
    ceo.seed = 7;
    CeoResult a = ceo_optimize(csi, cfg, ceo);
    CeoResult b = ceo_optimize(csi, cfg, ceo);

    REQUIRE(a.best_trace.size() == 8);
    for (size_t t = 1; t < a.best_trace.size(); ++t)
        CHECK(a.best_trace[t] >= a.best_trace[t - 1]);
    CHECK(a.levels == b.levels);
    CHECK(a.best_trace == b.best_trace);

    REQUIRE(a.table.rows() == cfg.ris_elements());
    REQUIRE(a.table.cols() == ceo.phase_levels);
    CHECK(a.table.minCoeff() >= 0.0);
    for (int n = 0; n < a.table.rows(); ++n)
        CHECK(a.table.row(n).sum() == doctest::Approx(1.0).epsilon(1e-12));

    // The searched configuration beats the average random draw.
    std::mt19937_64 draw(31);
    std::uniform_int_distribution<int> lvl(0, ceo.phase_levels - 1);
    double random_mean = 0.0;
    const int samples = 50;
    for (int s = 0; s < samples; ++s) {
        std::vector<int> levels(cfg.ris_elements());
        for (int &x : levels)
            x = lvl(draw);
        VectorXcd phases = phases_from_levels(levels, ceo.phase_levels);
        MatrixXcd rows(cfg.users, cfg.bs_antennas);
        for (int u = 0; u < cfg.users; ++u)
            rows.row(u) = effective_downlink_channel(csi[u], phases);
        random_mean += user_rates(rows, zf_precoder(rows), cfg.snr_linear()).mean() / samples;
    }
    CHECK(a.best_trace.back() > random_mean);
}
