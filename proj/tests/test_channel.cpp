// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "risfb/channel.hpp"
#include "risfb/rng.hpp"

using namespace risfb;
using std::numbers::pi;

namespace {

SystemConfig small_config() {
    SystemConfig cfg;
    cfg.bs_antennas = 8;
    cfg.ris_horizontal = 4;
    cfg.ris_vertical = 4;
    cfg.users = 2;
    cfg.bs_ris_paths = 2;
    cfg.ris_ue_paths = 2;
    cfg.aod_grid = 64;
    return cfg;
}

PathSet random_paths(const SystemConfig &cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_paths(cfg, rng);
}

} // namespace

TEST_CASE("ula steering matches the closed form") {
    VectorXcd v = ula_steering(0.0, 4, 0.5);
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(v(m) - std::complex<double>(0.5, 0.0)) < 1e-14);

    v = ula_steering(pi / 2, 2, 0.5);
    CHECK(std::abs(v(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(v(1) + 1.0 / std::sqrt(2.0)) < 1e-12);  // exp(j pi) = -1

    // Independent scalar evaluation, entry by entry.
    v = ula_steering(pi / 6, 8, 0.5);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    for (int m = 0; m < 8; ++m) {
        double phase = 2.0 * pi * 0.5 * m * std::sin(pi / 6);
        std::complex<double> expected =
            std::complex<double>(std::cos(phase), std::sin(phase)) / std::sqrt(8.0);
        CHECK(std::abs(v(m) - expected) < 1e-12);
    }
}

TEST_CASE("upa steering matches a brute-force evaluation") {
    VectorXcd v = upa_steering(0.0, 0.0, 2, 2, 0.5);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(v(i) - 0.5) < 1e-14);

    // Direct 4-entry evaluation of the Kronecker order: vertical outer,
    // horizontal inner.
    double phi = pi / 4, theta = pi / 6;
    v = upa_steering(phi, theta, 2, 2, 0.5);
    for (int n2 = 0; n2 < 2; ++n2)
        for (int n1 = 0; n1 < 2; ++n1) {
            double phase = 2.0 * pi * 0.5 *
                           (n2 * std::sin(theta) + n1 * std::cos(theta) * std::sin(phi));
            std::complex<double> expected =
                std::complex<double>(std::cos(phase), std::sin(phase)) / 2.0;
            CHECK(std::abs(v(n2 * 2 + n1) - expected) < 1e-13);
        }
}

TEST_CASE("steering vectors stay unit norm over an angle grid") {
    for (int i = 0; i < 100; ++i) {
        double phi = -pi / 2 + pi * i / 99.0;
        double theta = pi / 2 - pi * i / 99.0;
        CHECK(std::abs(ula_steering(phi, 32, 0.5).norm() - 1.0) < 1e-12);
        CHECK(std::abs(upa_steering(phi, theta, 8, 8, 0.5).norm() - 1.0) < 1e-12);
        CHECK(std::abs(upa_steering(phi, theta, 4, 2, 0.5).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("cascaded steering is the element-wise product with norm 1/sqrt(N)") {
    SystemConfig cfg = small_config();
    const int n = cfg.ris_elements();

    BsRisPath bs{1.0, 0.0, 0.3, -0.2};
    RisUePath ue{1.0, 0.3, -0.2};
    VectorXcd b = cascaded_steering(ue, bs, cfg);
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(b(i) - 1.0 / n) < 1e-13);  // identical angles: phases cancel

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(-pi / 2, pi / 2);
    for (int t = 0; t < 20; ++t) {
        BsRisPath p1{1.0, 0.0, ang(rng), ang(rng)};
        RisUePath p2{1.0, ang(rng), ang(rng)};
        VectorXcd c = cascaded_steering(p2, p1, cfg);
        CHECK(std::abs(c.norm() - 1.0 / std::sqrt(double(n))) < 1e-12);

        // Independent oracle: product of the two steering vectors.
        VectorXcd b1 = upa_steering(p1.aoa_azimuth, p1.aoa_elevation, 4, 4, 0.5);
        VectorXcd b2 = upa_steering(p2.aod_azimuth, p2.aod_elevation, 4, 4, 0.5);
        CHECK((c - b2.conjugate().cwiseProduct(b1)).norm() < 1e-14);

        // Negating every angle conjugates the vector.
        BsRisPath m1{1.0, 0.0, -p1.aoa_azimuth, -p1.aoa_elevation};
        RisUePath m2{1.0, -p2.aod_azimuth, -p2.aod_elevation};
        CHECK((cascaded_steering(m2, m1, cfg) - c.conjugate()).norm() < 1e-12);
    }
}

TEST_CASE("sample_paths is deterministic and has the declared moments") {
    SystemConfig cfg = small_config();
    PathSet a = random_paths(cfg, 42);
    PathSet b = random_paths(cfg, 42);
    CHECK(a.bs_ris.size() == 2);
    CHECK(a.ris_ue.size() == 2);
    CHECK(a.ris_ue[0].size() == 2);
    for (size_t i = 0; i < a.bs_ris.size(); ++i) {
        CHECK(a.bs_ris[i].gain == b.bs_ris[i].gain);
        CHECK(a.bs_ris[i].aod == b.bs_ris[i].aod);
    }
    for (const auto &p : a.bs_ris) {
        CHECK(std::abs(p.aod) <= pi / 2);
        CHECK(std::abs(p.aoa_azimuth) <= pi / 2);
        CHECK(std::abs(p.aoa_elevation) <= pi / 2);
    }

    // E[|alpha|^2] = 1/L1 within 5% over 1e4 samples.
    cfg.bs_ris_paths = 4;
    std::mt19937_64 rng(7);
    double acc = 0.0;
    int count = 0;
    for (int t = 0; t < 2500; ++t) {
        PathSet p = sample_paths(cfg, rng);
        for (const auto &path : p.bs_ris) {
            acc += std::norm(path.gain);
            ++count;
        }
    }
    CHECK(count == 10000);
    CHECK(acc / count == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("on-grid sampling lands sin(aod) exactly on the grid") {
    SystemConfig cfg = small_config();
    cfg.on_grid_aod = true;
    std::mt19937_64 rng(5);
    PathSet p = sample_paths(cfg, rng);
    for (const auto &path : p.bs_ris) {
        double pos = (std::sin(path.aod) + 1.0) * cfg.aod_grid / 2.0;
        CHECK(std::abs(pos - std::round(pos)) < 1e-9);
    }
}

TEST_CASE("cascaded channel equals the diag(h_r^H) G construction") {
    SystemConfig cfg = small_config();
    std::mt19937_64 rng(11);
    PathSet paths = sample_paths(cfg, rng);
    CascadedChannel ch = build_cascaded_channel(paths, 1, cfg, rng);

    const int n = cfg.ris_elements();
    MatrixXcd g_mat = MatrixXcd::Zero(n, cfg.bs_antennas);
    for (const auto &bs : paths.bs_ris)
        g_mat += bs.gain *
                 upa_steering(bs.aoa_azimuth, bs.aoa_elevation, 4, 4, 0.5) *
                 ula_steering(bs.aod, cfg.bs_antennas, 0.5).adjoint();
    RowVectorXcd h_r = RowVectorXcd::Zero(n);
    for (const auto &ue : paths.ris_ue[1])
        h_r += ue.gain *
               upa_steering(ue.aod_azimuth, ue.aod_elevation, 4, 4, 0.5).adjoint();
    MatrixXcd expected = h_r.asDiagonal() * g_mat;
    CHECK((ch.H - expected).norm() / expected.norm() < 1e-10);
}

TEST_CASE("single unit-gain path gives a rank-1 channel of known norm") {
    SystemConfig cfg = small_config();
    cfg.bs_ris_paths = 1;
    cfg.ris_ue_paths = 1;
    PathSet paths;
    paths.bs_ris = {{1.0, 0.4, 0.1, -0.3}};
    paths.ris_ue = {{{1.0, -0.7, 0.2}}, {{1.0, 0.5, 0.6}}};
    std::mt19937_64 rng(1);
    CascadedChannel ch = build_cascaded_channel(paths, 0, cfg, rng);
    CHECK(std::abs(ch.H.norm() - 1.0 / std::sqrt(double(cfg.ris_elements()))) < 1e-12);
    Eigen::JacobiSVD<MatrixXcd> svd(ch.H);
    CHECK(svd.singularValues()(1) < 1e-12);
}

TEST_CASE("channel is linear in each path gain; zero gains give H = 0") {
    SystemConfig cfg = small_config();
    std::mt19937_64 rng(13);
    PathSet paths = sample_paths(cfg, rng);

    std::mt19937_64 r1(2), r2(2);
    CascadedChannel base = build_cascaded_channel(paths, 0, cfg, r1);
    PathSet doubled = paths;
    doubled.bs_ris[0].gain *= 2.0;
    CascadedChannel two = build_cascaded_channel(doubled, 0, cfg, r2);

    // The delta is exactly the rank-1 terms of the doubled path.
    MatrixXcd delta = MatrixXcd::Zero(cfg.ris_elements(), cfg.bs_antennas);
    VectorXcd a = ula_steering(paths.bs_ris[0].aod, cfg.bs_antennas, 0.5);
    for (const auto &ue : paths.ris_ue[0])
        delta += paths.bs_ris[0].gain * ue.gain *
                 cascaded_steering(ue, paths.bs_ris[0], cfg) * a.adjoint();
    CHECK((two.H - base.H - delta).norm() < 1e-12);

    for (auto &p : paths.bs_ris)
        p.gain = 0.0;
    std::mt19937_64 r3(2);
    CascadedChannel zero = build_cascaded_channel(paths, 0, cfg, r3);
    CHECK(zero.H.norm() == 0.0);
}

TEST_CASE("effective downlink channel matches the diagonal identity") {
    SystemConfig cfg = small_config();
    cfg.include_direct = true;
    std::mt19937_64 rng(17);

    for (int t = 0; t < 100; ++t) {
        PathSet paths = sample_paths(cfg, rng);
        CascadedChannel ch = build_cascaded_channel(paths, 0, cfg, rng);

        VectorXcd phases(cfg.ris_elements());
        std::uniform_real_distribution<double> ang(0.0, 2 * pi);
        for (int i = 0; i < phases.size(); ++i)
            phases(i) = std::polar(1.0, ang(rng));

        RowVectorXcd got = effective_downlink_channel(ch, phases);

        // Full route: h_d^H + h_r^H diag(phi) G.
        RowVectorXcd h_r = RowVectorXcd::Zero(cfg.ris_elements());
        for (const auto &ue : paths.ris_ue[0])
            h_r += ue.gain *
                   upa_steering(ue.aod_azimuth, ue.aod_elevation, 4, 4, 0.5).adjoint();
        MatrixXcd g_mat = MatrixXcd::Zero(cfg.ris_elements(), cfg.bs_antennas);
        for (const auto &bs : paths.bs_ris)
            g_mat += bs.gain *
                     upa_steering(bs.aoa_azimuth, bs.aoa_elevation, 4, 4, 0.5) *
                     ula_steering(bs.aod, cfg.bs_antennas, 0.5).adjoint();
        // diag(h_r^H) G = diag-of-phi route needs h_r^H Phi G with Phi = diag(phi).
        RowVectorXcd full = ch.direct.adjoint() + h_r * phases.asDiagonal() * g_mat;
        CHECK((got - full).norm() < 1e-10);
    }
}

TEST_CASE("effective channel edge cases and phase validation") {
    SystemConfig cfg = small_config();
    std::mt19937_64 rng(19);
    PathSet paths = sample_paths(cfg, rng);
    CascadedChannel ch = build_cascaded_channel(paths, 0, cfg, rng);

    VectorXcd ones = VectorXcd::Ones(cfg.ris_elements());
    RowVectorXcd eff = effective_downlink_channel(ch, ones);
    CHECK((eff - ch.H.colwise().sum()).norm() < 1e-12);  // h_d is zero by default

    CascadedChannel empty = ch;
    empty.H.setZero();
    empty.direct = VectorXcd::Random(cfg.bs_antennas);
    CHECK((effective_downlink_channel(empty, ones) - empty.direct.adjoint()).norm() < 1e-14);

    VectorXcd bad = ones;
    bad(3) = 1.5;
    CHECK_THROWS_AS(effective_downlink_channel(ch, bad), std::invalid_argument);
}

TEST_CASE("config validation rejects inconsistent setups") {
    SystemConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.bs_ris_paths = 100;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // L1 > G_t
    cfg = small_config();
    cfg.step1_user_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.ris_ue_paths = 17;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // L2 > N
}
