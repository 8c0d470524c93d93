// SPDX-License-Identifier: Apache-2.0
#include "risfb/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "risfb/rng.hpp"

namespace risfb {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr std::complex<double> jay{0.0, 1.0};
} // namespace

void SystemConfig::validate() const {
    if (bs_antennas < 1 || ris_horizontal < 1 || ris_vertical < 1 || users < 1)
        throw std::invalid_argument("all array/user counts must be >= 1");
    if (bs_ris_paths < 1 || ris_ue_paths < 1)
        throw std::invalid_argument("path counts must be >= 1");
    if (bs_ris_paths > aod_grid)
        throw std::invalid_argument("L1 must not exceed the AoD grid resolution G_t");
    if (ris_ue_paths > ris_elements())
        throw std::invalid_argument("L2 must not exceed the RIS element count");
    if (angle_bits < 1 || angle_bits > 30 || codeword_bits < 0 || codeword_bits > 24)
        throw std::invalid_argument("bit widths out of range");
    if (coherence_ratio < 1)
        throw std::invalid_argument("coherence_ratio must be >= 1");
    if (!(step1_user_fraction > 0.0 && step1_user_fraction <= 1.0))
        throw std::invalid_argument("step1_user_fraction must lie in (0, 1]");
    if (bs_spacing <= 0.0 || ris_spacing <= 0.0)
        throw std::invalid_argument("antenna spacings must be positive");
}

double SystemConfig::snr_linear() const { return std::pow(10.0, snr_db / 10.0); }

void CeoParams::validate() const {
    if (population < 10)
        throw std::invalid_argument("CEO population must be >= 10");
    if (!(elite_fraction > 0.0 && elite_fraction < 1.0))
        throw std::invalid_argument("CEO elite fraction must lie in (0, 1)");
    if (iterations < 1 || phase_levels < 2)
        throw std::invalid_argument("CEO iterations >= 1 and phase levels >= 2 required");
    if (!(smoothing > 0.0 && smoothing <= 1.0))
        throw std::invalid_argument("CEO smoothing must lie in (0, 1]");
}

VectorXcd ula_steering(double phi, int m, double spacing) {
    VectorXcd v(m);
    const double step = two_pi * spacing * std::sin(phi);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int i = 0; i < m; ++i)
        v(i) = scale * std::exp(jay * (step * i));
    return v;
}

VectorXcd freq_steering(double u, double v, int n1, int n2, double spacing) {
    const int n = n1 * n2;
    VectorXcd out(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i2 = 0; i2 < n2; ++i2)
        for (int i1 = 0; i1 < n1; ++i1)
            out(i2 * n1 + i1) = scale * std::exp(jay * (two_pi * spacing * (i2 * v + i1 * u)));
    return out;
}

VectorXcd upa_steering(double phi, double theta, int n1, int n2, double spacing) {
    return freq_steering(std::cos(theta) * std::sin(phi), std::sin(theta), n1, n2, spacing);
}

std::pair<double, double> cascaded_frequencies(const RisUePath &ue, const BsRisPath &bs) {
    double u = std::cos(bs.aoa_elevation) * std::sin(bs.aoa_azimuth) -
               std::cos(ue.aod_elevation) * std::sin(ue.aod_azimuth);
    double v = std::sin(bs.aoa_elevation) - std::sin(ue.aod_elevation);
    return {u, v};
}

VectorXcd cascaded_steering(const RisUePath &ue, const BsRisPath &bs, const SystemConfig &cfg) {
    VectorXcd b1 = upa_steering(bs.aoa_azimuth, bs.aoa_elevation,
                                cfg.ris_horizontal, cfg.ris_vertical, cfg.ris_spacing);
    VectorXcd b2 = upa_steering(ue.aod_azimuth, ue.aod_elevation,
                                cfg.ris_horizontal, cfg.ris_vertical, cfg.ris_spacing);
    return b2.conjugate().cwiseProduct(b1);
}

PathSet sample_paths(const SystemConfig &cfg, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> angle(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);

    PathSet out;
    out.bs_ris.resize(cfg.bs_ris_paths);
    for (auto &p : out.bs_ris) {
        p.gain = complex_gaussian(rng, 1.0 / cfg.bs_ris_paths);
        p.aod = angle(rng);
        p.aoa_azimuth = angle(rng);
        p.aoa_elevation = angle(rng);
        if (cfg.on_grid_aod) {
            // Snap sin(aod) to the nearest point of the uniform G_t grid over [-1, 1).
            double s = std::sin(p.aod);
            double g = std::round((s + 1.0) * cfg.aod_grid / 2.0);
            g = std::min(g, static_cast<double>(cfg.aod_grid - 1));
            p.aod = std::asin(-1.0 + 2.0 * g / cfg.aod_grid);
        }
    }
    out.ris_ue.resize(cfg.users);
    for (auto &user_paths : out.ris_ue) {
        user_paths.resize(cfg.ris_ue_paths);
        for (auto &p : user_paths) {
            p.gain = complex_gaussian(rng, 1.0 / cfg.ris_ue_paths);
            p.aod_azimuth = angle(rng);
            p.aod_elevation = angle(rng);
        }
    }
    return out;
}

CascadedChannel build_cascaded_channel(const PathSet &paths, int user,
                                       const SystemConfig &cfg, std::mt19937_64 &rng) {
    if (user < 0 || user >= static_cast<int>(paths.ris_ue.size()))
        throw std::out_of_range("user index out of range");

    const int n = cfg.ris_elements();
    const int m = cfg.bs_antennas;
    CascadedChannel ch;
    ch.H = MatrixXcd::Zero(n, m);
    for (const auto &bs : paths.bs_ris) {
        VectorXcd a = ula_steering(bs.aod, m, cfg.bs_spacing);
        for (const auto &ue : paths.ris_ue[user]) {
            std::complex<double> g = bs.gain * ue.gain;
            ch.H.noalias() += g * cascaded_steering(ue, bs, cfg) * a.adjoint();
        }
    }
    ch.direct = VectorXcd::Zero(m);
    if (cfg.include_direct)
        for (int i = 0; i < m; ++i)
            ch.direct(i) = complex_gaussian(rng, 1.0 / m);
    return ch;
}

RowVectorXcd effective_downlink_channel(const CascadedChannel &ch, const VectorXcd &phases) {
    if (phases.size() != ch.H.rows())
        throw std::invalid_argument("phase vector length does not match RIS element count");
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        if (std::abs(std::abs(phases(i)) - 1.0) > 1e-9)
            throw std::invalid_argument("RIS phase entries must have unit modulus");
    return ch.direct.adjoint() + phases.transpose() * ch.H;
}

} // namespace risfb
