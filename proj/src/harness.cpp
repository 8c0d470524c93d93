// SPDX-License-Identifier: Apache-2.0
#include "risfb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "risfb/beamforming.hpp"
#include "risfb/feedback.hpp"
#include "risfb/rng.hpp"

namespace risfb {

namespace {

constexpr std::uint64_t kCodebookStream = 0xc0deb00cULL;
constexpr std::uint64_t kConventionalStream = 0xc0171e55ULL;
constexpr std::uint64_t kTrialStream = 0x7a1a15ULL;
constexpr std::uint64_t kCeoStream = 0xce0ULL;
constexpr int kMaxResamples = 10;

struct PointContext {
    const SystemConfig &cfg;
    Scheme scheme;
    CeoParams ceo;
    const FeedbackCodec *codec;       // proposed variants
    const MatrixXcd *conv_codebook;   // conventional surrogate, N x 2^B
};

int appointed_count(const SystemConfig &cfg) {
    return std::max(1, static_cast<int>(std::ceil(cfg.step1_user_fraction * cfg.users)));
}

/// BS-side CSI for one realization under the given scheme.
std::vector<CascadedChannel> bs_side_csi(const PointContext &ctx,
                                         const PathSet &paths,
                                         const std::vector<CascadedChannel> &truth) {
    const SystemConfig &cfg = ctx.cfg;
    if (ctx.scheme == Scheme::perfect_csit)
        return truth;

    const FeedbackCodec &codec = *ctx.codec;
    const int k = cfg.users;
    const int l1 = cfg.bs_ris_paths;
    const int appointed = appointed_count(cfg);

    // Shared column support; every UE sees the same one, the appointed
    // user(s) feed it back.
    std::vector<int> support = detect_support(truth[0].H, codec.dictionary(), l1);

    MatrixXcd exact_basis;
    const MatrixXcd *basis_override = nullptr;
    if (ctx.scheme == Scheme::proposed_perfect_aod) {
        // Column order must match step 2 (the transmitted support order).
        std::vector<int> order = step2_column_order(paths, cfg);
        exact_basis.resize(cfg.bs_antennas, l1);
        support.resize(l1);
        for (int i = 0; i < l1; ++i) {
            exact_basis.col(i) = ula_steering(paths.bs_ris[order[i]].aod,
                                              cfg.bs_antennas, cfg.bs_spacing);
            support[i] = aod_to_grid_index(paths.bs_ris[order[i]].aod,
                                           codec.dictionary());
        }
        basis_override = &exact_basis;
    }

    std::vector<MatrixXcd> reconstructed;
    if (ctx.scheme == Scheme::conventional) {
        // Surrogate baseline: per-column isotropic full-dimension RVQ with
        // the same bit budget, genie coefficients, shared support.
        const MatrixXcd &cb = *ctx.conv_codebook;
        reconstructed.reserve(k);
        MatrixXcd basis(cfg.bs_antennas, l1);
        for (int i = 0; i < l1; ++i)
            basis.col(i) = codec.dictionary().columns.col(support[i]);
        for (int u = 0; u < k; ++u) {
            HybridChannel hy = extract_hybrid(truth[u].H, support, codec.dictionary());
            MatrixXcd columns(cfg.ris_elements(), l1);
            for (int i = 0; i < l1; ++i) {
                VectorXcd column = hy.columns.col(i);
                // argmin chordal = argmax |c^H h| over unit-norm codewords
                Eigen::VectorXd scores = (cb.adjoint() * column).cwiseAbs();
                Eigen::Index best;
                scores.maxCoeff(&best);
                VectorXcd dir = cb.col(best);
                columns.col(i) = dir * dir.dot(column);
            }
            reconstructed.push_back(reconstruct_on_basis(columns, basis));
        }
    } else {
        std::vector<FeedbackPayload> payloads;
        std::vector<std::vector<std::complex<double>>> coeffs;
        payloads.reserve(k);
        coeffs.reserve(k);
        for (int u = 0; u < k; ++u) {
            FeedbackCodec::Encoded enc =
                codec.encode(truth[u], paths, u, support, u < appointed, basis_override);
            // Round-trip the wire format; the decoder sees parsed bits only.
            payloads.push_back(parse_payload(serialize_payload(enc.payload, cfg), cfg));
            coeffs.push_back(std::move(enc.column_coeffs));
        }
        reconstructed = codec.decode(payloads, coeffs, basis_override);
    }

    std::vector<CascadedChannel> csi(k);
    for (int u = 0; u < k; ++u) {
        csi[u].H = std::move(reconstructed[u]);
        csi[u].direct = truth[u].direct;  // genie-known direct link
    }
    return csi;
}

double run_trial(const PointContext &ctx, std::uint64_t trial_seed) {
    const SystemConfig &cfg = ctx.cfg;
    for (int attempt = 0;; ++attempt) {
        try {
            std::mt19937_64 rng(attempt == 0 ? trial_seed
                                             : derive_seed(trial_seed, attempt));
            PathSet paths = sample_paths(cfg, rng);
            std::vector<CascadedChannel> truth;
            truth.reserve(cfg.users);
            for (int u = 0; u < cfg.users; ++u)
                truth.push_back(build_cascaded_channel(paths, u, cfg, rng));

            std::vector<CascadedChannel> csi = bs_side_csi(ctx, paths, truth);

            CeoParams ceo = ctx.ceo;
            ceo.seed = derive_seed(trial_seed, kCeoStream + attempt);
            CeoResult opt = ceo_optimize(csi, cfg, ceo);

            MatrixXcd eff_bs(cfg.users, cfg.bs_antennas);
            for (int u = 0; u < cfg.users; ++u)
                eff_bs.row(u) = effective_downlink_channel(csi[u], opt.phases);
            MatrixXcd precoders = zf_precoder(eff_bs);

            return per_user_rate(truth, opt.phases, precoders, cfg.snr_linear());
        } catch (const std::runtime_error &) {
            if (attempt + 1 >= kMaxResamples)
                throw;
        }
    }
}

int resolve_threads(int threads) {
    if (threads > 0)
        return threads;
    if (const char *env = std::getenv("RIS_SIM_THREADS")) {
        int t = std::atoi(env);
        if (t > 0)
            return t;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

} // namespace

std::string scheme_name(Scheme s) {
    switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::conventional: return "conventional";
    case Scheme::perfect_csit: return "perfect_csit";
    case Scheme::proposed_perfect_aod: return "proposed_perfect_aod";
    }
    throw std::logic_error("unknown scheme");
}

Scheme scheme_from_name(const std::string &name) {
    if (name == "proposed") return Scheme::proposed;
    if (name == "conventional") return Scheme::conventional;
    if (name == "perfect_csit") return Scheme::perfect_csit;
    if (name == "proposed_perfect_aod") return Scheme::proposed_perfect_aod;
    throw std::invalid_argument("unknown scheme: " + name);
}

std::string axis_name(SweepAxis a) {
    return a == SweepAxis::codeword_bits ? "codeword_bits" : "grid_resolution";
}

PointResult run_point(const SystemConfig &cfg, Scheme scheme, int trials,
                      const CeoParams &ceo, int threads) {
    cfg.validate();
    if (trials < 1)
        throw std::invalid_argument("trials must be >= 1");

    FeedbackCodec codec(cfg, derive_seed(cfg.rng_seed, kCodebookStream));
    MatrixXcd conv_codebook;
    if (scheme == Scheme::conventional)
        conv_codebook = rvq_codebook(cfg.ris_elements(), cfg.codeword_bits,
                                     derive_seed(cfg.rng_seed, kConventionalStream));

    PointContext ctx{cfg, scheme, ceo, &codec, &conv_codebook};

    std::vector<double> rates(trials);
    const int workers = std::min(resolve_threads(threads), trials);
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::mutex fail_mutex;
    auto work = [&]() {
        for (;;) {
            int t = next.fetch_add(1);
            if (t >= trials)
                return;
            try {
                rates[t] = run_trial(ctx, derive_seed(cfg.rng_seed, kTrialStream + t));
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (!failure)
                    failure = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto &th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    // Aggregate in trial order so the result is thread-count independent.
    double mean = 0.0;
    for (int t = 0; t < trials; ++t)
        mean += rates[t];
    mean /= trials;
    double var = 0.0;
    for (int t = 0; t < trials; ++t)
        var += (rates[t] - mean) * (rates[t] - mean);
    var = trials > 1 ? var / (trials - 1) : 0.0;
    return {mean, std::sqrt(var / trials)};
}

ResultTable sweep(const SweepSpec &spec, int threads) {
    spec.base.validate();
    if (spec.trials < 1)
        throw std::invalid_argument("trials must be >= 1");
    for (int v : spec.values)
        if (v < 1)
            throw std::invalid_argument("axis values must be positive");

    ResultTable table;
    for (Scheme scheme : spec.schemes) {
        std::vector<int> values = spec.values;
        if (scheme == Scheme::perfect_csit)
            values = {0};  // no feedback axis
        for (int v : values) {
            SystemConfig cfg = spec.base;
            if (scheme != Scheme::perfect_csit) {
                if (spec.axis == SweepAxis::codeword_bits)
                    cfg.codeword_bits = v;
                else
                    cfg.aod_grid = v;
            }
            PointResult res = run_point(cfg, scheme, spec.trials, spec.ceo, threads);
            ResultRow row;
            row.scheme = scheme_name(scheme);
            row.axis = axis_name(spec.axis);
            row.axis_value = v;
            row.per_user_bits =
                scheme == Scheme::perfect_csit ? 0.0 : overhead(cfg).per_user_amortized_bits;
            row.mean_rate = res.mean_rate;
            row.std_error = res.std_error;
            row.trials = spec.trials;
            row.seed = cfg.rng_seed;
            table.rows.push_back(std::move(row));
        }
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const ResultRow &a, const ResultRow &b) {
        if (a.scheme != b.scheme)
            return a.scheme < b.scheme;
        return a.axis_value < b.axis_value;
    });
    return table;
}

void write_csv(const ResultTable &table, std::ostream &os) {
    os << "scheme,axis,axis_value,per_user_bits,mean_rate,stderr,trials,seed\n";
    char buf[160];
    for (const auto &r : table.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.6g,%.6g,%.6g,%d,%llu\n",
                      r.scheme.c_str(), r.axis.c_str(), r.axis_value, r.per_user_bits,
                      r.mean_rate, r.std_error, r.trials,
                      static_cast<unsigned long long>(r.seed));
        os << buf;
    }
}

} // namespace risfb
