// SPDX-License-Identifier: Apache-2.0
#include "risfb/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "risfb/bitstream.hpp"
#include "risfb/rng.hpp"

namespace risfb {

namespace {

int bits_for_grid(int g_t) {
    int b = 0;
    while ((1 << b) < g_t)
        ++b;
    return b;  // ceil(log2 g_t)
}

} // namespace

int quantize_frequency(double x, int bits) {
    const int levels = 1 << bits;
    const double step = 4.0 / levels;
    x = std::clamp(x, -2.0, 2.0);
    double t = (x + 2.0) / step;
    int q = static_cast<int>(std::floor(t));
    // Cell boundaries are equidistant to both neighboring centers; tie
    // breaks toward the lower index.
    if (t == std::floor(t) && q > 0)
        --q;
    return std::min(q, levels - 1);
}

double dequantize_frequency(int q, int bits) {
    const int levels = 1 << bits;
    if (q < 0 || q >= levels)
        throw std::out_of_range("quantizer index out of range");
    return -2.0 + 4.0 * (q + 0.5) / levels;
}

std::vector<int> step2_column_order(const PathSet &paths, const SystemConfig &cfg) {
    // Nearest grid column in the circular sine metric (the ULA response has
    // period 2 in sin(AoD), so sines just below +1 alias next to -1).
    auto wrapped_index = [&](double phi) {
        double pos = (std::sin(phi) + 1.0) * cfg.aod_grid / 2.0;
        int idx = static_cast<int>(std::floor(pos + 0.5));
        return ((idx % cfg.aod_grid) + cfg.aod_grid) % cfg.aod_grid;
    };
    std::vector<int> order(paths.bs_ris.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        int ga = wrapped_index(paths.bs_ris[a].aod);
        int gb = wrapped_index(paths.bs_ris[b].aod);
        if (ga != gb)
            return ga < gb;
        return std::sin(paths.bs_ris[a].aod) < std::sin(paths.bs_ris[b].aod);
    });
    return order;
}

QuantizedAngles quantize_cascaded_angles(const PathSet &paths, int user,
                                         const SystemConfig &cfg) {
    if (user < 0 || user >= static_cast<int>(paths.ris_ue.size()))
        throw std::out_of_range("user index out of range");
    QuantizedAngles out;
    out.pairs.resize(paths.bs_ris.size());
    std::vector<int> order = step2_column_order(paths, cfg);
    for (size_t i = 0; i < order.size(); ++i) {
        const BsRisPath &bs = paths.bs_ris[order[i]];
        out.pairs[i].reserve(paths.ris_ue[user].size());
        for (const auto &ue : paths.ris_ue[user]) {
            auto [u, v] = cascaded_frequencies(ue, bs);
            out.pairs[i].push_back({quantize_frequency(u, cfg.angle_bits),
                                    quantize_frequency(v, cfg.angle_bits)});
        }
    }
    return out;
}

MatrixXcd rvq_codebook(int dim, int bits, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    MatrixXcd cb(dim, 1 << bits);
    for (Eigen::Index q = 0; q < cb.cols(); ++q) {
        for (int i = 0; i < dim; ++i)
            cb(i, q) = complex_gaussian(rng);
        cb.col(q).normalize();
    }
    return cb;
}

double chordal_distance_sq(const VectorXcd &a, const VectorXcd &b) {
    double na = a.squaredNorm();
    double nb = b.squaredNorm();
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("chordal distance undefined for zero vectors");
    double ip = std::norm(a.dot(b));  // |a^H b|^2
    return std::max(0.0, 1.0 - ip / (na * nb));
}

SubspaceCodebook::SubspaceCodebook(MatrixXcd steering, MatrixXcd base)
    : steering_(std::move(steering)), base_(std::move(base)) {
    if (steering_.cols() != base_.rows())
        throw std::invalid_argument("steering matrix and base codebook dimension mismatch");
    gram_ = steering_.adjoint() * steering_;
}

VectorXcd SubspaceCodebook::codeword(int q) const {
    if (q < 0 || q >= size())
        throw std::out_of_range("codeword index out of range");
    for (const auto &[idx, vec] : planted_)
        if (idx == q)
            return vec;
    return steering_ * base_.col(q);
}

void SubspaceCodebook::plant(int q, VectorXcd direction) {
    if (q < 0 || q >= size())
        throw std::out_of_range("codeword index out of range");
    planted_.emplace_back(q, std::move(direction));
}

int SubspaceCodebook::select(const VectorXcd &column) const {
    double cnorm = column.squaredNorm();
    if (cnorm == 0.0)
        throw std::invalid_argument("cannot select a codeword for a zero column");

    // sin^2(angle(h, S r)) = 1 - |r^H (S^H h)|^2 / (|h|^2 r^H G r), so the
    // exhaustive scan only needs L2-dimensional products, batched over q.
    VectorXcd t = steering_.adjoint() * column;
    Eigen::VectorXd numer = (base_.adjoint() * t).cwiseAbs2();
    MatrixXcd gb = gram_ * base_;  // L2 x 2^B
    Eigen::VectorXd denom =
        base_.conjugate().cwiseProduct(gb).colwise().sum().real().transpose() * cnorm;

    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int q = 0; q < size(); ++q) {
        double dist;
        bool is_planted = false;
        for (const auto &[idx, vec] : planted_)
            if (idx == q) {
                dist = chordal_distance_sq(column, vec);
                is_planted = true;
                break;
            }
        if (!is_planted) {
            if (denom(q) <= 0.0)
                continue;  // codeword collapsed to zero in the subspace
            dist = 1.0 - numer(q) / denom(q);
        }
        if (dist < best_dist) {  // strict: ties keep the lower index
            best_dist = dist;
            best = q;
        }
    }
    if (best < 0)
        throw std::runtime_error("no usable codeword in the codebook");
    return best;
}

OverheadReport overhead(const SystemConfig &cfg) {
    cfg.validate();
    OverheadReport r;
    r.step1_bits = cfg.bs_ris_paths * bits_for_grid(cfg.aod_grid);
    r.step2_bits = cfg.bs_ris_paths * cfg.ris_ue_paths * 2 * cfg.angle_bits;
    r.step3_bits = cfg.bs_ris_paths * cfg.codeword_bits;
    r.per_user_amortized_bits =
        r.step1_bits * cfg.step1_user_fraction / cfg.coherence_ratio +
        static_cast<double>(r.step2_bits) / cfg.coherence_ratio + r.step3_bits;
    return r;
}

std::vector<std::uint8_t> serialize_payload(const FeedbackPayload &p, const SystemConfig &cfg) {
    const int idx_bits = bits_for_grid(cfg.aod_grid);
    BitWriter w;
    w.put(p.step1.has_value() ? 1 : 0, 8);  // flags byte

    if (p.step1) {
        if (static_cast<int>(p.step1->size()) != cfg.bs_ris_paths)
            throw std::invalid_argument("step1 must carry L1 grid indexes");
        for (int g : *p.step1)
            w.put(static_cast<std::uint64_t>(g), idx_bits);
    }
    if (static_cast<int>(p.step2.pairs.size()) != cfg.bs_ris_paths)
        throw std::invalid_argument("step2 must cover L1 columns");
    for (const auto &column : p.step2.pairs) {
        if (static_cast<int>(column.size()) != cfg.ris_ue_paths)
            throw std::invalid_argument("step2 column must carry L2 angle pairs");
        for (const auto &pair : column) {
            w.put(static_cast<std::uint64_t>(pair.azimuth), cfg.angle_bits);
            w.put(static_cast<std::uint64_t>(pair.elevation), cfg.angle_bits);
        }
    }
    if (static_cast<int>(p.step3.size()) != cfg.bs_ris_paths)
        throw std::invalid_argument("step3 must carry L1 codeword indexes");
    for (int d : p.step3)
        w.put(static_cast<std::uint64_t>(d), cfg.codeword_bits);
    return w.bytes();
}

FeedbackPayload parse_payload(const std::vector<std::uint8_t> &bytes, const SystemConfig &cfg) {
    const int idx_bits = bits_for_grid(cfg.aod_grid);
    BitReader r(bytes);
    std::uint64_t flags = r.get(8);
    if (flags > 1)
        throw std::invalid_argument("malformed payload: unknown flag bits");

    FeedbackPayload p;
    if (flags & 1) {
        std::vector<int> s1(cfg.bs_ris_paths);
        for (int &g : s1) {
            g = static_cast<int>(r.get(idx_bits));
            if (g >= cfg.aod_grid)
                throw std::invalid_argument("malformed payload: grid index out of range");
        }
        p.step1 = std::move(s1);
    }
    p.step2.pairs.assign(cfg.bs_ris_paths, {});
    for (auto &column : p.step2.pairs) {
        column.resize(cfg.ris_ue_paths);
        for (auto &pair : column) {
            pair.azimuth = static_cast<int>(r.get(cfg.angle_bits));
            pair.elevation = static_cast<int>(r.get(cfg.angle_bits));
        }
    }
    p.step3.resize(cfg.bs_ris_paths);
    for (int &d : p.step3)
        d = static_cast<int>(r.get(cfg.codeword_bits));
    return p;
}

FeedbackCodec::FeedbackCodec(SystemConfig cfg, std::uint64_t codebook_seed)
    : cfg_(cfg),
      dict_(build_dictionary(cfg)),
      rvq_base_(rvq_codebook(cfg.ris_ue_paths, cfg.codeword_bits, codebook_seed)) {
    cfg_.validate();
}

SubspaceCodebook FeedbackCodec::column_codebook(const QuantizedAngles &q, int column) const {
    if (column < 0 || column >= static_cast<int>(q.pairs.size()))
        throw std::out_of_range("column index out of range");
    MatrixXcd steering(cfg_.ris_elements(), cfg_.ris_ue_paths);
    for (int j = 0; j < cfg_.ris_ue_paths; ++j) {
        double u = dequantize_frequency(q.pairs[column][j].azimuth, cfg_.angle_bits);
        double v = dequantize_frequency(q.pairs[column][j].elevation, cfg_.angle_bits);
        steering.col(j) = freq_steering(u, v, cfg_.ris_horizontal, cfg_.ris_vertical,
                                        cfg_.ris_spacing);
    }
    return SubspaceCodebook(std::move(steering), rvq_base_);
}

FeedbackCodec::Encoded FeedbackCodec::encode(const CascadedChannel &ch, const PathSet &paths,
                                             int user, const std::vector<int> &support,
                                             bool appointed,
                                             const MatrixXcd *basis_override) const {
    Encoded out;
    if (appointed)
        out.payload.step1 = support;
    out.payload.step2 = quantize_cascaded_angles(paths, user, cfg_);
    if (basis_override) {
        out.hybrid.support = support;
        out.hybrid.columns = extract_on_basis(ch.H, *basis_override);
    } else {
        out.hybrid = extract_hybrid(ch.H, support, dict_);
    }

    out.payload.step3.resize(cfg_.bs_ris_paths);
    out.column_coeffs.resize(cfg_.bs_ris_paths);
    for (int i = 0; i < cfg_.bs_ris_paths; ++i) {
        SubspaceCodebook cb = column_codebook(out.payload.step2, i);
        const VectorXcd column = out.hybrid.columns.col(i);
        int d = cb.select(column);
        out.payload.step3[i] = d;
        VectorXcd dir = cb.codeword(d).normalized();
        out.column_coeffs[i] = dir.dot(column);  // dir^H column
    }
    return out;
}

std::vector<MatrixXcd> FeedbackCodec::decode(
    const std::vector<FeedbackPayload> &payloads,
    const std::vector<std::vector<std::complex<double>>> &coeffs,
    const MatrixXcd *basis_override) const {
    if (payloads.size() != coeffs.size())
        throw std::invalid_argument("payload/coefficient count mismatch");

    // The decoder honors the first received step-1 payload and ignores
    // duplicates.
    const std::vector<int> *support = nullptr;
    for (const auto &p : payloads)
        if (p.step1) {
            support = &*p.step1;
            break;
        }
    if (!support)
        throw std::runtime_error("protocol error: no payload carries step 1");

    MatrixXcd basis;
    if (basis_override) {
        basis = *basis_override;
    } else {
        basis.resize(cfg_.bs_antennas, support->size());
        for (size_t i = 0; i < support->size(); ++i) {
            int g = (*support)[i];
            if (g < 0 || g >= cfg_.aod_grid)
                throw std::invalid_argument("malformed payload: grid index out of range");
            basis.col(static_cast<Eigen::Index>(i)) = dict_.columns.col(g);
        }
    }

    std::vector<MatrixXcd> out;
    out.reserve(payloads.size());
    for (size_t k = 0; k < payloads.size(); ++k) {
        const auto &p = payloads[k];
        if (static_cast<int>(p.step3.size()) != cfg_.bs_ris_paths)
            throw std::invalid_argument("malformed payload: wrong step3 length");
        MatrixXcd columns(cfg_.ris_elements(), cfg_.bs_ris_paths);
        for (int i = 0; i < cfg_.bs_ris_paths; ++i) {
            int d = p.step3[i];
            if (d < 0 || d >= (1 << cfg_.codeword_bits))
                throw std::invalid_argument("malformed payload: codeword index out of range");
            SubspaceCodebook cb = column_codebook(p.step2, i);
            columns.col(i) = cb.codeword(d).normalized() * coeffs[k][i];
        }
        out.push_back(reconstruct_on_basis(columns, basis));
    }
    return out;
}

} // namespace risfb
