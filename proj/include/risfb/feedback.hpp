// SPDX-License-Identifier: Apache-2.0
#ifndef RISFB_FEEDBACK_HPP
#define RISFB_FEEDBACK_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "risfb/angular.hpp"
#include "risfb/channel.hpp"
#include "risfb/config.hpp"

namespace risfb {

/// Quantizer indexes (q_az, q_el) for one cascaded AoA pair's spatial
/// frequencies, each on a uniform 2^B0-level grid over [-2, 2].
struct AnglePair {
    int azimuth;
    int elevation;
};

/// Step-2 content for one user: L1 columns x L2 cascaded AoA pairs.
struct QuantizedAngles {
    std::vector<std::vector<AnglePair>> pairs;  // [column][path]
};

/// Bit-level feedback content of one user. step1 is present only for the
/// appointed user(s).
struct FeedbackPayload {
    std::optional<std::vector<int>> step1;  // L1 grid indexes
    QuantizedAngles step2;
    std::vector<int> step3;  // L1 codeword indexes
};

struct OverheadReport {
    int step1_bits = 0;
    int step2_bits = 0;
    int step3_bits = 0;
    double per_user_amortized_bits = 0.0;
};

/// Nearest of the 2^bits level centers -2 + 4(q+0.5)/2^bits; input clamped
/// to [-2, 2], ties toward the lower index.
int quantize_frequency(double x, int bits);
double dequantize_frequency(int q, int bits);

/// Step-2 column order: BS-RIS path indexes sorted the way the shared
/// support is transmitted, i.e. by the nearest grid column. The ULA response
/// is periodic in sin(AoD) with period 2, so the nearest column is taken in
/// the wrapped (circular) sine metric.
std::vector<int> step2_column_order(const PathSet &paths, const SystemConfig &cfg);

QuantizedAngles quantize_cascaded_angles(const PathSet &paths, int user,
                                         const SystemConfig &cfg);

/// RVQ base codebook: dim x 2^bits i.i.d. complex Gaussian columns
/// normalized to unit norm, deterministic from the seed.
MatrixXcd rvq_codebook(int dim, int bits, std::uint64_t seed);

/// sin^2 of the principal angle: 1 - |a^H b|^2 / (|a|^2 |b|^2).
double chordal_distance_sq(const VectorXcd &a, const VectorXcd &b);

/// Angle-adaptive subspace codebook: codeword q = B_hat * r_q with B_hat the
/// steering matrix at the dequantized cascaded frequencies and r_q a
/// low-dimensional RVQ codeword.
class SubspaceCodebook {
public:
    SubspaceCodebook(MatrixXcd steering, MatrixXcd base);

    int size() const { return static_cast<int>(base_.cols()); }
    const MatrixXcd &steering() const { return steering_; }
    VectorXcd codeword(int q) const;

    /// Replaces codeword q by an explicit vector (genie/test hook).
    void plant(int q, VectorXcd direction);

    /// Exhaustive chordal-distance argmin over all codewords, ties toward
    /// the lowest index. Rejects zero-norm columns.
    int select(const VectorXcd &column) const;

private:
    MatrixXcd steering_;  // N x L2
    MatrixXcd base_;      // L2 x 2^B
    MatrixXcd gram_;      // steering^H steering, cached
    std::vector<std::pair<int, VectorXcd>> planted_;
};

inline int select_codeword(const VectorXcd &column, const SubspaceCodebook &cb) {
    return cb.select(column);
}

/// Bit accounting for one user's payload and its amortization over the
/// angle coherence time.
OverheadReport overhead(const SystemConfig &cfg);

/// Wire format: 1 flags byte (bit 0 = step1 present), then a packed
/// MSB-first bit stream step1 | step2 | step3, zero-padded to a byte.
std::vector<std::uint8_t> serialize_payload(const FeedbackPayload &p, const SystemConfig &cfg);
FeedbackPayload parse_payload(const std::vector<std::uint8_t> &bytes, const SystemConfig &cfg);

/// UE-side encoding and BS-side reconstruction for the three-step protocol.
/// Both sides share the config and the pre-agreed RVQ codebook seed.
class FeedbackCodec {
public:
    FeedbackCodec(SystemConfig cfg, std::uint64_t codebook_seed);

    const AodDictionary &dictionary() const { return dict_; }
    const MatrixXcd &rvq_base() const { return rvq_base_; }

    struct Encoded {
        FeedbackPayload payload;
        // Genie least-squares coefficient of the true hybrid column on the
        // selected codeword direction, one per column (not fed back).
        std::vector<std::complex<double>> column_coeffs;
        HybridChannel hybrid;  // true hybrid columns, kept for diagnostics
    };

    /// Encodes one user's channel given the shared column support.
    /// basis_override, when non-null, replaces the dictionary columns at the
    /// support for the hybrid extraction (perfect-AoD variant).
    Encoded encode(const CascadedChannel &ch, const PathSet &paths, int user,
                   const std::vector<int> &support, bool appointed,
                   const MatrixXcd *basis_override = nullptr) const;

    SubspaceCodebook column_codebook(const QuantizedAngles &q, int column) const;

    /// Reconstructs every user's N x M channel from the payloads and the
    /// genie column coefficients. basis_override, when non-null, replaces
    /// the dictionary columns at the shared support (perfect-AoD variant).
    std::vector<MatrixXcd> decode(const std::vector<FeedbackPayload> &payloads,
                                  const std::vector<std::vector<std::complex<double>>> &coeffs,
                                  const MatrixXcd *basis_override = nullptr) const;

private:
    SystemConfig cfg_;
    AodDictionary dict_;
    MatrixXcd rvq_base_;  // L2 x 2^B
};

} // namespace risfb

#endif
