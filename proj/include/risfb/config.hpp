// SPDX-License-Identifier: Apache-2.0
#ifndef RISFB_CONFIG_HPP
#define RISFB_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace risfb {

/// Dimension, bit and grid parameters of one simulation setup.
/// Defaults follow the standard desk-scale operating point:
/// M=32 BS antennas, N=64 RIS elements (8x8), K=4 users, 5 dB SNR.
struct SystemConfig {
    int bs_antennas = 32;      // M
    int ris_horizontal = 8;    // N1
    int ris_vertical = 8;      // N2
    int users = 4;             // K
    int bs_ris_paths = 4;      // L1
    int ris_ue_paths = 2;      // L2

    double bs_spacing = 0.5;   // d_B / lambda
    double ris_spacing = 0.5;  // d_R / lambda

    double snr_db = 5.0;

    int aod_grid = 512;        // G_t, AoD resolution in sine space
    int angle_bits = 7;        // B0, bits per quantized frequency component
    int codeword_bits = 10;    // B, bits per codeword index

    int coherence_ratio = 10;          // angle / channel coherence time
    double step1_user_fraction = 0.25; // fraction of users repeating step 1

    // The direct BS-UE link is genie-known at the BS; zeroing it isolates
    // the cascaded-channel feedback scheme (the default here).
    bool include_direct = false;

    // Snap BS-RIS AoDs onto the sine grid when sampling (exact-recovery tests).
    bool on_grid_aod = false;

    std::uint64_t rng_seed = 1;

    int ris_elements() const { return ris_horizontal * ris_vertical; }
    double snr_linear() const;

    /// Throws std::invalid_argument on violated invariants.
    void validate() const;
};

/// Cross-entropy optimizer hyperparameters for the RIS phase search.
struct CeoParams {
    int population = 200;        // S
    double elite_fraction = 0.2; // rho
    int iterations = 30;         // T
    double smoothing = 0.7;      // lambda_s
    int phase_levels = 4;        // P
    std::uint64_t seed = 1;

    void validate() const;
};

} // namespace risfb

#endif
