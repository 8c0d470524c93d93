// SPDX-License-Identifier: Apache-2.0
#ifndef RISFB_HARNESS_HPP
#define RISFB_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "risfb/config.hpp"

namespace risfb {

enum class Scheme {
    proposed,            // full three-step codec
    conventional,        // surrogate: full-dimension RVQ per column
    perfect_csit,        // BS beamforms on the true channels
    proposed_perfect_aod // step 1 with exact AoDs, no grid snapping
};

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string &name);

enum class SweepAxis { codeword_bits, grid_resolution };

std::string axis_name(SweepAxis a);

struct SweepSpec {
    SweepAxis axis = SweepAxis::codeword_bits;
    std::vector<int> values;
    int trials = 500;
    SystemConfig base;
    CeoParams ceo;
    std::vector<Scheme> schemes;
};

struct ResultRow {
    std::string scheme;
    std::string axis;
    int axis_value = 0;
    double per_user_bits = 0.0;
    double mean_rate = 0.0;
    double std_error = 0.0;
    int trials = 0;
    std::uint64_t seed = 0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

struct PointResult {
    double mean_rate = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of the true per-user rate for one scheme and
/// operating point. Per-trial seeds derive from (cfg.rng_seed, trial index),
/// so results are identical regardless of thread count. threads = 0 picks
/// RIS_SIM_THREADS or the hardware concurrency.
PointResult run_point(const SystemConfig &cfg, Scheme scheme, int trials,
                      const CeoParams &ceo, int threads = 0);

/// Cartesian run of schemes x axis values; rows sorted by (scheme, value).
/// perfect_csit has no feedback axis and contributes a single row.
ResultTable sweep(const SweepSpec &spec, int threads = 0);

/// CSV: scheme,axis,axis_value,per_user_bits,mean_rate,stderr,trials,seed
/// with floats at 6 significant digits.
void write_csv(const ResultTable &table, std::ostream &os);

} // namespace risfb

#endif
