// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "risfb/feedback.hpp"
#include "risfb/harness.hpp"

using namespace risfb;

namespace {

SweepSpec tiny_spec() {
    SweepSpec spec;
    spec.base.bs_antennas = 8;
    spec.base.ris_horizontal = 4;
    spec.base.ris_vertical = 4;
    spec.base.users = 2;
    spec.base.bs_ris_paths = 2;
    spec.base.ris_ue_paths = 1;
    spec.base.aod_grid = 64;
    spec.base.angle_bits = 4;
    spec.base.codeword_bits = 4;
    spec.base.rng_seed = 42;
    spec.ceo.population = 20;
    spec.ceo.iterations = 5;
    spec.trials = 5;
    spec.values = {2, 4};
    spec.schemes = {Scheme::proposed, Scheme::perfect_csit};
    return spec;
}

} // namespace

TEST_CASE("scheme names round trip") {
    for (Scheme s : {Scheme::proposed, Scheme::conventional, Scheme::perfect_csit,
                     Scheme::proposed_perfect_aod})
        CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_THROWS_AS(scheme_from_name("bogus"), std::invalid_argument);
    CHECK(axis_name(SweepAxis::codeword_bits) == "codeword_bits");
    CHECK(axis_name(SweepAxis::grid_resolution) == "grid_resolution");
}

TEST_CASE("run_point is deterministic and thread-count independent") {
    SweepSpec spec = tiny_spec();
    PointResult a = run_point(spec.base, Scheme::proposed, 4, spec.ceo, 1);
    PointResult b = run_point(spec.base, Scheme::proposed, 4, spec.ceo, 2);
    CHECK(a.mean_rate == b.mean_rate);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean_rate > 0.0);
    CHECK(a.std_error >= 0.0);
}

TEST_CASE("sweep emits sorted rows with one row for perfect CSIT") {
    SweepSpec spec = tiny_spec();
    ResultTable table = sweep(spec, 1);
    REQUIRE(table.rows.size() == 3);  // 2 proposed points + 1 perfect row

    CHECK(table.rows[0].scheme == "perfect_csit");
    CHECK(table.rows[0].axis_value == 0);
    CHECK(table.rows[0].per_user_bits == 0.0);
    CHECK(table.rows[1].scheme == "proposed");
    CHECK(table.rows[1].axis_value == 2);
    CHECK(table.rows[2].axis_value == 4);

    SystemConfig c2 = spec.base;
    c2.codeword_bits = 2;
    CHECK(table.rows[1].per_user_bits ==
          doctest::Approx(overhead(c2).per_user_amortized_bits));
    for (const auto &row : table.rows) {
        CHECK(row.trials == 5);
        CHECK(row.seed == 42);
        CHECK(row.mean_rate > 0.0);
    }

    spec.schemes.clear();
    CHECK(sweep(spec, 1).rows.empty());
}

TEST_CASE("grid-resolution axis overrides G_t") {
    SweepSpec spec = tiny_spec();
    spec.axis = SweepAxis::grid_resolution;
    spec.values = {32, 64};
    spec.schemes = {Scheme::proposed};
    ResultTable table = sweep(spec, 1);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].axis == "grid_resolution");
    CHECK(table.rows[0].axis_value == 32);
    // Step-1 bits depend on G_t, so the amortized overhead must differ.
    CHECK(table.rows[0].per_user_bits < table.rows[1].per_user_bits);
}

TEST_CASE("CSV header and formatting") {
    ResultTable table;
    table.rows.push_back({"proposed", "codeword_bits", 10, 52.1, 1.234567891, 0.01, 500, 1});
    std::ostringstream os;
    write_csv(table, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "scheme,axis,axis_value,per_user_bits,mean_rate,stderr,trials,seed");
    std::getline(in, line);
    CHECK(line == "proposed,codeword_bits,10,52.1,1.23457,0.01,500,1");
    CHECK(!std::getline(in, line));
}
