#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lasim/mcs_olm.hpp"

using namespace lasim;

namespace {

Olm tiny_olm(std::vector<double> grid, std::vector<std::vector<double>> probs) {
    return Olm(std::move(grid), std::move(probs));
}

McsTable two_mcs_table() {
    // rates (1, 2): QPSK at code rate 1/2 and 16QAM at code rate 1/2
    return McsTable({{1, 4, 0.5, 0.0}, {2, 16, 0.5, 0.0}});
}

}  // namespace

TEST_CASE("mcs table computes data rates and validates ordering") {
    McsTable table = default_mcs_table();
    CHECK(table.size() == 15);
    for (int m = 1; m <= table.size(); ++m) {
        const McsEntry& e = table.entry(m);
        CHECK(e.data_rate == e.code_rate * std::log2(double(e.modulation_order)));
        if (m > 1) CHECK(table.rate(m) > table.rate(m - 1));
    }
    CHECK(table.rate(1) == doctest::Approx(0.15234375));
    CHECK(table.rate(15) == doctest::Approx(5.5546875));

    CHECK_THROWS_AS(McsTable({{1, 4, 0.5, 0.0}}), ConfigError);                     // M < 2
    CHECK_THROWS_AS(McsTable({{1, 4, 0.5, 0.0}, {3, 16, 0.6, 0.0}}), ConfigError);  // index gap
    CHECK_THROWS_AS(McsTable({{1, 16, 0.5, 0.0}, {2, 4, 0.5, 0.0}}), ConfigError);  // rate order
    CHECK_THROWS_AS(McsTable({{1, 4, 0.0, 0.0}, {2, 4, 0.5, 0.0}}), ConfigError);   // code rate
    CHECK_THROWS_AS(McsTable({{1, 3, 0.5, 0.0}, {2, 4, 0.6, 0.0}}), ConfigError);   // mod order
}

TEST_CASE("sigmoid olm evaluates the waterfall curves") {
    McsTable table = default_mcs_table();
    SinrGrid grid{-10.0, 20.0, 0.1};
    Olm olm = make_sigmoid_olm(table, default_midpoints_db(15), std::vector<double>(15, 2.5), grid);

    CHECK(olm.num_bins() == 301);
    CHECK(olm.num_mcs() == 15);

    // midpoints land on grid centers; the curve value there is exactly 1/2
    for (int m = 1; m <= 15; ++m) {
        const double mid = -8.0 + 2.0 * (m - 1);
        CHECK(olm_lookup(olm, m, mid) == doctest::Approx(0.5).epsilon(1e-12));
    }

    // slope 2, 3 dB above midpoint -> 1/(1+e^-6)
    Olm steep =
        make_sigmoid_olm(two_mcs_table(), {0.0, 5.0}, {2.0, 2.0}, SinrGrid{-10.0, 10.0, 0.5});
    CHECK(olm_lookup(steep, 1, 3.0) == doctest::Approx(0.9975273768433653).epsilon(1e-12));

    // far below the midpoint the curve decays toward zero, monotonically
    const auto& row = olm.row(15);
    CHECK(row.front() < 1e-10);
    for (std::size_t k = 1; k < row.size(); ++k) CHECK(row[k] >= row[k - 1]);

    CHECK_THROWS_AS(make_sigmoid_olm(two_mcs_table(), {5.0, 0.0}, {2.0, 2.0}, grid), ConfigError);
    CHECK_THROWS_AS(make_sigmoid_olm(two_mcs_table(), {0.0, 5.0}, {2.0, -1.0}, grid), ConfigError);
}

TEST_CASE("olm invariants: row and column monotonicity") {
    McsTable table = default_mcs_table();
    Olm olm = make_sigmoid_olm(table, default_midpoints_db(15), std::vector<double>(15, 2.5),
                               SinrGrid{-10.0, 20.0, 0.1});
    for (int m = 1; m <= olm.num_mcs(); ++m)
        for (int k = 0; k < olm.num_bins(); ++k) {
            if (k > 0) CHECK(olm.at(m, k) >= olm.at(m, k - 1));
            if (m > 1) CHECK(olm.at(m, k) <= olm.at(m - 1, k));
        }

    CHECK_THROWS_AS(tiny_olm({0.0, 1.0}, {{0.5, 0.4}}), ConfigError);              // row decreasing
    CHECK_THROWS_AS(tiny_olm({0.0, 1.0}, {{0.2, 0.3}, {0.4, 0.5}}), ConfigError);  // column
    CHECK_THROWS_AS(tiny_olm({1.0, 0.0}, {{0.2, 0.3}}), ConfigError);              // grid order
    CHECK_THROWS_AS(tiny_olm({0.0, 1.0}, {{0.2, 1.3}}), ConfigError);              // range
}

TEST_CASE("olm lookup hits bin centers, clamps, and quantizes") {
    Olm olm = tiny_olm({0.0, 1.0, 2.0}, {{0.1, 0.5, 0.9}});
    CHECK(olm_lookup(olm, 1, 1.0) == 0.5);     // exact center
    CHECK(olm_lookup(olm, 1, 100.0) == 0.9);   // clamp above
    CHECK(olm_lookup(olm, 1, -100.0) == 0.1);  // clamp below
    // two points inside the same bin give identical values
    CHECK(olm_lookup(olm, 1, 0.95) == olm_lookup(olm, 1, 1.2));
}

TEST_CASE("select_mcs maximizes expected throughput") {
    McsTable table = default_mcs_table();
    Olm olm = make_sigmoid_olm(table, default_midpoints_db(15), std::vector<double>(15, 2.5),
                               SinrGrid{-10.0, 20.0, 0.1});

    CHECK(select_mcs(olm, table, -10.0) == 1);  // everything fails; lowest index wins

    // all curves saturated -> highest rate
    Olm easy = make_sigmoid_olm(table, default_midpoints_db(15, -200.0, 1.0),
                                std::vector<double>(15, 2.5), SinrGrid{-10.0, 20.0, 0.1});
    CHECK(select_mcs(easy, table, 20.0) == 15);

    // M=2, rates (1,2), ack (0.9, 0.4): expected throughput (0.9, 0.8)
    McsTable small = two_mcs_table();
    Olm pair = tiny_olm({0.0}, {{0.9}, {0.4}});
    CHECK(select_mcs(pair, small, 0.0) == 1);
    CHECK(oracle_throughput(pair, small, 0.0) == doctest::Approx(0.9));
}

TEST_CASE("select_mcs properties: rate-scaling invariance and monotone sweep") {
    McsTable table = default_mcs_table();
    SinrGrid grid{-10.0, 20.0, 0.1};
    Olm olm = make_sigmoid_olm(table, default_midpoints_db(15), std::vector<double>(15, 2.5), grid);

    // scaling every code rate by the same factor rescales all data rates and
    // leaves the argmax unchanged
    for (double scale : {0.5, 0.1}) {
        std::vector<McsEntry> scaled;
        for (const McsEntry& e : table.entries())
            scaled.push_back({e.index, e.modulation_order, e.code_rate * scale, 0.0});
        McsTable scaled_table{std::move(scaled)};
        for (double theta = -10.0; theta <= 20.0; theta += 0.7)
            CHECK(select_mcs(olm, scaled_table, theta) == select_mcs(olm, table, theta));
    }

    int prev = 1;
    for (int k = 0; k < olm.num_bins(); ++k) {
        int m = select_mcs(olm, table, olm.grid()[k]);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("perturb_olm shifts curves along the SINR axis") {
    McsTable table = default_mcs_table();
    SinrGrid grid{-10.0, 20.0, 0.1};
    Olm olm = make_sigmoid_olm(table, default_midpoints_db(15), std::vector<double>(15, 2.5), grid);

    Olm same = perturb_olm(olm, 0.0);
    for (int m = 1; m <= 15; ++m)
        for (int k = 0; k < olm.num_bins(); ++k) CHECK(same.at(m, k) == olm.at(m, k));

    Olm shifted = perturb_olm(olm, 3.0);
    CHECK(olm_lookup(shifted, 5, 10.0) == olm_lookup(olm, 5, 7.0));
    // effective midpoints move up by the bias
    for (int m = 1; m <= 15; ++m) {
        const double mid = -8.0 + 2.0 * (m - 1) + 3.0;
        if (mid <= 20.0) CHECK(olm_lookup(shifted, m, mid) == doctest::Approx(0.5).epsilon(1e-9));
    }
}

TEST_CASE("cqi_to_sinr inverts select_mcs at the lowest selecting bin") {
    McsTable table = default_mcs_table();
    Olm olm = make_sigmoid_olm(table, default_midpoints_db(15), std::vector<double>(15, 2.5),
                               SinrGrid{-10.0, 20.0, 0.1});
    for (int cqi = 1; cqi <= 14; ++cqi) {
        const double theta = cqi_to_sinr(olm, table, cqi);
        CHECK(select_mcs(olm, table, theta) == cqi);
        for (double lower = -10.0; lower < theta - 1e-9; lower += 0.1)
            CHECK(select_mcs(olm, table, lower) != cqi);
    }
    // MCS 15 is never the argmax on this grid; fallback lands at the top edge
    CHECK(cqi_to_sinr(olm, table, 15) == 20.0);
}

TEST_CASE("olm csv round trip") {
    McsTable table = default_mcs_table();
    Olm olm = make_sigmoid_olm(table, default_midpoints_db(15), std::vector<double>(15, 2.5),
                               SinrGrid{-10.0, 20.0, 0.5});
    std::stringstream ss;
    write_olm_csv(olm, ss);
    Olm back = read_olm_csv(ss);
    REQUIRE(back.num_mcs() == olm.num_mcs());
    REQUIRE(back.num_bins() == olm.num_bins());
    for (int k = 0; k < olm.num_bins(); ++k) CHECK(back.grid()[k] == olm.grid()[k]);
    for (int m = 1; m <= olm.num_mcs(); ++m)
        for (int k = 0; k < olm.num_bins(); ++k) CHECK(back.at(m, k) == olm.at(m, k));

    std::stringstream bad("1.0,2.0\n");
    CHECK_THROWS_AS(read_olm_csv(bad), ConfigError);
}

TEST_CASE("mcs table json round trip") {
    McsTable table = default_mcs_table();
    McsTable back = mcs_table_from_json(mcs_table_to_json(table));
    REQUIRE(back.size() == table.size());
    for (int m = 1; m <= table.size(); ++m) {
        CHECK(back.entry(m).modulation_order == table.entry(m).modulation_order);
        CHECK(back.entry(m).code_rate == table.entry(m).code_rate);
        CHECK(back.entry(m).data_rate == table.entry(m).data_rate);
    }
    CHECK_THROWS_AS(mcs_table_from_json("{\"not\": \"an array\"}"), ConfigError);
}
