#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lasim/channel.hpp"

using namespace lasim;

namespace {

ScenarioConfig pedestrian_cfg() {
    ScenarioConfig s;
    s.kind = ChannelKind::fading;
    s.relative_speed_mps = 3.0 / 3.6;
    TapProfile p = itu_pedestrian_a();
    s.tap_delays_s = p.delays_s;
    s.tap_powers_db = p.powers_db;
    return s;
}

ScenarioConfig vehicular_cfg() {
    ScenarioConfig s;
    s.kind = ChannelKind::fading;
    s.relative_speed_mps = 30.0 / 3.6;
    TapProfile p = itu_vehicular_b();
    s.tap_delays_s = p.delays_s;
    s.tap_powers_db = p.powers_db;
    return s;
}

Olm flat_olm(double p) { return Olm({0.0}, {{p}, {p * 0.5}}); }

McsTable small_table() { return McsTable({{1, 4, 0.5, 0.0}, {2, 16, 0.5, 0.0}}); }

}  // namespace

TEST_CASE("normalized doppler matches the quoted operating points") {
    ScenarioConfig ped = pedestrian_cfg();
    const double gamma_ped = normalized_doppler(ped);
    CHECK(gamma_ped == doctest::Approx(0.3e-4).epsilon(0.02));

    ScenarioConfig veh = vehicular_cfg();
    const double gamma_veh = normalized_doppler(veh);
    CHECK(gamma_veh == doctest::Approx(3.0e-4).epsilon(0.02));

    ScenarioConfig still = pedestrian_cfg();
    still.relative_speed_mps = 0.0;
    CHECK(normalized_doppler(still) == 0.0);

    // the formula itself: (f_c * dv / c) * T_s
    ScenarioConfig direct;
    direct.carrier_freq_hz = 299792458.0;  // f_c = c
    direct.relative_speed_mps = 2.0;
    direct.doppler_ref_interval_s = 0.25;
    CHECK(normalized_doppler(direct) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("awgn realization is flat and exact") {
    ScenarioConfig s;
    s.kind = ChannelKind::awgn;
    s.mean_snr_db = 10.0;
    Rng rng(7);
    ChannelRealization real = realize_fading(s, 50, rng);
    for (int t = 0; t < 50; ++t) {
        CHECK(real.theta_eff_db[t] == 10.0);
        for (double v : real.subcarrier_sinr[t]) CHECK(v == real.subcarrier_sinr[t][0]);
    }
}

TEST_CASE("static frequency-selective realization is frozen in time") {
    ScenarioConfig s = vehicular_cfg();
    s.kind = ChannelKind::freq_selective_static;
    s.relative_speed_mps = 0.0;
    Rng rng(3);
    ChannelRealization real = realize_fading(s, 40, rng);
    for (int t = 1; t < 40; ++t) {
        CHECK(real.theta_eff_db[t] == real.theta_eff_db[0]);
        CHECK(real.subcarrier_sinr[t] == real.subcarrier_sinr[0]);
    }
    // different seeds draw different realizations
    Rng rng2(4);
    ChannelRealization other = realize_fading(s, 1, rng2);
    CHECK(other.theta_eff_db[0] != real.theta_eff_db[0]);
    // frequency selectivity: subcarriers differ within a TTI
    const auto& sc = real.subcarrier_sinr[0];
    CHECK(*std::max_element(sc.begin(), sc.end()) > 1.5 * *std::min_element(sc.begin(), sc.end()));
}

TEST_CASE("tap powers normalize to unit total") {
    ScenarioConfig s = vehicular_cfg();
    ChannelModel model(s);
    double total = 0.0;
    for (double p : model.tap_powers_linear()) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fading ensemble mean recovers the configured SNR") {
    ScenarioConfig s = vehicular_cfg();
    s.mean_snr_db = 10.0;
    ChannelModel model(s);
    const double want = std::pow(10.0, 1.0);

    double acc = 0.0;
    std::int64_t n = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Rng rng(seed);
        ChannelRealization real = model.realize(1250, rng);
        for (const auto& sc : real.subcarrier_sinr) {
            for (double v : sc) {
                CHECK(v >= 0.0);
                acc += v;
            }
            n += static_cast<std::int64_t>(sc.size());
        }
    }
    CHECK(acc / n == doctest::Approx(want).epsilon(0.05));
}

TEST_CASE("sum-of-sinusoids lag-1 autocorrelation tracks the Bessel model") {
    ScenarioConfig s = vehicular_cfg();
    const double fd = s.carrier_freq_hz * s.relative_speed_mps / 299792458.0;
    const double want = std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * fd * s.tti_duration_s);

    const int ttis = 100000;
    Rng rng(11);
    auto series = realize_tap_gain_series(s, ttis, rng);

    auto lag1 = [&](auto component) {
        double mean = 0.0;
        for (const auto& g : series) mean += component(g);
        mean /= ttis;
        double num = 0.0, den = 0.0;
        for (int t = 0; t < ttis; ++t) {
            const double d = component(series[t]) - mean;
            den += d * d;
            if (t + 1 < ttis) num += d * (component(series[t + 1]) - mean);
        }
        return num / den;
    };
    const double rho_re = lag1([](const std::pair<double, double>& g) { return g.first; });
    const double rho_im = lag1([](const std::pair<double, double>& g) { return g.second; });
    CHECK(std::abs(rho_re - want) < 0.02);
    CHECK(std::abs(rho_im - want) < 0.02);

    // unit power per tap
    double power = 0.0;
    for (const auto& g : series) power += g.first * g.first + g.second * g.second;
    CHECK(power / ttis == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("effective sinr: fixed point, frozen example, symmetry, bounds") {
    // constant vector is a fixed point
    CHECK(effective_sinr(std::vector<double>(7, 2.5), 1.0) ==
          doctest::Approx(10.0 * std::log10(2.5)).epsilon(1e-12));

    // theta = (1, 1, 4), beta = 1
    const double expected_linear = 1.380876370001407;
    const double got = effective_sinr({1.0, 1.0, 4.0}, 1.0);
    CHECK(got == doctest::Approx(10.0 * std::log10(expected_linear)).epsilon(1e-12));
    CHECK(got == doctest::Approx(1.4015479789099032).epsilon(1e-9));

    // permutation invariance
    CHECK(effective_sinr({4.0, 1.0, 1.0}, 1.0) == got);
    CHECK(effective_sinr({1.0, 4.0, 1.0}, 1.0) == got);

    // lies between min and max (in dB), random vectors
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.01, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(12);
        for (double& x : v) x = u(rng);
        const double eff = effective_sinr(v, 1.0);
        const double lo = 10.0 * std::log10(*std::min_element(v.begin(), v.end()));
        const double hi = 10.0 * std::log10(*std::max_element(v.begin(), v.end()));
        CHECK(eff >= lo - 1e-9);
        CHECK(eff <= hi + 1e-9);
    }

    CHECK_THROWS_AS(effective_sinr({}, 1.0), ConfigError);
    CHECK_THROWS_AS(effective_sinr({1.0}, 0.0), ConfigError);
}

TEST_CASE("draw_ack follows the looked-up probability") {
    McsTable table = small_table();
    Rng rng(123);

    Olm sure = flat_olm(1.0);
    Olm dead(std::vector<double>{0.0}, {{0.0}, {0.0}});
    for (int i = 0; i < 1000; ++i) {
        CHECK(draw_ack(sure, 1, 0.0, rng));
        CHECK_FALSE(draw_ack(dead, 1, 0.0, rng));
    }

    Olm point3(std::vector<double>{0.0}, {{0.3}, {0.1}});
    std::int64_t acks = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) acks += draw_ack(point3, 1, 0.0, rng) ? 1 : 0;
    CHECK(double(acks) / n == doctest::Approx(0.3).epsilon(0.0167));  // +-0.005 absolute
}

TEST_CASE("cqi generation is the receiver-optimal mcs with delivery delay") {
    McsTable table = small_table();
    Olm olm(std::vector<double>{-5.0, 0.0, 5.0}, {{0.1, 0.9, 0.99}, {0.0, 0.2, 0.9}});

    CqiReport low = generate_cqi(olm, table, -5.0, 10, 4);
    CHECK(low.cqi_index == 1);
    CHECK(low.generated_at == 10);
    CHECK(low.available_at == 14);

    CqiReport at80 = generate_cqi(olm, table, 5.0, 80, 4);
    CHECK(at80.generated_at == 80);
    CHECK(at80.available_at == 84);
    CHECK(at80.cqi_index == 2);  // 2*0.9 > 1*0.99

    // deterministic for identical inputs
    CqiReport again = generate_cqi(olm, table, 5.0, 80, 4);
    CHECK(again.cqi_index == at80.cqi_index);

    CHECK_THROWS_AS(generate_cqi(olm, table, 0.0, 1, -1), ConfigError);
}

TEST_CASE("scenario validation catches malformed tap lists") {
    ScenarioConfig s = pedestrian_cfg();
    s.tap_delays_s.clear();
    s.tap_powers_db.clear();
    CHECK_THROWS_AS(ChannelModel{s}, ConfigError);

    ScenarioConfig mismatch = pedestrian_cfg();
    mismatch.tap_powers_db.pop_back();
    CHECK_THROWS_AS(ChannelModel{mismatch}, ConfigError);

    ScenarioConfig bad_fft = pedestrian_cfg();
    bad_fft.fft_size = 10;
    CHECK_THROWS_AS(ChannelModel{bad_fft}, ConfigError);
}

TEST_CASE("channel csv export") {
    ScenarioConfig s;
    s.kind = ChannelKind::awgn;
    s.mean_snr_db = 7.0;
    Rng rng(1);
    ChannelRealization real = realize_fading(s, 3, rng);
    std::stringstream ss;
    write_channel_csv(real, ss);
    CHECK(ss.str() == "tti,theta_eff_db\n1,7\n2,7\n3,7\n");
}
