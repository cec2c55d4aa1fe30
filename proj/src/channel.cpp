#include "lasim/channel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

namespace lasim {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Zheng-Xiao style sum-of-sinusoids Rayleigh tap: two quadrature components,
// each a sum of M cosines with quasi-uniform arrival angles and random phases.
struct SosTap {
    std::vector<double> omega_cos, omega_sin;  // rad/s per oscillator
    std::vector<double> phi, psi;
    double amplitude = 1.0;  // sqrt of tap power
    double norm = 1.0;       // sqrt(2/M) / sqrt(2)

    void init(int oscillators, double max_doppler_hz, double amp, Rng& rng) {
        std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
        const double wd = 2.0 * std::numbers::pi * max_doppler_hz;
        const double theta = u(rng);
        omega_cos.resize(oscillators);
        omega_sin.resize(oscillators);
        phi.resize(oscillators);
        psi.resize(oscillators);
        for (int n = 0; n < oscillators; ++n) {
            const double alpha =
                (2.0 * std::numbers::pi * (n + 1) - std::numbers::pi + theta) / (4.0 * oscillators);
            omega_cos[n] = wd * std::cos(alpha);
            omega_sin[n] = wd * std::sin(alpha);
            phi[n] = u(rng);
            psi[n] = u(rng);
        }
        amplitude = amp;
        norm = std::sqrt(2.0 / oscillators) / std::sqrt(2.0);
    }

    // Complex gain at absolute time t; E[|gain|^2] = amplitude^2.
    std::pair<double, double> eval(double t) const {
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < omega_cos.size(); ++n) {
            re += std::cos(omega_cos[n] * t + phi[n]);
            im += std::cos(omega_sin[n] * t + psi[n]);
        }
        return {amplitude * norm * re, amplitude * norm * im};
    }
};

}  // namespace

TapProfile itu_pedestrian_a() {
    return TapProfile{{0.0, 110e-9, 190e-9, 410e-9}, {0.0, -9.7, -19.2, -22.8}};
}

TapProfile itu_vehicular_b() {
    return TapProfile{{0.0, 300e-9, 8900e-9, 12900e-9, 17100e-9, 20000e-9},
                      {-2.5, 0.0, -12.8, -10.0, -25.2, -16.0}};
}

void ScenarioConfig::validate() const {
    if (num_subcarriers < 1) throw ConfigError("scenario.num_subcarriers: must be >= 1");
    if (fft_size < num_subcarriers)
        throw ConfigError("scenario.fft_size: must be >= num_subcarriers");
    if (!(subcarrier_spacing_hz > 0)) throw ConfigError("scenario.subcarrier_spacing_hz: must be > 0");
    if (!(tti_duration_s > 0)) throw ConfigError("scenario.tti_duration_s: must be > 0");
    if (!(carrier_freq_hz > 0)) throw ConfigError("scenario.carrier_freq_hz: must be > 0");
    if (relative_speed_mps < 0) throw ConfigError("scenario.relative_speed_mps: must be >= 0");
    if (!(eesm_beta > 0)) throw ConfigError("scenario.eesm_beta: must be > 0");
    if (!(doppler_ref_interval_s > 0))
        throw ConfigError("scenario.doppler_ref_interval_s: must be > 0");
    if (sos_oscillators < 8) throw ConfigError("scenario.sos_oscillators: must be >= 8");
    if (kind != ChannelKind::awgn) {
        if (tap_delays_s.empty()) throw ConfigError("scenario.tap_delays_s: empty tap list");
        if (tap_delays_s.size() != tap_powers_db.size())
            throw ConfigError("scenario.tap_powers_db: length must match tap_delays_s");
    }
}

double normalized_doppler(const ScenarioConfig& cfg) {
    if (cfg.relative_speed_mps < 0) throw ConfigError("scenario.relative_speed_mps: must be >= 0");
    return (cfg.carrier_freq_hz * cfg.relative_speed_mps / kSpeedOfLight) *
           cfg.doppler_ref_interval_s;
}

double effective_sinr(const std::vector<double>& per_subcarrier_linear, double beta) {
    if (per_subcarrier_linear.empty()) throw ConfigError("effective_sinr: empty SINR vector");
    if (!(beta > 0)) throw ConfigError("effective_sinr: beta must be > 0");
    // log-sum-exp around the smallest SINR (largest exponent) to avoid
    // underflow; accumulate in sorted order so the result is invariant under
    // input permutation
    std::vector<double> sorted = per_subcarrier_linear;
    std::sort(sorted.begin(), sorted.end());
    const double m = sorted.front();
    double acc = 0.0;
    for (double s : sorted) acc += std::exp(-(s - m) / beta);
    double eff_linear = m - beta * std::log(acc / static_cast<double>(sorted.size()));
    eff_linear = std::max(eff_linear, 1e-30);
    return linear_to_db(eff_linear);
}

ChannelModel::ChannelModel(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    max_doppler_hz_ = cfg_.carrier_freq_hz * cfg_.relative_speed_mps / kSpeedOfLight;
    if (cfg_.kind == ChannelKind::awgn) return;

    double total = 0.0;
    for (double p : cfg_.tap_powers_db) total += db_to_linear(p);
    tap_powers_linear_.resize(cfg_.tap_powers_db.size());
    for (std::size_t i = 0; i < tap_powers_linear_.size(); ++i)
        tap_powers_linear_[i] = db_to_linear(cfg_.tap_powers_db[i]) / total;

    // Frequency response phase factors at the centered subcarriers of the
    // fft_size-point band: exp(-j 2 pi f_s tau_i).
    const int s_count = cfg_.num_subcarriers;
    twiddle_.assign(s_count, {});
    const int first_bin = (cfg_.fft_size - s_count) / 2;
    for (int s = 0; s < s_count; ++s) {
        const double f_s = (first_bin + s - cfg_.fft_size / 2) * cfg_.subcarrier_spacing_hz;
        twiddle_[s].resize(cfg_.tap_delays_s.size());
        for (std::size_t i = 0; i < cfg_.tap_delays_s.size(); ++i) {
            const double ang = -2.0 * std::numbers::pi * f_s * cfg_.tap_delays_s[i];
            twiddle_[s][i] = {std::cos(ang), std::sin(ang)};
        }
    }
}

ChannelRealization ChannelModel::realize(int num_ttis, Rng& rng) const {
    if (num_ttis < 1) throw ConfigError("realize: num_ttis must be >= 1");
    ChannelRealization out;
    out.subcarrier_sinr.resize(num_ttis);
    out.theta_eff_db.resize(num_ttis);

    const double snr_linear = db_to_linear(cfg_.mean_snr_db);

    if (cfg_.kind == ChannelKind::awgn) {
        for (int t = 0; t < num_ttis; ++t) {
            out.subcarrier_sinr[t].assign(cfg_.num_subcarriers, snr_linear);
            out.theta_eff_db[t] = cfg_.mean_snr_db;
        }
        return out;
    }

    std::vector<SosTap> taps(tap_powers_linear_.size());
    for (std::size_t i = 0; i < taps.size(); ++i)
        taps[i].init(cfg_.sos_oscillators, max_doppler_hz_, std::sqrt(tap_powers_linear_[i]), rng);

    const bool frozen = cfg_.kind == ChannelKind::freq_selective_static;
    std::vector<std::pair<double, double>> gains(taps.size());
    for (int t = 0; t < num_ttis; ++t) {
        if (t == 0 || !frozen) {
            const double time = t * cfg_.tti_duration_s;
            for (std::size_t i = 0; i < taps.size(); ++i) gains[i] = taps[i].eval(time);
        }
        auto& sinr = out.subcarrier_sinr[t];
        sinr.resize(cfg_.num_subcarriers);
        for (int s = 0; s < cfg_.num_subcarriers; ++s) {
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < gains.size(); ++i) {
                re += gains[i].first * twiddle_[s][i].first - gains[i].second * twiddle_[s][i].second;
                im += gains[i].first * twiddle_[s][i].second + gains[i].second * twiddle_[s][i].first;
            }
            sinr[s] = snr_linear * (re * re + im * im);
        }
        out.theta_eff_db[t] = effective_sinr(sinr, cfg_.eesm_beta);
    }
    return out;
}

ChannelRealization realize_fading(const ScenarioConfig& cfg, int num_ttis, Rng& rng) {
    return ChannelModel(cfg).realize(num_ttis, rng);
}

std::vector<std::pair<double, double>> realize_tap_gain_series(const ScenarioConfig& cfg,
                                                               int num_ttis, Rng& rng) {
    const double fd = cfg.carrier_freq_hz * cfg.relative_speed_mps / kSpeedOfLight;
    SosTap tap;
    tap.init(cfg.sos_oscillators, fd, 1.0, rng);
    std::vector<std::pair<double, double>> series(num_ttis);
    for (int t = 0; t < num_ttis; ++t) series[t] = tap.eval(t * cfg.tti_duration_s);
    return series;
}

bool draw_ack(const Olm& truth_olm, int mcs, double theta_eff_db, Rng& rng) {
    return uniform01(rng) < olm_lookup(truth_olm, mcs, theta_eff_db);
}

CqiReport generate_cqi(const Olm& truth_olm, const McsTable& table, double theta_eff_db,
                       int tti, int delay_ttis) {
    if (delay_ttis < 0) throw ConfigError("cqi.delay_ttis: must be >= 0");
    CqiReport r;
    r.generated_at = tti;
    r.available_at = tti + delay_ttis;
    r.cqi_index = select_mcs(truth_olm, table, theta_eff_db);
    return r;
}

void write_channel_csv(const ChannelRealization& real, std::ostream& out) {
    out << "tti,theta_eff_db\n";
    char buf[32];
    for (std::size_t t = 0; t < real.theta_eff_db.size(); ++t) {
        auto res = std::to_chars(buf, buf + sizeof(buf), real.theta_eff_db[t]);
        out << (t + 1) << ',' << std::string_view(buf, res.ptr - buf) << '\n';
    }
}

}  // namespace lasim
