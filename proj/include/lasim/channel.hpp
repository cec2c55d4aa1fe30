#pragma once

#include <cstdint>
#include <vector>

#include "lasim/mcs_olm.hpp"
#include "lasim/rng.hpp"

namespace lasim {

enum class ChannelKind { awgn, freq_selective_static, fading };

// Tapped-delay-line power-delay profile.
struct TapProfile {
    std::vector<double> delays_s;
    std::vector<double> powers_db;
};

// ITU-R M.1225 reference profiles, shipped as config data.
TapProfile itu_pedestrian_a();
TapProfile itu_vehicular_b();

struct ScenarioConfig {
    ChannelKind kind = ChannelKind::awgn;
    double mean_snr_db = 10.0;
    int num_subcarriers = 72;
    int fft_size = 128;
    double subcarrier_spacing_hz = 15e3;
    double tti_duration_s = 1e-3;
    double carrier_freq_hz = 2e9;
    double relative_speed_mps = 0.0;
    std::vector<double> tap_delays_s;   // ignored for awgn
    std::vector<double> tap_powers_db;  // normalized to unit total power on model construction
    double eesm_beta = 1.0;
    // Channel-sampling interval used to express the normalized Doppler
    // gamma = (f_c * dv / c) * T_s; distinct from the TTI duration.
    double doppler_ref_interval_s = 5.4e-6;
    int sos_oscillators = 16;

    void validate() const;
};

// Per-TTI channel state: per-subcarrier SINRs (linear) and the effective
// SINR compressed through the EESM.
struct ChannelRealization {
    std::vector<std::vector<double>> subcarrier_sinr;  // [tti][subcarrier], linear
    std::vector<double> theta_eff_db;                  // [tti]
};

struct CqiReport {
    int generated_at = 0;  // TTI index
    int available_at = 0;  // generated_at + signaling delay
    int cqi_index = 0;     // 4-bit, in [0, 15]
};

// gamma = (f_c * dv / c) * T_s with c the speed of light and T_s the
// configured Doppler reference interval.
double normalized_doppler(const ScenarioConfig& cfg);

// Exponential effective SINR mapping of a linear per-subcarrier SINR vector,
// returned in dB. Equals the common value when all inputs are equal.
double effective_sinr(const std::vector<double>& per_subcarrier_linear, double beta);

// Block-fading tapped-delay-line generator: per tap a Jakes-style
// sum-of-sinusoids Rayleigh process sampled once per TTI, per-subcarrier SINR
// from the frequency response over the centered subcarriers of the
// fft_size-point band. Holds precomputed geometry; realizations draw fresh
// oscillator phases from the supplied RNG.
class ChannelModel {
public:
    explicit ChannelModel(ScenarioConfig cfg);

    ChannelRealization realize(int num_ttis, Rng& rng) const;

    const ScenarioConfig& config() const { return cfg_; }
    const std::vector<double>& tap_powers_linear() const { return tap_powers_linear_; }
    double max_doppler_hz() const { return max_doppler_hz_; }

private:
    ScenarioConfig cfg_;
    std::vector<double> tap_powers_linear_;  // sums to 1
    double max_doppler_hz_ = 0.0;
    // twiddle_[s][i]: frequency response phase factor of tap i at subcarrier s
    std::vector<std::vector<std::pair<double, double>>> twiddle_;  // (re, im)
};

// Convenience wrapper over ChannelModel for one-shot use.
ChannelRealization realize_fading(const ScenarioConfig& cfg, int num_ttis, Rng& rng);

// Complex gain series of a single unit-power tap at the scenario's Doppler,
// sampled once per TTI. Measurement hook for the fading statistics.
std::vector<std::pair<double, double>> realize_tap_gain_series(const ScenarioConfig& cfg,
                                                               int num_ttis, Rng& rng);

// Bernoulli HARQ outcome with success probability looked up in the
// ground-truth OLM. Stands in for bit-level decoding.
bool draw_ack(const Olm& truth_olm, int mcs, double theta_eff_db, Rng& rng);

// Receiver-side CQI: the MCS the truth OLM deems optimal at the measured
// effective SINR, delivered after the signaling delay.
CqiReport generate_cqi(const Olm& truth_olm, const McsTable& table, double theta_eff_db,
                       int tti, int delay_ttis);

// Debug export: "tti,theta_eff_db" rows.
void write_channel_csv(const ChannelRealization& real, std::ostream& out);

}  // namespace lasim
