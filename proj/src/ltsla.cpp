#include "lasim/ltsla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lasim {

namespace {

void renormalize(std::vector<double>& probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    for (double& p : probs) p /= total;
}

// true when the posterior mass underflowed away entirely
bool apply_likelihood(SinrPmf& pmf, const std::vector<double>& likelihood) {
    double total = 0.0;
    for (int k = 0; k < pmf.num_bins(); ++k) {
        pmf.probs[k] *= likelihood[k];
        total += pmf.probs[k];
    }
    if (!(total >= std::numeric_limits<double>::min())) return true;
    for (double& p : pmf.probs) p /= total;
    return false;
}

void reset_uniform(SinrPmf& pmf) {
    const double p = 1.0 / pmf.num_bins();
    std::fill(pmf.probs.begin(), pmf.probs.end(), p);
}

}  // namespace

SinrPmf pmf_init_uniform(const SinrGrid& grid) {
    SinrPmf pmf;
    pmf.bin_centers = grid.centers();
    pmf.probs.assign(pmf.bin_centers.size(), 1.0 / pmf.bin_centers.size());
    return pmf;
}

SinrPmf pmf_init_cqi(const SinrGrid& grid, double theta_cqi_db, double std_db) {
    if (!(std_db > 0.0)) throw ConfigError("ltsla cqi prior: std must be > 0");
    SinrPmf pmf;
    pmf.bin_centers = grid.centers();
    pmf.probs.resize(pmf.bin_centers.size());
    // log-domain so that a near-zero std concentrates on the nearest bin
    // instead of underflowing everywhere
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(pmf.num_bins());
    for (int k = 0; k < pmf.num_bins(); ++k) {
        const double d = pmf.bin_centers[k] - theta_cqi_db;
        logs[k] = -d * d / (2.0 * std_db * std_db);
        max_log = std::max(max_log, logs[k]);
    }
    for (int k = 0; k < pmf.num_bins(); ++k) pmf.probs[k] = std::exp(logs[k] - max_log);
    renormalize(pmf.probs);
    return pmf;
}

double pmf_mean(const SinrPmf& pmf) {
    double mean = 0.0;
    for (int k = 0; k < pmf.num_bins(); ++k) mean += pmf.probs[k] * pmf.bin_centers[k];
    return mean;
}

double pmf_variance(const SinrPmf& pmf) {
    const double mean = pmf_mean(pmf);
    double var = 0.0;
    for (int k = 0; k < pmf.num_bins(); ++k) {
        const double d = pmf.bin_centers[k] - mean;
        var += pmf.probs[k] * d * d;
    }
    return var;
}

double its_sample(const SinrPmf& pmf, double u) {
    double cum = 0.0;
    int last_supported = 0;
    for (int k = 0; k < pmf.num_bins(); ++k) {
        if (pmf.probs[k] > 0.0) last_supported = k;
        cum += pmf.probs[k];
        if (cum > u) return pmf.bin_centers[k];
    }
    // u landed beyond the floating-point total; highest supported bin
    return pmf.bin_centers[last_supported];
}

double pessimistic_estimate(const SinrPmf& pmf, Rng& rng) {
    return std::min(its_sample(pmf, uniform01(rng)), pmf_mean(pmf));
}

std::pair<int, double> ltsla_propose(const SinrPmf& pmf, const Olm& tx_olm, const McsTable& table,
                                     Rng& rng) {
    const double theta_hat = pessimistic_estimate(pmf, rng);
    return {select_mcs(tx_olm, table, theta_hat), theta_hat};
}

BeliefUpdate ltsla_update(SinrPmf& pmf, const Olm& tx_olm, int mcs, bool ack) {
    std::vector<double> likelihood(pmf.num_bins());
    for (int k = 0; k < pmf.num_bins(); ++k) {
        const double g = olm_lookup(tx_olm, mcs, pmf.bin_centers[k]);
        likelihood[k] = ack ? g : 1.0 - g;
    }
    if (apply_likelihood(pmf, likelihood)) {
        reset_uniform(pmf);
        return BeliefUpdate::collapsed_reset;
    }
    return BeliefUpdate::ok;
}

void pmf_relax(SinrPmf& pmf, double sigma2) {
    if (sigma2 < 0.0) throw ConfigError("ltsla.sigma2: must be >= 0");
    if (sigma2 == 0.0) return;
    const double spacing = pmf.spacing_db();
    const double sigma = std::sqrt(sigma2);
    const int half = static_cast<int>(std::ceil(6.0 * sigma / spacing));

    std::vector<double> kernel(2 * half + 1);
    double ksum = 0.0;
    for (int j = -half; j <= half; ++j) {
        const double x = j * spacing;
        kernel[j + half] = std::exp(-x * x / (2.0 * sigma2));
        ksum += kernel[j + half];
    }
    for (double& w : kernel) w /= ksum;

    const int k_bins = pmf.num_bins();
    std::vector<double> out(k_bins, 0.0);
    for (int i = 0; i < k_bins; ++i) {
        const double p = pmf.probs[i];
        if (p == 0.0) continue;
        for (int j = -half; j <= half; ++j) {
            int idx = i + j;
            // mirror at the grid edges; conserves mass
            while (idx < 0 || idx >= k_bins) idx = idx < 0 ? -idx - 1 : 2 * k_bins - idx - 1;
            out[idx] += p * kernel[j + half];
        }
    }
    renormalize(out);
    pmf.probs = std::move(out);
}

double sigma2_from_doppler(double gamma, double scale) {
    if (gamma < 0.0) throw ConfigError("ltsla: normalized doppler must be >= 0");
    if (!(scale > 0.0)) throw ConfigError("ltsla.doppler_scale: must be > 0");
    return scale * gamma;
}

BeliefUpdate ltsla_absorb_cqi(SinrPmf& pmf, const CqiReport& report, const Olm& tx_olm,
                              const McsTable& table, double std_db) {
    if (!(std_db > 0.0)) throw ConfigError("ltsla.cqi_std_db: must be > 0");
    const double theta_cqi = cqi_to_sinr(tx_olm, table, report.cqi_index);
    std::vector<double> likelihood(pmf.num_bins());
    for (int k = 0; k < pmf.num_bins(); ++k) {
        const double d = pmf.bin_centers[k] - theta_cqi;
        likelihood[k] = std::exp(-d * d / (2.0 * std_db * std_db));
    }
    if (apply_likelihood(pmf, likelihood)) {
        reset_uniform(pmf);
        return BeliefUpdate::collapsed_reset;
    }
    return BeliefUpdate::ok;
}

}  // namespace lasim
