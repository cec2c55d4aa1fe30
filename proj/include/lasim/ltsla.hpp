#pragma once

#include <utility>
#include <vector>

#include "lasim/channel.hpp"
#include "lasim/mcs_olm.hpp"
#include "lasim/rng.hpp"

namespace lasim {

// Discretized belief over the latent SINR: probability mass on K uniformly
// spaced dB bins. Every public operation leaves the mass normalized.
struct SinrPmf {
    std::vector<double> bin_centers;
    std::vector<double> probs;

    double spacing_db() const { return bin_centers[1] - bin_centers[0]; }
    int num_bins() const { return static_cast<int>(bin_centers.size()); }
};

enum class BeliefUpdate {
    ok,
    collapsed_reset,  // all-zero likelihood against the supported bins; belief reset to uniform
};

SinrPmf pmf_init_uniform(const SinrGrid& grid);

// Prior from a recent channel report: Normal density at the bin centers,
// renormalized. Evaluated in log space so a near-delta std stays well defined.
SinrPmf pmf_init_cqi(const SinrGrid& grid, double theta_cqi_db, double std_db);

double pmf_mean(const SinrPmf& pmf);
double pmf_variance(const SinrPmf& pmf);

// Inverse-transform sample: the first bin whose cumulative mass exceeds u.
// Zero-probability bins are never selected.
double its_sample(const SinrPmf& pmf, double u);

// min(ITS sample, mean): underestimates rather than overshoots, since
// overshooting an MCS waterfall is the costlier error.
double pessimistic_estimate(const SinrPmf& pmf, Rng& rng);

// (selected MCS, SINR estimate used for the selection)
std::pair<int, double> ltsla_propose(const SinrPmf& pmf, const Olm& tx_olm, const McsTable& table,
                                     Rng& rng);

// Bayesian HARQ update: per bin, likelihood ack*G(m,theta) + (1-ack)*(1-G(m,theta)),
// self-normalized. A fully inconsistent observation collapses the belief and
// resets it to uniform.
BeliefUpdate ltsla_update(SinrPmf& pmf, const Olm& tx_olm, int mcs, bool ack);

// Relax the belief for channel drift: discrete convolution with a Normal
// kernel sampled at bin-spacing offsets, truncated at +-6 sigma and
// renormalized; mass leaving the grid is reflected at the edges.
void pmf_relax(SinrPmf& pmf, double sigma2);

// sigma^2 = scale * gamma.
double sigma2_from_doppler(double gamma, double scale);

// Soft fusion of a CQI report: multiply by a Normal likelihood centered at
// the CQI-implied SINR and renormalize.
BeliefUpdate ltsla_absorb_cqi(SinrPmf& pmf, const CqiReport& report, const Olm& tx_olm,
                              const McsTable& table, double std_db);

}  // namespace lasim
