#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <variant>
#include <vector>

#include "gbh/core.hpp"
#include "gbh/procedure.hpp"

namespace gbh {

/// Factor model with group-level and within-group Bernoulli hidden states.
struct OneWaySimConfig {
    std::size_t m = 50;
    std::size_t n = 100;
    double pi_dot = 0.0;  ///< probability a group carries no signal
    double pi = 0.5;      ///< within active groups, probability of a null
    double mu = 3.0;
    double rho = 0.0;  ///< common within-group correlation
    /// Optional per-group correlations; overrides `rho` when non-empty.
    std::vector<double> rho_per_group;

    void validate() const;
};

/// Two-way (p = 1) or three-way tensor (p > 1) model with Kronecker
/// equicorrelated covariance.
struct TwoWaySimConfig {
    std::size_t m = 50;
    std::size_t n = 100;
    std::size_t p = 1;
    double pi_r = 0.0;
    double pi_c = 0.0;
    double pi_rc = 0.5;
    double mu = 3.0;
    double rho_r = 0.0;
    double rho_c = 0.0;
    double rho_p = 0.0;  ///< ignored when p = 1

    void validate() const;
};

using SimConfig = std::variant<OneWaySimConfig, TwoWaySimConfig>;

struct SimSample {
    PValueSet pvalues;
    TruthMask truth;
};

/// Upper-tail normal p-value 1 - Phi(x).
double upper_tail_pvalue(double x) noexcept;

/// Independent per-replication seed derived from a master seed by a
/// counter-based mix, so replications can run in any order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) noexcept;

SimSample gen_oneway(const OneWaySimConfig& cfg, std::uint64_t seed);
SimSample gen_twoway(const TwoWaySimConfig& cfg, std::uint64_t seed);
SimSample generate(const SimConfig& cfg, std::uint64_t seed);

double expected_pi0(const OneWaySimConfig& cfg);
double expected_pi0(const TwoWaySimConfig& cfg);
double expected_pi0(const SimConfig& cfg);

/// Layout produced by the generator for this configuration.
Layout sim_layout(const SimConfig& cfg);

struct SimSummary {
    std::string procedure;
    SimConfig config;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    double fdr_hat = 0.0;
    double se_fdr = 0.0;
    double power_hat = 0.0;
    double se_power = 0.0;
    /// Mean realized null fraction, for checking the hidden-state model.
    double null_fraction_hat = 0.0;
    std::vector<double> fdp_per_rep;
    std::vector<double> power_per_rep;
};

/// Any rule mapping data to rejections. The truth mask is passed so oracle
/// rules can read the realized proportions; data-driven rules ignore it.
using ProcedureFn = std::function<RejectionSet(const PValueSet&, const TruthMask&)>;

struct ReplicationOptions {
    std::size_t reps = 200;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    /// 0 selects std::thread::hardware_concurrency().
    std::size_t threads = 0;
};

/// Runs every procedure on the same simulated datasets.
std::vector<SimSummary> run_replications(const std::vector<std::pair<std::string, ProcedureFn>>& procs,
                                         const SimConfig& cfg, const ReplicationOptions& opts);

std::vector<SimSummary> run_replications(const std::vector<ProcedureSpec>& procs, const SimConfig& cfg,
                                         const ReplicationOptions& opts);

SimSummary run_replications(const ProcedureSpec& proc, const SimConfig& cfg, std::size_t reps, double alpha,
                            std::uint64_t seed);

/// Adapts a ProcedureSpec into a ProcedureFn; OracleGBH without proportions
/// reads them from the truth mask.
ProcedureFn as_procedure_fn(ProcedureSpec proc, double alpha);

/// Mean and standard error (sample sd / sqrt(n)); se is 0 for a single value.
std::pair<double, double> mean_and_se(const std::vector<double>& values);

}  // namespace gbh
