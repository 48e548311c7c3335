#include "gbh/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace gbh {

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, std::string(name) + " must lie in [0,1]");
    }
}

void check_rho(double v, const char* name) {
    if (!(v >= 0.0 && v < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, std::string(name) + " must lie in [0,1)");
    }
}

void check_positive(std::size_t v, const char* name) {
    if (v == 0) throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::vector<double> normals(std::mt19937_64& rng, std::size_t count) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> out(count);
    for (auto& v : out) v = z(rng);
    return out;
}

std::vector<bool> bernoullis(std::mt19937_64& rng, std::size_t count, double success) {
    std::bernoulli_distribution b(success);
    std::vector<bool> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = b(rng);
    return out;
}

}  // namespace

void OneWaySimConfig::validate() const {
    check_positive(m, "m");
    check_positive(n, "n");
    check_unit(pi_dot, "pi_dot");
    check_unit(pi, "pi");
    if (!std::isfinite(mu)) throw Error(ErrorCode::InvalidConfig, "mu must be finite");
    check_rho(rho, "rho");
    if (!rho_per_group.empty()) {
        if (rho_per_group.size() != m) {
            throw Error(ErrorCode::InvalidConfig, "rho_per_group must have m entries");
        }
        for (double r : rho_per_group) check_rho(r, "rho_per_group");
    }
}

void TwoWaySimConfig::validate() const {
    check_positive(m, "m");
    check_positive(n, "n");
    check_positive(p, "p");
    check_unit(pi_r, "pi_r");
    check_unit(pi_c, "pi_c");
    check_unit(pi_rc, "pi_rc");
    if (!std::isfinite(mu)) throw Error(ErrorCode::InvalidConfig, "mu must be finite");
    check_rho(rho_r, "rho_r");
    check_rho(rho_c, "rho_c");
    check_rho(rho_p, "rho_p");
}

double upper_tail_pvalue(double x) noexcept { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(counter + 0x632BE59BD9B4E019ULL));
}

SimSample gen_oneway(const OneWaySimConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    const std::size_t m = cfg.m;
    const std::size_t n = cfg.n;

    const auto group_active = bernoullis(rng, m, 1.0 - cfg.pi_dot);
    std::vector<bool> signal(m * n, false);
    std::bernoulli_distribution within(1.0 - cfg.pi);
    for (std::size_t g = 0; g < m; ++g) {
        if (!group_active[g]) continue;
        for (std::size_t i = 0; i < n; ++i) signal[g * n + i] = within(rng);
    }

    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> pvals(m * n);
    std::vector<bool> is_null(m * n);
    for (std::size_t g = 0; g < m; ++g) {
        const double rho = cfg.rho_per_group.empty() ? cfg.rho : cfg.rho_per_group[g];
        const double shared = z(rng);
        const double a = std::sqrt(1.0 - rho);
        const double b = std::sqrt(rho);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = g * n + i;
            const double x = (signal[idx] ? cfg.mu : 0.0) + a * z(rng) + b * shared;
            pvals[idx] = upper_tail_pvalue(x);
            is_null[idx] = !signal[idx];
        }
    }
    Layout layout = Layout::one_way(std::vector<std::size_t>(m, n));
    return SimSample{PValueSet(layout, std::move(pvals)), TruthMask(layout, std::move(is_null))};
}

SimSample gen_twoway(const TwoWaySimConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    const std::size_t m = cfg.m;
    const std::size_t n = cfg.n;
    const std::size_t p = cfg.p;
    const std::size_t total = m * n * p;

    const auto cell_state = bernoullis(rng, total, 1.0 - cfg.pi_rc);
    const auto row_state = bernoullis(rng, m, 1.0 - cfg.pi_r);
    const auto col_state = bernoullis(rng, n, 1.0 - cfg.pi_c);

    std::vector<double> x(total, 0.0);
    std::vector<bool> is_null(total);
    for (std::size_t g = 0; g < m; ++g) {
        for (std::size_t h = 0; h < n; ++h) {
            for (std::size_t k = 0; k < p; ++k) {
                const std::size_t idx = (g * n + h) * p + k;
                const bool signal = cell_state[idx] && row_state[g] && col_state[h];
                is_null[idx] = !signal;
                x[idx] = signal ? cfg.mu : 0.0;
            }
        }
    }

    const double rr = cfg.rho_r;
    const double rc = cfg.rho_c;
    if (p == 1) {
        const auto z_mn = normals(rng, m * n);
        const auto z_m = normals(rng, m);
        const auto z_n = normals(rng, n);
        const double z_0 = normals(rng, 1).front();
        const double a = std::sqrt((1.0 - rr) * (1.0 - rc));
        const double b = std::sqrt((1.0 - rr) * rc);
        const double c = std::sqrt(rr * (1.0 - rc));
        const double d = std::sqrt(rr * rc);
        for (std::size_t g = 0; g < m; ++g) {
            for (std::size_t h = 0; h < n; ++h) {
                const std::size_t idx = g * n + h;
                x[idx] += a * z_mn[idx] + b * z_m[g] + c * z_n[h] + d * z_0;
            }
        }
    } else {
        // One independent factor per subset of modes along which the noise is
        // shared; a mode contributes rho when shared and 1 - rho otherwise.
        const double rp = cfg.rho_p;
        const double rho[3] = {rr, rc, rp};
        const std::size_t dims[3] = {m, n, p};
        for (unsigned shared = 0; shared < 8; ++shared) {
            double var = 1.0;
            std::size_t extent[3];
            for (int d = 0; d < 3; ++d) {
                const bool is_shared = (shared >> d) & 1U;
                var *= is_shared ? rho[d] : 1.0 - rho[d];
                extent[d] = is_shared ? 1 : dims[d];
            }
            const auto z = normals(rng, extent[0] * extent[1] * extent[2]);
            if (var == 0.0) continue;
            const double coef = std::sqrt(var);
            for (std::size_t g = 0; g < m; ++g) {
                const std::size_t zg = extent[0] == 1 ? 0 : g;
                for (std::size_t h = 0; h < n; ++h) {
                    const std::size_t zh = extent[1] == 1 ? 0 : h;
                    for (std::size_t k = 0; k < p; ++k) {
                        const std::size_t zk = extent[2] == 1 ? 0 : k;
                        x[(g * n + h) * p + k] += coef * z[(zg * extent[1] + zh) * extent[2] + zk];
                    }
                }
            }
        }
    }

    std::vector<double> pvals(total);
    for (std::size_t i = 0; i < total; ++i) pvals[i] = upper_tail_pvalue(x[i]);
    Layout layout = p == 1 ? Layout::two_way_one_per_cell(m, n)
                           : Layout::two_way_cells(m, n, std::vector<std::size_t>(m * n, p));
    return SimSample{PValueSet(layout, std::move(pvals)), TruthMask(layout, std::move(is_null))};
}

SimSample generate(const SimConfig& cfg, std::uint64_t seed) {
    return std::visit(
        [seed](const auto& c) {
            if constexpr (std::is_same_v<std::decay_t<decltype(c)>, OneWaySimConfig>) {
                return gen_oneway(c, seed);
            } else {
                return gen_twoway(c, seed);
            }
        },
        cfg);
}

double expected_pi0(const OneWaySimConfig& cfg) { return 1.0 - (1.0 - cfg.pi_dot) * (1.0 - cfg.pi); }

double expected_pi0(const TwoWaySimConfig& cfg) {
    return 1.0 - (1.0 - cfg.pi_rc) * (1.0 - cfg.pi_r) * (1.0 - cfg.pi_c);
}

double expected_pi0(const SimConfig& cfg) {
    return std::visit([](const auto& c) { return expected_pi0(c); }, cfg);
}

Layout sim_layout(const SimConfig& cfg) {
    if (const auto* one = std::get_if<OneWaySimConfig>(&cfg)) {
        return Layout::one_way(std::vector<std::size_t>(one->m, one->n));
    }
    const auto& two = std::get<TwoWaySimConfig>(cfg);
    if (two.p == 1) return Layout::two_way_one_per_cell(two.m, two.n);
    return Layout::two_way_cells(two.m, two.n, std::vector<std::size_t>(two.m * two.n, two.p));
}

std::pair<double, double> mean_and_se(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, sd / std::sqrt(n)};
}

ProcedureFn as_procedure_fn(ProcedureSpec proc, double alpha) {
    return [proc = std::move(proc), alpha](const PValueSet& p, const TruthMask& truth) {
        if (proc.kind == ProcedureKind::OracleGBH && !proc.oracle_props) {
            ProcedureSpec filled = proc;
            filled.oracle_props = null_proportions(truth);
            return run_procedure(p, filled, alpha);
        }
        return run_procedure(p, proc, alpha);
    };
}

std::vector<SimSummary> run_replications(const std::vector<std::pair<std::string, ProcedureFn>>& procs,
                                         const SimConfig& cfg, const ReplicationOptions& opts) {
    std::visit([](const auto& c) { c.validate(); }, cfg);
    if (opts.reps == 0) throw Error(ErrorCode::InvalidConfig, "reps must be >= 1");
    StepUpConfig{opts.alpha};

    const std::size_t reps = opts.reps;
    const std::size_t nproc = procs.size();
    std::vector<std::vector<double>> fdps(nproc, std::vector<double>(reps));
    std::vector<std::vector<double>> powers(nproc, std::vector<double>(reps));
    std::vector<double> null_frac(reps);

    auto run_one = [&](std::size_t rep) {
        const SimSample sample = generate(cfg, derive_seed(opts.seed, rep));
        null_frac[rep] = static_cast<double>(sample.truth.null_count()) / static_cast<double>(sample.truth.size());
        for (std::size_t j = 0; j < nproc; ++j) {
            const RejectionSet rej = procs[j].second(sample.pvalues, sample.truth);
            fdps[j][rep] = fdp(rej, sample.truth);
            powers[j][rep] = power(rej, sample.truth);
        }
    };

    std::size_t threads = opts.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : opts.threads;
    threads = std::min(threads, reps);
    if (threads <= 1) {
        for (std::size_t rep = 0; rep < reps; ++rep) run_one(rep);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (std::size_t t = 0; t < threads; ++t) {
                pool.emplace_back([&, t] {
                    try {
                        for (std::size_t rep = t; rep < reps; rep += threads) run_one(rep);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    std::vector<SimSummary> out;
    out.reserve(nproc);
    const double nf = mean_and_se(null_frac).first;
    for (std::size_t j = 0; j < nproc; ++j) {
        SimSummary s;
        s.procedure = procs[j].first;
        s.config = cfg;
        s.alpha = opts.alpha;
        s.seed = opts.seed;
        s.reps = reps;
        std::tie(s.fdr_hat, s.se_fdr) = mean_and_se(fdps[j]);
        std::tie(s.power_hat, s.se_power) = mean_and_se(powers[j]);
        s.null_fraction_hat = nf;
        s.fdp_per_rep = std::move(fdps[j]);
        s.power_per_rep = std::move(powers[j]);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SimSummary> run_replications(const std::vector<ProcedureSpec>& procs, const SimConfig& cfg,
                                         const ReplicationOptions& opts) {
    std::vector<std::pair<std::string, ProcedureFn>> fns;
    fns.reserve(procs.size());
    for (const auto& p : procs) fns.emplace_back(p.label(), as_procedure_fn(p, opts.alpha));
    return run_replications(fns, cfg, opts);
}

SimSummary run_replications(const ProcedureSpec& proc, const SimConfig& cfg, std::size_t reps, double alpha,
                            std::uint64_t seed) {
    ReplicationOptions opts;
    opts.reps = reps;
    opts.alpha = alpha;
    opts.seed = seed;
    return run_replications(std::vector<ProcedureSpec>{proc}, cfg, opts).front();
}

}  // namespace gbh
