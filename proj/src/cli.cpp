#include "gbh/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gbh/csv.hpp"

namespace gbh::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kParamColumns = {"m",     "n",     "p",     "pi_r",   "pi_c", "pi_rc",
                                                "pi_dot", "pi",   "rho_r", "rho_c",  "rho_p", "lambda",
                                                "alpha", "reps", "seed"};

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return static_cast<bool>(in) || in.eof();
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

double number_field(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(key, "must be a number");
    return v.get<double>();
}

std::uint64_t uint_field(const json& obj, const std::string& key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(key, "must be a nonnegative integer");
}

void require_open_unit(double v, const std::string& key) {
    if (!(v > 0.0 && v < 1.0)) {
        throw ConfigError(key, "must lie in (0,1), got " + csv::format_full(v));
    }
}

void require_closed_unit(double v, const std::string& key) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(key, "must lie in [0,1], got " + csv::format_full(v));
    }
}

void require_rho(double v, const std::string& key) {
    if (!(v >= 0.0 && v < 1.0)) {
        throw ConfigError(key, "must lie in [0,1), got " + csv::format_full(v));
    }
}

std::vector<double> sweep_values(const json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array() && !v.empty()) {
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigError("sweep." + key, "values must be numbers");
            out.push_back(x.get<double>());
        }
    } else {
        throw ConfigError("sweep." + key, "must be a number or a non-empty array of numbers");
    }
    for (double x : out) require_closed_unit(x, "sweep." + key);
    return out;
}

std::optional<OracleVariant> oracle_variant_by_name(const std::string& s) {
    for (auto v : {OracleVariant::OneWay, OracleVariant::TwoWayOnePerEqual, OracleVariant::TwoWayOnePerSizeAdjusted,
                   OracleVariant::TwoWayCellsFourTerm, OracleVariant::TwoWayCellsTwoTerm,
                   OracleVariant::TwoWayCellsEqualSizeA, OracleVariant::TwoWayCellsEqualSizeB}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

std::optional<AdaptiveVariant> adaptive_variant_by_name(const std::string& s) {
    for (auto v : {AdaptiveVariant::OneWay, AdaptiveVariant::TwoWayOnePer, AdaptiveVariant::TwoWayOnePerSizeAdjusted,
                   AdaptiveVariant::TwoWayCellsFourTerm, AdaptiveVariant::TwoWayCellsTwoTerm,
                   AdaptiveVariant::TwoWayCellsEqualSizeFour, AdaptiveVariant::TwoWayCellsEqualSizeTwo}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

LayoutKind oracle_kind(OracleVariant v) {
    switch (v) {
        case OracleVariant::OneWay: return LayoutKind::OneWay;
        case OracleVariant::TwoWayOnePerEqual:
        case OracleVariant::TwoWayOnePerSizeAdjusted: return LayoutKind::TwoWayOnePerCell;
        default: return LayoutKind::TwoWayCells;
    }
}

LayoutKind adaptive_kind(AdaptiveVariant v) {
    switch (v) {
        case AdaptiveVariant::OneWay: return LayoutKind::OneWay;
        case AdaptiveVariant::TwoWayOnePer:
        case AdaptiveVariant::TwoWayOnePerSizeAdjusted: return LayoutKind::TwoWayOnePerCell;
        default: return LayoutKind::TwoWayCells;
    }
}

const char* kind_name(LayoutKind k) {
    switch (k) {
        case LayoutKind::OneWay: return "one-way";
        case LayoutKind::TwoWayOnePerCell: return "two-way one-per-cell";
        case LayoutKind::TwoWayCells: return "two-way cells";
    }
    return "?";
}

/// Layout kind a procedure/variant pair needs, if it constrains the layout.
std::optional<LayoutKind> required_kind(const std::string& name, const std::optional<std::string>& variant) {
    if (!variant) return std::nullopt;
    if (name == "oracle_gbh") {
        if (auto v = oracle_variant_by_name(*variant)) return oracle_kind(*v);
    } else if (name == "adaptive_gbh") {
        if (auto v = adaptive_variant_by_name(*variant)) return adaptive_kind(*v);
    }
    return std::nullopt;
}

std::string param_or_empty(bool present, double v) { return present ? csv::format_full(v) : std::string(); }

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error("field '" + field + "': " + message), field_(std::move(field)) {}

const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c{"procedure"};
        c.insert(c.end(), kParamColumns.begin(), kParamColumns.end());
        for (const char* s : {"fdr_hat", "se_fdr", "power_hat", "se_power"}) c.emplace_back(s);
        return c;
    }();
    return cols;
}

ProcedureSpec parse_procedure(const std::string& name, const std::optional<std::string>& variant, LayoutKind kind,
                              double lambda) {
    if (name == "plain_bh") return ProcedureSpec::plain_bh();
    if (name == "naive_adaptive_bh") return ProcedureSpec::naive_adaptive_bh(lambda);
    if (name == "lsl_gbh") return ProcedureSpec::lsl_gbh();
    if (name == "tst_gbh") return ProcedureSpec::tst_gbh();
    if (name == "oracle_gbh") {
        OracleVariant v = kind == LayoutKind::OneWay             ? OracleVariant::OneWay
                          : kind == LayoutKind::TwoWayOnePerCell ? OracleVariant::TwoWayOnePerEqual
                                                                 : OracleVariant::TwoWayCellsFourTerm;
        if (variant) {
            auto parsed = oracle_variant_by_name(*variant);
            if (!parsed) throw ConfigError("variant", "unknown oracle variant '" + *variant + "'");
            v = *parsed;
        }
        if (oracle_kind(v) != kind) {
            throw Error(ErrorCode::VariantMismatch, std::string("oracle variant ") + to_string(v) +
                                                        " needs a " + kind_name(oracle_kind(v)) + " layout, got " +
                                                        kind_name(kind));
        }
        return ProcedureSpec::oracle_gbh(v);
    }
    if (name == "adaptive_gbh") {
        AdaptiveVariant v = kind == LayoutKind::OneWay             ? AdaptiveVariant::OneWay
                            : kind == LayoutKind::TwoWayOnePerCell ? AdaptiveVariant::TwoWayOnePer
                                                                   : AdaptiveVariant::TwoWayCellsFourTerm;
        bool cols_variant = false;
        if (variant) {
            std::string vname = *variant;
            const std::string suffix = "+cols";
            if (vname.size() > suffix.size() && vname.compare(vname.size() - suffix.size(), suffix.size(), suffix) == 0) {
                cols_variant = true;
                vname.erase(vname.size() - suffix.size());
            }
            auto parsed = adaptive_variant_by_name(vname);
            if (!parsed) throw ConfigError("variant", "unknown adaptive variant '" + *variant + "'");
            v = *parsed;
        }
        if (adaptive_kind(v) != kind) {
            throw Error(ErrorCode::VariantMismatch, std::string("adaptive variant ") + to_string(v) +
                                                        " needs a " + kind_name(adaptive_kind(v)) + " layout, got " +
                                                        kind_name(kind));
        }
        auto spec = ProcedureSpec::adaptive_gbh(v, lambda);
        spec.adaptive_options.column_term_uses_cols = cols_variant;
        return spec;
    }
    throw ConfigError("procedures", "unknown procedure '" + name + "'");
}

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", "line " + std::to_string(line_of_offset(json_text, e.byte)) +
                                            ": malformed JSON (" + e.what() + ")");
    }
    if (!doc.is_object()) throw ConfigError("<document>", "top level must be a JSON object");

    if (!doc.contains("mode") || !doc.at("mode").is_string()) {
        throw ConfigError("mode", "required; one of \"oneway\", \"twoway\"");
    }
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode != "oneway" && mode != "twoway") throw ConfigError("mode", "must be \"oneway\" or \"twoway\"");
    const bool one_way = mode == "oneway";

    std::vector<std::string> allowed{"mode", "m", "n", "mu", "alpha", "lambda", "reps", "seed",
                                     "threads", "procedures", "sweep", "output"};
    const std::vector<std::string> sweep_keys =
        one_way ? std::vector<std::string>{"pi_dot", "pi"} : std::vector<std::string>{"pi_r", "pi_c", "pi_rc"};
    if (one_way) {
        allowed.insert(allowed.end(), {"rho", "rho_per_group", "pi_dot", "pi"});
    } else {
        allowed.insert(allowed.end(), {"p", "rho_r", "rho_c", "rho_p", "pi_r", "pi_c", "pi_rc"});
    }
    for (const auto& [key, value] : doc.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(key, "unknown key for mode '" + mode + "'");
        }
    }

    RunConfig rc;
    rc.alpha = number_field(doc, "alpha", 0.05);
    require_open_unit(rc.alpha, "alpha");
    rc.lambda = number_field(doc, "lambda", 0.5);
    require_open_unit(rc.lambda, "lambda");
    rc.reps = uint_field(doc, "reps", 200);
    if (rc.reps == 0) throw ConfigError("reps", "must be >= 1");
    rc.seed = uint_field(doc, "seed", 1);
    rc.threads = uint_field(doc, "threads", 0);
    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) throw ConfigError("output", "must be a string path");
        rc.output = doc.at("output").get<std::string>();
    }

    const std::size_t m = uint_field(doc, "m", 50);
    const std::size_t n = uint_field(doc, "n", 100);
    if (m == 0) throw ConfigError("m", "must be >= 1");
    if (n == 0) throw ConfigError("n", "must be >= 1");
    const double mu = number_field(doc, "mu", 3.0);

    LayoutKind kind = LayoutKind::OneWay;
    if (one_way) {
        OneWaySimConfig c;
        c.m = m;
        c.n = n;
        c.mu = mu;
        c.rho = number_field(doc, "rho", 0.0);
        require_rho(c.rho, "rho");
        if (doc.contains("rho_per_group")) {
            const auto& arr = doc.at("rho_per_group");
            if (!arr.is_array() || arr.size() != m) throw ConfigError("rho_per_group", "must be an array of m numbers");
            for (const auto& x : arr) {
                if (!x.is_number()) throw ConfigError("rho_per_group", "values must be numbers");
                c.rho_per_group.push_back(x.get<double>());
                require_rho(c.rho_per_group.back(), "rho_per_group");
            }
        }
        c.pi_dot = number_field(doc, "pi_dot", 0.0);
        require_closed_unit(c.pi_dot, "pi_dot");
        c.pi = number_field(doc, "pi", 0.5);
        require_closed_unit(c.pi, "pi");
        rc.base = c;
    } else {
        TwoWaySimConfig c;
        c.m = m;
        c.n = n;
        c.mu = mu;
        c.p = uint_field(doc, "p", 1);
        if (c.p == 0) throw ConfigError("p", "must be >= 1");
        c.rho_r = number_field(doc, "rho_r", 0.0);
        require_rho(c.rho_r, "rho_r");
        c.rho_c = number_field(doc, "rho_c", 0.0);
        require_rho(c.rho_c, "rho_c");
        c.rho_p = number_field(doc, "rho_p", 0.0);
        require_rho(c.rho_p, "rho_p");
        c.pi_r = number_field(doc, "pi_r", 0.0);
        require_closed_unit(c.pi_r, "pi_r");
        c.pi_c = number_field(doc, "pi_c", 0.0);
        require_closed_unit(c.pi_c, "pi_c");
        c.pi_rc = number_field(doc, "pi_rc", 0.5);
        require_closed_unit(c.pi_rc, "pi_rc");
        kind = c.p == 1 ? LayoutKind::TwoWayOnePerCell : LayoutKind::TwoWayCells;
        rc.base = c;
    }

    // Sweep grid, nested in the fixed key order (first key outermost).
    std::vector<std::vector<double>> grids;
    if (doc.contains("sweep")) {
        const auto& sweep = doc.at("sweep");
        if (!sweep.is_object()) throw ConfigError("sweep", "must be an object");
        for (const auto& [key, value] : sweep.items()) {
            if (std::find(sweep_keys.begin(), sweep_keys.end(), key) == sweep_keys.end()) {
                throw ConfigError("sweep." + key, "cannot sweep this parameter in mode '" + mode + "'");
            }
        }
    }
    for (const auto& key : sweep_keys) {
        if (doc.contains("sweep") && doc.at("sweep").contains(key)) {
            grids.push_back(sweep_values(doc.at("sweep").at(key), key));
        } else {
            double base_value = 0.0;
            if (const auto* c = std::get_if<OneWaySimConfig>(&rc.base)) {
                base_value = key == "pi_dot" ? c->pi_dot : c->pi;
            } else {
                const auto& t = std::get<TwoWaySimConfig>(rc.base);
                base_value = key == "pi_r" ? t.pi_r : key == "pi_c" ? t.pi_c : t.pi_rc;
            }
            grids.push_back({base_value});
        }
    }
    std::vector<std::size_t> pos(grids.size(), 0);
    while (true) {
        SimConfig point = rc.base;
        if (auto* c = std::get_if<OneWaySimConfig>(&point)) {
            c->pi_dot = grids[0][pos[0]];
            c->pi = grids[1][pos[1]];
        } else {
            auto& t = std::get<TwoWaySimConfig>(point);
            t.pi_r = grids[0][pos[0]];
            t.pi_c = grids[1][pos[1]];
            t.pi_rc = grids[2][pos[2]];
        }
        rc.points.push_back(SweepPoint{point});
        std::size_t d = grids.size();
        while (d > 0) {
            --d;
            if (++pos[d] < grids[d].size()) break;
            pos[d] = 0;
            if (d == 0) {
                d = grids.size() + 1;
                break;
            }
        }
        if (d == grids.size() + 1) break;
    }

    if (!doc.contains("procedures")) throw ConfigError("procedures", "required");
    const auto& procs = doc.at("procedures");
    if (!procs.is_array() || procs.empty()) throw ConfigError("procedures", "must be a non-empty array");
    for (const auto& entry : procs) {
        std::string name;
        std::optional<std::string> variant;
        double lambda = rc.lambda;
        bool cols_flag = false;
        if (entry.is_string()) {
            name = entry.get<std::string>();
        } else if (entry.is_object()) {
            for (const auto& [key, value] : entry.items()) {
                if (key != "name" && key != "variant" && key != "lambda" && key != "column_term_uses_cols") {
                    throw ConfigError("procedures." + key, "unknown key");
                }
            }
            if (!entry.contains("name") || !entry.at("name").is_string()) {
                throw ConfigError("procedures.name", "required string");
            }
            name = entry.at("name").get<std::string>();
            if (entry.contains("variant")) {
                if (!entry.at("variant").is_string()) throw ConfigError("procedures.variant", "must be a string");
                variant = entry.at("variant").get<std::string>();
            }
            lambda = number_field(entry, "lambda", rc.lambda);
            require_open_unit(lambda, "procedures.lambda");
            if (entry.contains("column_term_uses_cols")) {
                if (!entry.at("column_term_uses_cols").is_boolean()) {
                    throw ConfigError("procedures.column_term_uses_cols", "must be a boolean");
                }
                cols_flag = entry.at("column_term_uses_cols").get<bool>();
            }
        } else {
            throw ConfigError("procedures", "entries must be strings or objects");
        }
        try {
            auto spec = parse_procedure(name, variant, kind, lambda);
            if (cols_flag) spec.adaptive_options.column_term_uses_cols = true;
            rc.procedures.push_back(std::move(spec));
        } catch (const Error& e) {
            throw ConfigError("procedures", e.what());
        }
    }
    return rc;
}

void write_results(std::ostream& out, const std::vector<SimSummary>& summaries,
                   const std::vector<ProcedureSpec>& procs_per_row) {
    const auto& cols = result_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (std::size_t r = 0; r < summaries.size(); ++r) {
        const SimSummary& s = summaries[r];
        const ProcedureSpec& proc = procs_per_row.at(r);
        std::vector<std::string> f;
        f.push_back(csv::escape(s.procedure));
        if (const auto* c = std::get_if<OneWaySimConfig>(&s.config)) {
            f.push_back(std::to_string(c->m));
            f.push_back(std::to_string(c->n));
            f.push_back("");
            f.push_back("");
            f.push_back("");
            f.push_back("");
            f.push_back(csv::format_full(c->pi_dot));
            f.push_back(csv::format_full(c->pi));
            f.push_back(param_or_empty(c->rho_per_group.empty(), c->rho));
            f.push_back("");
            f.push_back("");
        } else {
            const auto& t = std::get<TwoWaySimConfig>(s.config);
            f.push_back(std::to_string(t.m));
            f.push_back(std::to_string(t.n));
            f.push_back(std::to_string(t.p));
            f.push_back(csv::format_full(t.pi_r));
            f.push_back(csv::format_full(t.pi_c));
            f.push_back(csv::format_full(t.pi_rc));
            f.push_back("");
            f.push_back("");
            f.push_back(csv::format_full(t.rho_r));
            f.push_back(csv::format_full(t.rho_c));
            f.push_back(param_or_empty(t.p > 1, t.rho_p));
        }
        const bool uses_lambda =
            proc.kind == ProcedureKind::NaiveAdaptiveBH || proc.kind == ProcedureKind::AdaptiveGBH;
        f.push_back(param_or_empty(uses_lambda, proc.lambda));
        f.push_back(csv::format_full(s.alpha));
        f.push_back(std::to_string(s.reps));
        f.push_back(std::to_string(s.seed));
        f.push_back(csv::format_sig6(s.fdr_hat));
        f.push_back(csv::format_sig6(s.se_fdr));
        f.push_back(csv::format_sig6(s.power_hat));
        f.push_back(csv::format_sig6(s.se_power));
        for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << f[i];
        out << '\n';
    }
}

int cmd_simulate(const std::string& config_path, const std::optional<std::string>& out_path, std::ostream& log,
                 std::ostream& err) {
    std::string text;
    if (!read_file(config_path, text)) {
        err << "gbh simulate: cannot read config '" << config_path << "'\n";
        return kExitIo;
    }
    RunConfig rc;
    try {
        rc = parse_run_config(text);
    } catch (const ConfigError& e) {
        err << "gbh simulate: config error: " << e.what() << '\n';
        return kExitValidation;
    }
    if (const char* env = std::getenv("GBH_SEED")) {
        const std::string s(env);
        std::uint64_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            err << "gbh simulate: GBH_SEED must be a nonnegative integer, got '" << s << "'\n";
            return kExitValidation;
        }
        rc.seed = v;
    }
    const std::optional<std::string> target = out_path ? out_path : rc.output;
    if (!target) {
        err << "gbh simulate: no output path (use --out or the 'output' config key)\n";
        return kExitValidation;
    }

    std::vector<SimSummary> rows;
    std::vector<ProcedureSpec> row_procs;
    try {
        for (std::size_t i = 0; i < rc.points.size(); ++i) {
            ReplicationOptions opts;
            opts.reps = rc.reps;
            opts.alpha = rc.alpha;
            opts.seed = derive_seed(rc.seed, 0x5EEDULL + i);
            opts.threads = rc.threads;
            auto summaries = run_replications(rc.procedures, rc.points[i].config, opts);
            for (std::size_t j = 0; j < summaries.size(); ++j) {
                summaries[j].seed = rc.seed;
                summaries[j].fdp_per_rep.clear();
                summaries[j].power_per_rep.clear();
                rows.push_back(std::move(summaries[j]));
                row_procs.push_back(rc.procedures[j]);
            }
            log << "point " << (i + 1) << "/" << rc.points.size() << " done\n";
        }
    } catch (const Error& e) {
        err << "gbh simulate: config error: " << e.what() << '\n';
        return kExitValidation;
    }

    std::ofstream out(*target, std::ios::binary);
    if (!out) {
        err << "gbh simulate: cannot write '" << *target << "'\n";
        return kExitIo;
    }
    write_results(out, rows, row_procs);
    out.flush();
    if (!out) {
        err << "gbh simulate: write failed for '" << *target << "'\n";
        return kExitIo;
    }
    log << "wrote " << rows.size() << " rows to " << *target << '\n';
    return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& log, std::ostream& err) {
    if (!(args.alpha > 0.0 && args.alpha < 1.0)) {
        err << "gbh analyze: --alpha must lie in (0,1)\n";
        return kExitValidation;
    }
    if (!(args.lambda > 0.0 && args.lambda < 1.0)) {
        err << "gbh analyze: --lambda must lie in (0,1)\n";
        return kExitValidation;
    }
    if (args.procedure == "oracle_gbh") {
        err << "gbh analyze: oracle_gbh needs known null proportions and cannot run on observed data\n";
        return kExitValidation;
    }

    std::ifstream in(args.in_path, std::ios::binary);
    if (!in) {
        err << "gbh analyze: cannot read '" << args.in_path << "'\n";
        return kExitIo;
    }
    csv::Table table;
    try {
        table = csv::read(in);
    } catch (const std::exception& e) {
        err << "gbh analyze: " << e.what() << '\n';
        return kExitValidation;
    }
    const auto row_col = table.column("row_id");
    const auto p_col = table.column("p_value");
    const auto col_col = table.column("col_id");
    const auto member_col = table.column("member_id");
    if (!row_col || !p_col) {
        err << "gbh analyze: header must contain row_id and p_value\n";
        return kExitValidation;
    }
    if (table.rows.empty()) {
        err << "gbh analyze: no data rows\n";
        return kExitValidation;
    }

    const std::size_t count = table.rows.size();
    std::vector<double> pvals(count);
    for (std::size_t r = 0; r < count; ++r) {
        const auto v = csv::parse_double(table.rows[r][*p_col]);
        if (!v || !(*v >= 0.0 && *v <= 1.0)) {
            err << "gbh analyze: line " << table.lines[r] << ": p_value '" << table.rows[r][*p_col]
                << "' is not a number in [0,1]\n";
            return kExitValidation;
        }
        if (table.rows[r][*row_col].empty()) {
            err << "gbh analyze: line " << table.lines[r] << ": empty row_id\n";
            return kExitValidation;
        }
        if (col_col && !args.one_way && table.rows[r][*col_col].empty()) {
            err << "gbh analyze: line " << table.lines[r] << ": empty col_id\n";
            return kExitValidation;
        }
        pvals[r] = *v;
    }

    // Labels are numbered in order of first appearance.
    auto index_labels = [&](std::size_t column, std::vector<std::string>& labels) {
        std::map<std::string, std::size_t> ids;
        std::vector<std::size_t> out(count);
        for (std::size_t r = 0; r < count; ++r) {
            const auto& label = table.rows[r][column];
            auto [it, inserted] = ids.emplace(label, labels.size());
            if (inserted) labels.push_back(label);
            out[r] = it->second;
        }
        return out;
    };

    const bool one_way = args.one_way || !col_col;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    const auto row_ids = index_labels(*row_col, row_labels);
    std::vector<std::size_t> col_ids(count, 0);
    if (!one_way) col_ids = index_labels(*col_col, col_labels);

    const std::size_t m = row_labels.size();
    const std::size_t n = one_way ? 1 : col_labels.size();
    std::vector<std::vector<std::size_t>> members(m * n);
    for (std::size_t r = 0; r < count; ++r) members[row_ids[r] * n + col_ids[r]].push_back(r);

    std::optional<Layout> layout;
    LayoutKind kind = LayoutKind::OneWay;
    try {
        if (one_way) {
            std::vector<std::size_t> sizes(m);
            for (std::size_t g = 0; g < m; ++g) sizes[g] = members[g].size();
            layout = Layout::one_way(sizes);
        } else {
            std::vector<std::size_t> sizes(m * n);
            bool all_single = true;
            for (std::size_t c = 0; c < m * n; ++c) {
                sizes[c] = members[c].size();
                if (sizes[c] == 0) {
                    err << "gbh analyze: cell (" << row_labels[c / n] << ", " << col_labels[c % n]
                        << ") has no hypotheses; a two-way reading needs every cell filled (try --one-way)\n";
                    return kExitIncompatible;
                }
                if (sizes[c] != 1) all_single = false;
            }
            const auto need = required_kind(args.procedure, args.variant);
            const bool want_cells = need && *need == LayoutKind::TwoWayCells;
            if (all_single && !want_cells) {
                layout = Layout::two_way_one_per_cell(m, n);
            } else {
                layout = Layout::two_way_cells(m, n, sizes);
            }
        }
        kind = layout->kind();
    } catch (const Error& e) {
        err << "gbh analyze: " << e.what() << '\n';
        return kExitValidation;
    }

    // Flat order: cells row-major, members in input order.
    std::vector<std::size_t> flat_to_input;
    flat_to_input.reserve(count);
    for (const auto& cell : members) flat_to_input.insert(flat_to_input.end(), cell.begin(), cell.end());
    std::vector<double> flat_p(count);
    for (std::size_t i = 0; i < count; ++i) flat_p[i] = pvals[flat_to_input[i]];

    ProcedureSpec proc;
    try {
        proc = parse_procedure(args.procedure, args.variant, kind, args.lambda);
    } catch (const ConfigError& e) {
        err << "gbh analyze: " << e.what() << '\n';
        return kExitValidation;
    } catch (const Error& e) {
        err << "gbh analyze: " << e.what() << '\n';
        return kExitIncompatible;
    }

    std::optional<WeightAssignment> weights;
    std::optional<RejectionSet> rejections;
    try {
        const PValueSet pset(*layout, flat_p);
        weights = procedure_weights(pset, proc, args.alpha);
        rejections = weighted_bh(pset, *weights, StepUpConfig(args.alpha));
    } catch (const Error& e) {
        err << "gbh analyze: " << e.what() << '\n';
        const bool incompatible = e.code() == ErrorCode::VariantMismatch || e.code() == ErrorCode::UnequalCells;
        return incompatible ? kExitIncompatible : kExitValidation;
    }

    std::vector<std::size_t> input_to_flat(count);
    for (std::size_t i = 0; i < count; ++i) input_to_flat[flat_to_input[i]] = i;

    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) {
        err << "gbh analyze: cannot write '" << args.out_path << "'\n";
        return kExitIo;
    }
    out << "row_id,col_id,member_id,p_value,weight,weighted_p,rejected\n";
    for (std::size_t r = 0; r < count; ++r) {
        const std::size_t i = input_to_flat[r];
        const double w = (*weights)[i];
        out << csv::escape(table.rows[r][*row_col]) << ','
            << (col_col ? csv::escape(table.rows[r][*col_col]) : std::string()) << ','
            << (member_col ? csv::escape(table.rows[r][*member_col]) : std::string()) << ','
            << csv::format_full(pvals[r]) << ',' << csv::format_full(w) << ','
            << csv::format_full(weighted_pvalue(w, pvals[r])) << ',' << (rejections->rejected_at(i) ? 1 : 0)
            << '\n';
    }
    out.flush();
    if (!out) {
        err << "gbh analyze: write failed for '" << args.out_path << "'\n";
        return kExitIo;
    }
    log << "rejections=" << rejections->threshold_index() << " N=" << count << " layout=" << layout->describe()
        << " procedure=" << proc.label() << '\n';
    return kExitOk;
}

int cmd_report(const std::string& in_path, const std::string& out_path, const std::vector<std::string>& group_by,
               std::ostream& err) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) {
        err << "gbh report: cannot read '" << in_path << "'\n";
        return kExitIo;
    }
    csv::Table table;
    try {
        table = csv::read(in);
    } catch (const std::exception& e) {
        err << "gbh report: schema mismatch: " << e.what() << '\n';
        return kExitValidation;
    }
    std::map<std::string, std::size_t> pos;
    for (const auto& c : result_columns()) {
        const auto at = table.column(c);
        if (!at) {
            err << "gbh report: schema mismatch: missing column '" << c << "'\n";
            return kExitValidation;
        }
        pos[c] = *at;
    }
    if (table.rows.empty()) {
        err << "gbh report: schema mismatch: no data rows\n";
        return kExitValidation;
    }

    std::vector<std::string> keys = group_by;
    for (const auto& k : keys) {
        if (std::find(kParamColumns.begin(), kParamColumns.end(), k) == kParamColumns.end()) {
            err << "gbh report: cannot group by '" << k << "'\n";
            return kExitValidation;
        }
    }
    if (keys.empty()) {
        for (const auto& c : kParamColumns) {
            if (c == "lambda") continue;  // differs by procedure, not by point
            const auto& first = table.rows.front()[pos[c]];
            const bool varies = std::any_of(table.rows.begin(), table.rows.end(),
                                            [&](const auto& row) { return row[pos[c]] != first; });
            if (varies) keys.push_back(c);
        }
        if (keys.empty()) keys = {"m", "n"};
    }

    std::vector<std::vector<std::string>> key_order;
    std::vector<std::string> proc_order;
    std::map<std::pair<std::vector<std::string>, std::string>, std::pair<std::string, std::string>> cells;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        std::vector<std::string> key;
        for (const auto& k : keys) key.push_back(row[pos[k]]);
        const std::string& proc = row[pos["procedure"]];
        if (std::find(key_order.begin(), key_order.end(), key) == key_order.end()) key_order.push_back(key);
        if (std::find(proc_order.begin(), proc_order.end(), proc) == proc_order.end()) proc_order.push_back(proc);
        const bool fresh =
            cells.emplace(std::make_pair(key, proc), std::make_pair(row[pos["fdr_hat"]], row[pos["power_hat"]]))
                .second;
        if (!fresh) {
            err << "gbh report: schema mismatch: line " << table.lines[r]
                << " repeats a (group, procedure) pair; choose more --by columns\n";
            return kExitValidation;
        }
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        err << "gbh report: cannot write '" << out_path << "'\n";
        return kExitIo;
    }
    bool first = true;
    auto emit = [&](const std::string& s) {
        out << (first ? "" : ",") << csv::escape(s);
        first = false;
    };
    for (const auto& k : keys) emit(k);
    for (const auto& p : proc_order) {
        emit(p + ".fdr_hat");
        emit(p + ".power_hat");
    }
    out << '\n';
    for (const auto& key : key_order) {
        first = true;
        for (const auto& v : key) emit(v);
        for (const auto& p : proc_order) {
            const auto it = cells.find({key, p});
            emit(it == cells.end() ? std::string() : it->second.first);
            emit(it == cells.end() ? std::string() : it->second.second);
        }
        out << '\n';
    }
    out.flush();
    if (!out) {
        err << "gbh report: write failed for '" << out_path << "'\n";
        return kExitIo;
    }
    return kExitOk;
}

int run(int argc, char** argv) {
    CLI::App app{"Weighted Benjamini-Hochberg procedures for one- and two-way classified hypotheses"};
    app.require_subcommand(1);

    std::string sim_config;
    std::optional<std::string> sim_out;
    auto* sim = app.add_subcommand("simulate", "Run a Monte-Carlo FDR/power sweep");
    sim->add_option("--config", sim_config, "JSON configuration file")->required();
    sim->add_option("--out", sim_out, "Result CSV path");

    AnalyzeArgs an;
    auto* ana = app.add_subcommand("analyze", "Apply a procedure to a classified p-value CSV");
    ana->add_option("--in", an.in_path, "Input CSV (row_id,col_id,member_id,p_value)")->required();
    ana->add_option("--out", an.out_path, "Output CSV")->required();
    ana->add_option("--proc", an.procedure, "plain_bh | naive_adaptive_bh | adaptive_gbh | lsl_gbh | tst_gbh")
        ->capture_default_str();
    ana->add_option("--alpha", an.alpha, "FDR level")->capture_default_str();
    ana->add_option("--lambda", an.lambda, "Threshold for adaptive estimates")->capture_default_str();
    ana->add_option("--variant", an.variant, "Weight variant for adaptive_gbh");
    ana->add_flag("--one-way", an.one_way, "Group on row_id alone");

    std::string rep_in;
    std::string rep_out;
    std::vector<std::string> rep_by;
    auto* rep = app.add_subcommand("report", "Pivot a simulate CSV into one row per sweep point");
    rep->add_option("--in", rep_in, "Result CSV from simulate")->required();
    rep->add_option("--out", rep_out, "Pivoted CSV")->required();
    rep->add_option("--by", rep_by, "Grouping columns (default: the varying parameters)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    if (*sim) return cmd_simulate(sim_config, sim_out, std::cout, std::cerr);
    if (*ana) return cmd_analyze(an, std::cout, std::cerr);
    return cmd_report(rep_in, rep_out, rep_by, std::cerr);
}

}  // namespace gbh::cli
