#include "dflsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dflsim/errors.hpp"

namespace dflsim {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void check_keys(const json& obj, const std::string& ctx, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw validation_error("unknown key '" + it.key() + "' in " + ctx);
        }
    }
}

template <class T>
void read_field(const json& obj, const char* key, T& out, const std::string& ctx) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw validation_error("bad value for '" + std::string(key) + "' in " + ctx + ": " + e.what());
    }
}

bool is_integral_value(double v) { return std::isfinite(v) && v == std::floor(v); }

// Numeric seeds sort by value and come before the "mean"/"std" summary tags.
bool seed_less(const std::string& a, const std::string& b) {
    char* end_a = nullptr;
    char* end_b = nullptr;
    const long long va = std::strtoll(a.c_str(), &end_a, 10);
    const long long vb = std::strtoll(b.c_str(), &end_b, 10);
    const bool num_a = end_a != a.c_str() && *end_a == '\0';
    const bool num_b = end_b != b.c_str() && *end_b == '\0';
    if (num_a != num_b) return num_a;
    if (num_a) return va < vb;
    return a < b;
}

bool row_less(const ResultRow& a, const ResultRow& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    if (a.scheme != b.scheme) return a.scheme < b.scheme;
    if (a.seed != b.seed) return seed_less(a.seed, b.seed);
    return a.iteration < b.iteration;
}

struct Cell {
    std::size_t sweep_idx;
    std::size_t scheme_idx;
    int seed_idx;
};

struct CellOutput {
    std::vector<ResultRow> rows;
    std::vector<FlLossRow> fl_rows;
    std::optional<ErrorRow> error;
    double final_per = 0.0;
    double final_latency = 0.0;
    double final_total = 0.0;
    double converged = 0.0;
    double iters_used = 0.0;
    bool ok = false;
};

CellOutput run_cell(const ExperimentSpec& spec, const std::string& sweep_param, double sweep_value,
                    const std::string& scheme, int seed_idx) {
    CellOutput out;
    const std::uint64_t seed = spec.scenario.seed + static_cast<std::uint64_t>(seed_idx);
    const std::string seed_str = std::to_string(seed);
    try {
        ScenarioConfig sc = spec.scenario;
        SolverConfig solver = spec.solver;
        apply_sweep(spec.axis, sweep_value, sc, solver);
        sc.seed = seed;
        const Scenario scenario = generate_scenario(sc);

        SolveResult res = scheme == "proposed"
                              ? solve(scenario, solver)
                              : run_baseline(scenario, baseline_from_string(scheme), solver, seed);

        for (std::size_t t = 0; t < res.trace.iteration_costs.size(); ++t) {
            const CostBreakdown& c = res.trace.iteration_costs[t];
            out.rows.push_back({sweep_param, sweep_value, scheme, seed_str, static_cast<int>(t),
                                c.per_sum, c.latency_sum, c.total,
                                res.trace.converged ? 1.0 : 0.0,
                                static_cast<double>(res.trace.iterations_used)});
        }
        out.final_per = res.cost.per_sum;
        out.final_latency = res.cost.latency_sum;
        out.final_total = res.cost.total;
        out.converged = res.trace.converged ? 1.0 : 0.0;
        out.iters_used = res.trace.iterations_used;
        out.ok = true;

        if (spec.fl.has_value()) {
            FLConfig fl = *spec.fl;
            fl.seed += static_cast<std::uint64_t>(seed_idx);
            const DflResult dfl = run_dfl(scenario, res.allocation, fl);
            for (std::size_t round = 0; round < dfl.loss_curve.size(); ++round) {
                out.fl_rows.push_back({sweep_param, sweep_value, scheme, seed_str,
                                       static_cast<int>(round), dfl.loss_curve[round]});
            }
        }
    } catch (const std::exception& e) {
        out = CellOutput{};
        out.error = ErrorRow{sweep_param, sweep_value, scheme, seed_str, e.what()};
    }
    return out;
}

} // namespace

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::None: return "none";
        case SweepAxis::Mu: return "mu";
        case SweepAxis::AlphaBeta: return "alpha_beta";
        case SweepAxis::NumCars: return "num_cars";
        case SweepAxis::NumRsus: return "num_rsus";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "none") return SweepAxis::None;
    if (name == "mu") return SweepAxis::Mu;
    if (name == "alpha_beta") return SweepAxis::AlphaBeta;
    if (name == "num_cars") return SweepAxis::NumCars;
    if (name == "num_rsus") return SweepAxis::NumRsus;
    throw validation_error("unknown sweep axis '" + name + "'");
}

void apply_sweep(SweepAxis axis, double value, ScenarioConfig& scenario, SolverConfig& solver) {
    switch (axis) {
        case SweepAxis::None:
            break;
        case SweepAxis::Mu:
            solver.mu = value;
            break;
        case SweepAxis::AlphaBeta:
            solver.weights.alpha = value;
            solver.weights.beta = 1.0 - value;
            break;
        case SweepAxis::NumCars:
            scenario.num_cars = static_cast<int>(value);
            scenario.num_rbs = std::max(scenario.num_rbs, scenario.num_cars);
            scenario.num_cellular = scenario.num_rbs;
            break;
        case SweepAxis::NumRsus:
            scenario.num_rsus = static_cast<int>(value);
            break;
    }
}

void ExperimentSpec::validate() const {
    if (num_seeds < 1) {
        throw validation_error("num_seeds >= 1 violated (num_seeds=" + std::to_string(num_seeds) + ")");
    }
    if (schemes.empty()) throw validation_error("schemes must be nonempty");
    for (const std::string& s : schemes) {
        if (s != "proposed") baseline_from_string(s); // throws on unknown names
    }
    if (axis != SweepAxis::None && sweep_values.empty()) {
        throw validation_error("sweep values must be nonempty for axis '" + to_string(axis) + "'");
    }
    if (axis == SweepAxis::None && !sweep_values.empty()) {
        throw validation_error("sweep axis 'none' takes no values");
    }
    if (axis == SweepAxis::NumCars || axis == SweepAxis::NumRsus) {
        for (double v : sweep_values) {
            if (!is_integral_value(v) || v < 1.0) {
                throw validation_error("sweep value " + fmt_double(v) + " is not a positive integer");
            }
        }
    }
    // Every sweep point must yield a valid configuration.
    const std::vector<double> points = sweep_values.empty() ? std::vector<double>{0.0} : sweep_values;
    for (double v : points) {
        ScenarioConfig sc = scenario;
        SolverConfig so = solver;
        apply_sweep(axis, v, sc, so);
        sc.validate();
        so.validate();
    }
    if (fl.has_value()) fl->validate();
}

ExperimentSpec parse_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw validation_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw validation_error("config root must be a JSON object");

    ExperimentSpec spec;
    check_keys(doc, "config",
               {"scenario", "solver", "schemes", "sweep", "num_seeds", "fl", "output_dir"});

    if (doc.contains("scenario")) {
        const json& o = doc.at("scenario");
        check_keys(o, "scenario",
                   {"area_side_m", "num_cars", "num_rsus", "num_cellular", "num_rbs",
                    "rb_bandwidth_hz", "noise_psd_dbm_hz", "car_max_power_dbm",
                    "total_power_budget_dbm", "cellular_power_dbm", "waterfall_threshold",
                    "model_size_bits", "rsu_capacity", "seed"});
        read_field(o, "area_side_m", spec.scenario.area_side_m, "scenario");
        read_field(o, "num_cars", spec.scenario.num_cars, "scenario");
        read_field(o, "num_rsus", spec.scenario.num_rsus, "scenario");
        read_field(o, "num_cellular", spec.scenario.num_cellular, "scenario");
        read_field(o, "num_rbs", spec.scenario.num_rbs, "scenario");
        read_field(o, "rb_bandwidth_hz", spec.scenario.rb_bandwidth_hz, "scenario");
        read_field(o, "noise_psd_dbm_hz", spec.scenario.noise_psd_dbm_hz, "scenario");
        read_field(o, "car_max_power_dbm", spec.scenario.car_max_power_dbm, "scenario");
        read_field(o, "total_power_budget_dbm", spec.scenario.total_power_budget_dbm, "scenario");
        read_field(o, "cellular_power_dbm", spec.scenario.cellular_power_dbm, "scenario");
        read_field(o, "waterfall_threshold", spec.scenario.waterfall_threshold, "scenario");
        read_field(o, "model_size_bits", spec.scenario.model_size_bits, "scenario");
        read_field(o, "rsu_capacity", spec.scenario.rsu_capacity, "scenario");
        read_field(o, "seed", spec.scenario.seed, "scenario");
    }
    if (doc.contains("solver")) {
        const json& o = doc.at("solver");
        check_keys(o, "solver",
                   {"mu", "epsilon", "max_outer_iters", "inner_pgd_iters", "pgd_step_init",
                    "alpha", "beta"});
        read_field(o, "mu", spec.solver.mu, "solver");
        read_field(o, "epsilon", spec.solver.epsilon, "solver");
        read_field(o, "max_outer_iters", spec.solver.max_outer_iters, "solver");
        read_field(o, "inner_pgd_iters", spec.solver.inner_pgd_iters, "solver");
        read_field(o, "pgd_step_init", spec.solver.pgd_step_init, "solver");
        read_field(o, "alpha", spec.solver.weights.alpha, "solver");
        read_field(o, "beta", spec.solver.weights.beta, "solver");
    }
    read_field(doc, "schemes", spec.schemes, "config");
    if (doc.contains("sweep")) {
        const json& o = doc.at("sweep");
        check_keys(o, "sweep", {"axis", "values"});
        std::string axis = "none";
        read_field(o, "axis", axis, "sweep");
        spec.axis = sweep_axis_from_string(axis);
        read_field(o, "values", spec.sweep_values, "sweep");
    }
    read_field(doc, "num_seeds", spec.num_seeds, "config");
    if (doc.contains("fl")) {
        const json& o = doc.at("fl");
        check_keys(o, "fl",
                   {"global_rounds", "subglobal_iters", "local_iters", "learning_rate",
                    "devices_per_car", "samples_min", "samples_max", "feature_dim",
                    "label_noise_std", "seed"});
        FLConfig fl;
        read_field(o, "global_rounds", fl.global_rounds, "fl");
        read_field(o, "subglobal_iters", fl.subglobal_iters, "fl");
        read_field(o, "local_iters", fl.local_iters, "fl");
        read_field(o, "learning_rate", fl.learning_rate, "fl");
        read_field(o, "devices_per_car", fl.devices_per_car, "fl");
        read_field(o, "samples_min", fl.samples_min, "fl");
        read_field(o, "samples_max", fl.samples_max, "fl");
        read_field(o, "feature_dim", fl.feature_dim, "fl");
        read_field(o, "label_noise_std", fl.label_noise_std, "fl");
        read_field(o, "seed", fl.seed, "fl");
        spec.fl = fl;
    }
    read_field(doc, "output_dir", spec.output_dir, "config");

    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int jobs) {
    spec.validate();
    const std::string sweep_param = to_string(spec.axis);
    const std::vector<double> points =
        spec.sweep_values.empty() ? std::vector<double>{0.0} : spec.sweep_values;

    std::vector<Cell> cells;
    for (std::size_t sv = 0; sv < points.size(); ++sv) {
        for (std::size_t sc = 0; sc < spec.schemes.size(); ++sc) {
            for (int i = 0; i < spec.num_seeds; ++i) cells.push_back({sv, sc, i});
        }
    }

    std::vector<CellOutput> outputs(cells.size());
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
    if (workers == 1) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            outputs[c] = run_cell(spec, sweep_param, points[cells[c].sweep_idx],
                                  spec.schemes[cells[c].scheme_idx], cells[c].seed_idx);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t c = next.fetch_add(1); c < cells.size(); c = next.fetch_add(1)) {
                outputs[c] = run_cell(spec, sweep_param, points[cells[c].sweep_idx],
                                      spec.schemes[cells[c].scheme_idx], cells[c].seed_idx);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    ExperimentResult result;
    for (std::size_t sv = 0; sv < points.size(); ++sv) {
        for (std::size_t sc = 0; sc < spec.schemes.size(); ++sc) {
            std::vector<const CellOutput*> group;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (cells[c].sweep_idx != sv || cells[c].scheme_idx != sc) continue;
                const CellOutput& out = outputs[c];
                result.rows.insert(result.rows.end(), out.rows.begin(), out.rows.end());
                result.fl_rows.insert(result.fl_rows.end(), out.fl_rows.begin(), out.fl_rows.end());
                if (out.error.has_value()) result.errors.push_back(*out.error);
                if (out.ok) group.push_back(&out);
            }
            if (group.empty()) continue;

            // mean/std (population) of the final converged values across seeds.
            auto summarize = [&](auto getter) {
                double mean = 0.0;
                for (const CellOutput* o : group) mean += getter(*o);
                mean /= static_cast<double>(group.size());
                double var = 0.0;
                for (const CellOutput* o : group) {
                    const double d = getter(*o) - mean;
                    var += d * d;
                }
                return std::pair<double, double>{mean,
                                                 std::sqrt(var / static_cast<double>(group.size()))};
            };
            const auto per = summarize([](const CellOutput& o) { return o.final_per; });
            const auto lat = summarize([](const CellOutput& o) { return o.final_latency; });
            const auto tot = summarize([](const CellOutput& o) { return o.final_total; });
            const auto conv = summarize([](const CellOutput& o) { return o.converged; });
            const auto iters = summarize([](const CellOutput& o) { return o.iters_used; });
            result.rows.push_back({sweep_param, points[sv], spec.schemes[sc], "mean", -1, per.first,
                                   lat.first, tot.first, conv.first, iters.first});
            result.rows.push_back({sweep_param, points[sv], spec.schemes[sc], "std", -1, per.second,
                                   lat.second, tot.second, conv.second, iters.second});
        }
    }

    std::stable_sort(result.rows.begin(), result.rows.end(), row_less);
    return result;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw contract_error("emit_csv: table is empty");
    std::string out = kCsvHeader;
    out += '\n';
    for (const ResultRow& r : rows) {
        out += r.sweep_param;
        out += ',';
        out += fmt_double(r.sweep_value);
        out += ',';
        out += r.scheme;
        out += ',';
        out += r.seed;
        out += ',';
        out += std::to_string(r.iteration);
        out += ',';
        out += fmt_double(r.per_sum);
        out += ',';
        out += fmt_double(r.latency_sum);
        out += ',';
        out += fmt_double(r.c_global);
        out += ',';
        out += fmt_double(r.converged);
        out += ',';
        out += fmt_double(r.iters_used);
        out += '\n';
    }
    return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    const std::string text = format_csv(rows);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw io_error("write failed: " + path);
}

std::vector<ResultRow> parse_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw validation_error("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) {
        // Name exactly what is missing so a truncated file is diagnosable.
        std::vector<std::string> expected;
        std::istringstream hs{std::string(kCsvHeader)};
        std::string tok;
        while (std::getline(hs, tok, ',')) expected.push_back(tok);
        std::string missing;
        for (const std::string& col : expected) {
            if (line.find(col) == std::string::npos) {
                if (!missing.empty()) missing += ", ";
                missing += col;
            }
        }
        if (missing.empty()) missing = "(header mismatch)";
        throw validation_error("CSV header does not match contract; missing columns: " + missing);
    }

    std::vector<ResultRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 10) {
            throw validation_error("CSV line " + std::to_string(line_no) + " has " +
                                   std::to_string(f.size()) + " fields, expected 10");
        }
        try {
            ResultRow r;
            r.sweep_param = f[0];
            r.sweep_value = std::stod(f[1]);
            r.scheme = f[2];
            r.seed = f[3];
            r.iteration = std::stoi(f[4]);
            r.per_sum = std::stod(f[5]);
            r.latency_sum = std::stod(f[6]);
            r.c_global = std::stod(f[7]);
            r.converged = std::stod(f[8]);
            r.iters_used = std::stod(f[9]);
            rows.push_back(std::move(r));
        } catch (const std::exception&) {
            throw validation_error("CSV line " + std::to_string(line_no) + " is not parseable");
        }
    }
    return rows;
}

std::vector<ResultRow> parse_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open CSV: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv_text(buf.str());
}

void emit_fl_csv(const std::vector<FlLossRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "sweep_param,sweep_value,scheme,seed,round,global_loss\n";
    for (const FlLossRow& r : rows) {
        out << r.sweep_param << ',' << fmt_double(r.sweep_value) << ',' << r.scheme << ',' << r.seed
            << ',' << r.round << ',' << fmt_double(r.global_loss) << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

void emit_errors_csv(const std::vector<ErrorRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "sweep_param,sweep_value,scheme,seed,error\n";
    for (const ErrorRow& r : rows) {
        std::string msg = r.message;
        for (char& ch : msg) {
            if (ch == ',' || ch == '\n') ch = ';';
        }
        out << r.sweep_param << ',' << fmt_double(r.sweep_value) << ',' << r.scheme << ',' << r.seed
            << ',' << msg << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

} // namespace dflsim
