// cli.cpp: Command-line runner: presets, sweeps, worker pool and writers

#include "gphase/cli.hpp"

#include "gphase/bath_ising.hpp"
#include "gphase/errors.hpp"
#include "gphase/numerics.hpp"
#include "gphase/perturbative.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

namespace gphase::cli {

namespace {

using numerics::kPi;
using Json = nlohmann::ordered_json;
using Task = std::function<Row()>;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, Experiment> kExperiments{
    {"trace", Experiment::Trace},
    {"gp-curve", Experiment::GpCurve},
    {"ising-sweep", Experiment::IsingSweep},
    {"ising-approx", Experiment::IsingApprox},
    {"trotter-check", Experiment::TrotterCheck},
    {"correction", Experiment::Correction},
};
const std::map<std::string, Format> kFormats{{"csv", Format::Csv}, {"json", Format::Json}};
const std::map<std::string, BathKind> kBaths{{"two-level", BathKind::TwoLevel}, {"ising", BathKind::Ising}};
const std::map<std::string, protocol::Decomposition> kDecompositions{
    {"exact", protocol::Decomposition::Exact},
    {"trotter", protocol::Decomposition::CoarseTrotter},
    {"pulse", protocol::Decomposition::PulseLevel},
};
const std::map<std::string, two_level::CouplingConvention> kConventions{
    {"zz", two_level::CouplingConvention::ZzTarget},
    {"projector", two_level::CouplingConvention::Projector},
};

template <class Enum>
std::string_view name_of(const std::map<std::string, Enum>& table, Enum value) {
    for (const auto& [name, v] : table)
        if (v == value) return name;
    return "?";
}

std::vector<std::string> allowed_axes(Experiment e) {
    switch (e) {
        case Experiment::Trace: return {};
        case Experiment::GpCurve: return {"b-field", "theta", "coupling", "omega", "lambda", "ising-coupling"};
        case Experiment::IsingSweep: return {"lambda"};
        case Experiment::IsingApprox: return {"lambda", "ising-coupling"};
        case Experiment::TrotterCheck: return {"b-field"};
        case Experiment::Correction: return {"b-field", "theta"};
    }
    return {};
}

RunConfig at_point(const RunConfig& c, double v) {
    RunConfig out = c;
    if (!c.sweep) return out;
    const std::string& a = c.sweep->axis;
    if (a == "b-field") out.b_field = v;
    else if (a == "theta") out.theta = v;
    else if (a == "coupling") out.coupling = v;
    else if (a == "omega") out.omega = v;
    else if (a == "lambda") out.lambda = v;
    else if (a == "ising-coupling") out.ising_coupling = v;
    return out;
}

std::vector<double> axis_values(const RunConfig& c, double fallback) {
    return c.sweep ? c.sweep->values() : std::vector<double>{fallback};
}

two_level::TwoLevelBathParams two_level_bath(const RunConfig& c, double coupling) {
    two_level::TwoLevelBathParams p = two_level::TwoLevelBathParams::from_field(c.b_field, c.delta_gap, coupling, c.convention);
    if (c.znu != 1.0) {
        p.znu = c.znu;
        const double h = c.b_field / c.delta_gap;
        p.lambda = std::copysign(std::pow(std::abs(h), 1.0 / c.znu), h);
    }
    p.validate();
    return p;
}

ising::IsingBathParams ising_bath(const RunConfig& c) {
    ising::IsingBathParams p;
    p.n_spins = c.n_spins;
    p.j_coupling = c.j_coupling;
    p.lambda = c.lambda;
    p.coupling = c.ising_coupling;
    p.validate();
    return p;
}

// The closed forms are written for a non-negative field.
ising::IsingBathParams closed_form_bath(const RunConfig& c) {
    if (c.lambda < 0.0) throw ValidationError("lambda must be non-negative for the perturbative closed forms");
    return ising_bath(c);
}

DecoherenceSampler ising_sampler(const ising::IsingBathParams& p) {
    return [p](double t) { return ising::decoherence_product(p, t).value(); };
}

protocol::ProtocolParams protocol_params(const RunConfig& c) {
    protocol::ProtocolParams p;
    p.sys = SystemParams(c.omega, c.theta);
    p.bath = two_level_bath(c, c.coupling);
    p.trotter_steps = c.trotter_steps;
    p.decomposition = c.decomposition;
    p.validate();
    return p;
}

// Each builder validates every point up front and returns one task per row.

std::vector<Task> trace_tasks(const RunConfig& c, std::vector<std::string>& columns, std::vector<Row>& rows) {
    columns = {"t", "r_re", "r_im", "r_abs", "phase"};
    const SystemParams sys(c.omega, c.theta);
    DecoherenceSampler sampler;
    if (c.bath == BathKind::TwoLevel) sampler = two_level::BranchOracle(two_level_bath(c, c.coupling));
    else sampler = ising_sampler(ising_bath(c));
    // the trace is a single serial computation; its rows are produced directly
    const DecoherenceTrace trace = build_trace(sampler, sys, c.samples);
    for (std::size_t i = 0; i < trace.times().size(); ++i) {
        const Complex r = trace.r_values()[i];
        rows.push_back({{trace.times()[i], r.real(), r.imag(), trace.magnitude()[i], trace.phase_unwrapped()[i]}, "ok"});
    }
    return {};
}

std::vector<Task> gp_curve_tasks(const RunConfig& c, std::vector<std::string>& columns) {
    columns = {"axis_value", "theta", "phi_total", "phi_unitary", "correction", "delta_phi", "integral_part",
               "arctan_part"};
    std::vector<Task> tasks;
    const double fallback = c.bath == BathKind::TwoLevel ? c.b_field : c.lambda;
    for (double v : axis_values(c, fallback)) {
        const RunConfig pc = at_point(c, v);
        const SystemParams sys(pc.omega, pc.theta);
        if (pc.bath == BathKind::TwoLevel) {
            const two_level::TwoLevelBathParams base = two_level_bath(pc, pc.coupling);
            const std::size_t samples = pc.samples;
            const double b = pc.b_field;
            tasks.push_back([v, sys, base, samples, b] {
                const std::vector<double> one{b};
                const two_level::CurvePoint pt = two_level::gp_correction_curve(one, base, sys, samples).front();
                if (!pt.ok) return Row{{}, pt.error.empty() ? "failed" : pt.error};
                const GpResult& g = pt.coupled;
                return Row{{v, sys.theta, g.phi_total, g.phi_unitary, g.correction, pt.delta_phi, g.integral_part,
                            g.arctan_part}};
            });
        } else {
            const ising::IsingBathParams p = ising_bath(pc);
            const std::size_t samples = pc.samples;
            tasks.push_back([v, sys, p, samples] {
                const GpResult g = geometric_phase(build_trace(ising_sampler(p), sys, samples), sys);
                return Row{{v, sys.theta, g.phi_total, g.phi_unitary, g.correction, g.correction, g.integral_part,
                            g.arctan_part}};
            });
        }
    }
    return tasks;
}

std::vector<Task> ising_sweep_tasks(const RunConfig& c, std::vector<std::string>& columns) {
    columns = {"omega_over_j", "lambda", "dphi_exact_norm", "dphi_2nd_norm", "dphi_3rd_norm"};
    std::vector<Task> tasks;
    for (double ratio : c.omega_over_j) {
        for (double l : axis_values(c, c.lambda)) {
            RunConfig pc = at_point(c, l);
            pc.lambda = l;
            const ising::IsingBathParams p = closed_form_bath(pc);
            const SystemParams sys(ratio * pc.j_coupling, pc.theta);
            const std::size_t samples = pc.samples;
            tasks.push_back([ratio, l, p, sys, samples] {
                const double norm = p.n_spins * p.coupling * p.coupling;
                const double base = unitary_geometric_phase(sys.theta);
                const double exact = geometric_phase(build_trace(ising_sampler(p), sys, samples), sys).correction;
                const double second = perturbative::gp_approx_ising(p, sys, 2) - base;
                const double third = perturbative::gp_approx_ising(p, sys, 3) - base;
                return Row{{ratio, l, exact / norm, second / norm, third / norm}};
            });
        }
    }
    return tasks;
}

std::vector<Task> ising_approx_tasks(const RunConfig& c, std::vector<std::string>& columns) {
    columns = {"omega_over_j", "axis_value", "lambda", "f2", "F2", "F3", "G1", "dphi_2nd", "dphi_3rd"};
    std::vector<Task> tasks;
    for (double ratio : c.omega_over_j) {
        for (double v : axis_values(c, c.lambda)) {
            const RunConfig pc = at_point(c, v);
            const ising::IsingBathParams p = closed_form_bath(pc);
            const SystemParams sys(ratio * pc.j_coupling, pc.theta);
            tasks.push_back([ratio, v, p, sys] {
                const perturbative::IsingClosedForms f = perturbative::ising_closed_forms(p, sys);
                const double base = unitary_geometric_phase(sys.theta);
                return Row{{ratio, v, p.lambda, f.f2, f.F2, f.F3, f.G1, perturbative::gp_approx_ising(p, sys, 2) - base,
                            perturbative::gp_approx_ising(p, sys, 3) - base}};
            });
        }
    }
    return tasks;
}

std::vector<Task> trotter_check_tasks(const RunConfig& c, std::vector<std::string>& columns) {
    columns = {"steps", "min_fidelity", "meets_threshold"};
    const std::vector<double> grid = axis_values(c, c.b_field);
    for (double b : grid) protocol_params(at_point(c, b));
    protocol::ProtocolParams p = protocol_params(c);
    if (p.decomposition == protocol::Decomposition::Exact) p.decomposition = protocol::Decomposition::CoarseTrotter;
    const double threshold = c.fidelity_threshold;
    const int max_steps = c.max_trotter_steps;
    // one serial sweep: the search stops at the first passing step count
    return {[p, grid, threshold, max_steps] {
        const protocol::TrotterSweep s = protocol::find_min_trotter_steps(p, grid, threshold, max_steps);
        std::vector<double> flat;
        for (std::size_t i = 0; i < s.steps.size(); ++i) {
            flat.push_back(s.steps[i]);
            flat.push_back(s.min_fidelity[i]);
            flat.push_back(s.min_fidelity[i] >= threshold ? 1.0 : 0.0);
        }
        return Row{flat, s.pinned_steps > 0 ? "ok" : "no step count meets the threshold"};
    }};
}

std::vector<Task> correction_tasks(const RunConfig& c, std::vector<std::string>& columns) {
    columns = {"axis_value", "b_over_omega", "theta", "dphi_protocol", "dphi_theory"};
    std::vector<Task> tasks;
    for (double v : axis_values(c, c.b_field)) {
        const RunConfig pc = at_point(c, v);
        const protocol::ProtocolParams p = protocol_params(pc);
        const std::size_t samples = pc.samples;
        const double b = pc.b_field;
        tasks.push_back([v, p, samples, b] {
            const std::vector<double> one{b};
            const protocol::CorrectionPoint pt = protocol::correction_experiment(p, one, samples).front();
            if (!pt.ok) return Row{{}, pt.error.empty() ? "failed" : pt.error};
            return Row{{v, b / p.sys.omega, p.sys.theta, pt.dphi_protocol, pt.dphi_theory}};
        });
    }
    return tasks;
}

Row guarded(const Task& task, std::size_t width) {
    Row row;
    try {
        row = task();
    } catch (const std::exception& e) {
        row.status = e.what();
        row.values.clear();
    }
    if (row.values.size() != width) row.values.assign(width, kNan);
    return row;
}

std::vector<Row> run_tasks(const std::vector<Task>& tasks, std::size_t width, int workers) {
    std::vector<Row> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) rows[i] = guarded(tasks[i], width);
    };
    const std::size_t extra = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), tasks.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < extra; ++w) pool.emplace_back(work);
    work();
    return rows;
}

Json config_json(const RunConfig& c) {
    Json j;
    j["experiment"] = to_string(c.experiment);
    j["preset"] = c.preset;
    j["omega"] = c.omega;
    j["theta"] = c.theta;
    j["samples"] = c.samples;
    j["bath"] = to_string(c.bath);
    j["delta_gap"] = c.delta_gap;
    j["coupling"] = c.coupling;
    j["b_field"] = c.b_field;
    j["znu"] = c.znu;
    j["convention"] = name_of(kConventions, c.convention);
    j["n_spins"] = c.n_spins;
    j["j_coupling"] = c.j_coupling;
    j["lambda"] = c.lambda;
    j["ising_coupling"] = c.ising_coupling;
    j["omega_over_j"] = c.omega_over_j;
    j["decomposition"] = to_string(c.decomposition);
    j["trotter_steps"] = c.trotter_steps;
    j["fidelity_threshold"] = c.fidelity_threshold;
    j["max_trotter_steps"] = c.max_trotter_steps;
    if (c.sweep) {
        j["sweep"] = Json{{"axis", c.sweep->axis}, {"min", c.sweep->min}, {"max", c.sweep->max},
                          {"points", c.sweep->points}};
    } else {
        j["sweep"] = nullptr;
    }
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string_view to_string(Experiment e) { return name_of(kExperiments, e); }
std::string_view to_string(Format f) { return name_of(kFormats, f); }
std::string_view to_string(BathKind b) { return name_of(kBaths, b); }
std::string_view to_string(protocol::Decomposition d) { return name_of(kDecompositions, d); }

std::vector<double> Sweep::values() const {
    std::vector<double> out;
    if (points == 1) return {min};
    for (int i = 0; i < points; ++i) out.push_back(i + 1 == points ? max : min + (max - min) * i / (points - 1));
    return out;
}

void RunConfig::validate() const {
    if (workers < 1) throw ValidationError("workers must be at least 1");
    if (samples < 64) throw ValidationError("samples must be at least 64");
    if (omega_over_j.empty()) throw ValidationError("omega-over-j needs at least one value");
    for (double r : omega_over_j)
        if (!(r > 0.0)) throw ValidationError("omega-over-j values must be positive");
    if (!(fidelity_threshold > 0.0 && fidelity_threshold <= 1.0))
        throw ValidationError("fidelity threshold must lie in (0, 1]");
    if (max_trotter_steps < 1) throw ValidationError("max-trotter-steps must be at least 1");
    if (sweep) {
        if (sweep->points < 1) throw ValidationError("sweep points must be at least 1");
        if (!std::isfinite(sweep->min) || !std::isfinite(sweep->max)) throw ValidationError("sweep bounds must be finite");
        const auto axes = allowed_axes(experiment);
        if (std::find(axes.begin(), axes.end(), sweep->axis) == axes.end())
            throw ValidationError("sweep axis '" + sweep->axis + "' is not available for " +
                                  std::string(to_string(experiment)));
        if (sweep->axis == "lambda" && experiment == Experiment::GpCurve && bath != BathKind::Ising)
            throw ValidationError("the lambda axis needs --bath ising");
    }
}

std::string RunConfig::canonical() const { return config_json(*this).dump(); }

std::string RunConfig::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::size_t Table::failures() const {
    std::size_t n = 0;
    for (const Row& r : rows) n += r.status != "ok";
    return n;
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list{
        {"paper-fig1c", "two-qubit correction curve: Omega = 100 pi rad/s, Delta = 0.02 Omega, delta = 0.1 Omega, "
                        "theta = pi/4, B in [-0.2, 0.2] Omega",
         Experiment::Correction,
         [](RunConfig& c) {
             c.omega = 100.0 * kPi;
             c.delta_gap = 0.02 * c.omega;
             c.coupling = 0.1 * c.omega;
             c.theta = kPi / 4;
             c.bath = BathKind::TwoLevel;
             c.convention = two_level::CouplingConvention::ZzTarget;
             c.samples = 256;
             c.sweep = Sweep{"b-field", -0.2 * c.omega, 0.2 * c.omega, 21};
         }},
        {"paper-figA", "Ising chain: N = 100, delta = 5e-5 J, Omega/J in {1, 2, 5, 10}, lambda in [0, 2]",
         Experiment::IsingSweep,
         [](RunConfig& c) {
             c.bath = BathKind::Ising;
             c.n_spins = 100;
             c.j_coupling = 1.0;
             c.ising_coupling = 5e-5;
             c.omega_over_j = {1.0, 2.0, 5.0, 10.0};
             c.theta = kPi / 4;
             c.samples = 1024;
             c.sweep = Sweep{"lambda", 0.0, 2.0, 41};
         }},
        {"trotter-claim", "Trotter fidelity budget 0.997 over B in [-0.2, 0.2] Omega with the two-qubit parameters",
         Experiment::TrotterCheck,
         [](RunConfig& c) {
             c.omega = 100.0 * kPi;
             c.delta_gap = 0.02 * c.omega;
             c.coupling = 0.1 * c.omega;
             c.theta = kPi / 4;
             c.decomposition = protocol::Decomposition::CoarseTrotter;
             c.fidelity_threshold = 0.997;
             c.max_trotter_steps = 512;
             c.sweep = Sweep{"b-field", -0.2 * c.omega, 0.2 * c.omega, 21};
         }},
    };
    return list;
}

const Preset* find_preset(std::string_view name) {
    for (const Preset& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

Table run(const RunConfig& config) {
    config.validate();
    Table table;
    std::vector<Task> tasks;
    switch (config.experiment) {
        case Experiment::Trace: tasks = trace_tasks(config, table.columns, table.rows); break;
        case Experiment::GpCurve: tasks = gp_curve_tasks(config, table.columns); break;
        case Experiment::IsingSweep: tasks = ising_sweep_tasks(config, table.columns); break;
        case Experiment::IsingApprox: tasks = ising_approx_tasks(config, table.columns); break;
        case Experiment::TrotterCheck: tasks = trotter_check_tasks(config, table.columns); break;
        case Experiment::Correction: tasks = correction_tasks(config, table.columns); break;
    }
    if (config.experiment == Experiment::TrotterCheck) {
        // the single task returns every step count flattened into one row
        Row all;
        try {
            all = tasks.front()();
        } catch (const std::exception& e) {
            all = Row{{}, e.what()};
        }
        for (std::size_t i = 0; i + 2 < all.values.size(); i += 3)
            table.rows.push_back({{all.values[i], all.values[i + 1], all.values[i + 2]}, "ok"});
        if (all.status != "ok") table.rows.push_back({{kNan, kNan, kNan}, all.status});
        return table;
    }
    if (!tasks.empty()) table.rows = run_tasks(tasks, table.columns.size(), config.workers);
    return table;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const RunConfig& config, const Table& table) {
    const std::string hash = config.hash();
    std::string line;
    for (const std::string& c : table.columns) line += c + ",";
    out << line << "status,config_hash\n";
    for (const Row& r : table.rows) {
        line.clear();
        for (double v : r.values) line += format_double(v) + ",";
        out << line << csv_field(r.status) << "," << hash << "\n";
    }
}

void write_json(std::ostream& out, const RunConfig& config, const Table& table) {
    Json doc;
    doc["config"] = config_json(config);
    Json prov;
    prov["version"] = kVersion;
    prov["config_hash"] = config.hash();
    if (config.timestamp) prov["timestamp"] = utc_timestamp();
    Json cols = Json::array();
    for (const std::string& c : table.columns) cols.push_back(c);
    cols.push_back("status");
    cols.push_back("config_hash");
    prov["columns"] = cols;
    doc["provenance"] = prov;
    Json rows = Json::array();
    for (const Row& r : table.rows) {
        Json row = Json::array();
        for (double v : r.values) row.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
        row.push_back(r.status);
        row.push_back(config.hash());
        rows.push_back(row);
    }
    doc["rows"] = rows;
    out << doc.dump(2) << "\n";
}

namespace {

// Binds a command-line option to a RunConfig field, applied only when given.
class Binder {
public:
    explicit Binder(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* field(const std::string& flag, T RunConfig::*member, const std::string& help) {
        auto store = std::make_shared<T>();
        CLI::Option* opt = app_->add_option(flag, *store, help);
        appliers_.push_back([opt, store, member](RunConfig& c) {
            if (opt->count() > 0) c.*member = *store;
        });
        return opt;
    }

    template <class Enum>
    CLI::Option* choice(const std::string& flag, Enum RunConfig::*member, const std::map<std::string, Enum>& table,
                        const std::string& help) {
        auto store = std::make_shared<std::string>();
        std::vector<std::string> names;
        for (const auto& entry : table) names.push_back(entry.first);
        CLI::Option* opt = app_->add_option(flag, *store, help)->check(CLI::IsMember(names));
        appliers_.push_back([opt, store, member, &table](RunConfig& c) {
            if (opt->count() > 0) c.*member = table.at(*store);
        });
        return opt;
    }

    void apply(RunConfig& c) const {
        for (const auto& f : appliers_) f(c);
    }

private:
    CLI::App* app_;
    std::vector<std::function<void(RunConfig&)>> appliers_;
};

struct SubcommandState {
    CLI::App* app = nullptr;
    Experiment experiment{};
    std::unique_ptr<Binder> binder;
    std::string preset;
    std::string sweep_axis;
    double sweep_min = 0.0;
    double sweep_max = 0.0;
    int sweep_points = 1;
    CLI::Option* axis_opt = nullptr;
    CLI::Option* min_opt = nullptr;
    CLI::Option* max_opt = nullptr;
    CLI::Option* points_opt = nullptr;
};

void add_options(SubcommandState& s) {
    s.binder = std::make_unique<Binder>(s.app);
    Binder& b = *s.binder;
    s.app->add_option("--preset", s.preset, "Start from a named preset (see 'presets')");
    b.field("--output,-o", &RunConfig::output, "Output file (default: stdout)");
    b.choice("--format", &RunConfig::format, kFormats, "csv or json");
    b.field("--workers,-j", &RunConfig::workers, "Worker threads")->envname("GPHASE_WORKERS");
    b.field("--keep-going", &RunConfig::keep_going, "Exit 0 even when some points fail")->expected(0, 1)
        ->default_str("true");
    b.field("--timestamp", &RunConfig::timestamp, "Record the wall-clock time in JSON provenance")->expected(0, 1)
        ->default_str("true");

    b.field("--theta", &RunConfig::theta, "Polar angle of the initial system state");
    b.field("--omega", &RunConfig::omega, "System frequency Omega (rad/s)");
    b.field("--samples", &RunConfig::samples, "Time intervals per cycle");
    b.choice("--bath", &RunConfig::bath, kBaths, "two-level or ising");
    b.field("--delta-gap", &RunConfig::delta_gap, "Transverse term Delta of the two-level bath");
    b.field("--coupling", &RunConfig::coupling, "System-bath coupling delta (two-level bath)");
    b.field("--b-field", &RunConfig::b_field, "Longitudinal field B of the two-level bath");
    b.field("--znu", &RunConfig::znu, "Gap exponent z nu of the two-level bath");
    b.choice("--convention", &RunConfig::convention, kConventions, "zz or projector coupling branches");
    b.field("--n-spins", &RunConfig::n_spins, "Ising chain length N");
    b.field("--j-coupling", &RunConfig::j_coupling, "Ising exchange J");
    b.field("--lambda", &RunConfig::lambda, "Ising transverse field lambda");
    b.field("--ising-coupling", &RunConfig::ising_coupling, "Ising field shift delta in units of J");
    b.field("--omega-over-j", &RunConfig::omega_over_j, "One or more Omega/J ratios");
    b.choice("--decomposition", &RunConfig::decomposition, kDecompositions, "exact, trotter or pulse");
    b.field("--trotter-steps", &RunConfig::trotter_steps, "Trotter steps per cycle");
    b.field("--fidelity-threshold", &RunConfig::fidelity_threshold, "Cycle fidelity budget for trotter-check");
    b.field("--max-trotter-steps", &RunConfig::max_trotter_steps, "Largest step count tried by trotter-check");

    s.axis_opt = s.app->add_option("--sweep-axis", s.sweep_axis, "b-field, theta, coupling, omega, lambda, ising-coupling");
    s.min_opt = s.app->add_option("--sweep-min", s.sweep_min, "First sweep value");
    s.max_opt = s.app->add_option("--sweep-max", s.sweep_max, "Last sweep value");
    s.points_opt = s.app->add_option("--sweep-points", s.sweep_points, "Number of sweep values");
}

RunConfig assemble(const SubcommandState& s) {
    RunConfig c;
    c.experiment = s.experiment;
    if (!s.preset.empty()) {
        const Preset* p = find_preset(s.preset);
        if (p == nullptr) throw ConfigParseError("unknown preset '" + s.preset + "'");
        p->apply(c);
        c.preset = p->name;
    }
    s.binder->apply(c);
    const bool any_sweep = s.axis_opt->count() + s.min_opt->count() + s.max_opt->count() + s.points_opt->count() > 0;
    if (any_sweep) {
        if (!c.sweep && s.axis_opt->count() == 0) throw ConfigParseError("--sweep-axis is required to start a sweep");
        Sweep sw = c.sweep.value_or(Sweep{});
        if (s.axis_opt->count()) sw.axis = s.sweep_axis;
        if (s.min_opt->count()) sw.min = s.sweep_min;
        if (s.max_opt->count()) sw.max = s.sweep_max;
        if (s.points_opt->count()) sw.points = s.sweep_points;
        c.sweep = sw;
    }
    return c;
}

}  // namespace

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Geometric phase of a qubit coupled to a critical environment"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // CLI11 keeps pointers into each state, so the states must not move
    std::vector<std::unique_ptr<SubcommandState>> subs;
    const std::vector<std::pair<std::string, std::string>> descriptions{
        {"trace", "Decoherence factor r(t) over one cycle"},
        {"gp-curve", "Geometric phase and its bath correction"},
        {"ising-sweep", "Exact and perturbative corrections over the Ising field, normalised by N delta^2"},
        {"ising-approx", "Ising closed-form integrals and the order-2/3 corrections"},
        {"trotter-check", "Smallest power-of-two Trotter step count meeting the fidelity budget"},
        {"correction", "Baseline-subtracted correction from the simulated two-qubit protocol"},
    };
    for (const auto& [name, help] : descriptions) {
        auto s = std::make_unique<SubcommandState>();
        s->app = app.add_subcommand(name, help);
        s->experiment = kExperiments.at(name);
        add_options(*s);
        subs.push_back(std::move(s));
    }
    CLI::App* list = app.add_subcommand("presets", "List the named presets");

    std::vector<std::string> argv_store{"gphase"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (list->parsed()) {
        for (const Preset& p : presets()) out << p.name << "\t" << to_string(p.default_experiment) << "\t" << p.description << "\n";
        return 0;
    }

    RunConfig config;
    try {
        for (const auto& s : subs)
            if (s->app->parsed()) config = assemble(*s);
    } catch (const ConfigParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    Table table;
    try {
        table = run(config);
    } catch (const ValidationError& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "run failed: " << e.what() << "\n";
        return 1;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!config.output.empty()) {
        file.open(config.output, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "cannot open " << config.output << " for writing\n";
            return 1;
        }
        sink = &file;
    }
    if (config.format == Format::Csv) write_csv(*sink, config, table);
    else write_json(*sink, config, table);
    sink->flush();
    if (!*sink) {
        err << "write failed\n";
        return 1;
    }

    const std::size_t failed = table.failures();
    if (failed > 0) {
        err << failed << " point(s) failed\n";
        if (!config.keep_going) return 1;
    }
    return 0;
}

}  // namespace gphase::cli
