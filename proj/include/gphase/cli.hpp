// cli.hpp: Run configuration, presets and tabular output for the gphase tool

#pragma once

#include "gphase/bath_two_level.hpp"
#include "gphase/trotter_protocol.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gphase::cli {

inline constexpr const char* kVersion = "1.0.0";

enum class Experiment { Trace, GpCurve, IsingSweep, IsingApprox, TrotterCheck, Correction };
enum class Format { Csv, Json };
enum class BathKind { TwoLevel, Ising };

std::string_view to_string(Experiment e);
std::string_view to_string(Format f);
std::string_view to_string(BathKind b);
std::string_view to_string(protocol::Decomposition d);

struct Sweep {
    std::string axis;  // b-field, theta, coupling or lambda
    double min = 0.0;
    double max = 0.0;
    int points = 1;

    std::vector<double> values() const;
};

struct RunConfig {
    Experiment experiment = Experiment::GpCurve;

    // system qubit
    double omega = 314.15926535897932;
    double theta = 0.78539816339744831;
    std::size_t samples = 256;  // trace intervals per cycle

    // two-level bath
    BathKind bath = BathKind::TwoLevel;
    double delta_gap = 6.2831853071795865;
    double coupling = 31.415926535897932;
    double b_field = 0.0;
    double znu = 1.0;
    two_level::CouplingConvention convention = two_level::CouplingConvention::ZzTarget;

    // Ising bath
    int n_spins = 100;
    double j_coupling = 1.0;
    double lambda = 0.5;
    double ising_coupling = 5e-5;
    std::vector<double> omega_over_j{1.0};

    // protocol
    protocol::Decomposition decomposition = protocol::Decomposition::Exact;
    int trotter_steps = protocol::kPinnedTrotterSteps;
    double fidelity_threshold = 0.997;
    int max_trotter_steps = 512;

    std::optional<Sweep> sweep;

    // run control; not part of the hash
    std::string output;  // empty writes to stdout
    Format format = Format::Csv;
    int workers = 1;
    bool keep_going = false;
    bool timestamp = false;
    std::string preset;

    /// Throws ValidationError before any work is dispatched.
    void validate() const;
    /// Stable text form of every result-affecting field.
    std::string canonical() const;
    /// 64-bit FNV-1a of canonical(), 16 hex digits.
    std::string hash() const;
};

struct Preset {
    std::string name;
    std::string description;
    Experiment default_experiment;
    std::function<void(RunConfig&)> apply;
};

const std::vector<Preset>& presets();
const Preset* find_preset(std::string_view name);

struct Row {
    std::vector<double> values;
    std::string status = "ok";
};

struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;

    std::size_t failures() const;
};

/// Runs the configured experiment; rows come back in input order for any worker count.
Table run(const RunConfig& config);

/// 17 significant digits, '.' decimal point, independent of the global locale.
std::string format_double(double v);

void write_csv(std::ostream& out, const RunConfig& config, const Table& table);
void write_json(std::ostream& out, const RunConfig& config, const Table& table);

/// Whole command line: parse, validate, run, write. Returns the process exit code
/// (0 success, 1 runtime failure, 2 parse error, 3 validation error).
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gphase::cli
