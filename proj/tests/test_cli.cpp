#include "doctest.h"
#include "support.hpp"

#include "gphase/bath_two_level.hpp"
#include "gphase/cli.hpp"

#include <json.hpp>

#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>

using namespace gphase;
using testsupport::kPi;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::main_entry(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("presets") {
    const auto& list = cli::presets();
    REQUIRE(list.size() == 3);
    CHECK(list[0].name == "paper-fig1c");
    CHECK(list[1].name == "paper-figA");
    CHECK(list[2].name == "trotter-claim");

    cli::RunConfig a;
    cli::find_preset("paper-figA")->apply(a);
    CHECK(a.n_spins == 100);
    CHECK(a.ising_coupling == 5e-5);
    CHECK(a.omega_over_j == std::vector<double>{1.0, 2.0, 5.0, 10.0});

    cli::RunConfig c;
    cli::find_preset("paper-fig1c")->apply(c);
    CHECK(c.theta == doctest::Approx(kPi / 4).epsilon(1e-15));
    CHECK(c.omega == doctest::Approx(100 * kPi).epsilon(1e-15));
    CHECK(c.delta_gap == doctest::Approx(0.02 * c.omega));
    CHECK(c.coupling == doctest::Approx(0.1 * c.omega));
    REQUIRE(c.sweep.has_value());
    CHECK(c.sweep->points == 21);

    CHECK(cli::find_preset("nope") == nullptr);
    const Result listed = invoke({"presets"});
    CHECK(listed.code == 0);
    CHECK(split_lines(listed.out).size() == 3);
}

TEST_CASE("sweep values") {
    const cli::Sweep s{"b-field", -1.0, 1.0, 5};
    const auto v = s.values();
    REQUIRE(v.size() == 5);
    CHECK(v.front() == -1.0);
    CHECK(v[2] == 0.0);
    CHECK(v.back() == 1.0);
    CHECK(cli::Sweep{"theta", 0.3, 2.0, 1}.values() == std::vector<double>{0.3});
}

TEST_CASE("gp-curve matches the library call") {
    const Result r = invoke({"gp-curve", "--theta", "0.7853981634", "--omega", "314.159", "--delta-gap", "6.2832",
                             "--coupling", "31.416", "--b-field", "15.708", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["rows"].size() == 1);
    const auto& row = doc["rows"][0];
    const SystemParams sys(314.159, 0.7853981634);
    const auto base = two_level::TwoLevelBathParams::from_field(15.708, 6.2832, 31.416);
    const std::vector<double> one{15.708};
    const auto pt = two_level::gp_correction_curve(one, base, sys, 256).front();
    REQUIRE(pt.ok);
    CHECK(row[2].get<double>() == pt.coupled.phi_total);
    CHECK(row[5].get<double>() == pt.delta_phi);
    CHECK(row[8].get<std::string>() == "ok");
    CHECK(doc["provenance"]["version"] == cli::kVersion);
    CHECK(!doc["provenance"].contains("timestamp"));
    CHECK(doc["config"]["theta"].get<double>() == 0.7853981634);
}

TEST_CASE("CSV layout") {
    const Result r = invoke({"correction", "--preset", "paper-fig1c", "--sweep-points", "3"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "axis_value,b_over_omega,theta,dphi_protocol,dphi_theory,status,config_hash");
    std::string hash;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string tail = lines[i].substr(lines[i].rfind(',') + 1);
        if (hash.empty()) hash = tail;
        CHECK(tail == hash);
        CHECK(tail.size() == 16);
    }
    CHECK(cli::format_double(0.1) == "0.10000000000000001");
    CHECK(cli::format_double(-0.25) == "-0.25");
    CHECK(cli::format_double(1e-300) == "1e-300");
}

TEST_CASE("CSV is independent of the global locale") {
    const std::string before = invoke({"gp-curve", "--b-field", "3.0"}).out;
    bool switched = false;
    for (const char* name : {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE", "C.UTF-8"}) {
        try {
            std::locale::global(std::locale(name));
            std::setlocale(LC_ALL, name);
            switched = true;
            break;
        } catch (const std::runtime_error&) {
        }
    }
    const std::string after = invoke({"gp-curve", "--b-field", "3.0"}).out;
    std::locale::global(std::locale::classic());
    std::setlocale(LC_ALL, "C");
    if (switched) CHECK(before == after);
}

TEST_CASE("repeated runs are byte identical") {
    const std::vector<std::string> fig1c{"correction", "--preset", "paper-fig1c"};
    const Result a = invoke(fig1c);
    const Result b = invoke(fig1c);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const Result j1 = invoke(with(fig1c, {"--format", "json"}));
    const Result j2 = invoke(with(fig1c, {"--format", "json"}));
    CHECK(j1.out == j2.out);
}

TEST_CASE("worker count does not change the output") {
    const std::vector<std::vector<std::string>> runs{
        {"correction", "--preset", "paper-fig1c"},
        {"ising-sweep", "--preset", "paper-figA", "--omega-over-j", "1", "2", "--sweep-points", "9", "--samples", "256"},
        {"gp-curve", "--sweep-axis", "theta", "--sweep-min", "0.2", "--sweep-max", "2.9", "--sweep-points", "12"},
        {"ising-approx", "--sweep-axis", "lambda", "--sweep-min", "0.1", "--sweep-max", "1.9", "--sweep-points", "7"},
    };
    for (const auto& run : runs) {
        const Result serial = invoke(with(run, {"--workers", "1"}));
        const Result parallel = invoke(with(run, {"--workers", "8"}));
        REQUIRE(serial.code == 0);
        CHECK(serial.out == parallel.out);
    }
}

TEST_CASE("config hash covers physics only") {
    cli::RunConfig a;
    cli::RunConfig b = a;
    b.workers = 8;
    b.output = "elsewhere.csv";
    b.format = cli::Format::Json;
    b.timestamp = true;
    CHECK(a.hash() == b.hash());
    b.theta = 1.0;
    CHECK(a.hash() != b.hash());
    cli::RunConfig c = a;
    c.sweep = cli::Sweep{"b-field", 0.0, 1.0, 3};
    CHECK(a.hash() != c.hash());
}

TEST_CASE("results are invariant under a common frequency scale") {
    auto run = [](double scale) {
        cli::RunConfig c;
        c.experiment = cli::Experiment::GpCurve;
        c.omega = 100 * kPi * scale;
        c.delta_gap = 0.02 * c.omega;
        c.coupling = 0.1 * c.omega;
        c.sweep = cli::Sweep{"b-field", -0.2 * c.omega, 0.2 * c.omega, 9};
        return cli::run(c);
    };
    const cli::Table base = run(1.0);
    const cli::Table scaled = run(10.0);
    REQUIRE(base.rows.size() == scaled.rows.size());
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
        CHECK(std::abs(base.rows[i].values[2] - scaled.rows[i].values[2]) < 1e-10);
        CHECK(std::abs(base.rows[i].values[5] - scaled.rows[i].values[5]) < 1e-10);
    }
}

TEST_CASE("exit codes") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"trace", "--no-such-flag"}).code == 2);
    CHECK(invoke({"trace", "--format", "xml"}).code == 2);
    CHECK(invoke({"trace", "--preset", "unknown"}).code == 2);
    CHECK(invoke({"gp-curve", "--sweep-min", "0"}).code == 2);
    CHECK(invoke({"trace", "--samples", "8"}).code == 3);
    CHECK(invoke({"trace", "--delta-gap", "-1"}).code == 3);
    CHECK(invoke({"gp-curve", "--theta", "4"}).code == 3);
    CHECK(invoke({"trace", "--sweep-axis", "theta"}).code == 3);
    CHECK(invoke({"ising-sweep", "--lambda", "-0.5"}).code == 3);
    CHECK(invoke({"correction", "--trotter-steps", "0"}).code == 3);
    CHECK(invoke({"gp-curve", "--workers", "0"}).code == 3);
    CHECK(invoke({"--version"}).code == 0);

    // a point whose trace cannot be unwrapped fails on its own
    const std::vector<std::string> bad{"gp-curve", "--bath", "ising", "--n-spins", "2000", "--ising-coupling", "0.5",
                                       "--omega", "0.05", "--sweep-axis", "lambda", "--sweep-min", "3.0",
                                       "--sweep-max", "1.0", "--sweep-points", "2"};
    const Result failing = invoke(bad);
    CHECK(failing.code == 1);
    const Result kept = invoke(with(bad, {"--keep-going"}));
    CHECK(kept.code == 0);
    const auto lines = split_lines(kept.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].find(",ok,") != std::string::npos);
    CHECK(lines[2].rfind("nan,", 0) == 0);
    CHECK(lines[2].find("build_trace") != std::string::npos);
}

TEST_CASE("worker count from the environment") {
    ::setenv("GPHASE_WORKERS", "0", 1);
    CHECK(invoke({"gp-curve"}).code == 3);
    ::setenv("GPHASE_WORKERS", "3", 1);
    CHECK(invoke({"gp-curve"}).code == 0);
    CHECK(invoke({"gp-curve", "--workers", "0"}).code == 3);
    ::unsetenv("GPHASE_WORKERS");
}

TEST_CASE("output file, timestamp and the trotter check") {
    const auto path = std::filesystem::temp_directory_path() / "gphase_cli_test.json";
    const Result r = invoke({"trotter-check", "--preset", "trotter-claim", "--format", "json", "--timestamp",
                             "--output", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    const auto doc = nlohmann::json::parse(in);
    CHECK(doc["provenance"].contains("timestamp"));
    const auto& rows = doc["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0].get<double>() == protocol::kPinnedTrotterSteps);
    CHECK(rows[1][1].get<double>() >= 0.997);
    CHECK(rows[0][1].get<double>() < 0.997);
    std::filesystem::remove(path);

    CHECK(invoke({"trace", "--output", "/nonexistent-dir/x.csv"}).code == 1);
}

TEST_CASE("trace rows") {
    const Result r = invoke({"trace", "--samples", "64", "--b-field", "15.7"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    CHECK(lines[0] == "t,r_re,r_im,r_abs,phase,status,config_hash");
    CHECK(lines.size() == 66);
    CHECK(lines[1].rfind("0,1,0,1,", 0) == 0);
}
