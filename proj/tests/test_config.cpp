#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "fwmav/checks.hpp"
#include "fwmav/config.hpp"

using namespace fwmav;
namespace fs = std::filesystem;

namespace {

const std::string kConfigDir = FWMAV_CONFIG_DIR;
const std::string kCli = FWMAV_CLI_PATH;

int run_cli(const std::string& args) {
    const int rc =
        std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path make_tmpdir() {
    const fs::path d =
        fs::temp_directory_path() / ("fwmav_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("config round trip is exact") {
    const RunConfig a = load_config(kConfigDir + "/tumble.json");
    const RunConfig b = parse_config(serialize_config(a));
    CHECK(a == b);
    // and stable under a second pass
    CHECK(serialize_config(a) == serialize_config(b));

    const RunConfig g = load_config(kConfigDir + "/gait.json");
    CHECK(g == parse_config(serialize_config(g)));
    CHECK(g.forces.provider == "linear_damping");
    CHECK(g.gait.amplitude == 0.05);
}

TEST_CASE("parse errors name the offending field") {
    const std::string good = slurp(kConfigDir + "/tumble.json");

    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_config(text);
            FAIL("expected ConfigError for ", needle);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error("{not json", "parse error");
    expect_error("{}", "params");

    std::string neg_mass = good;
    const auto pos = neg_mass.find("\"m_B\": 1.2");
    REQUIRE(pos != std::string::npos);
    neg_mass.replace(pos, 10, "\"m_B\": -1.2");
    expect_error(neg_mass, "m_B");

    std::string bad_dt = good;
    const auto dpos = bad_dt.find("\"dt\": 0.001");
    REQUIRE(dpos != std::string::npos);
    bad_dt.replace(dpos, 11, "\"dt\": 0.5");
    expect_error(bad_dt, "dt");

    std::string bad_method = good;
    const auto mpos = bad_method.find("\"method\": \"mk4\"");
    REQUIRE(mpos != std::string::npos);
    bad_method.replace(mpos, 15, "\"method\": \"euler\"");
    expect_error(bad_method, "method");
}

TEST_CASE("matrix attitude input is accepted") {
    std::string text = slurp(kConfigDir + "/tumble.json");
    const Rotation R = exp_so3(Vec3(0.3, 0.2, 0.1));
    std::ostringstream m;
    m << "{\"matrix\": [";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            m << R.matrix()(r, c) << (r == 2 && c == 2 ? "]}" : ", ");
    const std::string aa = "{\"axis_angle\": [0.3, 0.2, 0.1]}";
    const auto pos = text.find(aa);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, aa.size(), m.str());

    const RunConfig cfg = parse_config(text);
    CHECK((cfg.initial.attitude_aa - Vec3(0.3, 0.2, 0.1)).norm() < 1e-6);
    CHECK((cfg.initial_state().R_BI.matrix() - R.matrix()).norm() < 1e-6);
}

TEST_CASE("initial_state is internally consistent") {
    const RunConfig cfg = load_config(kConfigDir + "/tumble.json");
    const ReducedState st = cfg.initial_state();
    CHECK((st.pose.Gamma - st.R_BI.transposed() * Vec3(0, 0, 1)).norm() <
          1e-15);
    CHECK((st.pose.r - st.R_BI.transposed() * st.r_I).norm() < 1e-15);
    CHECK((st.r_I - cfg.initial.r_I).norm() == 0.0);
    CHECK(st.t == 0.0);
}

TEST_CASE("trajectory CSV schema") {
    const InertialParams p = checks::default_params();
    std::mt19937_64 rng(5);
    const ReducedState st0 = checks::random_state(rng);
    IntegratorConfig cfg{1e-3, Method::MK4, 5};
    const Trajectory traj =
        simulate(p, st0, zero_force_provider(), GaitSpec{}, cfg, 0.05);

    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream in(os.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("t,", 0) == 0);
    const auto count_fields = [](const std::string& s) {
        return 1 + std::count(s.begin(), s.end(), ',');
    };
    CHECK(count_fields(line) == 36);

    size_t rows = 0;
    while (std::getline(in, line)) {
        CHECK(count_fields(line) == 36);
        std::istringstream fields(line);
        std::string tok;
        while (std::getline(fields, tok, ',')) {
            CHECK(std::isfinite(std::stod(tok)));
        }
        ++rows;
    }
    CHECK(rows == traj.samples.size());
}

TEST_CASE("summary JSON fields") {
    const InertialParams p = checks::default_params();
    std::mt19937_64 rng(6);
    IntegratorConfig icfg{1e-3, Method::MK4, 10};
    const Trajectory traj = simulate(p, checks::random_state(rng),
                                     zero_force_provider(), GaitSpec{}, icfg,
                                     0.2);
    const RunSummary s = summarize(traj, 0.123, 200);
    CHECK(s.steps == 200);
    CHECK(s.energy_drift_rel < 1e-9);
    const std::string js = serialize_summary(s);
    for (const char* key :
         {"energy_drift_rel", "pi_z_drift_rel", "gamma_norm_err_max",
          "gamma_consistency_max", "steps", "wall_time_s"}) {
        CHECK(js.find(key) != std::string::npos);
    }
}

TEST_CASE("cli simulate writes outputs and is deterministic") {
    const fs::path tmp = make_tmpdir();
    RunConfig cfg = load_config(kConfigDir + "/tumble.json");
    cfg.duration = 0.05;
    cfg.output.trajectory_csv = (tmp / "a.csv").string();
    cfg.output.summary_json = (tmp / "a.json").string();
    const fs::path cfg_path = tmp / "run.json";
    std::ofstream(cfg_path) << serialize_config(cfg);

    CHECK(run_cli("simulate --config " + cfg_path.string()) == 0);
    REQUIRE(fs::exists(tmp / "a.csv"));
    REQUIRE(fs::exists(tmp / "a.json"));
    const std::string first = slurp(tmp / "a.csv");

    CHECK(run_cli("simulate --config " + cfg_path.string()) == 0);
    CHECK(slurp(tmp / "a.csv") == first);  // byte-identical rerun

    // overrides change the output, not the exit status
    CHECK(run_cli("simulate --config " + cfg_path.string() + " --out " +
                  (tmp / "b.csv").string() + " --duration 0.02") == 0);
    CHECK(fs::exists(tmp / "b.csv"));
    CHECK(slurp(tmp / "b.csv") != first);

    fs::remove_all(tmp);
}

TEST_CASE("cli rejects a broken config") {
    const fs::path tmp = make_tmpdir();
    const fs::path bad = tmp / "bad.json";
    std::ofstream(bad) << "{\"params\": {}}\n";
    CHECK(run_cli("simulate --config " + bad.string()) == 3);
    CHECK(run_cli("simulate --config " + (tmp / "missing.json").string()) == 3);
    fs::remove_all(tmp);
}

TEST_CASE("cli check --only filters suites") {
    const std::string cfg = kConfigDir + "/tumble.json";
    CHECK(run_cli("check --config " + cfg + " --only free_fall") == 0);
    CHECK(run_cli("check --config " + cfg + " --only no_such_suite") == 1);
}

TEST_CASE("cli compare-oracle short horizon") {
    const fs::path tmp = make_tmpdir();
    const std::string cfg = kConfigDir + "/tumble.json";
    const fs::path out = tmp / "err.csv";
    CHECK(run_cli("compare-oracle --config " + cfg + " --horizon 0.05 --out " +
                  out.string()) == 0);
    const std::string series = slurp(out);
    CHECK(series.rfind("t,rel_state_error\n", 0) == 0);
    CHECK(run_cli("compare-oracle --config " + cfg + " --horizon 0") == 0);
    fs::remove_all(tmp);
}
