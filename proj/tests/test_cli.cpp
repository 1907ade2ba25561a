#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pbp_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

int pbp(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + PBP_BINARY + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Data rows of a CSV written by the tool, metadata and header removed.
std::vector<std::vector<double>> rows(const fs::path& p, std::string* header = nullptr) {
    std::ifstream is(p);
    std::string line;
    std::vector<std::vector<double>> out;
    bool seen_header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!seen_header) {
            seen_header = true;
            if (header) {
                *header = line;
            }
            continue;
        }
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            r.push_back(std::stod(cell));
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace

TEST_CASE("simulate writes reproducible solution files", "[cli]") {
    TempDir a;
    TempDir b;
    REQUIRE(pbp("simulate --scenario sys3d --seed 7 --grid-h 1e-3 --out " + a.path.string()) == 0);
    REQUIRE(pbp("simulate --scenario sys3d --seed 7 --grid-h 1e-3 --out " + b.path.string()) == 0);
    for (const char* name : {"sys3d_seed7_strong.csv", "sys3d_seed7_nonadapted.csv", "sys3d_seed7_strong.json"}) {
        REQUIRE(fs::exists(a.path / name));
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
    std::string header;
    const auto strong = rows(a.path / "sys3d_seed7_strong.csv", &header);
    const auto nonadapted = rows(a.path / "sys3d_seed7_nonadapted.csv");
    CHECK(header == "t,X1,X2,X3,B1,B2,B3");
    REQUIRE(strong.size() == nonadapted.size());
    for (std::size_t k = 0; k < strong.size(); ++k) {
        REQUIRE(strong[k][4] == nonadapted[k][4]);
        REQUIRE(strong[k][6] == nonadapted[k][6]);
    }
    const auto side = nlohmann::json::parse(slurp(a.path / "sys3d_seed7_nonadapted.json"));
    CHECK(side.at("schema") == "pbp.solution/1");
    CHECK(side.at("construction") == "nonadapted3d");

    REQUIRE(pbp("simulate --scenario helper_bridge --seed 3 --sign 1 --grid-h 1e-3 --out " + a.path.string()) == 0);
    const auto helper = rows(a.path / "helper_bridge_seed3_pos.csv");
    CHECK(helper.back()[0] == 1.0);
    CHECK(helper.back()[1] == 1.0);
}

TEST_CASE("verify exit codes and report", "[cli]") {
    TempDir d;
    const auto report = d.path / "r.json";
    CHECK(pbp("verify --scenario girsanov --n-seeds 100 --out " + report.string()) == 0);
    CHECK(pbp("verify --scenario girsanov --n-seeds 100 --strict --out " + report.string()) == 1);
    const auto js = nlohmann::json::parse(slurp(report));
    CHECK(js.at("schema") == "pbp.report/1");
    CHECK(js.at("artifact_version") == "1.0.0");
    bool found = false;
    for (const auto& c : js.at("checks")) {
        if (c.at("name") == "girsanov_normalization") {
            found = true;
            CHECK(c.at("status") == "inconclusive");
            CHECK(c.at("criterion") == 4);
        }
    }
    CHECK(found);
}

TEST_CASE("a reduced suite from an INI file", "[cli]") {
    TempDir d;
    const auto ini = d.path / "small.ini";
    std::ofstream(ini) << "[global]\nseed = 99\nn_seeds = 40\n[scheme]\nh = 1e-3\n"
                          "[helper_bridge]\nks_seeds = 300\n"
                          "[sys2d]\nresidual_seeds = 3\n"
                          "[sys3d]\ndup_seeds = 40\ndesk_seeds = 5\nresidual_seeds = 2\n"
                          "bruteforce_pairs = 100000\nbruteforce_tol = 0.01\nstat_tol = 0.5\n"
                          "[nosol_probe]\nn_seeds = 5\n"
                          "[heat_regression]\nn_seeds = 2000\nmin_count = 20\nbin_lo = -1\nbin_hi = 1\n"
                          "bin_width = 0.5\ntol = 0.2\n";
    const auto report = d.path / "suite.json";
    const int code = pbp("verify --suite all --config " + ini.string() + " --out " + report.string());
    REQUIRE(fs::exists(report));
    const auto js = nlohmann::json::parse(slurp(report));
    std::size_t fails = 0;
    for (const auto& c : js.at("checks")) {
        fails += c.at("status") == "fail";
        if (c.at("scenario") == "sys2d") {
            CHECK(c.at("n").get<std::size_t>() <= 40);
        }
    }
    CHECK(code == (fails > 0 ? 1 : 0));
    CHECK(js.at("config").size() == 7);
    CHECK(js.at("config")[0].at("base_seed") == 99);

    const int overridden = pbp("verify --scenario sys2d --seed 5 --n-seeds 12 --config " + ini.string() + " --out " +
                               report.string());
    CHECK(overridden == 0);
    const auto js2 = nlohmann::json::parse(slurp(report));
    CHECK(js2.at("config")[0].at("base_seed") == 5);
    CHECK(js2.at("config")[0].at("n_seeds") == 12);
}

TEST_CASE("usage errors", "[cli]") {
    CHECK(pbp("") == 2);
    CHECK(pbp("frobnicate") == 2);
    CHECK(pbp("verify --scenario nope") == 2);
    CHECK(pbp("simulate --scenario sys3d") == 2);
    CHECK(pbp("simulate --scenario helper_bridge --seed 1 --sign 0") == 2);
    CHECK(pbp("verify --scenario sys2d --n-seeds 0") == 2);
    CHECK(pbp("oracle nothing") == 2);
    CHECK(pbp("sweep --scenario girsanov --n-seeds 2") == 2);
}

TEST_CASE("oracle tables", "[cli]") {
    TempDir d;
    const auto heat = d.path / "heat.csv";
    REQUIRE(pbp("oracle heat_sgn --min -3 --max 3 --step 0.1 --out " + heat.string()) == 0);
    const auto h = rows(heat);
    REQUIRE(h.size() == 61);
    for (std::size_t i = 0; i < h.size(); ++i) {
        REQUIRE(std::abs(h[i][1] + h[h.size() - 1 - i][1]) <= 1e-15);
    }
    CHECK(std::abs(h[40][1] - 0.8427007929) <= 1e-6);

    REQUIRE(pbp("oracle bes3_marginal --t 0.3", "PBP_OUT_DIR=" + d.path.string()) == 0);
    const auto b = rows(d.path / "oracle_bes3_marginal.csv");
    REQUIRE(b.size() == 201);
    for (std::size_t i = 1; i < b.size(); ++i) {
        REQUIRE(b[i][1] >= b[i - 1][1]);
    }
    CHECK(b.front()[1] == 0.0);
    CHECK(b.back()[1] > 0.999999);
}

TEST_CASE("sweep output", "[cli]") {
    TempDir d;
    REQUIRE(pbp("sweep --scenario zero --n-seeds 5 --h-values 0.01,0.001", "PBP_OUT_DIR=" + d.path.string()) == 0);
    const auto js = nlohmann::json::parse(slurp(d.path / "sweep_zero.json"));
    CHECK(js.at("schema") == "pbp.sweep/1");
    CHECK(js.at("rows").size() == 2);
}
