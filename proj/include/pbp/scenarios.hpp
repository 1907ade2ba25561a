#pragma once

#include "pbp/integrator.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <exception>
#include <map>
#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace pbp {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kReportSchema = "pbp.report/1";
inline constexpr const char* kSweepSchema = "pbp.sweep/1";

enum class Status { pass, fail, inconclusive };

std::string to_string(Status s);

struct CheckResult {
    std::string name;
    std::string scenario;
    /// Acceptance criterion number, 0 for supporting checks.
    int criterion = 0;
    double statistic = 0.0;
    std::optional<std::array<double, 2>> ci;
    std::optional<double> p_value;
    std::string threshold;
    std::size_t n = 0;
    Status status = Status::fail;
    nlohmann::json details = nlohmann::json::object();
};

struct ScenarioConfig {
    std::string scenario;
    std::size_t n_seeds = 0;
    std::uint64_t base_seed = 20240601;
    SchemeOptions scheme;
    /// Scenario-specific tunables; every key must be one the scenario declares.
    std::map<std::string, double> params;
    unsigned workers = 1;
};

const std::vector<std::string>& scenario_ids();

/// Defaults for `scenario` (n_seeds and every declared param). Throws
/// std::invalid_argument for an unknown id.
ScenarioConfig default_config(const std::string& scenario);

/// Throws std::invalid_argument when the config cannot be run.
void validate(const ScenarioConfig& cfg);

nlohmann::json to_json(const ScenarioConfig& cfg);

/// Per-seed features of one scenario, for CSV export.
struct SeedTable {
    std::string scenario;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::vector<ScenarioConfig> configs;
    std::vector<SeedTable> seed_tables;
    double wall_seconds = 0.0;

    std::size_t count(Status s) const;
    /// Failures always fail; inconclusive checks fail only when strict.
    bool passed(bool strict) const;
    const CheckResult* find(const std::string& name) const;

    nlohmann::json to_json() const;
    /// The checks alone, without timing: equal across reruns and worker counts.
    nlohmann::json statistics() const;
};

VerificationReport run(const ScenarioConfig& cfg);

/// Runs each config in order and concatenates the reports.
VerificationReport run_suite(std::span<const ScenarioConfig> configs);

/// Default configs for every scenario.
std::vector<ScenarioConfig> default_suite();

/// Runs `configs` twice with their own worker counts, then with 1 and with 8
/// workers, and compares report statistics.
CheckResult determinism_check(std::span<const ScenarioConfig> configs);

struct SweepRow {
    double h = 0.0;
    std::size_t n = 0;
    /// Median residual evaluated on the solution's own grid.
    double residual_own = 0.0;
    /// Median residual against the midpoint-refined path.
    double residual_refined = 0.0;
    double statistic = 0.0;
};

struct SweepTable {
    std::string scenario;
    std::string statistic_name;
    std::vector<SweepRow> rows;
    /// residual_refined is nonincreasing as h decreases.
    bool monotone = false;
    nlohmann::json to_json(const ScenarioConfig& cfg) const;
};

/// Supported scenarios: helper_bridge, sys2d, sys3d and the zero-drift control "zero".
SweepTable sweep(const ScenarioConfig& cfg, std::span<const double> h_values);

/// Calls fn(i) for i in [0, n) on `workers` threads and returns the results
/// in index order. If any call throws, the exception of the lowest index is
/// rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, unsigned workers, F&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    std::vector<std::exception_ptr> errors(n);
    const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    auto body = [&](unsigned w) {
        for (std::size_t i = w; i < n; i += threads) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        body(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(body, w);
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

} // namespace pbp
