#include "pbp/scenarios.hpp"

#include "pbp/constructor.hpp"
#include "pbp/oracles.hpp"
#include "pbp/stats.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pbp {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Brownian stream ids; components are separated inside each stream.
constexpr std::uint32_t kStreamHelper = 1;
constexpr std::uint32_t kStream2d = 2;
constexpr std::uint32_t kStream3d = 3;
constexpr std::uint32_t kStreamDesk = 4;
constexpr std::uint32_t kStreamGirsanov = 5;
constexpr std::uint32_t kStreamHeat = 6;
constexpr std::uint32_t kStreamProbe = 7;
constexpr std::uint32_t kStreamBlock = 8;
constexpr std::uint32_t kStreamSampler = 9;
constexpr std::uint32_t kStreamSignCorr = 10;

struct ScenarioSpec {
    std::size_t n_seeds;
    std::map<std::string, double> params;
};

const std::map<std::string, ScenarioSpec>& registry() {
    static const std::map<std::string, ScenarioSpec> specs{
        {"helper_bridge",
         {1000, {{"ks_seeds", 10000}, {"alpha", 0.01}, {"terminal_tol", 0.05}, {"terminal_fraction", 0.99}}}},
        {"sys2d", {1000, {{"residual_seeds", 50}, {"rejection_budget", 0.001}}}},
        {"sys3d",
         {10000,
          {{"dup_seeds", 1000},
           {"dup_min", 0.1},
           {"dup_fraction", 0.9},
           {"stat_tol", 0.02},
           {"bruteforce_pairs", 1e7},
           {"bruteforce_tol", 0.001},
           {"desk_seeds", 100},
           {"desk_gamma_a", 0.5},
           {"desk_gamma_b", 0.25},
           {"desk_tol", 0.02},
           {"desk_fraction", 0.95},
           {"residual_seeds", 20},
           {"rejection_budget", 0.001}}}},
        {"girsanov", {100000, {{"T", 0.5}, {"girsanov_h", 1e-3}, {"tol", 0.02}, {"reweight_tol", 0.05}}}},
        {"heat_regression",
         {100000, {{"bin_lo", -3.0}, {"bin_hi", 3.0}, {"bin_width", 0.1}, {"min_count", 500}, {"tol", 0.05}}}},
        {"nosol_probe",
         {100, {{"base_steps", 1024}, {"step_exponent", 1.5}, {"ratio_min", 2.0}, {"control_max", 1.5}}}},
        {"product_block", {100, {{"blocks", 3}, {"rel_tol", 1e-9}}}},
    };
    return specs;
}

double param(const ScenarioConfig& cfg, const std::string& key) {
    if (const auto it = cfg.params.find(key); it != cfg.params.end()) {
        return it->second;
    }
    return registry().at(cfg.scenario).params.at(key);
}

std::size_t count_param(const ScenarioConfig& cfg, const std::string& key) {
    return static_cast<std::size_t>(std::llround(param(cfg, key)));
}

std::uint64_t seed_of(const ScenarioConfig& cfg, std::size_t i) { return cfg.base_seed + i; }

Status verdict(bool ok) { return ok ? Status::pass : Status::fail; }

/// Band check on a mean: inconclusive when the 99% interval is wider than
/// the band and does not already exclude the target.
Status band_status(const MeanCI& ci, double target, double tol) {
    const double dev = std::abs(ci.mean - target);
    if (ci.half_width > tol) {
        return dev - ci.half_width > tol ? Status::fail : Status::inconclusive;
    }
    return verdict(dev <= tol);
}

CheckResult make_check(const ScenarioConfig& cfg, std::string name, int criterion) {
    CheckResult c;
    c.name = std::move(name);
    c.scenario = cfg.scenario;
    c.criterion = criterion;
    return c;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

bool signed_over(std::span<const double> v, std::size_t from, std::size_t to, int s) {
    for (std::size_t k = from; k <= to; ++k) {
        if (!(s * v[k] > 0.0)) {
            return false;
        }
    }
    return true;
}

double envelope(double h) { return 3.0 * std::sqrt(h * std::log(1.0 / h)); }

std::size_t node(const TimeGrid& g, double t) { return g.index_of(t, 1e-12 * std::max(1.0, t)); }

// ---------------------------------------------------------------- helper_bridge

void run_helper_bridge(const ScenarioConfig& cfg, VerificationReport& rep) {
    const auto& opts = cfg.scheme;
    const auto helper = DriftField::helper_f();
    const auto exact = DriftField::bes3_bridge();
    const auto grid = scheme_grid(helper, opts);
    const std::size_t n = cfg.n_seeds;
    const std::size_t ks_n = count_param(cfg, "ks_seeds");
    const double tol = param(cfg, "terminal_tol");
    const double alpha = param(cfg, "alpha");
    const std::size_t k_half = node(grid, 0.5);
    const std::size_t k_late = node(grid, 1.0 - opts.delta_end);
    const std::size_t k_end = node(grid, 1.0);

    struct Out {
        double pos_late = kNaN, neg_late = kNaN, pos_half = kNaN, exact_half = kNaN;
        bool pos_signed = false, neg_signed = false, pinned = false;
    };
    const double zero[1] = {0.0};
    const int plus[1] = {1};
    const int minus[1] = {-1};
    const auto per_seed = parallel_map(std::max(n, ks_n), cfg.workers, [&](std::size_t i) {
        Out o;
        const auto path = generate(1, grid, seed_of(cfg, i), kStreamHelper);
        const auto pos = integrate(helper, path, zero, opts, plus);
        o.pos_half = pos.value(0, k_half);
        o.pos_late = pos.value(0, k_late);
        o.pos_signed = signed_over(pos.component(0), 1, k_end, 1);
        o.pinned = pos.value(0, k_end) == 1.0;
        if (i < n) {
            const auto neg = integrate(helper, path, zero, opts, minus);
            o.neg_late = neg.value(0, k_late);
            o.neg_signed = signed_over(neg.component(0), 1, k_end, -1);
            o.pinned = o.pinned && neg.value(0, k_end) == -1.0;
        }
        if (i < ks_n) {
            o.exact_half = integrate(exact, path, zero, opts, plus).value(0, k_half);
        }
        return o;
    });

    std::size_t pos_in = 0, neg_in = 0, pos_signed = 0, neg_signed = 0, pinned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = per_seed[i];
        pos_in += std::abs(o.pos_late - 1.0) <= tol;
        neg_in += std::abs(o.neg_late + 1.0) <= tol;
        pos_signed += o.pos_signed;
        neg_signed += o.neg_signed;
        pinned += o.pinned;
    }
    const double dn = static_cast<double>(n);

    auto c1 = make_check(cfg, "bridge_terminal_value", 1);
    c1.statistic = std::min(pos_in, neg_in) / dn;
    c1.threshold = "fraction with ||X(1-delta_end)| - 1| <= " + format_full(tol) + " >= " +
                   format_full(param(cfg, "terminal_fraction")) + " on each branch";
    c1.n = n;
    c1.status = verdict(c1.statistic >= param(cfg, "terminal_fraction"));
    c1.details = {{"fraction_positive", pos_in / dn}, {"fraction_negative", neg_in / dn},
                  {"t_evaluated", grid[k_late]}};
    rep.checks.push_back(c1);

    auto c2 = make_check(cfg, "bridge_sign_preservation", 2);
    c2.statistic = static_cast<double>(pos_signed + neg_signed) / (2.0 * dn);
    c2.threshold = "every seed keeps its sign on all nodes in (0, 1], both branches";
    c2.n = n;
    c2.status = verdict(pos_signed == n && neg_signed == n);
    c2.details = {{"positive_preserved", pos_signed}, {"negative_preserved", neg_signed}};
    rep.checks.push_back(c2);

    auto pin = make_check(cfg, "bridge_pinned_endpoint", 0);
    pin.statistic = pinned / dn;
    pin.threshold = "X(1) == +-1 exactly for every seed";
    pin.n = n;
    pin.status = verdict(pinned == n);
    rep.checks.push_back(pin);

    const auto law = bes3_bridge_marginal(0.5);
    std::vector<double> pos_half, exact_half;
    for (std::size_t i = 0; i < ks_n; ++i) {
        pos_half.push_back(per_seed[i].pos_half);
        exact_half.push_back(per_seed[i].exact_half);
    }
    auto ks_check = [&](std::string name, int criterion, const std::vector<double>& sample, const char* drift) {
        const auto r = ks_test(sample, law.cdf, alpha);
        auto c = make_check(cfg, std::move(name), criterion);
        c.statistic = r.statistic;
        c.p_value = r.p_value;
        c.threshold = "KS p-value > " + format_full(alpha);
        c.n = r.n;
        c.status = verdict(r.pass);
        c.details = {{"drift", drift}, {"sample_mean", mean_of(sample)}, {"oracle_mean", law.mean}};
        return c;
    };
    rep.checks.push_back(ks_check("bridge_marginal_ks", 3, pos_half, "helper_f"));
    rep.checks.push_back(ks_check("bridge_marginal_ks_exact_drift", 0, exact_half, "bes3_bridge"));

    std::vector<double> draws(ks_n);
    for (std::size_t i = 0; i < ks_n; ++i) {
        draws[i] = law.sample(cfg.base_seed, kStreamSampler, static_cast<std::uint32_t>(i));
    }
    rep.checks.push_back(ks_check("oracle_sampler_consistency", 0, draws, "oracle sampler"));

    SeedTable table{cfg.scenario, {"seed", "x_pos_half", "x_pos_late", "x_neg_late", "x_exact_half"}, {}};
    for (std::size_t i = 0; i < per_seed.size(); ++i) {
        const auto& o = per_seed[i];
        table.rows.push_back({static_cast<double>(seed_of(cfg, i)), o.pos_half, o.pos_late, o.neg_late, o.exact_half});
    }
    rep.seed_tables.push_back(std::move(table));
}

// ---------------------------------------------------------------- sys2d

void run_sys2d(const ScenarioConfig& cfg, VerificationReport& rep) {
    const auto& opts = cfg.scheme;
    const auto drift = DriftField::sys2d();
    const auto grid = scheme_grid(drift, opts);
    const std::size_t n = cfg.n_seeds;
    const std::size_t res_n = std::min(n, count_param(cfg, "residual_seeds"));
    const std::size_t k_half = node(grid, 0.5);
    const std::size_t k_one = node(grid, 1.0);

    struct Out {
        bool rejected = false, identity = false, first_is_b = false, signs_ok = false;
        int sign_b = 0, sign_x2 = 0;
        double residual = kNaN;
    };
    const auto per_seed = parallel_map(n, cfg.workers, [&](std::size_t i) {
        Out o;
        const auto path = generate(2, grid, seed_of(cfg, i), kStream2d);
        std::optional<SolutionPath> sol;
        try {
            sol = build_2d_pathbypath(path, opts);
        } catch (const ConstructionRejected&) {
            o.rejected = true;
            return o;
        }
        o.sign_b = sign_of(path.value(0, k_one));
        o.sign_x2 = sign_of(sol->value(1, k_half));
        o.identity = o.sign_x2 == -o.sign_b;
        o.first_is_b = true;
        for (std::size_t k = 0; k <= k_one; ++k) {
            o.first_is_b = o.first_is_b && sol->value(0, k) == path.value(0, k);
        }
        o.signs_ok = signed_over(sol->component(1), 1, k_one, -o.sign_b);
        for (std::size_t k = k_one + 1; k < grid.size(); ++k) {
            o.signs_ok = o.signs_ok && sign_of(sol->value(0, k)) * sign_of(sol->value(1, k)) <= 0;
        }
        if (i < res_n) {
            o.residual = residual(*sol, drift, path, refine_midpoints(path), opts);
        }
        return o;
    });

    std::size_t rejected = 0, identity = 0, first = 0, signs = 0;
    std::vector<double> residuals;
    for (const auto& o : per_seed) {
        rejected += o.rejected;
        identity += o.identity;
        first += o.first_is_b;
        signs += o.signs_ok;
        if (!std::isnan(o.residual)) {
            residuals.push_back(o.residual);
        }
    }
    const std::size_t accepted = n - rejected;
    const double rejection_rate = static_cast<double>(rejected) / static_cast<double>(n);

    auto id = make_check(cfg, "pbp2d_identity", 0);
    id.statistic = accepted ? static_cast<double>(identity) / static_cast<double>(accepted) : 0.0;
    id.threshold = "sgn(X2(1/2)) == -sgn(B1(1)) on all accepted seeds; rejections <= budget";
    id.n = accepted;
    id.status = verdict(identity == accepted && rejection_rate <= param(cfg, "rejection_budget"));
    id.details = {{"rejected", rejected}, {"rejection_rate", rejection_rate}};
    rep.checks.push_back(id);

    auto fb = make_check(cfg, "pbp2d_first_component", 0);
    fb.statistic = accepted ? static_cast<double>(first) / static_cast<double>(accepted) : 0.0;
    fb.threshold = "X1 == B1 bitwise on [0, 1]";
    fb.n = accepted;
    fb.status = verdict(first == accepted);
    rep.checks.push_back(fb);

    auto sc = make_check(cfg, "pbp2d_sign_constancy", 0);
    sc.statistic = accepted ? static_cast<double>(signs) / static_cast<double>(accepted) : 0.0;
    sc.threshold = "X2 keeps sign on (0, 1] and X1*X2 <= 0 on (1, 2]";
    sc.n = accepted;
    sc.status = verdict(signs == accepted);
    rep.checks.push_back(sc);

    if (!residuals.empty()) {
        const double env = envelope(opts.h);
        std::size_t within = 0;
        for (double r : residuals) {
            within += r <= env;
        }
        auto rc = make_check(cfg, "pbp2d_residual", 0);
        rc.statistic = median(residuals);
        rc.threshold = "every residual <= 3 sqrt(h log(1/h)) = " + format_full(env);
        rc.n = residuals.size();
        rc.status = verdict(within == residuals.size());
        rc.details = {{"max", *std::max_element(residuals.begin(), residuals.end())}, {"envelope", env}};
        rep.checks.push_back(rc);
    }

    SeedTable table{cfg.scenario, {"seed", "rejected", "sgn_b1_1", "sgn_x2_half", "residual"}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = per_seed[i];
        table.rows.push_back({static_cast<double>(seed_of(cfg, i)), static_cast<double>(o.rejected),
                              static_cast<double>(o.sign_b), static_cast<double>(o.sign_x2), o.residual});
    }
    rep.seed_tables.push_back(std::move(table));
}

// ---------------------------------------------------------------- sys3d

double common_node_distance(const SolutionPath& a, const SolutionPath& b) {
    const auto& ga = a.grid();
    const auto& gb = b.grid();
    double d = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
        while (j < gb.size() && gb[j] < ga[i] - 1e-12) {
            ++j;
        }
        if (j < gb.size() && std::abs(gb[j] - ga[i]) <= 1e-12) {
            for (std::size_t c = 0; c < a.dim(); ++c) {
                d = std::max(d, std::abs(a.value(c, i) - b.value(c, j)));
            }
        }
    }
    return d;
}

void run_sys3d(const ScenarioConfig& cfg, VerificationReport& rep) {
    const auto& opts = cfg.scheme;
    const auto drift3 = DriftField::sys3d();
    const auto grid3 = scheme_grid(drift3, opts);
    const auto grid2 = scheme_grid(DriftField::sys2d(), opts);
    const std::size_t n = cfg.n_seeds;
    const std::size_t dup_n = std::min(n, count_param(cfg, "dup_seeds"));
    const std::size_t desk_n = std::min(n, count_param(cfg, "desk_seeds"));
    const std::size_t res_n = std::min(n, count_param(cfg, "residual_seeds"));

    SchemeOptions opts_a = opts, opts_b = opts;
    opts_a.gamma = param(cfg, "desk_gamma_a");
    opts_b.gamma = param(cfg, "desk_gamma_b");
    const auto desk_a = scheme_grid(drift3, opts_a);
    const auto desk_b = scheme_grid(drift3, opts_b);
    const auto desk_union = TimeGrid::merged(desk_a, desk_b);

    const std::size_t h3 = node(grid3, 0.5), o3 = node(grid3, 1.0);
    const std::size_t h2 = node(grid2, 0.5), o2 = node(grid2, 1.0);

    struct Out {
        bool rejected3 = false, rejected2 = false;
        int future3 = 0, future2 = 0, sign_b3 = 0, sign_b2 = 0;
        int x2_strong = 0, x2_na = 0, x2_2d = 0;
        double dup = kNaN, desk = kNaN, res_strong = kNaN, res_na = kNaN;
        bool signs_ok = true, pinned_ok = true;
    };
    const auto per_seed = parallel_map(n, cfg.workers, [&](std::size_t i) {
        Out o;
        const auto seed = seed_of(cfg, i);
        const auto B = generate(3, grid3, seed, kStream3d);
        o.sign_b3 = sign_of(B.value(0, o3));
        o.future3 = sign_of(B.value(0, o3) - B.value(0, h3));
        const auto strong = build_strong_3d(B, opts);
        o.x2_strong = sign_of(strong.value(1, h3));
        o.signs_ok = signed_over(strong.component(2), 1, grid3.size() - 1, -1);
        std::optional<SolutionPath> na;
        try {
            na = build_nonadapted_3d(B, opts);
        } catch (const ConstructionRejected&) {
            o.rejected3 = true;
        }
        if (na) {
            o.x2_na = sign_of(na->value(1, h3));
            o.dup = sup_distance(strong, *na);
            o.pinned_ok = std::abs(na->value(1, o3)) == 1.0 && na->value(2, o3) == 1.0;
            o.signs_ok = o.signs_ok && signed_over(na->component(1), 1, o3, -o.sign_b3) &&
                         signed_over(na->component(2), 1, grid3.size() - 1, 1);
            for (std::size_t k = o3 + 1; k < grid3.size(); ++k) {
                o.signs_ok = o.signs_ok && sign_of(na->value(0, k)) * sign_of(na->value(1, k)) <= 0;
            }
        }
        if (i < res_n) {
            const auto fine = refine_midpoints(B);
            o.res_strong = residual(strong, drift3, B, fine, opts);
            if (na) {
                o.res_na = residual(*na, drift3, B, fine, opts);
            }
        }
        if (i < desk_n) {
            const auto Bd = generate(3, desk_union, seed, kStreamDesk);
            o.desk = common_node_distance(build_strong_3d(restrict_to(Bd, desk_a), opts_a),
                                          build_strong_3d(restrict_to(Bd, desk_b), opts_b));
        }

        const auto B2 = generate(2, grid2, seed, kStream2d);
        o.sign_b2 = sign_of(B2.value(0, o2));
        o.future2 = sign_of(B2.value(0, o2) - B2.value(0, h2));
        try {
            o.x2_2d = sign_of(build_2d_pathbypath(B2, opts).value(1, h2));
        } catch (const ConstructionRejected&) {
            o.rejected2 = true;
        }
        return o;
    });

    std::size_t rej3 = 0, rej2 = 0, id3 = 0, id2 = 0, signs = 0, pinned = 0;
    std::vector<double> s_na, s_2d, s_strong;
    for (const auto& o : per_seed) {
        rej3 += o.rejected3;
        rej2 += o.rejected2;
        s_strong.push_back(o.x2_strong * o.future3);
        if (!o.rejected3) {
            id3 += o.x2_na == -o.sign_b3;
            s_na.push_back(o.x2_na * o.future3);
            pinned += o.pinned_ok;
        }
        if (!o.rejected2) {
            id2 += o.x2_2d == -o.sign_b2;
            s_2d.push_back(o.x2_2d * o.future2);
        }
        signs += o.signs_ok;
    }
    const double dn = static_cast<double>(n);
    const double budget = param(cfg, "rejection_budget");

    auto c5 = make_check(cfg, "nonadapted_identity", 5);
    const std::size_t acc3 = n - rej3, acc2 = n - rej2;
    c5.statistic = (acc3 + acc2) ? static_cast<double>(id3 + id2) / static_cast<double>(acc3 + acc2) : 0.0;
    c5.threshold = "sgn(X2(1/2)) == -sgn(B1(1)) on 100% of accepted seeds (2-d and 3-d); rejection rate <= " +
                   format_full(budget);
    c5.n = acc3 + acc2;
    c5.status = verdict(id3 == acc3 && id2 == acc2 && rej3 / dn <= budget && rej2 / dn <= budget);
    c5.details = {{"identity_3d", id3}, {"accepted_3d", acc3}, {"rejected_3d", rej3},
                  {"identity_2d", id2}, {"accepted_2d", acc2}, {"rejected_2d", rej2}};
    rep.checks.push_back(c5);

    const double tol = param(cfg, "stat_tol");
    const double target = -sign_corr_constant();
    const auto pairs = static_cast<std::uint64_t>(param(cfg, "bruteforce_pairs"));
    const double brute = sign_corr_bruteforce(std::sqrt(0.5), pairs, cfg.base_seed + kStreamSignCorr);
    const bool brute_ok = std::abs(brute - sign_corr_constant()) <= param(cfg, "bruteforce_tol");
    auto ci_of = [](const std::vector<double>& v) { return v.size() >= 2 ? mean_ci(v, 0.99) : MeanCI{kNaN, kNaN}; };
    const auto ci_na = ci_of(s_na), ci_2d = ci_of(s_2d), ci_strong = ci_of(s_strong);
    auto c6 = make_check(cfg, "nonadapted_statistic", 6);
    c6.statistic = ci_na.mean;
    c6.ci = std::array<double, 2>{ci_na.mean - ci_na.half_width, ci_na.mean + ci_na.half_width};
    c6.threshold = "non-adapted means within " + format_full(tol) + " of " + format_full(target) +
                   "; strong mean within " + format_full(tol) + " of 0; brute-force constant validated";
    c6.n = s_na.size();
    c6.status = verdict(std::abs(ci_na.mean - target) <= tol && std::abs(ci_2d.mean - target) <= tol &&
                        std::abs(ci_strong.mean) <= tol && brute_ok);
    c6.details = {{"mean_nonadapted_3d", ci_na.mean},    {"mean_nonadapted_2d", ci_2d.mean},
                  {"mean_strong_3d", ci_strong.mean},    {"half_width_99_strong", ci_strong.half_width},
                  {"half_width_99_2d", ci_2d.half_width}, {"target", target},
                  {"bruteforce_constant", brute},         {"bruteforce_pairs", pairs}};
    rep.checks.push_back(c6);

    std::size_t dup_big = 0, dup_pos = 0, dup_count = 0;
    std::vector<double> dups;
    for (std::size_t i = 0; i < dup_n; ++i) {
        const double d = per_seed[i].dup;
        if (std::isnan(d)) {
            continue;
        }
        ++dup_count;
        dups.push_back(d);
        dup_big += d > param(cfg, "dup_min");
        dup_pos += d > 0.0;
    }
    auto c7 = make_check(cfg, "duplicate_distance", 7);
    c7.statistic = dup_count ? static_cast<double>(dup_big) / static_cast<double>(dup_count) : 0.0;
    c7.threshold = "fraction with distance > " + format_full(param(cfg, "dup_min")) + " >= " +
                   format_full(param(cfg, "dup_fraction")) + "; distance > 0 on every seed";
    c7.n = dup_count;
    c7.status = verdict(dup_count > 0 && c7.statistic >= param(cfg, "dup_fraction") && dup_pos == dup_count);
    c7.details = {{"positive", dup_pos}, {"median", dups.empty() ? kNaN : median(dups)}};
    rep.checks.push_back(c7);

    std::size_t desk_ok = 0;
    std::vector<double> desks;
    for (std::size_t i = 0; i < desk_n; ++i) {
        desks.push_back(per_seed[i].desk);
        desk_ok += per_seed[i].desk <= param(cfg, "desk_tol");
    }
    auto c8 = make_check(cfg, "pathwise_uniqueness_desk", 8);
    c8.statistic = desk_n ? static_cast<double>(desk_ok) / static_cast<double>(desk_n) : 0.0;
    c8.threshold = "fraction with sup distance <= " + format_full(param(cfg, "desk_tol")) + " >= " +
                   format_full(param(cfg, "desk_fraction"));
    c8.n = desk_n;
    c8.status = verdict(desk_n > 0 && c8.statistic >= param(cfg, "desk_fraction"));
    c8.details = {{"gamma_a", opts_a.gamma},
                  {"gamma_b", opts_b.gamma},
                  {"max_distance", desks.empty() ? kNaN : *std::max_element(desks.begin(), desks.end())},
                  {"median_distance", desks.empty() ? kNaN : median(desks)}};
    rep.checks.push_back(c8);

    auto sc = make_check(cfg, "sign_constancy", 0);
    sc.statistic = signs / dn;
    sc.threshold = "bridge components keep their sign; X1*X2 <= 0 on (1, 2] for the non-adapted solution";
    sc.n = n;
    sc.status = verdict(signs == n);
    rep.checks.push_back(sc);

    auto pc = make_check(cfg, "nonadapted_pinning", 0);
    pc.statistic = acc3 ? static_cast<double>(pinned) / static_cast<double>(acc3) : 0.0;
    pc.threshold = "|X2(1)| == 1 and X3(1) == 1 exactly";
    pc.n = acc3;
    pc.status = verdict(pinned == acc3);
    rep.checks.push_back(pc);

    std::vector<double> res;
    for (std::size_t i = 0; i < res_n; ++i) {
        for (double r : {per_seed[i].res_strong, per_seed[i].res_na}) {
            if (!std::isnan(r)) {
                res.push_back(r);
            }
        }
    }
    if (!res.empty()) {
        const double env = envelope(opts.h);
        std::size_t within = 0;
        for (double r : res) {
            within += r <= env;
        }
        auto rc = make_check(cfg, "duplicate_residual", 0);
        rc.statistic = median(res);
        rc.threshold = "every residual <= 3 sqrt(h log(1/h)) = " + format_full(env);
        rc.n = res.size();
        rc.status = verdict(within == res.size());
        rc.details = {{"max", *std::max_element(res.begin(), res.end())}, {"envelope", env}};
        rep.checks.push_back(rc);
    }

    SeedTable table{cfg.scenario,
                    {"seed", "rejected_3d", "sgn_b1_1", "sgn_x2_half_nonadapted", "sgn_x2_half_strong",
                     "sgn_future", "duplicate_distance", "desk_distance"},
                    {}};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = per_seed[i];
        table.rows.push_back({static_cast<double>(seed_of(cfg, i)), static_cast<double>(o.rejected3),
                              static_cast<double>(o.sign_b3), static_cast<double>(o.x2_na),
                              static_cast<double>(o.x2_strong), static_cast<double>(o.future3), o.dup, o.desk});
    }
    rep.seed_tables.push_back(std::move(table));
}

// ---------------------------------------------------------------- girsanov

void run_girsanov(const ScenarioConfig& cfg, VerificationReport& rep) {
    const double T = param(cfg, "T");
    const auto per_unit = static_cast<std::size_t>(std::llround(1.0 / param(cfg, "girsanov_h")));
    const auto grid = TimeGrid::uniform(T, per_unit);
    const std::size_t n = cfg.n_seeds;
    struct Out {
        double density = kNaN, weighted = kNaN;
    };
    const auto per_seed = parallel_map(n, cfg.workers, [&](std::size_t i) {
        const auto path = generate(1, grid, seed_of(cfg, i), kStreamGirsanov);
        const double rho = girsanov_density(path, T);
        return Out{rho, rho * path.value(0, grid.size() - 1)};
    });
    std::vector<double> dens(n), weighted(n);
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
        dens[i] = per_seed[i].density;
        weighted[i] = per_seed[i].weighted;
        positive += dens[i] > 0.0;
    }
    const double tol = param(cfg, "tol");
    const auto ci = n >= 2 ? mean_ci(dens, 0.99) : MeanCI{n ? dens[0] : kNaN, kNaN};

    auto c4 = make_check(cfg, "girsanov_normalization", 4);
    c4.statistic = ci.mean;
    c4.ci = std::array<double, 2>{ci.mean - ci.half_width, ci.mean + ci.half_width};
    c4.threshold = "mean density in [" + format_full(1.0 - tol) + ", " + format_full(1.0 + tol) +
                   "]; inconclusive when the 99% interval is wider than the band";
    c4.n = n;
    c4.status = n >= 2 ? band_status(ci, 1.0, tol) : Status::inconclusive;
    c4.details = {{"T", T}, {"h", 1.0 / static_cast<double>(per_unit)},
                  {"half_width_99", ci.half_width},
                  {"variance_exact_continuous", std::exp(T / (1.0 - T)) - 1.0}};
    rep.checks.push_back(c4);

    auto pos = make_check(cfg, "girsanov_positive", 0);
    pos.statistic = n ? static_cast<double>(positive) / static_cast<double>(n) : 0.0;
    pos.threshold = "density > 0 on every path";
    pos.n = n;
    pos.status = verdict(positive == n);
    rep.checks.push_back(pos);

    const double target = girsanov_reweighted_target(grid, T);
    const double rtol = param(cfg, "reweight_tol");
    const auto wci = n >= 2 ? mean_ci(weighted, 0.99) : MeanCI{kNaN, kNaN};
    auto rw = make_check(cfg, "girsanov_reweighted_mean", 0);
    rw.statistic = wci.mean;
    rw.ci = std::array<double, 2>{wci.mean - wci.half_width, wci.mean + wci.half_width};
    rw.threshold = "E[rho B(T)] within " + format_full(rtol) + " of " + format_full(target);
    rw.n = n;
    rw.status = n >= 2 ? band_status(wci, target, rtol) : Status::inconclusive;
    rw.details = {{"target", target}};
    rep.checks.push_back(rw);

    SeedTable table{cfg.scenario, {"seed", "density", "density_times_BT"}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        table.rows.push_back({static_cast<double>(seed_of(cfg, i)), dens[i], weighted[i]});
    }
    rep.seed_tables.push_back(std::move(table));
}

// ---------------------------------------------------------------- heat_regression

void run_heat(const ScenarioConfig& cfg, VerificationReport& rep) {
    const auto grid = TimeGrid::uniform(1.0, 2);
    const std::size_t n = cfg.n_seeds;
    struct Out {
        double x = kNaN, y = kNaN;
    };
    const auto per_seed = parallel_map(n, cfg.workers, [&](std::size_t i) {
        const auto path = generate(1, grid, seed_of(cfg, i), kStreamHeat);
        return Out{path.value(0, 1), static_cast<double>(sign_of(path.value(0, 2)))};
    });
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = per_seed[i].x;
        ys[i] = per_seed[i].y;
    }
    const double lo = param(cfg, "bin_lo"), hi = param(cfg, "bin_hi"), width = param(cfg, "bin_width");
    const auto n_bins = static_cast<std::size_t>(std::llround((hi - lo) / width));
    std::vector<double> edges(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n_bins);
    }
    const auto bins = binned_conditional_mean(xs, ys, edges, count_param(cfg, "min_count"));
    double worst = 0.0;
    std::size_t usable = 0;
    json per_bin = json::array();
    for (const auto& b : bins) {
        if (!b.usable) {
            continue;
        }
        ++usable;
        const double dev = std::abs(b.mean - heat_sgn(b.center));
        worst = std::max(worst, dev);
        per_bin.push_back({{"center", b.center}, {"mean", b.mean}, {"oracle", heat_sgn(b.center)}, {"count", b.count}});
    }
    const double tol = param(cfg, "tol");
    auto c9 = make_check(cfg, "heat_semigroup_regression", 9);
    c9.statistic = worst;
    c9.threshold = "max |bin mean - erf(center)| <= " + format_full(tol) + " over bins with >= " +
                   format_full(param(cfg, "min_count")) + " samples";
    c9.n = n;
    c9.status = verdict(usable > 0 && worst <= tol);
    c9.details = {{"usable_bins", usable}, {"bins", per_bin}};
    rep.checks.push_back(c9);

    SeedTable table{cfg.scenario, {"seed", "B_half", "sgn_B_1"}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        table.rows.push_back({static_cast<double>(seed_of(cfg, i)), xs[i], ys[i]});
    }
    rep.seed_tables.push_back(std::move(table));
}

// ---------------------------------------------------------------- nosol_probe

void run_probe(const ScenarioConfig& cfg, VerificationReport& rep) {
    const std::array<double, 3> cutoffs{1e-2, 1e-3, 1e-4};
    const auto grid = TimeGrid::uniform(1.0, count_param(cfg, "base_steps"));
    const std::size_t n = cfg.n_seeds;
    ProbeOptions nosol{-0.5, param(cfg, "step_exponent")};
    ProbeOptions control{0.5, param(cfg, "step_exponent")};
    struct Out {
        std::vector<ProbeRow> nosol, control;
    };
    const auto per_seed = parallel_map(n, cfg.workers, [&](std::size_t i) {
        const auto path = generate(1, grid, seed_of(cfg, i), kStreamProbe);
        return Out{probe_nosolution(path, cutoffs, nosol), probe_nosolution(path, cutoffs, control)};
    });
    std::vector<double> med_nosol, med_control;
    json table = json::array();
    for (std::size_t e = 0; e < cutoffs.size(); ++e) {
        std::vector<double> a, b, near;
        for (const auto& o : per_seed) {
            a.push_back(o.nosol[e].accumulated);
            b.push_back(o.control[e].accumulated);
            near.push_back(o.nosol[e].near_fraction);
        }
        med_nosol.push_back(median(a));
        med_control.push_back(median(b));
        table.push_back({{"eps", cutoffs[e]},
                         {"step", per_seed.front().nosol[e].step},
                         {"median_accumulated_nosol", med_nosol.back()},
                         {"median_accumulated_control", med_control.back()},
                         {"median_near_fraction_nosol", median(near)}});
    }
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t e = 1; e < cutoffs.size(); ++e) {
        min_ratio = std::min(min_ratio, med_nosol[e] / med_nosol[e - 1]);
    }
    const auto [cmin, cmax] = std::minmax_element(med_control.begin(), med_control.end());
    const double control_spread = *cmax / *cmin;
    auto c10 = make_check(cfg, "nonexistence_signature", 10);
    c10.statistic = min_ratio;
    c10.threshold = "median accumulated |b| grows by >= " + format_full(param(cfg, "ratio_min")) +
                    " per decade of eps; control max/min <= " + format_full(param(cfg, "control_max"));
    c10.n = n;
    c10.status = verdict(min_ratio >= param(cfg, "ratio_min") && control_spread <= param(cfg, "control_max"));
    c10.details = {{"control_spread", control_spread}, {"ladder", table}};
    rep.checks.push_back(c10);

    SeedTable seeds{cfg.scenario, {"seed"}, {}};
    for (double eps : cutoffs) {
        seeds.header.push_back("nosol_" + format_full(eps));
        seeds.header.push_back("control_" + format_full(eps));
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row{static_cast<double>(seed_of(cfg, i))};
        for (std::size_t e = 0; e < cutoffs.size(); ++e) {
            row.push_back(per_seed[i].nosol[e].accumulated);
            row.push_back(per_seed[i].control[e].accumulated);
        }
        seeds.rows.push_back(std::move(row));
    }
    rep.seed_tables.push_back(std::move(seeds));
}

// ---------------------------------------------------------------- product_block

void run_block(const ScenarioConfig& cfg, VerificationReport& rep) {
    const auto& opts = cfg.scheme;
    const auto grid = scheme_grid(DriftField::sys2d(), opts);
    const std::size_t n = cfg.n_seeds;
    const int blocks = static_cast<int>(count_param(cfg, "blocks"));
    const double rel_tol = param(cfg, "rel_tol");
    struct Out {
        bool rejected = false;
        double worst = 0.0;
        bool identity = true;
    };
    const auto per_seed = parallel_map(n, cfg.workers, [&](std::size_t i) {
        Out o;
        const auto path = generate(2, grid, seed_of(cfg, i), kStreamBlock);
        try {
            const auto base = build_2d_pathbypath(path, opts);
            for (int k = 1; k <= blocks; ++k) {
                const auto drift = DriftField::product_block(k);
                const double lambda = drift.lambda();
                const double root = std::sqrt(lambda);
                const auto scaled = rescale(path, lambda);
                const auto blk = build_2d_pathbypath(scaled, opts, drift);
                for (std::size_t c = 0; c < 2; ++c) {
                    for (std::size_t m = 0; m < grid.size(); ++m) {
                        const double want = root * base.value(c, m);
                        const double err = std::abs(blk.value(c, m) - want) / std::max(std::abs(want), root);
                        o.worst = std::max(o.worst, err);
                    }
                }
                const int sb = sign_of(scaled.value(0, node(scaled.grid(), lambda)));
                o.identity = o.identity && sign_of(blk.value_at(1, 0.5 * lambda)) == -sb;
            }
        } catch (const ConstructionRejected&) {
            o.rejected = true;
        }
        return o;
    });
    double worst = 0.0;
    std::size_t rejected = 0, identity = 0;
    for (const auto& o : per_seed) {
        rejected += o.rejected;
        if (!o.rejected) {
            worst = std::max(worst, o.worst);
            identity += o.identity;
        }
    }
    const std::size_t accepted = n - rejected;
    auto sc = make_check(cfg, "block_scaling_exactness", 0);
    sc.statistic = worst;
    sc.threshold = "max relative error of block k vs sqrt(lambda_k) X(t/lambda_k) <= " + format_full(rel_tol);
    sc.n = accepted;
    sc.status = verdict(accepted > 0 && worst <= rel_tol);
    sc.details = {{"blocks", blocks}, {"rejected", rejected}};
    rep.checks.push_back(sc);

    auto id = make_check(cfg, "block_identity", 0);
    id.statistic = accepted ? static_cast<double>(identity) / static_cast<double>(accepted) : 0.0;
    id.threshold = "sgn(X2(lambda/2)) == -sgn(B1(lambda)) in every block";
    id.n = accepted;
    id.status = verdict(identity == accepted);
    rep.checks.push_back(id);
}

} // namespace

std::string to_string(Status s) {
    switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
    }
    return "unknown";
}

const std::vector<std::string>& scenario_ids() {
    static const std::vector<std::string> ids{"helper_bridge",   "sys2d",       "sys3d",        "girsanov",
                                              "heat_regression", "nosol_probe", "product_block"};
    return ids;
}

ScenarioConfig default_config(const std::string& scenario) {
    const auto it = registry().find(scenario);
    if (it == registry().end()) {
        throw std::invalid_argument("unknown scenario: " + scenario);
    }
    ScenarioConfig cfg;
    cfg.scenario = scenario;
    cfg.n_seeds = it->second.n_seeds;
    cfg.params = it->second.params;
    return cfg;
}

void validate(const ScenarioConfig& cfg) {
    const auto it = registry().find(cfg.scenario);
    if (it == registry().end()) {
        throw std::invalid_argument("unknown scenario: " + cfg.scenario);
    }
    if (cfg.n_seeds < 1) {
        throw std::invalid_argument("n_seeds must be >= 1");
    }
    if (cfg.workers < 1) {
        throw std::invalid_argument("workers must be >= 1");
    }
    cfg.scheme.validate();
    for (const auto& [key, value] : cfg.params) {
        if (!it->second.params.contains(key)) {
            throw std::invalid_argument("scenario " + cfg.scenario + " has no parameter '" + key + "'");
        }
        if (!std::isfinite(value)) {
            throw std::invalid_argument("parameter '" + key + "' must be finite");
        }
    }
    if (cfg.scenario == "girsanov" && !(param(cfg, "T") > 0.0 && param(cfg, "T") < 1.0)) {
        throw std::invalid_argument("girsanov: T must lie in (0, 1)");
    }
    if (cfg.scenario == "product_block" && param(cfg, "blocks") < 1) {
        throw std::invalid_argument("product_block: blocks must be >= 1");
    }
}

json to_json(const ScenarioConfig& cfg) {
    json params = json::object();
    if (registry().contains(cfg.scenario)) {
        for (const auto& [k, v] : registry().at(cfg.scenario).params) {
            params[k] = param(cfg, k);
        }
    } else {
        for (const auto& [k, v] : cfg.params) {
            params[k] = v;
        }
    }
    return {{"scenario", cfg.scenario},
            {"n_seeds", cfg.n_seeds},
            {"base_seed", cfg.base_seed},
            {"workers", cfg.workers},
            {"scheme",
             {{"h", cfg.scheme.h},
              {"gamma", cfg.scheme.gamma},
              {"delta_end", cfg.scheme.delta_end},
              {"implicit_singular", cfg.scheme.implicit_singular},
              {"explicit_guard", cfg.scheme.explicit_guard}}},
            {"params", params}};
}

std::size_t VerificationReport::count(Status s) const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [s](const CheckResult& c) { return c.status == s; }));
}

bool VerificationReport::passed(bool strict) const {
    return count(Status::fail) == 0 && (!strict || count(Status::inconclusive) == 0);
}

const CheckResult* VerificationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

json VerificationReport::statistics() const {
    json out = json::array();
    for (const auto& c : checks) {
        json j{{"name", c.name},           {"scenario", c.scenario}, {"criterion", c.criterion},
               {"statistic", c.statistic}, {"threshold", c.threshold}, {"n", c.n},
               {"status", to_string(c.status)}, {"details", c.details}};
        j["ci"] = c.ci ? json(*c.ci) : json(nullptr);
        j["p_value"] = c.p_value ? json(*c.p_value) : json(nullptr);
        out.push_back(std::move(j));
    }
    return out;
}

json VerificationReport::to_json() const {
    json configs_json = json::array();
    for (const auto& c : configs) {
        configs_json.push_back(pbp::to_json(c));
    }
    return {{"schema", kReportSchema},
            {"artifact_version", kArtifactVersion},
            {"config", configs_json},
            {"wall_seconds", wall_seconds},
            {"checks", statistics()},
            {"summary",
             {{"total", checks.size()},
              {"pass", count(Status::pass)},
              {"fail", count(Status::fail)},
              {"inconclusive", count(Status::inconclusive)}}}};
}

VerificationReport run(const ScenarioConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.configs.push_back(cfg);
    if (cfg.scenario == "helper_bridge") {
        run_helper_bridge(cfg, rep);
    } else if (cfg.scenario == "sys2d") {
        run_sys2d(cfg, rep);
    } else if (cfg.scenario == "sys3d") {
        run_sys3d(cfg, rep);
    } else if (cfg.scenario == "girsanov") {
        run_girsanov(cfg, rep);
    } else if (cfg.scenario == "heat_regression") {
        run_heat(cfg, rep);
    } else if (cfg.scenario == "nosol_probe") {
        run_probe(cfg, rep);
    } else {
        run_block(cfg, rep);
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

VerificationReport run_suite(std::span<const ScenarioConfig> configs) {
    for (const auto& c : configs) {
        validate(c);
    }
    VerificationReport all;
    for (const auto& c : configs) {
        auto rep = run(c);
        all.checks.insert(all.checks.end(), rep.checks.begin(), rep.checks.end());
        all.configs.push_back(c);
        for (auto& t : rep.seed_tables) {
            all.seed_tables.push_back(std::move(t));
        }
        all.wall_seconds += rep.wall_seconds;
    }
    return all;
}

std::vector<ScenarioConfig> default_suite() {
    std::vector<ScenarioConfig> out;
    for (const auto& id : scenario_ids()) {
        out.push_back(default_config(id));
    }
    return out;
}

CheckResult determinism_check(std::span<const ScenarioConfig> configs) {
    const std::string first = run_suite(configs).statistics().dump();
    const std::string second = run_suite(configs).statistics().dump();
    std::vector<ScenarioConfig> one(configs.begin(), configs.end());
    std::vector<ScenarioConfig> eight = one;
    for (auto& c : one) {
        c.workers = 1;
    }
    for (auto& c : eight) {
        c.workers = 8;
    }
    const std::string serial = run_suite(one).statistics().dump();
    const std::string parallel = run_suite(eight).statistics().dump();

    CheckResult c;
    c.name = "determinism";
    c.scenario = "suite";
    c.criterion = 11;
    c.statistic = static_cast<double>((first == second) + (serial == parallel));
    c.threshold = "identical statistics across reruns and across 1 vs 8 workers";
    c.n = configs.size();
    c.status = verdict(first == second && serial == parallel && first == serial);
    c.details = {{"rerun_identical", first == second},
                 {"workers_identical", serial == parallel},
                 {"statistics_bytes", first.size()}};
    return c;
}

json SweepTable::to_json(const ScenarioConfig& cfg) const {
    json rows_json = json::array();
    for (const auto& r : rows) {
        rows_json.push_back({{"h", r.h},
                             {"n", r.n},
                             {"median_residual_own_grid", r.residual_own},
                             {"median_residual_refined", r.residual_refined},
                             {"statistic", r.statistic}});
    }
    return {{"schema", kSweepSchema},
            {"artifact_version", kArtifactVersion},
            {"config", pbp::to_json(cfg)},
            {"statistic_name", statistic_name},
            {"rows", rows_json},
            {"monotone", monotone}};
}

SweepTable sweep(const ScenarioConfig& cfg, std::span<const double> h_values) {
    static const std::map<std::string, std::string> stat_names{{"helper_bridge", "mean X(1/2), positive branch"},
                                                               {"sys2d", "mean |X2(1/2)|"},
                                                               {"sys3d", "mean X3(1/2), strong solution"},
                                                               {"zero", "mean X(1)"}};
    if (!stat_names.contains(cfg.scenario)) {
        throw std::invalid_argument("sweep supports helper_bridge, sys2d, sys3d and zero, not " + cfg.scenario);
    }
    if (h_values.empty() || cfg.n_seeds < 1 || cfg.workers < 1) {
        throw std::invalid_argument("sweep needs h values, n_seeds >= 1 and workers >= 1");
    }
    SweepTable table;
    table.scenario = cfg.scenario;
    table.statistic_name = stat_names.at(cfg.scenario);
    for (double h : h_values) {
        SchemeOptions opts = cfg.scheme;
        opts.h = h;
        opts.validate();
        struct Out {
            double own = 0.0, refined = 0.0, stat = 0.0;
        };
        const auto per_seed = parallel_map(cfg.n_seeds, cfg.workers, [&](std::size_t i) {
            const auto seed = seed_of(cfg, i);
            DriftField drift = DriftField::zero(1, 1.0);
            std::optional<BrownianPath> path;
            std::optional<SolutionPath> sol;
            double stat = 0.0;
            if (cfg.scenario == "helper_bridge") {
                drift = DriftField::helper_f();
                path = generate(1, scheme_grid(drift, opts), seed, kStreamHelper);
                const double zero[1] = {0.0};
                const int plus[1] = {1};
                sol = integrate(drift, *path, zero, opts, plus);
                stat = sol->value_at(0, 0.5);
            } else if (cfg.scenario == "sys2d") {
                drift = DriftField::sys2d();
                path = generate(2, scheme_grid(drift, opts), seed, kStream2d);
                sol = build_2d_pathbypath(*path, opts);
                stat = std::abs(sol->value_at(1, 0.5));
            } else if (cfg.scenario == "sys3d") {
                drift = DriftField::sys3d();
                path = generate(3, scheme_grid(drift, opts), seed, kStream3d);
                sol = build_strong_3d(*path, opts);
                stat = sol->value_at(2, 0.5);
            } else {
                path = generate(1, scheme_grid(drift, opts), seed, kStreamHelper);
                const double zero[1] = {0.0};
                sol = integrate(drift, *path, zero, opts);
                stat = sol->value_at(0, 1.0);
            }
            return Out{residual(*sol, drift, *path, *path, opts),
                       residual(*sol, drift, *path, refine_midpoints(*path), opts), stat};
        });
        std::vector<double> own, refined, stats;
        for (const auto& o : per_seed) {
            own.push_back(o.own);
            refined.push_back(o.refined);
            stats.push_back(o.stat);
        }
        table.rows.push_back({h, cfg.n_seeds, median(own), median(refined), mean_of(stats)});
    }
    auto by_h = table.rows;
    std::sort(by_h.begin(), by_h.end(), [](const SweepRow& a, const SweepRow& b) { return a.h > b.h; });
    table.monotone = true;
    for (std::size_t k = 1; k < by_h.size(); ++k) {
        table.monotone = table.monotone && by_h[k].residual_refined <= by_h[k - 1].residual_refined;
    }
    return table;
}

} // namespace pbp
