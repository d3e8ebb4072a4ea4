// Command line front end: sample-size recommendations, reference tables,
// figure data series, validation suites, and Monte Carlo spot checks.
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "testroll/bernoulli.hpp"
#include "testroll/criteria.hpp"
#include "testroll/dist.hpp"
#include "testroll/gaussian.hpp"
#include "testroll/montecarlo.hpp"
#include "testroll/report.hpp"
#include "testroll/search.hpp"

using nlohmann::json;
using namespace testroll;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct Options {
    std::string command;
    std::string target;  // table/figure name or validation suite
    std::string criterion;
    long population = 0;
    double epsilon = 0.01;
    bool epsilon_given = false;
    double grid_step = 0.01;
    double sigma = 1.0;
    bool gaussian = false;
    long m_max = -1;
    bool bisect = false;
    bool refine = true;
    bool prune = true;
    bool with_trace = true;
    int workers = 0;
    std::uint64_t seed = 1;
    std::string format;
    std::string output;
    std::vector<long> n_list;
    std::string checkpoint;
    bool resume = false;
    // simulate
    std::string quantity = "error";
    long experiment_size = -1;
    std::optional<double> mu1, mu0, tau;
    long replications = 100000;
};

std::string format_or(const Options& opt, const char* fallback) {
    return opt.format.empty() ? fallback : opt.format;
}

void emit(const Options& opt, const std::string& text) {
    if (opt.output.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opt.output);
    if (!out) throw std::runtime_error("cannot open output file: " + opt.output);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    std::cerr << "# wrote " << opt.output << "\n";
}

std::string fixed3(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

std::string sig6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string sig9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

SearchConfig search_config(const Options& opt, const char* label) {
    SearchConfig config;
    config.workers = opt.workers;
    config.prune = opt.prune;
    config.refine = opt.refine;
    config.bisect = opt.bisect;
    config.m_max = opt.m_max;
    const std::string tag = label;
    config.on_progress = [tag](long m, double value) {
        if (m % 50 == 0)
            std::cerr << "# " << tag << " m=" << m << " worst=" << sig6(value) << "\n";
    };
    return config;
}

// ---------------------------------------------------------------------------
// Config file round trip

json options_to_json(const Options& opt) {
    json doc;
    doc["command"] = opt.command;
    doc["target"] = opt.target;
    doc["criterion"] = opt.criterion;
    doc["N"] = opt.population;
    doc["epsilon"] = opt.epsilon;
    doc["gridStep"] = opt.grid_step;
    doc["model"] = opt.gaussian ? "gaussian" : "bernoulli";
    doc["sigma"] = opt.sigma;
    doc["mMax"] = opt.m_max;
    doc["bisect"] = opt.bisect;
    doc["refine"] = opt.refine;
    doc["prune"] = opt.prune;
    doc["trace"] = opt.with_trace;
    doc["workers"] = opt.workers;
    doc["seed"] = opt.seed;
    doc["format"] = opt.format;
    doc["output"] = opt.output;
    doc["NList"] = opt.n_list;
    doc["checkpoint"] = opt.checkpoint;
    doc["resume"] = opt.resume;
    doc["quantity"] = opt.quantity;
    doc["m"] = opt.experiment_size;
    doc["mu1"] = opt.mu1 ? json(*opt.mu1) : json(nullptr);
    doc["mu0"] = opt.mu0 ? json(*opt.mu0) : json(nullptr);
    doc["tau"] = opt.tau ? json(*opt.tau) : json(nullptr);
    doc["replications"] = opt.replications;
    return doc;
}

// Fields given explicitly on the command line win over the config file.
void apply_config(const json& cfg, const CLI::App* sub, Options& opt) {
    auto unset = [sub](const char* flag) {
        return sub->get_option_no_throw(flag) == nullptr || sub->count(flag) == 0;
    };
    if (cfg.contains("command") && cfg["command"].is_string() &&
        !cfg["command"].get<std::string>().empty() &&
        cfg["command"].get<std::string>() != opt.command)
        throw std::invalid_argument("config file was written for command '" +
                                    cfg["command"].get<std::string>() + "'");
    auto load = [&](const char* key, const char* flag, auto& into) {
        using T = std::decay_t<decltype(into)>;
        if (cfg.contains(key) && !cfg[key].is_null() && unset(flag))
            into = cfg[key].get<T>();
    };
    if (cfg.contains("target") && cfg["target"].is_string() && opt.target.empty())
        opt.target = cfg["target"].get<std::string>();
    load("criterion", "--criterion", opt.criterion);
    load("N", "--N", opt.population);
    load("epsilon", "--epsilon", opt.epsilon);
    load("gridStep", "--grid-step", opt.grid_step);
    if (cfg.contains("model") && cfg["model"] == "gaussian" && unset("--sigma"))
        opt.gaussian = true;
    load("sigma", "--sigma", opt.sigma);
    load("mMax", "--m-max", opt.m_max);
    load("bisect", "--bisect", opt.bisect);
    load("refine", "--refine", opt.refine);
    load("prune", "--prune", opt.prune);
    load("trace", "--trace", opt.with_trace);
    load("workers", "--workers", opt.workers);
    load("seed", "--seed", opt.seed);
    load("format", "--format", opt.format);
    load("output", "--output", opt.output);
    load("NList", "--N-list", opt.n_list);
    load("checkpoint", "--checkpoint", opt.checkpoint);
    load("resume", "--resume", opt.resume);
    load("quantity", "--quantity", opt.quantity);
    load("m", "--m", opt.experiment_size);
    load("replications", "--reps", opt.replications);
    if (cfg.contains("mu1") && !cfg["mu1"].is_null() && unset("--mu1"))
        opt.mu1 = cfg["mu1"].get<double>();
    if (cfg.contains("mu0") && !cfg["mu0"].is_null() && unset("--mu0"))
        opt.mu0 = cfg["mu0"].get<double>();
    if (cfg.contains("tau") && !cfg["tau"].is_null() && unset("--tau"))
        opt.tau = cfg["tau"].get<double>();
}

// ---------------------------------------------------------------------------
// recommend

DesignRecommendation recommend_for(const Options& opt) {
    if (opt.population <= 0)
        throw std::invalid_argument("a positive population size (--N) is required");

    if (opt.criterion == "minimax-regret") {
        if (opt.gaussian)
            throw std::invalid_argument(
                "minimax-regret has no finite worst case under the unbounded "
                "gaussian model; use --criterion gaussian-wmb instead");
        GridSpec grid;
        grid.step = opt.grid_step;
        return minimax_sample_size(opt.population, grid,
                                   search_config(opt, "minimax"));
    }
    if (opt.criterion == "wmb-grid") {
        if (opt.gaussian)
            throw std::invalid_argument(
                "wmb-grid applies to the Bernoulli model; use gaussian-wmb");
        return wmb_sample_size(opt.population, GridSpec::gap_grid(opt.epsilon),
                               search_config(opt, "wmb"));
    }
    if (opt.criterion == "wmb-normal-approx")
        return wmb_sample_size_na(opt.population);
    if (opt.criterion == "gaussian-wmb") {
        const GaussianWmbThreshold th = gaussian_wmb_threshold(opt.population);
        DesignRecommendation rec;
        rec.criterion = "gaussian-wmb";
        rec.population = opt.population;
        rec.feasible = true;
        rec.m_star = th.even_m;
        rec.fraction = double(th.even_m) / double(opt.population);
        return rec;
    }
    if (opt.criterion == "relative-regret")
        return relative_regret_sample_size(opt.population,
                                           GridSpec::gap_grid(opt.epsilon),
                                           search_config(opt, "relative"));
    throw std::invalid_argument("unknown criterion: " + opt.criterion);
}

int cmd_recommend(const Options& opt) {
    const DesignRecommendation rec = recommend_for(opt);
    if (format_or(opt, "json") == "csv") {
        std::string text = "criterion,N,m,fraction\n";
        text += rec.criterion + "," + std::to_string(rec.population) + "," +
                std::to_string(rec.m_star) + "," + fixed3(rec.fraction) + "\n";
        emit(opt, text);
    } else {
        emit(opt, to_json(rec, opt.with_trace));
    }
    return rec.feasible ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------------------
// table

struct TableRow {
    double epsilon = 0.0;  // 0 for the minimax table
    long population = 0;
    long m_star = -1;
    double fraction = 0.0;
    double mu1 = 0.0, mu0 = 0.0;
    bool has_state = false;
    bool feasible = true;
};

std::string row_key(const std::string& table, double epsilon, long population) {
    std::ostringstream key;
    key << table << "|" << sig9(epsilon) << "|" << population;
    return key.str();
}

json row_to_json(const TableRow& row) {
    json doc;
    doc["epsilon"] = row.epsilon;
    doc["N"] = row.population;
    doc["m"] = row.m_star;
    doc["fraction"] = row.fraction;
    doc["feasible"] = row.feasible;
    if (row.has_state) {
        doc["mu1"] = row.mu1;
        doc["mu0"] = row.mu0;
    }
    return doc;
}

TableRow row_from_json(const json& doc) {
    TableRow row;
    row.epsilon = doc["epsilon"].get<double>();
    row.population = doc["N"].get<long>();
    row.m_star = doc["m"].get<long>();
    row.fraction = doc["fraction"].get<double>();
    row.feasible = doc["feasible"].get<bool>();
    if (doc.contains("mu1")) {
        row.mu1 = doc["mu1"].get<double>();
        row.mu0 = doc["mu0"].get<double>();
        row.has_state = true;
    }
    return row;
}

class Checkpoint {
   public:
    Checkpoint(std::string path, bool resume) : path_(std::move(path)) {
        if (path_.empty() || !resume) return;
        std::ifstream in(path_);
        if (!in.good()) return;
        const json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded() || !doc.contains("rows")) return;
        for (const auto& [key, value] : doc["rows"].items())
            rows_[key] = value;
    }

    const json* find(const std::string& key) const {
        const auto it = rows_.find(key);
        return it == rows_.end() ? nullptr : &it->second;
    }

    void store(const std::string& key, const json& value) {
        rows_[key] = value;
        if (path_.empty()) return;
        json doc;
        doc["rows"] = json::object();
        for (const auto& [k, v] : rows_) doc["rows"][k] = v;
        std::ofstream out(path_);
        out << doc.dump(2) << "\n";
    }

   private:
    std::string path_;
    std::map<std::string, json> rows_;
};

const std::vector<long> kReferencePopulations = {200, 500, 1000, 5000, 10000};

int cmd_table(Options opt) {
    if (opt.target != "table1" && opt.target != "table2")
        throw std::invalid_argument("table expects table1 or table2");
    const bool minimax = opt.target == "table1";
    const std::vector<long> populations =
        opt.n_list.empty() ? kReferencePopulations : opt.n_list;

    std::vector<double> epsilons;
    if (minimax)
        epsilons = {0.0};
    else if (opt.epsilon_given)
        epsilons = {opt.epsilon};
    else if (!opt.n_list.empty())
        epsilons = {0.01};
    else
        epsilons = {0.01, 0.005};

    Checkpoint checkpoint(opt.checkpoint, opt.resume);
    std::string text = minimax ? "N,m,fraction\n" : "epsilon,N,m,fraction,mu0,mu1\n";
    bool all_feasible = true;

    for (double eps : epsilons) {
        for (long n_pop : populations) {
            const std::string key = row_key(opt.target, eps, n_pop);
            TableRow row;
            if (const json* cached = checkpoint.find(key)) {
                row = row_from_json(*cached);
                std::cerr << "# resume: reusing " << key << "\n";
            } else {
                std::cerr << "# computing " << key << "\n";
                DesignRecommendation rec;
                if (minimax) {
                    GridSpec grid;
                    grid.step = opt.grid_step;
                    rec = minimax_sample_size(n_pop, grid,
                                              search_config(opt, "table1"));
                } else {
                    rec = wmb_sample_size(n_pop, GridSpec::gap_grid(eps),
                                          search_config(opt, "table2"));
                }
                row.epsilon = eps;
                row.population = n_pop;
                row.m_star = rec.m_star;
                row.fraction = rec.fraction;
                row.feasible = rec.feasible;
                if (rec.least_favorable) {
                    row.mu1 = rec.least_favorable->mu1;
                    row.mu0 = rec.least_favorable->mu0;
                    row.has_state = true;
                }
                checkpoint.store(key, row_to_json(row));
            }
            all_feasible = all_feasible && row.feasible;
            if (minimax) {
                text += std::to_string(row.population) + "," +
                        std::to_string(row.m_star) + "," + fixed3(row.fraction) + "\n";
            } else {
                text += sig6(row.epsilon) + "," + std::to_string(row.population) + "," +
                        std::to_string(row.m_star) + "," + fixed3(row.fraction) + "," +
                        fixed3(row.mu0) + "," + fixed3(row.mu1) + "\n";
            }
        }
    }
    emit(opt, text);
    return all_feasible ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------------------
// figure

int cmd_figure(Options opt) {
    if (opt.population <= 0) opt.population = 500;

    if (opt.target == "fig1a" || opt.target == "fig1b") {
        GridSpec grid;
        grid.step = opt.grid_step;
        const DesignRecommendation rec = minimax_sample_size(
            opt.population, grid, search_config(opt, opt.target.c_str()));
        std::string text;
        if (opt.target == "fig1a") {
            text = "m,mu1,mu0\n";
            for (const TracePoint& point : rec.trace)
                text += std::to_string(point.experiment_size) + "," +
                        sig6(point.argmax.mu1) + "," + sig6(point.argmax.mu0) + "\n";
        } else {
            text = "m,worstRegret\n";
            for (const TracePoint& point : rec.trace)
                text += std::to_string(point.experiment_size) + "," +
                        sig9(point.worst_value) + "\n";
        }
        emit(opt, text);
        return kExitOk;
    }

    if (opt.target == "fig2") {
        SearchConfig config = search_config(opt, "fig2");
        config.scan_past_crossing = true;
        const DesignRecommendation rec =
            wmb_sample_size(opt.population, GridSpec::gap_grid(opt.epsilon), config);
        std::string text = "# crossing_m=" +
                           (rec.feasible ? std::to_string(rec.m_star)
                                         : std::string("none")) +
                           "\n";
        text += "m,maxEta\n";
        for (const TracePoint& point : rec.trace)
            text += std::to_string(point.experiment_size) + "," +
                    sig9(point.worst_value) + "\n";
        emit(opt, text);
        return rec.feasible ? kExitOk : kExitInfeasible;
    }

    if (opt.target == "figA") {
        const std::vector<double> epsilons = {1e-2, 1e-3, 1e-4};
        std::string text = "m";
        for (double eps : epsilons) text += ",rreg_" + sig6(eps);
        text += "\n";
        std::vector<ErrorProbEvaluator> evals;
        for (double eps : epsilons) evals.emplace_back(BernoulliState(eps, 0.0));
        const long n_pop = opt.population;
        for (long m = 0; m <= n_pop; m += 2) {
            text += std::to_string(m);
            for (size_t i = 0; i < epsilons.size(); ++i) {
                // Relative regret at the thin-margin state: the effect size
                // cancels, leaving m/(2N) + (1 - m/N) e(m).
                const double share = double(m) / double(n_pop);
                const double rreg = 0.5 * share + (1.0 - share) * evals[i].error_prob();
                text += "," + sig9(rreg);
            }
            if (m < n_pop)
                for (auto& ev : evals) ev.advance();
            text += "\n";
        }
        emit(opt, text);
        return kExitOk;
    }

    throw std::invalid_argument("figure expects fig1a, fig1b, fig2 or figA");
}

// ---------------------------------------------------------------------------
// validate

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<Check> suite_exact_identity(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        double hi = unit(rng), lo = unit(rng);
        if (hi < lo) std::swap(hi, lo);
        const long half = trial % 10 == 0 ? 200 + long(rng() % 800) : 1 + long(rng() % 200);
        const long m = 2 * half;
        const IdentityGap gap =
            exact_identity_gap(DesignContext(2 * m + 4, m), BernoulliState(hi, lo));
        worst = std::max(worst, std::abs(gap.gap()));
    }
    Check check;
    check.name = "error-decrement-identity";
    check.passed = worst <= 1e-12;
    check.detail = "max |lhs - rhs| = " + sig6(worst) + " over 300 states (bound 1e-12)";
    return {check};
}

std::vector<Check> suite_tilt(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.02, 0.98);
    std::uniform_int_distribution<int> size(1, 500);
    double worst = 0.0;
    for (int trial = 0; trial < 120; ++trial) {
        double hi = unit(rng), lo = unit(rng);
        if (hi < lo) std::swap(hi, lo);
        if (hi == lo) continue;
        const TrinomialWalk walk = TrinomialWalk::from_rates(hi, lo, size(rng));
        const std::vector<double> direct = walk_pmf(walk);
        const std::vector<double> tilted = walk_pmf_tilted(walk, TiltedWalk::from_walk(walk));
        for (size_t i = 0; i < direct.size(); ++i) {
            if (direct[i] < 1e-280) continue;
            worst = std::max(worst, std::abs(tilted[i] - direct[i]) / direct[i]);
        }
    }
    Check check;
    check.name = "tilted-walk-identity";
    check.passed = worst <= 1e-12;
    check.detail = "max relative deviation = " + sig6(worst) + " (bound 1e-12)";
    return {check};
}

std::vector<Check> suite_hoeffding(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_margin = -1.0;
    for (int trial = 0; trial < 500; ++trial) {
        double hi = unit(rng), lo = unit(rng);
        if (hi < lo) std::swap(hi, lo);
        const long m = 2 * (1 + long(rng() % 150));
        const DesignContext ctx(2 * m, m);
        const BernoulliState state(hi, lo);
        const double slack =
            error_prob(ctx, state) - hoeffding_error_bound(ctx, state);
        worst_margin = std::max(worst_margin, slack);
    }
    Check check;
    check.name = "hoeffding-cap";
    check.passed = worst_margin <= 1e-15;
    check.detail = "max (exact - bound) = " + sig6(worst_margin) + " over 500 states";
    return {check};
}

std::vector<Check> suite_localization(const Options& opt) {
    const long n_pop = 2000;
    const std::vector<long> sizes = {200, 400, 800};
    SearchConfig config;
    config.workers = opt.workers;
    const LocalizationReport report =
        localization_diagnostic(n_pop, sizes, GridSpec::gap_grid(0.01), config);
    int asserted = 0, held = 0;
    for (const LocalizationRow& row : report.rows)
        if (row.asserted) {
            ++asserted;
            if (row.within) ++held;
        }
    Check check;
    check.name = "near-diagonal-localization";
    check.passed = report.all_asserted_hold;
    check.detail = std::to_string(held) + "/" + std::to_string(asserted) +
                   " asserted rows within 2 sqrt(log N / m) at N=2000";
    return {check};
}

std::vector<Check> suite_montecarlo(const Options& opt) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    int within = 0, total = 20;
    for (int trial = 0; trial < total; ++trial) {
        const long n_pop = 2 * (10 + long(rng() % 20));
        const long m = 2 * (1 + long(rng() % (size_t(n_pop) / 2 - 1)));
        const DesignContext ctx(n_pop, m);
        const BernoulliState state(unit(rng), unit(rng));
        const SimConfig config(ctx, state, 100000, opt.seed + 100 + std::uint64_t(trial));
        const SimEstimate est = simulate_error_prob(config, opt.workers);
        const double exact = error_prob(ctx, state);
        if (est.std_error == 0.0 || std::abs(est.mean - exact) <= 4.0 * est.std_error)
            ++within;
    }
    Check check;
    check.name = "montecarlo-consistency";
    check.passed = within >= 19;
    check.detail = std::to_string(within) + "/" + std::to_string(total) +
                   " estimates within 4 standard errors";
    return {check};
}

std::vector<Check> suite_na_agreement(const Options& opt) {
    const long n_pop = 2000;
    const DesignContext ctx(n_pop, n_pop / 2);
    const LocalRegion region(0.1, 1.0, n_pop);
    double worst = 0.0;
    for (const BernoulliState& state : region.grid(12, 12))
        worst = std::max(worst, std::abs(wmb_ratio(ctx, state).value -
                                         wmb_ratio_na(ctx, state).value));
    (void)opt;
    Check check;
    check.name = "normal-approximation-agreement";
    check.passed = worst <= 0.05;
    check.detail = "max |exact - approx| = " + sig6(worst) +
                   " over a 12x12 near-diagonal grid at N=2000 (bound 0.05)";
    return {check};
}

std::vector<Check> suite_gaussian_closed_form(std::uint64_t seed) {
    std::vector<Check> checks;

    // Closed-form argmax of the limit curve against a long-double
    // golden-section maximizer.  The curve is re-evaluated in long
    // double: its flatness near the maximum makes a double-precision
    // search unable to localize the argmax below ~3e-8.
    double worst_arg = 0.0, worst_val = 0.0;
    for (double k : {2.5, 3.0, 5.0}) {
        const LimitCurveSup sup = limit_curve_sup(k);
        const long double inv_phi = 0.6180339887498948482L;
        long double a = 0.0L, b = 3.0L;
        long double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
        auto f = [k](long double t) {
            const long double inv_sqrt2 = 0.7071067811865475244L;
            const long double inv_sqrt2pi = 0.3989422804014326779L;
            return erfcl(t * inv_sqrt2) +
                   (long double)k * t * inv_sqrt2pi * expl(-0.5L * t * t);
        };
        long double fc = f(c), fd = f(d);
        for (int i = 0; i < 200 && d - c > 1e-14L; ++i) {
            if (fc > fd) { b = d; d = c; fd = fc; c = b - inv_phi * (b - a); fc = f(c); }
            else { a = c; c = d; fc = fd; d = a + inv_phi * (b - a); fd = f(d); }
        }
        const double t_hat = double(0.5L * (a + b));
        worst_arg = std::max(worst_arg, std::abs(t_hat - sup.argmax));
        worst_val = std::max(worst_val,
                             std::abs(limit_curve_value(k, t_hat) - sup.value));
    }
    Check argmax_check;
    argmax_check.name = "limit-curve-argmax";
    argmax_check.passed = worst_arg < 1e-8 && worst_val < 1e-12;
    argmax_check.detail = "argmax deviation " + sig6(worst_arg) +
                          ", value deviation " + sig6(worst_val);
    checks.push_back(argmax_check);

    // Marginal ratio as a finite-difference derivative ratio.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> taus(0.02, 0.8);
    std::uniform_real_distribution<double> sizes(20.0, 800.0);
    double worst_fd = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double n_pop = 2000.0;
        const double m = sizes(rng);
        const GaussianState state(taus(rng), 1.0);
        const double h = 1e-4 * m;
        auto risk = [&](double mm) {
            return (n_pop - mm) * state.tau * gaussian_error_prob(mm, state);
        };
        const double numeric = -(risk(m + h) - risk(m - h)) / (2.0 * h) /
                               (state.tau / 2.0);
        const double closed = gaussian_marginal_ratio(n_pop, m, state);
        worst_fd = std::max(worst_fd, std::abs(numeric - closed) /
                                          std::max(1e-6, std::abs(closed)));
    }
    Check fd_check;
    fd_check.name = "marginal-ratio-derivative";
    fd_check.passed = worst_fd <= 1e-4;
    fd_check.detail = "max relative gap to central difference = " + sig6(worst_fd);
    checks.push_back(fd_check);

    Check threshold_check;
    threshold_check.name = "even-third-threshold";
    threshold_check.passed = gaussian_wmb_threshold(6).even_m == 2 &&
                             gaussian_wmb_threshold(300).even_m == 100 &&
                             gaussian_wmb_threshold(1000).even_m == 334;
    threshold_check.detail = "N in {6, 300, 1000} -> m in {2, 100, 334}";
    checks.push_back(threshold_check);
    return checks;
}

int cmd_validate(const Options& opt) {
    const std::string suite = opt.target.empty() ? "all" : opt.target;
    std::vector<Check> checks;
    auto want = [&](const char* name) { return suite == "all" || suite == name; };
    bool known = suite == "all";
    if (want("exact-identity")) {
        auto part = suite_exact_identity(opt.seed);
        checks.insert(checks.end(), part.begin(), part.end());
        known = true;
    }
    if (want("tilt")) {
        auto part = suite_tilt(opt.seed);
        checks.insert(checks.end(), part.begin(), part.end());
        known = true;
    }
    if (want("hoeffding")) {
        auto part = suite_hoeffding(opt.seed);
        checks.insert(checks.end(), part.begin(), part.end());
        known = true;
    }
    if (want("localization")) {
        auto part = suite_localization(opt);
        checks.insert(checks.end(), part.begin(), part.end());
        known = true;
    }
    if (want("montecarlo")) {
        auto part = suite_montecarlo(opt);
        checks.insert(checks.end(), part.begin(), part.end());
        known = true;
    }
    if (want("na-agreement")) {
        auto part = suite_na_agreement(opt);
        checks.insert(checks.end(), part.begin(), part.end());
        known = true;
    }
    if (want("gaussian-closed-form")) {
        auto part = suite_gaussian_closed_form(opt.seed);
        checks.insert(checks.end(), part.begin(), part.end());
        known = true;
    }
    if (!known) throw std::invalid_argument("unknown validation suite: " + suite);

    bool all = true;
    json doc;
    doc["suite"] = suite;
    doc["checks"] = json::array();
    for (const Check& check : checks) {
        all = all && check.passed;
        json entry;
        entry["name"] = check.name;
        entry["passed"] = check.passed;
        entry["detail"] = check.detail;
        doc["checks"].push_back(entry);
        std::cerr << "# " << (check.passed ? "pass" : "FAIL") << " " << check.name
                  << ": " << check.detail << "\n";
    }
    doc["allPassed"] = all;

    if (format_or(opt, "json") == "csv") {
        std::string text = "name,passed,detail\n";
        for (const Check& check : checks)
            text += check.name + "," + (check.passed ? "1" : "0") + ",\"" +
                    check.detail + "\"\n";
        emit(opt, text);
    } else {
        emit(opt, doc.dump(2));
    }
    return all ? kExitOk : kExitError;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const Options& opt) {
    if (opt.population <= 0 || opt.experiment_size < 0)
        throw std::invalid_argument("simulate needs --N and --m");
    const DesignContext ctx(opt.population, opt.experiment_size);

    const bool gaussian = opt.tau.has_value() || opt.gaussian;
    json model;
    SimEstimate est;
    std::optional<double> exact;

    if (gaussian) {
        if (!opt.tau)
            throw std::invalid_argument("the gaussian model needs --tau");
        const GaussianState state(*opt.tau, opt.sigma);
        const SimConfig config(ctx, state, opt.replications, opt.seed);
        if (opt.quantity == "error") {
            est = simulate_error_prob(config, opt.workers);
            exact = ctx.experiment_size == 0
                        ? 0.5
                        : gaussian_error_prob(double(ctx.experiment_size), state);
        } else {
            est = simulate_regret(config, opt.workers);
            const double e = ctx.experiment_size == 0
                                 ? 0.5
                                 : gaussian_error_prob(double(ctx.experiment_size), state);
            exact = 0.5 * double(ctx.experiment_size) * std::abs(state.tau) +
                    double(ctx.rollout_size()) * std::abs(state.tau) * e;
        }
        model["tau"] = state.tau;
        model["sigma"] = state.sigma;
    } else {
        if (!opt.mu1 || !opt.mu0)
            throw std::invalid_argument("the bernoulli model needs --mu1 and --mu0");
        const BernoulliState state(*opt.mu1, *opt.mu0);
        const SimConfig config(ctx, state, opt.replications, opt.seed);
        if (opt.quantity == "error") {
            est = simulate_error_prob(config, opt.workers);
            exact = error_prob(ctx, state);
        } else {
            est = simulate_regret(config, opt.workers);
            exact = evaluate(ctx, state).regret;
        }
        model["mu1"] = state.mu1;
        model["mu0"] = state.mu0;
    }

    if (format_or(opt, "json") == "csv") {
        std::string text = "quantity,N,m,mean,stdError,exact\n";
        text += opt.quantity + "," + std::to_string(opt.population) + "," +
                std::to_string(opt.experiment_size) + "," + sig9(est.mean) + "," +
                sig9(est.std_error) + "," + (exact ? sig9(*exact) : "") + "\n";
        emit(opt, text);
    } else {
        json doc;
        doc["quantity"] = opt.quantity;
        doc["N"] = opt.population;
        doc["m"] = opt.experiment_size;
        doc["model"] = model;
        doc["replications"] = est.replications;
        doc["seed"] = opt.seed;
        doc["mean"] = est.mean;
        doc["stdError"] = est.std_error;
        doc["exact"] = exact ? json(*exact) : json(nullptr);
        emit(opt, doc.dump(2));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sample-size design for test-and-roll experiments"};
    app.require_subcommand(1);

    Options opt;
    std::string config_path;
    bool echo_config = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--workers", opt.workers,
                        "worker threads (0 = automatic)");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output", opt.output, "write output to a file");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_flag("--echo-config", echo_config,
                      "print the resolved config as JSON and exit");
    };

    CLI::App* rec = app.add_subcommand("recommend", "recommend an experiment size");
    rec->add_option("--criterion", opt.criterion, "design criterion")
        ->check(CLI::IsMember({"minimax-regret", "wmb-grid", "wmb-normal-approx",
                               "gaussian-wmb", "relative-regret"}));
    rec->add_option("--N", opt.population, "population size");
    rec->add_option("--epsilon", opt.epsilon, "adversary gap floor");
    rec->add_option("--grid-step", opt.grid_step, "search grid step");
    rec->add_option("--sigma", opt.sigma, "gaussian outcome standard deviation");
    rec->add_option("--m-max", opt.m_max, "cap on scanned experiment sizes");
    rec->add_flag("--bisect,!--no-bisect", opt.bisect, "bisection instead of scan");
    rec->add_flag("--refine,!--no-refine", opt.refine, "local grid refinement");
    rec->add_flag("--prune,!--no-prune", opt.prune, "bound-based pruning");
    rec->add_flag("--trace,!--no-trace", opt.with_trace, "include the per-m trace");
    add_common(rec);

    CLI::App* table = app.add_subcommand("table", "reproduce a reference table");
    table->add_option("name", opt.target, "table1 or table2");
    table->add_option("--N-list", opt.n_list, "population sizes")->delimiter(',');
    table->add_option("--epsilon", opt.epsilon, "adversary gap floor");
    table->add_option("--grid-step", opt.grid_step, "search grid step (table1)");
    table->add_option("--checkpoint", opt.checkpoint, "checkpoint file");
    table->add_flag("--resume", opt.resume, "reuse rows from the checkpoint file");
    table->add_flag("--prune,!--no-prune", opt.prune, "bound-based pruning");
    table->add_flag("--bisect,!--no-bisect", opt.bisect, "bisection instead of scan");
    add_common(table);

    CLI::App* figure = app.add_subcommand("figure", "emit figure data series");
    figure->add_option("name", opt.target, "fig1a, fig1b, fig2 or figA");
    figure->add_option("--N", opt.population, "population size (default 500)");
    figure->add_option("--epsilon", opt.epsilon, "adversary gap floor (fig2)");
    figure->add_option("--grid-step", opt.grid_step, "search grid step (fig1)");
    figure->add_option("--m-max", opt.m_max, "cap on scanned experiment sizes");
    figure->add_flag("--prune,!--no-prune", opt.prune, "bound-based pruning");
    add_common(figure);

    CLI::App* validate = app.add_subcommand("validate", "run validation suites");
    validate->add_option("--suite", opt.target,
                         "exact-identity, tilt, hoeffding, localization, montecarlo, "
                         "na-agreement, gaussian-closed-form or all");
    add_common(validate);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo spot check");
    simulate->add_option("--quantity", opt.quantity, "error or regret")
        ->check(CLI::IsMember({"error", "regret"}));
    simulate->add_option("--N", opt.population, "population size");
    simulate->add_option("--m", opt.experiment_size, "experiment size");
    simulate->add_option("--mu1", [&opt](const CLI::results_t& res) {
        opt.mu1 = std::stod(res[0]);
        return true;
    }, "treated success rate");
    simulate->add_option("--mu0", [&opt](const CLI::results_t& res) {
        opt.mu0 = std::stod(res[0]);
        return true;
    }, "control success rate");
    simulate->add_option("--tau", [&opt](const CLI::results_t& res) {
        opt.tau = std::stod(res[0]);
        return true;
    }, "gaussian treatment effect");
    simulate->add_option("--sigma", opt.sigma, "gaussian outcome standard deviation");
    simulate->add_option("--reps", opt.replications, "replications");
    add_common(simulate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    CLI::App* sub = app.get_subcommands().front();
    opt.command = sub->get_name();
    auto flag_count = [sub](const char* name) -> std::size_t {
        const CLI::Option* option = sub->get_option_no_throw(name);
        return option ? option->count() : 0;
    };
    opt.gaussian = flag_count("--sigma") > 0 || opt.tau.has_value();
    opt.epsilon_given = flag_count("--epsilon") > 0;

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in.good())
                throw std::invalid_argument("cannot read config file: " + config_path);
            const json cfg = json::parse(in);
            apply_config(cfg, sub, opt);
            if (cfg.contains("epsilon") && !cfg["epsilon"].is_null())
                opt.epsilon_given = true;
        }
        if (echo_config) {
            std::cout << options_to_json(opt).dump(2) << "\n";
            return kExitOk;
        }
        if (opt.command == "recommend") return cmd_recommend(opt);
        if (opt.command == "table") return cmd_table(opt);
        if (opt.command == "figure") return cmd_figure(opt);
        if (opt.command == "validate") return cmd_validate(opt);
        if (opt.command == "simulate") return cmd_simulate(opt);
        throw std::invalid_argument("unknown command");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
