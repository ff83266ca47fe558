#include "cli.hpp"

#include "gramlab/bounds.hpp"
#include "gramlab/covariance.hpp"
#include "gramlab/direction_solver.hpp"
#include "gramlab/gram.hpp"
#include "gramlab/harness.hpp"
#include "gramlab/io.hpp"
#include "gramlab/regression.hpp"
#include "gramlab/scenarios.hpp"
#include "gramlab/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace gramlab::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Table load_csv(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw MissingInput("cannot read " + path);
    return read_csv(path);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    try {
        write_file_atomic(path, text);
    } catch (const std::exception& e) {
        throw OutputError(e.what());
    }
}

void emit_csv(const std::string& path, const Table& t) {
    try {
        write_csv(path, t);
    } catch (const std::exception& e) {
        throw OutputError(e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

template <class F>
auto as_usage(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
}

struct Common {
    std::string in;
    std::string out;
    double eps = kDefaultConfidence;
    std::uint64_t seed = 0;
    int iters = 5;
    std::optional<double> delta;
    double net_rho = 0.2;
};

void add_common(CLI::App* sub, Common& c, bool needs_input) {
    auto* in = sub->add_option("--in", c.in, "input CSV with a header row");
    if (needs_input) in->required();
    sub->add_option("--out", c.out, "output JSON path (standard output when absent)");
    sub->add_option("--eps", c.eps, "confidence parameter")->check(CLI::Range(0.0, 0.5));
    sub->add_option("--seed", c.seed, "seed for net direction sampling");
    sub->add_option("--iters", c.iters, "iterations of the eigenbasis scheme")->check(CLI::PositiveNumber);
    sub->add_option("--delta", c.delta, "relative accuracy of the net estimator");
    sub->add_option("--net-rho", c.net_rho, "net covering radius")->check(CLI::PositiveNumber);
}

Scenario scenario_from_flags(const std::string& name, const std::string& config) {
    return as_usage([&] {
        if (!config.empty()) {
            std::ifstream f(config);
            if (!f) throw MissingInput("cannot read " + config);
            Json j;
            try {
                j = Json::parse(f);
            } catch (const Json::exception& e) {
                throw InvalidInput(std::string("malformed scenario config: ") + e.what());
            }
            return scenario_from_json(j);
        }
        if (name.empty()) throw InvalidInput("one of --scenario or --config is required");
        return Scenario::make(parse_scenario_name(name));
    });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust Gram, covariance and least-squares estimation toolkit", "gramlab"};
    app.require_subcommand(1);

    // bounds
    auto* bounds = app.add_subcommand("bounds", "closed-form scale and deviation bounds");
    double b_kappa = 0.0, b_kappa2 = 0.0;
    int b_d = 0;
    std::int64_t b_n = 0;
    double b_eps = 0.0;
    std::string b_kind = "core";
    bounds->add_option("--kappa", b_kappa, "directional kurtosis")->required();
    bounds->add_option("--d", b_d, "dimension")->required();
    bounds->add_option("--n", b_n, "sample size")->required();
    bounds->add_option("--eps", b_eps, "confidence parameter")->required();
    bounds->add_option("--kind", b_kind, "core, covariance or regression")
        ->check(CLI::IsMember({"core", "covariance", "regression"}));
    bounds->add_option("--kappa2", b_kappa2, "noise kurtosis (regression kind)");

    // estimate-gram
    auto* gram = app.add_subcommand("estimate-gram", "Gram matrix estimate from a design CSV");
    Common g;
    std::string g_method = "robust-iter";
    std::optional<double> g_kappa;
    bool g_positive = false;
    add_common(gram, g, true);
    gram->add_option("--method", g_method, "empirical, robust-iter or robust-net");
    gram->add_option("--kappa", g_kappa, "kurtosis giving delta for the net method");
    gram->add_flag("--positive-part", g_positive, "clip negative eigenvalues");

    // estimate-cov
    auto* cov = app.add_subcommand("estimate-cov", "covariance estimate from a design CSV");
    Common c;
    std::string c_method = "robust", c_backend = "robust-iter";
    std::optional<double> c_kappa;
    add_common(cov, c, true);
    cov->add_option("--method", c_method, "empirical or robust")->check(CLI::IsMember({"empirical", "robust"}));
    cov->add_option("--backend", c_backend, "robust-iter or robust-net");
    cov->add_option("--kappa", c_kappa, "kurtosis giving delta for the net backend");

    // regress
    auto* reg = app.add_subcommand("regress", "least-squares fit; the last CSV column is the label");
    Common r;
    std::string r_method = "robust", r_backend = "robust-iter";
    std::optional<double> r_kappa1, r_kappa2;
    add_common(reg, r, true);
    reg->add_option("--method", r_method, "ols or robust")->check(CLI::IsMember({"ols", "robust"}));
    reg->add_option("--backend", r_backend, "robust-iter or robust-net");
    reg->add_option("--kappa1", r_kappa1, "design kurtosis for the net backend");
    reg->add_option("--kappa2", r_kappa2, "noise kurtosis for the net backend");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo excess-risk experiment");
    std::string s_scenario, s_config, s_records, s_summary, s_quantiles;
    std::size_t s_n = 100;
    int s_trials = 500, s_threads = 0;
    std::uint64_t s_seed = 1;
    double s_eps = kDefaultConfidence;
    std::optional<double> s_trunc;
    std::vector<std::string> s_estimators{"ols", "robust-iter"};
    sim->add_option("--scenario", s_scenario, "named preset, e.g. mixture-noise");
    sim->add_option("--config", s_config, "scenario config JSON");
    sim->add_option("--n", s_n, "sample size per trial");
    sim->add_option("--trials", s_trials, "number of trials");
    sim->add_option("--seed", s_seed, "root seed");
    sim->add_option("--eps", s_eps, "confidence parameter")->check(CLI::Range(0.0, 0.5));
    sim->add_option("--estimators", s_estimators, "ols, robust-iter, robust-net")->delimiter(',');
    sim->add_option("--truncation", s_trunc, "M in E[min{excess, M}]");
    sim->add_option("--threads", s_threads, "worker threads (0: GRAMLAB_THREADS or all cores)");
    sim->add_option("--records", s_records, "records CSV path");
    sim->add_option("--summary", s_summary, "summary JSON path (standard output when absent)");
    sim->add_option("--quantiles", s_quantiles, "quantile table CSV path");

    // generate
    auto* gen = app.add_subcommand("generate", "write one seeded scenario sample as CSV");
    std::string gen_scenario, gen_config, gen_out;
    std::size_t gen_n = 100;
    std::uint64_t gen_seed = 1, gen_trial = 0;
    gen->add_option("--scenario", gen_scenario, "named preset");
    gen->add_option("--config", gen_config, "scenario config JSON");
    gen->add_option("--n", gen_n, "sample size")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "root seed");
    gen->add_option("--trial", gen_trial, "trial substream");
    gen->add_option("--out", gen_out, "output CSV path")->required();

    // verify
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    std::string v_suite;
    VerifyOptions v_opt;
    ver->add_option("--suite", v_suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
    ver->add_option("--seed", v_opt.seed, "seed");
    ver->add_option("--scale", v_opt.scale, "trial-count multiplier")->check(CLI::PositiveNumber);
    ver->add_option("--threads", v_opt.threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (bounds->parsed()) {
            const BoundsReport rep = as_usage([&] {
                if (b_kind == "core") return core_bounds({b_kappa, b_d, b_n, b_eps});
                if (b_kind == "covariance") return covariance_bounds({b_kappa, b_d, b_n, b_eps});
                return regression_bounds(b_kappa, b_kappa2, b_d, b_n, b_eps);
            });
            Json j = to_json(rep);
            j["kind"] = b_kind;
            out << dump(j);
            return rep.feasible ? kOk : kInfeasible;
        }

        if (gram->parsed()) {
            const GramMethod method = as_usage([&] { return parse_gram_method(g_method); });
            const Sample s = sample_from_table(load_csv(g.in));
            GramEstimate est;
            if (method == GramMethod::empirical) {
                est = empirical_gram(s);
            } else if (method == GramMethod::robust_iter) {
                IterativeOptions o;
                o.iters = g.iters;
                o.eps = g.eps;
                o.positive_part = g_positive;
                est = robust_gram_iterative(s, o);
            } else {
                NetOptions o;
                o.eps = g.eps;
                o.delta = g.delta;
                o.kappa = g_kappa;
                if (!o.delta && !o.kappa) throw UsageError("the net method needs --delta or --kappa");
                NetBuildOptions nb;
                nb.seed = g.seed;
                est = robust_gram_net(s, o, build_sphere_net(s, g.net_rho, nb));
                if (g_positive) est = positive_part(est);
            }
            emit(g.out, dump(to_json(est)), out);
            return kOk;
        }

        if (cov->parsed()) {
            const GramMethod backend = as_usage([&] { return parse_gram_method(c_backend); });
            const Sample s = sample_from_table(load_csv(c.in));
            CovarianceEstimate est;
            if (c_method == "empirical") {
                est = empirical_covariance(s);
            } else {
                CovarianceOptions o;
                o.eps = c.eps;
                o.backend = backend;
                o.iters = c.iters;
                o.delta = c.delta;
                o.kappa = c_kappa;
                o.net_rho = c.net_rho;
                o.net.seed = c.seed;
                est = robust_covariance(s, o);
            }
            emit(c.out, dump(to_json(est)), out);
            return kOk;
        }

        if (reg->parsed()) {
            const GramMethod backend = as_usage([&] { return parse_gram_method(r_backend); });
            const LabeledSample s = labeled_from_table(load_csv(r.in));
            RegressionFit fit;
            if (r_method == "ols") {
                fit = ols(s);
            } else {
                RobustLsOptions o;
                o.eps = r.eps;
                o.backend = backend;
                o.iters = r.iters;
                o.delta = r.delta;
                o.kappa1 = r_kappa1;
                o.kappa2 = r_kappa2;
                o.net_rho = r.net_rho;
                o.net.seed = r.seed;
                fit = robust_ls(s, o);
            }
            emit(r.out, dump(to_json(fit)), out);
            return kOk;
        }

        if (sim->parsed()) {
            ExperimentSpec spec;
            as_usage([&] {
                if (s_trials < 1) throw InvalidInput("--trials must be at least 1");
                if (s_n < 1) throw InvalidInput("--n must be at least 1");
                spec.scenario = scenario_from_flags(s_scenario, s_config);
                spec.estimators.clear();
                for (const auto& e : s_estimators) spec.estimators.push_back(parse_estimator(e));
                spec.scenario.analytic();
                return 0;
            });
            spec.n = s_n;
            spec.trials = s_trials;
            spec.seed = s_seed;
            spec.eps = s_eps;
            spec.truncation = s_trunc;
            spec.threads = s_threads;
            const ExperimentResult res = run_experiment(spec);
            if (!s_records.empty()) emit_csv(s_records, records_table(res));
            if (!s_quantiles.empty()) emit_csv(s_quantiles, quantile_csv_table(quantile_table(res)));
            Json j = to_json(res);
            j["scenario"] = to_json(spec.scenario);
            j["n"] = spec.n;
            j["seed"] = spec.seed;
            j["eps"] = spec.eps;
            emit(s_summary, dump(j), out);
            return kOk;
        }

        if (gen->parsed()) {
            const Scenario sc = scenario_from_flags(gen_scenario, gen_config);
            emit_csv(gen_out, table_from_sample(sc.generate(gen_n, gen_seed, gen_trial)));
            return kOk;
        }

        if (ver->parsed()) {
            const SuiteResult res = run_suite(v_suite, v_opt);
            out << (res.passed() ? "PASS " : "FAIL ") << res.suite << ": " << res.summary() << "\n";
            return res.passed() ? kOk : kFailure;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    } catch (const MissingInput& e) {
        err << "error: " << e.what() << "\n";
        return kNoInput;
    } catch (const OutputError& e) {
        err << "error: " << e.what() << "\n";
        return kCantCreate;
    } catch (const CsvError& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsage;
}

}  // namespace gramlab::cli
