#include "npspec/cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "npspec/csv.hpp"
#include "npspec/dgp.hpp"
#include "npspec/efficiency.hpp"
#include "npspec/errors.hpp"
#include "npspec/fitting.hpp"
#include "npspec/grammar.hpp"
#include "npspec/harness.hpp"
#include "npspec/spectest.hpp"
#include "npspec/text.hpp"

namespace npspec::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

void emit(const std::string& content, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + path + "'");
    file << content;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

// ---- test ------------------------------------------------------------------

struct TestOptions {
    std::string data;
    std::string residuals;
    std::string kernel = "uniform";
    std::string bandwidth = "rot:2/9";
    std::string tests = "q,q0,glr";
    std::vector<std::string> losses;
    std::string calibration;
    int bootstrap = 0;
    std::string boot_mode = "conditional";
    std::uint64_t seed = 0;
    std::optional<double> omega;
    unsigned threads = 1;
    std::string format = "text";
    std::string out;
};

ordered_json test_report_json(const SpecTestReport& r, bool residual_mode) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["command"] = "test";
    doc["null_model"] = residual_mode ? "residuals" : "linear";
    doc["n"] = r.n;
    doc["p"] = r.p;
    doc["kernel"] = std::string(to_string(r.kernel.family));
    doc["bandwidth"] = {{"selector", to_string(r.selector)},
                        {"rule", std::string(to_string(r.bandwidth.rule))},
                        {"h", r.bandwidth.h}};
    doc["omega_measure"] = r.omega_measure;
    doc["ssr0"] = r.ssr0;
    doc["ssr1"] = r.ssr1;
    doc["calibration"] = std::string(to_string(r.calibration));
    if (wants_bootstrap(r.calibration)) {
        doc["bootstrap"] = {{"b", r.b}, {"mode", std::string(to_string(r.mode))}, {"seed", r.seed}};
    } else {
        doc["bootstrap"] = nullptr;
    }
    ordered_json results = ordered_json::array();
    for (const auto& t : r.results) {
        ordered_json item;
        item["test"] = t.test.label();
        item["method"] = std::string(to_string(t.test.method));
        if (t.test.uses_loss()) {
            item["loss"] = to_string(t.test.loss);
            item["curvature"] = loss_curvature(t.test.loss);
        } else {
            item["loss"] = nullptr;
            item["curvature"] = nullptr;
        }
        item["statistic"] = t.statistic;
        if (t.asymptotic) {
            item["asymptotic"] = {{"centering", *t.asymptotic->centering},
                                  {"scale_factor", t.asymptotic->scale_factor},
                                  {"scaling", t.asymptotic->scaling},
                                  {"z", t.asymptotic->z},
                                  {"p_value", t.asymptotic->p_value}};
        } else {
            item["asymptotic"] = nullptr;
        }
        if (t.bootstrap) {
            item["bootstrap"] = {{"p_star", t.bootstrap->p_star}, {"b", t.bootstrap->replicates.size()}};
        } else {
            item["bootstrap"] = nullptr;
        }
        results.push_back(std::move(item));
    }
    doc["results"] = std::move(results);
    return doc;
}

std::string test_report_text(const SpecTestReport& r, bool residual_mode) {
    std::ostringstream out;
    out << "n = " << r.n << ", p = " << r.p << ", null model: " << (residual_mode ? "supplied residuals" : "linear")
        << "\n";
    out << "kernel " << to_string(r.kernel.family) << ", bandwidth " << to_string(r.selector)
        << ", h = " << text::format_double(r.bandwidth.h) << "\n";
    out << "SSR0 = " << text::format_double(r.ssr0) << ", SSR1 = " << text::format_double(r.ssr1)
        << ", Omega = " << text::format_double(r.omega_measure) << "\n";
    out << "calibration: " << to_string(r.calibration);
    if (wants_bootstrap(r.calibration)) {
        out << " (B = " << r.b << ", " << to_string(r.mode) << ", seed " << r.seed << ")";
    }
    out << "\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %14s %12s %12s %10s %8s\n", "test", "statistic", "centering", "z",
                  "p-value", "p*");
    out << line;
    for (const auto& t : r.results) {
        const std::string centering = t.asymptotic ? fmt("%.6g", *t.asymptotic->centering) : "-";
        const std::string z = t.asymptotic ? fmt("%.6g", t.asymptotic->z) : "-";
        const std::string p = t.asymptotic ? fmt("%.4g", t.asymptotic->p_value) : "-";
        const std::string ps = t.bootstrap ? fmt("%.4g", t.bootstrap->p_star) : "-";
        std::snprintf(line, sizeof line, "%-24s %14.6g %12s %12s %10s %8s\n", t.test.label().c_str(), t.statistic,
                      centering.c_str(), z.c_str(), p.c_str(), ps.c_str());
        out << line;
    }
    return out.str();
}

int cmd_test(const TestOptions& o, std::ostream& out) {
    if (o.data.empty() == o.residuals.empty()) {
        throw std::invalid_argument("give exactly one of --data or --residuals");
    }
    if (o.format != "text" && o.format != "json") throw std::invalid_argument("--format must be text or json");

    std::vector<LossSpec> losses;
    for (const auto& l : o.losses) losses.push_back(grammar::parse_loss(l));

    SpecTestConfig config;
    config.tests = grammar::parse_test_list(o.tests, losses);
    config.kernel = grammar::parse_kernel(o.kernel);
    config.bandwidth = grammar::parse_bandwidth(o.bandwidth);
    if (o.calibration.empty()) {
        config.calibration = o.bootstrap > 0 ? Calibration::both : Calibration::asymptotic;
    } else {
        const auto c = parse_calibration(o.calibration);
        if (!c) throw std::invalid_argument("--calibration must be asymptotic, bootstrap or both");
        config.calibration = *c;
    }
    config.b = o.bootstrap > 0 ? o.bootstrap : 99;
    const auto mode = parse_bootstrap_mode(o.boot_mode);
    if (!mode) throw std::invalid_argument("--boot-mode must be conditional or wild");
    config.mode = *mode;
    config.seed = o.seed;
    config.threads = o.threads;
    config.omega_measure = o.omega;

    const bool residual_mode = !o.residuals.empty();
    const FittedSample fitted = [&] {
        if (residual_mode) {
            const auto r = csv::parse_residual_file(o.residuals);
            return fit_residuals(r.resid, r.x, config.kernel, config.bandwidth);
        }
        return fit_sample(csv::parse_data_file(o.data), config.kernel, config.bandwidth);
    }();
    const SpecTestReport report = run_specification_test(fitted, config);
    emit(o.format == "json" ? test_report_json(report, residual_mode).dump(2) + "\n"
                            : test_report_text(report, residual_mode),
         o.out, out);
    return kExitOk;
}

// ---- gen -------------------------------------------------------------------

struct GenOptions {
    std::string dgp = "s_null";
    double theta = 0.0;
    std::string dist = "normal";
    long long n = 100;
    std::uint64_t seed = 0;
    std::string truncation = "clip";
    std::string shape = "quadratic";
    int dim = 1;
    std::optional<double> local_h;
    std::string out;
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
    DGPSpec spec;
    const auto model = parse_model(o.dgp);
    if (!model) throw std::invalid_argument("unknown --dgp '" + o.dgp + "'; expected s_null | p1 | p2 | p3 | local");
    const auto law = parse_error_law(o.dist);
    if (!law) {
        throw std::invalid_argument("unknown --dist '" + o.dist +
                                    "'; expected normal | t5 | uniform | lognormal | chisq1");
    }
    const auto trunc = parse_truncation(o.truncation);
    if (!trunc) throw std::invalid_argument("--truncation must be clip or reject");
    const auto shape = parse_delta_shape(o.shape);
    if (!shape) throw std::invalid_argument("unknown --shape '" + o.shape + "'; expected quadratic | cosine");
    if (o.n < 1) throw std::invalid_argument("--n must be >= 1");
    spec.model = *model;
    spec.theta = o.theta;
    spec.error_law = *law;
    spec.n = static_cast<Index>(o.n);
    spec.seed = o.seed;
    spec.truncation = *trunc;
    spec.shape = *shape;
    spec.p_dim = o.dim;
    spec.local_bandwidth = o.local_h;
    std::ostringstream csv_text;
    csv::write_sample(csv_text, gen_sample(spec));
    emit(csv_text.str(), o.out, out);
    return kExitOk;
}

// ---- mc --------------------------------------------------------------------

struct McOptions {
    std::string preset;
    std::string config;
    std::optional<int> reps;
    std::optional<std::uint64_t> seed;
    std::optional<int> bootstrap;
    std::optional<unsigned> threads;
    std::string shard;
    std::vector<std::string> merge;
    std::string out;
    std::string format = "text";
};

int cmd_mc(const McOptions& o, std::ostream& out) {
    if (o.format != "text" && o.format != "csv" && o.format != "json") {
        throw std::invalid_argument("--format must be text, csv or json");
    }
    MCReport report;
    if (!o.merge.empty()) {
        if (!o.preset.empty() || !o.config.empty()) throw std::invalid_argument("--merge cannot be combined with a run");
        report = load_report(o.merge.front());
        for (std::size_t i = 1; i < o.merge.size(); ++i) report = merge_reports(report, load_report(o.merge[i]));
    } else {
        if (o.preset.empty() == o.config.empty()) {
            throw std::invalid_argument("give exactly one of a preset name or --config");
        }
        ExperimentConfig config;
        if (!o.preset.empty()) {
            const auto p = preset_config(o.preset);
            if (!p) throw std::invalid_argument("unknown preset '" + o.preset + "'; expected table2 .. table6");
            config = *p;
        } else {
            config = load_config(o.config);
        }
        if (o.reps) config.reps = *o.reps;
        if (o.seed) config.seed = *o.seed;
        if (o.bootstrap) config.b = *o.bootstrap;
        if (o.threads) config.threads = *o.threads;
        if (!o.shard.empty()) {
            const auto parts = text::split(o.shard, '/');
            const auto i = parts.size() == 2 ? text::parse_integer(parts[0]) : std::nullopt;
            const auto k = parts.size() == 2 ? text::parse_integer(parts[1]) : std::nullopt;
            if (!i || !k) throw std::invalid_argument("--shard must be i/k");
            config.shard_index = static_cast<int>(*i);
            config.shard_count = static_cast<int>(*k);
        }
        report = run_experiment(config);
    }
    if (!o.out.empty()) persist_report(report, o.out);
    if (o.format == "json") {
        if (o.out.empty()) out << report_to_json(report);
    } else {
        out << (o.format == "csv" ? format_report_csv(report) : format_report_text(report));
    }
    return kExitOk;
}

// ---- are / are-table / constants -------------------------------------------

struct AreOptions {
    std::string kernel = "uniform";
    std::string omega;
    int dim = 1;
    std::string convention = "eq52";
    std::string format = "text";
};

int cmd_are(const AreOptions& o, std::ostream& out) {
    const KernelSpec kernel = grammar::parse_kernel(o.kernel);
    const auto omega = text::parse_rational(o.omega);
    if (!omega) throw std::invalid_argument("--omega must be a number or fraction, e.g. 2/9");
    const auto conv = parse_are_convention(o.convention);
    if (!conv) throw std::invalid_argument("--convention must be eq52 or table1");
    const AREResult r = pitman_are(kernel, o.dim, *omega, *conv);
    if (o.format == "json") {
        ordered_json doc{{"kernel", std::string(to_string(kernel.family))},
                         {"p", r.p},
                         {"omega", r.omega},
                         {"convention", std::string(to_string(r.convention))},
                         {"ratio", r.ratio},
                         {"exponent", r.exponent},
                         {"are", r.are},
                         {"note", std::string(are_convention_note())}};
        out << doc.dump(2) << "\n";
    } else if (o.format == "text") {
        out << "kernel " << to_string(kernel.family) << ", p = " << r.p << ", omega = " << text::format_double(r.omega)
            << ", convention " << to_string(r.convention) << "\n";
        out << "ratio 4d/b = " << text::format_double(r.ratio) << "\n";
        out << "exponent   = " << text::format_double(r.exponent) << "\n";
        out << "ARE        = " << text::format_double(r.are) << "\n";
        if (r.convention == AreConvention::table1) out << "\n" << are_convention_note() << "\n";
    } else {
        throw std::invalid_argument("--format must be text or json");
    }
    return kExitOk;
}

struct AreTableOptions {
    std::string omegas = "1/5,2/9";
    std::string format = "text";
};

int cmd_are_table(const AreTableOptions& o, std::ostream& out) {
    const auto omegas = grammar::parse_number_list(o.omegas);
    const auto rows = are_table(omegas);
    if (o.format == "csv") {
        out << format_are_table_csv(rows);
    } else if (o.format == "text") {
        out << format_are_table_text(rows);
    } else {
        throw std::invalid_argument("--format must be csv or text");
    }
    return kExitOk;
}

struct ConstantsOptions {
    std::string kernel = "uniform";
    int dim = 1;
    double tol = kDefaultQuadratureTol;
};

int cmd_constants(const ConstantsOptions& o, std::ostream& out) {
    const KernelSpec kernel = grammar::parse_kernel(o.kernel);
    if (o.dim < 1) throw std::invalid_argument("--dim must be >= 1");
    if (!(o.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    const KernelConstants k = kernel_constants(kernel, o.dim, o.tol);
    ordered_json doc{{"kernel", std::string(to_string(kernel.family))},
                     {"p", k.p},
                     {"tol", k.tol},
                     {"a", k.a},
                     {"b", k.b},
                     {"c", k.c},
                     {"d", k.d},
                     {"t", k.t},
                     {"ratio_4d_over_b", k.efficiency_ratio()}};
    out << doc.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"npspec: loss-function and GLR specification tests of linear regression against "
                 "nonparametric alternatives"};
    app.name("npspec");
    app.require_subcommand(1);
    app.footer(grammar::grammar_help());

    TestOptions test_o;
    auto* test = app.add_subcommand("test", "Run the specification tests on a data file");
    test->add_option("--data,-d", test_o.data, "CSV with header y,x1[,x2,x3]");
    test->add_option("--residuals", test_o.residuals, "CSV with header resid,x1[,x2,x3] from your own null model");
    test->add_option("--kernel", test_o.kernel, "uniform | epanechnikov | biweight | triweight")->capture_default_str();
    test->add_option("--bandwidth", test_o.bandwidth, "fixed:<h> | rot:<omega> | cv:<c1>,<c2>,<grid>")
        ->capture_default_str();
    test->add_option("--tests", test_o.tests, "comma list of q | q0 | glr | f, e.g. q[linex:0.5,1],glr")
        ->capture_default_str();
    test->add_option("--loss", test_o.losses, "loss for bare q/q0 (repeatable): quadratic | tq:<c> | linex:<a>,<b>")
        ->allow_extra_args(false);
    test->add_option("--calibration", test_o.calibration, "asymptotic | bootstrap | both");
    test->add_option("--bootstrap", test_o.bootstrap, "bootstrap replications B (default 99 when bootstrapping)");
    test->add_option("--boot-mode", test_o.boot_mode, "conditional | wild")->capture_default_str();
    test->add_option("--seed", test_o.seed, "64-bit seed for the bootstrap")->capture_default_str();
    test->add_option("--omega", test_o.omega, "support measure; default is the product of coordinate ranges");
    test->add_option("--threads", test_o.threads, "bootstrap workers, 0 = all cores")->capture_default_str();
    test->add_option("--format", test_o.format, "text | json")->capture_default_str();
    test->add_option("--out,-o", test_o.out, "write the report here instead of stdout");

    GenOptions gen_o;
    auto* gen = app.add_subcommand("gen", "Generate a simulated sample as CSV");
    gen->add_option("--dgp", gen_o.dgp, "s_null | p1 | p2 | p3 | local")->capture_default_str();
    gen->add_option("--theta", gen_o.theta, "departure parameter")->capture_default_str();
    gen->add_option("--dist", gen_o.dist, "normal | t5 | uniform | lognormal | chisq1")->capture_default_str();
    gen->add_option("--n", gen_o.n, "sample size")->capture_default_str();
    gen->add_option("--seed", gen_o.seed, "64-bit seed")->capture_default_str();
    gen->add_option("--truncation", gen_o.truncation, "clip | reject")->capture_default_str();
    gen->add_option("--shape", gen_o.shape, "local alternative shape: quadratic | cosine")->capture_default_str();
    gen->add_option("--dim", gen_o.dim, "local alternative dimension 1..3")->capture_default_str();
    gen->add_option("--local-h", gen_o.local_h, "bandwidth in the local amplitude (default sigma_X n^-2/9)");
    gen->add_option("--out,-o", gen_o.out, "output CSV (default stdout)");

    McOptions mc_o;
    auto* mc = app.add_subcommand("mc", "Monte Carlo size/power experiment");
    mc->add_option("preset", mc_o.preset, "table2 | table3 | table4 | table5 | table6");
    mc->add_option("--config", mc_o.config, "key = value experiment file");
    mc->add_option("--reps", mc_o.reps, "override replications");
    mc->add_option("--seed", mc_o.seed, "override master seed");
    mc->add_option("--bootstrap", mc_o.bootstrap, "override bootstrap replications");
    mc->add_option("--threads", mc_o.threads, "workers, 0 = all cores");
    mc->add_option("--shard", mc_o.shard, "run cells i mod k only, as i/k");
    mc->add_option("--merge", mc_o.merge, "merge these reports (repeatable) instead of running")
        ->allow_extra_args(false);
    mc->add_option("--out,-o", mc_o.out, "write the JSON report here");
    mc->add_option("--format", mc_o.format, "stdout summary: text | csv | json")->capture_default_str();

    AreOptions are_o;
    auto* are = app.add_subcommand("are", "Pitman relative efficiency of the loss test over GLR");
    are->add_option("--kernel", are_o.kernel, "uniform | epanechnikov | biweight | triweight")->capture_default_str();
    are->add_option("--omega", are_o.omega, "bandwidth rate exponent, e.g. 2/9")->required();
    are->add_option("--dim", are_o.dim, "dimension p")->capture_default_str();
    are->add_option("--convention", are_o.convention, "eq52 | table1")->capture_default_str();
    are->add_option("--format", are_o.format, "text | json")->capture_default_str();

    AreTableOptions table_o;
    auto* are_table_cmd = app.add_subcommand("are-table", "Relative efficiency of all kernels");
    are_table_cmd->add_option("--omegas", table_o.omegas, "comma list of rate exponents")->capture_default_str();
    are_table_cmd->add_option("--format", table_o.format, "text | csv")->capture_default_str();

    ConstantsOptions const_o;
    auto* constants = app.add_subcommand("constants", "Kernel functionals a, b, c, d, t as JSON");
    constants->add_option("--kernel", const_o.kernel, "uniform | epanechnikov | biweight | triweight")
        ->capture_default_str();
    constants->add_option("--dim", const_o.dim, "dimension p")->capture_default_str();
    constants->add_option("--tol", const_o.tol, "quadrature tolerance")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (test->parsed()) return cmd_test(test_o, out);
        if (gen->parsed()) return cmd_gen(gen_o, out);
        if (mc->parsed()) return cmd_mc(mc_o, out);
        if (are->parsed()) return cmd_are(are_o, out);
        if (are_table_cmd->parsed()) return cmd_are_table(table_o, out);
        if (constants->parsed()) return cmd_constants(const_o, out);
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const DegenerateError& e) {
        err << "degenerate: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace npspec::cli
