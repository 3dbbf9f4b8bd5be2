#include "npspec/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "npspec/errors.hpp"
#include "npspec/fitting.hpp"
#include "npspec/grammar.hpp"
#include "npspec/parallel.hpp"
#include "npspec/rng.hpp"
#include "npspec/text.hpp"

namespace npspec {
namespace {

std::string join_numbers(std::span<const double> values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ',';
        out += text::format_double(v);
    }
    return out;
}

template <class T, class F>
std::string join(std::span<const T> values, F&& fmt) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += ',';
        out += fmt(v);
    }
    return out;
}

bool theta_free(Model m) { return m == Model::s_null || m == Model::local; }

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// One (model, theta, error law, n) combination.
struct Cell {
    Model model;
    double theta;
    ErrorLaw errors;
    Index n;
};

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
    std::vector<Cell> cells;
    for (const auto& grid : config.models) {
        for (double theta : grid.thetas) {
            for (ErrorLaw law : config.errors) {
                for (Index n : config.sizes) cells.push_back(Cell{grid.model, theta, law, n});
            }
        }
    }
    return cells;
}

std::vector<Calibration> calibrations_of(Calibration c) {
    if (c == Calibration::both) return {Calibration::asymptotic, Calibration::bootstrap};
    return {c};
}

// Rejection flags of one replication, laid out [test][calibration][level].
struct RepOutcome {
    bool degenerate = false;
    std::vector<std::uint8_t> reject;
};

RepOutcome run_replication(const ExperimentConfig& config, std::span<const TestSpec> tests, const Cell& cell,
                           int rep) {
    const std::uint64_t rep_seed = replication_seed(config.seed, cell.errors, cell.n, rep);
    DGPSpec dgp;
    dgp.model = cell.model;
    dgp.theta = cell.theta;
    dgp.error_law = cell.errors;
    dgp.n = cell.n;
    dgp.seed = rng::derive_seed(rep_seed, 0);
    dgp.truncation = config.truncation;
    dgp.shape = config.shape;
    dgp.p_dim = config.local_dim;

    SpecTestConfig tc;
    tc.tests.assign(tests.begin(), tests.end());
    tc.kernel = config.kernel;
    tc.bandwidth = config.bandwidth;
    tc.calibration = config.calibration;
    tc.b = config.b;
    tc.mode = config.mode;
    tc.seed = rng::derive_seed(rep_seed, 1);
    tc.threads = 1;
    tc.omega_measure = config.omega_measure;

    RepOutcome out;
    SpecTestReport report;
    try {
        report = run_specification_test(gen_sample(dgp), tc);
    } catch (const DegenerateError&) {
        out.degenerate = true;
        return out;
    }
    const auto calibrations = calibrations_of(config.calibration);
    for (const auto& r : report.results) {
        for (Calibration c : calibrations) {
            for (double level : config.levels) {
                bool reject = false;
                if (c == Calibration::asymptotic) {
                    reject = r.asymptotic->p_value < level;
                } else {
                    reject = bootstrap_reject(*r.bootstrap, level);
                }
                out.reject.push_back(reject ? 1 : 0);
            }
        }
    }
    return out;
}

struct ParsedLine {
    std::string value;
    std::size_t line;
};

[[noreturn]] void config_fail(std::size_t line, const std::string& message) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + message);
}

template <class Parse>
auto parse_list(const ParsedLine& entry, std::string_view what, Parse&& parse) {
    using T = typename decltype(parse(std::string_view{}))::value_type;
    std::vector<T> out;
    for (auto token : text::split(entry.value, ',')) {
        const auto v = parse(text::trim(token));
        if (!v) config_fail(entry.line, "unknown " + std::string(what) + " '" + std::string(text::trim(token)) + "'");
        out.push_back(*v);
    }
    return out;
}

}  // namespace

std::vector<TestSpec> ExperimentConfig::effective_tests() const {
    if (!tests.empty()) return tests;
    return {TestSpec{TestMethod::loss_q, QuadraticLoss{}}, TestSpec{TestMethod::loss_q0, QuadraticLoss{}},
            TestSpec{TestMethod::glr, QuadraticLoss{}}};
}

void ExperimentConfig::validate() const {
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (models.empty() || errors.empty() || sizes.empty()) {
        throw std::invalid_argument("models, errors and n must each list at least one value");
    }
    for (const auto& m : models) {
        if (m.thetas.empty()) throw std::invalid_argument("model " + std::string(to_string(m.model)) + " has no theta");
    }
    for (Index n : sizes) {
        if (n < 4) throw std::invalid_argument("sample sizes must be >= 4");
    }
    if (levels.empty()) throw std::invalid_argument("levels must list at least one value");
    for (double a : levels) {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("levels must lie in (0, 1)");
    }
    if (wants_bootstrap(calibration) && b < 1) throw std::invalid_argument("bootstrap must be >= 1");
    if (local_dim < 1 || local_dim > kMaxRegressors) throw std::invalid_argument("local.dim must be 1, 2 or 3");
    if (omega_measure && !(*omega_measure > 0.0)) throw std::invalid_argument("omega must be positive");
    if (shard_count < 1 || shard_index < 0 || shard_index >= shard_count) {
        throw std::invalid_argument("shard must be i/k with 0 <= i < k");
    }
    for (const auto& t : effective_tests()) {
        if (t.uses_loss()) check_loss(t.loss);
    }
}

std::string canonical_config_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "models = " << join<ModelGrid>(c.models, [](const ModelGrid& g) { return std::string(to_string(g.model)); })
        << '\n';
    for (const auto& g : c.models) out << "thetas." << to_string(g.model) << " = " << join_numbers(g.thetas) << '\n';
    out << "errors = " << join<ErrorLaw>(c.errors, [](ErrorLaw e) { return std::string(to_string(e)); }) << '\n';
    out << "n = " << join<Index>(c.sizes, [](Index n) { return std::to_string(n); }) << '\n';
    const auto tests = c.effective_tests();
    out << "tests = " << grammar::format_test_list(tests) << '\n';
    out << "kernel = " << to_string(c.kernel.family) << '\n';
    out << "bandwidth = " << to_string(c.bandwidth) << '\n';
    out << "calibration = " << to_string(c.calibration) << '\n';
    out << "bootstrap = " << c.b << '\n';
    out << "boot_mode = " << to_string(c.mode) << '\n';
    out << "levels = " << join_numbers(c.levels) << '\n';
    out << "reps = " << c.reps << '\n';
    out << "seed = " << c.seed << '\n';
    out << "truncation = " << to_string(c.truncation) << '\n';
    out << "local.shape = " << to_string(c.shape) << '\n';
    out << "local.dim = " << c.local_dim << '\n';
    out << "omega = " << (c.omega_measure ? text::format_double(*c.omega_measure) : "auto") << '\n';
    return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string canonical = canonical_config_text(config);
    const std::uint64_t h = rng::fnv1a(canonical.data(), canonical.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(std::string_view text_in) {
    std::map<std::string, ParsedLine, std::less<>> entries;
    std::size_t line_no = 0;
    for (auto raw : text::split(text_in, '\n')) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) config_fail(line_no, "expected key = value");
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        if (key.empty()) config_fail(line_no, "empty key");
        if (value.empty()) config_fail(line_no, "empty value for '" + key + "'");
        if (!entries.emplace(key, ParsedLine{value, line_no}).second) config_fail(line_no, "repeated key '" + key + "'");
    }

    ExperimentConfig c;
    std::vector<double> default_thetas{0.0};
    std::map<Model, std::vector<double>> model_thetas;

    auto wrap = [](const ParsedLine& e, auto&& fn) {
        try {
            return fn();
        } catch (const std::invalid_argument& ex) {
            config_fail(e.line, ex.what());
        }
    };
    auto integer = [](const ParsedLine& e, long long lo, long long hi) {
        const auto v = text::parse_integer(e.value);
        if (!v || *v < lo || *v > hi) config_fail(e.line, "expected an integer in [" + std::to_string(lo) + ", " +
                                                              std::to_string(hi) + "], got '" + e.value + "'");
        return *v;
    };

    for (const auto& [key, entry] : entries) {
        if (key == "name") {
            c.name = entry.value;
        } else if (key == "models") {
            c.models.clear();
            for (Model m : parse_list(entry, "model", parse_model)) c.models.push_back(ModelGrid{m, {}});
        } else if (key == "thetas") {
            default_thetas = wrap(entry, [&] { return grammar::parse_number_list(entry.value); });
        } else if (key.starts_with("thetas.")) {
            const auto m = parse_model(std::string_view(key).substr(7));
            if (!m) config_fail(entry.line, "unknown model in '" + key + "'");
            model_thetas[*m] = wrap(entry, [&] { return grammar::parse_number_list(entry.value); });
        } else if (key == "errors") {
            c.errors = parse_list(entry, "error law", parse_error_law);
        } else if (key == "n") {
            c.sizes.clear();
            for (auto token : text::split(entry.value, ',')) {
                const auto v = text::parse_integer(token);
                if (!v || *v < 4 || *v > 1000000) config_fail(entry.line, "sample sizes must be integers >= 4");
                c.sizes.push_back(static_cast<Index>(*v));
            }
        } else if (key == "tests") {
            c.tests = wrap(entry, [&] { return grammar::parse_test_list(entry.value); });
        } else if (key == "kernel") {
            c.kernel = wrap(entry, [&] { return grammar::parse_kernel(entry.value); });
        } else if (key == "bandwidth") {
            c.bandwidth = wrap(entry, [&] { return grammar::parse_bandwidth(entry.value); });
        } else if (key == "calibration") {
            const auto v = parse_calibration(entry.value);
            if (!v) config_fail(entry.line, "calibration must be asymptotic, bootstrap or both");
            c.calibration = *v;
        } else if (key == "bootstrap") {
            c.b = static_cast<int>(integer(entry, 1, 1000000));
        } else if (key == "boot_mode") {
            const auto v = parse_bootstrap_mode(entry.value);
            if (!v) config_fail(entry.line, "boot_mode must be conditional or wild");
            c.mode = *v;
        } else if (key == "levels") {
            c.levels = wrap(entry, [&] { return grammar::parse_number_list(entry.value); });
        } else if (key == "reps") {
            c.reps = static_cast<int>(integer(entry, 1, 100000000));
        } else if (key == "seed") {
            std::uint64_t v = 0;
            const auto [ptr, ec] = std::from_chars(entry.value.data(), entry.value.data() + entry.value.size(), v);
            if (ec != std::errc{} || ptr != entry.value.data() + entry.value.size()) {
                config_fail(entry.line, "seed must be an unsigned 64-bit integer");
            }
            c.seed = v;
        } else if (key == "truncation") {
            const auto v = parse_truncation(entry.value);
            if (!v) config_fail(entry.line, "truncation must be clip or reject");
            c.truncation = *v;
        } else if (key == "local.shape") {
            const auto v = parse_delta_shape(entry.value);
            if (!v) config_fail(entry.line, "local.shape must be quadratic or cosine");
            c.shape = *v;
        } else if (key == "local.dim") {
            c.local_dim = static_cast<int>(integer(entry, 1, kMaxRegressors));
        } else if (key == "omega") {
            if (entry.value == "auto") {
                c.omega_measure.reset();
            } else {
                const auto v = text::parse_double(entry.value);
                if (!v || !(*v > 0.0) || !std::isfinite(*v)) config_fail(entry.line, "omega must be auto or > 0");
                c.omega_measure = *v;
            }
        } else if (key == "threads") {
            c.threads = static_cast<unsigned>(integer(entry, 0, 4096));
        } else if (key == "shard") {
            const auto parts = text::split(entry.value, '/');
            const auto i = parts.size() == 2 ? text::parse_integer(parts[0]) : std::nullopt;
            const auto k = parts.size() == 2 ? text::parse_integer(parts[1]) : std::nullopt;
            if (!i || !k || *k < 1 || *i < 0 || *i >= *k) config_fail(entry.line, "shard must be i/k with 0 <= i < k");
            c.shard_index = static_cast<int>(*i);
            c.shard_count = static_cast<int>(*k);
        } else {
            config_fail(entry.line, "unknown key '" + key + "'");
        }
    }

    for (auto& g : c.models) {
        if (theta_free(g.model)) {
            g.thetas = {0.0};
        } else if (auto it = model_thetas.find(g.model); it != model_thetas.end()) {
            g.thetas = it->second;
        } else {
            g.thetas = default_thetas;
        }
    }
    for (const auto& [m, _] : model_thetas) {
        const bool listed = std::any_of(c.models.begin(), c.models.end(), [&](const ModelGrid& g) { return g.model == m; });
        if (!listed) {
            throw std::invalid_argument("config: thetas." + std::string(to_string(m)) + " given but model not listed");
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::span<const std::string_view> preset_names() {
    static constexpr std::array<std::string_view, 5> names{"table2", "table3", "table4", "table5", "table6"};
    return names;
}

std::optional<ExperimentConfig> preset_config(std::string_view name) {
    ExperimentConfig c;
    c.name = std::string(name);
    c.kernel = KernelSpec{KernelFamily::uniform};
    c.bandwidth = BandwidthSelector{BandwidthRule::rot, 2.0 / 9.0, {}};
    c.sizes = {100, 250, 500};
    c.levels = {0.10, 0.05};
    c.reps = 500;
    c.b = 99;
    for (double alpha : {0.0, 0.2, 0.5, 1.0}) c.tests.push_back(TestSpec{TestMethod::loss_q, LinexLoss{alpha, 1.0}});
    for (double alpha : {0.0, 0.2, 0.5, 1.0}) c.tests.push_back(TestSpec{TestMethod::loss_q0, LinexLoss{alpha, 1.0}});
    c.tests.push_back(TestSpec{TestMethod::glr, QuadraticLoss{}});

    const std::vector<ErrorLaw> all_laws{ErrorLaw::normal, ErrorLaw::student_t5, ErrorLaw::uniform01,
                                         ErrorLaw::lognormal, ErrorLaw::chisq1};
    if (name == "table2" || name == "table3") {
        c.models = {ModelGrid{Model::s_null, {0.0}}};
        c.errors = all_laws;
        c.calibration = name == "table2" ? Calibration::asymptotic : Calibration::bootstrap;
    } else if (name == "table4") {
        c.models = {ModelGrid{Model::p1_quadratic, {0.1, 0.2, 0.3, 0.5, 1.0}}};
    } else if (name == "table5") {
        c.models = {ModelGrid{Model::p2_threshold, {-1.0, -0.5, -0.2, 0.2, 0.5, 1.0}}};
    } else if (name == "table6") {
        c.models = {ModelGrid{Model::p3_smooth_transition, {-1.0, -0.5, 0.5, 1.0, 1.5}}};
    } else {
        return std::nullopt;
    }
    if (name != "table2" && name != "table3") {
        c.errors = {ErrorLaw::normal};
        c.calibration = Calibration::bootstrap;
    }
    return c;
}

std::uint64_t replication_seed(std::uint64_t master_seed, ErrorLaw errors, Index n, int rep) {
    const std::string key = "errors=" + std::string(to_string(errors)) + ";n=" + std::to_string(n);
    const std::uint64_t cell = rng::derive_seed(master_seed, rng::fnv1a(key.data(), key.size()));
    return rng::derive_seed(cell, static_cast<std::uint64_t>(rep));
}

MCReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const auto tests = config.effective_tests();
    const auto calibrations = calibrations_of(config.calibration);
    const std::size_t per_rep = tests.size() * calibrations.size() * config.levels.size();

    const std::vector<Cell> all_cells = expand_cells(config);
    std::vector<std::size_t> mine;
    for (std::size_t i = 0; i < all_cells.size(); ++i) {
        if (static_cast<int>(i % static_cast<std::size_t>(config.shard_count)) == config.shard_index) mine.push_back(i);
    }

    const auto reps = static_cast<std::size_t>(config.reps);
    std::vector<RepOutcome> outcomes(mine.size() * reps);
    parallel_for(outcomes.size(), config.threads, [&](std::size_t task) {
        const Cell& cell = all_cells[mine[task / reps]];
        outcomes[task] = run_replication(config, tests, cell, static_cast<int>(task % reps));
    });

    MCReport report;
    report.name = config.name;
    report.config_hash = config_hash(config);
    report.config_text = canonical_config_text(config);
    report.master_seed = config.seed;
    report.reps = config.reps;

    for (std::size_t ci = 0; ci < mine.size(); ++ci) {
        const Cell& cell = all_cells[mine[ci]];
        int degenerate = 0;
        std::vector<int> counts(per_rep, 0);
        for (std::size_t r = 0; r < reps; ++r) {
            const RepOutcome& o = outcomes[ci * reps + r];
            if (o.degenerate) {
                ++degenerate;
                continue;
            }
            for (std::size_t k = 0; k < per_rep; ++k) counts[k] += o.reject[k];
        }
        if (degenerate * 100 > config.reps) {
            throw DegenerateError("cell model=" + std::string(to_string(cell.model)) +
                                  " theta=" + text::format_double(cell.theta) +
                                  " errors=" + std::string(to_string(cell.errors)) + " n=" + std::to_string(cell.n) +
                                  ": " + std::to_string(degenerate) + " of " + std::to_string(config.reps) +
                                  " replications were degenerate (more than 1%)");
        }
        const int valid = config.reps - degenerate;
        std::size_t k = 0;
        for (std::size_t ti = 0; ti < tests.size(); ++ti) {
            for (Calibration cal : calibrations) {
                for (double level : config.levels) {
                    CellResult res;
                    res.ordinal = static_cast<std::uint64_t>(mine[ci]) * per_rep + k;
                    res.model = std::string(to_string(cell.model));
                    res.theta = cell.theta;
                    res.errors = std::string(to_string(cell.errors));
                    res.n = cell.n;
                    res.test = tests[ti].label();
                    res.calibration = std::string(to_string(cal));
                    res.level = level;
                    res.reps = config.reps;
                    res.valid = valid;
                    res.degenerate = degenerate;
                    res.rejections = counts[k];
                    const double r = valid > 0 ? static_cast<double>(counts[k]) / valid : 0.0;
                    res.rate = valid > 0 ? 100.0 * counts[k] / valid : 0.0;
                    res.se = valid > 0 ? 100.0 * std::sqrt(r * (1.0 - r) / valid) : 0.0;
                    report.cells.push_back(std::move(res));
                    ++k;
                }
            }
        }
    }

    report.metadata.started_utc = utc_now();
    report.metadata.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.metadata.threads = resolve_threads(config.threads, outcomes.size());
    report.metadata.shard = std::to_string(config.shard_index) + "/" + std::to_string(config.shard_count);
    return report;
}

const CellResult* find_cell(const MCReport& report, std::string_view model, double theta, std::string_view errors,
                            Index n, std::string_view test, std::string_view calibration, double level) {
    for (const auto& c : report.cells) {
        if (c.model == model && c.theta == theta && c.errors == errors && c.n == n && c.test == test &&
            c.calibration == calibration && c.level == level) {
            return &c;
        }
    }
    return nullptr;
}

}  // namespace npspec
