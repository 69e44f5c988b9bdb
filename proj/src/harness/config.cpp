#include "estavg/harness/config.hpp"

#include "estavg/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace estavg::harness {

namespace {

constexpr std::array<std::string_view, 5> kLocationFamilies{"gauss", "cauchy", "student", "logistic", "mixture"};
constexpr std::array<std::string_view, 4> kQuantileFamilies{"weibull", "gamma", "burr", "lognormal"};

bool one_of(std::string_view value, auto const& list) {
    return std::find(list.begin(), list.end(), value) != list.end();
}

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::size_t get_count(const nlohmann::json& j, const char* key) {
    const nlohmann::json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(std::string("config key '") + key + "' must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

}  // namespace

std::string_view to_string(Study s) noexcept {
    switch (s) {
        case Study::Location: return "location";
        case Study::Weibull: return "weibull";
        case Study::Boolean: return "boolean";
        case Study::Quantile: return "quantile";
        case Study::Synthetic: return "synthetic";
    }
    return "?";
}

std::string_view to_string(SigmaMethod m) noexcept {
    switch (m) {
        case SigmaMethod::Plugin: return "plugin";
        case SigmaMethod::NpBoot: return "npboot";
        case SigmaMethod::PBoot: return "pboot";
    }
    return "?";
}

std::optional<Study> parse_study(std::string_view name) noexcept {
    for (Study s : {Study::Location, Study::Weibull, Study::Boolean, Study::Quantile, Study::Synthetic}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::optional<SigmaMethod> parse_sigma_method(std::string_view name) noexcept {
    for (SigmaMethod m : {SigmaMethod::Plugin, SigmaMethod::NpBoot, SigmaMethod::PBoot}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

ExperimentConfig default_config(Study study) {
    ExperimentConfig c;
    c.study = study;
    switch (study) {
        case Study::Location:
            break;
        case Study::Weibull:
            c.sigma_method = SigmaMethod::PBoot;
            c.n = 50;
            break;
        case Study::Boolean:
            c.sigma_method = SigmaMethod::PBoot;
            c.boot = 100;
            break;
        case Study::Quantile:
            c.sigma_method = SigmaMethod::NpBoot;
            c.constraint = ConstraintSet::Convex;
            c.family = "weibull";
            break;
        case Study::Synthetic:
            c.boot = 200;
            break;
    }
    return c;
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (c.reps < 1) fail("reps must be at least 1");
    if (c.boot < 2) fail("boot must be at least 2");
    if (c.n < 2) fail("n must be at least 2");
    if (c.threads < 1) fail("threads must be at least 1");
    if (!(c.level > 0.0 && c.level < 1.0)) fail("level must lie in (0, 1)");
    switch (c.study) {
        case Study::Location:
            if (!one_of(c.family, kLocationFamilies)) fail("location family must be one of gauss, cauchy, student, logistic, mixture");
            if (!(c.nu > 0.0)) fail("nu must be positive");
            if (c.sigma_method == SigmaMethod::PBoot) fail("location study supports sigma_method plugin or npboot");
            break;
        case Study::Weibull:
            if (!(c.beta > 0.0) || !(c.eta > 0.0)) fail("beta and eta must be positive");
            if (c.sigma_method == SigmaMethod::Plugin) fail("weibull study supports sigma_method pboot or npboot");
            break;
        case Study::Boolean:
            if (!(c.rho > 0.0) || !(c.alpha > 0.0)) fail("rho and alpha must be positive");
            if (c.sigma_method != SigmaMethod::PBoot) fail("boolean study requires sigma_method pboot");
            if (c.resolution < 64) fail("resolution must be at least 64");
            if (c.directions < 1) fail("directions must be at least 1");
            break;
        case Study::Quantile: {
            if (!one_of(c.family, kQuantileFamilies)) fail("quantile family must be one of weibull, gamma, burr, lognormal");
            if (c.sigma_method != SigmaMethod::NpBoot) fail("quantile study requires sigma_method npboot");
            if (!(c.p > 0.0 && c.p < 1.0)) fail("p must lie in (0, 1)");
            const double pos = std::floor(static_cast<double>(c.n) * c.p + 1e-9);
            if (pos < 1.0 || pos > static_cast<double>(c.n)) fail("floor(n p) must lie in [1, n]");
            if (c.quantile_center != "np" && c.quantile_center != "t") fail("quantile_center must be np or t");
            break;
        }
        case Study::Synthetic:
            if (c.sizes.empty()) fail("sizes must be nonempty");
            if (std::any_of(c.sizes.begin(), c.sizes.end(), [](std::size_t s) { return s < 1; })) {
                fail("every group size must be at least 1");
            }
            if (c.sigma_method != SigmaMethod::Plugin) fail("synthetic study requires sigma_method plugin");
            break;
    }
}

ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known{
        "study", "name", "n", "reps", "boot", "constraint", "sigma_method", "seed", "threads", "level",
        "family", "nu", "avb", "beta", "eta", "rho", "alpha", "resolution", "directions", "p",
        "quantile_center", "sizes"};
    for (const auto& item : j.items()) {
        if (!known.contains(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
    }
    if (!j.contains("study")) throw ConfigError("config key 'study' is required");
    const auto study = parse_study(get_as<std::string>(j, "study"));
    if (!study) throw ConfigError("unknown study '" + get_as<std::string>(j, "study") + "'");

    ExperimentConfig c = default_config(*study);
    if (j.contains("name")) c.name = get_as<std::string>(j, "name");
    if (j.contains("n")) c.n = get_count(j, "n");
    if (j.contains("reps")) c.reps = get_count(j, "reps");
    if (j.contains("boot")) c.boot = get_count(j, "boot");
    if (j.contains("threads")) c.threads = get_count(j, "threads");
    if (j.contains("resolution")) c.resolution = get_count(j, "resolution");
    if (j.contains("directions")) c.directions = get_count(j, "directions");
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) throw ConfigError("config key 'seed' must be an integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("constraint")) {
        const auto name = get_as<std::string>(j, "constraint");
        const auto cs = parse_constraint(name);
        if (!cs) throw ConfigError("unknown constraint '" + name + "'");
        c.constraint = *cs;
    }
    if (j.contains("sigma_method")) {
        const auto name = get_as<std::string>(j, "sigma_method");
        const auto m = parse_sigma_method(name);
        if (!m) throw ConfigError("unknown sigma_method '" + name + "'");
        c.sigma_method = *m;
    }
    if (j.contains("level")) c.level = get_as<double>(j, "level");
    if (j.contains("family")) c.family = get_as<std::string>(j, "family");
    if (j.contains("nu")) c.nu = get_as<double>(j, "nu");
    if (j.contains("avb")) c.avb = get_as<bool>(j, "avb");
    if (j.contains("beta")) c.beta = get_as<double>(j, "beta");
    if (j.contains("eta")) c.eta = get_as<double>(j, "eta");
    if (j.contains("rho")) c.rho = get_as<double>(j, "rho");
    if (j.contains("alpha")) c.alpha = get_as<double>(j, "alpha");
    if (j.contains("p")) c.p = get_as<double>(j, "p");
    if (j.contains("quantile_center")) c.quantile_center = get_as<std::string>(j, "quantile_center");
    if (j.contains("sizes")) c.sizes = get_as<std::vector<std::size_t>>(j, "sizes");
    validate(c);
    return c;
}

ExperimentConfig parse_config_text(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

nlohmann::json to_json(const ExperimentConfig& c) {
    return {
        {"study", std::string(to_string(c.study))},
        {"name", c.name},
        {"n", c.n},
        {"reps", c.reps},
        {"boot", c.boot},
        {"constraint", std::string(to_string(c.constraint))},
        {"sigma_method", std::string(to_string(c.sigma_method))},
        {"seed", c.seed},
        {"threads", c.threads},
        {"level", c.level},
        {"family", c.family},
        {"nu", c.nu},
        {"avb", c.avb},
        {"beta", c.beta},
        {"eta", c.eta},
        {"rho", c.rho},
        {"alpha", c.alpha},
        {"resolution", c.resolution},
        {"directions", c.directions},
        {"p", c.p},
        {"quantile_center", c.quantile_center},
        {"sizes", c.sizes},
    };
}

std::string canonical_text(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = [] {
        std::vector<Preset> out;
        constexpr std::size_t kReps = 10000;

        struct LocationFamily {
            const char* tag;
            const char* family;
            double nu;
        };
        for (const LocationFamily& f : {LocationFamily{"cauchy", "cauchy", 7.0}, LocationFamily{"st4", "student", 4.0},
                                        LocationFamily{"st7", "student", 7.0}, LocationFamily{"logistic", "logistic", 7.0},
                                        LocationFamily{"gauss", "gauss", 7.0}, LocationFamily{"mix", "mixture", 7.0}}) {
            for (std::size_t n : {30, 50, 100}) {
                ExperimentConfig c = default_config(Study::Location);
                c.name = "table1-" + std::string(f.tag) + "-n" + std::to_string(n);
                c.family = f.family;
                c.nu = f.nu;
                c.n = n;
                c.reps = kReps;
                c.boot = 1000;
                out.push_back({c.name, "location MSE and AV/AVB coverage, " + std::string(f.tag) + ", n=" +
                                           std::to_string(n),
                               c});
            }
        }
        for (const char* beta : {"0.5", "1", "2", "3"}) {
            for (std::size_t n : {10, 20, 50}) {
                ExperimentConfig c = default_config(Study::Weibull);
                c.name = "table3-beta" + std::string(beta) + "-n" + std::to_string(n);
                c.beta = std::stod(beta);
                c.eta = 10.0;
                c.n = n;
                c.reps = kReps;
                c.boot = 1000;
                out.push_back({c.name, "Weibull shape/scale MSE and coverage, beta=" + std::string(beta) + ", n=" +
                                           std::to_string(n),
                               c});
            }
        }
        for (int rho : {25, 50, 100, 150}) {
            ExperimentConfig c = default_config(Study::Boolean);
            c.name = "table6-rho" + std::to_string(rho);
            c.rho = rho;
            c.alpha = 1.0;
            c.reps = kReps;
            c.boot = 100;
            out.push_back({c.name, "Boolean model MSE and coverage, rho=" + std::to_string(rho) + ", alpha=1", c});
        }
        for (const char* family : {"weibull", "gamma", "burr", "lognormal"}) {
            for (std::size_t n : {100, 1000}) {
                ExperimentConfig c = default_config(Study::Quantile);
                c.name = "table8-" + std::string(family) + "-n" + std::to_string(n);
                c.family = family;
                c.n = n;
                c.p = 0.99;
                c.reps = kReps;
                c.boot = 1000;
                out.push_back({c.name, "0.99-quantile MSE, " + std::string(family) + " truth, n=" + std::to_string(n), c});
            }
        }
        {
            ExperimentConfig c = default_config(Study::Synthetic);
            c.name = "synthetic-maximal";
            c.reps = 2000;
            out.push_back({c.name, "random MSE matrix, averaged vs oracle weights", c});
        }
        return out;
    }();
    return list;
}

std::optional<ExperimentConfig> find_preset(std::string_view name) {
    for (const Preset& p : presets()) {
        if (p.name == name) return p.config;
    }
    return std::nullopt;
}

ExperimentConfig scaled(ExperimentConfig config, double reps_factor, double boot_factor) {
    if (!(reps_factor > 0.0) || !(boot_factor > 0.0)) throw ConfigError("scale factors must be positive");
    config.reps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(config.reps) * reps_factor)));
    config.boot = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(static_cast<double>(config.boot) * boot_factor)));
    return config;
}

}  // namespace estavg::harness
