#include "cocoflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cocoflow/io.hpp"

namespace cocoflow {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& v, std::size_t line, std::size_t col) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + v + "'", line, col);
    }
}

int parse_int(const std::string& v, std::size_t line, std::size_t col) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse integer '" + v + "'", line, col);
    }
}

Vec parse_vec(const std::string& v, std::size_t line, std::size_t col) {
    Vec out;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_number(trim(cell), line, col));
    if (out.empty()) throw ConfigError("empty vector value", line, col);
    return out;
}

SweepAxis parse_axis(const std::string& v, std::size_t line, std::size_t col) {
    // lo:hi:count
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ':')) parts.push_back(trim(cell));
    if (parts.size() != 3) throw ConfigError("sweep axis must be lo:hi:count", line, col);
    SweepAxis ax;
    ax.lo = parse_number(parts[0], line, col);
    ax.hi = parse_number(parts[1], line, col);
    ax.count = parse_int(parts[2], line, col);
    return ax;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    bool saw_sweep_gamma = false, saw_sweep_theta = false;
    SweepSpec sweep;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (trim(line).empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno, 1);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::size_t key_col = line.find_first_not_of(" \t") + 1;
        const std::size_t val_col = eq + 2;
        if (key.empty()) throw ConfigError("missing key before '='", lineno, key_col);
        if (value.empty()) throw ConfigError("missing value for key '" + key + "'", lineno, val_col);

        auto& o = cfg.overrides;
        if (key == "scenario.name") {
            if (!is_scenario(value)) throw ConfigError("unknown scenario '" + value + "'", lineno, val_col);
            cfg.scenario = value;
        } else if (key == "scenario.gamma") {
            o.gamma = parse_number(value, lineno, val_col);
        } else if (key == "scenario.lambda") {
            o.lambda = parse_number(value, lineno, val_col);
        } else if (key == "scenario.mu") {
            o.mu = parse_number(value, lineno, val_col);
        } else if (key == "scenario.coupling") {
            o.coupling = parse_number(value, lineno, val_col);
        } else if (key == "scenario.lambda_saddle") {
            o.lambda_saddle = parse_number(value, lineno, val_col);
        } else if (key == "scenario.alpha") {
            o.alpha = parse_number(value, lineno, val_col);
        } else if (key == "scenario.nu") {
            o.nu = parse_number(value, lineno, val_col);
        } else if (key == "scenario.beta") {
            o.beta = parse_number(value, lineno, val_col);
        } else if (key == "scenario.iterations") {
            o.iterations = parse_int(value, lineno, val_col);
        } else if (key == "scenario.rescale_k") {
            o.rescale_k = parse_number(value, lineno, val_col);
        } else if (key == "scenario.epsilon.kind") {
            if (value != "zero" && value != "power" && value != "exponential")
                throw ConfigError("epsilon kind must be zero|power|exponential", lineno, val_col);
            o.eps_kind = value;
        } else if (key == "scenario.epsilon.c") {
            o.eps_c = parse_number(value, lineno, val_col);
        } else if (key == "scenario.epsilon.p") {
            o.eps_p = parse_number(value, lineno, val_col);
        } else if (key == "scenario.epsilon.a") {
            o.eps_a = parse_number(value, lineno, val_col);
        } else if (key == "scenario.init.u") {
            o.init_u = parse_vec(value, lineno, val_col);
        } else if (key == "scenario.init.v") {
            o.init_v = parse_vec(value, lineno, val_col);
        } else if (key == "integrator.horizon") {
            o.horizon = parse_number(value, lineno, val_col);
        } else if (key == "integrator.step") {
            o.step = parse_number(value, lineno, val_col);
        } else if (key == "integrator.sample_every") {
            o.sample_every = parse_int(value, lineno, val_col);
        } else if (key == "sweep.gamma") {
            sweep.gamma = parse_axis(value, lineno, val_col);
            saw_sweep_gamma = true;
        } else if (key == "sweep.theta") {
            sweep.theta = parse_axis(value, lineno, val_col);
            saw_sweep_theta = true;
        } else if (key == "output.dir") {
            cfg.out_dir = value;
        } else if (key == "output.formats") {
            cfg.formats.clear();
            std::stringstream ss(value);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                const std::string f = trim(cell);
                if (f != "csv" && f != "jsonl" && f != "json-report")
                    throw ConfigError("unknown output format '" + f + "'", lineno, val_col);
                cfg.formats.push_back(f);
            }
        } else if (key == "seed") {
            o.seed = static_cast<std::uint64_t>(std::stoull(value));
        } else if (key == "jobs") {
            cfg.jobs = parse_int(value, lineno, val_col);
            if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1", lineno, val_col);
        } else {
            throw ConfigError("unknown key '" + key + "'", lineno, key_col);
        }
    }
    if (saw_sweep_gamma || saw_sweep_theta) {
        if (!(saw_sweep_gamma && saw_sweep_theta))
            throw ConfigError("sweep needs both sweep.gamma and sweep.theta", lineno == 0 ? 1 : lineno, 1);
        cfg.sweep = sweep;
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) { return parse_config_text(read_text_file(path)); }

json overrides_to_json(const ScenarioOverrides& o) {
    json j = json::object();
    auto put_num = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    auto put_int = [&](const char* k, const std::optional<int>& v) {
        if (v) j[k] = *v;
    };
    put_num("gamma", o.gamma);
    put_num("lambda", o.lambda);
    put_num("mu", o.mu);
    put_num("coupling", o.coupling);
    put_num("lambda_saddle", o.lambda_saddle);
    if (o.eps_kind) j["eps_kind"] = *o.eps_kind;
    put_num("eps_c", o.eps_c);
    put_num("eps_p", o.eps_p);
    put_num("eps_a", o.eps_a);
    if (o.init_u) j["init_u"] = *o.init_u;
    if (o.init_v) j["init_v"] = *o.init_v;
    put_num("horizon", o.horizon);
    put_num("step", o.step);
    put_int("sample_every", o.sample_every);
    put_num("alpha", o.alpha);
    put_num("nu", o.nu);
    put_num("beta", o.beta);
    put_int("iterations", o.iterations);
    put_num("rescale_k", o.rescale_k);
    j["seed"] = o.seed;
    return j;
}

ScenarioOverrides overrides_from_json(const json& j) {
    ScenarioOverrides o;
    auto get_num = [&](const char* k, std::optional<double>& v) {
        if (j.contains(k)) v = j.at(k).get<double>();
    };
    auto get_int = [&](const char* k, std::optional<int>& v) {
        if (j.contains(k)) v = j.at(k).get<int>();
    };
    get_num("gamma", o.gamma);
    get_num("lambda", o.lambda);
    get_num("mu", o.mu);
    get_num("coupling", o.coupling);
    get_num("lambda_saddle", o.lambda_saddle);
    if (j.contains("eps_kind")) o.eps_kind = j.at("eps_kind").get<std::string>();
    get_num("eps_c", o.eps_c);
    get_num("eps_p", o.eps_p);
    get_num("eps_a", o.eps_a);
    if (j.contains("init_u")) o.init_u = j.at("init_u").get<Vec>();
    if (j.contains("init_v")) o.init_v = j.at("init_v").get<Vec>();
    get_num("horizon", o.horizon);
    get_num("step", o.step);
    get_int("sample_every", o.sample_every);
    get_num("alpha", o.alpha);
    get_num("nu", o.nu);
    get_num("beta", o.beta);
    get_int("iterations", o.iterations);
    get_num("rescale_k", o.rescale_k);
    if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
    return o;
}

}  // namespace cocoflow
