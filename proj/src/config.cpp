#include "slapick/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace slapick {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& name, int line, const std::string& key,
                    const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        fail(name, line, key + ": not a number: " + value);
    }
    if (used != value.size() || !std::isfinite(v)) {
        fail(name, line, key + ": not a number: " + value);
    }
    return v;
}

std::uint64_t parse_seed(const std::string& name, int line, const std::string& value) {
    try {
        std::size_t used = 0;
        auto v = std::stoull(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    fail(name, line, "seed: not a nonnegative integer: " + value);
}

int parse_count(const std::string& name, int line, const std::string& key,
                const std::string& value) {
    double v = parse_number(name, line, key, value);
    if (v < 0.0 || v != std::floor(v) || v > 2e9) {
        fail(name, line, key + ": not a nonnegative integer: " + value);
    }
    return static_cast<int>(v);
}

// "a,b,c" lists and "start:stop:step" ranges (inclusive stop).
std::vector<double> parse_grid(const std::string& name, int line, const std::string& key,
                               const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) fail(name, line, key + ": empty grid entry");
        auto c1 = tok.find(':');
        if (c1 == std::string::npos) {
            out.push_back(parse_number(name, line, key, tok));
            continue;
        }
        auto c2 = tok.find(':', c1 + 1);
        if (c2 == std::string::npos) fail(name, line, key + ": range needs start:stop:step");
        double start = parse_number(name, line, key, trim(tok.substr(0, c1)));
        double stop = parse_number(name, line, key, trim(tok.substr(c1 + 1, c2 - c1 - 1)));
        double step = parse_number(name, line, key, trim(tok.substr(c2 + 1)));
        if (!(step > 0.0) || stop < start) {
            fail(name, line, key + ": range needs stop >= start and step > 0");
        }
        for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
    }
    if (out.empty()) fail(name, line, key + ": empty grid");
    return out;
}

struct ModelBlock {
    PoolModel model;
    int line = 0;
    std::set<std::string> keys;
};

void apply_model_key(ModelBlock& mb, const std::string& name, int line,
                     const std::string& key, const std::string& value) {
    if (!mb.keys.insert(key).second) {
        fail(name, line, "duplicate [model] key: " + key);
    }
    if (key == "id") {
        mb.model.id = value;
    } else if (key == "accuracy") {
        mb.model.accuracy = parse_number(name, line, key, value);
    } else if (key == "true_mean_ms") {
        mb.model.true_mean_ms = parse_number(name, line, key, value);
    } else if (key == "true_std_ms") {
        mb.model.true_std_ms = parse_number(name, line, key, value);
    } else if (key == "seed_mean_ms") {
        mb.model.seed_mean_ms = parse_number(name, line, key, value);
    } else if (key == "seed_std_ms") {
        mb.model.seed_std_ms = parse_number(name, line, key, value);
    } else {
        fail(name, line, "unknown [model] key: " + key);
    }
}

std::vector<PoolModel> validate_model_blocks(const std::vector<ModelBlock>& blocks,
                                             const std::string& name) {
    if (blocks.empty()) throw ConfigError(name + ": at least one [model] block is required");
    std::vector<PoolModel> out;
    std::set<std::string> ids;
    for (const auto& mb : blocks) {
        const auto& m = mb.model;
        if (m.id.empty()) fail(name, mb.line, "[model] block is missing id");
        if (!ids.insert(m.id).second) fail(name, mb.line, "duplicate model id: " + m.id);
        if (!mb.keys.count("accuracy")) fail(name, mb.line, m.id + ": missing accuracy");
        if (!mb.keys.count("true_mean_ms")) fail(name, mb.line, m.id + ": missing true_mean_ms");
        if (!mb.keys.count("true_std_ms")) fail(name, mb.line, m.id + ": missing true_std_ms");
        if (!(m.accuracy >= 0.0 && m.accuracy <= 1.0)) {
            fail(name, mb.line, m.id + ": accuracy must be in [0, 1]");
        }
        if (m.true_mean_ms < 0.0 || m.true_std_ms < 0.0) {
            fail(name, mb.line, m.id + ": latency values must be nonnegative");
        }
        if (m.seed_std_ms && !m.seed_mean_ms) {
            fail(name, mb.line, m.id + ": seed_std_ms requires seed_mean_ms");
        }
        if ((m.seed_mean_ms && *m.seed_mean_ms < 0.0) ||
            (m.seed_std_ms && *m.seed_std_ms < 0.0)) {
            fail(name, mb.line, m.id + ": seed values must be nonnegative");
        }
        out.push_back(m);
    }
    return out;
}

}  // namespace

LatencyDistribution NetworkSettings::link_distribution() const {
    if (trace_file) return load_trace(*trace_file);
    if (std_ms) return make_truncated_normal(*mean_ms, *std_ms);
    return from_mean_cv(*mean_ms, cv.value_or(0.0));
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg = parse_config_text(ss.str(), path);
    if (cfg.network.trace_file) {
        std::filesystem::path tf(*cfg.network.trace_file);
        if (tf.is_relative()) {
            cfg.network.trace_file = (std::filesystem::path(path).parent_path() / tf).string();
        }
    }
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& name) {
    ExperimentConfig cfg;
    enum class Section { top, network, model };
    Section section = Section::top;
    std::vector<ModelBlock> models;
    std::set<std::string> seen_top;
    bool saw_policy = false, saw_sla = false;

    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(name, lineno, "unterminated section header");
            std::string sec = trim(line.substr(1, line.size() - 2));
            if (sec == "network") {
                section = Section::network;
            } else if (sec == "model") {
                section = Section::model;
                models.push_back(ModelBlock{{}, lineno, {}});
            } else {
                fail(name, lineno, "unknown section: [" + sec + "]");
            }
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string::npos) fail(name, lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(name, lineno, "empty key");
        if (value.empty()) fail(name, lineno, key + ": empty value");

        if (section == Section::top) {
            if (!seen_top.insert(key).second) fail(name, lineno, "duplicate key: " + key);
            if (key == "seed") {
                cfg.seed = parse_seed(name, lineno, value);
            } else if (key == "requests") {
                cfg.requests = parse_count(name, lineno, key, value);
            } else if (key == "warmup") {
                cfg.warmup = parse_count(name, lineno, key, value);
            } else if (key == "threshold_ms") {
                cfg.threshold_ms = parse_number(name, lineno, key, value);
            } else if (key == "t_on_device_ms") {
                cfg.t_on_device_ms = parse_number(name, lineno, key, value);
            } else if (key == "ewma_alpha") {
                cfg.ewma_alpha = parse_number(name, lineno, key, value);
            } else if (key == "output_dir") {
                cfg.output_dir = value;
            } else if (key == "policy" || key == "policies") {
                if (saw_policy) fail(name, lineno, "policy and policies are exclusive");
                saw_policy = true;
                std::stringstream ps(value);
                std::string tok;
                while (std::getline(ps, tok, ',')) {
                    tok = trim(tok);
                    try {
                        cfg.policies.push_back(policy_from_string(tok));
                    } catch (const std::exception& e) {
                        fail(name, lineno, e.what());
                    }
                }
                if (key == "policy" && cfg.policies.size() != 1) {
                    fail(name, lineno, "policy takes exactly one name; use policies");
                }
            } else if (key == "sla_ms" || key == "sla_grid") {
                if (saw_sla) fail(name, lineno, "sla_ms and sla_grid are exclusive");
                saw_sla = true;
                cfg.sla_grid = parse_grid(name, lineno, key, value);
                if (key == "sla_ms" && cfg.sla_grid.size() != 1) {
                    fail(name, lineno, "sla_ms takes exactly one value; use sla_grid");
                }
            } else {
                fail(name, lineno, "unknown key: " + key);
            }
        } else if (section == Section::network) {
            if (key == "mean_ms") {
                cfg.network.mean_ms = parse_number(name, lineno, key, value);
            } else if (key == "std_ms") {
                cfg.network.std_ms = parse_number(name, lineno, key, value);
            } else if (key == "cv") {
                cfg.network.cv = parse_number(name, lineno, key, value);
            } else if (key == "trace_file") {
                cfg.network.trace_file = value;
            } else if (key == "cv_grid") {
                cfg.network.cv_grid = parse_grid(name, lineno, key, value);
            } else {
                fail(name, lineno, "unknown [network] key: " + key);
            }
        } else {
            apply_model_key(models.back(), name, lineno, key, value);
        }
    }

    // -- validation --
    cfg.models = validate_model_blocks(models, name);

    const auto& net = cfg.network;
    int forms = 0;
    if (net.trace_file) ++forms;
    if (net.std_ms) ++forms;
    if (net.cv) ++forms;
    if (net.trace_file && (net.mean_ms || net.std_ms || net.cv)) {
        throw ConfigError(name + ": [network] trace_file excludes mean/std/cv");
    }
    if (net.std_ms && net.cv) {
        throw ConfigError(name + ": [network] std_ms and cv are exclusive");
    }
    if (!net.trace_file && !net.mean_ms) {
        throw ConfigError(name + ": [network] needs mean_ms (+ std_ms or cv) or trace_file");
    }
    (void)forms;
    if (net.mean_ms && *net.mean_ms < 0.0) throw ConfigError(name + ": network mean_ms < 0");
    if (net.std_ms && *net.std_ms < 0.0) throw ConfigError(name + ": network std_ms < 0");
    if (net.cv && *net.cv < 0.0) throw ConfigError(name + ": network cv < 0");
    if (!net.cv_grid.empty()) {
        if (net.trace_file) throw ConfigError(name + ": cv_grid excludes trace_file");
        for (std::size_t i = 0; i < net.cv_grid.size(); ++i) {
            if (net.cv_grid[i] < 0.0 || (i > 0 && net.cv_grid[i] <= net.cv_grid[i - 1])) {
                throw ConfigError(name + ": cv_grid must be nonnegative and increasing");
            }
        }
    }

    if (cfg.policies.empty()) throw ConfigError(name + ": policy (or policies) is required");
    if (cfg.sla_grid.empty()) throw ConfigError(name + ": sla_ms (or sla_grid) is required");
    for (std::size_t i = 0; i < cfg.sla_grid.size(); ++i) {
        if (!(cfg.sla_grid[i] > 0.0) || (i > 0 && cfg.sla_grid[i] <= cfg.sla_grid[i - 1])) {
            throw ConfigError(name + ": sla grid must be positive and increasing");
        }
    }
    if (cfg.requests <= 0) throw ConfigError(name + ": requests must be positive");
    if (cfg.threshold_ms < 0.0 || cfg.threshold_ms > cfg.t_on_device_ms) {
        throw ConfigError(name + ": threshold_ms must lie in [0, t_on_device_ms]");
    }
    if (!(cfg.ewma_alpha > 0.0 && cfg.ewma_alpha <= 1.0)) {
        throw ConfigError(name + ": ewma_alpha must be in (0, 1]");
    }
    for (const auto& m : cfg.models) {
        if (!m.seed_mean_ms && cfg.warmup == 0) {
            throw ConfigError(name + ": " + m.id +
                              " has no seed profile and warmup is disabled");
        }
    }
    return cfg;
}

std::vector<PoolModel> parse_pool_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_pool_text(ss.str(), path);
}

std::vector<PoolModel> parse_pool_text(const std::string& text, const std::string& name) {
    std::vector<ModelBlock> models;
    bool in_model = false;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(name, lineno, "unterminated section header");
            in_model = trim(line.substr(1, line.size() - 2)) == "model";
            if (in_model) models.push_back(ModelBlock{{}, lineno, {}});
            continue;
        }
        if (!in_model) continue;  // experiment-level keys are not the pool's business
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(name, lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(name, lineno, "empty key");
        if (value.empty()) fail(name, lineno, key + ": empty value");
        apply_model_key(models.back(), name, lineno, key, value);
    }
    return validate_model_blocks(models, name);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    std::string out;
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "requests = " + std::to_string(cfg.requests) + "\n";
    out += "warmup = " + std::to_string(cfg.warmup) + "\n";
    out += "threshold_ms = " + num(cfg.threshold_ms) + "\n";
    out += "t_on_device_ms = " + num(cfg.t_on_device_ms) + "\n";
    out += "ewma_alpha = " + num(cfg.ewma_alpha) + "\n";
    out += "output_dir = " + cfg.output_dir + "\n";
    out += "policies = ";
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
        if (i) out += ", ";
        out += to_string(cfg.policies[i]);
    }
    out += "\n";
    out += "sla_grid = ";
    for (std::size_t i = 0; i < cfg.sla_grid.size(); ++i) {
        if (i) out += ", ";
        out += num(cfg.sla_grid[i]);
    }
    out += "\n\n[network]\n";
    if (cfg.network.trace_file) {
        out += "trace_file = " + *cfg.network.trace_file + "\n";
    } else {
        out += "mean_ms = " + num(*cfg.network.mean_ms) + "\n";
        if (cfg.network.std_ms) out += "std_ms = " + num(*cfg.network.std_ms) + "\n";
        if (cfg.network.cv) out += "cv = " + num(*cfg.network.cv) + "\n";
    }
    if (!cfg.network.cv_grid.empty()) {
        out += "cv_grid = ";
        for (std::size_t i = 0; i < cfg.network.cv_grid.size(); ++i) {
            if (i) out += ", ";
            out += num(cfg.network.cv_grid[i]);
        }
        out += "\n";
    }
    for (const auto& m : cfg.models) {
        out += "\n[model]\n";
        out += "id = " + m.id + "\n";
        out += "accuracy = " + num(m.accuracy) + "\n";
        out += "true_mean_ms = " + num(m.true_mean_ms) + "\n";
        out += "true_std_ms = " + num(m.true_std_ms) + "\n";
        if (m.seed_mean_ms) out += "seed_mean_ms = " + num(*m.seed_mean_ms) + "\n";
        if (m.seed_std_ms) out += "seed_std_ms = " + num(*m.seed_std_ms) + "\n";
    }
    return out;
}

SimulationConfig make_simulation_config(const ExperimentConfig& cfg, PolicyKind policy,
                                        double sla_ms) {
    SimulationConfig sim;
    sim.models = cfg.models;
    sim.network = symmetric_network(cfg.network.link_distribution());
    sim.policy = policy;
    sim.sla_ms = sla_ms;
    sim.t_threshold_ms = cfg.threshold_ms;
    sim.t_on_device_ms = cfg.t_on_device_ms;
    sim.request_count = cfg.requests;
    sim.warmup_count = cfg.warmup;
    sim.ewma_alpha = cfg.ewma_alpha;
    sim.seed = cfg.seed;
    return sim;
}

}  // namespace slapick
