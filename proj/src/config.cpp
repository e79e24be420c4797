#include "udrlpg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace udrlpg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// flat TOML subset -> json values keyed by name
nlohmann::json parse_toml(const std::string& text) {
    nlohmann::json out = nlohmann::json::object();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos && line.find('"') == std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[')
            throw std::invalid_argument("config: tables are not supported (line " +
                                        std::to_string(lineno) + ")");
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.empty())
            throw std::invalid_argument("config: empty value for " + key);

        if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"')
                throw std::invalid_argument("config: unterminated string for " + key);
            out[key] = val.substr(1, val.size() - 2);
        } else if (val.front() == '[') {
            if (val.back() != ']')
                throw std::invalid_argument("config: unterminated array for " + key);
            nlohmann::json arr = nlohmann::json::array();
            std::istringstream items(val.substr(1, val.size() - 2));
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                if (item.find_first_of(".eE") != std::string::npos)
                    arr.push_back(std::stod(item));
                else
                    arr.push_back(std::stoll(item));
            }
            out[key] = arr;
        } else if (val == "true" || val == "false") {
            out[key] = (val == "true");
        } else if (val.find('.') != std::string::npos || val.find('e') != std::string::npos ||
                   val.find('E') != std::string::npos) {
            out[key] = std::stod(val);
        } else {
            out[key] = std::stoll(val);
        }
    }
    return out;
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

RunConfig from_values(const nlohmann::json& j) {
    RunConfig c;
    maybe(j, "env", c.env);
    maybe(j, "seed", c.seed);
    maybe(j, "out_dir", c.out_dir);
    maybe(j, "policy_hidden", c.policy_hidden);
    maybe(j, "generator_hidden", c.generator_hidden);
    maybe(j, "n_init_random", c.n_init_random);
    maybe(j, "updates_per_stage", c.updates_per_stage);
    maybe(j, "batch_size", c.batch_size);
    maybe(j, "rollouts_per_stage", c.rollouts_per_stage);
    maybe(j, "total_stages", c.total_stages);
    maybe(j, "sigma", c.sigma);
    maybe(j, "command_explore_frac", c.command_explore_frac);
    maybe(j, "n_buckets", c.n_buckets);
    maybe(j, "capacity_per_bucket", c.capacity_per_bucket);
    if (j.contains("strategy")) c.strategy = strategy_from_name(j.at("strategy"));
    maybe(j, "adam_alpha", c.adam_alpha);
    maybe(j, "n_workers", c.n_workers);
    maybe(j, "checkpoint_every", c.checkpoint_every);
    maybe(j, "debug_dump", c.debug_dump);
    c.validate();
    return c;
}

}  // namespace

void RunConfig::validate() const {
    if (n_init_random < 1 || updates_per_stage < 1 || batch_size < 1 ||
        rollouts_per_stage < 1 || total_stages < 0 || n_buckets < 1 ||
        capacity_per_bucket < 1 || n_workers < 1 || checkpoint_every < 1)
        throw std::invalid_argument("config: counts must be positive");
    if (sigma < 0.0) throw std::invalid_argument("config: sigma must be >= 0");
    if (command_explore_frac < 0.0 || command_explore_frac > 1.0)
        throw std::invalid_argument("config: command_explore_frac must be in [0, 1]");
    if (adam_alpha <= 0.0) throw std::invalid_argument("config: adam_alpha must be > 0");
    make_env(env);  // throws on unknown names
}

std::string RunConfig::to_toml() const {
    std::ostringstream out;
    out << "env = \"" << env << "\"\n";
    out << "seed = " << seed << "\n";
    out << "out_dir = \"" << out_dir << "\"\n";
    auto arr = [&](const char* key, const std::vector<int>& v) {
        out << key << " = [";
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
        out << "]\n";
    };
    arr("policy_hidden", policy_hidden);
    arr("generator_hidden", generator_hidden);
    out << "n_init_random = " << n_init_random << "\n";
    out << "updates_per_stage = " << updates_per_stage << "\n";
    out << "batch_size = " << batch_size << "\n";
    out << "rollouts_per_stage = " << rollouts_per_stage << "\n";
    out << "total_stages = " << total_stages << "\n";
    out << "sigma = " << sigma << "\n";
    out << "command_explore_frac = " << command_explore_frac << "\n";
    out << "n_buckets = " << n_buckets << "\n";
    out << "capacity_per_bucket = " << capacity_per_bucket << "\n";
    out << "strategy = \"" << strategy_name(strategy) << "\"\n";
    out << "adam_alpha = " << adam_alpha << "\n";
    out << "n_workers = " << n_workers << "\n";
    out << "checkpoint_every = " << checkpoint_every << "\n";
    out << "debug_dump = " << (debug_dump ? "true" : "false") << "\n";
    return out.str();
}

std::string RunConfig::to_json() const {
    return parse_toml(to_toml()).dump();
}

RunConfig RunConfig::from_toml_text(const std::string& text) {
    return from_values(parse_toml(text));
}

RunConfig RunConfig::from_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_toml_text(buf.str());
}

RunConfig RunConfig::from_json(const std::string& text) {
    return from_values(nlohmann::json::parse(text));
}

}  // namespace udrlpg
