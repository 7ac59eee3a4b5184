#include "wassmob/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wassmob/errors.hpp"

namespace wassmob {

namespace {
std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
}  // namespace

const std::vector<std::string>& ExperimentConfig::known_kinds() {
    static const std::vector<std::string> kinds{"distance",     "geodesic",   "jko",
                                               "fv_reference", "jko_vs_fv",  "relaxation",
                                               "metric_axioms"};
    return kinds;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ValidationError("config: key '" + key + "' is not a number: " + it->second);
    }
}

int ExperimentConfig::get_int(const std::string& key, int dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw ValidationError("config: key '" + key + "' is not an integer: " + it->second);
    }
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("config: key '" + key + "' has a bad list entry: " + item);
        }
    }
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
    if (key == "experiment.kind") kind = value;
    if (key == "experiment.seed") seed = std::stoull(value);
    if (key == "experiment.out") out_dir = value;
}

void ExperimentConfig::validate(const std::filesystem::path& base_dir) const {
    std::vector<std::string> problems;
    if (kind.empty())
        problems.push_back("experiment.kind is required");
    else if (std::find(known_kinds().begin(), known_kinds().end(), kind) == known_kinds().end())
        problems.push_back("experiment.kind '" + kind + "' is not a known experiment");

    auto positive = [&](const std::string& key, double dflt) {
        try {
            if (!(get_double(key, dflt) > 0.0)) problems.push_back(key + " must be positive");
        } catch (const Error& e) {
            problems.push_back(e.what());
        }
    };
    if (kind != "relaxation") {
        int dim = get_int("grid.dim", 1);
        if (dim != 1 && dim != 2) problems.push_back("grid.dim must be 1 or 2");
        if (get_int("grid.n", 2) < 2) problems.push_back("grid.n must be at least 2");
        if (!has("mobility.family"))
            problems.push_back("mobility.family is required (constant | scalar_1d | separable_diagonal)");
    }
    positive("solver.tau", 1e-2);
    positive("solver.epsilon_floor", 1e-4);

    // referenced csv paths must exist at parse time
    for (const auto& [k, v] : values_) {
        if (k.size() >= 4 && k.substr(k.size() - 4) == ".csv" && !v.empty()) {
            auto p = std::filesystem::path(v).is_absolute() ? std::filesystem::path(v)
                                                            : base_dir / v;
            if (!std::filesystem::exists(p))
                problems.push_back(k + " references a missing file: " + v);
        }
    }
    if (!problems.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
}

std::string ExperimentConfig::emit() const {
    // group by section, stable order
    std::string out;
    std::string current;
    for (const auto& [k, v] : values_) {
        auto dot = k.find('.');
        std::string sec = k.substr(0, dot), key = k.substr(dot + 1);
        if (sec != current) {
            if (!out.empty()) out += "\n";
            out += "[" + sec + "]\n";
            current = sec;
        }
        out += key + " = " + v + "\n";
    }
    return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section = "experiment";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("config line " + std::to_string(lineno) +
                                 ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ParseError("config line " + std::to_string(lineno) + ": empty section");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) +
                             ": expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("config line " + std::to_string(lineno) + ": empty key");
        cfg.set(section + "." + key, value);
    }
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open config: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg = parse_config_text(ss.str());
    cfg.validate(path.parent_path());
    return cfg;
}

}  // namespace wassmob
