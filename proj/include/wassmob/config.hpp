#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wassmob {

// Flat key=value configuration with [section] headers; keys are stored as
// "section.key". Unsectioned keys go to "experiment.". Values keep their raw
// text so emit/parse round-trips exactly.
class ExperimentConfig {
public:
    static const std::vector<std::string>& known_kinds();

    std::string kind;  // experiment.kind
    std::uint64_t seed = 0;
    std::string out_dir;

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& dflt = "") const;
    double get_double(const std::string& key, double dflt) const;
    int get_int(const std::string& key, int dflt) const;
    std::vector<double> get_list(const std::string& key) const;  // comma-separated

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& values() const { return values_; }

    // collects every violation; throws ValidationError listing all of them
    void validate(const std::filesystem::path& base_dir) const;

    std::string emit() const;

private:
    std::map<std::string, std::string> values_;
};

ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace wassmob
