#pragma once

#include "genolang/coexp.hpp"
#include "genolang/hybrid.hpp"
#include "genolang/seqio.hpp"
#include "genolang/synth.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace genolang {

inline constexpr const char* artifact_version = "0.1.0";

struct ConfigKey {
    const char* name;
    const char* default_value;
    const char* help;
};

// Every tunable of the pipeline as a flat key = value map. Unknown keys are
// rejected; typed accessors raise ErrorKind::config on malformed values.
class RunConfig {
public:
    RunConfig();

    static const std::vector<ConfigKey>& keys();
    static bool is_known(std::string_view key);

    void set(std::string_view key, std::string_view value, std::string_view source = "flag");
    const std::string& get(std::string_view key) const;

    long long get_int(std::string_view key) const;
    std::uint64_t get_u64(std::string_view key) const;
    double get_double(std::string_view key) const;
    bool get_bool(std::string_view key) const;
    std::filesystem::path get_path(std::string_view key) const;

    // Output directory joined with `name`.
    std::filesystem::path out_path(std::string_view name) const;
    // Explicit `model` key, else <out>/model.json.
    std::filesystem::path model_path() const;

    SplitSpec split_spec() const;
    HybridConfig hybrid_config() const;
    SynthSpec synth_spec() const;
    TriageOptions triage_options() const;

    // Builds every sub-config; throws on the first invalid one.
    void validate() const;

    // Resolved `key = value` lines, keys sorted.
    std::string render() const;

private:
    std::map<std::string, std::string, std::less<>> values_;
};

// `key = value` lines; '#' starts a comment line.
void apply_config_text(RunConfig& cfg, std::string_view text, const std::string& source);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

} // namespace genolang
