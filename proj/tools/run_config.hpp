/*
 * JSON run configuration: schema-checked readers that build library objects
 * and record the resolved config (defaults filled in) for the output.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "subfk/kernels.hpp"
#include "subfk/semigroup.hpp"

namespace subfk::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// Reads keys from one JSON object, fills `resolved` as it goes and rejects
// keys that were never read.
class Section {
public:
    Section(const json& j, std::string path);

    double num(const std::string& key, std::optional<double> def = std::nullopt);
    std::int64_t integer(const std::string& key, std::optional<std::int64_t> def = std::nullopt);
    bool flag(const std::string& key, bool def);
    std::string str(const std::string& key, std::optional<std::string> def = std::nullopt);
    std::vector<double> nums(const std::string& key, std::optional<std::vector<double>> def = std::nullopt);
    // [re, im] pairs or plain numbers
    std::vector<cplx> cplxs(const std::string& key, std::optional<std::vector<cplx>> def = std::nullopt);
    bool has(const std::string& key) const { return j_.contains(key); }
    Section sub(const std::string& key);
    void put_sub(const std::string& key, const json& resolved) { resolved_[key] = resolved; }

    // Throws ConfigError naming the first unread key.
    json finish() const;
    const std::string& path() const { return path_; }

private:
    const json& raw(const std::string& key);
    json j_;
    std::string path_;
    json resolved_ = json::object();
    std::vector<std::string> read_;
};

BernsteinFunction read_psi(Section& s);
SubordinatorSpec read_subordinator(Section& s, const BernsteinFunction& psi);
FieldSpec read_field(Section& s, int d);
Potential read_potential(Section& s);
TestFunction read_test_function(Section& s, int d, double box_L);

struct SpinBlock {
    SpinCoupling coupling;
    std::vector<cplx> f_coef, g_coef;
    std::optional<double> shift;  // none: chosen from the grid oracle or 0
};
std::optional<SpinBlock> read_spin(Section& parent, const FieldSpec& field);

EstimatorConfig read_estimator(Section& s, int d);

struct OracleBlock {
    GridSpec grid;
    KineticScheme scheme = KineticScheme::Spectral;
};
OracleBlock read_oracle(Section& s, int d);

// A complete estimate/oracle-compare/diamagnetic config.
struct RunConfig {
    BernsteinFunction psi = BernsteinFunction::linear(1.0);
    std::optional<SubordinatorSpec> sub;
    int d = 1;
    FieldSpec field;
    Potential potential;
    TestFunction f, g;
    std::optional<SpinBlock> spin;
    EstimatorConfig cfg;
    std::optional<OracleBlock> oracle;
    bool chunks_csv = true;
    json resolved;
};
// seed and threads from flags override the file
RunConfig parse_run_config(const json& j, std::optional<std::uint64_t> seed, int threads);

json load_json_file(const std::string& path);

// FNV-1a over the compact dump of the resolved config
std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace subfk::cli
