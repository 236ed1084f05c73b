// Embedded scenario configurations (generated from scenarios/*.json at build
// time) and the bundled-scenario registry.

#include <map>

#include "qme/scenario.hpp"

namespace qme::scenario {

namespace {

const std::map<std::string, std::string>& table() {
    static const std::map<std::string, std::string> t = {
#include "embedded_scenarios.inc"
    };
    return t;
}

} // namespace

const std::vector<std::string>& bundled_names() {
    // The worked examples exposed through `list`.
    static const std::vector<std::string> names = {
        "partial_trace", "super_matrix_exp", "temporal_svd", "td_propagation",
        "semigroup",     "suzuki_trotter",   "rk45",         "mcwf",
        "correlation_spectrum", "random_network", "floquet"};
    return names;
}

std::vector<std::string> embedded_names() {
    std::vector<std::string> names;
    names.reserve(table().size());
    for (const auto& [name, _] : table()) names.push_back(name);
    return names;
}

bool is_embedded(const std::string& name) { return table().count(name) > 0; }

const std::string& embedded_config(const std::string& name) {
    const auto it = table().find(name);
    if (it == table().end())
        throw ConfigError("unknown embedded scenario '" + name + "'");
    return it->second;
}

} // namespace qme::scenario
