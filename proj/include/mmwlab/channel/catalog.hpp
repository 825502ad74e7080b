// SPDX-License-Identifier: Apache-2.0
//
// mmwlab: indoor millimeter-wave network laboratory
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWLAB_CHANNEL_CATALOG_HPP
#define MMWLAB_CHANNEL_CATALOG_HPP

// Measured 28 GHz indoor parameter sets (ceiling-mounted access point,
// hand-held user equipment), keyed by environment, use case and link state.

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mmwlab/channel/kappa_mu.hpp"
#include "mmwlab/error.hpp"

namespace mmwlab::channel {

enum class Environment { Hallway, Office };
enum class UseCase { App, Pocket, Hand };

inline const char* to_string(Environment e) { return e == Environment::Hallway ? "Hallway" : "Office"; }
inline const char* to_string(UseCase u) {
    switch (u) {
    case UseCase::App: return "App";
    case UseCase::Pocket: return "Pocket";
    case UseCase::Hand: return "Hand";
    }
    return "?";
}

inline Environment parse_environment(const std::string& s) {
    if (s == "Hallway") return Environment::Hallway;
    if (s == "Office") return Environment::Office;
    throw DomainError("channel", "unknown environment '" + s + "'");
}
inline UseCase parse_use_case(const std::string& s) {
    if (s == "App") return UseCase::App;
    if (s == "Pocket") return UseCase::Pocket;
    if (s == "Hand") return UseCase::Hand;
    throw DomainError("channel", "unknown use case '" + s + "'");
}
inline LinkState parse_link_state(const std::string& s) {
    if (s == "LOS") return LinkState::LOS;
    if (s == "NLOS") return LinkState::NLOS;
    throw DomainError("channel", "unknown link state '" + s + "'");
}

struct ScenarioParams {
    Environment environment = Environment::Hallway;
    UseCase use_case = UseCase::App;
    LinkState link_state = LinkState::LOS;
    PathLossModel path_loss;
    KappaMuParams fading;
    double body_blockage_db = 0.0;  // NLOS P0 - LOS P0 as tabulated
};

/// LOS and NLOS parameter sets of one (environment, use case) pair.
struct ScenarioPair {
    ScenarioParams los;
    ScenarioParams nlos;
    std::string name;

    const ScenarioParams& operator[](LinkState s) const { return s == LinkState::LOS ? los : nlos; }
};

namespace detail {

struct Row {
    Environment env;
    UseCase uc;
    double alpha_los, p0_los, kappa_los, mu_los, omega_los;
    double alpha_nlos, p0_nlos, kappa_nlos, mu_nlos, omega_nlos;
    double blockage_db;
};

// Mean estimates over all measurement trials.
inline constexpr std::array<Row, 6> kMeasured = {{
    {Environment::Hallway, UseCase::App, 1.92, 78.31, 2.80, 0.77, 1.16, 1.93, 95.39, 0.67, 0.96, 1.25, 17.09},
    {Environment::Hallway, UseCase::Pocket, 1.92, 82.55, 2.64, 0.78, 1.17, 1.95, 95.60, 0.47, 1.02, 1.24, 13.05},
    {Environment::Hallway, UseCase::Hand, 1.93, 90.42, 1.89, 0.88, 1.18, 1.94, 97.49, 0.89, 0.99, 1.22, 7.06},
    {Environment::Office, UseCase::App, 2.58, 81.31, 1.14, 1.00, 1.21, 1.03, 101.41, 0.48, 1.00, 1.26, 20.09},
    {Environment::Office, UseCase::Pocket, 1.38, 92.32, 1.46, 0.91, 1.21, 1.01, 102.11, 0.46, 1.00, 1.26, 9.79},
    {Environment::Office, UseCase::Hand, 1.52, 95.74, 1.24, 0.93, 1.21, 1.38, 101.83, 0.50, 1.04, 1.24, 6.09},
}};

inline ScenarioPair make_pair(const Row& r) {
    ScenarioPair p;
    p.los = {r.env, r.uc, LinkState::LOS, {r.p0_los, r.alpha_los, 1.0},
             KappaMuParams::make(r.kappa_los, r.mu_los, r.omega_los), r.blockage_db};
    p.nlos = {r.env, r.uc, LinkState::NLOS, {r.p0_nlos, r.alpha_nlos, 1.0},
              KappaMuParams::make(r.kappa_nlos, r.mu_nlos, r.omega_nlos), r.blockage_db};
    p.name = std::string(to_string(r.env)) + "/" + to_string(r.uc);
    return p;
}

} // namespace detail

/// All twelve measured parameter sets (six LOS/NLOS pairs).
inline std::vector<ScenarioParams> measured_catalog() {
    std::vector<ScenarioParams> out;
    for (const auto& r : detail::kMeasured) {
        const auto p = detail::make_pair(r);
        out.push_back(p.los);
        out.push_back(p.nlos);
    }
    return out;
}

inline ScenarioPair scenario(Environment env, UseCase uc) {
    for (const auto& r : detail::kMeasured)
        if (r.env == env && r.uc == uc) return detail::make_pair(r);
    throw DomainError("channel", "no such scenario");
}

inline std::vector<ScenarioPair> all_scenarios() {
    std::vector<ScenarioPair> out;
    for (const auto& r : detail::kMeasured) out.push_back(detail::make_pair(r));
    return out;
}

/// Parameter set used by the deployment study. It differs from every
/// measured row (LOS exponent 2.1, NLOS exponent 3.5, NLOS fading 0.92/0.96/1.23).
inline ScenarioPair deployment_defaults() {
    ScenarioPair p;
    p.los = {Environment::Hallway, UseCase::App, LinkState::LOS, {78.31, 2.1, 1.0},
             KappaMuParams::make(2.80, 0.77, 1.16), 95.39 - 78.31};
    p.nlos = {Environment::Hallway, UseCase::App, LinkState::NLOS, {95.39, 3.5, 1.0},
              KappaMuParams::make(0.92, 0.96, 1.23), 95.39 - 78.31};
    p.name = "DeploymentDefaults";
    return p;
}

/// Resolves "Hallway/App", "Office/Hand", ... or "DeploymentDefaults".
inline ScenarioPair scenario_by_name(const std::string& name) {
    if (name == "DeploymentDefaults") return deployment_defaults();
    const auto slash = name.find('/');
    if (slash == std::string::npos) throw DomainError("channel", "scenario name must be Environment/UseCase: '" + name + "'");
    return scenario(parse_environment(name.substr(0, slash)), parse_use_case(name.substr(slash + 1)));
}

inline nlohmann::json to_json(const ScenarioParams& s) {
    return {{"environment", to_string(s.environment)},
            {"use_case", to_string(s.use_case)},
            {"link_state", to_string(s.link_state)},
            {"path_loss", {{"p0_db", s.path_loss.p0_db}, {"alpha", s.path_loss.alpha}, {"d0_m", s.path_loss.d0_m}}},
            {"fading", {{"kappa", s.fading.kappa}, {"mu", s.fading.mu}, {"omega", s.fading.omega}, {"mu_int", s.fading.mu_int}}},
            {"body_blockage_db", s.body_blockage_db}};
}

inline ScenarioParams scenario_from_json(const nlohmann::json& j) {
    try {
        ScenarioParams s;
        s.environment = parse_environment(j.at("environment").get<std::string>());
        s.use_case = parse_use_case(j.at("use_case").get<std::string>());
        s.link_state = parse_link_state(j.at("link_state").get<std::string>());
        const auto& pl = j.at("path_loss");
        s.path_loss = {pl.at("p0_db").get<double>(), pl.at("alpha").get<double>(), pl.value("d0_m", 1.0)};
        s.path_loss.validate();
        const auto& f = j.at("fading");
        s.fading = KappaMuParams::make(f.at("kappa").get<double>(), f.at("mu").get<double>(), f.at("omega").get<double>());
        if (f.contains("mu_int") && f.at("mu_int").get<int>() != s.fading.mu_int)
            throw DomainError("channel", "catalog entry: mu_int disagrees with round-half-up(mu)");
        s.body_blockage_db = j.at("body_blockage_db").get<double>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("channel", std::string("malformed catalog entry: ") + e.what());
    }
}

/// Catalog document: {"scenarios": [ ... ]}, one entry per
/// (environment, use_case, link_state) key.
inline std::string export_catalog(const std::vector<ScenarioParams>& rows) {
    nlohmann::json doc;
    doc["scenarios"] = nlohmann::json::array();
    for (const auto& r : rows) doc["scenarios"].push_back(to_json(r));
    return doc.dump(2) + "\n";
}

inline std::vector<ScenarioParams> import_catalog(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("channel", std::string("catalog is not valid JSON: ") + e.what());
    }
    if (!doc.contains("scenarios") || !doc["scenarios"].is_array())
        throw DomainError("channel", "catalog must contain a 'scenarios' array");
    std::vector<ScenarioParams> out;
    for (const auto& j : doc["scenarios"]) {
        auto s = scenario_from_json(j);
        for (const auto& o : out)
            if (o.environment == s.environment && o.use_case == s.use_case && o.link_state == s.link_state)
                throw DomainError("channel", "catalog has a duplicate key");
        out.push_back(s);
    }
    return out;
}

} // namespace mmwlab::channel

#endif // MMWLAB_CHANNEL_CATALOG_HPP
