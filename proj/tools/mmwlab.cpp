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

// mmwlab <experiment> [--config FILE] [--set key=value]... [--seed N]
//                     [--workers N] [--out DIR] [--print-config]
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure,
// 4 infeasible deployment.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmwlab/experiments.hpp"

namespace {

namespace ex = mmwlab::experiments;

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kInfeasible = 4 };

struct Options {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out = ".";
    bool print_config = false;
};

mmwlab::config::FlatConfig overrides(const ex::ExperimentId id, const Options& o) {
    using mmwlab::config::FlatConfig;
    FlatConfig c;
    if (!o.config_path.empty()) c = FlatConfig::load(o.config_path);
    c.set("experiment", c.contains("experiment") ? c.text("experiment") : ex::to_string(id));
    FlatConfig flags;
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw mmwlab::ConfigError("cli", "--set expects key=value, got '" + s + "'");
        flags.set(mmwlab::config::detail::trim(s.substr(0, eq)), mmwlab::config::detail::trim(s.substr(eq + 1)));
    }
    if (o.seed) flags.set("seed", std::to_string(*o.seed));
    if (o.workers) flags.set("workers", std::to_string(*o.workers));
    c.merge(flags);
    return c;
}

int run(ex::ExperimentId id, const Options& o) {
    ex::ExperimentSpec spec{id, overrides(id, o)};
    if (o.print_config) {
        ex::resolve_config(spec).write(std::cout);
        return kOk;
    }
    const auto r = ex::compute(spec);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    ex::write_outputs(r, o.out);
    for (const auto& s : r.summary) std::cout << s << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indoor millimeter-wave network experiments"};
    app.set_version_flag("--version", std::string(ex::kCodeVersion));
    app.require_subcommand(1);

    Options opt;
    std::vector<std::pair<CLI::App*, ex::ExperimentId>> subs;
    for (auto id : ex::all_experiments()) {
        auto* sub = app.add_subcommand(ex::to_string(id), ex::figure_name(id));
        sub->add_option("--config", opt.config_path, "configuration file (key = value lines)");
        sub->add_option("--set", opt.sets, "override one key, key=value (repeatable)");
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--workers", opt.workers, "worker threads");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_flag("--print-config", opt.print_config, "print the resolved configuration and exit");
        subs.emplace_back(sub, id);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    ex::ExperimentId id{};
    for (const auto& [sub, sid] : subs)
        if (sub->parsed()) id = sid;

    try {
        return run(id, opt);
    } catch (const mmwlab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const mmwlab::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const mmwlab::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInfeasible;
    } catch (const mmwlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
}
