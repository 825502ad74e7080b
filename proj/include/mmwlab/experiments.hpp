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

#ifndef MMWLAB_EXPERIMENTS_HPP
#define MMWLAB_EXPERIMENTS_HPP

// Named experiments behind the command-line front end. An experiment is
// computed entirely in memory from its resolved configuration and only
// then written out, so a failing run leaves no files behind. Each run also
// writes manifest.txt, the resolved configuration itself; feeding it back
// with --config reproduces the data files byte for byte.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "mmwlab/analytic/kpi.hpp"
#include "mmwlab/analytic/sinr.hpp"
#include "mmwlab/channel/catalog.hpp"
#include "mmwlab/channel/fitting.hpp"
#include "mmwlab/config.hpp"
#include "mmwlab/deploy.hpp"
#include "mmwlab/error.hpp"
#include "mmwlab/mcsim.hpp"
#include "mmwlab/rng.hpp"

#ifndef MMWLAB_VERSION
#define MMWLAB_VERSION "0.1.0"
#endif

namespace mmwlab::experiments {

inline constexpr const char* kCodeVersion = MMWLAB_VERSION;

enum class ExperimentId { FitDemo, CcdfValidate, SweepNTx, SweepBeamwidth, SweepServDist, SweepBlockage, DeploySweep };

inline const std::vector<ExperimentId>& all_experiments() {
    static const std::vector<ExperimentId> ids{ExperimentId::FitDemo,        ExperimentId::CcdfValidate,
                                               ExperimentId::SweepNTx,       ExperimentId::SweepBeamwidth,
                                               ExperimentId::SweepServDist,  ExperimentId::SweepBlockage,
                                               ExperimentId::DeploySweep};
    return ids;
}

inline const char* to_string(ExperimentId id) {
    switch (id) {
    case ExperimentId::FitDemo: return "fit-demo";
    case ExperimentId::CcdfValidate: return "ccdf-validate";
    case ExperimentId::SweepNTx: return "sweep-ntx";
    case ExperimentId::SweepBeamwidth: return "sweep-beamwidth";
    case ExperimentId::SweepServDist: return "sweep-servdist";
    case ExperimentId::SweepBlockage: return "sweep-blockage";
    case ExperimentId::DeploySweep: return "deploy-sweep";
    }
    return "?";
}

/// The result the experiment regenerates, recorded in the manifest.
inline const char* figure_name(ExperimentId id) {
    switch (id) {
    case ExperimentId::FitDemo: return "channel-parameter-table-and-aicc-ranking";
    case ExperimentId::CcdfValidate: return "sinr-ccdf-analytic-vs-simulation";
    case ExperimentId::SweepNTx: return "kpi-vs-number-of-transmitters";
    case ExperimentId::SweepBeamwidth: return "kpi-vs-transmitter-beamwidth";
    case ExperimentId::SweepServDist: return "kpi-vs-serving-distance";
    case ExperimentId::SweepBlockage: return "kpi-vs-serving-link-blockage";
    case ExperimentId::DeploySweep: return "required-aps-vs-coverage-target";
    }
    return "?";
}

inline ExperimentId parse_experiment(const std::string& s) {
    for (auto id : all_experiments())
        if (s == to_string(id)) return id;
    throw ConfigError("cli", "unknown experiment '" + s + "'");
}

// --- configuration schemas ------------------------------------------------------

namespace detail {

using config::KeySpec;

inline const char* kAllScenarios = "Hallway/App, Hallway/Pocket, Hallway/Hand, Office/App, Office/Pocket, Office/Hand";

inline std::vector<KeySpec> network_keys(int n_tx) {
    return {
        {"scenarios", kAllScenarios, "measured scenarios, Environment/UseCase"},
        {"arena.radius_m", "12", "radius of the disk holding the transmitters"},
        {"arena.tx_height_m", "3", "transmitter height"},
        {"arena.rx_height_m", "1.5", "receiver height"},
        {"network.n_tx", std::to_string(n_tx), "number of transmitters, serving one included"},
        {"network.serving_distance_m", "1", "horizontal distance to the serving transmitter"},
        {"network.serving_state", "LOS", "LOS or NLOS"},
        {"network.p_los", "0.5", "LOS probability of interfering links"},
        {"antenna.tx_beamwidth_deg", "30", "transmitter mainlobe width"},
        {"antenna.rx_beamwidth_deg", "30", "receiver mainlobe width"},
        {"antenna.sidelobe_db", "-25", "sidelobe gain"},
        {"antenna.direction_model", "spherical", "interferer boresights: spherical or planar"},
        {"radio.bandwidth_hz", "200e6", "system bandwidth"},
        {"radio.tx_power_dbm", "23", "transmit power"},
        {"radio.noise_figure_db", "7", "receiver noise figure"},
        {"mc.snapshots", "100000", "Monte Carlo snapshots per point"},
    };
}

inline std::vector<KeySpec> kpi_keys() {
    return {
        {"kpi.method", "analytic", "analytic or monte-carlo"},
        {"kpi.threshold_db", "10", "SINR threshold of the coverage column"},
        {"kpi.edr_quantile", "0.05", "lower rate quantile reported as EDR"},
        {"kpi.grid_min_db", "-20", "analytic tail grid, lower end"},
        {"kpi.grid_max_db", "80", "analytic tail grid, upper end"},
        {"kpi.grid_step_db", "1", "analytic tail grid spacing"},
    };
}

inline std::vector<KeySpec> common_keys(ExperimentId id) {
    return {
        {"experiment", to_string(id), "must name the experiment being run"},
        {"figure", figure_name(id), "must name the result of the experiment"},
        {"code_version", kCodeVersion, "informational; set to the running version"},
        {"seed", "1", "master seed"},
        {"workers", "1", "worker threads"},
    };
}

inline void append(std::vector<KeySpec>& a, const std::vector<KeySpec>& b) { a.insert(a.end(), b.begin(), b.end()); }

} // namespace detail

inline std::vector<config::KeySpec> schema(ExperimentId id) {
    auto s = detail::common_keys(id);
    switch (id) {
    case ExperimentId::FitDemo:
        detail::append(s, {
            {"fit.scenarios", detail::kAllScenarios, "catalog rows to regenerate and refit"},
            {"fit.samples", "5000", "envelope samples per fading fit"},
            {"fit.trace_points", "2000", "points of each synthetic path-loss trace"},
            {"fit.trace_min_m", "1", "shortest trace distance"},
            {"fit.trace_max_m", "20", "longest trace distance"},
            {"fit.shadowing_db", "2", "standard deviation of trace noise"},
        });
        break;
    case ExperimentId::CcdfValidate:
        detail::append(s, detail::network_keys(12));
        s[5].default_value = "Hallway/App, Office/Hand";
        detail::append(s, {
            {"ccdf.serving_states", "LOS, NLOS", "serving states to validate"},
            {"ccdf.zeta_min_db", "-10", "lowest threshold"},
            {"ccdf.zeta_max_db", "30", "highest threshold"},
            {"ccdf.zeta_step_db", "1", "threshold spacing"},
        });
        for (auto& k : s)
            if (k.key == "mc.snapshots") k.default_value = "1000000";
        break;
    case ExperimentId::SweepNTx:
        detail::append(s, detail::network_keys(12));
        detail::append(s, detail::kpi_keys());
        s.push_back({"sweep.values", "1, 2, 4, 6, 8, 10, 12", "transmitter counts"});
        break;
    case ExperimentId::SweepBeamwidth:
        detail::append(s, detail::network_keys(12));
        detail::append(s, detail::kpi_keys());
        s.push_back({"sweep.values", "10, 20, 30, 40, 50, 60, 70, 80, 90", "transmitter beamwidths, degrees"});
        break;
    case ExperimentId::SweepServDist:
        detail::append(s, detail::network_keys(11));
        detail::append(s, detail::kpi_keys());
        s.push_back({"sweep.values", "0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6, 7, 8",
                     "horizontal serving distances, m"});
        break;
    case ExperimentId::SweepBlockage:
        detail::append(s, detail::network_keys(11));
        detail::append(s, detail::kpi_keys());
        s.push_back({"sweep.values", "LOS, NLOS", "serving link states"});
        break;
    case ExperimentId::DeploySweep:
        detail::append(s, {
            {"deploy.floor_radius_m", "5.5", "floor radius"},
            {"deploy.circle_radius_m", "0.5", "radius of one tessellation circle"},
            {"deploy.sigma_m", "10", "scale of the truncated Gaussian users"},
            {"deploy.distributions", "uniform, gaussian", "user distributions"},
            {"deploy.betas", "0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8", "coverage targets"},
            {"deploy.beams", "1, 2, 3, 4", "beams per AP"},
            {"deploy.candidate_counts", "4, 16, 100", "candidate lattice sizes (perfect squares)"},
            {"deploy.candidate_limit", "3", "candidate links kept per area"},
            {"deploy.snr_threshold_db", "10", "SNR threshold of a usable link"},
            {"deploy.p_los", "0.5", "LOS probability of a link"},
            {"deploy.ceiling_side_m", "10", "side of the square ceiling"},
            {"deploy.ceiling_height_m", "3", "ceiling height"},
            {"deploy.user_height_m", "1.5", "user height"},
            {"deploy.node_limit", "2000", "branch-and-bound nodes per solve"},
            {"deploy.require_feasible", "false", "fail (exit 4) unless every point has a plan"},
        });
        break;
    }
    return s;
}

struct ExperimentSpec {
    ExperimentId id = ExperimentId::SweepNTx;
    config::FlatConfig overrides;
};

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    config::FlatConfig resolved;
    std::vector<OutputFile> files;
    std::vector<std::string> summary;  // short human-readable lines
    std::vector<std::string> warnings;
};

/// Defaults plus overrides, checked for unknown keys and for a manifest
/// that belongs to another experiment.
inline config::FlatConfig resolve_config(const ExperimentSpec& spec, std::vector<std::string>* warnings = nullptr) {
    auto cfg = config::resolve(schema(spec.id), spec.overrides);
    if (cfg.get_string("experiment") != to_string(spec.id))
        throw ConfigError("config", "key 'experiment': configuration is for '" + cfg.get_string("experiment") +
                                        "', not '" + to_string(spec.id) + "'");
    if (cfg.get_string("figure") != figure_name(spec.id))
        throw ConfigError("config", "key 'figure': expected '" + std::string(figure_name(spec.id)) + "'");
    if (cfg.get_string("code_version") != kCodeVersion) {
        if (warnings)
            warnings->push_back("configuration was written by version " + cfg.get_string("code_version") +
                                "; running " + kCodeVersion);
        cfg.set("code_version", kCodeVersion);
    }
    if (cfg.get_int("workers") < 1) throw ConfigError("config", "key 'workers': must be >= 1");
    cfg.get_u64("seed");
    return cfg;
}

// --- helpers ----------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

inline channel::LinkState parse_state(const std::string& key, const std::string& v) {
    if (v == "LOS") return channel::LinkState::LOS;
    if (v == "NLOS") return channel::LinkState::NLOS;
    throw ConfigError("config", "key '" + key + "': expected LOS or NLOS, got '" + v + "'");
}

inline std::vector<channel::ScenarioPair> scenarios(const config::FlatConfig& c, const std::string& key) {
    std::vector<channel::ScenarioPair> out;
    for (const auto& name : c.get_list(key)) {
        try {
            out.push_back(channel::scenario_by_name(name));
        } catch (const DomainError& e) {
            throw ConfigError("config", "key '" + key + "': " + e.what());
        }
    }
    return out;
}

// Re-raises domain errors from validation as configuration errors that
// name the offending key.
template <class F>
auto checked(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError("config", "key '" + key + "': " + e.what());
    }
}

inline mcsim::NetworkConfig network(const config::FlatConfig& c, const channel::ScenarioPair& sc) {
    mcsim::NetworkConfig n;
    n.arena.radius_m = c.get_double("arena.radius_m");
    n.arena.tx_height_m = c.get_double("arena.tx_height_m");
    n.arena.rx_height_m = c.get_double("arena.rx_height_m");
    n.n_tx = static_cast<int>(c.get_int("network.n_tx"));
    n.r0_m = c.get_double("network.serving_distance_m");
    n.serving_state = parse_state("network.serving_state", c.get_string("network.serving_state"));
    n.p_los = c.get_double("network.p_los");
    const double side = netgeom::db_to_linear(c.get_double("antenna.sidelobe_db"));
    n.tx = checked("antenna.tx_beamwidth_deg", [&] {
        return netgeom::ConeBulbAntenna::make(netgeom::deg_to_rad(c.get_double("antenna.tx_beamwidth_deg")), side);
    });
    n.rx = checked("antenna.rx_beamwidth_deg", [&] {
        return netgeom::ConeBulbAntenna::make(netgeom::deg_to_rad(c.get_double("antenna.rx_beamwidth_deg")), side);
    });
    const std::string dir = c.get_string("antenna.direction_model");
    if (dir == "spherical") n.direction = netgeom::DirectionModel::Spherical;
    else if (dir == "planar") n.direction = netgeom::DirectionModel::Planar;
    else throw ConfigError("config", "key 'antenna.direction_model': expected spherical or planar, got '" + dir + "'");
    n.radio.bandwidth_hz = c.get_double("radio.bandwidth_hz");
    n.radio.tx_power_dbm = c.get_double("radio.tx_power_dbm");
    n.radio.noise_figure_db = c.get_double("radio.noise_figure_db");
    n.scenario = sc;
    n.n_snapshots = c.get_u64("mc.snapshots");
    n.master_seed = c.get_u64("seed");
    n.workers = static_cast<int>(c.get_int("workers"));
    checked("network", [&] {
        n.validate();
        return 0;
    });
    return n;
}

inline std::vector<double> db_grid(double lo, double hi, double step, const std::string& key) {
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("config", "key '" + key + "': grid needs step > 0 and max >= min");
    std::vector<double> g;
    const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) g.push_back(lo + step * static_cast<double>(i));
    return g;
}

struct KpiPoint {
    double coverage = 0.0;
    double atc = 0.0;
    double edr = 0.0;
    double se = 0.0;
};

inline KpiPoint kpi_point(const config::FlatConfig& c, const mcsim::NetworkConfig& n) {
    const double zeta = netgeom::db_to_linear(c.get_double("kpi.threshold_db"));
    const double q = c.get_double("kpi.edr_quantile");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("config", "key 'kpi.edr_quantile': must lie in (0, 1)");
    const std::string method = c.get_string("kpi.method");
    KpiPoint p;
    if (method == "analytic") {
        const auto grid = db_grid(c.get_double("kpi.grid_min_db"), c.get_double("kpi.grid_max_db"),
                                  c.get_double("kpi.grid_step_db"), "kpi.grid_step_db");
        const auto d = analytic::tabulate_sinr_ccdf(n.query(1.0), n.arena, n.radio, n.interferer_gains(), grid);
        p.coverage = d.ccdf(zeta);
        p.se = analytic::spectral_efficiency(d);
        p.edr = analytic::experienced_data_rate(d, n.radio.bandwidth_hz, q);
    } else if (method == "monte-carlo") {
        const auto s = mcsim::run_snapshots(n);
        p.coverage = mcsim::estimate_coverage(s.samples, zeta);
        p.se = mcsim::estimate_se(s.samples);
        p.edr = mcsim::estimate_edr(s.samples, n.radio.bandwidth_hz, q);
    } else {
        throw ConfigError("config", "key 'kpi.method': expected analytic or monte-carlo, got '" + method + "'");
    }
    p.atc = analytic::area_traffic_capacity(p.se, n.n_tx, n.arena, n.radio.bandwidth_hz);
    return p;
}

inline RunResult run_kpi_sweep(ExperimentId id, const config::FlatConfig& c) {
    const auto scs = scenarios(c, "scenarios");
    const char* axis = id == ExperimentId::SweepNTx         ? "n_tx"
                       : id == ExperimentId::SweepBeamwidth ? "tx_beamwidth_deg"
                       : id == ExperimentId::SweepServDist  ? "serving_distance_m"
                                                             : "serving_state";
    const auto values = c.get_list("sweep.values");
    // Build every configuration first so that a bad value fails before any
    // computation.
    std::vector<std::vector<mcsim::NetworkConfig>> nets;
    for (const auto& sc : scs) {
        const auto base = network(c, sc);
        std::vector<mcsim::NetworkConfig> row;
        for (const auto& v : values) {
            if (id == ExperimentId::SweepBlockage) {
                auto n = base;
                n.serving_state = parse_state("sweep.values", v);
                row.push_back(n);
                continue;
            }
            const auto axis_id = id == ExperimentId::SweepNTx         ? mcsim::SweepAxis::NTx
                                 : id == ExperimentId::SweepBeamwidth ? mcsim::SweepAxis::Beamwidth
                                                                       : mcsim::SweepAxis::ServingDistance;
            double x = 0.0;
            try {
                std::size_t used = 0;
                x = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
            } catch (const std::exception&) {
                throw ConfigError("config", "key 'sweep.values': expected numbers, got '" + v + "'");
            }
            row.push_back(checked("sweep.values", [&] { return mcsim::apply_axis(base, axis_id, x); }));
        }
        nets.push_back(std::move(row));
    }
    std::ostringstream t;
    t << "# experiment " << to_string(id) << "\n# method " << c.get_string("kpi.method") << "\n# coverage_threshold_db "
      << c.get_string("kpi.threshold_db") << "\n# edr_quantile " << c.get_string("kpi.edr_quantile") << "\n";
    t << "scenario," << axis << ",coverage,atc_bit_s_m2,edr_bit_s,se_bit_s_hz\n";
    for (std::size_t i = 0; i < scs.size(); ++i)
        for (std::size_t j = 0; j < values.size(); ++j) {
            const auto p = kpi_point(c, nets[i][j]);
            t << scs[i].name << "," << values[j] << "," << fmt(p.coverage) << "," << fmt(p.atc) << "," << fmt(p.edr)
              << "," << fmt(p.se) << "\n";
        }
    RunResult r;
    r.files.push_back({"kpi.csv", t.str()});
    r.summary.push_back(std::to_string(scs.size() * values.size()) + " sweep points written to kpi.csv");
    return r;
}

inline RunResult run_ccdf_validate(const config::FlatConfig& c) {
    const auto scs = scenarios(c, "scenarios");
    std::vector<channel::LinkState> states;
    for (const auto& s : c.get_list("ccdf.serving_states")) states.push_back(parse_state("ccdf.serving_states", s));
    const auto grid = db_grid(c.get_double("ccdf.zeta_min_db"), c.get_double("ccdf.zeta_max_db"),
                              c.get_double("ccdf.zeta_step_db"), "ccdf.zeta_step_db");
    std::vector<mcsim::NetworkConfig> nets;
    for (const auto& sc : scs)
        for (auto st : states) {
            auto n = network(c, sc);
            n.serving_state = st;
            nets.push_back(n);
        }
    std::ostringstream t, tail;
    t << "# experiment ccdf-validate\n";
    t << "scenario,serving_state,zeta_db,analytic,monte_carlo,abs_diff\n";
    double worst = 0.0;
    RunResult r;
    for (const auto& n : nets) {
        const auto s = mcsim::run_snapshots(n);
        const auto gains = n.interferer_gains();
        double sup = 0.0;
        for (double db : grid) {
            const double zeta = netgeom::db_to_linear(db);
            const double a = analytic::sinr_ccdf(n.query(zeta), n.arena, n.radio, gains);
            const double m = mcsim::estimate_coverage(s.samples, zeta);
            sup = std::max(sup, std::fabs(a - m));
            t << n.scenario.name << "," << channel::to_string(n.serving_state) << "," << fmt(db) << "," << fmt(a) << ","
              << fmt(m) << "," << fmt(std::fabs(a - m)) << "\n";
        }
        worst = std::max(worst, sup);
        tail << "# sup_difference " << n.scenario.name << " " << channel::to_string(n.serving_state) << " " << fmt(sup)
             << "\n";
        r.summary.push_back("sup |analytic - simulated| " + n.scenario.name + " " +
                            channel::to_string(n.serving_state) + ": " + fmt(sup));
    }
    tail << "# sup_difference_max " << fmt(worst) << "\n";
    r.files.push_back({"ccdf.csv", t.str() + tail.str()});
    return r;
}

inline RunResult run_fit_demo(const config::FlatConfig& c) {
    const auto scs = scenarios(c, "fit.scenarios");
    const auto n_env = c.get_int("fit.samples");
    const auto n_trace = c.get_int("fit.trace_points");
    const double d_lo = c.get_double("fit.trace_min_m"), d_hi = c.get_double("fit.trace_max_m");
    const double shadow = c.get_double("fit.shadowing_db");
    if (n_env < 100) throw ConfigError("config", "key 'fit.samples': at least 100 samples are needed");
    if (n_trace < 2) throw ConfigError("config", "key 'fit.trace_points': at least 2 points are needed");
    if (!(d_lo > 0.0 && d_hi > d_lo)) throw ConfigError("config", "key 'fit.trace_max_m': need 0 < min < max");
    if (!(shadow >= 0.0)) throw ConfigError("config", "key 'fit.shadowing_db': must be >= 0");
    const std::uint64_t seed = c.get_u64("seed");

    std::ostringstream t;
    t << "# experiment fit-demo\n";
    t << "scenario,state,true_p0_db,true_alpha,fit_p0_db,fit_alpha,true_kappa,true_mu,true_omega,fit_kappa,fit_mu,"
         "fit_omega,aicc_kappa_mu,aicc_rayleigh,preferred\n";
    int preferred = 0, rows = 0;
    std::uint64_t stream = 0;
    for (const auto& sc : scs)
        for (const auto* p : {&sc.los, &sc.nlos}) {
            // Synthetic measurements drawn from the catalog row: envelope
            // samples of its (integer-mu) fading law and a shadowed trace.
            auto eng = make_stream(seed, stream++);
            const auto truth = p->fading.rounded();
            channel::KappaMuSampler draw(truth);
            std::vector<double> env(static_cast<std::size_t>(n_env));
            for (auto& r : env) r = std::sqrt(draw(eng));
            auto eng2 = make_stream(seed, stream++);
            std::uniform_real_distribution<double> ud(d_lo, d_hi);
            std::normal_distribution<double> nd(0.0, shadow);
            std::vector<channel::TracePoint> trace;
            for (long long i = 0; i < n_trace; ++i) {
                const double d = ud(eng2);
                trace.push_back({d, -channel::path_loss_db(p->path_loss, d) + nd(eng2)});
            }
            const auto pl = channel::fit_path_loss(trace, 0.0, 0.0, p->path_loss.d0_m);
            const auto ranked = channel::rank_fading_models(env);
            const auto& km = ranked[0].name == "kappa-mu" ? ranked[0] : ranked[1];
            const auto& ray = ranked[0].name == "rayleigh" ? ranked[0] : ranked[1];
            preferred += ranked[0].name == "kappa-mu";
            ++rows;
            t << sc.name << "," << channel::to_string(p->link_state) << "," << fmt(p->path_loss.p0_db) << ","
              << fmt(p->path_loss.alpha) << "," << fmt(pl.p0_db) << "," << fmt(pl.alpha) << "," << fmt(truth.kappa) << ","
              << fmt(truth.mu) << "," << fmt(truth.omega) << "," << fmt(km.params.kappa) << "," << fmt(km.params.mu) << ","
              << fmt(km.params.omega) << "," << fmt(km.aicc) << "," << fmt(ray.aicc) << "," << ranked[0].name << "\n";
        }
    t << "# kappa_mu_preferred " << preferred << " of " << rows << "\n";
    RunResult r;
    r.files.push_back({"fits.csv", t.str()});
    r.summary.push_back("kappa-mu preferred by AICc in " + std::to_string(preferred) + " of " + std::to_string(rows) +
                        " fits");
    return r;
}

inline deploy::DeploySweepConfig deploy_config(const config::FlatConfig& c) {
    deploy::DeploySweepConfig d;
    d.floor_radius_m = c.get_double("deploy.floor_radius_m");
    d.circle_radius_m = c.get_double("deploy.circle_radius_m");
    d.sigma_m = c.get_double("deploy.sigma_m");
    d.distributions.clear();
    for (const auto& s : c.get_list("deploy.distributions"))
        d.distributions.push_back(checked("deploy.distributions", [&] { return deploy::parse_user_distribution(s); }));
    d.betas = c.get_double_list("deploy.betas");
    d.beams = c.get_int_list("deploy.beams");
    d.candidate_counts = c.get_int_list("deploy.candidate_counts");
    d.candidate_limit = static_cast<int>(c.get_int("deploy.candidate_limit"));
    d.availability.snr_threshold_db = c.get_double("deploy.snr_threshold_db");
    d.availability.p_los = c.get_double("deploy.p_los");
    d.availability.ceiling_side_m = c.get_double("deploy.ceiling_side_m");
    d.availability.ceiling_height_m = c.get_double("deploy.ceiling_height_m");
    d.availability.user_height_m = c.get_double("deploy.user_height_m");
    d.solve.node_limit = c.get_int("deploy.node_limit");
    if (d.solve.node_limit < 1) throw ConfigError("config", "key 'deploy.node_limit': must be >= 1");
    if (d.candidate_limit < 1 || d.candidate_limit > 3)
        throw ConfigError("config", "key 'deploy.candidate_limit': must lie in 1..3");
    checked("deploy", [&] {
        d.validate();
        return 0;
    });
    return d;
}

inline RunResult run_deploy_sweep(const config::FlatConfig& c) {
    const auto d = deploy_config(c);
    const bool require = c.get_bool("deploy.require_feasible");
    const auto table = deploy::sweep_required_aps(d);
    RunResult r;
    int planned = 0, proven = 0;
    for (const auto& row : table.rows) {
        planned += row.required_aps >= 0;
        proven += row.status == deploy::SolveStatus::Optimal;
        if (require && row.required_aps < 0)
            throw InfeasibleError("deploy", std::string("no plan for ") + deploy::to_string(row.distribution) +
                                                " users, N = " + std::to_string(row.n_candidates) +
                                                ", B = " + std::to_string(row.beams) + ", beta = " + fmt(row.beta));
    }
    std::ostringstream t;
    deploy::write_deploy_table(t, table, d);
    r.files.push_back({"required_aps.csv", t.str()});
    r.summary.push_back(std::to_string(planned) + " of " + std::to_string(table.rows.size()) + " points have a plan, " +
                        std::to_string(proven) + " proven optimal");
    return r;
}

} // namespace detail

/// Runs an experiment in memory.
inline RunResult compute(const ExperimentSpec& spec) {
    std::vector<std::string> warnings;
    const auto cfg = resolve_config(spec, &warnings);
    RunResult r;
    switch (spec.id) {
    case ExperimentId::FitDemo: r = detail::run_fit_demo(cfg); break;
    case ExperimentId::CcdfValidate: r = detail::run_ccdf_validate(cfg); break;
    case ExperimentId::SweepNTx:
    case ExperimentId::SweepBeamwidth:
    case ExperimentId::SweepServDist:
    case ExperimentId::SweepBlockage: r = detail::run_kpi_sweep(spec.id, cfg); break;
    case ExperimentId::DeploySweep: r = detail::run_deploy_sweep(cfg); break;
    }
    r.resolved = cfg;
    r.warnings = std::move(warnings);
    std::ostringstream m;
    m << "# mmwlab run manifest; rerun with --config manifest.txt\n";
    cfg.write(m);
    r.files.push_back({"manifest.txt", m.str()});
    return r;
}

/// Writes every output file into `dir` (created if needed).
inline void write_outputs(const RunResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cli", "cannot create output directory '" + dir + "': " + ec.message());
    for (const auto& f : r.files) {
        const fs::path path = fs::path(dir) / f.name;
        const fs::path tmp = fs::path(dir) / (f.name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary);
            out << f.content;
            if (!out) throw ConfigError("cli", "cannot write '" + tmp.string() + "'");
        }
        fs::rename(tmp, path, ec);
        if (ec) throw ConfigError("cli", "cannot write '" + path.string() + "': " + ec.message());
    }
}

} // namespace mmwlab::experiments

#endif // MMWLAB_EXPERIMENTS_HPP
