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

#ifndef MMWLAB_MCSIM_HPP
#define MMWLAB_MCSIM_HPP

// Snapshot Monte Carlo of the reference receiver's SINR. Every snapshot
// draws a fresh layout, interferer link states, alignment gains and fading.
//
// Snapshots are generated in fixed-size blocks, block b drawing from the
// stream split_seed(master_seed, b). Workers take whole blocks and write
// into disjoint ranges, so the sample set does not depend on the number of
// workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mmwlab/analytic/kpi.hpp"
#include "mmwlab/analytic/sinr.hpp"
#include "mmwlab/channel/catalog.hpp"
#include "mmwlab/channel/kappa_mu.hpp"
#include "mmwlab/error.hpp"
#include "mmwlab/netgeom.hpp"
#include "mmwlab/rng.hpp"

namespace mmwlab::mcsim {

inline constexpr std::size_t kBlockSize = 8192;

struct NetworkConfig {
    netgeom::Arena arena;
    int n_tx = 12;
    double r0_m = 1.0;
    channel::LinkState serving_state = channel::LinkState::LOS;
    netgeom::Alignment serving_alignment = netgeom::Alignment::MainMain;
    double p_los = 0.5;
    netgeom::ConeBulbAntenna tx = netgeom::ConeBulbAntenna::make(netgeom::deg_to_rad(30.0));
    netgeom::ConeBulbAntenna rx = netgeom::ConeBulbAntenna::make(netgeom::deg_to_rad(30.0));
    netgeom::DirectionModel direction = netgeom::DirectionModel::Spherical;
    analytic::RadioConfig radio;
    channel::ScenarioPair scenario = channel::scenario(channel::Environment::Hallway, channel::UseCase::App);
    std::uint64_t n_snapshots = 100000;
    std::uint64_t master_seed = 1;
    int workers = 1;
    bool deterministic_fading = false;  // every fading power fixed at its mean

    void validate() const {
        arena.validate();
        radio.validate();
        if (n_tx < 1) throw DomainError("mcsim", "n_tx must be >= 1");
        if (!(r0_m >= 0.0 && r0_m <= arena.radius_m + arena.rx_offset_m))
            throw DomainError("mcsim", "serving distance must lie in [0, radius + offset]");
        if (!(p_los >= 0.0 && p_los <= 1.0)) throw DomainError("mcsim", "p_los must lie in [0, 1]");
        if (n_snapshots < 1) throw DomainError("mcsim", "n_snapshots must be >= 1");
        if (workers < 1) throw DomainError("mcsim", "workers must be >= 1");
        scenario.los.path_loss.validate();
        scenario.nlos.path_loss.validate();
        scenario.los.fading.validate();
        scenario.nlos.fading.validate();
    }

    netgeom::AlignmentGainDist interferer_gains() const { return netgeom::interferer_alignment_pmf(tx, rx, direction); }
    double serving_gain() const { return netgeom::alignment_gain(tx, rx, serving_alignment); }

    /// The matching analytic query at threshold zeta (linear).
    analytic::SinrQuery query(double zeta) const {
        analytic::SinrQuery q;
        q.zeta = zeta;
        q.r0_m = r0_m;
        q.g0 = serving_gain();
        q.serving_state = serving_state;
        q.p_los = p_los;
        q.n_tx = n_tx;
        q.scenario = scenario;
        return q;
    }
};

/// Canonical one-line description of every field that affects the samples.
inline std::string describe(const NetworkConfig& c) {
    std::ostringstream s;
    s << std::setprecision(17);
    const auto fading = [&](const channel::ScenarioParams& p) {
        s << p.path_loss.p0_db << "," << p.path_loss.alpha << "," << p.path_loss.d0_m << "," << p.fading.kappa << ","
          << p.fading.mu << "," << p.fading.omega << ";";
    };
    s << "arena=" << c.arena.radius_m << "," << c.arena.tx_height_m << "," << c.arena.rx_height_m << ","
      << c.arena.rx_offset_m << ";n_tx=" << c.n_tx << ";r0=" << c.r0_m << ";state=" << channel::to_string(c.serving_state)
      << ";align=" << netgeom::to_string(c.serving_alignment) << ";p_los=" << c.p_los << ";tx=" << c.tx.beamwidth_rad
      << "," << c.tx.sidelobe_gain << ";rx=" << c.rx.beamwidth_rad << "," << c.rx.sidelobe_gain
      << ";dir=" << (c.direction == netgeom::DirectionModel::Spherical ? "spherical" : "planar")
      << ";radio=" << c.radio.bandwidth_hz << "," << c.radio.tx_power_dbm << "," << c.radio.noise_figure_db << ","
      << c.radio.noise_density_dbm_hz << ";scenario=" << c.scenario.name << ":";
    fading(c.scenario.los);
    fading(c.scenario.nlos);
    s << "n=" << c.n_snapshots << ";seed=" << c.master_seed << ";det=" << c.deterministic_fading;
    return s.str();
}

/// 64-bit FNV-1a of describe(c), hex.
inline std::string fingerprint(const NetworkConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : describe(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct SinrSampleSet {
    std::vector<double> samples;  // linear SINR, in snapshot order
    std::string fingerprint;
    std::uint64_t seed = 0;
    int workers = 1;
};

namespace detail {

class SnapshotKernel {
public:
    explicit SnapshotKernel(const NetworkConfig& c)
        : c_(c),
          inv_tau_(1.0 / c.radio.tau()),
          serving_mean_(c.serving_gain() *
                        channel::path_gain(c.scenario[c.serving_state].path_loss, c.arena.distance_3d(c.r0_m))),
          q_tx_(netgeom::mainlobe_probability(c.tx, c.direction)),
          q_rx_(netgeom::mainlobe_probability(c.rx, c.direction)),
          serving_fading_(c.scenario[c.serving_state].fading),
          los_fading_(c.scenario.los.fading),
          nlos_fading_(c.scenario.nlos.fading) {}

    template <class Engine>
    double operator()(Engine& eng) {
        const auto layout = netgeom::sample_layout(c_.arena, c_.n_tx, c_.r0_m, eng);
        const double h0 = c_.deterministic_fading ? c_.scenario[c_.serving_state].fading.omega : serving_fading_(eng);
        double interference = 0.0;
        for (std::size_t i = 0; i < layout.interferer_xy.size(); ++i) {
            const bool los = unit_(eng) < c_.p_los;
            const bool tx_main = unit_(eng) < q_tx_;
            const bool rx_main = unit_(eng) < q_rx_;
            const double g = (tx_main ? c_.tx.mainlobe_gain : c_.tx.sidelobe_gain) *
                             (rx_main ? c_.rx.mainlobe_gain : c_.rx.sidelobe_gain);
            const auto& p = los ? c_.scenario.los : c_.scenario.nlos;
            const double h = c_.deterministic_fading ? p.fading.omega : (los ? los_fading_(eng) : nlos_fading_(eng));
            const double d = c_.arena.distance_3d(layout.interferer_distance(i));
            interference += g * channel::path_gain(p.path_loss, d) * h;
        }
        return serving_mean_ * h0 / (interference + inv_tau_);
    }

private:
    const NetworkConfig& c_;
    double inv_tau_;
    double serving_mean_;
    double q_tx_, q_rx_;
    channel::KappaMuSampler serving_fading_, los_fading_, nlos_fading_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

} // namespace detail

inline SinrSampleSet run_snapshots(const NetworkConfig& config) {
    config.validate();
    SinrSampleSet out;
    out.samples.resize(config.n_snapshots);
    out.fingerprint = fingerprint(config);
    out.seed = config.master_seed;
    out.workers = config.workers;
    const std::uint64_t blocks = (config.n_snapshots + kBlockSize - 1) / kBlockSize;

    auto run_block = [&](std::uint64_t b) {
        Rng eng(split_seed(config.master_seed, b));
        detail::SnapshotKernel kernel(config);
        const std::uint64_t lo = b * kBlockSize;
        const std::uint64_t hi = std::min<std::uint64_t>(lo + kBlockSize, config.n_snapshots);
        for (std::uint64_t i = lo; i < hi; ++i) out.samples[i] = kernel(eng);
    };

    const int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(config.workers), blocks));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
        return out;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::uint64_t b = static_cast<std::uint64_t>(w); b < blocks; b += static_cast<std::uint64_t>(workers))
                    run_block(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

inline void require_samples(const std::vector<double>& s) {
    if (s.empty()) throw DomainError("mcsim", "empty sample set");
}

/// Fraction of samples strictly above zeta.
inline double estimate_coverage(const std::vector<double>& samples, double zeta) {
    require_samples(samples);
    const auto n = std::count_if(samples.begin(), samples.end(), [zeta](double s) { return s > zeta; });
    return static_cast<double>(n) / static_cast<double>(samples.size());
}

/// Mean of log2(1 + SINR).
inline double estimate_se(const std::vector<double>& samples) {
    require_samples(samples);
    mmwlab::detail::CompensatedSum s;
    for (double x : samples) s.add(std::log2(1.0 + x));
    return s.value() / static_cast<double>(samples.size());
}

/// Interpolated (type 7) beta-quantile of bw log2(1 + SINR).
inline double estimate_edr(const std::vector<double>& samples, double bandwidth_hz, double beta = 0.05) {
    require_samples(samples);
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("mcsim", "beta must lie in (0, 1)");
    std::vector<double> v(samples);
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * beta;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double s = v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
    return bandwidth_hz * std::log2(1.0 + s);
}

enum class SweepAxis { NTx, Beamwidth, ServingDistance, ServingState, PLos };

inline const char* to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::NTx: return "n_tx";
    case SweepAxis::Beamwidth: return "beamwidth_deg";
    case SweepAxis::ServingDistance: return "serving_distance_m";
    case SweepAxis::ServingState: return "serving_state";
    case SweepAxis::PLos: return "p_los";
    }
    return "?";
}

struct KpiRow {
    double axis_value = 0.0;
    double coverage = 0.0;
    double atc = 0.0;  // bit/s/m^2
    double edr = 0.0;  // bit/s
    double se = 0.0;   // bit/s/Hz
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

struct KpiTable {
    SweepAxis axis = SweepAxis::NTx;
    double zeta_db = 10.0;
    int workers = 1;
    std::string scenario;
    std::vector<KpiRow> rows;
};

/// Applies one axis value to a copy of the base configuration. Serving
/// state values are 0 (LOS) and 1 (NLOS); beamwidth is the transmitter's,
/// in degrees.
inline NetworkConfig apply_axis(NetworkConfig c, SweepAxis axis, double value) {
    switch (axis) {
    case SweepAxis::NTx:
        if (value < 1.0 || value != std::floor(value)) throw DomainError("mcsim", "n_tx values must be positive integers");
        c.n_tx = static_cast<int>(value);
        break;
    case SweepAxis::Beamwidth:
        if (!(value > 0.0 && value <= 360.0)) throw DomainError("mcsim", "beamwidth must lie in (0, 360] degrees");
        c.tx = netgeom::ConeBulbAntenna::make(netgeom::deg_to_rad(value), c.tx.sidelobe_gain);
        break;
    case SweepAxis::ServingDistance: c.r0_m = value; break;
    case SweepAxis::ServingState:
        if (value != 0.0 && value != 1.0) throw DomainError("mcsim", "serving_state values must be 0 (LOS) or 1 (NLOS)");
        c.serving_state = value == 0.0 ? channel::LinkState::LOS : channel::LinkState::NLOS;
        break;
    case SweepAxis::PLos: c.p_los = value; break;
    }
    c.validate();
    return c;
}

/// One KPI row per axis value; every row reuses the base seed.
inline KpiTable sweep(const NetworkConfig& base, SweepAxis axis, const std::vector<double>& values,
                      double zeta_db = 10.0, double beta = 0.05) {
    if (values.empty()) throw DomainError("mcsim", "sweep needs at least one axis value");
    KpiTable t;
    t.axis = axis;
    t.zeta_db = zeta_db;
    t.workers = base.workers;
    t.scenario = base.scenario.name;
    for (double v : values) {
        const auto c = apply_axis(base, axis, v);
        const auto s = run_snapshots(c);
        KpiRow r;
        r.axis_value = v;
        r.coverage = estimate_coverage(s.samples, netgeom::db_to_linear(zeta_db));
        r.se = estimate_se(s.samples);
        r.atc = analytic::area_traffic_capacity(r.se, c.n_tx, c.arena, c.radio.bandwidth_hz);
        r.edr = estimate_edr(s.samples, c.radio.bandwidth_hz, beta);
        r.samples = s.samples.size();
        r.seed = s.seed;
        t.rows.push_back(r);
    }
    return t;
}

/// Comma-separated table preceded by '#' metadata lines.
inline void write_kpi_table(std::ostream& os, const KpiTable& t) {
    std::ostringstream s;
    s << std::setprecision(10);
    s << "# scenario " << t.scenario << "\n# coverage_threshold_db " << t.zeta_db << "\n# workers " << t.workers << "\n";
    s << to_string(t.axis) << ",coverage,atc_bit_s_m2,edr_bit_s,samples,seed\n";
    for (const auto& r : t.rows)
        s << r.axis_value << "," << r.coverage << "," << r.atc << "," << r.edr << "," << r.samples << "," << r.seed << "\n";
    os << s.str();
}

} // namespace mmwlab::mcsim

#endif // MMWLAB_MCSIM_HPP
