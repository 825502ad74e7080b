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

#ifndef MMWLAB_NETGEOM_HPP
#define MMWLAB_NETGEOM_HPP

// Disk arena with a binomial point process of ceiling transmitters, the
// cone-bulb antenna model and the random alignment gain of an interferer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mmwlab/error.hpp"
#include "mmwlab/rng.hpp"

namespace mmwlab::netgeom {

inline constexpr double kPi = 3.14159265358979323846;

struct Arena {
    double radius_m = 12.0;
    double tx_height_m = 3.0;
    double rx_height_m = 1.5;
    double rx_offset_m = 0.0;  // horizontal distance of the receiver from the center

    void validate() const {
        if (!(radius_m > 0.0)) throw DomainError("netgeom", "arena radius must be > 0");
        if (!(rx_offset_m >= 0.0 && rx_offset_m <= radius_m))
            throw DomainError("netgeom", "receiver offset must lie in [0, radius]");
        if (!(rx_height_m >= 0.0 && tx_height_m > rx_height_m))
            throw DomainError("netgeom", "heights must satisfy tx_height > rx_height >= 0");
    }

    double height_gap_m() const { return tx_height_m - rx_height_m; }
    double eta() const { return height_gap_m() * height_gap_m(); }
    double area_m2() const { return kPi * radius_m * radius_m; }
    double distance_3d(double horizontal_m) const { return std::sqrt(horizontal_m * horizontal_m + eta()); }
};

/// Fraction of the sphere inside a cone of full apex angle w: (1 - cos(w/2)) / 2.
inline double cone_fraction(double beamwidth_rad) { return 0.5 * (1.0 - std::cos(0.5 * beamwidth_rad)); }

/// Mainlobe gain that conserves radiated power over the sphere:
/// G q + g (1 - q) = 1 with q the cone fraction.
inline double mainlobe_gain(double beamwidth_rad, double sidelobe_gain) {
    if (!(beamwidth_rad > 0.0 && beamwidth_rad <= 2.0 * kPi))
        throw DomainError("netgeom", "beamwidth must lie in (0, 2 pi]");
    if (!(sidelobe_gain > 0.0 && sidelobe_gain < 1.0))
        throw DomainError("netgeom", "sidelobe gain must lie in (0, 1)");
    const double q = cone_fraction(beamwidth_rad);
    const double g = (1.0 - sidelobe_gain * (1.0 - q)) / q;
    if (!(g > sidelobe_gain)) throw DomainError("netgeom", "mainlobe gain does not exceed sidelobe gain");
    return g;
}

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct ConeBulbAntenna {
    double beamwidth_rad = deg_to_rad(30.0);
    double sidelobe_gain = db_to_linear(-25.0);
    double mainlobe_gain = netgeom::mainlobe_gain(deg_to_rad(30.0), db_to_linear(-25.0));

    static ConeBulbAntenna make(double beamwidth_rad, double sidelobe_gain = db_to_linear(-25.0)) {
        return {beamwidth_rad, sidelobe_gain, netgeom::mainlobe_gain(beamwidth_rad, sidelobe_gain)};
    }
};

/// How an interferer's random boresight is modeled.
enum class DirectionModel {
    Spherical,  // mainlobe hit probability = solid-angle fraction of the cone
    Planar      // mainlobe hit probability = beamwidth / (2 pi)
};

inline double mainlobe_probability(const ConeBulbAntenna& a, DirectionModel m) {
    return m == DirectionModel::Spherical ? cone_fraction(a.beamwidth_rad) : a.beamwidth_rad / (2.0 * kPi);
}

enum class Alignment { MainMain = 0, MainSide = 1, SideMain = 2, SideSide = 3 };

inline double alignment_gain(const ConeBulbAntenna& tx, const ConeBulbAntenna& rx, Alignment a) {
    switch (a) {
    case Alignment::MainMain: return tx.mainlobe_gain * rx.mainlobe_gain;
    case Alignment::MainSide: return tx.mainlobe_gain * rx.sidelobe_gain;
    case Alignment::SideMain: return tx.sidelobe_gain * rx.mainlobe_gain;
    case Alignment::SideSide: return tx.sidelobe_gain * rx.sidelobe_gain;
    }
    return 0.0;
}

inline Alignment parse_alignment(const std::string& s) {
    if (s == "main-main") return Alignment::MainMain;
    if (s == "main-side") return Alignment::MainSide;
    if (s == "side-main") return Alignment::SideMain;
    if (s == "side-side") return Alignment::SideSide;
    throw DomainError("netgeom", "unknown alignment '" + s + "'");
}

inline const char* to_string(Alignment a) {
    switch (a) {
    case Alignment::MainMain: return "main-main";
    case Alignment::MainSide: return "main-side";
    case Alignment::SideMain: return "side-main";
    case Alignment::SideSide: return "side-side";
    }
    return "?";
}

/// Gain of an interfering link: four levels (tx lobe x rx lobe), indexed
/// like Alignment.
struct AlignmentGainDist {
    std::array<double, 4> gains{};
    std::array<double, 4> probs{};

    /// Distinct support points with positive mass, ascending by gain.
    std::vector<std::pair<double, double>> compact() const {
        std::vector<std::pair<double, double>> out;
        for (int i = 0; i < 4; ++i) {
            if (probs[i] <= 0.0) continue;
            bool merged = false;
            for (auto& [g, p] : out)
                if (g == gains[i]) {
                    p += probs[i];
                    merged = true;
                }
            if (!merged) out.emplace_back(gains[i], probs[i]);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    double mean() const {
        double m = 0.0;
        for (int i = 0; i < 4; ++i) m += gains[i] * probs[i];
        return m;
    }
};

/// Independent events: the interferer's mainlobe points at the receiver and
/// the receiver's mainlobe (fixed on its server) covers the interferer.
inline AlignmentGainDist interferer_alignment_pmf(const ConeBulbAntenna& tx, const ConeBulbAntenna& rx,
                                                  DirectionModel model = DirectionModel::Spherical) {
    const double qt = mainlobe_probability(tx, model);
    const double qr = mainlobe_probability(rx, model);
    AlignmentGainDist d;
    for (int i = 0; i < 4; ++i) d.gains[i] = alignment_gain(tx, rx, static_cast<Alignment>(i));
    d.probs = {qt * qr, qt * (1.0 - qr), (1.0 - qt) * qr, (1.0 - qt) * (1.0 - qr)};
    return d;
}

using Point = std::array<double, 2>;

struct NodeLayout {
    Point receiver_xy{};
    Point serving_xy{};
    std::vector<Point> interferer_xy;
    std::uint64_t seed = 0;

    static double horizontal(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }
    double serving_distance() const { return horizontal(receiver_xy, serving_xy); }
    double interferer_distance(std::size_t i) const { return horizontal(receiver_xy, interferer_xy.at(i)); }
};

/// Uniform point in the disk of radius rho (polar inverse CDF).
template <class Engine>
Point uniform_in_disk(double rho, Engine& eng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = rho * std::sqrt(u(eng));
    const double th = 2.0 * kPi * u(eng);
    return {r * std::cos(th), r * std::sin(th)};
}

/// Receiver at (offset, 0); the server at horizontal distance r0 in a
/// uniformly random direction among those that keep it inside the disk;
/// n_tx - 1 interferers uniform on the disk.
template <class Engine>
NodeLayout sample_layout(const Arena& arena, int n_tx, double r0, Engine& eng) {
    arena.validate();
    if (n_tx < 1) throw DomainError("netgeom", "n_tx must be >= 1");
    if (!(r0 >= 0.0)) throw DomainError("netgeom", "serving distance must be >= 0");
    const double rho = arena.radius_m, off = arena.rx_offset_m;
    if (r0 > rho + off) throw DomainError("netgeom", "serving distance exceeds radius + receiver offset");
    NodeLayout L;
    L.receiver_xy = {off, 0.0};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double lo = 0.0, hi = 2.0 * kPi;
    if (off > 0.0 && r0 > 0.0) {
        const double c = (rho * rho - off * off - r0 * r0) / (2.0 * off * r0);
        if (c < 1.0) {
            const double a = std::acos(std::max(-1.0, c));
            lo = a;
            hi = 2.0 * kPi - a;
        }
    }
    const double phi = lo + (hi - lo) * u(eng);
    L.serving_xy = {off + r0 * std::cos(phi), r0 * std::sin(phi)};
    L.interferer_xy.reserve(static_cast<std::size_t>(n_tx - 1));
    for (int i = 1; i < n_tx; ++i) L.interferer_xy.push_back(uniform_in_disk(rho, eng));
    return L;
}

inline NodeLayout sample_layout(const Arena& arena, int n_tx, double r0, std::uint64_t seed) {
    Rng eng(seed);
    NodeLayout L = sample_layout(arena, n_tx, r0, eng);
    L.seed = seed;
    return L;
}

/// Density of the horizontal distance from the receiver to a uniform point
/// of the disk.
inline double distance_pdf(const Arena& arena, double r) {
    const double rho = arena.radius_m, off = arena.rx_offset_m;
    if (!(r >= 0.0 && r <= rho + off)) throw DomainError("netgeom", "distance_pdf: r outside [0, radius + offset]");
    if (r <= rho - off) return 2.0 * r / (rho * rho);
    const double c = (r * r + off * off - rho * rho) / (2.0 * off * r);
    return 2.0 * r / (kPi * rho * rho) * std::acos(std::clamp(c, -1.0, 1.0));
}

/// Horizontal distance at which the density changes branch (radius - offset).
inline double distance_pdf_kink(const Arena& arena) { return arena.radius_m - arena.rx_offset_m; }

/// Plain-text dump of a layout, one node per line: role x_m y_m.
inline void write_layout(std::ostream& os, const NodeLayout& L) {
    std::ostringstream ss;
    ss << std::setprecision(17);
    ss << "# seed " << L.seed << "\n";
    ss << "role x_m y_m\n";
    ss << "receiver " << L.receiver_xy[0] << " " << L.receiver_xy[1] << "\n";
    ss << "serving " << L.serving_xy[0] << " " << L.serving_xy[1] << "\n";
    for (const auto& p : L.interferer_xy) ss << "interferer " << p[0] << " " << p[1] << "\n";
    os << ss.str();
}

} // namespace mmwlab::netgeom

#endif // MMWLAB_NETGEOM_HPP
