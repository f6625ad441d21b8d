// SPDX-License-Identifier: Apache-2.0
//
// thzsim - short-range 300 GHz channel and human-shadowing simulation toolkit
// Copyright (C) 2026 The thzsim Authors
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

// Quasi-deterministic channel impulse response: direct and single-bounce
// specular paths from the preset geometry, plus random clusters expanded
// into intra-cluster subpaths. Azimuth-only angles.

#ifndef THZSIM_QD_CHANNEL_HPP
#define THZSIM_QD_CHANNEL_HPP

#include "thzsim/geometry.hpp"
#include "thzsim/presets.hpp"
#include "thzsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace thz
{
    enum class MpcKind
    {
        direct,
        specular,
        random_subpath
    };

    inline const char *to_string(MpcKind k)
    {
        switch (k)
        {
        case MpcKind::direct:
            return "direct";
        case MpcKind::specular:
            return "specular";
        case MpcKind::random_subpath:
            return "random_subpath";
        }
        return "?";
    }

    inline MpcKind mpc_kind_from_string(const std::string &s)
    {
        if (s == "direct")
            return MpcKind::direct;
        if (s == "specular")
            return MpcKind::specular;
        if (s == "random_subpath")
            return MpcKind::random_subpath;
        throw std::invalid_argument("Unknown MPC kind '" + s + "'.");
    }

    struct Mpc
    {
        double delay_ns = 0.0;
        double aod_rad = 0.0;
        double aoa_rad = 0.0;
        std::complex<double> amplitude; // linear voltage gain, isotropic antennas
        MpcKind kind = MpcKind::direct;
        std::vector<Point3> interaction_points;
        int cluster_id = 0; // 0 = direct, then speculars, then random clusters
    };

    struct ClusterDescriptor
    {
        int id = 0;
        double excess_delay_ns = 0.0; // vs the direct path
        double aod_rad = 0.0;
        double aoa_rad = 0.0;
        double power_db = 0.0; // vs the direct path
    };

    struct Cir
    {
        std::vector<Mpc> mpcs;
        std::vector<ClusterDescriptor> clusters; // random clusters only
        Point3 tx, rx;
        std::string preset_name;
        std::uint64_t rng_seed = 0;
        double carrier_hz = 300e9;
        double power_floor_db = -30.0;

        const Mpc *direct() const
        {
            for (const auto &m : mpcs)
                if (m.kind == MpcKind::direct)
                    return &m;
            return nullptr;
        }
    };

    /// Free-space amplitude lambda / (4 pi d).
    inline double fspl_amplitude(double d_m, double f_hz) { return speed_of_light / f_hz / (4.0 * pi * d_m); }

    /// Free-space path loss 20 log10(4 pi d / lambda) in dB.
    inline double fspl_db(double d_m, double f_hz) { return -20.0 * std::log10(fspl_amplitude(d_m, f_hz)); }

    namespace detail
    {
        inline std::complex<double> path_phasor(double length_m, double f_hz)
        {
            const double k = two_pi * f_hz / speed_of_light;
            // reduce before the trig call; k L is ~1e4 rad at 300 GHz
            double ph = std::fmod(k * length_m, two_pi);
            return {std::cos(ph), -std::sin(ph)};
        }

        inline void check_link(const EnvironmentPreset &preset, const Point3 &tx, const Point3 &rx)
        {
            require_finite(tx, "Tx position");
            require_finite(rx, "Rx position");
            if (!(distance(tx, rx) > 0.0))
                throw std::invalid_argument("Tx and Rx coincide.");
            if (!inside_bounds(preset, tx) || !inside_bounds(preset, rx))
                throw std::invalid_argument("Tx or Rx lies outside the bounds of preset '" + preset.name + "'.");
        }

        // Specular point on reflector r, if the single-bounce path exists.
        // Points within edge_tol of the rectangle boundary count as grazing
        // the edge and are excluded.
        inline bool specular_point(const Reflector &r, const Point3 &tx, const Point3 &rx, Point3 &q, double edge_tol = 1e-9)
        {
            double dt = signed_distance(tx, r.plane), dr = signed_distance(rx, r.plane);
            if (!(dt > 0.0) || !(dr > 0.0))
                return false;
            Point3 img = mirror_point(tx, r.plane);
            double t = segment_plane_crossing(img, rx, r.plane);
            q = lerp(img, rx, t);
            Point3 off = q - r.plane.origin;
            double a = std::abs(dot(off, r.axis_u)), b = std::abs(dot(off, r.axis_v()));
            return a < r.half_u - edge_tol && b < r.half_v - edge_tol;
        }
    } // namespace detail

    inline Mpc direct_mpc(const Point3 &tx, const Point3 &rx, double f_hz)
    {
        double d = distance(tx, rx);
        Mpc m;
        m.kind = MpcKind::direct;
        m.delay_ns = d / speed_of_light * 1e9;
        m.aod_rad = azimuth(rx - tx);
        m.aoa_rad = azimuth(tx - rx);
        m.amplitude = fspl_amplitude(d, f_hz) * detail::path_phasor(d, f_hz);
        m.cluster_id = 0;
        return m;
    }

    /// Direct path plus one single-bounce specular path per reflector whose
    /// image-method reflection point lies strictly inside its extent.
    inline std::vector<Mpc> generate_deterministic_mpcs(const EnvironmentPreset &preset, const Point3 &tx, const Point3 &rx)
    {
        detail::check_link(preset, tx, rx);
        const double f = preset.carrier_hz;
        std::vector<Mpc> out{direct_mpc(tx, rx, f)};
        for (const auto &r : preset.reflectors)
        {
            Point3 q;
            if (!detail::specular_point(r, tx, rx, q))
                continue;
            double len = distance(tx, q) + distance(q, rx);
            Mpc m;
            m.kind = MpcKind::specular;
            m.delay_ns = len / speed_of_light * 1e9;
            m.aod_rad = azimuth(q - tx);
            m.aoa_rad = azimuth(q - rx);
            // sign flip on reflection, loss applied to the amplitude
            m.amplitude = -fspl_amplitude(len, f) * std::pow(10.0, -r.loss_db / 20.0) * detail::path_phasor(len, f);
            m.interaction_points = {q};
            m.cluster_id = int(out.size());
            out.push_back(m);
        }
        return out;
    }

    /// Poisson mean whose count clipped to >= 1 has expectation `target`
    /// (solves lambda + exp(-lambda) = target). Targets <= 1 give 0.
    inline double clipped_poisson_mean(double target)
    {
        if (target <= 1.0)
            return 0.0;
        double lam = target;
        for (int it = 0; it < 100; ++it)
        {
            double g = lam + std::exp(-lam) - target;
            double dg = 1.0 - std::exp(-lam);
            double step = g / dg;
            lam -= step;
            if (std::abs(step) < 1e-14 * std::max(1.0, lam))
                break;
        }
        return lam;
    }

    /// Upper bound on a random cluster's relative power: free-space loss over
    /// the unfolded path (no interaction loss), in dB vs the direct path.
    inline double cluster_power_bound_db(double los_dist_m, double excess_delay_ns)
    {
        double extra = speed_of_light * excess_delay_ns * 1e-9;
        return 20.0 * std::log10(los_dist_m / (los_dist_m + extra));
    }

    /// Draws the random clusters for one link. The count is Poisson clipped
    /// to at least one, with its mean reduced by the number of deterministic
    /// paths so that the total matches the preset mean. Delays are
    /// exponential (capped); powers follow the power-delay line with
    /// lognormal jitter, truncated to [floor, free-space bound].
    inline std::vector<ClusterDescriptor> sample_random_clusters(const EnvironmentPreset &preset, const Point3 &tx,
                                                                 const Point3 &rx, std::uint64_t seed)
    {
        validate_preset(preset);
        auto det = generate_deterministic_mpcs(preset, tx, rx);
        const int first_id = int(det.size());
        const double lam = clipped_poisson_mean(preset.mean_cluster_count - double(det.size()));
        const double d = distance(tx, rx);

        Rng rng = make_rng(seed, tx, rx, "clusters");
        int count = 1;
        if (lam > 0.0)
            count = std::max(1, std::poisson_distribution<int>(lam)(rng));

        std::exponential_distribution<double> delay_dist(1.0 / preset.excess_delay_scale_ns);
        std::normal_distribution<double> jitter(0.0, preset.shadow_sigma_db);
        std::vector<ClusterDescriptor> out;
        out.reserve(std::size_t(count));
        constexpr int max_tries = 100000;
        for (int c = 0; c < count; ++c)
        {
            ClusterDescriptor cd;
            cd.id = first_id + c;
            int tries = 0;
            while (true)
            {
                if (++tries > max_tries)
                    throw std::runtime_error("Preset '" + preset.name +
                                             "': cluster power distribution has no mass between floor and bound.");
                double tau = delay_dist(rng);
                double p = preset.cluster_power_offset_db - preset.cluster_power_decay_db_per_ns * tau + jitter(rng);
                if (tau > preset.max_excess_delay_ns || p <= preset.cluster_power_floor_db ||
                    p > cluster_power_bound_db(d, tau))
                    continue;
                cd.excess_delay_ns = tau;
                cd.power_db = p;
                break;
            }
            cd.aod_rad = wrap_angle(uniform(rng, -pi, pi));
            cd.aoa_rad = wrap_angle(uniform(rng, -pi, pi));
            out.push_back(cd);
        }
        return out;
    }

    /// Expands a cluster into subpaths. `los_delay_ns` and `los_power` anchor
    /// the cluster's absolute delay and power.
    inline std::vector<Mpc> expand_intra_cluster(const ClusterDescriptor &cluster, const EnvironmentPreset &preset,
                                                 double los_delay_ns, double los_power, Rng &rng)
    {
        const auto &ic = preset.intra;
        if (ic.subpath_count < 1)
            throw std::invalid_argument("subpath_count must be at least 1.");
        const double cluster_power = los_power * std::pow(10.0, cluster.power_db / 10.0);
        const double base_delay = los_delay_ns + cluster.excess_delay_ns;

        std::vector<Mpc> out(std::size_t(ic.subpath_count));
        if (ic.subpath_count == 1)
        {
            Mpc &m = out[0];
            m.kind = MpcKind::random_subpath;
            m.delay_ns = base_delay;
            m.aod_rad = cluster.aod_rad;
            m.aoa_rad = cluster.aoa_rad;
            m.amplitude = std::polar(std::sqrt(cluster_power), uniform(rng, -pi, pi));
            m.cluster_id = cluster.id;
            return out;
        }

        const double b = ic.angle_spread_deg * pi / 180.0 / std::sqrt(2.0);
        std::vector<double> w(out.size());
        double wsum = 0.0;
        for (std::size_t k = 0; k < out.size(); ++k)
        {
            double dly = ic.delay_spread_ns > 0.0
                             ? std::exponential_distribution<double>(1.0 / ic.delay_spread_ns)(rng)
                             : 0.0;
            Mpc &m = out[k];
            m.kind = MpcKind::random_subpath;
            m.delay_ns = base_delay + dly;
            m.aod_rad = wrap_angle(cluster.aod_rad + laplace(rng, b));
            m.aoa_rad = wrap_angle(cluster.aoa_rad + laplace(rng, b));
            m.cluster_id = cluster.id;
            w[k] = ic.delay_spread_ns > 0.0 ? std::exp(-dly / ic.delay_spread_ns) : 1.0;
            wsum += w[k];
        }
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k].amplitude = std::polar(std::sqrt(cluster_power * w[k] / wsum), uniform(rng, -pi, pi));
        return out;
    }

    /// Full channel: deterministic paths followed by the expanded random
    /// clusters. Bit-identical for identical (preset, tx, rx, seed).
    inline Cir synthesize_cir(const EnvironmentPreset &preset, const Point3 &tx, const Point3 &rx, std::uint64_t seed)
    {
        Cir cir;
        cir.tx = tx;
        cir.rx = rx;
        cir.preset_name = preset.name;
        cir.rng_seed = seed;
        cir.carrier_hz = preset.carrier_hz;
        cir.power_floor_db = preset.cluster_power_floor_db;
        cir.mpcs = generate_deterministic_mpcs(preset, tx, rx);
        cir.clusters = sample_random_clusters(preset, tx, rx, seed);

        const double los_delay = cir.mpcs.front().delay_ns;
        const double los_power = std::norm(cir.mpcs.front().amplitude);
        Rng rng = make_rng(seed, tx, rx, "intra");
        for (const auto &c : cir.clusters)
        {
            auto sub = expand_intra_cluster(c, preset, los_delay, los_power, rng);
            cir.mpcs.insert(cir.mpcs.end(), sub.begin(), sub.end());
        }
        return cir;
    }

    /// Rx drawn uniformly from the preset's placement box.
    inline Point3 sample_rx(const EnvironmentPreset &preset, std::uint64_t seed)
    {
        Rng rng = make_rng(seed, "placement");
        const auto &pl = preset.placement;
        auto draw = [&](double lo, double hi) { return hi > lo ? uniform(rng, lo, hi) : lo; };
        double x = draw(pl.rx_min.x, pl.rx_max.x);
        double y = draw(pl.rx_min.y, pl.rx_max.y);
        double z = draw(pl.rx_min.z, pl.rx_max.z);
        return {x, y, z};
    }

    /// Channel for the seed's documented placement.
    inline Cir synthesize_cir(const EnvironmentPreset &preset, std::uint64_t seed)
    {
        return synthesize_cir(preset, preset.placement.tx, sample_rx(preset, seed), seed);
    }

} // namespace thz

#endif
