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

// Multi-beam MIMO channel matrices, capacity, and passive reflecting
// surfaces (PRS) that remove the interaction loss of selected clusters.

#ifndef THZSIM_MIMO_HPP
#define THZSIM_MIMO_HPP

#include "thzsim/qd_channel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace thz
{
    struct BeamSet
    {
        std::vector<double> pointing_rad;
        double hpbw_deg = 8.7;
        double peak_gain_dbi = 26.0;

        std::size_t count() const { return pointing_rad.size(); }
    };

    struct MimoChannel
    {
        Eigen::MatrixXcd entries;        // rx beams x tx beams
        double reference_amplitude = 1.; // FSPL amplitude at the Tx-Rx distance
    };

    /// Amplitude pattern of the Gaussian main lobe. The power pattern is
    /// exp(-ln2 (2 dphi / hpbw)^2), so the amplitude is its square root and
    /// equals 1/sqrt(2) at dphi = hpbw / 2.
    inline double beam_amplitude(double dphi_rad, double hpbw_deg)
    {
        if (!(hpbw_deg > 0.0))
            throw std::invalid_argument("Beamwidth must be positive.");
        const double x = 2.0 * wrap_angle(dphi_rad) / (hpbw_deg * pi / 180.0);
        return std::exp(-0.5 * std::log(2.0) * x * x);
    }

    /// H[i][j] = sum_l gamma_l g_T(phi_T,l - tx_j) g_R(phi_R,l - rx_i), divided by
    /// the free-space amplitude at the Tx-Rx distance. A direct-only channel
    /// with both beams on boresight has |H| = 1.
    inline MimoChannel build_channel_matrix(const Cir &cir, const BeamSet &tx_beams, const BeamSet &rx_beams)
    {
        if (cir.mpcs.empty())
            throw std::invalid_argument("Cannot build a channel matrix from an empty CIR.");
        if (tx_beams.count() == 0 || rx_beams.count() == 0)
            throw std::invalid_argument("Beam sets must not be empty.");
        MimoChannel h;
        h.reference_amplitude = fspl_amplitude(distance(cir.tx, cir.rx), cir.carrier_hz);
        h.entries = Eigen::MatrixXcd::Zero(Eigen::Index(rx_beams.count()), Eigen::Index(tx_beams.count()));
        for (const auto &m : cir.mpcs)
            for (std::size_t j = 0; j < tx_beams.count(); ++j)
            {
                double gt = beam_amplitude(m.aod_rad - tx_beams.pointing_rad[j], tx_beams.hpbw_deg);
                for (std::size_t i = 0; i < rx_beams.count(); ++i)
                {
                    double gr = beam_amplitude(m.aoa_rad - rx_beams.pointing_rad[i], rx_beams.hpbw_deg);
                    h.entries(Eigen::Index(i), Eigen::Index(j)) += m.amplitude * (gt * gr);
                }
            }
        h.entries /= h.reference_amplitude;
        if (!h.entries.allFinite())
            throw std::runtime_error("Channel matrix has non-finite entries.");
        return h;
    }

    namespace detail
    {
        inline Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXcd &h)
        {
            if (!h.allFinite())
                throw std::invalid_argument("Channel matrix has non-finite entries.");
            Eigen::MatrixXcd g = h * h.adjoint();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
            return es.eigenvalues().cwiseMax(0.0);
        }
    } // namespace detail

    /// log2 det(I + rho / N_t H H^H), equal power per transmit beam.
    inline double capacity_bps_hz(const Eigen::MatrixXcd &h, double snr_db)
    {
        if (!std::isfinite(snr_db))
            throw std::invalid_argument("SNR must be finite.");
        if (h.size() == 0)
            return 0.0;
        const double rho = std::pow(10.0, snr_db / 10.0) / double(h.cols());
        double c = 0.0;
        for (double l : detail::gram_eigenvalues(h))
            c += std::log2(1.0 + rho * l);
        return c;
    }

    inline double capacity_bps_hz(const MimoChannel &h, double snr_db) { return capacity_bps_hz(h.entries, snr_db); }

    /// Capacity with water-filling over the eigenmodes (total power rho).
    inline double capacity_waterfilling_bps_hz(const Eigen::MatrixXcd &h, double snr_db)
    {
        if (!std::isfinite(snr_db))
            throw std::invalid_argument("SNR must be finite.");
        if (h.size() == 0)
            return 0.0;
        const double rho = std::pow(10.0, snr_db / 10.0);
        Eigen::VectorXd ev = detail::gram_eigenvalues(h);
        std::vector<double> g;
        for (double l : ev)
            if (l > 1e-15)
                g.push_back(l);
        std::sort(g.begin(), g.end(), std::greater<>());
        // drop the weakest modes until every remaining power is positive
        for (std::size_t m = g.size(); m > 0; --m)
        {
            double inv = 0.0;
            for (std::size_t k = 0; k < m; ++k)
                inv += 1.0 / g[k];
            double mu = (rho + inv) / double(m);
            if (mu - 1.0 / g[m - 1] <= 0.0)
                continue;
            double c = 0.0;
            for (std::size_t k = 0; k < m; ++k)
                c += std::log2(mu * g[k]);
            return c;
        }
        return 0.0;
    }

    /// Strongest clusters with at least one beamwidth of separation at both
    /// ends, in decreasing power order.
    struct BeamPair
    {
        BeamSet tx;
        BeamSet rx;
        std::vector<int> cluster_ids;
    };

    inline BeamPair select_beams(const Cir &cir, std::size_t max_beams = 4, double hpbw_deg = 8.7)
    {
        struct Cand
        {
            int id;
            double power, aod, aoa;
        };
        std::map<int, Cand> by_id;
        std::map<int, double> strongest;
        for (const auto &m : cir.mpcs)
        {
            auto &c = by_id.try_emplace(m.cluster_id, Cand{m.cluster_id, 0.0, m.aod_rad, m.aoa_rad}).first->second;
            double p = std::norm(m.amplitude);
            c.power += p;
            if (p > strongest[m.cluster_id])
            {
                strongest[m.cluster_id] = p;
                c.aod = m.aod_rad;
                c.aoa = m.aoa_rad;
            }
        }
        // random clusters point at the cluster center
        for (const auto &cd : cir.clusters)
            if (auto it = by_id.find(cd.id); it != by_id.end())
            {
                it->second.aod = cd.aod_rad;
                it->second.aoa = cd.aoa_rad;
            }
        std::vector<Cand> cands;
        for (const auto &[id, c] : by_id)
            cands.push_back(c);
        std::stable_sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) { return a.power > b.power; });

        const double sep = hpbw_deg * pi / 180.0;
        BeamPair bp;
        bp.tx.hpbw_deg = bp.rx.hpbw_deg = hpbw_deg;
        for (const auto &c : cands)
        {
            if (bp.cluster_ids.size() >= max_beams)
                break;
            bool ok = true;
            for (std::size_t k = 0; k < bp.cluster_ids.size() && ok; ++k)
                ok = std::abs(wrap_angle(c.aod - bp.tx.pointing_rad[k])) >= sep &&
                     std::abs(wrap_angle(c.aoa - bp.rx.pointing_rad[k])) >= sep;
            if (!ok)
                continue;
            bp.tx.pointing_rad.push_back(c.aod);
            bp.rx.pointing_rad.push_back(c.aoa);
            bp.cluster_ids.push_back(c.id);
        }
        return bp;
    }

    /// Ids of every non-direct cluster present in the CIR.
    inline std::vector<int> interaction_clusters(const Cir &cir)
    {
        std::set<int> ids;
        for (const auto &m : cir.mpcs)
            if (m.kind != MpcKind::direct)
                ids.insert(m.cluster_id);
        return {ids.begin(), ids.end()};
    }

    /// Copy of `cir` with the interaction loss of the selected clusters
    /// removed: specular amplitudes are raised to the free-space value over
    /// their unfolded path; a random cluster is scaled uniformly so its power
    /// equals the free-space value over the cluster delay. Phases are kept and
    /// no amplitude is ever reduced.
    inline Cir apply_prs(const Cir &cir, const std::vector<int> &targets)
    {
        const Mpc *d = cir.direct();
        std::set<int> present;
        for (const auto &m : cir.mpcs)
            present.insert(m.cluster_id);
        for (int id : targets)
        {
            if (d && id == d->cluster_id)
                throw std::invalid_argument("PRS cannot be applied to the direct path.");
            if (!present.count(id))
                throw std::invalid_argument("PRS target cluster " + std::to_string(id) + " does not exist.");
        }
        Cir out = cir;
        const std::set<int> sel(targets.begin(), targets.end());
        const double f = cir.carrier_hz;

        std::map<int, double> cluster_power;
        for (const auto &m : cir.mpcs)
            if (m.kind == MpcKind::random_subpath && sel.count(m.cluster_id))
                cluster_power[m.cluster_id] += std::norm(m.amplitude);
        std::map<int, double> cluster_scale;
        const double los_delay = d ? d->delay_ns : distance(cir.tx, cir.rx) / speed_of_light * 1e9;
        for (const auto &cd : cir.clusters)
            if (auto it = cluster_power.find(cd.id); it != cluster_power.end())
            {
                double len = (los_delay + cd.excess_delay_ns) * 1e-9 * speed_of_light;
                double target = std::pow(fspl_amplitude(len, f), 2);
                cluster_scale[cd.id] = std::max(1.0, std::sqrt(target / it->second));
            }

        for (auto &m : out.mpcs)
        {
            if (!sel.count(m.cluster_id))
                continue;
            if (m.kind == MpcKind::specular)
            {
                double len = m.delay_ns * 1e-9 * speed_of_light;
                double target = fspl_amplitude(len, f);
                double a = std::abs(m.amplitude);
                if (a < target)
                    m.amplitude *= target / a;
            }
            else if (m.kind == MpcKind::random_subpath)
            {
                auto it = cluster_scale.find(m.cluster_id);
                if (it == cluster_scale.end())
                    throw std::invalid_argument("Random cluster " + std::to_string(m.cluster_id) +
                                                " has no descriptor in the CIR.");
                m.amplitude *= it->second;
            }
        }
        for (auto &cd : out.clusters)
            if (auto it = cluster_scale.find(cd.id); it != cluster_scale.end())
                cd.power_db += 20.0 * std::log10(it->second);
        return out;
    }

    /// Number of clusters whose relative power is at least `threshold_db`
    /// (LoS included).
    inline int significant_cluster_count(const Cir &cir, double threshold_db)
    {
        std::map<int, double> power;
        for (const auto &m : cir.mpcs)
            power[m.cluster_id] += std::norm(m.amplitude);
        const Mpc *d = cir.direct();
        double ref = d ? power[d->cluster_id] : 0.0;
        if (!d)
            for (const auto &[id, p] : power)
                ref = std::max(ref, p);
        int n = 0;
        for (const auto &[id, p] : power)
            n += 10.0 * std::log10(p / ref) >= threshold_db ? 1 : 0;
        return n;
    }

    struct CapacityRow
    {
        std::uint64_t seed = 0;
        double snr_db = 20.0;
        bool prs_on = false;
        double bps_hz = 0.0;
        int beams = 0;
    };

    struct CapacityOptions
    {
        double snr_db = 20.0;
        std::size_t max_beams = 4;
        double hpbw_deg = 8.7;
        bool water_filling = false;
    };

    /// Capacity of one placement without and with PRS on every interaction
    /// cluster. The beams are chosen on the channel without PRS and reused.
    inline std::pair<CapacityRow, CapacityRow> capacity_pair(const EnvironmentPreset &preset, std::uint64_t seed,
                                                             const CapacityOptions &opt = {})
    {
        Cir cir = synthesize_cir(preset, seed);
        BeamPair bp = select_beams(cir, opt.max_beams, opt.hpbw_deg);
        Cir prs = apply_prs(cir, interaction_clusters(cir));
        auto cap = [&](const Cir &c) {
            auto h = build_channel_matrix(c, bp.tx, bp.rx);
            return opt.water_filling ? capacity_waterfilling_bps_hz(h.entries, opt.snr_db)
                                     : capacity_bps_hz(h, opt.snr_db);
        };
        CapacityRow a{seed, opt.snr_db, false, cap(cir), int(bp.tx.count())};
        CapacityRow b{seed, opt.snr_db, true, cap(prs), int(bp.tx.count())};
        return {a, b};
    }

} // namespace thz

#endif
