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

// Summary statistics of channel realizations: omnidirectional power delay
// profile, delay spread, cluster counts and powers.

#ifndef THZSIM_CHANNEL_STATS_HPP
#define THZSIM_CHANNEL_STATS_HPP

#include "thzsim/qd_channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace thz
{
    /// Incoherent power delay profile. Bin k covers
    /// [origin_ns + k w, origin_ns + (k+1) w) and is reported at its left edge;
    /// origin_ns is the first arrival.
    struct Pdp
    {
        double bin_width_ns = 1.0;
        double origin_ns = 0.0;
        double direct_delay_ns = 0.0;
        std::vector<double> powers;
        double reference_power = 0.0; // |gamma_direct|^2

        double bin_delay_ns(std::size_t k) const { return origin_ns + double(k) * bin_width_ns; }
        double total_power() const
        {
            double s = 0.0;
            for (double p : powers)
                s += p;
            return s;
        }
    };

    struct ClusterStats
    {
        int count = 0;
        std::vector<double> relative_powers_db; // vs LoS, LoS first when present
    };

    inline Pdp omni_pdp(const Cir &cir, double bin_width_ns)
    {
        if (!(bin_width_ns > 0.0) || !std::isfinite(bin_width_ns))
            throw std::invalid_argument("bin_width_ns must be positive.");
        if (cir.mpcs.empty())
            throw std::invalid_argument("Cannot build a PDP from an empty CIR.");
        Pdp pdp;
        pdp.bin_width_ns = bin_width_ns;
        double first = cir.mpcs.front().delay_ns, last = first;
        for (const auto &m : cir.mpcs)
        {
            first = std::min(first, m.delay_ns);
            last = std::max(last, m.delay_ns);
        }
        pdp.origin_ns = first;
        const Mpc *d = cir.direct();
        pdp.direct_delay_ns = d ? d->delay_ns : first;
        // small guard so taps on exact multiples of the bin width land in their own bin
        auto bin_of = [&](double t) { return std::size_t(std::floor((t - first) / bin_width_ns + 1e-9)); };
        pdp.powers.assign(bin_of(last) + 1, 0.0);
        double peak = 0.0;
        for (const auto &m : cir.mpcs)
        {
            double p = std::norm(m.amplitude);
            pdp.powers[bin_of(m.delay_ns)] += p;
            peak = std::max(peak, p);
        }
        pdp.reference_power = d ? std::norm(d->amplitude) : peak;
        return pdp;
    }

    namespace detail
    {
        inline std::vector<std::size_t> bins_above_floor(const Pdp &pdp, double floor_db)
        {
            if (!(floor_db < 0.0))
                throw std::invalid_argument("floor_db must be negative.");
            double peak = 0.0;
            for (double p : pdp.powers)
                peak = std::max(peak, p);
            if (!(peak > 0.0))
                throw std::invalid_argument("PDP has no power above the floor.");
            const double thr = peak * std::pow(10.0, floor_db / 10.0);
            std::vector<std::size_t> out;
            for (std::size_t k = 0; k < pdp.powers.size(); ++k)
                if (pdp.powers[k] > 0.0 && pdp.powers[k] >= thr)
                    out.push_back(k);
            return out;
        }
    } // namespace detail

    /// Power-weighted RMS delay spread over bins within floor_db of the peak.
    inline double rms_delay_spread(const Pdp &pdp, double floor_db = -30.0)
    {
        auto bins = detail::bins_above_floor(pdp, floor_db);
        // moments about the first kept bin keep the sums well conditioned
        const double t0 = pdp.bin_delay_ns(bins.front());
        double p = 0.0, m1 = 0.0, m2 = 0.0;
        for (std::size_t k : bins)
        {
            double t = pdp.bin_delay_ns(k) - t0;
            p += pdp.powers[k];
            m1 += pdp.powers[k] * t;
            m2 += pdp.powers[k] * t * t;
        }
        m1 /= p;
        return std::sqrt(std::max(0.0, m2 / p - m1 * m1));
    }

    /// Delay of the latest bin within floor_db of the peak, minus the direct delay.
    inline double max_excess_delay(const Pdp &pdp, double floor_db = -30.0)
    {
        auto bins = detail::bins_above_floor(pdp, floor_db);
        return std::max(0.0, pdp.bin_delay_ns(bins.back()) - pdp.direct_delay_ns);
    }

    /// Cluster powers from provenance (cluster_id), relative to the LoS power.
    /// Clusters below `floor_db` are not counted.
    inline ClusterStats cluster_stats(const Cir &cir, double floor_db)
    {
        std::map<int, double> power;
        for (const auto &m : cir.mpcs)
            power[m.cluster_id] += std::norm(m.amplitude);
        ClusterStats cs;
        if (power.empty())
            return cs;
        const Mpc *d = cir.direct();
        double ref = 0.0;
        if (d)
            ref = power[d->cluster_id];
        else
            for (const auto &[id, p] : power)
                ref = std::max(ref, p);
        if (d)
        {
            cs.relative_powers_db.push_back(0.0);
            power.erase(d->cluster_id);
        }
        for (const auto &[id, p] : power)
        {
            double rel = 10.0 * std::log10(p / ref);
            if (rel >= floor_db)
                cs.relative_powers_db.push_back(rel);
        }
        cs.count = int(cs.relative_powers_db.size());
        return cs;
    }

    inline ClusterStats cluster_stats(const Cir &cir) { return cluster_stats(cir, cir.power_floor_db); }

    /// Processing gain of averaging m sounder acquisitions, 10 log10 m.
    inline double averaging_gain_db(std::int64_t m)
    {
        if (m < 1)
            throw std::invalid_argument("Averaging count must be at least 1.");
        return 10.0 * std::log10(double(m));
    }

    /// Empirical CDF as (x, F(x)) pairs, one per sorted sample.
    inline std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        std::vector<std::pair<double, double>> out;
        out.reserve(v.size());
        for (std::size_t k = 0; k < v.size(); ++k)
            out.emplace_back(v[k], double(k + 1) / double(v.size()));
        return out;
    }

    /// Linear-interpolated sample quantile, q in [0, 1].
    inline double quantile(std::vector<double> v, double q)
    {
        if (v.empty())
            throw std::invalid_argument("Quantile of an empty sample.");
        std::sort(v.begin(), v.end());
        double pos = std::clamp(q, 0.0, 1.0) * double(v.size() - 1);
        std::size_t lo = std::size_t(std::floor(pos));
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (v[hi] - v[lo]) * (pos - double(lo));
    }

} // namespace thz

#endif
