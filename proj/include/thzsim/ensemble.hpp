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

// Seed ensembles over a preset's placement region.

#ifndef THZSIM_ENSEMBLE_HPP
#define THZSIM_ENSEMBLE_HPP

#include "thzsim/channel_stats.hpp"
#include "thzsim/parallel.hpp"
#include "thzsim/qd_channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace thz
{
    struct EnsembleOptions
    {
        double bin_width_ns = 0.5;
        double floor_db = -30.0;
        unsigned jobs = 1;
    };

    struct SeedStats
    {
        std::uint64_t seed = 0;
        Point3 rx;
        int deterministic_count = 0;
        int cluster_count = 0;
        std::vector<double> nonlos_powers_db; // counted clusters other than LoS
        double rms_delay_spread_ns = 0.0;
        double max_excess_delay_ns = 0.0;
        double random_power_rel = 0.0;     // total random-cluster power / LoS power
        std::vector<double> pdp_rel;       // PDP / LoS power, bins from first arrival
    };

    struct EnsembleSummary
    {
        std::string preset;
        std::size_t seeds = 0;
        double bin_width_ns = 0.5;
        double floor_db = -30.0;
        double mean_cluster_count = 0.0;
        double fraction_above_10db = 0.0; // over non-LoS clusters
        double median_rms_delay_spread_ns = 0.0;
        double max_excess_delay_ns = 0.0; // ensemble maximum
        double mean_random_power_rel = 0.0;
        std::vector<double> mean_pdp_rel;
        std::vector<SeedStats> per_seed;
    };

    inline SeedStats seed_stats(const EnvironmentPreset &preset, std::uint64_t seed, const EnsembleOptions &opt)
    {
        SeedStats s;
        s.seed = seed;
        s.rx = sample_rx(preset, seed);
        Cir cir = synthesize_cir(preset, preset.placement.tx, s.rx, seed);
        for (const auto &m : cir.mpcs)
            if (m.kind != MpcKind::random_subpath)
                ++s.deterministic_count;
        ClusterStats cs = cluster_stats(cir, opt.floor_db);
        s.cluster_count = cs.count;
        s.nonlos_powers_db.assign(cs.relative_powers_db.begin() + (cir.direct() ? 1 : 0), cs.relative_powers_db.end());
        Pdp pdp = omni_pdp(cir, opt.bin_width_ns);
        s.rms_delay_spread_ns = rms_delay_spread(pdp, opt.floor_db);
        s.max_excess_delay_ns = max_excess_delay(pdp, opt.floor_db);
        for (const auto &c : cir.clusters)
            s.random_power_rel += std::pow(10.0, c.power_db / 10.0);
        s.pdp_rel.resize(pdp.powers.size());
        for (std::size_t k = 0; k < pdp.powers.size(); ++k)
            s.pdp_rel[k] = pdp.powers[k] / pdp.reference_power;
        return s;
    }

    /// Statistics over seeds first_seed ... first_seed + count - 1.
    inline EnsembleSummary run_ensemble(const EnvironmentPreset &preset, std::uint64_t first_seed, std::size_t count,
                                        const EnsembleOptions &opt = {})
    {
        validate_preset(preset);
        EnsembleSummary sum;
        sum.preset = preset.name;
        sum.seeds = count;
        sum.bin_width_ns = opt.bin_width_ns;
        sum.floor_db = opt.floor_db;
        sum.per_seed = parallel_map(count, opt.jobs, [&](std::size_t i) { return seed_stats(preset, first_seed + i, opt); });
        if (count == 0)
            return sum;

        std::size_t nonlos = 0, above = 0;
        std::vector<double> ds;
        ds.reserve(count);
        for (const auto &s : sum.per_seed)
        {
            sum.mean_cluster_count += s.cluster_count;
            for (double p : s.nonlos_powers_db)
            {
                ++nonlos;
                above += p > -10.0 ? 1 : 0;
            }
            ds.push_back(s.rms_delay_spread_ns);
            sum.max_excess_delay_ns = std::max(sum.max_excess_delay_ns, s.max_excess_delay_ns);
            sum.mean_random_power_rel += s.random_power_rel;
            if (s.pdp_rel.size() > sum.mean_pdp_rel.size())
                sum.mean_pdp_rel.resize(s.pdp_rel.size(), 0.0);
            for (std::size_t k = 0; k < s.pdp_rel.size(); ++k)
                sum.mean_pdp_rel[k] += s.pdp_rel[k];
        }
        sum.mean_cluster_count /= double(count);
        sum.mean_random_power_rel /= double(count);
        sum.fraction_above_10db = nonlos ? double(above) / double(nonlos) : 0.0;
        sum.median_rms_delay_spread_ns = quantile(ds, 0.5);
        for (double &p : sum.mean_pdp_rel)
            p /= double(count);
        return sum;
    }

} // namespace thz

#endif
