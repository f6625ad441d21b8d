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

#include <catch2/catch_amalgamated.hpp>

#include "thzsim/channel_stats.hpp"

using namespace thz;

namespace
{
    Cir taps(std::initializer_list<std::pair<double, double>> t) // (delay_ns, power)
    {
        Cir c;
        bool first = true;
        for (auto [d, p] : t)
        {
            Mpc m;
            m.delay_ns = d;
            m.amplitude = std::sqrt(p);
            m.kind = first ? MpcKind::direct : MpcKind::random_subpath;
            m.cluster_id = int(c.mpcs.size());
            first = false;
            c.mpcs.push_back(m);
        }
        return c;
    }
} // namespace

TEST_CASE("Channel stats - Two-tap delay spread")
{
    // equal taps 10 ns apart: sigma = 5 ns
    auto pdp = omni_pdp(taps({{20.0, 1.0}, {30.0, 1.0}}), 1.0);
    CHECK(rms_delay_spread(pdp) == Catch::Approx(5.0).margin(1e-9));
    CHECK(max_excess_delay(pdp) == Catch::Approx(10.0).margin(1e-9));

    // oracle for unequal taps: sqrt(p1 p2) / (p1 + p2) * dt
    auto pdp2 = omni_pdp(taps({{20.0, 1.0}, {30.0, 0.25}}), 1.0);
    CHECK(rms_delay_spread(pdp2) == Catch::Approx(std::sqrt(0.25) / 1.25 * 10.0).margin(1e-9));

    // below the floor the second tap drops out
    CHECK(rms_delay_spread(pdp2, -3.0) == 0.0);
    CHECK(max_excess_delay(pdp2, -3.0) == 0.0);
}

TEST_CASE("Channel stats - PDP invariants")
{
    auto c = taps({{10.0, 1.0}, {10.4, 0.5}, {12.0, 0.25}, {25.0, 1e-4}});
    auto pdp = omni_pdp(c, 1.0);
    double tot = 0.0;
    for (const auto &m : c.mpcs)
        tot += std::norm(m.amplitude);
    CHECK(pdp.total_power() == Catch::Approx(tot).epsilon(1e-12));
    CHECK(pdp.powers.size() == 16);
    CHECK(pdp.powers[0] == Catch::Approx(1.5));
    CHECK(pdp.reference_power == Catch::Approx(1.0));

    // delay shift moves the origin only
    auto s = c;
    for (auto &m : s.mpcs)
        m.delay_ns += 7.0;
    auto pdp_s = omni_pdp(s, 1.0);
    CHECK(pdp_s.powers == pdp.powers);
    CHECK(rms_delay_spread(pdp_s) == Catch::Approx(rms_delay_spread(pdp)).margin(1e-12));

    // power scaling leaves the spread unchanged
    for (auto &m : s.mpcs)
        m.amplitude *= 3.0;
    CHECK(rms_delay_spread(omni_pdp(s, 1.0)) == Catch::Approx(rms_delay_spread(pdp)).margin(1e-9));

    CHECK_THROWS_AS(omni_pdp(c, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(omni_pdp(Cir{}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rms_delay_spread(pdp, 1.0), std::invalid_argument);
}

TEST_CASE("Channel stats - Cluster powers")
{
    auto c = taps({{10.0, 1.0}, {12.0, 0.1}, {20.0, 1e-4}});
    c.mpcs[2].cluster_id = 1; // same cluster as the second tap
    auto cs = cluster_stats(c, -30.0);
    REQUIRE(cs.count == 2);
    CHECK(cs.relative_powers_db[0] == 0.0);
    CHECK(cs.relative_powers_db[1] == Catch::Approx(10.0 * std::log10(0.1001)));

    c.mpcs[2].cluster_id = 2;
    CHECK(cluster_stats(c, -30.0).count == 2);
    CHECK(cluster_stats(c, -50.0).count == 3);
}

TEST_CASE("Channel stats - Averaging gain and CDF helpers")
{
    CHECK(averaging_gain_db(100) == Catch::Approx(20.0));
    CHECK(averaging_gain_db(1) == 0.0);
    CHECK_THROWS_AS(averaging_gain_db(0), std::invalid_argument);

    auto cdf = empirical_cdf({3.0, 1.0, 2.0});
    REQUIRE(cdf.size() == 3);
    CHECK(cdf[0].first == 1.0);
    CHECK(cdf[2].second == 1.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == Catch::Approx(2.5));
    CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
}
