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

#include "thzsim/phantom.hpp"
#include "thzsim/screen.hpp"

using namespace thz;

namespace
{
    const Point3 tx{0.0, 0.0, 1.2}, rx{3.5, 0.0, 1.2};

    // Shoelace area over all chains; holes run clockwise and subtract
    double chain_area(const ScreenSilhouette &s)
    {
        double a = 0.0;
        for (const auto &c : s.boundary)
            for (std::size_t k = 0; k < c.size(); ++k)
            {
                const UV &p = c[k], &q = c[(k + 1) % c.size()];
                a += p.u * q.v - q.u * p.v;
            }
        return 0.5 * a;
    }
} // namespace

TEST_CASE("Screen - Single point")
{
    HumanFrame f{0.0, {{1.75, 0.0, 1.0}}};
    auto s = build_screen(f, tx, rx);
    CHECK(s.occupancy.occupied_count() == 1);
    REQUIRE(s.boundary.size() == 1);
    CHECK(s.boundary[0].size() == 4);
    CHECK(std::abs(chain_area(s) - s.pitch_m * s.pitch_m) < 1e-15);

    // plane through the centroid, normal along the LoS
    CHECK(std::abs(signed_distance(f.points[0], s.plane)) < 1e-12);
    CHECK(std::abs(dot(s.plane.normal, normalized(rx - tx)) - 1.0) < 1e-15);
}

TEST_CASE("Screen - Cylinder phantom")
{
    auto f = cylinder_phantom({1.75, 0.0, 0.0}, 0.4, 1.7, 0.01);
    auto s = build_screen(f, tx, rx, 0.01);

    double width = s.u_max - s.u_min, height = s.v_max - s.v_min;
    CHECK(std::abs(width - 0.40) <= 0.01);
    CHECK(std::abs(height - 1.70) <= 0.01);

    // analytic side view is a 0.4 m x 1.7 m rectangle
    double area = s.occupancy.occupied_area();
    CHECK(std::abs(area / 0.68 - 1.0) < 0.05);

    // boundary encloses exactly the occupied cells
    CHECK(std::abs(chain_area(s) - area) < 1e-9);

    // grid convergence
    auto s2 = build_screen(f, tx, rx, 0.005);
    CHECK(std::abs(s2.occupancy.occupied_area() / area - 1.0) < 0.02);

    // rectangular baseline is the bounding box
    auto r = rect_screen(f, tx, rx, 0.01);
    CHECK(r.occupancy.occupied_area() >= area);
    CHECK(r.boundary.size() == 1);
    CHECK(r.boundary[0].size() == 4);
    CHECK(std::abs(r.occupancy.occupied_area() / area - 1.0) < 0.05);
}

TEST_CASE("Screen - Rectangle bounds every pose")
{
    Pose p;
    p.position = {1.75, 0.0, 0.0};
    for (double phase = 0.0; phase < two_pi; phase += 0.7)
    {
        p.gait_phase_rad = phase;
        auto f = articulated_frame(p);
        CHECK(rect_screen(f, tx, rx).occupancy.occupied_area() >= build_screen(f, tx, rx).occupancy.occupied_area());
    }

    // arms stretched sideways
    p.gait_phase_rad = 0.0;
    p.heading = {1.0, 0.0, 0.0};
    p.arm_abduction_deg = 90.0;
    auto f = articulated_frame(p);
    double ratio = rect_screen(f, tx, rx).occupancy.occupied_area() / build_screen(f, tx, rx).occupancy.occupied_area();
    CHECK(ratio > 1.3);
}

TEST_CASE("Screen - LoS blockage")
{
    auto f = box_phantom({1.75, 0.0, 0.0}, {0.0, 1.0, 0.0}, 0.5, 0.3, 1.8, 0.01);
    CHECK(los_blocked(tx, rx, build_screen(f, tx, rx)));

    // sliding the box sideways unblocks the LoS once, and only once
    bool was_blocked = true;
    int flips = 0;
    for (double y = 0.0; y < 0.6; y += 0.01)
    {
        auto g = box_phantom({1.75, y, 0.0}, {0.0, 1.0, 0.0}, 0.5, 0.3, 1.8, 0.01);
        bool b = los_blocked(tx, rx, build_screen(g, tx, rx));
        flips += b != was_blocked;
        was_blocked = b;
    }
    CHECK(flips == 1);
    CHECK(!was_blocked);
}

TEST_CASE("Screen - Errors")
{
    CHECK_THROWS_AS(build_screen(HumanFrame{}, tx, rx), std::invalid_argument);
    HumanFrame behind{0.0, {{-1.0, 0.0, 1.0}}};
    CHECK_THROWS_AS(build_screen(behind, tx, rx), std::invalid_argument);
    HumanFrame ok{0.0, {{1.0, 0.0, 1.0}}};
    CHECK_THROWS_AS(build_screen(ok, tx, rx, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_screen(ok, tx, tx), std::invalid_argument);
}

TEST_CASE("Screen - Morphological closing")
{
    // one-cell gap is closed, outer edge kept
    OccupancyGrid g;
    g.nu = 7, g.nv = 3;
    g.cells.assign(21, 0);
    for (int i = 1; i < 6; ++i)
        g.set(i, 1, i != 3);
    auto c = close_grid(g);
    CHECK(c.at(3, 1));
    CHECK(c.occupied_count() == 5);
}
