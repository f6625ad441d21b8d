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

#include "thzsim/geometry.hpp"

#include <random>

using namespace thz;

TEST_CASE("Geometry - Mirror point")
{
    Plane floor = make_plane({0.0, 0.0, 0.0}, {0.0, 0.0, 1.0});
    Point3 m = mirror_point({0.0, 0.0, 1.0}, floor);
    CHECK(m.x == 0.0);
    CHECK(m.y == 0.0);
    CHECK(m.z == -1.0);

    // fixed point on the wall
    Point3 on{0.3, -2.0, 0.0};
    CHECK(distance(mirror_point(on, floor), on) < 1e-15);

    // involution over random walls
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k)
    {
        Plane w = make_plane({U(rng), U(rng), U(rng)}, {U(rng), U(rng), U(rng) + 0.01});
        Point3 p{U(rng), U(rng), U(rng)};
        worst = std::max(worst, distance(mirror_point(mirror_point(p, w), w), p));
        // mirrored point sits at the negated signed distance
        CHECK(std::abs(signed_distance(mirror_point(p, w), w) + signed_distance(p, w)) < 1e-11);
    }
    CHECK(worst < 1e-12);

    CHECK_THROWS_AS(mirror_point({std::nan(""), 0.0, 0.0}, floor), std::invalid_argument);
    Plane bad{{0.0, 0.0, 0.0}, {0.0, 0.0, 2.0}};
    CHECK_THROWS_AS(mirror_point({1.0, 0.0, 0.0}, bad), std::invalid_argument);
}

TEST_CASE("Geometry - Plane projection")
{
    Plane p = make_plane({1.0, 2.0, 0.5}, {1.0, 0.0, 0.0});
    PlaneBasis b = plane_basis(p);
    CHECK(!b.fallback);
    CHECK(std::abs(dot(b.u, world_up)) < 1e-15); // u is horizontal
    CHECK(std::abs(dot(b.u, b.v)) < 1e-15);
    CHECK(std::abs(dot(cross(b.u, b.v), p.normal) - 1.0) < 1e-15);

    auto o = project_to_plane(p.origin, p);
    CHECK(o.u == 0.0);
    CHECK(o.v == 0.0);

    // normal component is discarded
    auto q = project_to_plane(p.origin + b.u * 1.0 + p.normal * 2.0, p);
    CHECK(std::abs(q.u - 1.0) < 1e-15);
    CHECK(std::abs(q.v) < 1e-15);

    // round trip through plane_point
    auto r = project_to_plane(plane_point(p, b, -0.7, 1.3), p, b);
    CHECK(std::abs(r.u + 0.7) < 1e-14);
    CHECK(std::abs(r.v - 1.3) < 1e-14);

    // vertical normal uses the fallback basis
    Plane floor = make_plane({0.0, 0.0, 0.0}, {0.0, 0.0, 1.0});
    CHECK(plane_basis(floor).fallback);
    CHECK(project_to_plane({1.0, 1.0, 0.0}, floor).fallback_basis);
}

TEST_CASE("Geometry - Angles and crossings")
{
    CHECK(wrap_angle(pi) == -pi);
    CHECK(std::abs(wrap_angle(3.0 * pi + 0.1) - (-pi + 0.1)) < 1e-12);
    CHECK(std::abs(azimuth({0.0, 1.0, 0.0}) - 0.5 * pi) < 1e-15);

    Plane mid = make_plane({1.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
    CHECK(std::abs(segment_plane_crossing({0.0, 0.0, 0.0}, {4.0, 0.0, 0.0}, mid) - 0.25) < 1e-15);
    CHECK_THROWS_AS(segment_plane_crossing({2.0, 0.0, 0.0}, {4.0, 0.0, 0.0}, mid), std::invalid_argument);
    CHECK_THROWS_AS(normalized({0.0, 0.0, 0.0}), std::invalid_argument);
}
