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

// Synthetic body point clouds: rigid cylinder and box phantoms and an
// articulated walker built from elliptic cylinders. Point order and count
// are fixed for given dimensions, so frames pair point-by-point.

#ifndef THZSIM_PHANTOM_HPP
#define THZSIM_PHANTOM_HPP

#include "thzsim/geometry.hpp"
#include "thzsim/screen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace thz
{
    /// Elliptic cylinder: cross-section radii r1 along e1 and r2 along axis x e1.
    struct BodyPart
    {
        Point3 base;
        Point3 axis{0.0, 0.0, 1.0};
        double length = 1.0;
        Point3 e1{1.0, 0.0, 0.0};
        double r1 = 0.1;
        double r2 = 0.1;
    };

    /// Surface samples of a closed elliptic cylinder (mantle and both caps).
    inline void sample_part(const BodyPart &part, double spacing, std::vector<Point3> &out)
    {
        if (!(spacing > 0.0))
            throw std::invalid_argument("Point spacing must be positive.");
        const Point3 ax = normalized(part.axis);
        const Point3 e1 = normalized(part.e1 - ax * dot(part.e1, ax));
        const Point3 e2 = cross(ax, e1);
        const double a = part.r1, b = part.r2;
        // Ramanujan's perimeter approximation
        const double h = (a - b) * (a - b) / ((a + b) * (a + b));
        const double perim = pi * (a + b) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
        const int n_around = std::max(8, int(std::ceil(perim / spacing)));
        const int n_along = std::max(2, int(std::ceil(part.length / spacing)) + 1);
        for (int i = 0; i < n_along; ++i)
        {
            Point3 c = part.base + ax * (part.length * double(i) / double(n_along - 1));
            for (int k = 0; k < n_around; ++k)
            {
                double phi = two_pi * double(k) / double(n_around);
                out.push_back(c + e1 * (a * std::cos(phi)) + e2 * (b * std::sin(phi)));
            }
        }
        const int n_rings = std::max(1, int(std::ceil(std::max(a, b) / spacing)));
        for (int cap = 0; cap < 2; ++cap)
        {
            Point3 c = part.base + ax * (cap ? part.length : 0.0);
            out.push_back(c);
            for (int r = 1; r < n_rings; ++r)
            {
                double f = double(r) / double(n_rings);
                int n = std::max(6, int(std::ceil(f * perim / spacing)));
                for (int k = 0; k < n; ++k)
                {
                    double phi = two_pi * double(k) / double(n);
                    out.push_back(c + e1 * (f * a * std::cos(phi)) + e2 * (f * b * std::sin(phi)));
                }
            }
        }
    }

    /// Vertical cylinder standing on `base_center`.
    inline HumanFrame cylinder_phantom(const Point3 &base_center, double diameter = 0.4, double height = 1.7,
                                       double spacing = 0.01, double t_s = 0.0)
    {
        HumanFrame f;
        f.t_s = t_s;
        sample_part({base_center, world_up, height, world_x, 0.5 * diameter, 0.5 * diameter}, spacing, f.points);
        return f;
    }

    /// Upright box; `width` is measured along `lateral` (horizontal).
    inline HumanFrame box_phantom(const Point3 &base_center, const Point3 &lateral, double width, double depth,
                                  double height, double spacing = 0.01, double t_s = 0.0)
    {
        if (!(width > 0.0 && depth > 0.0 && height > 0.0 && spacing > 0.0))
            throw std::invalid_argument("Box dimensions and spacing must be positive.");
        const Point3 l = normalized(Point3{lateral.x, lateral.y, 0.0});
        const Point3 f = cross(world_up, l);
        HumanFrame fr;
        fr.t_s = t_s;
        auto steps = [&](double len) { return std::max(2, int(std::ceil(len / spacing)) + 1); };
        const int nl = steps(width), nf = steps(depth), nz = steps(height);
        auto at = [&](int i, int j, int k) {
            return base_center + l * (width * (double(i) / (nl - 1) - 0.5)) + f * (depth * (double(j) / (nf - 1) - 0.5)) +
                   world_up * (height * double(k) / (nz - 1));
        };
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < nf; ++j)
                for (int i = 0; i < nl; ++i)
                    if (i == 0 || j == 0 || k == 0 || i == nl - 1 || j == nf - 1 || k == nz - 1)
                        fr.points.push_back(at(i, j, k));
        return fr;
    }

    /// Copies of `f` moved at constant velocity, sampled at `rate_hz`.
    inline std::vector<HumanFrame> translate_frames(const HumanFrame &f, const Point3 &velocity, double duration_s,
                                                    double rate_hz)
    {
        if (!(duration_s > 0.0) || !(rate_hz > 0.0))
            throw std::invalid_argument("Duration and frame rate must be positive.");
        const int n = int(std::floor(duration_s * rate_hz + 1e-9)) + 1;
        std::vector<HumanFrame> out;
        out.reserve(std::size_t(n));
        for (int k = 0; k < n; ++k)
        {
            HumanFrame g;
            g.t_s = f.t_s + double(k) / rate_hz;
            g.points.reserve(f.points.size());
            for (const auto &p : f.points)
                g.points.push_back(p + velocity * (g.t_s - f.t_s));
            out.push_back(std::move(g));
        }
        return out;
    }

    struct Pose
    {
        Point3 position;                // floor point below the pelvis
        Point3 heading{0.0, 1.0, 0.0};  // walking direction (horizontal)
        double gait_phase_rad = 0.0;
        double leg_swing_deg = 25.0;
        double arm_swing_deg = 30.0;
        double arm_abduction_deg = 6.0; // 90 = arms stretched sideways
        double height_m = 1.75;
    };

    /// Cylinder-ensemble body in the given pose.
    inline HumanFrame articulated_frame(const Pose &pose, double t_s = 0.0, double spacing = 0.012)
    {
        const double H = pose.height_m;
        if (!(H > 0.0))
            throw std::invalid_argument("Body height must be positive.");
        const Point3 f = normalized(Point3{pose.heading.x, pose.heading.y, 0.0});
        const Point3 l = cross(world_up, f);
        const Point3 &p0 = pose.position;
        const double s = H / 1.75;
        const double deg = pi / 180.0;

        std::vector<BodyPart> parts;
        const double hip_h = 0.49 * H, shoulder_h = 0.81 * H;
        // legs swing about the hip's lateral axis, arms in counter-phase
        for (int side = -1; side <= 1; side += 2)
        {
            double th = double(side) * pose.leg_swing_deg * deg * std::sin(pose.gait_phase_rad);
            Point3 dir = -world_up * std::cos(th) + f * std::sin(th);
            Point3 hip = p0 + world_up * hip_h + l * (double(side) * 0.09 * s);
            parts.push_back({hip + dir * hip_h, -dir, hip_h, l, 0.065 * s, 0.065 * s});
        }
        parts.push_back({p0 + world_up * hip_h, world_up, 0.33 * H, l, 0.17 * s, 0.11 * s});      // torso
        parts.push_back({p0 + world_up * (0.80 * H), world_up, 0.08 * H, l, 0.05 * s, 0.05 * s}); // neck
        parts.push_back({p0 + world_up * (0.86 * H), world_up, 0.14 * H, l, 0.085 * s, 0.095 * s}); // head
        for (int side = -1; side <= 1; side += 2)
        {
            double al = -double(side) * pose.arm_swing_deg * deg * std::sin(pose.gait_phase_rad);
            double be = pose.arm_abduction_deg * deg;
            Point3 dir = normalized(-world_up * (std::cos(al) * std::cos(be)) + f * std::sin(al) +
                                    l * (double(side) * std::sin(be) * std::cos(al)));
            Point3 shoulder = p0 + world_up * shoulder_h + l * (double(side) * 0.21 * s);
            parts.push_back({shoulder, dir, 0.37 * H, f, 0.045 * s, 0.045 * s});
        }

        HumanFrame fr;
        fr.t_s = t_s;
        for (const auto &part : parts)
            sample_part(part, spacing, fr.points);
        return fr;
    }

    struct WalkParams
    {
        Point3 start;                  // floor point below the pelvis at t = 0
        Point3 heading{0.0, 1.0, 0.0};
        double speed_mps = 1.0;
        double duration_s = 2.0;
        double frame_rate_hz = 100.0;  // MoCap-like rate
        double cadence_hz = 0.9;       // gait cycles per second
        double leg_swing_deg = 25.0;
        double arm_swing_deg = 30.0;
        double height_m = 1.75;
        double spacing_m = 0.012;
    };

    /// Straight walk at constant speed with sinusoidal limb swing.
    inline std::vector<HumanFrame> articulated_walk(const WalkParams &w)
    {
        if (!(w.duration_s > 0.0) || !(w.frame_rate_hz > 0.0) || !(w.speed_mps >= 0.0))
            throw std::invalid_argument("Walk duration, frame rate and speed must be positive.");
        const Point3 f = normalized(Point3{w.heading.x, w.heading.y, 0.0});
        const int n = int(std::floor(w.duration_s * w.frame_rate_hz + 1e-9)) + 1;
        std::vector<HumanFrame> out;
        out.reserve(std::size_t(n));
        for (int k = 0; k < n; ++k)
        {
            double t = double(k) / w.frame_rate_hz;
            Pose p;
            p.position = w.start + f * (w.speed_mps * t);
            p.heading = f;
            p.gait_phase_rad = two_pi * w.cadence_hz * t;
            p.leg_swing_deg = w.leg_swing_deg;
            p.arm_swing_deg = w.arm_swing_deg;
            p.height_m = w.height_m;
            out.push_back(articulated_frame(p, t, w.spacing_m));
        }
        return out;
    }

} // namespace thz

#endif
