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

#ifndef THZSIM_GEOMETRY_HPP
#define THZSIM_GEOMETRY_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace thz
{
    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double pi = std::numbers::pi;
    inline constexpr double two_pi = 2.0 * std::numbers::pi;

    /// 3-D point or vector in meters.
    struct Point3
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        constexpr Point3 &operator+=(const Point3 &o)
        {
            x += o.x, y += o.y, z += o.z;
            return *this;
        }
        constexpr Point3 &operator-=(const Point3 &o)
        {
            x -= o.x, y -= o.y, z -= o.z;
            return *this;
        }
        constexpr Point3 &operator*=(double s)
        {
            x *= s, y *= s, z *= s;
            return *this;
        }
        friend constexpr Point3 operator+(Point3 a, const Point3 &b) { return a += b; }
        friend constexpr Point3 operator-(Point3 a, const Point3 &b) { return a -= b; }
        friend constexpr Point3 operator*(Point3 a, double s) { return a *= s; }
        friend constexpr Point3 operator*(double s, Point3 a) { return a *= s; }
        friend constexpr Point3 operator-(const Point3 &a) { return {-a.x, -a.y, -a.z}; }
        friend constexpr bool operator==(const Point3 &, const Point3 &) = default;
    };

    constexpr double dot(const Point3 &a, const Point3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

    constexpr Point3 cross(const Point3 &a, const Point3 &b)
    {
        return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
    }

    inline double norm(const Point3 &a) { return std::sqrt(dot(a, a)); }
    inline double distance(const Point3 &a, const Point3 &b) { return norm(a - b); }

    inline bool is_finite(const Point3 &p)
    {
        return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
    }

    inline Point3 normalized(const Point3 &a)
    {
        double n = norm(a);
        if (!(n > 0.0) || !std::isfinite(n))
            throw std::invalid_argument("Cannot normalize a zero-length or non-finite vector.");
        return a * (1.0 / n);
    }

    inline void require_finite(const Point3 &p, const char *what)
    {
        if (!is_finite(p))
            throw std::invalid_argument(std::string(what) + " has non-finite coordinates.");
    }

    /// Wraps an angle to [-pi, pi).
    inline double wrap_angle(double a)
    {
        double w = std::fmod(a + pi, two_pi);
        if (w < 0.0)
            w += two_pi;
        w -= pi;
        return w >= pi ? -pi : w;
    }

    /// Azimuth of a direction vector in the x-y plane, wrapped to [-pi, pi).
    inline double azimuth(const Point3 &dir) { return wrap_angle(std::atan2(dir.y, dir.x)); }

    inline constexpr Point3 world_up{0.0, 0.0, 1.0};
    inline constexpr Point3 world_x{1.0, 0.0, 0.0};

    /// Infinite plane through `origin` with unit `normal`.
    struct Plane
    {
        Point3 origin;
        Point3 normal{0.0, 0.0, 1.0};
    };

    /// Builds a plane, normalizing the supplied normal.
    inline Plane make_plane(const Point3 &origin, const Point3 &normal)
    {
        require_finite(origin, "Plane origin");
        require_finite(normal, "Plane normal");
        return {origin, normalized(normal)};
    }

    inline void require_unit_normal(const Plane &plane)
    {
        require_finite(plane.origin, "Plane origin");
        require_finite(plane.normal, "Plane normal");
        if (std::abs(norm(plane.normal) - 1.0) > 1e-9)
            throw std::invalid_argument("Plane normal must have unit length.");
    }

    /// Signed distance of `p` from the plane (positive on the normal side).
    inline double signed_distance(const Point3 &p, const Plane &plane)
    {
        return dot(p - plane.origin, plane.normal);
    }

    /// Reflection of `p` across `wall` (image-method source position).
    inline Point3 mirror_point(const Point3 &p, const Plane &wall)
    {
        require_finite(p, "Point");
        require_unit_normal(wall);
        return p - wall.normal * (2.0 * signed_distance(p, wall));
    }

    /// Orthonormal in-plane frame. u = normal x up (normalized), v = normal x u.
    /// When the normal is (nearly) vertical, world-x replaces world-up and
    /// `fallback` is set.
    struct PlaneBasis
    {
        Point3 u;
        Point3 v;
        bool fallback = false;
    };

    inline PlaneBasis plane_basis(const Plane &plane)
    {
        require_unit_normal(plane);
        PlaneBasis b;
        Point3 c = cross(plane.normal, world_up);
        if (norm(c) < 1e-6)
        {
            c = cross(plane.normal, world_x);
            b.fallback = true;
        }
        b.u = normalized(c);
        b.v = cross(plane.normal, b.u);
        return b;
    }

    /// In-plane coordinates of an orthogonal projection.
    struct PlaneCoords
    {
        double u = 0.0;
        double v = 0.0;
        bool fallback_basis = false;
    };

    inline PlaneCoords project_to_plane(const Point3 &p, const Plane &plane, const PlaneBasis &basis)
    {
        require_finite(p, "Point");
        Point3 d = p - plane.origin;
        return {dot(d, basis.u), dot(d, basis.v), basis.fallback};
    }

    inline PlaneCoords project_to_plane(const Point3 &p, const Plane &plane)
    {
        return project_to_plane(p, plane, plane_basis(plane));
    }

    /// Inverse of project_to_plane for points lying in the plane.
    inline Point3 plane_point(const Plane &plane, const PlaneBasis &basis, double u, double v)
    {
        return plane.origin + basis.u * u + basis.v * v;
    }

    /// Parameter t in (0,1) where segment a->b crosses the plane; throws if the
    /// plane does not strictly separate a and b.
    inline double segment_plane_crossing(const Point3 &a, const Point3 &b, const Plane &plane)
    {
        double da = signed_distance(a, plane);
        double db = signed_distance(b, plane);
        if (!(da * db < 0.0))
            throw std::invalid_argument("Plane does not lie strictly between the segment end points.");
        return da / (da - db);
    }

    inline Point3 lerp(const Point3 &a, const Point3 &b, double t) { return a + (b - a) * t; }

} // namespace thz

#endif
