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

#ifndef THZSIM_DIFFRACTION_HPP
#define THZSIM_DIFFRACTION_HPP

#include "thzsim/fresnel.hpp"
#include "thzsim/geometry.hpp"
#include "thzsim/screen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace thz
{
    inline constexpr double default_carrier_hz = 300e9;

    inline double wavelength(double f_hz)
    {
        if (!(f_hz > 0.0) || !std::isfinite(f_hz))
            throw std::invalid_argument("Frequency must be positive.");
        return speed_of_light / f_hz;
    }

    /// One edge-diffraction path through a stationary point of the silhouette
    /// boundary.
    struct DiffractionPath
    {
        UV point;                    // stationary point in plane coordinates
        std::size_t chain = 0;       // boundary chain index
        double unfolded_len_m = 0.0; // |tx - P| + |P - rx|
        double excess_m = 0.0;       // unfolded length minus direct distance
        double nu = 0.0;             // signed clearance, > 0 when the LoS is on the occupied side
        double curvature_term = 0.0; // d2L/ds2 along the boundary [1/m]
        double weight = 1.0;         // stationary-phase amplitude weight
        cdouble coeff{0.0, 0.0};     // weight * (F(nu) - [nu < 0]), free-space relative
    };

    struct StationarySet
    {
        std::vector<DiffractionPath> paths;
        std::vector<std::size_t> degenerate_chains; // chains handled by boundary integration
        UV los_point;                               // LoS piercing point in plane coordinates
        double los_len_m = 0.0;
        double reduced_dist_m = 0.0; // d1 d2 / (d1 + d2) at the piercing point

        bool degenerate() const { return !degenerate_chains.empty(); }

        /// Path closest to the shadow boundary (smallest |nu|), or nullptr.
        const DiffractionPath *nearest() const
        {
            const DiffractionPath *best = nullptr;
            for (const auto &p : paths)
                if (!best || std::abs(p.nu) < std::abs(best->nu))
                    best = &p;
            return best;
        }
    };

    struct StationaryOptions
    {
        double sample_fraction = 0.25;   // resampling step as a fraction of the grid pitch
        double smooth_pitches = 1.0;     // moving-average half-width in pitches (applied twice)
        double flat_fraction = 0.125;    // L spread below this many wavelengths flags a chain as degenerate
        double min_curvature_ratio = 0.25; // lower clamp on rho * L'' (caps the weight at 2)
    };

    namespace detail
    {
        struct LinkFrame
        {
            double d = 0.0;
            UV o;
            double rho = 0.0;
        };

        inline LinkFrame link_frame(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx)
        {
            require_finite(tx, "Tx position");
            require_finite(rx, "Rx position");
            LinkFrame lf;
            lf.d = distance(tx, rx);
            if (!(lf.d > 0.0))
                throw std::invalid_argument("Tx and Rx coincide.");
            double t = segment_plane_crossing(tx, rx, screen.plane);
            PlaneCoords pc = project_to_plane(lerp(tx, rx, t), screen.plane, screen.basis);
            lf.o = {pc.u, pc.v};
            double d1 = t * lf.d, d2 = (1.0 - t) * lf.d;
            lf.rho = d1 * d2 / (d1 + d2);
            return lf;
        }

        // Uniform arc-length resampling of a closed polygon
        inline std::vector<UV> resample_closed(const std::vector<UV> &poly, double step)
        {
            const std::size_t n = poly.size();
            double perimeter = 0.0;
            for (std::size_t k = 0; k < n; ++k)
            {
                const UV &a = poly[k], &b = poly[(k + 1) % n];
                perimeter += std::hypot(b.u - a.u, b.v - a.v);
            }
            std::size_t count = std::max<std::size_t>(8, std::size_t(std::ceil(perimeter / step)));
            double ds = perimeter / double(count);
            std::vector<UV> out;
            out.reserve(count);
            std::size_t seg = 0;
            double seg_start = 0.0;
            double seg_len = std::hypot(poly[1 % n].u - poly[0].u, poly[1 % n].v - poly[0].v);
            for (std::size_t k = 0; k < count; ++k)
            {
                double s = k * ds;
                while (s > seg_start + seg_len && seg + 1 < n)
                {
                    seg_start += seg_len;
                    ++seg;
                    const UV &a = poly[seg], &b = poly[(seg + 1) % n];
                    seg_len = std::hypot(b.u - a.u, b.v - a.v);
                }
                const UV &a = poly[seg], &b = poly[(seg + 1) % n];
                double f = seg_len > 0.0 ? (s - seg_start) / seg_len : 0.0;
                out.push_back({a.u + (b.u - a.u) * f, a.v + (b.v - a.v) * f});
            }
            return out;
        }

        inline std::vector<UV> smooth_closed(const std::vector<UV> &pts, std::size_t half)
        {
            const std::size_t n = pts.size();
            half = std::min(half, (n - 1) / 2);
            std::vector<UV> out(n);
            const double w = 1.0 / double(2 * half + 1);
            for (std::size_t k = 0; k < n; ++k)
            {
                double su = 0.0, sv = 0.0;
                for (std::size_t m = 0; m <= 2 * half; ++m)
                {
                    const UV &p = pts[(k + n + m - half) % n];
                    su += p.u, sv += p.v;
                }
                out[k] = {su * w, sv * w};
            }
            return out;
        }

        // Paraxial boundary-wave integral (1 / 2 pi) * oint exp(-j alpha r^2) dtheta
        // around `o`, alpha = pi / (lambda rho). Exact for polygons in the
        // Fresnel approximation.
        inline cdouble boundary_wave_integral(const std::vector<UV> &poly, const UV &o, double alpha)
        {
            const std::size_t n = poly.size();
            cdouble acc{0.0, 0.0};
            for (std::size_t k = 0; k < n; ++k)
            {
                UV a{poly[k].u - o.u, poly[k].v - o.v};
                UV b{poly[(k + 1) % n].u - o.u, poly[(k + 1) % n].v - o.v};
                double len = std::hypot(b.u - a.u, b.v - a.v);
                double rmax = std::max(std::hypot(a.u, a.v), std::hypot(b.u, b.v));
                // keep the phase increment per sub-step below ~0.1 rad
                int sub = std::max(1, int(std::ceil(2.0 * alpha * rmax * len / 0.1)));
                UV p = a;
                for (int s = 1; s <= sub; ++s)
                {
                    double f = double(s) / sub;
                    UV q{a.u + (b.u - a.u) * f, a.v + (b.v - a.v) * f};
                    double dtheta = std::atan2(p.u * q.v - p.v * q.u, p.u * q.u + p.v * q.v);
                    UV m{0.5 * (p.u + q.u), 0.5 * (p.v + q.v)};
                    double r2 = m.u * m.u + m.v * m.v;
                    acc += std::polar(dtheta, -alpha * r2);
                    p = q;
                }
            }
            return acc / two_pi;
        }

    } // namespace detail

    /// Finds the stationary (local-minimum) points of the unfolded length
    /// L(s) = |tx - P(s)| + |P(s) - rx| along each boundary chain.
    ///
    /// Chains are resampled and smoothed to suppress the raster staircase.
    /// A chain whose L spread is below a fraction of a wavelength has a
    /// continuum of stationary points and is reported in degenerate_chains.
    inline StationarySet find_stationary_points(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx,
                                                double f_hz = default_carrier_hz, const StationaryOptions &opt = {})
    {
        const double lambda = wavelength(f_hz);
        const auto lf = detail::link_frame(screen, tx, rx);

        StationarySet out;
        out.los_point = lf.o;
        out.los_len_m = lf.d;
        out.reduced_dist_m = lf.rho;

        const double pitch = screen.pitch_m;
        const double step = opt.sample_fraction * pitch;

        for (std::size_t c = 0; c < screen.boundary.size(); ++c)
        {
            const auto &chain = screen.boundary[c];
            if (chain.size() < 3)
                continue;
            auto pts = detail::resample_closed(chain, step);
            std::size_t half = std::max<std::size_t>(1, std::size_t(std::lround(opt.smooth_pitches / opt.sample_fraction)));
            pts = detail::smooth_closed(detail::smooth_closed(pts, half), half);
            const std::size_t n = pts.size();

            std::vector<double> len(n), arc(n + 1, 0.0);
            std::vector<Point3> p3(n);
            for (std::size_t k = 0; k < n; ++k)
            {
                p3[k] = plane_point(screen.plane, screen.basis, pts[k].u, pts[k].v);
                len[k] = distance(tx, p3[k]) + distance(p3[k], rx);
                const UV &q = pts[(k + 1) % n];
                arc[k + 1] = arc[k] + std::hypot(q.u - pts[k].u, q.v - pts[k].v);
            }

            auto [lmin, lmax] = std::minmax_element(len.begin(), len.end());
            if (*lmax - *lmin < opt.flat_fraction * lambda)
            {
                out.degenerate_chains.push_back(c);
                continue;
            }

            const std::size_t window = std::min(half * 2, (n - 1) / 2);
            const std::size_t stencil = std::max<std::size_t>(1, std::min(half, (n - 1) / 2));
            auto at = [n](std::size_t k, long off) { return std::size_t((long(k) + off % long(n) + long(n)) % long(n)); };
            auto arc_between = [&](std::size_t a, std::size_t b) {
                // forward arc length from a to b
                double s = arc[b] - arc[a];
                return s >= 0.0 ? s : s + arc[n];
            };

            for (std::size_t k = 0; k < n; ++k)
            {
                bool is_min = true;
                for (std::size_t w = 1; w <= window && is_min; ++w)
                    is_min = len[k] < len[at(k, long(w))] && len[k] <= len[at(k, -long(w))];
                if (!is_min)
                    continue;

                std::size_t kp = at(k, long(stencil)), km = at(k, -long(stencil));
                double h1 = arc_between(km, k), h2 = arc_between(k, kp);
                double l2 = 2.0 * ((len[kp] - len[k]) / h2 - (len[k] - len[km]) / h1) / (h1 + h2);

                const UV &prev = pts[at(k, -1)], &next = pts[at(k, 1)];
                UV tangent{next.u - prev.u, next.v - prev.v};
                UV inward{-tangent.v, tangent.u};
                bool shadow = (lf.o.u - pts[k].u) * inward.u + (lf.o.v - pts[k].v) * inward.v > 0.0;

                double r1 = distance(tx, p3[k]), r2 = distance(p3[k], rx);
                double rho = r1 * r2 / (r1 + r2);
                double q = std::max(rho * l2, opt.min_curvature_ratio);

                DiffractionPath dp;
                dp.point = pts[k];
                dp.chain = c;
                dp.unfolded_len_m = len[k];
                dp.excess_m = len[k] - lf.d;
                dp.nu = fresnel_nu(dp.excess_m, lambda, shadow);
                dp.curvature_term = l2;
                dp.weight = 1.0 / std::sqrt(q);
                cdouble f = knife_edge_coeff(dp.nu);
                dp.coeff = dp.weight * (dp.nu < 0.0 ? f - 1.0 : f);
                out.paths.push_back(dp);
            }
        }
        return out;
    }

    /// Edge-diffraction field at Rx relative to free space.
    ///
    /// The LoS term is switched by the side of the nearest stationary edge
    /// (equivalently: los_blocked away from sub-cell distances of the
    /// boundary). Degenerate chains are integrated with the paraxial boundary
    /// wave instead of stationary phase.
    inline cdouble edge_field(const StationarySet &sp, const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx,
                              double f_hz = default_carrier_hz)
    {
        cdouble field{0.0, 0.0};
        if (const auto *near = sp.nearest())
            field += near->nu < 0.0 ? 1.0 : 0.0;
        else if (screen.occupancy.occupied_count() == 0 || !los_blocked(tx, rx, screen))
            field += 1.0;

        for (const auto &p : sp.paths)
            field += p.coeff;

        if (sp.degenerate())
        {
            const double alpha = pi / (wavelength(f_hz) * sp.reduced_dist_m);
            for (std::size_t c : sp.degenerate_chains)
                field += detail::boundary_wave_integral(screen.boundary[c], sp.los_point, alpha);
        }
        return field;
    }

    inline cdouble edge_field(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx,
                              double f_hz = default_carrier_hz)
    {
        return edge_field(find_stationary_points(screen, tx, rx, f_hz), screen, tx, rx, f_hz);
    }

    /// Paraxial boundary-wave evaluation of the full screen (all chains),
    /// 1 - sum over chains of the occupied-region Fresnel integral.
    inline cdouble boundary_wave_field(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx,
                                       double f_hz = default_carrier_hz)
    {
        const auto lf = detail::link_frame(screen, tx, rx);
        const double alpha = pi / (wavelength(f_hz) * lf.rho);
        cdouble field = los_blocked(tx, rx, screen) ? 0.0 : 1.0;
        for (const auto &chain : screen.boundary)
            field += detail::boundary_wave_integral(chain, lf.o, alpha);
        return field;
    }

} // namespace thz

#endif
