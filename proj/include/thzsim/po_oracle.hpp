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

// Physical-optics reference for thin absorbing screens.
//
// The field behind the screen is the Fresnel-Kirchhoff integral over the open
// part of the screen plane,
//
//   E / E0 = (j / lambda) int (d / (r1 r2)) * (cos t1 + cos t2) / 2 * exp(-jk (r1 + r2 - d)) dA,
//
// evaluated as 1 minus the same integral over the occupied cells. Each cell
// is split into n x n sub-cells; on a sub-cell the phase is linearized about
// its center and integrated exactly (sinc product), the amplitude is taken at
// the center. The remaining error is O(h^2); n doubles until the Richardson
// estimate |E_n - E_{n/2}| / 3 is below tolerance and the extrapolated value is
// returned. A tapered full-plane integral at the same sub-cell
// size must reproduce free space before a level is accepted.
//
// Nothing in here uses Fresnel integrals or the boundary representation.

#ifndef THZSIM_PO_ORACLE_HPP
#define THZSIM_PO_ORACLE_HPP

#include "thzsim/geometry.hpp"
#include "thzsim/screen.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace thz
{
    struct PoOptions
    {
        double abs_tol = 1e-3;          // Richardson error estimate |E_n - E_{n/2}| / 3 (LoS-normalized field)
        int max_subdiv = 16;            // finest sub-cells per cell edge
        double self_test_tol_db = 0.05; // free-space self-test tolerance
        double subcell_wavelengths = 10.0; // coarsest sub-cell edge in wavelengths
    };

    struct PoResult
    {
        std::complex<double> field{1.0, 0.0};
        int subdiv = 0;              // accepted refinement level
        double last_delta = 0.0;     // |E_n - E_{n/2}|
        double self_test_db = 0.0;   // free-space self-test error at the accepted level
        std::vector<double> history; // |E_n - E_{n/2}| per refinement
    };

    /// Thrown when the aperture quadrature does not meet tolerance.
    class quadrature_error : public std::runtime_error
    {
    public:
        quadrature_error(const std::string &msg, PoResult diag) : std::runtime_error(msg), diagnostics(std::move(diag)) {}
        PoResult diagnostics;
    };

    namespace detail
    {
        inline double sinc(double x)
        {
            return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        }

        struct PoKernel
        {
            Point3 tx, rx;
            Plane plane;
            PlaneBasis basis;
            double k = 0.0, lambda = 0.0, d = 0.0;

            // Integral of the kernel over an h x h square centred at plane coords (u, v)
            std::complex<double> square(double u, double v, double h) const
            {
                Point3 p = plane.origin + basis.u * u + basis.v * v;
                Point3 a = p - tx, b = rx - p;
                double r1 = norm(a), r2 = norm(b);
                double cos1 = std::abs(dot(a, plane.normal)) / r1;
                double cos2 = std::abs(dot(b, plane.normal)) / r2;
                double amp = d / (r1 * r2) * 0.5 * (cos1 + cos2) / lambda;
                // d(r1 + r2)/du etc.
                double gu = dot(a, basis.u) / r1 - dot(b, basis.u) / r2;
                double gv = dot(a, basis.v) / r1 - dot(b, basis.v) / r2;
                double w = h * h * sinc(0.5 * k * gu * h) * sinc(0.5 * k * gv * h);
                double phase = k * ((r1 + r2) - d);
                // j * exp(-j phase)
                return {amp * w * std::sin(phase), amp * w * std::cos(phase)};
            }
        };

        inline PoKernel make_kernel(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx, double f_hz)
        {
            require_finite(tx, "Tx position");
            require_finite(rx, "Rx position");
            if (!(f_hz > 0.0))
                throw std::invalid_argument("Frequency must be positive.");
            (void)segment_plane_crossing(tx, rx, screen.plane);
            PoKernel kern;
            kern.tx = tx;
            kern.rx = rx;
            kern.plane = screen.plane;
            kern.basis = screen.basis;
            kern.lambda = speed_of_light / f_hz;
            kern.k = two_pi / kern.lambda;
            kern.d = distance(tx, rx);
            return kern;
        }

        // Pairwise summation keeps the reduction order fixed and the error small
        inline std::complex<double> pairwise_sum(const std::vector<std::complex<double>> &v, std::size_t lo, std::size_t hi)
        {
            if (hi - lo <= 8)
            {
                std::complex<double> s{0.0, 0.0};
                for (std::size_t i = lo; i < hi; ++i)
                    s += v[i];
                return s;
            }
            std::size_t mid = lo + (hi - lo) / 2;
            return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
        }

        inline std::complex<double> occupied_integral(const PoKernel &kern, const OccupancyGrid &g, int n)
        {
            const double h = g.pitch / n;
            std::vector<std::complex<double>> parts;
            parts.reserve(g.occupied_count());
            for (int j = 0; j < g.nv; ++j)
                for (int i = 0; i < g.nu; ++i)
                {
                    if (!g.at(i, j))
                        continue;
                    std::complex<double> cell{0.0, 0.0};
                    double ub = g.u0 + i * g.pitch, vb = g.v0 + j * g.pitch;
                    for (int b = 0; b < n; ++b)
                        for (int a = 0; a < n; ++a)
                            cell += kern.square(ub + (a + 0.5) * h, vb + (b + 0.5) * h, h);
                    parts.push_back(cell);
                }
            return pairwise_sum(parts, 0, parts.size());
        }

        // Raised-cosine taper in r^2 between r_in and r_out
        inline double taper(double r2, double r_in, double r_out)
        {
            double a = r_in * r_in, b = r_out * r_out;
            if (r2 <= a)
                return 1.0;
            if (r2 >= b)
                return 0.0;
            return 0.5 * (1.0 + std::cos(pi * (r2 - a) / (b - a)));
        }

        struct LinkGeom
        {
            UV o;
            double rho;
        };

        inline LinkGeom po_link_geom(const PoKernel &kern)
        {
            double t = segment_plane_crossing(kern.tx, kern.rx, kern.plane);
            PlaneCoords pc = project_to_plane(lerp(kern.tx, kern.rx, t), kern.plane, kern.basis);
            double d1 = t * kern.d, d2 = (1.0 - t) * kern.d;
            return {{pc.u, pc.v}, d1 * d2 / (d1 + d2)};
        }

        // Tapered integral over the open plane; cells of `blocked` (if given)
        // are excluded. Window radii in units of the first Fresnel-zone radius
        // unless the blocked region extends further.
        inline std::complex<double> tapered_plane_integral(const PoKernel &kern, double h, const OccupancyGrid *blocked,
                                                           double min_inner_radius)
        {
            auto lg = po_link_geom(kern);
            double rf = std::sqrt(kern.lambda * lg.rho);
            double r_in = std::max(6.0 * rf, min_inner_radius);
            // ~30 Fresnel zones across the taper
            double r_out = std::sqrt(r_in * r_in + 60.0 * kern.lambda * lg.rho);

            // Sub-cells aligned with the blocked grid so excluded cells tile exactly
            double ua = blocked ? blocked->u0 : lg.o.u;
            double va = blocked ? blocked->v0 : lg.o.v;
            int i0 = int(std::floor((lg.o.u - r_out - ua) / h)), i1 = int(std::ceil((lg.o.u + r_out - ua) / h));
            int j0 = int(std::floor((lg.o.v - r_out - va) / h)), j1 = int(std::ceil((lg.o.v + r_out - va) / h));

            std::vector<std::complex<double>> rows;
            rows.reserve(std::size_t(j1 - j0));
            for (int j = j0; j < j1; ++j)
            {
                std::complex<double> row{0.0, 0.0};
                double v = va + (j + 0.5) * h;
                for (int i = i0; i < i1; ++i)
                {
                    double u = ua + (i + 0.5) * h;
                    double du = u - lg.o.u, dv = v - lg.o.v;
                    double w = taper(du * du + dv * dv, r_in, r_out);
                    if (w == 0.0)
                        continue;
                    if (blocked)
                    {
                        int ci = int(std::floor((u - blocked->u0) / blocked->pitch));
                        int cj = int(std::floor((v - blocked->v0) / blocked->pitch));
                        if (blocked->at(ci, cj))
                            continue;
                    }
                    row += w * kern.square(u, v, h);
                }
                rows.push_back(row);
            }
            return pairwise_sum(rows, 0, rows.size());
        }

        inline double max_blocked_radius(const OccupancyGrid &g, const UV &o)
        {
            double r = 0.0;
            for (int j = 0; j < g.nv; ++j)
                for (int i = 0; i < g.nu; ++i)
                    if (g.at(i, j))
                        for (int c = 0; c < 4; ++c)
                        {
                            double u = g.u0 + (i + (c & 1)) * g.pitch - o.u;
                            double v = g.v0 + (j + (c >> 1)) * g.pitch - o.v;
                            r = std::max(r, std::hypot(u, v));
                        }
            return r;
        }

        inline double db_error(std::complex<double> e) { return std::abs(20.0 * std::log10(std::abs(e))); }
    } // namespace detail

    /// Free-space self-test: tapered full-plane integral at sub-cell size h,
    /// returned as |20 log10 |E|| in dB.
    inline double po_free_space_self_test_db(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx, double f_hz,
                                             double h)
    {
        auto kern = detail::make_kernel(screen, tx, rx, f_hz);
        return detail::db_error(detail::tapered_plane_integral(kern, h, nullptr, 0.0));
    }

    /// Physical-optics field at Rx relative to free space, with diagnostics.
    inline PoResult po_field_oracle_detailed(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx,
                                             double f_hz = 300e9, const PoOptions &opt = {})
    {
        auto kern = detail::make_kernel(screen, tx, rx, f_hz);
        const OccupancyGrid &g = screen.occupancy;

        PoResult res;
        if (g.occupied_count() == 0)
        {
            res.field = {1.0, 0.0};
            return res;
        }

        // coarsest level: sub-cell no larger than subcell_wavelengths * lambda
        int n = 1;
        while (g.pitch / n > opt.subcell_wavelengths * kern.lambda && n < opt.max_subdiv)
            n *= 2;

        std::complex<double> prev = detail::occupied_integral(kern, g, n);
        while (true)
        {
            int n2 = 2 * n;
            if (n2 > opt.max_subdiv)
            {
                std::ostringstream msg;
                msg << "Physical-optics quadrature did not converge: |dE| = " << res.last_delta << " at " << n
                    << " sub-cells per cell (tolerance " << opt.abs_tol << ", self-test " << res.self_test_db << " dB).";
                throw quadrature_error(msg.str(), res);
            }
            std::complex<double> cur = detail::occupied_integral(kern, g, n2);
            res.last_delta = std::abs(cur - prev);
            res.history.push_back(res.last_delta);
            res.self_test_db = detail::db_error(detail::tapered_plane_integral(kern, g.pitch / n2, nullptr, 0.0));
            if (res.last_delta / 3.0 < opt.abs_tol && res.self_test_db < opt.self_test_tol_db)
            {
                res.subdiv = n2;
                res.field = 1.0 - (4.0 * cur - prev) / 3.0;
                return res;
            }
            prev = cur;
            n = n2;
        }
    }

    inline std::complex<double> po_field_oracle(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx,
                                                double f_hz = 300e9, const PoOptions &opt = {})
    {
        return po_field_oracle_detailed(screen, tx, rx, f_hz, opt).field;
    }

    /// Field through the complementary screen: only the occupied cells are open.
    inline std::complex<double> po_field_complement(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx,
                                                    double f_hz, int subdiv)
    {
        auto kern = detail::make_kernel(screen, tx, rx, f_hz);
        return detail::occupied_integral(kern, screen.occupancy, subdiv);
    }

    /// Direct tapered integration over the open part of the plane (no Babinet
    /// shortcut). Expensive; used to cross-check the oracle.
    inline std::complex<double> po_field_open_aperture(const ScreenSilhouette &screen, const Point3 &tx, const Point3 &rx,
                                                       double f_hz, int subdiv)
    {
        auto kern = detail::make_kernel(screen, tx, rx, f_hz);
        auto lg = detail::po_link_geom(kern);
        double rmax = detail::max_blocked_radius(screen.occupancy, lg.o);
        double rf = std::sqrt(kern.lambda * lg.rho);
        return detail::tapered_plane_integral(kern, screen.occupancy.pitch / subdiv, &screen.occupancy, rmax + 2.0 * rf);
    }

} // namespace thz

#endif
