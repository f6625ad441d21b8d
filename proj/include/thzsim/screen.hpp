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

#ifndef THZSIM_SCREEN_HPP
#define THZSIM_SCREEN_HPP

#include "thzsim/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace thz
{
    /// Body point cloud at one time instant.
    struct HumanFrame
    {
        double t_s = 0.0;
        std::vector<Point3> points;
    };

    struct UV
    {
        double u = 0.0;
        double v = 0.0;
    };

    /// Boolean raster in plane coordinates. Cell (i,j) covers
    /// [u0 + i*pitch, u0 + (i+1)*pitch) x [v0 + j*pitch, v0 + (j+1)*pitch).
    struct OccupancyGrid
    {
        double u0 = 0.0;
        double v0 = 0.0;
        double pitch = 0.01;
        int nu = 0;
        int nv = 0;
        std::vector<std::uint8_t> cells;

        bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < nu && j < nv; }
        bool at(int i, int j) const { return in_range(i, j) && cells[std::size_t(j) * nu + i] != 0; }
        void set(int i, int j, bool value) { cells[std::size_t(j) * nu + i] = value ? 1 : 0; }

        std::size_t occupied_count() const
        {
            return std::size_t(std::count(cells.begin(), cells.end(), std::uint8_t(1)));
        }
        double occupied_area() const { return double(occupied_count()) * pitch * pitch; }
        UV cell_center(int i, int j) const { return {u0 + (i + 0.5) * pitch, v0 + (j + 0.5) * pitch}; }
    };

    /// Human-shaped (or rectangular) blocking screen in the plane perpendicular
    /// to the LoS. Boundary chains run with the occupied region on their left;
    /// outer chains are counter-clockwise in (u,v), holes clockwise.
    struct ScreenSilhouette
    {
        Plane plane;
        PlaneBasis basis;
        double pitch_m = 0.01;
        OccupancyGrid occupancy;
        std::vector<std::vector<UV>> boundary;

        // Exact extent of the projected cloud (before rasterization)
        double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0;
        std::size_t point_count = 0;

        double area() const { return occupancy.occupied_area(); }
    };

    namespace detail
    {
        inline OccupancyGrid dilate3(const OccupancyGrid &g)
        {
            OccupancyGrid out = g;
            for (int j = 0; j < g.nv; ++j)
                for (int i = 0; i < g.nu; ++i)
                {
                    bool any = false;
                    for (int dj = -1; dj <= 1 && !any; ++dj)
                        for (int di = -1; di <= 1 && !any; ++di)
                            any = g.at(i + di, j + dj);
                    out.set(i, j, any);
                }
            return out;
        }

        inline OccupancyGrid erode3(const OccupancyGrid &g)
        {
            OccupancyGrid out = g;
            for (int j = 0; j < g.nv; ++j)
                for (int i = 0; i < g.nu; ++i)
                {
                    bool all = true;
                    for (int dj = -1; dj <= 1 && all; ++dj)
                        for (int di = -1; di <= 1 && all; ++di)
                            all = g.at(i + di, j + dj);
                    out.set(i, j, all);
                }
            return out;
        }

        // Directions: 0 = +u, 1 = +v, 2 = -u, 3 = -v
        constexpr std::array<int, 4> step_u{1, 0, -1, 0};
        constexpr std::array<int, 4> step_v{0, 1, 0, -1};

        struct GridEdge
        {
            int i, j; // start vertex
            int dir;
        };
    } // namespace detail

    /// Morphological closing with a 3x3 structuring element.
    inline OccupancyGrid close_grid(const OccupancyGrid &g) { return detail::erode3(detail::dilate3(g)); }

    /// Traces the cell-edge boundary of the occupied region as closed chains.
    /// At saddle vertices the chain turns left, so diagonally touching cells
    /// end up on separate chains.
    /// Collinear vertices are dropped, so a single cell yields four vertices.
    inline std::vector<std::vector<UV>> trace_boundary(const OccupancyGrid &g)
    {
        using namespace detail;
        const int nvu = g.nu + 1, nvv = g.nv + 1;
        auto vid = [nvu](int i, int j) { return std::size_t(j) * nvu + i; };

        // Up to two outgoing edges per vertex
        std::vector<std::array<int, 2>> out(std::size_t(nvu) * nvv, {-1, -1});
        std::vector<GridEdge> edges;
        auto add = [&](int i, int j, int dir) {
            auto &slot = out[vid(i, j)];
            int id = int(edges.size());
            edges.push_back({i, j, dir});
            if (slot[0] < 0)
                slot[0] = id;
            else
                slot[1] = id;
        };

        for (int j = 0; j < g.nv; ++j)
            for (int i = 0; i < g.nu; ++i)
            {
                if (!g.at(i, j))
                    continue;
                if (!g.at(i, j - 1))
                    add(i, j, 0);
                if (!g.at(i + 1, j))
                    add(i + 1, j, 1);
                if (!g.at(i, j + 1))
                    add(i + 1, j + 1, 2);
                if (!g.at(i - 1, j))
                    add(i, j + 1, 3);
            }

        std::vector<std::uint8_t> used(edges.size(), 0);
        std::vector<std::vector<UV>> chains;

        for (std::size_t first = 0; first < edges.size(); ++first)
        {
            if (used[first])
                continue;
            std::vector<std::array<int, 2>> verts;
            std::size_t cur = first;
            while (true)
            {
                used[cur] = 1;
                const GridEdge &e = edges[cur];
                verts.push_back({e.i, e.j});
                int ei = e.i + step_u[std::size_t(e.dir)], ej = e.j + step_v[std::size_t(e.dir)];
                const auto &slot = out[vid(ei, ej)];
                int next = -1;
                if (slot[1] < 0)
                    next = slot[0];
                else
                {
                    // Saddle vertex: take the left turn
                    int want = (e.dir + 1) % 4;
                    next = edges[std::size_t(slot[0])].dir == want ? slot[0] : slot[1];
                }
                if (next < 0)
                    throw std::logic_error("Open boundary chain while tracing occupancy grid.");
                if (std::size_t(next) == first)
                    break;
                if (used[std::size_t(next)])
                    throw std::logic_error("Boundary chain revisits an edge.");
                cur = std::size_t(next);
            }

            // Drop collinear vertices
            std::vector<UV> chain;
            const std::size_t n = verts.size();
            for (std::size_t k = 0; k < n; ++k)
            {
                const auto &a = verts[(k + n - 1) % n];
                const auto &b = verts[k];
                const auto &c = verts[(k + 1) % n];
                long cr = long(b[0] - a[0]) * (c[1] - b[1]) - long(b[1] - a[1]) * (c[0] - b[0]);
                if (cr != 0)
                    chain.push_back({g.u0 + b[0] * g.pitch, g.v0 + b[1] * g.pitch});
            }
            chains.push_back(std::move(chain));
        }
        return chains;
    }

    /// True iff the Tx-Rx segment pierces the screen plane inside an occupied
    /// cell. A piercing point on a cell border counts as blocked when any
    /// adjacent cell is occupied.
    inline bool los_blocked(const Point3 &tx, const Point3 &rx, const ScreenSilhouette &screen)
    {
        require_finite(tx, "Tx position");
        require_finite(rx, "Rx position");
        double t = segment_plane_crossing(tx, rx, screen.plane);
        PlaneCoords pc = project_to_plane(lerp(tx, rx, t), screen.plane, screen.basis);

        const OccupancyGrid &g = screen.occupancy;
        auto candidates = [&](double x, std::array<int, 2> &idx) {
            double f = x / g.pitch;
            double fl = std::floor(f);
            idx = {int(fl), int(fl)};
            if (std::abs(f - std::round(f)) < 1e-9)
                idx = {int(std::round(f)) - 1, int(std::round(f))};
        };
        std::array<int, 2> ci{}, cj{};
        candidates(pc.u - g.u0, ci);
        candidates(pc.v - g.v0, cj);
        for (int i : ci)
            for (int j : cj)
                if (g.at(i, j))
                    return true;
        return false;
    }

    namespace detail
    {
        struct ProjectedCloud
        {
            Plane plane;
            PlaneBasis basis;
            std::vector<UV> uv;
            double u_min, u_max, v_min, v_max;
        };

        // In-plane basis built from the normal oriented to a fixed half-space,
        // so that swapping Tx and Rx rasterizes the same silhouette (exact
        // reciprocity of everything computed on the grid).
        inline PlaneBasis canonical_basis(const Plane &plane)
        {
            const Point3 &n = plane.normal;
            bool flip = n.x < 0.0 || (n.x == 0.0 && (n.y < 0.0 || (n.y == 0.0 && n.z < 0.0)));
            return plane_basis({plane.origin, flip ? -n : n});
        }

        inline ProjectedCloud project_frame(const HumanFrame &frame, const Point3 &tx, const Point3 &rx)
        {
            if (frame.points.empty())
                throw std::invalid_argument("Human frame contains no points.");
            require_finite(tx, "Tx position");
            require_finite(rx, "Rx position");

            Point3 c{};
            for (const auto &p : frame.points)
            {
                require_finite(p, "Body point");
                c += p;
            }
            c *= 1.0 / double(frame.points.size());

            Point3 link = rx - tx;
            double len = norm(link);
            if (!(len > 0.0))
                throw std::invalid_argument("Tx and Rx coincide.");
            Point3 n = link * (1.0 / len);
            double s = dot(c - tx, n) / len;
            if (!(s > 0.0 && s < 1.0))
                throw std::invalid_argument("Body centroid lies outside the Tx-Rx slab.");

            ProjectedCloud pc;
            pc.plane = {c, n};
            pc.basis = canonical_basis(pc.plane);
            pc.uv.reserve(frame.points.size());
            pc.u_min = pc.v_min = std::numeric_limits<double>::infinity();
            pc.u_max = pc.v_max = -std::numeric_limits<double>::infinity();
            for (const auto &p : frame.points)
            {
                Point3 d = p - c;
                UV q{dot(d, pc.basis.u), dot(d, pc.basis.v)};
                pc.u_min = std::min(pc.u_min, q.u);
                pc.u_max = std::max(pc.u_max, q.u);
                pc.v_min = std::min(pc.v_min, q.v);
                pc.v_max = std::max(pc.v_max, q.v);
                pc.uv.push_back(q);
            }
            return pc;
        }

        // Cell boundaries sit a quarter pitch off the multiples of the pitch
        // around the plane origin. Regular point lattices centered on the
        // centroid then never land on a boundary, where rounding noise would
        // flip the edge by a whole cell between otherwise identical frames.
        inline constexpr double grid_phase = 0.25;

        // Grid with two empty cells of padding on every side.
        inline OccupancyGrid empty_grid_for(const ProjectedCloud &pc, double pitch)
        {
            OccupancyGrid g;
            g.pitch = pitch;
            int i0 = int(std::floor(pc.u_min / pitch - grid_phase)) - 2;
            int i1 = int(std::floor(pc.u_max / pitch - grid_phase)) + 2;
            int j0 = int(std::floor(pc.v_min / pitch - grid_phase)) - 2;
            int j1 = int(std::floor(pc.v_max / pitch - grid_phase)) + 2;
            g.u0 = (i0 + grid_phase) * pitch;
            g.v0 = (j0 + grid_phase) * pitch;
            g.nu = i1 - i0 + 1;
            g.nv = j1 - j0 + 1;
            g.cells.assign(std::size_t(g.nu) * g.nv, 0);
            return g;
        }

        inline void require_pitch(double pitch_m)
        {
            if (!(pitch_m > 0.0) || !std::isfinite(pitch_m))
                throw std::invalid_argument("Grid pitch must be positive.");
        }

        inline ScreenSilhouette finish_screen(const ProjectedCloud &pc, OccupancyGrid grid, std::size_t n_points)
        {
            ScreenSilhouette s;
            s.plane = pc.plane;
            s.basis = pc.basis;
            s.pitch_m = grid.pitch;
            s.boundary = trace_boundary(grid);
            s.occupancy = std::move(grid);
            s.u_min = pc.u_min, s.u_max = pc.u_max, s.v_min = pc.v_min, s.v_max = pc.v_max;
            s.point_count = n_points;
            return s;
        }
    } // namespace detail

    /// Projects a body point cloud onto the plane through its centroid with
    /// normal along Tx->Rx, rasterizes it at `pitch_m`, applies a one-cell
    /// morphological closing and traces the boundary.
    inline ScreenSilhouette build_screen(const HumanFrame &frame, const Point3 &tx, const Point3 &rx, double pitch_m = 0.01)
    {
        detail::require_pitch(pitch_m);
        auto pc = detail::project_frame(frame, tx, rx);
        OccupancyGrid g = detail::empty_grid_for(pc, pitch_m);
        for (const auto &q : pc.uv)
        {
            int i = int(std::floor((q.u - g.u0) / pitch_m));
            int j = int(std::floor((q.v - g.v0) / pitch_m));
            g.set(std::clamp(i, 0, g.nu - 1), std::clamp(j, 0, g.nv - 1), true);
        }
        return detail::finish_screen(pc, close_grid(g), frame.points.size());
    }

    /// Conventional rectangular blocker: the axis-aligned bounding box of the
    /// projected cloud, rasterized on the same grid as build_screen.
    inline ScreenSilhouette rect_screen(const HumanFrame &frame, const Point3 &tx, const Point3 &rx, double pitch_m = 0.01)
    {
        detail::require_pitch(pitch_m);
        auto pc = detail::project_frame(frame, tx, rx);
        OccupancyGrid g = detail::empty_grid_for(pc, pitch_m);
        int i0 = int(std::floor((pc.u_min - g.u0) / pitch_m)), i1 = int(std::floor((pc.u_max - g.u0) / pitch_m));
        int j0 = int(std::floor((pc.v_min - g.v0) / pitch_m)), j1 = int(std::floor((pc.v_max - g.v0) / pitch_m));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i)
                g.set(i, j, true);
        return detail::finish_screen(pc, std::move(g), frame.points.size());
    }

    /// Screen with an explicitly supplied occupancy (analytic test shapes).
    /// The plane passes through `origin` with normal along Tx->Rx.
    inline ScreenSilhouette make_screen(const Point3 &origin, const Point3 &tx, const Point3 &rx, OccupancyGrid grid)
    {
        Plane plane = make_plane(origin, rx - tx);
        (void)segment_plane_crossing(tx, rx, plane);
        ScreenSilhouette s;
        s.plane = plane;
        s.basis = detail::canonical_basis(plane);
        s.pitch_m = grid.pitch;
        s.boundary = trace_boundary(grid);
        s.u_min = grid.u0, s.u_max = grid.u0 + grid.nu * grid.pitch;
        s.v_min = grid.v0, s.v_max = grid.v0 + grid.nv * grid.pitch;
        s.occupancy = std::move(grid);
        return s;
    }

} // namespace thz

#endif
