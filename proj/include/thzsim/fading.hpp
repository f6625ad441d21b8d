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

// Time-varying human-body shadowing: frame interpolation and fading series.

#ifndef THZSIM_FADING_HPP
#define THZSIM_FADING_HPP

#include "thzsim/diffraction.hpp"
#include "thzsim/parallel.hpp"
#include "thzsim/po_oracle.hpp"
#include "thzsim/screen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace thz
{
    enum class ScreenModel
    {
        human_shaped,
        rectangular
    };

    inline const char *to_string(ScreenModel m) { return m == ScreenModel::human_shaped ? "human_shaped" : "rectangular"; }

    inline ScreenModel screen_model_from_string(const std::string &s)
    {
        if (s == "human_shaped")
            return ScreenModel::human_shaped;
        if (s == "rectangular")
            return ScreenModel::rectangular;
        throw std::invalid_argument("Unknown screen model '" + s + "'.");
    }

    /// LoS-normalized complex gain sampled at fs_hz, starting at t0_s.
    struct FadingSeries
    {
        double fs_hz = 30000.0;
        double t0_s = 0.0;
        std::vector<std::complex<double>> samples;
        std::vector<std::uint8_t> lit; // 1 where the LoS is not blocked
        bool resampled_points = false; // frames had differing point counts
        std::size_t degenerate_samples = 0;

        double time(std::size_t n) const { return t0_s + double(n) / fs_hz; }
    };

    struct FadingOptions
    {
        double fs_hz = 30000.0;
        double pitch_m = 0.01;
        double f_hz = default_carrier_hz;
        unsigned jobs = 1;
    };

    namespace detail
    {
        // Bucket grid for nearest-neighbour queries on centroid-relative points
        class PointIndex
        {
        public:
            PointIndex(const std::vector<Point3> &pts, double cell) : pts_(pts), cell_(cell)
            {
                for (std::size_t i = 0; i < pts.size(); ++i)
                    buckets_[key(cell_of(pts[i]))].push_back(i);
            }

            std::size_t nearest(const Point3 &q) const
            {
                auto c = cell_of(q);
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (long r = 0;; ++r)
                {
                    // all points within r cells are checked once the ring is complete
                    for (long dx = -r; dx <= r; ++dx)
                        for (long dy = -r; dy <= r; ++dy)
                            for (long dz = -r; dz <= r; ++dz)
                            {
                                if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r)
                                    continue;
                                auto it = buckets_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                                if (it == buckets_.end())
                                    continue;
                                for (std::size_t i : it->second)
                                {
                                    double d = distance(pts_[i], q);
                                    if (d < best_d || (d == best_d && i < best))
                                        best_d = d, best = i;
                                }
                            }
                    if (best_d <= double(r) * cell_)
                        return best;
                    if (r > 100000)
                        return best;
                }
            }

        private:
            std::array<long, 3> cell_of(const Point3 &p) const
            {
                return {long(std::floor(p.x / cell_)), long(std::floor(p.y / cell_)), long(std::floor(p.z / cell_))};
            }
            static std::uint64_t key(const std::array<long, 3> &c)
            {
                auto f = [](long v) { return std::uint64_t(v + (1l << 20)) & 0x1fffffull; };
                return (f(c[0]) << 42) | (f(c[1]) << 21) | f(c[2]);
            }
            const std::vector<Point3> &pts_;
            double cell_;
            std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
        };

        inline Point3 centroid(const std::vector<Point3> &pts)
        {
            Point3 c{};
            for (const auto &p : pts)
                c += p;
            return c * (1.0 / double(pts.size()));
        }
    } // namespace detail

    /// Checks timestamps and brings every frame to the first frame's point
    /// count. Frames with a different count are re-paired by nearest
    /// neighbour (centroid-relative) to the first frame's points.
    inline std::vector<HumanFrame> align_frames(const std::vector<HumanFrame> &frames, bool *resampled = nullptr)
    {
        if (frames.size() < 2)
            throw std::invalid_argument("A fading series needs at least two frames.");
        for (std::size_t k = 0; k < frames.size(); ++k)
        {
            if (frames[k].points.empty())
                throw std::invalid_argument("Frame " + std::to_string(k) + " contains no points.");
            if (!std::isfinite(frames[k].t_s))
                throw std::invalid_argument("Frame " + std::to_string(k) + " has a non-finite timestamp.");
            if (k > 0 && !(frames[k].t_s > frames[k - 1].t_s))
                throw std::invalid_argument("Frame timestamps must be strictly increasing.");
        }
        std::vector<HumanFrame> out = frames;
        bool changed = false;
        const auto &ref = frames.front().points;
        const Point3 ref_c = detail::centroid(ref);
        for (std::size_t k = 1; k < out.size(); ++k)
        {
            if (out[k].points.size() == ref.size())
                continue;
            changed = true;
            const Point3 c = detail::centroid(frames[k].points);
            std::vector<Point3> rel(frames[k].points.size());
            for (std::size_t i = 0; i < rel.size(); ++i)
                rel[i] = frames[k].points[i] - c;
            detail::PointIndex index(rel, 0.02);
            std::vector<Point3> paired(ref.size());
            for (std::size_t i = 0; i < ref.size(); ++i)
                paired[i] = frames[k].points[index.nearest(ref[i] - ref_c)];
            out[k].points = std::move(paired);
        }
        if (resampled)
            *resampled = changed;
        return out;
    }

    /// Per-point linear interpolation between the bracketing frames
    /// (frames must be aligned). Times outside the sequence are clamped.
    inline HumanFrame interpolate_frame(const std::vector<HumanFrame> &aligned, double t)
    {
        if (aligned.empty())
            throw std::invalid_argument("No frames to interpolate.");
        if (t <= aligned.front().t_s)
            return {t, aligned.front().points};
        if (t >= aligned.back().t_s)
            return {t, aligned.back().points};
        auto it = std::upper_bound(aligned.begin(), aligned.end(), t,
                                   [](double x, const HumanFrame &f) { return x < f.t_s; });
        const HumanFrame &b = *it, &a = *(it - 1);
        const double w = (t - a.t_s) / (b.t_s - a.t_s);
        HumanFrame f;
        f.t_s = t;
        f.points.resize(a.points.size());
        for (std::size_t i = 0; i < a.points.size(); ++i)
            f.points[i] = lerp(a.points[i], b.points[i], w);
        return f;
    }

    /// Number of output samples: round(duration * fs).
    inline std::size_t series_length(const std::vector<HumanFrame> &frames, double fs_hz)
    {
        if (!(fs_hz > 0.0) || !std::isfinite(fs_hz))
            throw std::invalid_argument("Sampling rate must be positive.");
        double dur = frames.back().t_s - frames.front().t_s;
        return std::size_t(std::llround(dur * fs_hz));
    }

    inline ScreenSilhouette model_screen(ScreenModel model, const HumanFrame &f, const Point3 &tx, const Point3 &rx,
                                         double pitch_m)
    {
        return model == ScreenModel::human_shaped ? build_screen(f, tx, rx, pitch_m) : rect_screen(f, tx, rx, pitch_m);
    }

    namespace detail
    {
        struct SampleResult
        {
            std::complex<double> field;
            bool lit = true;
            bool degenerate = false;
        };

        template <class Eval>
        FadingSeries run_series(const std::vector<HumanFrame> &frames, const FadingOptions &opt, Eval &&eval)
        {
            FadingSeries fs;
            fs.fs_hz = opt.fs_hz;
            auto aligned = align_frames(frames, &fs.resampled_points);
            fs.t0_s = aligned.front().t_s;
            const std::size_t n = series_length(aligned, opt.fs_hz);
            auto res = parallel_map(n, opt.jobs, [&](std::size_t k) {
                return eval(interpolate_frame(aligned, fs.t0_s + double(k) / opt.fs_hz));
            });
            fs.samples.resize(n);
            fs.lit.resize(n);
            for (std::size_t k = 0; k < n; ++k)
            {
                fs.samples[k] = res[k].field;
                fs.lit[k] = res[k].lit ? 1 : 0;
                fs.degenerate_samples += res[k].degenerate ? 1 : 0;
            }
            return fs;
        }
    } // namespace detail

    /// Edge-diffraction fading series for the selected screen model.
    inline FadingSeries fading_series(const std::vector<HumanFrame> &frames, const Point3 &tx, const Point3 &rx,
                                      ScreenModel model, const FadingOptions &opt = {})
    {
        return detail::run_series(frames, opt, [&](const HumanFrame &f) {
            ScreenSilhouette s = model_screen(model, f, tx, rx, opt.pitch_m);
            StationarySet sp = find_stationary_points(s, tx, rx, opt.f_hz);
            return detail::SampleResult{edge_field(sp, s, tx, rx, opt.f_hz), !los_blocked(tx, rx, s), sp.degenerate()};
        });
    }

    /// Physical-optics reference series on the human-shaped silhouette.
    inline FadingSeries oracle_fading_series(const std::vector<HumanFrame> &frames, const Point3 &tx, const Point3 &rx,
                                             const FadingOptions &opt = {}, const PoOptions &po = {})
    {
        return detail::run_series(frames, opt, [&](const HumanFrame &f) {
            ScreenSilhouette s = build_screen(f, tx, rx, opt.pitch_m);
            return detail::SampleResult{po_field_oracle(s, tx, rx, opt.f_hz, po), !los_blocked(tx, rx, s), false};
        });
    }

} // namespace thz

#endif
