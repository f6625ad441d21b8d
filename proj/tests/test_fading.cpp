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

#include "thzsim/fading.hpp"
#include "thzsim/phantom.hpp"
#include "thzsim/prediction.hpp"

using namespace thz;

namespace
{
    const Point3 tx{0.0, 0.0, 1.2}, rx{3.5, 0.0, 1.2};
} // namespace

TEST_CASE("Fading - Static frames give a constant series")
{
    auto c = cylinder_phantom({1.75, 0.3, 0.0}, 0.4, 1.7, 0.01, 0.0);
    auto c2 = c;
    c2.t_s = 0.1;
    FadingOptions opt;
    opt.fs_hz = 100.0;
    auto s = fading_series({c, c2}, tx, rx, ScreenModel::human_shaped, opt);
    REQUIRE(s.samples.size() == 10);
    for (const auto &z : s.samples)
        CHECK(z == s.samples.front());
    CHECK(!s.resampled_points);
    CHECK(s.time(3) == Catch::Approx(0.03));
}

TEST_CASE("Fading - Series length and timestamps")
{
    auto c = cylinder_phantom({1.75, 1.0, 0.0}, 0.3, 1.7, 0.02, 0.0);
    auto c2 = c;
    c2.t_s = 0.1234;
    CHECK(series_length({c, c2}, 100.0) == 12);
    CHECK(series_length({c, c2}, 30000.0) == 3702);
    CHECK_THROWS_AS(series_length({c, c2}, 0.0), std::invalid_argument);

    c2.t_s = 0.0;
    CHECK_THROWS_AS(align_frames({c, c2}), std::invalid_argument);
    c2.t_s = -0.1;
    CHECK_THROWS_AS(align_frames({c, c2}), std::invalid_argument);
    CHECK_THROWS_AS(align_frames({c}), std::invalid_argument);
    c2.t_s = 0.1;
    c2.points.clear();
    CHECK_THROWS_AS(align_frames({c, c2}), std::invalid_argument);
    CHECK_THROWS_AS(screen_model_from_string("ellipse"), std::invalid_argument);
}

TEST_CASE("Fading - Frames with differing point counts")
{
    auto a = cylinder_phantom({1.75, 1.0, 0.0}, 0.3, 1.7, 0.02, 0.0);
    auto b = cylinder_phantom({1.75, 1.1, 0.0}, 0.3, 1.7, 0.015, 0.1);
    REQUIRE(a.points.size() != b.points.size());
    bool flag = false;
    auto al = align_frames({a, b}, &flag);
    CHECK(flag);
    REQUIRE(al[1].points.size() == a.points.size());
    // re-paired points stay on the second frame's body
    for (const auto &p : al[1].points)
        CHECK(std::hypot(p.x - 1.75, p.y - 1.1) < 0.151);

    // interpolation is per point and linear
    auto mid = interpolate_frame(al, 0.05);
    for (std::size_t i = 0; i < mid.points.size(); i += 97)
        CHECK(distance(mid.points[i], lerp(al[0].points[i], al[1].points[i], 0.5)) < 1e-12);
}

TEST_CASE("Fading - Doppler of the diffracted term follows the excess path")
{
    // tall, wide plate moving sideways; only its near edge is stationary
    const double lambda = wavelength(300e9), v = 1.0, y0 = 0.30, dur = 0.05;
    auto plate = box_phantom({1.75, y0 + 1.5, -0.3}, {0.0, 1.0, 0.0}, 3.0, 0.02, 3.0, 0.01);
    auto frames = translate_frames(plate, {0.0, v, 0.0}, dur, 100.0);
    FadingOptions opt;
    opt.fs_hz = 2000.0;
    auto s = fading_series(frames, tx, rx, ScreenModel::rectangular, opt);
    REQUIRE(s.samples.size() == 100);

    // unwrapped phase of s - 1 against -k * excess of a straight edge at offset y
    auto excess = [&](double y) { return std::hypot(1.75, y) * 2.0 - 3.5; };
    double unwrapped = 0.0, prev = std::arg(s.samples[0] - 1.0);
    for (std::size_t n = 1; n < s.samples.size(); ++n)
    {
        double ph = std::arg(s.samples[n] - 1.0);
        unwrapped += wrap_angle(ph - prev);
        prev = ph;
        CHECK(s.lit[n] == 1);
    }
    double t_end = double(s.samples.size() - 1) / opt.fs_hz;
    double expect = -two_pi / lambda * (excess(y0 + v * t_end) - excess(y0));
    CHECK(unwrapped < 0.0); // receding edge: negative Doppler
    CHECK(std::abs(unwrapped / expect - 1.0) < 0.02);
}

TEST_CASE("Fading - Walk across the LoS")
{
    WalkParams w;
    w.start = {1.75, -1.2, 0.0};
    w.heading = {0.0, 1.0, 0.0};
    w.speed_mps = 1.0;
    w.duration_s = 2.4;
    w.frame_rate_hz = 100.0;
    FadingOptions opt;
    opt.fs_hz = 50.0;
    auto s = fading_series(articulated_walk(w), tx, rx, ScreenModel::human_shaped, opt);
    REQUIRE(s.samples.size() == 120);

    // side-on profile: blocked for about one body depth at 1 m/s
    std::size_t blocked = 0;
    for (auto l : s.lit)
        blocked += l ? 0 : 1;
    double dwell = double(blocked) / opt.fs_hz;
    CHECK(dwell > 0.2);
    CHECK(dwell < 0.6);

    // deep fade while blocked, free space at both ends
    double worst = 0.0;
    for (const auto &z : s.samples)
        worst = std::min(worst, 20.0 * std::log10(std::abs(z)));
    CHECK(worst < -15.0);
    CHECK(std::abs(20.0 * std::log10(std::abs(s.samples.front()))) < 0.5);
    CHECK(std::abs(20.0 * std::log10(std::abs(s.samples.back()))) < 0.5);
}

TEST_CASE("Fading - Prediction error")
{
    FadingSeries ref;
    ref.fs_hz = 100.0;
    for (int n = 0; n < 50; ++n)
    {
        ref.samples.push_back(n < 40 ? std::polar(1.0, 0.1 * n) : std::complex<double>(0.05, 0.0));
        ref.lit.push_back(n < 40 ? 1 : 0);
    }
    auto same = prediction_error(ref, ref);
    CHECK(same.bias == 0.0);
    CHECK(same.rms == 0.0);
    CHECK(same.lit_samples == 40);

    // +1 dB on every sample
    auto up = ref;
    for (auto &z : up.samples)
        z *= std::pow(10.0, 1.0 / 20.0);
    auto pe = prediction_error(up, ref);
    CHECK(pe.bias_db_equiv == Catch::Approx(1.0).margin(1e-9));
    CHECK(pe.cdf.size() == 40);

    auto shorter = ref;
    shorter.samples.pop_back();
    CHECK_THROWS_AS(prediction_error(shorter, ref), std::invalid_argument);
    auto dark = ref;
    std::fill(dark.lit.begin(), dark.lit.end(), 0);
    CHECK_THROWS_AS(prediction_error(ref, dark), std::invalid_argument);
}
