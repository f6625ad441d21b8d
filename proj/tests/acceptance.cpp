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

// Acceptance runner: prints one PASS/FAIL line per criterion followed by a
// summary line. The process exit status is non-zero when any criterion fails.

#include "thzsim.hpp"
#include "thzsim/scenario.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

using namespace thz;
namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string f2(double x, int prec = 2)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", prec, x);
        return buf;
    }

    unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

    double db(cdouble z) { return 20.0 * std::log10(std::abs(z)); }

    // ------------------------------------------------------------------ 1-3

    std::vector<EnsembleSummary> &ensembles()
    {
        static std::vector<EnsembleSummary> cache;
        if (cache.empty())
        {
            EnsembleOptions opt;
            opt.jobs = jobs();
            for (const auto &n : preset_names())
                cache.push_back(run_ensemble(builtin_preset(n), 1, 10000, opt));
        }
        return cache;
    }

    Outcome cluster_counts()
    {
        auto t0 = std::chrono::steady_clock::now();
        auto &ens = ensembles();
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::map<std::string, double> target = {
            {"corridor", 8.0}, {"conference_medium", 8.0}, {"conference_large", 6.0}, {"open_square", 4.0}};
        Outcome o{secs < 60.0, ""};
        for (const auto &e : ens)
        {
            o.pass = o.pass && std::abs(e.mean_cluster_count - target.at(e.preset)) <= 0.5;
            o.detail += e.preset + " " + f2(e.mean_cluster_count) + ", ";
        }
        o.detail += "10^4 seeds each in " + f2(secs, 1) + " s";
        return o;
    }

    Outcome power_fractions()
    {
        Outcome o{true, ""};
        for (const auto &e : ensembles())
        {
            double f = e.fraction_above_10db;
            o.pass = o.pass && (e.preset == "open_square" ? f < 0.10 : std::abs(f - 0.40) <= 0.05);
            o.detail += e.preset + " " + f2(100.0 * f, 1) + " %" + (e.preset == "open_square" ? "" : ", ");
        }
        return o;
    }

    Outcome delay_stats()
    {
        Outcome o{true, ""};
        for (const auto &e : ensembles())
        {
            bool outdoor = e.preset == "open_square";
            o.pass = o.pass && e.median_rms_delay_spread_ns < 10.0 &&
                     (outdoor ? e.max_excess_delay_ns <= 160.0 : e.max_excess_delay_ns < 100.0);
            o.detail += e.preset + " median DS " + f2(e.median_rms_delay_spread_ns) + " ns, max excess " +
                        f2(e.max_excess_delay_ns, 1) + " ns" + (outdoor ? "" : "; ");
        }
        return o;
    }

    // -------------------------------------------------------------------- 4

    Outcome capacity()
    {
        double eye = capacity_bps_hz(Eigen::MatrixXcd::Identity(4, 4), 20.0);
        const double closed = 4.0 * std::log2(1.0 + 100.0 / 4.0);
        auto p = builtin_preset("open_square");
        const std::size_t n = 2000;
        auto rows = parallel_map(n, jobs(), [&](std::size_t i) { return capacity_pair(p, i + 1); });
        double off = 0.0, on = 0.0;
        for (const auto &[a, b] : rows)
            off += a.bps_hz, on += b.bps_hz;
        off /= double(n), on /= double(n);
        Outcome o;
        o.pass = std::abs(eye - closed) < 1e-6 && std::abs(eye - 18.80) < 0.005 && off >= 9.0 && std::abs(on / 18.0 - 1.0) <= 0.15;
        o.detail = "H=I " + f2(eye, 6) + " bps/Hz; open_square mean over " + std::to_string(n) + " placements " + f2(off) +
                   " bps/Hz without PRS, " + f2(on) + " bps/Hz with PRS";
        return o;
    }

    // -------------------------------------------------------------------- 5

    cdouble simpson_knife_edge(double nu)
    {
        // (1+j)/2 [(1/2 - C) - j (1/2 - S)], C and S by composite Simpson
        const int n = 200000;
        const double h = nu / n;
        double c = 0.0, s = 0.0;
        for (int k = 0; k <= n; ++k)
        {
            double t = k * h, w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            c += w * std::cos(0.5 * pi * t * t);
            s += w * std::sin(0.5 * pi * t * t);
        }
        c *= h / 3.0, s *= h / 3.0;
        return cdouble(0.5, 0.5) * cdouble(0.5 - c, -(0.5 - s));
    }

    Outcome knife_edge()
    {
        double l0 = knife_edge_loss_db(0.0), linf = knife_edge_loss_db(-1e4), l1 = knife_edge_loss_db(1.0);
        double o1 = -db(simpson_knife_edge(1.0));
        Outcome o;
        o.pass = std::abs(l0 - 6.0206) <= 0.01 && std::abs(linf) <= 0.01 && std::abs(l1 - o1) <= 0.05;
        o.detail = "F(0) " + f2(l0, 4) + " dB, F(-1e4) " + f2(linf, 4) + " dB, F(1) " + f2(l1, 4) + " dB vs oracle " +
                   f2(o1, 4) + " dB";
        return o;
    }

    // -------------------------------------------------------------------- 6

    struct SuiteResult
    {
        double lit = 0.0, transition = 0.0, shadow = 0.0;
        int n_lit = 0, n_transition = 0, n_shadow = 0, transition_over = 0;
    };

    template <class MakeFrame>
    SuiteResult oracle_suite(MakeFrame &&make, const Point3 &tx, const Point3 &rx)
    {
        auto res = parallel_map(100, jobs(), [&](std::size_t i) {
            auto s = build_screen(make(i), tx, rx);
            auto sp = find_stationary_points(s, tx, rx);
            double err = std::abs(db(edge_field(sp, s, tx, rx)) - db(po_field_oracle(s, tx, rx)));
            return std::pair<double, double>(sp.nearest() ? sp.nearest()->nu : -1e9, err);
        });
        SuiteResult r;
        for (auto [nu, err] : res)
        {
            if (nu < -1.0)
                r.lit = std::max(r.lit, err), ++r.n_lit;
            else if (nu <= 1.0)
            {
                r.transition = std::max(r.transition, err), ++r.n_transition;
                r.transition_over += err > 1.5;
            }
            else
                r.shadow += err, ++r.n_shadow; // deep shadow: reported only
        }
        if (r.n_shadow)
            r.shadow /= r.n_shadow;
        return r;
    }

    Outcome oracle_agreement()
    {
        const Point3 tx{0.0, 0.0, 1.2}, rx{3.5, 0.0, 1.2};
        auto t0 = std::chrono::steady_clock::now();

        // randomized articulated human silhouettes
        std::vector<Pose> poses(100);
        Rng rng = make_rng(7, "suite");
        for (auto &p : poses)
        {
            p.gait_phase_rad = uniform(rng, 0.0, two_pi);
            p.arm_swing_deg = uniform(rng, 0.0, 40.0);
            p.leg_swing_deg = uniform(rng, 0.0, 30.0);
            p.arm_abduction_deg = uniform(rng, 0.0, 60.0);
            p.height_m = uniform(rng, 1.55, 1.95);
            double yaw = uniform(rng, -pi, pi);
            p.heading = {std::cos(yaw), std::sin(yaw), 0.0};
            double x = uniform(rng, 0.8, 2.7), off = uniform(rng, -0.7, 0.7);
            p.position = {x, off, 0.0};
        }
        auto human = oracle_suite([&](std::size_t i) { return articulated_frame(poses[i]); }, tx, rx);

        // randomized convex phantoms (boxes and cylinders), reported alongside
        std::vector<HumanFrame> convex(100);
        Rng rc = make_rng(7, "convex");
        for (auto &f : convex)
        {
            Point3 base{uniform(rc, 0.8, 2.7), uniform(rc, -0.7, 0.7), 0.0};
            double h = uniform(rc, 1.55, 1.95);
            if (uniform(rc, 0.0, 1.0) < 0.5)
            {
                double yaw = uniform(rc, -pi, pi);
                f = box_phantom(base, {std::cos(yaw), std::sin(yaw), 0.0}, uniform(rc, 0.3, 0.6), uniform(rc, 0.2, 0.4), h);
            }
            else
                f = cylinder_phantom(base, uniform(rc, 0.3, 0.6), h);
        }
        auto cvx = oracle_suite([&](std::size_t i) { return convex[i]; }, tx, rx);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        Outcome o;
        o.pass = human.lit <= 1.0 && human.transition <= 1.5 && secs < 600.0;
        o.detail = "articulated humans: worst lit " + f2(human.lit) + " dB (" + std::to_string(human.n_lit) +
                   " cases), worst transition " + f2(human.transition) + " dB (" +
                   std::to_string(human.transition_over) + " of " + std::to_string(human.n_transition) +
                   " above 1.5 dB), deep-shadow mean " + f2(human.shadow) + " dB (" + std::to_string(human.n_shadow) +
                   " cases); convex phantoms: lit " + f2(cvx.lit) + " dB, transition " + f2(cvx.transition) + " dB; " +
                   f2(secs, 1) + " s";
        return o;
    }

    // -------------------------------------------------------------------- 7

    Outcome screen_ordering()
    {
        const Point3 tx{0.0, 0.0, 1.2}, rx{3.5, 0.0, 1.2};
        WalkParams w;
        w.start = {1.75, -1.2, 0.0};
        w.heading = {0.0, 1.0, 0.0};
        w.duration_s = 1.4;
        auto frames = articulated_walk(w);
        FadingOptions opt;
        opt.fs_hz = 25.0;
        opt.jobs = jobs();
        auto ref = oracle_fading_series(frames, tx, rx, opt);
        auto hs = prediction_error(fading_series(frames, tx, rx, ScreenModel::human_shaped, opt), ref);
        auto rs = prediction_error(fading_series(frames, tx, rx, ScreenModel::rectangular, opt), ref);
        Outcome o;
        o.pass = std::abs(hs.bias) < std::abs(rs.bias);
        o.detail = "lit bias vs PO over " + std::to_string(hs.lit_samples) + " samples: human-shaped " + f2(hs.bias, 4) +
                   " (" + f2(hs.bias_db_equiv, 3) + " dB), rectangular " + f2(rs.bias, 4) + " (" +
                   f2(rs.bias_db_equiv, 3) + " dB), ratio " +
                   (hs.bias != 0.0 ? f2(std::abs(rs.bias / hs.bias), 1) : std::string("inf"));
        return o;
    }

    // -------------------------------------------------------------------- 8

    Outcome doppler()
    {
        // tone
        const double fs = 30000.0;
        std::vector<cdouble> x(30000);
        for (std::size_t n = 0; n < x.size(); ++n)
            x[n] = std::polar(1.0, two_pi * 500.0 * double(n) / fs);
        auto tone = doppler_spectrogram(x, fs);
        bool tone_ok = true;
        for (double f : doppler_peak_trace(tone))
            tone_ok = tone_ok && std::abs(f - 500.0) <= tone.bin_hz();

        // walk across the LoS
        const Point3 tx{0.0, 0.0, 1.2}, rx{3.5, 0.0, 1.2};
        WalkParams w;
        w.start = {1.75, -1.2, 0.0};
        w.heading = {0.0, 1.0, 0.0};
        w.duration_s = 2.4;
        FadingOptions opt;
        opt.fs_hz = 4000.0;
        opt.jobs = jobs();
        auto walk = fading_series(articulated_walk(w), tx, rx, ScreenModel::human_shaped, opt);
        auto sp = doppler_spectrogram(walk, 512, 0.5);
        auto trace = doppler_peak_trace(sp, 1);
        std::vector<double> before, after;
        for (std::size_t k = 0; k < trace.size(); ++k)
        {
            double y = w.start.y + w.speed_mps * (sp.times_s[k] - walk.t0_s);
            if (y < -0.35)
                before.push_back(trace[k]);
            else if (y > 0.35)
                after.push_back(trace[k]);
        }
        double mb = before.empty() ? 0.0 : quantile(before, 0.5), ma = after.empty() ? 0.0 : quantile(after, 0.5);
        bool flip = mb > 0.0 && ma < 0.0;

        // static scene
        auto box = box_phantom({1.75, 0.5, 0.0}, {0.0, 1.0, 0.0}, 0.5, 0.3, 1.75);
        auto box2 = box;
        box2.t_s = 0.5;
        FadingOptions so;
        so.fs_hz = fs;
        so.jobs = jobs();
        auto still = fading_series({box, box2}, tx, rx, ScreenModel::human_shaped, so);
        double frac = zero_doppler_energy_fraction(doppler_spectrogram(still));

        Outcome o;
        o.pass = tone_ok && flip && frac >= 0.999;
        o.detail = std::string("tone ") + (tone_ok ? "within" : "outside") + " +-1 bin; walk-across median peak " +
                   f2(mb, 0) + " Hz before, " + f2(ma, 0) + " Hz after closest approach; static 0 Hz energy " +
                   f2(100.0 * frac, 4) + " %";
        return o;
    }

    // -------------------------------------------------------------------- 9

    Outcome averaging()
    {
        double g = averaging_gain_db(100);
        Outcome o;
        o.pass = g == 20.0;
        o.detail = "averaging_gain_db(100) = " + f2(g, 6) + " dB, single-shot 40 dB -> " + f2(40.0 + g, 1) + " dB";
        return o;
    }

    // ------------------------------------------------------------------- 10

    std::string slurp(const fs::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        return s.str();
    }

    Outcome determinism()
    {
        const auto base = fs::temp_directory_path() / "thzsim_acceptance_determinism";
        fs::remove_all(base);
        const std::vector<std::pair<std::string, std::string>> runs = {
            {"qd_gen", "--set preset=corridor --set seed=3"},
            {"qd_stats", "--set preset=open_square --set seeds=200"},
            {"mimo_cap", "--set preset=open_square --set seeds=50"},
            {"hbs_run", "--set phantom.kind=articulated_walk --set phantom.duration_s=0.2 --set fs_hz=200 "
                        "--set oracle=true"},
            {"hbs_doppler", "--set phantom.kind=box --set phantom.duration_s=0.1 --set fs_hz=20000"},
            {"validate", ""},
        };
        std::size_t files = 0, diffs = 0;
        bool ran = true;
        for (const auto &[mode, args] : runs)
        {
            for (const char *tag : {"a", "b"})
            {
                auto out = base / (mode + "_" + tag);
                std::string cmd = std::string("\"") + THZSIM_CLI_PATH + "\" " + mode + " " + args + " -q --jobs " +
                                  (tag[0] == 'a' ? "1" : std::to_string(jobs() + 1)) + " --out \"" + out.string() +
                                  "\" >/dev/null 2>&1";
                int rc = std::system(cmd.c_str());
                ran = ran && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
            }
            auto a = base / (mode + "_a"), b = base / (mode + "_b");
            if (!fs::exists(a))
                continue;
            for (const auto &e : fs::directory_iterator(a))
            {
                ++files;
                auto other = b / e.path().filename();
                diffs += (!fs::exists(other) || sha256_hex(slurp(e.path())) != sha256_hex(slurp(other))) ? 1 : 0;
            }
        }
        fs::remove_all(base);
        Outcome o;
        o.pass = ran && diffs == 0 && files > 0;
        o.detail = std::to_string(runs.size()) + " modes run twice (1 and " + std::to_string(jobs() + 1) + " jobs), " +
                   std::to_string(files) + " artifacts, " + std::to_string(diffs) + " checksum mismatches";
        return o;
    }
} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"cluster-count means", cluster_counts},
        {"relative-power fractions", power_fractions},
        {"delay statistics", delay_stats},
        {"capacity anchors", capacity},
        {"knife-edge exactness", knife_edge},
        {"edge model vs PO oracle", oracle_agreement},
        {"screen-model ordering", screen_ordering},
        {"Doppler correctness", doppler},
        {"averaging gain", averaging},
        {"determinism", determinism},
    };
    int passed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k)
    {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[k].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        passed += o.pass ? 1 : 0;
        std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("acceptance run complete: %d/%zu criteria passed\n", passed, criteria.size());
    return passed == int(criteria.size()) ? 0 : 1;
}
