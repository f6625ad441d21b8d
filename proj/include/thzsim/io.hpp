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

#ifndef THZSIM_IO_HPP
#define THZSIM_IO_HPP

#include "thzsim/fading.hpp"
#include "thzsim/qd_channel.hpp"
#include "thzsim/screen.hpp"
#include "thzsim/spectrogram.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace thz
{
    /// Error raised for malformed input files; carries the 1-based line number
    /// when known (0 otherwise).
    class ParseError : public std::runtime_error
    {
      public:
        ParseError(const std::string &what, std::size_t line = 0)
            : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line)
        {
        }
        std::size_t line() const { return line_; }

      private:
        std::size_t line_;
    };

    namespace detail
    {
        // Shortest round-trip decimal; output bytes depend only on the value
        inline std::string fmt(double x)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            double back = std::strtod(buf, nullptr);
            for (int prec = 6; prec < 17; ++prec)
            {
                char tmp[32];
                std::snprintf(tmp, sizeof tmp, "%.*g", prec, x);
                if (std::strtod(tmp, nullptr) == back)
                    return tmp;
            }
            return buf;
        }

        inline std::string trim(const std::string &s)
        {
            auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos)
                return {};
            auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        inline std::vector<std::string> split_csv(const std::string &line)
        {
            std::vector<std::string> out;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                out.push_back(trim(cell));
            if (!line.empty() && line.back() == ',')
                out.emplace_back();
            return out;
        }

        inline bool parse_double(const std::string &s, double &out)
        {
            if (s.empty())
                return false;
            char *end = nullptr;
            out = std::strtod(s.c_str(), &end);
            return end == s.c_str() + s.size() && std::isfinite(out);
        }

        inline std::ifstream open_in(const std::filesystem::path &p)
        {
            std::ifstream f(p);
            if (!f)
                throw std::runtime_error("Cannot open '" + p.string() + "' for reading.");
            return f;
        }
    } // namespace detail

    // ---------------------------------------------------------------- frames

    /// Reads point-cloud frames from CSV rows `t_s,point_id,x,y,z`.
    ///
    /// A header row and '#' comment lines are skipped. Rows sharing a
    /// timestamp form one frame; within a frame, points are ordered by
    /// point_id so that identity is stable across frames. Frames are returned
    /// in file order; timestamps must be strictly increasing.
    inline std::vector<HumanFrame> read_frames_csv(std::istream &in)
    {
        std::vector<HumanFrame> frames;
        std::map<long long, Point3> current;
        double current_t = 0.0;
        bool have = false;
        auto flush = [&]() {
            HumanFrame f;
            f.t_s = current_t;
            f.points.reserve(current.size());
            for (auto &[id, p] : current)
                f.points.push_back(p);
            frames.push_back(std::move(f));
            current.clear();
        };

        std::string line;
        std::size_t lineno = 0;
        bool first_data = true;
        while (std::getline(in, line))
        {
            ++lineno;
            std::string t = detail::trim(line);
            if (t.empty() || t[0] == '#')
                continue;
            auto cells = detail::split_csv(t);
            if (cells.size() != 5)
                throw ParseError("Expected 5 columns t_s,point_id,x,y,z", lineno);
            double v[5];
            bool ok = true;
            for (int k = 0; k < 5 && ok; ++k)
                ok = detail::parse_double(cells[k], v[k]);
            if (!ok)
            {
                if (first_data)
                {
                    first_data = false; // header row
                    continue;
                }
                throw ParseError("Non-numeric or non-finite field", lineno);
            }
            first_data = false;
            if (v[1] != std::floor(v[1]))
                throw ParseError("point_id must be an integer", lineno);
            if (!have || v[0] != current_t)
            {
                if (have)
                {
                    if (!(v[0] > current_t))
                        throw ParseError("Frame timestamps must be strictly increasing", lineno);
                    flush();
                }
                current_t = v[0];
                have = true;
            }
            auto [it, inserted] = current.emplace((long long)v[1], Point3{v[2], v[3], v[4]});
            if (!inserted)
                throw ParseError("Duplicate point_id within a frame", lineno);
        }
        if (have)
            flush();
        if (frames.empty())
            throw ParseError("No frames found");
        return frames;
    }

    inline std::vector<HumanFrame> read_frames_csv(const std::filesystem::path &p)
    {
        auto f = detail::open_in(p);
        return read_frames_csv(f);
    }

    /// Writes frames in the format accepted by read_frames_csv; point_id is
    /// the index within each frame.
    inline void write_frames_csv(std::ostream &out, const std::vector<HumanFrame> &frames)
    {
        out << "t_s,point_id,x,y,z\n";
        for (const auto &f : frames)
            for (std::size_t k = 0; k < f.points.size(); ++k)
            {
                const auto &p = f.points[k];
                out << detail::fmt(f.t_s) << ',' << k << ',' << detail::fmt(p.x) << ',' << detail::fmt(p.y) << ','
                    << detail::fmt(p.z) << '\n';
            }
    }

    /// Minimal ASCII PLY frame reader.
    ///
    /// Accepted layout: `ply`, `format ascii 1.0`, a `comment t_s <seconds>`
    /// line, `element vertex N` with at least float/double properties x, y, z,
    /// optional further elements (skipped), `end_header`, then the vertex rows.
    /// Binary PLY and list properties on the vertex element are rejected.
    inline HumanFrame read_ply_frame(std::istream &in)
    {
        std::string line;
        std::size_t lineno = 0;
        auto next = [&]() {
            if (!std::getline(in, line))
                throw ParseError("Unexpected end of PLY file", lineno);
            ++lineno;
            line = detail::trim(line);
        };

        next();
        if (line != "ply")
            throw ParseError("Missing 'ply' magic", lineno);

        HumanFrame frame;
        bool have_t = false, ascii = false, in_vertex = false, vertex_done = false;
        long long n_vertex = -1;
        int n_props = 0, ix = -1, iy = -1, iz = -1;
        for (;;)
        {
            next();
            std::istringstream ls(line);
            std::string kw;
            ls >> kw;
            if (kw == "end_header")
                break;
            if (kw == "format")
            {
                std::string fmt_name;
                ls >> fmt_name;
                if (fmt_name != "ascii")
                    throw ParseError("Only ASCII PLY is supported", lineno);
                ascii = true;
            }
            else if (kw == "comment")
            {
                std::string key;
                double t = 0.0;
                if (ls >> key && key == "t_s")
                {
                    if (!(ls >> t) || !std::isfinite(t))
                        throw ParseError("Malformed 't_s' comment", lineno);
                    frame.t_s = t;
                    have_t = true;
                }
            }
            else if (kw == "element")
            {
                std::string name;
                long long count = -1;
                ls >> name >> count;
                if (in_vertex)
                    vertex_done = true;
                in_vertex = name == "vertex";
                if (in_vertex)
                {
                    if (n_vertex >= 0 || vertex_done || count < 0)
                        throw ParseError("Bad or repeated vertex element", lineno);
                    n_vertex = count;
                }
                else if (n_vertex < 0)
                    throw ParseError("The vertex element must come first", lineno);
            }
            else if (kw == "property")
            {
                if (!in_vertex)
                    continue;
                std::string type, name;
                ls >> type >> name;
                if (type == "list")
                    throw ParseError("List properties on vertices are not supported", lineno);
                if (name == "x")
                    ix = n_props;
                else if (name == "y")
                    iy = n_props;
                else if (name == "z")
                    iz = n_props;
                ++n_props;
            }
            else if (kw != "obj_info")
                throw ParseError("Unknown PLY header keyword '" + kw + "'", lineno);
        }
        if (!ascii)
            throw ParseError("Missing 'format ascii 1.0' line");
        if (!have_t)
            throw ParseError("Missing 'comment t_s <seconds>' header line");
        if (n_vertex < 0 || ix < 0 || iy < 0 || iz < 0)
            throw ParseError("Vertex element with x, y, z properties required");

        frame.points.reserve(std::size_t(n_vertex));
        std::vector<double> row(n_props);
        for (long long k = 0; k < n_vertex; ++k)
        {
            next();
            std::istringstream ls(line);
            for (int j = 0; j < n_props; ++j)
                if (!(ls >> row[j]) || !std::isfinite(row[j]))
                    throw ParseError("Malformed vertex row", lineno);
            frame.points.push_back({row[ix], row[iy], row[iz]});
        }
        return frame;
    }

    /// A single .ply file gives one frame; a directory gives every *.ply in
    /// it, sorted by timestamp (duplicate timestamps are rejected).
    inline std::vector<HumanFrame> read_ply_sequence(const std::filesystem::path &p)
    {
        namespace fs = std::filesystem;
        std::vector<fs::path> files;
        if (fs::is_directory(p))
        {
            for (const auto &e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".ply")
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
        }
        else
            files.push_back(p);
        if (files.empty())
            throw ParseError("No .ply files in '" + p.string() + "'");

        std::vector<HumanFrame> frames;
        for (const auto &f : files)
        {
            auto in = detail::open_in(f);
            try
            {
                frames.push_back(read_ply_frame(in));
            }
            catch (const ParseError &e)
            {
                throw ParseError(f.filename().string() + ": " + e.what());
            }
        }
        std::stable_sort(frames.begin(), frames.end(), [](const auto &a, const auto &b) { return a.t_s < b.t_s; });
        for (std::size_t k = 1; k < frames.size(); ++k)
            if (frames[k].t_s == frames[k - 1].t_s)
                throw ParseError("Duplicate frame timestamp in PLY sequence");
        return frames;
    }

    inline void write_ply_frame(std::ostream &out, const HumanFrame &f)
    {
        out << "ply\nformat ascii 1.0\ncomment t_s " << detail::fmt(f.t_s) << "\nelement vertex " << f.points.size()
            << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
        for (const auto &p : f.points)
            out << detail::fmt(p.x) << ' ' << detail::fmt(p.y) << ' ' << detail::fmt(p.z) << '\n';
    }

    /// Dispatches on the path: directories and *.ply go to the PLY reader,
    /// everything else to the CSV reader.
    inline std::vector<HumanFrame> read_frames(const std::filesystem::path &p)
    {
        if (std::filesystem::is_directory(p) || p.extension() == ".ply")
            return read_ply_sequence(p);
        return read_frames_csv(p);
    }

    // ------------------------------------------------------- series / spectra

    inline void write_fading_csv(std::ostream &out, const FadingSeries &s)
    {
        out << "t_s,re,im,gain_db,lit_flag\n";
        for (std::size_t n = 0; n < s.samples.size(); ++n)
        {
            auto z = s.samples[n];
            double g = std::abs(z) > 0.0 ? 20.0 * std::log10(std::abs(z)) : -400.0;
            out << detail::fmt(s.time(n)) << ',' << detail::fmt(z.real()) << ',' << detail::fmt(z.imag()) << ','
                << detail::fmt(g) << ',' << int(n < s.lit.size() ? s.lit[n] : 0) << '\n';
        }
    }

    /// Magnitude matrix in dB: the header row holds the frequency axis, the
    /// first column the frame-center times.
    inline void write_spectrogram_csv(std::ostream &out, const Spectrogram &sp)
    {
        out << "t_s\\f_hz";
        for (double f : sp.freqs_hz)
            out << ',' << detail::fmt(f);
        out << '\n';
        for (std::size_t m = 0; m < sp.times_s.size(); ++m)
        {
            out << detail::fmt(sp.times_s[m]);
            for (double a : sp.magnitude[m])
                out << ',' << detail::fmt(a > 0.0 ? 20.0 * std::log10(a) : -400.0);
            out << '\n';
        }
    }

    // ------------------------------------------------------------------- CIR

    inline constexpr int cir_format_version = 1;

    inline void write_cir_csv(std::ostream &out, const Cir &cir)
    {
        out << "kind,delay_ns,aod_rad,aoa_rad,re,im\n";
        for (const auto &m : cir.mpcs)
            out << to_string(m.kind) << ',' << detail::fmt(m.delay_ns) << ',' << detail::fmt(m.aod_rad) << ','
                << detail::fmt(m.aoa_rad) << ',' << detail::fmt(m.amplitude.real()) << ','
                << detail::fmt(m.amplitude.imag()) << '\n';
    }

    namespace detail
    {
        inline nlohmann::json point_json(const Point3 &p) { return nlohmann::json::array({p.x, p.y, p.z}); }

        inline Point3 json_point(const nlohmann::json &j)
        {
            if (!j.is_array() || j.size() != 3)
                throw ParseError("Expected a 3-element coordinate array");
            Point3 p{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
            require_finite(p, "Coordinate");
            return p;
        }
    } // namespace detail

    /// Versioned JSON envelope carrying the complete CIR (MPCs, interaction
    /// points and random-cluster descriptors).
    inline nlohmann::json cir_to_json(const Cir &cir)
    {
        using nlohmann::json;
        json mpcs = json::array();
        for (const auto &m : cir.mpcs)
        {
            json ip = json::array();
            for (const auto &p : m.interaction_points)
                ip.push_back(detail::point_json(p));
            mpcs.push_back({{"kind", to_string(m.kind)},
                            {"delay_ns", m.delay_ns},
                            {"aod_rad", m.aod_rad},
                            {"aoa_rad", m.aoa_rad},
                            {"re", m.amplitude.real()},
                            {"im", m.amplitude.imag()},
                            {"cluster_id", m.cluster_id},
                            {"interaction_points", ip}});
        }
        json clusters = json::array();
        for (const auto &c : cir.clusters)
            clusters.push_back({{"id", c.id},
                                {"excess_delay_ns", c.excess_delay_ns},
                                {"aod_rad", c.aod_rad},
                                {"aoa_rad", c.aoa_rad},
                                {"power_db", c.power_db}});
        return {{"format", "thzsim.cir"},
                {"version", cir_format_version},
                {"preset", cir.preset_name},
                {"seed", cir.rng_seed},
                {"carrier_hz", cir.carrier_hz},
                {"power_floor_db", cir.power_floor_db},
                {"tx", detail::point_json(cir.tx)},
                {"rx", detail::point_json(cir.rx)},
                {"mpcs", mpcs},
                {"clusters", clusters}};
    }

    inline Cir cir_from_json(const nlohmann::json &j)
    {
        try
        {
            if (j.at("format").get<std::string>() != "thzsim.cir")
                throw ParseError("Not a thzsim CIR document");
            int version = j.at("version").get<int>();
            if (version != cir_format_version)
                throw ParseError("Unsupported CIR format version " + std::to_string(version));
            Cir cir;
            cir.preset_name = j.at("preset").get<std::string>();
            cir.rng_seed = j.at("seed").get<std::uint64_t>();
            cir.carrier_hz = j.at("carrier_hz").get<double>();
            cir.power_floor_db = j.at("power_floor_db").get<double>();
            cir.tx = detail::json_point(j.at("tx"));
            cir.rx = detail::json_point(j.at("rx"));
            for (const auto &m : j.at("mpcs"))
            {
                Mpc mpc;
                mpc.kind = mpc_kind_from_string(m.at("kind").get<std::string>());
                mpc.delay_ns = m.at("delay_ns").get<double>();
                mpc.aod_rad = m.at("aod_rad").get<double>();
                mpc.aoa_rad = m.at("aoa_rad").get<double>();
                mpc.amplitude = {m.at("re").get<double>(), m.at("im").get<double>()};
                mpc.cluster_id = m.at("cluster_id").get<int>();
                for (const auto &p : m.at("interaction_points"))
                    mpc.interaction_points.push_back(detail::json_point(p));
                cir.mpcs.push_back(std::move(mpc));
            }
            for (const auto &c : j.at("clusters"))
                cir.clusters.push_back({c.at("id").get<int>(), c.at("excess_delay_ns").get<double>(),
                                        c.at("aod_rad").get<double>(), c.at("aoa_rad").get<double>(),
                                        c.at("power_db").get<double>()});
            return cir;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(std::string("Malformed CIR document: ") + e.what());
        }
    }

} // namespace thz

#endif
