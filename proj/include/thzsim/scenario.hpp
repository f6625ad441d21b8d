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

#ifndef THZSIM_SCENARIO_HPP
#define THZSIM_SCENARIO_HPP

// Batch scenario runner behind the command-line tool. Links libcrypto for
// the manifest checksums.

#include "thzsim/channel_stats.hpp"
#include "thzsim/diffraction.hpp"
#include "thzsim/ensemble.hpp"
#include "thzsim/fading.hpp"
#include "thzsim/io.hpp"
#include "thzsim/mimo.hpp"
#include "thzsim/phantom.hpp"
#include "thzsim/po_oracle.hpp"
#include "thzsim/prediction.hpp"
#include "thzsim/presets.hpp"
#include "thzsim/qd_channel.hpp"
#include "thzsim/spectrogram.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#ifndef THZSIM_VERSION
#define THZSIM_VERSION "0.0.0"
#endif

namespace thz
{
    inline constexpr const char *toolkit_version = THZSIM_VERSION;

    enum class ExitCode : int
    {
        success = 0,
        config_error = 2,
        validation_failure = 3
    };

    /// Schema violation or unusable input; maps to exit code 2.
    class ConfigError : public std::runtime_error
    {
      public:
        ConfigError(const std::string &key, const std::string &msg)
            : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(key)
        {
        }
        const std::string &key() const { return key_; }

      private:
        std::string key_;
    };

    enum class ScenarioMode
    {
        qd_gen,
        qd_stats,
        mimo_cap,
        hbs_run,
        hbs_doppler,
        validate
    };

    inline const char *to_string(ScenarioMode m)
    {
        switch (m)
        {
        case ScenarioMode::qd_gen: return "qd_gen";
        case ScenarioMode::qd_stats: return "qd_stats";
        case ScenarioMode::mimo_cap: return "mimo_cap";
        case ScenarioMode::hbs_run: return "hbs_run";
        case ScenarioMode::hbs_doppler: return "hbs_doppler";
        case ScenarioMode::validate: return "validate";
        }
        return "?";
    }

    inline ScenarioMode scenario_mode_from_string(const std::string &s)
    {
        for (auto m : {ScenarioMode::qd_gen, ScenarioMode::qd_stats, ScenarioMode::mimo_cap, ScenarioMode::hbs_run,
                       ScenarioMode::hbs_doppler, ScenarioMode::validate})
            if (s == to_string(m))
                return m;
        throw ConfigError("mode", "unknown mode '" + s + "'");
    }

    // ---------------------------------------------------------------- schema

    namespace detail
    {
        enum class KeyType
        {
            string,
            uint,
            number,
            boolean,
            point,
            object
        };

        struct KeySpec
        {
            const char *name;
            KeyType type;
            unsigned modes;    // bit per ScenarioMode
            unsigned required; // bit per ScenarioMode
        };

        constexpr unsigned bit(ScenarioMode m) { return 1u << unsigned(m); }
        constexpr unsigned qd_modes = bit(ScenarioMode::qd_gen) | bit(ScenarioMode::qd_stats) | bit(ScenarioMode::mimo_cap);
        constexpr unsigned hbs_modes = bit(ScenarioMode::hbs_run) | bit(ScenarioMode::hbs_doppler);
        constexpr unsigned all_modes = 0x3f;

        inline const std::vector<KeySpec> &top_level_schema()
        {
            static const std::vector<KeySpec> keys = {
                {"mode", KeyType::string, all_modes, all_modes},
                {"seed", KeyType::uint, all_modes, 0},
                {"carrier_hz", KeyType::number, hbs_modes | bit(ScenarioMode::validate), 0},
                {"preset", KeyType::string, qd_modes, qd_modes},
                {"seeds", KeyType::uint, bit(ScenarioMode::qd_stats) | bit(ScenarioMode::mimo_cap), 0},
                {"tx", KeyType::point, bit(ScenarioMode::qd_gen) | hbs_modes, 0},
                {"rx", KeyType::point, bit(ScenarioMode::qd_gen) | hbs_modes, 0},
                {"bin_width_ns", KeyType::number, bit(ScenarioMode::qd_stats), 0},
                {"floor_db", KeyType::number, bit(ScenarioMode::qd_stats), 0},
                {"snr_db", KeyType::number, bit(ScenarioMode::mimo_cap), 0},
                {"max_beams", KeyType::uint, bit(ScenarioMode::mimo_cap), 0},
                {"hpbw_deg", KeyType::number, bit(ScenarioMode::mimo_cap), 0},
                {"water_filling", KeyType::boolean, bit(ScenarioMode::mimo_cap), 0},
                {"frames", KeyType::string, hbs_modes, 0},
                {"phantom", KeyType::object, hbs_modes, 0},
                {"screen_model", KeyType::string, hbs_modes, 0},
                {"fs_hz", KeyType::number, hbs_modes, 0},
                {"pitch_m", KeyType::number, hbs_modes, 0},
                {"oracle", KeyType::boolean, bit(ScenarioMode::hbs_run), 0},
                {"window", KeyType::uint, bit(ScenarioMode::hbs_doppler), 0},
                {"overlap", KeyType::number, bit(ScenarioMode::hbs_doppler), 0},
                {"tolerances", KeyType::object, bit(ScenarioMode::validate), 0},
            };
            return keys;
        }

        inline const std::vector<KeySpec> &phantom_schema()
        {
            static const std::vector<KeySpec> keys = {
                {"kind", KeyType::string, 1, 1},          {"start", KeyType::point, 1, 0},
                {"heading", KeyType::point, 1, 0},        {"speed_mps", KeyType::number, 1, 0},
                {"duration_s", KeyType::number, 1, 0},    {"frame_rate_hz", KeyType::number, 1, 0},
                {"cadence_hz", KeyType::number, 1, 0},    {"leg_swing_deg", KeyType::number, 1, 0},
                {"arm_swing_deg", KeyType::number, 1, 0}, {"height_m", KeyType::number, 1, 0},
                {"width_m", KeyType::number, 1, 0},       {"depth_m", KeyType::number, 1, 0},
                {"diameter_m", KeyType::number, 1, 0},    {"spacing_m", KeyType::number, 1, 0},
            };
            return keys;
        }

        inline const std::vector<KeySpec> &tolerance_schema()
        {
            static const std::vector<KeySpec> keys = {
                {"knife_edge_db", KeyType::number, 1, 0}, {"fresnel_oracle_db", KeyType::number, 1, 0},
                {"babinet", KeyType::number, 1, 0},       {"half_plane_db", KeyType::number, 1, 0},
                {"free_space_db", KeyType::number, 1, 0}, {"lit_db", KeyType::number, 1, 0},
                {"transition_db", KeyType::number, 1, 0},
            };
            return keys;
        }

        inline void check_type(const std::string &key, const nlohmann::json &v, KeyType t)
        {
            bool ok = false;
            switch (t)
            {
            case KeyType::string: ok = v.is_string(); break;
            case KeyType::uint: ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0); break;
            case KeyType::number: ok = v.is_number() && std::isfinite(v.get<double>()); break;
            case KeyType::boolean: ok = v.is_boolean(); break;
            case KeyType::object: ok = v.is_object(); break;
            case KeyType::point:
                ok = v.is_array() && v.size() == 3;
                for (std::size_t k = 0; ok && k < 3; ++k)
                    ok = v[k].is_number() && std::isfinite(v[k].get<double>());
                break;
            }
            if (!ok)
                throw ConfigError(key, "wrong type or non-finite value");
        }

        inline void check_object(const std::string &prefix, const nlohmann::json &obj, const std::vector<KeySpec> &schema,
                                 unsigned mode_bit)
        {
            for (auto it = obj.begin(); it != obj.end(); ++it)
            {
                const std::string key = prefix + it.key();
                const KeySpec *spec = nullptr;
                for (const auto &s : schema)
                    if (it.key() == s.name)
                        spec = &s;
                if (!spec)
                    throw ConfigError(key, "unknown key");
                if (!(spec->modes & mode_bit))
                    throw ConfigError(key, "not allowed in this mode");
                check_type(key, it.value(), spec->type);
            }
            for (const auto &s : schema)
                if ((s.required & mode_bit) && !obj.contains(s.name))
                    throw ConfigError(prefix + s.name, "required key missing");
        }

        inline Point3 to_point(const nlohmann::json &v) { return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()}; }
    } // namespace detail

    /// Validated run configuration. `raw` keeps the document as given (after
    /// overrides); every artifact is a function of `raw` alone.
    struct ScenarioConfig
    {
        ScenarioMode mode = ScenarioMode::validate;
        nlohmann::json raw;

        template <class T>
        T get(const char *key, const T &fallback) const
        {
            return raw.contains(key) ? raw.at(key).get<T>() : fallback;
        }
        std::uint64_t seed() const { return get<std::uint64_t>("seed", 1); }
    };

    /// Applies `key=value` (dotted keys address nested objects). The value is
    /// parsed as JSON when possible and taken as a plain string otherwise.
    inline void apply_override(nlohmann::json &doc, const std::string &assignment)
    {
        auto eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("", "override '" + assignment + "' is not of the form key=value");
        const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
        nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
        if (value.is_discarded())
            value = text;

        nlohmann::json *node = &doc;
        std::size_t start = 0;
        for (;;)
        {
            auto dot = key.find('.', start);
            std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (part.empty())
                throw ConfigError(key, "empty path component");
            if (!node->is_object())
                throw ConfigError(key, "cannot descend into a non-object");
            if (dot == std::string::npos)
            {
                (*node)[part] = value;
                return;
            }
            node = &(*node)[part];
            if (node->is_null())
                *node = nlohmann::json::object();
            start = dot + 1;
        }
    }

    inline ScenarioConfig parse_config(const nlohmann::json &doc)
    {
        if (!doc.is_object())
            throw ConfigError("", "configuration must be a JSON object");
        if (!doc.contains("mode") || !doc.at("mode").is_string())
            throw ConfigError("mode", "required string key missing");
        ScenarioConfig cfg;
        cfg.mode = scenario_mode_from_string(doc.at("mode").get<std::string>());
        cfg.raw = doc;
        const unsigned mb = detail::bit(cfg.mode);
        detail::check_object("", doc, detail::top_level_schema(), mb);
        if (doc.contains("phantom"))
            detail::check_object("phantom.", doc.at("phantom"), detail::phantom_schema(), 1);
        if (doc.contains("tolerances"))
            detail::check_object("tolerances.", doc.at("tolerances"), detail::tolerance_schema(), 1);

        if ((mb & detail::hbs_modes) && doc.contains("frames") == doc.contains("phantom"))
            throw ConfigError("frames", "exactly one of 'frames' and 'phantom' is required");
        if (doc.contains("screen_model"))
        {
            try
            {
                (void)screen_model_from_string(doc.at("screen_model").get<std::string>());
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError("screen_model", e.what());
            }
        }
        if (doc.contains("phantom"))
        {
            auto kind = doc.at("phantom").at("kind").get<std::string>();
            if (kind != "articulated_walk" && kind != "box" && kind != "cylinder")
                throw ConfigError("phantom.kind", "expected articulated_walk, box or cylinder");
        }
        if (cfg.mode == ScenarioMode::hbs_doppler && doc.contains("overlap"))
        {
            double ov = doc.at("overlap").get<double>();
            if (!(ov >= 0.0 && ov < 1.0))
                throw ConfigError("overlap", "must lie in [0, 1)");
        }
        return cfg;
    }

    inline ScenarioConfig load_config(const std::filesystem::path &path, const std::vector<std::string> &overrides = {})
    {
        nlohmann::json doc;
        if (!path.empty())
        {
            std::ifstream f(path);
            if (!f)
                throw ConfigError("", "cannot open config '" + path.string() + "'");
            doc = nlohmann::json::parse(f, nullptr, false);
            if (doc.is_discarded())
                throw ConfigError("", "config '" + path.string() + "' is not valid JSON");
        }
        else
            doc = nlohmann::json::object();
        for (const auto &o : overrides)
            apply_override(doc, o);
        return parse_config(doc);
    }

    // ------------------------------------------------------------- artifacts

    inline std::string sha256_hex(const std::string &data)
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("SHA-256 computation failed.");
        static const char *hex = "0123456789abcdef";
        std::string out;
        out.reserve(2 * len);
        for (unsigned int k = 0; k < len; ++k)
        {
            out.push_back(hex[md[k] >> 4]);
            out.push_back(hex[md[k] & 15]);
        }
        return out;
    }

    struct Artifact
    {
        std::string name;
        std::string content;
    };

    struct RunResult
    {
        ExitCode status = ExitCode::success;
        std::vector<Artifact> artifacts; // manifest.json last
        std::string message;
    };

    /// Manifest: toolkit version, hash of the canonical config dump and a
    /// checksum per artifact. No wall-clock fields, so reruns are identical.
    inline Artifact make_manifest(const ScenarioConfig &cfg, const std::vector<Artifact> &artifacts, ExitCode status)
    {
        nlohmann::json files = nlohmann::json::array();
        for (const auto &a : artifacts)
            files.push_back({{"name", a.name}, {"bytes", a.content.size()}, {"sha256", sha256_hex(a.content)}});
        nlohmann::json m = {{"toolkit", "thzsim"},
                            {"version", toolkit_version},
                            {"mode", to_string(cfg.mode)},
                            {"config", cfg.raw},
                            {"config_sha256", sha256_hex(cfg.raw.dump())},
                            {"status", int(status)},
                            {"artifacts", files}};
        return {"manifest.json", m.dump(2) + "\n"};
    }

    /// Writes every artifact to a hidden staging directory inside `out_dir`
    /// and renames them into place only after all writes succeeded.
    inline void commit_artifacts(const std::filesystem::path &out_dir, const std::vector<Artifact> &artifacts)
    {
        namespace fs = std::filesystem;
        fs::create_directories(out_dir);
        fs::path stage = out_dir / ".thzsim-staging";
        std::error_code ec;
        fs::remove_all(stage, ec);
        fs::create_directory(stage);
        try
        {
            for (const auto &a : artifacts)
            {
                std::ofstream f(stage / a.name, std::ios::binary);
                f.write(a.content.data(), std::streamsize(a.content.size()));
                f.close();
                if (!f)
                    throw std::runtime_error("Failed to write artifact '" + a.name + "'.");
            }
            for (const auto &a : artifacts)
                fs::rename(stage / a.name, out_dir / a.name);
        }
        catch (...)
        {
            fs::remove_all(stage, ec);
            throw;
        }
        fs::remove_all(stage, ec);
    }

    // ----------------------------------------------------------------- modes

    namespace detail
    {
        inline std::string csv_cdf(const char *value_name, const std::vector<double> &v)
        {
            std::ostringstream os;
            os << value_name << ",cdf\n";
            for (auto [x, p] : empirical_cdf(v))
                os << fmt(x) << ',' << fmt(p) << '\n';
            return os.str();
        }

        inline EnvironmentPreset resolve_preset(const ScenarioConfig &cfg)
        {
            const std::string name = cfg.raw.at("preset").get<std::string>();
            try
            {
                for (const auto &n : preset_names())
                    if (n == name)
                        return builtin_preset(name);
                return load_preset_file(name);
            }
            catch (const std::exception &e)
            {
                throw ConfigError("preset", e.what());
            }
        }

        inline std::vector<HumanFrame> resolve_frames(const ScenarioConfig &cfg)
        {
            if (cfg.raw.contains("frames"))
            {
                try
                {
                    return read_frames(cfg.raw.at("frames").get<std::string>());
                }
                catch (const std::exception &e)
                {
                    throw ConfigError("frames", e.what());
                }
            }
            const auto &p = cfg.raw.at("phantom");
            auto num = [&](const char *k, double d) { return p.contains(k) ? p.at(k).get<double>() : d; };
            auto pt = [&](const char *k, Point3 d) { return p.contains(k) ? to_point(p.at(k)) : d; };
            const std::string kind = p.at("kind").get<std::string>();
            try
            {
                if (kind == "articulated_walk")
                {
                    WalkParams w;
                    w.start = pt("start", {1.75, -1.0, 0.0});
                    w.heading = pt("heading", w.heading);
                    w.speed_mps = num("speed_mps", w.speed_mps);
                    w.duration_s = num("duration_s", w.duration_s);
                    w.frame_rate_hz = num("frame_rate_hz", w.frame_rate_hz);
                    w.cadence_hz = num("cadence_hz", w.cadence_hz);
                    w.leg_swing_deg = num("leg_swing_deg", w.leg_swing_deg);
                    w.arm_swing_deg = num("arm_swing_deg", w.arm_swing_deg);
                    w.height_m = num("height_m", w.height_m);
                    w.spacing_m = num("spacing_m", w.spacing_m);
                    return articulated_walk(w);
                }
                const Point3 start = pt("start", {1.75, -1.0, 0.0});
                const Point3 heading = normalized(pt("heading", {0.0, 1.0, 0.0}));
                const double spacing = num("spacing_m", 0.012);
                HumanFrame f = kind == "box" ? box_phantom(start, cross(heading, world_up), num("width_m", 0.5),
                                                           num("depth_m", 0.3), num("height_m", 1.75), spacing)
                                             : cylinder_phantom(start, num("diameter_m", 0.4), num("height_m", 1.75), spacing);
                return translate_frames(f, heading * num("speed_mps", 1.0), num("duration_s", 2.0),
                                        num("frame_rate_hz", 100.0));
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError("phantom", e.what());
            }
        }

        inline FadingOptions fading_options(const ScenarioConfig &cfg, unsigned jobs)
        {
            FadingOptions o;
            o.fs_hz = cfg.get<double>("fs_hz", 30000.0);
            o.pitch_m = cfg.get<double>("pitch_m", 0.01);
            o.f_hz = cfg.get<double>("carrier_hz", default_carrier_hz);
            o.jobs = jobs;
            if (!(o.fs_hz > 0.0) || !(o.pitch_m > 0.0) || !(o.f_hz > 0.0))
                throw ConfigError("fs_hz", "sampling rate, pitch and carrier must be positive");
            return o;
        }

        inline std::string to_csv(const FadingSeries &s)
        {
            std::ostringstream os;
            write_fading_csv(os, s);
            return os.str();
        }

        inline RunResult run_qd_gen(const ScenarioConfig &cfg)
        {
            EnvironmentPreset preset = resolve_preset(cfg);
            const auto seed = cfg.seed();
            Point3 tx = cfg.raw.contains("tx") ? to_point(cfg.raw.at("tx")) : preset.placement.tx;
            Point3 rx = cfg.raw.contains("rx") ? to_point(cfg.raw.at("rx")) : sample_rx(preset, seed);
            Cir cir;
            try
            {
                cir = synthesize_cir(preset, tx, rx, seed);
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError("tx", e.what());
            }
            RunResult r;
            std::ostringstream csv;
            write_cir_csv(csv, cir);
            r.artifacts.push_back({"cir.csv", csv.str()});
            r.artifacts.push_back({"cir.json", cir_to_json(cir).dump(2) + "\n"});
            r.message = std::to_string(cir.mpcs.size()) + " MPCs";
            return r;
        }

        inline RunResult run_qd_stats(const ScenarioConfig &cfg, unsigned jobs)
        {
            EnvironmentPreset preset = resolve_preset(cfg);
            EnsembleOptions opt;
            opt.bin_width_ns = cfg.get<double>("bin_width_ns", 0.5);
            opt.floor_db = cfg.get<double>("floor_db", -30.0);
            opt.jobs = jobs;
            if (!(opt.bin_width_ns > 0.0))
                throw ConfigError("bin_width_ns", "must be positive");
            const std::size_t count = cfg.get<std::size_t>("seeds", 1000);
            if (count == 0)
                throw ConfigError("seeds", "must be at least 1");
            auto sum = run_ensemble(preset, cfg.seed(), count, opt);

            std::vector<double> ds, me, pw;
            std::ostringstream per;
            per << "seed,clusters,rms_delay_spread_ns,max_excess_delay_ns\n";
            for (const auto &s : sum.per_seed)
            {
                ds.push_back(s.rms_delay_spread_ns);
                me.push_back(s.max_excess_delay_ns);
                pw.insert(pw.end(), s.nonlos_powers_db.begin(), s.nonlos_powers_db.end());
                per << s.seed << ',' << s.cluster_count << ',' << fmt(s.rms_delay_spread_ns) << ','
                    << fmt(s.max_excess_delay_ns) << '\n';
            }
            std::ostringstream pdp;
            pdp << "excess_delay_ns,power_rel_db\n";
            for (std::size_t k = 0; k < sum.mean_pdp_rel.size(); ++k)
            {
                double p = sum.mean_pdp_rel[k];
                pdp << fmt(double(k) * sum.bin_width_ns) << ',' << fmt(p > 0.0 ? 10.0 * std::log10(p) : -400.0) << '\n';
            }
            nlohmann::json js = {{"preset", sum.preset},
                                 {"first_seed", cfg.seed()},
                                 {"seeds", sum.seeds},
                                 {"bin_width_ns", sum.bin_width_ns},
                                 {"floor_db", sum.floor_db},
                                 {"mean_cluster_count", sum.mean_cluster_count},
                                 {"fraction_above_minus10db", sum.fraction_above_10db},
                                 {"median_rms_delay_spread_ns", sum.median_rms_delay_spread_ns},
                                 {"max_excess_delay_ns", sum.max_excess_delay_ns},
                                 {"mean_random_power_rel", sum.mean_random_power_rel}};
            RunResult r;
            r.artifacts = {{"pdp.csv", pdp.str()},
                           {"delay_spread_cdf.csv", csv_cdf("rms_delay_spread_ns", ds)},
                           {"max_excess_delay_cdf.csv", csv_cdf("max_excess_delay_ns", me)},
                           {"cluster_power_cdf.csv", csv_cdf("relative_power_db", pw)},
                           {"per_seed.csv", per.str()},
                           {"summary.json", js.dump(2) + "\n"}};
            r.message = "mean clusters " + fmt(sum.mean_cluster_count);
            return r;
        }

        inline RunResult run_mimo_cap(const ScenarioConfig &cfg, unsigned jobs)
        {
            EnvironmentPreset preset = resolve_preset(cfg);
            CapacityOptions opt;
            opt.snr_db = cfg.get<double>("snr_db", opt.snr_db);
            opt.max_beams = cfg.get<std::size_t>("max_beams", opt.max_beams);
            opt.hpbw_deg = cfg.get<double>("hpbw_deg", opt.hpbw_deg);
            opt.water_filling = cfg.get<bool>("water_filling", opt.water_filling);
            if (opt.max_beams == 0 || !(opt.hpbw_deg > 0.0))
                throw ConfigError("max_beams", "beam count and beamwidth must be positive");
            const std::size_t count = cfg.get<std::size_t>("seeds", 1000);
            if (count == 0)
                throw ConfigError("seeds", "must be at least 1");
            const auto first = cfg.seed();
            auto rows = parallel_map(count, jobs, [&](std::size_t k) { return capacity_pair(preset, first + k, opt); });

            std::ostringstream os;
            os << "seed,prs,snr_db,bps_hz,beams\n";
            double off = 0.0, on = 0.0;
            for (const auto &[a, b] : rows)
            {
                for (const auto *row : {&a, &b})
                    os << row->seed << ',' << int(row->prs_on) << ',' << fmt(row->snr_db) << ',' << fmt(row->bps_hz) << ','
                       << row->beams << '\n';
                off += a.bps_hz, on += b.bps_hz;
            }
            nlohmann::json js = {{"preset", preset.name},
                                 {"first_seed", first},
                                 {"seeds", count},
                                 {"snr_db", opt.snr_db},
                                 {"mean_bps_hz", off / double(count)},
                                 {"mean_bps_hz_prs", on / double(count)}};
            RunResult r;
            r.artifacts = {{"capacity.csv", os.str()}, {"summary.json", js.dump(2) + "\n"}};
            r.message = "mean capacity " + fmt(off / double(count)) + " / PRS " + fmt(on / double(count)) + " bps/Hz";
            return r;
        }

        inline std::pair<Point3, Point3> link_points(const ScenarioConfig &cfg)
        {
            Point3 tx = cfg.raw.contains("tx") ? to_point(cfg.raw.at("tx")) : Point3{0.0, 0.0, 1.2};
            Point3 rx = cfg.raw.contains("rx") ? to_point(cfg.raw.at("rx")) : Point3{3.5, 0.0, 1.2};
            if (distance(tx, rx) <= 0.0)
                throw ConfigError("rx", "Tx and Rx coincide");
            return {tx, rx};
        }

        inline nlohmann::json series_summary(const FadingSeries &s)
        {
            double min_db = 1e300, lit = 0.0;
            for (std::size_t k = 0; k < s.samples.size(); ++k)
            {
                double a = std::abs(s.samples[k]);
                min_db = std::min(min_db, a > 0.0 ? 20.0 * std::log10(a) : -400.0);
                lit += s.lit[k];
            }
            return {{"samples", s.samples.size()},
                    {"fs_hz", s.fs_hz},
                    {"t0_s", s.t0_s},
                    {"lit_fraction", s.samples.empty() ? 0.0 : lit / double(s.samples.size())},
                    {"min_gain_db", s.samples.empty() ? 0.0 : min_db},
                    {"resampled_points", s.resampled_points},
                    {"degenerate_samples", s.degenerate_samples}};
        }

        inline FadingSeries checked_series(const std::vector<HumanFrame> &frames, const Point3 &tx, const Point3 &rx,
                                           ScreenModel model, const FadingOptions &opt)
        {
            try
            {
                return fading_series(frames, tx, rx, model, opt);
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError("frames", e.what());
            }
        }

        inline RunResult run_hbs(const ScenarioConfig &cfg, unsigned jobs)
        {
            auto frames = resolve_frames(cfg);
            auto [tx, rx] = link_points(cfg);
            auto opt = fading_options(cfg, jobs);
            auto model = screen_model_from_string(cfg.get<std::string>("screen_model", "human_shaped"));
            FadingSeries s = checked_series(frames, tx, rx, model, opt);

            RunResult r;
            r.artifacts.push_back({"fading.csv", to_csv(s)});
            nlohmann::json js = series_summary(s);
            js["screen_model"] = to_string(model);

            if (cfg.mode == ScenarioMode::hbs_run && cfg.get<bool>("oracle", false))
            {
                FadingSeries ref = oracle_fading_series(frames, tx, rx, opt);
                auto pe = prediction_error(s, ref);
                r.artifacts.push_back({"oracle_fading.csv", to_csv(ref)});
                std::vector<double> err;
                for (std::size_t k = 0; k < s.samples.size(); ++k)
                    if (ref.lit[k])
                        err.push_back(std::abs(s.samples[k]) - std::abs(ref.samples[k]));
                r.artifacts.push_back({"prediction_error_cdf.csv", csv_cdf("envelope_error", err)});
                js["prediction_error"] = {{"bias", pe.bias},
                                          {"rms", pe.rms},
                                          {"bias_db_equiv", pe.bias_db_equiv},
                                          {"lit_samples", pe.lit_samples}};
            }

            if (cfg.mode == ScenarioMode::hbs_doppler)
            {
                const auto window = cfg.get<std::size_t>("window", 1024);
                const double overlap = cfg.get<double>("overlap", 0.5);
                Spectrogram sp;
                try
                {
                    sp = doppler_spectrogram(s, window, overlap);
                }
                catch (const std::invalid_argument &e)
                {
                    throw ConfigError("window", e.what());
                }
                std::ostringstream spc, tr;
                write_spectrogram_csv(spc, sp);
                auto trace = doppler_peak_trace(sp);
                tr << "t_s,peak_doppler_hz\n";
                for (std::size_t m = 0; m < trace.size(); ++m)
                    tr << fmt(sp.times_s[m]) << ',' << fmt(trace[m]) << '\n';
                r.artifacts.push_back({"spectrogram.csv", spc.str()});
                r.artifacts.push_back({"doppler_trace.csv", tr.str()});
                js["window"] = sp.window;
                js["hop"] = sp.hop;
                js["bin_hz"] = sp.bin_hz();
                js["zero_doppler_energy_fraction"] = zero_doppler_energy_fraction(sp);
            }
            r.artifacts.push_back({"summary.json", js.dump(2) + "\n"});
            r.message = std::to_string(s.samples.size()) + " samples";
            return r;
        }

        // Composite Simpson rule for int_0^x cos/sin(pi t^2 / 2) dt; kept
        // independent of the series/continued-fraction evaluation it checks.
        inline cdouble simpson_fresnel(double x, int n = 20000)
        {
            const double h = x / n;
            cdouble acc{0.0, 0.0};
            for (int k = 0; k <= n; ++k)
            {
                double t = k * h, w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
                acc += w * cdouble(std::cos(0.5 * pi * t * t), std::sin(0.5 * pi * t * t));
            }
            return acc * (h / 3.0);
        }

        inline OccupancyGrid filled_grid(double u0, double v0, double pitch, int nu, int nv)
        {
            OccupancyGrid g;
            g.u0 = u0, g.v0 = v0, g.pitch = pitch, g.nu = nu, g.nv = nv;
            g.cells.assign(std::size_t(nu) * std::size_t(nv), 1);
            return g;
        }

        inline RunResult run_validate(const ScenarioConfig &cfg, unsigned jobs)
        {
            nlohmann::json tol = cfg.raw.value("tolerances", nlohmann::json::object());
            auto t = [&](const char *k, double d) { return tol.contains(k) ? tol.at(k).get<double>() : d; };
            const double f_hz = cfg.get<double>("carrier_hz", default_carrier_hz);
            if (!(f_hz > 0.0))
                throw ConfigError("carrier_hz", "must be positive");

            nlohmann::json checks = nlohmann::json::array();
            bool all = true;
            auto check = [&](const std::string &name, double value, double target, double tolerance) {
                bool pass = std::abs(value - target) <= tolerance;
                all = all && pass;
                checks.push_back(
                    {{"name", name}, {"value", value}, {"target", target}, {"tolerance", tolerance}, {"pass", pass}});
            };

            // knife-edge values
            check("knife_edge_loss_nu0_db", knife_edge_loss_db(0.0), 6.0206, t("knife_edge_db", 0.01));
            check("knife_edge_loss_nu_minus1e3_db", knife_edge_loss_db(-1e3), 0.0, t("knife_edge_db", 0.01));
            {
                cdouble cs = simpson_fresnel(1.0);
                cdouble ref = cdouble(0.5, 0.5) * cdouble(0.5 - cs.real(), -(0.5 - cs.imag()));
                check("knife_edge_nu1_vs_simpson_db", knife_edge_loss_db(1.0), -20.0 * std::log10(std::abs(ref)),
                      t("fresnel_oracle_db", 0.05));
            }

            const Point3 tx{0.0, 0.0, 1.2}, rx{3.5, 0.0, 1.2}, mid{1.75, 0.0, 1.2};
            const double pitch = 0.01;
            // half-plane whose edge passes through the LoS
            {
                auto s = make_screen(mid, tx, rx, filled_grid(0.0, -1.5, pitch, 200, 300));
                check("po_half_plane_grazing_db", 20.0 * std::log10(std::abs(po_field_oracle(s, tx, rx, f_hz))), -6.0206,
                      t("half_plane_db", 0.1));
                check("edge_half_plane_grazing_db", 20.0 * std::log10(std::abs(edge_field(s, tx, rx, f_hz))), -6.0206,
                      t("half_plane_db", 0.1));
            }
            // Babinet on a 0.5 m x 1.7 m screen offset from the LoS
            {
                auto s = make_screen(mid, tx, rx, filled_grid(0.05, -0.85, pitch, 50, 170));
                cdouble sum = po_field_open_aperture(s, tx, rx, f_hz, 8) + po_field_complement(s, tx, rx, f_hz, 8);
                check("babinet_sum_minus_free_space", std::abs(sum - 1.0), 0.0, t("babinet", 5e-3));
            }
            // free-space recovery
            {
                auto s = make_screen(mid, tx, rx, filled_grid(0.6, -0.85, pitch, 50, 170));
                auto sp = find_stationary_points(s, tx, rx, f_hz);
                check("free_space_recovery_db", 20.0 * std::log10(std::abs(edge_field(sp, s, tx, rx, f_hz))), 0.0,
                      t("free_space_db", 0.1));
            }
            // 0.5 m x 1.7 m rectangle with its edge stepped across the LoS (lit and transition)
            for (double off : {0.08, 0.03, 0.01, -0.01, -0.03})
            {
                auto s = make_screen(mid, tx, rx, filled_grid(off, -0.85, pitch, 50, 170));
                auto sp = find_stationary_points(s, tx, rx, f_hz);
                double nu = sp.nearest() ? sp.nearest()->nu : -1e9;
                double e = 20.0 * std::log10(std::abs(edge_field(sp, s, tx, rx, f_hz)));
                double p = 20.0 * std::log10(std::abs(po_field_oracle(s, tx, rx, f_hz)));
                check("rectangle_offset_" + fmt(off) + "_nu_" + fmt(std::round(nu * 100.0) / 100.0), e, p,
                      nu < -1.0 ? t("lit_db", 1.0) : t("transition_db", 1.5));
            }
            check("averaging_gain_100_db", averaging_gain_db(100), 20.0, 1e-12);
            (void)jobs;

            RunResult r;
            r.status = all ? ExitCode::success : ExitCode::validation_failure;
            nlohmann::json js = {{"carrier_hz", f_hz}, {"checks", checks}, {"pass", all}};
            r.artifacts.push_back({"validation.json", js.dump(2) + "\n"});
            r.message = all ? "all validation checks passed" : "validation checks failed";
            return r;
        }
    } // namespace detail

    /// Runs one scenario and returns its artifacts (including manifest.json)
    /// without touching the file system. ConfigError signals exit code 2.
    inline RunResult run_scenario(const ScenarioConfig &cfg, unsigned jobs = 1)
    {
        jobs = std::max(1u, jobs);
        RunResult r;
        switch (cfg.mode)
        {
        case ScenarioMode::qd_gen: r = detail::run_qd_gen(cfg); break;
        case ScenarioMode::qd_stats: r = detail::run_qd_stats(cfg, jobs); break;
        case ScenarioMode::mimo_cap: r = detail::run_mimo_cap(cfg, jobs); break;
        case ScenarioMode::hbs_run:
        case ScenarioMode::hbs_doppler: r = detail::run_hbs(cfg, jobs); break;
        case ScenarioMode::validate: r = detail::run_validate(cfg, jobs); break;
        }
        r.artifacts.push_back(make_manifest(cfg, r.artifacts, r.status));
        return r;
    }

    /// Machine-readable diagnostic for a failed run.
    inline std::string error_json(ExitCode code, const std::string &key, const std::string &message)
    {
        nlohmann::json j = {{"error", code == ExitCode::config_error ? "config_error" : "runtime_error"},
                            {"exit_code", int(code)},
                            {"key", key},
                            {"message", message}};
        return j.dump();
    }

} // namespace thz

#endif
