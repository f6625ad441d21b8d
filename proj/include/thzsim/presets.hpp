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

// Environment presets: planar reflectors for the deterministic part and the
// stochastic cluster parameters for the random part of the channel.
//
// The cluster-power parameters are fit targets (see tools/fit_presets.cpp),
// not measured constants. The cluster count includes the LoS path.

#ifndef THZSIM_PRESETS_HPP
#define THZSIM_PRESETS_HPP

#include "thzsim/geometry.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace thz
{
    /// Rectangular planar reflector. The normal points to the side where
    /// Tx and Rx must be for a reflection to exist.
    struct Reflector
    {
        std::string name;
        Plane plane;          // plane.origin is the rectangle center
        Point3 axis_u;        // in-plane unit vector
        double half_u = 0.0;  // half extent along axis_u (m)
        double half_v = 0.0;  // half extent along normal x axis_u (m)
        double loss_db = 12.0;

        Point3 axis_v() const { return normalized(cross(plane.normal, axis_u)); }
    };

    struct IntraClusterParams
    {
        int subpath_count = 20;
        double delay_spread_ns = 1.0;
        double angle_spread_deg = 2.0;
    };

    /// Tx is fixed, Rx is drawn uniformly from an axis-aligned box.
    struct Placement
    {
        Point3 tx;
        Point3 rx_min;
        Point3 rx_max;
    };

    struct EnvironmentPreset
    {
        std::string name;
        std::vector<Reflector> reflectors;
        double mean_cluster_count = 1.0;            // including deterministic paths
        double cluster_power_decay_db_per_ns = 1.0; // dB/ns
        double cluster_power_floor_db = -30.0;      // dB vs LoS
        double cluster_power_offset_db = 0.0;       // intercept of the power-delay line, dB vs LoS
        double shadow_sigma_db = 3.0;
        double excess_delay_scale_ns = 10.0;
        double max_excess_delay_ns = 90.0;
        IntraClusterParams intra;
        double carrier_hz = 300e9;
        Point3 bounds_min{-1e3, -1e3, -1e3};
        Point3 bounds_max{1e3, 1e3, 1e3};
        Placement placement;
        std::string notes;
    };

    inline Reflector make_reflector(std::string name, const Point3 &center, const Point3 &normal, const Point3 &axis_u,
                                    double half_u, double half_v, double loss_db)
    {
        Reflector r;
        r.name = std::move(name);
        r.plane = make_plane(center, normal);
        Point3 a = axis_u - r.plane.normal * dot(axis_u, r.plane.normal);
        r.axis_u = normalized(a);
        r.half_u = half_u;
        r.half_v = half_v;
        r.loss_db = loss_db;
        return r;
    }

    inline bool inside_bounds(const EnvironmentPreset &p, const Point3 &q)
    {
        return q.x >= p.bounds_min.x && q.x <= p.bounds_max.x && q.y >= p.bounds_min.y && q.y <= p.bounds_max.y &&
               q.z >= p.bounds_min.z && q.z <= p.bounds_max.z;
    }

    inline void validate_preset(const EnvironmentPreset &p)
    {
        auto fail = [&](const std::string &m) { throw std::invalid_argument("Preset '" + p.name + "': " + m); };
        if (p.name.empty())
            throw std::invalid_argument("Preset name is empty.");
        if (!(p.mean_cluster_count > 0.0))
            fail("mean_cluster_count must be positive.");
        if (!(p.cluster_power_decay_db_per_ns > 0.0))
            fail("cluster_power_decay_db_per_ns must be positive.");
        if (!(p.cluster_power_floor_db < 0.0))
            fail("cluster_power_floor_db must be negative.");
        if (!(p.shadow_sigma_db >= 0.0))
            fail("shadow_sigma_db must be non-negative.");
        if (!(p.excess_delay_scale_ns > 0.0) || !(p.max_excess_delay_ns > 0.0))
            fail("excess-delay scale and cap must be positive.");
        if (!std::isfinite(p.cluster_power_offset_db) || p.cluster_power_offset_db <= p.cluster_power_floor_db)
            fail("cluster_power_offset_db must lie above the floor.");
        if (p.intra.subpath_count < 1)
            fail("intra-cluster subpath_count must be at least 1.");
        if (!(p.intra.delay_spread_ns >= 0.0) || !(p.intra.angle_spread_deg >= 0.0))
            fail("intra-cluster spreads must be non-negative.");
        if (!(p.carrier_hz > 0.0))
            fail("carrier_hz must be positive.");
        std::set<std::string> names;
        for (const auto &r : p.reflectors)
        {
            if (!names.insert(r.name).second)
                fail("duplicate reflector name '" + r.name + "'.");
            require_unit_normal(r.plane);
            if (!(r.half_u > 0.0) || !(r.half_v > 0.0))
                fail("reflector '" + r.name + "' has a degenerate extent.");
            if (std::abs(dot(r.axis_u, r.plane.normal)) > 1e-9 || std::abs(norm(r.axis_u) - 1.0) > 1e-9)
                fail("reflector '" + r.name + "' axis_u must be a unit vector in its plane.");
            if (!(r.loss_db >= 0.0) || !std::isfinite(r.loss_db))
                fail("reflector '" + r.name + "' loss must be finite and non-negative.");
        }
        auto ordered = [](const Point3 &a, const Point3 &b) { return a.x <= b.x && a.y <= b.y && a.z <= b.z; };
        if (!ordered(p.bounds_min, p.bounds_max))
            fail("bounds_min must not exceed bounds_max.");
        if (!ordered(p.placement.rx_min, p.placement.rx_max))
            fail("placement rx_min must not exceed rx_max.");
        if (!inside_bounds(p, p.placement.tx) || !inside_bounds(p, p.placement.rx_min) || !inside_bounds(p, p.placement.rx_max))
            fail("placement lies outside the environment bounds.");
    }

    // ---------------------------------------------------------------------
    // Built-in catalog. Values below are written by tools/fit_presets and
    // mirrored in presets/*.json.

    inline EnvironmentPreset preset_corridor()
    {
        EnvironmentPreset p;
        p.name = "corridor";
        p.notes = "2.4 m wide, 40 m long corridor; plastered side walls. Rx on the centerline 5-30 m from Tx.";
        p.reflectors = {make_reflector("wall_north", {20.0, 1.2, 1.5}, {0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, 20.0, 1.5, 12.0),
                        make_reflector("wall_south", {20.0, -1.2, 1.5}, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, 20.0, 1.5, 12.0)};
        p.mean_cluster_count = 8.0;
        p.cluster_power_decay_db_per_ns = 1.49;
        p.excess_delay_scale_ns = 8.0;
        p.max_excess_delay_ns = 90.0;
        p.bounds_min = {0.0, -1.2, 0.0};
        p.bounds_max = {40.0, 1.2, 3.0};
        p.placement = {{3.0, 0.0, 1.6}, {8.0, 0.0, 1.6}, {33.0, 0.0, 1.6}};
        return p;
    }

    inline EnvironmentPreset preset_conference_medium()
    {
        EnvironmentPreset p;
        p.name = "conference_medium";
        p.notes = "10 m x 7 m room; glass facade on the north side, drywall on the south side.";
        p.reflectors = {make_reflector("facade_north", {5.0, 7.0, 1.5}, {0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, 5.0, 1.5, 8.0),
                        make_reflector("wall_south", {5.0, 0.0, 1.5}, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, 5.0, 1.5, 12.0)};
        p.mean_cluster_count = 8.0;
        p.cluster_power_decay_db_per_ns = 1.44;
        p.excess_delay_scale_ns = 8.0;
        p.max_excess_delay_ns = 90.0;
        p.bounds_min = {0.0, 0.0, 0.0};
        p.bounds_max = {10.0, 7.0, 3.0};
        p.placement = {{1.5, 3.5, 1.4}, {5.0, 2.0, 1.4}, {9.0, 5.0, 1.4}};
        return p;
    }

    inline EnvironmentPreset preset_conference_large()
    {
        EnvironmentPreset p;
        p.name = "conference_large";
        p.notes = "20 m x 14 m hall; glass facade on the north side, concrete on the south side.";
        p.reflectors = {make_reflector("facade_north", {10.0, 14.0, 2.0}, {0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, 10.0, 2.0, 8.0),
                        make_reflector("wall_south", {10.0, 0.0, 2.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, 10.0, 2.0, 12.0)};
        p.mean_cluster_count = 6.0;
        p.cluster_power_decay_db_per_ns = 0.979;
        p.excess_delay_scale_ns = 8.0;
        p.max_excess_delay_ns = 90.0;
        p.bounds_min = {0.0, 0.0, 0.0};
        p.bounds_max = {20.0, 14.0, 4.0};
        p.placement = {{2.0, 7.0, 1.4}, {8.0, 5.0, 1.4}, {18.0, 9.0, 1.4}};
        return p;
    }

    inline EnvironmentPreset preset_open_square()
    {
        EnvironmentPreset p;
        p.name = "open_square";
        p.notes = "Pedestrian street between two glass facades 8.2 m apart; Tx and Rx on the center line, 9.5-10.5 m apart.";
        p.reflectors = {make_reflector("facade_north", {5.0, 4.1, 7.5}, {0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, 25.0, 7.5, 8.0),
                        make_reflector("facade_south", {5.0, -4.1, 7.5}, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, 25.0, 7.5, 8.0)};
        p.mean_cluster_count = 4.0;
        p.cluster_power_decay_db_per_ns = 0.5;
        p.cluster_power_offset_db = -11.5;
        p.excess_delay_scale_ns = 1.5;
        p.max_excess_delay_ns = 150.0;
        p.bounds_min = {-20.0, -4.1, 0.0};
        p.bounds_max = {30.0, 4.1, 15.0};
        p.placement = {{0.0, 0.0, 1.5}, {9.5, 0.0, 1.5}, {10.5, 0.0, 1.5}};
        return p;
    }

    inline std::vector<std::string> preset_names() { return {"corridor", "conference_medium", "conference_large", "open_square"}; }

    inline EnvironmentPreset builtin_preset(const std::string &name)
    {
        if (name == "corridor")
            return preset_corridor();
        if (name == "conference_medium")
            return preset_conference_medium();
        if (name == "conference_large")
            return preset_conference_large();
        if (name == "open_square")
            return preset_open_square();
        throw std::invalid_argument("Unknown preset '" + name + "'.");
    }

    // ---------------------------------------------------------------------
    // JSON form

    namespace detail
    {
        inline nlohmann::json to_json_point(const Point3 &p) { return nlohmann::json::array({p.x, p.y, p.z}); }

        inline Point3 point_from_json(const nlohmann::json &j, const std::string &what)
        {
            if (!j.is_array() || j.size() != 3)
                throw std::invalid_argument(what + " must be an array of three numbers.");
            Point3 p;
            for (int k = 0; k < 3; ++k)
                if (!j[k].is_number())
                    throw std::invalid_argument(what + " must be an array of three numbers.");
            p = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
            require_finite(p, what.c_str());
            return p;
        }

        inline void reject_unknown(const nlohmann::json &j, std::initializer_list<const char *> allowed, const std::string &where)
        {
            if (!j.is_object())
                throw std::invalid_argument(where + " must be a JSON object.");
            for (auto it = j.begin(); it != j.end(); ++it)
                if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return it.key() == a; }))
                    throw std::invalid_argument("Unknown key '" + it.key() + "' in " + where + ".");
        }

        inline double num(const nlohmann::json &j, const char *key, const std::string &where)
        {
            if (!j.contains(key))
                throw std::invalid_argument("Missing key '" + std::string(key) + "' in " + where + ".");
            if (!j.at(key).is_number())
                throw std::invalid_argument("Key '" + std::string(key) + "' in " + where + " must be a number.");
            return j.at(key).get<double>();
        }
    } // namespace detail

    inline nlohmann::json preset_to_json(const EnvironmentPreset &p)
    {
        using detail::to_json_point;
        nlohmann::json refl = nlohmann::json::array();
        for (const auto &r : p.reflectors)
            refl.push_back({{"name", r.name},
                            {"center", to_json_point(r.plane.origin)},
                            {"normal", to_json_point(r.plane.normal)},
                            {"axis_u", to_json_point(r.axis_u)},
                            {"half_u", r.half_u},
                            {"half_v", r.half_v},
                            {"loss_db", r.loss_db}});
        return {{"name", p.name},
                {"notes", p.notes},
                {"carrier_hz", p.carrier_hz},
                {"mean_cluster_count", p.mean_cluster_count},
                {"cluster_power_decay_db_per_ns", p.cluster_power_decay_db_per_ns},
                {"cluster_power_floor_db", p.cluster_power_floor_db},
                {"cluster_power_offset_db", p.cluster_power_offset_db},
                {"shadow_sigma_db", p.shadow_sigma_db},
                {"excess_delay_scale_ns", p.excess_delay_scale_ns},
                {"max_excess_delay_ns", p.max_excess_delay_ns},
                {"intra_cluster",
                 {{"subpath_count", p.intra.subpath_count},
                  {"delay_spread_ns", p.intra.delay_spread_ns},
                  {"angle_spread_deg", p.intra.angle_spread_deg}}},
                {"bounds", {{"min", to_json_point(p.bounds_min)}, {"max", to_json_point(p.bounds_max)}}},
                {"placement",
                 {{"tx", to_json_point(p.placement.tx)},
                  {"rx_min", to_json_point(p.placement.rx_min)},
                  {"rx_max", to_json_point(p.placement.rx_max)}}},
                {"reflectors", refl}};
    }

    inline EnvironmentPreset preset_from_json(const nlohmann::json &j)
    {
        using detail::num;
        using detail::point_from_json;
        detail::reject_unknown(j,
                               {"name", "notes", "carrier_hz", "mean_cluster_count", "cluster_power_decay_db_per_ns",
                                "cluster_power_floor_db", "cluster_power_offset_db", "shadow_sigma_db",
                                "excess_delay_scale_ns", "max_excess_delay_ns", "intra_cluster", "bounds", "placement",
                                "reflectors"},
                               "preset");
        EnvironmentPreset p;
        if (!j.contains("name") || !j["name"].is_string())
            throw std::invalid_argument("Preset needs a string 'name'.");
        p.name = j["name"].get<std::string>();
        const std::string where = "preset '" + p.name + "'";
        if (j.contains("notes"))
            p.notes = j["notes"].get<std::string>();
        if (j.contains("carrier_hz"))
            p.carrier_hz = num(j, "carrier_hz", where);
        p.mean_cluster_count = num(j, "mean_cluster_count", where);
        p.cluster_power_decay_db_per_ns = num(j, "cluster_power_decay_db_per_ns", where);
        if (j.contains("cluster_power_floor_db"))
            p.cluster_power_floor_db = num(j, "cluster_power_floor_db", where);
        if (j.contains("cluster_power_offset_db"))
            p.cluster_power_offset_db = num(j, "cluster_power_offset_db", where);
        if (j.contains("shadow_sigma_db"))
            p.shadow_sigma_db = num(j, "shadow_sigma_db", where);
        p.excess_delay_scale_ns = num(j, "excess_delay_scale_ns", where);
        p.max_excess_delay_ns = num(j, "max_excess_delay_ns", where);
        if (j.contains("intra_cluster"))
        {
            const auto &ic = j["intra_cluster"];
            detail::reject_unknown(ic, {"subpath_count", "delay_spread_ns", "angle_spread_deg"}, where + " intra_cluster");
            if (ic.contains("subpath_count"))
            {
                if (!ic["subpath_count"].is_number_integer())
                    throw std::invalid_argument("intra_cluster.subpath_count must be an integer.");
                p.intra.subpath_count = ic["subpath_count"].get<int>();
            }
            if (ic.contains("delay_spread_ns"))
                p.intra.delay_spread_ns = num(ic, "delay_spread_ns", where);
            if (ic.contains("angle_spread_deg"))
                p.intra.angle_spread_deg = num(ic, "angle_spread_deg", where);
        }
        if (j.contains("bounds"))
        {
            const auto &b = j["bounds"];
            detail::reject_unknown(b, {"min", "max"}, where + " bounds");
            p.bounds_min = point_from_json(b.at("min"), "bounds.min");
            p.bounds_max = point_from_json(b.at("max"), "bounds.max");
        }
        if (!j.contains("placement"))
            throw std::invalid_argument("Missing key 'placement' in " + where + ".");
        {
            const auto &pl = j["placement"];
            detail::reject_unknown(pl, {"tx", "rx_min", "rx_max"}, where + " placement");
            p.placement.tx = point_from_json(pl.at("tx"), "placement.tx");
            p.placement.rx_min = point_from_json(pl.at("rx_min"), "placement.rx_min");
            p.placement.rx_max = point_from_json(pl.at("rx_max"), "placement.rx_max");
        }
        if (j.contains("reflectors"))
        {
            if (!j["reflectors"].is_array())
                throw std::invalid_argument("'reflectors' must be an array.");
            for (const auto &r : j["reflectors"])
            {
                detail::reject_unknown(r, {"name", "center", "normal", "axis_u", "half_u", "half_v", "loss_db"},
                                       where + " reflector");
                if (!r.contains("name") || !r["name"].is_string())
                    throw std::invalid_argument("Reflector needs a string 'name'.");
                p.reflectors.push_back(make_reflector(r["name"].get<std::string>(), point_from_json(r.at("center"), "center"),
                                                      point_from_json(r.at("normal"), "normal"),
                                                      point_from_json(r.at("axis_u"), "axis_u"), num(r, "half_u", where),
                                                      num(r, "half_v", where), num(r, "loss_db", where)));
            }
        }
        validate_preset(p);
        return p;
    }

    inline EnvironmentPreset load_preset_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("Cannot open preset file '" + path + "'.");
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw std::invalid_argument("Preset file '" + path + "' is not valid JSON: " + e.what());
        }
        return preset_from_json(j);
    }

    /// Overrides the loss of the named reflector.
    inline void set_reflection_loss(EnvironmentPreset &p, const std::string &reflector, double loss_db)
    {
        for (auto &r : p.reflectors)
            if (r.name == reflector)
            {
                if (!(loss_db >= 0.0) || !std::isfinite(loss_db))
                    throw std::invalid_argument("Reflection loss must be finite and non-negative.");
                r.loss_db = loss_db;
                return;
            }
        throw std::invalid_argument("Preset '" + p.name + "' has no reflector named '" + reflector + "'.");
    }

} // namespace thz

#endif
