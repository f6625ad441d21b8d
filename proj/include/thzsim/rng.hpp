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

// Seeded random streams. Every stochastic call derives its own generator
// from (seed, positions, stream tag), so results never depend on call order
// or thread scheduling.

#ifndef THZSIM_RNG_HPP
#define THZSIM_RNG_HPP

#include "thzsim/geometry.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace thz
{
    using Rng = std::mt19937_64;

    namespace detail
    {
        constexpr std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ull;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
            return x ^ (x >> 31);
        }

        constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

        constexpr std::uint64_t hash_tag(std::string_view s)
        {
            std::uint64_t h = 0xcbf29ce484222325ull; // FNV-1a
            for (char c : s)
                h = (h ^ std::uint64_t(static_cast<unsigned char>(c))) * 0x100000001b3ull;
            return h;
        }

        inline std::uint64_t hash_point(std::uint64_t h, const Point3 &p)
        {
            // +0.0 and -0.0 map to the same stream
            auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v); };
            h = mix(h, bits(p.x));
            h = mix(h, bits(p.y));
            return mix(h, bits(p.z));
        }
    } // namespace detail

    /// Independent stream for (seed, tag).
    inline Rng make_rng(std::uint64_t seed, std::string_view tag)
    {
        return Rng(detail::mix(detail::hash_tag(tag), seed));
    }

    /// Independent stream for (seed, tx, rx, tag).
    inline Rng make_rng(std::uint64_t seed, const Point3 &tx, const Point3 &rx, std::string_view tag)
    {
        std::uint64_t h = detail::mix(detail::hash_tag(tag), seed);
        h = detail::hash_point(h, tx);
        h = detail::hash_point(h, rx);
        return Rng(h);
    }

    inline double uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    /// Zero-mean Laplacian sample with scale b (standard deviation sqrt(2) b).
    inline double laplace(Rng &rng, double b)
    {
        double u = uniform(rng, -0.5, 0.5);
        double m = 1.0 - 2.0 * std::abs(u);
        if (m <= 0.0)
            m = 1e-300;
        return (u < 0.0 ? b : -b) * std::log(m);
    }

} // namespace thz

#endif
