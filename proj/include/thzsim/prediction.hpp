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

// Envelope prediction error of a fading series against a reference.

#ifndef THZSIM_PREDICTION_HPP
#define THZSIM_PREDICTION_HPP

#include "thzsim/channel_stats.hpp"
#include "thzsim/fading.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace thz
{
    struct PredictionError
    {
        double bias = 0.0;          // mean of |pred| - |ref| (LoS envelope units)
        double rms = 0.0;
        double bias_db_equiv = 0.0; // 20 log10(1 + bias)
        std::size_t lit_samples = 0;
        std::vector<std::pair<double, double>> cdf; // (error, F)
    };

    /// Statistics of |pred| - |ref| over the samples the reference marks as lit.
    inline PredictionError prediction_error(const FadingSeries &pred, const FadingSeries &ref)
    {
        if (pred.samples.size() != ref.samples.size())
            throw std::invalid_argument("Prediction and reference series differ in length.");
        if (pred.fs_hz != ref.fs_hz)
            throw std::invalid_argument("Prediction and reference series differ in sampling rate.");
        if (ref.lit.size() != ref.samples.size())
            throw std::invalid_argument("Reference series has no lit/shadow flags.");
        std::vector<double> err;
        for (std::size_t n = 0; n < ref.samples.size(); ++n)
            if (ref.lit[n])
                err.push_back(std::abs(pred.samples[n]) - std::abs(ref.samples[n]));
        if (err.empty())
            throw std::invalid_argument("Reference series has no lit-region samples.");
        PredictionError pe;
        pe.lit_samples = err.size();
        double s = 0.0, s2 = 0.0;
        for (double e : err)
            s += e, s2 += e * e;
        pe.bias = s / double(err.size());
        pe.rms = std::sqrt(s2 / double(err.size()));
        pe.bias_db_equiv = 1.0 + pe.bias > 0.0 ? 20.0 * std::log10(1.0 + pe.bias) : -INFINITY;
        pe.cdf = empirical_cdf(std::move(err));
        return pe;
    }

} // namespace thz

#endif
