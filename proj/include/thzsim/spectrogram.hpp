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

// Short-time Fourier transform of fading series (Doppler spectrograms).

#ifndef THZSIM_SPECTROGRAM_HPP
#define THZSIM_SPECTROGRAM_HPP

#include "thzsim/fading.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace thz
{
    /// Magnitude STFT. magnitude[m][k] belongs to times_s[m] (window center)
    /// and freqs_hz[k], which runs from -fs/2 upward in steps of fs/window.
    struct Spectrogram
    {
        double fs_hz = 30000.0;
        std::size_t window = 1024;
        std::size_t hop = 512;
        std::vector<double> times_s;
        std::vector<double> freqs_hz;
        std::vector<std::vector<double>> magnitude;

        double bin_hz() const { return fs_hz / double(window); }
        /// Index of the 0 Hz bin.
        std::size_t zero_bin() const { return window / 2; }
    };

    /// Periodic Hann window.
    inline std::vector<double> hann_window(std::size_t n)
    {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(two_pi * double(i) / double(n)));
        return w;
    }

    inline Spectrogram doppler_spectrogram(const std::vector<std::complex<double>> &x, double fs_hz, double t0_s = 0.0,
                                           std::size_t window = 1024, double overlap = 0.5)
    {
        if (window < 2)
            throw std::invalid_argument("STFT window must have at least two samples.");
        if (!(overlap >= 0.0 && overlap < 1.0))
            throw std::invalid_argument("STFT overlap must lie in [0, 1).");
        if (x.size() < window)
            throw std::invalid_argument("Series is shorter than the STFT window.");
        Spectrogram sp;
        sp.fs_hz = fs_hz;
        sp.window = window;
        sp.hop = std::max<std::size_t>(1, std::size_t(std::llround(double(window) * (1.0 - overlap))));
        const std::size_t half = window / 2;
        sp.freqs_hz.resize(window);
        for (std::size_t k = 0; k < window; ++k)
            sp.freqs_hz[k] = (double(k) - double(half)) * fs_hz / double(window);

        const auto w = hann_window(window);
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> in(window), out(window);
        for (std::size_t start = 0; start + window <= x.size(); start += sp.hop)
        {
            for (std::size_t i = 0; i < window; ++i)
                in[i] = x[start + i] * w[i];
            fft.fwd(out, in);
            std::vector<double> row(window);
            // fftshift: bin 0 of the output row is -fs/2
            for (std::size_t k = 0; k < window; ++k)
                row[k] = std::abs(out[(k + window - half) % window]);
            sp.magnitude.push_back(std::move(row));
            sp.times_s.push_back(t0_s + (double(start) + 0.5 * double(window)) / fs_hz);
        }
        return sp;
    }

    inline Spectrogram doppler_spectrogram(const FadingSeries &s, std::size_t window = 1024, double overlap = 0.5)
    {
        return doppler_spectrogram(s.samples, s.fs_hz, s.t0_s, window, overlap);
    }

    /// Fraction of the total spectrogram energy within `half_width` bins of
    /// 0 Hz. With the Hann window a stationary tone occupies three bins, so
    /// half_width = 1 is the 0 Hz resolution cell.
    inline double zero_doppler_energy_fraction(const Spectrogram &sp, std::size_t half_width = 1)
    {
        double total = 0.0, cell = 0.0;
        const std::size_t z = sp.zero_bin();
        for (const auto &row : sp.magnitude)
            for (std::size_t k = 0; k < row.size(); ++k)
            {
                double e = row[k] * row[k];
                total += e;
                if (k + half_width >= z && k <= z + half_width)
                    cell += e;
            }
        return total > 0.0 ? cell / total : 1.0;
    }

    /// Frequency of the strongest bin per frame, ignoring bins within
    /// `exclude_half_width` of 0 Hz (the static LoS line) when it is set.
    inline std::vector<double> doppler_peak_trace(const Spectrogram &sp, long exclude_half_width = -1)
    {
        std::vector<double> out;
        out.reserve(sp.magnitude.size());
        const long z = long(sp.zero_bin());
        for (const auto &row : sp.magnitude)
        {
            long best = -1;
            for (long k = 0; k < long(row.size()); ++k)
            {
                if (exclude_half_width >= 0 && std::abs(k - z) <= exclude_half_width)
                    continue;
                if (best < 0 || row[std::size_t(k)] > row[std::size_t(best)])
                    best = k;
            }
            out.push_back(best < 0 ? 0.0 : sp.freqs_hz[std::size_t(best)]);
        }
        return out;
    }

} // namespace thz

#endif
