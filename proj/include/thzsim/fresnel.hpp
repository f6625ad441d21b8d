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

#ifndef THZSIM_FRESNEL_HPP
#define THZSIM_FRESNEL_HPP

#include "thzsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace thz
{
    using cdouble = std::complex<double>;

    struct FresnelCS
    {
        double c = 0.0; // C(x) = int_0^x cos(pi t^2 / 2) dt
        double s = 0.0; // S(x) = int_0^x sin(pi t^2 / 2) dt
    };

    /// Fresnel integrals C(x), S(x) to near machine precision.
    ///
    /// |x| <= 1.5 uses the power series, larger arguments the continued
    /// fraction of the complementary error function (modified Lentz).
    inline FresnelCS fresnel_cs(double x)
    {
        constexpr double eps = 1e-16;
        constexpr double fp_min = 1e-300;
        constexpr int max_iter = 200;
        constexpr double x_switch = 1.5;

        const double ax = std::abs(x);
        FresnelCS r;
        if (ax < 1e-150)
        {
            r = {ax, 0.0};
        }
        else if (ax <= x_switch)
        {
            // Alternating series; even terms feed C, odd terms feed S
            double sum = 0.0, sum_s = 0.0, sum_c = ax;
            double sign = 1.0, fact = 0.5 * pi * ax * ax, term = ax;
            bool odd = true;
            int n = 3;
            for (int k = 1; k <= max_iter; ++k)
            {
                term *= fact / k;
                sum += sign * term / n;
                double test = std::abs(sum) * eps;
                if (odd)
                {
                    sign = -sign;
                    sum_s = sum;
                    sum = sum_c;
                }
                else
                {
                    sum_c = sum;
                    sum = sum_s;
                }
                if (term < test)
                    break;
                odd = !odd;
                n += 2;
                if (k == max_iter)
                    throw std::runtime_error("Fresnel series failed to converge.");
            }
            r = {sum_c, sum_s};
        }
        else
        {
            const double pix2 = pi * ax * ax;
            cdouble b(1.0, -pix2);
            cdouble cc(1.0 / fp_min, 0.0);
            cdouble d = 1.0 / b;
            cdouble h = d;
            int n = -1;
            for (int k = 2; k <= max_iter; ++k)
            {
                n += 2;
                double a = -double(n) * double(n + 1);
                b += 4.0;
                d = 1.0 / (a * d + b);
                cc = b + a / cc;
                cdouble del = cc * d;
                h *= del;
                if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps)
                    break;
                if (k == max_iter)
                    throw std::runtime_error("Fresnel continued fraction failed to converge.");
            }
            h *= cdouble(ax, -ax);
            cdouble cs = cdouble(0.5, 0.5) * (1.0 - cdouble(std::cos(0.5 * pix2), std::sin(0.5 * pix2)) * h);
            r = {cs.real(), cs.imag()};
        }
        if (x < 0.0)
            r = {-r.c, -r.s};
        return r;
    }

    /// Knife-edge field relative to free space,
    ///   F(nu) = (1+j)/2 * int_nu^inf exp(-j pi t^2 / 2) dt,
    /// nu > 0 in the geometric shadow. F(0) = 0.5, F(-inf) = 1.
    inline cdouble knife_edge_coeff(double nu)
    {
        if (!std::isfinite(nu))
        {
            if (std::isnan(nu))
                throw std::invalid_argument("Knife-edge parameter is NaN.");
            return nu < 0.0 ? cdouble(1.0, 0.0) : cdouble(0.0, 0.0);
        }
        FresnelCS f = fresnel_cs(nu);
        return cdouble(0.5, 0.5) * cdouble(0.5 - f.c, -(0.5 - f.s));
    }

    /// Knife-edge loss in dB (positive = attenuation).
    inline double knife_edge_loss_db(double nu) { return -20.0 * std::log10(std::abs(knife_edge_coeff(nu))); }

    /// Diffraction parameter from the excess path length of an edge path,
    /// nu = sign * 2 sqrt(delta / lambda); exact for the paraxial straight edge.
    inline double fresnel_nu(double excess_path_m, double wavelength_m, bool shadow_side)
    {
        double nu = 2.0 * std::sqrt(std::max(excess_path_m, 0.0) / wavelength_m);
        return shadow_side ? nu : -nu;
    }

} // namespace thz

#endif
