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

#ifndef THZSIM_PARALLEL_HPP
#define THZSIM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace thz
{
    /// Evaluates f(0) ... f(n-1) on up to `jobs` threads. Results are stored by
    /// index, so the output does not depend on scheduling. The first exception
    /// thrown by any task is rethrown after all workers finish.
    template <class F>
    auto parallel_map(std::size_t n, unsigned jobs, F &&f) -> std::vector<std::invoke_result_t<F &, std::size_t>>
    {
        using R = std::invoke_result_t<F &, std::size_t>;
        std::vector<R> out(n);
        jobs = std::max(1u, std::min<unsigned>(jobs, unsigned(std::max<std::size_t>(n, 1))));
        if (jobs == 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                out[i] = f(i);
            return out;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr err;
        std::mutex err_mutex;
        auto worker = [&]() {
            while (!failed.load())
            {
                std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try
                {
                    out[i] = f(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err)
                        err = std::current_exception();
                    failed = true;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
        if (err)
            std::rethrow_exception(err);
        return out;
    }

} // namespace thz

#endif
