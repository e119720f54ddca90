// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nhqm
{

// Worker count: NHQM_THREADS if set and positive, else hardware concurrency.
inline unsigned thread_count()
{
  if (const char *env = std::getenv("NHQM_THREADS"))
  {
    try
    {
      const long n = std::stol(env);
      if (n > 0)
        return static_cast<unsigned>(n);
    }
    catch (const std::exception &)
    {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail
{
inline thread_local bool inside_parallel_region = false;
}

// Runs body(i) for i in [0, n). Nested calls run serially on the calling worker. Results must be written to per-index slots so the outcome
// does not depend on scheduling. The first exception thrown is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body &&body)
{
  const unsigned workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || detail::inside_parallel_region)
  {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
  {
    pool.emplace_back([&] {
      detail::inside_parallel_region = true;
      for (;;)
      {
        const std::size_t i = next.fetch_add(1);
        if (i >= n)
          return;
        try
        {
          body(i);
        }
        catch (...)
        {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

}  // namespace nhqm
