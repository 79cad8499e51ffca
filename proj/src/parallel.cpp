// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace eigenrom
{

int resolve_jobs(int requested)
{
  if (requested > 0)
  {
    return requested;
  }
  if (const char *env = std::getenv("EIGENROM_JOBS"))
  {
    try
    {
      const int v = std::stoi(env);
      if (v > 0)
      {
        return v;
      }
    }
    catch (const std::exception &)
    {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, int jobs, const std::function<void(int)> &body)
{
  if (n <= 0)
  {
    return;
  }
  const int workers = std::clamp(jobs, 1, n);
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1)
  {
    for (int i = 0; i < n; i++)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        errors[i] = std::current_exception();
      }
    }
  }
  else
  {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; w++)
    {
      pool.emplace_back(
          [&]
          {
            for (int i = next++; i < n; i = next++)
            {
              try
              {
                body(i);
              }
              catch (...)
              {
                errors[i] = std::current_exception();
              }
            }
          });
    }
    for (auto &t : pool)
    {
      t.join();
    }
  }
  for (const auto &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace eigenrom
