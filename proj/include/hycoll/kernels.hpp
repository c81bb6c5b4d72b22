/*
 Copyright 2026 The hycoll Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <vector>

#include "hycoll/runtime.hpp"
#include "hycoll/transport.hpp"

namespace hycoll {

/// Instrumentation common to both kernels: wall time split into computation
/// and collective communication, plus the transport counter deltas of the
/// whole run.
struct KernelStats {
  int phases = 0;  // SUMMA core phases or Poisson iterations
  double total_us = 0.0;
  double comm_us = 0.0;
  double comp_us = 0.0;
  CounterSnapshot traffic;
  int method = 0;                       // Poisson: allreduce method in use
  std::vector<double> maxdiff_history;  // Poisson: global maxdiff per iteration
};

/// Dense matrix multiply on a grid_r x grid_c process grid. A and B are
/// filled from seeded per-block RNG streams (uniform in [-1, 1]).
struct SummaConfig {
  int n = 0;
  int grid_r = 0;
  int grid_c = 0;
  Mode mode = Mode::Hybrid;
  std::uint64_t seed = 1;
};

struct SummaResult {
  std::vector<double> c;  // row-major n x n, assembled from the rank blocks
  KernelStats stats;
};

/// Run SUMMA under the given launch topology. Per phase the owning column
/// (row) broadcasts its A (B) panel along the row (column) sub-communicator -
/// hybrid mode through the shared-arena broadcast, flat mode over transport -
/// followed by a local multiply-accumulate.
SummaResult summa_run(const RunConfig& run, const SummaConfig& cfg);

/// Gauss-Seidel solver for -lap(u) = f on the unit square with zero Dirichlet
/// boundary and f manufactured so that u_exact = sin(pi x) sin(pi y). The
/// (n+1)x(n+1) point grid is split by interior rows across ranks.
struct PoissonConfig {
  int n = 0;  // grid points per side are 0..n; interior rows 1..n-1
  double tol = 1e-4;
  int max_iters = 5000;
  Mode mode = Mode::Hybrid;
};

struct PoissonResult {
  int iterations = 0;
  double final_maxdiff = 0.0;
  KernelStats stats;
};

/// Run the solver under the given launch topology. Each iteration: halo
/// exchange with the row neighbors, in-place sweep over owned rows (stale
/// halos), local max |u - u_exact|, then a 1-element MAX allreduce (hybrid or
/// flat). Stops when the global maxdiff drops below tol or at max_iters.
PoissonResult poisson_run(const RunConfig& run, const PoissonConfig& cfg);

}  // namespace hycoll
