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
#include <string>
#include <vector>

#include "hycoll/kernels.hpp"
#include "hycoll/runtime.hpp"
#include "hycoll/transport.hpp"

namespace hycoll {

/// One micro-benchmark measurement: the configuration echo, steady-state
/// latency over the timed loop, the transport counter deltas of the timed
/// region only, and the one-off setup costs timed separately.
struct BenchRecord {
  std::string collective;
  std::string mode;
  int nodes = 0;
  std::string ppn;  // uniform count, or sizes joined with '|'
  std::string placement;
  std::size_t msg_bytes = 0;
  int iters = 0;
  int method = 0;  // allreduce method, 0 for other collectives
  double mean_us = 0.0;
  double min_us = 0.0;
  double max_us = 0.0;
  std::uint64_t intra_msgs = 0;
  std::uint64_t intra_bytes = 0;
  std::uint64_t inter_msgs = 0;
  std::uint64_t inter_bytes = 0;
  double split_us = 0.0;
  double alloc_us = 0.0;
  double param_us = 0.0;
  double table_us = 0.0;
};

/// Exact CSV column order for benchmark records.
extern const char* const kBenchCsvHeader;

enum class OutputFormat { Csv, Json };

/// Run the configured collective micro-benchmark: per message size, the setup
/// one-offs are timed individually, a warmup loop runs, and the timed loop is
/// bracketed by harness barriers (which bypass the transport counters) so
/// that the reported counter deltas cover exactly the steady-state calls.
/// Latency is the per-rank loop time divided by iters; mean/min/max aggregate
/// over ranks.
std::vector<BenchRecord> run_microbench(const RunConfig& cfg);

/// Write records to path (atomically: temp file + rename). JSON round-trips
/// through parse_records.
void emit_results(const std::vector<BenchRecord>& records, const std::string& path,
                  OutputFormat format);

/// Parse a JSON results file back into records.
std::vector<BenchRecord> parse_records(const std::string& path);

/// One row of kernel output; schema documented in the README.
struct KernelRecord {
  std::string kernel;
  std::string mode;
  int nodes = 0;
  std::string ppn;
  std::string placement;
  int n = 0;
  std::string param;  // grid for SUMMA, tol for Poisson
  int phases = 0;
  double total_us = 0.0;
  double comm_us = 0.0;
  double comp_us = 0.0;
  std::uint64_t intra_msgs = 0;
  std::uint64_t intra_bytes = 0;
  std::uint64_t inter_msgs = 0;
  std::uint64_t inter_bytes = 0;
  double metric = 0.0;  // SUMMA: max |C|; Poisson: final maxdiff
};

extern const char* const kKernelCsvHeader;

void emit_kernel_results(const std::vector<KernelRecord>& records, const std::string& path,
                         OutputFormat format);

/// Helpers shared with the CLI.
std::string format_ppn(const std::vector<int>& ppn);
std::string mode_name(Mode mode);
std::string placement_name(Placement placement);

}  // namespace hycoll
