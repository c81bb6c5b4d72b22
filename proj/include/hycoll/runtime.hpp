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

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hycoll/error.hpp"
#include "hycoll/reduce_op.hpp"
#include "hycoll/topology.hpp"
#include "hycoll/transport.hpp"

namespace hycoll {

class World;

namespace detail {

/// Per-rank incoming message queue. take() blocks until a message matching
/// (src, tag) is present; matching picks the oldest such message, which keeps
/// delivery FIFO per (src, tag) channel while allowing out-of-order matching
/// across channels.
class Mailbox {
 public:
  void put(Envelope env);
  Envelope take(World& world, int src, int tag);
  void wake();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Envelope> q_;
};

/// N-party rendezvous used for collective setup paths (arena allocation and
/// release, harness barriers). One designated member may publish a value that
/// all participants of the same round receive; exceptions raised while
/// publishing surface on every participant. Produces no transport traffic.
class GroupGate {
 public:
  explicit GroupGate(int participants) : n_(participants) {}

  std::shared_ptr<void> enter(World& world, bool publisher,
                              const std::function<std::shared_ptr<void>()>& publish);
  void wake();

 private:
  struct RoundSlot {
    std::shared_ptr<void> value;
    std::exception_ptr error;
    int pending = 0;
  };

  std::mutex mu_;
  std::condition_variable cv_;
  int n_;
  int arrived_ = 0;
  std::uint64_t round_ = 0;
  std::map<std::uint64_t, RoundSlot> slots_;
};

struct ProgressSlot {
  std::atomic<std::uint64_t> ticks{0};
  std::atomic<const char*> op{"start"};
  std::atomic<bool> done{false};
};

}  // namespace detail

/// All shared state of one simulated job: the layout, one mailbox per rank,
/// per-node allocation audit, transport counters and shutdown/watchdog
/// plumbing. Workers hold a reference for the duration of the job.
class World {
 public:
  explicit World(RankLayout layout, double inter_node_latency_us = 0.0);

  const RankLayout& layout() const { return layout_; }
  int world_size() const { return layout_.world_size(); }

  TransportCounters& counters() { return counters_; }

  // transport plane
  void send(int src, int dst, int tag, std::span<const std::byte> payload);
  std::vector<std::byte> recv(int me, int src, int tag);

  // shared-arena audit
  void note_arena_alloc(int node);
  void note_arena_free(int node);
  std::uint64_t arena_allocs(int node) const;
  std::uint64_t arenas_live() const;

  detail::GroupGate& gate_for(const std::vector<int>& members);
  /// Barrier over all ranks that bypasses the transport plane (and therefore
  /// the counters); used by the harness to bracket timed regions.
  void harness_barrier(int rank);

  bool is_shutdown() const { return shutdown_.load(std::memory_order_acquire); }
  void request_shutdown();

  void begin_op(int rank, const char* op);
  void end_op(int rank);
  detail::ProgressSlot& progress(int rank) { return *progress_[rank]; }

 private:
  RankLayout layout_;
  double latency_us_;
  TransportCounters counters_;
  std::vector<std::unique_ptr<detail::Mailbox>> mailboxes_;
  std::vector<std::unique_ptr<detail::ProgressSlot>> progress_;
  std::vector<std::atomic<std::uint64_t>> arena_allocs_;
  std::atomic<std::uint64_t> arenas_live_{0};
  std::atomic<bool> shutdown_{false};
  std::mutex gates_mu_;
  std::map<std::vector<int>, std::unique_ptr<detail::GroupGate>> gates_;
};

/// Poll until pred() holds. Pure spin for the first 1000 polls, then a
/// scheduler yield per poll; bails out when the job is shutting down.
template <typename Pred>
void spin_until(World& world, Pred&& pred) {
  for (std::uint64_t polls = 0;; ++polls) {
    if (pred()) return;
    if ((polls & 0x3ff) == 0 && world.is_shutdown())
      throw CancelledError("spin wait cancelled by shutdown");
    if (polls >= 1000) std::this_thread::yield();
  }
}

/// Per-worker context handed to the rank body by the launcher.
class Rank {
 public:
  Rank(World& world, int world_rank) : world_(&world), rank_(world_rank) {}

  int world_rank() const { return rank_; }
  World& world() const { return *world_; }
  Comm world_comm() const;

  void send(int dst, int tag, std::span<const std::byte> payload) const;
  std::vector<std::byte> recv(int src, int tag) const;

 private:
  World* world_;
  int rank_;
};

/// Which collective plane the benchmarks and kernels use.
enum class Mode { Hybrid, Flat };

/// Launcher configuration. `ppn` with a single entry applies uniformly to all
/// nodes; a list gives irregular per-node rank counts.
struct RunConfig {
  int nodes = 1;
  std::vector<int> ppn = {1};
  Placement placement = Placement::Block;
  Mode mode = Mode::Hybrid;
  std::string collective;  // microbench collective or kernel name
  std::vector<std::size_t> msg_bytes;
  int iters = 1000;
  int warmup = 100;
  double inter_node_latency_us = 0.0;
  std::uint64_t seed = 1;
  MethodPolicy method_policy = MethodPolicy::Auto;
  double watchdog_secs = 30.0;
};

/// Layout described by the config; throws ConfigError on invalid settings.
RankLayout make_layout(const RunConfig& cfg);

/// Spawn one worker per rank, run the body everywhere, join. A watchdog
/// aborts the job with a diagnostic naming the blocked ranks and their last
/// operation if any unfinished worker makes no progress for watchdog_secs.
/// Worker exceptions cancel the job and resurface with rank attribution.
void launch(const RunConfig& cfg, const std::function<void(Rank&)>& body);

}  // namespace hycoll
