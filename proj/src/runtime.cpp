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

#include "hycoll/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "hycoll/log.hpp"

namespace hycoll {

namespace detail {

void Mailbox::put(Envelope env) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    q_.push_back(std::move(env));
  }
  cv_.notify_all();
}

Envelope Mailbox::take(World& world, int src, int tag) {
  std::unique_lock<std::mutex> lock(mu_);
  for (;;) {
    auto it = std::find_if(q_.begin(), q_.end(), [&](const Envelope& e) {
      return e.src == src && e.tag == tag;
    });
    if (it != q_.end()) {
      Envelope env = std::move(*it);
      q_.erase(it);
      return env;
    }
    if (world.is_shutdown()) throw CancelledError("recv cancelled by shutdown");
    cv_.wait(lock);
  }
}

void Mailbox::wake() {
  std::lock_guard<std::mutex> lock(mu_);
  cv_.notify_all();
}

std::shared_ptr<void> GroupGate::enter(
    World& world, bool publisher,
    const std::function<std::shared_ptr<void>()>& publish) {
  std::unique_lock<std::mutex> lock(mu_);
  const std::uint64_t my_round = round_;
  if (publisher && publish) {
    RoundSlot slot;
    slot.pending = n_;
    try {
      slot.value = publish();
    } catch (...) {
      slot.error = std::current_exception();
    }
    slots_.emplace(my_round, std::move(slot));
  }
  if (++arrived_ == n_) {
    arrived_ = 0;
    ++round_;
    cv_.notify_all();
  } else {
    cv_.wait(lock, [&] { return round_ > my_round || world.is_shutdown(); });
    if (round_ <= my_round) throw CancelledError("rendezvous cancelled by shutdown");
  }
  std::shared_ptr<void> value;
  std::exception_ptr error;
  if (auto it = slots_.find(my_round); it != slots_.end()) {
    value = it->second.value;
    error = it->second.error;
    if (--it->second.pending == 0) slots_.erase(it);
  }
  lock.unlock();
  if (error) std::rethrow_exception(error);
  return value;
}

void GroupGate::wake() {
  std::lock_guard<std::mutex> lock(mu_);
  cv_.notify_all();
}

}  // namespace detail

World::World(RankLayout layout, double inter_node_latency_us)
    : layout_(std::move(layout)),
      latency_us_(inter_node_latency_us),
      arena_allocs_(layout_.num_nodes()) {
  mailboxes_.reserve(layout_.world_size());
  progress_.reserve(layout_.world_size());
  for (int r = 0; r < layout_.world_size(); ++r) {
    mailboxes_.push_back(std::make_unique<detail::Mailbox>());
    progress_.push_back(std::make_unique<detail::ProgressSlot>());
  }
}

void World::send(int src, int dst, int tag, std::span<const std::byte> payload) {
  if (src < 0 || src >= world_size() || dst < 0 || dst >= world_size())
    throw UsageError("send: unknown rank");
  begin_op(src, "send");
  const bool intra = layout_.node_of(src) == layout_.node_of(dst);
  counters_.record(intra, payload.size());
  if (!intra && latency_us_ > 0.0)
    std::this_thread::sleep_for(std::chrono::duration<double, std::micro>(latency_us_));
  Envelope env;
  env.src = src;
  env.dst = dst;
  env.tag = tag;
  env.payload.assign(payload.begin(), payload.end());
  mailboxes_[dst]->put(std::move(env));
  end_op(src);
}

std::vector<std::byte> World::recv(int me, int src, int tag) {
  if (me < 0 || me >= world_size() || src < 0 || src >= world_size())
    throw UsageError("recv: unknown rank");
  begin_op(me, "recv");
  Envelope env = mailboxes_[me]->take(*this, src, tag);
  end_op(me);
  return std::move(env.payload);
}

void World::note_arena_alloc(int node) {
  arena_allocs_[node].fetch_add(1, std::memory_order_relaxed);
  arenas_live_.fetch_add(1, std::memory_order_relaxed);
}

void World::note_arena_free(int node) {
  (void)node;
  arenas_live_.fetch_sub(1, std::memory_order_relaxed);
}

std::uint64_t World::arena_allocs(int node) const {
  return arena_allocs_[node].load(std::memory_order_relaxed);
}

std::uint64_t World::arenas_live() const {
  return arenas_live_.load(std::memory_order_relaxed);
}

detail::GroupGate& World::gate_for(const std::vector<int>& members) {
  std::lock_guard<std::mutex> lock(gates_mu_);
  auto it = gates_.find(members);
  if (it == gates_.end())
    it = gates_.emplace(members, std::make_unique<detail::GroupGate>(
                                     static_cast<int>(members.size())))
             .first;
  return *it->second;
}

void World::harness_barrier(int rank) {
  begin_op(rank, "harness_barrier");
  std::vector<int> all(world_size());
  std::iota(all.begin(), all.end(), 0);
  gate_for(all).enter(*this, false, nullptr);
  end_op(rank);
}

void World::request_shutdown() {
  shutdown_.store(true, std::memory_order_release);
  for (auto& mbox : mailboxes_) mbox->wake();
  std::lock_guard<std::mutex> lock(gates_mu_);
  for (auto& [members, gate] : gates_) gate->wake();
}

void World::begin_op(int rank, const char* op) {
  progress_[rank]->op.store(op, std::memory_order_relaxed);
}

void World::end_op(int rank) {
  progress_[rank]->ticks.fetch_add(1, std::memory_order_relaxed);
}

Comm Rank::world_comm() const {
  auto members = std::make_shared<std::vector<int>>(world_->world_size());
  std::iota(members->begin(), members->end(), 0);
  return Comm(*world_, members, rank_);
}

void Rank::send(int dst, int tag, std::span<const std::byte> payload) const {
  world_->send(rank_, dst, tag, payload);
}

std::vector<std::byte> Rank::recv(int src, int tag) const {
  return world_->recv(rank_, src, tag);
}

RankLayout make_layout(const RunConfig& cfg) {
  if (cfg.nodes < 1) throw ConfigError("nodes must be at least 1");
  if (cfg.ppn.empty()) throw ConfigError("ppn must not be empty");
  std::vector<int> sizes;
  if (cfg.ppn.size() == 1) {
    sizes.assign(cfg.nodes, cfg.ppn[0]);
  } else if (static_cast<int>(cfg.ppn.size()) == cfg.nodes) {
    sizes = cfg.ppn;
  } else {
    throw ConfigError("ppn list length must match the node count");
  }
  for (int s : sizes)
    if (s < 1) throw ConfigError("every ppn entry must be at least 1");
  RankLayout layout(sizes, cfg.placement);
  if (layout.world_size() > 512) throw ConfigError("world size above 512 is not supported");
  return layout;
}

void launch(const RunConfig& cfg, const std::function<void(Rank&)>& body) {
  const RankLayout layout = make_layout(cfg);
  if (cfg.watchdog_secs <= 0.0) throw ConfigError("watchdog_secs must be positive");

  World world(layout, cfg.inter_node_latency_us);
  const int n = layout.world_size();
  log::info("launching " + std::to_string(n) + " ranks on " +
            std::to_string(layout.num_nodes()) + " nodes");

  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> first_failure{-1};
  std::vector<std::thread> workers;
  workers.reserve(n);
  for (int r = 0; r < n; ++r) {
    workers.emplace_back([&world, &body, &errors, &first_failure, r] {
      Rank self(world, r);
      try {
        body(self);
      } catch (...) {
        errors[r] = std::current_exception();
        int expected = -1;
        first_failure.compare_exchange_strong(expected, r);
        world.request_shutdown();
      }
      world.progress(r).done.store(true, std::memory_order_release);
    });
  }

  // Watchdog: an unfinished rank whose tick counter stays flat for
  // watchdog_secs is considered blocked.
  const auto interval = std::chrono::milliseconds(20);
  const double interval_secs = 0.020;
  std::vector<std::uint64_t> last_ticks(n, ~std::uint64_t{0});
  std::vector<double> stalled(n, 0.0);
  bool fired = false;
  std::string diagnostic;
  for (;;) {
    bool all_done = true;
    for (int r = 0; r < n && all_done; ++r)
      all_done = world.progress(r).done.load(std::memory_order_acquire);
    if (all_done || world.is_shutdown()) break;

    std::this_thread::sleep_for(interval);
    bool stall_hit = false;
    for (int r = 0; r < n; ++r) {
      auto& p = world.progress(r);
      if (p.done.load(std::memory_order_acquire)) {
        stalled[r] = 0.0;
        continue;
      }
      const std::uint64_t t = p.ticks.load(std::memory_order_relaxed);
      if (t != last_ticks[r]) {
        last_ticks[r] = t;
        stalled[r] = 0.0;
      } else {
        stalled[r] += interval_secs;
        if (stalled[r] >= cfg.watchdog_secs) stall_hit = true;
      }
    }
    if (stall_hit) {
      fired = true;
      diagnostic = "watchdog: no progress for " + std::to_string(cfg.watchdog_secs) +
                   "s; blocked ranks:";
      for (int r = 0; r < n; ++r) {
        auto& p = world.progress(r);
        if (!p.done.load(std::memory_order_acquire) && stalled[r] >= cfg.watchdog_secs)
          diagnostic += " rank " + std::to_string(r) + " in '" +
                        p.op.load(std::memory_order_relaxed) + "'";
      }
      log::error(diagnostic);
      world.request_shutdown();
      break;
    }
  }

  for (auto& worker : workers) worker.join();

  if (fired) throw DeadlockError(diagnostic);
  const int failed = first_failure.load();
  if (failed >= 0) {
    try {
      std::rethrow_exception(errors[failed]);
    } catch (const std::exception& e) {
      throw WorkerError(failed, e.what());
    } catch (...) {
      throw WorkerError(failed, "unknown exception");
    }
  }
}

}  // namespace hycoll
