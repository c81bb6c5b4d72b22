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

#include "hycoll/nodesync.hpp"

#include <atomic>

#include "hycoll/runtime.hpp"

namespace hycoll {

void node_barrier(SharedWindow& win, const CommPackage& pkg) {
  if (!win.attached()) throw UsageError("node_barrier: window is not attached");
  if (pkg.shmemcomm_size != win.shmem_size())
    throw UsageError("node_barrier: package does not match the window's node group");
  World& world = win.world();
  world.begin_op(win.world_rank(), "node_barrier");
  auto& ctrl = win.ctrl();
  const std::uint64_t participants = win.shmem_size();

  std::atomic_thread_fence(std::memory_order_seq_cst);
  // Centralized sense-reversing barrier: the last arriver resets the count
  // and flips the shared sense to this episode's value.
  const std::uint64_t my_sense = win.barrier_sense_ ^ 1u;
  win.barrier_sense_ = my_sense;
  if (ctrl.barrier_count.fetch_add(1, std::memory_order_acq_rel) + 1 == participants) {
    ctrl.barrier_count.store(0, std::memory_order_relaxed);
    ctrl.barrier_sense.store(my_sense, std::memory_order_release);
  } else {
    spin_until(world, [&] {
      return ctrl.barrier_sense.load(std::memory_order_acquire) == my_sense;
    });
  }
  std::atomic_thread_fence(std::memory_order_seq_cst);
  world.end_op(win.world_rank());
}

void signal_epoch(SpinCell& cell, SharedWindow& win) {
  if (!win.attached()) throw UsageError("signal_epoch: window is not attached");
  World& world = win.world();
  world.begin_op(win.world_rank(), "leader_signal");
  const std::uint64_t current = cell.status_->load(std::memory_order_relaxed);
  if (cell.consumed_ != nullptr) {
    // Hold the signal until every waiter has consumed the previous epoch.
    // This keeps the counter within one of each waiter's expected epoch, so
    // the equality exit in the poll loop stays reachable even when a waiter
    // is preempted across several of our calls.
    for (int r = 1; r < cell.consumers_; ++r) {
      spin_until(world, [&] {
        return cell.consumed_[r].v.load(std::memory_order_acquire) >= current;
      });
    }
  }
  std::atomic_thread_fence(std::memory_order_seq_cst);
  cell.status_->fetch_add(1, std::memory_order_release);
  world.end_op(win.world_rank());
}

void await_epoch(SpinCell& cell, SharedWindow& win) {
  if (!win.attached()) throw UsageError("await_epoch: window is not attached");
  World& world = win.world();
  world.begin_op(win.world_rank(), "child_wait");
  cell.ref_ += 1;
  const std::uint64_t want = cell.ref_;
  for (std::uint64_t polls = 0;; ++polls) {
    std::atomic_thread_fence(std::memory_order_seq_cst);
    const std::uint64_t s = cell.status_->load(std::memory_order_acquire);
    if (s == want) break;  // equality, never >= or <=
    if (s > want)
      throw UsageError("await_epoch: epoch overrun (a signal was never awaited)");
    if ((polls & 0x3ff) == 0 && world.is_shutdown())
      throw CancelledError("await_epoch cancelled by shutdown");
    if (polls >= 1000) std::this_thread::yield();
  }
  if (cell.consumed_ != nullptr)
    cell.consumed_[win.shmem_rank()].v.store(want, std::memory_order_release);
  world.end_op(win.world_rank());
}

void leader_signal(SpinCell& cell, SharedWindow& win) {
  if (!win.is_leader())
    throw UsageError("leader_signal: caller is not the node leader");
  signal_epoch(cell, win);
}

void child_wait(SpinCell& cell, SharedWindow& win) {
  if (win.is_leader())
    throw UsageError("child_wait: caller is the node leader");
  await_epoch(cell, win);
}

}  // namespace hycoll
