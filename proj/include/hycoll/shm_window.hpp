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
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hycoll/runtime.hpp"
#include "hycoll/topology.hpp"

namespace hycoll {

namespace detail {

struct alignas(64) PaddedEpoch {
  std::atomic<std::uint64_t> v{0};
};

/// Synchronization state living at the head of every arena, cache-line padded
/// to keep the barrier, the spin cells and the payload off each other's lines.
struct ControlBlock {
  alignas(64) std::atomic<std::uint64_t> barrier_count{0};
  alignas(64) std::atomic<std::uint64_t> barrier_sense{0};
  alignas(64) std::atomic<std::uint64_t> main_status{0};
  alignas(64) std::atomic<std::uint64_t> aux_status{0};
};

/// The node's single shared allocation: control block, per-child consumption
/// slots, and the zero-initialized payload. Exactly one Arena exists per node
/// per window; the audit counters in World track that.
class Arena {
 public:
  Arena(World& world, int node, std::size_t payload_bytes, int shmem_size);
  ~Arena();

  Arena(const Arena&) = delete;
  Arena& operator=(const Arena&) = delete;

  ControlBlock ctrl;
  std::vector<PaddedEpoch> consumed;  // indexed by shmem rank
  std::vector<std::byte> payload;
  World* world;
  int node;
};

}  // namespace detail

class SharedWindow;
class AffinityView;

/// One shared epoch counter of a window plus the holder's private expected
/// epoch. The counter has a single designated writer; every signal increments
/// it by exactly one and waiters leave their poll loop only on equality with
/// their own epoch count.
class SpinCell {
 public:
  /// Number of epochs this holder has consumed (waiter side).
  std::uint64_t completed_epochs() const { return ref_; }

 private:
  friend class SharedWindow;
  friend void leader_signal(SpinCell&, SharedWindow&);
  friend void child_wait(SpinCell&, SharedWindow&);
  friend void signal_epoch(SpinCell&, SharedWindow&);
  friend void await_epoch(SpinCell&, SharedWindow&);

  std::atomic<std::uint64_t>* status_ = nullptr;
  detail::PaddedEpoch* consumed_ = nullptr;  // waiter consumption slots, main cell only
  int consumers_ = 0;
  std::uint64_t ref_ = 0;
};

/// A rank's attached handle to its node's shared arena. The arena itself is
/// allocated once per node (conceptually by the leader); children attach to
/// it. Handles are per rank and move-only: they carry the holder's private
/// synchronization state (barrier sense, spin epochs).
class SharedWindow {
 public:
  SharedWindow() = default;
  SharedWindow(SharedWindow&&) = default;
  SharedWindow& operator=(SharedWindow&&) = default;
  SharedWindow(const SharedWindow&) = delete;
  SharedWindow& operator=(const SharedWindow&) = delete;

  bool attached() const { return arena_ != nullptr; }
  int node_id() const { return node_id_; }
  std::size_t payload_bytes() const;
  std::size_t element_size() const { return element_size_; }
  std::byte* payload() const;
  std::span<std::byte> payload_span() const;

  int shmem_rank() const { return shmem_rank_; }
  int shmem_size() const { return shmem_size_; }
  bool is_leader() const { return shmem_rank_ == 0; }
  int world_rank() const { return world_rank_; }
  World& world() const { return *world_; }

  /// Leader-to-children epoch cell (the yellow sync).
  SpinCell& main_cell() { return main_cell_; }
  /// Directed-edge cell used when a collective needs a child-to-leader
  /// release (broadcast with a non-leader root).
  SpinCell& aux_cell() { return aux_cell_; }

  detail::ControlBlock& ctrl() const;

 private:
  friend SharedWindow allocate_shared(std::size_t, std::size_t, std::size_t,
                                      const CommPackage&);
  friend AffinityView local_view(const SharedWindow&, std::size_t, std::size_t);
  friend void free_window(SharedWindow&);
  friend void node_barrier(SharedWindow&, const CommPackage&);

  std::shared_ptr<detail::Arena> arena_;
  World* world_ = nullptr;
  int node_id_ = -1;
  int shmem_rank_ = -1;
  int shmem_size_ = 0;
  int world_rank_ = -1;
  std::size_t element_size_ = 1;
  std::shared_ptr<const std::vector<int>> shmem_members_;
  std::uint64_t barrier_sense_ = 0;
  SpinCell main_cell_;
  SpinCell aux_cell_;
  bool freed_ = false;
};

/// A byte range of the arena owned by one rank. Views produced by local_view
/// with a common dsize tile the payload in rank order. Keeps the arena alive.
class AffinityView {
 public:
  AffinityView() = default;

  bool valid() const { return arena_ != nullptr; }
  std::size_t offset_bytes() const { return offset_; }
  std::size_t length_bytes() const { return length_; }
  std::byte* data() const { return arena_->payload.data() + offset_; }
  std::span<std::byte> bytes() const { return {data(), length_}; }

  template <typename T>
  std::span<T> as() const {
    return {reinterpret_cast<T*>(data()), length_ / sizeof(T)};
  }

 private:
  friend AffinityView local_view(const SharedWindow&, std::size_t, std::size_t);
  std::shared_ptr<detail::Arena> arena_;
  std::size_t offset_ = 0;
  std::size_t length_ = 0;
};

/// Allocate one zero-initialized arena of msize*bsize*flag payload bytes on
/// the node and attach every on-node rank to it. Collective over
/// pkg.shmem_comm and itself a node-level synchronization point. bsize is
/// recorded as the window's element size.
SharedWindow allocate_shared(std::size_t msize, std::size_t bsize, std::size_t flag,
                             const CommPackage& pkg);

/// The slice [rank_index*dsize, +dsize) of the payload. Whether rank_index is
/// a world/parent rank (globally contiguous layouts) or a node-local rank is
/// the caller's choice.
AffinityView local_view(const SharedWindow& win, std::size_t rank_index,
                        std::size_t dsize);

/// Processor memory fence: payload writes by this rank before the fence are
/// visible to any on-node rank that fences afterwards, given an interposed
/// signal/wait or barrier edge.
void memory_fence(const SharedWindow& win);

/// Release the arena; collective over the node's ranks. The arena is freed
/// exactly once (audit-counted); calling twice on one handle is a usage
/// error.
void free_window(SharedWindow& win);

}  // namespace hycoll
