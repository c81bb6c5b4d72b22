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

#include "hycoll/shm_window.hpp"

#include <atomic>
#include <limits>

namespace hycoll {

namespace detail {

Arena::Arena(World& w, int node_id, std::size_t payload_bytes, int shmem_size)
    : consumed(shmem_size), payload(payload_bytes, std::byte{0}), world(&w), node(node_id) {
  world->note_arena_alloc(node);
}

Arena::~Arena() { world->note_arena_free(node); }

}  // namespace detail

std::size_t SharedWindow::payload_bytes() const {
  return arena_ ? arena_->payload.size() : 0;
}

std::byte* SharedWindow::payload() const { return arena_->payload.data(); }

std::span<std::byte> SharedWindow::payload_span() const {
  return {arena_->payload.data(), arena_->payload.size()};
}

detail::ControlBlock& SharedWindow::ctrl() const { return arena_->ctrl; }

SharedWindow allocate_shared(std::size_t msize, std::size_t bsize, std::size_t flag,
                             const CommPackage& pkg) {
  if (!pkg.shmem_comm.valid()) throw UsageError("allocate_shared: invalid package");
  World& world = pkg.shmem_comm.world();
  const bool leader = pkg.shmem_comm.rank() == 0;
  if (leader) {
    if (msize < 1 || bsize < 1 || flag < 1)
      throw UsageError("allocate_shared: msize, bsize and flag must be >= 1 on the leader");
    if (msize > std::numeric_limits<std::size_t>::max() / bsize / flag ||
        msize * bsize * flag > (std::size_t{1} << 40))
      throw ResourceError("allocate_shared: arena size out of range");
  }

  world.begin_op(pkg.shmem_comm.world_rank(), "allocate_shared");
  auto& gate = world.gate_for(pkg.shmem_comm.members());
  // The leader materializes the arena; everyone leaves the rendezvous holding
  // it (or the leader's allocation error). This is the node-level sync point.
  auto slot = gate.enter(world, leader, [&]() -> std::shared_ptr<void> {
    try {
      return std::make_shared<detail::Arena>(world, pkg.node_id, msize * bsize * flag,
                                             pkg.shmemcomm_size);
    } catch (const std::bad_alloc&) {
      throw ResourceError("allocate_shared: arena allocation failed");
    }
  });
  world.end_op(pkg.shmem_comm.world_rank());

  SharedWindow win;
  win.arena_ = std::static_pointer_cast<detail::Arena>(slot);
  win.world_ = &world;
  win.node_id_ = pkg.node_id;
  win.shmem_rank_ = pkg.shmem_comm.rank();
  win.shmem_size_ = pkg.shmemcomm_size;
  win.world_rank_ = pkg.shmem_comm.world_rank();
  win.element_size_ = bsize;
  win.shmem_members_ = std::make_shared<std::vector<int>>(pkg.shmem_comm.members());

  win.main_cell_.status_ = &win.arena_->ctrl.main_status;
  win.main_cell_.consumed_ = win.arena_->consumed.data();
  win.main_cell_.consumers_ = pkg.shmemcomm_size;
  win.aux_cell_.status_ = &win.arena_->ctrl.aux_status;
  return win;
}

AffinityView local_view(const SharedWindow& win, std::size_t rank_index,
                        std::size_t dsize) {
  if (!win.attached()) throw UsageError("local_view: window is not attached");
  const std::size_t payload = win.payload_bytes();
  if (dsize > 0 && (rank_index + 1) > payload / dsize)
    throw BoundsError("local_view: slice outside the arena payload");
  AffinityView view;
  view.arena_ = win.arena_;
  view.offset_ = rank_index * dsize;
  view.length_ = dsize;
  return view;
}

void memory_fence(const SharedWindow& win) {
  if (!win.attached()) throw UsageError("memory_fence: window is not attached");
  std::atomic_thread_fence(std::memory_order_seq_cst);
}

void free_window(SharedWindow& win) {
  if (!win.attached()) throw UsageError("free_window: window already freed");
  World& world = win.world();
  world.begin_op(win.world_rank(), "free_window");
  auto& gate = world.gate_for(*win.shmem_members_);
  gate.enter(world, false, nullptr);
  world.end_op(win.world_rank());
  win.arena_.reset();  // the last detaching rank releases the arena
  win.freed_ = true;
}

}  // namespace hycoll
