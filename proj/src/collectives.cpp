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

#include "hycoll/collectives.hpp"

#include <cstring>
#include <numeric>

#include "hycoll/runtime.hpp"

namespace hycoll {

namespace {

// Block-style structure check: each node's members occupy a contiguous run of
// parent ranks, runs appearing in ascending node order. This is what makes a
// node's gather block contiguous in the shared arena.
bool node_blocks_contiguous(const Comm& parent) {
  const RankLayout& layout = parent.world().layout();
  const auto& members = parent.members();
  int prev = -1;
  for (int m : members) {
    const int node = layout.node_of(m);
    if (node < prev) return false;
    prev = node;
  }
  return true;
}

}  // namespace

std::size_t AllgatherParam::total_bytes() const {
  return std::accumulate(recvcounts.begin(), recvcounts.end(), std::size_t{0});
}

AllgatherParam create_allgather_param(std::size_t msg_elems, std::size_t elem_bytes,
                                      const CommPackage& pkg,
                                      std::span<const int> node_sizes) {
  if (msg_elems < 1 || elem_bytes < 1)
    throw UsageError("create_allgather_param: message geometry must be positive");
  if (node_sizes.empty()) {
    if (pkg.is_leader())
      throw UsageError("create_allgather_param: leaders need the node size set");
    return {};
  }
  if (static_cast<int>(node_sizes.size()) != pkg.bridgecomm_size)
    throw UsageError("create_allgather_param: size set does not match the bridge");

  AllgatherParam param;
  param.recvcounts.resize(node_sizes.size());
  param.displs.resize(node_sizes.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < node_sizes.size(); ++i) {
    param.recvcounts[i] = msg_elems * elem_bytes * static_cast<std::size_t>(node_sizes[i]);
    param.displs[i] = offset;
    offset += param.recvcounts[i];
  }
  return param;
}

void hy_allgather(SharedWindow& win, const AffinityView& my_view, std::size_t msg_elems,
                  const AllgatherParam& param, const CommPackage& pkg) {
  if (!win.attached() || !pkg.shmem_comm.valid())
    throw UsageError("hy_allgather: invalid window or package");
  World& world = win.world();
  if (world.layout().placement() != Placement::Block)
    throw ConfigError("hy_allgather: block placement is required");
  if (!node_blocks_contiguous(pkg.parent))
    throw ConfigError("hy_allgather: parent ranks are not node-contiguous");

  const std::size_t block = msg_elems * win.element_size();
  const std::size_t total = block * static_cast<std::size_t>(pkg.parent.size());
  if (total > win.payload_bytes())
    throw UsageError("hy_allgather: arena smaller than the gather result");
  if (!my_view.valid() || my_view.length_bytes() != block ||
      my_view.offset_bytes() != block * static_cast<std::size_t>(pkg.parent.rank()))
    throw UsageError("hy_allgather: my_view must be the caller's parent-rank slice");
  if (pkg.is_leader()) {
    if (param.recvcounts.size() != static_cast<std::size_t>(pkg.bridgecomm_size) ||
        param.total_bytes() != total)
      throw UsageError("hy_allgather: param does not match the arena geometry");
  }

  // Red: everyone's slice is published to the node before leaders export it.
  node_barrier(win, pkg);
  if (pkg.is_leader()) {
    const std::size_t displ = param.displs[pkg.node_index];
    const std::size_t count = param.recvcounts[pkg.node_index];
    auto arena = win.payload_span();
    comm_allgatherv(*pkg.bridge_comm, arena.subspan(displ, count), param.recvcounts,
                    param.displs, arena.first(total));
    // Yellow: release the completed gather to the children.
    leader_signal(win.main_cell(), win);
  } else {
    child_wait(win.main_cell(), win);
  }
}

void hy_bcast(SharedWindow& win, int root, std::size_t msg_elems,
              const TransTables& tables, const CommPackage& pkg) {
  if (!win.attached() || !pkg.shmem_comm.valid())
    throw UsageError("hy_bcast: invalid window or package");
  const int parent_size = pkg.parent.size();
  if (root < 0 || root >= parent_size ||
      static_cast<int>(tables.bridge_transtable.size()) != parent_size)
    throw UsageError("hy_bcast: invalid root");
  const std::size_t bytes = msg_elems * win.element_size();
  if (bytes > win.payload_bytes())
    throw UsageError("hy_bcast: message exceeds the arena");

  const int me = pkg.parent.rank();
  const int root_node = tables.bridge_transtable[root];
  const bool root_is_leader = tables.shmem_transtable[root] == 0;

  // A child root first publishes its payload to its own leader over a
  // dedicated epoch cell; the bridge transfer below starts from the leader.
  if (!root_is_leader && root_node == pkg.node_index) {
    if (me == root)
      signal_epoch(win.aux_cell(), win);
    else if (pkg.is_leader())
      await_epoch(win.aux_cell(), win);
  }

  if (pkg.is_leader()) {
    comm_bcast(*pkg.bridge_comm, root_node, win.payload_span().first(bytes));
    leader_signal(win.main_cell(), win);
  } else {
    child_wait(win.main_cell(), win);
  }
}

AffinityView allreduce_input_view(const SharedWindow& win, std::size_t msize,
                                  const CommPackage& pkg) {
  return local_view(win, static_cast<std::size_t>(pkg.shmem_comm.rank()),
                    msize * win.element_size());
}

AllreduceOut allreduce_slots(const SharedWindow& win, std::size_t msize,
                             const CommPackage& pkg) {
  const std::size_t block = msize * win.element_size();
  const auto ranks = static_cast<std::size_t>(pkg.shmemcomm_size);
  AllreduceOut out;
  out.slot_local = local_view(win, ranks, block);
  out.slot_global = local_view(win, ranks + 1, block);
  return out;
}

int select_method(std::size_t payload_bytes, MethodPolicy policy,
                  std::size_t cutoff_bytes) {
  switch (policy) {
    case MethodPolicy::Force1: return 1;
    case MethodPolicy::Force2: return 2;
    case MethodPolicy::Auto: return payload_bytes <= cutoff_bytes ? 2 : 1;
  }
  return 2;
}

int hy_allreduce(SharedWindow& win, const AffinityView& in_view, const AllreduceOut& out,
                 std::size_t msize, ReduceOp op, const CommPackage& pkg,
                 MethodPolicy policy) {
  if (!win.attached() || !pkg.shmem_comm.valid())
    throw UsageError("hy_allreduce: invalid window or package");
  if (win.element_size() != op.elem_bytes())
    throw UsageError("hy_allreduce: window element size does not match the op");
  if (!op.commutative_associative())
    throw UsageError("hy_allreduce: op must be commutative and associative");

  const std::size_t block = msize * op.elem_bytes();
  const auto ranks = static_cast<std::size_t>(pkg.shmemcomm_size);
  if ((ranks + 2) * block > win.payload_bytes())
    throw UsageError("hy_allreduce: arena smaller than the slice/slot layout");
  if (!in_view.valid() || in_view.length_bytes() != block ||
      in_view.offset_bytes() != block * static_cast<std::size_t>(pkg.shmem_comm.rank()))
    throw UsageError("hy_allreduce: in_view must be the caller's shmem-rank slice");
  if (out.slot_local.offset_bytes() != ranks * block ||
      out.slot_global.offset_bytes() != (ranks + 1) * block)
    throw UsageError("hy_allreduce: output slots do not match the arena layout");

  const int method = select_method(block, policy);
  auto local = out.slot_local.bytes();
  auto global = out.slot_global.bytes();

  // Step 1: node-level partial into slot_local, folding ascending shmem rank
  // either way so the two methods are interchangeable bit for bit.
  if (method == 1) {
    comm_reduce(pkg.shmem_comm, 0, in_view.bytes(),
                pkg.is_leader() ? local : std::span<std::byte>{}, op);
  } else {
    node_barrier(win, pkg);
    if (pkg.is_leader()) {
      std::memcpy(local.data(), win.payload(), block);
      for (std::size_t r = 1; r < ranks; ++r)
        reduce_in_place(op, local, {win.payload() + r * block, block});
    }
  }

  // Step 2: leaders combine the partials over the bridge; children read the
  // shared slot_global in place after the yellow sync.
  if (pkg.is_leader()) {
    std::memcpy(global.data(), local.data(), block);
    comm_allreduce(*pkg.bridge_comm, global, op);
    leader_signal(win.main_cell(), win);
  } else {
    child_wait(win.main_cell(), win);
  }
  return method;
}

}  // namespace hycoll
