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

#include <cstddef>
#include <span>
#include <vector>

#include "hycoll/nodesync.hpp"
#include "hycoll/reduce_op.hpp"
#include "hycoll/shm_window.hpp"
#include "hycoll/topology.hpp"
#include "hycoll/transport.hpp"

namespace hycoll {

// The hybrid collectives. Each keeps a single copy of the collective buffers
// per node (the shared arena) and restricts transport traffic to the bridge
// plane among leaders; children touch only the arena and the node-level
// synchronization cells. Every call consumes exactly one yellow epoch of its
// window, so collectives can be mixed on one window as long as all on-node
// ranks issue them in the same order.

/// Per-node receive counts and byte displacements for the leader-level
/// irregular allgather. recvcounts[i] = msg_bytes * node_sizes[i]; displs are
/// the exclusive prefix sums.
struct AllgatherParam {
  std::vector<std::size_t> recvcounts;
  std::vector<std::size_t> displs;

  bool empty() const { return recvcounts.empty(); }
  std::size_t total_bytes() const;
};

/// Build the allgather parameters from the per-node shmem sizes (obtained via
/// gather_shmem_sizes). Children may pass an empty size set and receive an
/// empty param. One-off cost, amortized over repeated hy_allgather calls.
AllgatherParam create_allgather_param(std::size_t msg_elems, std::size_t elem_bytes,
                                      const CommPackage& pkg,
                                      std::span<const int> node_sizes);

/// Hybrid allgather. Preconditions: block-style placement (each node's
/// members form a contiguous run of parent ranks, in node order); every rank
/// has written its msg_elems elements into my_view = the slice of the arena
/// indexed by its parent rank; the arena holds msg_elems * parent_size
/// elements. Protocol: red sync; leaders exchange whole node blocks over the
/// bridge via the irregular allgather; yellow sync. Afterwards every on-node
/// rank reads the complete parent-ordered result from the single shared
/// arena. No intra-node transport messages are produced.
void hy_allgather(SharedWindow& win, const AffinityView& my_view, std::size_t msg_elems,
                  const AllgatherParam& param, const CommPackage& pkg);

/// Hybrid broadcast. root is a parent rank and must have written msg_elems
/// elements at arena offset 0 before the call. If the root is a child, one
/// root-to-leader edge publishes the payload to its node first; then the
/// root's node's leader broadcasts over the bridge (bridge root =
/// bridge_transtable[root]) and every node runs a yellow sync. Afterwards all
/// ranks read an identical payload from their node's arena. No intra-node
/// transport messages are produced.
void hy_bcast(SharedWindow& win, int root, std::size_t msg_elems,
              const TransTables& tables, const CommPackage& pkg);

/// The two shared output slots of the hybrid allreduce, living at the tail of
/// the arena after the per-rank input slices.
struct AllreduceOut {
  AffinityView slot_local;   // node-level partial result
  AffinityView slot_global;  // final result, identical node-wide after the call
};

/// Arena geometry helpers for hy_allreduce. The window must have been
/// allocated with flag = shmem_size + 2, giving the layout
/// [input slices | slot_local | slot_global], all of msize elements.
AffinityView allreduce_input_view(const SharedWindow& win, std::size_t msize,
                                  const CommPackage& pkg);
AllreduceOut allreduce_slots(const SharedWindow& win, std::size_t msize,
                             const CommPackage& pkg);

/// Hybrid allreduce. Each rank must have written msize elements into its
/// input slice (by shmem-local rank). Step 1 produces slot_local per node:
/// method 1 routes the inputs to the leader over transport (a message per
/// child); method 2 runs a red sync and the leader folds the slices in
/// ascending shmem rank. Step 2: leaders allreduce slot_local over the bridge
/// into slot_global; final yellow sync. The result is read in place from
/// slot_global, not broadcast node-internally. Both methods fold in ascending
/// shmem rank, so they produce bit-identical results. Returns the method
/// used.
int hy_allreduce(SharedWindow& win, const AffinityView& in_view, const AllreduceOut& out,
                 std::size_t msize, ReduceOp op, const CommPackage& pkg,
                 MethodPolicy policy);

constexpr std::size_t kMethodCutoffBytes = 2048;

/// Method selection: Auto picks method 2 for payloads up to the cutoff
/// (inclusive) and method 1 above it.
int select_method(std::size_t payload_bytes, MethodPolicy policy,
                  std::size_t cutoff_bytes = kMethodCutoffBytes);

}  // namespace hycoll
