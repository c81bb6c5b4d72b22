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

#include "hycoll/transport.hpp"

#include <cstring>

#include "hycoll/runtime.hpp"

namespace hycoll {

namespace {

enum OpCode : int {
  kTagBarrier = 0,
  kTagBcast = 1,
  kTagGatherv = 2,
  kTagReduce = 3,
};

// Internal collective tags live in the negative range, salted per
// communicator. Correctness does not depend on the salt (FIFO per channel
// plus the per-rank collective call order already serialize matching); it
// just keeps unrelated communicators apart in traces.
int internal_tag(const Comm& comm, int opcode) {
  return -static_cast<int>(1 + ((comm.tag_salt() & 0x7ffu) << 4) + opcode);
}

}  // namespace

void comm_barrier(const Comm& comm) {
  if (!comm.valid()) throw UsageError("comm_barrier: invalid communicator");
  const int n = comm.size();
  if (n <= 1) return;
  World& world = comm.world();
  const int me = comm.rank();
  const int self = comm.world_rank();
  const int tag = internal_tag(comm, kTagBarrier);
  // Dissemination barrier: log2(n) rounds of shifted token passing.
  for (int dist = 1; dist < n; dist <<= 1) {
    world.send(self, comm.member((me + dist) % n), tag, {});
    world.recv(self, comm.member((me - dist + n) % n), tag);
  }
}

void comm_bcast(const Comm& comm, int root, std::span<std::byte> buf) {
  if (!comm.valid()) throw UsageError("comm_bcast: invalid communicator");
  const int n = comm.size();
  if (root < 0 || root >= n) throw UsageError("comm_bcast: root outside the communicator");
  if (n <= 1) return;
  World& world = comm.world();
  const int me = comm.rank();
  const int self = comm.world_rank();
  const int vrank = (me - root + n) % n;
  const int tag = internal_tag(comm, kTagBcast);

  // Binomial tree over virtual ranks; exactly n-1 messages.
  int mask = 1;
  while (mask < n) {
    if (vrank & mask) {
      const int vparent = vrank - mask;
      const int parent = comm.member((vparent + root) % n);
      auto data = world.recv(self, parent, tag);
      if (data.size() != buf.size())
        throw UsageError("comm_bcast: buffer sizes differ across members");
      std::memcpy(buf.data(), data.data(), data.size());
      break;
    }
    mask <<= 1;
  }
  mask >>= 1;
  while (mask > 0) {
    if (vrank + mask < n) {
      const int child = comm.member((vrank + mask + root) % n);
      world.send(self, child, tag, buf);
    }
    mask >>= 1;
  }
}

void comm_allgatherv(const Comm& comm, std::span<const std::byte> send,
                     std::span<const std::size_t> recvcounts,
                     std::span<const std::size_t> displs, std::span<std::byte> recv) {
  if (!comm.valid()) throw UsageError("comm_allgatherv: invalid communicator");
  const int n = comm.size();
  if (static_cast<int>(recvcounts.size()) != n || static_cast<int>(displs.size()) != n)
    throw UsageError("comm_allgatherv: counts/displs must have one entry per member");
  const int me = comm.rank();
  if (send.size() != recvcounts[me])
    throw UsageError("comm_allgatherv: send size differs from the member's recvcount");
  for (int i = 0; i < n; ++i)
    if (displs[i] + recvcounts[i] > recv.size())
      throw UsageError("comm_allgatherv: receive buffer too small");

  // Own block into place unless the caller already gathers in place.
  if (recv.data() + displs[me] != send.data() && !send.empty())
    std::memmove(recv.data() + displs[me], send.data(), send.size());
  if (n == 1) return;

  World& world = comm.world();
  const int self = comm.world_rank();
  const int right = comm.member((me + 1) % n);
  const int left = comm.member((me - 1 + n) % n);
  const int tag = internal_tag(comm, kTagGatherv);

  // Ring: in step s every member forwards the block it obtained last step.
  for (int step = 0; step < n - 1; ++step) {
    const int send_idx = (me - step + n * 2) % n;
    const int recv_idx = (me - step - 1 + n * 2) % n;
    world.send(self, right, tag,
               recv.subspan(displs[send_idx], recvcounts[send_idx]));
    auto data = world.recv(self, left, tag);
    if (data.size() != recvcounts[recv_idx])
      throw UsageError("comm_allgatherv: counts differ across members");
    if (!data.empty())
      std::memcpy(recv.data() + displs[recv_idx], data.data(), data.size());
  }
}

void comm_allgather(const Comm& comm, std::span<const std::byte> send,
                    std::span<std::byte> recv) {
  const int n = comm.size();
  if (recv.size() != send.size() * n)
    throw UsageError("comm_allgather: receive buffer must hold one block per member");
  std::vector<std::size_t> counts(n, send.size());
  std::vector<std::size_t> displs(n);
  for (int i = 0; i < n; ++i) displs[i] = send.size() * i;
  comm_allgatherv(comm, send, counts, displs, recv);
}

void comm_reduce(const Comm& comm, int root, std::span<const std::byte> in,
                 std::span<std::byte> out, ReduceOp op) {
  if (!comm.valid()) throw UsageError("comm_reduce: invalid communicator");
  const int n = comm.size();
  if (root < 0 || root >= n) throw UsageError("comm_reduce: root outside the communicator");
  if (in.size() % op.elem_bytes() != 0)
    throw UsageError("comm_reduce: size is not a multiple of the element size");
  World& world = comm.world();
  const int me = comm.rank();
  const int self = comm.world_rank();
  const int tag = internal_tag(comm, kTagReduce);

  if (me != root) {
    world.send(self, comm.member(root), tag, in);
    return;
  }
  if (out.size() != in.size()) throw UsageError("comm_reduce: output size mismatch on root");
  // Fold contributions in ascending member order for a deterministic result.
  // The root's own block is snapshotted first since out may alias in.
  const std::vector<std::byte> own(in.begin(), in.end());
  for (int i = 0; i < n; ++i) {
    std::vector<std::byte> data;
    if (i != me) {
      data = world.recv(self, comm.member(i), tag);
      if (data.size() != own.size())
        throw UsageError("comm_reduce: element counts differ across members");
    }
    const std::span<const std::byte> block = (i == me) ? std::span<const std::byte>(own) : data;
    if (block.empty()) continue;
    if (i == 0)
      std::memcpy(out.data(), block.data(), block.size());
    else
      reduce_in_place(op, out, block);
  }
}

void comm_allreduce(const Comm& comm, std::span<std::byte> inout, ReduceOp op) {
  comm_reduce(comm, 0, inout, comm.rank() == 0 ? inout : std::span<std::byte>{}, op);
  comm_bcast(comm, 0, inout);
}

}  // namespace hycoll
