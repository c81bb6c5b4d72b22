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
#include <span>
#include <vector>

#include "hycoll/reduce_op.hpp"
#include "hycoll/topology.hpp"

namespace hycoll {

/// One message on the transport plane. Delivery is reliable and FIFO per
/// (src, dst, tag) channel.
struct Envelope {
  int src = -1;
  int dst = -1;
  int tag = 0;
  std::vector<std::byte> payload;
};

/// Point-in-time copy of the transport counters.
struct CounterSnapshot {
  std::uint64_t intra_msgs = 0;
  std::uint64_t intra_bytes = 0;
  std::uint64_t inter_msgs = 0;
  std::uint64_t inter_bytes = 0;

  CounterSnapshot operator-(const CounterSnapshot& rhs) const {
    return {intra_msgs - rhs.intra_msgs, intra_bytes - rhs.intra_bytes,
            inter_msgs - rhs.inter_msgs, inter_bytes - rhs.inter_bytes};
  }
  bool operator==(const CounterSnapshot&) const = default;
};

/// Monotonic message/byte counters, classified by whether the endpoints share
/// a node under the world layout.
class TransportCounters {
 public:
  void record(bool intra, std::size_t bytes) {
    if (intra) {
      intra_msgs_.fetch_add(1, std::memory_order_relaxed);
      intra_bytes_.fetch_add(bytes, std::memory_order_relaxed);
    } else {
      inter_msgs_.fetch_add(1, std::memory_order_relaxed);
      inter_bytes_.fetch_add(bytes, std::memory_order_relaxed);
    }
  }

  CounterSnapshot snapshot() const {
    return {intra_msgs_.load(std::memory_order_relaxed),
            intra_bytes_.load(std::memory_order_relaxed),
            inter_msgs_.load(std::memory_order_relaxed),
            inter_bytes_.load(std::memory_order_relaxed)};
  }

 private:
  std::atomic<std::uint64_t> intra_msgs_{0};
  std::atomic<std::uint64_t> intra_bytes_{0};
  std::atomic<std::uint64_t> inter_msgs_{0};
  std::atomic<std::uint64_t> inter_bytes_{0};
};

// Reference collective algorithms over arbitrary communicators. All are
// collective calls: every member must participate with compatible arguments.
// Algorithms are fixed (message-countable) and reduction order is
// deterministic, so repeated runs give bit-identical results:
//   barrier    dissemination
//   bcast      binomial tree (exactly size-1 messages)
//   allgatherv ring (size*(size-1) messages)
//   reduce     gather-to-root fold in ascending member order
//   allreduce  reduce to member 0 + bcast

void comm_barrier(const Comm& comm);

void comm_bcast(const Comm& comm, int root, std::span<std::byte> buf);

/// Irregular allgather: recv[displs[i] .. +recvcounts[i]) receives member i's
/// contribution. send must have recvcounts[my rank] bytes; it may alias its
/// own block of recv (in-place).
void comm_allgatherv(const Comm& comm, std::span<const std::byte> send,
                     std::span<const std::size_t> recvcounts,
                     std::span<const std::size_t> displs, std::span<std::byte> recv);

/// Regular allgather of equal-sized blocks, laid out in member order.
void comm_allgather(const Comm& comm, std::span<const std::byte> send,
                    std::span<std::byte> recv);

/// Elementwise reduction to root, folding contributions in ascending member
/// order. out is written on the root only and may alias in there.
void comm_reduce(const Comm& comm, int root, std::span<const std::byte> in,
                 std::span<std::byte> out, ReduceOp op);

/// Reduce to member 0 followed by a broadcast; inout holds the input on entry
/// and the reduced result on return, on every member.
void comm_allreduce(const Comm& comm, std::span<std::byte> inout, ReduceOp op);

}  // namespace hycoll
