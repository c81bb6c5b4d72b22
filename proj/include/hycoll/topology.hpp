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
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hycoll/error.hpp"

namespace hycoll {

class World;

/// How world ranks are assigned to nodes.
enum class Placement { Block, RoundRobin };

/// Cluster layout: ranks grouped into (possibly irregular) nodes.
///
/// Block placement fills node 0 with consecutive world ranks before moving to
/// node 1; RoundRobin deals ranks cyclically across nodes, skipping nodes that
/// are already full.
class RankLayout {
 public:
  RankLayout(std::vector<int> node_sizes, Placement placement);
  static RankLayout uniform(int nodes, int ppn, Placement placement);

  int world_size() const { return world_size_; }
  int num_nodes() const { return static_cast<int>(node_sizes_.size()); }
  const std::vector<int>& node_sizes() const { return node_sizes_; }
  Placement placement() const { return placement_; }

  /// Node hosting the given world rank.
  int node_of(int world_rank) const;

 private:
  std::vector<int> node_sizes_;
  Placement placement_;
  int world_size_ = 0;
  std::vector<int> node_of_;
};

/// An ordered group of world ranks plus the holder's position in it. Every
/// rank holding a handle to the same communicator sees the identical member
/// list; only my_index differs.
class Comm {
 public:
  Comm() = default;
  Comm(World& world, std::shared_ptr<const std::vector<int>> members, int my_index);

  bool valid() const { return world_ != nullptr; }
  int size() const { return static_cast<int>(members_->size()); }
  /// This rank's position within the communicator.
  int rank() const { return my_index_; }
  /// World rank of the holder.
  int world_rank() const { return (*members_)[my_index_]; }
  /// World rank of member i.
  int member(int i) const;
  const std::vector<int>& members() const { return *members_; }
  World& world() const { return *world_; }
  /// Small deterministic hash of the member list, mixed into internal
  /// collective tags.
  std::uint32_t tag_salt() const { return salt_; }

 private:
  World* world_ = nullptr;
  std::shared_ptr<const std::vector<int>> members_;
  int my_index_ = -1;
  std::uint32_t salt_ = 0;
};

/// The two-level view of a communicator: the node-local (shared memory)
/// sub-communicator and, on leaders only, the bridge sub-communicator across
/// nodes. Rank 0 of each shmem_comm is the leader.
struct CommPackage {
  Comm parent;
  Comm shmem_comm;
  std::optional<Comm> bridge_comm;  // present iff this rank is a leader
  int shmemcomm_size = 0;
  int bridgecomm_size = 0;  // number of nodes spanned by the parent
  int node_id = -1;         // world-layout node of this rank
  int node_index = -1;      // position of this node in bridge order

  bool is_leader() const { return bridge_comm.has_value(); }
};

/// Absolute-to-relative rank translation tables, indexed by parent rank.
struct TransTables {
  std::vector<int> shmem_transtable;   // parent rank -> rank within its shmem_comm
  std::vector<int> bridge_transtable;  // parent rank -> its node's bridge index
};

/// Two-level communicator splitting. Grouping follows the node membership of
/// each parent member under the world layout; leaders are the lowest parent
/// rank per node; the bridge orders leaders by ascending node index. Nodes
/// contributing no member to the parent are dropped from the bridge.
/// Collective over the parent.
CommPackage split_shmem_bridge(const Comm& parent, const RankLayout& layout);

/// Translation tables for the parent; identical on every parent member.
TransTables build_transtables(const Comm& parent, const CommPackage& pkg);

/// On leaders: the sizes of all shmem communicators of the parent, gathered
/// over the bridge (entry i = size of node i's group). On children: empty.
std::vector<int> gather_shmem_sizes(const CommPackage& pkg);

/// Communicator over a subset of the parent's members, in the given order.
/// The caller must be listed. Collective over the listed members.
Comm subset_comm(const Comm& parent, std::span<const int> member_world_ranks);

}  // namespace hycoll
