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

#include "hycoll/topology.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "hycoll/transport.hpp"

namespace hycoll {

namespace {

std::uint32_t fnv1a(const std::vector<int>& values) {
  std::uint32_t h = 2166136261u;
  for (int v : values) {
    for (int b = 0; b < 4; ++b) {
      h ^= static_cast<std::uint32_t>((v >> (8 * b)) & 0xff);
      h *= 16777619u;
    }
  }
  return h;
}

}  // namespace

RankLayout::RankLayout(std::vector<int> node_sizes, Placement placement)
    : node_sizes_(std::move(node_sizes)), placement_(placement) {
  if (node_sizes_.empty()) throw ConfigError("layout needs at least one node");
  for (int s : node_sizes_)
    if (s < 1) throw ConfigError("every node must host at least one rank");
  world_size_ = std::accumulate(node_sizes_.begin(), node_sizes_.end(), 0);

  node_of_.resize(world_size_);
  if (placement_ == Placement::Block) {
    int rank = 0;
    for (int node = 0; node < num_nodes(); ++node)
      for (int i = 0; i < node_sizes_[node]; ++i) node_of_[rank++] = node;
  } else {
    // Deal ranks cyclically, skipping nodes that are already full.
    std::vector<int> remaining = node_sizes_;
    int cursor = 0;
    for (int rank = 0; rank < world_size_; ++rank) {
      while (remaining[cursor] == 0) cursor = (cursor + 1) % num_nodes();
      node_of_[rank] = cursor;
      --remaining[cursor];
      cursor = (cursor + 1) % num_nodes();
    }
  }
}

RankLayout RankLayout::uniform(int nodes, int ppn, Placement placement) {
  if (nodes < 1) throw ConfigError("node count must be at least 1");
  return RankLayout(std::vector<int>(nodes, ppn), placement);
}

int RankLayout::node_of(int world_rank) const {
  if (world_rank < 0 || world_rank >= world_size_)
    throw UsageError("node_of: rank outside the layout");
  return node_of_[world_rank];
}

Comm::Comm(World& world, std::shared_ptr<const std::vector<int>> members, int my_index)
    : world_(&world), members_(std::move(members)), my_index_(my_index) {
  if (my_index_ < 0 || my_index_ >= static_cast<int>(members_->size()))
    throw UsageError("communicator index outside the member list");
  salt_ = fnv1a(*members_);
}

int Comm::member(int i) const {
  if (i < 0 || i >= size()) throw UsageError("member index outside the communicator");
  return (*members_)[i];
}

CommPackage split_shmem_bridge(const Comm& parent, const RankLayout& layout) {
  if (!parent.valid()) throw UsageError("split_shmem_bridge: invalid parent");
  const auto& members = parent.members();
  for (int m : members)
    if (m < 0 || m >= layout.world_size())
      throw ConfigError("layout does not cover all parent members");

  // Bucket parent members by node, preserving parent order inside each node
  // so that position 0 is the lowest parent rank (the leader).
  std::vector<std::vector<int>> groups(layout.num_nodes());
  for (int m : members) groups[layout.node_of(m)].push_back(m);

  CommPackage pkg;
  pkg.parent = parent;
  pkg.node_id = layout.node_of(parent.world_rank());

  auto bridge_members = std::make_shared<std::vector<int>>();
  int my_node_index = -1;
  for (int node = 0; node < layout.num_nodes(); ++node) {
    if (groups[node].empty()) continue;  // node contributes nothing; drop it
    if (node == pkg.node_id) my_node_index = static_cast<int>(bridge_members->size());
    bridge_members->push_back(groups[node].front());
  }
  pkg.node_index = my_node_index;
  pkg.bridgecomm_size = static_cast<int>(bridge_members->size());

  auto shmem_members = std::make_shared<std::vector<int>>(std::move(groups[pkg.node_id]));
  const int me = parent.world_rank();
  const int my_shmem_index = static_cast<int>(
      std::find(shmem_members->begin(), shmem_members->end(), me) - shmem_members->begin());
  pkg.shmem_comm = Comm(parent.world(), shmem_members, my_shmem_index);
  pkg.shmemcomm_size = pkg.shmem_comm.size();

  if (my_shmem_index == 0)
    pkg.bridge_comm = Comm(parent.world(), bridge_members, my_node_index);
  return pkg;
}

TransTables build_transtables(const Comm& parent, const CommPackage& pkg) {
  if (!parent.valid() || !pkg.parent.valid() || pkg.parent.members() != parent.members())
    throw UsageError("build_transtables: package was not derived from this parent");
  const RankLayout& layout = parent.world().layout();
  const auto& members = parent.members();
  const int p = static_cast<int>(members.size());

  // Nodes present in the parent, in ascending node order (= bridge order).
  std::vector<int> node_to_bridge(layout.num_nodes(), -1);
  std::vector<int> per_node_count(layout.num_nodes(), 0);
  {
    std::vector<bool> present(layout.num_nodes(), false);
    for (int m : members) present[layout.node_of(m)] = true;
    int next = 0;
    for (int node = 0; node < layout.num_nodes(); ++node)
      if (present[node]) node_to_bridge[node] = next++;
  }

  TransTables tables;
  tables.shmem_transtable.resize(p);
  tables.bridge_transtable.resize(p);
  for (int i = 0; i < p; ++i) {
    const int node = layout.node_of(members[i]);
    tables.shmem_transtable[i] = per_node_count[node]++;
    tables.bridge_transtable[i] = node_to_bridge[node];
  }
  return tables;
}

std::vector<int> gather_shmem_sizes(const CommPackage& pkg) {
  if (!pkg.is_leader()) return {};
  const Comm& bridge = *pkg.bridge_comm;
  const std::int64_t mine = pkg.shmemcomm_size;
  std::vector<std::int64_t> gathered(bridge.size());
  comm_allgather(bridge,
                 std::as_bytes(std::span<const std::int64_t>(&mine, 1)),
                 std::as_writable_bytes(std::span<std::int64_t>(gathered)));
  return std::vector<int>(gathered.begin(), gathered.end());
}

Comm subset_comm(const Comm& parent, std::span<const int> member_world_ranks) {
  if (!parent.valid()) throw UsageError("subset_comm: invalid parent");
  auto members = std::make_shared<std::vector<int>>(member_world_ranks.begin(),
                                                    member_world_ranks.end());
  const auto& pm = parent.members();
  for (int m : *members)
    if (std::find(pm.begin(), pm.end(), m) == pm.end())
      throw UsageError("subset_comm: member is not part of the parent");
  const auto it = std::find(members->begin(), members->end(), parent.world_rank());
  if (it == members->end())
    throw UsageError("subset_comm: the caller must be a member");
  return Comm(parent.world(), members, static_cast<int>(it - members->begin()));
}

}  // namespace hycoll
