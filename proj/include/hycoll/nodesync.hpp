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

#include "hycoll/shm_window.hpp"
#include "hycoll/topology.hpp"

namespace hycoll {

// Node-level synchronization: the "red" all-ranks barrier and the "yellow"
// leader-to-children spin protocol.
//
// The barrier is a centralized sense-reversing barrier in the window's
// control block, with full fence semantics on entry and exit.
//
// The spin protocol keeps a per-window epoch counter written only by the
// leader. A child's wait increments its private expected epoch, then polls
// (fencing each poll) until the counter equals it - equality, never >= or <=.
// The leader's signal first waits until every child has consumed the previous
// epoch, then publishes the next one with release ordering; this keeps the
// counter within one of every child's expected epoch, so the equality exit
// cannot be overrun even when workers are preempted for long stretches.
// Children never wait on each other: once the leader has signaled, any child
// waiting on that epoch returns regardless of its siblings.

/// Red sync: all ranks of pkg.shmem_comm wait for each other; arena writes
/// made before the barrier are visible to every participant after it.
void node_barrier(SharedWindow& win, const CommPackage& pkg);

/// Yellow sync, leader side: fence, then advance the epoch by one. Callable
/// only by the node leader. Running ahead of children that have not started
/// waiting yet is legal; they catch up at their next wait.
void leader_signal(SpinCell& cell, SharedWindow& win);

/// Yellow sync, child side: bump the private expected epoch and spin until
/// the shared counter equals it. On return, all leader writes preceding the
/// matching signal are visible.
void child_wait(SpinCell& cell, SharedWindow& win);

// Unchecked directed-edge variants over an arbitrary cell: the caller picks
// the single writer per epoch. Used for the child-root-to-leader edge of the
// hybrid broadcast.
void signal_epoch(SpinCell& cell, SharedWindow& win);
void await_epoch(SpinCell& cell, SharedWindow& win);

}  // namespace hycoll
