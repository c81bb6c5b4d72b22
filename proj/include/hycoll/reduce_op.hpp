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
#include <string>

namespace hycoll {

enum class ReduceKind { Sum, Prod, Max, Min };
enum class ElemType { F64, I64 };

/// A predefined elementwise reduction. All kinds are commutative and
/// associative over their element type (floating Sum/Prod up to rounding).
struct ReduceOp {
  ReduceKind kind = ReduceKind::Sum;
  ElemType type = ElemType::F64;

  std::size_t elem_bytes() const { return 8; }
  bool commutative_associative() const { return true; }
  std::string name() const;
};

/// Elementwise acc = op(acc, in) over raw byte spans. Spans must have equal
/// length, a multiple of the element size.
void reduce_in_place(ReduceOp op, std::span<std::byte> acc, std::span<const std::byte> in);

/// Switch between the two node-level reduction strategies of the hybrid
/// allreduce.
enum class MethodPolicy { Auto, Force1, Force2 };

}  // namespace hycoll
