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

#include "hycoll/reduce_op.hpp"

#include <algorithm>
#include <cstdint>

#include "hycoll/error.hpp"

namespace hycoll {

namespace {

template <typename T, typename F>
void fold(std::span<std::byte> acc, std::span<const std::byte> in, F f) {
  auto* a = reinterpret_cast<T*>(acc.data());
  const auto* b = reinterpret_cast<const T*>(in.data());
  const std::size_t n = acc.size() / sizeof(T);
  for (std::size_t i = 0; i < n; ++i) a[i] = f(a[i], b[i]);
}

template <typename T>
void dispatch(ReduceKind kind, std::span<std::byte> acc, std::span<const std::byte> in) {
  switch (kind) {
    case ReduceKind::Sum:
      fold<T>(acc, in, [](T x, T y) { return x + y; });
      break;
    case ReduceKind::Prod:
      fold<T>(acc, in, [](T x, T y) { return x * y; });
      break;
    case ReduceKind::Max:
      fold<T>(acc, in, [](T x, T y) { return std::max(x, y); });
      break;
    case ReduceKind::Min:
      fold<T>(acc, in, [](T x, T y) { return std::min(x, y); });
      break;
  }
}

}  // namespace

std::string ReduceOp::name() const {
  std::string k;
  switch (kind) {
    case ReduceKind::Sum: k = "sum"; break;
    case ReduceKind::Prod: k = "prod"; break;
    case ReduceKind::Max: k = "max"; break;
    case ReduceKind::Min: k = "min"; break;
  }
  return k + (type == ElemType::F64 ? "/f64" : "/i64");
}

void reduce_in_place(ReduceOp op, std::span<std::byte> acc, std::span<const std::byte> in) {
  if (acc.size() != in.size())
    throw UsageError("reduce_in_place: operand sizes differ");
  if (acc.size() % op.elem_bytes() != 0)
    throw UsageError("reduce_in_place: size is not a multiple of the element size");
  if (op.type == ElemType::F64)
    dispatch<double>(op.kind, acc, in);
  else
    dispatch<std::int64_t>(op.kind, acc, in);
}

}  // namespace hycoll
