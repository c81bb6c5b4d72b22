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

#include <stdexcept>
#include <string>

namespace hycoll {

/// Base class of every error raised by the runtime.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid launch or benchmark configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// API contract violated by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A view or buffer range falls outside its arena.
class BoundsError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Shared arena allocation failed.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A blocking call was interrupted because the job is shutting down.
class CancelledError : public Error {
 public:
  using Error::Error;
};

/// The watchdog decided one or more ranks stopped making progress.
class DeadlockError : public Error {
 public:
  using Error::Error;
};

/// A rank body terminated with an exception.
class WorkerError : public Error {
 public:
  WorkerError(int rank, const std::string& what)
      : Error("rank " + std::to_string(rank) + " failed: " + what), rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

}  // namespace hycoll
