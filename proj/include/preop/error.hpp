// Copyright 2026-present the preop-rag project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace preop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad header, duplicate id, bad config value).
class InvalidInput : public Error {
 public:
    using Error::Error;
};

/// A lookup that missed: unknown node id, replay key absent, etc.
class NotFound : public Error {
 public:
    using Error::Error;
};

/// Transport-level failure talking to a remote service. Carries the number of
/// attempts made so callers can decide whether to retry further.
class TransportError : public Error {
 public:
    TransportError(const std::string& what, int attempts)
        : Error(what + " (after " + std::to_string(attempts) + " attempt" +
                (attempts == 1 ? "" : "s") + ")"),
          attempts_(attempts) {}

    int attempts() const noexcept { return attempts_; }
    bool retryable() const noexcept { return true; }

 private:
    int attempts_;
};

}  // namespace preop
