/*
 * Copyright 2026 The bayes_bound Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BAYES_BOUND_ERROR_HPP
#define BAYES_BOUND_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bayes_bound {

enum class ErrorKind {
  invalid_argument,  // caller-supplied value violates a precondition
  io,                // file could not be opened/read/written
  format,            // malformed GCM or flow file
  numerical,         // factorization / nesting / budget failure
  out_of_range,      // inversion target outside the achievable range
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::invalid_argument, what);
}

}  // namespace bayes_bound

#endif
