/*
 * Copyright 2026 The convbound authors
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

#ifndef CONVBOUND_ERRORS_HPP
#define CONVBOUND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace convbound {

/// A caller violated a documented precondition (bad dimensions, non-finite
/// entries, out-of-range parameters, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// A request exceeded the configured desk-scale limits (operator cell cap,
/// iteration caps, rejection-sampling caps).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// A config document is malformed or violates the published schema.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace convbound

#endif  // CONVBOUND_ERRORS_HPP
