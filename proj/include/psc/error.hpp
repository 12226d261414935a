// Copyright 2026 The psc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PSC_ERROR_HPP
#define PSC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace psc {

/// Input violates a documented precondition (bad layout parameters, out-of-range
/// couplings, mismatched sizes). The CLI maps this to exit code 2.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string &what) : std::invalid_argument(what) {}
};

/// Requested problem exceeds a backend's capacity (qubit cap, bond cap).
/// The CLI maps this to exit code 3.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string &what) : std::runtime_error(what) {}
};

/// A numerical routine met a degenerate or singular situation it cannot resolve.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

/// An internal invariant failed; indicates a bug rather than bad input.
class ConsistencyError : public std::logic_error {
public:
    explicit ConsistencyError(const std::string &what) : std::logic_error(what) {}
};

}  // namespace psc

#endif  // PSC_ERROR_HPP
