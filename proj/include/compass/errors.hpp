// Copyright 2026 The compass-chain Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace compass {

/// Invalid parameters, grids, or configuration input. CLI exit code 2.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical self-consistency check failed (lost Hermiticity,
/// non-physical eigenvalues, residual imaginary parts). CLI exit code 3.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Brute-force diagonalization requested beyond the supported size. CLI exit code 4.
struct size_limit_error : std::runtime_error {
  explicit size_limit_error(const std::string& what) : std::runtime_error(what) {}
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const config_error*>(&e)) return 2;
  if (dynamic_cast<const numerical_error*>(&e)) return 3;
  if (dynamic_cast<const size_limit_error*>(&e)) return 4;
  return 1;
}

}  // namespace compass
