// Copyright 2025 The mfit Authors.
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

namespace mfit {

// A precondition or postcondition of a library operation did not hold.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files or configuration documents.
class FormatError : public ContractError {
 public:
  using ContractError::ContractError;
};

}  // namespace mfit
