/*
   Copyright 2026 The maxgauss Authors

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

namespace maxgauss {

/// Argument outside the mathematical domain of an operation
/// (non-finite input, gamma*delta <= 1, negative enlargement, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dimension or size mismatch between arguments.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace maxgauss
