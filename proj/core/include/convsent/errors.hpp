// core/include/convsent/errors.hpp

// Copyright 2026  Convsent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CONVSENT_ERRORS_HPP_
#define CONVSENT_ERRORS_HPP_

#include <stdexcept>

namespace convsent {

// Base class for every recoverable error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace convsent

#endif  // CONVSENT_ERRORS_HPP_
