// Copyright 2026 The nnkgraph Authors.
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

#ifndef NNK_SRC_PARALLEL_HPP
#define NNK_SRC_PARALLEL_HPP

#include <exception>
#include <mutex>

#include "nnk/dataset.hpp"

namespace nnk {

/// Runs body(i) for i in [0, n) on the OpenMP pool. The first exception
/// thrown by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for(Index n, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace nnk

#endif  // NNK_SRC_PARALLEL_HPP
