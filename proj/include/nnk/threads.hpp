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

#ifndef NNK_THREADS_HPP
#define NNK_THREADS_HPP

namespace nnk {

/// Caps worker threads used by per-node loops. Values < 1 restore the default.
void set_max_threads(int n);
int max_threads();

}  // namespace nnk

#endif  // NNK_THREADS_HPP
