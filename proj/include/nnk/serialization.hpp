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

#ifndef NNK_SERIALIZATION_HPP
#define NNK_SERIALIZATION_HPP

#include "json.hpp"
#include "nnk/kernel.hpp"

namespace nnk {

/// {"kind":"gaussian","sigma_sq":...} or {"kind":"cosine_at_node"}.
nlohmann::json to_json(const KernelSpec& spec);

/// Throws InvalidArgument on unknown kinds or a missing sigma_sq.
KernelSpec kernel_spec_from_json(const nlohmann::json& j);

}  // namespace nnk

#endif  // NNK_SERIALIZATION_HPP
