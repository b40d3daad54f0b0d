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

#include "nnk/serialization.hpp"

#include <string>

#include "nnk/error.hpp"

namespace nnk {

nlohmann::json to_json(const KernelSpec& spec) {
  if (spec.kind == KernelKind::gaussian) {
    return {{"kind", "gaussian"}, {"sigma_sq", spec.sigma_sq}};
  }
  return {{"kind", "cosine_at_node"}};
}

KernelSpec kernel_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw InvalidArgument("kernel spec needs a string 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "gaussian") {
    if (!j.contains("sigma_sq") || !j["sigma_sq"].is_number()) {
      throw InvalidArgument("gaussian kernel spec needs numeric 'sigma_sq'");
    }
    return KernelSpec::gaussian(j["sigma_sq"].get<double>());
  }
  if (kind == "cosine_at_node") return KernelSpec::cosine_at_node();
  throw InvalidArgument("unknown kernel kind '" + kind + "'");
}

}  // namespace nnk
