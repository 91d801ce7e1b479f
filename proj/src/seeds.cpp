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

#include "mfit/seeds.hpp"

namespace mfit {

static_assert(derive_seed(1, Stage::Generate, 0) != derive_seed(1, Stage::Generate, 1));
static_assert(derive_seed(1, Stage::Generate, 0) != derive_seed(1, Stage::Noise, 0));

}  // namespace mfit
