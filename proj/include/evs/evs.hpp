// Copyright 2026 The evs-toolkit Authors
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
#pragma once

#include "evs/analysis.hpp"
#include "evs/config.hpp"
#include "evs/densities.hpp"
#include "evs/error.hpp"
#include "evs/experiment.hpp"
#include "evs/generators.hpp"
#include "evs/io.hpp"
#include "evs/metrics.hpp"
#include "evs/quantum_core.hpp"
#include "evs/reuploading.hpp"
#include "evs/rng.hpp"
#include "evs/sample_set.hpp"
#include "evs/samplers.hpp"
#include "evs/target_maps.hpp"
