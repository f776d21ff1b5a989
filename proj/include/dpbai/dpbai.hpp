// Copyright 2026 The dpbai Authors
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


#ifndef DPBAI_DPBAI_HPP_
#define DPBAI_DPBAI_HPP_

// Everything in one include.

#include "dpbai/bandit.hpp"
#include "dpbai/campaign.hpp"
#include "dpbai/complexity_oracle.hpp"
#include "dpbai/config.hpp"
#include "dpbai/dpse.hpp"
#include "dpbai/estimators.hpp"
#include "dpbai/glr.hpp"
#include "dpbai/invariants.hpp"
#include "dpbai/privacy.hpp"
#include "dpbai/regime.hpp"
#include "dpbai/rng.hpp"
#include "dpbai/special_functions.hpp"
#include "dpbai/top_two.hpp"

#endif  // DPBAI_DPBAI_HPP_
