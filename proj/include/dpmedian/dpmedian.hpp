// Copyright 2026 The dpmedian Authors
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

#ifndef DPMEDIAN_DPMEDIAN_HPP_
#define DPMEDIAN_DPMEDIAN_HPP_

#include "dpmedian/core.hpp"
#include "dpmedian/envelope.hpp"
#include "dpmedian/estimator.hpp"
#include "dpmedian/lab.hpp"
#include "dpmedian/samplers.hpp"
#include "dpmedian/typical_set.hpp"

#endif  // DPMEDIAN_DPMEDIAN_HPP_
