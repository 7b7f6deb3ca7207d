// Copyright 2026 The qpv-sim Authors
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

#ifndef QPV_QPV_HPP
#define QPV_QPV_HPP

#include "qpv/adversary.hpp"
#include "qpv/analysis.hpp"
#include "qpv/common.hpp"
#include "qpv/protocol.hpp"
#include "qpv/quantum_core.hpp"
#include "qpv/random.hpp"
#include "qpv/selftest.hpp"
#include "qpv/spacetime.hpp"

#endif  // QPV_QPV_HPP
