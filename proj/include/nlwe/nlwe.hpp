// Copyright 2026 The nlwe Authors
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


#pragma once

#include "nlwe/errors.hpp"
#include "nlwe/linalg.hpp"
#include "nlwe/reference.hpp"
#include "nlwe/realization.hpp"
#include "nlwe/realization_io.hpp"
#include "nlwe/selftest.hpp"
#include "nlwe/checks.hpp"
#include "nlwe/parallel.hpp"
#include "nlwe/locc.hpp"
