// Copyright 2026 The pirpsi Authors.
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

#define PIRPSI_VERSION "0.1.0"

#include "pirpsi/audit.hpp"
#include "pirpsi/capacity.hpp"
#include "pirpsi/database.hpp"
#include "pirpsi/errors.hpp"
#include "pirpsi/field.hpp"
#include "pirpsi/matrix.hpp"
#include "pirpsi/model.hpp"
#include "pirpsi/random.hpp"
#include "pirpsi/rational.hpp"
#include "pirpsi/retrieval.hpp"
#include "pirpsi/scheme_psi.hpp"
#include "pirpsi/scheme_sj.hpp"
