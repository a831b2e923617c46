/*
 Copyright 2026 The hocs Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include "hocs/config.hpp"
#include "hocs/control.hpp"
#include "hocs/csv.hpp"
#include "hocs/errors.hpp"
#include "hocs/experiments.hpp"
#include "hocs/model.hpp"
#include "hocs/oracle.hpp"
#include "hocs/recursion.hpp"
#include "hocs/simulate.hpp"
#include "hocs/validate.hpp"
