// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#pragma once

#include "retape/active_scalar.hpp"
#include "retape/burgers.hpp"
#include "retape/external_function.hpp"
#include "retape/index_manager.hpp"
#include "retape/jacobian_tape.hpp"
#include "retape/memory_tracker.hpp"
#include "retape/opcodes.hpp"
#include "retape/primal_value_tape.hpp"
#include "retape/statistics.hpp"
#include "retape/tape.hpp"
#include "retape/types.hpp"
#include "retape/user_data.hpp"
#include "retape/vec_pow2.hpp"
#include "retape/verify.hpp"
