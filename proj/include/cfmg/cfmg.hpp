/*
 * Copyright (c) 2026, The cfmg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "cfmg/signature.hpp"
#include "cfmg/bits.hpp"
#include "cfmg/msc.hpp"
#include "cfmg/msc_json.hpp"
#include "cfmg/path.hpp"
#include "cfmg/machine.hpp"
#include "cfmg/pipeline.hpp"
#include "cfmg/cfm.hpp"
#include "cfmg/labels.hpp"
#include "cfmg/preorder.hpp"
#include "cfmg/gossip.hpp"
#include "cfmg/impossibility.hpp"
#include "cfmg/tl.hpp"
#include "cfmg/corpus.hpp"
#include "cfmg/dot.hpp"
