// Copyright 2026 The stylemix Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
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

#include "stylemix/adain.hpp"
#include "stylemix/augment.hpp"
#include "stylemix/common.hpp"
#include "stylemix/config.hpp"
#include "stylemix/image.hpp"
#include "stylemix/image_io.hpp"
#include "stylemix/network.hpp"
#include "stylemix/parallel.hpp"
#include "stylemix/pipeline.hpp"
#include "stylemix/segeval.hpp"
#include "stylemix/tcps.hpp"
#include "stylemix/tensor.hpp"
#include "stylemix/weights.hpp"
