// SPDX-License-Identifier: Apache-2.0
//
// thzsim - short-range 300 GHz channel and human-shadowing simulation toolkit
// Copyright (C) 2026 The thzsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef THZSIM_HPP
#define THZSIM_HPP

// Umbrella header for the numerical library. The scenario runner
// (thzsim/scenario.hpp) is kept separate because it needs libcrypto.

#include "thzsim/channel_stats.hpp"
#include "thzsim/diffraction.hpp"
#include "thzsim/ensemble.hpp"
#include "thzsim/fading.hpp"
#include "thzsim/fresnel.hpp"
#include "thzsim/geometry.hpp"
#include "thzsim/io.hpp"
#include "thzsim/mimo.hpp"
#include "thzsim/parallel.hpp"
#include "thzsim/phantom.hpp"
#include "thzsim/po_oracle.hpp"
#include "thzsim/prediction.hpp"
#include "thzsim/presets.hpp"
#include "thzsim/qd_channel.hpp"
#include "thzsim/rng.hpp"
#include "thzsim/screen.hpp"
#include "thzsim/spectrogram.hpp"

#endif
