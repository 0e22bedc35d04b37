/*
   Copyright 2026 The maxgauss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "maxgauss/borel_set.hpp"
#include "maxgauss/bounds.hpp"
#include "maxgauss/distribution.hpp"
#include "maxgauss/errors.hpp"
#include "maxgauss/linalg.hpp"
#include "maxgauss/quadrature.hpp"
#include "maxgauss/report_io.hpp"
#include "maxgauss/rng.hpp"
#include "maxgauss/run_config.hpp"
#include "maxgauss/simulate.hpp"
#include "maxgauss/smooth_indicator.hpp"
#include "maxgauss/smooth_max.hpp"
#include "maxgauss/smoothing_params.hpp"
#include "maxgauss/tune.hpp"
#include "maxgauss/verify.hpp"
