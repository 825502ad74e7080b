// SPDX-License-Identifier: Apache-2.0
//
// mmwlab: indoor millimeter-wave network laboratory
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

#ifndef MMWLAB_DEPLOY_HPP
#define MMWLAB_DEPLOY_HPP

#include "mmwlab/deploy/availability.hpp"
#include "mmwlab/deploy/model.hpp"
#include "mmwlab/deploy/simplex.hpp"
#include "mmwlab/deploy/solver.hpp"
#include "mmwlab/deploy/sweep.hpp"
#include "mmwlab/deploy/tessellation.hpp"

#endif // MMWLAB_DEPLOY_HPP
