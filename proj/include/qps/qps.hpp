/* Copyright 2026 The QPS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QPS_QPS_HPP_
#define QPS_QPS_HPP_

#include "qps/apps.hpp"
#include "qps/error.hpp"
#include "qps/linalg.hpp"
#include "qps/postselect.hpp"
#include "qps/povm.hpp"
#include "qps/qfi.hpp"
#include "qps/quasipure.hpp"
#include "qps/random.hpp"
#include "qps/state.hpp"
#include "qps/sweep.hpp"
#include "qps/verify.hpp"

#endif  // QPS_QPS_HPP_
