/*
 * Copyright 2026 The ginse-overlaps Authors
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

#include "ginse/asymptotics.hpp"
#include "ginse/ensemble.hpp"
#include "ginse/estimators.hpp"
#include "ginse/exact.hpp"
#include "ginse/io.hpp"
#include "ginse/log_complex.hpp"
#include "ginse/pfaffian.hpp"
#include "ginse/schur.hpp"
#include "ginse/spectrum.hpp"
#include "ginse/zpolynomial.hpp"
#include "ginse/validate.hpp"
