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

#include <stdexcept>
#include <string>

namespace ginse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

// Thrown for draws that must be discarded and resampled.
class SpectrumError : public Error {
 public:
  using Error::Error;
};

class DegenerateSpectrum : public SpectrumError {
 public:
  using SpectrumError::SpectrumError;
};

class RealEigenvalue : public SpectrumError {
 public:
  using SpectrumError::SpectrumError;
};

class PairingFailure : public SpectrumError {
 public:
  using SpectrumError::SpectrumError;
};

class NearCollision : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class UnsupportedRoute : public Error {
 public:
  using Error::Error;
};

class NumericOverflow : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ginse
