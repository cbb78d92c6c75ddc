// Copyright 2026 The Triad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace triad {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shape / ring mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed model, weights, bundle or wire data.
class FormatError : public Error {
 public:
  using Error::Error;
};

// PRF counter space for a (key, label) stream ran out.
class PrfExhausted : public Error {
 public:
  using Error::Error;
};

// Transport-level failures. PeerClosed is raised when the other side of a
// channel shut down; Timeout when nothing arrived within the deadline.
class TransportError : public Error {
 public:
  using Error::Error;
};

class PeerClosed : public TransportError {
 public:
  using TransportError::TransportError;
};

class Timeout : public TransportError {
 public:
  using TransportError::TransportError;
};

}  // namespace triad

#define TRIAD_ENFORCE(cond, ExcType, msg)   \
  do {                                      \
    if (!(cond)) throw ExcType(std::string(msg)); \
  } while (0)
