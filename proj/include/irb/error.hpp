// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef IRB_ERROR_HPP
#define IRB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace irb {

// Error categories. Values are stable and mirrored by the C API status codes.
enum class Errc : int {
  ok = 0,
  invalid_argument = 1,
  dim_mismatch = 2,
  zero_vector = 3,
  io = 4,
  bad_magic = 5,
  length_mismatch = 6,
  parse = 7,
  validation = 8,
  item_not_found = 9,
  empty_selection = 10,
  degenerate = 11,
  missing_counterpart = 12,
  batch_too_small = 13,
  too_few_vectors = 14,
  empty_candidates = 15,
  nonfinite = 16,
  internal = 17,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void throw_error(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace irb

#endif  // IRB_ERROR_HPP
