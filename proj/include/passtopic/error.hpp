#pragma once

#include <stdexcept>
#include <string>

namespace passtopic {

enum class ErrorCode {
  malformed,
  roster_reference,
  non_monotone,
  out_of_bounds,
  unknown_direction,
  duplicate_entry,
  missing_word,
  empty_corpus,
  invalid_k,
  zero_corpus,
  degenerate_topic,
  invalid_argument,
  input_too_large,
  no_frame,
  not_found,
  timeout,
};

const char* to_string(ErrorCode code);

// Single exception type for every domain failure. `field` names the offending
// input location when there is one (e.g. "events[3].passer").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace passtopic
