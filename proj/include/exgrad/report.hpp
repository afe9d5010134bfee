#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "exgrad/space.hpp"

namespace exgrad {

enum class CheckStatus { pass, warn, fail };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::warn: return "warn";
    case CheckStatus::fail: return "fail";
  }
  return "?";
}

/// One line of a sampled hypothesis check. `worst` is the largest observed
/// violation (0 when none); `witness` describes where it occurred.
struct CheckItem {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double worst = 0.0;
  std::string witness;
  std::string note;

  CheckItem() = default;
  CheckItem(std::string name_, CheckStatus status_ = CheckStatus::pass, double worst_ = 0.0,
            std::string witness_ = {}, std::string note_ = {})
      : name(std::move(name_)), status(status_), worst(worst_), witness(std::move(witness_)),
        note(std::move(note_)) {}

  bool passed() const noexcept { return status != CheckStatus::fail; }
};

template <typename Derived>
std::string format_vector(const Eigen::MatrixBase<Derived>& v) {
  std::ostringstream os;
  os.precision(10);
  os << '(';
  for (Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << static_cast<double>(v[i]);
  os << ')';
  return os.str();
}

template <typename Scalar>
std::string format_scalar(Scalar v) {
  std::ostringstream os;
  os.precision(6);
  os << static_cast<double>(v);
  return os.str();
}

inline bool all_passed(const std::vector<CheckItem>& items) {
  for (const auto& item : items)
    if (!item.passed()) return false;
  return true;
}

}  // namespace exgrad
