#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "depsrl/types.hpp"

namespace depsrl {

// Surface form of a joint label:
//
//   syn|d|c|r        e.g.  xcomp|ARG1|(ARG0,ARG0)+m|_
//
// `_` marks an absent slot, a (C) slot renders as `(a,b)` with an
// optional `+m` suffix for ARGM propagation, and `0` in the parent
// position is the NULL-marker.
inline constexpr char kLabelSeparator = '|';
inline constexpr std::string_view kAbsentSlot = "_";
inline constexpr std::string_view kNullMarker = "0";
inline constexpr std::string_view kArgmFlag = "+m";

class LabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_label(const JointLabel& label);
JointLabel parse_label(std::string_view text);

std::string serialize_cshare(const CShare& share);
CShare parse_cshare(std::string_view text);

}  // namespace depsrl
