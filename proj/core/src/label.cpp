#include "depsrl/label.hpp"

#include <string>
#include <vector>

namespace depsrl {
namespace {

// Characters with structural meaning in the surface form.
constexpr std::string_view kReserved = "|(),\t\n\r ";

void check_component(std::string_view value, const char* field) {
  if (value.empty()) throw LabelError(std::string("empty ") + field + " component");
  if (value.find_first_of(kReserved) != std::string_view::npos)
    throw LabelError(std::string(field) + " component '" + std::string(value) +
                     "' contains a reserved character");
}

void check_slot(const std::optional<std::string>& value, const char* field) {
  if (!value) return;
  check_component(*value, field);
  if (*value == kAbsentSlot)
    throw LabelError(std::string(field) + " component collides with the absent marker");
}

std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = text.find(kLabelSeparator, begin);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(begin));
      return out;
    }
    out.push_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

std::optional<std::string> parse_slot(std::string_view field, const char* name) {
  if (field == kAbsentSlot) return std::nullopt;
  check_component(field, name);
  return std::string(field);
}

}  // namespace

std::string serialize_cshare(const CShare& share) {
  if (share.parent) {
    check_component(*share.parent, "(C) parent");
    if (*share.parent == kNullMarker)
      throw LabelError("(C) parent label collides with the NULL-marker");
  }
  check_component(share.child, "(C) child");
  if (share.child == kNullMarker) throw LabelError("(C) child label collides with the NULL-marker");
  std::string out = "(";
  out += share.parent ? *share.parent : std::string(kNullMarker);
  out += ',';
  out += share.child;
  out += ')';
  if (share.propagate_argm) out += kArgmFlag;
  return out;
}

CShare parse_cshare(std::string_view text) {
  CShare share;
  if (text.size() >= kArgmFlag.size() &&
      text.substr(text.size() - kArgmFlag.size()) == kArgmFlag) {
    share.propagate_argm = true;
    text.remove_suffix(kArgmFlag.size());
  }
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw LabelError("malformed (C) tuple '" + std::string(text) + "'");
  text = text.substr(1, text.size() - 2);
  const auto comma = text.find(',');
  if (comma == std::string_view::npos)
    throw LabelError("(C) tuple is missing ','");
  const auto parent = text.substr(0, comma);
  const auto child = text.substr(comma + 1);
  check_component(parent, "(C) parent");
  check_component(child, "(C) child");
  if (child == kNullMarker) throw LabelError("the NULL-marker is only allowed in the parent position");
  if (parent != kNullMarker) share.parent = std::string(parent);
  share.child = std::string(child);
  return share;
}

std::string serialize_label(const JointLabel& label) {
  check_component(label.syn, "syn");
  if (label.syn == kAbsentSlot) throw LabelError("syn component cannot be absent");
  check_slot(label.d, "(D)");
  check_slot(label.r, "(R)");
  std::string out = label.syn;
  out += kLabelSeparator;
  out += label.d ? *label.d : std::string(kAbsentSlot);
  out += kLabelSeparator;
  out += label.c ? serialize_cshare(*label.c) : std::string(kAbsentSlot);
  out += kLabelSeparator;
  out += label.r ? *label.r : std::string(kAbsentSlot);
  return out;
}

JointLabel parse_label(std::string_view text) {
  const auto fields = split_fields(text);
  if (fields.size() != 4)
    throw LabelError("joint label '" + std::string(text) + "' has " +
                     std::to_string(fields.size()) + " fields, expected 4");
  JointLabel label;
  std::size_t at = 0;
  try {
    check_component(fields[0], "syn");
    if (fields[0] == kAbsentSlot) throw LabelError("syn component cannot be absent");
    label.syn = std::string(fields[0]);
    at = 1;
    label.d = parse_slot(fields[1], "(D)");
    at = 2;
    if (fields[2] != kAbsentSlot) label.c = parse_cshare(fields[2]);
    at = 3;
    label.r = parse_slot(fields[3], "(R)");
  } catch (const LabelError& e) {
    throw LabelError("joint label '" + std::string(text) + "', field " + std::to_string(at + 1) + ": " + e.what());
  }
  return label;
}

}  // namespace depsrl
