#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "depsrl/model/parser.hpp"

namespace depsrl::model {

// Binary layout (little-endian):
//   "DEPSRLCK"  u32 format version
//   u64 n, n bytes of JSON {config_version, config, vocab}
//   u32 tensor count, then per tensor: u32 name length, name,
//   u32 rows, u32 cols, rows*cols f64 in column-major order.
inline constexpr char kCheckpointMagic[8] = {'D', 'E', 'P', 'S', 'R', 'L', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_checkpoint(const JointParser& model, std::ostream& out);
void save_checkpoint(const JointParser& model, const std::string& path);

/// Throws CheckpointError on a bad magic, format or config version, or on
/// missing or mis-shaped tensors.
JointParser load_checkpoint(std::istream& in);
JointParser load_checkpoint(const std::string& path);

}  // namespace depsrl::model
