#pragma once

#include <filesystem>
#include <iosfwd>

#include "proxkit/problems.hpp"

namespace proxkit {

// Container layout: a text header
//   PROXKIT-INSTANCE v1
//   kind: <kind>
//   seed: <seed>
//   config.<key>: <value>
//   constant.<name>: <17-digit value>
//   array.<name>: <rows>x<cols>
//   end-header
// followed by the binary payload: "PXKB", u32 version, u32 array count, then
// per array u32 name length, name bytes, u64 rows, u64 cols and rows * cols
// little-endian doubles in row-major order.
void write_instance(std::ostream& out, const InstanceData& data);
InstanceData read_instance(std::istream& in);

void save_instance(const std::filesystem::path& path, const InstanceData& data);
InstanceData load_instance(const std::filesystem::path& path);

}  // namespace proxkit
