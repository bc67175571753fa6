#pragma once

#include <iosfwd>
#include <string>

#include "uavmec/qnetwork.hpp"

namespace uavmec {

/// Text checkpoint, version 1:
///
///   uavmec-qnetwork 1
///   sizes <n0> <n1> ... <nL>
///   layer <i> <in> <out>
///   <out*in weights, row-major, hex floats, one row per line>
///   <out biases, hex floats>
///   ...
///
/// Hex floats make the round trip bit-exact.
void write_checkpoint(std::ostream& out, const QNetwork& net);
QNetwork read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const QNetwork& net);
QNetwork load_checkpoint(const std::string& path);

}  // namespace uavmec
