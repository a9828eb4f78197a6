#pragma once

#include <string>

#include "nncp/model.hpp"

namespace nncp {

/// Binary model container, version 1. Layout: 8-byte magic "NNCPMODL",
/// u32 format version, the config fields, then the 8 parameter tensors as
/// (u64 rows, u64 cols, row-major f64 payload). All scalars little-endian;
/// doubles stored by bit pattern, so a save/load round-trip is bit-exact.
void save_checkpoint(const Seq2SeqModel& model, const std::string& path);

Seq2SeqModel load_checkpoint(const std::string& path);

}  // namespace nncp
