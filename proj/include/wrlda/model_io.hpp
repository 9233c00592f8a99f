#pragma once

#include <filesystem>
#include <iosfwd>

#include "wrlda/corpus.hpp"
#include "wrlda/lda.hpp"

namespace wrlda {

/// Binary model file, all integers and floats little-endian:
///
///   magic     8 bytes  "WRLDAMDL"
///   version   u32      1
///   K         u64
///   V         u64
///   alpha     K x f64
///   beta      K*V x f64, row-major (topic by topic)
///   vocab     V x (u32 byte length, UTF-8 bytes)
///   has_langs u8       0 or 1
///   langs     V x (u32 byte length, UTF-8 bytes), only when has_langs == 1
struct StoredModel {
  ModelParams params;
  Vocabulary vocab;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

void write_model(std::ostream& out, const ModelParams& params, const Vocabulary& vocab);
void save_model(const std::filesystem::path& path, const ModelParams& params,
                const Vocabulary& vocab);

/// Throws DataError on a bad magic, unknown version, truncation, or
/// parameters that fail ModelParams::validate.
StoredModel read_model(std::istream& in);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace wrlda
