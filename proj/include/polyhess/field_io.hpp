#pragma once

// Field dumps: `<stem>.f64` holds 8-byte little-endian reals in row-major node
// order (last axis fastest); `<stem>.meta.json` carries dim, counts, spacing,
// extent and ghost_width.

#include <filesystem>
#include <string>

#include "polyhess/grid.hpp"

namespace polyhess {

struct FieldDumpPaths {
  std::filesystem::path data;
  std::filesystem::path meta;
};

FieldDumpPaths write_field(const std::filesystem::path& stem, const ScalarField& u);
/// Reads a dump written by write_field (pass the stem or the .f64 path).
ScalarField read_field(const std::filesystem::path& stem_or_data);
/// x,y,value rows for 2-D fields; throws ContractError for 3-D.
void write_field_csv(const std::filesystem::path& path, const ScalarField& u);

}  // namespace polyhess
