#pragma once

#include <cstdint>
#include <filesystem>

namespace provis {

struct SynthOptions {
  std::size_t rows = 1000;
  std::uint64_t seed = 1;
  std::size_t airlines = 20;
  std::size_t airports = 300;
};

/// Writes ontime.csv, airlines.csv, airports.csv and shapes.csv under `out`
/// (created if missing). 50 states tile the map as rectangles; every
/// ontime foreign key resolves. Byte-identical output for equal options.
/// Throws InvalidArgument for rows == 0 or zero airlines/airports.
void generate(const SynthOptions& options, const std::filesystem::path& out);

}  // namespace provis
