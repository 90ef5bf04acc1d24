#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "gapsafe/design_matrix.hpp"

namespace gapsafe {

enum class DataFormat { DenseCsv, Svmlight };

std::string_view to_string(DataFormat f) noexcept;
// "dense-csv" / "csv", "svmlight" / "libsvm".
std::optional<DataFormat> parse_format(std::string_view name) noexcept;

struct Dataset {
  DesignMatrix X;
  Vector y;
  // Coefficients used to generate y, when synthetic.
  std::optional<Vector> planted;
};

// svmlight: "<target> <idx>:<value> ...", 1-based indices, '#' starts a
// comment. A "# n_features=<p>" comment fixes the column count, so trailing
// empty columns survive a save/load cycle.
Dataset parse_svmlight(std::istream& in);
// Header row, then one row per sample; first column is the target.
Dataset parse_dense_csv(std::istream& in);

Dataset load_dataset(const std::string& path, DataFormat format);

// Values are written in shortest round-trip form; loading the file back
// gives a bit-identical matrix and target.
void write_svmlight(std::ostream& out, const Dataset& data);
void write_dense_csv(std::ostream& out, const Dataset& data);
void save_dataset(const Dataset& data, const std::string& path, DataFormat format);

/// Random regression problem. density = 1 gives a dense Gaussian design,
/// otherwise each entry is nonzero with probability `density` (sparse
/// storage). y = X b + noise with a planted sparse b and
/// var(X b) / var(noise) = snr; snr = infinity means no noise.
Dataset synth_dataset(Index n, Index p, double density, double snr, std::uint64_t seed);

// Rescales every nonzero column to unit Euclidean norm.
Dataset normalize_columns(const Dataset& data);

}  // namespace gapsafe
