#include "gapsafe/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "gapsafe/errors.hpp"

namespace gapsafe {

namespace {

constexpr Index kMaxDimension = Index{1} << 28;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(std::string(what) + " out of range: '" + std::string(tok) + "'", line);
  }
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(std::string("malformed ") + what + ": '" + std::string(tok) + "'", line);
  }
  if (!std::isfinite(v)) {
    throw ParseError(std::string("non-finite ") + what + ": '" + std::string(tok) + "'", line);
  }
  return v;
}

Index parse_index(std::string_view tok, std::size_t line) {
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc::result_out_of_range || (ec == std::errc() && v > kMaxDimension)) {
    throw ParseError("feature index '" + std::string(tok) + "' exceeds the supported dimension",
                     line);
  }
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError("malformed feature index '" + std::string(tok) + "'", line);
  }
  if (v == 0) throw ParseError("feature indices are 1-based, got 0", line);
  return v;
}

void put_double(std::ostream& out, double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.write(buf.data(), ptr - buf.data());
}

struct Entry {
  Index row;
  Index col;
  double value;
};

DesignMatrix csc_from_entries(Index n, Index p, const std::vector<Entry>& entries) {
  std::vector<Index> col_ptr(p + 1, 0);
  for (const Entry& e : entries) ++col_ptr[e.col + 1];
  for (Index j = 0; j < p; ++j) col_ptr[j + 1] += col_ptr[j];
  std::vector<Index> next(col_ptr.begin(), col_ptr.end() - 1);
  std::vector<Index> rows(entries.size());
  std::vector<double> vals(entries.size());
  // Entries arrive row by row, so rows stay increasing within a column.
  for (const Entry& e : entries) {
    const Index k = next[e.col]++;
    rows[k] = e.row;
    vals[k] = e.value;
  }
  return DesignMatrix::sparse(n, p, std::move(col_ptr), std::move(rows), std::move(vals));
}

std::vector<std::vector<std::pair<Index, double>>> rows_of(const DesignMatrix& X) {
  std::vector<std::vector<std::pair<Index, double>>> rows(X.base_rows());
  if (X.is_sparse()) {
    const auto ptr = X.csc_col_ptr();
    const auto idx = X.csc_row_idx();
    const auto val = X.csc_values();
    for (Index j = 0; j < X.cols(); ++j) {
      for (Index k = ptr[j]; k < ptr[j + 1]; ++k) {
        if (val[k] != 0.0) rows[idx[k]].emplace_back(j, val[k]);
      }
    }
  } else {
    const auto d = X.dense_values();
    for (Index j = 0; j < X.cols(); ++j) {
      for (Index i = 0; i < X.base_rows(); ++i) {
        const double v = d[j * X.base_rows() + i];
        if (v != 0.0) rows[i].emplace_back(j, v);
      }
    }
  }
  return rows;
}

void check_writable(const Dataset& data) {
  if (data.X.has_tail()) throw ParameterError("cannot serialize an augmented design");
  if (data.y.size() != data.X.rows()) throw ParameterError("target length does not match design");
}

}  // namespace

std::string_view to_string(DataFormat f) noexcept {
  return f == DataFormat::DenseCsv ? "dense-csv" : "svmlight";
}

std::optional<DataFormat> parse_format(std::string_view name) noexcept {
  if (name == "dense-csv" || name == "csv") return DataFormat::DenseCsv;
  if (name == "svmlight" || name == "libsvm") return DataFormat::Svmlight;
  return std::nullopt;
}

Dataset parse_svmlight(std::istream& in) {
  static constexpr std::string_view kDeclared = "n_features=";
  std::vector<Entry> entries;
  Vector y;
  Index max_col = 0;
  Index declared = 0;
  std::string raw;
  std::size_t line = 0;
  std::vector<std::pair<Index, double>> row;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s(raw);
    const auto hash = s.find('#');
    if (hash != std::string_view::npos) {
      const std::string_view comment = trim(s.substr(hash + 1));
      if (trim(s.substr(0, hash)).empty() && comment.starts_with(kDeclared)) {
        const std::string_view num = trim(comment.substr(kDeclared.size()));
        Index v = 0;
        const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (ec != std::errc() || ptr != num.data() + num.size() || v > kMaxDimension) {
          throw ParseError("malformed n_features declaration", line);
        }
        declared = v;
      }
      s = s.substr(0, hash);
    }
    s = trim(s);
    if (s.empty()) continue;

    row.clear();
    bool first = true;
    while (!s.empty()) {
      const auto end = s.find_first_of(" \t");
      const std::string_view tok = s.substr(0, end);
      s = end == std::string_view::npos ? std::string_view{} : trim(s.substr(end));
      if (first) {
        y.push_back(parse_double(tok, line, "target"));
        first = false;
        continue;
      }
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected <index>:<value>, got '" + std::string(tok) + "'", line);
      }
      const Index idx = parse_index(tok.substr(0, colon), line);
      const double v = parse_double(tok.substr(colon + 1), line, "feature value");
      row.emplace_back(idx - 1, v);
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k].first == row[k - 1].first) {
        throw ParseError("duplicate feature index " + std::to_string(row[k].first + 1), line);
      }
    }
    const Index r = y.size() - 1;
    for (const auto& [c, v] : row) {
      max_col = std::max(max_col, c + 1);
      if (v != 0.0) entries.push_back(Entry{r, c, v});
    }
  }
  if (y.empty()) throw ParseError("no samples", line);
  const Index p = std::max(max_col, declared);
  if (p == 0) throw ParseError("no features", line);
  return Dataset{csc_from_entries(y.size(), p, entries), std::move(y), std::nullopt};
}

Dataset parse_dense_csv(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  std::size_t width = 0;
  Vector y;
  Vector row_major;
  auto split = [](std::string_view s, std::vector<std::string_view>& out) {
    out.clear();
    while (true) {
      const auto comma = s.find(',');
      out.push_back(trim(s.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
    }
  };
  std::vector<std::string_view> fields;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty()) continue;
    split(s, fields);
    if (width == 0) {
      if (fields.size() < 2) throw ParseError("header needs a target and a feature", line);
      width = fields.size();
      continue;
    }
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, got " +
                           std::to_string(fields.size()),
                       line);
    }
    y.push_back(parse_double(fields[0], line, "target"));
    for (std::size_t k = 1; k < width; ++k) {
      row_major.push_back(parse_double(fields[k], line, "feature value"));
    }
  }
  if (width == 0) throw ParseError("missing header", line);
  if (y.empty()) throw ParseError("no samples", line);
  const Index n = y.size();
  const Index p = width - 1;
  if (p > kMaxDimension || n > kMaxDimension || n > std::numeric_limits<Index>::max() / p) {
    throw ParseError("matrix dimensions overflow", line);
  }
  Vector col_major(n * p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) col_major[j * n + i] = row_major[i * p + j];
  }
  return Dataset{DesignMatrix::dense(n, p, std::move(col_major)), std::move(y), std::nullopt};
}

Dataset load_dataset(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return format == DataFormat::DenseCsv ? parse_dense_csv(in) : parse_svmlight(in);
}

void write_svmlight(std::ostream& out, const Dataset& data) {
  check_writable(data);
  out << "# n_features=" << data.X.cols() << '\n';
  const auto rows = rows_of(data.X);
  for (Index i = 0; i < rows.size(); ++i) {
    put_double(out, data.y[i]);
    for (const auto& [j, v] : rows[i]) {
      out << ' ' << (j + 1) << ':';
      put_double(out, v);
    }
    out << '\n';
  }
}

void write_dense_csv(std::ostream& out, const Dataset& data) {
  check_writable(data);
  const Index n = data.X.rows();
  const Index p = data.X.cols();
  const Vector d = data.X.to_dense();
  out << 'y';
  for (Index j = 0; j < p; ++j) out << ",f" << (j + 1);
  out << '\n';
  for (Index i = 0; i < n; ++i) {
    put_double(out, data.y[i]);
    for (Index j = 0; j < p; ++j) {
      out << ',';
      put_double(out, d[j * n + i]);
    }
    out << '\n';
  }
}

void save_dataset(const Dataset& data, const std::string& path, DataFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  if (format == DataFormat::DenseCsv) {
    write_dense_csv(out, data);
  } else {
    write_svmlight(out, data);
  }
  if (!out) throw IoError("error while writing '" + path + "'");
}

Dataset synth_dataset(Index n, Index p, double density, double snr, std::uint64_t seed) {
  if (n < 1 || p < 1) throw ParameterError("synthetic data needs n, p >= 1");
  if (!(density > 0.0) || density > 1.0) throw ParameterError("density must lie in (0, 1]");
  if (!(snr > 0.0)) throw ParameterError("snr must be positive");
  if (n > kMaxDimension || p > kMaxDimension) throw ParameterError("dimensions too large");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  DesignMatrix X = [&] {
    if (density == 1.0) {
      Vector values(n * p);
      for (double& v : values) v = gauss(rng);
      return DesignMatrix::dense(n, p, std::move(values));
    }
    std::vector<Index> col_ptr{0};
    std::vector<Index> rows;
    std::vector<double> vals;
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < n; ++i) {
        if (unif(rng) < density) {
          rows.push_back(i);
          vals.push_back(gauss(rng));
        }
      }
      col_ptr.push_back(rows.size());
    }
    return DesignMatrix::sparse(n, p, std::move(col_ptr), std::move(rows), std::move(vals));
  }();

  const Index k = std::min(p, std::max<Index>(1, n / 10));
  std::vector<Index> perm(p);
  for (Index j = 0; j < p; ++j) perm[j] = j;
  for (Index s = 0; s < k; ++s) {
    std::uniform_int_distribution<Index> pick(s, p - 1);
    std::swap(perm[s], perm[pick(rng)]);
  }
  Vector beta(p, 0.0);
  for (Index s = 0; s < k; ++s) {
    const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
    beta[perm[s]] = sign * (1.0 + std::abs(gauss(rng)));
  }

  Vector y = X.multiply(beta);
  if (std::isfinite(snr)) {
    double power = 0.0;
    for (double v : y) power += v * v;
    const double sigma = std::sqrt(power / static_cast<double>(n) / snr);
    for (double& v : y) v += sigma * gauss(rng);
  }
  return Dataset{std::move(X), std::move(y), std::move(beta)};
}

Dataset normalize_columns(const Dataset& data) {
  const DesignMatrix& X = data.X;
  if (X.has_tail()) throw ParameterError("cannot normalize an augmented design");
  const Index p = X.cols();
  Vector scale(p, 1.0);
  for (Index j = 0; j < p; ++j) {
    if (!X.is_zero_column(j)) scale[j] = 1.0 / X.col_norm(j);
  }
  Dataset out{X, data.y, data.planted};
  if (X.is_sparse()) {
    const auto ptr = X.csc_col_ptr();
    std::vector<double> vals(X.csc_values().begin(), X.csc_values().end());
    for (Index j = 0; j < p; ++j) {
      for (Index k = ptr[j]; k < ptr[j + 1]; ++k) vals[k] *= scale[j];
    }
    out.X = DesignMatrix::sparse(X.rows(), p, {ptr.begin(), ptr.end()},
                                 {X.csc_row_idx().begin(), X.csc_row_idx().end()},
                                 std::move(vals));
  } else {
    Vector vals(X.dense_values().begin(), X.dense_values().end());
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < X.rows(); ++i) vals[j * X.rows() + i] *= scale[j];
    }
    out.X = DesignMatrix::dense(X.rows(), p, std::move(vals));
  }
  if (out.planted) {
    for (Index j = 0; j < p; ++j) (*out.planted)[j] /= scale[j];
  }
  return out;
}

}  // namespace gapsafe
