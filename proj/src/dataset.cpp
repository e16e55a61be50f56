#include "targetbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "targetbench/format.hpp"
#include "targetbench/rng.hpp"

namespace targetbench {

std::size_t Dataset::treated_count() const {
  return static_cast<std::size_t>(std::count(W.begin(), W.end(), 1));
}

std::size_t Dataset::control_count() const {
  return static_cast<std::size_t>(std::count(W.begin(), W.end(), 0));
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.name = name;
  out.known_propensity = known_propensity;
  out.outcome_direction = outcome_direction;
  out.feature_names = feature_names;
  out.X = Matrix(indices.size(), X.cols);
  out.W.resize(indices.size());
  out.Y.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices[i];
    if (src >= n()) fail("subset: row index out of range");
    for (std::size_t j = 0; j < X.cols; ++j) out.X(i, j) = X(src, j);
    out.W[i] = W[src];
    out.Y[i] = Y[src];
  }
  return out;
}

void Dataset::require_estimable() const {
  if (n() == 0) fail("dataset '" + name + "' has no rows");
  if (W.size() != n() || Y.size() != n())
    fail("dataset '" + name + "' has mismatched column lengths");
  if (treated_count() == 0 || control_count() == 0)
    fail("dataset '" + name + "' needs both treated and control rows");
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

std::string row_label(std::size_t data_row) {
  return "row " + std::to_string(data_row + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 OutcomeDirection outcome_direction) {
  std::ifstream in(path);
  if (!in) fail("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty CSV file: " + path);
  const std::vector<std::string> header = split_line(line, schema.delimiter);

  std::unordered_map<std::string, std::size_t> col_index;
  for (std::size_t i = 0; i < header.size(); ++i) col_index[header[i]] = i;

  auto require_column = [&](const std::string& name) -> std::size_t {
    auto it = col_index.find(name);
    if (it == col_index.end())
      throw SchemaError("column '" + name + "' not found in " + path);
    return it->second;
  };

  std::vector<std::size_t> feature_idx;
  feature_idx.reserve(schema.feature_columns.size());
  for (const auto& name : schema.feature_columns)
    feature_idx.push_back(require_column(name));
  const std::size_t w_idx = require_column(schema.treatment_column);
  const std::size_t y_idx = require_column(schema.outcome_column);

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
    auto cells = split_line(line, schema.delimiter);
    if (cells.size() != header.size())
      throw RowError(row_label(rows.size()) + ": expected " +
                     std::to_string(header.size()) + " cells, got " +
                     std::to_string(cells.size()));
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw SchemaError("CSV file has no data rows: " + path);
  const std::size_t n = rows.size();

  // Decide numeric vs categorical per feature column. A column is numeric only
  // if every cell parses as a finite number; empty cells are always an error.
  struct ColumnPlan {
    bool categorical = false;
    std::vector<std::string> categories;  // first-appearance order
  };
  std::vector<ColumnPlan> plans(feature_idx.size());
  for (std::size_t c = 0; c < feature_idx.size(); ++c) {
    const std::size_t col = feature_idx[c];
    for (std::size_t r = 0; r < n; ++r) {
      const std::string& cell = rows[r][col];
      if (cell.empty())
        throw RowError(row_label(r) + ": missing value in column '" +
                       schema.feature_columns[c] + "'");
      double v;
      if (!parse_double(cell, v)) {
        plans[c].categorical = true;
      } else if (!std::isfinite(v)) {
        throw RowError(row_label(r) + ": non-finite value in column '" +
                       schema.feature_columns[c] + "'");
      }
    }
    if (plans[c].categorical) {
      std::unordered_map<std::string, bool> seen;
      for (std::size_t r = 0; r < n; ++r) {
        const std::string& cell = rows[r][col];
        if (!seen.count(cell)) {
          seen[cell] = true;
          plans[c].categories.push_back(cell);
        }
      }
    }
  }

  std::vector<std::string> out_names;
  for (std::size_t c = 0; c < feature_idx.size(); ++c) {
    if (!plans[c].categorical) {
      out_names.push_back(schema.feature_columns[c]);
    } else {
      for (const auto& cat : plans[c].categories)
        out_names.push_back(schema.feature_columns[c] + "=" + cat);
    }
  }

  Dataset ds;
  ds.name = path;
  ds.outcome_direction = outcome_direction;
  ds.feature_names = out_names;
  ds.X = Matrix(n, out_names.size());
  ds.W.resize(n);
  ds.Y.resize(n);

  for (std::size_t r = 0; r < n; ++r) {
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < feature_idx.size(); ++c) {
      const std::string& cell = rows[r][feature_idx[c]];
      if (!plans[c].categorical) {
        double v;
        parse_double(cell, v);
        ds.X(r, out_col++) = v;
      } else {
        for (const auto& cat : plans[c].categories)
          ds.X(r, out_col++) = (cell == cat) ? 1.0 : 0.0;
      }
    }

    const std::string& w_cell = rows[r][w_idx];
    double w_val;
    if (!parse_double(w_cell, w_val) || (w_val != 0.0 && w_val != 1.0))
      throw RowError(row_label(r) + ": treatment value '" + w_cell +
                     "' is not 0 or 1");
    ds.W[r] = static_cast<int>(w_val);

    const std::string& y_cell = rows[r][y_idx];
    double y_val;
    if (!parse_double(y_cell, y_val) || !std::isfinite(y_val))
      throw RowError(row_label(r) + ": outcome value '" + y_cell +
                     "' does not parse as a finite number");
    ds.Y[r] = y_val;
  }
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path,
               const std::string& treatment_column,
               const std::string& outcome_column) {
  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  for (std::size_t j = 0; j < ds.d(); ++j) {
    const std::string& name =
        j < ds.feature_names.size() ? ds.feature_names[j] : "x" + std::to_string(j);
    out << name << ',';
  }
  out << treatment_column << ',' << outcome_column << '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j) out << format_double(ds.X(i, j)) << ',';
    out << ds.W[i] << ',' << format_double(ds.Y[i]) << '\n';
  }
  if (!out) fail("failed writing CSV: " + path);
}

SplitPair split_dataset(const Dataset& ds, double train_fraction,
                        std::uint64_t seed) {
  if (ds.n() < 4) fail("split_dataset needs at least 4 rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    fail("train_fraction must lie in (0, 1)");
  const std::size_t n = ds.n();
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n)
    fail("split_dataset: requested fraction leaves an empty split");

  RandomStream rng(derive_seed(seed, seed_tag::split));
  std::vector<std::size_t> perm(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);

    std::vector<std::size_t> train_idx(perm.begin(),
                                       perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> eval_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                                      perm.end());
    auto arms_ok = [&](const std::vector<std::size_t>& idx) {
      bool treated = false, control = false;
      for (std::size_t i : idx) {
        if (ds.W[i] == 1) treated = true;
        else control = true;
      }
      return treated && control;
    };
    if (!arms_ok(train_idx) || !arms_ok(eval_idx)) continue;

    std::sort(train_idx.begin(), train_idx.end());
    std::sort(eval_idx.begin(), eval_idx.end());
    SplitPair pair;
    pair.train = ds.subset(train_idx);
    pair.eval = ds.subset(eval_idx);
    pair.seed = seed;
    return pair;
  }
  fail("split_dataset: could not produce a split with both arms on each side");
}

}  // namespace targetbench
