#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "targetbench/error.hpp"

namespace targetbench {

// Row-major dense matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::vector<double> row(std::size_t i) const {
    return std::vector<double>(data.begin() + static_cast<std::ptrdiff_t>(i * cols),
                               data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
  }
};

enum class OutcomeDirection { higher_is_better, lower_is_better };

struct Dataset {
  std::string name;
  Matrix X;                       // n x d features
  std::vector<int> W;             // treatment indicator, 0/1
  std::vector<double> Y;          // observed outcome
  std::optional<double> known_propensity;  // design treatment probability
  OutcomeDirection outcome_direction = OutcomeDirection::higher_is_better;
  std::vector<std::string> feature_names;  // size d, used for CSV round-trips

  std::size_t n() const { return X.rows; }
  std::size_t d() const { return X.cols; }

  std::size_t treated_count() const;
  std::size_t control_count() const;

  // Copies the rows at `indices`, in the given order.
  Dataset subset(const std::vector<std::size_t>& indices) const;

  // Throws unless both arms are non-empty and shapes line up.
  void require_estimable() const;
};

struct SplitPair {
  Dataset train;
  Dataset eval;
  std::uint64_t seed = 0;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class RowError : public Error {
 public:
  using Error::Error;
};

struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string treatment_column;
  std::string outcome_column;
  char delimiter = ',';
};

// Loads a headered CSV. Feature columns whose cells all parse as finite
// numbers stay numeric; any other feature column is treated as categorical and
// one-hot encoded, with category order fixed by first appearance in the file.
// Empty or unparseable cells abort the load with the offending row named.
Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 OutcomeDirection outcome_direction);

// Writes features (stored names), then the treatment and outcome columns.
// Numbers are printed with shortest round-trip formatting, so a load of the
// written file reproduces X, W, Y bit for bit.
void write_csv(const Dataset& ds, const std::string& path,
               const std::string& treatment_column = "W",
               const std::string& outcome_column = "Y");

// Seeded random partition into train/eval with |train| = round(fraction * n).
// Both splits must keep at least one treated and one control row; the
// permutation is redrawn up to 100 times before giving up. Row order inside
// each split follows the parent dataset.
SplitPair split_dataset(const Dataset& ds, double train_fraction,
                        std::uint64_t seed);

}  // namespace targetbench
