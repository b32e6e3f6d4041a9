#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace fpsolve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

enum class SchemeOrder : int { Second = 2, Fourth = 4 };
enum class ModelKind { Model1, Model2 };

inline int order_value(SchemeOrder o) { return static_cast<int>(o); }

// Invalid grid/problem/run configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A sampled invariant measure fell below its positivity floor.
struct PositivityError : std::runtime_error {
  explicit PositivityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fpsolve
