#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "berwald/expr.hpp"
#include "berwald/tensor.hpp"

namespace berwald {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chart metadata shared by the field specs: dimension, coordinate names,
/// and fixed parameter values baked into the component expressions.
struct ChartInfo {
  int dim = 0;
  std::vector<std::string> coords;
  SymbolValues params;
};

/// Metric field a_ij(x) with symbolic components (symmetric, full storage).
struct MetricSpec {
  ChartInfo chart;
  std::vector<Expr> components;  // dim*dim, row-major
  std::optional<std::vector<int>> signature_hint;

  const Expr& component(int i, int j) const {
    return components[static_cast<std::size_t>(i * chart.dim + j)];
  }
  Expr& component(int i, int j) {
    return components[static_cast<std::size_t>(i * chart.dim + j)];
  }

  Eigen::MatrixXd evaluate(const Point& p) const;
};

/// One-form field b_i(x).
struct OneFormSpec {
  ChartInfo chart;
  std::vector<Expr> components;  // dim

  Eigen::VectorXd evaluate(const Point& p) const;
};

/// Builds a MetricSpec from the upper triangle (entries given as (i, j, expr)
/// with i <= j; omitted entries are zero) and checks numeric nondegeneracy is
/// left to the point of use. Component symmetry holds by construction.
MetricSpec make_metric_spec(ChartInfo chart,
                            const std::vector<std::tuple<int, int, Expr>>& upper,
                            std::optional<std::vector<int>> signature_hint = std::nullopt);

/// Validates that a full component matrix is symmetric: either identical
/// nodes or equal values at 100 random points to 1e-12.
void check_metric_symmetry(const MetricSpec& metric);

SymbolValues bind_coords(const ChartInfo& chart, const Point& p);

/// True when every component expression evaluates, the matrix is symmetric
/// and nondegenerate at p.
bool lorentzian_signature(const Eigen::MatrixXd& metric_at_point);

}  // namespace berwald
