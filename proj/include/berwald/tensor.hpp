#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace berwald {

class TensorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMetricError : public TensorError {
 public:
  using TensorError::TensorError;
};

/// A chart point; coordinate names live in the enclosing spec.
struct Point {
  Eigen::VectorXd coords;
  int dim() const { return static_cast<int>(coords.size()); }
};

enum class Slot : unsigned char { Up, Down };

/// Dense multi-index numeric tensor at a point. Row-major strides, rank up
/// to 4, every index running over the same chart dimension.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, std::vector<Slot> valence);

  static Tensor from_scalar(double v);
  static Tensor from_vector(const Eigen::VectorXd& v, Slot slot);
  static Tensor from_matrix(const Eigen::MatrixXd& m, Slot s0, Slot s1);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(valence_.size()); }
  const std::vector<Slot>& valence() const { return valence_; }

  double& operator()(std::span<const int> idx);
  double operator()(std::span<const int> idx) const;

  template <class... I>
  double& at(I... idx) {
    const int buf[] = {static_cast<int>(idx)...};
    return (*this)(std::span<const int>(buf, sizeof...(idx)));
  }
  template <class... I>
  double at(I... idx) const {
    const int buf[] = {static_cast<int>(idx)...};
    return (*this)(std::span<const int>(buf, sizeof...(idx)));
  }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  double max_abs() const { return data_.size() ? data_.cwiseAbs().maxCoeff() : 0.0; }

  Eigen::MatrixXd as_matrix() const;  // rank 2
  Eigen::VectorXd as_vector() const;  // rank 1
  double as_scalar() const;           // rank 0

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);

 private:
  int dim_ = 0;
  std::vector<Slot> valence_;
  Eigen::VectorXd data_;
};

/// Einstein contraction of one up slot against one down slot.
Tensor contract(const Tensor& t, int slot_a, int slot_b);

/// Flips the kind of `slot` using a_ij (lowering) or a^ij (raising).
Tensor raise_lower(const Tensor& t, const Tensor& metric, const Tensor& inverse, int slot);

Tensor sym(const Tensor& t);   // rank 2, matching slots
Tensor skew(const Tensor& t);  // rank 2, matching slots

/// Inverse by partial-pivot LU; throws SingularMetricError when the scaled
/// determinant falls below 1e-12.
Eigen::MatrixXd invert_metric(const Eigen::MatrixXd& metric);

}  // namespace berwald
