#include "berwald/tensor.hpp"

#include <cmath>

namespace berwald {

namespace {

Eigen::Index pow_int(int base, int exp) {
  Eigen::Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

Tensor::Tensor(int dim, std::vector<Slot> valence)
    : dim_(dim), valence_(std::move(valence)) {
  if (dim_ < 1) throw TensorError("tensor dimension must be positive");
  if (valence_.size() > 4) throw TensorError("tensor rank must be at most 4");
  data_ = Eigen::VectorXd::Zero(pow_int(dim_, static_cast<int>(valence_.size())));
}

Tensor Tensor::from_scalar(double v) {
  Tensor t(1, {});
  t.dim_ = 1;
  t.data_.resize(1);
  t.data_[0] = v;
  return t;
}

Tensor Tensor::from_vector(const Eigen::VectorXd& v, Slot slot) {
  Tensor t(static_cast<int>(v.size()), {slot});
  t.data_ = v;
  return t;
}

Tensor Tensor::from_matrix(const Eigen::MatrixXd& m, Slot s0, Slot s1) {
  if (m.rows() != m.cols()) throw TensorError("tensor matrix must be square");
  Tensor t(static_cast<int>(m.rows()), {s0, s1});
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) t.at(i, j) = m(i, j);
  return t;
}

double& Tensor::operator()(std::span<const int> idx) {
  return const_cast<double&>(static_cast<const Tensor&>(*this)(idx));
}

double Tensor::operator()(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank()) throw TensorError("index count does not match rank");
  Eigen::Index flat = 0;
  for (int k = 0; k < rank(); ++k) {
    if (idx[static_cast<std::size_t>(k)] < 0 || idx[static_cast<std::size_t>(k)] >= dim_)
      throw TensorError("tensor index out of range");
    flat = flat * dim_ + idx[static_cast<std::size_t>(k)];
  }
  return data_[flat];
}

Eigen::MatrixXd Tensor::as_matrix() const {
  if (rank() != 2) throw TensorError("as_matrix requires rank 2");
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = at(i, j);
  return m;
}

Eigen::VectorXd Tensor::as_vector() const {
  if (rank() != 1) throw TensorError("as_vector requires rank 1");
  return data_;
}

double Tensor::as_scalar() const {
  if (rank() != 0) throw TensorError("as_scalar requires rank 0");
  return data_[0];
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (dim_ != other.dim_ || valence_ != other.valence_)
    throw TensorError("tensor shape mismatch in +=");
  data_ += other.data_;
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (dim_ != other.dim_ || valence_ != other.valence_)
    throw TensorError("tensor shape mismatch in -=");
  data_ -= other.data_;
  return *this;
}

Tensor contract(const Tensor& t, int slot_a, int slot_b) {
  const int r = t.rank();
  if (r < 2) throw TensorError("contract requires rank >= 2");
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= r || slot_b >= r)
    throw TensorError("contract: invalid slot pair");
  const Slot ka = t.valence()[static_cast<std::size_t>(slot_a)];
  const Slot kb = t.valence()[static_cast<std::size_t>(slot_b)];
  if (ka == kb) throw TensorError("contract: slots must pair one up with one down");

  const int n = t.dim();
  std::vector<Slot> out_valence;
  for (int k = 0; k < r; ++k)
    if (k != slot_a && k != slot_b) out_valence.push_back(t.valence()[static_cast<std::size_t>(k)]);

  if (out_valence.empty()) {
    std::vector<int> in_idx(2, 0);
    double sum = 0.0;
    for (int s = 0; s < n; ++s) {
      in_idx[0] = s;
      in_idx[1] = s;
      sum += t(in_idx);
    }
    return Tensor::from_scalar(sum);
  }

  Tensor out(n, out_valence);
  std::vector<int> out_idx(static_cast<std::size_t>(out.rank()), 0);
  std::vector<int> in_idx(static_cast<std::size_t>(r), 0);
  const Eigen::Index total = out.data().size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    for (int k = out.rank() - 1; k >= 0; --k) {
      out_idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % n);
      rem /= n;
    }
    int pos = 0;
    for (int k = 0; k < r; ++k) {
      if (k == slot_a || k == slot_b) continue;
      in_idx[static_cast<std::size_t>(k)] = out_idx[static_cast<std::size_t>(pos++)];
    }
    double sum = 0.0;
    for (int s = 0; s < n; ++s) {
      in_idx[static_cast<std::size_t>(slot_a)] = s;
      in_idx[static_cast<std::size_t>(slot_b)] = s;
      sum += t(in_idx);
    }
    out.data()[flat] = sum;
  }
  return out;
}

Tensor raise_lower(const Tensor& t, const Tensor& metric, const Tensor& inverse, int slot) {
  const int r = t.rank();
  if (slot < 0 || slot >= r) throw TensorError("raise_lower: slot out of range");
  if (metric.rank() != 2 || inverse.rank() != 2)
    throw TensorError("raise_lower: metric and inverse must be rank 2");
  const int n = t.dim();
  const Slot kind = t.valence()[static_cast<std::size_t>(slot)];
  // Lowering contracts with a_ij, raising with a^ij.
  const Tensor& g = (kind == Slot::Up) ? metric : inverse;

  std::vector<Slot> out_valence = t.valence();
  out_valence[static_cast<std::size_t>(slot)] = (kind == Slot::Up) ? Slot::Down : Slot::Up;
  Tensor out(n, out_valence);

  std::vector<int> idx(static_cast<std::size_t>(r), 0);
  std::vector<int> src(static_cast<std::size_t>(r), 0);
  const Eigen::Index total = out.data().size();
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    for (int k = r - 1; k >= 0; --k) {
      idx[static_cast<std::size_t>(k)] = static_cast<int>(rem % n);
      rem /= n;
    }
    src = idx;
    double sum = 0.0;
    for (int s = 0; s < n; ++s) {
      src[static_cast<std::size_t>(slot)] = s;
      sum += g.at(idx[static_cast<std::size_t>(slot)], s) * t(src);
    }
    out.data()[flat] = sum;
  }
  return out;
}

namespace {

Tensor sym_or_skew(const Tensor& t, double sign) {
  if (t.rank() != 2) throw TensorError("sym/skew require rank 2");
  if (t.valence()[0] != t.valence()[1])
    throw TensorError("sym/skew require both slots of the same kind");
  Tensor out(t.dim(), t.valence());
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j)
      out.at(i, j) = 0.5 * (t.at(i, j) + sign * t.at(j, i));
  return out;
}

}  // namespace

Tensor sym(const Tensor& t) { return sym_or_skew(t, 1.0); }
Tensor skew(const Tensor& t) { return sym_or_skew(t, -1.0); }

Eigen::MatrixXd invert_metric(const Eigen::MatrixXd& metric) {
  const int n = static_cast<int>(metric.rows());
  const double scale = metric.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw SingularMetricError("metric is identically zero");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(metric);
  const double det = lu.determinant();
  if (std::abs(det) < 1e-12 * std::pow(scale, n))
    throw SingularMetricError("metric is singular (scaled determinant below 1e-12)");
  return lu.inverse();
}

}  // namespace berwald
