#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "teleportsim/errors.hpp"

namespace tsim {

using cplx = std::complex<double>;

constexpr double kDefaultTol = 1e-12;

// Dense complex square matrix, row-major, dim in {2, 4, 8} for everything
// this library builds (the ctor accepts any small dim so tests can probe).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {
    if (dim < 1) throw DomainError("ComplexMatrix: dim must be positive");
  }
  ComplexMatrix(int dim, std::vector<cplx> entries) : dim_(dim), a_(std::move(entries)) {
    if (dim < 1 || a_.size() != static_cast<std::size_t>(dim) * dim)
      throw DomainError("ComplexMatrix: entries count must equal dim^2");
  }

  static ComplexMatrix identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
  }

  int dim() const { return dim_; }
  cplx& at(int r, int c) { return a_[static_cast<std::size_t>(r) * dim_ + c]; }
  const cplx& at(int r, int c) const { return a_[static_cast<std::size_t>(r) * dim_ + c]; }
  const std::vector<cplx>& entries() const { return a_; }

  ComplexMatrix operator+(const ComplexMatrix& o) const {
    check_same_dim(o);
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
  }
  ComplexMatrix operator-(const ComplexMatrix& o) const {
    check_same_dim(o);
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }
  ComplexMatrix operator*(const ComplexMatrix& o) const {
    check_same_dim(o);
    ComplexMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < dim_; ++k) {
        const cplx aik = at(i, k);
        if (aik == cplx{}) continue;
        for (int j = 0; j < dim_; ++j) r.at(i, j) += aik * o.at(k, j);
      }
    return r;
  }
  ComplexMatrix operator*(cplx s) const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
    return r;
  }
  friend ComplexMatrix operator*(cplx s, const ComplexMatrix& m) { return m * s; }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r.at(i, j) = std::conj(at(j, i));
    return r;
  }
  ComplexMatrix conjugate() const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = std::conj(a_[i]);
    return r;
  }

  cplx trace() const {
    cplx t = 0;
    for (int i = 0; i < dim_; ++i) t += at(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
  }
  double max_abs_diff(const ComplexMatrix& o) const {
    check_same_dim(o);
    double m = 0;
    for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - o.a_[i]));
    return m;
  }
  bool approx_equal(const ComplexMatrix& o, double tol = kDefaultTol) const {
    return dim_ == o.dim_ && max_abs_diff(o) <= tol;
  }

  bool is_hermitian(double tol = 1e-10) const {
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j)
        if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
    return true;
  }

  static ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.dim_ * b.dim_);
    for (int i = 0; i < a.dim_; ++i)
      for (int j = 0; j < a.dim_; ++j) {
        const cplx aij = a.at(i, j);
        if (aij == cplx{}) continue;
        for (int k = 0; k < b.dim_; ++k)
          for (int l = 0; l < b.dim_; ++l)
            r.at(i * b.dim_ + k, j * b.dim_ + l) = aij * b.at(k, l);
      }
    return r;
  }

 private:
  void check_same_dim(const ComplexMatrix& o) const {
    if (dim_ != o.dim_) throw DomainError("ComplexMatrix: dimension mismatch");
  }
  int dim_ = 0;
  std::vector<cplx> a_;
};

// Normalized state vector.
class PureState {
 public:
  PureState() = default;
  PureState(int dim, std::vector<cplx> amplitudes, bool renormalize = false)
      : dim_(dim), a_(std::move(amplitudes)) {
    if (dim < 1 || a_.size() != static_cast<std::size_t>(dim))
      throw DomainError("PureState: amplitude count must equal dim");
    double n2 = 0;
    for (const auto& v : a_) n2 += std::norm(v);
    if (renormalize) {
      if (n2 <= 0) throw DomainError("PureState: cannot normalize zero vector");
      const double inv = 1.0 / std::sqrt(n2);
      for (auto& v : a_) v *= inv;
    } else if (std::abs(std::sqrt(n2) - 1.0) > 1e-12) {
      throw DomainError("PureState: norm must be 1 within 1e-12");
    }
  }

  int dim() const { return dim_; }
  const cplx& amp(int i) const { return a_[static_cast<std::size_t>(i)]; }
  const std::vector<cplx>& amplitudes() const { return a_; }

  cplx inner(const PureState& o) const {  // <this|o>
    if (dim_ != o.dim_) throw DomainError("PureState: dimension mismatch");
    cplx s = 0;
    for (int i = 0; i < dim_; ++i) s += std::conj(a_[i]) * o.a_[i];
    return s;
  }

  ComplexMatrix outer() const {  // |psi><psi|
    ComplexMatrix m(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m.at(i, j) = a_[i] * std::conj(a_[j]);
    return m;
  }

  // M |psi>, renormalized; throws if M annihilates the state.
  PureState apply(const ComplexMatrix& m) const {
    if (m.dim() != dim_) throw DomainError("PureState: dimension mismatch");
    std::vector<cplx> out(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
      cplx s = 0;
      for (int j = 0; j < dim_; ++j) s += m.at(i, j) * a_[j];
      out[static_cast<std::size_t>(i)] = s;
    }
    return PureState(dim_, std::move(out), /*renormalize=*/true);
  }

 private:
  int dim_ = 0;
  std::vector<cplx> a_;
};

struct EigenSystem {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns match values
};

// Cyclic complex Jacobi diagonalization. Deterministic sweep order and
// deterministic descending eigenvalue ordering; plenty for dim <= 8.
inline EigenSystem hermitian_eigensystem(const ComplexMatrix& input) {
  const int n = input.dim();
  if (!input.is_hermitian(1e-8)) throw DomainError("hermitian_eigensystem: matrix not Hermitian");
  ComplexMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a.at(i, j) = 0.5 * (input.at(i, j) + std::conj(input.at(j, i)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_norm = [&]() {
    double s = 0;
    for (int r = 0; r < n; ++r)
      for (int c = r + 1; c < n; ++c) s += std::norm(a.at(r, c));
    return std::sqrt(s);
  };

  const double scale = std::max(a.max_abs(), 1e-300);
  for (int sweep = 0; sweep < 100 && off_norm() > 1e-15 * scale * n; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx b = a.at(p, q);
        const double ab = std::abs(b);
        if (ab <= 1e-300) continue;
        const cplx phase = b / ab;  // e^{i phi}
        const double app = a.at(p, p).real();
        const double aqq = a.at(q, q).real();
        const double tau = (aqq - app) / (2.0 * ab);
        double t;
        if (tau >= 0)
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        else
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = identity except the (p,q) plane:
        //   J(p,p)=c, J(p,q)=s, J(q,p)=-s*conj(phase), J(q,q)=c*conj(phase)
        const cplx jqp = -s * std::conj(phase);
        const cplx jqq = c * std::conj(phase);
        for (int k = 0; k < n; ++k) {  // A <- A J
          const cplx akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = akp * c + akq * jqp;
          a.at(k, q) = akp * s + akq * jqq;
        }
        for (int k = 0; k < n; ++k) {  // A <- J^dag A
          const cplx apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk + std::conj(jqp) * aqk;
          a.at(q, k) = s * apk + std::conj(jqq) * aqk;
        }
        a.at(p, q) = 0;
        a.at(q, p) = 0;
        for (int k = 0; k < n; ++k) {  // V <- V J
          const cplx vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = vkp * c + vkq * jqp;
          v.at(k, q) = vkp * s + vkq * jqq;
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a.at(x, x).real() > a.at(y, y).real(); });
  EigenSystem es;
  es.values.resize(static_cast<std::size_t>(n));
  es.vectors = ComplexMatrix(n);
  for (int c = 0; c < n; ++c) {
    es.values[static_cast<std::size_t>(c)] = a.at(order[c], order[c]).real();
    for (int r = 0; r < n; ++r) es.vectors.at(r, c) = v.at(r, order[c]);
  }
  return es;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  return hermitian_eigensystem(m).values;
}

// JSON interchange format: {dim, re: [...], im: [...]}, row-major.
inline void to_json(nlohmann::json& j, const ComplexMatrix& m) {
  std::vector<double> re, im;
  re.reserve(m.entries().size());
  im.reserve(m.entries().size());
  for (const auto& v : m.entries()) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j = nlohmann::json{{"dim", m.dim()}, {"re", re}, {"im", im}};
}

inline void from_json(const nlohmann::json& j, ComplexMatrix& m) {
  const int dim = j.at("dim").get<int>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size() || re.size() != static_cast<std::size_t>(dim) * dim)
    throw DataError("matrix JSON: re/im length must equal dim^2");
  std::vector<cplx> e(re.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = cplx(re[i], im[i]);
  m = ComplexMatrix(dim, std::move(e));
}

}  // namespace tsim
