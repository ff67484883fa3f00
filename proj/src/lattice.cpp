#include "mixdil/lattice.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mixdil/errors.hpp"

namespace mixdil {
namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < -static_cast<__int128>(INT64_MAX)) throw std::overflow_error("integer matrix overflow");
  return static_cast<std::int64_t>(v);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// col_dst -= q * col_src on both the working matrix and the transform.
void col_axpy(IntMatrix& a, IntMatrix& u, Eigen::Index dst, Eigen::Index src, std::int64_t q) {
  if (q == 0) return;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    a(r, dst) = narrow(static_cast<__int128>(a(r, dst)) - static_cast<__int128>(q) * a(r, src));
  for (Eigen::Index r = 0; r < u.rows(); ++r)
    u(r, dst) = narrow(static_cast<__int128>(u(r, dst)) - static_cast<__int128>(q) * u(r, src));
}

IntMatrix reverse_rows(const IntMatrix& a) { return a.colwise().reverse(); }

}  // namespace

IntMatrix identity_matrix(int dim) { return IntMatrix::Identity(dim, dim); }

std::int64_t int_det(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return 1;
  std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m[i][j] = a(i, j);
  __int128 prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      Eigen::Index p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    }
    prev = m[k][k];
  }
  return narrow(sign * m[n - 1][n - 1]);
}

IntMatrix adjugate(const IntMatrix& a) {
  const Eigen::Index n = a.rows();
  IntMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      IntMatrix minor(n - 1, n - 1);
      for (Eigen::Index r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = a(r, c);
        }
        ++mr;
      }
      const std::int64_t cof = ((i + j) % 2 == 0 ? 1 : -1) * int_det(minor);
      adj(j, i) = cof;
    }
  }
  return adj;
}

IntMatrix int_product(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
  IntMatrix c(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      __int128 acc = 0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += static_cast<__int128>(a(i, k)) * b(k, j);
      c(i, j) = narrow(acc);
    }
  }
  return c;
}

IntVector int_apply(const IntMatrix& a, const IntVector& x) { return int_product(a, x); }

IntMatrix int_power(const IntMatrix& a, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative matrix power");
  IntMatrix out = identity_matrix(static_cast<int>(a.rows()));
  for (int i = 0; i < exponent; ++i) out = int_product(out, a);
  return out;
}

HermiteForm hnf(const IntMatrix& input) {
  const Eigen::Index d = input.rows();
  const Eigen::Index m = input.cols();
  if (m < d) throw SingularMatrix("hnf: fewer columns than rows");
  IntMatrix a = input;
  IntMatrix u = IntMatrix::Identity(m, m);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (;;) {
      Eigen::Index piv = -1;
      for (Eigen::Index j = i; j < m; ++j) {
        if (a(i, j) != 0 && (piv < 0 || std::abs(a(i, j)) < std::abs(a(i, piv)))) piv = j;
      }
      if (piv < 0) throw SingularMatrix("hnf: matrix does not have full row rank");
      if (piv != i) {
        a.col(i).swap(a.col(piv));
        u.col(i).swap(u.col(piv));
      }
      bool done = true;
      for (Eigen::Index j = i + 1; j < m; ++j) {
        if (a(i, j) == 0) continue;
        col_axpy(a, u, j, i, a(i, j) / a(i, i));
        if (a(i, j) != 0) done = false;
      }
      if (done) break;
    }
    if (a(i, i) < 0) {
      a.col(i) = -a.col(i);
      u.col(i) = -u.col(i);
    }
    for (Eigen::Index j = 0; j < i; ++j) col_axpy(a, u, j, i, floor_div(a(i, j), a(i, i)));
  }
  return {a, u};
}

bool is_expansive(const IntMatrix& m) {
  const Eigen::MatrixXd inv = m.cast<double>().inverse();
  const Eigen::VectorXcd ev = inv.eigenvalues();
  return ev.cwiseAbs().maxCoeff() < 1.0 - 1e-9;
}

DilationMatrix::DilationMatrix(IntMatrix mat) : mat_(std::move(mat)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0) throw DimensionMismatch("dilation matrix must be square");
  det_ = int_det(mat_);
  if (det_ == 0) throw SingularMatrix("dilation matrix is singular");
  if (!is_expansive(mat_)) throw NotExpansive("dilation matrix is not expansive");
  const IntMatrix adj = adjugate(mat_);
  // M^{-T} = adj(M)^T / det
  inv_transpose_.assign(dim(), RationalVector(dim()));
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) inv_transpose_[i][j] = Rational(adj(j, i), det_);
}

bool in_dual_lattice(const IntMatrix& m, const RationalVector& omega) {
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    Rational acc;
    for (Eigen::Index k = 0; k < m.rows(); ++k) acc += Rational(m(k, i)) * omega[k];
    if (!acc.is_integer()) return false;
  }
  return true;
}

CosetSet coset_reps(const DilationMatrix& m) {
  const int d = m.dim();
  const auto ks = quotient_reps(Lattice::integers(d), Lattice(m.matrix().transpose()));
  CosetSet out{m.matrix(), {}};
  for (const auto& k : ks) {
    RationalVector w(d);
    for (int i = 0; i < d; ++i) {
      Rational acc;
      for (int j = 0; j < d; ++j) acc += m.inv_transpose()[i][j] * Rational(k(j));
      w[i] = acc.frac();
    }
    out.reps.push_back(std::move(w));
  }
  std::sort(out.reps.begin(), out.reps.end(), [](const RationalVector& a, const RationalVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
  return out;
}

Lattice::Lattice(const IntMatrix& generators) {
  const HermiteForm f = hnf(generators);
  const Eigen::Index d = generators.rows();
  basis_ = f.H.leftCols(d);
  index_ = 1;
  for (Eigen::Index i = 0; i < d; ++i) index_ = narrow(static_cast<__int128>(index_) * basis_(i, i));
}

Lattice Lattice::integers(int dim) { return Lattice(identity_matrix(dim)); }

bool Lattice::contains(const IntVector& v) const {
  if (v.size() != dim()) throw DimensionMismatch("lattice membership dimension mismatch");
  std::vector<__int128> x(dim());
  for (int i = 0; i < dim(); ++i) {
    __int128 rhs = v(i);
    for (int j = 0; j < i; ++j) rhs -= static_cast<__int128>(basis_(i, j)) * x[j];
    if (rhs % basis_(i, i) != 0) return false;
    x[i] = rhs / basis_(i, i);
  }
  return true;
}

bool Lattice::contains(const Lattice& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("lattice dimension mismatch");
  for (int j = 0; j < dim(); ++j)
    if (!contains(IntVector(other.basis_.col(j)))) return false;
  return true;
}

Lattice intersect(const Lattice& a, const Lattice& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("intersect: lattices of different dimension");
  const int d = a.dim();
  IntMatrix stacked(d, 2 * d);
  stacked << a.basis(), -b.basis();
  const HermiteForm f = hnf(stacked);
  // The trailing d columns of U span the integer kernel of [B1 | -B2].
  const IntMatrix x = f.U.block(0, d, d, d);
  return Lattice(int_product(a.basis(), x));
}

std::vector<IntVector> quotient_reps(const Lattice& coarse, const Lattice& fine) {
  if (coarse.dim() != fine.dim()) throw DimensionMismatch("quotient_reps: dimension mismatch");
  if (!coarse.contains(fine)) throw NotSublattice("quotient_reps: second lattice is not contained in the first");
  const int d = coarse.dim();
  // Coordinates of the fine basis in the coarse basis (forward substitution).
  IntMatrix c(d, d);
  for (int col = 0; col < d; ++col) {
    for (int i = 0; i < d; ++i) {
      __int128 rhs = fine.basis()(i, col);
      for (int j = 0; j < i; ++j) rhs -= static_cast<__int128>(coarse.basis()(i, j)) * c(j, col);
      c(i, col) = narrow(rhs / coarse.basis()(i, i));
    }
  }
  const ResidueBox box{Lattice(c)};
  std::vector<IntVector> reps;
  reps.reserve(static_cast<std::size_t>(box.size()));
  for (std::int64_t n = 0; n < box.size(); ++n) reps.push_back(int_apply(coarse.basis(), box.point(n)));
  std::sort(reps.begin(), reps.end(), [](const IntVector& x, const IntVector& y) {
    const bool xz = x.isZero();
    const bool yz = y.isZero();
    if (xz != yz) return xz;
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  });
  return reps;
}

ResidueBox::ResidueBox(const Lattice& period) : lattice_(period) {
  const int d = period.dim();
  tri_ = hnf(reverse_rows(period.basis())).H.leftCols(d);
  extents_.resize(d);
  for (int i = 0; i < d; ++i) extents_(d - 1 - i) = tri_(i, i);
}

IntVector ResidueBox::reduce(const IntVector& x) const {
  const int d = lattice_.dim();
  IntVector y = x.reverse();
  for (int i = 0; i < d; ++i) {
    const std::int64_t q = floor_div(y(i), tri_(i, i));
    if (q != 0) {
      for (int r = i; r < d; ++r) y(r) = narrow(static_cast<__int128>(y(r)) - static_cast<__int128>(q) * tri_(r, i));
    }
  }
  return y.reverse();
}

std::int64_t ResidueBox::linear(const IntVector& p) const {
  std::int64_t idx = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) idx = idx * extents_(i) + p(i);
  return idx;
}

IntVector ResidueBox::point(std::int64_t linear) const {
  IntVector p(extents_.size());
  for (Eigen::Index i = extents_.size() - 1; i >= 0; --i) {
    p(i) = linear % extents_(i);
    linear /= extents_(i);
  }
  return p;
}

}  // namespace mixdil
