#include "wulffgrid/lattice.hpp"

#include "wulffgrid/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wulffgrid {

namespace {

using big = boost::multiprecision::cpp_int;
using BigMat = std::vector<std::vector<big>>;

big floor_div(const big& a, const big& b)
{
    big q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long long floor_div(long long a, long long b)
{
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

BigMat to_big(const IMat& m)
{
    BigMat out(m.rows(), std::vector<big>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

long long narrow(const big& x)
{
    if (x > std::numeric_limits<long long>::max() || x < std::numeric_limits<long long>::min())
        throw std::overflow_error("lattice entry exceeds 64 bits");
    return x.convert_to<long long>();
}

// Row HNF with the unimodular transform: u * m_in = h.  Returns the rank.
int hermite_transform(BigMat& h, BigMat& u)
{
    const std::size_t n = h.size();
    const std::size_t d = n ? h[0].size() : 0;
    u.assign(n, std::vector<big>(n, 0));
    for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
    auto sub = [&](std::size_t dst, std::size_t src, const big& q) {
        if (q == 0) return;
        for (std::size_t j = 0; j < d; ++j) h[dst][j] -= q * h[src][j];
        for (std::size_t j = 0; j < n; ++j) u[dst][j] -= q * u[src][j];
    };
    std::size_t row = 0;
    for (std::size_t col = 0; col < d && row < n; ++col) {
        for (;;) {
            std::size_t piv = n;
            for (std::size_t i = row; i < n; ++i)
                if (h[i][col] != 0 && (piv == n || abs(h[i][col]) < abs(h[piv][col]))) piv = i;
            if (piv == n) break;
            std::swap(h[row], h[piv]);
            std::swap(u[row], u[piv]);
            bool clean = true;
            for (std::size_t i = row + 1; i < n; ++i) {
                if (h[i][col] == 0) continue;
                sub(i, row, floor_div(h[i][col], h[row][col]));
                if (h[i][col] != 0) clean = false;
            }
            if (clean) break;
        }
        if (h[row][col] == 0) continue;
        if (h[row][col] < 0) {
            for (auto& x : h[row]) x = -x;
            for (auto& x : u[row]) x = -x;
        }
        for (std::size_t i = 0; i < row; ++i) sub(i, row, floor_div(h[i][col], h[row][col]));
        ++row;
    }
    return static_cast<int>(row);
}

}  // namespace

IVec ivec(std::initializer_list<long long> c)
{
    IVec v(static_cast<Eigen::Index>(c.size()));
    Eigen::Index i = 0;
    for (long long x : c) v(i++) = x;
    return v;
}

Vec to_real(const IVec& v) { return v.cast<double>(); }

long long exact_det(const IMat& m)
{
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    BigMat a = to_big(m);
    big prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && a[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(a[k], a[s]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * narrow(a[n - 1][n - 1]);
}

IMat adjugate(const IMat& m)
{
    const Eigen::Index d = m.rows();
    IMat adj(d, d);
    if (d == 1) {
        adj(0, 0) = 1;
        return adj;
    }
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            IMat minor(d - 1, d - 1);
            for (Eigen::Index r = 0, rr = 0; r < d; ++r) {
                if (r == j) continue;
                for (Eigen::Index c = 0, cc = 0; c < d; ++c)
                    if (c != i) minor(rr, cc++) = m(r, c);
                ++rr;
            }
            adj(i, j) = (((i + j) % 2) ? -1 : 1) * exact_det(minor);
        }
    return adj;
}

IMat hermite_rows(const IMat& m)
{
    BigMat h = to_big(m), u;
    const int rank = hermite_transform(h, u);
    IMat out(rank, m.cols());
    for (int i = 0; i < rank; ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = narrow(h[i][j]);
    return out;
}

LatticeReduction lattice_reduce(const std::vector<IVec>& vectors)
{
    LatticeReduction r;
    if (vectors.empty()) return r;
    const Eigen::Index d = vectors[0].size();
    IMat rows(static_cast<Eigen::Index>(vectors.size()), d);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != d) throw DimensionMismatch("lattice_reduce: mixed dimensions");
        rows.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
    }
    const IMat h = hermite_rows(rows);
    r.rank = static_cast<int>(h.rows());
    r.basis = h.transpose();
    if (r.rank == d)
        r.det = std::abs(static_cast<double>(exact_det(r.basis)));
    else if (r.rank > 0) {
        const Mat b = r.basis.cast<double>();
        r.det = std::sqrt((b.transpose() * b).determinant());
    }
    return r;
}

IVec integer_combination(const std::vector<IVec>& generators, const IVec& target)
{
    const std::size_t n = generators.size();
    const std::size_t d = static_cast<std::size_t>(target.size());
    BigMat h(n, std::vector<big>(d)), u;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) h[i][j] = generators[i](j);
    const int rank = hermite_transform(h, u);
    // c^T H = target^T, H in echelon form
    std::vector<big> rest(d), c(rank, 0);
    for (std::size_t j = 0; j < d; ++j) rest[j] = target(j);
    std::size_t col = 0;
    for (int r = 0; r < rank; ++r) {
        while (h[r][col] == 0) {
            if (rest[col] != 0) return {};
            ++col;
        }
        if (rest[col] % h[r][col] != 0) return {};
        c[r] = rest[col] / h[r][col];
        for (std::size_t j = col; j < d; ++j) rest[j] -= c[r] * h[r][j];
        ++col;
    }
    for (const auto& x : rest)
        if (x != 0) return {};
    IVec a(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        big s = 0;
        for (int r = 0; r < rank; ++r) s += c[r] * u[r][j];
        a(static_cast<Eigen::Index>(j)) = narrow(s);
    }
    return a;
}

KernelSublattice kernel_sublattice(const IVec& v)
{
    if ((v.array() == 0).all()) throw ZeroVector("kernel_sublattice needs v != 0");
    const std::size_t d = static_cast<std::size_t>(v.size());
    BigMat h(d, std::vector<big>(1)), u;
    for (std::size_t i = 0; i < d; ++i) h[i][0] = v(i);
    hermite_transform(h, u);
    IMat ker(static_cast<Eigen::Index>(d - 1), static_cast<Eigen::Index>(d));
    for (std::size_t r = 1; r < d; ++r)
        for (std::size_t j = 0; j < d; ++j) ker(r - 1, j) = narrow(u[r][j]);

    KernelSublattice k;
    k.basis = d > 1 ? IMat(hermite_rows(ker).transpose()) : IMat(static_cast<Eigen::Index>(d), 0);
    const Mat b = k.basis.cast<double>();
    k.cell_measure = d > 1 ? std::sqrt((b.transpose() * b).determinant()) : 1.0;
    IMat cell(d, d);
    cell << k.basis, v;
    k.coset_count = std::abs(exact_det(cell));
    return k;
}

ChannelCosets::ChannelCosets(const IVec& v) : v_(v)
{
    const auto k = kernel_sublattice(v);
    const Eigen::Index d = v.size();
    cell_.resize(d, d);
    cell_ << k.basis, v;
    det_ = exact_det(cell_);
    count_ = std::abs(det_);
    adj_ = adjugate(cell_);
}

IVec ChannelCosets::representative(const IVec& x) const
{
    const IVec num = adj_ * x;
    IVec q(num.size());
    for (Eigen::Index i = 0; i < num.size(); ++i) q(i) = floor_div(num(i), det_);
    return x - cell_ * q;
}

std::vector<IVec> ChannelCosets::representatives() const
{
    const Eigen::Index d = v_.size();
    IVec lo = IVec::Zero(d), hi = IVec::Zero(d);
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index i = 0; i < d; ++i) (cell_(i, c) < 0 ? lo : hi)(i) += cell_(i, c);
    std::vector<IVec> out;
    IVec x = lo;
    for (;;) {
        if (representative(x) == x) out.push_back(x);
        Eigen::Index i = d - 1;
        while (i >= 0 && x(i) == hi(i)) x(i) = lo(i), --i;
        if (i < 0) break;
        ++x(i);
    }
    return out;
}

}  // namespace wulffgrid
