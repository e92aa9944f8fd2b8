#include "lp.hpp"

#include <limits>
#include <vector>

namespace wulffgrid::detail {

namespace {

constexpr double kEps = 1e-11;

class Dictionary {
public:
    Dictionary(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
        : m_(static_cast<int>(b.size())), n_(static_cast<int>(c.size())),
          nonbasic_(n_ + 1), basic_(m_), d_(m_ + 2, n_ + 2)
    {
        d_.setZero();
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) d_(i, j) = a(i, j);
            basic_[i] = n_ + i;
            d_(i, n_) = -1.0;
            d_(i, n_ + 1) = b(i);
        }
        for (int j = 0; j < n_; ++j) {
            nonbasic_[j] = j;
            d_(m_, j) = -c(j);
        }
        nonbasic_[n_] = -1;
        d_(m_ + 1, n_) = 1.0;
    }

    LpResult solve()
    {
        LpResult out;
        int r = 0;
        for (int i = 1; i < m_; ++i)
            if (d_(i, n_ + 1) < d_(r, n_ + 1)) r = i;
        if (m_ > 0 && d_(r, n_ + 1) < -kEps) {
            pivot(r, n_);
            if (!simplex(1) || d_(m_ + 1, n_ + 1) < -kEps) {
                out.status = LpStatus::Infeasible;
                return out;
            }
            for (int i = 0; i < m_; ++i) {
                if (basic_[i] != -1) continue;
                int s = -1;
                for (int j = 0; j <= n_; ++j)
                    if (s == -1 || d_(i, j) < d_(i, s) || (d_(i, j) == d_(i, s) && nonbasic_[j] < nonbasic_[s]))
                        s = j;
                pivot(i, s);
            }
        }
        if (!simplex(2)) {
            out.status = LpStatus::Unbounded;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        out.status = LpStatus::Optimal;
        out.x = Eigen::VectorXd::Zero(n_);
        for (int i = 0; i < m_; ++i)
            if (basic_[i] >= 0 && basic_[i] < n_) out.x(basic_[i]) = d_(i, n_ + 1);
        out.value = d_(m_, n_ + 1);
        return out;
    }

private:
    void pivot(int r, int s)
    {
        const double inv = 1.0 / d_(r, s);
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r) continue;
            const double f = d_(i, s) * inv;
            if (f == 0.0) continue;
            for (int j = 0; j < n_ + 2; ++j)
                if (j != s) d_(i, j) -= d_(r, j) * f;
        }
        for (int j = 0; j < n_ + 2; ++j)
            if (j != s) d_(r, j) *= inv;
        for (int i = 0; i < m_ + 2; ++i)
            if (i != r) d_(i, s) *= -inv;
        d_(r, s) = inv;
        std::swap(basic_[r], nonbasic_[s]);
    }

    bool simplex(int phase)
    {
        const int x = phase == 1 ? m_ + 1 : m_;
        for (int guard = 0; guard < 100000; ++guard) {
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (phase == 2 && nonbasic_[j] == -1) continue;
                if (s == -1 || d_(x, j) < d_(x, s) || (d_(x, j) == d_(x, s) && nonbasic_[j] < nonbasic_[s]))
                    s = j;
            }
            if (s == -1 || d_(x, s) > -kEps) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (d_(i, s) < kEps) continue;
                if (r == -1) {
                    r = i;
                    continue;
                }
                const double lhs = d_(i, n_ + 1) / d_(i, s);
                const double rhs = d_(r, n_ + 1) / d_(r, s);
                if (lhs < rhs || (lhs == rhs && basic_[i] < basic_[r])) r = i;
            }
            if (r == -1) return false;
            pivot(r, s);
        }
        return true;
    }

    int m_, n_;
    std::vector<int> nonbasic_, basic_;
    Eigen::MatrixXd d_;
};

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
{
    Dictionary dict(a, b, c);
    return dict.solve();
}

}  // namespace wulffgrid::detail
