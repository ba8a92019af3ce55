#include "derstab/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "derstab/errors.hpp"

namespace derstab::lp {

namespace {

constexpr double kCostTol = 1e-9;   // reduced-cost optimality tolerance
constexpr double kPivotTol = 1e-9;  // smallest acceptable pivot element
constexpr int kStallLimit = 64;     // degenerate iterations before Bland's rule

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tableau {
public:
    Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
        : rows_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())), cost_(c) {
        // Layout: [original columns | artificial columns | rhs], rows scaled
        // so the rhs starts nonnegative. Ratio tests run against a second,
        // slightly perturbed rhs (Wolfe's trick): highly degenerate bases --
        // the normal case here -- would otherwise stall the pivoting, while
        // the reported solution still comes from the exact rhs.
        body_.resize(rows_, n_ + rows_ + 1);
        body_.leftCols(n_) = A;
        body_.middleCols(n_, rows_).setIdentity();
        body_.col(n_ + rows_) = b;
        row_sign_ = Eigen::VectorXd::Ones(rows_);
        for (int i = 0; i < rows_; ++i) {
            if (body_(i, n_ + rows_) < 0.0) {
                body_.row(i) = -body_.row(i);
                body_(i, n_ + i) = 1.0;  // keep the artificial column positive
                row_sign_(i) = -1.0;
            }
        }
        const double scale = 1.0 + body_.col(n_ + rows_).cwiseAbs().maxCoeff();
        perturbed_ = body_.col(n_ + rows_);
        for (int i = 0; i < rows_; ++i) perturbed_(i) += 1e-7 * scale * (i + 1) / rows_;
        basis_.resize(rows_);
        for (int i = 0; i < rows_; ++i) basis_[i] = n_ + i;
    }

    Status run() {
        // Phase 1: minimize the artificial sum.
        obj_ = Eigen::VectorXd::Zero(n_ + rows_);
        obj_.segment(n_, rows_).setOnes();
        price_out_basis();
        Status st = iterate(/*allow_artificials=*/true);
        if (st != Status::Optimal) return Status::Infeasible;
        if (objective_of(obj_) > 1e-6 * rows_) return Status::Infeasible;
        expel_artificials();

        // Phase 2: original costs; artificial columns are barred from entering.
        obj_ = Eigen::VectorXd::Zero(n_ + rows_);
        obj_.head(n_) = cost_;
        price_out_basis();
        return iterate(/*allow_artificials=*/false);
    }

    Eigen::VectorXd primal() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        for (int i = 0; i < rows_; ++i)
            if (basis_[i] < n_) x(basis_[i]) = body_(i, n_ + rows_);
        return x;
    }

    double objective() const { return objective_of(obj_); }

    Eigen::VectorXd duals() const {
        // Multipliers read from the reduced costs under the artificial columns
        // (those columns hold B⁻¹ of the sign-adjusted system).
        Eigen::VectorXd y(rows_);
        for (int i = 0; i < rows_; ++i) y(i) = row_sign_(i) * -red_(n_ + i);
        return y;
    }

private:
    double objective_of(const Eigen::VectorXd& costs) const {
        double value = 0.0;
        for (int i = 0; i < rows_; ++i) value += costs(basis_[i]) * body_(i, n_ + rows_);
        return value;
    }

    void price_out_basis() {
        red_ = obj_;
        ghost_ = 0.0;
        for (int i = 0; i < rows_; ++i) {
            double cb = obj_(basis_[i]);
            if (cb != 0.0) {
                red_ -= cb * body_.row(i).head(n_ + rows_).transpose();
                ghost_ += cb * perturbed_(i);
            }
        }
    }

    Status iterate(bool allow_artificials) {
        int stall = 0;
        bool bland = false;
        double last_ghost = ghost_;
        const long max_iter = 50L * (rows_ + n_) + 10000L;
        for (long iter = 0; iter < max_iter; ++iter) {
            int enter = pick_entering(allow_artificials, bland);
            if (enter < 0) return Status::Optimal;
            int leave = pick_leaving(enter, bland);
            if (leave < 0) return Status::Unbounded;
            pivot(leave, enter);
            if (ghost_ < last_ghost - 1e-12) {
                stall = 0;
                last_ghost = ghost_;
            } else if (!bland && ++stall > kStallLimit) {
                bland = true;  // anti-cycling from here on
            }
        }
        throw Error("simplex exceeded its iteration budget");
    }

    int pick_entering(bool allow_artificials, bool bland) const {
        const int limit = allow_artificials ? n_ + rows_ : n_;
        int best = -1;
        double best_cost = -kCostTol;
        for (int j = 0; j < limit; ++j) {
            if (red_(j) < best_cost) {
                if (bland) return j;
                best_cost = red_(j);
                best = j;
            }
        }
        return best;
    }

    int pick_leaving(int enter, bool bland) const {
        int best = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < rows_; ++i) {
            double a = body_(i, enter);
            if (a <= kPivotTol) continue;
            double ratio = perturbed_(i) / a;
            if (best < 0 || ratio < best_ratio - 1e-12) {
                best = i;
                best_ratio = ratio;
            } else if (ratio < best_ratio + 1e-12) {
                // Tie: Bland picks the lowest basis index, otherwise prefer
                // the larger pivot for numerical safety.
                bool take = bland ? basis_[i] < basis_[best] : a > body_(best, enter);
                if (take) {
                    best = i;
                    best_ratio = ratio;
                }
            }
        }
        return best;
    }

    void pivot(int row, int col) {
        double p = body_(row, col);
        body_.row(row) /= p;
        perturbed_(row) /= p;
        for (int i = 0; i < rows_; ++i) {
            if (i == row) continue;
            double factor = body_(i, col);
            if (factor != 0.0) {
                body_.row(i) -= factor * body_.row(row);
                perturbed_(i) -= factor * perturbed_(row);
            }
        }
        double rc = red_(col);
        if (rc != 0.0) {
            red_ -= rc * body_.row(row).head(n_ + rows_).transpose();
            ghost_ += rc * perturbed_(row);
        }
        basis_[row] = col;
    }

    // After phase 1, swap any basic artificial (at zero level) for a real
    // column so phase 2 cannot re-grow it. Rows with no eligible pivot are
    // redundant equations and stay parked on their artificial.
    void expel_artificials() {
        for (int i = 0; i < rows_; ++i) {
            if (basis_[i] < n_) continue;
            for (int j = 0; j < n_; ++j) {
                if (std::abs(body_(i, j)) > 1e-7) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    int rows_;
    int n_;
    Eigen::VectorXd cost_;
    RowMajorMatrix body_;  // row-major: pivoting is row arithmetic
    Eigen::VectorXd perturbed_;  // anti-degeneracy rhs, used only in ratio tests
    Eigen::VectorXd obj_;
    Eigen::VectorXd red_;
    Eigen::VectorXd row_sign_;
    double ghost_ = 0.0;  // objective against the perturbed rhs, for stall detection
    std::vector<int> basis_;
};

}  // namespace

Solution solve_standard_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c) {
    if (A.rows() != b.size() || A.cols() != c.size())
        throw DimensionError("simplex: inconsistent LP dimensions");
    Tableau tab(A, b, c);
    Solution sol;
    sol.status = tab.run();
    if (sol.status == Status::Optimal) {
        sol.x = tab.primal();
        sol.objective = tab.objective();
        sol.duals = tab.duals();
    }
    return sol;
}

}  // namespace derstab::lp
