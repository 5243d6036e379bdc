#include "banditlab/metrics.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "banditlab/types.hpp"

namespace banditlab {

namespace {

// Dense exact-rational primal simplex, maximizing c^T x subject to Ax <= b,
// x >= 0, with b >= 0 (so the slack basis is feasible and no phase 1 is
// needed). Bland's rule guarantees termination.
class Simplex {
 public:
  Simplex(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
          std::vector<Rational> c)
      : rows_(a.size()), cols_(c.size()), a_(std::move(a)), b_(std::move(b)) {
    // Tableau columns: structural vars, then one slack per row, then rhs.
    const std::size_t width = cols_ + rows_ + 1;
    tab_.assign(rows_, std::vector<Rational>(width, Rational(0)));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) tab_[i][j] = a_[i][j];
      tab_[i][cols_ + i] = Rational(1);
      tab_[i][width - 1] = b_[i];
    }
    obj_.assign(width, Rational(0));
    for (std::size_t j = 0; j < cols_; ++j) obj_[j] = c[j];
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      basis_[i] = cols_ + i;
    }
  }

  void run() {
    const std::size_t width = cols_ + rows_ + 1;
    const Rational zero(0);
    for (;;) {
      // Bland: entering = lowest-index column with positive reduced cost.
      std::size_t enter = width;
      for (std::size_t j = 0; j + 1 < width; ++j) {
        if (zero < obj_[j]) {
          enter = j;
          break;
        }
      }
      if (enter == width) return;  // optimal
      // Ratio test; ties break to the lowest basis variable index.
      std::size_t leave = rows_;
      Rational best_ratio(0);
      for (std::size_t i = 0; i < rows_; ++i) {
        if (!(zero < tab_[i][enter])) continue;
        Rational ratio = tab_[i][width - 1] / tab_[i][enter];
        if (leave == rows_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == rows_) {
        throw DomainError("simplex: unbounded program");
      }
      pivot(leave, enter);
    }
  }

  std::vector<Rational> solution() const {
    const std::size_t width = cols_ + rows_ + 1;
    std::vector<Rational> x(cols_, Rational(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) x[basis_[i]] = tab_[i][width - 1];
    }
    return x;
  }

 private:
  void pivot(std::size_t row, std::size_t col) {
    const std::size_t width = cols_ + rows_ + 1;
    const Rational p = tab_[row][col];
    for (std::size_t j = 0; j < width; ++j) tab_[row][j] /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const Rational factor = tab_[i][col];
      if (factor == Rational(0)) continue;
      for (std::size_t j = 0; j < width; ++j) {
        tab_[i][j] -= factor * tab_[row][j];
      }
    }
    const Rational obj_factor = obj_[col];
    if (!(obj_factor == Rational(0))) {
      for (std::size_t j = 0; j < width; ++j) {
        obj_[j] -= obj_factor * tab_[row][j];
      }
    }
    basis_[row] = col;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> b_;
  std::vector<std::vector<Rational>> tab_;
  std::vector<Rational> obj_;
  std::vector<std::size_t> basis_;
};

}  // namespace

GammaResult gamma(const ExplicitClass& cls, const Rational& eps) {
  if (eps < Rational(0)) {
    throw DomainError("epsilon must be nonnegative");
  }
  const int num_a = cls.num_actions();
  const int num_f = cls.num_functions();
  const auto na = static_cast<std::size_t>(num_a);
  const auto nf = static_cast<std::size_t>(num_f);

  std::vector<std::vector<bool>> in_set(nf, std::vector<bool>(na, false));
  for (FunctionIndex f = 0; f < num_f; ++f) {
    for (ActionId a : cls.eps_optimal_set(f, eps)) {
      in_set[static_cast<std::size_t>(f)][static_cast<std::size_t>(a)] = true;
    }
  }

  // Variables: p_0..p_{A-1}, then t. Constraints:
  //   t - sum_{a in S_f} p_a <= 0   (one per function)
  //   sum_a p_a <= 1
  // Maximizing t drives sum p to (at most) 1; mass is topped up afterwards so
  // the witness sums to exactly 1, which never lowers any constraint.
  std::vector<std::vector<Rational>> a(nf + 1,
                                       std::vector<Rational>(na + 1, Rational(0)));
  std::vector<Rational> b(nf + 1, Rational(0));
  std::vector<Rational> c(na + 1, Rational(0));
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t j = 0; j < na; ++j) {
      if (in_set[f][j]) a[f][j] = Rational(-1);
    }
    a[f][na] = Rational(1);
  }
  for (std::size_t j = 0; j < na; ++j) a[nf][j] = Rational(1);
  b[nf] = Rational(1);
  c[na] = Rational(1);

  Simplex lp(std::move(a), std::move(b), std::move(c));
  lp.run();
  std::vector<Rational> x = lp.solution();

  GammaResult out;
  out.witness.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(na));
  Rational total(0);
  for (const Rational& p : out.witness) total += p;
  if (total < Rational(1)) {
    out.witness[0] += Rational(1) - total;
  }
  out.achieved_mass.assign(nf, Rational(0));
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t j = 0; j < na; ++j) {
      if (in_set[f][j]) out.achieved_mass[f] += out.witness[j];
    }
  }
  out.value = out.achieved_mass[0];
  for (std::size_t f = 1; f < nf; ++f) {
    if (out.achieved_mass[f] < out.value) out.value = out.achieved_mass[f];
  }
  return out;
}

double gaussian_kl(double mu1, double mu2, double sigma) {
  if (!(sigma > 0)) {
    throw DomainError("gaussian_kl requires sigma > 0");
  }
  const double d = mu1 - mu2;
  return d * d / (2.0 * sigma * sigma);
}

double divergence_budget(const std::vector<double>& counts,
                         const std::vector<double>& gaps, double sigma) {
  if (counts.size() != gaps.size()) {
    throw DomainError("divergence_budget: counts and gaps length mismatch");
  }
  if (!(sigma > 0)) {
    throw DomainError("divergence_budget requires sigma > 0");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      throw DomainError("divergence_budget: negative pull count");
    }
    total += counts[i] * gaps[i] * gaps[i];
  }
  return total / (2.0 * sigma * sigma);
}

long sample_size(double accuracy, double delta, double sigma) {
  if (!(accuracy > 0)) {
    throw DomainError("sample_size requires accuracy > 0");
  }
  if (!(delta > 0) || !(delta < 1)) {
    throw DomainError("sample_size requires delta in (0, 1)");
  }
  if (sigma < 0) {
    throw DomainError("sample_size requires sigma >= 0");
  }
  if (sigma == 0) return 1;
  const double raw = 2.0 * sigma * sigma * std::log(2.0 / delta) /
                     (accuracy * accuracy);
  const long n = static_cast<long>(std::ceil(raw));
  return n < 1 ? 1 : n;
}

double pinsker_bound(double kl) {
  if (kl < 0) {
    throw DomainError("pinsker_bound requires kl >= 0");
  }
  return std::sqrt(kl / 2.0);
}

double huber_bretagnolle_bound(double kl) {
  if (kl < 0) {
    throw DomainError("huber_bretagnolle_bound requires kl >= 0");
  }
  return std::exp(-kl);
}

}  // namespace banditlab
