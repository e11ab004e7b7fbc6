#pragma once

#include "nvortex/system.hpp"

#include <numeric>
#include <sstream>
#include <vector>

namespace nvortex {

/// gamma = (sigma, theta) in Sigma_N x S^1. `sigma[k]` is the image of vortex k (0-based).
/// Acts on loops by (gamma * u)_j(t) = u_{sigma^{-1}(j)}(t + theta).
class SymmetryElement {
public:
  SymmetryElement(std::vector<int> sigma, double theta) : sigma_(std::move(sigma)), theta_(theta) {
    const auto n = sigma_.size();
    std::vector<bool> seen(n, false);
    for (int s : sigma_) {
      if (s < 0 || static_cast<std::size_t>(s) >= n || seen[static_cast<std::size_t>(s)])
        throw InvalidArgument("sigma is not a permutation");
      seen[static_cast<std::size_t>(s)] = true;
    }
    order_ = compute_order();
    const double q = theta_ * order_ / kTwoPi;
    if (std::abs(q - std::round(q)) > 1e-9)
      throw InvalidArgument("theta must be a multiple of 2 pi / ord(sigma)");
    theta_ = std::remainder(theta_, kTwoPi);
    if (theta_ < 0.0) theta_ += kTwoPi;
  }

  static SymmetryElement identity(std::size_t n) {
    std::vector<int> s(n);
    std::iota(s.begin(), s.end(), 0);
    return {s, 0.0};
  }
  /// ((1 2 ... N), 2 pi / N): the choreography symmetry of the regular N-gon.
  static SymmetryElement cyclic(std::size_t n) {
    std::vector<int> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = static_cast<int>((k + 1) % n);
    return {s, kTwoPi / static_cast<double>(n)};
  }

  const std::vector<int>& sigma() const { return sigma_; }
  double theta() const { return theta_; }
  std::size_t size() const { return sigma_.size(); }
  /// Order of sigma (lcm of cycle lengths); gamma^order = identity.
  int order() const { return order_; }
  bool is_identity() const { return order_ == 1 && theta_ == 0.0; }

  std::vector<int> inverse() const {
    std::vector<int> inv(sigma_.size());
    for (std::size_t k = 0; k < sigma_.size(); ++k) inv[static_cast<std::size_t>(sigma_[k])] = static_cast<int>(k);
    return inv;
  }

  /// sigma must preserve the strengths.
  void check_strengths(const VortexSystem& sys) const {
    if (static_cast<Eigen::Index>(sigma_.size()) != sys.size())
      throw InvalidArgument("symmetry acts on a different number of vortices");
    for (std::size_t k = 0; k < sigma_.size(); ++k)
      if (sys.strength(sigma_[k]) != sys.strength(static_cast<Eigen::Index>(k))) {
        std::ostringstream os;
        os << "sigma maps vortex " << k + 1 << " to vortex " << sigma_[k] + 1 << " with a different strength";
        throw StrengthMismatch(os.str());
      }
  }

  /// (sigma * z)_j = z_{sigma^{-1}(j)}.
  Vec permute(const Vec& z) const {
    const auto inv = inverse();
    Vec out(z.size());
    for (std::size_t j = 0; j < sigma_.size(); ++j)
      out.segment<2>(2 * static_cast<Eigen::Index>(j)) = z.segment<2>(2 * inv[j]);
    return out;
  }

private:
  int compute_order() const {
    std::vector<bool> seen(sigma_.size(), false);
    int ord = 1;
    for (std::size_t k = 0; k < sigma_.size(); ++k) {
      if (seen[k]) continue;
      int len = 0;
      for (std::size_t j = k; !seen[j]; j = static_cast<std::size_t>(sigma_[j])) {
        seen[j] = true;
        ++len;
      }
      ord = std::lcm(ord, len);
    }
    return ord;
  }

  std::vector<int> sigma_;
  double theta_;
  int order_ = 1;
};

}  // namespace nvortex
