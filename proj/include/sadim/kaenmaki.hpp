#pragma once

// Transfer operator for the potential
//   g(i) = log ||A_{i1}^T|V(sigma i)|| - (s0 - 1) log ||A_{i1}^{-1}|V(sigma i)^perp||,
// its eigenfunction p, conformal measure nu and the measures mu_F, mu_K,
// all discretised on depth-m cylinders.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sadim/domination.hpp"
#include "sadim/pressure.hpp"

namespace sadim {

/// Encodes length-m words over an N-letter alphabet as integers, first
/// symbol most significant.
class CylinderIndex {
 public:
  CylinderIndex(std::size_t n_symbols, int depth) : n_(n_symbols), m_(depth) {
    if (depth < 1) throw Error(ErrorKind::InvalidArgument, "cylinder depth must be at least 1");
    const double count = std::pow(static_cast<double>(n_symbols), depth);
    if (count > 4e6) throw Error(ErrorKind::BudgetExceeded, "too many depth-m cylinders");
    size_ = static_cast<std::size_t>(count);
    top_ = size_ / n_;
  }
  std::size_t size() const { return size_; }
  std::size_t symbols() const { return n_; }
  int depth() const { return m_; }

  std::size_t encode(const Word& w) const {
    std::size_t code = 0;
    for (int s : w) code = code * n_ + static_cast<std::size_t>(s);
    return code;
  }
  Word decode(std::size_t code) const {
    Word w(static_cast<std::size_t>(m_));
    for (int k = m_; k-- > 0;) {
      w[static_cast<std::size_t>(k)] = static_cast<int>(code % n_);
      code /= n_;
    }
    return w;
  }
  /// Code of (k u)|m.
  std::size_t prepend(std::size_t k, std::size_t u) const { return k * top_ + u / n_; }
  /// Code of u_2 ... u_m x.
  std::size_t append(std::size_t u, std::size_t x) const { return (u % top_) * n_ + x; }
  /// Range of depth-m codes refining a shorter word.
  std::pair<std::size_t, std::size_t> refinements(const Word& w) const {
    if (static_cast<int>(w.size()) > m_) throw Error(ErrorKind::DepthExceeded, "word longer than model depth");
    std::size_t lo = encode(w);
    std::size_t span = 1;
    for (std::size_t k = w.size(); k < static_cast<std::size_t>(m_); ++k) {
      lo *= n_;
      span *= n_;
    }
    return {lo, lo + span};
  }

 private:
  std::size_t n_;
  int m_;
  std::size_t size_ = 0;
  std::size_t top_ = 0;
};

struct CylinderFunction {
  int depth = 0;
  std::vector<double> values;
};

struct MeasureApprox {
  int depth = 0;
  std::vector<double> masses;
};

struct KaenmakiOptions {
  int depth = 6;
  double tol = 1e-12;
  int max_iter = 10'000;
  double direction_tol = 1e-13;
};

/// Weight e^{g(k w)} = ||A_k^T|V|| * ||A_k^{-1}|V^perp||^{-(s0-1)} for the
/// direction V = V(w).
inline double transfer_weight(const Matrix2& a, const ProjPoint& v, double s0) {
  return norm_restricted(a.transpose(), v) * std::pow(norm_restricted(a.inverse(), v.orthogonal()), -(s0 - 1.0));
}

/// g(w) evaluated directly from the Furstenberg direction of sigma w.
inline double potential_g(const IfsSystem& sys, const DominationCertificate& cert, const InfiniteWord& w,
                          double s0, double tol = 1e-13) {
  check_word(sys, w);
  const ProjPoint v = furstenberg_direction(sys, cert, w.shifted(), tol);
  return std::log(transfer_weight(sys.map(static_cast<std::size_t>(w.at(0))).a, v, s0));
}

class KaenmakiModel {
 public:
  KaenmakiModel(const IfsSystem& sys, DominationCertificate cert, double s0, KaenmakiOptions opt = {})
      : sys_(sys), cert_(std::move(cert)), s0_(s0), opt_(opt), index_(sys.size(), opt.depth) {
    const std::size_t n = sys.size();
    const auto mats = sys.linear_parts();
    directions_.reserve(index_.size());
    weights_.resize(n * index_.size());
    for (std::size_t u = 0; u < index_.size(); ++u) {
      const ProjPoint v =
          furstenberg_direction(mats, cert_, InfiniteWord::periodic(index_.decode(u)), opt_.direction_tol);
      directions_.push_back(v);
      for (std::size_t k = 0; k < n; ++k) weights_[u * n + k] = transfer_weight(mats[k], v, s0_);
    }
    solve_eigenfunction();
    solve_conformal();
    // Normalise so that the integral of p against nu is one.
    KahanSum acc;
    for (std::size_t u = 0; u < index_.size(); ++u) acc.add(p_[u] * nu_[u]);
    const double z = acc.value();
    for (auto& x : p_) x /= z;
    mu_.resize(index_.size());
    for (std::size_t u = 0; u < index_.size(); ++u) mu_[u] = p_[u] * nu_[u];
    p_residual_ = sup_residual_p();
  }

  const IfsSystem& system() const { return sys_; }
  const DominationCertificate& certificate() const { return cert_; }
  double s0() const { return s0_; }
  int depth() const { return index_.depth(); }
  const CylinderIndex& index() const { return index_; }
  /// Spectral radius of the discretised operator (1 when s0 is exact).
  double lambda() const { return lambda_; }
  double p_residual() const { return p_residual_; }
  double nu_residual() const { return nu_residual_; }
  int p_iterations() const { return p_iter_; }
  int nu_iterations() const { return nu_iter_; }
  const ProjPoint& direction(std::size_t code) const { return directions_.at(code); }

  CylinderFunction p() const { return {index_.depth(), p_}; }
  MeasureApprox nu() const { return {index_.depth(), nu_}; }

  /// (L f)(u) = sum_k e^{g(k u)} f((k u)|m), normalised by lambda.
  CylinderFunction transfer_apply(const CylinderFunction& f) const {
    if (f.depth != index_.depth() || f.values.size() != index_.size())
      throw Error(ErrorKind::InvalidArgument, "cylinder function depth mismatch");
    return {f.depth, apply(f.values)};
  }
  /// Unnormalised operator (weights e^{g} exactly as in the potential).
  CylinderFunction transfer_apply_raw(const CylinderFunction& f) const {
    CylinderFunction out = transfer_apply(f);
    for (auto& x : out.values) x *= lambda_;
    return out;
  }

  /// L^* nu, normalised by lambda.
  MeasureApprox dual_apply(const MeasureApprox& nu) const { return {nu.depth, apply_dual(nu.masses)}; }

  double mu_F(const Word& w) const {
    check_word(sys_, w);
    const auto [lo, hi] = index_.refinements(w);
    KahanSum acc;
    for (std::size_t u = lo; u < hi; ++u) acc.add(mu_[u]);
    return acc.value();
  }
  double mu_K(const Word& w) const { return mu_F(reversed(w)); }

  /// mu_K for words of any length: the depth-m marginals extended as an
  /// (m-1)-step Markov chain.  Agrees with mu_K up to depth m.
  double mu_K_extended(const Word& w) const {
    const std::size_t m = static_cast<std::size_t>(index_.depth());
    if (w.size() <= m) return mu_K(w);
    Word head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m));
    double mass = mu_K(head);
    for (std::size_t j = m; j < w.size() && mass > 0; ++j) {
      const Word block(w.begin() + static_cast<std::ptrdiff_t>(j + 1 - m), w.begin() + static_cast<std::ptrdiff_t>(j + 1));
      const Word ctx(block.begin(), block.end() - 1);
      const double den = mu_K(ctx);
      mass = den > 0 ? mass * mu_K(block) / den : 0.0;
    }
    return mass;
  }

  /// Table rows (word, p, nu, mu_K of the word) at the model depth.
  std::string csv() const {
    std::string out = "word,p,nu,mu_K\n";
    char buf[160];
    for (std::size_t u = 0; u < index_.size(); ++u) {
      const Word w = index_.decode(u);
      std::string ws;
      for (int s : w) ws += std::to_string(s) + ' ';
      ws.pop_back();
      std::snprintf(buf, sizeof buf, ",%.15e,%.15e,%.15e\n", p_[u], nu_[u], mu_K(w));
      out += ws + buf;
    }
    return out;
  }

 private:
  std::vector<double> apply(const std::vector<double>& f) const {
    const std::size_t n = sys_.size();
    std::vector<double> out(index_.size());
    for (std::size_t u = 0; u < index_.size(); ++u) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += weights_[u * n + k] * f[index_.prepend(k, u)];
      out[u] = acc / lambda_;
    }
    return out;
  }

  // (L^* nu)(x) = sum_y nu(x_2..x_m y) e^{g(x_1 x_2 .. x_m y)}.
  std::vector<double> apply_dual(const std::vector<double>& nu) const {
    const std::size_t n = sys_.size();
    std::vector<double> out(index_.size());
    for (std::size_t x = 0; x < index_.size(); ++x) {
      const std::size_t k = x / (index_.size() / n);
      double acc = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        const std::size_t u = index_.append(x, y);
        acc += nu[u] * weights_[u * n + k];
      }
      out[x] = acc / lambda_;
    }
    return out;
  }

  void solve_eigenfunction() {
    std::vector<double> f(index_.size(), 1.0);
    lambda_ = 1.0;
    for (p_iter_ = 1; p_iter_ <= opt_.max_iter; ++p_iter_) {
      std::vector<double> g = apply(f);  // lambda_ == 1 during the iteration
      double sup = 0.0;
      for (double x : g) sup = std::max(sup, x);
      double diff = 0.0;
      for (std::size_t u = 0; u < g.size(); ++u) {
        g[u] /= sup;
        diff = std::max(diff, std::abs(g[u] - f[u]));
      }
      f = std::move(g);
      lambda_est_ = sup;
      if (diff <= opt_.tol) break;
    }
    if (p_iter_ > opt_.max_iter)
      throw Error(ErrorKind::NoConvergence, "eigenfunction power iteration did not converge");
    lambda_ = lambda_est_;
    p_ = std::move(f);
  }

  void solve_conformal() {
    std::vector<double> nu(index_.size(), 1.0 / static_cast<double>(index_.size()));
    for (nu_iter_ = 1; nu_iter_ <= opt_.max_iter; ++nu_iter_) {
      std::vector<double> next = apply_dual(nu);
      KahanSum total;
      for (double x : next) total.add(x);
      const double z = total.value();
      double tv = 0.0;
      for (std::size_t u = 0; u < next.size(); ++u) {
        next[u] /= z;
        tv += std::abs(next[u] - nu[u]);
      }
      nu = std::move(next);
      if (tv <= opt_.tol) break;
    }
    if (nu_iter_ > opt_.max_iter) throw Error(ErrorKind::NoConvergence, "conformal measure did not converge");
    nu_ = std::move(nu);
    const auto check = apply_dual(nu_);
    nu_residual_ = 0.0;
    for (std::size_t u = 0; u < nu_.size(); ++u) nu_residual_ += std::abs(check[u] - nu_[u]);
  }

  double sup_residual_p() const {
    const auto lp = apply(p_);
    double r = 0.0;
    for (std::size_t u = 0; u < p_.size(); ++u) r = std::max(r, std::abs(lp[u] - p_[u]));
    return r;
  }

  IfsSystem sys_;
  DominationCertificate cert_;
  double s0_;
  KaenmakiOptions opt_;
  CylinderIndex index_;
  std::vector<ProjPoint> directions_;
  std::vector<double> weights_;  // [u * N + k]
  std::vector<double> p_, nu_, mu_;
  double lambda_ = 1.0;
  double lambda_est_ = 1.0;
  double p_residual_ = 0.0;
  double nu_residual_ = 0.0;
  int p_iter_ = 0;
  int nu_iter_ = 0;
};

/// Closed-form Käenmäki masses |c_w| |a_w|^{s0-1} for diagonal and
/// lower-triangular systems with a uniformly dominant axis.
inline double mu_K_closed_form(const IfsSystem& sys, const Word& w, double s0) {
  check_word(sys, w);
  const AxisWeights aw = axis_weights(sys);
  double mass = 1.0;
  for (int s : w) {
    const auto i = static_cast<std::size_t>(s);
    mass *= aw.strong[i] * std::pow(aw.weak[i], s0 - 1.0);
  }
  return mass;
}

/// Cylinder masses of mu_K for arbitrary words: closed form when the
/// system admits one, otherwise the Markov extension of a transfer model.
class MuK {
 public:
  static MuK closed_form(const IfsSystem& sys, double s0) {
    const AxisWeights aw = axis_weights(sys);
    MuK m;
    m.s0_ = s0;
    for (std::size_t i = 0; i < aw.strong.size(); ++i) m.weights_.push_back(aw.strong[i] * std::pow(aw.weak[i], s0 - 1.0));
    return m;
  }
  static MuK from_model(const KaenmakiModel& model) {
    MuK m;
    m.model_ = &model;
    m.s0_ = model.s0();
    return m;
  }
  double operator()(const Word& w) const {
    if (model_) return model_->mu_K_extended(w);
    double mass = 1.0;
    for (int s : w) mass *= weights_.at(static_cast<std::size_t>(s));
    return mass;
  }
  /// Mass of the word `w` (already extended by k), given the mass of its parent.
  double child(double parent_mass, const Word& w, std::size_t k) const {
    return model_ ? model_->mu_K_extended(w) : parent_mass * weights_[k];
  }
  bool bernoulli() const { return model_ == nullptr; }
  double s0() const { return s0_; }

 private:
  const KaenmakiModel* model_ = nullptr;
  std::vector<double> weights_;
  double s0_ = 0.0;
};

}  // namespace sadim
