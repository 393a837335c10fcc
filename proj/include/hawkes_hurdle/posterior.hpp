#pragma once

// Flat parameter layout, constraint transforms and the differentiable
// log-posterior handed to the sampler.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawkes_hurdle/model.hpp"

namespace hh {

/// identity: x = u.  log: x = exp(u).  log_shifted: x = 1 + exp(u).
enum class Transform { identity, log, log_shifted };

/// Ordering of a variant's parameters in a flat vector: for each product its
/// coefficients, then (kappa, mu, tau) of the self channel, then of the cross
/// channel; after all products rho, eta, eta-cross.
class ParameterLayout {
 public:
  ParameterLayout(Variant v, std::size_t products) : variant_(v), products_(products) {
    const auto tr = traits(v);
    const bool zero = tr.process == Process::zero;
    const int nc = coefficient_count(v);
    const std::string sfx = zero ? "_z" : "_c";
    const char* shot_names[] = {"kappa", "mu", "tau"};
    const Transform shot_tf[] = {Transform::log, Transform::log_shifted, Transform::log};

    for (std::size_t i = 0; i < products; ++i) {
      const std::string pi = "[" + std::to_string(i + 1) + "]";
      if (!tr.covariates) {
        add("phi" + sfx + pi, Transform::identity);
      } else {
        for (int j = 0; j < nc; ++j)
          add("theta" + sfx + pi + "[" + std::to_string(j + 1) + "]", Transform::identity);
      }
      if (tr.self_excitation)
        for (int k = 0; k < 3; ++k) add(shot_names[k] + sfx + pi, shot_tf[k]);
      if (tr.cross_excitation)
        for (int k = 0; k < 3; ++k) add(std::string(shot_names[k]) + "_zx" + pi, shot_tf[k]);
      if (i == 0) per_product_ = names_.size();
    }
    hyper_offset_ = names_.size();
    if (tr.hierarchical) {
      for (int j = 0; j < nc; ++j)
        add("rho" + sfx + "[" + std::to_string(j + 1) + "]", Transform::identity);
      if (tr.self_excitation)
        for (int k = 0; k < 3; ++k)
          add("eta" + sfx + "[" + std::to_string(k + 1) + "]", Transform::log);
      if (tr.cross_excitation)
        for (int k = 0; k < 3; ++k)
          add("eta_zx[" + std::to_string(k + 1) + "]", Transform::log);
    }
  }

  Variant variant() const { return variant_; }
  std::size_t products() const { return products_; }
  std::size_t dimension() const { return names_.size(); }
  std::size_t per_product() const { return per_product_; }
  std::size_t hyper_offset() const { return hyper_offset_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Transform>& transforms() const { return transforms_; }

  /// Constrained flat vector from structured parameters.
  std::vector<double> pack(const ModelState& st) const {
    std::vector<double> out(dimension());
    visit(const_cast<ModelState&>(st), [&](std::size_t k, double& x) { out[k] = x; });
    return out;
  }

  /// Structured parameters from a constrained flat vector. Unused fields keep
  /// their defaults.
  ModelState unpack(std::span<const double> flat) const {
    if (flat.size() != dimension()) throw std::invalid_argument("parameter vector size mismatch");
    ModelState st;
    st.products.resize(products_);
    visit(st, [&](std::size_t k, double& x) { x = flat[k]; });
    return st;
  }

 private:
  void add(std::string name, Transform tf) {
    names_.push_back(std::move(name));
    transforms_.push_back(tf);
  }

  template <class F>
  void visit(ModelState& st, F&& f) const {
    const auto tr = traits(variant_);
    const bool zero = tr.process == Process::zero;
    const int nc = coefficient_count(variant_);
    std::size_t k = 0;
    for (std::size_t i = 0; i < products_; ++i) {
      ProductParams& pp = st.products[i];
      double* theta = zero ? pp.theta_z.data() : pp.theta_c.data();
      for (int j = 0; j < nc; ++j) f(k++, theta[j]);
      if (tr.self_excitation) {
        ShotParams& sp = zero ? pp.shot_z : pp.shot_c;
        for (int c = 0; c < 3; ++c) f(k++, shot_component(sp, c));
      }
      if (tr.cross_excitation)
        for (int c = 0; c < 3; ++c) f(k++, shot_component(pp.cross_shot_z, c));
    }
    if (!tr.hierarchical) return;
    double* rho = zero ? st.hyper.rho_z.data() : st.hyper.rho_c.data();
    for (int j = 0; j < nc; ++j) f(k++, rho[j]);
    if (tr.self_excitation) {
      auto& eta = zero ? st.hyper.eta_z : st.hyper.eta_c;
      for (int c = 0; c < 3; ++c) f(k++, eta[c]);
    }
    if (tr.cross_excitation)
      for (int c = 0; c < 3; ++c) f(k++, st.hyper.eta_z_cross[c]);
  }

  Variant variant_;
  std::size_t products_;
  std::size_t per_product_ = 0;
  std::size_t hyper_offset_ = 0;
  std::vector<std::string> names_;
  std::vector<Transform> transforms_;
};

/// Maps a constrained vector to the sampler's unconstrained space. Boundary
/// values (kappa = 0, mu = 1, ...) have no finite image and are rejected.
inline std::vector<double> to_unconstrained(const ParameterLayout& layout,
                                            std::span<const double> constrained) {
  if (constrained.size() != layout.dimension())
    throw std::invalid_argument("parameter vector size mismatch");
  std::vector<double> u(constrained.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double x = constrained[k];
    switch (layout.transforms()[k]) {
      case Transform::identity: u[k] = x; break;
      case Transform::log:
        if (!(x > 0.0)) throw std::domain_error(layout.names()[k] + " must be > 0");
        u[k] = std::log(x);
        break;
      case Transform::log_shifted:
        if (!(x > 1.0)) throw std::domain_error(layout.names()[k] + " must be > 1");
        u[k] = std::log(x - 1.0);
        break;
    }
    if (!std::isfinite(u[k]))
      throw std::domain_error(layout.names()[k] + " has no finite unconstrained value");
  }
  return u;
}

inline std::vector<double> to_unconstrained(const ParameterLayout& layout, const ModelState& st) {
  return to_unconstrained(layout, layout.pack(st));
}

/// Inverse of to_unconstrained; adds log |dx/du| of every transform to
/// `log_jacobian` when given.
inline std::vector<double> from_unconstrained(const ParameterLayout& layout,
                                              std::span<const double> u,
                                              double* log_jacobian = nullptr) {
  if (u.size() != layout.dimension()) throw std::invalid_argument("parameter vector size mismatch");
  std::vector<double> x(u.size());
  double lj = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    switch (layout.transforms()[k]) {
      case Transform::identity: x[k] = u[k]; break;
      case Transform::log:
        x[k] = std::exp(u[k]);
        lj += u[k];
        break;
      case Transform::log_shifted:
        x[k] = 1.0 + std::exp(u[k]);
        lj += u[k];
        break;
    }
  }
  if (log_jacobian) *log_jacobian += lj;
  return x;
}

/// Log-likelihood + log-prior + log-Jacobian over the unconstrained space,
/// for one process and variant.
class LogPosterior {
 public:
  LogPosterior(ModelData data, Variant v, PriorSpec priors)
      : data_(std::move(data)), variant_(v), priors_(std::move(priors)),
        layout_(v, data_.product_count()) {}

  Variant variant() const { return variant_; }
  const ParameterLayout& layout() const { return layout_; }
  const ModelData& data() const { return data_; }
  const PriorSpec& priors() const { return priors_; }
  std::size_t dimension() const { return layout_.dimension(); }
  const std::vector<std::string>& parameter_names() const { return layout_.names(); }

  /// Log density at unconstrained `u`; fills `grad` when it is non-empty.
  /// Outside the support (or on overflow) returns -inf.
  double log_density(std::span<const double> u, std::span<double> grad = {}) const {
    for (double v : u)
      if (!std::isfinite(v)) return kNegInf;
    double log_jac = 0.0;
    const std::vector<double> x = from_unconstrained(layout_, u, &log_jac);
    const ModelState st = layout_.unpack(x);

    if (grad.empty()) {
      const double lp = logprior(st, priors_, variant_);
      if (!std::isfinite(lp)) return kNegInf;
      const double ll = loglik(data_, st.products, variant_);
      const double total = ll + lp + log_jac;
      return std::isfinite(total) ? total : kNegInf;
    }

    ModelState g;
    g.products.resize(st.products.size());
    zero_state(g);
    const double lp = logprior(st, priors_, variant_, &g);
    if (!std::isfinite(lp)) return kNegInf;
    const double ll = loglik(data_, st.products, variant_, g.products);
    const double total = ll + lp + log_jac;
    if (!std::isfinite(total)) return kNegInf;

    const std::vector<double> gx = layout_.pack(g);
    for (std::size_t k = 0; k < gx.size(); ++k) {
      switch (layout_.transforms()[k]) {
        case Transform::identity: grad[k] = gx[k]; break;
        case Transform::log: grad[k] = gx[k] * x[k] + 1.0; break;
        case Transform::log_shifted: grad[k] = gx[k] * (x[k] - 1.0) + 1.0; break;
      }
      if (!std::isfinite(grad[k])) return kNegInf;
    }
    return total;
  }

  /// Constrained values of an unconstrained point.
  std::vector<double> constrain(std::span<const double> u) const {
    return from_unconstrained(layout_, u);
  }

  /// Unconstrained image of a draw from the prior.
  template <class Rng>
  std::vector<double> initial_point(Rng& rng) const {
    for (;;) {
      const ModelState st = draw_prior(priors_, variant_, layout_.products(), rng);
      try {
        return to_unconstrained(layout_, st);
      } catch (const std::domain_error&) {
        // a gamma draw underflowed to the boundary; draw again
      }
    }
  }

 private:
  static void zero_state(ModelState& g) {
    for (auto& p : g.products) p = ProductParams{};
    for (auto& p : g.products) {
      p.shot_z = p.cross_shot_z = p.shot_c = ShotParams{0.0, 0.0, 0.0};
    }
    g.hyper = HierarchyParams{};
    g.hyper.eta_z = g.hyper.eta_z_cross = g.hyper.eta_c = {0.0, 0.0, 0.0};
  }

  ModelData data_;
  Variant variant_;
  PriorSpec priors_;
  ParameterLayout layout_;
};

}  // namespace hh
