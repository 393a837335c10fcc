#pragma once

// Product-level and group-level parameter containers, and the prior table.

#include <array>
#include <vector>

#include "hawkes_hurdle/covariates.hpp"
#include "hawkes_hurdle/excitation.hpp"

namespace hh {

/// Parameters of one product. Fields a variant does not use are ignored;
/// baseline variants keep their single intercept in theta_z[0] / theta_c[0].
struct ProductParams {
  std::array<double, kZeroCoefficients> theta_z{};
  std::array<double, kCountCoefficients> theta_c{};
  ShotParams shot_z;
  ShotParams cross_shot_z;
  ShotParams shot_c;
};

/// Shared hyper-parameters. Each eta triple is ordered (kappa, mu, tau).
struct HierarchyParams {
  std::array<double, kZeroCoefficients> rho_z{};
  std::array<double, kCountCoefficients> rho_c{};
  std::array<double, 3> eta_z{1.0, 1.0, 1.0};
  std::array<double, 3> eta_z_cross{1.0, 1.0, 1.0};
  std::array<double, 3> eta_c{1.0, 1.0, 1.0};
};

struct ModelState {
  std::vector<ProductParams> products;
  HierarchyParams hyper;
};

/// Component k of (kappa, mu, tau).
inline double& shot_component(ShotParams& sp, int k) {
  return k == 0 ? sp.kappa : (k == 1 ? sp.mu : sp.tau);
}
inline double shot_component(const ShotParams& sp, int k) {
  return k == 0 ? sp.kappa : (k == 1 ? sp.mu : sp.tau);
}

/// The kernel mean lives on (1, inf); its prior is placed on mu - 1.
inline constexpr std::array<double, 3> kShotShift{0.0, 1.0, 0.0};

struct NormalPrior {
  double mean = 0.0;
  double variance = 1.0;
};

/// Gamma(shape, rate) on x - shift.
struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
  double shift = 0.0;
};

namespace detail {
template <std::size_t N>
std::array<NormalPrior, N> normal_block(NormalPrior first, NormalPrior rest) {
  std::array<NormalPrior, N> out;
  out.fill(rest);
  out[0] = first;
  return out;
}
}  // namespace detail

/// Zero-process priors.
struct ZeroPriors {
  NormalPrior base{-3.0, 3.0};
  std::array<NormalPrior, kZeroCoefficients> flat_theta =
      detail::normal_block<kZeroCoefficients>({-3.0, 0.75}, {0.0, 0.75});
  std::array<GammaPrior, 3> flat_shot{{{5.0, 1.0, 0.0}, {1.0, 2.0, 1.0}, {10.0, 2.5, 0.0}}};
  std::array<GammaPrior, 3> flat_cross{{{2.0, 8.0, 0.0}, {1.0, 2.0, 1.0}, {10.0, 2.5, 0.0}}};

  std::array<double, kZeroCoefficients> sigma2 = [] {
    std::array<double, kZeroCoefficients> s;
    s.fill(0.05);
    return s;
  }();
  std::array<NormalPrior, kZeroCoefficients> rho =
      detail::normal_block<kZeroCoefficients>({-3.0, 0.75}, {0.0, 0.75});
  std::array<double, 3> shot_rate{1.0, 2.0, 2.5};
  std::array<GammaPrior, 3> eta{{{50.0, 10.0, 0.0}, {10.0, 10.0, 0.0}, {500.0, 50.0, 0.0}}};
  std::array<double, 3> cross_rate{8.0, 2.0, 2.5};
  std::array<GammaPrior, 3> eta_cross{{{30.0, 15.0, 0.0}, {10.0, 10.0, 0.0}, {500.0, 50.0, 0.0}}};
};

/// Count-process priors. HB and HBE carry different hierarchical scales.
struct CountPriors {
  NormalPrior base{-4.0, 4.0};
  std::array<NormalPrior, kCountCoefficients> flat_theta{{{1.0, 0.75}, {-1.0, 0.75}}};
  std::array<GammaPrior, 3> flat_shot{{{1.0, 5.0, 0.0}, {3.0, 1.0, 1.0}, {4.0, 1.0, 0.0}}};

  std::array<double, kCountCoefficients> sigma2_hb{1.0, 1.0};
  std::array<NormalPrior, kCountCoefficients> rho_hb{{{1.0, 0.5}, {-1.0, 0.5}}};

  std::array<double, kCountCoefficients> sigma2{0.05, 0.05};
  std::array<NormalPrior, kCountCoefficients> rho{{{1.0, 0.75}, {-1.0, 0.75}}};
  std::array<double, 3> shot_rate{5.0, 1.0, 1.0};
  std::array<GammaPrior, 3> eta{{{5.0, 5.0, 0.0}, {15.0, 5.0, 0.0}, {40.0, 10.0, 0.0}}};
};

struct PriorSpec {
  ZeroPriors zero;
  CountPriors count;
};

}  // namespace hh
