#pragma once

// Zero- and count-process model variants.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hawkes_hurdle/covariates.hpp"
#include "hawkes_hurdle/excitation.hpp"

namespace hh {

enum class Process { zero, count };

enum class Variant {
  zero_base,  // constant logit per product
  zero_hb,
  zero_be,
  zero_hbe,
  zero_bec,
  zero_hbec,
  count_base,  // constant log-mean per product
  count_hb,
  count_be,
  count_hbe,
};

inline constexpr std::array<Variant, 10> kAllVariants = {
    Variant::zero_base, Variant::zero_hb,    Variant::zero_be,  Variant::zero_hbe,
    Variant::zero_bec,  Variant::zero_hbec,  Variant::count_base, Variant::count_hb,
    Variant::count_be,  Variant::count_hbe};

struct VariantTraits {
  Process process;
  bool covariates;
  bool hierarchical;
  bool self_excitation;
  bool cross_excitation;
};

constexpr VariantTraits traits(Variant v) {
  switch (v) {
    case Variant::zero_base: return {Process::zero, false, false, false, false};
    case Variant::zero_hb: return {Process::zero, true, true, false, false};
    case Variant::zero_be: return {Process::zero, true, false, true, false};
    case Variant::zero_hbe: return {Process::zero, true, true, true, false};
    case Variant::zero_bec: return {Process::zero, true, false, true, true};
    case Variant::zero_hbec: return {Process::zero, true, true, true, true};
    case Variant::count_base: return {Process::count, false, false, false, false};
    case Variant::count_hb: return {Process::count, true, true, false, false};
    case Variant::count_be: return {Process::count, true, false, true, false};
    case Variant::count_hbe: return {Process::count, true, true, true, false};
  }
  return {Process::zero, false, false, false, false};
}

constexpr Process process_of(Variant v) { return traits(v).process; }

/// Number of regression coefficients the variant uses per product.
constexpr int coefficient_count(Variant v) {
  const auto t = traits(v);
  if (!t.covariates) return 1;
  return t.process == Process::zero ? kZeroCoefficients : kCountCoefficients;
}

/// Short name without the process: Base1, HB, BE, HBE, BEC, HBEC, Base0.
inline std::string short_name(Variant v) {
  switch (v) {
    case Variant::zero_base: return "Base1";
    case Variant::count_base: return "Base0";
    case Variant::zero_hb:
    case Variant::count_hb: return "HB";
    case Variant::zero_be:
    case Variant::count_be: return "BE";
    case Variant::zero_hbe:
    case Variant::count_hbe: return "HBE";
    case Variant::zero_bec: return "BEC";
    case Variant::zero_hbec: return "HBEC";
  }
  return "?";
}

/// Qualified name, e.g. "zero:HBE".
inline std::string to_string(Variant v) {
  return std::string(process_of(v) == Process::zero ? "zero:" : "count:") + short_name(v);
}

inline std::optional<Variant> parse_variant(Process process, std::string_view name) {
  for (Variant v : kAllVariants) {
    if (process_of(v) != process) continue;
    const std::string s = short_name(v);
    if (name == s) return v;
    // Either baseline spelling is accepted for either process.
    if ((name == "Base" || name == "Base0" || name == "Base1") && s.rfind("Base", 0) == 0)
      return v;
  }
  return std::nullopt;
}

/// Parses "zero:HBE" / "count:BE".
inline std::optional<Variant> parse_qualified_variant(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto head = text.substr(0, colon);
  if (head == "zero") return parse_variant(Process::zero, text.substr(colon + 1));
  if (head == "count") return parse_variant(Process::count, text.substr(colon + 1));
  return std::nullopt;
}

/// Count-process mean link. `shifted` maps the linear predictor to
/// lambda = 1 + exp(eta); `clamped_exp` uses lambda = max(exp(eta), 1 + 1e-8).
enum class CountLink { shifted, clamped_exp };

inline constexpr double kClampedExcess = 1e-8;

struct ModelSpec {
  Variant zero = Variant::zero_hbe;
  Variant count = Variant::count_hbe;
  double dispersion = 1.0;
  int truncation = kDefaultTruncation;
  SeasonalConfig seasonal;
  CountLink count_link = CountLink::shifted;
};

}  // namespace hh
