#pragma once

// Seeded random sampling of phase-space points, used to certify identities
// numerically (null-ness, constraint residuals, EOM agreement).

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "nullgauge/expr.hpp"

namespace nullgauge {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct SampleDomain {
  Interval x{-2.0, 2.0};
  Interval xdot{-2.0, 2.0};
  Interval xddot{-10.0, 10.0};
  Interval t{0.0, 5.0};
  /// Range for parameters the caller left unbound.
  Interval parameter{0.5, 2.0};
  EvalOptions eval{.radicand_floor = 1e-6};
};

struct Sample {
  State state;
  /// Every parameter: caller-fixed values plus fresh random draws.
  Bindings params;
  [[nodiscard]] Bindings bindings() const { return with_state(params, state); }
};

[[nodiscard]] std::string describe(const Sample& s);

class PointSampler {
 public:
  PointSampler(std::uint64_t seed, SampleDomain domain, Bindings fixed, std::set<std::string> free_parameters);

  [[nodiscard]] Sample next();
  [[nodiscard]] const SampleDomain& domain() const { return domain_; }

 private:
  std::mt19937_64 rng_;
  SampleDomain domain_;
  Bindings fixed_;
  std::set<std::string> free_;
};

class SamplingError : public std::runtime_error {
 public:
  SamplingError(const std::string& what, std::string sample)
      : std::runtime_error(what), sample_(std::move(sample)) {}
  [[nodiscard]] const std::string& sample() const { return sample_; }

 private:
  std::string sample_;
};

struct SampledMax {
  double max_abs = 0.0;
  Sample worst;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Evaluates `probe` at `count` accepted points and tracks the largest
/// magnitude. Points where the probe raises a domain error are redrawn; more
/// than 50 rejections per requested point is an error carrying the last bad
/// sample.
SampledMax sample_max(PointSampler& sampler, std::size_t count, const std::function<double(const Sample&)>& probe);

/// Parameters of `e` that `fixed` does not bind.
[[nodiscard]] std::set<std::string> free_parameters(const Expression& e, const Bindings& fixed);

}  // namespace nullgauge
