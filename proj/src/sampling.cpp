#include "nullgauge/sampling.hpp"

#include <cmath>
#include <sstream>

namespace nullgauge {

std::string describe(const Sample& s) {
  std::ostringstream os;
  os.precision(17);
  os << "x=" << s.state.x << " xdot=" << s.state.xdot << " xddot=" << s.state.xddot << " t=" << s.state.t;
  for (const auto& [k, v] : s.params.values()) os << ' ' << k << '=' << v;
  return os.str();
}

PointSampler::PointSampler(std::uint64_t seed, SampleDomain domain, Bindings fixed, std::set<std::string> free_parameters)
    : rng_(seed), domain_(domain), fixed_(std::move(fixed)), free_(std::move(free_parameters)) {}

Sample PointSampler::next() {
  auto draw = [this](const Interval& iv) {
    std::uniform_real_distribution<double> d(iv.lo, iv.hi);
    return d(rng_);
  };
  Sample s;
  s.state.x = draw(domain_.x);
  s.state.xdot = draw(domain_.xdot);
  s.state.xddot = draw(domain_.xddot);
  s.state.t = draw(domain_.t);
  s.params = fixed_;
  for (const auto& name : free_) s.params.set(name, draw(domain_.parameter));
  return s;
}

SampledMax sample_max(PointSampler& sampler, std::size_t count, const std::function<double(const Sample&)>& probe) {
  SampledMax out;
  const std::size_t budget = 50 * std::max<std::size_t>(count, 1);
  std::string last_error;
  Sample last_bad;
  while (out.accepted < count) {
    if (out.rejected > budget) {
      throw SamplingError("too many rejected samples (" + std::to_string(out.rejected) + "): " + last_error,
                          describe(last_bad));
    }
    Sample s = sampler.next();
    double v = 0.0;
    try {
      v = probe(s);
    } catch (const EvalError& e) {
      if (e.kind() != EvalError::Kind::domain) throw;
      ++out.rejected;
      last_error = e.what();
      last_bad = s;
      continue;
    }
    if (!std::isfinite(v)) {
      ++out.rejected;
      last_error = "non-finite probe value";
      last_bad = s;
      continue;
    }
    if (out.accepted == 0 || std::fabs(v) > out.max_abs) {
      out.max_abs = std::fabs(v);
      out.worst = s;
    }
    ++out.accepted;
  }
  return out;
}

std::set<std::string> free_parameters(const Expression& e, const Bindings& fixed) {
  std::set<std::string> out;
  for (const auto& p : parameters(e)) {
    if (!fixed.has(p)) out.insert(p);
  }
  return out;
}

}  // namespace nullgauge
