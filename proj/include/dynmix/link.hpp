#pragma once

#include <algorithm>
#include <string>

#include "dynmix/errors.hpp"
#include "dynmix/mathfn.hpp"

namespace dynmix {

enum class LinkKind { logit, probit, identity };

// Map between the unconstrained level scale and the weight scale.
// For the two probability links the inverse is clamped to
// [1e-12, 1 - 1e-12] so downstream Bernoulli/binomial log-likelihoods
// stay finite; the identity link passes values through untouched.
struct Link {
  LinkKind kind = LinkKind::logit;

  static constexpr double kClampLo = 1e-12;
  static constexpr double kClampHi = 1.0 - 1e-12;

  double forward(double alpha) const {
    switch (kind) {
      case LinkKind::logit:
        return logit(alpha);
      case LinkKind::probit:
        return normal_quantile(alpha);
      case LinkKind::identity:
        return alpha;
    }
    throw Error("forward: unknown link");
  }

  double inverse(double theta) const {
    switch (kind) {
      case LinkKind::logit:
        return std::clamp(logistic(theta), kClampLo, kClampHi);
      case LinkKind::probit:
        return std::clamp(normal_cdf(theta), kClampLo, kClampHi);
      case LinkKind::identity:
        return theta;
    }
    throw Error("inverse: unknown link");
  }
};

inline LinkKind parse_link(const std::string& name) {
  if (name == "logit") return LinkKind::logit;
  if (name == "probit") return LinkKind::probit;
  if (name == "identity") return LinkKind::identity;
  throw ConfigError("unknown link: " + name);
}

inline std::string link_name(LinkKind kind) {
  switch (kind) {
    case LinkKind::logit:
      return "logit";
    case LinkKind::probit:
      return "probit";
    case LinkKind::identity:
      return "identity";
  }
  return "?";
}

}  // namespace dynmix
