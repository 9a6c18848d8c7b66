#pragma once

#include <Eigen/Core>

#include "sublab/errors.hpp"

namespace sublab {

/// Coordinate box lo <= v <= hi. Ball-like regions enter integrals through
/// indicator weights, not through the domain itself.
struct Domain {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Domain() = default;
  Domain(Eigen::VectorXd lo_, Eigen::VectorXd hi_)
      : lo(std::move(lo_)), hi(std::move(hi_)) {
    validate();
  }

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const { return (hi - lo).prod(); }
  bool contains(const Eigen::VectorXd& v) const {
    return (v.array() >= lo.array()).all() && (v.array() <= hi.array()).all();
  }
  void validate() const {
    if (lo.size() != hi.size() || lo.size() == 0 ||
        !((lo.array() < hi.array()).all()))
      fail(ErrorCode::BadDimension, "domain requires lo < hi componentwise");
  }

  static Domain centered_box(const Eigen::VectorXd& halfwidths) {
    return Domain(-halfwidths, halfwidths);
  }
};

}  // namespace sublab
