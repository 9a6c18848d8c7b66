#pragma once

#include <string>
#include <vector>

#include "sublab/measure.hpp"

namespace sublab {

enum class FamilyId {
  RadialBumps,
  ShellBumps,
  AxisConcentrated,
  GaussHermite,
  Constants,
  Mixed,
};

const char* family_id_name(FamilyId id);
FamilyId family_id_from_string(const std::string& name);

struct FamilyMember {
  std::string id;
  ScalarField field;
};

/// Fixed, versioned fixture: the parameter grids are deterministic so that
/// archived regression values stay stable.
struct TestFamily {
  FamilyId id = FamilyId::RadialBumps;
  std::string version = "v1";
  std::vector<FamilyMember> members;
};

/// Coordinate box containing the gauge ball {N <= R}.
Domain gauge_ball_box(const FrameSpec& frame, double R);

TestFamily make_family(FamilyId id, const MeasureSpec& measure,
                       int count_hint = 0);

/// Even/odd split by member index; parity 0 keeps members 0, 2, 4, ...
TestFamily split_family(const TestFamily& family, int parity);

/// First `count` members only.
TestFamily truncate_family(const TestFamily& family, std::size_t count);

}  // namespace sublab
