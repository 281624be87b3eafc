#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace certiq {

/// One labelled polygon over the (j1, j2) plane.
struct PhaseRegion {
  std::string name;
  int label = 0;
  std::vector<std::array<double, 2>> vertices;  // (j1, j2), either winding
};

/// Piecewise-linear phase boundaries as labelled polygons. Regions are tested
/// in order and the first one containing the point (boundary included) wins.
struct PhaseBoundarySpec {
  int version = 1;
  double lo = -4.0;
  double hi = 4.0;
  std::vector<PhaseRegion> regions;

  std::string to_json() const;
  static PhaseBoundarySpec from_json(std::string_view text);
  static PhaseBoundarySpec load(const std::string& path);

  /// FNV-1a of the canonical JSON.
  std::uint64_t hash() const;
};

/// Boundaries shipped with the library (also in data/cluster_phases_v1.json).
const PhaseBoundarySpec& default_phase_spec();
std::string_view default_phase_spec_json();

/// Throws std::out_of_range outside [lo, hi]^2 or when no region matches.
int phase_label(double j1, double j2, const PhaseBoundarySpec& spec);

}  // namespace certiq
