#include "certiq/phase_diagram.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "certiq/hash.hpp"
#include "json.hpp"

namespace certiq {

namespace {

// Gap-closing lines of the free-fermion solution: j2 = 1 + j1, j2 = 1 - j1 and
// j2 = -1 (|j1| <= 2). Kept identical to data/cluster_phases_v1.json.
constexpr std::string_view kDefaultSpec = R"({
  "version": 1,
  "domain": [-4.0, 4.0],
  "regions": [
    {"name": "trivial", "class": 0,
     "polygon": [[0.0, 1.0], [-2.0, -1.0], [2.0, -1.0]]},
    {"name": "ferromagnetic", "class": 1,
     "polygon": [[0.0, 1.0], [-3.0, 4.0], [-4.0, 4.0], [-4.0, -3.0]]},
    {"name": "antiferromagnetic", "class": 2,
     "polygon": [[0.0, 1.0], [4.0, -3.0], [4.0, 4.0], [3.0, 4.0]]},
    {"name": "spt_upper", "class": 3,
     "polygon": [[0.0, 1.0], [3.0, 4.0], [-3.0, 4.0]]},
    {"name": "spt_lower", "class": 3,
     "polygon": [[-2.0, -1.0], [-4.0, -3.0], [-4.0, -4.0], [4.0, -4.0], [4.0, -3.0], [2.0, -1.0]]}
  ]
})";

constexpr double kEdgeTol = 1e-12;

bool on_segment(const std::array<double, 2>& a, const std::array<double, 2>& b,
                double x, double y) {
  const double cross = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
  const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
  if (std::abs(cross) > kEdgeTol * std::max(1.0, len)) return false;
  return x >= std::min(a[0], b[0]) - kEdgeTol &&
         x <= std::max(a[0], b[0]) + kEdgeTol &&
         y >= std::min(a[1], b[1]) - kEdgeTol &&
         y <= std::max(a[1], b[1]) + kEdgeTol;
}

// Closed point-in-polygon: edges count as inside.
bool contains(const PhaseRegion& r, double x, double y) {
  const auto& v = r.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_segment(v[j], v[i], x, y)) return true;
    if ((v[i][1] > y) != (v[j][1] > y)) {
      const double xc =
          v[j][0] + (y - v[j][1]) * (v[i][0] - v[j][0]) / (v[i][1] - v[j][1]);
      if (x < xc) inside = !inside;
    }
  }
  return inside;
}

PhaseRegion region_from_json(const nlohmann::json& j) {
  PhaseRegion r;
  r.name = j.value("name", std::string{});
  r.label = j.at("class").get<int>();
  for (const auto& p : j.at("polygon")) {
    if (p.size() != 2) throw std::invalid_argument("polygon vertex needs 2 coordinates");
    r.vertices.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (r.vertices.size() < 3)
    throw std::invalid_argument("phase region '" + r.name + "' has fewer than 3 vertices");
  if (r.label < 0 || r.label > 3)
    throw std::invalid_argument("phase class must be in {0,1,2,3}");
  return r;
}

}  // namespace

std::string PhaseBoundarySpec::to_json() const {
  nlohmann::json regs = nlohmann::json::array();
  for (const auto& r : regions) {
    nlohmann::json poly = nlohmann::json::array();
    for (const auto& v : r.vertices) poly.push_back({v[0], v[1]});
    regs.push_back({{"name", r.name}, {"class", r.label}, {"polygon", poly}});
  }
  nlohmann::json doc{{"version", version}, {"domain", {lo, hi}}, {"regions", regs}};
  return doc.dump();
}

PhaseBoundarySpec PhaseBoundarySpec::from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  PhaseBoundarySpec spec;
  const nlohmann::json* regions = &doc;
  if (doc.is_object()) {
    spec.version = doc.value("version", 1);
    if (doc.contains("domain")) {
      spec.lo = doc["domain"].at(0).get<double>();
      spec.hi = doc["domain"].at(1).get<double>();
    }
    regions = &doc.at("regions");
  }
  if (spec.version != 1)
    throw std::invalid_argument("unsupported phase boundary version " +
                                std::to_string(spec.version));
  for (const auto& r : *regions) spec.regions.push_back(region_from_json(r));
  if (spec.regions.empty()) throw std::invalid_argument("phase spec has no regions");
  return spec;
}

PhaseBoundarySpec PhaseBoundarySpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open phase boundary file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::uint64_t PhaseBoundarySpec::hash() const { return fnv1a64(to_json()); }

std::string_view default_phase_spec_json() { return kDefaultSpec; }

const PhaseBoundarySpec& default_phase_spec() {
  static const PhaseBoundarySpec spec = PhaseBoundarySpec::from_json(kDefaultSpec);
  return spec;
}

int phase_label(double j1, double j2, const PhaseBoundarySpec& spec) {
  if (!(j1 >= spec.lo && j1 <= spec.hi && j2 >= spec.lo && j2 <= spec.hi))
    throw std::out_of_range("(j1, j2) outside the phase diagram domain");
  for (const auto& r : spec.regions)
    if (contains(r, j1, j2)) return r.label;
  throw std::out_of_range("no phase region contains the point");
}

}  // namespace certiq
