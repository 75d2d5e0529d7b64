// Copyright 2026 The Locus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "locus/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "locus/error.hpp"
#include "rng.hpp"

namespace locus {
namespace {

using detail::Rng;
using detail::mix_seed;
using Vec2 = Eigen::Vector2d;

constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kGroundStream = 0xffffffffULL;

double surface_area(Primitive type, const Vec3& h) {
  switch (type) {
    case Primitive::box:
      return 8.0 * (h.x() * h.y() + h.x() * h.z() + h.y() * h.z());
    case Primitive::cylinder:
      return 2.0 * std::numbers::pi * h.x() * (2.0 * h.z()) +
             2.0 * std::numbers::pi * h.x() * h.x();
    case Primitive::ellipsoid: {
      // Knud Thomsen's approximation, within ~1%.
      constexpr double p = 1.6075;
      const double ap = std::pow(h.x(), p), bp = std::pow(h.y(), p), cp = std::pow(h.z(), p);
      return 4.0 * std::numbers::pi * std::pow((ap * bp + ap * cp + bp * cp) / 3.0, 1.0 / p);
    }
  }
  return 0.0;
}

struct SurfacePoint {
  Vec3 point;
  Vec3 normal;  // outward, not necessarily unit
};

SurfacePoint sample_box(const Vec3& h, Rng& rng) {
  const double ax = h.y() * h.z(), ay = h.x() * h.z(), az = h.x() * h.y();
  const double pick = rng.uniform() * (ax + ay + az);
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
  if (pick < ax) return {{sign * h.x(), u * h.y(), v * h.z()}, {sign, 0.0, 0.0}};
  if (pick < ax + ay) return {{u * h.x(), sign * h.y(), v * h.z()}, {0.0, sign, 0.0}};
  return {{u * h.x(), v * h.y(), sign * h.z()}, {0.0, 0.0, sign}};
}

SurfacePoint sample_cylinder(const Vec3& h, Rng& rng) {
  const double r = h.x();
  const double side = 2.0 * std::numbers::pi * r * 2.0 * h.z();
  const double caps = 2.0 * std::numbers::pi * r * r;
  const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
  if (rng.uniform() * (side + caps) < side) {
    return {{r * std::cos(theta), r * std::sin(theta), rng.uniform(-h.z(), h.z())},
            {std::cos(theta), std::sin(theta), 0.0}};
  }
  const double rho = r * std::sqrt(rng.uniform());
  const double z = rng.uniform() < 0.5 ? -h.z() : h.z();
  return {{rho * std::cos(theta), rho * std::sin(theta), z}, {0.0, 0.0, z > 0.0 ? 1.0 : -1.0}};
}

SurfacePoint sample_ellipsoid(const Vec3& h, Rng& rng) {
  // Map the unit sphere and reject by the local area stretch so samples are
  // uniform over the ellipsoid surface.
  const double a = h.x(), b = h.y(), c = h.z();
  const double g_max = std::max({a * b, a * c, b * c});
  while (true) {
    Vec3 u(rng.normal(), rng.normal(), rng.normal());
    const double n = u.norm();
    if (n < 1e-12) continue;
    u /= n;
    const double g = std::sqrt(std::pow(b * c * u.x(), 2) + std::pow(a * c * u.y(), 2) +
                               std::pow(a * b * u.z(), 2));
    if (rng.uniform() * g_max <= g) {
      const Vec3 p(a * u.x(), b * u.y(), c * u.z());
      return {p, {p.x() / (a * a), p.y() / (b * b), p.z() / (c * c)}};
    }
  }
}

SurfacePoint sample_surface(Primitive type, const Vec3& h, Rng& rng) {
  switch (type) {
    case Primitive::box: return sample_box(h, rng);
    case Primitive::cylinder: return sample_cylinder(h, rng);
    case Primitive::ellipsoid: return sample_ellipsoid(h, rng);
  }
  return {Vec3::Zero(), Vec3::UnitZ()};
}

double footprint_radius(const WorldObject& o) { return std::hypot(o.half_extents.x(), o.half_extents.y()); }

struct Polyline {
  std::vector<Vec2> points;
  std::vector<double> cumulative;  // arc length at each point

  double length() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

  // Position and unit direction at arc length s in [0, length].
  std::pair<Vec2, Vec2> at(double s) const {
    if (points.size() == 1 || length() == 0.0) return {points.front(), Vec2::UnitX()};
    s = std::clamp(s, 0.0, length());
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
    std::size_t seg = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
    seg = std::clamp<std::size_t>(seg, 1, points.size() - 1) - 1;
    // Skip zero-length pieces.
    while (seg + 1 < points.size() - 1 && cumulative[seg + 1] - cumulative[seg] <= 0.0) ++seg;
    const Vec2 a = points[seg], b = points[seg + 1];
    const double piece = cumulative[seg + 1] - cumulative[seg];
    const Vec2 dir = piece > 0.0 ? Vec2((b - a) / piece) : Vec2::UnitX();
    return {a + dir * (s - cumulative[seg]), dir};
  }

  double distance_to(const Vec2& p) const {
    double best = std::numeric_limits<double>::infinity();
    if (points.size() == 1) return (p - points.front()).norm();
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      const Vec2 a = points[i], ab = points[i + 1] - a;
      const double len2 = ab.squaredNorm();
      const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
      best = std::min(best, (p - (a + t * ab)).norm());
    }
    return best;
  }
};

Polyline make_polyline(const SyntheticSpec& spec) {
  Polyline line;
  line.points = spec.waypoints;
  if (spec.closed_loop && line.points.size() >= 2) line.points.push_back(line.points.front());
  line.cumulative.resize(line.points.size(), 0.0);
  for (std::size_t i = 1; i < line.points.size(); ++i) {
    line.cumulative[i] = line.cumulative[i - 1] + (line.points[i] - line.points[i - 1]).norm();
  }
  return line;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::parameter, "synthetic spec: " + what);
}

}  // namespace

const char* to_string(Primitive p) {
  switch (p) {
    case Primitive::box: return "box";
    case Primitive::cylinder: return "cylinder";
    case Primitive::ellipsoid: return "ellipsoid";
  }
  return "?";
}

Primitive primitive_from_string(const std::string& name) {
  if (name == "box") return Primitive::box;
  if (name == "cylinder") return Primitive::cylinder;
  if (name == "ellipsoid") return Primitive::ellipsoid;
  throw Error(ErrorCode::parameter, "unknown primitive '" + name + "'");
}

void to_json(nlohmann::json& j, const SyntheticSpec& s) {
  nlohmann::json wps = nlohmann::json::array();
  for (const auto& w : s.waypoints) wps.push_back({w.x(), w.y()});
  nlohmann::json prims = nlohmann::json::array();
  for (auto p : s.primitives) prims.push_back(to_string(p));
  j = nlohmann::json{{"waypoints", wps},
                     {"closed_loop", s.closed_loop},
                     {"speed", s.speed},
                     {"frame_period", s.frame_period},
                     {"frame_count", s.frame_count},
                     {"lap_lateral_offset", s.lap_lateral_offset},
                     {"objects_per_scene", s.objects_per_scene},
                     {"scene_length", s.scene_length},
                     {"primitives", prims},
                     {"template_count", s.template_count},
                     {"min_half_extent", s.min_half_extent},
                     {"max_half_extent", s.max_half_extent},
                     {"object_base_height", s.object_base_height},
                     {"min_lateral", s.min_lateral},
                     {"max_lateral", s.max_lateral},
                     {"min_object_gap", s.min_object_gap},
                     {"sensor_height", s.sensor_height},
                     {"max_range", s.max_range},
                     {"point_density", s.point_density},
                     {"ground_points", s.ground_points},
                     {"visible_only", s.visible_only},
                     {"falloff_range", s.falloff_range},
                     {"noise_stddev", s.noise_stddev}};
}

void from_json(const nlohmann::json& j, SyntheticSpec& s) {
  if (!j.is_object()) throw Error(ErrorCode::parameter, "synthetic spec must be an object");
  SyntheticSpec out;
  nlohmann::json defaults = out;
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) {
      throw Error(ErrorCode::parameter, "synthetic spec: unknown key '" + key + "'");
    }
  }
  try {
    if (j.contains("waypoints")) {
      out.waypoints.clear();
      for (const auto& w : j.at("waypoints")) {
        if (!w.is_array() || w.size() != 2) {
          throw Error(ErrorCode::parameter, "synthetic spec: waypoint must be [x, y]");
        }
        out.waypoints.emplace_back(w[0].get<double>(), w[1].get<double>());
      }
    }
    if (j.contains("primitives")) {
      out.primitives.clear();
      for (const auto& p : j.at("primitives")) out.primitives.push_back(primitive_from_string(p.get<std::string>()));
    }
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("closed_loop", out.closed_loop);
    get("speed", out.speed);
    get("frame_period", out.frame_period);
    get("frame_count", out.frame_count);
    get("lap_lateral_offset", out.lap_lateral_offset);
    get("objects_per_scene", out.objects_per_scene);
    get("scene_length", out.scene_length);
    get("template_count", out.template_count);
    get("min_half_extent", out.min_half_extent);
    get("max_half_extent", out.max_half_extent);
    get("object_base_height", out.object_base_height);
    get("min_lateral", out.min_lateral);
    get("max_lateral", out.max_lateral);
    get("min_object_gap", out.min_object_gap);
    get("sensor_height", out.sensor_height);
    get("max_range", out.max_range);
    get("point_density", out.point_density);
    get("ground_points", out.ground_points);
    get("visible_only", out.visible_only);
    get("falloff_range", out.falloff_range);
    get("noise_stddev", out.noise_stddev);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parameter, std::string("synthetic spec: ") + e.what());
  }
  validate(out);
  s = std::move(out);
}

void validate(const SyntheticSpec& s) {
  require(!s.waypoints.empty(), "trajectory has no waypoints");
  for (const auto& w : s.waypoints) require(w.allFinite(), "non-finite waypoint");
  require(s.speed > 0.0, "speed must be > 0");
  require(s.frame_period > 0.0, "frame_period must be > 0");
  require(!s.primitives.empty(), "primitives list is empty");
  require(s.min_half_extent > 0.0 && s.max_half_extent >= s.min_half_extent,
          "half extent range invalid");
  require(s.min_lateral >= 0.0 && s.max_lateral >= s.min_lateral, "lateral range invalid");
  require(s.scene_length > 0.0, "scene_length must be > 0");
  require(s.max_range > 0.0, "max_range must be > 0");
  require(s.point_density > 0.0, "point_density must be > 0");
  require(s.noise_stddev >= 0.0, "noise_stddev must be >= 0");
  require(s.falloff_range >= 0.0, "falloff_range must be >= 0");
  require(s.object_base_height >= 0.0, "object_base_height must be >= 0");
  require(s.min_object_gap >= 0.0, "min_object_gap must be >= 0");
}

std::vector<Eigen::Vector2d> rectangle_loop(double width, double height) {
  return {{0.0, 0.0}, {width, 0.0}, {width, height}, {0.0, height}};
}

SyntheticScene::SyntheticScene(SyntheticSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  validate(spec_);
  build_trajectory();
  place_objects();
}

void SyntheticScene::build_trajectory() {
  const Polyline line = make_polyline(spec_);
  const double length = line.length();
  const double step = spec_.speed * spec_.frame_period;

  std::size_t count = spec_.frame_count;
  if (count == 0) {
    if (length == 0.0) {
      count = 1;
    } else if (spec_.closed_loop) {
      count = static_cast<std::size_t>(std::floor(length / step));
    } else {
      count = static_cast<std::size_t>(std::floor(length / step)) + 1;
    }
    count = std::max<std::size_t>(count, 1);
  }

  poses_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double s = step * static_cast<double>(i);
    Vec2 pos = line.points.front();
    Vec2 dir = Vec2::UnitX();
    std::size_t lap = 0;
    if (length > 0.0) {
      lap = static_cast<std::size_t>(std::floor(s / length));
      double along = s - static_cast<double>(lap) * length;
      bool reversed = false;
      if (!spec_.closed_loop && lap % 2 == 1) {
        along = length - along;
        reversed = true;
      }
      std::tie(pos, dir) = line.at(along);
      if (reversed) dir = -dir;
    }
    const Vec2 left(-dir.y(), dir.x());
    pos += left * (spec_.lap_lateral_offset * static_cast<double>(lap));
    const double yaw = std::atan2(dir.y(), dir.x());
    poses_[i] = Pose::from_yaw(yaw, Vec3(pos.x(), pos.y(), spec_.sensor_height));
  }
}

void SyntheticScene::place_objects() {
  const Polyline line = make_polyline(spec_);
  const double length = line.length();
  Rng rng(mix_seed(seed_, kPlacementStream));

  std::size_t target = spec_.objects_per_scene;
  if (length > 0.0) {
    target = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec_.objects_per_scene) * length / spec_.scene_length));
    target = std::max<std::size_t>(target, spec_.objects_per_scene > 0 ? 1 : 0);
  }

  auto random_shape = [&](Primitive& type, Vec3& h) {
    type = spec_.primitives[rng.index(spec_.primitives.size())];
    const double lo = spec_.min_half_extent, hi = spec_.max_half_extent;
    switch (type) {
      case Primitive::box:
        h = Vec3(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
        break;
      case Primitive::cylinder: {
        const double r = rng.uniform(lo, hi);
        h = Vec3(r, r, rng.uniform(lo, hi));
        break;
      }
      case Primitive::ellipsoid:
        h = Vec3(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
        break;
    }
  };

  std::vector<std::pair<Primitive, Vec3>> templates(spec_.template_count);
  for (auto& [type, h] : templates) random_shape(type, h);

  const std::size_t max_attempts = 2000 * std::max<std::size_t>(target, 1);
  for (std::size_t attempt = 0; attempt < max_attempts && objects_.size() < target; ++attempt) {
    WorldObject o;
    o.id = static_cast<int>(objects_.size());
    if (templates.empty()) {
      random_shape(o.type, o.half_extents);
    } else {
      const auto& t = templates[rng.index(templates.size())];
      o.type = t.first;
      o.half_extents = t.second;
    }
    o.yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);

    Vec2 xy;
    if (length > 0.0) {
      const auto [base, dir] = line.at(rng.uniform(0.0, length));
      const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
      xy = base + Vec2(-dir.y(), dir.x()) * side * rng.uniform(spec_.min_lateral, spec_.max_lateral);
    } else {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      xy = line.points.front() +
           Vec2(std::cos(angle), std::sin(angle)) * rng.uniform(spec_.min_lateral, spec_.max_lateral);
    }
    if (line.distance_to(xy) < spec_.min_lateral) continue;
    o.center = Vec3(xy.x(), xy.y(), spec_.object_base_height + o.half_extents.z());

    const bool clear = std::none_of(objects_.begin(), objects_.end(), [&](const WorldObject& other) {
      const double gap = (other.center.head<2>() - o.center.head<2>()).norm() -
                         footprint_radius(other) - footprint_radius(o);
      return gap < spec_.min_object_gap;
    });
    if (clear) objects_.push_back(o);
  }
}

LabeledFrame SyntheticScene::render(std::size_t index) const {
  const Pose& pose = poses_.at(index);
  const Pose to_sensor = pose.inverse();
  const Vec3 sensor = pose.translation;
  Rng noise(mix_seed(seed_, mix_seed(index, 0x6e6f697365ULL)));

  LabeledFrame out;
  out.frame.frame_index = index;
  out.frame.timestamp = timestamp(index);

  auto emit = [&](const Vec3& world, int label) {
    Vec3 p = to_sensor.apply(world);
    if (spec_.noise_stddev > 0.0) {
      p += spec_.noise_stddev * Vec3(noise.normal(), noise.normal(), noise.normal());
    }
    out.frame.points.push_back(p);
    out.labels.push_back(label);
  };

  for (const auto& o : objects_) {
    if ((o.center.head<2>() - sensor.head<2>()).norm() > spec_.max_range) continue;
    Rng rng(mix_seed(seed_, mix_seed(index, static_cast<std::uint64_t>(o.id) + 2)));
    const auto count = static_cast<std::size_t>(
        std::max(1.0, std::round(surface_area(o.type, o.half_extents) * spec_.point_density)));
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(o.yaw, Vec3::UnitZ()).toRotationMatrix();
    const double range = (o.center - sensor).norm();
    const double keep = spec_.falloff_range > 0.0 && range > spec_.falloff_range
                            ? std::pow(spec_.falloff_range / range, 2.0)
                            : 1.0;
    for (std::size_t k = 0; k < count; ++k) {
      const SurfacePoint sp = sample_surface(o.type, o.half_extents, rng);
      const Vec3 world = rot * sp.point + o.center;
      // Thinning draw happens for every sample so the stream stays aligned.
      const bool thinned = rng.uniform() >= keep;
      if (spec_.visible_only && (rot * sp.normal).dot(sensor - world) <= 0.0) continue;
      if (thinned) continue;
      emit(world, o.id);
    }
  }

  Rng ground(mix_seed(seed_, mix_seed(index, kGroundStream)));
  for (std::size_t k = 0; k < spec_.ground_points; ++k) {
    const double r = spec_.max_range * std::sqrt(ground.uniform());
    const double a = ground.uniform(0.0, 2.0 * std::numbers::pi);
    emit(Vec3(sensor.x() + r * std::cos(a), sensor.y() + r * std::sin(a), 0.0), -1);
  }
  return out;
}

Sequence generate_synthetic_sequence(const SyntheticSpec& spec, std::uint64_t seed) {
  const SyntheticScene scene(spec, seed);
  Sequence seq;
  seq.frames.reserve(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    auto labeled = scene.render(i);
    seq.frames.push_back(std::move(labeled.frame));
    seq.point_labels.push_back(std::move(labeled.labels));
    seq.poses.push_back(scene.pose(i));
    seq.ground_truth_positions.push_back(scene.pose(i).translation);
  }
  return seq;
}

SyntheticSpec looped_benchmark_spec() {
  SyntheticSpec s;
  s.waypoints = rectangle_loop(100.0, 50.0);
  s.frame_count = 200;
  s.lap_lateral_offset = 1.0;
  s.noise_stddev = 0.02;
  return s;
}

}  // namespace locus
