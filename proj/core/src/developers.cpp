#include "citygen/developers.hpp"

#include <algorithm>

#include "citygen/errors.hpp"

namespace citygen {

LandUse land_use_of(DeveloperKind kind) {
  return kind == DeveloperKind::Commercial ? LandUse::Commercial : LandUse::Residential;
}

double road_sign(DeveloperKind kind) { return kind == DeveloperKind::Commercial ? 1.0 : -1.0; }

void Overlay::build(Coord p, LandUse use, double density, double elevation) {
  entries_.push_back({p, {use, density}});
  added_sum_ += elevation_fixed(elevation);
  ++added_count_;
}

void Overlay::set_density(Coord p, LandUse use, double density) { entries_.push_back({p, {use, density}}); }

Overlay::PatchState Overlay::at(const LandUseGrid& landuse, Coord p) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->p == p) return it->state;
  }
  return {landuse.use(p), landuse.density(p)};
}

double Overlay::mean_developed_elevation(const WorldView& view) const {
  const std::int64_t count = view.landuse.developed_count() + added_count_;
  if (count == 0) return view.terrain.elevation(view.terrain.seed());
  return elevation_from_fixed_mean(view.landuse.developed_elevation_sum() + added_sum_, count);
}

namespace {

struct ValueTerms {
  double road = 0.0;
  double same_use = 0.0;
  double spread = 0.0;
  double water = 0.0;
  double band = 0.0;
};

ValueTerms value_terms(const WorldView& view, const Overlay& overlay, Coord p, DeveloperKind kind,
                       const SimParams& params) {
  if (!view.terrain.is_land(p)) throw ValueDomainError("land value requested on water");
  const int d = view.influence.raw(p);
  if (d == InfluenceField::kUnserviced || d > params.service_radius) {
    throw ValueDomainError("land value requested on an unserviced patch");
  }

  ValueTerms t;
  t.road = road_density(view.roads, p, params.density_radius);

  const LandUse own = land_use_of(kind);
  int cells = 0;
  int same = 0;
  int built = 0;
  double lo = 0.0;
  double hi = 0.0;
  for_each_in_window(view.landuse.uses(), p, 1, [&](Coord q) {
    ++cells;
    const auto s = overlay.at(view.landuse, q);
    if (s.use == own) ++same;
    if (is_built(s.use)) {
      lo = built == 0 ? s.density : std::min(lo, s.density);
      hi = built == 0 ? s.density : std::max(hi, s.density);
      ++built;
    }
  });
  t.same_use = static_cast<double>(same) / static_cast<double>(cells);
  t.spread = built >= 2 ? hi - lo : 0.0;

  const int wd = view.water_distance[p];
  if (wd != kNoWater) {
    t.water = std::max(0.0, 1.0 - static_cast<double>(wd) / static_cast<double>(params.service_radius));
  }

  const double mu = overlay.mean_developed_elevation(view);
  const double e = view.terrain.elevation(p);
  t.band = (e > mu && e <= mu + params.weights.elevation_band) ? 1.0 : 0.0;
  return t;
}

double combine(const ValueTerms& t, double sign, const ValueWeights& w) {
  return sign * w.w_road * t.road + w.w_cluster * t.same_use - w.w_disparity * t.spread + w.w_water * t.water +
         w.w_elevation * t.band;
}

}  // namespace

double land_value(const WorldView& view, const Overlay& overlay, Coord p, DeveloperKind kind,
                  const SimParams& params) {
  return combine(value_terms(view, overlay, p, kind, params), road_sign(kind), params.weights);
}

double land_value(const WorldView& view, Coord p, DeveloperKind kind, const SimParams& params) {
  return land_value(view, Overlay{}, p, kind, params);
}

double site_value(const WorldView& view, const Overlay& overlay, Coord p, DeveloperKind kind,
                  const SimParams& params) {
  const LandUse occupant = overlay.at(view.landuse, p).use;
  double sign = 0.0;
  if (occupant == LandUse::Commercial) sign = 1.0;
  if (occupant == LandUse::Residential) sign = -1.0;
  return combine(value_terms(view, overlay, p, kind, params), sign, params.weights);
}

ValueChange evaluate_build(const WorldView& view, const std::vector<Coord>& plot, DeveloperKind kind,
                           double density) {
  Overlay built;
  for (const Coord p : plot) built.build(p, land_use_of(kind), density, view.terrain.elevation(p));
  const Overlay none;
  ValueChange v;
  for (const Coord p : plot) {
    const SimParams& params = view.params.at(p);
    v.before += site_value(view, none, p, kind, params);
    v.after += site_value(view, built, p, kind, params);
  }
  return v;
}

ValueChange evaluate_densify(const WorldView& view, Coord p, double new_density) {
  const LandUse use = view.landuse.use(p);
  const DeveloperKind kind = use == LandUse::Commercial ? DeveloperKind::Commercial : DeveloperKind::Residential;
  const SimParams& params = view.params.at(p);
  Overlay denser;
  denser.set_density(p, use, new_density);
  return {site_value(view, Overlay{}, p, kind, params), site_value(view, denser, p, kind, params)};
}

bool buildable(const WorldView& view, Coord p) {
  if (!view.terrain.in_bounds(p) || !view.terrain.is_land(p)) return false;
  if (view.landuse.use(p) != LandUse::Empty || !view.serviced(p)) return false;
  const auto& spacing = view.params.at(p).grid_spacing;
  const Coord seed = view.roads.seed();
  auto on_lane = [&](int v, int s0) { return spacing && (v - s0) % *spacing == 0; };
  for (const Coord d : kNeighbors4) {
    const Coord r = p + d;
    if (!view.roads.is_road(r)) continue;
    if (view.roads.road_neighbor_count(r) <= 1) return false;
    if (on_lane(p.x, seed.x) || on_lane(p.y, seed.y)) return false;
  }
  return true;
}

bool fronts_road(const WorldView& view, const std::vector<Coord>& plot) {
  for (const Coord q : plot) {
    for (const Coord d : kNeighbors4) {
      if (view.roads.is_road(q + d)) return true;
    }
  }
  return false;
}

std::vector<Coord> suggest_plot(const WorldView& view, Coord anchor, RngStream& rng) {
  const int w = 1 + static_cast<int>(rng.below(2));
  const int h = 1 + static_cast<int>(rng.below(2));

  auto plot_ok = [&](int pw, int ph) {
    for (int dy = 0; dy < ph; ++dy) {
      for (int dx = 0; dx < pw; ++dx) {
        if (!buildable(view, {anchor.x + dx, anchor.y + dy})) return false;
      }
    }
    return true;
  };

  // Largest area first; wider before taller on ties.
  static constexpr std::pair<int, int> kShapes[] = {{2, 2}, {2, 1}, {1, 2}, {1, 1}};
  for (const auto& [pw, ph] : kShapes) {
    if (pw > w || ph > h || !plot_ok(pw, ph)) continue;
    std::vector<Coord> plot;
    for (int dy = 0; dy < ph; ++dy) {
      for (int dx = 0; dx < pw; ++dx) plot.push_back({anchor.x + dx, anchor.y + dy});
    }
    return plot;
  }
  return {anchor};
}

bool developer_may_stand(const WorldView& view, Coord p) {
  if (!view.terrain.in_bounds(p) || !view.terrain.is_land(p)) return false;
  const int leash = view.params.at(p).effective_max_developer_leash();
  bool found = false;
  for_each_in_window(view.roads.mask(), p, leash, [&](Coord q) { found = found || view.roads.mask()[q] != 0; });
  return found;
}

namespace {

Coord random_walk(const WorldView& view, Coord from, RngStream& rng, bool (*may_stand)(const WorldView&, Coord)) {
  Coord options[4];
  std::uint32_t n = 0;
  for (const Coord d : kNeighbors4) {
    const Coord q = from + d;
    if (may_stand(view, q)) options[n++] = q;
  }
  return n == 0 ? from : options[rng.below(n)];
}

}  // namespace

DeveloperAction developer_step(const Agent& agent, const WorldView& view, RngStream& rng) {
  const Coord p = agent.position;
  const DeveloperKind kind =
      agent.kind == AgentKind::Commercial ? DeveloperKind::Commercial : DeveloperKind::Residential;
  const SimParams& params = view.params.at(p);
  const LandUse use = view.landuse.use(p);

  if (buildable(view, p)) {
    auto plot = suggest_plot(view, p, rng);
    if (fronts_road(view, plot) && evaluate_build(view, plot, kind, params.density_step).improves()) {
      return DevBuild{std::move(plot), kind, params.density_step};
    }
  } else if (use == land_use_of(kind)) {
    const double next = view.landuse.density(p) + params.density_step;
    if (next <= params.max_density && evaluate_densify(view, p, next).improves()) {
      return DevDensify{p, next};
    }
  }
  return DevMoved{random_walk(view, p, rng, &developer_may_stand)};
}

}  // namespace citygen
