#pragma once

#include <variant>
#include <vector>

#include "citygen/agents.hpp"
#include "citygen/landuse.hpp"
#include "citygen/rng.hpp"
#include "citygen/view.hpp"

namespace citygen {

enum class DeveloperKind : std::uint8_t { Commercial, Residential };

LandUse land_use_of(DeveloperKind kind);
/// +1 for Commercial, -1 for Residential.
double road_sign(DeveloperKind kind);

/// Hypothetical edits layered over the committed land use, so that values can
/// be evaluated "as if" a plot were built without touching the world.
class Overlay {
 public:
  struct PatchState {
    LandUse use;
    double density;
  };

  void build(Coord p, LandUse use, double density, double elevation);
  void set_density(Coord p, LandUse use, double density);

  PatchState at(const LandUseGrid& landuse, Coord p) const;
  /// Mean developed elevation with the overlay applied (seed elevation if none).
  double mean_developed_elevation(const WorldView& view) const;

 private:
  struct Entry {
    Coord p;
    PatchState state;
  };
  std::vector<Entry> entries_;
  std::int64_t added_sum_ = 0;
  std::int64_t added_count_ = 0;
};

/// The additive value of a patch:
///
///   s * w_road * road_density + w_cluster * same_use_fraction
///     - w_disparity * density_spread + w_water * water_proximity
///     + w_elevation * band_bonus
///
/// with s = +1 (Commercial) / -1 (Residential). same_use_fraction and
/// density_spread are taken over the 3x3 block centred on p (p included,
/// clipped at the border); band_bonus is 1 when elevation lies in
/// (mu, mu + elevation_band] for mu the mean developed elevation.
/// Throws ValueDomainError if p is water or unserviced.
double land_value(const WorldView& view, const Overlay& overlay, Coord p, DeveloperKind kind,
                  const SimParams& params);
double land_value(const WorldView& view, Coord p, DeveloperKind kind, const SimParams& params);

/// Value of p as currently occupied: the land_value formula for `kind`, except
/// that the road-density term only applies once p is actually built (its sign
/// then follows the occupant). An Empty patch expresses no road preference.
double site_value(const WorldView& view, const Overlay& overlay, Coord p, DeveloperKind kind,
                  const SimParams& params);

struct ValueChange {
  double before = 0.0;
  double after = 0.0;
  bool improves() const { return after > before; }
};

/// Plot-summed site value before and after building `plot` at `density`.
/// Each patch is valued with the parameters resolved at that patch.
ValueChange evaluate_build(const WorldView& view, const std::vector<Coord>& plot, DeveloperKind kind,
                           double density);
/// Site value of a built patch before and after moving to new_density.
ValueChange evaluate_densify(const WorldView& view, Coord p, double new_density);

/// Empty, serviced Land that is not held open for road access. A patch next
/// to a road is held open when that road patch has at most one road neighbor
/// (dead end or lone seed), or when the patch lies on an access lane: the
/// lines x = seed.x + i*grid_spacing and y = seed.y + j*grid_spacing.
bool buildable(const WorldView& view, Coord p);
/// Some patch of the plot is 4-adjacent to a road.
bool fronts_road(const WorldView& view, const std::vector<Coord>& plot);

/// Rectangle with top-left corner at anchor, dimensions drawn from {1,2}x{1,2},
/// shrunk to the largest sub-rectangle (wider first on ties) whose patches are
/// all buildable. Always contains the anchor.
std::vector<Coord> suggest_plot(const WorldView& view, Coord anchor, RngStream& rng);

struct DevMoved {
  Coord position;
};
struct DevBuild {
  std::vector<Coord> plot;
  DeveloperKind kind;
  double density;
};
struct DevDensify {
  Coord position;
  double new_density;
};
using DeveloperAction = std::variant<DevMoved, DevBuild, DevDensify>;

/// Whether a developer may stand at p: Land within the leash of some road.
bool developer_may_stand(const WorldView& view, Coord p);

DeveloperAction developer_step(const Agent& agent, const WorldView& view, RngStream& rng);

}  // namespace citygen
