#include "evd/toy.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "evd/error.hpp"
#include "evd/helix.hpp"

namespace evd {

std::uint64_t prng_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Prng::next() { return prng_next(state); }

double Prng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

constexpr double kLayerHalfThickness = 0.25;

// Box-Muller; the second output of each pair is consumed by the next call.
class Gaussian {
 public:
  explicit Gaussian(Prng& prng) : prng_(prng) {}

  double operator()() {
    if (cached_) {
      const double v = *cached_;
      cached_.reset();
      return v;
    }
    double u1 = prng_.uniform();
    while (u1 == 0.0) u1 = prng_.uniform();
    const double u2 = prng_.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    return r * std::cos(a);
  }

 private:
  Prng& prng_;
  std::optional<double> cached_;
};

DetectorModel toy_detector(const ToyConfig& cfg) {
  Volume barrel;
  barrel.name = "barrel";
  for (std::size_t k = 0; k < cfg.layers.size(); ++k) {
    Volume layer;
    layer.name = "layer" + std::to_string(k + 1);
    const double r = cfg.layers[k];
    layer.shape = Tube{r - kLayerHalfThickness, r + kLayerHalfThickness, cfg.half_length_z};
    layer.color = {0.55, 0.6, 0.7, 0.25};
    barrel.children.push_back(std::move(layer));
  }
  DetectorModel d;
  d.root.children.push_back(std::move(barrel));
  return d;
}

// Path length at which the track leaves the outer layer or the |z| wall,
// whichever comes first; one full turn when it does neither.
double exit_path(HelixTrack t, const ToyConfig& cfg) {
  const double turn = 2.0 * std::numbers::pi / (t.kappa * std::cos(t.lambda));
  t.s_max = turn;
  std::optional<double> s_end = first_cylinder_crossing(t, cfg.layers.back());
  const double sl = std::sin(t.lambda);
  if (std::fabs(sl) > 1e-12) {
    const double s_wall = (std::copysign(cfg.half_length_z, sl) - t.origin.z) / sl;
    if (!s_end || s_wall < *s_end) s_end = s_wall;
  }
  return s_end ? *s_end : turn;
}

}  // namespace

void validate_toy_config(const ToyConfig& cfg) {
  if (cfg.n_tracks < 1) throw Error("n_tracks must be >= 1");
  if (!(cfg.b_field > 0) || !std::isfinite(cfg.b_field)) throw Error("b_field must be a finite value > 0");
  if (cfg.layers.empty()) throw Error("at least one layer radius is required");
  double prev = kLayerHalfThickness;
  for (double r : cfg.layers) {
    if (!(r > prev) || !std::isfinite(r))
      throw Error("layer radii must be strictly increasing and exceed the layer half-thickness 0.25 cm");
    prev = r;
  }
  if (!(cfg.half_length_z > 0) || !std::isfinite(cfg.half_length_z)) throw Error("half_length_z must be > 0");
  if (!(cfg.pt_range[0] > 0) || !(cfg.pt_range[0] <= cfg.pt_range[1]) || !std::isfinite(cfg.pt_range[1]))
    throw Error("pt_range must be positive and ordered");
  if (!(cfg.eta_range[0] <= cfg.eta_range[1]) || !std::isfinite(cfg.eta_range[0]) || !std::isfinite(cfg.eta_range[1]))
    throw Error("eta_range must be finite and ordered");
  if (!(cfg.smear_sigma >= 0) || !std::isfinite(cfg.smear_sigma)) throw Error("smear_sigma must be >= 0");
}

std::pair<DetectorModel, EventSet> generate_toy(const ToyConfig& cfg) {
  validate_toy_config(cfg);
  Event event;
  event.index = 0;
  event.meta["generator"] = "toy";
  event.meta["seed"] = std::to_string(cfg.seed);

  std::int64_t next_hit_id = 1;
  for (int k = 0; k < cfg.n_tracks; ++k) {
    Prng prng{cfg.seed ^ static_cast<std::uint64_t>(k + 1)};
    const double pt = cfg.pt_range[0] + (cfg.pt_range[1] - cfg.pt_range[0]) * prng.uniform();
    const double phi = -std::numbers::pi + 2.0 * std::numbers::pi * prng.uniform();
    const double eta = cfg.eta_range[0] + (cfg.eta_range[1] - cfg.eta_range[0]) * prng.uniform();
    const int charge = prng.uniform() < 0.5 ? -1 : 1;

    HelixTrack t;
    t.id = k + 1;
    t.lambda = std::numbers::pi / 2 - 2.0 * std::atan(std::exp(-eta));
    t.kappa = kPtPerKappa * cfg.b_field / pt;
    t.h = -charge;
    t.charge = charge;
    t.phi0 = wrap_angle(phi - t.h * std::numbers::pi / 2);
    t.s_min = 0;
    t.s_max = 1.2 * exit_path(t, cfg);

    Gaussian gauss(prng);
    for (std::size_t layer = 0; layer < cfg.layers.size(); ++layer) {
      const auto s = first_cylinder_crossing(t, cfg.layers[layer]);
      if (!s) continue;
      Vec3 p = point_at(t, *s);
      if (std::fabs(p.z) > cfg.half_length_z) continue;
      // Draws happen even for zero smear so the stream layout is fixed.
      const double dx = gauss(), dy = gauss(), dz = gauss();
      p = p + cfg.smear_sigma * Vec3{dx, dy, dz};
      Hit hit;
      hit.id = next_hit_id++;
      hit.position = p;
      hit.detector = static_cast<int>(layer + 1);
      hit.de = 1.0 / std::cos(t.lambda);
      hit.track_id = t.id;
      event.hits.push_back(hit);
      ++t.nhits;
    }
    event.tracks.push_back(std::move(t));
  }

  EventSet set;
  set.b_field = cfg.b_field;
  set.events.push_back(std::move(event));
  return {toy_detector(cfg), std::move(set)};
}

}  // namespace evd
