#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "evd/error.hpp"
#include "evd/model.hpp"
#include "evd/toy.hpp"
#include "oracles.hpp"

using namespace evd;

namespace {

std::set<std::string> keys(const AttributeMap& m) {
  std::set<std::string> out;
  for (const auto& [k, v] : m) out.insert(k);
  return out;
}

std::set<std::string> schema_names(ObjectKind kind) {
  const auto names = attribute_schema(kind).names();
  return {names.begin(), names.end()};
}

}  // namespace

TEST(AttributeSchema, FixedTables) {
  EXPECT_TRUE(attribute_schema(ObjectKind::track).contains("pt"));
  EXPECT_TRUE(attribute_schema(ObjectKind::track).contains("nhits"));
  EXPECT_TRUE(attribute_schema(ObjectKind::hit).contains("r"));
  EXPECT_EQ(schema_names(ObjectKind::track),
            (std::set<std::string>{"pt", "eta", "phi", "charge", "nhits", "chi2", "dca", "kappa", "length", "id"}));
  EXPECT_EQ(schema_names(ObjectKind::hit),
            (std::set<std::string>{"x", "y", "z", "r", "phi", "de", "detector", "track_id", "id"}));
  EXPECT_EQ(schema_names(ObjectKind::segment), (std::set<std::string>{"npoints", "length", "detector", "id"}));
}

TEST(AttributeSchema, UnknownKindThrows) {
  EXPECT_THROW(attribute_schema("jet"), Error);
  EXPECT_THROW(parse_object_kind("jet"), Error);
  EXPECT_EQ(attribute_schema("hit").kind, ObjectKind::hit);
}

TEST(AttributeSchema, NamesMatchComputedKeysForRandomObjects) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 100; ++i) {
    HelixTrack t = oracle::random_track(rng);
    if (i % 10 == 0) t.kappa = 0;
    EXPECT_EQ(keys(track_attributes(t, 0.5)), schema_names(ObjectKind::track));
    Hit h{i, {u(rng), u(rng), u(rng)}, i % 4, 1.0, -1, {}};
    EXPECT_EQ(keys(hit_attributes(h)), schema_names(ObjectKind::hit));
    Segment s{i, {{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}}, 1, {}};
    EXPECT_EQ(keys(segment_attributes(s)), schema_names(ObjectKind::segment));
  }
}

TEST(DerivedAttributes, EtaZeroAtZeroDip) {
  HelixTrack t;
  t.kappa = 0.01;
  t.lambda = 0;
  EXPECT_EQ(derived_track_attributes(t, 0.5).values.at("eta"), 0.0);
}

TEST(DerivedAttributes, PtFromCurvature) {
  HelixTrack t;
  t.kappa = 0.00149896229;
  EXPECT_NEAR(derived_track_attributes(t, 0.5).values.at("pt"), 1.0, 1e-9);
}

TEST(DerivedAttributes, DcaZeroForTrackThroughOrigin) {
  for (double phi0 : {-3.0, -1.0, 0.0, 0.4, 2.9}) {
    HelixTrack t;
    t.kappa = 0.01;
    t.phi0 = phi0;
    EXPECT_NEAR(derived_track_attributes(t, 0.5).values.at("dca"), 0.0, 1e-12);
  }
}

TEST(DerivedAttributes, EtaAtFortyFiveDegrees) {
  HelixTrack t;
  t.lambda = std::numbers::pi / 4;
  // -ln tan(pi/8), evaluated independently.
  EXPECT_NEAR(derived_track_attributes(t, 0.5).values.at("eta"), 0.881373587019543, 1e-12);
}

TEST(DerivedAttributes, StraightTrackSaturatesPt) {
  HelixTrack t;
  t.kappa = 0;
  t.origin = {3, 4, 0};
  t.phi0 = 0;  // heading +y, the line x = 3
  const auto d = derived_track_attributes(t, 0.5);
  EXPECT_TRUE(d.pt_saturated);
  EXPECT_EQ(d.values.at("pt"), std::numeric_limits<double>::max());
  EXPECT_NEAR(d.values.at("dca"), 3.0, 1e-12);
}

TEST(DerivedAttributes, DcaOfOffsetCircle) {
  // Circle of radius 10 centred at (20, 0): closest approach 10.
  HelixTrack t;
  t.kappa = 0.1;
  t.phi0 = std::numbers::pi;  // origin seen from the centre at azimuth pi
  t.origin = {10, 0, 0};
  EXPECT_NEAR(derived_track_attributes(t, 0.5).values.at("dca"), 10.0, 1e-12);
}

TEST(DerivedAttributes, PropertiesOverRandomTracks) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    HelixTrack t = oracle::random_track(rng);
    if (t.kappa == 0) t.kappa = 1e-3;
    const auto d = derived_track_attributes(t, 0.5);
    EXPECT_GT(d.values.at("pt"), 0);
    HelixTrack mirrored = t;
    mirrored.lambda = -t.lambda;
    EXPECT_NEAR(derived_track_attributes(mirrored, 0.5).values.at("eta"), -d.values.at("eta"), 1e-12);
    const double phi = d.values.at("phi");
    EXPECT_GE(phi, -std::numbers::pi);
    EXPECT_LT(phi, std::numbers::pi);
  }
}

TEST(Attributes, ExtrasNeverShadowBuiltins) {
  HelixTrack t;
  t.kappa = 0.01;
  t.extra = {{"pt", -1.0}, {"custom", 2.0}};
  const auto attrs = track_attributes(t, 0.5);
  EXPECT_NE(attrs.at("pt"), -1.0);
  EXPECT_EQ(attrs.at("custom"), 2.0);

  Event e;
  e.tracks.push_back(t);
  const auto v = validate_event(e);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].severity, Severity::warning);
}

TEST(Attributes, SegmentLengthSumsConsecutiveDistances) {
  Segment s{1, {{0, 0, 0}, {3, 4, 0}, {3, 4, 12}}, 0, {}};
  EXPECT_DOUBLE_EQ(segment_length(s), 17.0);
  Segment still{2, {{1, 1, 1}, {1, 1, 1}}, 0, {}};
  EXPECT_EQ(segment_length(still), 0.0);
}

TEST(ValidateEvent, WellFormedEventIsClean) {
  const auto [det, events] = generate_toy({});
  EXPECT_TRUE(validate_event(events.events[0]).empty());
}

TEST(ValidateEvent, DuplicateTrackIds) {
  Event e;
  HelixTrack t;
  t.id = 7;
  e.tracks = {t, t};
  const auto v = validate_event(e);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].collection, "tracks");
  EXPECT_EQ(v[0].id, 7);
  EXPECT_NE(v[0].message.find("duplicate id"), std::string::npos);
}

TEST(ValidateEvent, DanglingTrackId) {
  Event e;
  Hit h;
  h.track_id = 99;
  e.hits.push_back(h);
  const auto v = validate_event(e);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].message.find("dangling track_id"), std::string::npos);
}

TEST(ValidateEvent, FieldInvariants) {
  Event e;
  HelixTrack t;
  t.kappa = -1;
  t.h = 0;
  t.lambda = std::numbers::pi / 2;
  t.s_min = 2;
  t.s_max = 1;
  e.tracks.push_back(t);
  Hit h;
  h.de = -1;
  e.hits.push_back(h);
  Segment s{1, {{0, 0, 0}}, 0, {}};
  e.segments.push_back(s);
  EXPECT_EQ(validate_event(e).size(), 6u);
}

TEST(ValidateEvent, IdempotentAndPure) {
  Event e;
  HelixTrack t;
  e.tracks = {t, t};
  Hit h;
  h.track_id = 5;
  e.hits.push_back(h);
  const Event before = e;
  EXPECT_EQ(validate_event(e), validate_event(e));
  EXPECT_EQ(e, before);
}

TEST(VolumeLookup, Paths) {
  const auto [det, events] = generate_toy({});
  ASSERT_NE(volume_lookup(det, "detector"), nullptr);
  EXPECT_EQ(volume_lookup(det, "detector"), &det.root);
  const Volume* layer1 = volume_lookup(det, "detector/barrel/layer1");
  ASSERT_NE(layer1, nullptr);
  ASSERT_TRUE(layer1->shape.has_value());
  const auto& tube = std::get<Tube>(*layer1->shape);
  EXPECT_EQ(tube.rmin, 9.75);
  EXPECT_EQ(tube.rmax, 10.25);
  EXPECT_EQ(volume_lookup(det, "detector/nope"), nullptr);
  EXPECT_EQ(volume_lookup(det, "barrel"), nullptr);
}

TEST(VolumeLookup, EveryFullPathResolvesToItsVolume) {
  DetectorModel d;
  std::mt19937_64 rng(3);
  // Random tree of 60 volumes.
  std::vector<std::vector<std::size_t>> path_indices{{}};
  for (int i = 0; i < 60; ++i) {
    const auto& parent_path = path_indices[std::uniform_int_distribution<std::size_t>(0, path_indices.size() - 1)(rng)];
    Volume* parent = &d.root;
    for (std::size_t k : parent_path) parent = &parent->children[k];
    Volume v;
    v.name = "v" + std::to_string(i);
    parent->children.push_back(v);
    auto p = parent_path;
    p.push_back(parent->children.size() - 1);
    path_indices.push_back(p);
  }
  EXPECT_TRUE(validate_detector(d).empty());
  std::size_t visited = 0;
  for_each_volume(d, [&](const Volume& v, const std::string& path) {
    EXPECT_EQ(volume_lookup(d, path), &v) << path;
    ++visited;
  });
  EXPECT_EQ(visited, 61u);
}

TEST(Shapes, Violations) {
  EXPECT_TRUE(shape_violation(Tube{0, 10, 20}).empty());
  EXPECT_FALSE(shape_violation(Tube{10, 10, 20}).empty());
  EXPECT_FALSE(shape_violation(Tube{-1, 10, 20}).empty());
  EXPECT_FALSE(shape_violation(Box{1, 0, 1}).empty());
  EXPECT_FALSE(shape_violation(Cone{0, 1, 2, 1, 5}).empty());
  EXPECT_FALSE(shape_violation(Box{1, 1, std::nan("")}).empty());
}

TEST(Detector, ValidationFindsSlashAndDuplicateNames) {
  DetectorModel d;
  Volume a;
  a.name = "a/b";
  Volume b;
  b.name = "x";
  d.root.children = {a, b, b};
  EXPECT_EQ(validate_detector(d).size(), 2u);
}

TEST(WrapAngle, HalfOpenRange) {
  EXPECT_EQ(wrap_angle(std::numbers::pi), -std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-15);
  EXPECT_EQ(wrap_angle(0.5), 0.5);
}
