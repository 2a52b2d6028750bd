#include <cmath>
#include <random>

#include <doctest.h>

#include "posemine/distance.hpp"
#include "posemine/types.hpp"
#include "support/oracles.hpp"

using namespace posemine;

namespace {

Pose make_pose(std::initializer_list<Point2> pts) {
  Pose p;
  p.joints = pts;
  return p;
}

Pose add_noise(const Pose& p, std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  Pose out = p;
  for (auto& j : out.joints) {
    j.x += n(rng);
    j.y += n(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("alignment recovers a known rotation and scale exactly") {
  const Pose reference = make_pose({{0, 0}, {2, 0}, {0, 2}});
  // The reference rotated by +90 degrees and doubled; aligning it back needs
  // scale 1/2 and rotation -90 degrees.
  const Pose pose = make_pose({{0, 0}, {0, 4}, {-4, 0}});

  const AlignResult r = align(reference, pose);
  CHECK(r.mse == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.transform.scale() == doctest::Approx(0.5));
  CHECK(r.transform.rotation() == doctest::Approx(-M_PI / 2.0));

  const Pose mapped = r.transform.apply(pose);
  for (std::size_t i = 0; i < reference.size(); ++i) {
    CHECK(mapped.joints[i].x == doctest::Approx(reference.joints[i].x));
    CHECK(mapped.joints[i].y == doctest::Approx(reference.joints[i].y));
  }
}

TEST_CASE("aligning any similarity-transformed copy is residual free") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Pose p = oracle::random_pose(rng, 14);
    const SimilarityTransform t = oracle::random_transform(rng);
    const AlignResult r = align(p, t.apply(p));
    CHECK(r.mse < 1e-9);
  }
}

TEST_CASE("alignment matches the grid-search minimizer") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const std::size_t joints = (i % 2 == 0) ? 14 : 3;
    const Pose reference = oracle::random_pose(rng, joints);
    const Pose pose = add_noise(oracle::random_transform(rng).apply(reference),
                                rng, 5.0);
    const double fast = align(reference, pose).mse;
    const oracle::GridAlignResult slow = oracle::grid_align(reference, pose);
    CHECK(fast <= slow.mse + 1e-9);  // closed form can only be better
    CHECK(std::abs(fast - slow.mse) < 1e-6);
  }
}

TEST_CASE("directed residual depends quadratically on the reference extent") {
  std::mt19937_64 rng(3);
  const Pose reference = oracle::random_pose(rng, 14);
  const Pose pose = add_noise(reference, rng, 4.0);
  const SimilarityTransform doubler =
      SimilarityTransform::from_scale_rotation(2.0, 0.0);

  const double base = mse_directed(reference, pose);
  const double scaled = mse_directed(doubler.apply(reference), pose);
  CHECK(scaled == doctest::Approx(4.0 * base).epsilon(1e-9));

  // And the two directions of a pair generally disagree.
  const double forward = mse_directed(doubler.apply(reference), pose);
  const double backward = mse_directed(pose, doubler.apply(reference));
  CHECK(forward != doctest::Approx(backward).epsilon(1e-3));
}

TEST_CASE("pose scale of an axis-aligned square") {
  const Pose square = make_pose({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  const ScaleResult s = pose_scale(square);
  CHECK(s.center.x == doctest::Approx(1.0));
  CHECK(s.center.y == doctest::Approx(1.0));
  CHECK(s.scale == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("normalized distance is symmetric and similarity invariant") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 50; ++i) {
    const Pose p1 = oracle::random_pose(rng, 14);
    const Pose p2 = add_noise(p1, rng, 6.0);

    const double d12 = mse_norm(p1, p2);
    const double d21 = mse_norm(p2, p1);
    CHECK(std::abs(d12 - d21) <= 1e-9 * std::max(1.0, d12));

    const SimilarityTransform t = oracle::random_transform(rng);
    const double warped = mse_norm(t.apply(p1), p2);
    CHECK(warped == doctest::Approx(d12).epsilon(1e-6));
    const double warped2 = mse_norm(p1, t.apply(p2));
    CHECK(warped2 == doctest::Approx(d12).epsilon(1e-6));
  }
}

TEST_CASE("normalized distance grows with the square of the working scale") {
  std::mt19937_64 rng(23);
  const Pose p1 = oracle::random_pose(rng, 14);
  const Pose p2 = add_noise(p1, rng, 6.0);
  const double at100 = mse_norm(p1, p2, 100.0);
  const double at200 = mse_norm(p1, p2, 200.0);
  const double at50 = mse_norm(p1, p2, 50.0);
  CHECK(at200 == doctest::Approx(4.0 * at100).epsilon(1e-9));
  CHECK(at50 == doctest::Approx(0.25 * at100).epsilon(1e-9));
}

TEST_CASE("normalized distance is zero only for similarity-equivalent poses") {
  std::mt19937_64 rng(29);
  const Pose p = oracle::random_pose(rng, 14);
  const SimilarityTransform t = oracle::random_transform(rng);
  CHECK(mse_norm(p, t.apply(p)) < 1e-9);

  const Pose q = add_noise(p, rng, 5.0);
  CHECK(mse_norm(p, q) > 1.0);
}

TEST_CASE("degenerate poses are rejected") {
  const Pose collapsed = make_pose({{1, 1}, {1, 1}, {1, 1}});
  const Pose ok = make_pose({{0, 0}, {1, 0}, {0, 1}});
  CHECK_THROWS_AS(align(ok, collapsed), DegeneratePoseError);
  CHECK_THROWS_AS(mse_norm(ok, collapsed), DegeneratePoseError);
  CHECK_THROWS_AS(mse_norm(collapsed, ok), DegeneratePoseError);
  // A degenerate reference is still a valid alignment target.
  CHECK_NOTHROW(align(collapsed, ok));
}

TEST_CASE("joint count mismatches are rejected") {
  const Pose a = make_pose({{0, 0}, {1, 0}, {0, 1}});
  const Pose b = make_pose({{0, 0}, {1, 0}});
  CHECK_THROWS_AS(align(a, b), DimensionMismatchError);
  CHECK_THROWS_AS(mse_norm(a, b), DimensionMismatchError);
}

TEST_CASE("joint restriction keeps order and checks bounds") {
  Pose p;
  for (int i = 0; i < 14; ++i) p.joints.push_back({double(i), double(-i)});

  const Pose legs = restrict_joints(p, lower_body_subset());
  REQUIRE(legs.size() == 6);
  CHECK(legs.joints[0].x == doctest::Approx(8.0));
  CHECK(legs.joints[5].x == doctest::Approx(13.0));

  const JointSubset bad = JointSubset::of({0, 14});
  CHECK_THROWS_AS(restrict_joints(p, bad), IndexOutOfRangeError);

  CHECK_THROWS_AS(JointSubset::of({3}), InvalidSpecError);
  CHECK_THROWS_AS(JointSubset::of({3, 3}), InvalidSpecError);
  CHECK_THROWS_AS(JointSubset::of({4, 2}), InvalidSpecError);
}

TEST_CASE("sequence validation flags schema violations") {
  PoseSequence seq;
  seq.video_id = "clip";
  seq.fps = 50.0;
  Pose p = make_pose({{0, 0}, {1, 1}});
  seq.poses = {{0, p}, {1, p}, {5, p}};
  CHECK_NOTHROW(seq.validate());
  CHECK(seq.find_frame(5) == 2);
  CHECK(seq.find_frame(3) == PoseSequence::npos);

  PoseSequence unordered = seq;
  unordered.poses[2].frame = 1;
  CHECK_THROWS_AS(unordered.validate(), SchemaError);

  PoseSequence mixed = seq;
  mixed.poses[1].pose.joints.push_back({2, 2});
  CHECK_THROWS_AS(mixed.validate(), SchemaError);

  PoseSequence bad_fps = seq;
  bad_fps.fps = 0.0;
  CHECK_THROWS_AS(bad_fps.validate(), SchemaError);
}
