#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "asdal/reference.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace asdal;

namespace {

// Within-cluster sum of squares computed from scratch.
double objective(const std::vector<Embedding>& points, const KMeansResult& r) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += oracle::sq_dist(fixture::to_vec(points[i]),
                             fixture::to_vec(r.centers[r.assignment[i]]));
  }
  return total;
}

}  // namespace

TEST(KMeans, RejectsInvalidConfig) {
  std::mt19937_64 gen(31);
  const auto pts = fixture::random_embeddings(gen, 5, 3);
  EXPECT_THROW((void)kmeans(std::span<const Embedding>{}, KMeansConfig{}), ConfigError);
  EXPECT_THROW((void)kmeans(pts, KMeansConfig{.k = 6}), ConfigError);
  EXPECT_THROW((void)kmeans(pts, KMeansConfig{.k = 0}), ConfigError);
  EXPECT_THROW((void)kmeans(pts, KMeansConfig{.k = 2, .tolerance = 0.0}), ConfigError);
}

TEST(KMeans, KEqualsNReturnsThePoints) {
  std::mt19937_64 gen(32);
  const auto pts = fixture::random_embeddings(gen, 7, 4);
  auto centers = kmeans(pts, KMeansConfig{.k = 7, .seed = 3});
  ASSERT_EQ(centers.size(), 7u);
  for (const auto& p : pts) {
    EXPECT_EQ(std::count(centers.begin(), centers.end(), p), 1);
  }
}

TEST(KMeans, SingleClusterIsTheMean) {
  std::mt19937_64 gen(33);
  const auto pts = fixture::random_embeddings(gen, 40, 5);
  const auto centers = kmeans(pts, KMeansConfig{.k = 1});
  ASSERT_EQ(centers.size(), 1u);
  const auto mean = oracle::mean_of(fixture::to_vecs(pts));
  for (std::size_t i = 0; i < mean.size(); ++i) EXPECT_NEAR(centers[0][i], mean[i], 1e-12);
}

TEST(KMeans, ObjectiveNonIncreasingAndMatchesAssignment) {
  std::mt19937_64 gen(34);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 10 + inst % 40;
    const auto pts = fixture::random_embeddings(gen, n, 2 + inst % 5);
    const KMeansConfig cfg{.k = static_cast<std::size_t>(1 + inst % 8), .seed = static_cast<std::uint64_t>(inst)};
    const auto r = kmeans_detailed(pts, cfg);
    ASSERT_FALSE(r.objective_history.empty());
    for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
      EXPECT_LE(r.objective_history[i], r.objective_history[i - 1] * (1.0 + 1e-12));
    }
    EXPECT_EQ(r.centers.size(), cfg.k);
    EXPECT_LE(r.iterations, cfg.max_iterations);
    EXPECT_LE(objective(pts, r), r.objective_history.back() * (1.0 + 1e-12));
  }
}

TEST(KMeans, DeterministicForSeed) {
  std::mt19937_64 gen(35);
  const auto pts = fixture::random_embeddings(gen, 60, 3);
  const KMeansConfig cfg{.k = 5, .seed = 17};
  EXPECT_EQ(kmeans(pts, cfg), kmeans(pts, cfg));
}

TEST(KMeans, RecoversTwoBlobs) {
  std::mt19937_64 gen(36);
  const std::size_t per_blob = 200;
  const double sigma = 0.1;
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<oracle::Vec> blob_a, blob_b;
  std::vector<Embedding> pts;
  for (std::size_t i = 0; i < per_blob; ++i) {
    oracle::Vec a{5.0 + noise(gen), noise(gen), noise(gen)};
    oracle::Vec b{-5.0 + noise(gen), 1.0 + noise(gen), noise(gen)};
    blob_a.push_back(a);
    blob_b.push_back(b);
    pts.emplace_back(a);
    pts.emplace_back(b);
  }
  const auto centers = kmeans(pts, KMeansConfig{.k = 2, .seed = 1});
  const double tol = 3.0 * sigma / std::sqrt(static_cast<double>(per_blob));
  for (const auto& blob : {blob_a, blob_b}) {
    const auto mean = oracle::mean_of(blob);
    const auto& c = oracle::sq_dist(fixture::to_vec(centers[0]), mean) <
                            oracle::sq_dist(fixture::to_vec(centers[1]), mean)
                        ? centers[0]
                        : centers[1];
    for (std::size_t i = 0; i < mean.size(); ++i) EXPECT_NEAR(c[i], mean[i], tol);
  }
}

TEST(InitialReference, SizesAndOrder) {
  std::mt19937_64 gen(37);
  const auto source = fixture::random_embeddings(gen, 990, 8);
  const auto target = fixture::random_embeddings(gen, 10, 8);
  const auto refs = build_initial_reference(source, target, KMeansConfig{.k = 32});
  EXPECT_EQ(refs.normal().size(), 42u);
  EXPECT_TRUE(refs.anomalous().empty());
  for (std::size_t i = 0; i < target.size(); ++i) EXPECT_EQ(refs.normal()[32 + i], target[i]);

  const auto only_source = build_initial_reference(
      std::span(source).first(100), std::span<const Embedding>{}, KMeansConfig{.k = 5});
  EXPECT_EQ(only_source.normal().size(), 5u);
}

TEST(InitialReference, DegenerateKKeepsSourcePointsVerbatim) {
  std::mt19937_64 gen(38);
  const auto source = fixture::random_embeddings(gen, 3, 4);
  const auto target = fixture::random_embeddings(gen, 2, 4);
  const auto refs = build_initial_reference(source, target, KMeansConfig{.k = 3});
  ASSERT_EQ(refs.normal().size(), 5u);
  const std::vector<Embedding> head(refs.normal().begin(), refs.normal().begin() + 3);
  for (const auto& p : source) EXPECT_EQ(std::count(head.begin(), head.end(), p), 1);
  EXPECT_EQ(refs.normal()[3], target[0]);
  EXPECT_EQ(refs.normal()[4], target[1]);
}

TEST(InitialReference, SizeIsAlwaysKPlusTargets) {
  std::mt19937_64 gen(39);
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 1 + i % 10;
    const auto source = fixture::random_embeddings(gen, k + i % 7, 3);
    const auto target = fixture::random_embeddings(gen, i % 4, 3);
    const auto refs = build_initial_reference(source, target, KMeansConfig{.k = k});
    EXPECT_EQ(refs.normal().size(), k + target.size());
  }
}
