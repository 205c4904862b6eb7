#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "spectra/annotate.hpp"
#include "spectra/error.hpp"

namespace spectra {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::Io;
}

TEST(Footprint, TightBox) {
  const std::vector<Point> rect{{0, 0}, {10, 0}, {10, 8}, {0, 8}};
  EXPECT_EQ(footprint_to_bbox(rect), (BBox{0, 0, 10, 8}));
  const std::vector<Point> tri{{0, 0}, {6, 2}, {3, 9}};
  EXPECT_EQ(footprint_to_bbox(tri), (BBox{0, 0, 6, 9}));
}

TEST(Footprint, Degenerate) {
  const std::vector<Point> dot{{1, 1}, {1, 1}, {1, 1}};
  EXPECT_EQ(code_of([&] { footprint_to_bbox(dot); }), ErrorCode::DegenerateFootprint);
  const std::vector<Point> line{{0, 0}, {5, 0}, {9, 0}};
  EXPECT_EQ(code_of([&] { footprint_to_bbox(line); }), ErrorCode::DegenerateFootprint);
  const std::vector<Point> two{{0, 0}, {5, 5}};
  EXPECT_EQ(code_of([&] { footprint_to_bbox(two); }), ErrorCode::InvalidArgument);
}

TEST(SizeCategory, Examples) {
  EXPECT_EQ(size_category(100), SizeCategory::Small);
  EXPECT_EQ(size_category(25), SizeCategory::VerySmall);
  EXPECT_EQ(size_category(250), SizeCategory::VeryLarge);
  EXPECT_EQ(size_category(0), SizeCategory::BelowMinimum);
  EXPECT_EQ(code_of([] { size_category(-1.0); }), ErrorCode::InvalidArea);
}

TEST(SizeCategory, EdgesAreLowerInclusive) {
  const std::array<SizeCategory, 6> order{SizeCategory::BelowMinimum, SizeCategory::VerySmall,
                                          SizeCategory::Small,        SizeCategory::Medium,
                                          SizeCategory::Large,        SizeCategory::VeryLarge};
  const std::array<double, 5> edges{25, 75, 118, 168, 250};
  EXPECT_EQ(kSizeEdges, edges);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    EXPECT_EQ(size_category(edges[i]), order[i + 1]);
    EXPECT_EQ(size_category(std::nextafter(edges[i], 0.0)), order[i]);
  }
}

TEST(SizeCategory, PartitionsTheLine) {
  // Reference: count of edges at or below the area.
  for (double a = 0.0; a < 400.0; a += 0.25) {
    const auto expected = std::count_if(kSizeEdges.begin(), kSizeEdges.end(), [&](double e) { return a >= e; });
    EXPECT_EQ(static_cast<long>(size_category(a)), expected) << a;
  }
}

TEST(DensityCategory, Edges) {
  EXPECT_EQ(density_category(39), DensityCategory::Low);
  EXPECT_EQ(density_category(40), DensityCategory::Moderate);
  EXPECT_EQ(density_category(89), DensityCategory::Moderate);
  EXPECT_EQ(density_category(90), DensityCategory::High);
  EXPECT_EQ(density_category(120), DensityCategory::High);
  EXPECT_EQ(density_category(0), DensityCategory::Low);
}

TEST(Categories, NamesRoundTrip) {
  for (auto c : {SizeCategory::BelowMinimum, SizeCategory::VerySmall, SizeCategory::Small,
                 SizeCategory::Medium, SizeCategory::Large, SizeCategory::VeryLarge})
    EXPECT_EQ(parse_size_category(to_string(c)), c);
  for (auto c : kDensities) EXPECT_EQ(parse_density_category(to_string(c)), c);
  EXPECT_EQ(to_string(SizeCategory::VerySmall), "very_small");
  EXPECT_FALSE(parse_size_category("huge"));
}

const BBox kExtent{0, 0, 100, 100};

TEST(FilterAndPad, AreaFilter) {
  const std::vector<Annotation> gt{make_annotation("s", {0, 0, 4, 6}),      // 24
                                   make_annotation("s", {50, 50, 55, 55})};  // 25
  const auto out = filter_and_pad(gt, {}, kExtent);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].area_m2, 25.0);
}

TEST(FilterAndPad, PerSidePadding) {
  const std::vector<Annotation> gt{make_annotation("s", {10, 10, 20, 20})};
  const auto out = filter_and_pad(gt, {25, 6, PadMode::PerSide}, kExtent);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].bbox, (BBox{4, 4, 26, 26}));
  EXPECT_EQ(out[0].area_m2, 100.0);
  EXPECT_EQ(out[0].size, SizeCategory::Small);
}

TEST(FilterAndPad, ClipsToExtent) {
  const std::vector<Annotation> gt{make_annotation("s", {2, 2, 12, 12})};
  EXPECT_EQ(filter_and_pad(gt, {}, kExtent)[0].bbox, (BBox{0, 0, 18, 18}));
}

TEST(FilterAndPad, TotalMode) {
  const std::vector<Annotation> gt{make_annotation("s", {10, 10, 20, 20})};
  EXPECT_EQ(filter_and_pad(gt, {25, 6, PadMode::Total}, kExtent)[0].bbox, (BBox{7, 7, 23, 23}));
}

TEST(FilterAndPad, OutsideExtentDropped) {
  const std::vector<Annotation> gt{make_annotation("s", {200, 200, 220, 220})};
  EXPECT_TRUE(filter_and_pad(gt, {25, 0, PadMode::PerSide}, kExtent).empty());
}

TEST(FilterAndPad, NeverShrinksAndKeepsCategory) {
  std::vector<Annotation> gt;
  for (int i = 0; i < 20; ++i) {
    const double x = 4.0 * i, s = 3.0 + i;
    gt.push_back(make_annotation("s", {x, x, x + s, x + 1.5 * s}));
  }
  const auto out = filter_and_pad(gt, {}, BBox{0, 0, 500, 500});
  for (const auto& a : out) {
    const auto orig = std::find_if(gt.begin(), gt.end(), [&](const Annotation& g) { return g.area_m2 == a.area_m2; });
    ASSERT_NE(orig, gt.end());
    EXPECT_GE(a.bbox.width(), orig->bbox.width());
    EXPECT_GE(a.bbox.height(), orig->bbox.height());
    EXPECT_EQ(a.size, orig->size);
  }
}

TEST(FilterAndPad, RejectsNegativeOptions) {
  const std::vector<Annotation> gt;
  EXPECT_THROW(filter_and_pad(gt, {-1, 6, PadMode::PerSide}, kExtent), Error);
  EXPECT_THROW(filter_and_pad(gt, {25, -6, PadMode::PerSide}, kExtent), Error);
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("scene_" + std::to_string(i));
  return v;
}

void expect_partition(const SplitPlan& plan, const std::vector<std::string>& all) {
  std::multiset<std::string> seen;
  for (const auto& f : plan.folds) seen.insert(f.begin(), f.end());
  EXPECT_EQ(seen.size(), all.size());
  EXPECT_EQ(std::set<std::string>(seen.begin(), seen.end()), std::set<std::string>(all.begin(), all.end()));
}

TEST(Splits, HoldoutSizes) {
  const auto all = ids(7349);
  const auto plan = make_splits(all, HoldoutSplit{0.8}, 42);
  ASSERT_EQ(plan.k(), 2u);
  EXPECT_EQ(plan.folds[0].size(), 5879u);
  EXPECT_EQ(plan.folds[1].size(), 1470u);
  expect_partition(plan, all);
}

TEST(Splits, KFoldEvenAndUneven) {
  const auto ten = ids(10);
  const auto plan = make_splits(ten, KFoldSplit{5}, 1);
  ASSERT_EQ(plan.k(), 5u);
  for (const auto& f : plan.folds) EXPECT_EQ(f.size(), 2u);
  expect_partition(plan, ten);

  const auto odd = ids(23);
  const auto p2 = make_splits(odd, KFoldSplit{5}, 1);
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& f : p2.folds) {
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
  }
  EXPECT_LE(hi - lo, 1u);
  expect_partition(p2, odd);
  EXPECT_EQ(p2.train_for(0).size(), 23 - p2.folds[0].size());
}

TEST(Splits, DeterministicAndOrderIndependent) {
  auto all = ids(50);
  const auto a = make_splits(all, KFoldSplit{5}, 77);
  const auto b = make_splits(all, KFoldSplit{5}, 77);
  EXPECT_EQ(a, b);
  std::reverse(all.begin(), all.end());
  EXPECT_EQ(make_splits(all, KFoldSplit{5}, 77), a);
  EXPECT_NE(make_splits(all, KFoldSplit{5}, 78), a);
}

TEST(Splits, Errors) {
  const std::vector<std::string> none;
  EXPECT_EQ(code_of([&] { make_splits(none, KFoldSplit{5}, 1); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([&] { make_splits(none, HoldoutSplit{}, 1); }), ErrorCode::EmptyInput);
  const auto three = ids(3);
  EXPECT_EQ(code_of([&] { make_splits(three, KFoldSplit{5}, 1); }), ErrorCode::InvalidArgument);
  const std::vector<std::string> dup{"a", "a", "b"};
  EXPECT_EQ(code_of([&] { make_splits(dup, KFoldSplit{2}, 1); }), ErrorCode::InvalidArgument);
}

MultibandImage scene_image(std::size_t px, double gsd) {
  std::vector<std::uint16_t> p(px * px);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<std::uint16_t>(i % 251);
  return MultibandImage(px, px, {{"gray", 550}}, 8, gsd, gsd, std::move(p));
}

TEST(Patches, EmptyScene) {
  const SceneRecord scene{"s", kExtent, {}};
  EXPECT_TRUE(extract_patches(scene, scene_image(50, 2.0), 1).empty());
}

TEST(Patches, SparseSceneBalancedAndDisjoint) {
  SceneRecord scene{"s", kExtent, {make_annotation("s", {10, 10, 20, 18}),
                                   make_annotation("s", {60, 5, 72, 15}),
                                   make_annotation("s", {30, 70, 41, 82})}};
  const auto img = scene_image(50, 2.0);
  const auto patches = extract_patches(scene, img, 9);
  ASSERT_EQ(patches.size(), 6u);
  std::size_t pos = 0, neg = 0;
  for (const auto& p : patches) {
    if (p.label == PatchLabel::Building) {
      ++pos;
      continue;
    }
    ++neg;
    // Independent overlap check on raw coordinates.
    for (const auto& g : scene.gt) {
      const bool apart = p.box.x_max <= g.bbox.x_min || g.bbox.x_max <= p.box.x_min ||
                         p.box.y_max <= g.bbox.y_min || g.bbox.y_max <= p.box.y_min;
      EXPECT_TRUE(apart);
    }
    EXPECT_GE(p.box.x_min, kExtent.x_min);
    EXPECT_LE(p.box.x_max, kExtent.x_max);
    const bool size_from_scene = std::any_of(scene.gt.begin(), scene.gt.end(), [&](const Annotation& g) {
      return std::abs(g.bbox.width() - p.box.width()) < 1e-9 && std::abs(g.bbox.height() - p.box.height()) < 1e-9;
    });
    EXPECT_TRUE(size_from_scene);
  }
  EXPECT_EQ(pos, 3u);
  EXPECT_EQ(neg, 3u);
  // First positive covers columns 5..9, rows 5..8 at 2 m/px.
  EXPECT_EQ(patches[0].raster.width(), 5u);
  EXPECT_EQ(patches[0].raster.height(), 4u);
  EXPECT_EQ(patches[0].raster.at(0, 0, 0), img.at(0, 5, 5));

  const auto again = extract_patches(scene, img, 9);
  for (std::size_t i = 0; i < patches.size(); ++i) EXPECT_EQ(again[i].box, patches[i].box);
}

TEST(Patches, FullyCoveredSceneExhausts) {
  SceneRecord scene{"s", kExtent, {}};
  for (int y = 0; y < 100; y += 50)
    for (int x = 0; x < 100; x += 50) scene.gt.push_back(make_annotation("s", BBox{double(x), double(y), x + 50.0, y + 50.0}));
  try {
    extract_patches(scene, scene_image(50, 2.0), 3, {50});
    FAIL();
  } catch (const NegativeSamplingExhausted& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeSamplingExhausted);
    EXPECT_EQ(e.produced(), 0u);
    EXPECT_EQ(e.needed(), 4u);
  }
}

}  // namespace
}  // namespace spectra
