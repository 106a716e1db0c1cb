#include <doctest.h>

#include <json.hpp>

#include "mapseg/report.hpp"

using namespace mapseg;
using nlohmann::json;

namespace {

LabelImage squares(int w, int h, std::vector<Box> boxes) {
  LabelImage img(w, h, 0);
  std::int32_t id = 0;
  for (const Box& b : boxes) {
    ++id;
    for (int y = b.ymin; y <= b.ymax; ++y) {
      for (int x = b.xmin; x <= b.xmax; ++x) img.at(x, y) = id;
    }
  }
  return img;
}

}  // namespace

TEST_CASE("pool_pq sums counts and IoUs across images") {
  const LabelImage gt = squares(20, 20, {{0, 0, 9, 9}});
  const LabelImage pred_same = gt;
  const LabelImage pred_none(20, 20, 0);
  const auto a = metrics::coco_pq(pred_same, gt);
  const auto b = metrics::coco_pq(pred_none, gt);
  const auto pooled = metrics::pool_pq({a, b});
  CHECK(pooled.tp() == 1);
  CHECK(pooled.fn == 1);
  CHECK(pooled.fp == 0);
  CHECK(pooled.sq == 1.0);
  CHECK(pooled.rq == doctest::Approx(1.0 / 1.5));
  CHECK(pooled.pq == doctest::Approx(1.0 / 1.5));
  CHECK(pooled.fscore_curve.size() == 51);
  // A single report pools to itself.
  const auto single = metrics::pool_pq({a});
  CHECK(single.pq == a.pq);
  CHECK(single.fscore_curve.size() == a.fscore_curve.size());
}

TEST_CASE("t1 json keys and per-image entries") {
  const LabelImage gt = squares(20, 20, {{0, 0, 9, 9}, {12, 12, 19, 19}});
  const LabelImage pred = squares(20, 20, {{0, 0, 9, 9}});
  const auto j = json::parse(report::t1_json({{"x", metrics::coco_pq(pred, gt)}}, true));
  for (const char* k : {"pq", "sq", "rq", "tp", "fp", "fn", "task", "images"}) {
    CHECK(j.contains(k));
  }
  CHECK(j["tp"] == 1);
  CHECK(j["fn"] == 1);
  CHECK(j["per_image"][0]["name"] == "x");
  CHECK_FALSE(json::parse(report::t1_json({{"x", metrics::coco_pq(pred, gt)}}, false))
                  .contains("per_image"));
}

TEST_CASE("t2 json averages per-image values") {
  metrics::Hausdorff95Result a{2.0, 2.0, 1.0}, b{4.0, 3.0, 4.0};
  const auto j = json::parse(
      report::t2_json({{"a", a}, {"b", b}}, true, metrics::HausdorffVariant::MaxOfDirected));
  CHECK(j["hd95"] == 3.0);
  CHECK(j["variant"] == "max_of_directed");
  CHECK(j["per_image"][1]["gt_to_pred"] == 4.0);
  CHECK_THROWS_AS(report::t2_json({}, false, metrics::HausdorffVariant::Pooled), PreconditionError);
}

TEST_CASE("t3 json and mean curve") {
  const PointList gt{{10, 10}, {50, 50}};
  const auto c1 = metrics::detection_score(gt, gt);
  const auto c2 = metrics::detection_score({}, gt);
  const auto j = json::parse(report::t3_json({{"a", c1, 2, 2}, {"b", c2, 0, 2}}, true, {}));
  CHECK(j["auc"] == doctest::Approx((c1.auc + c2.auc) / 2));
  CHECK(j["beta"] == 0.5);
  CHECK(j["per_image"][1]["num_pred"] == 0);
  const auto mean = report::mean_curve({c1.fbeta, c2.fbeta});
  REQUIRE(mean.size() == c1.fbeta.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    CHECK(mean[i].value == doctest::Approx((c1.fbeta[i].value + c2.fbeta[i].value) / 2));
  }
  CHECK_THROWS_AS(report::mean_curve({c1.fbeta, {{0.0, 1.0}}}), PreconditionError);
}

TEST_CASE("curve csv round trip and svg output") {
  const metrics::Curve c{{0.5, 1.0}, {0.75, 0.25}, {1.0, 0.0}};
  const std::string csv = report::curve_csv(c);
  CHECK(csv.rfind("threshold,value\n", 0) == 0);
  const auto back = report::parse_curve_csv(csv);
  REQUIRE(back.size() == 3);
  CHECK(back[1].threshold == 0.75);
  CHECK(back[1].value == 0.25);
  CHECK(report::parse_curve_csv("0,1\r\n1,0.5\r\n").size() == 2);
  CHECK_THROWS_AS(report::parse_curve_csv("threshold,value\n"), FormatError);
  CHECK_THROWS_AS(report::parse_curve_csv("0;1\n"), FormatError);
  CHECK_THROWS_AS(report::parse_curve_csv("0,x\n"), FormatError);

  const std::string svg = report::curve_svg(c, {"A <b> & c", "x", "y"});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("A &lt;b&gt; &amp; c") != std::string::npos);
  CHECK_THROWS_AS(report::curve_svg({}), PreconditionError);
}
