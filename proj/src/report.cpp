#include "mapseg/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace mapseg::report {

namespace {

using nlohmann::json;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json pq_fields(const metrics::PQReport& r) {
  return {{"pq", r.pq}, {"sq", r.sq}, {"rq", r.rq},
          {"tp", r.tp()}, {"fp", r.fp}, {"fn", r.fn}};
}

const char* variant_name(metrics::HausdorffVariant v) {
  return v == metrics::HausdorffVariant::Pooled ? "pooled" : "max_of_directed";
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw FormatError("curve csv: bad number on line " + std::to_string(line));
  }
  return v;
}

}  // namespace

std::string t1_json(const std::vector<T1Item>& items, bool per_image) {
  std::vector<metrics::PQReport> reports;
  for (const auto& it : items) reports.push_back(it.pq);
  json j = pq_fields(metrics::pool_pq(reports));
  j["task"] = "t1";
  j["images"] = items.size();
  if (per_image) {
    json arr = json::array();
    for (const auto& it : items) {
      json e = pq_fields(it.pq);
      e["name"] = it.name;
      arr.push_back(e);
    }
    j["per_image"] = arr;
  }
  return dump(j);
}

std::string t2_json(const std::vector<T2Item>& items, bool per_image,
                    metrics::HausdorffVariant variant) {
  std::vector<double> values;
  for (const auto& it : items) values.push_back(it.hd.value);
  json j = {{"task", "t2"},
            {"hd95", metrics::mean_hausdorff95(values)},
            {"variant", variant_name(variant)},
            {"images", items.size()}};
  if (per_image) {
    json arr = json::array();
    for (const auto& it : items) {
      arr.push_back({{"name", it.name},
                     {"hd95", it.hd.value},
                     {"pred_to_gt", it.hd.a_to_b},
                     {"gt_to_pred", it.hd.b_to_a}});
    }
    j["per_image"] = arr;
  }
  return dump(j);
}

std::string t3_json(const std::vector<T3Item>& items, bool per_image,
                    const metrics::DetectionParams& params) {
  std::vector<metrics::DetectionCurve> curves;
  for (const auto& it : items) curves.push_back(it.curve);
  json j = {{"task", "t3"},
            {"auc", metrics::aggregate_detection(curves)},
            {"beta", params.beta},
            {"max_threshold", params.max_threshold},
            {"step", params.step},
            {"matching", params.matching == metrics::PointMatching::GtNearest ? "gt_nearest"
                                                                              : "mutual_nearest"},
            {"images", items.size()}};
  if (per_image) {
    json arr = json::array();
    for (const auto& it : items) {
      arr.push_back({{"name", it.name},
                     {"auc", it.curve.auc},
                     {"num_pred", it.num_pred},
                     {"num_gt", it.num_gt}});
    }
    j["per_image"] = arr;
  }
  return dump(j);
}

metrics::Curve mean_curve(const std::vector<metrics::Curve>& curves) {
  if (curves.empty()) throw PreconditionError("mean_curve: no curves");
  metrics::Curve out = curves.front();
  for (std::size_t c = 1; c < curves.size(); ++c) {
    if (curves[c].size() != out.size()) throw PreconditionError("mean_curve: sampling differs");
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (curves[c][i].threshold != out[i].threshold) {
        throw PreconditionError("mean_curve: sampling differs");
      }
      out[i].value += curves[c][i].value;
    }
  }
  for (auto& s : out) s.value /= static_cast<double>(curves.size());
  return out;
}

std::string curve_csv(const metrics::Curve& curve) {
  std::string out = "threshold,value\n";
  char buf[80];
  for (const auto& s : curve) {
    std::snprintf(buf, sizeof buf, "%.4f,%.10f\n", s.threshold, s.value);
    out += buf;
  }
  return out;
}

metrics::Curve parse_curve_csv(const std::string& text) {
  metrics::Curve out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (n == 1 && line == "threshold,value") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw FormatError("curve csv: expected threshold,value on line " + std::to_string(n));
    }
    out.push_back({parse_double(std::string_view(line).substr(0, comma), n),
                   parse_double(std::string_view(line).substr(comma + 1), n)});
  }
  if (out.empty()) throw FormatError("curve csv: no samples");
  return out;
}

std::string curve_svg(const metrics::Curve& curve, const PlotStyle& style) {
  if (curve.empty()) throw PreconditionError("curve_svg: empty curve");
  const double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 60;
  const double pw = W - left - right;
  const double ph = H - top - bottom;
  auto [lo_it, hi_it] = std::minmax_element(
      curve.begin(), curve.end(),
      [](const metrics::CurveSample& a, const metrics::CurveSample& b) {
        return a.threshold < b.threshold;
      });
  const double x0 = lo_it->threshold;
  const double x1 = hi_it->threshold > x0 ? hi_it->threshold : x0 + 1.0;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - std::clamp(y, 0.0, 1.0)) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape_xml(style.title) << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    const double y = py(v);
    s << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y
      << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << number(v)
      << "</text>\n";
    const double xv = x0 + (x1 - x0) * v;
    const double x = px(xv);
    s << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\"" << top + ph
      << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << x << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << number(xv) << "</text>\n";
  }
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
  for (const auto& p : curve) s << number(px(p.threshold)) << "," << number(py(p.value)) << " ";
  s << "\"/>\n";
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
    << escape_xml(style.x_label) << "</text>\n";
  s << "<text transform=\"translate(18 " << top + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(style.y_label) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace mapseg::report
