#include "mapseg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <variant>

#include "mapseg/io.hpp"

namespace mapseg::config {

namespace {

using Slot = std::variant<int*, long long*, double*, bool*, std::uint64_t*>;

struct Field {
  std::string key;
  Slot slot;
};

struct Group {
  std::string section;
  std::vector<Field> fields;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const Entry& e) {
  return "line " + std::to_string(e.line) + " (" + e.key + ")";
}

template <class T>
T parse_number(const Entry& e) {
  T v{};
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("config: bad value '" + e.value + "' at " + where(e));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw FormatError("config: non-finite value at " + where(e));
  }
  return v;
}

void assign(const Slot& slot, const Entry& e) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (e.value == "true") *p = true;
          else if (e.value == "false") *p = false;
          else throw FormatError("config: expected true or false at " + where(e));
        } else {
          *p = parse_number<T>(e);
        }
      },
      slot);
}

std::string format(const Slot& slot) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_floating_point_v<T>) {
          // Shortest text that round-trips exactly.
          char buf[64];
          const auto res = std::to_chars(buf, buf + sizeof buf, *p);
          return std::string(buf, res.ptr);
        } else {
          return std::to_string(*p);
        }
      },
      slot);
}

std::vector<Group> bind(pipelines::PipelineConfig& c) {
  auto& t1 = c.task1;
  auto& t2 = c.task2;
  auto& u = c.task3_uwb;
  auto& m = c.task3_cmm;
  return {
      {"task1",
       {{"area_close", &t1.area_close},
        {"dynamics_h", &t1.dynamics_h},
        {"min_area", &t1.min_area},
        {"max_area", &t1.max_area},
        {"min_fill_ratio", &t1.min_fill_ratio},
        {"river_overlap", &t1.river_overlap},
        {"river_subsample", &t1.river_subsample},
        {"river_open_radius", &t1.river_open_radius},
        {"river_close_radius", &t1.river_close_radius},
        {"river_max_fill", &t1.river_max_fill},
        {"river_min_area", &t1.river_min_area}}},
      {"task2",
       {{"qfz_slope", &t2.qfz_slope},
        {"margin_min_level", &t2.margin_min_level},
        {"margin_min_sides", &t2.margin_min_sides},
        {"margin_smooth", &t2.margin_smooth},
        {"tophat_size", &t2.tophat_size},
        {"line_close", &t2.line_close},
        {"center_fraction", &t2.center_fraction},
        {"marker_gap", &t2.marker_gap},
        {"legend_min_fill", &t2.legend_min_fill},
        {"legend_border", &t2.legend_border},
        {"legend_min_area", &t2.legend_min_area},
        {"legend_dilate", &t2.legend_dilate}}},
      {"binarize",
       {{"min_area", &c.binarize.min_area},
        {"max_depth", &c.binarize.otsu.max_depth},
        {"delta_stop", &c.binarize.otsu.delta_stop},
        {"max_ink_fraction", &c.binarize.otsu.max_ink_fraction}}},
      {"task3_uwb",
       {{"theta_step_deg", &u.theta_step_deg},
        {"rho_step", &u.rho_step},
        {"content_erosion", &u.content_erosion},
        {"line_max_width", &u.line_max_width},
        {"refine_band", &u.refine_band}}},
      {"task3_uwb.grid",
       {{"expected_min_lines", &u.grid.expected_min_lines},
        {"angle_tol_deg", &u.grid.angle_tol_deg},
        {"spacing_tol", &u.grid.spacing_tol},
        {"peak_floor", &u.grid.peak_floor},
        {"min_votes_fraction", &u.grid.min_votes_fraction},
        {"min_period", &u.grid.min_period},
        {"nms_rho", &u.grid.nms_rho},
        {"nms_theta_deg", &u.grid.nms_theta_deg},
        {"missing_penalty", &u.grid.missing_penalty}}},
      {"task3_uwb.refine",
       {{"window", &u.refine.window},
        {"template_arm", &u.refine.template_arm},
        {"template_stroke", &u.refine.template_stroke},
        {"min_ncc", &u.refine.min_ncc}}},
      {"task3_cmm",
       {{"subsample", &m.subsample},
        {"pre_erosion", &m.pre_erosion},
        {"angle_min", &m.angle_min},
        {"angle_max", &m.angle_max},
        {"angle_step", &m.angle_step},
        {"line_length", &m.line_length},
        {"tophat_size", &m.tophat_size},
        {"min_period", &m.min_period},
        {"peak_floor", &m.peak_floor},
        {"cross_length", &m.cross_length},
        {"contrast_min", &m.contrast_min},
        {"refine_window", &m.refine_window},
        {"frame_open", &m.frame_open},
        {"frame_coverage", &m.frame_coverage},
        {"frame_band", &m.frame_band},
        {"shared_period", &m.shared_period},
        {"min_confirmed", &m.min_confirmed}}},
  };
}

std::vector<Group> bind(synth::SheetSpec& s) {
  return {
      {"sheet",
       {{"width", &s.width},
        {"height", &s.height},
        {"margin", &s.margin},
        {"seed", &s.seed}}},
      {"frame",
       {{"count", &s.frame_count},
        {"outer_stroke", &s.outer_stroke},
        {"inner_stroke", &s.inner_stroke},
        {"gap", &s.frame_gap},
        {"margin_text", &s.margin_text}}},
      {"legend",
       {{"count", &s.legend_count}, {"width", &s.legend_width}, {"height", &s.legend_height}}},
      {"blocks",
       {{"count", &s.blocks},
        {"min_size", &s.block_min},
        {"max_size", &s.block_max},
        {"stroke", &s.block_stroke},
        {"gap", &s.block_gap},
        {"clearance", &s.block_clearance},
        {"crossing_clearance", &s.crossing_clearance},
        {"l_shape_fraction", &s.l_shape_fraction},
        {"min_street_area", &s.min_street_area},
        {"hatching", &s.hatching}}},
      {"graticule",
       {{"enabled", &s.graticule},
        {"angle_deg", &s.grid_angle_deg},
        {"period", &s.grid_period},
        {"stroke", &s.grid_stroke},
        {"phase", &s.grid_phase},
        {"lines", &s.grid_lines},
        {"dash_on", &s.dash_on},
        {"dash_off", &s.dash_off}}},
      {"river", {{"enabled", &s.river}, {"width", &s.river_width}}},
      {"noise",
       {{"speck_density", &s.speck_density},
        {"break_probability", &s.break_probability},
        {"sigma", &s.noise_sigma}}},
  };
}

template <class Cfg>
void apply_entries(const std::vector<Entry>& entries, Cfg& cfg) {
  auto groups = bind(cfg);
  for (const Entry& e : entries) {
    const auto dot = e.key.rfind('.');
    const std::string section = dot == std::string::npos ? "" : e.key.substr(0, dot);
    const std::string name = dot == std::string::npos ? e.key : e.key.substr(dot + 1);
    const Field* field = nullptr;
    bool known_section = false;
    for (const Group& g : groups) {
      if (g.section != section) continue;
      known_section = true;
      for (const Field& f : g.fields) {
        if (f.key == name) field = &f;
      }
    }
    if (!known_section) throw FormatError("config: unknown section at " + where(e));
    if (!field) throw FormatError("config: unknown key at " + where(e));
    assign(field->slot, e);
  }
}

template <class Cfg>
std::string emit(Cfg cfg, const std::string& head) {
  std::ostringstream out;
  out << head;
  for (const Group& g : bind(cfg)) {
    out << "\n[" << g.section << "]\n";
    for (const Field& f : g.fields) out << f.key << " = " << format(f.slot) << "\n";
  }
  return out.str();
}

void require(bool ok, const char* field) {
  if (!ok) throw PreconditionError(std::string("config: ") + field + " is out of range");
}

}  // namespace

std::vector<Entry> parse(std::string_view text) {
  std::vector<Entry> out;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = "config: line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError(at + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw FormatError(at + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError(at + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw FormatError(at + ": missing key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (value.empty()) throw FormatError(at + ": missing value");
    out.push_back({section.empty() ? std::string(key) : section + "." + std::string(key),
                   std::string(value), line_no});
  }
  return out;
}

pipelines::PipelineConfig pipeline_from_text(std::string_view text) {
  std::vector<Entry> entries = parse(text);
  pipelines::PipelineConfig cfg;
  std::vector<Entry> rest;
  for (const Entry& e : entries) {
    if (e.key != "preset") {
      rest.push_back(e);
    } else if (e.value == "desk") {
      cfg = pipelines::PipelineConfig::desk();
    } else if (e.value != "full") {
      throw FormatError("config: unknown preset '" + e.value + "' at " + where(e));
    }
  }
  apply_entries(rest, cfg);
  validate(cfg);
  return cfg;
}

pipelines::PipelineConfig load_pipeline(const std::string& spec) {
  if (spec == "full") return {};
  if (spec == "desk") return pipelines::PipelineConfig::desk();
  return pipeline_from_text(io::read_text(spec));
}

std::string to_text(const pipelines::PipelineConfig& cfg) {
  return emit(cfg, "preset = full\n");
}

synth::SheetSpec sheet_from_text(std::string_view text) {
  synth::SheetSpec spec;
  apply_entries(parse(text), spec);
  validate(spec);
  return spec;
}

synth::SheetSpec load_sheet(const std::string& spec) {
  if (spec == "default") return {};
  return sheet_from_text(io::read_text(spec));
}

std::string to_text(const synth::SheetSpec& spec) { return emit(spec, ""); }

void validate(const pipelines::PipelineConfig& c) {
  const auto& t1 = c.task1;
  require(t1.area_close > 0, "task1.area_close");
  require(t1.dynamics_h > 0, "task1.dynamics_h");
  require(t1.min_area > 0 && t1.max_area >= t1.min_area, "task1.min_area/max_area");
  require(t1.min_fill_ratio > 0 && t1.min_fill_ratio <= 1, "task1.min_fill_ratio");
  require(t1.river_overlap > 0 && t1.river_overlap <= 1, "task1.river_overlap");
  require(t1.river_subsample > 0, "task1.river_subsample");
  require(t1.river_open_radius > 0, "task1.river_open_radius");
  require(t1.river_close_radius > 0, "task1.river_close_radius");
  require(t1.river_max_fill > 0 && t1.river_max_fill <= 1, "task1.river_max_fill");
  require(t1.river_min_area > 0, "task1.river_min_area");
  const auto& t2 = c.task2;
  require(t2.qfz_slope > 0, "task2.qfz_slope");
  require(t2.margin_min_level > 0 && t2.margin_min_level <= 255, "task2.margin_min_level");
  require(t2.margin_min_sides > 0 && t2.margin_min_sides <= 4, "task2.margin_min_sides");
  require(t2.margin_smooth >= 0, "task2.margin_smooth");
  require(t2.tophat_size > 0, "task2.tophat_size");
  require(t2.line_close >= 0, "task2.line_close");
  require(t2.center_fraction > 0 && t2.center_fraction < 1, "task2.center_fraction");
  require(t2.marker_gap > 0, "task2.marker_gap");
  require(t2.legend_min_fill > 0 && t2.legend_min_fill <= 1, "task2.legend_min_fill");
  require(t2.legend_border > 0 && t2.legend_border < 0.5, "task2.legend_border");
  require(t2.legend_min_area > 0 && t2.legend_min_area < 1, "task2.legend_min_area");
  require(t2.legend_dilate > 0, "task2.legend_dilate");
  require(c.binarize.min_area > 0, "binarize.min_area");
  require(c.binarize.otsu.max_depth > 0, "binarize.max_depth");
  require(c.binarize.otsu.delta_stop > 0, "binarize.delta_stop");
  require(c.binarize.otsu.max_ink_fraction > 0 && c.binarize.otsu.max_ink_fraction <= 1,
          "binarize.max_ink_fraction");
  const auto& u = c.task3_uwb;
  require(u.theta_step_deg > 0 && u.theta_step_deg <= 90, "task3_uwb.theta_step_deg");
  require(u.rho_step > 0, "task3_uwb.rho_step");
  require(u.content_erosion > 0, "task3_uwb.content_erosion");
  require(u.line_max_width >= 0, "task3_uwb.line_max_width");
  require(u.refine_band > 0, "task3_uwb.refine_band");
  require(u.grid.expected_min_lines >= 4, "task3_uwb.grid.expected_min_lines");
  require(u.grid.angle_tol_deg > 0, "task3_uwb.grid.angle_tol_deg");
  require(u.grid.spacing_tol > 0, "task3_uwb.grid.spacing_tol");
  require(u.grid.peak_floor > 0 && u.grid.peak_floor <= 1, "task3_uwb.grid.peak_floor");
  require(u.grid.min_votes_fraction > 0, "task3_uwb.grid.min_votes_fraction");
  require(u.grid.min_period > 0, "task3_uwb.grid.min_period");
  require(u.grid.nms_rho > 0, "task3_uwb.grid.nms_rho");
  require(u.grid.nms_theta_deg > 0, "task3_uwb.grid.nms_theta_deg");
  require(u.refine.window > 0, "task3_uwb.refine.window");
  require(u.refine.template_arm > 0, "task3_uwb.refine.template_arm");
  require(u.refine.template_stroke > 0, "task3_uwb.refine.template_stroke");
  require(u.refine.min_ncc > 0 && u.refine.min_ncc <= 1, "task3_uwb.refine.min_ncc");
  const auto& m = c.task3_cmm;
  require(m.subsample > 0, "task3_cmm.subsample");
  require(m.pre_erosion > 0, "task3_cmm.pre_erosion");
  require(m.angle_min >= 0 && m.angle_max > m.angle_min && m.angle_max < 90,
          "task3_cmm.angle_min/angle_max");
  require(m.angle_step > 0, "task3_cmm.angle_step");
  require(m.line_length > 0, "task3_cmm.line_length");
  require(m.tophat_size > 0, "task3_cmm.tophat_size");
  require(m.min_period > 0, "task3_cmm.min_period");
  require(m.peak_floor > 0 && m.peak_floor <= 1, "task3_cmm.peak_floor");
  require(m.cross_length > 0, "task3_cmm.cross_length");
  require(m.contrast_min > 0, "task3_cmm.contrast_min");
  require(m.refine_window > 0, "task3_cmm.refine_window");
  require(m.frame_open > 0 && m.frame_open <= 1, "task3_cmm.frame_open");
  require(m.frame_coverage > 0 && m.frame_coverage <= 1, "task3_cmm.frame_coverage");
  require(m.frame_band > 0 && m.frame_band < 0.5, "task3_cmm.frame_band");
  require(m.min_confirmed >= 0, "task3_cmm.min_confirmed");
}

void validate(const synth::SheetSpec& s) {
  require(s.width > 0 && s.height > 0, "sheet.width/height");
  require(s.margin >= 0, "sheet.margin");
  require(s.frame_count == 1 || s.frame_count == 2, "frame.count");
  require(s.outer_stroke > 0 && s.inner_stroke > 0, "frame stroke");
  require(s.frame_gap > 0, "frame.gap");
  require(s.legend_count >= 0 && s.legend_count <= 4, "legend.count");
  require(s.legend_width > 0 && s.legend_height > 0, "legend size");
  require(s.blocks >= 0, "blocks.count");
  require(s.block_min > 0 && s.block_max >= s.block_min, "blocks.min_size/max_size");
  require(s.block_stroke > 0, "blocks.stroke");
  require(s.block_gap >= 3, "blocks.gap");
  require(s.block_clearance >= 0 && s.crossing_clearance >= 0, "blocks clearance");
  require(s.l_shape_fraction >= 0 && s.l_shape_fraction <= 1, "blocks.l_shape_fraction");
  require(s.min_street_area >= 0, "blocks.min_street_area");
  require(s.grid_stroke > 0, "graticule.stroke");
  require(s.grid_period > 4 * s.grid_stroke, "graticule.period");
  require(s.grid_lines >= 0, "graticule.lines");
  require(s.dash_on >= 0 && s.dash_off >= 0, "graticule dash");
  require(s.river_width > 0, "river.width");
  require(s.speck_density >= 0 && s.break_probability >= 0 && s.break_probability <= 1 &&
              s.noise_sigma >= 0,
          "noise");
}

}  // namespace mapseg::config
