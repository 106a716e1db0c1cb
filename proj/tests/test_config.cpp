#include <doctest.h>

#include "mapseg/config.hpp"

using namespace mapseg;

TEST_CASE("parse: sections, comments, quotes, CRLF") {
  const auto e = config::parse("# header\r\npreset = \"desk\"\r\n\n[task1]\r\nmin_area = 40 # trailing\n"
                               "[task3_uwb.grid]\n  peak_floor=0.25\n");
  REQUIRE(e.size() == 3);
  CHECK(e[0].key == "preset");
  CHECK(e[0].value == "desk");
  CHECK(e[1].key == "task1.min_area");
  CHECK(e[1].value == "40");
  CHECK(e[1].line == 5);
  CHECK(e[2].key == "task3_uwb.grid.peak_floor");
  CHECK(e[2].value == "0.25");
}

TEST_CASE("parse errors name the line") {
  CHECK_THROWS_AS(config::parse("[task1\n"), FormatError);
  CHECK_THROWS_AS(config::parse("[]\n"), FormatError);
  CHECK_THROWS_AS(config::parse("key\n"), FormatError);
  CHECK_THROWS_AS(config::parse("= 3\n"), FormatError);
  CHECK_THROWS_AS(config::parse("a =\n"), FormatError);
  try {
    config::parse("a = 1\n\nbroken\n");
    FAIL("expected FormatError");
  } catch (const FormatError& err) {
    CHECK(std::string(err.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("full defaults hold the reference values") {
  const pipelines::PipelineConfig c = config::load_pipeline("full");
  CHECK(c.task1.area_close == 1000);
  CHECK(c.task1.dynamics_h == 2);
  CHECK(c.task1.min_area == 2000);
  CHECK(c.task1.max_area == 1000000);
  CHECK(c.task1.min_fill_ratio == 0.3);
  CHECK(c.task1.river_overlap == 0.6);
  CHECK(c.task3_cmm.subsample == 10);
  CHECK(c.task3_cmm.pre_erosion == 10);
  CHECK(c.task3_cmm.angle_min == 0.0);
  CHECK(c.task3_cmm.angle_max == 30.0);
  CHECK(c.task3_cmm.angle_step == 1.0);
  CHECK(c.task3_cmm.cross_length == 20);
  CHECK(c.task3_cmm.contrast_min == 10);
  CHECK(c.task3_uwb.grid.expected_min_lines == 4);
  CHECK(c.task2.center_fraction == 0.5);
  CHECK_NOTHROW(config::validate(c));
  CHECK_NOTHROW(config::validate(pipelines::PipelineConfig::desk()));
}

TEST_CASE("pipeline overrides apply on top of the preset") {
  const auto c = config::pipeline_from_text("preset = desk\n[task1]\nmin_area = 777\n"
                                            "[task3_uwb.refine]\nmin_ncc = 0.5\n");
  CHECK(c.task1.min_area == 777);
  CHECK(c.task1.area_close == pipelines::PipelineConfig::desk().task1.area_close);
  CHECK(c.task3_uwb.refine.min_ncc == 0.5);
  CHECK(config::pipeline_from_text("").task1.area_close == 1000);
}

TEST_CASE("unknown keys, bad values and out-of-range values are rejected") {
  CHECK_THROWS_AS(config::pipeline_from_text("[task1]\nmin_areaa = 3\n"), FormatError);
  CHECK_THROWS_AS(config::pipeline_from_text("[task9]\nmin_area = 3\n"), FormatError);
  CHECK_THROWS_AS(config::pipeline_from_text("min_area = 3\n"), FormatError);
  CHECK_THROWS_AS(config::pipeline_from_text("[task1]\nmin_area = 3.5\n"), FormatError);
  CHECK_THROWS_AS(config::pipeline_from_text("[task1]\nmin_area = 12abc\n"), FormatError);
  CHECK_THROWS_AS(config::pipeline_from_text("[task1]\nmin_fill_ratio = nan\n"), FormatError);
  CHECK_THROWS_AS(config::pipeline_from_text("preset = huge\n"), FormatError);
  CHECK_THROWS_AS(config::pipeline_from_text("[task1]\nmin_area = 0\n"), PreconditionError);
  CHECK_THROWS_AS(config::pipeline_from_text("[task1]\ndynamics_h = -2\n"), PreconditionError);
  CHECK_THROWS_AS(config::pipeline_from_text("[task3_cmm]\nangle_max = 0\n"), PreconditionError);
  CHECK_THROWS_AS(config::sheet_from_text("[graticule]\nenabled = yes\n"), FormatError);
  CHECK_THROWS_AS(config::sheet_from_text("[graticule]\nperiod = 6\nstroke = 2\n"),
                  PreconditionError);
}

TEST_CASE("to_text round-trips exactly") {
  pipelines::PipelineConfig c = pipelines::PipelineConfig::desk();
  c.task1.min_fill_ratio = 0.1 + 0.2;  // not representable in few digits
  c.task3_uwb.theta_step_deg = 1.0 / 3.0;
  const auto back = config::pipeline_from_text(config::to_text(c));
  CHECK(config::to_text(back) == config::to_text(c));
  CHECK(back.task1.min_fill_ratio == c.task1.min_fill_ratio);
  CHECK(back.task3_uwb.theta_step_deg == c.task3_uwb.theta_step_deg);
  CHECK(back.task1.min_area == c.task1.min_area);

  synth::SheetSpec s;
  s.seed = 18446744073709551557ull;
  s.river = true;
  s.grid_angle_deg = 2.75;
  const auto sb = config::sheet_from_text(config::to_text(s));
  CHECK(sb.seed == s.seed);
  CHECK(sb.river);
  CHECK(sb.grid_angle_deg == 2.75);
  CHECK(config::to_text(sb) == config::to_text(s));
}

TEST_CASE("load_* accept preset names and report missing files") {
  CHECK(config::load_sheet("default").width == 1024);
  CHECK(config::load_pipeline("desk").task1.min_area == 500);
  CHECK_THROWS_AS(config::load_pipeline("/nonexistent/cfg.toml"), IoError);
  CHECK_THROWS_AS(config::load_sheet("/nonexistent/spec.toml"), IoError);
}
