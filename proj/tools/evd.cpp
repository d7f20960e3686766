// evd: headless entry point. Exit codes: 0 success, 1 user error, 2 internal.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "evd/canonical_json.hpp"
#include "evd/export.hpp"
#include "evd/filter.hpp"
#include "evd/formats.hpp"
#include "evd/geometry.hpp"
#include "evd/service_http.hpp"
#include "evd/session.hpp"
#include "evd/toy.hpp"

namespace {

// Raised for command-line mistakes that CLI11 cannot see.
struct UsageError : evd::Error {
  using evd::Error::Error;
};

void emit(const std::string& out_path, const std::string& bytes) {
  if (out_path.empty() || out_path == "-")
    std::fwrite(bytes.data(), 1, bytes.size(), stdout);
  else
    evd::write_file(out_path, bytes);
}

std::vector<evd::FilterDef> load_filters(const std::string& path) {
  if (path.empty()) return {};
  try {
    return evd::read_filters(evd::read_file(path));
  } catch (const evd::FormatError& e) {
    throw evd::Error(path + ": " + e.what());
  }
}

evd::DetectorModel load_geometry(const std::string& path) {
  try {
    return evd::read_geometry(evd::read_file(path));
  } catch (const evd::FormatError& e) {
    throw evd::Error(path + ": " + e.what());
  }
}

evd::EventSet load_events(const std::string& path) {
  try {
    auto loaded = evd::read_events(evd::read_file(path));
    for (const auto& w : loaded.warnings) spdlog::warn("{}: {}", path, w);
    return std::move(loaded.events);
  } catch (const evd::FormatError& e) {
    throw evd::Error(path + ": " + e.what());
  }
}

// "name.param=value"; the value is true, false or a number.
std::pair<std::string, std::pair<std::string, evd::ParamValue>> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  const auto dot = text.rfind('.', eq);
  if (eq == std::string::npos || dot == std::string::npos || dot == 0 || dot + 1 == eq)
    throw UsageError("--set expects filter.param=value, got '" + text + "'");
  const std::string value = text.substr(eq + 1);
  evd::ParamValue v;
  if (value == "true")
    v = true;
  else if (value == "false")
    v = false;
  else {
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(d))
      throw UsageError("--set value must be true, false or a finite number, got '" + value + "'");
    v = d;
  }
  return {text.substr(0, dot), {text.substr(dot + 1, eq - dot - 1), v}};
}

struct RenderArgs {
  std::string geom, events, filters, kinds = "tracks,hits,segments", format = "scene", projection = "xy", out = "-";
  std::optional<std::int64_t> index;
  std::vector<std::string> sets, select;
  double eps = 0.1;
  std::optional<double> clip_r, clip_z;
  std::size_t max_nodes = 100000;
};

int run_render(const RenderArgs& a) {
  evd::RenderOptions opt;
  opt.eps = a.eps;
  opt.kinds = evd::parse_kinds(a.kinds);
  opt.detector_selection = a.select;
  opt.clip_r = a.clip_r;
  opt.clip_z = a.clip_z;
  opt.max_nodes = a.max_nodes;
  for (const auto& g : a.select) evd::PathGlob check(g);

  evd::DetectorModel detector = load_geometry(a.geom);
  evd::EventSet events = a.events.empty() ? evd::EventSet{} : load_events(a.events);
  evd::Session session(std::move(detector), std::move(events), load_filters(a.filters));
  for (const auto& text : a.sets) {
    auto [filter, pv] = parse_assignment(text);
    const auto errors = session.update_params(filter, {{pv.first, pv.second}});
    if (!errors.empty()) throw UsageError("--set " + text + ": " + errors.front().field + ": " + errors.front().message);
  }

  evd::Scene scene;
  if (a.events.empty()) {
    scene = evd::make_detector_scene(session.detector(), opt);
  } else {
    const auto& all = session.events().events;
    if (all.empty()) throw UsageError(a.events + " contains no events");
    const std::int64_t index = a.index.value_or(all.front().index);
    const evd::Event* event = session.find_event(index);
    if (!event) throw UsageError("no event with index " + std::to_string(index) + " in " + a.events);
    const evd::FilterChain chain = session.chain(*session.values());
    if (a.format == "scene") {
      emit(a.out, session.render_event_json(*event, opt, chain));
      return 0;
    }
    scene = session.event_scene(*event, opt, chain);
  }
  if (a.format == "scene")
    emit(a.out, evd::write_scene_json(scene));
  else if (a.format == "obj")
    emit(a.out, evd::write_obj(scene));
  else
    emit(a.out, evd::write_svg(scene, evd::parse_projection(a.projection)));
  return 0;
}

int run_filter_check(const std::string& applies_to, const std::string& expression, const std::string& events_path) {
  evd::FilterDef def;
  def.name = "check";
  def.applies_to = evd::parse_applies_to(applies_to);
  def.expression = expression;
  evd::ExtraNames extras;
  if (!events_path.empty()) extras = evd::collect_extra_names(load_events(events_path));
  try {
    const evd::TypedExpr typed = evd::compile_filter(def, extras);
    std::cout << evd::print_sexpr(typed.root()) << "\n" << evd::print_minimal(typed.root()) << "\n";
    return 0;
  } catch (const evd::DslError& e) {
    std::cerr << "error " << e.what() << "\n  " << expression << "\n  " << std::string(e.pos(), ' ') << "^\n";
    return 1;
  }
}

// One line per file; returns true when every file is valid.
bool run_validate(const std::vector<std::string>& files) {
  auto ends_with = [](const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  bool all_ok = true;
  for (const auto& path : files) {
    std::vector<std::string> problems, warnings;
    try {
      const std::string text = evd::read_file(path);
      if (ends_with(path, ".gjson")) {
        const auto d = evd::read_geometry(text);
        problems = evd::validate_detector(d);
        for (const auto& placed : evd::flatten_detector(d, {}, 0.1))
          if (!evd::is_watertight(placed.mesh)) warnings.push_back(placed.path + ": tessellation is not watertight");
      } else if (ends_with(path, ".evjson")) {
        warnings = evd::read_events(text).warnings;
      } else if (ends_with(path, ".filters.json")) {
        for (const auto& def : evd::read_filters(text)) {
          try {
            evd::compile_filter(def);
          } catch (const evd::Error& e) {
            problems.push_back("filter '" + def.name + "': " + e.what());
          }
        }
      } else if (ends_with(path, ".json")) {
        evd::read_scene_json(text);
      } else {
        problems.push_back("unknown file type (expected .gjson, .evjson, .filters.json or scene .json)");
      }
    } catch (const evd::Error& e) {
      problems.push_back(e.what());
    }
    for (const auto& w : warnings) std::cout << path << ": warning: " << w << "\n";
    for (const auto& p : problems) std::cout << path << ": error: " << p << "\n";
    if (problems.empty()) std::cout << path << ": ok\n";
    all_ok = all_ok && problems.empty();
  }
  return all_ok;
}

}  // namespace

int main(int argc, char** argv) {
  evd::configure_logging_from_env();
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"evd: event display engine"};
  app.require_subcommand(1);

  // gen
  evd::ToyConfig toy;
  std::string gen_geom = "toy.gjson", gen_events = "toy.evjson";
  auto* gen = app.add_subcommand("gen", "generate the toy detector and one toy event");
  gen->add_option("--seed", toy.seed, "PRNG seed");
  gen->add_option("--tracks", toy.n_tracks, "number of tracks")->check(CLI::PositiveNumber);
  gen->add_option("--b-field", toy.b_field, "solenoid field, tesla");
  gen->add_option("--layers", toy.layers, "layer radii, cm")->delimiter(',');
  gen->add_option("--half-length", toy.half_length_z, "barrel half-length, cm");
  gen->add_option("--pt-min", toy.pt_range[0], "GeV/c");
  gen->add_option("--pt-max", toy.pt_range[1], "GeV/c");
  gen->add_option("--eta-min", toy.eta_range[0]);
  gen->add_option("--eta-max", toy.eta_range[1]);
  gen->add_option("--smear", toy.smear_sigma, "hit smearing sigma, cm");
  gen->add_option("--geom", gen_geom, "output .gjson");
  gen->add_option("--events", gen_events, "output .evjson");

  // render
  RenderArgs ra;
  auto* render = app.add_subcommand("render", "render a scene as scene.json, OBJ or SVG");
  render->add_option("--geom", ra.geom, "detector .gjson")->required();
  render->add_option("--events", ra.events, "event .evjson (omit for a detector-only scene)");
  render->add_option("--index", ra.index, "event index (default: first event)");
  render->add_option("--filters", ra.filters, ".filters.json; every filter is enabled");
  render->add_option("--set", ra.sets, "filter.param=value")->allow_extra_args(false);
  render->add_option("--kinds", ra.kinds, "comma-separated subset of tracks,hits,segments");
  render->add_option("--select", ra.select, "detector path glob")->allow_extra_args(false);
  render->add_option("--eps", ra.eps, "tessellation tolerance, cm")->check(CLI::PositiveNumber);
  render->add_option("--clip-r", ra.clip_r, "clip radius, cm")->check(CLI::PositiveNumber);
  render->add_option("--clip-z", ra.clip_z, "clip half-length, cm")->check(CLI::PositiveNumber);
  render->add_option("--max-nodes", ra.max_nodes, "scene node limit");
  render->add_option("--format", ra.format)->check(CLI::IsMember({"scene", "obj", "svg"}));
  render->add_option("--projection", ra.projection)->check(CLI::IsMember({"xy", "zx", "rz"}));
  render->add_option("--out", ra.out, "output file, - for stdout");

  // filter check
  std::string applies_to = "track", expression, check_events;
  auto* filter = app.add_subcommand("filter", "filter expression tools");
  filter->require_subcommand(1);
  auto* check = filter->add_subcommand("check", "parse and type check an expression");
  check->add_option("--applies-to", applies_to)->check(CLI::IsMember({"track", "hit", "segment", "all"}));
  check->add_option("--events", check_events, "resolve extra attributes from this .evjson");
  check->add_option("expression", expression)->required();

  // validate
  std::vector<std::string> files;
  auto* validate = app.add_subcommand("validate", "check files against their schemas");
  validate->add_option("files", files)->required()->check(CLI::ExistingFile);

  // serve
  std::string s_geom, s_events, s_filters, host = "127.0.0.1", ui_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP service for the web UI");
  serve->add_option("--geom", s_geom)->required();
  serve->add_option("--events", s_events)->required();
  serve->add_option("--filters", s_filters);
  serve->add_option("--host", host);
  serve->add_option("--port", port)->check(CLI::Range(1, 65535));
  serve->add_option("--ui-dir", ui_dir, "static files served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) {
      const auto [detector, events] = evd::generate_toy(toy);
      evd::write_file(gen_geom, evd::write_geometry(detector));
      evd::write_file(gen_events, evd::write_events(events));
      spdlog::info("wrote {} and {} ({} tracks, {} hits)", gen_geom, gen_events, events.events[0].tracks.size(),
                   events.events[0].hits.size());
      return 0;
    }
    if (*render) return run_render(ra);
    if (*check) return run_filter_check(applies_to, expression, check_events);
    if (*validate) return run_validate(files) ? 0 : 1;
    if (*serve) {
      evd::Session session(load_geometry(s_geom), load_events(s_events), load_filters(s_filters));
      return evd::serve(session, host, port, ui_dir) ? 0 : 1;
    }
  } catch (const evd::Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::critical("internal error: {}", e.what());
    return 2;
  }
  return 1;
}
