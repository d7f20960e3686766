#include "evd/session.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "evd/canonical_json.hpp"
#include "evd/formats.hpp"
#include "evd/geometry.hpp"

namespace evd {

using nlohmann::json;

namespace {

// Maps to a 4xx response inside route().
struct HttpError {
  int status;
  std::string code;
  std::string message;
  std::string detail;
};

Response json_response(const json& body, int status = 200) { return {status, "application/json", canonical_dump(body)}; }

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::optional<std::string> query_value(const Request& r, const std::string& key) {
  const auto [lo, hi] = r.query.equal_range(key);
  if (lo == hi) return std::nullopt;
  return std::prev(hi)->second;  // last occurrence wins
}

double parse_number(const std::string& key, const std::string& text) {
  double v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw HttpError{400, "bad_query", "query parameter '" + key + "' must be a finite number", text};
  return v;
}

std::int64_t parse_index(const std::string& text) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw HttpError{400, "bad_index", "event index must be an integer", text};
  return v;
}

std::optional<double> positive_param(const Request& r, const std::string& key) {
  const auto text = query_value(r, key);
  if (!text) return std::nullopt;
  const double v = parse_number(key, *text);
  if (!(v > 0)) throw HttpError{400, "bad_query", "query parameter '" + key + "' must be > 0", *text};
  return v;
}

std::vector<std::string> selection_param(const Request& r) {
  std::vector<std::string> out;
  const auto [lo, hi] = r.query.equal_range("select");
  for (auto it = lo; it != hi; ++it)
    for (auto& g : split(it->second, ','))
      if (!g.empty()) {
        try {
          PathGlob check(g);
        } catch (const Error& e) {
          throw HttpError{400, "bad_query", e.what(), g};
        }
        out.push_back(std::move(g));
      }
  return out;
}

RenderOptions render_options(const Request& r, bool event_kinds) {
  RenderOptions opt;
  if (auto eps = positive_param(r, "eps")) opt.eps = *eps;
  opt.detector_selection = selection_param(r);
  if (!event_kinds) return opt;
  if (auto kinds = query_value(r, "kinds")) {
    try {
      opt.kinds = parse_kinds(*kinds);
    } catch (const Error& e) {
      throw HttpError{400, "bad_query", e.what(), *kinds};
    }
  }
  opt.clip_r = positive_param(r, "clip_r");
  opt.clip_z = positive_param(r, "clip_z");
  if (auto text = query_value(r, "max_nodes")) {
    const std::int64_t n = parse_index(*text);
    if (n < 1) throw HttpError{400, "bad_query", "query parameter 'max_nodes' must be >= 1", *text};
    opt.max_nodes = static_cast<std::size_t>(n);
  }
  return opt;
}

// Absent: every filter enabled. Present: exactly the listed ones.
std::optional<std::set<std::string>> enabled_param(const Request& r) {
  const auto text = query_value(r, "enabled");
  if (!text) return std::nullopt;
  std::set<std::string> out;
  for (auto& n : split(*text, ','))
    if (!n.empty()) out.insert(std::move(n));
  return out;
}

json descriptor_json(const FilterDef& def, const ParamValues& values) {
  json j = to_json(describe_filter(def));
  j["values"] = to_json(values);
  return j;
}

json range_json(const std::vector<AttributeMap>& objects, const AttributeSchema& schema) {
  json out = json::object();
  if (objects.empty()) return out;
  for (const auto& name : schema.names()) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& attrs : objects) {
      const auto it = attrs.find(name);
      if (it == attrs.end()) continue;
      lo = std::min(lo, it->second);
      hi = std::max(hi, it->second);
    }
    if (lo <= hi) out[name] = {{"min", lo}, {"max", hi}};
  }
  return out;
}

}  // namespace

Response error_response(int status, const std::string& code, const std::string& message, const std::string& detail) {
  return json_response({{"code", code}, {"message", message}, {"detail", detail}}, status);
}

Session::Session(DetectorModel detector, EventSet events, std::vector<FilterDef> filters)
    : detector_(std::move(detector)), events_(std::move(events)), filters_(std::move(filters)) {
  extras_ = collect_extra_names(events_);
  ValuesMap initial;
  std::set<std::string> names;
  for (const FilterDef& def : filters_) {
    if (!names.insert(def.name).second) throw Error("duplicate filter name '" + def.name + "'");
    try {
      compiled_.push_back(compile_filter(def, extras_));
    } catch (const DslError& e) {
      throw Error("filter '" + def.name + "': expression " + e.what());
    } catch (const Error& e) {
      throw Error("filter '" + def.name + "': " + e.what());
    }
    initial[def.name] = default_values(def);
  }
  values_ = std::make_shared<const ValuesMap>(std::move(initial));
}

std::shared_ptr<const ValuesMap> Session::values() const {
  std::lock_guard lock(values_mutex_);
  return values_;
}

std::vector<FieldError> Session::update_params(const std::string& filter, const ParamValues& update) {
  const auto def = std::find_if(filters_.begin(), filters_.end(), [&](const FilterDef& f) { return f.name == filter; });
  if (def == filters_.end()) throw Error("unknown filter '" + filter + "'");
  std::lock_guard lock(values_mutex_);
  ParamValues merged = values_->at(filter);
  for (const auto& [k, v] : update) merged[k] = v;
  auto errors = check_param_values(*def, merged);
  if (!errors.empty()) return errors;
  auto next = std::make_shared<ValuesMap>(*values_);
  (*next)[filter] = std::move(merged);
  values_ = std::move(next);
  return {};
}

FilterChain Session::chain(const ValuesMap& values, const std::optional<std::set<std::string>>& enabled) const {
  if (enabled)
    for (const auto& name : *enabled)
      if (!values.count(name)) throw Error("unknown filter '" + name + "'");
  FilterChain chain;
  for (std::size_t i = 0; i < filters_.size(); ++i) {
    const FilterDef& def = filters_[i];
    const auto it = values.find(def.name);
    chain.links.push_back({def, compiled_[i], it == values.end() ? default_values(def) : it->second,
                           !enabled || enabled->count(def.name) > 0});
  }
  return chain;
}

const Event* Session::find_event(std::int64_t index) const {
  for (const Event& e : events_.events)
    if (e.index == index) return &e;
  return nullptr;
}

Scene Session::event_scene(const Event& event, const RenderOptions& options, const FilterChain& chain) const {
  return make_scene(detector_, event, chain, options, events_.b_field);
}

std::string Session::render_event_json(const Event& event, const RenderOptions& options,
                                       const FilterChain& chain) const {
  return write_scene_json(event_scene(event, options, chain));
}

Response Session::handle(const Request& request) {
  try {
    return route(request);
  } catch (const HttpError& e) {
    return error_response(e.status, e.code, e.message, e.detail);
  } catch (const NodeLimitError& e) {
    return error_response(422, "node_limit", e.what());
  } catch (const FormatError& e) {
    return error_response(400, "bad_body", e.what(), e.location());
  } catch (const std::exception& e) {
    return error_response(500, "internal", "internal error", e.what());
  }
}

Response Session::route(const Request& request) {
  static const std::string prefix = "/api/v1/";
  if (request.path.compare(0, prefix.size(), prefix) != 0)
    throw HttpError{404, "not_found", "unknown path", request.path};
  std::vector<std::string> parts = split(std::string_view(request.path).substr(prefix.size()), '/');
  if (!parts.empty() && parts.back().empty()) parts.pop_back();  // tolerate a trailing slash
  const std::string& method = request.method;
  auto require = [&](const char* m) {
    if (method != m)
      throw HttpError{405, "method_not_allowed", "method " + method + " is not allowed here", request.path};
  };

  if (parts.size() == 1 && parts[0] == "detector") {
    require("GET");
    json volumes = json::array();
    for_each_volume(detector_, [&](const Volume& v, const std::string& path) {
      json children = json::array();
      for (const Volume& c : v.children) children.push_back(path + "/" + c.name);
      volumes.push_back({{"path", path},
                         {"name", v.name},
                         {"shape", v.shape ? to_json(*v.shape) : json(nullptr)},
                         {"color", {v.color.r, v.color.g, v.color.b, v.color.a}},
                         {"visible", v.visible},
                         {"translation", {v.translation.x, v.translation.y, v.translation.z}},
                         {"rotation", v.rotation.m},
                         {"children", std::move(children)}});
    });
    return json_response({{"volumes", std::move(volumes)}});
  }
  if (parts.size() == 2 && parts[0] == "detector" && parts[1] == "scene") {
    require("GET");
    return {200, "application/json", write_scene_json(make_detector_scene(detector_, render_options(request, false)))};
  }

  if (!parts.empty() && parts[0] == "events") {
    if (parts.size() == 1) {
      require("GET");
      json indices = json::array();
      for (const Event& e : events_.events) indices.push_back(e.index);
      return json_response({{"count", events_.events.size()}, {"indices", std::move(indices)}});
    }
    const std::int64_t index = parse_index(parts[1]);
    const Event* event = find_event(index);
    if (parts.size() > 3 || (parts.size() == 3 && parts[2] != "scene" && parts[2] != "pick"))
      throw HttpError{404, "not_found", "unknown path", request.path};
    require("GET");
    if (!event) throw HttpError{404, "unknown_event", "no event with index " + parts[1], parts[1]};

    if (parts.size() == 2) {
      std::vector<AttributeMap> tracks, hits, segments;
      for (const auto& t : event->tracks) tracks.push_back(track_attributes(t, events_.b_field));
      for (const auto& h : event->hits) hits.push_back(hit_attributes(h));
      for (const auto& s : event->segments) segments.push_back(segment_attributes(s));
      json meta = json::object();
      for (const auto& [k, v] : event->meta) meta[k] = v;
      return json_response(
          {{"index", event->index},
           {"counts", {{"tracks", tracks.size()}, {"hits", hits.size()}, {"segments", segments.size()}}},
           {"attributes",
            {{"track", range_json(tracks, attribute_schema(ObjectKind::track))},
             {"hit", range_json(hits, attribute_schema(ObjectKind::hit))},
             {"segment", range_json(segments, attribute_schema(ObjectKind::segment))}}},
           {"meta", std::move(meta)}});
    }

    const RenderOptions options = render_options(request, true);
    const auto enabled = enabled_param(request);
    if (enabled)
      for (const auto& name : *enabled)
        if (std::none_of(filters_.begin(), filters_.end(), [&](const FilterDef& f) { return f.name == name; }))
          throw HttpError{404, "unknown_filter", "no filter named '" + name + "'", name};
    const FilterChain ch = chain(*values(), enabled);

    if (parts[2] == "scene") return {200, "application/json", render_event_json(*event, options, ch)};

    // pick: node ids refer to the scene rendered with the same query.
    const auto node_text = query_value(request, "node");
    if (!node_text) throw HttpError{400, "bad_query", "query parameter 'node' is required", ""};
    const std::int64_t node = parse_index(*node_text);
    std::optional<std::size_t> point;
    if (auto p = query_value(request, "point")) {
      const std::int64_t v = parse_index(*p);
      if (v < 0) throw HttpError{400, "bad_query", "query parameter 'point' must be >= 0", *p};
      point = static_cast<std::size_t>(v);
    }
    const Scene scene = event_scene(*event, options, ch);
    const auto source = pick(scene, node, point);
    if (!source) throw HttpError{404, "unknown_node", "no such node or point in the scene", *node_text};

    json body{{"source", to_json(*source)}, {"attributes", json::object()}};
    switch (source->kind) {
      case SourceKind::track:
        for (const auto& t : event->tracks)
          if (t.id == source->id) body["attributes"] = to_json(track_attributes(t, events_.b_field));
        break;
      case SourceKind::hit:
        for (const auto& h : event->hits)
          if (h.id == source->id) body["attributes"] = to_json(hit_attributes(h));
        break;
      case SourceKind::segment:
        for (const auto& s : event->segments)
          if (s.id == source->id) body["attributes"] = to_json(segment_attributes(s));
        break;
      case SourceKind::volume:
        if (const Volume* v = volume_lookup(detector_, source->path)) {
          body["shape"] = v->shape ? to_json(*v->shape) : json(nullptr);
          body["color"] = {v->color.r, v->color.g, v->color.b, v->color.a};
        }
        break;
    }
    return json_response(body);
  }

  if (!parts.empty() && parts[0] == "filters") {
    if (parts.size() == 1) {
      require("GET");
      const auto values = this->values();
      json out = json::array();
      for (const FilterDef& def : filters_) out.push_back(descriptor_json(def, values->at(def.name)));
      return json_response(out);
    }
    if (parts.size() == 2 && parts[1] == "validate") {
      require("POST");
      json body;
      try {
        body = json::parse(request.body);
      } catch (const json::parse_error&) {
        throw HttpError{400, "bad_body", "request body is not valid JSON", ""};
      }
      if (!body.is_object() || !body.contains("expression") || !body["expression"].is_string())
        throw HttpError{400, "bad_body", "body must be {\"expression\": string, \"applies_to\": string}", ""};
      // Reuse the filter-file reader for the optional params list.
      json def{{"name", "validate"},
               {"applies_to", body.value("applies_to", std::string("track"))},
               {"expression", body["expression"]},
               {"params", body.value("params", json::array())}};
      const FilterDef parsed = read_filters(json::array({def}).dump()).at(0);
      try {
        compile_filter(parsed, extras_);
      } catch (const DslError& e) {
        return json_response({{"ok", false}, {"errors", json::array({{{"pos", e.pos()}, {"msg", e.message()}}})}});
      } catch (const Error& e) {
        return json_response({{"ok", false}, {"errors", json::array({{{"pos", nullptr}, {"msg", e.what()}}})}});
      }
      return json_response({{"ok", true}});
    }
    if (parts.size() == 3 && parts[2] == "params") {
      require("PUT");
      const std::string& name = parts[1];
      const auto def = std::find_if(filters_.begin(), filters_.end(), [&](const FilterDef& f) { return f.name == name; });
      if (def == filters_.end()) throw HttpError{404, "unknown_filter", "no filter named '" + name + "'", name};
      json body;
      try {
        body = json::parse(request.body);
      } catch (const json::parse_error&) {
        throw HttpError{400, "bad_body", "request body is not valid JSON", ""};
      }
      const ParamValues update = param_values_from_json(body);
      const auto errors = update_params(name, update);
      if (!errors.empty()) {
        json fields = json::array();
        std::string detail;
        for (const auto& e : errors) {
          fields.push_back({{"field", e.field}, {"message", e.message}});
          detail += (detail.empty() ? "" : "; ") + e.field + ": " + e.message;
        }
        json out{{"code", "invalid_params"},
                 {"message", "parameter values rejected"},
                 {"detail", detail},
                 {"errors", std::move(fields)}};
        return json_response(out, 422);
      }
      return json_response(descriptor_json(*def, values()->at(name)));
    }
  }
  throw HttpError{404, "not_found", "unknown path", request.path};
}

}  // namespace evd
