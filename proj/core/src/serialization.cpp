#include "urbanforge/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace urbanforge {
namespace {

using nlohmann::ordered_json;

ordered_json scale_to_json(const ScaleConfig& scale) {
  ordered_json out;
  out["meters_per_pixel"] = scale.meters_per_pixel;
  out["service_radius_m"] = scale.service_radius_m;
  out["ecology_radius_m"] = scale.ecology_radius_m;
  out["satisfaction_radius_m"] = scale.satisfaction_radius_m;
  return out;
}

Expected<ScaleConfig> scale_from_json(const nlohmann::json& doc) {
  ScaleConfig scale;
  if (!doc.is_object()) {
    return make_error(Errc::kParseError, "scale must be an object");
  }
  try {
    scale.meters_per_pixel = doc.at("meters_per_pixel").get<double>();
    scale.service_radius_m = doc.at("service_radius_m").get<double>();
    scale.ecology_radius_m = doc.at("ecology_radius_m").get<double>();
    scale.satisfaction_radius_m = doc.at("satisfaction_radius_m").get<double>();
  } catch (const nlohmann::json::exception& e) {
    return make_error(Errc::kParseError, std::string("bad scale: ") + e.what());
  }
  if (auto st = validate_scale(scale); !st.ok()) return st.error();
  return scale;
}

ordered_json regions_to_json(const CityLayout& layout) {
  ordered_json arr = ordered_json::array();
  for (const Region& region : layout.regions()) {
    ordered_json rec;
    rec["id"] = region.id;
    rec["type"] = std::string(land_use_name(region.land_use));
    rec["area_px"] = region.area_px;
    rec["centroid"] = ordered_json::array({region.centroid.x, region.centroid.y});
    arr.push_back(std::move(rec));
  }
  return arr;
}

Expected<std::vector<Region>> regions_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) {
    return make_error(Errc::kParseError, "regions must be an array");
  }
  std::vector<Region> regions;
  regions.reserve(doc.size());
  for (const auto& rec : doc) {
    Region region;
    try {
      region.id = rec.at("id").get<std::string>();
      const auto type_name = rec.at("type").get<std::string>();
      const auto type = parse_land_use(type_name);
      if (!type.has_value()) {
        return make_error(Errc::kParseError,
                          "region " + region.id + ": unknown type '" + type_name + "'");
      }
      region.land_use = *type;
      region.area_px = rec.at("area_px").get<std::int64_t>();
      const auto& centroid = rec.at("centroid");
      if (!centroid.is_array() || centroid.size() != 2) {
        return make_error(Errc::kParseError,
                          "region " + region.id + ": centroid must be [x, y]");
      }
      region.centroid.x = centroid.at(0).get<double>();
      region.centroid.y = centroid.at(1).get<double>();
    } catch (const nlohmann::json::exception& e) {
      return make_error(Errc::kParseError, std::string("bad region record: ") + e.what());
    }
    if (region.area_px <= 0) {
      return make_error(Errc::kParseError, "region " + region.id + ": area_px must be positive");
    }
    regions.push_back(std::move(region));
  }
  return regions;
}

Expected<nlohmann::json> parse_document(const std::string& text, const std::string& origin) {
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    return make_error(Errc::kParseError, origin + ": not valid JSON");
  }
  return doc;
}

}  // namespace

nlohmann::ordered_json inventory_to_json(const CityLayout& layout) {
  ordered_json out;
  out["scale"] = scale_to_json(layout.scale());
  out["regions"] = regions_to_json(layout);
  return out;
}

Expected<CityLayout> inventory_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("scale") || !doc.contains("regions")) {
    return make_error(Errc::kParseError, "inventory needs 'scale' and 'regions'");
  }
  auto scale = scale_from_json(doc.at("scale"));
  if (!scale.ok()) return scale.error();
  auto regions = regions_from_json(doc.at("regions"));
  if (!regions.ok()) return regions.error();
  return CityLayout::create(std::move(regions).value(), scale.value());
}

nlohmann::ordered_json layout_to_json(const CityLayout& layout) {
  ordered_json out = inventory_to_json(layout);
  ordered_json assignment;
  for (std::size_t i : layout.ascending_id_order()) {
    assignment[layout.region_at(i).id] = std::string(land_use_name(layout.role_at(i)));
  }
  out["assignment"] = std::move(assignment);
  return out;
}

Expected<CityLayout> layout_from_json(const nlohmann::json& doc) {
  auto base = inventory_from_json(doc);
  if (!base.ok()) return base.error();
  CityLayout layout = std::move(base).value();
  if (!doc.contains("assignment")) return layout;

  const auto& assignment = doc.at("assignment");
  if (!assignment.is_object()) {
    return make_error(Errc::kParseError, "assignment must be an object");
  }
  if (assignment.size() != layout.size()) {
    return make_error(Errc::kParseError, "assignment must cover every region exactly once");
  }
  for (const auto& [id, value] : assignment.items()) {
    const std::size_t i = layout.index_of(id);
    if (i == CityLayout::npos) {
      return make_error(Errc::kParseError, "assignment names unknown region '" + id + "'");
    }
    if (!value.is_string()) {
      return make_error(Errc::kParseError, "assignment for '" + id + "' must be a type name");
    }
    const auto role = parse_land_use(value.get<std::string>());
    if (!role.has_value()) {
      return make_error(Errc::kParseError,
                        "assignment for '" + id + "': unknown type '" +
                            value.get<std::string>() + "'");
    }
    layout.set_role(i, *role);
  }
  return layout;
}

Expected<CityLayout> load_inventory(const std::string& path) {
  auto text = read_text_file(path);
  if (!text.ok()) return text.error();
  auto doc = parse_document(text.value(), path);
  if (!doc.ok()) return doc.error();
  return inventory_from_json(doc.value());
}

Status save_inventory(const CityLayout& layout, const std::string& path) {
  return write_text_file(path, inventory_to_json(layout).dump(2) + "\n");
}

Expected<CityLayout> load_layout(const std::string& path) {
  auto text = read_text_file(path);
  if (!text.ok()) return text.error();
  auto doc = parse_document(text.value(), path);
  if (!doc.ok()) return doc.error();
  return layout_from_json(doc.value());
}

Status save_layout(const CityLayout& layout, const std::string& path) {
  return write_text_file(path, layout_to_json(layout).dump(2) + "\n");
}

std::string metrics_csv_header() { return "stage,service,ecology,satisfaction"; }

std::string metrics_csv_row(const MetricsReport& report) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s,%.3f,%.3f,%.3f", report.stage.c_str(),
                report.service, report.ecology, report.satisfaction);
  return buf;
}

nlohmann::ordered_json report_to_json(const MetricsReport& report) {
  ordered_json out;
  out["stage"] = report.stage;
  out["service"] = report.service;
  out["ecology"] = report.ecology;
  out["satisfaction"] = report.satisfaction;
  return out;
}

Expected<std::string> read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return make_error(Errc::kIoError, "cannot open " + path + " for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    return make_error(Errc::kIoError, "read failed for " + path);
  }
  return std::move(buf).str();
}

Status write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return make_error(Errc::kIoError, "cannot open " + path + " for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    return make_error(Errc::kIoError, "write failed for " + path);
  }
  return Status();
}

}  // namespace urbanforge
