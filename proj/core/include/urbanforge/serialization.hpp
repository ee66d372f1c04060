#pragma once

#include <json.hpp>
#include <string>

#include "urbanforge/metrics.hpp"
#include "urbanforge/region.hpp"

namespace urbanforge {

// Region-inventory document: scale plus one record per region with the
// ingested land use. Field order is fixed so identical inputs serialize to
// identical bytes.
nlohmann::ordered_json inventory_to_json(const CityLayout& layout);
Expected<CityLayout> inventory_from_json(const nlohmann::json& doc);

// Layout document: the inventory plus the current role overlay keyed by
// region id.
nlohmann::ordered_json layout_to_json(const CityLayout& layout);
Expected<CityLayout> layout_from_json(const nlohmann::json& doc);

Expected<CityLayout> load_inventory(const std::string& path);
Status save_inventory(const CityLayout& layout, const std::string& path);
Expected<CityLayout> load_layout(const std::string& path);
Status save_layout(const CityLayout& layout, const std::string& path);

// Metrics rows: CSV fixed at three decimals, JSON at full precision.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report);
nlohmann::ordered_json report_to_json(const MetricsReport& report);

Expected<std::string> read_text_file(const std::string& path);
Status write_text_file(const std::string& path, const std::string& content);

}  // namespace urbanforge
