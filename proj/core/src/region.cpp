#include "urbanforge/region.hpp"

#include <algorithm>

namespace urbanforge {

Status validate_scale(const ScaleConfig& scale) {
  if (scale.meters_per_pixel <= 0.0 || scale.service_radius_m <= 0.0 ||
      scale.ecology_radius_m <= 0.0 || scale.satisfaction_radius_m <= 0.0) {
    return Status(Errc::kInvalidConfig, "scale fields must be strictly positive");
  }
  return Status();
}

Expected<CityLayout> CityLayout::create(std::vector<Region> regions, ScaleConfig scale) {
  if (Status s = validate_scale(scale); !s.ok()) return s.error();

  CityLayout layout;
  layout.scale_ = scale;
  layout.regions_ = std::move(regions);
  layout.assignment_.reserve(layout.regions_.size());
  layout.index_by_id_.reserve(layout.regions_.size());
  for (std::size_t i = 0; i < layout.regions_.size(); ++i) {
    const Region& region = layout.regions_[i];
    auto [it, inserted] = layout.index_by_id_.emplace(region.id, i);
    if (!inserted) {
      return make_error(Errc::kInvalidConfig, "duplicate region id: " + region.id);
    }
    layout.assignment_.push_back(region.land_use);
  }
  layout.by_id_.resize(layout.regions_.size());
  for (std::size_t i = 0; i < layout.by_id_.size(); ++i) layout.by_id_[i] = i;
  std::sort(layout.by_id_.begin(), layout.by_id_.end(), [&](std::size_t a, std::size_t b) {
    return layout.regions_[a].id < layout.regions_[b].id;
  });
  return layout;
}

std::size_t CityLayout::index_of(std::string_view id) const {
  auto it = index_by_id_.find(std::string(id));
  return it == index_by_id_.end() ? npos : it->second;
}

std::vector<std::size_t> CityLayout::indices_with_role(LandUseType role) const {
  std::vector<std::size_t> out;
  for (std::size_t index : by_id_) {
    if (assignment_[index] == role) out.push_back(index);
  }
  return out;
}

}  // namespace urbanforge
