#pragma once

#include <string>

#include "json.hpp"

#include "contrast/boosting.hpp"
#include "contrast/simgen.hpp"
#include "contrast/tree.hpp"

namespace contrast {

inline constexpr const char* kTreeFormat = "contrast-tree/1";
inline constexpr const char* kBoostFormat = "contrast-boost/1";

nlohmann::json schema_to_json(const FrameSchema& schema);
FrameSchema schema_from_json(const nlohmann::json& j);

nlohmann::json grow_config_to_json(const GrowConfig& config);
GrowConfig grow_config_from_json(const nlohmann::json& j);

// Node array only (no version/schema); used inside boost models.
nlohmann::json nodes_to_json(const ContrastTree& tree);

nlohmann::json tree_to_json(const ContrastTree& tree, const GrowConfig* config = nullptr);
ContrastTree tree_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const BoostModel& model);
BoostModel model_from_json(const nlohmann::json& j);

nlohmann::json sim_model_to_json(const sim::SimModel& model);
sim::SimModel sim_model_from_json(const nlohmann::json& j);
nlohmann::json hetero_model_to_json(const sim::HeteroModel& model);
sim::HeteroModel hetero_model_from_json(const nlohmann::json& j);

// Pretty-printed document followed by a newline.
std::string dump(const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

}  // namespace contrast
