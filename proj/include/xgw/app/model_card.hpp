#pragma once

#include <map>
#include <span>
#include <string>

#include "xgw/app/config.hpp"
#include "xgw/glm.hpp"
#include "xgw/prompt_assets.hpp"

namespace xgw::app {

// Markdown model card. Competitions appear in id order; output depends only
// on the arguments. `names` maps competition id to display name.
std::string generate_model_card(std::span<const FittedModel> models, const PromptAssets& assets,
                                const AppConfig& config,
                                const std::map<std::string, std::string>& names = {});

}  // namespace xgw::app
