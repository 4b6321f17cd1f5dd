#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json_fwd.hpp>

#include "xgw/glm.hpp"

namespace xgw {

// Text model file, one "key<TAB>value..." record per line:
//
//   xgw-model       1
//   competition_id  <id>
//   n_shots / n_goals / converged / iterations
//   log_likelihood / gradient_max_norm
//   intercept       <coef> <se> <p>
//   feature         <name> <coef> <mean> <se> <p>     (schema order)
//   warning         <text>                            (zero or more)
//   end
//
// Reals use the shortest round-trip decimal form, so load(save(m)) == m and
// save(load(file)) reproduces the file byte for byte.
inline constexpr int kModelFormatVersion = 1;

void write_model(std::ostream& out, const FittedModel& model);
FittedModel read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const FittedModel& model);
FittedModel load_model(const std::filesystem::path& path);

nlohmann::json model_to_json(const FittedModel& model);

}  // namespace xgw
