#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gsched/train.hpp"

namespace gsched {

/// Training configuration in `key = value` text form; `#` starts a comment.
/// Unknown keys and malformed values raise ConfigError naming the line.
///
///   episodes, horizon, lookahead, batch_size, replay_capacity, seed,
///   checkpoint_every          integers
///   phi                       heaviside | linear
///   graph_mix                 Name:weight[, Name:weight ...]
///   loads                     comma-separated traffic loads in (0, 1)
///   rate_mean, rate_stddev    clipped-normal link rate model
///   layer_dims                comma-separated, last entry 1
///   init                      glorot | identity
///   leaky_slope, lr, lr_decay, beta1, beta2, epsilon, feature_scale
///   utility                   product | min
///   recompute_unscheduled     true | false
///   checkpoint_dir            path
TrainConfig parse_train_config(std::istream& is, const std::string& source = "<config>");
TrainConfig load_train_config(const std::string& path);
void write_train_config(std::ostream& os, const TrainConfig& config);

std::vector<std::string> split_list(const std::string& text, char sep = ',');
std::vector<double> parse_double_list(const std::string& text);
UtilityKind parse_utility_kind(const std::string& text);
const char* to_string(UtilityKind kind);
const char* to_string(RewardActivation phi);

} // namespace gsched
