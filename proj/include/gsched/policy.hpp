#pragma once

#include <memory>
#include <string>

#include "gsched/gcn.hpp"
#include "gsched/sim.hpp"
#include "gsched/solvers.hpp"

namespace gsched {

/// Node features S(t) = [scale * baseline utility], one column.
Eigen::MatrixXd utility_features(std::span<const std::int64_t> q, std::span<const std::int64_t> r, UtilityKind kind,
                                 double scale = 1.0);

Policy make_lgs_policy(UtilityKind kind = UtilityKind::product);
Policy make_greedy_policy(UtilityKind kind = UtilityKind::product);
Policy make_exact_policy(UtilityKind kind = UtilityKind::product, int cap = kExactDefaultCap);

/// LGS on GCN utilities. The Laplacian must belong to the graph the policy is called with.
Policy make_gcn_policy(std::shared_ptr<const GcnParams> params, std::shared_ptr<const LaplacianMatrix> laplacian,
                       UtilityKind kind = UtilityKind::product, double feature_scale = 1.0);

} // namespace gsched
