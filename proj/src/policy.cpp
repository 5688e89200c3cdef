#include "gsched/policy.hpp"

#include <stdexcept>
#include <utility>

#include "gsched/errors.hpp"

namespace gsched {

Eigen::MatrixXd utility_features(std::span<const std::int64_t> q, std::span<const std::int64_t> r, UtilityKind kind,
                                 double scale) {
    const UtilityVector u = baseline_utility(q, r, kind);
    Eigen::MatrixXd s(static_cast<Eigen::Index>(u.size()), 1);
    for (std::size_t i = 0; i < u.size(); ++i) s(static_cast<Eigen::Index>(i), 0) = scale * u[i];
    return s;
}

Policy make_lgs_policy(UtilityKind kind) {
    return [kind](const ConflictGraph& g, std::span<const std::int64_t> q, std::span<const std::int64_t> r) {
        return lgs(g, baseline_utility(q, r, kind));
    };
}

Policy make_greedy_policy(UtilityKind kind) {
    return [kind](const ConflictGraph& g, std::span<const std::int64_t> q, std::span<const std::int64_t> r) {
        return greedy_centralized(g, baseline_utility(q, r, kind));
    };
}

Policy make_exact_policy(UtilityKind kind, int cap) {
    return [kind, cap](const ConflictGraph& g, std::span<const std::int64_t> q, std::span<const std::int64_t> r) {
        return exact_mwis(g, baseline_utility(q, r, kind), cap);
    };
}

Policy make_gcn_policy(std::shared_ptr<const GcnParams> params, std::shared_ptr<const LaplacianMatrix> laplacian,
                       UtilityKind kind, double feature_scale) {
    if (!params || !laplacian) throw std::invalid_argument("gcn policy needs parameters and a laplacian");
    return [params = std::move(params), laplacian = std::move(laplacian), kind, feature_scale](
               const ConflictGraph& g, std::span<const std::int64_t> q, std::span<const std::int64_t> r) {
        if (laplacian->rows() != g.node_count()) throw std::invalid_argument("gcn policy laplacian is for another graph");
        const Eigen::VectorXd u = infer(*params, *laplacian, utility_features(q, r, kind, feature_scale));
        if (!u.allFinite()) throw NumericError("GCN produced non-finite utilities");
        return lgs(g, std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
    };
}

} // namespace gsched
