#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metaweave/errors.hpp"

namespace metaweave::meta {

// One effect-size observation as consumed by the estimators. Callers that
// hold richer records adapt down to this.
struct Effect {
    std::string key;
    double yi = 0.0;
    double vi = 0.0;
};

enum class PoolMethod { CommonEffect, RandomDL, RandomREML };
enum class Tau2Method { DL, REML };

const char* pool_method_label(PoolMethod m); // "CE", "RE-DL", "RE-REML"

struct PooledResult {
    double estimate = 0.0;
    double se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double tau2 = 0.0;
    double q = 0.0;
    double i2 = 0.0; // percent in [0, 100]
    std::optional<double> pi_low;
    std::optional<double> pi_high;
    int k = 0;
    std::optional<int> m;
    PoolMethod method = PoolMethod::CommonEffect;
    bool robust = false;
};

struct AggregatedEffect {
    std::string key;
    double yi = 0.0;
    double vi = 0.0;
    int n_inputs = 0;
};

struct LocoEntry {
    std::string cluster;
    PooledResult without;
    double delta = 0.0; // full estimate minus estimate without this cluster
};

struct MultilevelResult {
    double sigma2_cluster = 0.0;
    double sigma2_effect = 0.0;
    PooledResult pooled;
};

struct EmptyInput : NumericError {
    EmptyInput() : NumericError("no effects supplied") {}
};
struct TooFewEffects : NumericError {
    explicit TooFewEffects(int k);
    int k;
};
struct SingleCluster : NumericError {
    SingleCluster() : NumericError("at least two clusters required") {}
};
struct TooFewClusters : NumericError {
    TooFewClusters() : NumericError("at least two clusters required") {}
};
struct RhoOutOfRange : NumericError {
    explicit RhoOutOfRange(double rho);
};
struct NoConvergence : NumericError {
    explicit NoConvergence(int max_iter);
};
struct MissingYear : InputError {
    explicit MissingYear(const std::string& effect_key);
};

/// Inverse-variance common-effect pooling.
PooledResult pool_common(std::span<const Effect> effects);

/// DerSimonian-Laird heterogeneity variance.
double tau2_dl(std::span<const Effect> effects);

/// Restricted-maximum-likelihood heterogeneity variance. Golden-section
/// search of the profiled restricted log-likelihood on
/// [0, max(10 * var(y), 1e-3)].
double tau2_reml(std::span<const Effect> effects, double tol = 1e-10, int max_iter = 200);

/// Random-effects pooling with the chosen tau^2 estimator. Prediction
/// interval uses t(k-2) and is reported only when k >= 3.
PooledResult pool_random(std::span<const Effect> effects, Tau2Method method);

/// CR1 cluster-robust sandwich variance around an existing pooled result.
/// The point estimate is kept; se, CI (t with m-1 df) and the prediction
/// interval are recomputed.
PooledResult robust_variance(std::span<const Effect> effects,
                             std::span<const std::string> cluster_of,
                             const PooledResult& pooled);

/// Mean of correlated effects under a constant pairwise correlation rho:
/// vbar = (sum vi + rho * sum_{i!=j} sqrt(vi*vj)) / n^2.
AggregatedEffect aggregate_correlated(std::span<const Effect> effects, double rho,
                                      const std::string& key = {});

/// Per-group pooling; groups of size one fall back to common-effect.
std::map<std::string, PooledResult> subgroup_pool(std::span<const Effect> effects,
                                                  std::span<const std::string> group_of,
                                                  Tau2Method method = Tau2Method::REML);

/// One pooled result per distinct year, over all effects published up to
/// and including that year.
std::vector<std::pair<int, PooledResult>>
cumulative_pool(std::span<const Effect> effects, std::span<const std::optional<int>> years,
                Tau2Method method = Tau2Method::REML);

/// Pool with each cluster removed in turn; sorted by |delta| descending,
/// ties broken by cluster label.
std::vector<LocoEntry> leave_one_cluster_out(std::span<const Effect> effects,
                                             std::span<const std::string> cluster_of,
                                             Tau2Method method = Tau2Method::REML);

/// Two-level REML: y_i = mu + u_cluster + u_effect + e_i with known v_i.
/// Components are parameterized as squares and fitted by Nelder-Mead with
/// a fixed start; when every cluster holds a single effect the split is
/// unidentified and (0, single-level REML tau^2) is returned.
MultilevelResult multilevel_reml(std::span<const Effect> effects,
                                 std::span<const std::string> cluster_of,
                                 double tol = 1e-9, int max_iter = 500);

} // namespace metaweave::meta
