#include "metaweave/meta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "metaweave/stats.hpp"

namespace metaweave::meta {

namespace {

constexpr double kGoldenRatioConj = 0.6180339887498949; // (sqrt(5)-1)/2

double z975() { return stats::normal_quantile(0.975); }

void require_positive_variances(std::span<const Effect> effects) {
    for (const auto& e : effects)
        if (!(e.vi > 0.0))
            throw NumericError("non-positive sampling variance for effect '" + e.key + "'");
}

// Cochran Q from common-effect weights; the heterogeneity statistic
// reported by every pooling method.
double cochran_q(std::span<const Effect> effects) {
    double sw = 0.0, swy = 0.0;
    for (const auto& e : effects) {
        double w = 1.0 / e.vi;
        sw += w;
        swy += w * e.yi;
    }
    double mu = swy / sw;
    double q = 0.0;
    for (const auto& e : effects) q += (e.yi - mu) * (e.yi - mu) / e.vi;
    return q;
}

double i2_from_q(double q, int k) {
    if (q <= 0.0 || k < 2) return 0.0;
    return std::max(0.0, (q - (k - 1)) / q) * 100.0;
}

PooledResult pool_with_weights(std::span<const Effect> effects,
                               const std::vector<double>& w, PoolMethod method,
                               double tau2) {
    PooledResult r;
    r.k = static_cast<int>(effects.size());
    r.method = method;
    r.tau2 = tau2;

    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        sw += w[i];
        swy += w[i] * effects[i].yi;
    }
    r.estimate = swy / sw;
    r.se = std::sqrt(1.0 / sw);
    double z = z975();
    r.ci_low = r.estimate - z * r.se;
    r.ci_high = r.estimate + z * r.se;
    r.q = cochran_q(effects);
    r.i2 = i2_from_q(r.q, r.k);

    if (method != PoolMethod::CommonEffect && r.k >= 3) {
        double t = stats::t_quantile(0.975, r.k - 2);
        double half = t * std::sqrt(tau2 + r.se * r.se);
        r.pi_low = r.estimate - half;
        r.pi_high = r.estimate + half;
    }
    return r;
}

// Profiled restricted log-likelihood of a single-level random-effects
// model, up to an additive constant.
double reml_loglik(std::span<const Effect> effects, double tau2) {
    double sum_log = 0.0, sw = 0.0, swy = 0.0;
    for (const auto& e : effects) {
        double d = e.vi + tau2;
        sum_log += std::log(d);
        sw += 1.0 / d;
        swy += e.yi / d;
    }
    double mu = swy / sw;
    double quad = 0.0;
    for (const auto& e : effects) {
        double d = e.vi + tau2;
        quad += (e.yi - mu) * (e.yi - mu) / d;
    }
    return -0.5 * (sum_log + std::log(sw) + quad);
}

double sample_variance(std::span<const Effect> effects) {
    double mean = 0.0;
    for (const auto& e : effects) mean += e.yi;
    mean /= static_cast<double>(effects.size());
    double ss = 0.0;
    for (const auto& e : effects) ss += (e.yi - mean) * (e.yi - mean);
    return ss / static_cast<double>(effects.size() - 1);
}

std::vector<double> weights_for(std::span<const Effect> effects, const PooledResult& pooled) {
    std::vector<double> w(effects.size());
    double tau2 = pooled.method == PoolMethod::CommonEffect ? 0.0 : pooled.tau2;
    for (std::size_t i = 0; i < effects.size(); ++i) w[i] = 1.0 / (effects[i].vi + tau2);
    return w;
}

PooledResult pool_any(std::span<const Effect> effects, Tau2Method method) {
    return effects.size() == 1 ? pool_common(effects) : pool_random(effects, method);
}

} // namespace

TooFewEffects::TooFewEffects(int k_)
    : NumericError("too few effects (k = " + std::to_string(k_) + ")"), k(k_) {}

RhoOutOfRange::RhoOutOfRange(double rho)
    : NumericError("rho = " + std::to_string(rho) + " outside [0, 1]") {}

NoConvergence::NoConvergence(int max_iter)
    : NumericError("optimizer failed to converge within " + std::to_string(max_iter) +
                   " iterations") {}

MissingYear::MissingYear(const std::string& effect_key)
    : InputError("effect '" + effect_key + "' has no year") {}

const char* pool_method_label(PoolMethod m) {
    switch (m) {
        case PoolMethod::CommonEffect: return "CE";
        case PoolMethod::RandomDL: return "RE-DL";
        case PoolMethod::RandomREML: return "RE-REML";
    }
    return "CE";
}

PooledResult pool_common(std::span<const Effect> effects) {
    if (effects.empty()) throw EmptyInput();
    require_positive_variances(effects);
    std::vector<double> w(effects.size());
    for (std::size_t i = 0; i < effects.size(); ++i) w[i] = 1.0 / effects[i].vi;
    return pool_with_weights(effects, w, PoolMethod::CommonEffect, 0.0);
}

double tau2_dl(std::span<const Effect> effects) {
    int k = static_cast<int>(effects.size());
    if (k < 2) throw TooFewEffects(k);
    require_positive_variances(effects);
    double sw = 0.0, sw2 = 0.0;
    for (const auto& e : effects) {
        double w = 1.0 / e.vi;
        sw += w;
        sw2 += w * w;
    }
    double q = cochran_q(effects);
    double c = sw - sw2 / sw;
    return std::max(0.0, (q - (k - 1)) / c);
}

double tau2_reml(std::span<const Effect> effects, double tol, int max_iter) {
    int k = static_cast<int>(effects.size());
    if (k < 2) throw TooFewEffects(k);
    require_positive_variances(effects);

    double hi = std::max(10.0 * sample_variance(effects), 1e-3);
    double a = 0.0, b = hi;
    double c = b - kGoldenRatioConj * (b - a);
    double d = a + kGoldenRatioConj * (b - a);
    double fc = reml_loglik(effects, c);
    double fd = reml_loglik(effects, d);
    int it = 0;
    while (b - a > tol) {
        if (++it > max_iter) throw NoConvergence(max_iter);
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGoldenRatioConj * (b - a);
            fc = reml_loglik(effects, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGoldenRatioConj * (b - a);
            fd = reml_loglik(effects, d);
        }
    }
    double best = 0.5 * (a + b);
    if (reml_loglik(effects, 0.0) >= reml_loglik(effects, best)) return 0.0;
    return best;
}

PooledResult pool_random(std::span<const Effect> effects, Tau2Method method) {
    int k = static_cast<int>(effects.size());
    if (k < 2) throw TooFewEffects(k);
    double tau2 = method == Tau2Method::DL ? tau2_dl(effects) : tau2_reml(effects);
    std::vector<double> w(effects.size());
    for (std::size_t i = 0; i < effects.size(); ++i) w[i] = 1.0 / (effects[i].vi + tau2);
    return pool_with_weights(effects, w,
                             method == Tau2Method::DL ? PoolMethod::RandomDL
                                                      : PoolMethod::RandomREML,
                             tau2);
}

PooledResult robust_variance(std::span<const Effect> effects,
                             std::span<const std::string> cluster_of,
                             const PooledResult& pooled) {
    std::map<std::string, double> cluster_sums;
    for (std::size_t i = 0; i < effects.size(); ++i) cluster_sums[std::string(cluster_of[i])];
    int m = static_cast<int>(cluster_sums.size());
    if (m < 2) throw SingleCluster();

    std::vector<double> w = weights_for(effects, pooled);
    double sw = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        cluster_sums[cluster_of[i]] += w[i] * (effects[i].yi - pooled.estimate);
        sw += w[i];
    }
    double sum_sq = 0.0;
    for (const auto& [_, s] : cluster_sums) sum_sq += s * s;
    double var = (static_cast<double>(m) / (m - 1)) * sum_sq / (sw * sw);

    PooledResult r = pooled;
    r.robust = true;
    r.m = m;
    r.se = std::sqrt(var);
    double t = stats::t_quantile(0.975, m - 1);
    r.ci_low = r.estimate - t * r.se;
    r.ci_high = r.estimate + t * r.se;
    if (r.method != PoolMethod::CommonEffect && r.k >= 3) {
        double tp = stats::t_quantile(0.975, r.k - 2);
        double half = tp * std::sqrt(r.tau2 + r.se * r.se);
        r.pi_low = r.estimate - half;
        r.pi_high = r.estimate + half;
    }
    return r;
}

AggregatedEffect aggregate_correlated(std::span<const Effect> effects, double rho,
                                      const std::string& key) {
    if (effects.empty()) throw EmptyInput();
    if (!(rho >= 0.0 && rho <= 1.0)) throw RhoOutOfRange(rho);
    require_positive_variances(effects);

    double n = static_cast<double>(effects.size());
    double sum_y = 0.0, sum_v = 0.0, sum_sqrt = 0.0;
    for (const auto& e : effects) {
        sum_y += e.yi;
        sum_v += e.vi;
        sum_sqrt += std::sqrt(e.vi);
    }
    // sum over i != j of sqrt(vi*vj) equals (sum sqrt(vi))^2 - sum vi
    double cross = sum_sqrt * sum_sqrt - sum_v;
    AggregatedEffect out;
    out.key = key;
    out.yi = sum_y / n;
    out.vi = (sum_v + rho * cross) / (n * n);
    out.n_inputs = static_cast<int>(effects.size());
    return out;
}

std::map<std::string, PooledResult> subgroup_pool(std::span<const Effect> effects,
                                                  std::span<const std::string> group_of,
                                                  Tau2Method method) {
    std::map<std::string, std::vector<Effect>> groups;
    for (std::size_t i = 0; i < effects.size(); ++i)
        groups[std::string(group_of[i])].push_back(effects[i]);
    std::map<std::string, PooledResult> out;
    for (const auto& [name, members] : groups) out[name] = pool_any(members, method);
    return out;
}

std::vector<std::pair<int, PooledResult>>
cumulative_pool(std::span<const Effect> effects, std::span<const std::optional<int>> years,
                Tau2Method method) {
    for (std::size_t i = 0; i < effects.size(); ++i)
        if (!years[i].has_value()) throw MissingYear(effects[i].key);

    std::vector<std::size_t> order(effects.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return *years[a] < *years[b]; });

    std::vector<std::pair<int, PooledResult>> out;
    std::vector<Effect> acc;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        acc.push_back(effects[order[pos]]);
        int year = *years[order[pos]];
        bool last_of_year = pos + 1 == order.size() || *years[order[pos + 1]] != year;
        if (last_of_year) out.emplace_back(year, pool_any(acc, method));
    }
    return out;
}

std::vector<LocoEntry> leave_one_cluster_out(std::span<const Effect> effects,
                                             std::span<const std::string> cluster_of,
                                             Tau2Method method) {
    std::set<std::string> clusters(cluster_of.begin(), cluster_of.end());
    if (clusters.size() < 2) throw SingleCluster();

    PooledResult full = pool_any(effects, method);
    std::vector<LocoEntry> out;
    for (const auto& cluster : clusters) {
        std::vector<Effect> rest;
        for (std::size_t i = 0; i < effects.size(); ++i)
            if (cluster_of[i] != cluster) rest.push_back(effects[i]);
        LocoEntry entry;
        entry.cluster = cluster;
        entry.without = pool_any(rest, method);
        entry.delta = full.estimate - entry.without.estimate;
        out.push_back(std::move(entry));
    }
    std::sort(out.begin(), out.end(), [](const LocoEntry& a, const LocoEntry& b) {
        double da = std::fabs(a.delta), db = std::fabs(b.delta);
        if (da != db) return da > db;
        return a.cluster < b.cluster;
    });
    return out;
}

namespace {

struct ClusterData {
    std::vector<double> y;
    std::vector<double> v;
};

// Restricted log-likelihood of the two-level model, evaluated per cluster
// through the Sherman-Morrison identity for V_j = diag(v_i + s_e) + s_c 11'.
double multilevel_loglik(const std::vector<ClusterData>& clusters, double s_c, double s_e) {
    double sum_logdet = 0.0, total_a = 0.0, total_b = 0.0, total_quad = 0.0;
    for (const auto& cl : clusters) {
        double sj = 0.0, tj = 0.0, qj = 0.0, logd = 0.0;
        for (std::size_t i = 0; i < cl.y.size(); ++i) {
            double d = cl.v[i] + s_e;
            logd += std::log(d);
            sj += 1.0 / d;
            tj += cl.y[i] / d;
            qj += cl.y[i] * cl.y[i] / d;
        }
        double denom = 1.0 + s_c * sj;
        sum_logdet += logd + std::log(denom);
        total_a += sj / denom;
        total_b += tj / denom;
        total_quad += qj - s_c * tj * tj / denom;
    }
    double quad = total_quad - total_b * total_b / total_a;
    return -0.5 * (sum_logdet + std::log(total_a) + quad);
}

} // namespace

MultilevelResult multilevel_reml(std::span<const Effect> effects,
                                 std::span<const std::string> cluster_of,
                                 double tol, int max_iter) {
    int k = static_cast<int>(effects.size());
    std::map<std::string, ClusterData> by_cluster;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        auto& cl = by_cluster[std::string(cluster_of[i])];
        cl.y.push_back(effects[i].yi);
        cl.v.push_back(effects[i].vi);
    }
    int m = static_cast<int>(by_cluster.size());
    if (m < 2) throw TooFewClusters();
    if (k < 3) throw TooFewEffects(k);

    // Every cluster a singleton: the cluster and effect components enter
    // the marginal variance only through their sum, so the split is fixed
    // by convention at (0, single-level REML).
    if (m == k) {
        MultilevelResult r;
        r.sigma2_cluster = 0.0;
        r.sigma2_effect = tau2_reml(effects);
        r.pooled = pool_random(effects, Tau2Method::REML);
        r.pooled.m = m;
        return r;
    }

    std::vector<ClusterData> clusters;
    clusters.reserve(by_cluster.size());
    for (auto& [_, cl] : by_cluster) clusters.push_back(std::move(cl));

    // Nelder-Mead over unconstrained (a, b) with sigma2 = a^2, b^2.
    auto objective = [&](double a, double b) {
        return -multilevel_loglik(clusters, a * a, b * b);
    };
    double start = std::sqrt(0.5 * tau2_dl(effects));
    double step = std::max(0.1 * start, 0.05);
    struct Vertex {
        double a, b, f;
    };
    std::vector<Vertex> simplex = {
        {start, start, objective(start, start)},
        {start + step, start, objective(start + step, start)},
        {start, start + step, objective(start, start + step)},
    };
    auto by_f = [](const Vertex& x, const Vertex& y) { return x.f < y.f; };

    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        std::sort(simplex.begin(), simplex.end(), by_f);
        double fspread = simplex[2].f - simplex[0].f;
        double diam = std::max(std::hypot(simplex[1].a - simplex[0].a, simplex[1].b - simplex[0].b),
                               std::hypot(simplex[2].a - simplex[0].a, simplex[2].b - simplex[0].b));
        if (fspread <= tol * (1.0 + std::fabs(simplex[0].f)) || diam <= 1e-10) {
            converged = true;
            break;
        }
        double ca = 0.5 * (simplex[0].a + simplex[1].a);
        double cb = 0.5 * (simplex[0].b + simplex[1].b);
        double ra = ca + (ca - simplex[2].a);
        double rb = cb + (cb - simplex[2].b);
        double fr = objective(ra, rb);
        if (fr < simplex[0].f) {
            double ea = ca + 2.0 * (ca - simplex[2].a);
            double eb = cb + 2.0 * (cb - simplex[2].b);
            double fe = objective(ea, eb);
            simplex[2] = fe < fr ? Vertex{ea, eb, fe} : Vertex{ra, rb, fr};
        } else if (fr < simplex[1].f) {
            simplex[2] = {ra, rb, fr};
        } else {
            double xa = ca + 0.5 * ((fr < simplex[2].f ? ra : simplex[2].a) - ca);
            double xb = cb + 0.5 * ((fr < simplex[2].f ? rb : simplex[2].b) - cb);
            double fx = objective(xa, xb);
            if (fx < std::min(fr, simplex[2].f)) {
                simplex[2] = {xa, xb, fx};
            } else {
                // shrink toward the best vertex
                for (int i = 1; i < 3; ++i) {
                    simplex[i].a = simplex[0].a + 0.5 * (simplex[i].a - simplex[0].a);
                    simplex[i].b = simplex[0].b + 0.5 * (simplex[i].b - simplex[0].b);
                    simplex[i].f = objective(simplex[i].a, simplex[i].b);
                }
            }
        }
    }
    if (!converged) throw NoConvergence(max_iter);
    std::sort(simplex.begin(), simplex.end(), by_f);
    double s_c = simplex[0].a * simplex[0].a;
    double s_e = simplex[0].b * simplex[0].b;

    // GLS mean and variance under the fitted covariance
    double total_a = 0.0, total_b = 0.0;
    for (const auto& cl : clusters) {
        double sj = 0.0, tj = 0.0;
        for (std::size_t i = 0; i < cl.y.size(); ++i) {
            double d = cl.v[i] + s_e;
            sj += 1.0 / d;
            tj += cl.y[i] / d;
        }
        double denom = 1.0 + s_c * sj;
        total_a += sj / denom;
        total_b += tj / denom;
    }

    MultilevelResult r;
    r.sigma2_cluster = s_c;
    r.sigma2_effect = s_e;
    r.pooled.k = k;
    r.pooled.m = m;
    r.pooled.method = PoolMethod::RandomREML;
    r.pooled.tau2 = s_c + s_e; // total heterogeneity across both levels
    r.pooled.estimate = total_b / total_a;
    r.pooled.se = std::sqrt(1.0 / total_a);
    double z = z975();
    r.pooled.ci_low = r.pooled.estimate - z * r.pooled.se;
    r.pooled.ci_high = r.pooled.estimate + z * r.pooled.se;
    r.pooled.q = cochran_q(effects);
    r.pooled.i2 = i2_from_q(r.pooled.q, k);
    if (k >= 3) {
        double t = stats::t_quantile(0.975, k - 2);
        double half = t * std::sqrt(r.pooled.tau2 + r.pooled.se * r.pooled.se);
        r.pooled.pi_low = r.pooled.estimate - half;
        r.pooled.pi_high = r.pooled.estimate + half;
    }
    return r;
}

} // namespace metaweave::meta
