// infoflow.cpp: Trace-distance rate, forward/backward information flows and the BLP measure

#include "qflow/infoflow.hpp"
#include "qflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qflow {

namespace {

struct DistanceRate {
    double distance;
    double rate;
};

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

struct Accumulated {
    std::vector<FlowSegment> segments;
    std::vector<FlowSample> samples;
    double N{0.0};
    double M{0.0};
};

// Splits [0, t_end] into maximal monotone segments of D by bracketing sign changes of
// sigma on the grid and bisecting them, then books each segment's increment as N or M.
template <class GridEval, class PointEval>
Accumulated accumulate(const GridEval& at_grid, const PointEval& at_time, double t_end, std::size_t intervals,
                       double root_rel_tol, bool keep_samples) {
    const std::size_t n = intervals;
    auto grid_t = [&](std::size_t k) { return t_end * static_cast<double>(k) / static_cast<double>(n); };

    std::vector<DistanceRate> grid(n + 1);
    for (std::size_t k = 0; k <= n; ++k) grid[k] = at_grid(k, grid_t(k));

    // Segment boundaries.
    std::vector<double> bounds{0.0};
    std::vector<double> bound_d{grid[0].distance};
    int last_sign = 0;
    std::size_t last_index = 0;
    const double tol = root_rel_tol * std::max(1.0, t_end);
    for (std::size_t k = 0; k <= n; ++k) {
        const int s = sign_of(grid[k].rate);
        if (s == 0) continue;
        if (last_sign != 0 && s != last_sign) {
            double lo = grid_t(last_index);
            double hi = grid_t(k);
            double root = 0.5 * (lo + hi);
            while (hi - lo > tol) {
                root = 0.5 * (lo + hi);
                const int sm = sign_of(at_time(root).rate);
                if (sm == last_sign) {
                    lo = root;
                } else if (sm == s) {
                    hi = root;
                } else {
                    break;
                }
                root = 0.5 * (lo + hi);
            }
            bounds.push_back(root);
            bound_d.push_back(at_time(root).distance);
        }
        last_sign = s;
        last_index = k;
    }
    bounds.push_back(t_end);
    bound_d.push_back(grid[n].distance);

    Accumulated acc;
    acc.segments.reserve(bounds.size() - 1);
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        const double inc = bound_d[j + 1] - bound_d[j];
        acc.segments.push_back({bounds[j], bounds[j + 1], bound_d[j], bound_d[j + 1], sign_of(inc)});
        if (inc > 0.0) acc.N += inc;
        if (inc < 0.0) acc.M -= inc;
    }

    if (keep_samples) {
        acc.samples.resize(n + 1);
        double n_before = 0.0;
        double m_before = 0.0;
        std::size_t seg = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            const double t = grid_t(k);
            while (seg + 1 < acc.segments.size() && t > acc.segments[seg].t_end) {
                const FlowSegment& done = acc.segments[seg];
                const double inc = done.d_end - done.d_begin;
                if (inc > 0.0) n_before += inc;
                if (inc < 0.0) m_before -= inc;
                ++seg;
            }
            const FlowSegment& cur = acc.segments[seg];
            const double partial = grid[k].distance - cur.d_begin;
            const bool up = cur.direction > 0 || (cur.direction == 0 && partial > 0.0);
            FlowSample& out = acc.samples[k];
            out.t = t;
            out.distance = grid[k].distance;
            out.sigma = grid[k].rate;
            out.backward = n_before + (up ? partial : 0.0);
            out.forward = m_before + (up ? 0.0 : -partial);
        }
    }
    return acc;
}

DistanceRate standard_distance_rate(const Model& m, const DensityMatrix& rho0, const DensityMatrix& standard, double t) {
    const DensityMatrix rho = evolve(m, rho0, t);
    const double d = trace_distance(rho, standard);
    if (d <= 1e-300) return {d, 0.0};
    const Mat2 dr = evolve_rate(m, rho0, t);
    const BlochVector diff = rho.bloch() - standard.bloch();
    const BlochVector rate{2.0 * dr(0, 1).real(), -2.0 * dr(0, 1).imag(), 2.0 * dr(0, 0).real()};
    return {d, dot(diff, rate) / (4.0 * d)};
}

struct PairKey {
    double dp2;  // (Delta rho00)^2
    double dq2;  // |Delta rho01|^2
};

DistanceRate pair_distance_rate(const PairKey& key, double P, double dP, double Q2, double QdQ) {
    const double d = std::sqrt(key.dp2 * P * P + key.dq2 * Q2);
    if (d <= 1e-300) return {d, 0.0};
    return {d, (key.dp2 * P * dP + key.dq2 * QdQ) / d};
}

}  // namespace

double FlowLedger::ledger_residual() const {
    double worst = 0.0;
    for (const FlowSample& s : samples) {
        worst = std::max(worst, std::abs(s.distance - initial_distance - s.backward + s.forward));
    }
    return worst;
}

double sigma(double t, const Model& m, const DensityMatrix& rho0, const DensityMatrix& standard) {
    return standard_distance_rate(m, rho0, standard, t).rate;
}

double sigma_numeric(double t, const Model& m, const DensityMatrix& rho0, const DensityMatrix& standard, double h) {
    if (h <= 0.0) h = 1e-6 * characteristic_time(m);
    auto dist = [&](double s) { return trace_distance(evolve(m, rho0, s), standard); };
    if (t - h < 0.0) {
        return (-3.0 * dist(t) + 4.0 * dist(t + h) - dist(t + 2.0 * h)) / (2.0 * h);
    }
    return (dist(t + h) - dist(t - h)) / (2.0 * h);
}

std::size_t default_flow_intervals(const Model& m, double t_end) {
    const double per_scale = 20.0 * t_end / characteristic_time(m);
    auto n = static_cast<std::size_t>(std::ceil(std::max(4000.0, per_scale)));
    return n + (n % 2);
}

FlowLedger flows(const DensityMatrix& rho0, const Model& m, double t_end, const DensityMatrix& standard,
                 const FlowOptions& opts) {
    validate(m);
    if (!(t_end > 0.0)) throw std::invalid_argument("flows: t_end must be positive");
    std::size_t n = opts.intervals > 0 ? opts.intervals : default_flow_intervals(m, t_end);
    n += n % 2;

    auto eval = [&](double t) { return standard_distance_rate(m, rho0, standard, t); };
    Accumulated acc = accumulate([&](std::size_t, double t) { return eval(t); }, eval, t_end, n, opts.root_rel_tol, true);

    FlowLedger ledger;
    ledger.standard_state = standard;
    ledger.initial_distance = acc.samples.front().distance;
    ledger.samples = std::move(acc.samples);
    ledger.segments = std::move(acc.segments);
    if (std::holds_alternative<MemoryKernelParams>(m)) {
        bool positive = true;
        for (const FlowSample& s : ledger.samples) {
            if (!evolve(m, rho0, s.t).is_positive()) {
                positive = false;
                break;
            }
        }
        ledger.positive = positive;
    }
    return ledger;
}

// ---------------------------------------------------------------------------

std::vector<PolarBloch> BlochGrid::points() const {
    std::vector<PolarBloch> pts;
    pts.reserve(n_theta * n_phi * radii.size());
    for (double r : radii) {
        for (std::size_t i = 0; i < n_theta; ++i) {
            const double theta = n_theta > 1 ? kPi * static_cast<double>(i) / static_cast<double>(n_theta - 1) : 0.0;
            for (std::size_t j = 0; j < n_phi; ++j) {
                pts.push_back({r, theta, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n_phi)});
            }
        }
    }
    return pts;
}

BlpResult blp_measure(const Model& m, const std::vector<std::pair<DensityMatrix, DensityMatrix>>& pairs, double t_end,
                      std::size_t threads, std::size_t intervals) {
    validate(m);
    if (pairs.empty()) throw std::invalid_argument("blp_measure: empty grid");
    if (!(t_end > 0.0)) throw std::invalid_argument("blp_measure: t_end must be positive");
    std::size_t n = intervals > 0 ? intervals : default_flow_intervals(m, t_end);
    n += n % 2;

    // D(rho1(t), rho2(t)) depends on a pair only through |Delta rho00| and |Delta rho01|.
    std::map<std::pair<long long, long long>, std::size_t> seen;
    std::vector<PairKey> keys;
    std::vector<std::size_t> key_pair;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double dp = (pairs[i].first(0, 0) - pairs[i].second(0, 0)).real();
        const double dq2 = std::norm(pairs[i].first(0, 1) - pairs[i].second(0, 1));
        const auto id = std::make_pair(std::llround(dp * dp * 1e12), std::llround(dq2 * 1e12));
        if (seen.emplace(id, keys.size()).second) {
            keys.push_back({dp * dp, dq2});
            key_pair.push_back(i);
        }
    }

    struct Row {
        double P, dP, Q2, QdQ;
    };
    std::vector<Row> table(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const ChannelFactors f = channel_factors(m, t_end * static_cast<double>(k) / static_cast<double>(n));
        table[k] = {f.P, f.dP, std::norm(f.Q), (std::conj(f.Q) * f.dQ).real()};
    }

    std::vector<double> values(keys.size(), 0.0);
    parallel_for(keys.size(), threads, [&](std::size_t i) {
        const PairKey key = keys[i];
        auto grid_eval = [&](std::size_t k, double) {
            const Row& r = table[k];
            return pair_distance_rate(key, r.P, r.dP, r.Q2, r.QdQ);
        };
        auto point_eval = [&](double t) {
            const ChannelFactors f = channel_factors(m, t);
            return pair_distance_rate(key, f.P, f.dP, std::norm(f.Q), (std::conj(f.Q) * f.dQ).real());
        };
        values[i] = accumulate(grid_eval, point_eval, t_end, n, 1e-10, false).N;
    });

    BlpResult res;
    res.pairs = pairs.size();
    res.distinct_pairs = keys.size();
    res.intervals = n;
    std::size_t best = 0;
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (values[i] > values[best] || (values[i] == values[best] && key_pair[i] < key_pair[best])) best = i;
    }
    res.value = values[best];
    res.best_pair = key_pair[best];
    res.best_first = pairs[res.best_pair].first;
    res.best_second = pairs[res.best_pair].second;
    return res;
}

BlpResult blp_measure(const Model& m, const BlochGrid& grid, double t_end, std::size_t threads, std::size_t intervals) {
    std::vector<DensityMatrix> states;
    for (const PolarBloch& p : grid.points()) states.push_back(density_from_bloch(to_cartesian(p)));
    std::vector<std::pair<DensityMatrix, DensityMatrix>> pairs;
    pairs.reserve(states.size() * (states.size() - 1) / 2);
    for (std::size_t i = 0; i < states.size(); ++i) {
        for (std::size_t j = i + 1; j < states.size(); ++j) pairs.emplace_back(states[i], states[j]);
    }
    return blp_measure(m, pairs, t_end, threads, intervals);
}

// ---------------------------------------------------------------------------

WeakCouplingFlows weak_coupling_flows(const InitialStateSpec& spec, const TimeLocalParams& p, double t) {
    p.validate();
    const PolarBloch b = spec.bloch();
    const double c = std::cos(b.theta);
    const double s = std::sin(b.theta);
    const double r0 = b.r;

    WeakCouplingFlows w;
    w.reliable = p.R() <= 0.2;
    w.kappa = -std::expm1(-p.lambda * t) / (p.lambda * p.lambda) - t / p.lambda;
    const double a = r0 * r0 * s * s;
    const double bb = (1.0 + r0 * c) * (1.0 + r0 * c);
    w.d0 = 0.5 * std::sqrt(a + bb);
    if (w.d0 == 0.0) return w;

    const double w2 = p.W * p.W;
    w.n_minus_m = w2 * w.kappa * (a + 2.0 * bb) / (4.0 * w.d0);
    w.m = -w.n_minus_m;
    w.n_minus_m_printed = w2 / (4.0 * w.d0) * (r0 * r0 * (1.0 + c * c) + 2.0 * r0 * c) * w.kappa;
    w.m_printed = -w.n_minus_m_printed;
    return w;
}

}  // namespace qflow
