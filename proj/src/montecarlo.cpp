#include "uvsb/montecarlo.hpp"

#include "uvsb/fit.hpp"
#include "uvsb/parallel.hpp"
#include "uvsb/rng.hpp"

#include <algorithm>
#include <cmath>

namespace uvsb {

namespace {

void check_counts(int n_steps, int n_paths)
{
    if (n_steps < 1) throw ConfigError("Monte Carlo: n_steps must be >= 1");
    if (n_paths < 1) throw ConfigError("Monte Carlo: n_paths must be >= 1");
}

std::vector<double> time_axis(double T, int n_steps)
{
    std::vector<double> t(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) t[k] = T * k / n_steps;
    return t;
}

// State of one coupled path; step() advances it by one Euler step.
struct PathState {
    double z;       // untruncated CIR state
    double x_delta;
    double x_frozen;

    void step(const ModelParams& p, const ControlRule& rule, double dt, std::uint64_t seed, std::uint64_t path,
              std::uint32_t k)
    {
        const auto [gw, gz] = correlated_normals(seed, path, k, p.rho);
        const double sdt = std::sqrt(dt);
        const double zp = std::max(z, 0.0);
        const double q = control_value(rule, x_frozen);

        const double vol_d = q * std::sqrt(zp);
        const double vol_0 = q * std::sqrt(p.z0);
        x_delta *= std::exp(-0.5 * vol_d * vol_d * dt + vol_d * sdt * gw);
        x_frozen *= std::exp(-0.5 * vol_0 * vol_0 * dt + vol_0 * sdt * gw);
        z += p.delta * p.kappa * (p.theta - zp) * dt + std::sqrt(p.delta * zp) * sdt * gz;
    }
};

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x)
{
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return (1.0 - w) * ys[k - 1] + w * ys[k];
}

void check_model(const ModelParams& p)
{
    require_valid(p);
}

}  // namespace

CirPaths simulate_cir(const ModelParams& p, int n_steps, int n_paths, std::uint64_t seed)
{
    check_model(p);
    check_counts(n_steps, n_paths);
    const double dt = p.T / n_steps;
    const double sdt = std::sqrt(dt);
    CirPaths out{time_axis(p.T, n_steps), PathMatrix{n_paths, n_steps, {}}};
    out.z.values.resize(static_cast<std::size_t>(n_paths) * (n_steps + 1));

    parallel_for(n_paths, [&](int m) {
        double z = p.z0;
        out.z(m, 0) = z;
        for (int k = 0; k < n_steps; ++k) {
            const double gz = correlated_normals(seed, static_cast<std::uint64_t>(m), static_cast<std::uint32_t>(k),
                                                 p.rho)[1];
            const double zp = std::max(z, 0.0);
            z += p.delta * p.kappa * (p.theta - zp) * dt + std::sqrt(p.delta * zp) * sdt * gz;
            out.z(m, k + 1) = std::max(z, 0.0);
        }
    });
    return out;
}

void validate_control(const ControlRule& rule, const ModelParams& p)
{
    auto in_range = [&p](double q) { return std::isfinite(q) && q >= p.d && q <= p.u; };
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, ConstantControl>) {
                if (!in_range(r.q)) throw ConfigError("control q outside [d, u]");
            } else if constexpr (std::is_same_v<T, ThresholdControl>) {
                if (!in_range(r.below) || !in_range(r.above)) throw ConfigError("threshold control outside [d, u]");
                if (!std::isfinite(r.level)) throw ConfigError("threshold level must be finite");
            } else {
                if (r.x.empty() || r.x.size() != r.q.size()) throw ConfigError("field control: mismatched table");
                if (!std::is_sorted(r.x.begin(), r.x.end())
                    || std::adjacent_find(r.x.begin(), r.x.end()) != r.x.end()) {
                    throw ConfigError("field control: x must be strictly increasing");
                }
                if (!std::all_of(r.q.begin(), r.q.end(), in_range)) throw ConfigError("field control outside [d, u]");
            }
        },
        rule);
}

std::string control_name(const ControlRule& rule)
{
    switch (rule.index()) {
    case 0: return "constant";
    case 1: return "threshold";
    default: return "field";
    }
}

double control_value(const ControlRule& rule, double x)
{
    if (const auto* c = std::get_if<ConstantControl>(&rule)) return c->q;
    if (const auto* t = std::get_if<ThresholdControl>(&rule)) return x < t->level ? t->below : t->above;
    const auto& f = std::get<FieldControl>(rule);
    return interpolate(f.x, f.q, x);
}

PathBundle simulate_coupled_asset(const ModelParams& p, const ControlRule& rule, int n_steps, int n_paths,
                                  std::uint64_t seed)
{
    check_model(p);
    check_counts(n_steps, n_paths);
    validate_control(rule, p);
    const double dt = p.T / n_steps;
    const std::size_t cells = static_cast<std::size_t>(n_paths) * (n_steps + 1);

    PathBundle b;
    b.time = time_axis(p.T, n_steps);
    b.z = {n_paths, n_steps, std::vector<double>(cells)};
    b.x_delta = {n_paths, n_steps, std::vector<double>(cells)};
    b.x_frozen = {n_paths, n_steps, std::vector<double>(cells)};
    b.seed = seed;

    parallel_for(n_paths, [&](int m) {
        PathState s{p.z0, p.x0, p.x0};
        b.z(m, 0) = s.z;
        b.x_delta(m, 0) = s.x_delta;
        b.x_frozen(m, 0) = s.x_frozen;
        for (int k = 0; k < n_steps; ++k) {
            s.step(p, rule, dt, seed, static_cast<std::uint64_t>(m), static_cast<std::uint32_t>(k));
            b.z(m, k + 1) = std::max(s.z, 0.0);
            b.x_delta(m, k + 1) = s.x_delta;
            b.x_frozen(m, k + 1) = s.x_frozen;
        }
    });
    return b;
}

TerminalPair simulate_coupled_terminal(const ModelParams& p, const ControlRule& rule, int n_steps, int n_paths,
                                       std::uint64_t seed)
{
    check_model(p);
    check_counts(n_steps, n_paths);
    validate_control(rule, p);
    const double dt = p.T / n_steps;
    TerminalPair out{std::vector<double>(n_paths), std::vector<double>(n_paths)};
    parallel_for(n_paths, [&](int m) {
        PathState s{p.z0, p.x0, p.x0};
        for (int k = 0; k < n_steps; ++k) {
            s.step(p, rule, dt, seed, static_cast<std::uint64_t>(m), static_cast<std::uint32_t>(k));
        }
        out.x_delta[m] = s.x_delta;
        out.x_frozen[m] = s.x_frozen;
    });
    return out;
}

namespace reference {

TerminalPair simulate_coupled_terminal(const ModelParams& p, const ControlRule& rule, int n_steps, int n_paths,
                                       std::uint64_t seed)
{
    check_model(p);
    check_counts(n_steps, n_paths);
    validate_control(rule, p);
    const double dt = p.T / n_steps;
    TerminalPair out{std::vector<double>(n_paths), std::vector<double>(n_paths)};
    for (int m = 0; m < n_paths; ++m) {
        PathState s{p.z0, p.x0, p.x0};
        for (int k = 0; k < n_steps; ++k) {
            s.step(p, rule, dt, seed, static_cast<std::uint64_t>(m), static_cast<std::uint32_t>(k));
        }
        out.x_delta[m] = s.x_delta;
        out.x_frozen[m] = s.x_frozen;
    }
    return out;
}

}  // namespace reference

RateStudy coupling_rate_study(const ModelParams& p, const std::vector<double>& deltas, const ControlRule& rule,
                              const RateOptions& opts)
{
    if (deltas.size() < 2) throw ConfigError("coupling rate study needs at least two delta values");
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[k] > 0.0) || !std::isfinite(deltas[k])) {
            throw ConfigError("coupling rate study: delta values must be positive");
        }
        if (k > 0 && !(deltas[k] < deltas[k - 1])) {
            throw ConfigError("coupling rate study: delta values must be strictly decreasing");
        }
    }
    if (opts.n_batches < 2 || opts.n_paths < opts.n_batches) {
        throw ConfigError("coupling rate study: need n_batches >= 2 and n_paths >= n_batches");
    }

    const int nd = static_cast<int>(deltas.size());
    const int nb = opts.n_batches;
    std::vector<double> mean(nd), err(nd);
    std::vector<std::vector<double>> batch(nb, std::vector<double>(nd, 0.0));

    for (int k = 0; k < nd; ++k) {
        ModelParams pk = p;
        pk.delta = deltas[k];
        const auto t = simulate_coupled_terminal(pk, rule, opts.n_steps, opts.n_paths, opts.seed);
        double sum = 0.0, sum2 = 0.0;
        std::vector<int> batch_n(nb, 0);
        for (int m = 0; m < opts.n_paths; ++m) {
            const double e = t.x_delta[m] - t.x_frozen[m];
            const double v = e * e;
            sum += v;
            sum2 += v * v;
            const int b = static_cast<int>(static_cast<long long>(m) * nb / opts.n_paths);
            batch[b][k] += v;
            ++batch_n[b];
        }
        for (int b = 0; b < nb; ++b) batch[b][k] /= batch_n[b];
        const double n = opts.n_paths;
        mean[k] = sum / n;
        err[k] = std::sqrt(std::max(sum2 / n - mean[k] * mean[k], 0.0) / (n - 1.0));
    }

    std::vector<double> lx(nd), ly(nd);
    for (int k = 0; k < nd; ++k) {
        lx[k] = std::log(deltas[k]);
        ly[k] = std::log(mean[k]);
    }
    const LineFit fit = fit_line(lx, ly);

    std::vector<double> slopes;
    for (int b = 0; b < nb; ++b) {
        std::vector<double> yb(nd);
        bool usable = true;
        for (int k = 0; k < nd; ++k) {
            if (!(batch[b][k] > 0.0)) usable = false;
            yb[k] = usable ? std::log(batch[b][k]) : 0.0;
        }
        if (usable) slopes.push_back(fit_line(lx, yb).slope);
    }
    double se = 0.0;
    if (slopes.size() >= 2) {
        double ms = 0.0;
        for (double s : slopes) ms += s;
        ms /= slopes.size();
        double var = 0.0;
        for (double s : slopes) var += (s - ms) * (s - ms);
        var /= (slopes.size() - 1.0);
        se = std::sqrt(var / slopes.size());
    }

    RateStudy out;
    out.control = control_name(rule);
    for (int k = 0; k < nd; ++k) out.rows.push_back({deltas[k], mean[k], err[k]});
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.slope_stderr = se;
    return out;
}

}  // namespace uvsb
