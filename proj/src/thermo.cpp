#include "thermoflow/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "thermoflow/cycles.hpp"
#include "thermoflow/errors.hpp"

namespace thermoflow {

namespace {

std::vector<double> stationary_dense(const SparseMatrix& k) {
    const std::size_t n = k.size();
    // solve π(P − I) = 0 with the last equation replaced by Σπ = 1
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (auto [j, p] : k[i]) a[static_cast<std::size_t>(j)][i] += p;
        a[i][i] -= 1;
    }
    for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1;
    a[n - 1][n] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) throw ModelError("chain has no unique stationary vector");
        std::swap(a[c], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
    return pi;
}

std::vector<double> stationary_iterative(const SparseMatrix& k) {
    const std::size_t n = k.size();
    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
    for (int it = 0; it < 2'000'000; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (auto [j, p] : k[i]) next[static_cast<std::size_t>(j)] += pi[i] * p;
        double diff = 0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = (next[i] + pi[i]) / 2;
            diff += std::abs(next[i] - pi[i]);
        }
        pi.swap(next);
        if (diff < 1e-15) return pi;
    }
    throw ConvergenceError("stationary vector iteration did not settle", 0);
}

SparseMatrix transpose(const SparseMatrix& m) {
    SparseMatrix t(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (auto [j, v] : m[i]) t[static_cast<std::size_t>(j)].push_back({static_cast<int>(i), v});
    return t;
}

struct PowerResult {
    double value;
    std::vector<double> vec;
    int iterations;
};

PowerResult power(const SparseMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> x(n, 1.0), mx(n);
    double lo = 0, hi = 0;
    for (int it = 1; it <= 100000; ++it) {
        std::fill(mx.begin(), mx.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (auto [j, v] : m[i]) mx[i] += v * x[static_cast<std::size_t>(j)];
        lo = std::numeric_limits<double>::infinity();
        hi = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = mx[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        if (hi - lo <= 1e-13 * hi) return {(lo + hi) / 2, x, it};
        double top = 0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += mx[i];
            top = std::max(top, x[i]);
        }
        for (double& v : x) v /= top;
    }
    throw ConvergenceError("power iteration did not converge", (hi - lo) / hi);
}

const CylinderPotential& as_cylinder(const FlowSystem& sys, const Potential& phi, int width, CylinderPotential& storage) {
    if (const auto* c = std::get_if<CylinderPotential>(&phi)) {
        if (c->alphabet() != sys.sft().size()) throw ModelError("potential alphabet does not match the system");
        return *c;
    }
    storage = approximate(sys, std::get<DistancePotential>(phi), width);
    return storage;
}

struct Bracket {
    double lo, hi;
    int perron_steps;
};

Bracket spectral_bracket(const BlockSystem& b, double width) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, rmin = lo;
    std::size_t deg = 1;
    for (std::size_t u = 0; u < b.states.size(); ++u) {
        lo = std::min(lo, b.fiber[u] / b.roof[u]);
        hi = std::max(hi, b.fiber[u] / b.roof[u]);
        rmin = std::min(rmin, b.roof[u]);
        deg = std::max(deg, b.succ[u].size());
    }
    hi += std::log(static_cast<double>(deg)) / rmin;
    int steps = 0;
    while (hi - lo > width) {
        const double mid = (lo + hi) / 2;
        const auto pr = perron(pressure_matrix(b, mid));
        steps += pr.iterations;
        if (pr.value > 1)
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi, steps};
}

struct Regression {
    double slope;
    double stderr_;
};

Regression regress(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double b = sxy / sxx;
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - my - b * (x[i] - mx);
        rss += e * e;
    }
    return {b, x.size() > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0};
}

std::vector<double> time_grid(const PressureOptions& opt) {
    if (opt.grid_points < 3 || !(opt.horizon > 0)) throw ParameterError("pressure grid needs ≥ 3 points and a positive horizon");
    std::vector<double> g;
    for (int j = 0; j < opt.grid_points; ++j) g.push_back(opt.horizon / 2 + opt.horizon / 2 * j / (opt.grid_points - 1));
    return g;
}

// Σ over block paths whose fibers cover t exactly once at the end, of e^{Σφ̂}.
std::vector<double> separated_sums(const BlockSystem& b, const std::vector<double>& grid) {
    const double tmax = grid.back();
    std::map<long long, std::pair<double, std::vector<long double>>> frontier;
    auto key = [](double t) { return std::llround(t * 1e9); };
    frontier[0] = {0.0, std::vector<long double>(b.states.size(), 1.0L)};
    std::vector<long double> z(grid.size(), 0.0L);
    while (!frontier.empty()) {
        auto node = frontier.begin()->second;
        frontier.erase(frontier.begin());
        const double start = node.first;
        for (std::size_t u = 0; u < b.states.size(); ++u) {
            const long double w = node.second[u];
            if (w == 0) continue;
            const long double wu = w * std::exp(static_cast<long double>(b.fiber[u]));
            const double end = start + b.roof[u];
            for (std::size_t j = 0; j < grid.size(); ++j)
                if (start < grid[j] && grid[j] <= end) z[j] += wu;
            if (end >= tmax) continue;
            auto& next = frontier[key(end)];
            if (next.second.empty()) next = {end, std::vector<long double>(b.states.size(), 0.0L)};
            for (int v : b.succ[u]) next.second[static_cast<std::size_t>(v)] += wu;
        }
    }
    return {z.begin(), z.end()};
}

}  // namespace

MarkovMeasure::MarkovMeasure(const Sft& sft, std::vector<Symbol> emit, SparseMatrix kernel, std::vector<double> pi)
    : alphabet_(sft.size()), emit_(std::move(emit)), kernel_(std::move(kernel)), pi_(std::move(pi)) {
    const std::size_t n = emit_.size();
    if (n == 0 || kernel_.size() != n) throw ModelError("kernel and emission sizes differ");
    for (Symbol s : emit_)
        if (s < 0 || static_cast<std::size_t>(s) >= alphabet_) throw ModelError("emitted symbol out of range");
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0;
        SparseRow kept;
        for (auto [j, p] : kernel_[i]) {
            if (j < 0 || static_cast<std::size_t>(j) >= n) throw ModelError("kernel column out of range");
            if (p < 0 || !std::isfinite(p)) throw ModelError("kernel entries must be nonnegative");
            if (p == 0) continue;
            if (!sft.allowed(emit_[i], emit_[static_cast<std::size_t>(j)])) throw ModelError("kernel charges a forbidden transition");
            sum += p;
            kept.push_back({j, p});
        }
        if (std::abs(sum - 1) > 1e-12) throw ModelError("kernel row does not sum to 1");
        kernel_[i] = std::move(kept);
    }
    if (pi_.empty()) pi_ = n <= 600 ? stationary_dense(kernel_) : stationary_iterative(kernel_);
    if (pi_.size() != n) throw ModelError("stationary vector of wrong size");
    std::vector<double> check(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (auto [j, p] : kernel_[i]) check[static_cast<std::size_t>(j)] += pi_[i] * p;
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(pi_[i] > 0)) throw ModelError("stationary vector not positive: chain is not irreducible");
        if (std::abs(check[i] - pi_[i]) > 1e-10) throw ModelError("vector is not stationary");
        total += pi_[i];
    }
    if (std::abs(total - 1) > 1e-10) throw ModelError("stationary vector does not sum to 1");
    reverse_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (auto [j, p] : kernel_[i])
            reverse_[static_cast<std::size_t>(j)].push_back({static_cast<int>(i), pi_[i] * p / pi_[static_cast<std::size_t>(j)]});
}

MarkovMeasure MarkovMeasure::from_matrix(const Sft& sft, const std::vector<std::vector<double>>& p) {
    if (p.size() != sft.size()) throw ModelError("kernel size differs from the alphabet");
    SparseMatrix k(p.size());
    std::vector<Symbol> emit(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].size() != p.size()) throw ModelError("kernel must be square");
        emit[i] = static_cast<Symbol>(i);
        for (std::size_t j = 0; j < p.size(); ++j)
            if (p[i][j] != 0) k[i].push_back({static_cast<int>(j), p[i][j]});
    }
    return MarkovMeasure(sft, std::move(emit), std::move(k));
}

MarkovMeasure MarkovMeasure::bernoulli(const Sft& sft, const std::vector<double>& p) {
    if (p.size() != sft.size()) throw ModelError("one probability per symbol expected");
    return from_matrix(sft, std::vector<std::vector<double>>(sft.size(), p));
}

double MarkovMeasure::entropy() const {
    double h = 0;
    for (std::size_t i = 0; i < emit_.size(); ++i)
        for (auto [j, p] : kernel_[i]) h -= pi_[i] * p * std::log(p);
    return h;
}

double MarkovMeasure::cylinder(std::span<const Symbol> w) const {
    if (w.empty()) return 1;
    const std::size_t n = emit_.size();
    std::vector<double> f(n, 0.0), g(n);
    for (std::size_t s = 0; s < n; ++s)
        if (emit_[s] == w[0]) f[s] = pi_[s];
    for (std::size_t k = 1; k < w.size(); ++k) {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (f[s] == 0) continue;
            for (auto [t, p] : kernel_[s])
                if (emit_[static_cast<std::size_t>(t)] == w[k]) g[static_cast<std::size_t>(t)] += f[s] * p;
        }
        f.swap(g);
    }
    return std::accumulate(f.begin(), f.end(), 0.0);
}

std::vector<int> MarkovMeasure::sample_path(std::mt19937_64& rng, int len, int pivot, const std::vector<double>& weight) const {
    if (pivot < 0 || pivot >= len) throw ParameterError("pivot outside the sampled path");
    std::vector<double> w(pi_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = pi_[i] * (weight.empty() ? 1.0 : weight[i]);
    std::vector<int> path(static_cast<std::size_t>(len));
    path[static_cast<std::size_t>(pivot)] = std::discrete_distribution<int>(w.begin(), w.end())(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto step = [&](const SparseRow& row) {
        double r = u(rng);
        for (auto [j, p] : row) {
            if (r < p) return j;
            r -= p;
        }
        return row.back().first;
    };
    for (int k = pivot + 1; k < len; ++k) path[static_cast<std::size_t>(k)] = step(kernel_[static_cast<std::size_t>(path[static_cast<std::size_t>(k - 1)])]);
    for (int k = pivot - 1; k >= 0; --k) path[static_cast<std::size_t>(k)] = step(reverse_[static_cast<std::size_t>(path[static_cast<std::size_t>(k + 1)])]);
    return path;
}

SuspendedMeasure::SuspendedMeasure(FlowSystem sys, MarkovMeasure m) : system(std::move(sys)), base(std::move(m)) {
    if (base.alphabet() != system.sft().size()) throw ModelError("measure and system use different alphabets");
    for (std::size_t s = 0; s < base.states(); ++s) mean_roof += base.pi()[s] * state_roof(static_cast<int>(s));
}

MarkovMeasure random_markov(const Sft& sft, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<std::vector<double>> p(sft.size(), std::vector<double>(sft.size(), 0.0));
    for (std::size_t i = 0; i < sft.size(); ++i) {
        double sum = 0;
        for (Symbol j : sft.successors(static_cast<Symbol>(i))) sum += p[i][static_cast<std::size_t>(j)] = e(rng) + 1e-12;
        for (double& v : p[i]) v /= sum;
    }
    return MarkovMeasure::from_matrix(sft, p);
}

PerronData perron(const SparseMatrix& m) {
    SparseMatrix shifted = m;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i].push_back({static_cast<int>(i), 1.0});
    const auto r = power(shifted);
    const auto l = power(transpose(shifted));
    return {r.value - 1, r.vec, l.vec, r.iterations + l.iterations};
}

std::string to_string(PressureMethod m) {
    switch (m) {
        case PressureMethod::spectral: return "spectral";
        case PressureMethod::separated: return "separated";
        case PressureMethod::gurevic: return "gurevic";
    }
    return "?";
}

PressureMethod pressure_method(const std::string& name) {
    if (name == "spectral") return PressureMethod::spectral;
    if (name == "separated") return PressureMethod::separated;
    if (name == "gurevic") return PressureMethod::gurevic;
    throw ParameterError("unknown pressure method: " + name);
}

SparseMatrix pressure_matrix(const BlockSystem& b, double s) {
    SparseMatrix m(b.states.size());
    for (std::size_t u = 0; u < b.states.size(); ++u) {
        const double w = std::exp(b.fiber[u] - s * b.roof[u]);
        for (int v : b.succ[u]) m[u].push_back({v, w});
    }
    return m;
}

PressureResult pressure(const FlowSystem& sys, const Potential& phi, PressureMethod method, const PressureOptions& opt) {
    if (!is_irreducible(sys.sft())) throw SpecificationError();
    PressureResult out;
    out.method = method;
    const bool distance = std::holds_alternative<DistancePotential>(phi);

    if (method == PressureMethod::spectral) {
        if (!distance) {
            const BlockSystem b = block_system(sys, std::get<CylinderPotential>(phi));
            const auto br = spectral_bracket(b, opt.bracket);
            out.value = (br.lo + br.hi) / 2;
            out.error = (br.hi - br.lo) / 2 + 1e-12;
            out.diagnostics = {{"block_states", static_cast<double>(b.states.size())}, {"power_iterations", br.perron_steps}};
            return out;
        }
        std::vector<double> values;
        for (int w : opt.approx_widths) {
            const BlockSystem b = block_system(sys, approximate(sys, std::get<DistancePotential>(phi), w));
            const auto br = spectral_bracket(b, opt.bracket);
            values.push_back((br.lo + br.hi) / 2);
            out.diagnostics.push_back({"width_" + std::to_string(w), values.back()});
        }
        out.value = values.back();
        out.error = (values.size() > 1 ? std::abs(values.back() - values[values.size() - 2]) : 0.0) + opt.bracket;
        return out;
    }

    CylinderPotential storage = CylinderPotential::constant(sys.sft(), 0);
    const CylinderPotential& cyl = as_cylinder(sys, phi, opt.approx_widths.empty() ? 4 : opt.approx_widths.back(), storage);
    const auto grid = time_grid(opt);
    std::vector<double> logz;
    if (method == PressureMethod::separated) {
        for (double z : separated_sums(block_system(sys, cyl), grid)) logz.push_back(std::log(z));
    } else {
        std::vector<std::pair<double, double>> orbits;  // period, e^Φ
        for_each_primitive_cycle(sys.sft(), std::span<const double>(sys.roof()), opt.horizon + 1e-9,
                                 [&](std::span<const Symbol> w, double period) {
                                     // the k-th iterate enters as in a trace: |γ|·e^{kΦ(γ)}
                                     const double phi_g = cycle_integral(sys, cyl, w);
                                     for (int k = 1; k * period <= opt.horizon + 1e-9; ++k)
                                         orbits.push_back({k * period, std::exp(k * phi_g) / k});
                                 });
        std::sort(orbits.begin(), orbits.end());
        std::size_t k = 0;
        long double acc = 0;
        for (double t : grid) {
            while (k < orbits.size() && orbits[k].first <= t + 1e-9) {
                acc += static_cast<long double>(orbits[k].first) * orbits[k].second;
                ++k;
            }
            if (acc <= 0) throw ParameterError("no closed orbits yet");
            logz.push_back(std::log(static_cast<double>(acc)));
        }
        out.diagnostics.push_back({"closed_orbits", static_cast<double>(orbits.size())});
    }
    const auto reg = regress(grid, logz);
    out.value = reg.slope;
    out.error = 1.96 * reg.stderr_;
    const std::size_t n = grid.size();
    const double d1 = (logz[n - 1] - logz[n - 2]) / (grid[n - 1] - grid[n - 2]);
    const double half = (logz[n - 1] - logz[n / 2]) / (grid[n - 1] - grid[n / 2]);
    out.diagnostics.push_back({"horizon", opt.horizon});
    out.diagnostics.push_back({"last_difference", d1});
    out.diagnostics.push_back({"upper_half_slope", half});
    out.diagnostics.push_back({"slope_stderr", reg.stderr_});
    if (distance) out.diagnostics.push_back({"approx_width", cyl.width()});
    return out;
}

SuspendedMeasure equilibrium_state(const FlowSystem& sys, const Potential& phi, int approx_width) {
    if (!is_irreducible(sys.sft())) throw SpecificationError();
    CylinderPotential storage = CylinderPotential::constant(sys.sft(), 0);
    const CylinderPotential& cyl = as_cylinder(sys, phi, approx_width, storage);
    const BlockSystem b = block_system(sys, cyl);
    const auto br = spectral_bracket(b, 1e-12);
    const double p = (br.lo + br.hi) / 2;
    const SparseMatrix m = pressure_matrix(b, p);
    const auto pd = perron(m);
    SparseMatrix k(m.size());
    std::vector<double> pi(m.size());
    double norm = 0;
    for (std::size_t u = 0; u < m.size(); ++u) {
        double sum = 0;
        for (auto [v, x] : m[u]) sum += x * pd.right[static_cast<std::size_t>(v)];
        for (auto [v, x] : m[u]) k[u].push_back({v, x * pd.right[static_cast<std::size_t>(v)] / sum});
        pi[u] = pd.left[u] * pd.right[u];
        norm += pi[u];
    }
    for (double& x : pi) x /= norm;
    // one exact stationarity sweep removes the eigenvector residual
    std::vector<double> pk(pi.size(), 0.0);
    for (std::size_t u = 0; u < k.size(); ++u)
        for (auto [v, x] : k[u]) pk[static_cast<std::size_t>(v)] += pi[u] * x;
    const double total = std::accumulate(pk.begin(), pk.end(), 0.0);
    for (double& x : pk) x /= total;
    return SuspendedMeasure(sys, MarkovMeasure(sys.sft(), b.emit, std::move(k), std::move(pk)));
}

EntropyMean entropy_and_mean(const SuspendedMeasure& mu, const Potential& phi, int approx_width) {
    CylinderPotential storage = CylinderPotential::constant(mu.system.sft(), 0);
    const CylinderPotential& cyl = as_cylinder(mu.system, phi, approx_width, storage);
    EntropyMean out;
    out.entropy = mu.base.entropy() / mu.mean_roof;
    double integral = 0;
    for (const auto& w : admissible_words(mu.system.sft(), cyl.width())) {
        const double c = mu.base.cylinder(w);
        if (c > 0) integral += c * cyl.at(w) * mu.system.roof(w[static_cast<std::size_t>(cyl.anchor())]);
    }
    out.mean = integral / mu.mean_roof;
    return out;
}

double expansivity_scale(const FlowSystem& sys) { return 0.5 * std::min(1.0, sys.min_roof()); }

double ball_measure(const SuspendedMeasure& mu, const SuspPoint& x, double t, double rho) {
    const int m = margin_for(rho);
    long last = 0;
    double covered = mu.system.roof(x.base.at(0)) - x.height;
    while (covered < t) covered += mu.system.roof(x.base.at(++last));
    const Word w = x.base.window(-m, last + 2 * m + 1);
    const double r0 = mu.system.roof(x.base.at(0));
    const double window = std::min(r0, x.height + rho) - std::max(0.0, x.height - rho);
    return mu.base.cylinder(w) * window / mu.mean_roof;
}

GibbsStats gibbs_ratio_stats(const SuspendedMeasure& mu, const Potential& phi, double rho, const std::vector<double>& t_grid,
                             int samples, std::uint64_t seed) {
    if (!(rho > 0) || rho >= expansivity_scale(mu.system)) throw ParameterError("above expansivity scale");
    GibbsStats out;
    out.t = t_grid;
    out.pressure = pressure(mu.system, phi, PressureMethod::spectral).value;
    out.min_ratio.assign(t_grid.size(), std::numeric_limits<double>::infinity());
    out.max_ratio.assign(t_grid.size(), 0.0);
    const double tmax = t_grid.empty() ? 0.0 : *std::max_element(t_grid.begin(), t_grid.end());
    const int m = margin_for(rho);
    const int len = static_cast<int>(std::ceil(tmax / mu.system.min_roof())) + 2 * m + 4;
    std::vector<double> roof(mu.base.states());
    for (std::size_t s = 0; s < roof.size(); ++s) roof[s] = mu.state_roof(static_cast<int>(s));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < samples; ++i) {
        const auto path = mu.base.sample_path(rng, len, m, roof);
        Word w;
        for (int s : path) w.push_back(mu.base.emit(s));
        const SuspPoint x{embed_word(mu.system.sft(), w, -m), u(rng) * mu.system.roof(w[static_cast<std::size_t>(m)])};
        for (std::size_t j = 0; j < t_grid.size(); ++j) {
            const double t = t_grid[j];
            const double ratio = ball_measure(mu, x, t, rho) / std::exp(-t * out.pressure + birkhoff(mu.system, phi, {x, t}));
            out.min_ratio[j] = std::min(out.min_ratio[j], ratio);
            out.max_ratio[j] = std::max(out.max_ratio[j], ratio);
        }
    }
    return out;
}

BowenTable bowen_constant_estimate(const FlowSystem& sys, const Potential& phi, double eps, const std::vector<double>& s_grid,
                                   int samples, std::uint64_t seed) {
    if (!(eps > 0) || eps >= expansivity_scale(sys)) throw ParameterError("above expansivity scale");
    BowenTable out;
    out.s = s_grid;
    out.v.assign(s_grid.size(), 0.0);
    out.pairs.assign(s_grid.size(), 0);
    const double smax = s_grid.empty() ? 0.0 : *std::max_element(s_grid.begin(), s_grid.end());
    const int m = margin_for(eps) + 1;
    const int body = static_cast<int>(std::ceil(smax / sys.min_roof())) + 2;
    const int pad = m + 3;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto pick = [&](const std::vector<Symbol>& options) {
        return options[static_cast<std::size_t>(u(rng) * static_cast<double>(options.size())) % options.size()];
    };
    const auto n = static_cast<Symbol>(sys.sft().size());
    for (int i = 0; i < samples; ++i) {
        // shared block on [−m, body+m], independent continuations outside
        Word core{static_cast<Symbol>(u(rng) * n) % n};
        for (int k = 1; k <= body + 2 * m; ++k) core.push_back(pick(sys.sft().successors(core.back())));
        auto extend = [&](Word w) {
            for (int k = 0; k < pad; ++k) w.insert(w.begin(), pick(sys.sft().predecessors(w.front())));
            for (int k = 0; k < pad; ++k) w.push_back(pick(sys.sft().successors(w.back())));
            return w;
        };
        const Word wx = extend(core), wy = extend(core);
        const BiWord bx = embed_word(sys.sft(), wx, -m - pad), by = embed_word(sys.sft(), wy, -m - pad);
        const double r0 = sys.roof(bx.at(0));
        const double hx = u(rng) * r0;
        const double hy = std::clamp(hx + (u(rng) - 0.5) * eps / 2, 0.0, std::nextafter(r0, 0.0));
        const SuspPoint x{bx, hx}, y{by, hy};
        for (std::size_t j = 0; j < s_grid.size(); ++j) {
            const double s = s_grid[j];
            if (shadow_sup(sys, y, {x, s}, eps) >= eps) continue;
            ++out.pairs[j];
            out.v[j] = std::max(out.v[j], std::abs(birkhoff(sys, phi, {x, s}) - birkhoff(sys, phi, {y, s})));
        }
    }
    return out;
}

}  // namespace thermoflow
