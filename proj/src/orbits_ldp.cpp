#include "thermoflow/orbits_ldp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <numeric>
#include <thread>

#include "thermoflow/cycles.hpp"
#include "thermoflow/errors.hpp"

namespace thermoflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const auto t = static_cast<std::size_t>(std::max(1, threads));
    if (t == 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < t; ++k) pool.emplace_back([&, k] { fn(n * k / t, n * (k + 1) / t); });
    for (auto& th : pool) th.join();
}

// stationary vector of a small dense kernel; any invariant vector will do
std::vector<double> invariant(const std::vector<std::vector<double>>& p) {
    const std::size_t n = p.size();
    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
    for (int it = 0; it < 20000; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * p[i][j];
        double diff = 0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = (next[i] + pi[i]) / 2;
            diff += std::abs(next[i] - pi[i]);
        }
        pi.swap(next);
        if (diff < 1e-14) break;
    }
    return pi;
}

// all distributions on d points with masses in multiples of 1/k
void compositions(int d, int k, std::vector<std::vector<double>>& out) {
    std::vector<int> c(static_cast<std::size_t>(d), 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == d - 1) {
            c[static_cast<std::size_t>(i)] = left;
            std::vector<double> v;
            for (int x : c) v.push_back(static_cast<double>(x) / k);
            out.push_back(v);
            return;
        }
        for (int x = 0; x <= left; ++x) {
            c[static_cast<std::size_t>(i)] = x;
            rec(i + 1, left - x);
        }
    };
    rec(0, k);
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    return std::max({f1, f2, f(a), f(b)});
}

}  // namespace

WeightedOrbits weighted_orbit_measure(const FlowSystem& sys, const Potential& phi, double t, const WeakStarConfig& cfg,
                                      int threads) {
    std::vector<Word> cycles;
    for_each_primitive_cycle(sys.sft(), std::span<const double>(sys.roof()), t + 1e-9,
                             [&](std::span<const Symbol> w, double) { cycles.emplace_back(w.begin(), w.end()); });
    if (cycles.empty()) throw ParameterError("no closed orbits yet");
    // fixed chunking keeps the floating sums independent of the thread count
    constexpr std::size_t kChunk = 1024;
    const std::size_t chunks = (cycles.size() + kChunk - 1) / kChunk;
    std::vector<EmpiricalMeasure> part(chunks, EmpiricalMeasure(sys, cfg));
    std::vector<double> norm(chunks, 0.0);
    parallel_for(chunks, threads, [&](std::size_t lo, std::size_t hi) {
        Word w(static_cast<std::size_t>(cfg.depth));
        for (std::size_t c = lo; c < hi; ++c)
            for (std::size_t i = c * kChunk; i < std::min(cycles.size(), (c + 1) * kChunk); ++i) {
                const Word& g = cycles[i];
                const double weight = std::exp(orbit_integral(sys, phi, g));
                double period = 0;
                for (Symbol s : g) period += sys.roof(s);
                for (std::size_t j = 0; j < g.size(); ++j) {
                    for (std::size_t k = 0; k < w.size(); ++k) w[k] = g[(j + k) % g.size()];
                    const double mass = weight * sys.roof(g[j]) / period;
                    part[c].add_word(w, mass);
                    part[c].add_heights(0, sys.roof(g[j]), mass);
                }
                norm[c] += weight;
            }
    });
    WeightedOrbits out{EmpiricalMeasure(sys, cfg), 0.0, cycles.size()};
    for (std::size_t c = 0; c < chunks; ++c) {
        out.measure.accumulate(part[c], 1.0);
        out.normalizer += norm[c];
    }
    out.measure.scale(1 / out.normalizer);
    return out;
}

std::pair<double, double> observable_range(const FlowSystem& sys, const CylinderPotential& psi) {
    const BlockSystem b = block_system(sys, psi);
    const std::size_t n = b.states.size();
    double lo = -psi.sup_norm() - 1, hi = psi.sup_norm() + 1;
    // is there a cycle with Σ sign·(ψ̂ − λ r) > 0 ?
    auto positive_cycle = [&](double lambda, double sign) {
        std::vector<double> d(n, 0.0);
        for (std::size_t round = 0; round <= n; ++round) {
            bool changed = false;
            for (std::size_t u = 0; u < n; ++u) {
                const double w = d[u] + sign * (b.fiber[u] - lambda * b.roof[u]);
                for (int v : b.succ[u])
                    if (w > d[static_cast<std::size_t>(v)] + 1e-15) {
                        d[static_cast<std::size_t>(v)] = w;
                        changed = true;
                    }
            }
            if (!changed) return false;
        }
        return true;
    };
    double a = lo, c = hi;
    for (int i = 0; i < 100; ++i) {
        const double mid = (a + c) / 2;
        (positive_cycle(mid, 1) ? a : c) = mid;
    }
    const double top = (a + c) / 2;
    a = lo;
    c = hi;
    for (int i = 0; i < 100; ++i) {
        const double mid = (a + c) / 2;
        (positive_cycle(mid, -1) ? c : a) = mid;
    }
    return {(a + c) / 2, top};
}

RateTable rate_function(const FlowSystem& sys, const CylinderPotential& phi, const CylinderPotential& psi,
                        const std::vector<double>& eps_grid, RateMethod method, double grid_step) {
    if (psi.alphabet() != sys.sft().size()) throw ParameterError("observable is not fiber-representable on this system");
    RateTable out;
    out.pressure = pressure(sys, phi, PressureMethod::spectral).value;
    const auto m = equilibrium_state(sys, phi);
    out.mean = entropy_and_mean(m, psi).mean;
    std::tie(out.psi_min, out.psi_max) = observable_range(sys, psi);
    const double slack = 1e-9;

    if (method == RateMethod::legendre) {
        const double bound = 20 / (psi.sup_norm() > 0 ? psi.sup_norm() : 1.0);
        auto legendre = [&](double u) {
            if (u > out.psi_max + slack || u < out.psi_min - slack) return kInf;
            auto g = [&](double beta) {
                const Potential shifted = phi + psi.scaled(beta);
                return beta * u - (pressure(sys, shifted, PressureMethod::spectral).value - out.pressure);
            };
            return std::max(0.0, golden_max(g, -bound, bound, 1e-8));
        };
        for (double e : eps_grid) {
            if (e <= 0) {
                out.points.push_back({e, 0.0});
                continue;
            }
            out.points.push_back({e, std::min(legendre(out.mean + e), legendre(out.mean - e))});
        }
        return out;
    }

    if (!(grid_step > 0 && grid_step <= 0.5)) throw ParameterError("direct grid step must lie in (0, 0.5]");
    out.grid_step = grid_step;
    const CylinderPotential both = phi + psi;
    const BlockSystem b = block_system(sys, both.width(), both.anchor());
    const std::size_t n = b.states.size();
    std::vector<double> phat(n), psihat(n);
    // lift both potentials to the common block presentation
    for (std::size_t u = 0; u < n; ++u) {
        const Word& s = b.states[u];
        const auto slice = [&](const CylinderPotential& p) {
            return std::span<const Symbol>(s).subspan(static_cast<std::size_t>(both.anchor() - p.anchor()), static_cast<std::size_t>(p.width()));
        };
        phat[u] = phi.at(slice(phi)) * b.roof[u];
        psihat[u] = psi.at(slice(psi)) * b.roof[u];
    }
    const int k = static_cast<int>(std::lround(1 / grid_step));
    std::vector<std::vector<std::vector<double>>> rows(n);
    double combos = 1;
    for (std::size_t u = 0; u < n; ++u) {
        compositions(static_cast<int>(b.succ[u].size()), k, rows[u]);
        combos *= static_cast<double>(rows[u].size());
    }
    // value and constrained mean of one kernel choice
    auto evaluate = [&](const std::vector<std::size_t>& pick, double& value, double& mean) {
        std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t j = 0; j < b.succ[u].size(); ++j) p[u][static_cast<std::size_t>(b.succ[u][j])] = rows[u][pick[u]][j];
        const auto pi = invariant(p);
        double h = 0, f = 0, g = 0, r = 0;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = 0; v < n; ++v)
                if (p[u][v] > 0) h -= pi[u] * p[u][v] * std::log(p[u][v]);
            f += pi[u] * phat[u];
            g += pi[u] * psihat[u];
            r += pi[u] * b.roof[u];
        }
        value = (h + f) / r;
        mean = g / r;
    };
    for (double e : eps_grid) {
        double best = -kInf;
        auto consider = [&](const std::vector<std::size_t>& pick) {
            double v, mean;
            evaluate(pick, v, mean);
            if (std::abs(mean - out.mean) >= e - 1e-12) best = std::max(best, v);
            return std::abs(mean - out.mean) >= e - 1e-12 ? v : -kInf;
        };
        std::vector<std::size_t> pick(n, 0);
        if (combos <= 3e6) {
            while (true) {
                consider(pick);
                std::size_t u = 0;
                while (u < n && ++pick[u] == rows[u].size()) pick[u++] = 0;
                if (u == n) break;
            }
        } else {
            // coordinate ascent over rows from several deterministic starts
            std::mt19937_64 rng(0x5eed);
            for (int start = 0; start < 24; ++start) {
                for (std::size_t u = 0; u < n; ++u) pick[u] = std::uniform_int_distribution<std::size_t>(0, rows[u].size() - 1)(rng);
                double cur = consider(pick);
                for (bool improved = true; improved;) {
                    improved = false;
                    for (std::size_t u = 0; u < n; ++u) {
                        const std::size_t keep = pick[u];
                        std::size_t arg = keep;
                        for (std::size_t c = 0; c < rows[u].size(); ++c) {
                            pick[u] = c;
                            const double v = consider(pick);
                            if (v > cur + 1e-13) {
                                cur = v;
                                arg = c;
                                improved = true;
                            }
                        }
                        pick[u] = arg;
                    }
                }
            }
        }
        out.points.push_back({e, best == -kInf ? kInf : std::max(0.0, out.pressure - best)});
    }
    return out;
}

DeviationResult deviation_frequency(const SuspendedMeasure& m, const CylinderPotential& psi, double eps, double t,
                                    std::uint64_t samples, std::uint64_t seed, int threads) {
    if (!(t > 0)) throw ParameterError("deviation time must be positive");
    if (samples == 0) throw ParameterError("need at least one sample");
    const double mean = entropy_and_mean(m, psi).mean;
    const auto& base = m.base;
    const std::size_t ns = base.states();
    std::vector<double> start(ns);
    for (std::size_t s = 0; s < ns; ++s) start[s] = base.pi()[s] * m.state_roof(static_cast<int>(s));
    std::partial_sum(start.begin(), start.end(), start.begin());
    const double total = start.back();
    auto cumulative = [&](const SparseMatrix& k) {
        std::vector<std::vector<std::pair<double, int>>> c(k.size());
        for (std::size_t s = 0; s < k.size(); ++s) {
            double acc = 0;
            for (auto [j, p] : k[s]) c[s].push_back({acc += p, j});
        }
        return c;
    };
    const auto fwd = cumulative(base.kernel()), back = cumulative(base.reverse_kernel());
    auto step = [](const std::vector<std::pair<double, int>>& row, double u) {
        for (const auto& [c, j] : row)
            if (u < c * (1 - 1e-15)) return j;
        return row.back().second;
    };
    const int a = psi.anchor(), w = psi.width();
    std::vector<std::uint64_t> hits(static_cast<std::size_t>(std::max(1, threads)), 0);
    parallel_for(samples, threads, [&](std::size_t lo, std::size_t hi) {
        std::uint64_t count = 0;
        std::vector<int> states;
        Word word(static_cast<std::size_t>(w));
        for (std::size_t i = lo; i < hi; ++i) {
            std::mt19937_64 rng(splitmix(seed ^ splitmix(i)));
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const double pick = u(rng) * total;
            const int s0 = static_cast<int>(std::upper_bound(start.begin(), start.end(), pick) - start.begin());
            const int first = std::min(s0, static_cast<int>(ns) - 1);
            states.assign(1, first);
            for (int k = 0; k < a; ++k) states.insert(states.begin(), step(back[static_cast<std::size_t>(states.front())], u(rng)));
            double h = u(rng) * m.state_roof(first);
            double left = t, integral = 0;
            std::size_t pos = static_cast<std::size_t>(a);
            while (left > 0) {
                while (states.size() < pos + static_cast<std::size_t>(w - a))
                    states.push_back(step(fwd[static_cast<std::size_t>(states.back())], u(rng)));
                const double stay = std::min(m.state_roof(states[pos]) - h, left);
                for (int k = 0; k < w; ++k) word[static_cast<std::size_t>(k)] = base.emit(states[pos - static_cast<std::size_t>(a) + static_cast<std::size_t>(k)]);
                integral += psi.at(word) * stay;
                left -= stay;
                h = 0;
                ++pos;
            }
            if (std::abs(integral / t - mean) >= eps) ++count;
        }
        // ranges are disjoint; slot by the first index keeps the sum order-free
        static_assert(sizeof(std::uint64_t) == 8);
        if (lo < hi) hits[lo * hits.size() / samples] += count;
    });
    DeviationResult r;
    r.samples = samples;
    r.hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
    const double n = static_cast<double>(samples);
    r.frequency = static_cast<double>(r.hits) / n;
    const double z = 1.96, p = r.frequency;
    const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n);
    const double lo = std::max(0.0, centre - half), hi = std::min(1.0, centre + half);
    r.log_rate = r.hits ? std::log(r.frequency) / t : -kInf;
    r.ci_lo = lo > 0 ? std::log(lo) / t : -kInf;
    r.ci_hi = std::log(hi) / t;
    r.resolved = r.hits >= 10;
    return r;
}

}  // namespace thermoflow
