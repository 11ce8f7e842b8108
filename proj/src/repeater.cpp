#include "qrep/repeater.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "qrep/rng.hpp"

namespace qrep {

namespace {

void require_prob(double v, const char* name, bool allow_zero = false) {
    const double lo = allow_zero ? 0.0 : std::nextafter(0.0, 1.0);
    if (!(v >= lo) || v > 1.0)
        throw std::invalid_argument(std::string(name) +
                                    " must be a probability in (0, 1]");
}

void require_power_of_two(int n) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw std::invalid_argument("number of links must be a power of two");
}

// One geometric draw (support {1, 2, ...}) with success probability p,
// given log(1-p).
std::uint64_t geometric(Rng& rng, double log_1mp) {
    const double u = rng.uniform_pos();
    const double g = std::floor(std::log(u) / log_1mp) + 1.0;
    if (!(g >= 1.0)) return 1;
    if (g >= 4.0e9) return static_cast<std::uint64_t>(4.0e9);
    return static_cast<std::uint64_t>(g);
}

struct Segment {
    int lo, hi;            // node range; covers links lo .. hi-1
    std::uint64_t birth;   // cycle its oldest surviving constituent was made
};

// Keep strategy: a failed swap reverts only the two pairs it consumed.
void run_keep(int n, double pe, double pes, Rng& rng, std::uint32_t& cycles,
              std::uint32_t& storage) {
    const double log_1mp = std::log1p(-pe);
    std::vector<std::uint64_t> ready(static_cast<std::size_t>(n));
    std::vector<char> waiting(static_cast<std::size_t>(n), 1);
    for (int i = 0; i < n; ++i)
        ready[static_cast<std::size_t>(i)] = geometric(rng, log_1mp);
    std::vector<Segment> segs;  // sorted by lo, disjoint
    segs.reserve(static_cast<std::size_t>(n));
    for (;;) {
        std::uint64_t t = std::numeric_limits<std::uint64_t>::max();
        for (int i = 0; i < n; ++i)
            if (waiting[static_cast<std::size_t>(i)])
                t = std::min(t, ready[static_cast<std::size_t>(i)]);
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            if (waiting[k] && ready[k] == t) {
                waiting[k] = 0;
                const Segment s{i, i + 1, t};
                const auto pos = std::lower_bound(
                    segs.begin(), segs.end(), s,
                    [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
                segs.insert(pos, s);
            }
        }
        // Swap pass: every node whose both adjacent pairs exist attempts a
        // swap this cycle.  Left-to-right order is exhaustive because a merge
        // can only create new adjacency on its right.
        std::size_t idx = 0;
        while (idx + 1 < segs.size()) {
            if (segs[idx].hi != segs[idx + 1].lo) {
                ++idx;
                continue;
            }
            if (rng.uniform() < pes) {
                segs[idx].hi = segs[idx + 1].hi;
                segs[idx].birth = std::min(segs[idx].birth, segs[idx + 1].birth);
                segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
            } else {
                for (int l = segs[idx].lo; l < segs[idx + 1].hi; ++l) {
                    const auto k = static_cast<std::size_t>(l);
                    waiting[k] = 1;
                    ready[k] = t + geometric(rng, log_1mp);
                }
                segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(idx),
                           segs.begin() + static_cast<std::ptrdiff_t>(idx) + 2);
            }
        }
        if (segs.size() == 1 && segs[0].lo == 0 && segs[0].hi == n) {
            cycles = static_cast<std::uint32_t>(t);
            storage = static_cast<std::uint32_t>(t - segs[0].birth + 1);
            return;
        }
    }
}

// Restart strategy: all pairs are discarded when any swap of the final
// cascade fails, and every link starts over.
void run_restart(int n, double pe, double pes, Rng& rng, std::uint32_t& cycles,
                 std::uint32_t& storage) {
    const double log_1mp = std::log1p(-pe);
    std::uint64_t t = 0;
    for (;;) {
        std::uint64_t mx = 0;
        std::uint64_t mn = std::numeric_limits<std::uint64_t>::max();
        for (int i = 0; i < n; ++i) {
            const std::uint64_t g = geometric(rng, log_1mp);
            mx = std::max(mx, g);
            mn = std::min(mn, g);
        }
        t += mx;
        bool ok = true;
        for (int k = 0; k + 1 < n; ++k)
            if (!(rng.uniform() < pes)) ok = false;
        if (ok) {
            cycles = static_cast<std::uint32_t>(t);
            storage = static_cast<std::uint32_t>(mx - mn + 1);
            return;
        }
    }
}

McEstimate summarize(const std::vector<std::uint32_t>& x, std::uint64_t seed) {
    McEstimate e;
    long double sum = 0.0L;
    for (auto v : x) sum += v;
    e.mean = static_cast<double>(sum / static_cast<long double>(x.size()));
    e.ci95 = bootstrap_mean_ci(x, 1000, seed);
    e.runs = x.size();
    return e;
}

}  // namespace

void LinkParams::validate() const {
    if (!(l0_km > 0.0)) throw std::invalid_argument("l0_km must be positive");
    if (!(attenuation_km > 0.0))
        throw std::invalid_argument("attenuation_km must be positive");
    if (!(fiber_speed_km_s > 0.0))
        throw std::invalid_argument("fiber_speed_km_s must be positive");
    if (!(processing_time_s >= 0.0))
        throw std::invalid_argument("processing_time_s must be non-negative");
    require_prob(p_ht, "p_ht");
    require_prob(eta_h, "eta_h");
    require_prob(eta_t, "eta_t");
    require_prob(retrieval, "retrieval");
    require_prob(projection, "projection");
}

double entangle_prob(const LinkParams& p) {
    const double a = p.p_ht * p.eta_h * p.eta_t;
    return 0.5 * a * a * std::exp(-p.l0_km / p.attenuation_km);
}

double swap_prob(const LinkParams& p) {
    return p.retrieval * p.projection * p.eta_h;
}

double cycle_time(const LinkParams& p) {
    return p.l0_km / p.fiber_speed_km_s + p.processing_time_s;
}

double z_n(int n, double p) {
    if (n < 1) throw std::invalid_argument("z_n: n must be >= 1");
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("z_n: p must be in (0, 1]");
    if (p == 1.0) return 1.0;
    const long double log_1mp = std::log1p(-static_cast<long double>(p));
    long double sum = 0.0L;
    long double binom = 1.0L;
    for (int j = 1; j <= n; ++j) {
        binom *= static_cast<long double>(n - j + 1) / static_cast<long double>(j);
        const long double hit = -std::expm1(static_cast<long double>(j) * log_1mp);
        const long double term = binom / hit;
        sum += (j % 2 == 1) ? term : -term;
    }
    return static_cast<double>(sum);
}

double attempts_restart(int n, double pe, double pes) {
    require_power_of_two(n);
    require_prob(pes, "pes");
    return z_n(n, pe) / std::pow(pes, n - 1);
}

double storage_restart_cycles(int n, double pe) {
    require_power_of_two(n);
    if (n == 1) return 1.0;
    return z_n(n - 1, pe) + 1.0;
}

ChainEnsemble simulate_chain(int n, double pe, double pes, Strategy strategy,
                             std::size_t runs, std::uint64_t seed) {
    require_power_of_two(n);
    require_prob(pe, "pe");
    require_prob(pes, "pes");
    if (runs < 2) throw std::invalid_argument("simulate_chain: need >= 2 runs");
    std::vector<std::uint32_t> attempts(runs), storage(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        Rng rng(seed, r);
        if (strategy == Strategy::keep)
            run_keep(n, pe, pes, rng, attempts[r], storage[r]);
        else
            run_restart(n, pe, pes, rng, attempts[r], storage[r]);
    }
    ChainEnsemble e;
    e.attempts = summarize(attempts, stream_seed(seed, 0xa77e3f));
    e.storage = summarize(storage, stream_seed(seed, 0x5704a6));
    return e;
}

RatePoint distribution_rate(const LinkParams& base, int n, Strategy strategy,
                            double l_km, std::size_t runs, std::uint64_t seed) {
    require_power_of_two(n);
    LinkParams p = base;
    p.l0_km = l_km / n;
    p.validate();
    const double pe = entangle_prob(p);
    const double pes = swap_prob(p);
    const double ct = cycle_time(p);
    RatePoint out;
    out.l_km = l_km;
    if (strategy == Strategy::restart || n == 1) {
        const double attempts = attempts_restart(n, pe, pes);
        out.rate_hz = 1.0 / (attempts * ct);
        out.rate_ci = {out.rate_hz, out.rate_hz};
        out.mc = false;
    } else {
        const ChainEnsemble e = simulate_chain(n, pe, pes, strategy, runs, seed);
        out.rate_hz = 1.0 / (e.attempts.mean * ct);
        out.rate_ci = {1.0 / (e.attempts.ci95.hi * ct),
                       1.0 / (e.attempts.ci95.lo * ct)};
        out.mc = true;
    }
    return out;
}

std::vector<RatePoint> rate_vs_distance(const LinkParams& base, int n,
                                        Strategy strategy,
                                        const std::vector<double>& l_grid_km,
                                        std::size_t runs, std::uint64_t seed) {
    std::vector<RatePoint> out;
    out.reserve(l_grid_km.size());
    for (std::size_t i = 0; i < l_grid_km.size(); ++i)
        out.push_back(distribution_rate(base, n, strategy, l_grid_km[i], runs,
                                        stream_seed(seed, 7000 + i)));
    return out;
}

StoragePoint storage_time(const LinkParams& base, int n, Strategy strategy,
                          double l_km, std::size_t runs, std::uint64_t seed) {
    require_power_of_two(n);
    LinkParams p = base;
    p.l0_km = l_km / n;
    p.validate();
    const double pe = entangle_prob(p);
    const double pes = swap_prob(p);
    const double ct = cycle_time(p);
    const ChainEnsemble e = simulate_chain(n, pe, pes, strategy, runs, seed);
    StoragePoint out;
    out.l_km = l_km;
    out.storage_s = e.storage.mean * ct;
    out.storage_ci = {e.storage.ci95.lo * ct, e.storage.ci95.hi * ct};
    return out;
}

std::vector<StoragePoint> storage_vs_distance(
    const LinkParams& base, int n, Strategy strategy,
    const std::vector<double>& l_grid_km, std::size_t runs,
    std::uint64_t seed) {
    std::vector<StoragePoint> out;
    out.reserve(l_grid_km.size());
    for (std::size_t i = 0; i < l_grid_km.size(); ++i)
        out.push_back(storage_time(base, n, strategy, l_grid_km[i], runs,
                                   stream_seed(seed, 9000 + i)));
    return out;
}

}  // namespace qrep
