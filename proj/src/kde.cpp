#include "qrep/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qrep/constants.hpp"
#include "qrep/stats.hpp"

namespace qrep {

namespace {

constexpr double kGridStep = 0.25 * ns;
constexpr double kKernelReach = 5.0;  // accumulate within +-5 sigma

std::vector<double> make_grid(double t_max, double sigma) {
    const double hi = t_max + kKernelReach * sigma;
    const auto n = static_cast<std::size_t>(std::ceil(hi / kGridStep)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) * kGridStep;
    return grid;
}

// Gaussian kernel values on grid points within +-5 sigma of t, as a
// (first index, values) pair.
std::pair<std::size_t, Eigen::VectorXd> kernel_slice(
    const std::vector<double>& grid, double t, double sigma) {
    const double lo = t - kKernelReach * sigma;
    const double hi = t + kKernelReach * sigma;
    const auto n = grid.size();
    auto first = static_cast<std::size_t>(
        std::max(0.0, std::ceil(lo / kGridStep)));
    first = std::min(first, n - 1);
    auto last = static_cast<std::size_t>(
        std::max(0.0, std::floor(hi / kGridStep)));
    last = std::min(last, n - 1);
    Eigen::VectorXd values(static_cast<Eigen::Index>(last - first + 1));
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t i = first; i <= last; ++i) {
        const double d = grid[i] - t;
        values[static_cast<Eigen::Index>(i - first)] = std::exp(-d * d * inv2s2);
    }
    return {first, values};
}

// Scale-invariant herald-averaged contrast of an (un-normalized) joint
// mass matrix:  C = ||U U^T||_F^2 / (sum of mass)^2  with U = sqrt(mass).
double contrast_of_mass(const Eigen::MatrixXd& mass) {
    const double total = mass.sum();
    if (total <= 0.0) throw std::domain_error("contrast of empty density");
    const Eigen::MatrixXd u = mass.cwiseSqrt();
    const Eigen::MatrixXd m = u * u.transpose();
    const double c = m.squaredNorm() / (total * total);
    return std::min(1.0, std::max(0.0, c));
}

}  // namespace

KdeEstimate kde2d(const ArrivalSampleSet& samples, double kappa_t_total,
                  double kappa_h_total, int n_batches) {
    const auto& data = samples.samples;
    if (data.size() < 100)
        throw std::invalid_argument("kde2d: need at least 100 samples");
    if (kappa_t_total <= 0.0 || kappa_h_total <= 0.0)
        throw std::invalid_argument("kde2d: cavity linewidths must be positive");
    if (n_batches < 1) n_batches = 1;

    double max_h = 0.0, max_t = 0.0;
    double min_h = std::numeric_limits<double>::infinity();
    double min_t = std::numeric_limits<double>::infinity();
    for (const auto& s : data) {
        max_h = std::max(max_h, s.t_herald);
        min_h = std::min(min_h, s.t_herald);
        max_t = std::max(max_t, s.t_telecom);
        min_t = std::min(min_t, s.t_telecom);
    }
    if (max_h == min_h && max_t == min_t)
        throw std::invalid_argument("kde2d: degenerate samples (all identical)");

    KdeEstimate kde;
    kde.sigma_telecom = 1.0 / (6.0 * kappa_t_total);
    kde.sigma_herald = 1.0 / (6.0 * kappa_h_total);
    kde.herald_times = make_grid(max_h, kde.sigma_herald);
    kde.telecom_times = make_grid(max_t, kde.sigma_telecom);
    kde.dt_herald = kGridStep;
    kde.dt_telecom = kGridStep;
    kde.n_samples = data.size();

    const auto nh = static_cast<Eigen::Index>(kde.herald_times.size());
    const auto nt = static_cast<Eigen::Index>(kde.telecom_times.size());
    kde.batch_mass.assign(static_cast<std::size_t>(n_batches),
                          Eigen::MatrixXd::Zero(nh, nt));

    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto b = k * static_cast<std::size_t>(n_batches) / data.size();
        auto [h0, kh] = kernel_slice(kde.herald_times, data[k].t_herald,
                                     kde.sigma_herald);
        auto [t0, kt] = kernel_slice(kde.telecom_times, data[k].t_telecom,
                                     kde.sigma_telecom);
        kde.batch_mass[b].block(static_cast<Eigen::Index>(h0),
                                static_cast<Eigen::Index>(t0), kh.size(),
                                kt.size()) += kh * kt.transpose();
    }

    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nh, nt);
    for (const auto& g : kde.batch_mass) mass += g;
    const double total = mass.sum();
    if (total <= 0.0) throw std::domain_error("kde2d: zero total mass");
    kde.density = mass / (total * kde.dt_herald * kde.dt_telecom);
    return kde;
}

Envelope conditional_envelope(const KdeEstimate& kde, double t_h) {
    if (kde.herald_times.empty())
        throw std::domain_error("conditional_envelope: empty estimate");
    if (t_h < kde.herald_times.front() || t_h > kde.herald_times.back())
        throw std::domain_error(
            "conditional_envelope: herald time outside the estimated support");
    const auto row = static_cast<Eigen::Index>(
        std::llround((t_h - kde.herald_times.front()) / kde.dt_herald));
    const Eigen::VectorXd r = kde.density.row(row);
    const double mass = r.sum();
    double max_mass = 0.0;
    for (Eigen::Index i = 0; i < kde.density.rows(); ++i)
        max_mass = std::max(max_mass, kde.density.row(i).sum());
    if (mass <= 1e-12 * max_mass)
        throw std::domain_error(
            "conditional_envelope: negligible herald density at requested time");
    Envelope env;
    env.times = kde.telecom_times;
    env.dt = kde.dt_telecom;
    env.density = r / (mass * kde.dt_telecom);
    return env;
}

Envelope telecom_marginal(const KdeEstimate& kde) {
    Envelope env;
    env.times = kde.telecom_times;
    env.dt = kde.dt_telecom;
    Eigen::VectorXd col_mass = kde.density.colwise().sum();
    env.density = col_mass / (col_mass.sum() * kde.dt_telecom);
    return env;
}

Envelope herald_marginal(const KdeEstimate& kde) {
    Envelope env;
    env.times = kde.herald_times;
    env.dt = kde.dt_herald;
    Eigen::VectorXd row_mass = kde.density.rowwise().sum();
    env.density = row_mass / (row_mass.sum() * kde.dt_herald);
    return env;
}

double pair_contrast(const Envelope& e1, const Envelope& e2) {
    if (e1.density.size() != e2.density.size() || e1.dt != e2.dt)
        throw std::invalid_argument("pair_contrast: envelopes on different grids");
    const double overlap =
        e1.density.cwiseProduct(e2.density).cwiseSqrt().sum() * e1.dt;
    const double c = overlap * overlap;
    return std::min(1.0, std::max(0.0, c));
}

double average_contrast(const KdeEstimate& kde) {
    return contrast_of_mass(kde.density);
}

ContrastEstimate average_contrast_error(const KdeEstimate& kde) {
    ContrastEstimate out;
    out.value = contrast_of_mass(kde.density);
    const std::size_t b = kde.batch_mass.size();
    if (b < 2) return out;
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(kde.density.rows(),
                                                  kde.density.cols());
    for (const auto& g : kde.batch_mass) total += g;
    out.stderr_ = jackknife_stderr(b, [&](std::size_t skip) {
        return contrast_of_mass(total - kde.batch_mass[skip]);
    });
    return out;
}

double fidelity_from_contrast(double contrast) {
    return 0.5 * (1.0 + contrast);
}

std::vector<PostselectPoint> postselect_tradeoff(
    const KdeEstimate& kde, const std::vector<double>& windows) {
    const Eigen::MatrixXd u = kde.density.cwiseSqrt();
    const Eigen::MatrixXd m = u * u.transpose();
    const Eigen::VectorXd row_mass = kde.density.rowwise().sum();
    const double total = row_mass.sum();
    const auto nh = row_mass.size();

    std::vector<PostselectPoint> out;
    out.reserve(windows.size());
    for (double w : windows) {
        if (w < 0.0)
            throw std::invalid_argument("postselect_tradeoff: negative window");
        const auto band = static_cast<Eigen::Index>(
            std::floor(w / kde.dt_herald + 1e-9));
        double num = 0.0, den = 0.0;
        for (Eigen::Index i = 0; i < nh; ++i) {
            const Eigen::Index j_hi = std::min(nh - 1, i + band);
            for (Eigen::Index j = std::max<Eigen::Index>(0, i - band);
                 j <= j_hi; ++j) {
                num += m(i, j) * m(i, j);
                den += row_mass[i] * row_mass[j];
            }
        }
        PostselectPoint p;
        p.window = w;
        p.contrast = den > 0.0 ? std::min(1.0, std::max(0.0, num / den)) : 0.0;
        p.retained = den / (total * total);
        out.push_back(p);
    }
    return out;
}

}  // namespace qrep
