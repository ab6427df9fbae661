#include "evsizer/gp.hpp"

#include "evsizer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace evsizer {

double GpPrediction::stddev() const { return std::sqrt(std::max(variance, 0.0)); }

double matern52(std::span<const double> a, std::span<const double> b, const GpHyperparameters& hp) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = (a[i] - b[i]) / hp.length_scales[i];
        r2 += d * d;
    }
    const double r = std::sqrt(5.0 * r2);
    return hp.signal_variance * (1.0 + r + 5.0 * r2 / 3.0) * std::exp(-r);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Factorization {
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;
    double lml = kNegInf;
    double jitter = 0.0;
    bool ok = false;
};

double kernel_rows(const Eigen::MatrixXd& x, Eigen::Index i, Eigen::Index j, const GpHyperparameters& hp) {
    const auto d = static_cast<std::size_t>(x.cols());
    double r2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        const double diff = (x(i, static_cast<Eigen::Index>(c)) - x(j, static_cast<Eigen::Index>(c))) / hp.length_scales[c];
        r2 += diff * diff;
    }
    const double r = std::sqrt(5.0 * r2);
    return hp.signal_variance * (1.0 + r + 5.0 * r2 / 3.0) * std::exp(-r);
}

Factorization factorize(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GpHyperparameters& hp,
                        const GpOptions& opt) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = hp.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel_rows(x, i, j, hp);
            k(i, j) = v;
            k(j, i) = v;
        }
    }

    Factorization f;
    for (double jitter = opt.jitter; jitter <= opt.max_jitter * (1.0 + 1e-9); jitter *= 10.0) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += hp.noise_variance + jitter;
        f.llt.compute(kj);
        if (f.llt.info() != Eigen::Success) continue;
        const Eigen::MatrixXd& l = f.llt.matrixLLT();
        if ((l.diagonal().array() <= 0.0).any() || !l.diagonal().allFinite()) continue;
        f.alpha = f.llt.solve(y);
        f.jitter = jitter;
        const double log_det = 2.0 * l.diagonal().array().log().sum();
        f.lml = -0.5 * y.dot(f.alpha) - 0.5 * log_det -
                0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
        f.ok = std::isfinite(f.lml);
        if (f.ok) return f;
    }
    f.ok = false;
    f.lml = kNegInf;
    return f;
}

// log-space parameter vector: [log l_1..l_d, log s2, (log noise)]
struct SearchSpace {
    std::size_t dim = 0;
    bool with_noise = true;
    double fixed_noise = 1e-6;
    std::vector<double> lo;
    std::vector<double> hi;

    GpHyperparameters decode(const std::vector<double>& p) const {
        GpHyperparameters hp;
        hp.length_scales.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) hp.length_scales[i] = std::exp(p[i]);
        hp.signal_variance = std::exp(p[dim]);
        hp.noise_variance = with_noise ? std::exp(p[dim + 1]) : fixed_noise;
        return hp;
    }
};

GpHyperparameters broadcast(const GpHyperparameters& hp, std::size_t dim) {
    GpHyperparameters out = hp;
    if (out.length_scales.empty()) out.length_scales.assign(dim, 0.3);
    if (out.length_scales.size() == 1) out.length_scales.assign(dim, out.length_scales[0]);
    if (out.length_scales.size() != dim) throw ArgumentError("length scale count does not match input dimension");
    return out;
}

GpHyperparameters maximize_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GpOptions& opt) {
    const auto dim = static_cast<std::size_t>(x.cols());
    SearchSpace space;
    space.dim = dim;
    space.with_noise = opt.optimize_noise;
    space.fixed_noise = opt.initial.noise_variance;
    for (std::size_t i = 0; i < dim; ++i) {
        space.lo.push_back(std::log(opt.length_scale_lo));
        space.hi.push_back(std::log(opt.length_scale_hi));
    }
    space.lo.push_back(std::log(opt.signal_variance_lo));
    space.hi.push_back(std::log(opt.signal_variance_hi));
    if (space.with_noise) {
        space.lo.push_back(std::log(opt.noise_variance_lo));
        space.hi.push_back(std::log(opt.noise_variance_hi));
    }

    int evals = 0;
    auto lml = [&](const std::vector<double>& p) {
        ++evals;
        return factorize(x, y, space.decode(p), opt).lml;
    };

    struct Start {
        std::vector<double> p;
        double value;
    };
    std::vector<Start> starts;
    const std::vector<double> noise_grid = space.with_noise ? std::vector<double>{1e-6, 1e-3} : std::vector<double>{0.0};
    for (double ls : {0.1, 0.3, 1.0}) {
        for (double noise : noise_grid) {
            std::vector<double> p(dim, std::log(ls));
            p.push_back(0.0);
            if (space.with_noise) p.push_back(std::log(noise));
            starts.push_back({p, lml(p)});
        }
    }
    std::stable_sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.value > b.value; });

    Start best = starts.front();
    const std::size_t refine = std::min<std::size_t>(2, starts.size());
    const int budget_per_start = opt.max_likelihood_evals / static_cast<int>(refine);
    for (std::size_t s = 0; s < refine; ++s) {
        Start cur = starts[s];
        if (!std::isfinite(cur.value)) continue;
        const int stop_at = evals + budget_per_start;
        double step = 1.0;
        while (step >= 0.05 && evals < stop_at) {
            bool improved = false;
            for (std::size_t c = 0; c < cur.p.size() && evals < stop_at; ++c) {
                for (double dir : {+1.0, -1.0}) {
                    std::vector<double> trial = cur.p;
                    trial[c] = std::clamp(trial[c] + dir * step, space.lo[c], space.hi[c]);
                    if (trial[c] == cur.p[c]) continue;
                    const double value = lml(trial);
                    if (value > cur.value + 1e-10) {
                        cur = {std::move(trial), value};
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (cur.value > best.value) best = cur;
    }
    return space.decode(best.p);
}

} // namespace

GpModel fit_gp(const std::vector<std::vector<double>>& x, const std::vector<double>& y, const GpOptions& options) {
    if (x.size() != y.size()) throw ArgumentError("fit_gp: input and target counts differ");
    if (x.empty()) throw ArgumentError("fit_gp: no training points");
    const std::size_t dim = x.front().size();
    if (dim == 0) throw ArgumentError("fit_gp: zero-dimensional inputs");

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != dim) throw ArgumentError("fit_gp: ragged input rows");
        if (!std::isfinite(y[i])) throw ArgumentError("fit_gp: non-finite target");
        const bool duplicate = std::any_of(keep.begin(), keep.end(), [&](std::size_t j) {
            for (std::size_t c = 0; c < dim; ++c) {
                if (std::abs(x[i][c] - x[j][c]) > options.dedupe_tolerance) return false;
            }
            return true;
        });
        if (!duplicate) keep.push_back(i);
    }
    if (keep.size() < 2) throw ArgumentError("fit_gp: need at least 2 distinct training points");

    GpModel model;
    const auto n = static_cast<Eigen::Index>(keep.size());
    model.x_.resize(n, static_cast<Eigen::Index>(dim));
    model.y_raw_.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto src = keep[static_cast<std::size_t>(r)];
        for (std::size_t c = 0; c < dim; ++c) model.x_(r, static_cast<Eigen::Index>(c)) = x[src][c];
        model.y_raw_(r) = y[src];
    }

    model.y_mean_ = model.y_raw_.mean();
    const double var = (model.y_raw_.array() - model.y_mean_).square().sum() / static_cast<double>(n);
    const double spread = model.y_raw_.maxCoeff() - model.y_raw_.minCoeff();
    model.hp_ = broadcast(options.initial, dim);
    if (spread <= 1e-12 * std::max(1.0, std::abs(model.y_mean_))) {
        model.degenerate_ = true;
        model.y_scale_ = 1.0;
        return model;
    }
    model.y_scale_ = std::sqrt(var);
    const Eigen::VectorXd y_std = (model.y_raw_.array() - model.y_mean_) / model.y_scale_;

    if (options.optimize_hyperparameters) model.hp_ = maximize_likelihood(model.x_, y_std, options);

    auto f = factorize(model.x_, y_std, model.hp_, options);
    if (!f.ok) {
        std::ostringstream msg;
        msg << "covariance factorization failed at jitter " << options.max_jitter << " for design set:";
        for (Eigen::Index r = 0; r < n; ++r) {
            msg << "\n ";
            for (Eigen::Index c = 0; c < model.x_.cols(); ++c) msg << ' ' << model.x_(r, c);
        }
        throw SolverError(msg.str());
    }
    model.chol_ = std::move(f.llt);
    model.alpha_ = std::move(f.alpha);
    model.lml_ = f.lml;
    model.jitter_ = f.jitter;
    return model;
}

GpPrediction GpModel::predict_standardized(std::span<const double> x) const {
    if (x.size() != dimension()) throw ArgumentError("predict: dimension mismatch");
    if (degenerate_) return {0.0, 0.0};
    const Eigen::Index n = x_.rows();
    Eigen::VectorXd k(n);
    std::vector<double> row(dimension());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = x_(i, static_cast<Eigen::Index>(c));
        k(i) = matern52(row, x, hp_);
    }
    GpPrediction out;
    out.mean = k.dot(alpha_);
    const Eigen::VectorXd v = chol_.matrixL().solve(k);
    out.variance = std::max(0.0, hp_.signal_variance - v.squaredNorm());
    return out;
}

GpPrediction GpModel::predict(std::span<const double> x) const {
    const auto s = predict_standardized(x);
    return {y_mean_ + y_scale_ * s.mean, y_scale_ * y_scale_ * s.variance};
}

} // namespace evsizer
