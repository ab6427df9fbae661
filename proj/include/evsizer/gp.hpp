#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <span>
#include <vector>

namespace evsizer {

/// Matern-5/2 kernel with one length scale per input dimension.
struct GpHyperparameters {
    std::vector<double> length_scales;
    double signal_variance = 1.0;
    double noise_variance = 1e-6;
};

struct GpOptions {
    bool optimize_hyperparameters = true;
    bool optimize_noise = true;
    GpHyperparameters initial; // used as-is when optimization is off; length scales broadcast if size 1
    double length_scale_lo = 0.02;
    double length_scale_hi = 20.0;
    double signal_variance_lo = 0.05;
    double signal_variance_hi = 20.0;
    double noise_variance_lo = 1e-8;
    double noise_variance_hi = 1e-1;
    double jitter = 1e-8;
    double max_jitter = 1e-2;
    double dedupe_tolerance = 1e-9;
    int max_likelihood_evals = 400;
};

struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0;
    double stddev() const;
};

double matern52(std::span<const double> a, std::span<const double> b, const GpHyperparameters& hp);

/// Gaussian-process posterior over inputs in the unit box.
///
/// Outputs are standardized internally; `predict` answers in the caller's units,
/// `predict_standardized` in the standardized ones. When every target is equal the
/// model is degenerate: constant mean and zero variance.
class GpModel {
public:
    const Eigen::MatrixXd& inputs() const noexcept { return x_; }
    const Eigen::VectorXd& targets() const noexcept { return y_raw_; }
    const GpHyperparameters& hyperparameters() const noexcept { return hp_; }
    double log_marginal_likelihood() const noexcept { return lml_; }
    double jitter() const noexcept { return jitter_; }
    bool degenerate() const noexcept { return degenerate_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(x_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(x_.cols()); }
    double y_mean() const noexcept { return y_mean_; }
    double y_scale() const noexcept { return y_scale_; }

    GpPrediction predict(std::span<const double> x) const;
    GpPrediction predict_standardized(std::span<const double> x) const;

private:
    friend GpModel fit_gp(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                          const GpOptions& options);

    Eigen::MatrixXd x_;
    Eigen::VectorXd y_raw_;
    Eigen::VectorXd alpha_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    GpHyperparameters hp_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    double lml_ = 0.0;
    double jitter_ = 0.0;
    bool degenerate_ = false;
};

/// Fits the posterior, maximizing the log marginal likelihood over the
/// hyperparameters. Near-duplicate rows are dropped first (first occurrence kept).
/// Throws ArgumentError for fewer than 2 distinct points and SolverError when the
/// covariance cannot be factorized even at the maximum jitter.
GpModel fit_gp(const std::vector<std::vector<double>>& x, const std::vector<double>& y, const GpOptions& options = {});

} // namespace evsizer
