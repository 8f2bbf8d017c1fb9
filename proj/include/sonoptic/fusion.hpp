#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sonoptic/descriptors.hpp"
#include "sonoptic/image.hpp"

namespace sonoptic {

/// Raw background/echo separation score and its post-transfer fusion weight.
struct QualityScore {
    double psi;
    double weight;
};

/// Three-level non-decreasing step function from quality index to fusion
/// weight, with half-open intervals: w_low on [0, t_low), w_mid on
/// [t_low, t_high), w_high on [t_high, inf).
struct TransferFunction {
    double t_low = 0.3;
    double t_high = 3.0;
    double w_low = 0.0;
    double w_mid = 0.0;
    double w_high = 0.0;

    void validate() const;

    static TransferFunction sas_default();    // weights (0.4, 0.6, 0.65)
    static TransferFunction optic_default();  // weights (0.1, 0.25, 0.3)
};

/// Per-class per-modality sample statistics (population covariances,
/// ridge-regularized at fit time).
struct ClassStats {
    Label label = Label::M;
    Eigen::VectorXd mean_sas;
    Eigen::VectorXd mean_opt;
    Eigen::MatrixXd cov_sas;
    Eigen::MatrixXd cov_opt;
    std::int64_t count_sas = 0;
    std::int64_t count_opt = 0;
};

struct QdaModel {
    std::array<ClassStats, kLabelCount> classes;  // indexed by Label
    double ridge = 1e-3;
    TransferFunction transfer_sas = TransferFunction::sas_default();
    TransferFunction transfer_opt = TransferFunction::optic_default();

    int dimension() const { return static_cast<int>(classes[0].mean_sas.size()); }
};

struct TrainingSample {
    Eigen::VectorXd sas;
    Eigen::VectorXd opt;
    Label label;
};

struct Classification {
    Label label;
    std::array<double, kLabelCount> log_densities;
    double w_sas;
    double w_opt;
};

/// Fisher-style separation (mean_bg - mean_echo)^2 / (var_bg + var_echo)
/// between the background and highlight intensities, population variances.
double quality_index(const RoiImage& roi, const SegmentationMap& seg);

double apply_transfer(double psi, const TransferFunction& tf);

/// Convex combination with normalized weights. Angular components
/// (theta_max, theta_min, HSO) combine by weighted circular mean on the
/// doubled-angle circle; everything else linearly.
Eigen::VectorXd merge_features(const FeatureVector& t_sas, const FeatureVector& t_opt,
                               double w_sas, double w_opt);

/// Trains per-class per-modality means and covariances. Each covariance is
/// regularized as Sigma + ridge * (trace(Sigma)/L) * I.
QdaModel fit(const std::vector<TrainingSample>& dataset, double ridge = 1e-3,
             const TransferFunction& transfer_sas = TransferFunction::sas_default(),
             const TransferFunction& transfer_opt = TransferFunction::optic_default());

/// Log Gaussian density of class `label` at the merged point t, with class
/// statistics merged as mean = a*mean_s + b*mean_o and
/// cov = a^2*cov_s + b^2*cov_o for normalized weights (a, b). Evaluated
/// through a symmetric factorization, never an explicit inverse.
double log_density(const QdaModel& model, Label label, const Eigen::VectorXd& t,
                   double w_sas, double w_opt);

/// Argmax of the four class log-densities at an already-merged feature
/// point; ties break in label order M < C < N < U.
Classification classify_merged(const QdaModel& model, const Eigen::VectorXd& t,
                               double w_sas, double w_opt);

Classification classify_with_weights(const QdaModel& model, const FeatureVector& t_sas,
                                     const FeatureVector& t_opt, double w_sas, double w_opt);

/// Full decision: transfer functions map the quality indices to weights,
/// features merge, the maximum-likelihood label wins.
Classification classify(const QdaModel& model, const FeatureVector& t_sas,
                        const FeatureVector& t_opt, double psi_sas, double psi_opt);

// Model persistence: single JSON document, format-versioned; all reals
// round-trip bit-exactly.
void save_model(const QdaModel& model, const std::string& path);
QdaModel load_model(const std::string& path);

}  // namespace sonoptic
