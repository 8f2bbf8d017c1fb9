#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sonoptic/descriptors.hpp"
#include "sonoptic/fusion.hpp"
#include "sonoptic/image.hpp"

namespace sonoptic {

enum class FusionMode { Fused, SasOnly, OpticOnly, AverageMerge };

FusionMode parse_fusion_mode(const std::string& name);
const char* fusion_mode_name(FusionMode mode);

/// Pipeline knobs shared by feature extraction and classification.
struct PipelineConfig {
    double height_scale_m = 1.0;  // height assigned to the brightest optical pixel
    MorletParams morlet;
    double ridge = 1e-3;
    TransferFunction transfer_sas = TransferFunction::sas_default();
    TransferFunction transfer_opt = TransferFunction::optic_default();
};

/// Per-pair descriptor bundle: SAS features from the SAS segmentation maps,
/// optical features from the synthetic optic-to-SAS maps, plus both quality
/// indices.
struct PairFeatures {
    FeatureVector sas;
    FeatureVector opt;
    bool sas_shadow_missing = false;
    bool opt_shadow_missing = false;
    double psi_sas = 0.0;
    double psi_opt = 0.0;
    std::optional<Label> truth;
};

PairFeatures extract_pair_features(const ImagePair& pair, const PipelineConfig& config);

struct RocPoint {
    double fpr;
    double tpr;
};

struct EvalReport {
    Eigen::Matrix4d confusion = Eigen::Matrix4d::Zero();  // rows = truth M,C,N,U
    std::array<std::vector<RocPoint>, kLabelCount> roc;
    double mean_diag = 0.0;
    int trials = 0;
    double split = 0.0;
    FusionMode mode = FusionMode::Fused;
    std::uint64_t seed = 0;
    PipelineConfig pipeline;  // echoed into the JSON report
    int sensitivity_draws = 0;
    std::optional<double> quality_sensitivity_p90;
};

struct EvalConfig {
    int trials = 50;
    double split = 0.7;
    FusionMode mode = FusionMode::Fused;
    std::uint64_t seed = 0;
    PipelineConfig pipeline;
    int sensitivity_draws = 0;  // 0 disables the transfer-weight sensitivity sweep
};

/// Monte-Carlo protocol: per trial, a class-stratified uniform random
/// split, fit on the train fold, classify the test fold; counts accumulate
/// across trials and the confusion matrix is row-normalized at the end.
EvalReport run_monte_carlo(const std::vector<ImagePair>& pairs, const EvalConfig& config);

/// Same protocol over pre-extracted features (the transform and descriptor
/// stages are deterministic per pair, so they run once).
EvalReport run_monte_carlo_features(const std::vector<PairFeatures>& features,
                                    const EvalConfig& config);

/// Unweighted mean over the four per-class results.
double one_vs_rest_average(const std::array<double, kLabelCount>& per_class);

std::string report_to_json(const EvalReport& report);
void write_report(const EvalReport& report, const std::string& path);

/// Fixed-format float for CSV output (17 significant digits).
std::string format_double(double value);

}  // namespace sonoptic
