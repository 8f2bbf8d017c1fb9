#include "sonoptic/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <vector>

#include <nlohmann/json.hpp>

#include "sonoptic/optic2sas.hpp"
#include "sonoptic/rng.hpp"

namespace sonoptic {

FusionMode parse_fusion_mode(const std::string& name) {
    if (name == "fused") return FusionMode::Fused;
    if (name == "sas-only") return FusionMode::SasOnly;
    if (name == "optic-only") return FusionMode::OpticOnly;
    if (name == "average-merge") return FusionMode::AverageMerge;
    throw InvalidArgument("unknown fusion mode '" + name +
                          "'; expected fused, sas-only, optic-only, or average-merge");
}

const char* fusion_mode_name(FusionMode mode) {
    switch (mode) {
        case FusionMode::Fused: return "fused";
        case FusionMode::SasOnly: return "sas-only";
        case FusionMode::OpticOnly: return "optic-only";
        case FusionMode::AverageMerge: return "average-merge";
    }
    return "?";
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

PairFeatures extract_pair_features(const ImagePair& pair, const PipelineConfig& config) {
    PairFeatures out;
    const ExtractedFeatures sas =
        extract_features(pair.sas_seg.highlight_mask(), pair.sas_seg.shadow_mask(), config.morlet);
    out.sas = sas.features;
    out.sas_shadow_missing = sas.shadow_missing;
    out.psi_sas = quality_index(pair.sas_roi, pair.sas_seg);

    const SyntheticSasMaps maps = transform_pair(pair, config.height_scale_m);
    const ExtractedFeatures opt = extract_features(maps.highlight, maps.shadow, config.morlet);
    out.opt = opt.features;
    out.opt_shadow_missing = opt.shadow_missing;
    out.psi_opt = quality_index(pair.opt_roi, pair.opt_seg);

    out.truth = pair.ground_truth;
    return out;
}

double one_vs_rest_average(const std::array<double, kLabelCount>& per_class) {
    return std::accumulate(per_class.begin(), per_class.end(), 0.0) /
           static_cast<double>(kLabelCount);
}

namespace {

struct ScoredSample {
    double score;
    bool positive;
};

std::vector<RocPoint> roc_from_scores(std::vector<ScoredSample> samples) {
    std::int64_t positives = 0;
    for (const auto& s : samples) positives += s.positive ? 1 : 0;
    const std::int64_t negatives = static_cast<std::int64_t>(samples.size()) - positives;
    if (positives == 0 || negatives == 0) {
        return {{0.0, 0.0}, {1.0, 1.0}};
    }
    std::sort(samples.begin(), samples.end(),
              [](const ScoredSample& a, const ScoredSample& b) { return a.score > b.score; });
    std::vector<RocPoint> roc{{0.0, 0.0}};
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        while (j < samples.size() && samples[j].score == samples[i].score) {
            tp += samples[j].positive ? 1 : 0;
            fp += samples[j].positive ? 0 : 1;
            ++j;
        }
        roc.push_back({static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives});
        i = j;
    }
    if (roc.back().fpr != 1.0 || roc.back().tpr != 1.0) roc.push_back({1.0, 1.0});
    return roc;
}

std::pair<double, double> mode_weights(FusionMode mode, const QdaModel& model,
                                       const PairFeatures& f) {
    switch (mode) {
        case FusionMode::Fused:
            return {apply_transfer(f.psi_sas, model.transfer_sas),
                    apply_transfer(f.psi_opt, model.transfer_opt)};
        case FusionMode::SasOnly: return {1.0, 0.0};
        case FusionMode::OpticOnly: return {0.0, 1.0};
        case FusionMode::AverageMerge: return {0.5, 0.5};
    }
    return {0.5, 0.5};
}

constexpr int kSplitResampleCap = 100;

// Class-stratified uniform split; returns train membership flags.
std::vector<bool> stratified_split(const std::vector<PairFeatures>& features, double split,
                                   Rng& rng) {
    for (int attempt = 0; attempt < kSplitResampleCap; ++attempt) {
        std::vector<bool> in_train(features.size(), false);
        for (int c = 0; c < kLabelCount; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < features.size(); ++i) {
                if (static_cast<int>(*features[i].truth) == c) members.push_back(i);
            }
            if (members.empty()) continue;  // caught earlier as MissingClass
            rng.shuffle(members);
            const auto n = static_cast<std::int64_t>(members.size());
            std::int64_t n_train = std::llround(split * static_cast<double>(n));
            n_train = std::clamp<std::int64_t>(n_train, 1, std::max<std::int64_t>(n - 1, 1));
            for (std::int64_t k = 0; k < n_train; ++k) in_train[members[static_cast<std::size_t>(k)]] = true;
        }
        bool ok = true;
        for (int c = 0; c < kLabelCount && ok; ++c) {
            bool found = false;
            for (std::size_t i = 0; i < features.size(); ++i) {
                if (in_train[i] && static_cast<int>(*features[i].truth) == c) {
                    found = true;
                    break;
                }
            }
            ok = found;
        }
        if (ok) return in_train;
    }
    throw DegenerateSplit("a class stayed out of the training fold after " +
                          std::to_string(kSplitResampleCap) + " resamples");
}

EvalReport run_trials(const std::vector<PairFeatures>& features, const EvalConfig& config) {
    if (config.trials < 1) throw InvalidArgument("trials must be at least 1");
    if (!(config.split > 0.0 && config.split < 1.0)) {
        throw InvalidArgument("split fraction must lie in (0, 1)");
    }
    std::array<std::int64_t, kLabelCount> class_counts{};
    for (const PairFeatures& f : features) {
        if (!f.truth) throw UnknownLabel("evaluation requires ground-truth labels on every pair");
        ++class_counts[static_cast<std::size_t>(*f.truth)];
    }
    for (int c = 0; c < kLabelCount; ++c) {
        if (class_counts[static_cast<std::size_t>(c)] == 0) {
            throw MissingClass(std::string("no pairs labeled ") + label_name(static_cast<Label>(c)));
        }
    }

    Eigen::Matrix4d counts = Eigen::Matrix4d::Zero();
    std::array<std::vector<ScoredSample>, kLabelCount> scores;

    for (int trial = 0; trial < config.trials; ++trial) {
        Rng rng(config.seed + static_cast<std::uint64_t>(trial));
        const std::vector<bool> in_train = stratified_split(features, config.split, rng);

        std::vector<TrainingSample> train;
        for (std::size_t i = 0; i < features.size(); ++i) {
            if (!in_train[i]) continue;
            train.push_back(TrainingSample{features[i].sas.to_vector(),
                                           features[i].opt.to_vector(), *features[i].truth});
        }
        const QdaModel model = fit(train, config.pipeline.ridge, config.pipeline.transfer_sas,
                                   config.pipeline.transfer_opt);

        for (std::size_t i = 0; i < features.size(); ++i) {
            if (in_train[i]) continue;
            const PairFeatures& f = features[i];
            const auto [w_sas, w_opt] = mode_weights(config.mode, model, f);
            const Classification result =
                classify_with_weights(model, f.sas, f.opt, w_sas, w_opt);
            counts(static_cast<int>(*f.truth), static_cast<int>(result.label)) += 1.0;
            for (int c = 0; c < kLabelCount; ++c) {
                double rival = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < kLabelCount; ++j) {
                    if (j != c) rival = std::max(rival, result.log_densities[static_cast<std::size_t>(j)]);
                }
                scores[static_cast<std::size_t>(c)].push_back(
                    {result.log_densities[static_cast<std::size_t>(c)] - rival,
                     static_cast<int>(*f.truth) == c});
            }
        }
    }

    EvalReport report;
    report.trials = config.trials;
    report.split = config.split;
    report.mode = config.mode;
    std::array<double, kLabelCount> diag{};
    for (int r = 0; r < kLabelCount; ++r) {
        const double row_sum = counts.row(r).sum();
        if (row_sum <= 0.0) {
            throw DegenerateSplit(std::string("class ") + label_name(static_cast<Label>(r)) +
                                  " never reached a test fold");
        }
        report.confusion.row(r) = counts.row(r) / row_sum;
        diag[static_cast<std::size_t>(r)] = report.confusion(r, r);
    }
    report.mean_diag = one_vs_rest_average(diag);
    for (int c = 0; c < kLabelCount; ++c) {
        report.roc[static_cast<std::size_t>(c)] = roc_from_scores(scores[static_cast<std::size_t>(c)]);
    }
    return report;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

TransferFunction perturb_transfer(const TransferFunction& tf, Rng& rng) {
    // Weights jittered with std 0.1 of their values; thresholds untouched.
    std::array<double, 3> w{
        clamp01(tf.w_low * (1.0 + rng.gaussian(0.0, 0.1))),
        clamp01(tf.w_mid * (1.0 + rng.gaussian(0.0, 0.1))),
        clamp01(tf.w_high * (1.0 + rng.gaussian(0.0, 0.1))),
    };
    std::sort(w.begin(), w.end());  // keep the step function non-decreasing
    TransferFunction out = tf;
    out.w_low = w[0];
    out.w_mid = w[1];
    out.w_high = w[2];
    return out;
}

}  // namespace

EvalReport run_monte_carlo_features(const std::vector<PairFeatures>& features,
                                    const EvalConfig& config) {
    EvalReport report = run_trials(features, config);
    report.sensitivity_draws = config.sensitivity_draws;
    if (config.sensitivity_draws > 0) {
        std::vector<double> deltas;
        for (int draw = 1; draw <= config.sensitivity_draws; ++draw) {
            Rng rng(config.seed ^ (0x51735ea5c1b5b1a5ull + static_cast<std::uint64_t>(draw)));
            EvalConfig perturbed = config;
            perturbed.sensitivity_draws = 0;
            perturbed.pipeline.transfer_sas = perturb_transfer(config.pipeline.transfer_sas, rng);
            perturbed.pipeline.transfer_opt = perturb_transfer(config.pipeline.transfer_opt, rng);
            const EvalReport sample = run_trials(features, perturbed);
            deltas.push_back(std::abs(sample.mean_diag - report.mean_diag));
        }
        std::sort(deltas.begin(), deltas.end());
        const auto idx = static_cast<std::size_t>(
            std::ceil(0.9 * static_cast<double>(deltas.size()))) - 1;
        report.quality_sensitivity_p90 = deltas[std::min(idx, deltas.size() - 1)];
    }
    return report;
}

EvalReport run_monte_carlo(const std::vector<ImagePair>& pairs, const EvalConfig& config) {
    std::vector<PairFeatures> features;
    features.reserve(pairs.size());
    for (const ImagePair& pair : pairs) {
        features.push_back(extract_pair_features(pair, config.pipeline));
    }
    return run_monte_carlo_features(features, config);
}

namespace {

using nlohmann::json;

json transfer_json(const TransferFunction& tf) {
    return json{{"t_low", tf.t_low},
                {"t_high", tf.t_high},
                {"w_low", tf.w_low},
                {"w_mid", tf.w_mid},
                {"w_high", tf.w_high}};
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    json doc;
    json confusion = json::array();
    for (int r = 0; r < kLabelCount; ++r) {
        json row = json::array();
        for (int c = 0; c < kLabelCount; ++c) row.push_back(report.confusion(r, c));
        confusion.push_back(std::move(row));
    }
    doc["confusion"] = std::move(confusion);
    json roc;
    for (int c = 0; c < kLabelCount; ++c) {
        json curve = json::array();
        for (const RocPoint& p : report.roc[static_cast<std::size_t>(c)]) {
            curve.push_back(json::array({p.fpr, p.tpr}));
        }
        roc[label_name(static_cast<Label>(c))] = std::move(curve);
    }
    doc["roc"] = std::move(roc);
    doc["mean_diag"] = report.mean_diag;
    doc["trials"] = report.trials;
    doc["split"] = report.split;
    doc["mode"] = fusion_mode_name(report.mode);
    doc["sensitivity_draws"] = report.sensitivity_draws;
    if (report.quality_sensitivity_p90) {
        doc["quality_sensitivity_p90"] = *report.quality_sensitivity_p90;
    } else {
        doc["quality_sensitivity_p90"] = nullptr;
    }
    return doc.dump(2);
}

void write_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw MissingFile("cannot open for writing: " + path);
    out << report_to_json(report) << "\n";
    if (!out) throw MissingFile("write failed: " + path);
}

}  // namespace sonoptic
