#include "sonoptic/fusion.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

namespace sonoptic {

namespace {

constexpr double kPsiCap = 1e6;

// Indices of the axial (180-degree periodic) feature components.
constexpr int kAngularIndices[] = {0, 1, 4};  // theta_max, theta_min, hso

bool is_angular(int index) {
    return index == kAngularIndices[0] || index == kAngularIndices[1] ||
           index == kAngularIndices[2];
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

// Weighted mean of axial angles on the doubled-angle circle.
double axial_circular_mean_deg(double a_deg, double b_deg, double wa, double wb) {
    const double sa = std::sin(2.0 * deg2rad(a_deg)), ca = std::cos(2.0 * deg2rad(a_deg));
    const double sb = std::sin(2.0 * deg2rad(b_deg)), cb = std::cos(2.0 * deg2rad(b_deg));
    const double s = wa * sa + wb * sb;
    const double c = wa * ca + wb * cb;
    if (std::hypot(s, c) < 1e-12) {
        // Antipodal on the doubled circle: the circular mean is undefined,
        // fall back to the plain weighted mean.
        return wa * a_deg + wb * b_deg;
    }
    double mean = 0.5 * rad2deg(std::atan2(s, c));
    if (mean < 0.0) mean += 180.0;
    return mean == 180.0 ? 0.0 : mean;
}

void region_moments(const RoiImage& roi, const SegmentationMap& seg, RegionLabel label,
                    double& mean, double& var, std::int64_t& n) {
    double sum = 0.0, sum_sq = 0.0;
    n = 0;
    for (int y = 0; y < seg.height(); ++y) {
        for (int x = 0; x < seg.width(); ++x) {
            if (seg.at(x, y) != label) continue;
            const double v = roi.at(x, y);
            sum += v;
            sum_sq += v * v;
            ++n;
        }
    }
    if (n > 0) {
        mean = sum / n;
        var = std::max(sum_sq / n - mean * mean, 0.0);
    } else {
        mean = 0.0;
        var = 0.0;
    }
}

}  // namespace

void TransferFunction::validate() const {
    if (!(t_low < t_high)) throw InvalidArgument("transfer thresholds must satisfy t_low < t_high");
    const auto in_unit = [](double w) { return w >= 0.0 && w <= 1.0; };
    if (!in_unit(w_low) || !in_unit(w_mid) || !in_unit(w_high)) {
        throw InvalidArgument("transfer weights must lie in [0,1]");
    }
    if (!(w_low <= w_mid && w_mid <= w_high)) {
        throw InvalidArgument("transfer weights must be non-decreasing");
    }
}

TransferFunction TransferFunction::sas_default() {
    return TransferFunction{0.3, 3.0, 0.4, 0.6, 0.65};
}

TransferFunction TransferFunction::optic_default() {
    return TransferFunction{0.3, 3.0, 0.1, 0.25, 0.3};
}

double quality_index(const RoiImage& roi, const SegmentationMap& seg) {
    if (seg.width() != roi.width() || seg.height() != roi.height()) {
        throw DimensionMismatch("segmentation does not match ROI dimensions");
    }
    double mean_bg = 0.0, var_bg = 0.0, mean_echo = 0.0, var_echo = 0.0;
    std::int64_t n_bg = 0, n_echo = 0;
    region_moments(roi, seg, RegionLabel::Background, mean_bg, var_bg, n_bg);
    region_moments(roi, seg, RegionLabel::Highlight, mean_echo, var_echo, n_echo);
    if (n_bg < 2 || n_echo < 2) {
        throw RegionTooSmall("quality index needs at least 2 background and 2 highlight pixels");
    }
    const double gap = mean_bg - mean_echo;
    const double denom = var_bg + var_echo;
    if (denom <= 0.0) {
        return gap == 0.0 ? 0.0 : kPsiCap;
    }
    return gap * gap / denom;
}

double apply_transfer(double psi, const TransferFunction& tf) {
    tf.validate();
    if (psi < tf.t_low) return tf.w_low;
    if (psi < tf.t_high) return tf.w_mid;
    return tf.w_high;
}

Eigen::VectorXd merge_features(const FeatureVector& t_sas, const FeatureVector& t_opt,
                               double w_sas, double w_opt) {
    if (w_sas < 0.0 || w_opt < 0.0 || w_sas + w_opt <= 0.0) {
        throw ZeroWeights("merge weights must be non-negative with a positive sum");
    }
    const double a = w_sas / (w_sas + w_opt);
    const double b = w_opt / (w_sas + w_opt);
    const Eigen::Matrix<double, kFeatureLength, 1> vs = t_sas.to_vector();
    const Eigen::Matrix<double, kFeatureLength, 1> vo = t_opt.to_vector();
    Eigen::VectorXd merged(kFeatureLength);
    for (int i = 0; i < kFeatureLength; ++i) {
        merged(i) = is_angular(i) ? axial_circular_mean_deg(vs(i), vo(i), a, b)
                                  : a * vs(i) + b * vo(i);
    }
    return merged;
}

QdaModel fit(const std::vector<TrainingSample>& dataset, double ridge,
             const TransferFunction& transfer_sas, const TransferFunction& transfer_opt) {
    transfer_sas.validate();
    transfer_opt.validate();
    if (dataset.empty()) throw MissingClass("training set is empty");
    const Eigen::Index dim = dataset.front().sas.size();

    QdaModel model;
    model.ridge = ridge;
    model.transfer_sas = transfer_sas;
    model.transfer_opt = transfer_opt;

    for (int c = 0; c < kLabelCount; ++c) {
        std::vector<const TrainingSample*> members;
        for (const TrainingSample& s : dataset) {
            if (static_cast<int>(s.label) == c) members.push_back(&s);
        }
        if (members.empty()) {
            throw MissingClass(std::string("no training samples for class ") +
                               label_name(static_cast<Label>(c)));
        }
        const double n = static_cast<double>(members.size());

        ClassStats stats;
        stats.label = static_cast<Label>(c);
        stats.count_sas = stats.count_opt = static_cast<std::int64_t>(members.size());
        stats.mean_sas = Eigen::VectorXd::Zero(dim);
        stats.mean_opt = Eigen::VectorXd::Zero(dim);
        for (const TrainingSample* s : members) {
            if (s->sas.size() != dim || s->opt.size() != dim) {
                throw DimensionMismatch("training sample dimensions differ");
            }
            stats.mean_sas += s->sas;
            stats.mean_opt += s->opt;
        }
        stats.mean_sas /= n;
        stats.mean_opt /= n;

        stats.cov_sas = Eigen::MatrixXd::Zero(dim, dim);
        stats.cov_opt = Eigen::MatrixXd::Zero(dim, dim);
        for (const TrainingSample* s : members) {
            const Eigen::VectorXd ds = s->sas - stats.mean_sas;
            const Eigen::VectorXd dos = s->opt - stats.mean_opt;
            stats.cov_sas += ds * ds.transpose();
            stats.cov_opt += dos * dos.transpose();
        }
        stats.cov_sas /= n;  // population covariance
        stats.cov_opt /= n;

        // Ridge scaled by the mean eigenvalue keeps small classes invertible.
        const double dimd = static_cast<double>(dim);
        stats.cov_sas += ridge * (stats.cov_sas.trace() / dimd) *
                         Eigen::MatrixXd::Identity(dim, dim);
        stats.cov_opt += ridge * (stats.cov_opt.trace() / dimd) *
                         Eigen::MatrixXd::Identity(dim, dim);

        model.classes[static_cast<std::size_t>(c)] = std::move(stats);
    }
    return model;
}

double log_density(const QdaModel& model, Label label, const Eigen::VectorXd& t,
                   double w_sas, double w_opt) {
    if (w_sas < 0.0 || w_opt < 0.0 || w_sas + w_opt <= 0.0) {
        throw ZeroWeights("density weights must be non-negative with a positive sum");
    }
    const double a = w_sas / (w_sas + w_opt);
    const double b = w_opt / (w_sas + w_opt);
    const ClassStats& stats = model.classes[static_cast<std::size_t>(label)];
    const Eigen::VectorXd mean = a * stats.mean_sas + b * stats.mean_opt;
    const Eigen::MatrixXd cov = a * a * stats.cov_sas + b * b * stats.cov_opt;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
        throw SingularCovariance(std::string("merged covariance for class ") +
                                 label_name(label) + " is not positive definite");
    }
    const double log_det = ldlt.vectorD().array().log().sum();
    const Eigen::VectorXd centered = t - mean;
    const double quad = centered.dot(ldlt.solve(centered));
    const double dim = static_cast<double>(t.size());
    return -0.5 * dim * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * quad;
}

Classification classify_merged(const QdaModel& model, const Eigen::VectorXd& t,
                               double w_sas, double w_opt) {
    Classification result;
    result.w_sas = w_sas;
    result.w_opt = w_opt;
    for (int c = 0; c < kLabelCount; ++c) {
        result.log_densities[static_cast<std::size_t>(c)] =
            log_density(model, static_cast<Label>(c), t, w_sas, w_opt);
    }
    int best = 0;
    for (int c = 1; c < kLabelCount; ++c) {
        if (result.log_densities[static_cast<std::size_t>(c)] >
            result.log_densities[static_cast<std::size_t>(best)]) {
            best = c;  // strict: ties keep the earlier label (M < C < N < U)
        }
    }
    result.label = static_cast<Label>(best);
    return result;
}

Classification classify_with_weights(const QdaModel& model, const FeatureVector& t_sas,
                                     const FeatureVector& t_opt, double w_sas, double w_opt) {
    return classify_merged(model, merge_features(t_sas, t_opt, w_sas, w_opt), w_sas, w_opt);
}

Classification classify(const QdaModel& model, const FeatureVector& t_sas,
                        const FeatureVector& t_opt, double psi_sas, double psi_opt) {
    const double w_sas = apply_transfer(psi_sas, model.transfer_sas);
    const double w_opt = apply_transfer(psi_opt, model.transfer_opt);
    return classify_with_weights(model, t_sas, t_opt, w_sas, w_opt);
}

namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json arr = json::array();  // row-major
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
    }
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i];
    return v;
}

Eigen::MatrixXd matrix_from_json(const json& arr, Eigen::Index dim) {
    if (arr.size() != static_cast<std::size_t>(dim * dim)) {
        throw MalformedFile("covariance entry count does not match dimension");
    }
    Eigen::MatrixXd m(dim, dim);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = arr[i++];
    }
    return m;
}

json transfer_to_json(const TransferFunction& tf) {
    return json{{"t_low", tf.t_low},
                {"t_high", tf.t_high},
                {"w_low", tf.w_low},
                {"w_mid", tf.w_mid},
                {"w_high", tf.w_high}};
}

TransferFunction transfer_from_json(const json& j) {
    TransferFunction tf;
    tf.t_low = j.at("t_low");
    tf.t_high = j.at("t_high");
    tf.w_low = j.at("w_low");
    tf.w_mid = j.at("w_mid");
    tf.w_high = j.at("w_high");
    tf.validate();
    return tf;
}

}  // namespace

void save_model(const QdaModel& model, const std::string& path) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["dimension"] = model.dimension();
    doc["ridge"] = model.ridge;
    doc["transfer_sas"] = transfer_to_json(model.transfer_sas);
    doc["transfer_opt"] = transfer_to_json(model.transfer_opt);
    json classes;
    for (const ClassStats& stats : model.classes) {
        classes[label_name(stats.label)] = json{
            {"count_sas", stats.count_sas},
            {"count_opt", stats.count_opt},
            {"mean_sas", vector_to_json(stats.mean_sas)},
            {"mean_opt", vector_to_json(stats.mean_opt)},
            {"cov_sas", matrix_to_json(stats.cov_sas)},
            {"cov_opt", matrix_to_json(stats.cov_opt)},
        };
    }
    doc["classes"] = std::move(classes);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw MissingFile("cannot open for writing: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw MissingFile("write failed: " + path);
}

QdaModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw MalformedFile(path + ": " + e.what());
    }
    if (doc.value("format_version", -1) != kModelFormatVersion) {
        throw MalformedFile(path + ": unsupported model format version");
    }
    QdaModel model;
    model.ridge = doc.at("ridge");
    model.transfer_sas = transfer_from_json(doc.at("transfer_sas"));
    model.transfer_opt = transfer_from_json(doc.at("transfer_opt"));
    const Eigen::Index dim = doc.at("dimension").get<Eigen::Index>();
    for (int c = 0; c < kLabelCount; ++c) {
        const char* name = label_name(static_cast<Label>(c));
        if (!doc.at("classes").contains(name)) {
            throw MissingClass(std::string("model file lacks class ") + name);
        }
        const json& entry = doc.at("classes").at(name);
        ClassStats stats;
        stats.label = static_cast<Label>(c);
        stats.count_sas = entry.at("count_sas");
        stats.count_opt = entry.at("count_opt");
        stats.mean_sas = vector_from_json(entry.at("mean_sas"));
        stats.mean_opt = vector_from_json(entry.at("mean_opt"));
        if (stats.mean_sas.size() != dim || stats.mean_opt.size() != dim) {
            throw MalformedFile(path + ": mean dimension mismatch");
        }
        stats.cov_sas = matrix_from_json(entry.at("cov_sas"), dim);
        stats.cov_opt = matrix_from_json(entry.at("cov_opt"), dim);
        model.classes[static_cast<std::size_t>(c)] = std::move(stats);
    }
    return model;
}

}  // namespace sonoptic
