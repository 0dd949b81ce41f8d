#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "behave/common.hpp"
#include "behave/features.hpp"
#include "behave/kernels.hpp"

namespace behave {

struct HyperParams {
  double learning_rate = 0.1;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Class-weighted cross-entropy (weights inversely proportional to class frequency).
  bool class_weighted = true;

  void validate() const;
  kernels::AdamWParams optimizer() const;
  nlohmann::json to_json() const;
  static HyperParams from_json(const nlohmann::json& j);
  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Per-class loss weights indexed by class_index(Label).
using ClassWeights = std::array<double, kNumClasses>;

/// w_c = N / (K * N_c) with K = 2; throws when a class is absent.
ClassWeights class_weights(std::span<const Label> labels);

/// Featurized examples ready for training or prediction.
struct FeatureSet {
  std::string dataset_id;
  FeatureConfig config;
  std::vector<std::string> ids;
  std::vector<SparseVector> x;
  std::vector<Label> y;  // empty for unlabeled sets

  std::size_t size() const { return x.size(); }
  /// Subset by positions, keeping id/label alignment.
  FeatureSet subset(std::span<const std::size_t> positions, std::string dataset_id) const;
};

FeatureSet make_feature_set(std::string dataset_id, const FeatureConfig& config,
                            std::vector<std::string> ids, std::span<const std::string> texts,
                            std::vector<Label> labels = {});

struct LineageEntry {
  std::string dataset_id;
  HyperParams hyperparams;
  std::uint64_t seed = 0;
  friend bool operator==(const LineageEntry&, const LineageEntry&) = default;
};

/// Two-class linear softmax model over hashed features.
struct TrainedModel {
  FeatureConfig config;
  /// Layout: [w_nonhateful (dim), w_hateful (dim), b_nonhateful, b_hateful].
  std::vector<double> params;
  std::vector<LineageEntry> lineage;

  static TrainedModel zeros(const FeatureConfig& config);

  std::uint32_t dimension() const { return config.dimension; }
  std::span<const double> weights(Label c) const;
  double bias(Label c) const;
  bool finite() const;

  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);
  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as TrainedModel::params
};

/// Weighted cross-entropy, reported as sum(w_i * l_i) / sum(w_i), and its
/// gradient. `weights` may be all ones for the unweighted loss.
LossAndGradient loss_and_gradient(const TrainedModel& model, std::span<const SparseVector> x,
                                  std::span<const Label> y, const ClassWeights& weights);
double weighted_loss(const TrainedModel& model, std::span<const SparseVector> x,
                     std::span<const Label> y, const ClassWeights& weights);

/// Mini-batch AdamW on the (class-weighted) cross-entropy. With `init` the
/// optimisation starts from its parameters (fresh optimiser state) and the
/// lineage is extended; with zero epochs `init` is returned unchanged.
/// Deterministic for a given seed. Throws on single-class data or divergence.
TrainedModel train(const FeatureSet& data, const HyperParams& hp, std::uint64_t seed,
                   const TrainedModel* init = nullptr);

struct GridSpec {
  std::vector<double> learning_rates{0.3, 0.1, 0.03};
  std::vector<std::size_t> batch_sizes{16, 32, 64};
  std::vector<std::size_t> epochs{3, 10, 30};
  /// Shared by every grid point.
  HyperParams base;
  /// Validation loss uses the training-set class weights when true.
  bool weighted_validation = true;

  /// Enumeration order: learning rate, then batch size, then epochs (innermost).
  std::vector<HyperParams> points() const;
  nlohmann::json to_json() const;
  static GridSpec from_json(const nlohmann::json& j);
};

struct GridPoint {
  HyperParams hyperparams;
  std::optional<double> validation_loss;  // empty when training diverged
  std::string error;
};

struct GridResult {
  TrainedModel model;
  HyperParams hyperparams;
  double validation_loss = 0.0;
  std::size_t selected = 0;
  std::vector<GridPoint> points;
};

/// Index of the smallest loss; ties go to the earliest point. Throws when all
/// entries are empty.
std::size_t select_grid_point(std::span<const std::optional<double>> losses);

/// Trains one model per grid point (in parallel) and keeps the one with the
/// smallest validation loss.
GridResult grid_search(const FeatureSet& train_set, const FeatureSet& validation_set,
                       const GridSpec& grid, std::uint64_t seed,
                       const TrainedModel* init = nullptr);

enum class PredictionSource : std::uint8_t { Internal, External };

/// Probability of the hateful class keyed by case/example id.
class PredictionSet {
 public:
  explicit PredictionSet(PredictionSource source = PredictionSource::Internal)
      : source_(source) {}

  /// Throws on a duplicate id or a probability outside [0, 1].
  void add(std::string id, double p_hateful);
  std::optional<double> find(std::string_view id) const;
  double at(std::string_view id) const;

  std::size_t size() const { return entries_.size(); }
  PredictionSource source() const { return source_; }
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

  void write_jsonl(const std::filesystem::path& path) const;

 private:
  PredictionSource source_;
  std::vector<std::pair<std::string, double>> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Hard label for a hateful-class probability (ties go to hateful).
inline Label hard_label(double p_hateful) {
  return p_hateful >= 0.5 ? Label::Hateful : Label::NonHateful;
}

PredictionSet predict(const TrainedModel& model, const FeatureSet& data);
PredictionSet predict(const TrainedModel& model, std::span<const std::string> ids,
                      std::span<const std::string> texts);

/// JSON-lines records {"id": ..., "p_hateful": ...}.
PredictionSet load_external_predictions(const std::filesystem::path& path);
PredictionSet parse_external_predictions(std::string_view jsonl, std::string_view source);

}  // namespace behave
