#include "behave/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "behave/rng.hpp"

namespace behave {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Hyperparameters

void HyperParams::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be non-negative");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw ConfigError("optimizer betas must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

kernels::AdamWParams HyperParams::optimizer() const {
  return {learning_rate, beta1, beta2, epsilon, weight_decay};
}

json HyperParams::to_json() const {
  return {{"learning_rate", learning_rate}, {"batch_size", batch_size},
          {"epochs", epochs},               {"weight_decay", weight_decay},
          {"beta1", beta1},                 {"beta2", beta2},
          {"epsilon", epsilon},             {"class_weighted", class_weighted}};
}

HyperParams HyperParams::from_json(const json& j) {
  HyperParams h;
  try {
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.batch_size = j.value("batch_size", h.batch_size);
    h.epochs = j.value("epochs", h.epochs);
    h.weight_decay = j.value("weight_decay", h.weight_decay);
    h.beta1 = j.value("beta1", h.beta1);
    h.beta2 = j.value("beta2", h.beta2);
    h.epsilon = j.value("epsilon", h.epsilon);
    h.class_weighted = j.value("class_weighted", h.class_weighted);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("hyperparameters: ") + e.what());
  }
  h.validate();
  return h;
}

ClassWeights class_weights(std::span<const Label> labels) {
  std::array<std::size_t, kNumClasses> counts{};
  for (Label l : labels) ++counts[class_index(l)];
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0) {
      throw Error("class weights: no examples of class '" +
                  std::string(to_string(static_cast<Label>(c))) + "'");
    }
  }
  const auto n = static_cast<double>(labels.size());
  ClassWeights w{};
  for (int c = 0; c < kNumClasses; ++c) {
    w[c] = n / (kNumClasses * static_cast<double>(counts[c]));
  }
  return w;
}

// ---------------------------------------------------------------------------
// Feature sets

FeatureSet FeatureSet::subset(std::span<const std::size_t> positions, std::string id) const {
  FeatureSet s;
  s.dataset_id = std::move(id);
  s.config = config;
  s.ids.reserve(positions.size());
  s.x.reserve(positions.size());
  for (auto p : positions) {
    s.ids.push_back(ids.at(p));
    s.x.push_back(x.at(p));
    if (!y.empty()) s.y.push_back(y.at(p));
  }
  return s;
}

FeatureSet make_feature_set(std::string dataset_id, const FeatureConfig& config,
                            std::vector<std::string> ids, std::span<const std::string> texts,
                            std::vector<Label> labels) {
  config.validate();
  if (ids.size() != texts.size() || (!labels.empty() && labels.size() != texts.size())) {
    throw Error("feature set: ids, texts and labels must align");
  }
  FeatureSet s;
  s.dataset_id = std::move(dataset_id);
  s.config = config;
  s.ids = std::move(ids);
  s.x = kernels::featurize_parallel(texts, config);
  s.y = std::move(labels);
  return s;
}

// ---------------------------------------------------------------------------
// Model

TrainedModel TrainedModel::zeros(const FeatureConfig& config) {
  config.validate();
  TrainedModel m;
  m.config = config;
  m.params.assign(2 * static_cast<std::size_t>(config.dimension) + kNumClasses, 0.0);
  return m;
}

std::span<const double> TrainedModel::weights(Label c) const {
  return std::span<const double>(params).subspan(
      static_cast<std::size_t>(class_index(c)) * config.dimension, config.dimension);
}

double TrainedModel::bias(Label c) const {
  return params[2 * static_cast<std::size_t>(config.dimension) + class_index(c)];
}

bool TrainedModel::finite() const {
  return std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); });
}

namespace {

constexpr char kModelMagic[8] = {'B', 'H', 'V', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "model checkpoints are written in host byte order");

}  // namespace

void TrainedModel::save(const std::filesystem::path& path) const {
  json header;
  header["format"] = "behave-model";
  header["version"] = kModelVersion;
  header["features"] = config.to_json();
  header["parameters"] = params.size();
  json lin = json::array();
  for (const auto& e : lineage) {
    lin.push_back({{"dataset", e.dataset_id}, {"hyperparams", e.hyperparams.to_json()}, {"seed", e.seed}});
  }
  header["lineage"] = lin;
  const std::string h = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model " + path.string());
  out.write(kModelMagic, sizeof kModelMagic);
  out.write(reinterpret_cast<const char*>(&kModelVersion), sizeof kModelVersion);
  const std::uint64_t len = h.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) throw Error("failed writing model " + path.string());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path.string());
  char magic[sizeof kModelMagic];
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || !std::equal(magic, magic + sizeof magic, kModelMagic)) {
    throw Error(path.string() + ": not a model checkpoint");
  }
  if (version != kModelVersion) throw Error(path.string() + ": unsupported checkpoint version");
  if (len > (1u << 26)) throw Error(path.string() + ": corrupt header");
  std::string h(len, '\0');
  in.read(h.data(), static_cast<std::streamsize>(len));
  TrainedModel m;
  try {
    const json header = json::parse(h);
    m.config = FeatureConfig::from_json(header.at("features"));
    const auto count = header.at("parameters").get<std::size_t>();
    if (count != 2 * static_cast<std::size_t>(m.config.dimension) + kNumClasses) {
      throw Error("parameter count does not match feature dimension");
    }
    m.params.resize(count);
    for (const auto& e : header.at("lineage")) {
      m.lineage.push_back({e.at("dataset").get<std::string>(),
                           HyperParams::from_json(e.at("hyperparams")),
                           e.at("seed").get<std::uint64_t>()});
    }
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  in.read(reinterpret_cast<char*>(m.params.data()),
          static_cast<std::streamsize>(m.params.size() * sizeof(double)));
  if (!in) throw Error(path.string() + ": truncated parameters");
  if (!m.finite()) throw Error(path.string() + ": non-finite parameters");
  return m;
}

// ---------------------------------------------------------------------------
// Loss

namespace {

// Adds coef * d(loss_i)/d(params) for one example into `grad`; returns p_hateful.
double accumulate_example(std::span<const double> params, std::uint32_t dim,
                          const SparseVector& x, Label y, double coef, std::span<double> grad) {
  const double p1 = kernels::predict_one(params, dim, x);
  const double p[2] = {1.0 - p1, p1};
  for (int c = 0; c < kNumClasses; ++c) {
    const double r = coef * (p[c] - (class_index(y) == c ? 1.0 : 0.0));
    if (r == 0.0) continue;
    const std::size_t base = static_cast<std::size_t>(c) * dim;
    for (std::size_t k = 0; k < x.index.size(); ++k) {
      grad[base + x.index[k]] += r * static_cast<double>(x.value[k]);
    }
    grad[2 * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)] += r;
  }
  return p1;
}

double example_loss(double p_hateful, Label y) {
  const double p = y == Label::Hateful ? p_hateful : 1.0 - p_hateful;
  return -std::log(std::max(p, std::numeric_limits<double>::min()));
}

}  // namespace

LossAndGradient loss_and_gradient(const TrainedModel& model, std::span<const SparseVector> x,
                                  std::span<const Label> y, const ClassWeights& weights) {
  if (x.size() != y.size() || x.empty()) throw Error("loss: features and labels must align");
  LossAndGradient out;
  out.gradient.assign(model.params.size(), 0.0);
  double wsum = 0.0;
  for (Label l : y) wsum += weights[class_index(l)];
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights[class_index(y[i])] / wsum;
    const double p = accumulate_example(model.params, model.dimension(), x[i], y[i], w, out.gradient);
    loss += w * example_loss(p, y[i]);
  }
  out.loss = loss;
  return out;
}

double weighted_loss(const TrainedModel& model, std::span<const SparseVector> x,
                     std::span<const Label> y, const ClassWeights& weights) {
  if (x.size() != y.size() || x.empty()) throw Error("loss: features and labels must align");
  std::vector<double> p(x.size());
  kernels::predict_parallel(model.params, model.dimension(), x, p);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weights[class_index(y[i])];
    num += w * example_loss(p[i], y[i]);
    den += w;
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Training

TrainedModel train(const FeatureSet& data, const HyperParams& hp, std::uint64_t seed,
                   const TrainedModel* init) {
  hp.validate();
  if (data.y.size() != data.x.size()) throw Error("train: dataset '" + data.dataset_id + "' is unlabeled");
  if (init && !(init->config == data.config)) {
    throw Error("train: feature configuration of the initial model does not match the data");
  }
  const ClassWeights balanced = class_weights(data.y);
  const ClassWeights cw = hp.class_weighted ? balanced : ClassWeights{1.0, 1.0};
  if (init && hp.epochs == 0) return *init;

  TrainedModel model = init ? *init : TrainedModel::zeros(data.config);
  const std::uint32_t dim = model.dimension();
  const std::size_t decayed = 2 * static_cast<std::size_t>(dim);
  std::vector<double> grad(model.params.size(), 0.0);
  std::vector<double> m(model.params.size(), 0.0);
  std::vector<double> v(model.params.size(), 0.0);
  const auto opt = hp.optimizer();

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "train-order"));
  std::int64_t step = 0;

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::size_t end = std::min(order.size(), start + hp.batch_size);
      double wsum = 0.0;
      for (std::size_t k = start; k < end; ++k) wsum += cw[class_index(data.y[order[k]])];
      double loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto i = order[k];
        const double w = cw[class_index(data.y[i])] / wsum;
        const double p = accumulate_example(model.params, dim, data.x[i], data.y[i], w, grad);
        loss += w * example_loss(p, data.y[i]);
      }
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "training diverged on '" << data.dataset_id << "' at epoch " << epoch + 1
            << ", step " << step + 1 << " (loss " << loss << ", lr " << hp.learning_rate << ")";
        throw Error(msg.str());
      }
      ++step;
      kernels::adamw_step_parallel(model.params, grad, m, v, opt, step, decayed);
      std::fill(grad.begin(), grad.end(), 0.0);
    }
  }
  if (!model.finite()) {
    throw Error("training diverged on '" + data.dataset_id + "': non-finite parameters");
  }
  model.lineage.push_back({data.dataset_id, hp, seed});
  return model;
}

// ---------------------------------------------------------------------------
// Grid search

std::vector<HyperParams> GridSpec::points() const {
  std::vector<HyperParams> out;
  for (double lr : learning_rates) {
    for (auto bs : batch_sizes) {
      for (auto ep : epochs) {
        HyperParams h = base;
        h.learning_rate = lr;
        h.batch_size = bs;
        h.epochs = ep;
        out.push_back(h);
      }
    }
  }
  return out;
}

json GridSpec::to_json() const {
  return {{"learning_rates", learning_rates},
          {"batch_sizes", batch_sizes},
          {"epochs", epochs},
          {"base", base.to_json()},
          {"weighted_validation", weighted_validation}};
}

GridSpec GridSpec::from_json(const json& j) {
  GridSpec g;
  try {
    g.learning_rates = j.value("learning_rates", g.learning_rates);
    g.batch_sizes = j.value("batch_sizes", g.batch_sizes);
    g.epochs = j.value("epochs", g.epochs);
    if (j.contains("base")) g.base = HyperParams::from_json(j["base"]);
    g.weighted_validation = j.value("weighted_validation", g.weighted_validation);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  if (g.learning_rates.empty() || g.batch_sizes.empty() || g.epochs.empty()) {
    throw ConfigError("grid: every dimension needs at least one value");
  }
  for (auto e : g.epochs) {
    if (e == 0) throw ConfigError("grid: epochs must be positive");
  }
  for (const auto& p : g.points()) p.validate();
  return g;
}

std::size_t select_grid_point(std::span<const std::optional<double>> losses) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!losses[i]) continue;
    if (!best || *losses[i] < *losses[*best]) best = i;
  }
  if (!best) throw Error("grid search: every grid point diverged");
  return *best;
}

GridResult grid_search(const FeatureSet& train_set, const FeatureSet& validation_set,
                       const GridSpec& grid, std::uint64_t seed, const TrainedModel* init) {
  const auto pts = grid.points();
  if (pts.empty()) throw Error("grid search: empty grid");
  if (validation_set.size() == 0) throw Error("grid search: empty validation set");
  const ClassWeights vw =
      grid.weighted_validation ? class_weights(train_set.y) : ClassWeights{1.0, 1.0};

  std::vector<GridPoint> results(pts.size());
  std::optional<TrainedModel> best_model;
  std::optional<std::size_t> best_idx;
  std::optional<double> best_loss;

  const auto n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    GridPoint gp;
    gp.hyperparams = pts[u];
    std::optional<TrainedModel> model;
    try {
      model = train(train_set, pts[u], seed, init);
      const double l = weighted_loss(*model, validation_set.x, validation_set.y, vw);
      if (std::isfinite(l)) gp.validation_loss = l;
      else gp.error = "non-finite validation loss";
    } catch (const std::exception& e) {
      gp.error = e.what();
    }
    if (gp.validation_loss) {
#pragma omp critical(behave_grid_best)
      {
        // Order by (loss, index) so the kept model does not depend on scheduling.
        if (!best_loss || *gp.validation_loss < *best_loss ||
            (*gp.validation_loss == *best_loss && u < *best_idx)) {
          best_loss = gp.validation_loss;
          best_idx = u;
          best_model = std::move(model);
        }
      }
    }
    results[u] = std::move(gp);
  }

  std::vector<std::optional<double>> losses;
  losses.reserve(results.size());
  for (const auto& r : results) losses.push_back(r.validation_loss);
  const std::size_t sel = select_grid_point(losses);
  if (!best_idx || sel != *best_idx) throw Error("grid search: internal selection mismatch");

  GridResult out;
  out.model = std::move(*best_model);
  out.hyperparams = pts[sel];
  out.validation_loss = *losses[sel];
  out.selected = sel;
  out.points = std::move(results);
  return out;
}

// ---------------------------------------------------------------------------
// Predictions

void PredictionSet::add(std::string id, double p_hateful) {
  if (!(p_hateful >= 0.0 && p_hateful <= 1.0)) {
    std::ostringstream msg;
    msg << "prediction for '" << id << "' has probability " << p_hateful << " outside [0, 1]";
    throw Error(msg.str());
  }
  if (index_.contains(id)) throw Error("duplicate prediction id '" + id + "'");
  index_.emplace(id, entries_.size());
  entries_.emplace_back(std::move(id), p_hateful);
}

std::optional<double> PredictionSet::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].second;
}

double PredictionSet::at(std::string_view id) const {
  auto p = find(id);
  if (!p) throw Error("no prediction for id '" + std::string(id) + "'");
  return *p;
}

void PredictionSet::write_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& [id, p] : entries_) {
    out << json{{"id", id}, {"p_hateful", p}}.dump() << '\n';
  }
}

PredictionSet predict(const TrainedModel& model, const FeatureSet& data) {
  if (!model.finite()) throw Error("predict: model has non-finite parameters");
  if (!(model.config == data.config)) throw Error("predict: feature configuration mismatch");
  std::vector<double> p(data.size());
  kernels::predict_parallel(model.params, model.dimension(), data.x, p);
  PredictionSet out(PredictionSource::Internal);
  for (std::size_t i = 0; i < p.size(); ++i) out.add(data.ids[i], p[i]);
  return out;
}

PredictionSet predict(const TrainedModel& model, std::span<const std::string> ids,
                      std::span<const std::string> texts) {
  const FeatureSet fs = make_feature_set("predict", model.config,
                                         std::vector<std::string>(ids.begin(), ids.end()), texts);
  return predict(model, fs);
}

PredictionSet parse_external_predictions(std::string_view jsonl, std::string_view source) {
  PredictionSet out(PredictionSource::External);
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = std::string(source) + " line " + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      throw Error(where + ": malformed record");
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("p_hateful") ||
        !rec["p_hateful"].is_number()) {
      throw Error(where + ": malformed record (need \"id\" and numeric \"p_hateful\")");
    }
    std::string id;
    if (rec["id"].is_string()) id = rec["id"].get<std::string>();
    else if (rec["id"].is_number_integer()) id = std::to_string(rec["id"].get<long long>());
    else throw Error(where + ": malformed record (id must be a string or integer)");
    try {
      out.add(id, rec["p_hateful"].get<double>());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return out;
}

PredictionSet load_external_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open predictions " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_external_predictions(ss.str(), path.string());
}

}  // namespace behave
