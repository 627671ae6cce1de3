#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "adaptkry/graph.hpp"
#include "adaptkry/matrix.hpp"
#include "adaptkry/propagation.hpp"

namespace adaptkry {

struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  int epochs = 1000;
  int patience = 200;  // early stop on validation accuracy
  int hidden = 64;
  double dropout = 0.5;
  std::uint64_t seed = 0;
};

// Element-wise hop weights followed by a two-layer ReLU MLP:
// scores = MLP(concat(F(0)..F(K)) * broadcast(w)). By default w holds one
// scalar per hop broadcast across that hop's columns; the per-column variant
// learns one scalar per concatenated column.
class FilterModel {
 public:
  struct Layout {
    std::size_t w_offset = 0, w_size = 0;
    std::size_t w1_offset = 0, w1_size = 0;  // input_width x hidden, row-major
    std::size_t b1_offset = 0, b1_size = 0;
    std::size_t w2_offset = 0, w2_size = 0;  // hidden x classes, row-major
    std::size_t b2_offset = 0, b2_size = 0;
    std::size_t total = 0;
  };

  FilterModel() = default;
  FilterModel(int hops, std::size_t dim, int hidden, int classes, std::uint64_t seed,
              bool per_column = false);

  int hops() const noexcept { return hops_; }
  std::size_t dim() const noexcept { return dim_; }
  int hidden() const noexcept { return hidden_; }
  int classes() const noexcept { return classes_; }
  bool per_column() const noexcept { return per_column_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t input_width() const noexcept { return (static_cast<std::size_t>(hops_) + 1) * dim_; }

  const Layout& layout() const noexcept { return layout_; }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<const double> hop_weights() const {
    return {params_.data() + layout_.w_offset, layout_.w_size};
  }
  std::span<double> hop_weights() {
    return {params_.data() + layout_.w_offset, layout_.w_size};
  }

  // Class scores for the requested nodes; deterministic, no dropout.
  Matrix forward(const KrylovBasis& basis, std::span<const NodeId> nodes) const;

 private:
  int hops_ = 0;
  std::size_t dim_ = 0;
  int hidden_ = 0;
  int classes_ = 0;
  bool per_column_ = false;
  std::uint64_t seed_ = 0;
  Layout layout_;
  std::vector<double> params_;

  friend void save_checkpoint(const FilterModel&, const TrainConfig&,
                              const std::filesystem::path&);
};

// Rows of concat(F(0)..F(K)) for the requested nodes, unweighted.
Matrix gather_concat(const KrylovBasis& basis, std::span<const NodeId> nodes);

// Mean cross-entropy and gradients with respect to every parameter, no
// dropout. Gradient layout matches FilterModel::layout().
struct GradientResult {
  double loss = 0.0;
  std::vector<double> grad;
};
GradientResult model_loss_gradients(const FilterModel& model, const KrylovBasis& basis,
                                    std::span<const NodeId> nodes, std::span<const int> labels);
double model_loss(const FilterModel& model, const KrylovBasis& basis,
                  std::span<const NodeId> nodes, std::span<const int> labels);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  FilterModel model;  // best-validation weights restored
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Full-batch Adam on cross-entropy over the train split, early stopping on
// validation accuracy. The basis is never mutated. Throws numeric_error on a
// non-finite loss, naming the epoch.
TrainResult train(const FilterModel& model, const KrylovBasis& basis, const Graph& g,
                  const SplitSet& split, const TrainConfig& cfg);

double evaluate(const FilterModel& model, const KrylovBasis& basis,
                std::span<const NodeId> nodes, std::span<const int> labels);

struct TauSweepRow {
  double tau = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

// Rebuilds the basis per tau and trains on each split with the same split
// set and per-split seeds, so rows are comparable across taus.
std::vector<TauSweepRow> tau_sweep(const Graph& g, const FeatureMatrix& x, int hops,
                                   std::span<const double> tau_grid, const TrainConfig& cfg,
                                   std::span<const SplitSet> splits);

struct BasisAngleReport {
  std::vector<double> mean_degrees;     // hop 1..K
  std::vector<std::size_t> skipped;     // zero-norm columns per hop
};

// Mean angle (degrees) between consecutive-hop signal columns.
BasisAngleReport basis_angles(const KrylovBasis& basis);

// Checkpoint container: JSON header (shapes, config, seed) + float64 blob.
void save_checkpoint(const FilterModel& model, const TrainConfig& cfg,
                     const std::filesystem::path& path);
struct Checkpoint {
  FilterModel model;
  TrainConfig config;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

void save_history_csv(std::span<const EpochStats> history, const std::filesystem::path& path);

}  // namespace adaptkry
