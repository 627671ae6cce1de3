#include "adaptkry/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "adaptkry/error.hpp"
#include "adaptkry/rng.hpp"
#include "container.hpp"

namespace adaptkry {

namespace {

// Forward pass buffers shared by inference and training.
struct ForwardPass {
  Matrix weighted;     // input after hop weights (and dropout when training)
  Matrix hidden_pre;   // before ReLU
  Matrix hidden;       // after ReLU (and dropout when training)
  Matrix scores;
};

void apply_hop_weights(const FilterModel& model, const Matrix& raw, Matrix& out) {
  const std::size_t dim = model.dim();
  const auto w = model.hop_weights();
  out = Matrix(raw.rows(), raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    const double* in = raw.row(r);
    double* dst = out.row(r);
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      const double scale = model.per_column() ? w[c] : w[c / dim];
      dst[c] = scale * in[c];
    }
  }
}

void add_bias_rows(Matrix& m, std::span<const double> bias) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double* row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] += bias[c];
  }
}

Matrix param_matrix(std::span<const double> params, std::size_t offset, std::size_t rows,
                    std::size_t cols) {
  Matrix m(rows, cols);
  std::copy_n(params.data() + offset, rows * cols, m.data());
  return m;
}

ForwardPass run_forward(const FilterModel& model, const Matrix& raw) {
  const auto& layout = model.layout();
  const auto params = model.parameters();
  ForwardPass pass;
  apply_hop_weights(model, raw, pass.weighted);
  const Matrix w1 = param_matrix(params, layout.w1_offset, model.input_width(),
                                 static_cast<std::size_t>(model.hidden()));
  pass.hidden_pre = matmul(pass.weighted, w1);
  add_bias_rows(pass.hidden_pre, {params.data() + layout.b1_offset, layout.b1_size});
  pass.hidden = pass.hidden_pre;
  for (std::size_t i = 0; i < pass.hidden.size(); ++i)
    pass.hidden.data()[i] = std::max(pass.hidden.data()[i], 0.0);
  const Matrix w2 = param_matrix(params, layout.w2_offset,
                                 static_cast<std::size_t>(model.hidden()),
                                 static_cast<std::size_t>(model.classes()));
  pass.scores = matmul(pass.hidden, w2);
  add_bias_rows(pass.scores, {params.data() + layout.b2_offset, layout.b2_size});
  return pass;
}

// Mean cross-entropy of softmax(scores) against labels; optionally emits
// d(loss)/d(scores) into grad.
double cross_entropy(const Matrix& scores, std::span<const int> labels, Matrix* grad) {
  const std::size_t rows = scores.rows(), classes = scores.cols();
  if (grad) *grad = Matrix(rows, classes);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* s = scores.row(r);
    const double peak = *std::max_element(s, s + classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) z += std::exp(s[c] - peak);
    const auto y = static_cast<std::size_t>(labels[r]);
    total += -(s[y] - peak - std::log(z));
    if (grad) {
      double* gr = grad->row(r);
      for (std::size_t c = 0; c < classes; ++c)
        gr[c] = (std::exp(s[c] - peak) / z - (c == y ? 1.0 : 0.0)) / static_cast<double>(rows);
    }
  }
  return total / static_cast<double>(rows);
}

struct DropoutMask {
  std::vector<double> scale;  // 0 or 1/keep per entry
  bool active = false;

  void sample(std::size_t size, double rate, Rng& rng) {
    active = rate > 0.0;
    if (!active) return;
    scale.resize(size);
    const double keep = 1.0 - rate;
    for (auto& s : scale) s = rng.uniform() < rate ? 0.0 : 1.0 / keep;
  }
  void apply(Matrix& m) const {
    if (!active) return;
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] *= scale[i];
  }
};

// Backward pass through the MLP and hop weights. `raw` is the unweighted
// gathered input; masks may be inactive.
GradientResult backward(const FilterModel& model, const Matrix& raw, const ForwardPass& pass,
                        std::span<const int> labels, const DropoutMask& input_mask,
                        const DropoutMask& hidden_mask) {
  const auto& layout = model.layout();
  const auto params = model.parameters();
  GradientResult result;
  result.grad.assign(layout.total, 0.0);

  Matrix dscores;
  result.loss = cross_entropy(pass.scores, labels, &dscores);

  // Second layer.
  const Matrix dw2 = matmul_tn(pass.hidden, dscores);
  std::copy_n(dw2.data(), layout.w2_size, result.grad.data() + layout.w2_offset);
  for (std::size_t r = 0; r < dscores.rows(); ++r)
    for (std::size_t c = 0; c < dscores.cols(); ++c)
      result.grad[layout.b2_offset + c] += dscores(r, c);

  const Matrix w2 = param_matrix(params, layout.w2_offset,
                                 static_cast<std::size_t>(model.hidden()),
                                 static_cast<std::size_t>(model.classes()));
  Matrix dhidden = matmul_nt(dscores, w2);
  hidden_mask.apply(dhidden);
  for (std::size_t i = 0; i < dhidden.size(); ++i)
    if (pass.hidden_pre.data()[i] <= 0.0) dhidden.data()[i] = 0.0;

  // First layer.
  const Matrix dw1 = matmul_tn(pass.weighted, dhidden);
  std::copy_n(dw1.data(), layout.w1_size, result.grad.data() + layout.w1_offset);
  for (std::size_t r = 0; r < dhidden.rows(); ++r)
    for (std::size_t c = 0; c < dhidden.cols(); ++c)
      result.grad[layout.b1_offset + c] += dhidden(r, c);

  const Matrix w1 = param_matrix(params, layout.w1_offset, model.input_width(),
                                 static_cast<std::size_t>(model.hidden()));
  Matrix dweighted = matmul_nt(dhidden, w1);
  input_mask.apply(dweighted);

  // Hop weights.
  const std::size_t dim = model.dim();
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    const double* in = raw.row(r);
    const double* dz = dweighted.row(r);
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      const std::size_t slot = model.per_column() ? c : c / dim;
      result.grad[layout.w_offset + slot] += dz[c] * in[c];
    }
  }
  return result;
}

struct AdamState {
  std::vector<double> m, v;
  int step = 0;
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  static constexpr double eps = 1e-8;

  explicit AdamState(std::size_t size) : m(size, 0.0), v(size, 0.0) {}

  void update(std::span<double> params, std::span<const double> grad, double lr,
              double weight_decay) {
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, step);
    const double bc2 = 1.0 - std::pow(beta2, step);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grad[i] + weight_decay * params[i];
      m[i] = beta1 * m[i] + (1.0 - beta1) * g;
      v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
      params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
  }
};

double accuracy_of(const Matrix& scores, std::span<const int> labels) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const double* s = scores.row(r);
    const auto best = std::max_element(s, s + scores.cols());
    if (static_cast<int>(best - s) == labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(scores.rows());
}

std::vector<int> gather_labels(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<int> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = g.label(nodes[i]);
  return out;
}

}  // namespace

FilterModel::FilterModel(int hops, std::size_t dim, int hidden, int classes, std::uint64_t seed,
                         bool per_column)
    : hops_(hops), dim_(dim), hidden_(hidden), classes_(classes), per_column_(per_column),
      seed_(seed) {
  if (hops < 0 || dim == 0 || hidden <= 0 || classes <= 0)
    throw validation_error("invalid model shape");
  const std::size_t width = input_width();
  layout_.w_offset = 0;
  layout_.w_size = per_column ? width : static_cast<std::size_t>(hops) + 1;
  layout_.w1_offset = layout_.w_offset + layout_.w_size;
  layout_.w1_size = width * static_cast<std::size_t>(hidden);
  layout_.b1_offset = layout_.w1_offset + layout_.w1_size;
  layout_.b1_size = static_cast<std::size_t>(hidden);
  layout_.w2_offset = layout_.b1_offset + layout_.b1_size;
  layout_.w2_size = static_cast<std::size_t>(hidden) * static_cast<std::size_t>(classes);
  layout_.b2_offset = layout_.w2_offset + layout_.w2_size;
  layout_.b2_size = static_cast<std::size_t>(classes);
  layout_.total = layout_.b2_offset + layout_.b2_size;
  params_.assign(layout_.total, 0.0);

  // Uniform hop average as the neutral prior for w; Glorot uniform layers.
  const double hop_init = 1.0 / static_cast<double>(hops + 1);
  std::fill_n(params_.data() + layout_.w_offset, layout_.w_size, hop_init);
  Rng rng(Rng::derive(seed, 0x11));
  const double limit1 = std::sqrt(6.0 / static_cast<double>(width + static_cast<std::size_t>(hidden)));
  for (std::size_t i = 0; i < layout_.w1_size; ++i)
    params_[layout_.w1_offset + i] = rng.uniform(-limit1, limit1);
  const double limit2 =
      std::sqrt(6.0 / static_cast<double>(hidden + classes));
  for (std::size_t i = 0; i < layout_.w2_size; ++i)
    params_[layout_.w2_offset + i] = rng.uniform(-limit2, limit2);
}

Matrix gather_concat(const KrylovBasis& basis, std::span<const NodeId> nodes) {
  const std::size_t dim = basis.dim();
  const std::size_t blocks = basis.num_blocks();
  Matrix out(nodes.size(), blocks * dim);
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const NodeId u = nodes[r];
    if (u >= basis.num_nodes()) throw validation_error("node index out of range");
    double* dst = out.row(r);
    for (std::size_t k = 0; k < blocks; ++k)
      std::copy_n(basis.blocks[k].row(u), dim, dst + k * dim);
  }
  return out;
}

Matrix FilterModel::forward(const KrylovBasis& basis, std::span<const NodeId> nodes) const {
  if (basis.num_blocks() != static_cast<std::size_t>(hops_) + 1 || basis.dim() != dim_)
    throw validation_error("basis shape does not match the model");
  const Matrix raw = gather_concat(basis, nodes);
  return run_forward(*this, raw).scores;
}

GradientResult model_loss_gradients(const FilterModel& model, const KrylovBasis& basis,
                                    std::span<const NodeId> nodes, std::span<const int> labels) {
  const Matrix raw = gather_concat(basis, nodes);
  const ForwardPass pass = run_forward(model, raw);
  return backward(model, raw, pass, labels, {}, {});
}

double model_loss(const FilterModel& model, const KrylovBasis& basis,
                  std::span<const NodeId> nodes, std::span<const int> labels) {
  const Matrix raw = gather_concat(basis, nodes);
  return cross_entropy(run_forward(model, raw).scores, labels, nullptr);
}

TrainResult train(const FilterModel& model, const KrylovBasis& basis, const Graph& g,
                  const SplitSet& split, const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0.0) throw validation_error("learning rate must be positive");
  if (cfg.epochs < 1) throw validation_error("epochs must be >= 1");
  if (split.train.empty() || split.val.empty())
    throw validation_error("train and val splits must be nonempty");
  if (basis.num_blocks() != static_cast<std::size_t>(model.hops()) + 1 ||
      basis.dim() != model.dim())
    throw validation_error("basis shape does not match the model");

  FilterModel current = model;
  const auto& layout = current.layout();
  const Matrix raw_train = gather_concat(basis, split.train);
  const Matrix raw_val = gather_concat(basis, split.val);
  const std::vector<int> labels_train = gather_labels(g, split.train);
  const std::vector<int> labels_val = gather_labels(g, split.val);

  AdamState adam(layout.total);
  TrainResult result;
  std::vector<double> best_params(current.parameters().begin(), current.parameters().end());
  double best_val = -1.0;
  int best_epoch = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng dropout_rng(Rng::derive(cfg.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(epoch)));
    DropoutMask input_mask, hidden_mask;
    input_mask.sample(raw_train.rows() * current.input_width(), cfg.dropout, dropout_rng);
    hidden_mask.sample(raw_train.rows() * static_cast<std::size_t>(current.hidden()), cfg.dropout,
                       dropout_rng);

    ForwardPass pass;
    apply_hop_weights(current, raw_train, pass.weighted);
    input_mask.apply(pass.weighted);
    const Matrix w1 = param_matrix(current.parameters(), layout.w1_offset, current.input_width(),
                                   static_cast<std::size_t>(current.hidden()));
    pass.hidden_pre = matmul(pass.weighted, w1);
    add_bias_rows(pass.hidden_pre,
                  {current.parameters().data() + layout.b1_offset, layout.b1_size});
    pass.hidden = pass.hidden_pre;
    for (std::size_t i = 0; i < pass.hidden.size(); ++i)
      pass.hidden.data()[i] = std::max(pass.hidden.data()[i], 0.0);
    hidden_mask.apply(pass.hidden);
    const Matrix w2 = param_matrix(current.parameters(), layout.w2_offset,
                                   static_cast<std::size_t>(current.hidden()),
                                   static_cast<std::size_t>(current.classes()));
    pass.scores = matmul(pass.hidden, w2);
    add_bias_rows(pass.scores, {current.parameters().data() + layout.b2_offset, layout.b2_size});

    GradientResult grads =
        backward(current, raw_train, pass, labels_train, input_mask, hidden_mask);
    if (!std::isfinite(grads.loss))
      throw numeric_error("non-finite loss at epoch " + std::to_string(epoch));
    adam.update(current.parameters(), grads.grad, cfg.learning_rate, cfg.weight_decay);

    const double val_acc = accuracy_of(run_forward(current, raw_val).scores, labels_val);
    result.history.push_back({epoch, grads.loss, val_acc});
    if (val_acc > best_val) {
      best_val = val_acc;
      best_epoch = epoch;
      best_params.assign(current.parameters().begin(), current.parameters().end());
    }
    if (epoch - best_epoch >= cfg.patience) break;
  }

  std::copy(best_params.begin(), best_params.end(), current.parameters().begin());
  result.model = std::move(current);
  result.best_epoch = best_epoch;
  result.best_val_accuracy = best_val;
  if (!split.test.empty()) {
    const std::vector<int> labels_test = gather_labels(g, split.test);
    result.test_accuracy = evaluate(result.model, basis, split.test, labels_test);
  }
  return result;
}

double evaluate(const FilterModel& model, const KrylovBasis& basis,
                std::span<const NodeId> nodes, std::span<const int> labels) {
  if (nodes.empty()) throw validation_error("empty node list");
  if (nodes.size() != labels.size()) throw validation_error("nodes/labels length mismatch");
  return accuracy_of(model.forward(basis, nodes), labels);
}

std::vector<TauSweepRow> tau_sweep(const Graph& g, const FeatureMatrix& x, int hops,
                                   std::span<const double> tau_grid, const TrainConfig& cfg,
                                   std::span<const SplitSet> splits) {
  if (tau_grid.empty()) throw validation_error("tau grid is empty");
  std::vector<TauSweepRow> rows;
  for (double tau : tau_grid) {
    const TauPropagator p(g, tau);
    const KrylovBasis basis = build_krylov_basis(p, x, hops);
    std::vector<double> accs;
    for (std::size_t s = 0; s < splits.size(); ++s) {
      TrainConfig split_cfg = cfg;
      split_cfg.seed = Rng::derive(cfg.seed, s);
      const FilterModel init(hops, x.cols(), cfg.hidden, g.num_classes(), split_cfg.seed);
      accs.push_back(train(init, basis, g, splits[s], split_cfg).test_accuracy);
    }
    const double mean = std::accumulate(accs.begin(), accs.end(), 0.0) /
                        static_cast<double>(accs.size());
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    var /= static_cast<double>(accs.size());
    rows.push_back({tau, mean, std::sqrt(var)});
  }
  return rows;
}

BasisAngleReport basis_angles(const KrylovBasis& basis) {
  if (basis.dim() < 1) throw validation_error("basis has no columns");
  BasisAngleReport report;
  const std::size_t n = basis.num_nodes(), d = basis.dim();
  for (std::size_t k = 1; k < basis.num_blocks(); ++k) {
    const Matrix& prev = basis.blocks[k - 1];
    const Matrix& curr = basis.blocks[k];
    double sum = 0.0;
    std::size_t used = 0, skipped = 0;
    for (std::size_t j = 0; j < d; ++j) {
      double pp = 0.0, cc = 0.0, pc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        pp += prev(i, j) * prev(i, j);
        cc += curr(i, j) * curr(i, j);
        pc += prev(i, j) * curr(i, j);
      }
      if (pp == 0.0 || cc == 0.0) {
        ++skipped;
        continue;
      }
      const double cosine = std::clamp(pc / std::sqrt(pp * cc), -1.0, 1.0);
      sum += std::acos(cosine) * 180.0 / 3.141592653589793238462643;
      ++used;
    }
    if (used == 0)
      throw validation_error("all columns zero at hop " + std::to_string(k));
    report.mean_degrees.push_back(sum / static_cast<double>(used));
    report.skipped.push_back(skipped);
  }
  return report;
}

void save_checkpoint(const FilterModel& model, const TrainConfig& cfg,
                     const std::filesystem::path& path) {
  nlohmann::json header;
  header["hops"] = model.hops();
  header["dim"] = model.dim();
  header["hidden"] = model.hidden();
  header["classes"] = model.classes();
  header["per_column"] = model.per_column();
  header["seed"] = model.seed();
  header["config"] = {{"learning_rate", cfg.learning_rate},
                      {"weight_decay", cfg.weight_decay},
                      {"epochs", cfg.epochs},
                      {"patience", cfg.patience},
                      {"hidden", cfg.hidden},
                      {"dropout", cfg.dropout},
                      {"seed", cfg.seed}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  detail::write_json_header(out, header);
  Matrix blob(1, model.parameters().size());
  std::copy(model.parameters().begin(), model.parameters().end(), blob.data());
  detail::write_f64_block(out, blob);
  if (!out) throw io_error("short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  const nlohmann::json header = detail::read_json_header(in, path.string());
  Checkpoint ckpt;
  try {
    const auto& cfg = header.at("config");
    ckpt.config.learning_rate = cfg.at("learning_rate").get<double>();
    ckpt.config.weight_decay = cfg.at("weight_decay").get<double>();
    ckpt.config.epochs = cfg.at("epochs").get<int>();
    ckpt.config.patience = cfg.at("patience").get<int>();
    ckpt.config.hidden = cfg.at("hidden").get<int>();
    ckpt.config.dropout = cfg.at("dropout").get<double>();
    ckpt.config.seed = cfg.at("seed").get<std::uint64_t>();
    ckpt.model = FilterModel(header.at("hops").get<int>(), header.at("dim").get<std::size_t>(),
                             header.at("hidden").get<int>(), header.at("classes").get<int>(),
                             header.at("seed").get<std::uint64_t>(),
                             header.at("per_column").get<bool>());
  } catch (const nlohmann::json::exception& e) {
    throw io_error("malformed checkpoint header in " + path.string() + ": " + e.what());
  }
  const Matrix blob =
      detail::read_f64_block(in, 1, ckpt.model.parameters().size(), path.string());
  std::copy_n(blob.data(), ckpt.model.parameters().size(), ckpt.model.parameters().data());
  return ckpt;
}

void save_history_csv(std::span<const EpochStats> history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path.string());
  out << "epoch,train_loss,val_acc\n";
  out.precision(12);
  for (const auto& row : history)
    out << row.epoch << ',' << row.train_loss << ',' << row.val_accuracy << '\n';
}

}  // namespace adaptkry
