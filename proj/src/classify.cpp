#include "pip/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pip/error.hpp"

namespace pip {

namespace {

void seeded_shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

struct Logistic {
  Eigen::VectorXd w;
  double b = 0.0;
};

// Plain SGD on the logistic loss with L2 on the weights. The L2 shrink is kept
// as a running scale factor so each step only touches the sample's nonzeros.
Logistic fit_logistic(const std::vector<const SparseVector*>& xs, const std::vector<double>& ys, std::size_t dim,
                      const TrainConfig& config) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  double scale = 1.0;
  double b = 0.0;
  const double lr = config.learning_rate;
  const double shrink = 1.0 - lr * config.l2;
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    seeded_shuffle(order, rng);
    for (std::size_t idx : order) {
      const SparseVector& x = *xs[idx];
      double z = b;
      for (const auto& [i, value] : x.entries) z += scale * v[i] * value;
      const double g = sigmoid(z) - ys[idx];
      scale *= shrink;
      if (scale < 1e-9) {
        v *= scale;
        scale = 1.0;
      }
      const double step = lr * g / scale;
      for (const auto& [i, value] : x.entries) v[i] -= step * value;
      b -= lr * g;
    }
  }
  return {v * scale, b};
}

void check_dims(const std::vector<const SparseVector*>& xs, std::size_t dim) {
  for (const auto* x : xs) {
    require(x->dim == dim, ErrorCode::VocabularyMismatch, "training vectors have different dimensions");
  }
}

Json config_json(const TrainConfig& c) {
  return Json{{"learning_rate", c.learning_rate}, {"l2", c.l2},
              {"epochs", c.epochs},               {"seed", c.seed},
              {"threshold", c.threshold}};
}

TrainConfig config_from_json(const Json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.l2 = j.value("l2", c.l2);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.threshold = j.value("threshold", c.threshold);
  return c;
}

double safe_div(double a, double b) { return b > 0.0 ? a / b : 0.0; }

Prf make_prf(double tp, double fp, double fn) {
  Prf r;
  r.precision = safe_div(tp, tp + fp);
  r.recall = safe_div(tp, tp + fn);
  r.f1 = safe_div(2.0 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

}  // namespace

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd LinearModel::scores(const SparseVector& x) const {
  require(x.dim == dim(), ErrorCode::VocabularyMismatch, "vector dimension does not match the model");
  Eigen::VectorXd s = bias;
  for (const auto& [i, value] : x.entries) {
    require(i < dim(), ErrorCode::VocabularyMismatch, "feature index outside the model");
    s += weights.col(i) * value;
  }
  return s;
}

LinearModel train_binary(const std::vector<BinarySample>& samples, const TrainConfig& config) {
  std::size_t positives = 0;
  for (const auto& s : samples) positives += s.is_pip ? 1 : 0;
  require(positives > 0 && positives < samples.size(), ErrorCode::DegenerateTrainingSet,
          "binary training needs both PIP and benign samples");
  const std::size_t dim = samples.front().x.dim;
  std::vector<const SparseVector*> xs;
  std::vector<double> ys;
  for (const auto& s : samples) {
    xs.push_back(&s.x);
    ys.push_back(s.is_pip ? 1.0 : 0.0);
  }
  check_dims(xs, dim);
  const Logistic fit = fit_logistic(xs, ys, dim, config);
  LinearModel m;
  m.kind = ModelKind::Binary;
  m.weights = fit.w.transpose();
  m.bias = Eigen::VectorXd::Constant(1, fit.b);
  m.active = {true};
  m.config = config;
  return m;
}

PipLabel predict_binary(const LinearModel& model, const SparseVector& x) {
  require(model.kind == ModelKind::Binary, ErrorCode::PreconditionFailed, "not a binary model");
  const double confidence = sigmoid(model.scores(x)[0]);
  return {confidence > model.config.threshold, confidence};
}

LinearModel train_multiclass(const std::vector<CategorySample>& samples, const TrainConfig& config) {
  std::vector<bool> present(kCategoryCount, false);
  for (const auto& s : samples) present[static_cast<std::size_t>(s.category)] = true;
  require(std::count(present.begin(), present.end(), true) >= 2, ErrorCode::DegenerateTrainingSet,
          "multiclass training needs at least two categories");
  const std::size_t dim = samples.front().x.dim;
  std::vector<const SparseVector*> xs;
  for (const auto& s : samples) xs.push_back(&s.x);
  check_dims(xs, dim);

  LinearModel m;
  m.kind = ModelKind::Multiclass;
  m.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kCategoryCount), static_cast<Eigen::Index>(dim));
  m.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kCategoryCount));
  m.active = present;
  m.config = config;
  std::vector<double> ys(samples.size());
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (!present[c]) continue;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      ys[i] = static_cast<std::size_t>(samples[i].category) == c ? 1.0 : 0.0;
    }
    const Logistic fit = fit_logistic(xs, ys, dim, config);
    m.weights.row(static_cast<Eigen::Index>(c)) = fit.w.transpose();
    m.bias[static_cast<Eigen::Index>(c)] = fit.b;
  }
  return m;
}

Category predict_category(const LinearModel& model, const SparseVector& x) {
  require(model.kind == ModelKind::Multiclass, ErrorCode::PreconditionFailed, "not a multiclass model");
  const Eigen::VectorXd s = model.scores(x);
  std::size_t best = kCategoryCount;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (!model.active[c]) continue;
    if (best == kCategoryCount || s[static_cast<Eigen::Index>(c)] > s[static_cast<Eigen::Index>(best)]) best = c;
  }
  return kAllCategories[best];
}

Json LinearModel::to_json() const {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    std::vector<double> row(weights.cols());
    for (Eigen::Index c = 0; c < weights.cols(); ++c) row[static_cast<std::size_t>(c)] = weights(r, c);
    rows.push_back(std::move(row));
  }
  std::vector<double> b(bias.data(), bias.data() + bias.size());
  return Json{{"schema_version", kSchemaVersion},
              {"kind", kind == ModelKind::Binary ? "binary" : "multiclass"},
              {"dim", dim()},
              {"weights", std::move(rows)},
              {"bias", std::move(b)},
              {"active", active},
              {"config", config_json(config)},
              {"vocab_hash", vocab_hash},
              {"version", version}};
}

LinearModel LinearModel::from_json(const Json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) fail(ErrorCode::ParseError, "unsupported model schema");
    LinearModel m;
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "binary" && kind != "multiclass") fail(ErrorCode::ParseError, "unknown model kind " + kind);
    m.kind = kind == "binary" ? ModelKind::Binary : ModelKind::Multiclass;
    const auto dim = j.at("dim").get<Eigen::Index>();
    const auto& rows = j.at("weights");
    const auto& bias = j.at("bias");
    const Eigen::Index n_rows = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index expected_rows = m.kind == ModelKind::Binary ? 1 : static_cast<Eigen::Index>(kCategoryCount);
    if (n_rows != expected_rows || static_cast<Eigen::Index>(bias.size()) != n_rows) {
      fail(ErrorCode::ParseError, "model has the wrong number of classes");
    }
    m.weights.resize(n_rows, dim);
    m.bias.resize(n_rows);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      const auto row = rows[static_cast<std::size_t>(r)].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != dim) fail(ErrorCode::ParseError, "weight row length mismatch");
      for (Eigen::Index c = 0; c < dim; ++c) m.weights(r, c) = row[static_cast<std::size_t>(c)];
      m.bias[r] = bias[static_cast<std::size_t>(r)].get<double>();
    }
    if (!m.weights.allFinite() || !m.bias.allFinite()) fail(ErrorCode::ParseError, "non-finite model weights");
    m.active = j.at("active").get<std::vector<bool>>();
    if (static_cast<Eigen::Index>(m.active.size()) != n_rows) fail(ErrorCode::ParseError, "active mask length");
    m.config = config_from_json(j.value("config", Json::object()));
    m.vocab_hash = j.value("vocab_hash", std::string{});
    m.version = j.value("version", 0);
    return m;
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model: ") + e.what());
  }
}

Prf class_prf(const Eigen::MatrixXd& confusion, Eigen::Index c) {
  const double tp = confusion(c, c);
  return make_prf(tp, confusion.col(c).sum() - tp, confusion.row(c).sum() - tp);
}

Prf micro_prf(const Eigen::MatrixXd& confusion) {
  // Over single-label data every error is one FP and one FN, so this equals accuracy.
  const double tp = confusion.diagonal().sum();
  const double errors = confusion.sum() - tp;
  return make_prf(tp, errors, errors);
}

Prf macro_prf(const Eigen::MatrixXd& confusion) {
  Prf r;
  std::size_t n = 0;
  for (Eigen::Index c = 0; c < confusion.rows(); ++c) {
    if (confusion.row(c).sum() == 0.0 && confusion.col(c).sum() == 0.0) continue;
    const Prf p = class_prf(confusion, c);
    r.precision += p.precision;
    r.recall += p.recall;
    r.f1 += p.f1;
    ++n;
  }
  if (n > 0) {
    r.precision /= static_cast<double>(n);
    r.recall /= static_cast<double>(n);
    r.f1 /= static_cast<double>(n);
  }
  return r;
}

EvalReport cross_validate(const std::vector<SparseVector>& xs, const std::vector<int>& labels,
                          std::size_t n_classes, std::size_t k, const Trainer& trainer, std::uint64_t seed) {
  require(k >= 2, ErrorCode::PreconditionFailed, "k must be at least 2");
  require(xs.size() == labels.size(), ErrorCode::PreconditionFailed, "features and labels differ in length");
  require(k <= xs.size(), ErrorCode::TooFewSamples, "fewer samples than folds");
  require(n_classes >= 2, ErrorCode::PreconditionFailed, "need at least two classes");

  // Stratify: shuffle each class, then deal its members round-robin across folds.
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < n_classes, ErrorCode::PreconditionFailed,
            "label out of range");
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(xs.size());
  std::size_t dealt = 0;
  for (auto& members : by_class) {
    seeded_shuffle(members, rng);
    for (std::size_t i : members) fold_of[i] = dealt++ % k;
  }

  EvalReport report;
  report.n_classes = n_classes;
  const auto n = static_cast<Eigen::Index>(n_classes);
  report.confusion = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<SparseVector> train_x;
    std::vector<int> train_y;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (fold_of[i] == fold) {
        test.push_back(i);
      } else {
        train_x.push_back(xs[i]);
        train_y.push_back(labels[i]);
      }
    }
    const auto predict = trainer(train_x, train_y);
    Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i : test) {
      const int p = predict(xs[i]);
      require(p >= 0 && p < n, ErrorCode::PreconditionFailed, "predictor returned an unknown class");
      confusion(labels[i], p) += 1.0;
    }
    const Prf prf = n_classes == 2 ? class_prf(confusion, 1) : micro_prf(confusion);
    report.folds.push_back({test.size(), prf.precision, prf.recall, prf.f1});
    report.confusion += confusion;
  }
  const Prf overall = n_classes == 2 ? class_prf(report.confusion, 1) : micro_prf(report.confusion);
  const Prf macro = macro_prf(report.confusion);
  report.precision = overall.precision;
  report.recall = overall.recall;
  report.f1 = overall.f1;
  report.accuracy = safe_div(report.confusion.diagonal().sum(), report.confusion.sum());
  report.macro_precision = macro.precision;
  report.macro_recall = macro.recall;
  report.macro_f1 = macro.f1;
  return report;
}

EvalReport cross_validate_binary(const std::vector<BinarySample>& samples, std::size_t k, const TrainConfig& config) {
  std::vector<SparseVector> xs;
  std::vector<int> ys;
  for (const auto& s : samples) {
    xs.push_back(s.x);
    ys.push_back(s.is_pip ? 1 : 0);
  }
  const Trainer trainer = [config](const std::vector<SparseVector>& tx, const std::vector<int>& ty) {
    std::vector<BinarySample> train;
    for (std::size_t i = 0; i < tx.size(); ++i) train.push_back({tx[i], ty[i] == 1});
    auto model = std::make_shared<LinearModel>(train_binary(train, config));
    return std::function<int(const SparseVector&)>(
        [model](const SparseVector& x) { return predict_binary(*model, x).is_pip ? 1 : 0; });
  };
  return cross_validate(xs, ys, 2, k, trainer, config.seed);
}

EvalReport cross_validate_multiclass(const std::vector<CategorySample>& samples, std::size_t k,
                                     const TrainConfig& config) {
  std::vector<SparseVector> xs;
  std::vector<int> ys;
  for (const auto& s : samples) {
    xs.push_back(s.x);
    ys.push_back(static_cast<int>(s.category));
  }
  const Trainer trainer = [config](const std::vector<SparseVector>& tx, const std::vector<int>& ty) {
    std::vector<CategorySample> train;
    for (std::size_t i = 0; i < tx.size(); ++i) train.push_back({tx[i], kAllCategories[static_cast<std::size_t>(ty[i])]});
    auto model = std::make_shared<LinearModel>(train_multiclass(train, config));
    return std::function<int(const SparseVector&)>(
        [model](const SparseVector& x) { return static_cast<int>(predict_category(*model, x)); });
  };
  return cross_validate(xs, ys, kCategoryCount, k, trainer, config.seed);
}

Json EvalReport::to_json() const {
  Json folds_json = Json::array();
  for (const auto& f : folds) {
    folds_json.push_back(Json{{"test_count", f.test_count}, {"precision", f.precision}, {"recall", f.recall}, {"f1", f.f1}});
  }
  Json matrix = Json::array();
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < confusion.cols(); ++c) row.push_back(static_cast<long long>(confusion(r, c)));
    matrix.push_back(std::move(row));
  }
  return Json{{"precision", precision}, {"recall", recall},
              {"f1", f1},               {"accuracy", accuracy},
              {"macro_precision", macro_precision}, {"macro_recall", macro_recall},
              {"macro_f1", macro_f1},   {"confusion", std::move(matrix)},
              {"folds", std::move(folds_json)}};
}

}  // namespace pip
