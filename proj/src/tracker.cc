// Copyright 2026 The RDA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rda/tracker.h"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"
#include "rda/error.h"
#include "rda/init.h"

namespace rda {

using nlohmann::json;

// ---------------------------------------------------------------- Vocabulary

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> words) {
  words_.push_back(kUnknownToken);
  index_[kUnknownToken] = 0;
  for (std::string& w : words) {
    if (index_.contains(w)) continue;
    index_[w] = static_cast<int>(words_.size());
    words_.push_back(std::move(w));
  }
}

Vocabulary Vocabulary::Build(const Corpus& train, const CandidateStore* store) {
  std::set<std::string> words;
  auto add = [&words](std::span<const std::string> tokens) {
    words.insert(tokens.begin(), tokens.end());
  };
  for (const Dialogue& d : train.dialogues) {
    for (const Turn& t : d.turns) {
      add(t.user);
      add(t.system);
    }
  }
  if (store != nullptr) {
    for (const auto& [key, list] : store->entries()) {
      add(Tokenize(key));
      for (const Candidate& c : list) add(c.tokens);
    }
  }
  for (const auto& [slot, values] : train.ontology.slots()) {
    add(Tokenize(slot));
    for (const std::string& v : values) add(Tokenize(v));
  }
  words.erase(kUnknownToken);
  return Vocabulary(std::vector<std::string>(words.begin(), words.end()));
}

int Vocabulary::Id(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? 0 : it->second;
}

std::vector<int> Vocabulary::Ids(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(Id(t));
  return ids;
}

// -------------------------------------------------------------- TrackerModel

namespace {

RecurrentParams MakeRecurrent(const std::string& prefix, int in, int out,
                              Rng& rng) {
  RecurrentParams p{Parameter(prefix + ".input", in, out),
                    Parameter(prefix + ".recurrent", out, out),
                    Parameter(prefix + ".bias", 1, out)};
  XavierUniformInit(p.input.value, rng);
  XavierUniformInit(p.recurrent.value, rng);
  return p;
}

// Graph leaves for a model that is only read during the forward pass.
Parameter& Mut(const Parameter& p) { return const_cast<Parameter&>(p); }

void CheckOptions(const TrackerOptions& o) {
  if (o.embedding_dim <= 0 || o.hidden_dim <= 0 || o.scorer_dim <= 0 ||
      o.hidden_dim % 2 != 0) {
    throw ConfigError("tracker: dimensions must be positive, hidden even");
  }
  if (!(o.dropout >= 0.0 && o.dropout < 1.0)) {
    throw ConfigError("tracker: dropout must be in [0, 1)");
  }
  if (!(o.threshold > 0.0 && o.threshold < 1.0)) {
    throw ConfigError("tracker: threshold must be in (0, 1)");
  }
  if (o.batch_size < 1) throw ConfigError("tracker: batch size must be >= 1");
}

json OptionsToJson(const TrackerOptions& o) {
  return {{"embedding_dim", o.embedding_dim},
          {"hidden_dim", o.hidden_dim},
          {"scorer_dim", o.scorer_dim},
          {"dropout", o.dropout},
          {"threshold", o.threshold},
          {"batch_size", o.batch_size},
          {"learning_rate", o.adam.learning_rate},
          {"clip_norm", o.adam.clip_norm}};
}

TrackerOptions OptionsFromJson(const json& j) {
  TrackerOptions o;
  o.embedding_dim = j.at("embedding_dim").get<int>();
  o.hidden_dim = j.at("hidden_dim").get<int>();
  o.scorer_dim = j.at("scorer_dim").get<int>();
  o.dropout = j.at("dropout").get<double>();
  o.threshold = j.at("threshold").get<double>();
  o.batch_size = j.at("batch_size").get<int>();
  o.adam.learning_rate = j.at("learning_rate").get<double>();
  o.adam.clip_norm = j.at("clip_norm").get<double>();
  return o;
}

}  // namespace

TrackerModel::TrackerModel(Vocabulary vocab, Ontology ontology,
                           TrackerOptions options, Rng init_rng)
    : vocab_(std::move(vocab)),
      ontology_(std::move(ontology)),
      options_(options) {
  CheckOptions(options_);
  if (ontology_.slots().empty()) throw DataError("tracker: empty ontology");
  const int e = options_.embedding_dim;
  const int h = options_.hidden_dim;
  const int half = h / 2;
  const int s = options_.scorer_dim;
  Rng rng = init_rng.Substream("tracker-init");

  embedding_ = Parameter("embedding", static_cast<int>(vocab_.size()), e);
  UniformInit(embedding_.value, kEmbeddingInitLimit, rng);
  user_fwd_ = MakeRecurrent("user.fwd", e, half, rng);
  user_bwd_ = MakeRecurrent("user.bwd", e, half, rng);
  system_fwd_ = MakeRecurrent("system.fwd", e, half, rng);
  system_bwd_ = MakeRecurrent("system.bwd", e, half, rng);

  // The three first-layer blocks are one Xavier-initialised
  // (2h + e) x s matrix split by rows.
  Tensor first(2 * h + e, s);
  XavierUniformInit(first, rng);
  scorer_user_ = Parameter("scorer.user", h, s);
  scorer_system_ = Parameter("scorer.system", h, s);
  scorer_pair_ = Parameter("scorer.pair", e, s);
  scorer_user_.value = first.topRows(h);
  scorer_system_.value = first.middleRows(h, h);
  scorer_pair_.value = first.bottomRows(e);
  scorer_bias_ = Parameter("scorer.bias", 1, s);
  output_weight_ = Parameter("output.weight", s, 1);
  XavierUniformInit(output_weight_.value, rng);
  output_bias_ = Parameter("output.bias", 1, 1);
  BuildPairIndex();
}

void TrackerModel::BuildPairIndex() {
  pairs_ = ontology_.Pairs();
  std::vector<std::vector<int>> per_pair;
  for (const SlotValue& sv : pairs_) {
    Tokens tokens = Tokenize(sv.slot);
    const Tokens value = Tokenize(sv.value);
    tokens.insert(tokens.end(), value.begin(), value.end());
    per_pair.push_back(vocab_.Ids(tokens));
    if (per_pair.back().empty()) per_pair.back().push_back(0);
  }
  pair_token_ids_.clear();
  for (const auto& ids : per_pair) {
    pair_token_ids_.insert(pair_token_ids_.end(), ids.begin(), ids.end());
  }
  pair_average_ = Tensor::Zero(static_cast<Eigen::Index>(pairs_.size()),
                               static_cast<Eigen::Index>(pair_token_ids_.size()));
  Eigen::Index col = 0;
  for (size_t p = 0; p < per_pair.size(); ++p) {
    for (size_t k = 0; k < per_pair[p].size(); ++k) {
      pair_average_(static_cast<Eigen::Index>(p), col++) =
          1.0 / static_cast<double>(per_pair[p].size());
    }
  }
}

std::vector<Parameter*> TrackerModel::Parameters() {
  std::vector<Parameter*> out{&embedding_};
  for (RecurrentParams* r : {&user_fwd_, &user_bwd_, &system_fwd_, &system_bwd_}) {
    out.push_back(&r->input);
    out.push_back(&r->recurrent);
    out.push_back(&r->bias);
  }
  for (Parameter* p : {&scorer_user_, &scorer_system_, &scorer_pair_,
                       &scorer_bias_, &output_weight_, &output_bias_}) {
    out.push_back(p);
  }
  return out;
}

std::vector<const Parameter*> TrackerModel::Parameters() const {
  std::vector<const Parameter*> out;
  for (Parameter* p : const_cast<TrackerModel*>(this)->Parameters()) {
    out.push_back(p);
  }
  return out;
}

RowVector TrackerModel::PhraseEmbedding(std::span<const std::string> tokens) const {
  RowVector sum = RowVector::Zero(options_.embedding_dim);
  if (tokens.empty()) return sum;
  for (const std::string& t : tokens) sum += embedding_.value.row(vocab_.Id(t));
  return sum / static_cast<double>(tokens.size());
}

void TrackerModel::ZeroOutputLayer() {
  output_weight_.value.setZero();
  output_bias_.value.setZero();
}

Checkpoint TrackerModel::ToCheckpoint(uint64_t seed) const {
  Checkpoint ckpt;
  ckpt.seed = seed;
  json meta = {{"kind", "tracker"},
               {"options", OptionsToJson(options_)},
               {"ontology", ontology_.ToJson()},
               {"vocab", vocab_.words()}};
  ckpt.metadata = meta.dump();
  for (const Parameter* p : Parameters()) {
    ckpt.tensors.push_back({p->name, p->value});
  }
  return ckpt;
}

TrackerModel TrackerModel::FromCheckpoint(const Checkpoint& ckpt) {
  json meta;
  try {
    meta = json::parse(ckpt.metadata);
  } catch (const json::exception& e) {
    throw ParseError(std::string("tracker checkpoint metadata: ") + e.what());
  }
  if (meta.value("kind", "") != "tracker") {
    throw DataError("checkpoint does not hold a tracker");
  }
  std::vector<std::string> words = meta.at("vocab").get<std::vector<std::string>>();
  if (!words.empty() && words.front() == kUnknownToken) words.erase(words.begin());
  TrackerModel model(Vocabulary(std::move(words)),
                     Ontology::FromJson(meta.at("ontology"), "checkpoint"),
                     OptionsFromJson(meta.at("options")), Rng(ckpt.seed));
  for (Parameter* p : model.Parameters()) {
    const Tensor& v = ckpt.Get(p->name);
    if (v.rows() != p->value.rows() || v.cols() != p->value.cols()) {
      throw DataError("checkpoint tensor '" + p->name + "' is " +
                      ShapeString(v) + ", expected " + ShapeString(p->value));
    }
    p->value = v;
    p->ZeroGrad();
  }
  return model;
}

bool TrackerModel::SameParameters(const TrackerModel& other) const {
  const auto a = Parameters();
  const auto b = other.Parameters();
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i]->value.rows() != b[i]->value.rows() ||
        a[i]->value.cols() != b[i]->value.cols()) {
      return false;
    }
    if (std::memcmp(a[i]->value.data(), b[i]->value.data(),
                    sizeof(double) * static_cast<size_t>(a[i]->value.size())) != 0) {
      return false;
    }
  }
  return true;
}

Var TrackerModel::PairProjection(Graph& g) const {
  Var tokens = g.Gather(Mut(embedding_), pair_token_ids_);
  Var averaged = g.MatMul(g.Input(pair_average_), tokens);
  return g.MatMul(averaged, g.Param(Mut(scorer_pair_)));
}

Var TrackerModel::Encode(Graph& g, const RecurrentParams& fwd,
                         const RecurrentParams& bwd,
                         std::span<const std::string> tokens,
                         Rng* dropout_rng) const {
  const int n = static_cast<int>(tokens.size());
  if (n == 0) return g.Input(Tensor(0, options_.hidden_dim));
  const std::vector<int> ids = vocab_.Ids(tokens);
  Var embedded = g.Gather(Mut(embedding_), ids);
  if (dropout_rng != nullptr && options_.dropout > 0.0) {
    embedded = g.Dropout(embedded, DropoutMask(n, options_.embedding_dim,
                                               options_.dropout, *dropout_rng));
  }
  auto run = [&](const RecurrentParams& p, bool reverse) {
    Var projected = g.Add(g.MatMul(embedded, g.Param(Mut(p.input))),
                          g.Param(Mut(p.bias)));
    return g.Recurrent(projected, g.Param(Mut(p.recurrent)), reverse);
  };
  const Var parts[2] = {run(fwd, false), run(bwd, true)};
  return g.ConcatCols(parts);
}

Var TrackerModel::EncodeUser(Graph& g, std::span<const std::string> tokens,
                             Rng* dropout_rng) const {
  return Encode(g, user_fwd_, user_bwd_, tokens, dropout_rng);
}

Var TrackerModel::TurnLogits(Graph& g, const Turn& turn, Var pair_projection,
                             Rng* dropout_rng) const {
  auto summary = [&](Var states) {
    if (g.Value(states).rows() == 0) {
      return g.Input(Tensor::Zero(1, options_.hidden_dim));
    }
    return g.MeanRows(states);
  };
  Var user = summary(EncodeUser(g, turn.user, dropout_rng));
  Var system = summary(
      Encode(g, system_fwd_, system_bwd_, turn.system, dropout_rng));
  Var context = g.Add(g.Add(g.MatMul(user, g.Param(Mut(scorer_user_))),
                            g.MatMul(system, g.Param(Mut(scorer_system_)))),
                      g.Param(Mut(scorer_bias_)));
  Var hidden = g.Tanh(g.Add(pair_projection, context));
  return g.Add(g.MatMul(hidden, g.Param(Mut(output_weight_))),
               g.Param(Mut(output_bias_)));
}

Tensor TrackerModel::Targets(const Turn& turn) const {
  Tensor t = Tensor::Zero(static_cast<Eigen::Index>(pairs_.size()), 1);
  for (size_t i = 0; i < pairs_.size(); ++i) {
    const SlotValue& sv = pairs_[i];
    auto it = std::find_if(turn.turn_label.begin(), turn.turn_label.end(),
                           [&](const SlotValue& l) { return l.slot == sv.slot; });
    const std::string& labelled = it == turn.turn_label.end()
                                      ? std::string(kNoneValue)
                                      : it->value;
    t(static_cast<Eigen::Index>(i), 0) = labelled == sv.value ? 1.0 : 0.0;
  }
  return t;
}

// --------------------------------------------------------------- prediction

double TurnPrediction::ChosenProbability(const std::string& slot) const {
  return probabilities.at(slot).at(chosen.at(slot));
}

TurnPrediction MakePrediction(const std::vector<SlotValue>& pairs,
                              std::span<const double> probabilities) {
  if (pairs.size() != probabilities.size()) {
    throw ShapeError("prediction: " + std::to_string(probabilities.size()) +
                     " probabilities for " + std::to_string(pairs.size()) +
                     " pairs");
  }
  TurnPrediction pred;
  for (size_t i = 0; i < pairs.size(); ++i) {
    pred.probabilities[pairs[i].slot][pairs[i].value] = probabilities[i];
  }
  for (const auto& [slot, values] : pred.probabilities) {
    const std::string* best = nullptr;
    double best_p = -1.0;
    for (const auto& [value, p] : values) {  // lexicographic order
      if (p > best_p) {
        best_p = p;
        best = &value;
      }
    }
    pred.chosen[slot] = *best;
  }
  return pred;
}

namespace {

// Evaluates turns against a frozen model, sharing the pair projection.
class FrozenScorer {
 public:
  explicit FrozenScorer(const TrackerModel& model) : model_(model) {
    Graph g;
    pair_projection_ = g.Value(model.PairProjection(g));
  }

  std::vector<double> Probabilities(const Turn& turn) const {
    Graph g;
    Var logits = model_.TurnLogits(g, turn, g.Input(pair_projection_), nullptr);
    Var probs = g.Sigmoid(logits);
    const Tensor& p = g.Value(probs);
    return std::vector<double>(p.data(), p.data() + p.size());
  }

  TurnPrediction Predict(const Turn& turn) const {
    return MakePrediction(model_.pairs(), Probabilities(turn));
  }

 private:
  const TrackerModel& model_;
  Tensor pair_projection_;
};

}  // namespace

TurnPrediction PredictTurn(const TrackerModel& model, const Turn& turn) {
  return FrozenScorer(model).Predict(turn);
}

DialogState UpdateState(const DialogState& prev, const TurnPrediction& pred,
                        double threshold) {
  DialogState next = prev;
  for (const SlotValue& sv : PredictedTurnLabel(pred, threshold)) {
    next[sv.slot] = sv.value;
  }
  return next;
}

TurnLabel PredictedTurnLabel(const TurnPrediction& pred, double threshold) {
  TurnLabel label;
  for (const auto& [slot, value] : pred.chosen) {
    if (value == kNoneValue) continue;
    if (pred.probabilities.at(slot).at(value) > threshold) {
      label.push_back({slot, value});
    }
  }
  return label;
}

double JointGoalAccuracy(std::span<const Dialogue> dialogues,
                         const TurnPredictor& predictor, double threshold) {
  size_t turns = 0;
  size_t correct = 0;
  for (const Dialogue& d : dialogues) {
    DialogState state;
    for (const Turn& t : d.turns) {
      state = UpdateState(state, predictor(t), threshold);
      ++turns;
      if (state == t.gold_state) ++correct;
    }
  }
  if (turns == 0) throw DataError("joint goal accuracy: no turns to evaluate");
  return static_cast<double>(correct) / static_cast<double>(turns);
}

double JointGoalAccuracy(const TrackerModel& model,
                         std::span<const Dialogue> dialogues) {
  FrozenScorer scorer(model);
  return JointGoalAccuracy(
      dialogues, [&scorer](const Turn& t) { return scorer.Predict(t); },
      model.options().threshold);
}

RowVector EncodeSpan(const TrackerModel& model, const Turn& turn, Span span) {
  const int n = static_cast<int>(turn.user.size());
  if (span.start < 0 || span.end > n || span.start >= span.end) {
    throw DataError("encode_span: span [" + std::to_string(span.start) + ", " +
                    std::to_string(span.end) + ") out of bounds for " +
                    std::to_string(n) + " tokens");
  }
  Graph g;
  const Tensor& states = g.Value(model.EncodeUser(g, turn.user, nullptr));
  return states.middleRows(span.start, span.size()).colwise().mean();
}

bool IsLargeLoss(const TrackerModel& model, const Turn& turn) {
  const TurnPrediction pred = PredictTurn(model, turn);
  TurnLabel gold;
  for (const SlotValue& sv : turn.turn_label) {
    if (sv.value != kNoneValue) gold.push_back(sv);
  }
  return PredictedTurnLabel(pred, model.options().threshold) != gold;
}

// ----------------------------------------------------------------- training

std::vector<const Turn*> TurnPointers(const Corpus& corpus) {
  std::vector<const Turn*> out;
  for (const Dialogue& d : corpus.dialogues) {
    for (const Turn& t : d.turns) out.push_back(&t);
  }
  return out;
}

double MeanLoss(const TrackerModel& model,
                std::span<const Turn* const> examples) {
  if (examples.empty()) throw DataError("mean loss: no examples");
  Graph base;
  const Tensor projection = base.Value(model.PairProjection(base));
  double total = 0.0;
  for (const Turn* t : examples) {
    Graph g;
    Var logits = model.TurnLogits(g, *t, g.Input(projection), nullptr);
    total += g.Value(g.BceWithLogits(logits, model.Targets(*t)))(0, 0);
  }
  return total / static_cast<double>(examples.size());
}

namespace {

// Fills the gradients of the mean batch loss and returns the summed loss.
double BatchGradients(TrackerModel& model, const std::vector<Parameter*>& params,
                      std::span<const Turn* const> batch, Rng& dropout,
                      TrainStats* stats) {
  for (Parameter* p : params) p->ZeroGrad();
  Graph g;
  Var projection = model.PairProjection(g);
  Var total;
  for (const Turn* t : batch) {
    Var logits = model.TurnLogits(g, *t, projection, &dropout);
    Var loss = g.BceWithLogits(logits, model.Targets(*t));
    total = total.id < 0 ? loss : g.Add(total, loss);
  }
  const double sum = g.Value(total)(0, 0);
  if (!std::isfinite(sum)) throw NonFiniteError("tracker: training loss is not finite");
  g.Backward(g.Scale(total, 1.0 / static_cast<double>(batch.size())));
  if (stats != nullptr) {
    stats->forward_passes += static_cast<int64_t>(batch.size());
    stats->backward_passes += static_cast<int64_t>(batch.size());
    ++stats->optimizer_steps;
  }
  return sum;
}

// Clipped gradient-descent step; nothing is updated on a non-finite
// gradient.
void SgdStep(const std::vector<Parameter*>& params, double learning_rate,
             double clip_norm) {
  for (const Parameter* p : params) {
    if (!p->grad.allFinite()) {
      throw NonFiniteError("fine-tune: gradient of '" + p->name + "' is not finite");
    }
  }
  double scale = 1.0;
  if (clip_norm > 0.0) {
    const double norm = GradientNorm(params);
    if (norm > clip_norm) scale = clip_norm / norm;
  }
  for (Parameter* p : params) p->value -= (learning_rate * scale) * p->grad;
}

void Shuffle(std::vector<const Turn*>& order, Rng& rng) {
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformIndex(i)]);
  }
}

}  // namespace

TrackerModel TrainTracker(const TrackerModel& init,
                          std::span<const Turn* const> examples,
                          std::span<const Dialogue> validation,
                          const TrainTrackerOptions& options, Rng rng,
                          const std::function<void(const EpochReport&)>& on_epoch,
                          TrainStats* stats) {
  if (examples.empty()) throw DataError("train tracker: no training turns");
  if (options.batch_size < 1) throw ConfigError("train tracker: batch size < 1");
  TrackerModel model = init;
  if (options.epochs <= 0) return model;

  Adam adam(model.options().adam);
  const std::vector<Parameter*> params = model.Parameters();
  Rng shuffle = rng.Substream("shuffle");
  Rng dropout = rng.Substream("dropout");
  std::vector<const Turn*> order(examples.begin(), examples.end());
  std::optional<TrackerModel> best;
  double best_accuracy = -1.0;

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    Shuffle(order, shuffle);
    double total = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(options.batch_size)) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(options.batch_size));
      total += BatchGradients(model, params,
                              std::span(order).subspan(start, end - start),
                              dropout, stats);
      adam.Step(params);
    }
    EpochReport report;
    report.epoch = epoch;
    report.loss = total / static_cast<double>(order.size());
    if (!validation.empty()) {
      const double acc = JointGoalAccuracy(model, validation);
      report.validation_accuracy = acc;
      if (acc > best_accuracy) {
        best_accuracy = acc;
        best = model;
      }
    }
    if (on_epoch) on_epoch(report);
  }
  return best ? std::move(*best) : model;
}

TrackerModel FineTune(const TrackerModel& snapshot,
                      std::span<const Turn* const> bag,
                      const FineTuneOptions& options, Rng rng, TrainStats* stats) {
  if (bag.empty()) throw DataError("fine-tune: empty bag");
  if (options.batch_size < 1) throw ConfigError("fine-tune: batch size < 1");
  TrackerModel model = snapshot;
  const std::vector<Parameter*> params = model.Parameters();
  Rng shuffle = rng.Substream("shuffle");
  Rng dropout = rng.Substream("dropout");
  std::vector<const Turn*> order(bag.begin(), bag.end());
  const auto batch = static_cast<size_t>(options.batch_size);
  for (int pass = 0; pass < options.passes; ++pass) {
    Shuffle(order, shuffle);
    for (size_t start = 0; start < order.size(); start += batch) {
      const size_t end = std::min(order.size(), start + batch);
      BatchGradients(model, params, std::span(order).subspan(start, end - start),
                     dropout, stats);
      SgdStep(params, options.learning_rate, options.clip_norm);
    }
  }
  return model;
}

}  // namespace rda
