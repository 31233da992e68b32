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

#ifndef RDA_TRACKER_H_
#define RDA_TRACKER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rda/adam.h"
#include "rda/augment.h"
#include "rda/checkpoint.h"
#include "rda/corpus.h"
#include "rda/graph.h"
#include "rda/rng.h"
#include "rda/tensor.h"

namespace rda {

inline constexpr char kUnknownToken[] = "<unk>";
// Word embeddings start uniform in [-limit, limit]. Smaller starts leave the
// slot-value pairs nearly indistinguishable to the scorer for many epochs.
inline constexpr double kEmbeddingInitLimit = 1.0;

// Word list with id 0 reserved for the shared OOV token.
class Vocabulary {
 public:
  Vocabulary();
  explicit Vocabulary(std::vector<std::string> words);

  // Sorted union of user/system tokens of `train`, candidate tokens in
  // `store` (if any) and slot/value tokens of the ontology.
  static Vocabulary Build(const Corpus& train, const CandidateStore* store);

  int Id(const std::string& word) const;
  std::vector<int> Ids(std::span<const std::string> tokens) const;
  size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

struct TrackerOptions {
  int embedding_dim = 50;
  // Width of an encoder state; each direction of the bidirectional
  // encoder contributes half.
  int hidden_dim = 200;
  int scorer_dim = 200;
  double dropout = 0.2;
  double threshold = 0.5;
  int batch_size = 16;
  AdamOptions adam;
};

// Parameters of one direction of a tanh recurrent encoder.
struct RecurrentParams {
  Parameter input;      // embedding_dim x hidden_dim/2
  Parameter recurrent;  // hidden_dim/2 x hidden_dim/2
  Parameter bias;       // 1 x hidden_dim/2
};

// Reference tracker: embeddings, a bidirectional recurrent encoder each for
// the user utterance and the system input, and a two-layer scorer of
// [user summary; system summary; slot-value embedding] per ontology pair.
// The scorer's first layer is stored as three blocks, one per part of the
// concatenation.
class TrackerModel {
 public:
  // Embeddings ~ U(-1, 1), dense layers Xavier-uniform.
  TrackerModel(Vocabulary vocab, Ontology ontology, TrackerOptions options,
               Rng init_rng);

  const Vocabulary& vocab() const { return vocab_; }
  const Ontology& ontology() const { return ontology_; }
  const TrackerOptions& options() const { return options_; }
  const std::vector<SlotValue>& pairs() const { return pairs_; }

  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;

  const Tensor& embeddings() const { return embedding_.value; }
  // Mean of the token embeddings; OOV tokens use the <unk> row.
  RowVector PhraseEmbedding(std::span<const std::string> tokens) const;

  // Sets the scorer output layer (weights and bias) to zero, so every
  // probability is 0.5.
  void ZeroOutputLayer();

  Checkpoint ToCheckpoint(uint64_t seed) const;
  static TrackerModel FromCheckpoint(const Checkpoint& ckpt);

  // Bitwise parameter equality.
  bool SameParameters(const TrackerModel& other) const;

  // --- graph building (used by training, prediction and tests) ---

  // Projected slot-value embeddings, pairs() x scorer_dim. Computed once
  // per graph and shared by every turn in it.
  Var PairProjection(Graph& g) const;
  // Encoder states of `tokens`, tokens.size() x hidden_dim. With a
  // non-null `dropout_rng` the embeddings are dropped out.
  Var EncodeUser(Graph& g, std::span<const std::string> tokens,
                 Rng* dropout_rng) const;
  // Logits for every pair, pairs() x 1.
  Var TurnLogits(Graph& g, const Turn& turn, Var pair_projection,
                 Rng* dropout_rng) const;
  // Per-pair training targets for a turn: (slot, v) is 1 iff the turn label
  // sets slot to v, and (slot, none) is 1 iff the label leaves slot alone.
  Tensor Targets(const Turn& turn) const;

 private:
  Var Encode(Graph& g, const RecurrentParams& fwd, const RecurrentParams& bwd,
             std::span<const std::string> tokens, Rng* dropout_rng) const;
  void BuildPairIndex();

  Vocabulary vocab_;
  Ontology ontology_;
  TrackerOptions options_;
  std::vector<SlotValue> pairs_;
  std::vector<int> pair_token_ids_;
  Tensor pair_average_;  // pairs x pair_token_ids, row-stochastic

  Parameter embedding_;
  RecurrentParams user_fwd_, user_bwd_, system_fwd_, system_bwd_;
  Parameter scorer_user_;    // hidden_dim x scorer_dim
  Parameter scorer_system_;  // hidden_dim x scorer_dim
  Parameter scorer_pair_;    // embedding_dim x scorer_dim
  Parameter scorer_bias_;    // 1 x scorer_dim
  Parameter output_weight_;  // scorer_dim x 1
  Parameter output_bias_;    // 1 x 1
};

struct TurnPrediction {
  // slot -> value -> probability, for every ontology pair.
  std::map<std::string, std::map<std::string, double>> probabilities;
  // slot -> argmax value; ties go to the lexicographically smallest value.
  std::map<std::string, std::string> chosen;

  double ChosenProbability(const std::string& slot) const;
};

// Builds a prediction from per-pair probabilities in model.pairs() order.
TurnPrediction MakePrediction(const std::vector<SlotValue>& pairs,
                              std::span<const double> probabilities);

TurnPrediction PredictTurn(const TrackerModel& model, const Turn& turn);

// Slots whose argmax beats `threshold` with a value other than "none" are
// overwritten; every other slot keeps its previous value.
DialogState UpdateState(const DialogState& prev, const TurnPrediction& pred,
                        double threshold);

// The (slot, value) pairs a prediction would write, i.e. the predicted turn
// label.
TurnLabel PredictedTurnLabel(const TurnPrediction& pred, double threshold);

using TurnPredictor = std::function<TurnPrediction(const Turn&)>;

// Fraction of turns whose tracked state equals the gold state, threading
// the state from empty through every dialogue. Throws DataError if there
// are no turns.
double JointGoalAccuracy(std::span<const Dialogue> dialogues,
                         const TurnPredictor& predictor, double threshold);
double JointGoalAccuracy(const TrackerModel& model,
                         std::span<const Dialogue> dialogues);

// Mean of the user-encoder states over `span` (eval mode).
RowVector EncodeSpan(const TrackerModel& model, const Turn& turn, Span span);

// True iff the predicted turn label differs from the gold turn label
// (ignoring "none" entries in the gold label).
bool IsLargeLoss(const TrackerModel& model, const Turn& turn);

struct TrainStats {
  int64_t forward_passes = 0;   // per-turn scorer forwards with gradient
  int64_t backward_passes = 0;  // per-turn scorer backwards
  int64_t optimizer_steps = 0;
};

struct EpochReport {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  std::optional<double> validation_accuracy;
};

struct TrainTrackerOptions {
  int epochs = 10;
  int batch_size = 16;
};

// Mean per-turn training loss of `examples` (eval mode, no dropout).
double MeanLoss(const TrackerModel& model, std::span<const Turn* const> examples);

// Minimises the summed per-pair binary cross-entropy with ADAM. If
// `validation` is non-empty the returned model is the epoch with the best
// validation joint goal accuracy (earliest on ties); otherwise the final
// one. Throws DataError on empty data and NonFiniteError on divergence.
TrackerModel TrainTracker(const TrackerModel& init,
                          std::span<const Turn* const> examples,
                          std::span<const Dialogue> validation,
                          const TrainTrackerOptions& options, Rng rng,
                          const std::function<void(const EpochReport&)>&
                              on_epoch = {},
                          TrainStats* stats = nullptr);

struct FineTuneOptions {
  int passes = 1;
  int batch_size = 16;
  // Plain gradient descent: a step is proportional to the bag's loss
  // gradient, so turns the snapshot already fits barely move it. A fresh
  // ADAM normalises every coordinate of its first steps to ~learning_rate
  // whatever the bag holds.
  double learning_rate = 0.1;
  double clip_norm = 5.0;
};

// Copy of `snapshot` trained on `bag` with clipped mini-batch gradient
// descent; the snapshot is left untouched.
TrackerModel FineTune(const TrackerModel& snapshot,
                      std::span<const Turn* const> bag,
                      const FineTuneOptions& options, Rng rng,
                      TrainStats* stats = nullptr);

std::vector<const Turn*> TurnPointers(const Corpus& corpus);

}  // namespace rda

#endif  // RDA_TRACKER_H_
