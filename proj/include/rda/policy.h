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

#ifndef RDA_POLICY_H_
#define RDA_POLICY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rda/adam.h"
#include "rda/augment.h"
#include "rda/checkpoint.h"
#include "rda/corpus.h"
#include "rda/graph.h"
#include "rda/rng.h"
#include "rda/tensor.h"
#include "rda/tracker.h"

namespace rda {

// Scores f(s, p') = sigmoid(w2 . tanh(W1 s + b1) + b2) in (0, 1).
class PolicyNet {
 public:
  // Fresh parameters: Xavier-uniform weights (first layer scaled by 0.1),
  // zero biases.
  PolicyNet(int state_dim, int hidden_dim, Rng rng);

  int state_dim() const { return state_dim_; }
  int hidden_dim() const { return hidden_dim_; }

  // One score per row of `states` (|C_p| x state_dim), as a column.
  Tensor Scores(const Tensor& states) const;
  Var ScoresVar(Graph& g, Var states) const;

  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;
  bool SameParameters(const PolicyNet& other) const;

  Checkpoint ToCheckpoint(uint64_t seed) const;
  static PolicyNet FromCheckpoint(const Checkpoint& ckpt);

 private:
  int state_dim_;
  int hidden_dim_;
  Parameter hidden_weight_;  // state_dim x hidden_dim
  Parameter hidden_bias_;    // 1 x hidden_dim
  Parameter output_weight_;  // hidden_dim x 1
  Parameter output_bias_;    // 1 x 1
};

inline constexpr int kPolicyHiddenDim = 200;

// A freshly initialised policy drawn from the "policy-init" substream of
// `rng`; independent of any previously trained policy.
PolicyNet ReinitializePolicy(int state_dim, Rng rng,
                             int hidden_dim = kPolicyHiddenDim);

// s = [p_ctx; p'_emb; p'_emb - p_emb; p'_emb o p_emb].
RowVector Featurize(const RowVector& span_context, const RowVector& span_embedding,
                    const RowVector& candidate_embedding);

int PolicyStateDim(const TrackerModel& tracker);

// Policy states of every candidate of `site`, |C_p| x state_dim, using the
// tracker's user encoder for the span context and its (frozen) embedding
// table for phrase embeddings.
Tensor SiteStates(const TrackerModel& tracker, const Corpus& corpus,
                  const AugmentationSite& site);

// SiteStates for every site of the index, encoding each turn once.
std::vector<Tensor> AllSiteStates(const TrackerModel& tracker,
                                  const Corpus& corpus, const SiteIndex& index);

// pi(s, p') = f(s, p') / sum over C_p of f, in candidate order.
std::vector<double> CandidateDistribution(const PolicyNet& policy,
                                          const Tensor& states);
std::vector<double> CandidateDistribution(const PolicyNet& policy,
                                          const AugmentationSite& site,
                                          const TrackerModel& tracker,
                                          const Corpus& corpus);

struct SampledCandidate {
  size_t index = 0;
  double log_probability = 0.0;
};

SampledCandidate SampleCandidate(const PolicyNet& policy, const Tensor& states,
                                 Rng& rng);

// One (state, action, reward) triple of a policy-gradient update.
struct PolicyExample {
  const Tensor* states = nullptr;  // |C_p| x state_dim
  size_t action = 0;
  double reward = 0.0;
};

// -(1/num_bags) * sum_i reward_i * log pi(s_i, a_i).
Var PolicyLoss(Graph& g, PolicyNet& policy,
               std::span<const PolicyExample> examples, int num_bags);

// Descent step on PolicyLoss, i.e. an ascent step on the expected reward.
// Throws NonFiniteError on a non-finite gradient (nothing is updated).
void PolicyGradientStep(PolicyNet& policy, Adam& optimizer,
                        std::span<const PolicyExample> examples, int num_bags);

}  // namespace rda

#endif  // RDA_POLICY_H_
