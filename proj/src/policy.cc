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

#include "rda/policy.h"

#include <cmath>
#include <cstring>
#include <map>
#include <string>

#include "json.hpp"
#include "rda/error.h"
#include "rda/init.h"

namespace rda {

PolicyNet::PolicyNet(int state_dim, int hidden_dim, Rng rng)
    : state_dim_(state_dim),
      hidden_dim_(hidden_dim),
      hidden_weight_("policy.hidden.weight", state_dim, hidden_dim),
      hidden_bias_("policy.hidden.bias", 1, hidden_dim),
      output_weight_("policy.output.weight", hidden_dim, 1),
      output_bias_("policy.output.bias", 1, 1) {
  if (state_dim <= 0 || hidden_dim <= 0) {
    throw ConfigError("policy: dimensions must be positive");
  }
  XavierUniformInit(hidden_weight_.value, rng);
  // Word embeddings start at unit scale, so the candidate blocks of the state
  // are ~10x larger than the Xavier fan-in assumes; shrink to match.
  hidden_weight_.value *= 0.1;
  XavierUniformInit(output_weight_.value, rng);
}

Tensor PolicyNet::Scores(const Tensor& states) const {
  Graph g;
  return g.Value(ScoresVar(g, g.Input(states)));
}

Var PolicyNet::ScoresVar(Graph& g, Var states) const {
  if (g.Value(states).cols() != state_dim_) {
    throw ShapeError("policy: state has " +
                     std::to_string(g.Value(states).cols()) +
                     " columns, expected " + std::to_string(state_dim_));
  }
  auto& self = const_cast<PolicyNet&>(*this);
  Var hidden = g.Tanh(g.Add(g.MatMul(states, g.Param(self.hidden_weight_)),
                            g.Param(self.hidden_bias_)));
  return g.Sigmoid(g.Add(g.MatMul(hidden, g.Param(self.output_weight_)),
                         g.Param(self.output_bias_)));
}

std::vector<Parameter*> PolicyNet::Parameters() {
  return {&hidden_weight_, &hidden_bias_, &output_weight_, &output_bias_};
}

std::vector<const Parameter*> PolicyNet::Parameters() const {
  return {&hidden_weight_, &hidden_bias_, &output_weight_, &output_bias_};
}

bool PolicyNet::SameParameters(const PolicyNet& other) const {
  const auto a = Parameters();
  const auto b = other.Parameters();
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i]->value.rows() != b[i]->value.rows() ||
        a[i]->value.cols() != b[i]->value.cols() ||
        std::memcmp(a[i]->value.data(), b[i]->value.data(),
                    sizeof(double) * static_cast<size_t>(a[i]->value.size())) != 0) {
      return false;
    }
  }
  return true;
}

Checkpoint PolicyNet::ToCheckpoint(uint64_t seed) const {
  Checkpoint ckpt;
  ckpt.seed = seed;
  ckpt.metadata = nlohmann::json{{"kind", "policy"},
                                 {"state_dim", state_dim_},
                                 {"hidden_dim", hidden_dim_}}
                      .dump();
  for (const Parameter* p : Parameters()) ckpt.tensors.push_back({p->name, p->value});
  return ckpt;
}

PolicyNet PolicyNet::FromCheckpoint(const Checkpoint& ckpt) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ckpt.metadata);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("policy checkpoint metadata: ") + e.what());
  }
  if (meta.value("kind", "") != "policy") {
    throw DataError("checkpoint does not hold a policy");
  }
  PolicyNet policy(meta.at("state_dim").get<int>(),
                   meta.at("hidden_dim").get<int>(), Rng(ckpt.seed));
  for (Parameter* p : policy.Parameters()) {
    const Tensor& v = ckpt.Get(p->name);
    if (v.rows() != p->value.rows() || v.cols() != p->value.cols()) {
      throw DataError("checkpoint tensor '" + p->name + "' has shape " +
                      ShapeString(v));
    }
    p->value = v;
  }
  return policy;
}

PolicyNet ReinitializePolicy(int state_dim, Rng rng, int hidden_dim) {
  return PolicyNet(state_dim, hidden_dim, rng.Substream("policy-init"));
}

RowVector Featurize(const RowVector& span_context,
                    const RowVector& span_embedding,
                    const RowVector& candidate_embedding) {
  if (span_embedding.size() != candidate_embedding.size()) {
    throw ShapeError("featurize: span embedding has " +
                     std::to_string(span_embedding.size()) +
                     " dims, candidate embedding " +
                     std::to_string(candidate_embedding.size()));
  }
  const Eigen::Index c = span_context.size();
  const Eigen::Index e = span_embedding.size();
  RowVector s(c + 3 * e);
  s << span_context, candidate_embedding,
      candidate_embedding - span_embedding,
      candidate_embedding.cwiseProduct(span_embedding);
  return s;
}

int PolicyStateDim(const TrackerModel& tracker) {
  return tracker.options().hidden_dim + 3 * tracker.options().embedding_dim;
}

namespace {

Tensor StatesFromContext(const TrackerModel& tracker,
                         const AugmentationSite& site,
                         const RowVector& context) {
  const RowVector span_emb =
      tracker.PhraseEmbedding(site.candidates.front().tokens);
  Tensor states(static_cast<Eigen::Index>(site.candidates.size()),
                PolicyStateDim(tracker));
  for (size_t k = 0; k < site.candidates.size(); ++k) {
    states.row(static_cast<Eigen::Index>(k)) = Featurize(
        context, span_emb, tracker.PhraseEmbedding(site.candidates[k].tokens));
  }
  return states;
}

}  // namespace

Tensor SiteStates(const TrackerModel& tracker, const Corpus& corpus,
                  const AugmentationSite& site) {
  const Turn& turn = SiteTurn(corpus, site);
  return StatesFromContext(tracker, site, EncodeSpan(tracker, turn, site.span));
}

std::vector<Tensor> AllSiteStates(const TrackerModel& tracker,
                                  const Corpus& corpus, const SiteIndex& index) {
  std::map<std::pair<size_t, size_t>, Tensor> encoded;
  std::vector<Tensor> out;
  out.reserve(index.sites.size());
  for (const AugmentationSite& site : index.sites) {
    const auto key = std::make_pair(site.dialogue_index, site.turn_index);
    auto it = encoded.find(key);
    if (it == encoded.end()) {
      const Turn& turn = SiteTurn(corpus, site);
      Graph g;
      it = encoded.emplace(key, g.Value(tracker.EncodeUser(g, turn.user, nullptr)))
               .first;
    }
    const Tensor& states = it->second;
    if (site.span.start < 0 || site.span.end > states.rows() ||
        site.span.start >= site.span.end) {
      throw DataError("site span out of bounds in dialogue '" +
                      site.dialogue_id + "'");
    }
    const RowVector context =
        states.middleRows(site.span.start, site.span.size()).colwise().mean();
    out.push_back(StatesFromContext(tracker, site, context));
  }
  return out;
}

std::vector<double> CandidateDistribution(const PolicyNet& policy,
                                          const Tensor& states) {
  if (states.rows() == 0) throw DataError("policy: empty candidate set");
  const Tensor scores = policy.Scores(states);
  const double total = scores.sum();
  std::vector<double> probs(static_cast<size_t>(scores.rows()));
  for (Eigen::Index k = 0; k < scores.rows(); ++k) {
    probs[static_cast<size_t>(k)] = scores(k, 0) / total;
  }
  return probs;
}

std::vector<double> CandidateDistribution(const PolicyNet& policy,
                                          const AugmentationSite& site,
                                          const TrackerModel& tracker,
                                          const Corpus& corpus) {
  return CandidateDistribution(policy, SiteStates(tracker, corpus, site));
}

SampledCandidate SampleCandidate(const PolicyNet& policy, const Tensor& states,
                                 Rng& rng) {
  const std::vector<double> probs = CandidateDistribution(policy, states);
  if (probs.size() == 1) return {0, 0.0};
  const size_t k = rng.Categorical(probs);
  return {k, std::log(probs[k])};
}

Var PolicyLoss(Graph& g, PolicyNet& policy,
               std::span<const PolicyExample> examples, int num_bags) {
  if (num_bags < 1) throw ConfigError("policy loss: num_bags < 1");
  Var total;
  for (const PolicyExample& ex : examples) {
    if (ex.states == nullptr || ex.action >= static_cast<size_t>(ex.states->rows())) {
      throw DataError("policy loss: action outside the candidate set");
    }
    Var scores = policy.ScoresVar(g, g.Input(*ex.states));
    Var log_pi = g.Sub(g.Log(g.Pick(scores, static_cast<int>(ex.action), 0)),
                       g.Log(g.Sum(scores)));
    Var term = g.Scale(log_pi, ex.reward);
    total = total.id < 0 ? term : g.Add(total, term);
  }
  if (total.id < 0) return g.Input(Tensor::Zero(1, 1));
  return g.Scale(total, -1.0 / static_cast<double>(num_bags));
}

void PolicyGradientStep(PolicyNet& policy, Adam& optimizer,
                        std::span<const PolicyExample> examples, int num_bags) {
  std::vector<Parameter*> params = policy.Parameters();
  for (Parameter* p : params) p->ZeroGrad();
  Graph g;
  Var loss = PolicyLoss(g, policy, examples, num_bags);
  g.Backward(loss);
  optimizer.Step(params);
}

}  // namespace rda
