#include "antsess/antclust.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "antsess/error.hpp"

namespace antsess::antclust {

std::size_t NestRegistry::size_of(Label nest) const {
  const auto it = sizes_.find(nest);
  return it == sizes_.end() ? 0 : it->second;
}

void NestRegistry::assign(std::size_t ant, Label nest) {
  Label& current = membership_.at(ant);
  if (current == nest) return;
  if (current != kNoNest) {
    auto it = sizes_.find(current);
    if (--it->second == 0) sizes_.erase(it);
  }
  if (nest != kNoNest) ++sizes_[nest];
  current = nest;
}

bool NestRegistry::consistent() const {
  std::map<Label, std::size_t> recount;
  for (Label l : membership_) {
    if (l == kNoNest) continue;
    if (l >= next_label_) return false;
    ++recount[l];
  }
  return recount == sizes_;
}

void Config::validate() const {
  if (iter_multiplier == 0) throw ConfigError("iter_multiplier must be a positive integer");
  if (init_meetings == 0) throw ConfigError("init_meetings must be a positive integer");
  if (!(min_nest_fraction >= 0.0 && min_nest_fraction < 1.0))
    throw ConfigError("min_nest_fraction must be in [0, 1)");
}

double learn_template(const Ant& ant, std::span<const Ant> partners,
                      const SimilarityMatrix& sims) {
  if (partners.empty()) return 0.0;
  double sum = 0.0;
  double best = 0.0;
  for (const Ant& other : partners) {
    const double s = sims(ant.genome, other.genome);
    sum += s;
    best = std::max(best, s);
  }
  const double mean = sum / static_cast<double>(partners.size());
  return std::clamp((mean + best) / 2.0, 0.0, 1.0);
}

bool acceptance(const Ant& a, const Ant& b, const SimilarityMatrix& sims) {
  const double s = sims(a.genome, b.genome);
  return s > a.threshold && s > b.threshold;
}

MeetingOutcome meet(const Ant& a, const Ant& b, NestRegistry& nests,
                    const SimilarityMatrix& sims) {
  const Label la = nests.label(a.id);
  const Label lb = nests.label(b.id);

  if (la == kNoNest && lb == kNoNest) {
    if (!acceptance(a, b, sims)) return MeetingOutcome::NoOp;
    const Label fresh = nests.issue_label();
    nests.assign(a.id, fresh);
    nests.assign(b.id, fresh);
    return MeetingOutcome::NewNest;
  }
  if (la == kNoNest || lb == kNoNest) {
    if (!acceptance(a, b, sims)) return MeetingOutcome::NoOp;
    if (la == kNoNest) {
      nests.assign(a.id, lb);
    } else {
      nests.assign(b.id, la);
    }
    return MeetingOutcome::Adopted;
  }
  if (la == lb || !acceptance(a, b, sims)) return MeetingOutcome::NoOp;

  const auto sa = nests.size_of(la);
  const auto sb = nests.size_of(lb);
  const bool a_moves = sa < sb || (sa == sb && la > lb);
  if (a_moves) {
    nests.assign(a.id, lb);
  } else {
    nests.assign(b.id, la);
  }
  return MeetingOutcome::Defected;
}

std::size_t ClusterAssignment::cluster_count() const {
  std::set<Label> distinct(labels.begin(), labels.end());
  return distinct.size();
}

Colony::Colony(const SimilarityMatrix& sims, const Config& cfg)
    : sims_(&sims), cfg_(cfg), rng_(cfg.rng_seed), nests_(sims.size()) {
  cfg_.validate();
  ants_.reserve(sims.size());
  for (std::size_t i = 0; i < sims.size(); ++i) ants_.push_back(Ant{i, i, 0.0});
}

std::uint64_t Colony::iterations() const {
  return static_cast<std::uint64_t>(cfg_.iter_multiplier) * ants_.size();
}

std::vector<std::size_t> Colony::sample_partners(std::size_t ant, std::size_t count) {
  const std::size_t others = ants_.size() - 1;
  std::vector<std::size_t> picked;
  if (count >= others) {
    picked.reserve(others);
    for (std::size_t k = 0; k < ants_.size(); ++k)
      if (k != ant) picked.push_back(k);
    return picked;
  }
  // Floyd's sampling of `count` distinct values from [0, others), then the
  // sampled slot is shifted past the ant itself.
  std::set<std::size_t> chosen;
  for (std::size_t j = others - count; j < others; ++j) {
    const auto t = static_cast<std::size_t>(rng_.uniform_index(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  picked.reserve(count);
  for (auto c : chosen) picked.push_back(c < ant ? c : c + 1);
  return picked;
}

void Colony::learn_templates() {
  std::vector<Ant> partners;
  for (auto& ant : ants_) {
    partners.clear();
    for (auto k : sample_partners(ant.id, cfg_.init_meetings)) partners.push_back(ants_[k]);
    ant.threshold = learn_template(ant, partners, *sims_);
  }
}

MeetingOutcome Colony::step() {
  const std::uint64_t n = ants_.size();
  if (n < 2) return MeetingOutcome::NoOp;
  const auto i = rng_.uniform_index(n);
  auto j = rng_.uniform_index(n - 1);
  if (j >= i) ++j;
  return meet(ants_[i], ants_[j], nests_, *sims_);
}

void Colony::simulate() {
  if (ants_.size() < 2) return;
  for (std::uint64_t it = iterations(); it > 0; --it) step();
}

std::size_t Colony::prune() {
  const auto n = ants_.size();
  const auto min_size = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(cfg_.min_nest_fraction * static_cast<double>(n))));
  std::set<Label> doomed;
  for (const auto& [label, size] : nests_.sizes())
    if (size < min_size) doomed.insert(label);
  if (doomed.empty()) return 0;
  for (std::size_t a = 0; a < n; ++a)
    if (doomed.count(nests_.label(a))) nests_.assign(a, kNoNest);
  return doomed.size();
}

void Colony::reassign_orphans() {
  std::vector<std::size_t> labeled;
  std::vector<std::size_t> orphans;
  for (const auto& ant : ants_) {
    (nests_.label(ant.id) == kNoNest ? orphans : labeled).push_back(ant.id);
  }
  if (orphans.empty()) return;
  if (labeled.empty()) {
    const Label only = nests_.issue_label();
    for (auto a : orphans) nests_.assign(a, only);
    return;
  }
  // Targets are chosen against the post-prune labels only, so the result
  // does not depend on orphan processing order.
  std::vector<Label> target(orphans.size());
  for (std::size_t k = 0; k < orphans.size(); ++k) {
    const Ant& orphan = ants_[orphans[k]];
    std::size_t best = labeled.front();
    double best_sim = (*sims_)(orphan.genome, ants_[best].genome);
    for (auto cand : labeled) {
      const double s = (*sims_)(orphan.genome, ants_[cand].genome);
      if (s > best_sim) {
        best_sim = s;
        best = cand;
      }
    }
    target[k] = nests_.label(best);
  }
  for (std::size_t k = 0; k < orphans.size(); ++k) nests_.assign(orphans[k], target[k]);
}

ClusterAssignment Colony::assignment() const {
  ClusterAssignment out;
  out.labels.reserve(ants_.size());
  std::unordered_map<Label, Label> dense;
  for (const auto& ant : ants_) {
    const Label raw = nests_.label(ant.id);
    auto [it, inserted] = dense.try_emplace(raw, static_cast<Label>(dense.size() + 1));
    out.labels.push_back(it->second);
  }
  return out;
}

ClusterAssignment run(const SimilarityMatrix& sims, const Config& cfg, PhaseTimings* timings) {
  if (sims.size() == 0) throw EmptyInput("no sessions to cluster");
  Colony colony(sims, cfg);
  Stopwatch watch;
  colony.learn_templates();
  const double init = watch.lap();
  colony.simulate();
  const double simulate = watch.lap();
  colony.prune();
  colony.reassign_orphans();
  const double assign = watch.lap();
  if (timings) {
    timings->init = init;
    timings->simulate = simulate;
    timings->assign = assign;
  }
  return colony.assignment();
}

ClusterAssignment run(std::span<const Session> sessions, const SimilarityMeasure& measure,
                      const Config& cfg, PhaseTimings* timings, unsigned threads) {
  if (sessions.empty()) throw EmptyInput("no sessions to cluster");
  cfg.validate();
  measure.validate();
  Stopwatch watch;
  const auto sims = SimilarityMatrix::compute(sessions, measure, threads);
  if (timings) timings->similarity = watch.seconds();
  return run(sims, cfg, timings);
}

}  // namespace antsess::antclust
