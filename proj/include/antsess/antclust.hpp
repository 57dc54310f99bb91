#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "antsess/random.hpp"
#include "antsess/similarity.hpp"
#include "antsess/timing.hpp"

namespace antsess::antclust {

using Label = std::uint32_t;
inline constexpr Label kNoNest = 0;

// One clustering agent. `genome` is the index of the session the ant
// carries and never changes; `threshold` is the learned acceptance
// template, frozen after initialization. The nest label lives in the
// NestRegistry.
struct Ant {
  std::size_t id = 0;
  std::size_t genome = 0;
  double threshold = 0.0;
};

// Label of every ant plus the member count of every live nest.
class NestRegistry {
 public:
  explicit NestRegistry(std::size_t ants = 0) : membership_(ants, kNoNest) {}

  std::size_t ant_count() const { return membership_.size(); }
  Label label(std::size_t ant) const { return membership_[ant]; }
  const std::vector<Label>& membership() const { return membership_; }
  const std::map<Label, std::size_t>& sizes() const { return sizes_; }
  std::size_t size_of(Label nest) const;
  Label next_label() const { return next_label_; }

  Label issue_label() { return next_label_++; }

  // Moves `ant` to `nest` (kNoNest to unassign), keeping sizes in step.
  void assign(std::size_t ant, Label nest);

  // Recount oracle: sizes match membership and no label reaches next_label.
  bool consistent() const;

 private:
  std::vector<Label> membership_;
  std::map<Label, std::size_t> sizes_;
  Label next_label_ = 1;
};

struct Config {
  std::uint32_t iter_multiplier = 75;
  std::uint32_t init_meetings = 30;
  double min_nest_fraction = 0.05;
  std::uint64_t rng_seed = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

enum class MeetingOutcome { NewNest, Adopted, Defected, NoOp };

// (mean + max) / 2 of the similarities between `ant` and its sampled
// partners. An empty sample yields 0.
double learn_template(const Ant& ant, std::span<const Ant> partners,
                      const SimilarityMatrix& sims);

// Mutual acceptance: similarity strictly above both templates.
bool acceptance(const Ant& a, const Ant& b, const SimilarityMatrix& sims);

// Applies the first matching behavioural rule:
//   both unlabeled + accept         -> both join a fresh nest
//   one unlabeled + accept          -> it joins the other's nest
//   different nests + accept        -> the ant of the smaller nest moves
//                                      (equal sizes: higher label moves)
//   otherwise                       -> nothing
MeetingOutcome meet(const Ant& a, const Ant& b, NestRegistry& nests,
                    const SimilarityMatrix& sims);

// Final labels 1..K, renumbered in order of first appearance by ant id.
struct ClusterAssignment {
  std::vector<Label> labels;

  std::size_t cluster_count() const;
  bool operator==(const ClusterAssignment&) const = default;
};

// The colony over a precomputed similarity matrix. run() performs the
// phases in order; they are exposed separately for tests.
class Colony {
 public:
  Colony(const SimilarityMatrix& sims, const Config& cfg);

  std::size_t size() const { return ants_.size(); }
  const std::vector<Ant>& ants() const { return ants_; }
  const NestRegistry& nests() const { return nests_; }
  std::uint64_t iterations() const;

  // Template learning from min(N-1, init_meetings) distinct random partners.
  void learn_templates();

  // One meeting between a uniformly drawn pair of distinct ants.
  MeetingOutcome step();
  void simulate();

  // Dissolves nests below max(2, ceil(min_nest_fraction * N)); returns how
  // many were dissolved.
  std::size_t prune();

  // Gives every unlabeled ant the nest of its most similar labeled ant
  // (lowest id on ties). With no labeled ant left, everyone shares one nest.
  void reassign_orphans();

  ClusterAssignment assignment() const;

  std::vector<std::size_t> sample_partners(std::size_t ant, std::size_t count);

 private:
  const SimilarityMatrix* sims_;
  Config cfg_;
  Rng rng_;
  std::vector<Ant> ants_;
  NestRegistry nests_;
};

ClusterAssignment run(const SimilarityMatrix& sims, const Config& cfg,
                      PhaseTimings* timings = nullptr);

// Builds the similarity matrix, then clusters. Throws EmptyInput on no sessions.
ClusterAssignment run(std::span<const Session> sessions, const SimilarityMeasure& measure,
                      const Config& cfg, PhaseTimings* timings = nullptr,
                      unsigned threads = 1);

}  // namespace antsess::antclust
