#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "antsess/sessionizer.hpp"

namespace antsess {

enum class SimilarityKind { CosineTransaction, JaccardTransaction, Blend };

struct BlendWeights {
  double tx = 1.0;
  double time = 0.0;
  double hits = 0.0;
};

struct SimilarityMeasure {
  SimilarityKind kind = SimilarityKind::CosineTransaction;
  BlendWeights weights{};  // only read by Blend

  // Throws ConfigError unless weights are non-negative and sum to 1.
  void validate() const;
};

std::optional<SimilarityKind> similarity_kind_from_string(std::string_view name);
std::string_view to_string(SimilarityKind kind);

// Value in [0, 1]. Sessions with no visited page score 0 against anything
// except themselves. Throws CatalogMismatch across catalogs.
double sim(const Session& a, const Session& b, const SimilarityMeasure& m);

double jaccard_transaction(const Session& a, const Session& b);
double cosine_transaction(const Session& a, const Session& b);

// Dense symmetric N x N matrix of pairwise similarities, read-only once built.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;

  // Rows are distributed over `threads` workers; the result does not
  // depend on the thread count.
  static SimilarityMatrix compute(std::span<const Session> sessions,
                                  const SimilarityMeasure& m, unsigned threads = 1);

  // For tests: wraps precomputed values (row-major, must be N*N).
  static SimilarityMatrix from_values(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

}  // namespace antsess
