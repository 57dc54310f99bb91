#include "antsess/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "antsess/error.hpp"

namespace antsess {

void SimilarityMeasure::validate() const {
  if (kind != SimilarityKind::Blend) return;
  if (weights.tx < 0 || weights.time < 0 || weights.hits < 0)
    throw ConfigError("blend weights must be non-negative");
  if (std::abs(weights.tx + weights.time + weights.hits - 1.0) > 1e-9)
    throw ConfigError("blend weights must sum to 1");
}

std::optional<SimilarityKind> similarity_kind_from_string(std::string_view name) {
  if (name == "cosine") return SimilarityKind::CosineTransaction;
  if (name == "jaccard") return SimilarityKind::JaccardTransaction;
  if (name == "blend") return SimilarityKind::Blend;
  return std::nullopt;
}

std::string_view to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::CosineTransaction: return "cosine";
    case SimilarityKind::JaccardTransaction: return "jaccard";
    case SimilarityKind::Blend: return "blend";
  }
  return "cosine";
}

namespace {

std::size_t intersection_size(const std::vector<PageIndex>& a, const std::vector<PageIndex>& b) {
  std::size_t shared = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++shared;
      ++ia;
      ++ib;
    }
  }
  return shared;
}

// Cosine over sparse non-negative integer vectors. sqrt(x*x) == x in IEEE
// arithmetic, so a vector against itself scores exactly 1.
double sparse_cosine(const SparseVector<std::int64_t>& a, const SparseVector<std::int64_t>& b) {
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += static_cast<double>(ia->second) * static_cast<double>(ib->second);
      ++ia;
      ++ib;
    }
  }
  auto sq = [](const SparseVector<std::int64_t>& v) {
    double s = 0.0;
    for (const auto& [k, x] : v) s += static_cast<double>(x) * static_cast<double>(x);
    return s;
  };
  return dot / std::sqrt(sq(a) * sq(b));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double jaccard_transaction(const Session& a, const Session& b) {
  const auto shared = intersection_size(a.transaction_vector, b.transaction_vector);
  const auto united = a.transaction_vector.size() + b.transaction_vector.size() - shared;
  if (united == 0) return 0.0;
  return static_cast<double>(shared) / static_cast<double>(united);
}

double cosine_transaction(const Session& a, const Session& b) {
  if (a.empty() || b.empty()) return 0.0;
  const auto shared = intersection_size(a.transaction_vector, b.transaction_vector);
  return static_cast<double>(shared) /
         std::sqrt(static_cast<double>(a.transaction_vector.size()) *
                   static_cast<double>(b.transaction_vector.size()));
}

double sim(const Session& a, const Session& b, const SimilarityMeasure& m) {
  if (a.catalog_id != b.catalog_id || a.catalog_size != b.catalog_size)
    throw CatalogMismatch("sessions were built over different page catalogs");
  if (&a == &b) return 1.0;
  if (a.empty() || b.empty()) return 0.0;

  switch (m.kind) {
    case SimilarityKind::CosineTransaction:
      return clamp01(cosine_transaction(a, b));
    case SimilarityKind::JaccardTransaction:
      return clamp01(jaccard_transaction(a, b));
    case SimilarityKind::Blend: {
      const auto& w = m.weights;
      const double total = w.tx + w.time + w.hits;
      if (total <= 0) return 0.0;
      // Dividing by the weight sum keeps self-similarity exactly 1 even when
      // the weights do not add up to 1.0 in floating point.
      const double mixed = w.tx * jaccard_transaction(a, b) +
                           w.time * sparse_cosine(a.time_vector, b.time_vector) +
                           w.hits * sparse_cosine(a.hits_vector, b.hits_vector);
      return clamp01(mixed / total);
    }
  }
  return 0.0;
}

SimilarityMatrix SimilarityMatrix::compute(std::span<const Session> sessions,
                                           const SimilarityMeasure& m, unsigned threads) {
  SimilarityMatrix out;
  out.n_ = sessions.size();
  out.values_.assign(out.n_ * out.n_, 0.0);
  const std::size_t n = out.n_;
  for (const auto& s : sessions) {
    if (s.catalog_id != sessions.front().catalog_id || s.catalog_size != sessions.front().catalog_size)
      throw CatalogMismatch("sessions were built over different page catalogs");
  }

  auto fill_rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = sim(sessions[i], sessions[j], m);
        out.values_[i * n + j] = v;
        out.values_[j * n + i] = v;
      }
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    fill_rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(fill_rows, t, threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

SimilarityMatrix SimilarityMatrix::from_values(std::size_t n, std::vector<double> values) {
  if (values.size() != n * n) throw std::invalid_argument("similarity matrix must be n*n");
  SimilarityMatrix out;
  out.n_ = n;
  out.values_ = std::move(values);
  return out;
}

}  // namespace antsess
