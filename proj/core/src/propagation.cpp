/* Copyright 2026 The retab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "retab/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "retab/error.hpp"

namespace retab {
namespace {

// Predicate deciding whether off-diagonal entry (source, destination) of the
// affinity matrix survives.
using Keep = std::function<bool(std::int32_t, std::int32_t)>;

SparseAffinityMatrix BuildMatrix(const PairAffinityTable& table, const Keep& keep) {
  table.Validate();
  if (!table.pairs) throw ArgumentError("pair table has no neighbor set");
  if (table.affinity.empty() && table.size() > 0) {
    throw ArgumentError("affinity matrix needs predicted affinities on every pair");
  }
  const NeighborPairs& pairs = *table.pairs;
  const std::size_t n =
      static_cast<std::size_t>(pairs.height()) * static_cast<std::size_t>(pairs.width());
  if (n == 0) throw ArgumentError("neighbor set has no grid dimensions");

  std::vector<Triplet> triplets;
  triplets.reserve(n + 2 * pairs.size());
  for (std::size_t i = 0; i < n; ++i) {
    triplets.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(i), 1.0});
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const double a = table.affinity[k];
    if (!(a > 0.0 && a <= 1.0)) throw ArgumentError("affinities must lie in (0, 1]");
    if (keep(i, j)) triplets.push_back({i, j, a});
    if (keep(j, i)) triplets.push_back({j, i, a});
  }
  return SparseAffinityMatrix(CsrMatrix::FromTriplets(n, std::move(triplets)));
}

void RequireMaskGrid(const PairAffinityTable& table, const RegionMask& mask) {
  if (!table.pairs || table.pairs->height() != mask.height() ||
      table.pairs->width() != mask.width()) {
    throw ArgumentError("region mask grid does not match the pair grid");
  }
}

// Copies the pixels of one region from `from` into `into`.
void MergeByRegion(ResponseStack& into, const ResponseStack& from, const RegionMask& mask,
                   bool take_boundary) {
  for (int c = 0; c < into.channels(); ++c) {
    for (std::size_t i = 0; i < into.pixels(); ++i) {
      if (mask.is_boundary(i) == take_boundary) into.at(c, i) = from.at(c, i);
    }
  }
}

}  // namespace

CsrMatrix CsrMatrix::FromTriplets(std::size_t n, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.n_ = n;
  m.row_ptr_.assign(n + 1, 0);
  m.cols_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n ||
        static_cast<std::size_t>(t.col) >= n) {
      throw ArgumentError("matrix entry outside the matrix");
    }
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      throw ArgumentError("duplicate matrix entry");
    }
    ++m.row_ptr_[t.row + 1];
    m.cols_.push_back(t.col);
    m.values_.push_back(t.value);
  }
  for (std::size_t r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::int32_t>(c));
  if (it == cols.end() || *it != static_cast<std::int32_t>(c)) return 0.0;
  return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
}

CsrMatrix CsrMatrix::Transposed() const {
  CsrMatrix t;
  t.n_ = n_;
  t.row_ptr_.assign(n_ + 1, 0);
  for (auto c : cols_) ++t.row_ptr_[c + 1];
  for (std::size_t r = 0; r < n_; ++r) t.row_ptr_[r + 1] += t.row_ptr_[r];
  t.cols_.resize(cols_.size());
  t.values_.resize(values_.size());
  std::vector<std::size_t> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  // Rows are visited in order, so each transposed row receives ascending columns.
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t dst = next[cols_[k]]++;
      t.cols_[dst] = static_cast<std::int32_t>(r);
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

std::vector<double> CsrMatrix::ToDense() const {
  std::vector<double> dense(n_ * n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    const auto cols = row_cols(r);
    const auto vals = row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) dense[r * n_ + cols[k]] = vals[k];
  }
  return dense;
}

SparseAffinityMatrix::SparseAffinityMatrix(CsrMatrix m) : m_(std::move(m)) {
  for (std::size_t i = 0; i < m_.n(); ++i) {
    if (m_.at(i, i) != 1.0) throw ArgumentError("affinity matrix must have a unit diagonal");
  }
}

SparseTransitionMatrix::SparseTransitionMatrix(CsrMatrix m) : m_(std::move(m)) {
  for (std::size_t r = 0; r < m_.n(); ++r) {
    double sum = 0.0;
    for (double v : m_.row_values(r)) {
      if (!(v >= 0.0)) throw ArgumentError("transition entries must be non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ArgumentError("transition rows must sum to 1");
  }
}

SparseAffinityMatrix BuildFullMatrix(const PairAffinityTable& table) {
  return BuildMatrix(table, [](std::int32_t, std::int32_t) { return true; });
}

SparseAffinityMatrix BuildStage1Matrix(const PairAffinityTable& table, const RegionMask& mask) {
  RequireMaskGrid(table, mask);
  return BuildMatrix(table, [&](std::int32_t src, std::int32_t dst) {
    return !mask.is_boundary(src) && !mask.is_boundary(dst);
  });
}

SparseAffinityMatrix BuildStage2Matrix(const PairAffinityTable& table, const RegionMask& mask) {
  RequireMaskGrid(table, mask);
  return BuildMatrix(table,
                     [&](std::int32_t, std::int32_t dst) { return mask.is_boundary(dst); });
}

SparseAffinityMatrix BuildBoundaryInternalMatrix(const PairAffinityTable& table,
                                                 const RegionMask& mask) {
  RequireMaskGrid(table, mask);
  return BuildMatrix(table, [&](std::int32_t src, std::int32_t dst) {
    return mask.is_boundary(src) && mask.is_boundary(dst);
  });
}

SparseTransitionMatrix ToTransition(const SparseAffinityMatrix& a, double beta) {
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    throw ArgumentError("beta must be a finite value >= 1");
  }
  // Row i of the transpose lists the sources feeding destination i.
  const CsrMatrix incoming = a.csr().Transposed();
  std::vector<Triplet> triplets;
  triplets.reserve(incoming.nnz());
  for (std::size_t r = 0; r < incoming.n(); ++r) {
    const auto cols = incoming.row_cols(r);
    const auto vals = incoming.row_values(r);
    double sum = 0.0;
    std::vector<double> powered(vals.size());
    for (std::size_t k = 0; k < vals.size(); ++k) {
      powered[k] = std::pow(vals[k], beta);
      sum += powered[k];
    }
    for (std::size_t k = 0; k < vals.size(); ++k) {
      triplets.push_back({static_cast<std::int32_t>(r), cols[k], powered[k] / sum});
    }
  }
  return SparseTransitionMatrix(CsrMatrix::FromTriplets(incoming.n(), std::move(triplets)));
}

ResponseStack RandomWalk(const SparseTransitionMatrix& t, const ResponseStack& responses,
                         int iters) {
  if (iters < 0) throw ArgumentError("iteration count must be >= 0");
  if (responses.pixels() != t.n()) {
    throw ArgumentError("response grid has " + std::to_string(responses.pixels()) +
                        " pixels, transition matrix has " + std::to_string(t.n()));
  }
  ResponseStack out = responses;
  std::vector<double> next(t.n());
  const CsrMatrix& m = t.csr();
  for (int c = 0; c < out.channels(); ++c) {
    auto cur = out.channel(c);
    for (int it = 0; it < iters; ++it) {
      for (std::size_t r = 0; r < m.n(); ++r) {
        const auto cols = m.row_cols(r);
        const auto vals = m.row_values(r);
        double acc = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) acc += vals[k] * cur[cols[k]];
        next[r] = acc;
      }
      std::copy(next.begin(), next.end(), cur.begin());
    }
  }
  return out;
}

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kOneStage: return "one-stage";
    case Strategy::kNbdBd: return "nbd-bd";
    case Strategy::kBtp: return "btp";
  }
  return "?";
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "one-stage" || name == "one_stage") return Strategy::kOneStage;
  if (name == "nbd-bd" || name == "nbd_bd") return Strategy::kNbdBd;
  if (name == "btp") return Strategy::kBtp;
  throw ArgumentError("unknown propagation strategy '" + std::string(name) + "'");
}

ResponseStack Propagate(Strategy strategy, const PairAffinityTable& table, const RegionMask& mask,
                        const ResponseStack& responses, const PropagationParams& params) {
  RequireMaskGrid(table, mask);
  const int stage2_iters = params.stage2_iters.value_or(params.iters);
  switch (strategy) {
    case Strategy::kOneStage:
      return RandomWalk(ToTransition(BuildFullMatrix(table), params.beta), responses,
                        params.iters);
    case Strategy::kBtp: {
      const auto stage1 = RandomWalk(ToTransition(BuildStage1Matrix(table, mask), params.beta),
                                     responses, params.iters);
      return RandomWalk(ToTransition(BuildStage2Matrix(table, mask), params.beta), stage1,
                        stage2_iters);
    }
    case Strategy::kNbdBd: {
      auto merged = RandomWalk(ToTransition(BuildStage1Matrix(table, mask), params.beta),
                               responses, params.iters);
      const auto inner =
          RandomWalk(ToTransition(BuildBoundaryInternalMatrix(table, mask), params.beta),
                     responses, params.iters);
      MergeByRegion(merged, inner, mask, /*take_boundary=*/true);
      return merged;
    }
  }
  throw ArgumentError("unknown propagation strategy");
}

}  // namespace retab
