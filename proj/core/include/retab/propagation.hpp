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

#ifndef RETAB_PROPAGATION_HPP_
#define RETAB_PROPAGATION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "retab/affinity.hpp"
#include "retab/grid.hpp"

namespace retab {

inline constexpr double kDefaultBeta = 8.0;
inline constexpr int kDefaultIters = 16;

struct Triplet {
  std::int32_t row;
  std::int32_t col;
  double value;
};

// Square compressed-sparse-row matrix with sorted, unique columns per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  // Sorts the triplets; duplicates are an ArgumentError.
  static CsrMatrix FromTriplets(std::size_t n, std::vector<Triplet> triplets);

  std::size_t n() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  std::span<const std::int32_t> row_cols(std::size_t r) const {
    return {cols_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  // Zero when the entry is not stored.
  double at(std::size_t r, std::size_t c) const;

  CsrMatrix Transposed() const;
  std::vector<double> ToDense() const;  // row-major n x n

  bool operator==(const CsrMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::int32_t> cols_;
  std::vector<double> values_;
};

// Affinity matrix with unit diagonal. Entry (i, j) is the affinity governing
// propagation from source pixel i into destination pixel j.
class SparseAffinityMatrix {
 public:
  explicit SparseAffinityMatrix(CsrMatrix m);
  const CsrMatrix& csr() const { return m_; }
  std::size_t n() const { return m_.n(); }
  double at(std::size_t i, std::size_t j) const { return m_.at(i, j); }
  bool is_symmetric() const { return m_ == m_.Transposed(); }

 private:
  CsrMatrix m_;
};

// Row-stochastic matrix. Row i holds the weights with which destination
// pixel i gathers from its sources: m'_i = sum_j T_ij m_j.
class SparseTransitionMatrix {
 public:
  explicit SparseTransitionMatrix(CsrMatrix m);
  const CsrMatrix& csr() const { return m_; }
  std::size_t n() const { return m_.n(); }
  double at(std::size_t i, std::size_t j) const { return m_.at(i, j); }

 private:
  CsrMatrix m_;
};

// Symmetric A with A_ij = A_ji = a_ij on the neighbor set, unit diagonal.
SparseAffinityMatrix BuildFullMatrix(const PairAffinityTable& table);

// Off-diagonal a_ij kept iff both endpoints are non-boundary.
SparseAffinityMatrix BuildStage1Matrix(const PairAffinityTable& table, const RegionMask& mask);

// Off-diagonal a_ij kept iff the destination j is a boundary pixel. Not
// symmetric in general.
SparseAffinityMatrix BuildStage2Matrix(const PairAffinityTable& table, const RegionMask& mask);

// Off-diagonal a_ij kept iff both endpoints are boundary pixels (the
// boundary-internal walk of the nbd+bd strategy).
SparseAffinityMatrix BuildBoundaryInternalMatrix(const PairAffinityTable& table,
                                                 const RegionMask& mask);

// Hadamard power by beta, then each destination's incoming weights are
// normalized: T_ij = A_ji^beta / sum_k A_ki^beta. For symmetric A this is the
// plain row normalization of A^beta. Rows never vanish because A_ii = 1.
SparseTransitionMatrix ToTransition(const SparseAffinityMatrix& a, double beta = kDefaultBeta);

// Applies m <- T m to every channel `iters` times.
ResponseStack RandomWalk(const SparseTransitionMatrix& t, const ResponseStack& responses,
                         int iters = kDefaultIters);

enum class Strategy { kOneStage, kNbdBd, kBtp };

std::string_view StrategyName(Strategy s);  // "one-stage", "nbd-bd", "btp"
Strategy ParseStrategy(std::string_view name);

struct PropagationParams {
  double beta = kDefaultBeta;
  int iters = kDefaultIters;
  // Second-stage iteration count for btp; defaults to `iters`.
  std::optional<int> stage2_iters;
};

// one-stage: walk on the full matrix.
// btp:       walk on stage-1, then walk the result on stage-2.
// nbd-bd:    independent walks on stage-1 and on the boundary-internal
//            matrix, merged per pixel by region membership.
ResponseStack Propagate(Strategy strategy, const PairAffinityTable& table, const RegionMask& mask,
                        const ResponseStack& responses, const PropagationParams& params = {});

}  // namespace retab

#endif  // RETAB_PROPAGATION_HPP_
