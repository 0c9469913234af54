// Copyright 2026 The fastkmpp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fastkmpp/lsh.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

#include "fastkmpp/geometry.h"

namespace fastkmpp {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

void CheckLshProbabilities(double p1, double p2) {
  if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0)) {
    throw InvalidArgument("collision probabilities must lie in (0, 1)");
  }
  if (!(p2 < p1)) {
    throw InvalidArgument(
        "degenerate hash family: far-collision probability p2 >= p1");
  }
}

}  // namespace

double CollisionProbability(double u, double bucket_width) {
  if (!(u > 0.0) || !(bucket_width > 0.0)) {
    throw InvalidArgument("distance and bucket width must be positive");
  }
  const double t = bucket_width / u;
  const double tail = std::erfc(t / std::numbers::sqrt2);  // 2 Phi(-t)
  const double p = 1.0 - tail -
                   2.0 / (std::sqrt(2.0 * std::numbers::pi) * t) *
                       (-std::expm1(-0.5 * t * t));
  return std::clamp(p, 0.0, 1.0);
}

LshParams DeriveParamsFromProbabilities(Index n, double delta, double p1,
                                        double p2) {
  CheckLshProbabilities(p1, p2);
  if (n < 1) throw InvalidArgument("n must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  LshParams params;
  params.p1 = p1;
  params.p2 = p2;
  params.delta = delta;
  params.n = n;
  params.rho = std::log(1.0 / p1) / std::log(1.0 / p2);
  const double log_inv_eta =
      3.0 / (1.0 - params.rho) * std::log(static_cast<double>(n) / delta);
  params.eta = std::exp(-log_inv_eta);
  const double log_inv_p2 = std::log(1.0 / p2);
  params.m_formula = std::max(1.0, std::ceil(log_inv_eta / log_inv_p2));
  while (params.m_formula * log_inv_p2 < log_inv_eta) params.m_formula += 1.0;
  params.ell_formula = std::max(
      1.0, std::ceil(100.0 * log_inv_eta * std::exp(params.rho * log_inv_eta)));
  params.m = static_cast<int>(std::min(params.m_formula, 1e6));
  params.ell = static_cast<int>(
      std::min(params.ell_formula,
               static_cast<double>(std::numeric_limits<int>::max())));
  return params;
}

LshParams DeriveParams(Index n, double c, double delta, double bucket_width,
                       double radius) {
  if (!(c > 1.0)) throw InvalidArgument("c must exceed 1");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  return DeriveParamsFromProbabilities(
      n, delta, CollisionProbability(radius, bucket_width),
      CollisionProbability(c * radius, bucket_width));
}

LshParams CapTables(LshParams params, Index max_tables) {
  max_tables = std::max<Index>(1, max_tables);
  if (params.ell_formula <= static_cast<double>(max_tables)) return params;
  params.capped = true;
  const double log_inv_eta =
      3.0 / (1.0 - params.rho) *
      std::log(static_cast<double>(params.n) / params.delta);
  double best_cost = std::numeric_limits<double>::infinity();
  params.m = 1;
  params.ell = static_cast<int>(std::min<Index>(max_tables, 1 << 30));
  const int m_limit = static_cast<int>(std::min(params.m_formula, 4096.0));
  for (int m = 1; m <= m_limit; ++m) {
    const double near = std::pow(params.p1, m);
    const double per_table_miss = -std::log1p(-near);
    if (!(per_table_miss > 0.0)) break;
    const double ell = std::ceil(log_inv_eta / per_table_miss);
    if (ell > static_cast<double>(max_tables)) break;
    const double cost =
        ell * (m + static_cast<double>(params.n) * std::pow(params.p2, m));
    if (cost < best_cost) {
      best_cost = cost;
      params.m = m;
      params.ell = static_cast<int>(ell);
    }
  }
  return params;
}

GapLsh::GapLsh(const Dataset& ds, double radius, double c, int m, int ell,
               double bucket_width, std::uint64_t seed)
    : ds_(&ds),
      radius_(radius),
      c_(c),
      m_(m),
      ell_(ell),
      bucket_width_(bucket_width) {
  if (m < 1 || ell < 1) throw InvalidArgument("m and ell must be positive");
  if (!(bucket_width > 0.0)) throw InvalidArgument("bucket width must be positive");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  if (ds.size() >= static_cast<Index>(kNone)) {
    throw InvalidArgument("dataset too large for 32-bit bucket entries");
  }
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> normal;
  const Index rows = static_cast<Index>(m) * ell;
  projections_.resize(rows, ds.dim());
  for (Index i = 0; i < projections_.size(); ++i) {
    projections_.data()[i] = normal(rng);
  }
  offsets_.resize(rows);
  for (Index i = 0; i < rows; ++i) offsets_[i] = UniformUnit(rng) * bucket_width;
  slot_keys_.assign(64, 0);
  slot_buckets_.assign(64, kNone);
  tuple_scratch_.resize(m);
}

void GapLsh::Project(Index p, Eigen::VectorXd& out) const {
  out.noalias() = projections_ * ds_->point(p).transpose();
  out = ((out + offsets_) / bucket_width_).array().floor().matrix();
}

std::uint64_t GapLsh::SlotKey(int table, const std::int64_t* tuple) const {
  std::uint64_t h = Mix64(static_cast<std::uint64_t>(table) + 1);
  for (int i = 0; i < m_; ++i) {
    h = Mix64(h ^ static_cast<std::uint64_t>(tuple[i]));
  }
  return h;
}

std::uint32_t GapLsh::FindSlot(std::uint64_t key) const {
  const std::size_t mask = slot_keys_.size() - 1;
  std::size_t i = key & mask;
  while (slot_buckets_[i] != kNone && slot_keys_[i] != key) i = (i + 1) & mask;
  return static_cast<std::uint32_t>(i);
}

std::uint32_t GapLsh::FindBucket(int table, const std::int64_t* tuple,
                                 std::uint64_t key) const {
  std::uint32_t b = slot_buckets_[FindSlot(key)];
  while (b != kNone) {
    const Bucket& bucket = buckets_[b];
    if (bucket.table == static_cast<std::uint32_t>(table) &&
        std::equal(tuple, tuple + m_,
                   bucket_tuples_.begin() + static_cast<std::size_t>(b) * m_)) {
      return b;
    }
    b = bucket.next_same_slot;
  }
  return kNone;
}

void GapLsh::Grow() {
  std::vector<std::uint64_t> keys(slot_keys_.size() * 2, 0);
  std::vector<std::uint32_t> heads(slot_keys_.size() * 2, kNone);
  std::swap(keys, slot_keys_);
  std::swap(heads, slot_buckets_);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (heads[i] == kNone) continue;
    const std::uint32_t slot = FindSlot(keys[i]);
    slot_keys_[slot] = keys[i];
    slot_buckets_[slot] = heads[i];
  }
}

void GapLsh::Insert(Index p) {
  Project(p, scratch_);
  for (int t = 0; t < ell_; ++t) {
    for (int i = 0; i < m_; ++i) {
      tuple_scratch_[i] = static_cast<std::int64_t>(
          std::clamp(scratch_[t * m_ + i], -9.0e18, 9.0e18));
    }
    const std::int64_t* tuple = tuple_scratch_.data();
    const std::uint64_t key = SlotKey(t, tuple);
    std::uint32_t b = FindBucket(t, tuple, key);
    if (b == kNone) {
      if ((slots_used_ + 1) * 2 > slot_keys_.size()) Grow();
      const std::uint32_t slot = FindSlot(key);
      if (slot_buckets_[slot] == kNone) ++slots_used_;
      b = static_cast<std::uint32_t>(buckets_.size());
      buckets_.push_back(Bucket{kNone, kNone, slot_buckets_[slot],
                                static_cast<std::uint32_t>(t)});
      bucket_tuples_.insert(bucket_tuples_.end(), tuple, tuple + m_);
      slot_keys_[slot] = key;
      slot_buckets_[slot] = b;
    }
    const std::uint32_t e = static_cast<std::uint32_t>(entries_.size());
    entries_.push_back(Entry{static_cast<std::uint32_t>(p), kNone});
    Bucket& bucket = buckets_[b];
    if (bucket.head == kNone) {
      bucket.head = e;
    } else {
      entries_[bucket.tail].next = e;
    }
    bucket.tail = e;
  }
}

std::optional<Neighbor> GapLsh::Query(Index p) const {
  Project(p, scratch_);
  const double limit = c_ * radius_;
  std::optional<Neighbor> best;
  for (int t = 0; t < ell_; ++t) {
    for (int i = 0; i < m_; ++i) {
      tuple_scratch_[i] = static_cast<std::int64_t>(
          std::clamp(scratch_[t * m_ + i], -9.0e18, 9.0e18));
    }
    const std::uint32_t b =
        FindBucket(t, tuple_scratch_.data(), SlotKey(t, tuple_scratch_.data()));
    if (b == kNone) continue;
    for (std::uint32_t e = buckets_[b].head; e != kNone; e = entries_[e].next) {
      const Index q = entries_[e].point;
      const double dist = Dist(ds_->point(p), ds_->point(q));
      if (dist <= limit) {
        if (!best || dist < best->dist) best = Neighbor{q, dist};
        break;
      }
    }
  }
  return best;
}

std::vector<Index> GapLsh::BucketContents(int table, Index p) const {
  const std::vector<std::int64_t> tuple = HashTuple(table, p);
  std::vector<Index> out;
  const std::uint32_t b = FindBucket(table, tuple.data(), SlotKey(table, tuple.data()));
  if (b == kNone) return out;
  for (std::uint32_t e = buckets_[b].head; e != kNone; e = entries_[e].next) {
    out.push_back(entries_[e].point);
  }
  return out;
}

std::vector<std::int64_t> GapLsh::HashTuple(int table, Index p) const {
  if (table < 0 || table >= ell_) throw InvalidArgument("table out of range");
  Project(p, scratch_);
  std::vector<std::int64_t> tuple(m_);
  for (int i = 0; i < m_; ++i) {
    tuple[i] = static_cast<std::int64_t>(
        std::clamp(scratch_[table * m_ + i], -9.0e18, 9.0e18));
  }
  return tuple;
}

LshMode ParseLshMode(const std::string& name) {
  if (name == "exact" || name == "exact-oracle") return LshMode::kExactOracle;
  if (name == "theoretical") return LshMode::kTheoretical;
  if (name == "practical") return LshMode::kPractical;
  throw InvalidArgument("unknown lsh mode '" + name + "'");
}

std::string LshModeName(LshMode mode) {
  switch (mode) {
    case LshMode::kExactOracle:
      return "exact-oracle";
    case LshMode::kTheoretical:
      return "theoretical";
    case LshMode::kPractical:
      return "practical";
  }
  return "unknown";
}

LshIndex::LshIndex(const Dataset& ds, LshConfig config, std::uint64_t seed)
    : ds_(&ds), config_(config) {
  if (!(config_.c >= 1.0)) throw InvalidArgument("c must be at least 1");
  const Index n = ds.size();
  const double max_dist = ds.max_dist_bound();
  switch (config_.mode) {
    case LshMode::kExactOracle:
      break;
    case LshMode::kPractical: {
      double radius = config_.practical_radius.value_or(max_dist / (2.0 * config_.c));
      if (!(radius > 0.0)) radius = 1.0;
      LshParams params;
      params.n = n;
      params.p1 = CollisionProbability(radius, config_.practical_bucket_width);
      params.p2 =
          CollisionProbability(config_.c * radius, config_.practical_bucket_width);
      params.m = config_.m_override.value_or(config_.practical_m);
      params.ell = config_.ell_override.value_or(config_.practical_tables);
      params_.push_back(params);
      scales_.emplace_back(ds, radius, config_.c, params.m, params.ell,
                           config_.practical_bucket_width, DeriveSeed(seed, 0));
      break;
    }
    case LshMode::kTheoretical: {
      if (!(config_.c > 1.0)) {
        throw InvalidArgument("theoretical LSH mode needs c > 1");
      }
      const double ratio = config_.c >= 4.0 ? 2.0 : std::sqrt(config_.c);
      const double c_scale = config_.c / ratio;
      const double aspect = ds.aspect_ratio();
      const int num_scales =
          static_cast<int>(std::ceil(std::log(2.0 * aspect) / std::log(ratio))) + 1;
      const double delta = std::min(
          0.5, 1.0 / (static_cast<double>(n) * static_cast<double>(num_scales)));
      const double base = max_dist > 0.0 ? max_dist / (2.0 * aspect) : 1.0;
      bool warned = false;
      for (int i = 0; i < num_scales; ++i) {
        const double radius = base * std::pow(ratio, i);
        const double width = config_.theoretical_width_factor * radius;
        LshParams params = CapTables(
            DeriveParams(n, c_scale, delta, width, radius),
            static_cast<Index>(4) * n * num_scales);
        if (config_.m_override) params.m = *config_.m_override;
        if (config_.ell_override) params.ell = *config_.ell_override;
        if (params.capped && !warned) {
          std::clog << "fastkmpp: LSH table count capped at "
                    << 4 * n * num_scales << " (formula asks for "
                    << params.ell_formula << "); using m=" << params.m
                    << ", ell=" << params.ell << "\n";
          warned = true;
        }
        params_.push_back(params);
        scales_.emplace_back(ds, radius, c_scale, params.m, params.ell, width,
                             DeriveSeed(seed, static_cast<std::uint64_t>(i)));
      }
      break;
    }
  }
}

void LshIndex::Insert(Index p) {
  if (p < 0 || p >= ds_->size()) throw InvalidArgument("point index out of range");
  inserted_.push_back(p);
  for (GapLsh& scale : scales_) scale.Insert(p);
}

std::optional<Neighbor> LshIndex::Query(Index p) const {
  if (p < 0 || p >= ds_->size()) throw InvalidArgument("point index out of range");
  std::optional<Neighbor> best;
  if (config_.mode == LshMode::kExactOracle) {
    for (Index q : inserted_) {
      const double dist = Dist(ds_->point(p), ds_->point(q));
      if (!best || dist < best->dist) best = Neighbor{q, dist};
    }
    return best;
  }
  for (const GapLsh& scale : scales_) {
    const std::optional<Neighbor> hit = scale.Query(p);
    if (hit && (!best || hit->dist < best->dist)) best = hit;
  }
  return best;
}

}  // namespace fastkmpp
