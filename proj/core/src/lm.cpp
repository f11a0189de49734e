// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/lm.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace tailcut::lm {

namespace {

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("NgramModel::load: truncated file");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("NgramModel::load: truncated file");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

constexpr char kMagic[4] = {'T', 'C', 'N', 'G'};
constexpr uint32_t kFormatVersion = 1;

}  // namespace

NgramModel NgramModel::train(std::span<const uint8_t> corpus, int order, double smoothing_k) {
  if (corpus.empty()) {
    throw std::invalid_argument("NgramModel::train: empty corpus");
  }
  if (order < 1 || order > kMaxOrder) {
    throw std::invalid_argument("NgramModel::train: order must be in [1, 8]");
  }
  if (corpus.size() < static_cast<size_t>(order)) {
    throw std::invalid_argument("NgramModel::train: corpus shorter than order");
  }
  if (!(smoothing_k > 0.0)) {
    throw std::invalid_argument("NgramModel::train: smoothing_k must be > 0");
  }

  NgramModel model(order, smoothing_k);
  model.tables_.resize(order);
  std::string ctx;
  for (int len = 0; len < order; ++len) {
    auto& table = model.tables_[len];
    const size_t end = corpus.size() - len;
    for (size_t i = 0; i < end; ++i) {
      ctx.assign(reinterpret_cast<const char*>(corpus.data() + i), len);
      const uint8_t next = corpus[i + len];
      Row& row = table[ctx];
      auto it = std::lower_bound(
          row.counts.begin(), row.counts.end(), next,
          [](const std::pair<uint8_t, uint64_t>& e, uint8_t b) { return e.first < b; });
      if (it != row.counts.end() && it->first == next) {
        ++it->second;
      } else {
        row.counts.insert(it, {next, 1});
      }
      ++row.total;
    }
  }
  return model;
}

dist::TokenDistribution NgramModel::predict(std::span<const uint8_t> context) const {
  const int len = std::min<int>(static_cast<int>(context.size()), order_ - 1);
  std::string key;
  if (len > 0) {
    key.assign(reinterpret_cast<const char*>(context.data() + context.size() - len), len);
  }
  const Row* row = nullptr;
  auto it = tables_[len].find(key);
  if (it != tables_[len].end()) row = &it->second;

  const double total = row ? static_cast<double>(row->total) : 0.0;
  const double denom = total + smoothing_k_ * kVocabSize;
  std::vector<double> probs(kVocabSize, smoothing_k_ / denom);
  if (row) {
    for (const auto& [byte, count] : row->counts) {
      probs[byte] = (static_cast<double>(count) + smoothing_k_) / denom;
    }
  }
  return dist::TokenDistribution::from_probs(std::move(probs));
}

void NgramModel::save(std::ostream& out) const {
  out.write(kMagic, 4);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<uint32_t>(order_));
  put_f64(out, smoothing_k_);
  for (const auto& table : tables_) {
    // sort contexts for byte-deterministic output
    std::map<std::string, const Row*> ordered;
    for (const auto& [ctx, row] : table) ordered.emplace(ctx, &row);
    put_u64(out, ordered.size());
    for (const auto& [ctx, row] : ordered) {
      out.write(ctx.data(), static_cast<std::streamsize>(ctx.size()));
      put_u32(out, static_cast<uint32_t>(row->counts.size()));
      for (const auto& [byte, count] : row->counts) {
        out.put(static_cast<char>(byte));
        put_u64(out, count);
      }
    }
  }
  if (!out) throw std::runtime_error("NgramModel::save: write failed");
}

NgramModel NgramModel::load(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("NgramModel::load: bad magic");
  }
  const uint32_t version = get_u32(in);
  if (version != kFormatVersion) {
    throw std::runtime_error("NgramModel::load: unsupported format version " +
                             std::to_string(version));
  }
  const int order = static_cast<int>(get_u32(in));
  if (order < 1 || order > kMaxOrder) {
    throw std::runtime_error("NgramModel::load: corrupt order field");
  }
  const double smoothing_k = get_f64(in);
  if (!(smoothing_k > 0.0)) {
    throw std::runtime_error("NgramModel::load: corrupt smoothing field");
  }

  NgramModel model(order, smoothing_k);
  model.tables_.resize(order);
  std::string ctx;
  for (int len = 0; len < order; ++len) {
    const uint64_t n_contexts = get_u64(in);
    auto& table = model.tables_[len];
    table.reserve(n_contexts);
    for (uint64_t c = 0; c < n_contexts; ++c) {
      ctx.resize(len);
      in.read(ctx.data(), len);
      const uint32_t n_entries = get_u32(in);
      Row row;
      row.counts.reserve(n_entries);
      uint8_t prev = 0;
      for (uint32_t e = 0; e < n_entries; ++e) {
        const int byte = in.get();
        const uint64_t count = get_u64(in);
        if (byte < 0) throw std::runtime_error("NgramModel::load: truncated file");
        if (e > 0 && static_cast<uint8_t>(byte) <= prev) {
          throw std::runtime_error("NgramModel::load: entries out of order");
        }
        prev = static_cast<uint8_t>(byte);
        row.counts.emplace_back(static_cast<uint8_t>(byte), count);
        row.total += count;
      }
      table.emplace(ctx, std::move(row));
    }
  }
  return model;
}

bool NgramModel::operator==(const NgramModel& other) const {
  if (order_ != other.order_ || smoothing_k_ != other.smoothing_k_) return false;
  if (tables_.size() != other.tables_.size()) return false;
  for (size_t len = 0; len < tables_.size(); ++len) {
    if (tables_[len].size() != other.tables_[len].size()) return false;
    for (const auto& [ctx, row] : tables_[len]) {
      auto it = other.tables_[len].find(ctx);
      if (it == other.tables_[len].end()) return false;
      if (row.total != it->second.total || row.counts != it->second.counts) return false;
    }
  }
  return true;
}

}  // namespace tailcut::lm
