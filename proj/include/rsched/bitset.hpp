// Copyright 2026 The rsched Authors
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

#ifndef RSCHED_BITSET_HPP
#define RSCHED_BITSET_HPP

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace rsched {

/// Fixed-width set of small non-negative integers.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(int size, bool filled = false)
      : size_(size), words_(static_cast<std::size_t>((size + 63) / 64), filled ? ~std::uint64_t{0} : 0) {
    trim();
  }

  int size() const { return size_; }

  bool test(int i) const {
    assert(i >= 0 && i < size_);
    return (words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1U;
  }
  void set(int i) {
    assert(i >= 0 && i < size_);
    words_[static_cast<std::size_t>(i >> 6)] |= std::uint64_t{1} << (i & 63);
  }
  void reset(int i) {
    assert(i >= 0 && i < size_);
    words_[static_cast<std::size_t>(i >> 6)] &= ~(std::uint64_t{1} << (i & 63));
  }
  void clear() {
    for (auto& w : words_) w = 0;
  }

  bool any() const {
    for (auto w : words_)
      if (w != 0) return true;
    return false;
  }
  bool none() const { return !any(); }
  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  bool intersects(const Bitset& o) const {
    assert(o.size_ == size_);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & o.words_[k]) return true;
    return false;
  }

  /// Intersects in place; returns true when any bit was removed.
  bool intersectWith(const Bitset& o) {
    assert(o.size_ == size_);
    bool changed = false;
    for (std::size_t k = 0; k < words_.size(); ++k) {
      const auto next = words_[k] & o.words_[k];
      changed |= next != words_[k];
      words_[k] = next;
    }
    return changed;
  }

  Bitset& operator|=(const Bitset& o) {
    assert(o.size_ == size_);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    intersectWith(o);
    return *this;
  }
  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
  friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
  friend bool operator==(const Bitset&, const Bitset&) = default;

  /// Smallest member >= from, or -1.
  int next(int from = 0) const {
    if (from >= size_) return -1;
    std::size_t k = static_cast<std::size_t>(from >> 6);
    std::uint64_t w = words_[k] & (~std::uint64_t{0} << (from & 63));
    while (true) {
      if (w != 0) return static_cast<int>(k * 64) + std::countr_zero(w);
      if (++k == words_.size()) return -1;
      w = words_[k];
    }
  }

  /// Largest member, or -1.
  int last() const {
    for (std::size_t k = words_.size(); k-- > 0;)
      if (words_[k] != 0) return static_cast<int>(k * 64) + 63 - std::countl_zero(words_[k]);
    return -1;
  }

  template <class F>
  void forEach(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w != 0) {
        f(static_cast<int>(k * 64) + std::countr_zero(w));
        w &= w - 1;
      }
    }
  }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count()));
    forEach([&](int v) { out.push_back(v); });
    return out;
  }

 private:
  void trim() {
    if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
  }

  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace rsched

#endif  // RSCHED_BITSET_HPP
