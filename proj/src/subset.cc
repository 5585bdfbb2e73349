/*
 * Copyright 2026 The lstree Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lstree/subset.h"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace lstree {

namespace {
constexpr std::size_t kBits = 64;
}

WordSet::WordSet(std::size_t universe)
    : universe_(universe), blocks_((universe + kBits - 1) / kBits, 0) {}

WordSet WordSet::Range(std::size_t universe, std::size_t begin, std::size_t end) {
  if (begin > end || end > universe) throw std::out_of_range("WordSet::Range: bad range");
  WordSet s(universe);
  for (std::size_t i = begin; i < end; ++i) s.set(i);
  return s;
}

WordSet WordSet::Singleton(std::size_t universe, std::size_t index) {
  WordSet s(universe);
  s.set(index);
  return s;
}

bool WordSet::test(std::size_t i) const {
  if (i >= universe_) return false;
  return (blocks_[i / kBits] >> (i % kBits)) & 1u;
}

void WordSet::set(std::size_t i) {
  if (i >= universe_) throw std::out_of_range("WordSet::set: index outside universe");
  blocks_[i / kBits] |= std::uint64_t{1} << (i % kBits);
}

std::size_t WordSet::count() const {
  std::size_t n = 0;
  for (auto b : blocks_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

std::vector<std::size_t> WordSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    auto b = blocks_[k];
    while (b != 0) {
      out.push_back(k * kBits + static_cast<std::size_t>(std::countr_zero(b)));
      b &= b - 1;
    }
  }
  return out;
}

WordSet& WordSet::operator|=(const WordSet& other) {
  if (other.universe_ != universe_) throw std::invalid_argument("WordSet: universe mismatch");
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] |= other.blocks_[k];
  return *this;
}

bool WordSet::Intersects(const WordSet& other) const {
  const std::size_t n = std::min(blocks_.size(), other.blocks_.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (blocks_[k] & other.blocks_[k]) return true;
  }
  return false;
}

std::size_t WordSet::Hash() const {
  // FNV-1a over the blocks.
  std::size_t h = 1469598103934665603ull ^ universe_;
  for (auto b : blocks_) {
    h ^= static_cast<std::size_t>(b);
    h *= 1099511628211ull;
  }
  return h;
}

std::string WordSet::ToString() const {
  std::string out = "{";
  bool first = true;
  for (auto i : indices()) {
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  out += '}';
  return out;
}

}  // namespace lstree
