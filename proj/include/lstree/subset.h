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

#ifndef LSTREE_SUBSET_H_
#define LSTREE_SUBSET_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lstree {

// A set of word indices over a sentence of `universe()` words.
class WordSet {
 public:
  WordSet() = default;
  explicit WordSet(std::size_t universe);

  // Contiguous range [begin, end) over a sentence of `universe` words.
  static WordSet Range(std::size_t universe, std::size_t begin, std::size_t end);
  static WordSet Singleton(std::size_t universe, std::size_t index);

  std::size_t universe() const { return universe_; }
  bool test(std::size_t i) const;
  void set(std::size_t i);
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<std::size_t> indices() const;

  WordSet& operator|=(const WordSet& other);
  bool Intersects(const WordSet& other) const;

  friend bool operator==(const WordSet& a, const WordSet& b) = default;

  std::size_t Hash() const;
  // "{0,1,4}"
  std::string ToString() const;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> blocks_;
};

}  // namespace lstree

template <>
struct std::hash<lstree::WordSet> {
  std::size_t operator()(const lstree::WordSet& s) const noexcept { return s.Hash(); }
};

#endif  // LSTREE_SUBSET_H_
