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

#ifndef LSTREE_TREE_H_
#define LSTREE_TREE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lstree/subset.h"

namespace lstree {

using NodeId = std::size_t;

struct Token {
  std::size_t index = 0;
  std::string surface;
};

// One node of a normalized constituency tree. Every node covers a
// contiguous span of words [begin, end); `subset` is the same span as a set.
struct TreeNode {
  NodeId id = 0;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::size_t begin = 0;
  std::size_t end = 0;
  WordSet subset;
  std::optional<std::string> label;
  // Common parent introduced when several sentences are merged.
  bool synthetic = false;

  bool is_leaf() const { return children.empty(); }
  std::size_t span_size() const { return end - begin; }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Un-normalized bracketed tree, as read from text.
struct BracketNode {
  std::optional<std::string> label;
  std::optional<std::string> word;  // set on terminals only
  std::vector<BracketNode> children;
};

// Rooted ordered tree over the tokens of one instance. Nodes are stored in
// preorder and a node's id is its preorder index, so the root is node 0.
// Unary chains are collapsed, which makes all node subsets pairwise distinct.
class ParseTree {
 public:
  // Normalizes a bracketed tree: unary chains collapse onto the lowest node
  // and keep the topmost label.
  static ParseTree FromBrackets(const BracketNode& root);

  // Combines sentence trees under one synthetic parent, re-offsetting word
  // indices. A single tree is returned unchanged.
  static ParseTree Merge(std::span<const ParseTree> trees);

  NodeId root_id() const { return 0; }
  std::size_t word_count() const { return tokens_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  std::vector<std::string> surfaces() const;

  // Throws std::out_of_range for unknown ids.
  const TreeNode& node(NodeId id) const;
  NodeId leaf_of_token(std::size_t index) const { return leaf_of_token_.at(index); }

  // Surface words of a node's span joined by single spaces.
  std::string SpanText(NodeId id) const;

  // Throws std::logic_error if a structural invariant does not hold.
  void Validate() const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<Token> tokens_;
  std::vector<NodeId> leaf_of_token_;

  void Finish();
};

// Parses one Penn-Treebank-style bracketed expression, e.g.
// "(S (NP (DT the) (NN film)) (VP (VBZ works)))".
BracketNode ParseBrackets(std::string_view text);
ParseTree ParsePtb(std::string_view text);

// Inverse of ParsePtb on normalized trees: ParsePtb(RenderPtb(t)) == t
// structurally (synthetic flags excepted).
std::string RenderPtb(const ParseTree& tree);

ParseTree MergeSentences(std::span<const ParseTree> trees);

// Boolean node-by-word incidence matrix. Rows follow preorder.
struct DesignMatrix {
  Eigen::MatrixXd x;
  std::vector<NodeId> row_nodes;
  std::vector<WordSet> row_subsets;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
};

DesignMatrix BuildDesignMatrix(const ParseTree& tree);

// 1 for leaves, otherwise 1 + the largest child depth.
int Depth(const ParseTree& tree, NodeId id);
// Depth of every node, indexed by node id.
std::vector<int> Depths(const ParseTree& tree);

}  // namespace lstree

#endif  // LSTREE_TREE_H_
