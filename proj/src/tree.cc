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

#include "lstree/tree.h"

#include <algorithm>
#include <cctype>
#include <utility>

namespace lstree {

namespace {

struct Escape {
  std::string_view escaped;
  std::string_view plain;
};

constexpr Escape kEscapes[] = {
    {"-LRB-", "("}, {"-RRB-", ")"}, {"-LCB-", "{"},
    {"-RCB-", "}"}, {"-LSB-", "["}, {"-RSB-", "]"},
};

std::string Unescape(std::string_view word) {
  for (const auto& e : kEscapes) {
    if (word == e.escaped) return std::string(e.plain);
  }
  return std::string(word);
}

std::string EscapeWord(std::string_view word) {
  for (const auto& e : kEscapes) {
    if (word == e.plain) return std::string(e.escaped);
  }
  return std::string(word);
}

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  BracketNode ReadTree() {
    SkipSpace();
    if (AtEnd()) throw ParseError("empty tree", pos_);
    if (Peek() != '(') throw ParseError("expected '('", pos_);
    BracketNode root = ReadNode();
    SkipSpace();
    if (!AtEnd()) throw ParseError("trailing characters after tree", pos_);
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }

  void SkipSpace() {
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(Peek()))) ++pos_;
  }

  std::string_view ReadAtom() {
    const std::size_t start = pos_;
    while (!AtEnd()) {
      const char c = Peek();
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) break;
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  // Precondition: Peek() == '('.
  BracketNode ReadNode() {
    const std::size_t open = pos_;
    ++pos_;
    SkipSpace();
    if (AtEnd()) throw ParseError("unbalanced brackets: missing ')'", pos_);
    if (Peek() == ')') throw ParseError("empty bracket", pos_);

    BracketNode node;
    if (Peek() != '(') {
      std::string_view atom = ReadAtom();
      SkipSpace();
      if (AtEnd()) throw ParseError("unbalanced brackets: missing ')'", pos_);
      if (Peek() == ')') {
        ++pos_;
        node.word = Unescape(atom);
        return node;
      }
      node.label = std::string(atom);
    }

    while (true) {
      SkipSpace();
      if (AtEnd()) {
        throw ParseError("unbalanced brackets: '(' opened at offset " + std::to_string(open) +
                             " is never closed",
                         pos_);
      }
      const char c = Peek();
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        node.children.push_back(ReadNode());
      } else {
        BracketNode leaf;
        leaf.word = Unescape(ReadAtom());
        node.children.push_back(std::move(leaf));
      }
    }

    // Preterminal "(NN film)".
    if (node.children.size() == 1 && node.children[0].word && !node.children[0].label) {
      node.word = std::move(node.children[0].word);
      node.children.clear();
    }
    return node;
  }
};

struct Flattener {
  std::vector<TreeNode> nodes;
  std::vector<std::string> words;

  NodeId Add(const BracketNode& top, std::optional<NodeId> parent) {
    const BracketNode* b = &top;
    std::optional<std::string> label = b->label;
    while (!b->word && b->children.size() == 1) {
      b = &b->children[0];
      if (!label) label = b->label;
    }
    if (!b->word && b->children.empty()) throw ParseError("node without words", 0);

    const NodeId id = nodes.size();
    nodes.emplace_back();
    nodes[id].id = id;
    nodes[id].parent = parent;
    nodes[id].label = std::move(label);
    nodes[id].begin = words.size();

    if (b->word) {
      words.push_back(*b->word);
    } else {
      for (const auto& child : b->children) {
        const NodeId c = Add(child, id);
        nodes[id].children.push_back(c);
      }
    }
    nodes[id].end = words.size();
    return id;
  }
};

void RenderNode(const ParseTree& tree, NodeId id, std::string& out) {
  const TreeNode& n = tree.node(id);
  if (n.is_leaf()) {
    out += '(';
    if (n.label) {
      out += *n.label;
      out += ' ';
    }
    out += EscapeWord(tree.tokens()[n.begin].surface);
    out += ')';
    return;
  }
  out += '(';
  if (n.label) out += *n.label;
  for (NodeId c : n.children) {
    out += ' ';
    RenderNode(tree, c, out);
  }
  out += ')';
}

}  // namespace

BracketNode ParseBrackets(std::string_view text) { return BracketReader(text).ReadTree(); }

ParseTree ParseTree::FromBrackets(const BracketNode& root) {
  Flattener f;
  f.Add(root, std::nullopt);
  ParseTree tree;
  tree.nodes_ = std::move(f.nodes);
  tree.tokens_.reserve(f.words.size());
  for (std::size_t i = 0; i < f.words.size(); ++i) tree.tokens_.push_back({i, std::move(f.words[i])});
  tree.Finish();
  return tree;
}

ParseTree ParseTree::Merge(std::span<const ParseTree> trees) {
  if (trees.empty()) throw std::invalid_argument("MergeSentences: no trees to merge");
  if (trees.size() == 1) return trees.front();

  ParseTree merged;
  TreeNode root;
  root.id = 0;
  root.synthetic = true;
  merged.nodes_.push_back(root);

  std::size_t word_offset = 0;
  for (const ParseTree& t : trees) {
    const NodeId node_offset = merged.nodes_.size();
    merged.nodes_[0].children.push_back(node_offset);
    for (const TreeNode& src : t.nodes_) {
      TreeNode n = src;
      n.id += node_offset;
      n.parent = src.parent ? std::optional<NodeId>(*src.parent + node_offset) : std::optional<NodeId>(0);
      for (auto& c : n.children) c += node_offset;
      n.begin += word_offset;
      n.end += word_offset;
      merged.nodes_.push_back(std::move(n));
    }
    for (const Token& tok : t.tokens_) merged.tokens_.push_back({tok.index + word_offset, tok.surface});
    word_offset += t.word_count();
  }
  merged.nodes_[0].begin = 0;
  merged.nodes_[0].end = word_offset;
  merged.Finish();
  return merged;
}

void ParseTree::Finish() {
  const std::size_t d = tokens_.size();
  leaf_of_token_.assign(d, 0);
  for (auto& n : nodes_) {
    n.subset = WordSet::Range(d, n.begin, n.end);
    if (n.is_leaf()) leaf_of_token_[n.begin] = n.id;
  }
  Validate();
}

std::vector<std::string> ParseTree::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens_.size());
  for (const auto& t : tokens_) out.push_back(t.surface);
  return out;
}

const TreeNode& ParseTree::node(NodeId id) const {
  if (id >= nodes_.size()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return nodes_[id];
}

std::string ParseTree::SpanText(NodeId id) const {
  const TreeNode& n = node(id);
  std::string out;
  for (std::size_t i = n.begin; i < n.end; ++i) {
    if (i > n.begin) out += ' ';
    out += tokens_[i].surface;
  }
  return out;
}

void ParseTree::Validate() const {
  if (nodes_.empty()) throw std::logic_error("tree has no nodes");
  if (nodes_[0].parent) throw std::logic_error("root has a parent");
  std::size_t leaves = 0;
  for (const TreeNode& n : nodes_) {
    if (n.begin >= n.end) throw std::logic_error("node " + std::to_string(n.id) + " has an empty span");
    if (n.id != 0 && !n.parent) throw std::logic_error("non-root node without parent");
    if (n.is_leaf()) {
      if (n.span_size() != 1) throw std::logic_error("leaf covers more than one word");
      ++leaves;
      continue;
    }
    if (n.children.size() < 2) throw std::logic_error("unary node survived normalization");
    std::size_t cursor = n.begin;
    for (NodeId c : n.children) {
      const TreeNode& child = nodes_.at(c);
      if (child.parent != n.id) throw std::logic_error("child/parent links disagree");
      if (child.begin != cursor) throw std::logic_error("children are not contiguous left-to-right");
      cursor = child.end;
    }
    if (cursor != n.end) throw std::logic_error("children do not cover the parent span");
  }
  if (leaves != tokens_.size()) throw std::logic_error("leaves and tokens are not in bijection");
  if (nodes_[0].begin != 0 || nodes_[0].end != tokens_.size()) {
    throw std::logic_error("root does not cover the sentence");
  }
}

ParseTree ParsePtb(std::string_view text) { return ParseTree::FromBrackets(ParseBrackets(text)); }

std::string RenderPtb(const ParseTree& tree) {
  std::string out;
  RenderNode(tree, tree.root_id(), out);
  return out;
}

ParseTree MergeSentences(std::span<const ParseTree> trees) { return ParseTree::Merge(trees); }

DesignMatrix BuildDesignMatrix(const ParseTree& tree) {
  const auto n = static_cast<Eigen::Index>(tree.node_count());
  const auto d = static_cast<Eigen::Index>(tree.word_count());
  DesignMatrix m;
  m.x = Eigen::MatrixXd::Zero(n, d);
  m.row_nodes.reserve(tree.node_count());
  m.row_subsets.reserve(tree.node_count());
  for (const TreeNode& node : tree.nodes()) {
    const auto r = static_cast<Eigen::Index>(node.id);
    m.x.row(r).segment(static_cast<Eigen::Index>(node.begin), static_cast<Eigen::Index>(node.span_size()))
        .setOnes();
    m.row_nodes.push_back(node.id);
    m.row_subsets.push_back(node.subset);
  }
  return m;
}

std::vector<int> Depths(const ParseTree& tree) {
  const auto& nodes = tree.nodes();
  std::vector<int> depth(nodes.size(), 1);
  // Children always follow their parent in preorder.
  for (std::size_t k = nodes.size(); k-- > 0;) {
    int best = 0;
    for (NodeId c : nodes[k].children) best = std::max(best, depth[c]);
    depth[k] = 1 + best;
  }
  return depth;
}

int Depth(const ParseTree& tree, NodeId id) {
  tree.node(id);
  return Depths(tree)[id];
}

}  // namespace lstree
