#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>

namespace rmean {

// Ordered multiset of doubles with O(log n) insert and O(log n) selection of
// the k-th smallest element (1-based, counting multiplicity). AVL balanced;
// equal values share a node with a multiplicity counter, so adversarially
// repeated values cannot degrade the tree. Comparison counting is exposed so
// tests can verify the logarithmic cost directly.
class OrderStatMultiset {
 public:
  void insert(double value) {
    if (!std::isfinite(value)) {
      throw std::domain_error("OrderStatMultiset::insert: non-finite value");
    }
    root_ = insert_node(std::move(root_), value);
  }

  // k-th smallest, k in [1, size()].
  double select(std::int64_t k) const {
    if (k < 1 || k > size()) {
      throw std::out_of_range("OrderStatMultiset::select: rank out of range");
    }
    const Node* node = root_.get();
    std::int64_t rank = k;
    while (true) {
      const std::int64_t left = weight(node->left.get());
      ++comparisons_;
      if (rank <= left) {
        node = node->left.get();
        continue;
      }
      ++comparisons_;
      if (rank <= left + node->count) return node->value;
      rank -= left + node->count;
      node = node->right.get();
    }
  }

  std::int64_t size() const { return weight(root_.get()); }
  bool empty() const { return root_ == nullptr; }
  void clear() { root_.reset(); }

  std::uint64_t comparison_count() const { return comparisons_; }
  void reset_comparison_count() { comparisons_ = 0; }

 private:
  struct Node {
    explicit Node(double v) : value(v) {}
    double value;
    std::int64_t count = 1;    // multiplicity of `value`
    std::int64_t subtree = 1;  // elements in this subtree, with multiplicity
    int height = 1;
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;
  };

  using NodePtr = std::unique_ptr<Node>;

  static int height(const Node* n) { return n ? n->height : 0; }
  static std::int64_t weight(const Node* n) { return n ? n->subtree : 0; }

  static void refresh(Node* n) {
    n->height = 1 + std::max(height(n->left.get()), height(n->right.get()));
    n->subtree = n->count + weight(n->left.get()) + weight(n->right.get());
  }

  static NodePtr rotate_right(NodePtr n) {
    NodePtr l = std::move(n->left);
    n->left = std::move(l->right);
    refresh(n.get());
    l->right = std::move(n);
    refresh(l.get());
    return l;
  }

  static NodePtr rotate_left(NodePtr n) {
    NodePtr r = std::move(n->right);
    n->right = std::move(r->left);
    refresh(n.get());
    r->left = std::move(n);
    refresh(r.get());
    return r;
  }

  static NodePtr rebalance(NodePtr n) {
    const int bf = height(n->left.get()) - height(n->right.get());
    if (bf > 1) {
      if (height(n->left->left.get()) < height(n->left->right.get())) {
        n->left = rotate_left(std::move(n->left));
      }
      return rotate_right(std::move(n));
    }
    if (bf < -1) {
      if (height(n->right->right.get()) < height(n->right->left.get())) {
        n->right = rotate_right(std::move(n->right));
      }
      return rotate_left(std::move(n));
    }
    return n;
  }

  NodePtr insert_node(NodePtr node, double value) {
    if (!node) return std::make_unique<Node>(value);
    ++comparisons_;
    if (value < node->value) {
      node->left = insert_node(std::move(node->left), value);
    } else {
      ++comparisons_;
      if (node->value < value) {
        node->right = insert_node(std::move(node->right), value);
      } else {
        ++node->count;
        ++node->subtree;
        return node;
      }
    }
    refresh(node.get());
    return rebalance(std::move(node));
  }

  NodePtr root_;
  mutable std::uint64_t comparisons_ = 0;
};

}  // namespace rmean
