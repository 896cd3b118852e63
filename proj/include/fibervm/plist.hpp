#pragma once

#include <cstddef>
#include <iterator>
#include <memory>
#include <utility>
#include <vector>

namespace fibervm {

/// Immutable singly-linked list with structural sharing.
///
/// Frame lists, continuations, environments and the segment chain are all
/// persistent: pushing or popping at the head is O(1) and capturing a
/// continuation shares its frames instead of copying them.
template <class T>
class PList {
  struct Node {
    T head;
    PList tail;
    std::size_t size;

    Node(T h, PList t) : head(std::move(h)), tail(std::move(t)), size(tail.size() + 1) {}

    // Unlink uniquely-owned tails iteratively so long lists do not blow the
    // native stack on destruction.
    ~Node() {
      auto next = std::move(tail.node_);
      while (next && next.use_count() == 1) {
        auto after = std::move(const_cast<Node&>(*next).tail.node_);
        next = std::move(after);
      }
    }
  };

  std::shared_ptr<const Node> node_;

  explicit PList(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 public:
  PList() = default;

  static PList cons(T head, PList tail) {
    return PList(std::make_shared<const Node>(std::move(head), std::move(tail)));
  }

  static PList of(std::initializer_list<T> items) {
    return from_vector(std::vector<T>(items));
  }

  static PList from_vector(const std::vector<T>& items) {
    PList out;
    for (auto it = items.rbegin(); it != items.rend(); ++it) out = cons(*it, std::move(out));
    return out;
  }

  /// a @ b; copies the spine of `a`, shares `b`.
  static PList append(const PList& a, const PList& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<const T*> items;
    items.reserve(a.size());
    for (const T& x : a) items.push_back(&x);
    PList out = b;
    for (auto it = items.rbegin(); it != items.rend(); ++it) out = cons(**it, std::move(out));
    return out;
  }

  [[nodiscard]] bool empty() const noexcept { return !node_; }
  [[nodiscard]] std::size_t size() const noexcept { return node_ ? node_->size : 0; }
  [[nodiscard]] const T& head() const { return node_->head; }
  [[nodiscard]] const PList& tail() const { return node_->tail; }

  [[nodiscard]] PList push(T x) const { return cons(std::move(x), *this); }

  [[nodiscard]] const T& back() const {
    const Node* n = node_.get();
    while (n->tail.node_) n = n->tail.node_.get();
    return n->head;
  }

  /// Identity of the head cell; equal lists built independently differ.
  [[nodiscard]] const void* identity() const noexcept { return node_.get(); }

  [[nodiscard]] std::vector<T> to_vector() const {
    std::vector<T> out;
    out.reserve(size());
    for (const T& x : *this) out.push_back(x);
    return out;
  }

  class const_iterator {
    const Node* n_ = nullptr;

   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = T;
    using difference_type = std::ptrdiff_t;
    using pointer = const T*;
    using reference = const T&;

    const_iterator() = default;
    explicit const_iterator(const Node* n) : n_(n) {}
    reference operator*() const { return n_->head; }
    pointer operator->() const { return &n_->head; }
    const_iterator& operator++() {
      n_ = n_->tail.node_.get();
      return *this;
    }
    const_iterator operator++(int) {
      auto c = *this;
      ++*this;
      return c;
    }
    bool operator==(const const_iterator& o) const { return n_ == o.n_; }
    bool operator!=(const const_iterator& o) const { return n_ != o.n_; }
  };

  [[nodiscard]] const_iterator begin() const { return const_iterator(node_.get()); }
  [[nodiscard]] const_iterator end() const { return const_iterator(nullptr); }
};

}  // namespace fibervm
