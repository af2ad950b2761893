#pragma once

#include <memory>
#include <string>
#include <vector>

#include "weldcrack/types.hpp"

namespace weldcrack {

/// Raised on malformed expression trees or unparsable expression text.
struct ExpressionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NodeKind { constant, term, add, sub, mul, div, log, exp };

bool is_binary(NodeKind k);
bool is_unary(NodeKind k);

/// Guarded-evaluation sentinel: returned for division by a near-zero
/// denominator, log of a non-positive value, or any non-finite result.
inline constexpr double kPenaltySentinel = 1e9;
inline constexpr double kDivEpsilon = 1e-12;
inline constexpr double kExpArgClamp = 50.0;

/// Expression tree over term symbols T1..T6, numeric constants and the
/// operator set {+, -, *, /, ln, exp}.
class Expression {
  public:
    struct Node {
        NodeKind kind = NodeKind::constant;
        double value = 0.0;   // constant leaves
        int term_index = 0;   // term leaves, 0-based (T1 -> 0)
        std::unique_ptr<Node> left, right;
    };

    Expression() = default;
    explicit Expression(std::unique_ptr<Node> root) : root_(std::move(root)) {}
    Expression(const Expression& other) : root_(clone(other.root_.get())) {}
    Expression(Expression&&) noexcept = default;
    Expression& operator=(const Expression& other) {
        root_ = clone(other.root_.get());
        return *this;
    }
    Expression& operator=(Expression&&) noexcept = default;

    static Expression constant(double v);
    static Expression term(int index);  // 0-based
    static Expression unary(NodeKind k, Expression child);
    static Expression binary(NodeKind k, Expression lhs, Expression rhs);

    /// The canonical three-mechanism structure (T1*T4 + T2*T6) + T3*T5.
    static Expression canonical();

    /// Guarded recursive evaluation; singular sub-expressions yield the
    /// penalty sentinel instead of NaN/inf. `hit_sentinel`, when non-null,
    /// is set if any guard fired anywhere in the tree.
    double evaluate(const TermValues& t, bool* hit_sentinel = nullptr) const;

    int node_count() const;
    int depth() const;
    bool empty() const { return root_ == nullptr; }

    /// Parenthesized prefix text, e.g. "(+ (* T1 T4) 2.5)".
    std::string to_prefix() const;
    static Expression from_prefix(const std::string& text);

    /// Structural equality (same shape, kinds, indices, constant values).
    bool structurally_equal(const Expression& other) const;

    Node* root() { return root_.get(); }
    const Node* root() const { return root_.get(); }

    /// Owning slot of the root; genetic operators splice through this.
    std::unique_ptr<Node>& root_slot() { return root_; }

    /// Mutable pointers to every node, pre-order; for genetic operators.
    std::vector<Node*> all_nodes();

    /// Throws ExpressionError if any node has missing/extra children.
    void validate() const;

  private:
    static std::unique_ptr<Node> clone(const Node* n);
    std::unique_ptr<Node> root_;
};

}  // namespace weldcrack
