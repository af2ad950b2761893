#include "weldcrack/expression.hpp"

#include <cctype>
#include <cmath>

#include "weldcrack/numfmt.hpp"
#include <sstream>

namespace weldcrack {

bool is_binary(NodeKind k) {
    return k == NodeKind::add || k == NodeKind::sub || k == NodeKind::mul || k == NodeKind::div;
}

bool is_unary(NodeKind k) { return k == NodeKind::log || k == NodeKind::exp; }

Expression Expression::constant(double v) {
    auto n = std::make_unique<Node>();
    n->kind = NodeKind::constant;
    n->value = v;
    return Expression(std::move(n));
}

Expression Expression::term(int index) {
    if (index < 0 || index > 5) throw ExpressionError("term index out of range");
    auto n = std::make_unique<Node>();
    n->kind = NodeKind::term;
    n->term_index = index;
    return Expression(std::move(n));
}

Expression Expression::unary(NodeKind k, Expression child) {
    if (!is_unary(k)) throw ExpressionError("not a unary operator");
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->left = std::move(child.root_);
    return Expression(std::move(n));
}

Expression Expression::binary(NodeKind k, Expression lhs, Expression rhs) {
    if (!is_binary(k)) throw ExpressionError("not a binary operator");
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->left = std::move(lhs.root_);
    n->right = std::move(rhs.root_);
    return Expression(std::move(n));
}

Expression Expression::canonical() {
    auto m1 = binary(NodeKind::mul, term(0), term(3));
    auto m2 = binary(NodeKind::mul, term(1), term(5));
    auto m3 = binary(NodeKind::mul, term(2), term(4));
    return binary(NodeKind::add, binary(NodeKind::add, std::move(m1), std::move(m2)),
                  std::move(m3));
}

std::unique_ptr<Expression::Node> Expression::clone(const Node* n) {
    if (!n) return nullptr;
    auto out = std::make_unique<Node>();
    out->kind = n->kind;
    out->value = n->value;
    out->term_index = n->term_index;
    out->left = clone(n->left.get());
    out->right = clone(n->right.get());
    return out;
}

namespace {

double eval_node(const Expression::Node* n, const TermValues& t, bool& sentinel) {
    if (!n) throw ExpressionError("evaluation reached a null node");
    switch (n->kind) {
        case NodeKind::constant:
            return n->value;
        case NodeKind::term:
            return t[n->term_index];
        case NodeKind::log: {
            const double x = eval_node(n->left.get(), t, sentinel);
            if (x <= 0.0) {
                sentinel = true;
                return kPenaltySentinel;
            }
            return std::log(x);
        }
        case NodeKind::exp: {
            double x = eval_node(n->left.get(), t, sentinel);
            if (x > kExpArgClamp) x = kExpArgClamp;
            if (x < -kExpArgClamp) x = -kExpArgClamp;
            return std::exp(x);
        }
        default:
            break;
    }
    const double a = eval_node(n->left.get(), t, sentinel);
    const double b = eval_node(n->right.get(), t, sentinel);
    double r = 0.0;
    switch (n->kind) {
        case NodeKind::add: r = a + b; break;
        case NodeKind::sub: r = a - b; break;
        case NodeKind::mul: r = a * b; break;
        case NodeKind::div:
            if (std::abs(b) < kDivEpsilon) {
                sentinel = true;
                return kPenaltySentinel;
            }
            r = a / b;
            break;
        default:
            throw ExpressionError("unknown node kind");
    }
    if (!std::isfinite(r)) {
        sentinel = true;
        return kPenaltySentinel;
    }
    return r;
}

void count_node(const Expression::Node* n, int& count, int depth, int& max_depth) {
    if (!n) return;
    ++count;
    if (depth > max_depth) max_depth = depth;
    count_node(n->left.get(), count, depth + 1, max_depth);
    count_node(n->right.get(), count, depth + 1, max_depth);
}

const char* op_token(NodeKind k) {
    switch (k) {
        case NodeKind::add: return "+";
        case NodeKind::sub: return "-";
        case NodeKind::mul: return "*";
        case NodeKind::div: return "/";
        case NodeKind::log: return "ln";
        case NodeKind::exp: return "exp";
        default: return "?";
    }
}

void print_node(const Expression::Node* n, std::string& out) {
    if (!n) throw ExpressionError("cannot print an empty expression");
    switch (n->kind) {
        case NodeKind::constant:
            out += format_sig(n->value, 9);
            return;
        case NodeKind::term:
            out += "T" + std::to_string(n->term_index + 1);
            return;
        default:
            break;
    }
    out += "(";
    out += op_token(n->kind);
    out += " ";
    print_node(n->left.get(), out);
    if (is_binary(n->kind)) {
        out += " ";
        print_node(n->right.get(), out);
    }
    out += ")";
}

struct PrefixParser {
    const std::string& text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw ExpressionError("expression parse error at offset " + std::to_string(pos) + ": " + what);
    }

    std::string token() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')')
            ++pos;
        if (start == pos) fail("expected a token");
        return text.substr(start, pos - start);
    }

    std::unique_ptr<Expression::Node> parse() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        if (text[pos] == '(') {
            ++pos;
            const std::string op = token();
            NodeKind kind;
            if (op == "+") kind = NodeKind::add;
            else if (op == "-") kind = NodeKind::sub;
            else if (op == "*") kind = NodeKind::mul;
            else if (op == "/") kind = NodeKind::div;
            else if (op == "ln") kind = NodeKind::log;
            else if (op == "exp") kind = NodeKind::exp;
            else fail("unknown operator '" + op + "'");
            auto n = std::make_unique<Expression::Node>();
            n->kind = kind;
            n->left = parse();
            if (is_binary(kind)) n->right = parse();
            skip_ws();
            if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
            ++pos;
            return n;
        }
        const std::string tok = token();
        auto n = std::make_unique<Expression::Node>();
        if (tok.size() == 2 && tok[0] == 'T' && tok[1] >= '1' && tok[1] <= '6') {
            n->kind = NodeKind::term;
            n->term_index = tok[1] - '1';
            return n;
        }
        n->kind = NodeKind::constant;
        try {
            size_t used = 0;
            n->value = std::stod(tok, &used);
            if (used != tok.size()) fail("bad numeric literal '" + tok + "'");
        } catch (const std::exception&) {
            fail("bad token '" + tok + "'");
        }
        return n;
    }
};

void validate_node(const Expression::Node* n) {
    if (!n) throw ExpressionError("null node in expression");
    switch (n->kind) {
        case NodeKind::constant:
        case NodeKind::term:
            if (n->left || n->right) throw ExpressionError("leaf node has children");
            if (n->kind == NodeKind::term && (n->term_index < 0 || n->term_index > 5))
                throw ExpressionError("term index out of range");
            return;
        default:
            break;
    }
    if (is_unary(n->kind)) {
        if (!n->left || n->right) throw ExpressionError("unary node arity violation");
        validate_node(n->left.get());
        return;
    }
    if (!n->left || !n->right) throw ExpressionError("binary node arity violation");
    validate_node(n->left.get());
    validate_node(n->right.get());
}

bool nodes_equal(const Expression::Node* a, const Expression::Node* b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    if (a->kind == NodeKind::constant && a->value != b->value) return false;
    if (a->kind == NodeKind::term && a->term_index != b->term_index) return false;
    return nodes_equal(a->left.get(), b->left.get()) && nodes_equal(a->right.get(), b->right.get());
}

void collect(Expression::Node* n, std::vector<Expression::Node*>& out) {
    if (!n) return;
    out.push_back(n);
    collect(n->left.get(), out);
    collect(n->right.get(), out);
}

}  // namespace

double Expression::evaluate(const TermValues& t, bool* hit_sentinel) const {
    if (!root_) throw ExpressionError("cannot evaluate an empty expression");
    bool sentinel = false;
    const double v = eval_node(root_.get(), t, sentinel);
    if (hit_sentinel) *hit_sentinel = sentinel;
    return v;
}

int Expression::node_count() const {
    int count = 0, max_depth = 0;
    count_node(root_.get(), count, 1, max_depth);
    return count;
}

int Expression::depth() const {
    int count = 0, max_depth = 0;
    count_node(root_.get(), count, 1, max_depth);
    return max_depth;
}

std::string Expression::to_prefix() const {
    std::string out;
    print_node(root_.get(), out);
    return out;
}

Expression Expression::from_prefix(const std::string& text) {
    PrefixParser p{text};
    auto root = p.parse();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing characters after expression");
    Expression e(std::move(root));
    e.validate();
    return e;
}

bool Expression::structurally_equal(const Expression& other) const {
    return nodes_equal(root_.get(), other.root_.get());
}

std::vector<Expression::Node*> Expression::all_nodes() {
    std::vector<Node*> out;
    collect(root_.get(), out);
    return out;
}

void Expression::validate() const {
    validate_node(root_.get());
}

}  // namespace weldcrack
