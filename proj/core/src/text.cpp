#include "ff/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace ff {

namespace {

void append_number(std::string& out, double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    std::string_view s(buf, static_cast<std::size_t>(end - buf));
    out += s;
    // Keep reals distinguishable from integers in the text form.
    if (std::isfinite(x) && s.find_first_of(".eEn") == std::string_view::npos) out += ".0";
}

void format_tensor(std::string& out, const Tensor& t, std::size_t dim, std::size_t& offset) {
    if (dim == t.shape.size()) {
        if (t.is_real()) {
            append_number(out, t.reals()[offset]);
        } else {
            out += std::to_string(t.ints()[offset]);
        }
        ++offset;
        return;
    }
    out += '[';
    for (int i = 0; i < t.shape[dim]; ++i) {
        if (i) out += ',';
        format_tensor(out, t, dim + 1, offset);
    }
    out += ']';
}

void format_value(std::string& out, const Value& v, const TypeSet& types) {
    if (v.is_tensor()) {
        std::size_t offset = 0;
        format_tensor(out, v.as_tensor(), 0, offset);
    } else if (v.is_tuple()) {
        out += '(';
        bool first = true;
        for (const auto& m : v.members()) {
            if (!first) out += ", ";
            first = false;
            out += types.get(m.type()).name;
            out += ' ';
            format_value(out, m, types);
        }
        out += ')';
    } else {
        throw Error(ErrorCode::MalformedLiteral, "error values have no literal form");
    }
}

// Literal parser over one line. Columns are reported 1-based relative to
// the start of the line.
class LiteralParser {
public:
    LiteralParser(std::string_view text, const TypeSet& types, std::size_t line, std::size_t column0)
        : text_(text), types_(types), line_(line), column0_(column0) {}

    Value parse_value(TypeId type) {
        const auto& d = types_.get(type);
        Value v;
        if (d.category == Category::Tuple) {
            v = parse_tuple(type);
        } else if (d.category == Category::Tensor) {
            v = parse_tensor(type, d.element);
        } else {
            fail("the error type has no literal form");
        }
        if (!well_formed(types_, v)) fail("literal does not fit type '" + d.name + "'");
        return v;
    }

    void expect_end() {
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing characters");
    }

private:
    [[noreturn]] void fail(const std::string& msg, ErrorCode code = ErrorCode::MalformedLiteral) const {
        throw CompileError(code, msg, line_, column0_ + pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string_view word() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        if (start == pos_) fail("expected a type name");
        return text_.substr(start, pos_ - start);
    }

    Value parse_tuple(TypeId type) {
        expect('(');
        Tuple members;
        if (peek(')')) {
            ++pos_;
            return Value::tuple(type, std::move(members));
        }
        while (true) {
            std::size_t at = pos_;
            auto name = word();
            auto member_type = types_.find(name);
            if (!member_type) {
                pos_ = at;
                skip_ws();
                fail("unknown type '" + std::string(name) + "'", ErrorCode::UnknownType);
            }
            members.push_back(parse_value(*member_type));
            if (peek(',')) {
                ++pos_;
                continue;
            }
            expect(')');
            break;
        }
        return Value::tuple(type, std::move(members));
    }

    // Nested bracket literal parsed into a tree first, then checked for a
    // rectangular shape and flattened row-major.
    struct Node {
        std::size_t at = 0;
        bool leaf = false;
        std::vector<Node> children;
    };

    Node parse_node(std::vector<std::int32_t>& ints, std::vector<double>& reals, bool real) {
        skip_ws();
        Node n;
        n.at = pos_;
        if (!peek('[')) {
            n.leaf = true;
            parse_number(ints, reals, real);
            return n;
        }
        ++pos_;
        if (peek(']')) {
            ++pos_;
            return n;
        }
        while (true) {
            n.children.push_back(parse_node(ints, reals, real));
            if (peek(',')) {
                ++pos_;
                continue;
            }
            expect(']');
            break;
        }
        return n;
    }

    void check_shape(const Node& n, const std::vector<int>& shape, std::size_t depth) {
        if (depth == shape.size()) {
            if (!n.leaf) {
                pos_ = n.at;
                fail("ragged tensor literal");
            }
            return;
        }
        if (n.leaf || n.children.size() != static_cast<std::size_t>(shape[depth])) {
            pos_ = n.at;
            fail("ragged tensor literal");
        }
        for (const auto& c : n.children) check_shape(c, shape, depth + 1);
    }

    Value parse_tensor(TypeId type, Element element) {
        std::vector<std::int32_t> ints;
        std::vector<double> reals;
        const bool real = element == Element::Real;
        Node root = parse_node(ints, reals, real);
        std::vector<int> shape;
        for (const Node* n = &root; !n->leaf;) {
            shape.push_back(static_cast<int>(n->children.size()));
            if (n->children.empty()) break;
            n = &n->children.front();
        }
        check_shape(root, shape, 0);
        if (real) return Value::tensor(type, Tensor{std::move(shape), std::move(reals)});
        return Value::tensor(type, Tensor{std::move(shape), std::move(ints)});
    }

    void parse_number(std::vector<std::int32_t>& ints, std::vector<double>& reals, bool real) {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != ')' &&
               text_[pos_] != ' ' && text_[pos_] != '\t')
            ++pos_;
        std::string_view tok = text_.substr(start, pos_ - start);
        if (tok.empty()) {
            pos_ = start;
            fail("expected a number");
        }
        const char* first = tok.data();
        const char* last = tok.data() + tok.size();
        if (real) {
            double x = 0;
            auto [p, ec] = std::from_chars(first, last, x);
            if (ec != std::errc() || p != last) {
                pos_ = start;
                fail("bad real literal '" + std::string(tok) + "'");
            }
            reals.push_back(x);
        } else {
            std::int32_t x = 0;
            auto [p, ec] = std::from_chars(first, last, x);
            if (ec != std::errc() || p != last) {
                pos_ = start;
                fail("bad integer literal '" + std::string(tok) + "'");
            }
            ints.push_back(x);
        }
    }

    std::string_view text_;
    const TypeSet& types_;
    std::size_t line_;
    std::size_t column0_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s, std::size_t& lead) {
    lead = 0;
    while (lead < s.size() && (s[lead] == ' ' || s[lead] == '\t' || s[lead] == '\r')) ++lead;
    s.remove_prefix(lead);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_literal(const Value& v, const TypeSet& types) {
    std::string out;
    format_value(out, v, types);
    return out;
}

Value parse_literal(std::string_view text, TypeId type, const TypeSet& types) {
    LiteralParser p(text, types, 1, 1);
    Value v = p.parse_value(type);
    p.expect_end();
    return v;
}

Code compile(std::string_view text, const Fsl& fsl) {
    Code code;
    std::size_t line_no = 0;
    while (!text.empty() || line_no == 0) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        std::size_t lead = 0;
        std::string_view line = trim(raw, lead);
        if (line.empty() || line.front() == '#') {
            if (text.empty()) break;
            continue;
        }
        std::size_t sp = line.find_first_of(" \t");
        std::string_view head = line.substr(0, sp);
        if (head == "const") {
            std::string_view rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp);
            std::size_t rest_col = lead + 1 + (sp == std::string_view::npos ? line.size() : sp);
            std::size_t tlead = 0;
            std::string_view tail = trim(rest, tlead);
            std::size_t type_end = tail.find_first_of(" \t");
            std::string_view type_name = tail.substr(0, type_end);
            if (type_name.empty()) {
                throw CompileError(ErrorCode::MalformedLiteral, "const needs a type and a literal", line_no, rest_col);
            }
            auto type = fsl.types().find(type_name);
            if (!type) {
                throw CompileError(ErrorCode::UnknownType, "unknown type '" + std::string(type_name) + "'", line_no,
                                   rest_col + tlead);
            }
            if (type_end == std::string_view::npos) {
                throw CompileError(ErrorCode::MalformedLiteral, "missing literal", line_no,
                                   rest_col + tlead + type_name.size());
            }
            std::string_view lit = tail.substr(type_end);
            LiteralParser p(lit, fsl.types(), line_no, rest_col + tlead + type_end);
            Value v = p.parse_value(*type);
            p.expect_end();
            code.push_back(Opcode::push(std::move(v)));
        } else {
            if (sp != std::string_view::npos) {
                throw CompileError(ErrorCode::MalformedLiteral, "unexpected text after primitive name", line_no,
                                   lead + 1 + sp);
            }
            auto id = fsl.find(head);
            if (!id) {
                throw CompileError(ErrorCode::UnknownPrimitive, "unknown primitive '" + std::string(head) + "'",
                                   line_no, lead + 1);
            }
            code.push_back(Opcode::call(*id));
        }
        if (text.empty()) break;
    }
    return code;
}

std::string decompile(std::span<const Opcode> code, const Fsl& fsl) {
    std::string out;
    for (std::size_t i = 0; i < code.size(); ++i) {
        if (i) out += '\n';
        const Opcode& op = code[i];
        if (op.is_call()) {
            out += fsl.get(op.primitive).name;
        } else {
            out += "const ";
            out += fsl.types().get(op.constant.type()).name;
            out += ' ';
            format_value(out, op.constant, fsl.types());
        }
    }
    return out;
}

}  // namespace ff
