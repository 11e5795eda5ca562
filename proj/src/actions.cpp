#include "trailkit/actions.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "trailkit/errors.hpp"

namespace trailkit::env {

namespace {

struct Arg {
    enum class Kind { string, number } kind;
    std::string text;   // string payload (unescaped)
    long number = 0;
    size_t position = 0;
};

struct Parser {
    const std::string& src;
    size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= src.size();
    }
    char peek() { return src[pos]; }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        if (pos == start) throw ActionParseError("expected action verb", pos);
        return src.substr(start, pos - start);
    }

    void expect(char c) {
        skip_ws();
        if (pos >= src.size() || src[pos] != c)
            throw ActionParseError(std::string("expected '") + c + "'", pos);
        ++pos;
    }

    Arg argument() {
        skip_ws();
        if (pos >= src.size()) throw ActionParseError("expected argument", pos);
        Arg arg;
        arg.position = pos;
        const char c = src[pos];
        if (c == '\'' || c == '"') {
            const char quote = c;
            ++pos;
            std::string out;
            while (pos < src.size() && src[pos] != quote) {
                if (src[pos] == '\\' && pos + 1 < src.size()) {
                    ++pos;
                    switch (src[pos]) {
                        case 'n': out += '\n'; break;
                        case 't': out += '\t'; break;
                        default: out += src[pos];
                    }
                } else {
                    out += src[pos];
                }
                ++pos;
            }
            if (pos >= src.size()) throw ActionParseError("unterminated string literal", arg.position);
            ++pos;  // closing quote
            arg.kind = Arg::Kind::string;
            arg.text = std::move(out);
            return arg;
        }
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos;
            if (c == '-') ++pos;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            if (pos == start + (c == '-' ? 1u : 0u))
                throw ActionParseError("malformed number", start);
            arg.kind = Arg::Kind::number;
            arg.number = std::stol(src.substr(start, pos - start));
            return arg;
        }
        throw ActionParseError("unparseable argument", pos);
    }
};

int to_bid(const Arg& arg) {
    long v = 0;
    if (arg.kind == Arg::Kind::number) {
        v = arg.number;
    } else {
        const std::string& s = arg.text;
        if (s.empty()) throw ActionParseError("empty bid", arg.position);
        size_t used = 0;
        try {
            v = std::stol(s, &used);
        } catch (const std::exception&) {
            throw ActionParseError("bid is not an integer: '" + s + "'", arg.position);
        }
        if (used != s.size())
            throw ActionParseError("bid is not an integer: '" + s + "'", arg.position);
    }
    if (v <= 0) throw ActionParseError("bid must be positive", arg.position);
    return static_cast<int>(v);
}

std::string to_text(const Arg& arg) {
    if (arg.kind != Arg::Kind::string)
        throw ActionParseError("expected a string literal", arg.position);
    return arg.text;
}

long to_number(const Arg& arg) {
    if (arg.kind != Arg::Kind::number)
        throw ActionParseError("expected a number", arg.position);
    return arg.number;
}

void need_arity(const std::vector<Arg>& args, size_t n, const std::string& verb, size_t pos) {
    if (args.size() != n)
        throw ActionParseError(verb + " takes " + std::to_string(n) + " argument(s), got " +
                                   std::to_string(args.size()),
                               pos);
}

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\\' || c == '\'') out += '\\';
        out += c;
    }
    out += '\'';
    return out;
}

}  // namespace

Action parse_action(const std::string& text) {
    Parser p{text};
    const std::string verb = p.ident();
    const size_t verb_pos = p.pos;
    p.expect('(');
    std::vector<Arg> args;
    p.skip_ws();
    if (p.pos < text.size() && text[p.pos] != ')') {
        for (;;) {
            args.push_back(p.argument());
            p.skip_ws();
            if (p.pos < text.size() && text[p.pos] == ',') {
                ++p.pos;
                continue;
            }
            break;
        }
    }
    p.expect(')');
    if (!p.at_end()) throw ActionParseError("trailing characters after action", p.pos);

    if (verb == "goto") {
        need_arity(args, 1, verb, verb_pos);
        return GotoAction{to_text(args[0])};
    }
    if (verb == "click") {
        need_arity(args, 1, verb, verb_pos);
        return ClickAction{to_bid(args[0])};
    }
    if (verb == "dblclick") {
        need_arity(args, 1, verb, verb_pos);
        return DblClickAction{to_bid(args[0])};
    }
    if (verb == "fill") {
        need_arity(args, 2, verb, verb_pos);
        return FillAction{to_bid(args[0]), to_text(args[1])};
    }
    if (verb == "type") {
        need_arity(args, 2, verb, verb_pos);
        return TypeAction{to_bid(args[0]), to_text(args[1])};
    }
    if (verb == "press") {
        need_arity(args, 1, verb, verb_pos);
        return PressAction{to_text(args[0])};
    }
    if (verb == "hover") {
        need_arity(args, 1, verb, verb_pos);
        return HoverAction{to_bid(args[0])};
    }
    if (verb == "scroll") {
        need_arity(args, 2, verb, verb_pos);
        return ScrollAction{static_cast<int>(to_number(args[0])),
                            static_cast<int>(to_number(args[1]))};
    }
    if (verb == "select_option") {
        need_arity(args, 2, verb, verb_pos);
        return SelectOptionAction{to_bid(args[0]), to_text(args[1])};
    }
    if (verb == "clear") {
        need_arity(args, 1, verb, verb_pos);
        return ClearAction{to_bid(args[0])};
    }
    if (verb == "done") {
        if (args.size() > 1)
            throw ActionParseError("done takes at most one argument", verb_pos);
        return DoneAction{args.empty() ? "" : to_text(args[0])};
    }
    throw ActionParseError("unknown verb: " + verb, 0);
}

std::string render_action(const Action& action) {
    struct Renderer {
        std::string operator()(const GotoAction& a) const { return "goto(" + quote(a.url) + ")"; }
        std::string operator()(const ClickAction& a) const {
            return "click('" + std::to_string(a.bid) + "')";
        }
        std::string operator()(const DblClickAction& a) const {
            return "dblclick('" + std::to_string(a.bid) + "')";
        }
        std::string operator()(const FillAction& a) const {
            return "fill('" + std::to_string(a.bid) + "', " + quote(a.text) + ")";
        }
        std::string operator()(const TypeAction& a) const {
            return "type('" + std::to_string(a.bid) + "', " + quote(a.text) + ")";
        }
        std::string operator()(const PressAction& a) const {
            return "press(" + quote(a.key_combo) + ")";
        }
        std::string operator()(const HoverAction& a) const {
            return "hover('" + std::to_string(a.bid) + "')";
        }
        std::string operator()(const ScrollAction& a) const {
            return "scroll(" + std::to_string(a.dx) + ", " + std::to_string(a.dy) + ")";
        }
        std::string operator()(const SelectOptionAction& a) const {
            return "select_option('" + std::to_string(a.bid) + "', " + quote(a.value) + ")";
        }
        std::string operator()(const ClearAction& a) const {
            return "clear('" + std::to_string(a.bid) + "')";
        }
        std::string operator()(const DoneAction& a) const {
            return a.message.empty() ? "done()" : "done(" + quote(a.message) + ")";
        }
    };
    return std::visit(Renderer{}, action);
}

const char* action_verb(const Action& action) {
    struct Verb {
        const char* operator()(const GotoAction&) const { return "goto"; }
        const char* operator()(const ClickAction&) const { return "click"; }
        const char* operator()(const DblClickAction&) const { return "dblclick"; }
        const char* operator()(const FillAction&) const { return "fill"; }
        const char* operator()(const TypeAction&) const { return "type"; }
        const char* operator()(const PressAction&) const { return "press"; }
        const char* operator()(const HoverAction&) const { return "hover"; }
        const char* operator()(const ScrollAction&) const { return "scroll"; }
        const char* operator()(const SelectOptionAction&) const { return "select_option"; }
        const char* operator()(const ClearAction&) const { return "clear"; }
        const char* operator()(const DoneAction&) const { return "done"; }
    };
    return std::visit(Verb{}, action);
}

int action_bid(const Action& action) {
    if (const auto* a = std::get_if<ClickAction>(&action)) return a->bid;
    if (const auto* a = std::get_if<DblClickAction>(&action)) return a->bid;
    if (const auto* a = std::get_if<FillAction>(&action)) return a->bid;
    if (const auto* a = std::get_if<TypeAction>(&action)) return a->bid;
    if (const auto* a = std::get_if<HoverAction>(&action)) return a->bid;
    if (const auto* a = std::get_if<SelectOptionAction>(&action)) return a->bid;
    if (const auto* a = std::get_if<ClearAction>(&action)) return a->bid;
    return 0;
}

bool is_done(const Action& action) { return std::holds_alternative<DoneAction>(action); }

}  // namespace trailkit::env
