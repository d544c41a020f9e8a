#ifndef SRB_XML_HPP
#define SRB_XML_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "srb/error.hpp"

namespace srb::xml {

// Minimal XML subset sufficient for URDF documents: elements, attributes,
// comments, processing instructions, character data (discarded), and the
// five predefined entities. No DTDs, namespaces, or CDATA.

struct Element {
    std::string name;
    std::map<std::string, std::string> attributes;
    std::vector<std::unique_ptr<Element>> children;
    int line = 0;

    const Element* first_child(const std::string& child_name) const {
        for (const auto& c : children) {
            if (c->name == child_name) return c.get();
        }
        return nullptr;
    }

    std::vector<const Element*> children_named(const std::string& child_name) const {
        std::vector<const Element*> out;
        for (const auto& c : children) {
            if (c->name == child_name) out.push_back(c.get());
        }
        return out;
    }

    bool has_attribute(const std::string& key) const { return attributes.count(key) != 0; }

    std::string attribute(const std::string& key) const {
        auto it = attributes.find(key);
        if (it == attributes.end()) {
            throw ParseError("element <" + name + "> missing attribute '" + key + "'", line);
        }
        return it->second;
    }

    std::string attribute_or(const std::string& key, const std::string& fallback) const {
        auto it = attributes.find(key);
        return it == attributes.end() ? fallback : it->second;
    }
};

namespace detail {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    std::unique_ptr<Element> parse_document() {
        skip_misc();
        if (at_end()) {
            throw ParseError("document has no root element", line_);
        }
        auto root = parse_element();
        skip_misc();
        if (!at_end()) {
            throw ParseError("content after document root", line_);
        }
        return root;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }

    char peek(size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') line_++;
        return c;
    }

    bool match(const std::string& s) {
        if (text_.compare(pos_, s.size(), s) != 0) return false;
        for (size_t i = 0; i < s.size(); ++i) advance();
        return true;
    }

    void skip_whitespace() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) {
            advance();
        }
    }

    // Whitespace, comments, PIs, and the XML declaration between elements.
    void skip_misc() {
        while (true) {
            skip_whitespace();
            if (match("<!--")) {
                while (!at_end() && !match("-->")) advance();
            } else if (peek() == '<' && peek(1) == '?') {
                while (!at_end() && !match("?>")) advance();
            } else {
                return;
            }
        }
    }

    static bool is_name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-' || c == '.' || c == ':';
    }

    std::string parse_name() {
        std::string name;
        while (!at_end() && is_name_char(peek())) {
            name.push_back(advance());
        }
        if (name.empty()) {
            throw ParseError("expected a name", line_);
        }
        return name;
    }

    std::string parse_attribute_value() {
        char quote = peek();
        if (quote != '"' && quote != '\'') {
            throw ParseError("attribute value must be quoted", line_);
        }
        advance();
        std::string value;
        while (!at_end() && peek() != quote) {
            if (peek() == '&') {
                value += parse_entity();
            } else {
                value.push_back(advance());
            }
        }
        if (at_end()) {
            throw ParseError("unterminated attribute value", line_);
        }
        advance();
        return value;
    }

    std::string parse_entity() {
        advance(); // '&'
        std::string name;
        while (!at_end() && peek() != ';') name.push_back(advance());
        if (at_end()) {
            throw ParseError("unterminated entity reference", line_);
        }
        advance();
        if (name == "amp") return "&";
        if (name == "lt") return "<";
        if (name == "gt") return ">";
        if (name == "quot") return "\"";
        if (name == "apos") return "'";
        throw ParseError("unknown entity &" + name + ";", line_);
    }

    std::unique_ptr<Element> parse_element() {
        if (peek() != '<') {
            throw ParseError("expected '<'", line_);
        }
        int start_line = line_;
        advance();
        auto elem = std::make_unique<Element>();
        elem->line = start_line;
        elem->name = parse_name();
        while (true) {
            skip_whitespace();
            if (match("/>")) {
                return elem;
            }
            if (peek() == '>') {
                advance();
                break;
            }
            std::string key = parse_name();
            skip_whitespace();
            if (peek() != '=') {
                throw ParseError("expected '=' after attribute name '" + key + "'", line_);
            }
            advance();
            skip_whitespace();
            if (elem->attributes.count(key)) {
                throw ParseError("duplicate attribute '" + key + "'", line_);
            }
            elem->attributes[key] = parse_attribute_value();
        }
        // Content: child elements, character data (ignored), comments.
        while (true) {
            if (at_end()) {
                throw ParseError("unterminated element <" + elem->name + ">", start_line);
            }
            if (match("<!--")) {
                while (!at_end() && !match("-->")) advance();
                continue;
            }
            if (peek() == '<' && peek(1) == '/') {
                advance();
                advance();
                std::string closing = parse_name();
                if (closing != elem->name) {
                    throw ParseError("mismatched closing tag </" + closing + "> for <" +
                                         elem->name + ">",
                                     line_);
                }
                skip_whitespace();
                if (peek() != '>') {
                    throw ParseError("malformed closing tag", line_);
                }
                advance();
                return elem;
            }
            if (peek() == '<') {
                elem->children.push_back(parse_element());
                continue;
            }
            if (peek() == '&') {
                parse_entity();
                continue;
            }
            advance(); // character data
        }
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
};

} // namespace detail

inline std::unique_ptr<Element> parse(const std::string& text) {
    return detail::Parser(text).parse_document();
}

} // namespace srb::xml

#endif
