#include "esdp/xml.h"

#include "esdp/errors.h"

#include <cctype>

namespace esdp {

std::string xml_escape(std::string_view text, bool attribute) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"':
            if (attribute) out += "&quot;";
            else out += c;
            break;
        case '\n':
            if (attribute) out += "&#10;";
            else out += c;
            break;
        case '\t':
            if (attribute) out += "&#9;";
            else out += c;
            break;
        case '\r': out += "&#13;"; break;
        default: out += c;
        }
    }
    return out;
}

void XmlWriter::declaration() { out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

void XmlWriter::start_tag(const std::string& name, const XmlAttrs& attrs) {
    out_.append(stack_.size() * 2, ' ');
    out_ += '<';
    out_ += name;
    for (const auto& [k, v] : attrs) {
        out_ += ' ';
        out_ += k;
        out_ += "=\"";
        out_ += xml_escape(v, true);
        out_ += '"';
    }
}

void XmlWriter::open(const std::string& name, const XmlAttrs& attrs) {
    start_tag(name, attrs);
    out_ += ">\n";
    stack_.push_back(name);
}

void XmlWriter::close() {
    std::string name = std::move(stack_.back());
    stack_.pop_back();
    out_.append(stack_.size() * 2, ' ');
    out_ += "</" + name + ">\n";
}

void XmlWriter::empty(const std::string& name, const XmlAttrs& attrs) {
    start_tag(name, attrs);
    out_ += "/>\n";
}

void XmlWriter::text_element(const std::string& name, const XmlAttrs& attrs, std::string_view text) {
    start_tag(name, attrs);
    out_ += '>';
    out_ += xml_escape(text);
    out_ += "</" + name + ">\n";
}

const std::string* XmlNode::attr(std::string_view key) const {
    for (const auto& [k, v] : attrs) {
        if (k == key) return &v;
    }
    return nullptr;
}

namespace {

class XmlParser {
public:
    explicit XmlParser(std::string_view s) : s_(s) {}

    XmlNode document() {
        if (s_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
        misc(true);
        if (!peek('<')) fail("expected root element");
        XmlNode root = element();
        misc(false);
        if (pos_ != s_.size()) fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw SchemaViolation("/", "malformed XML at line " + std::to_string(line_) + ": " + what);
    }

    bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
    bool starts(std::string_view t) const { return s_.substr(pos_).starts_with(t); }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < s_.size(); ++i) {
            if (s_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            advance(1);
    }

    void skip_until(std::string_view end, const char* what) {
        auto at = s_.find(end, pos_);
        if (at == std::string_view::npos) fail(std::string("unterminated ") + what);
        advance(at + end.size() - pos_);
    }

    void misc(bool prolog) {
        bool first = true;
        while (true) {
            if (prolog && first && starts("<?xml")) {
                skip_until("?>", "XML declaration");
            }
            first = false;
            skip_ws();
            if (starts("<!--")) {
                skip_until("-->", "comment");
            } else if (starts("<?")) {
                skip_until("?>", "processing instruction");
            } else if (starts("<!")) {
                fail("DOCTYPE and markup declarations are not accepted");
            } else {
                return;
            }
        }
    }

    static bool name_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
               static_cast<unsigned char>(c) >= 0x80;
    }
    static bool name_char(char c) {
        return name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
    }

    std::string name() {
        if (pos_ >= s_.size() || !name_start(s_[pos_])) fail("expected a name");
        std::size_t start = pos_;
        while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    static void append_utf8(std::string& out, unsigned long cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    void entity(std::string& out) {
        auto semi = s_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) fail("bad entity reference");
        std::string_view ref = s_.substr(pos_ + 1, semi - pos_ - 1);
        if (ref == "lt") out += '<';
        else if (ref == "gt") out += '>';
        else if (ref == "amp") out += '&';
        else if (ref == "quot") out += '"';
        else if (ref == "apos") out += '\'';
        else if (ref.size() > 1 && ref[0] == '#') {
            bool hex = ref[1] == 'x';
            std::string_view digits = ref.substr(hex ? 2 : 1);
            if (digits.empty()) fail("bad character reference");
            unsigned long cp = 0;
            for (char c : digits) {
                int d;
                if (std::isdigit(static_cast<unsigned char>(c))) d = c - '0';
                else if (hex && std::isxdigit(static_cast<unsigned char>(c))) d = std::tolower(c) - 'a' + 10;
                else fail("bad character reference");
                cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(d);
                if (cp > 0x10FFFF) fail("character reference out of range");
            }
            if (cp == 0) fail("character reference out of range");
            append_utf8(out, cp);
        } else {
            fail("unknown entity &" + std::string(ref) + ";");
        }
        advance(semi + 1 - pos_);
    }

    XmlNode element() {
        XmlNode node;
        node.line = line_;
        advance(1); // '<'
        node.name = name();
        while (true) {
            bool had_ws = pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]));
            skip_ws();
            if (starts("/>")) {
                advance(2);
                return node;
            }
            if (peek('>')) {
                advance(1);
                break;
            }
            if (!had_ws) fail("expected whitespace before attribute");
            std::string key = name();
            if (node.attr(key)) fail("duplicate attribute " + key);
            skip_ws();
            if (!peek('=')) fail("expected '='");
            advance(1);
            skip_ws();
            if (!peek('"') && !peek('\'')) fail("expected quoted attribute value");
            char q = s_[pos_];
            advance(1);
            std::string value;
            while (true) {
                if (pos_ >= s_.size()) fail("unterminated attribute value");
                char c = s_[pos_];
                if (c == q) {
                    advance(1);
                    break;
                }
                if (c == '<') fail("'<' in attribute value");
                if (c == '&') {
                    entity(value);
                    continue;
                }
                value += (c == '\n' || c == '\t' || c == '\r') ? ' ' : c;
                advance(1);
            }
            node.attrs.emplace_back(std::move(key), std::move(value));
        }

        // content
        while (true) {
            if (pos_ >= s_.size()) fail("unclosed element <" + node.name + ">");
            char c = s_[pos_];
            if (c == '<') {
                if (starts("</")) {
                    advance(2);
                    std::string closing = name();
                    if (closing != node.name) fail("mismatched closing tag </" + closing + "> for <" + node.name + ">");
                    skip_ws();
                    if (!peek('>')) fail("expected '>'");
                    advance(1);
                    return node;
                }
                if (starts("<!--")) {
                    skip_until("-->", "comment");
                } else if (starts("<![CDATA[")) {
                    advance(9);
                    auto end = s_.find("]]>", pos_);
                    if (end == std::string_view::npos) fail("unterminated CDATA");
                    node.text += s_.substr(pos_, end - pos_);
                    advance(end + 3 - pos_);
                } else if (starts("<?")) {
                    skip_until("?>", "processing instruction");
                } else if (starts("<!")) {
                    fail("markup declaration inside element");
                } else {
                    node.children.push_back(element());
                }
            } else if (c == '&') {
                entity(node.text);
            } else {
                if (c == '>' && pos_ >= 2 && s_.substr(pos_ - 2, 2) == "]]") fail("']]>' in character data");
                if (c == '\r' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '\n') {
                    advance(1);
                    continue;
                }
                node.text += c == '\r' ? '\n' : c;
                advance(1);
            }
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace

XmlNode parse_xml(std::string_view text) { return XmlParser(text).document(); }

} // namespace esdp
