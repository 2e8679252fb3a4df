#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace esdp {

using XmlAttrs = std::vector<std::pair<std::string, std::string>>;

/// Indented (two spaces, LF) XML writer.
class XmlWriter {
public:
    void declaration();
    void open(const std::string& name, const XmlAttrs& attrs = {});
    void close();
    void empty(const std::string& name, const XmlAttrs& attrs = {});
    void text_element(const std::string& name, const XmlAttrs& attrs, std::string_view text);
    const std::string& str() const { return out_; }

private:
    void start_tag(const std::string& name, const XmlAttrs& attrs);
    std::string out_;
    std::vector<std::string> stack_;
};

std::string xml_escape(std::string_view text, bool attribute = false);

struct XmlNode {
    std::string name;
    XmlAttrs attrs; // document order
    std::vector<XmlNode> children;
    std::string text; // character data directly inside this element
    int line = 0;

    const std::string* attr(std::string_view key) const;
};

/// Well-formedness-checking parser. Comments, processing instructions and
/// CDATA are accepted; DOCTYPE declarations are rejected. Errors are thrown
/// as SchemaViolation with path "/".
XmlNode parse_xml(std::string_view text);

} // namespace esdp
