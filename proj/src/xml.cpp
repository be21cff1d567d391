#include "rentlens/xml.hpp"

#include <cctype>

#include "rentlens/error.hpp"

namespace rentlens {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char peek_at(size_t off) const {
    return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
  }
  void advance() { ++pos_; }
  size_t pos() const { return pos_; }

  bool starts_with(std::string_view s) const {
    return text_.substr(pos_, s.size()) == s;
  }
  void skip(size_t n) { pos_ += n; }

  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1;
    int col = 1;
    for (size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) {
      advance();
    }
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
};

bool name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}
bool name_char(char c) {
  return name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '-' || c == '.';
}

std::string read_name(Cursor& cur) {
  if (cur.eof() || !name_start(cur.peek())) {
    cur.fail("expected a name");
  }
  std::string name;
  while (!cur.eof() && name_char(cur.peek())) {
    name += cur.peek();
    cur.advance();
  }
  return name;
}

void append_entity(Cursor& cur, std::string& out) {
  // cur sits on '&'
  cur.advance();
  std::string ent;
  while (!cur.eof() && cur.peek() != ';') {
    ent += cur.peek();
    cur.advance();
    if (ent.size() > 10) {
      cur.fail("unterminated entity reference");
    }
  }
  if (cur.eof()) {
    cur.fail("unterminated entity reference");
  }
  cur.advance();  // ';'
  if (ent == "amp") {
    out += '&';
  } else if (ent == "lt") {
    out += '<';
  } else if (ent == "gt") {
    out += '>';
  } else if (ent == "quot") {
    out += '"';
  } else if (ent == "apos") {
    out += '\'';
  } else if (!ent.empty() && ent[0] == '#') {
    long code = 0;
    try {
      code = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                 ? std::stol(ent.substr(2), nullptr, 16)
                 : std::stol(ent.substr(1), nullptr, 10);
    } catch (const std::exception&) {
      cur.fail("bad character reference '&" + ent + ";'");
    }
    if (code <= 0 || code > 0x10FFFF) {
      cur.fail("character reference out of range");
    }
    // UTF-8 encode.
    const unsigned long c = static_cast<unsigned long>(code);
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  } else {
    cur.fail("unknown entity '&" + ent + ";'");
  }
}

// Skips comments, processing instructions and DOCTYPE; returns false when
// nothing was skipped.
bool skip_misc(Cursor& cur) {
  if (cur.starts_with("<!--")) {
    cur.skip(4);
    while (!cur.starts_with("-->")) {
      if (cur.eof()) {
        cur.fail("unterminated comment");
      }
      cur.advance();
    }
    cur.skip(3);
    return true;
  }
  if (cur.starts_with("<?")) {
    cur.skip(2);
    while (!cur.starts_with("?>")) {
      if (cur.eof()) {
        cur.fail("unterminated processing instruction");
      }
      cur.advance();
    }
    cur.skip(2);
    return true;
  }
  if (cur.starts_with("<!DOCTYPE")) {
    while (!cur.eof() && cur.peek() != '>') {
      cur.advance();
    }
    if (cur.eof()) {
      cur.fail("unterminated DOCTYPE");
    }
    cur.advance();
    return true;
  }
  return false;
}

XmlNode parse_element(Cursor& cur, int depth) {
  if (depth > 200) {
    cur.fail("element nesting too deep");
  }
  if (cur.eof() || cur.peek() != '<') {
    cur.fail("expected '<'");
  }
  cur.advance();
  XmlNode node;
  node.name = read_name(cur);

  for (;;) {
    cur.skip_ws();
    if (cur.eof()) {
      cur.fail("unterminated start tag <" + node.name + ">");
    }
    if (cur.peek() == '/') {
      cur.advance();
      if (cur.eof() || cur.peek() != '>') {
        cur.fail("expected '/>' in <" + node.name + ">");
      }
      cur.advance();
      return node;  // self-closing
    }
    if (cur.peek() == '>') {
      cur.advance();
      break;
    }
    std::string key = read_name(cur);
    cur.skip_ws();
    if (cur.eof() || cur.peek() != '=') {
      cur.fail("expected '=' after attribute '" + key + "'");
    }
    cur.advance();
    cur.skip_ws();
    if (cur.eof() || (cur.peek() != '"' && cur.peek() != '\'')) {
      cur.fail("expected quoted value for attribute '" + key + "'");
    }
    const char quote = cur.peek();
    cur.advance();
    std::string value;
    while (!cur.eof() && cur.peek() != quote) {
      if (cur.peek() == '&') {
        append_entity(cur, value);
      } else if (cur.peek() == '<') {
        cur.fail("'<' inside attribute value");
      } else {
        value += cur.peek();
        cur.advance();
      }
    }
    if (cur.eof()) {
      cur.fail("unterminated attribute value");
    }
    cur.advance();
    node.attrs.emplace_back(std::move(key), std::move(value));
  }

  // Content.
  for (;;) {
    if (cur.eof()) {
      cur.fail("missing </" + node.name + ">");
    }
    if (cur.peek() == '<') {
      if (cur.peek_at(1) == '/') {
        cur.skip(2);
        const std::string closing = read_name(cur);
        if (closing != node.name) {
          cur.fail("mismatched closing tag </" + closing + ">, expected </" +
                   node.name + ">");
        }
        cur.skip_ws();
        if (cur.eof() || cur.peek() != '>') {
          cur.fail("malformed closing tag");
        }
        cur.advance();
        return node;
      }
      if (skip_misc(cur)) {
        continue;
      }
      node.children.push_back(parse_element(cur, depth + 1));
    } else if (cur.peek() == '&') {
      append_entity(cur, node.text);
    } else {
      node.text += cur.peek();
      cur.advance();
    }
  }
}

}  // namespace

XmlNode parse_xml(std::string_view text) {
  Cursor cur(text);
  cur.skip_ws();
  while (!cur.eof() && skip_misc(cur)) {
    cur.skip_ws();
  }
  if (cur.eof()) {
    cur.fail("no root element");
  }
  XmlNode root = parse_element(cur, 0);
  cur.skip_ws();
  while (!cur.eof() && skip_misc(cur)) {
    cur.skip_ws();
  }
  if (!cur.eof()) {
    cur.fail("content after the root element");
  }
  return root;
}

std::string xml_escape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace rentlens
