#include "ontolink/ntriples.hpp"

#include <sstream>

#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

namespace {

constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";

void append_key(std::string& key, const Term& t) {
  key += static_cast<char>('0' + static_cast<int>(t.kind));
  key += t.value;
  key += '\x1f';
  key += t.datatype;
  key += '\x1f';
  key += t.language;
  key += '\x1e';
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

// Cursor over a single N-Triples line.
class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

  // Returns false when the line holds no statement (blank or comment).
  bool parse(Triple& out) {
    skip_ws();
    if (at_end() || peek() == '#') return false;

    out.subject = subject();
    skip_ws();
    out.predicate = Term::iri(iri());
    skip_ws();
    out.object = object();
    skip_ws();
    expect('.', "expected '.' at end of statement");
    skip_ws();
    if (!at_end() && peek() != '#') fail("unexpected content after '.'");
    return true;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(line_no_, message); }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void expect(char c, const char* message) {
    if (at_end() || peek() != c) fail(message);
    ++pos_;
  }

  Term subject() {
    if (at_end()) fail("missing subject");
    if (peek() == '<') return Term::iri(iri());
    if (peek() == '_') return Term::blank(blank_label());
    fail("subject must be an IRI or blank node");
  }

  Term object() {
    if (at_end()) fail("missing object");
    switch (peek()) {
      case '<': return Term::iri(iri());
      case '_': return Term::blank(blank_label());
      case '"': return literal();
      default: fail("object must be an IRI, blank node or literal");
    }
  }

  std::string iri() {
    expect('<', "expected '<' to open an IRI");
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      const char c = s_[pos_++];
      if (c == '>') break;
      if (c == '\\') {
        if (at_end()) fail("dangling escape in IRI");
        const char e = s_[pos_++];
        if (e == 'u') {
          unicode_escape(out, 4);
        } else if (e == 'U') {
          unicode_escape(out, 8);
        } else {
          fail("invalid escape in IRI");
        }
        continue;
      }
      if (c == ' ' || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
          c == '`' || static_cast<unsigned char>(c) <= 0x20) {
        fail("illegal character in IRI");
      }
      out += c;
    }
    return out;
  }

  std::string blank_label() {
    expect('_', "expected blank node");
    expect(':', "expected ':' after '_'");
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (is_alpha(c) || is_digit(c) || c == '_' || c == '-' || c == '.' ||
          static_cast<unsigned char>(c) >= 0x80) {
        ++pos_;
      } else {
        break;
      }
    }
    // A label may not end with '.', which belongs to the statement terminator.
    while (pos_ > start && s_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    return std::string(s_.substr(start, pos_ - start));
  }

  Term literal() {
    expect('"', "expected '\"' to open a literal");
    std::string value;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("unterminated string literal");
        const char e = s_[pos_++];
        switch (e) {
          case 't': value += '\t'; break;
          case 'b': value += '\b'; break;
          case 'n': value += '\n'; break;
          case 'r': value += '\r'; break;
          case 'f': value += '\f'; break;
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\\': value += '\\'; break;
          case 'u': unicode_escape(value, 4); break;
          case 'U': unicode_escape(value, 8); break;
          default: fail(std::string("invalid escape \\") + e + " in literal");
        }
        continue;
      }
      value += c;
    }

    if (!at_end() && peek() == '@') {
      ++pos_;
      const std::size_t start = pos_;
      while (!at_end() && is_alpha(peek())) ++pos_;
      if (pos_ == start) fail("empty language tag");
      while (!at_end() && peek() == '-') {
        ++pos_;
        const std::size_t sub = pos_;
        while (!at_end() && (is_alpha(peek()) || is_digit(peek()))) ++pos_;
        if (pos_ == sub) fail("malformed language tag");
      }
      return Term::literal(std::move(value), {}, text::to_lower(s_.substr(start, pos_ - start)));
    }
    if (!at_end() && peek() == '^') {
      ++pos_;
      expect('^', "expected '^^' before datatype");
      std::string datatype = iri();
      if (datatype == kXsdString) datatype.clear();
      return Term::literal(std::move(value), std::move(datatype));
    }
    return Term::literal(std::move(value));
  }

  void unicode_escape(std::string& out, int digits) {
    char32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      if (at_end() || !is_hex(peek())) fail("malformed unicode escape");
      const char h = s_[pos_++];
      cp = cp * 16 + static_cast<char32_t>(is_digit(h) ? h - '0' : (h | 0x20) - 'a' + 10);
    }
    if (!text::append_utf8(out, cp)) fail("unicode escape out of range");
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace

bool TripleSet::insert(Triple t) {
  std::string key;
  append_key(key, t.subject);
  append_key(key, t.predicate);
  append_key(key, t.object);
  if (!keys_.insert(std::move(key)).second) return false;
  triples_.push_back(std::move(t));
  return true;
}

TripleSet parse_graph(std::istream& source, RdfFormat format) {
  (void)format;  // N-Triples is the only supported serialization.
  TripleSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    Triple t;
    if (LineParser(line, line_no).parse(t)) out.insert(std::move(t));
  }
  return out;
}

TripleSet parse_ntriples(std::string_view document) {
  std::istringstream in{std::string(document)};
  return parse_graph(in);
}

}  // namespace ontolink
