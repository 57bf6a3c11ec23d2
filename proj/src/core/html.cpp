#include "core/html.hpp"

#include <algorithm>
#include <cctype>

#include "core/error.hpp"

namespace medroute::html {

namespace {

bool is_void_element(const std::string& tag) {
  static const char* kVoid[] = {"area",  "base", "br",    "col",  "embed",
                                "hr",    "img",  "input", "link", "meta",
                                "source", "track", "wbr"};
  return std::find(std::begin(kVoid), std::end(kVoid), tag) != std::end(kVoid);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = char(std::tolower((unsigned char)c));
  return out;
}

struct Parser {
  std::string_view in;
  size_t pos = 0;

  bool eof() const { return pos >= in.size(); }
  char peek() const { return in[pos]; }

  void skip_until(std::string_view needle) {
    size_t found = in.find(needle, pos);
    pos = found == std::string_view::npos ? in.size() : found + needle.size();
  }

  std::string read_name() {
    size_t start = pos;
    while (!eof() && (std::isalnum((unsigned char)peek()) || peek() == '-' ||
                      peek() == '_' || peek() == ':'))
      ++pos;
    return lower(in.substr(start, pos - start));
  }

  void skip_ws() {
    while (!eof() && std::isspace((unsigned char)peek())) ++pos;
  }

  void parse_attrs(Node& node) {
    while (true) {
      skip_ws();
      if (eof() || peek() == '>' || peek() == '/') return;
      std::string name = read_name();
      if (name.empty()) {
        ++pos;  // stray character, skip
        continue;
      }
      skip_ws();
      std::string value;
      if (!eof() && peek() == '=') {
        ++pos;
        skip_ws();
        if (!eof() && (peek() == '"' || peek() == '\'')) {
          char q = peek();
          ++pos;
          size_t end = in.find(q, pos);
          if (end == std::string_view::npos) end = in.size();
          value = std::string(in.substr(pos, end - pos));
          pos = std::min(end + 1, in.size());
        } else {
          size_t start = pos;
          while (!eof() && !std::isspace((unsigned char)peek()) &&
                 peek() != '>')
            ++pos;
          value = std::string(in.substr(start, pos - start));
        }
      }
      node.attrs.emplace(std::move(name), std::move(value));
    }
  }
};

}  // namespace

std::unique_ptr<Node> parse(std::string_view html) {
  auto root = std::make_unique<Node>();
  root->tag = "#root";
  std::vector<Node*> stack = {root.get()};
  Parser p{html};

  auto add_text = [&](std::string_view t) {
    if (t.empty()) return;
    auto node = std::make_unique<Node>();
    node->text = std::string(t);
    stack.back()->children.push_back(std::move(node));
  };

  while (!p.eof()) {
    size_t lt = p.in.find('<', p.pos);
    if (lt == std::string_view::npos) {
      add_text(p.in.substr(p.pos));
      break;
    }
    add_text(p.in.substr(p.pos, lt - p.pos));
    p.pos = lt + 1;
    if (p.eof()) break;

    if (p.in.compare(p.pos, 3, "!--") == 0) {
      p.pos += 3;
      p.skip_until("-->");
      continue;
    }
    if (p.peek() == '!' || p.peek() == '?') {  // doctype, PI
      p.skip_until(">");
      continue;
    }
    if (p.peek() == '/') {  // close tag
      ++p.pos;
      std::string name = p.read_name();
      p.skip_until(">");
      // pop to the nearest matching open tag; ignore strays
      for (size_t i = stack.size(); i > 1; --i) {
        if (stack[i - 1]->tag == name) {
          stack.resize(i - 1);
          break;
        }
      }
      continue;
    }

    auto node = std::make_unique<Node>();
    node->tag = p.read_name();
    if (node->tag.empty()) {  // stray '<'
      add_text("<");
      continue;
    }
    p.parse_attrs(*node);
    bool self_closed = false;
    if (!p.eof() && p.peek() == '/') {
      self_closed = true;
      ++p.pos;
    }
    p.skip_until(">");

    Node* raw = node.get();
    stack.back()->children.push_back(std::move(node));
    if (self_closed || is_void_element(raw->tag)) continue;

    if (raw->tag == "script" || raw->tag == "style") {
      size_t start = p.pos;
      std::string close = "</" + raw->tag;
      size_t end = lower(p.in.substr(start)).find(close);
      if (end == std::string::npos) {
        p.pos = p.in.size();
      } else {
        auto t = std::make_unique<Node>();
        t->text = std::string(p.in.substr(start, end));
        raw->children.push_back(std::move(t));
        p.pos = start + end;
        p.skip_until(">");
      }
      continue;
    }
    stack.push_back(raw);
  }
  return root;
}

Selector parse_selector(std::string_view s) {
  Selector sel;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    if (i >= s.size()) break;
    size_t j = s.find(' ', i);
    if (j == std::string_view::npos) j = s.size();
    std::string_view part = s.substr(i, j - i);
    i = j;

    SimpleSelector simple;
    size_t k = 0;
    while (k < part.size()) {
      char c = part[k];
      size_t start;
      if (c == '.' || c == '#') {
        start = ++k;
      } else {
        start = k;
      }
      while (k < part.size() && part[k] != '.' && part[k] != '#') ++k;
      std::string token(part.substr(start, k - start));
      require(!token.empty(), ErrorKind::Parse,
              "empty selector component in '" + std::string(s) + "'");
      if (c == '.')
        simple.classes.push_back(token);
      else if (c == '#')
        simple.id = token;
      else
        simple.tag = lower(token);
    }
    sel.parts.push_back(std::move(simple));
  }
  require(!sel.parts.empty(), ErrorKind::Parse, "empty selector");
  return sel;
}

namespace {

bool matches(const Node& node, const SimpleSelector& s) {
  if (node.is_text()) return false;
  if (!s.tag.empty() && node.tag != s.tag) return false;
  if (!s.id.empty()) {
    auto it = node.attrs.find("id");
    if (it == node.attrs.end() || it->second != s.id) return false;
  }
  if (!s.classes.empty()) {
    auto it = node.attrs.find("class");
    if (it == node.attrs.end()) return false;
    std::vector<std::string> have;
    size_t i = 0;
    const std::string& cls = it->second;
    while (i < cls.size()) {
      while (i < cls.size() && std::isspace((unsigned char)cls[i])) ++i;
      size_t start = i;
      while (i < cls.size() && !std::isspace((unsigned char)cls[i])) ++i;
      if (i > start) have.push_back(cls.substr(start, i - start));
    }
    for (const auto& want : s.classes)
      if (std::find(have.begin(), have.end(), want) == have.end())
        return false;
  }
  return true;
}

// Pre-order walk; a node matches when it satisfies the last selector part
// and its ancestor chain greedily satisfies the leading parts.
const Node* search(const Node& node, const Selector& sel,
                   std::vector<const Node*>& ancestors) {
  if (!node.is_text() && matches(node, sel.parts.back())) {
    size_t ptr = 0;
    for (const Node* a : ancestors) {
      if (ptr + 1 == sel.parts.size()) break;
      if (matches(*a, sel.parts[ptr])) ++ptr;
    }
    if (ptr + 1 == sel.parts.size()) return &node;
  }
  ancestors.push_back(&node);
  for (const auto& child : node.children)
    if (const Node* hit = search(*child, sel, ancestors)) return hit;
  ancestors.pop_back();
  return nullptr;
}

void collect_text(const Node& node, std::string& out) {
  if (node.is_text()) out += node.text;
  for (const auto& child : node.children) collect_text(*child, out);
}

}  // namespace

const Node* find_first(const Node& root, const Selector& sel) {
  std::vector<const Node*> ancestors;
  for (const auto& child : root.children)
    if (const Node* hit = search(*child, sel, ancestors)) return hit;
  return nullptr;
}

std::string text_content(const Node& node) {
  std::string out;
  collect_text(node, out);
  size_t start = out.find_first_not_of(" \t\r\n\f\v");
  if (start == std::string::npos) return "";
  size_t end = out.find_last_not_of(" \t\r\n\f\v");
  return out.substr(start, end - start + 1);
}

}  // namespace medroute::html
