#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace medroute::html {

// Tolerant HTML DOM: unclosed and mismatched tags are accepted, comments
// and doctype skipped, script/style bodies treated as raw text.
struct Node {
  std::string tag;  // empty for text nodes
  std::string text;
  std::map<std::string, std::string> attrs;
  std::vector<std::unique_ptr<Node>> children;

  bool is_text() const { return tag.empty(); }
};

std::unique_ptr<Node> parse(std::string_view html);  // returns root

// Selector subset: `tag`, `.class`, `#id`, compounds thereof
// (`div.q#main`), and descendant combination by spaces.
struct SimpleSelector {
  std::string tag;
  std::vector<std::string> classes;
  std::string id;
};

struct Selector {
  std::vector<SimpleSelector> parts;  // ancestor ... descendant
};

Selector parse_selector(std::string_view s);

// First match in document (pre-)order, or nullptr.
const Node* find_first(const Node& root, const Selector& sel);

// Concatenated descendant text with leading/trailing whitespace stripped.
std::string text_content(const Node& node);

}  // namespace medroute::html
