#include "cori/templates.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "cori/errors.hpp"

namespace cori {

namespace {

std::string join_standalone_tags(const std::string& text) {
  static const std::regex standalone(R"((^|\n)[ \t]*(\{\{[#^/][A-Za-z0-9_]+\}\})[ \t]*(\n|$))");
  std::string current = text;
  // Matches overlap on the shared newline, so repeat until stable.
  for (;;) {
    std::string next = std::regex_replace(current, standalone, "$1$2", std::regex_constants::format_first_only);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::string render_span(const std::string& text, const TemplateContext& context) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    out.append(text, pos, open - pos);
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string::npos) throw ParseError(fmt::format("template: unterminated tag at offset {}", open));
    const std::string tag = text.substr(open + 2, close - open - 2);
    if (tag.empty()) throw ParseError(fmt::format("template: empty tag at offset {}", open));
    const char kind = tag.front();
    if (kind == '#' || kind == '^') {
      const std::string name = tag.substr(1);
      const std::string end_tag = "{{/" + name + "}}";
      const std::size_t end = text.find(end_tag, close + 2);
      if (end == std::string::npos) throw ParseError(fmt::format("template: section '{}' is not closed", name));
      const auto it = context.find(name);
      if (it == context.end() || !std::holds_alternative<bool>(it->second)) {
        throw std::invalid_argument(fmt::format("template: no boolean value for section '{}'", name));
      }
      const bool show = std::get<bool>(it->second) == (kind == '#');
      if (show) out += render_span(text.substr(close + 2, end - close - 2), context);
      pos = end + end_tag.size();
    } else if (kind == '/') {
      throw ParseError(fmt::format("template: unexpected closing tag '{}'", tag));
    } else {
      const auto it = context.find(tag);
      if (it == context.end() || !std::holds_alternative<std::string>(it->second)) {
        throw std::invalid_argument(fmt::format("template: no text value for slot '{}'", tag));
      }
      out += std::get<std::string>(it->second);
      pos = close + 2;
    }
  }
  return out;
}

std::string read_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open template '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

}  // namespace

std::string render_template(const std::string& text, const TemplateContext& context) {
  return render_span(join_standalone_tags(text), context);
}

PromptTemplates load_templates(const std::filesystem::path& dir) {
  return {read_template(dir / "environment.txt"), read_template(dir / "trajectory_preamble.txt"),
          read_template(dir / "task_questions.txt"), read_template(dir / "final_addendum.txt"),
          read_template(dir / "generation.txt")};
}

std::filesystem::path default_template_dir() {
  if (const char* env = std::getenv("CORI_TEMPLATE_DIR"); env != nullptr && *env != '\0') return env;
#ifdef CORI_DEFAULT_TEMPLATE_DIR
  return CORI_DEFAULT_TEMPLATE_DIR;
#else
  return "templates";
#endif
}

}  // namespace cori
