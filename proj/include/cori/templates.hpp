#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

namespace cori {

/// Slot values: strings substitute `{{name}}`; booleans drive
/// `{{#name}}...{{/name}}` (render when true) and `{{^name}}...{{/name}}`
/// (render when false). A section tag alone on its line takes the line
/// break with it. Unknown slots are an error.
using TemplateValue = std::variant<std::string, bool>;
using TemplateContext = std::map<std::string, TemplateValue>;

std::string render_template(const std::string& text, const TemplateContext& context);

struct PromptTemplates {
  std::string environment;
  std::string trajectory_preamble;
  std::string task_questions;
  std::string final_addendum;
  std::string generation;
};

/// Reads the five template files from `dir`, dropping one trailing newline
/// from each.
PromptTemplates load_templates(const std::filesystem::path& dir);

/// $CORI_TEMPLATE_DIR if set, else the source-tree templates directory.
std::filesystem::path default_template_dir();

}  // namespace cori
