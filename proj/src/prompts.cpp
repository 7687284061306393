#include "btrank/prompts.hpp"

namespace btrank::prompts {

namespace {

void replace_once(std::string& text, std::string_view placeholder,
                  std::string_view value) {
  const auto pos = text.find(placeholder);
  text.replace(pos, placeholder.size(), value);
}

}  // namespace

std::string render_compare(std::string_view first_statement,
                           std::string_view second_statement) {
  std::string prompt(kCompareTemplate);
  // {problem_j} goes first: the template's {problem_i} precedes it, so the
  // later find() can never land inside an already-substituted statement even
  // if a statement happens to contain a placeholder literal.
  replace_once(prompt, "{problem_j}", second_statement);
  replace_once(prompt, "{problem_i}", first_statement);
  return prompt;
}

std::string render_label(std::string_view statement) {
  std::string prompt(kLabelTemplate);
  prompt += '\n';
  prompt += statement;
  return prompt;
}

std::string render_solve(std::string_view statement) {
  std::string prompt(kSolveTemplate);
  prompt += '\n';
  prompt += statement;
  return prompt;
}

}  // namespace btrank::prompts
