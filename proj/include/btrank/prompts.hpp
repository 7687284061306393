#pragma once

#include <string>
#include <string_view>

namespace btrank::prompts {

// Judge prompt templates. The byte content is contract: golden-file tests
// compare rendered prompts against fixtures, so any edit here must update
// tests/data/ in lockstep.

inline constexpr std::string_view kCompareTemplate =
    "You will be given two problems. Assess which problem is more difficult. "
    "Do not solve them. Your final response will be a single letter between "
    "the @< and >@ special tokens (i.e., @<a>@ or @<b>@). Problem a: "
    "{problem_i}\nProblem b: {problem_j}";

inline constexpr std::string_view kSolveTemplate =
    "You will be given a question. Answer it by providing the final answer "
    "between @< and >@ special tokens (e.g., @<2>@, @<n=3>@, @<Yes>@).";

inline constexpr std::string_view kLabelTemplate =
    "You will be given a question. Determine the difficulty of the question "
    "on a scale from 1 to 10. Do not solve it. Your final response will be a "
    "single number between <@ and @> special tokens (e.g., <@2@>, <@8@>).";

// Token pairs the judges answer inside. The label prompt reverses the token
// order relative to the other two; the parser takes both as parameters.
inline constexpr std::string_view kChoiceOpen = "@<";
inline constexpr std::string_view kChoiceClose = ">@";
inline constexpr std::string_view kLabelOpen = "<@";
inline constexpr std::string_view kLabelClose = "@>";

// Substitutes {problem_i} and {problem_j}; nothing else changes.
std::string render_compare(std::string_view first_statement,
                           std::string_view second_statement);

// These templates carry no placeholder; the question follows on its own line.
std::string render_label(std::string_view statement);
std::string render_solve(std::string_view statement);

}  // namespace btrank::prompts
