#pragma once

#include <string>
#include <string_view>

namespace trailkit::prompts {

// Prompt texts are embedded so the toolkit runs from any directory; the
// copies under assets/prompts/ are the golden files the tests pin against.

extern const std::string_view kLabelerSystem;
extern const std::string_view kLabelerUserTemplate;     // {url}, {context}
extern const std::string_view kParaphraseUserTemplate;  // {context}
extern const std::string_view kEvaluatorSystem;
extern const std::string_view kEvaluatorUserTemplate;  // {task_des}, {trajectory}

/// Replaces every occurrence of "{<key>}" with the given value.
std::string substitute(std::string_view tmpl, std::string_view key, std::string_view value);

}  // namespace trailkit::prompts
