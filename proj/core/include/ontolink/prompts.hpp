#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace ontolink {

/// A versioned prompt with `{{name}}` placeholders.
///
/// File layout:
///   version: <id>
///   === system
///   ...
///   === user
///   ...
struct PromptTemplate {
  std::string version;
  std::string system;
  std::string user;

  /// Throws ConfigError on a malformed template.
  static PromptTemplate parse(std::string_view text, std::string_view origin = "<prompt>");
};

struct RenderedPrompt {
  std::string system;
  std::string user;
};

/// Replaces every `{{name}}`. Throws ConfigError on a placeholder without a
/// value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

RenderedPrompt render(const PromptTemplate& prompt, const std::map<std::string, std::string, std::less<>>& values);

struct PromptLibrary {
  PromptTemplate selector;
  PromptTemplate scorer;
  PromptTemplate synonyms;
  PromptTemplate adjudicator;

  /// Templates compiled into the library.
  static const PromptLibrary& builtin();

  /// Reads `<name>.prompt` files; missing files fall back to the built-in text.
  static PromptLibrary load_dir(const std::filesystem::path& dir);
};

}  // namespace ontolink
