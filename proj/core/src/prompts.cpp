#include "ontolink/prompts.hpp"

#include <fstream>
#include <sstream>

#include "ontolink/builtin_prompts.hpp"
#include "ontolink/errors.hpp"
#include "ontolink/text.hpp"

namespace ontolink {

namespace {

constexpr std::string_view kSystemMarker = "=== system\n";
constexpr std::string_view kUserMarker = "=== user\n";

std::string strip_trailing_newlines(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view text, std::string_view origin) {
  const auto fail = [origin](const std::string& msg) { return ConfigError(std::string(origin) + ": " + msg); };

  const auto first_nl = text.find('\n');
  if (first_nl == std::string_view::npos) throw fail("missing header");
  const auto header = text::trim(text.substr(0, first_nl));
  constexpr std::string_view kVersion = "version:";
  if (!header.starts_with(kVersion)) throw fail("first line must be 'version: <id>'");

  PromptTemplate p;
  p.version = std::string(text::trim(header.substr(kVersion.size())));
  if (p.version.empty()) throw fail("empty version");

  const auto body = text.substr(first_nl + 1);
  const auto sys = body.find(kSystemMarker);
  const auto usr = body.find(kUserMarker);
  if (sys == std::string_view::npos || usr == std::string_view::npos || usr < sys) {
    throw fail("expected '=== system' followed by '=== user' sections");
  }
  const auto sys_start = sys + kSystemMarker.size();
  p.system = strip_trailing_newlines(body.substr(sys_start, usr - sys_start));
  p.user = strip_trailing_newlines(body.substr(usr + kUserMarker.size()));
  return p;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw ConfigError("unterminated placeholder in prompt template");
    out += tmpl.substr(pos, open - pos);
    const auto name = text::trim(tmpl.substr(open + 2, close - open - 2));
    const auto it = values.find(name);
    if (it == values.end()) throw ConfigError("no value for prompt placeholder {{" + std::string(name) + "}}");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

RenderedPrompt render(const PromptTemplate& prompt, const std::map<std::string, std::string, std::less<>>& values) {
  return {render_template(prompt.system, values), render_template(prompt.user, values)};
}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary library{
      PromptTemplate::parse(builtin_prompts::selector, "selector.prompt"),
      PromptTemplate::parse(builtin_prompts::scorer, "scorer.prompt"),
      PromptTemplate::parse(builtin_prompts::synonyms, "synonyms.prompt"),
      PromptTemplate::parse(builtin_prompts::adjudicator, "adjudicator.prompt"),
  };
  return library;
}

PromptLibrary PromptLibrary::load_dir(const std::filesystem::path& dir) {
  PromptLibrary lib = builtin();
  const auto load = [&dir](const char* name, PromptTemplate& slot) {
    const auto path = dir / (std::string(name) + ".prompt");
    std::ifstream in(path);
    if (!in) return;
    std::stringstream ss;
    ss << in.rdbuf();
    slot = PromptTemplate::parse(ss.str(), path.string());
  };
  load("selector", lib.selector);
  load("scorer", lib.scorer);
  load("synonyms", lib.synonyms);
  load("adjudicator", lib.adjudicator);
  return lib;
}

}  // namespace ontolink
