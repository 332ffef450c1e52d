#include <algorithm>
#include <regex>

#include "mtmeta/metrics.hpp"

namespace mtmeta {

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

struct V13aRules {
  // Symbols and punctuation except apostrophe, hyphen, period and comma.
  std::regex symbols{R"(([\{-\~\[-\` -\&\(-\+\:-\@\/]))"};
  std::regex period_comma_after{R"(([^0-9])([\.,]))"};
  std::regex period_comma_before{R"(([\.,])([^0-9]))"};
  std::regex dash_after_digit{R"(([0-9])(-))"};
};

const V13aRules& rules() {
  static const V13aRules r;
  return r;
}

}  // namespace

TokenizedSegment tokenize(std::string_view segment, const TokenizerOptions& options) {
  std::string line(segment);
  replace_all(line, "<skipped>", "");
  replace_all(line, "-\n", "");
  std::replace(line.begin(), line.end(), '\n', ' ');
  if (line.find('&') != std::string::npos) {
    replace_all(line, "&quot;", "\"");
    replace_all(line, "&amp;", "&");
    replace_all(line, "&lt;", "<");
    replace_all(line, "&gt;", ">");
  }
  if (options.lowercase) {
    std::transform(line.begin(), line.end(), line.begin(), [](unsigned char c) {
      return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    });
  }

  const auto& r = rules();
  line = " " + line + " ";
  line = std::regex_replace(line, r.symbols, " $1 ");
  line = std::regex_replace(line, r.period_comma_after, "$1 $2 ");
  line = std::regex_replace(line, r.period_comma_before, " $1 $2");
  line = std::regex_replace(line, r.dash_after_digit, "$1 $2 ");

  TokenizedSegment out;
  out.original = std::string(segment);
  std::size_t i = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace mtmeta
