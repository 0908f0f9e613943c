#include <algorithm>
#include <cctype>

#include "irrkit/io.hpp"
#include "irrkit/sentiment.hpp"

namespace irrkit {

namespace {

struct CodePoint {
  char32_t value = 0;
  std::size_t offset = 0;
  std::size_t length = 1;
};

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && i + 3 < s.size()) {
      len = 4;
      cp = ((b0 & 0x07u) << 18) | ((s[i + 1] & 0x3Fu) << 12) | ((s[i + 2] & 0x3Fu) << 6) |
           (s[i + 3] & 0x3Fu);
    } else if (b0 >= 0xE0 && i + 2 < s.size()) {
      len = 3;
      cp = ((b0 & 0x0Fu) << 12) | ((s[i + 1] & 0x3Fu) << 6) | (s[i + 2] & 0x3Fu);
    } else if (b0 >= 0xC0 && i + 1 < s.size()) {
      len = 2;
      cp = ((b0 & 0x1Fu) << 6) | (s[i + 1] & 0x3Fu);
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

bool is_unicode_space(char32_t c) {
  return c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_unicode_punct(char32_t c) {
  return (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB5 && c != 0xBA) ||
         (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         (c >= 0xFF01 && c <= 0xFF0F);
}

bool is_word_char(char32_t c) {
  if (c < 0x80) return std::isalnum(static_cast<int>(c)) || c == '_';
  return !is_unicode_space(c) && !is_unicode_punct(c);
}

bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

bool is_terminal(char32_t c) { return c == '.' || c == '!' || c == '?'; }

bool is_word_byte(unsigned char b) { return std::isalnum(b) || b == '_' || b >= 0x80; }

}  // namespace

std::vector<std::string> Tokenization::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

Tokenization tokenize(std::string_view body, const LexiconSet& lexicons) {
  const std::string text = io::to_lower(body);
  const auto cps = decode_utf8(text);

  // Emoticons and slang survive as single tokens even when they contain
  // punctuation. Longest match wins.
  std::vector<std::string_view> protected_terms;
  for (const auto* set : {&lexicons.positive_emoticons, &lexicons.negative_emoticons,
                          &lexicons.slang_terms}) {
    for (const auto& t : *set) {
      if (!t.empty()) protected_terms.push_back(t);
    }
  }
  std::sort(protected_terms.begin(), protected_terms.end(),
            [](std::string_view a, std::string_view b) {
              return a.size() != b.size() ? a.size() > b.size() : a < b;
            });

  Tokenization out;
  std::string word;
  int tokens_since_terminal = 0;
  bool in_terminal_run = false;
  // Index of the token that '!' characters directly follow, or -1.
  long exclaim_target = -1;

  auto flush_word = [&] {
    if (word.empty()) return;
    out.tokens.emplace_back(std::move(word));
    word.clear();
    ++tokens_since_terminal;
    exclaim_target = static_cast<long>(out.tokens.size()) - 1;
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const CodePoint& cp = cps[i];
    const bool at_boundary = word.empty() && (i == 0 || !is_word_char(cps[i - 1].value));

    if (at_boundary) {
      std::string_view match;
      for (auto term : protected_terms) {
        if (text.compare(cp.offset, term.size(), term) != 0) continue;
        const std::size_t end = cp.offset + term.size();
        const bool ends_in_word = is_word_byte(static_cast<unsigned char>(term.back()));
        if (ends_in_word && end < text.size() &&
            is_word_byte(static_cast<unsigned char>(text[end]))) {
          continue;
        }
        match = term;
        break;
      }
      if (!match.empty()) {
        out.tokens.emplace_back(std::string(match));
        ++tokens_since_terminal;
        in_terminal_run = false;
        exclaim_target = static_cast<long>(out.tokens.size()) - 1;
        const std::size_t end = cp.offset + match.size();
        while (i < cps.size() && cps[i].offset < end) ++i;
        continue;
      }
    }

    const char32_t c = cp.value;
    const bool decimal_point = c == '.' && i > 0 && i + 1 < cps.size() &&
                               is_digit(cps[i - 1].value) && is_digit(cps[i + 1].value) &&
                               !word.empty();
    const bool inner_apostrophe = (c == '\'' || c == 0x2019) && !word.empty() &&
                                  i + 1 < cps.size() && is_word_char(cps[i + 1].value);
    if (is_word_char(c) || decimal_point || inner_apostrophe) {
      word.append(text, cp.offset, cp.length);
      in_terminal_run = false;
      exclaim_target = -1;
      ++i;
      continue;
    }

    flush_word();
    if (c == '?') ++out.question_marks;
    if (c == '!') {
      ++out.exclamation_marks;
      if (exclaim_target >= 0) ++out.tokens[static_cast<std::size_t>(exclaim_target)].trailing_exclamations;
    } else {
      exclaim_target = -1;
    }
    if (is_terminal(c)) {
      if (!in_terminal_run && tokens_since_terminal > 0) {
        ++out.sentences;
        tokens_since_terminal = 0;
      }
      in_terminal_run = true;
    } else {
      in_terminal_run = false;
    }
    ++i;
  }
  flush_word();
  if (tokens_since_terminal > 0) ++out.sentences;
  return out;
}

namespace {

// Strength of token i when it is a lexicon hit, 0 otherwise.
double hit_strength(std::span<const Token> tokens, std::size_t i, const LexiconSet& lex) {
  if (!lex.is_positive(tokens[i].text) && !lex.is_negative(tokens[i].text)) return 0.0;
  double strength = 2.0;
  if (i > 0) {
    auto it = lex.booster_terms.find(tokens[i - 1].text);
    if (it != lex.booster_terms.end()) strength += it->second;
  }
  if (tokens[i].trailing_exclamations >= 2) strength += 1.0;
  return std::clamp(strength, 1.0, 5.0);
}

}  // namespace

SentimentStrength sentiment_strength(std::span<const Token> tokens, const LexiconSet& lex) {
  SentimentStrength s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double strength = hit_strength(tokens, i, lex);
    if (strength == 0.0) continue;
    if (lex.is_positive(tokens[i].text)) s.positive = std::max(s.positive, strength);
    if (lex.is_negative(tokens[i].text)) s.negative = std::max(s.negative, strength);
  }
  return s;
}

int strong_emotion_tokens(std::span<const Token> tokens, const LexiconSet& lex) {
  int count = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (hit_strength(tokens, i, lex) >= 3.0) ++count;
  }
  return count;
}

bool death_mention(std::string_view body, const LexiconSet& lexicons) {
  // Lowercase with whitespace runs collapsed to one space.
  std::string text;
  text.reserve(body.size());
  bool space = false;
  for (char ch : body) {
    const auto b = static_cast<unsigned char>(ch);
    if (std::isspace(b)) {
      space = true;
      continue;
    }
    if (space && !text.empty()) text += ' ';
    space = false;
    text += static_cast<char>(std::tolower(b));
  }

  for (const auto& phrase : lexicons.death_terms) {
    if (phrase.text.empty()) continue;
    std::size_t pos = text.find(phrase.text);
    while (pos != std::string::npos) {
      const std::size_t end = pos + phrase.text.size();
      const bool start_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(text[pos - 1]));
      const bool end_ok = phrase.stem || end == text.size() ||
                          !is_word_byte(static_cast<unsigned char>(text[end]));
      if (start_ok && end_ok) return true;
      pos = text.find(phrase.text, pos + 1);
    }
  }
  return false;
}

}  // namespace irrkit
